use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use super::modes::{mode_index, mode_of};
use crate::boundary_algebra::{
    scalar_cayley, scalar_inverse_cayley, BoundaryUnitary, DEFAULT_CLUSTER_TOL,
};
use crate::error::{Error, Result};
use crate::scalar::{lit, re, to_f64, Real};

pub const MIN_RADIAL_CELLS: usize = 8;

/// Boundary condition carried by one angular mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeCondition<T> {
    Dirichlet,
    /// `u′(1) + k u(1) = 0`, i.e. boundary form `k|u(1)|²`.
    Robin(T),
}

impl<T: Real> ModeCondition<T> {
    pub fn is_dirichlet(&self) -> bool {
        matches!(self, Self::Dirichlet)
    }

    pub fn robin_k(&self) -> Option<T> {
        match *self {
            Self::Dirichlet => None,
            Self::Robin(k) => Some(k),
        }
    }

    /// Diagonal entry of the boundary unitary: `1` or `C(-k)`.
    pub fn eigenvalue(&self) -> Complex<T> {
        match *self {
            Self::Dirichlet => re(T::one()),
            Self::Robin(k) => scalar_cayley(-k),
        }
    }
}

/// Asymptotic law `k_m ~ coefficient · |m|^exponent` for the untruncated
/// family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthDeclaration<T> {
    #[serde(rename = "c")]
    pub coefficient: T,
    #[serde(rename = "p")]
    pub exponent: T,
}

impl<T: Real> GrowthDeclaration<T> {
    fn grows(&self) -> bool {
        self.exponent > T::zero() && self.coefficient != T::zero()
    }

    pub fn unbounded_above(&self) -> bool {
        self.grows() && self.coefficient > T::zero()
    }

    pub fn unbounded_below(&self) -> bool {
        self.grows() && self.coefficient < T::zero()
    }
}

/// Boundary unitary on the disk that is diagonal in the angular Fourier
/// basis, together with the radial discretization used for its spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskModeModel<T: Real> {
    m_max: usize,
    modes: Vec<ModeCondition<T>>,
    radial_cells: usize,
    mass: T,
    growth: Option<GrowthDeclaration<T>>,
}

impl<T: Real> DiskModeModel<T> {
    pub fn new(
        m_max: usize,
        modes: Vec<ModeCondition<T>>,
        radial_cells: usize,
        mass: T,
    ) -> Result<Self> {
        if modes.len() != 2 * m_max + 1 {
            return Err(Error::Shape(format!(
                "expected {} mode conditions for m_max = {m_max}, got {}",
                2 * m_max + 1,
                modes.len()
            )));
        }
        if radial_cells < MIN_RADIAL_CELLS {
            return Err(Error::Domain(format!(
                "radial grid needs at least {MIN_RADIAL_CELLS} cells, got {radial_cells}"
            )));
        }
        if !(mass > T::zero() && mass.is_finite()) {
            return Err(Error::Domain("mass must be positive and finite".into()));
        }
        if let Some(i) = modes
            .iter()
            .position(|c| c.robin_k().is_some_and(|k| !k.is_finite()))
        {
            return Err(Error::Domain(format!(
                "mode {} has a non-finite Robin coefficient",
                mode_of(m_max, i)
            )));
        }
        Ok(Self {
            m_max,
            modes,
            radial_cells,
            mass,
            growth: None,
        })
    }

    pub fn uniform(
        m_max: usize,
        condition: ModeCondition<T>,
        radial_cells: usize,
        mass: T,
    ) -> Result<Self> {
        Self::new(m_max, vec![condition; 2 * m_max + 1], radial_cells, mass)
    }

    pub fn from_fn(
        m_max: usize,
        radial_cells: usize,
        mass: T,
        f: impl Fn(i64) -> ModeCondition<T>,
    ) -> Result<Self> {
        let modes = (0..=2 * m_max).map(|i| f(mode_of(m_max, i))).collect();
        Self::new(m_max, modes, radial_cells, mass)
    }

    pub fn with_growth(mut self, growth: GrowthDeclaration<T>) -> Result<Self> {
        if !(growth.coefficient.is_finite() && growth.exponent.is_finite()) {
            return Err(Error::Domain("growth declaration must be finite".into()));
        }
        self.growth = Some(growth);
        Ok(self)
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn radial_cells(&self) -> usize {
        self.radial_cells
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn growth(&self) -> Option<GrowthDeclaration<T>> {
        self.growth
    }

    pub fn condition(&self, m: i64) -> Option<ModeCondition<T>> {
        mode_index(self.m_max, m).map(|i| self.modes[i])
    }

    pub fn conditions(&self) -> impl Iterator<Item = (i64, ModeCondition<T>)> + '_ {
        self.modes
            .iter()
            .enumerate()
            .map(|(i, &c)| (mode_of(self.m_max, i), c))
    }

    /// The model as a `(2 m_max + 1)`-dimensional diagonal boundary unitary.
    pub fn boundary_unitary(&self) -> Result<BoundaryUnitary<T>> {
        let entries: Vec<Complex<T>> = self.modes.iter().map(ModeCondition::eigenvalue).collect();
        BoundaryUnitary::diagonal(&entries)
    }

    /// Reads a diagonal boundary unitary back into per-mode conditions.
    /// Entries within `DEFAULT_CLUSTER_TOL` of `1` become Dirichlet.
    pub fn from_boundary_unitary(
        u: &BoundaryUnitary<T>,
        radial_cells: usize,
        mass: T,
    ) -> Result<Self> {
        let n = u.dim();
        if n.is_multiple_of(2) {
            return Err(Error::Shape(format!(
                "mode truncation needs odd dimension, got {n}"
            )));
        }
        let m = u.matrix();
        let tol = lit::<T>(DEFAULT_CLUSTER_TOL);
        for r in 0..n {
            for c in 0..n {
                if r != c && m[(r, c)].norm_sqr().sqrt() > tol {
                    return Err(Error::Domain(
                        "boundary unitary is not diagonal in the mode basis".into(),
                    ));
                }
            }
        }
        let modes = (0..n)
            .map(|i| {
                let lambda = m[(i, i)];
                if (lambda - re(T::one())).norm_sqr().sqrt() <= tol {
                    ModeCondition::Dirichlet
                } else {
                    ModeCondition::Robin(-scalar_inverse_cayley(lambda))
                }
            })
            .collect();
        Self::new((n - 1) / 2, modes, radial_cells, mass)
    }
}

/// Mode-by-mode composition law: Dirichlet in either factor wins, Robin
/// coefficients average.
pub fn modewise_compose<T: Real>(
    a: &DiskModeModel<T>,
    b: &DiskModeModel<T>,
) -> Result<DiskModeModel<T>> {
    if a.m_max != b.m_max {
        return Err(Error::Shape(format!(
            "truncation mismatch: m_max {} vs {}",
            a.m_max, b.m_max
        )));
    }
    if a.radial_cells != b.radial_cells || a.mass != b.mass {
        return Err(Error::Shape("radial grid or mass mismatch".into()));
    }
    let half = lit::<T>(0.5);
    let modes = a
        .modes
        .iter()
        .zip(&b.modes)
        .map(|(x, y)| match (x, y) {
            (ModeCondition::Robin(k1), ModeCondition::Robin(k2)) => {
                ModeCondition::Robin((*k1 + *k2) * half)
            }
            _ => ModeCondition::Dirichlet,
        })
        .collect();
    let mut out = DiskModeModel::new(a.m_max, modes, a.radial_cells, a.mass)?;
    out.growth = compose_growth(a.growth, b.growth);
    Ok(out)
}

fn compose_growth<T: Real>(
    a: Option<GrowthDeclaration<T>>,
    b: Option<GrowthDeclaration<T>>,
) -> Option<GrowthDeclaration<T>> {
    let half = lit::<T>(0.5);
    let scaled = |g: GrowthDeclaration<T>| GrowthDeclaration {
        coefficient: g.coefficient * half,
        exponent: g.exponent,
    };
    match (a, b) {
        (None, None) => None,
        (Some(g), None) | (None, Some(g)) => Some(scaled(g)),
        (Some(g1), Some(g2)) => {
            if g1.exponent > g2.exponent {
                Some(scaled(g1))
            } else if g2.exponent > g1.exponent {
                Some(scaled(g2))
            } else {
                Some(GrowthDeclaration {
                    coefficient: (g1.coefficient + g2.coefficient) * half,
                    exponent: g1.exponent,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeGapCheck<T> {
    pub is_gapped: bool,
    pub is_semigapped: bool,
    pub k_sup: T,
    pub k_inf: T,
    /// Set when the growth declaration makes `K` unbounded.
    pub accumulation: bool,
}

/// Gap flags for the untruncated family. A growth declaration overrides
/// whatever the truncation suggests.
pub fn mode_gap_check<T: Real>(model: &DiskModeModel<T>) -> ModeGapCheck<T> {
    let ks: Vec<T> = model
        .modes
        .iter()
        .filter_map(ModeCondition::robin_k)
        .collect();
    let mut k_sup = ks.iter().fold(T::zero(), |acc, k| acc.max(k.abs()));
    let mut k_inf = ks
        .iter()
        .fold(lit::<T>(f64::INFINITY), |acc, &k| acc.min(k));
    let (above, below) = model.growth.map_or((false, false), |g| {
        (g.unbounded_above(), g.unbounded_below())
    });
    let accumulation = above || below;
    if accumulation {
        k_sup = lit(f64::INFINITY);
    }
    if below {
        k_inf = lit(f64::NEG_INFINITY);
    }
    ModeGapCheck {
        is_gapped: k_sup.is_finite() && !accumulation,
        is_semigapped: k_inf > lit(f64::NEG_INFINITY),
        k_sup,
        k_inf,
        accumulation,
    }
}

/// One mode entry of [`DiskModelSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeEntrySpec {
    pub m: i64,
    #[serde(flatten)]
    pub condition: ModeConditionSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModeConditionSpec {
    Dirichlet,
    Robin { k: f64 },
}

/// Serializable form of [`DiskModeModel`]. Modes not listed take
/// `default`; omitting both is an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskModelSpec {
    #[serde(rename = "M_max", alias = "m_max")]
    pub m_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<ModeConditionSpec>,
    #[serde(default)]
    pub modes: Vec<ModeEntrySpec>,
    #[serde(rename = "radial_M", alias = "radial_cells")]
    pub radial_cells: usize,
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthDeclaration<f64>>,
}

fn default_mass() -> f64 {
    crate::interval_cavity::DEFAULT_MASS
}

impl<T: Real> DiskModeModel<T> {
    pub fn spec(&self) -> DiskModelSpec {
        DiskModelSpec {
            m_max: self.m_max,
            default: None,
            modes: self
                .conditions()
                .map(|(m, c)| ModeEntrySpec {
                    m,
                    condition: match c {
                        ModeCondition::Dirichlet => ModeConditionSpec::Dirichlet,
                        ModeCondition::Robin(k) => ModeConditionSpec::Robin { k: to_f64(k) },
                    },
                })
                .collect(),
            radial_cells: self.radial_cells,
            mass: to_f64(self.mass),
            growth: self.growth.map(|g| GrowthDeclaration {
                coefficient: to_f64(g.coefficient),
                exponent: to_f64(g.exponent),
            }),
        }
    }

    pub fn from_spec(spec: &DiskModelSpec) -> Result<Self> {
        let convert = |c: ModeConditionSpec| match c {
            ModeConditionSpec::Dirichlet => ModeCondition::Dirichlet,
            ModeConditionSpec::Robin { k } => ModeCondition::Robin(lit::<T>(k)),
        };
        let mut modes: Vec<Option<ModeCondition<T>>> =
            vec![spec.default.map(convert); 2 * spec.m_max + 1];
        for entry in &spec.modes {
            let i = mode_index(spec.m_max, entry.m).ok_or_else(|| {
                Error::Domain(format!(
                    "mode {} outside the truncation |m| <= {}",
                    entry.m, spec.m_max
                ))
            })?;
            modes[i] = Some(convert(entry.condition));
        }
        let modes = modes
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| {
                    Error::Domain(format!(
                        "mode {} has no condition and no default",
                        mode_of(spec.m_max, i)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let model = Self::new(spec.m_max, modes, spec.radial_cells, lit(spec.mass))?;
        match spec.growth {
            Some(g) => model.with_growth(GrowthDeclaration {
                coefficient: lit(g.coefficient),
                exponent: lit(g.exponent),
            }),
            None => Ok(model),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary_algebra::compose;

    fn robin(m_max: usize, k: f64) -> DiskModeModel<f64> {
        DiskModeModel::uniform(m_max, ModeCondition::Robin(k), 32, 0.5).unwrap()
    }

    #[test]
    fn neumann_is_idempotent() {
        let n = robin(4, 0.0);
        assert_eq!(modewise_compose(&n, &n).unwrap(), n);
    }

    #[test]
    fn dirichlet_mode_survives_and_robin_halves() {
        let d0 = DiskModeModel::from_fn(3, 32, 0.5, |m| {
            if m == 0 {
                ModeCondition::Dirichlet
            } else {
                ModeCondition::Robin(0.0)
            }
        })
        .unwrap();
        let w = modewise_compose(&d0, &robin(3, 2.0)).unwrap();
        for (m, c) in w.conditions() {
            if m == 0 {
                assert!(c.is_dirichlet());
            } else {
                assert_eq!(c, ModeCondition::Robin(1.0));
            }
        }
    }

    #[test]
    fn robin_one_and_three_average_to_two() {
        let w = modewise_compose(&robin(5, 1.0), &robin(5, 3.0)).unwrap();
        assert!(w.conditions().all(|(_, c)| c == ModeCondition::Robin(2.0)));
    }

    #[test]
    fn agrees_with_matrix_compose() {
        let a = DiskModeModel::from_fn(6, 16, 0.5, |m| {
            if m % 3 == 0 {
                ModeCondition::Dirichlet
            } else {
                ModeCondition::Robin(0.3 * m as f64)
            }
        })
        .unwrap();
        let b = DiskModeModel::from_fn(6, 16, 0.5, |m| {
            ModeCondition::Robin(1.0 - 0.1 * (m * m) as f64)
        })
        .unwrap();
        let by_modes = modewise_compose(&a, &b)
            .unwrap()
            .boundary_unitary()
            .unwrap();
        let by_matrix = compose(
            &a.boundary_unitary().unwrap(),
            &b.boundary_unitary().unwrap(),
        )
        .unwrap();
        assert!((by_modes.matrix() - by_matrix.matrix()).norm() < 1e-12);
    }

    #[test]
    fn truncation_mismatch_is_rejected() {
        assert!(matches!(
            modewise_compose(&robin(2, 1.0), &robin(3, 1.0)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn gap_flags_follow_declarations() {
        let bounded = mode_gap_check(&robin(4, 1.0));
        assert!(bounded.is_gapped && bounded.is_semigapped);
        assert_eq!(bounded.k_sup, 1.0);

        let down = DiskModeModel::from_fn(4, 16, 0.5, |m| ModeCondition::Robin(-((m * m) as f64)))
            .unwrap()
            .with_growth(GrowthDeclaration {
                coefficient: -1.0,
                exponent: 2.0,
            })
            .unwrap();
        let g = mode_gap_check(&down);
        assert!(!g.is_gapped && !g.is_semigapped && g.accumulation);

        let up = DiskModeModel::from_fn(4, 16, 0.5, |m| ModeCondition::Robin((m * m) as f64))
            .unwrap()
            .with_growth(GrowthDeclaration {
                coefficient: 1.0,
                exponent: 2.0,
            })
            .unwrap();
        let g = mode_gap_check(&up);
        assert!(!g.is_gapped && g.is_semigapped);
        assert_eq!(g.k_inf, 0.0);
    }

    #[test]
    fn unitary_round_trip() {
        let model = DiskModeModel::from_fn(3, 16, 0.5, |m| {
            if m == 1 {
                ModeCondition::Dirichlet
            } else {
                ModeCondition::Robin(m as f64 - 0.5)
            }
        })
        .unwrap();
        let back =
            DiskModeModel::from_boundary_unitary(&model.boundary_unitary().unwrap(), 16, 0.5)
                .unwrap();
        for ((_, a), (_, b)) in model.conditions().zip(back.conditions()) {
            match (a, b) {
                (ModeCondition::Robin(x), ModeCondition::Robin(y)) => {
                    assert!((x - y).abs() < 1e-12)
                }
                (x, y) => assert_eq!(x, y),
            }
        }
    }

    #[test]
    fn spec_round_trip_with_default() {
        let json = r#"{"M_max":2,"default":{"kind":"robin","k":1.5},
            "modes":[{"m":0,"kind":"dirichlet"}],"radial_M":16,
            "growth":{"c":1.0,"p":2.0}}"#;
        let spec: DiskModelSpec = serde_json::from_str(json).unwrap();
        let model = DiskModeModel::<f64>::from_spec(&spec).unwrap();
        assert!(model.condition(0).unwrap().is_dirichlet());
        assert_eq!(model.condition(-2), Some(ModeCondition::Robin(1.5)));
        assert_eq!(model.mass(), 0.5);
        let again = DiskModeModel::<f64>::from_spec(&model.spec()).unwrap();
        assert_eq!(again, model);
    }

    #[test]
    fn spec_without_default_needs_every_mode() {
        let spec = DiskModelSpec {
            m_max: 1,
            default: None,
            modes: vec![ModeEntrySpec {
                m: 0,
                condition: ModeConditionSpec::Dirichlet,
            }],
            radial_cells: 16,
            mass: 0.5,
            growth: None,
        };
        assert!(DiskModeModel::<f64>::from_spec(&spec).is_err());
    }
}
