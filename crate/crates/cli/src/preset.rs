//! Named boundary conditions and explicit boundary matrices.

use bc_core::interval_cavity::rows_to_matrix;
use bc_core::scalar::cx;
use bc_core::BoundaryUnitary;
use nalgebra::Complex;
use serde::{Deserialize, Serialize};

/// A boundary unitary in config form.
///
/// Presets: `dirichlet`, `neumann`, `robin:<k>` (`K = kI`), `alpha:<a>`
/// (`U = -e^{ia} I`) and `periodic` (interval only).
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum BoundarySpec {
    Preset(String),
    /// Full matrix, rows of `[re, im]` pairs.
    Matrix {
        matrix: Vec<Vec<[f64; 2]>>,
    },
    /// Diagonal entries as `[re, im]` pairs.
    Diagonal {
        diagonal: Vec<[f64; 2]>,
    },
}

fn number(field: &str, name: &str, text: &str) -> Result<f64, String> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("field {field}: preset '{name}' needs a finite number after ':'"))
}

impl BoundarySpec {
    /// Builds the unitary of dimension `dim`; errors name `field`.
    pub fn resolve(&self, field: &str, dim: usize) -> Result<BoundaryUnitary<f64>, String> {
        let built = match self {
            Self::Preset(name) => match name.split_once(':') {
                None => match name.as_str() {
                    "dirichlet" => Ok(BoundaryUnitary::dirichlet(dim)),
                    "neumann" => Ok(BoundaryUnitary::neumann(dim)),
                    "periodic" if dim == 2 => Ok(BoundaryUnitary::periodic()),
                    "periodic" => {
                        return Err(format!(
                            "field {field}: preset 'periodic' needs dimension 2, got {dim}"
                        ))
                    }
                    _ => return Err(format!("field {field}: unknown preset '{name}'")),
                },
                Some(("robin", k)) => BoundaryUnitary::robin(&vec![number(field, name, k)?; dim]),
                Some(("alpha", a)) => {
                    BoundaryUnitary::from_alphas(&vec![number(field, name, a)?; dim])
                }
                Some(_) => return Err(format!("field {field}: unknown preset '{name}'")),
            },
            Self::Matrix { matrix } => {
                let m = rows_to_matrix::<f64>(matrix).map_err(|e| format!("field {field}: {e}"))?;
                if m.nrows() != dim {
                    return Err(format!(
                        "field {field}: expected a {dim}x{dim} matrix, got {}x{}",
                        m.nrows(),
                        m.ncols()
                    ));
                }
                BoundaryUnitary::new(m)
            }
            Self::Diagonal { diagonal } => {
                if diagonal.len() != dim {
                    return Err(format!(
                        "field {field}: expected {dim} diagonal entries, got {}",
                        diagonal.len()
                    ));
                }
                let entries: Vec<Complex<f64>> = diagonal.iter().map(|&[r, i]| cx(r, i)).collect();
                BoundaryUnitary::diagonal(&entries)
            }
        };
        built.map_err(|e| format!("field {field}: {e}"))
    }
}
