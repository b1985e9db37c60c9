//! Shell model space for the separable pairing Hamiltonian.
//!
//! A model is an ordered list of shells, each carrying a pair capacity
//! `omega` (= j + 1/2 for a bare j-shell) and a real coupling amplitude
//! `c > 0`. The amplitudes must satisfy `sum c^2 = 1`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the amplitude normalization.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// One shell as it appears in a config file: either `two_j` or `omega`,
/// plus the squared coupling amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawShell {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_j: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<i64>,
    pub c_squared: f64,
}

/// Top-level model config: `{"shells": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub shells: Vec<RawShell>,
}

/// A validated shell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellLevel {
    pub label: String,
    pub omega: usize,
    pub c_squared: f64,
    /// Positive square root of `c_squared`.
    pub c: f64,
}

impl ShellLevel {
    /// `c^(2m)` for any integer `m`.
    pub fn c_pow_even(&self, m: i32) -> f64 {
        self.c_squared.powi(m)
    }

    /// `c^(2m+1)` for any integer `m`.
    pub fn c_pow_odd(&self, m: i32) -> f64 {
        self.c * self.c_squared.powi(m)
    }

    /// Pole position `1/c^2` of the collective-pair amplitudes.
    pub fn pole(&self) -> f64 {
        1.0 / self.c_squared
    }
}

/// Validated, immutable model space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpace {
    shells: Vec<ShellLevel>,
}

impl ModelSpace {
    pub fn shells(&self) -> &[ShellLevel] {
        &self.shells
    }

    /// Number of shells `p`.
    pub fn p(&self) -> usize {
        self.shells.len()
    }

    pub fn omegas(&self) -> Vec<usize> {
        self.shells.iter().map(|s| s.omega).collect()
    }

    /// Total pair capacity, the largest admissible pair number.
    pub fn omega_total(&self) -> usize {
        self.shells.iter().map(|s| s.omega).sum()
    }

    /// `sum_j c_j^2 Omega_j`: the single nonzero N=1 level and the
    /// full-occupation level.
    pub fn weighted_capacity(&self) -> f64 {
        self.shells
            .iter()
            .map(|s| s.c_squared * s.omega as f64)
            .sum()
    }

    /// Lowest-weight eigenvalue `Lambda_m = -(1/2) sum_j c_j^(2m) Omega_j`.
    pub fn lambda(&self, m: i32) -> f64 {
        -0.5 * self
            .shells
            .iter()
            .map(|s| s.c_pow_even(m) * s.omega as f64)
            .sum::<f64>()
    }

    /// Pairs of shell indices with identical amplitudes (coincident poles).
    pub fn coincident_shells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.shells.len() {
            for b in a + 1..self.shells.len() {
                if self.shells[a].c_squared == self.shells[b].c_squared {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Raw form suitable for re-validation or serialization.
    pub fn to_config(&self) -> ModelConfig {
        ModelConfig {
            shells: self
                .shells
                .iter()
                .map(|s| RawShell {
                    label: s.label.clone(),
                    two_j: None,
                    omega: Some(s.omega as i64),
                    c_squared: s.c_squared,
                })
                .collect(),
        }
    }

    /// Parses and validates a JSON model config.
    pub fn from_json_str(text: &str) -> Result<Self> {
        // serde_json messages carry the line and column
        let cfg: ModelConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        validate_model(&cfg.shells)
    }
}

/// Validates raw shell data. Amplitudes are stored as given; nothing is
/// renormalized.
pub fn validate_model(raw: &[RawShell]) -> Result<ModelSpace> {
    if raw.is_empty() {
        return Err(Error::EmptyModel);
    }
    let mut seen = HashSet::new();
    let mut shells = Vec::with_capacity(raw.len());
    for (i, r) in raw.iter().enumerate() {
        let invalid = |reason: String| Error::InvalidShell {
            label: if r.label.is_empty() {
                format!("#{i}")
            } else {
                r.label.clone()
            },
            reason,
        };
        if !seen.insert(r.label.clone()) {
            return Err(Error::DuplicateLabel(r.label.clone()));
        }
        let omega = match (r.two_j, r.omega) {
            (Some(_), Some(_)) => {
                return Err(invalid("give either `two_j` or `omega`, not both".into()))
            }
            (None, None) => return Err(invalid("one of `two_j` or `omega` is required".into())),
            (Some(tj), None) => {
                if tj <= 0 || tj % 2 == 0 {
                    return Err(invalid(format!(
                        "two_j = {tj} must be an odd positive integer"
                    )));
                }
                (tj + 1) / 2
            }
            (None, Some(om)) => om,
        };
        if omega < 1 {
            return Err(invalid(format!("omega = {omega} must be at least 1")));
        }
        if !r.c_squared.is_finite() || r.c_squared <= 0.0 {
            return Err(invalid(format!(
                "c_squared = {} must be positive (remove decoupled shells)",
                r.c_squared
            )));
        }
        shells.push(ShellLevel {
            label: r.label.clone(),
            omega: omega as usize,
            c_squared: r.c_squared,
            c: r.c_squared.sqrt(),
        });
    }
    let sum: f64 = shells.iter().map(|s| s.c_squared).sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Normalization { sum });
    }
    let model = ModelSpace { shells };
    for (a, b) in model.coincident_shells() {
        log::warn!(
            "shells `{}` and `{}` share c^2 = {}; the model is equivalent to a merged shell \
             and the rapidity solver cannot resolve every level",
            model.shells[a].label,
            model.shells[b].label,
            model.shells[a].c_squared
        );
    }
    Ok(model)
}

/// Lowest-weight eigenvalue `Lambda_m` of `S^0_m` on the pair vacuum.
pub fn lambda_m(model: &ModelSpace, m: i32) -> f64 {
    model.lambda(m)
}

/// Built-in models.
pub mod builtin {
    use super::{validate_model, ModelSpace, RawShell};

    pub const NAMES: [&str; 7] = [
        "fig1",
        "table1a",
        "table1b",
        "table1c",
        "table1d",
        "table2-shell5",
        "table2-shell6",
    ];

    fn shells(spec: &[(&str, i64, f64)]) -> Vec<RawShell> {
        spec.iter()
            .map(|&(label, two_j, c_squared)| RawShell {
                label: label.to_string(),
                two_j: Some(two_j),
                omega: None,
                c_squared,
            })
            .collect()
    }

    fn three_shell(c2: [f64; 3]) -> Vec<RawShell> {
        shells(&[("1/2", 1, c2[0]), ("3/2", 3, c2[1]), ("5/2", 5, c2[2])])
    }

    /// Raw shell data for a built-in model name.
    pub fn raw(name: &str) -> Option<Vec<RawShell>> {
        let raw = match name {
            "fig1" => three_shell([0.1, 0.3, 0.6]),
            "table1a" => three_shell([0.1, 0.2, 0.7]),
            "table1b" => three_shell([0.2, 0.1, 0.7]),
            "table1c" => three_shell([0.2, 0.7, 0.1]),
            "table1d" => three_shell([0.7, 0.2, 0.1]),
            "table2-shell5" => shells(&[
                ("1/2", 1, 0.2),
                ("3/2", 3, 0.3),
                ("5/2", 5, 0.22),
                ("9/2", 9, 0.28),
            ]),
            "table2-shell6" => shells(&[
                ("1/2", 1, 0.2),
                ("3/2", 3, 0.14),
                ("5/2", 5, 0.22),
                ("7/2", 7, 0.28),
                ("11/2", 11, 0.16),
            ]),
            _ => return None,
        };
        Some(raw)
    }

    pub fn get(name: &str) -> Option<ModelSpace> {
        raw(name).map(|r| validate_model(&r).expect("built-in models are valid"))
    }

    pub fn all() -> Vec<(&'static str, ModelSpace)> {
        NAMES.iter().map(|&n| (n, get(n).unwrap())).collect()
    }
}
