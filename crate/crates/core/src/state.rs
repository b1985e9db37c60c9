//! Eigenvectors rebuilt from rapidities as products of collective pairs.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{enumerate_basis, raising_amplitude, Occupation};
use crate::bethe::{RapiditySet, ZeroModeRoots, POLE_GUARD};
use crate::error::{Error, Result};
use crate::model::ModelSpace;
use crate::oracle::{build_hamiltonian, diagonalize_sector, OracleEigenpairs, SectorMatrix};

/// A pair product whose norm falls below this fraction of its
/// cancellation-free magnitude counts as the null vector.
pub const ZERO_STATE_TOL: f64 = 1e-12;

/// `sum_j a_j S+(j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollectivePair {
    pub a: Vec<Complex64>,
}

impl CollectivePair {
    /// `S+_x` with `a_j = c_j / (1 - c_j^2 x)`.
    pub fn for_root(model: &ModelSpace, x: Complex64) -> Result<Self> {
        let a = model
            .shells()
            .iter()
            .map(|s| {
                let d = 1.0 - s.c_squared * x;
                if d.norm() < POLE_GUARD {
                    Err(Error::PoleProximity {
                        distance: d.norm(),
                        context: "collective pair amplitude",
                    })
                } else {
                    Ok(s.c / d)
                }
            })
            .collect::<Result<_>>()?;
        Ok(CollectivePair { a })
    }

    /// `S+_0`, `a_j = c_j`.
    pub fn s_plus_zero(model: &ModelSpace) -> Self {
        CollectivePair {
            a: model
                .shells()
                .iter()
                .map(|s| Complex64::new(s.c, 0.0))
                .collect(),
        }
    }

    /// Direction of `S+_x` as `x -> infinity`, `a_j = 1/c_j`.
    pub fn at_infinity(model: &ModelSpace) -> Self {
        CollectivePair {
            a: model
                .shells()
                .iter()
                .map(|s| Complex64::new(1.0 / s.c, 0.0))
                .collect(),
        }
    }
}

/// Normalized pair product in the orthonormal occupation basis of its sector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpandedState {
    pub pairs: usize,
    pub states: Vec<Occupation>,
    /// Unit norm, global phase chosen so the largest component is real and positive.
    pub amplitudes: Vec<Complex64>,
    /// Norm before normalization.
    pub norm: f64,
}

impl ExpandedState {
    /// Real parts of the amplitudes; `None` if any imaginary part exceeds `tol`.
    pub fn real_amplitudes(&self, tol: f64) -> Option<Vec<f64>> {
        self.amplitudes
            .iter()
            .map(|v| (v.im.abs() <= tol).then_some(v.re))
            .collect()
    }
}

/// Expands `prod_f (sum_j a_fj S+(j)) |0>` one factor at a time.
pub fn expand_product(model: &ModelSpace, factors: &[CollectivePair]) -> Result<ExpandedState> {
    let p = model.p();
    if factors.iter().any(|f| f.a.len() != p) {
        return Err(Error::InvalidArgument(
            "pair amplitude length differs from shell count".into(),
        ));
    }
    let n = factors.len();
    if n > model.omega_total() {
        return Err(Error::ZeroState);
    }
    let shells = model.shells();
    let mut basis = enumerate_basis(model, 0);
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    // same recursion on magnitudes: the norm the product would have without cancellation
    let mut bound = vec![1.0f64];
    for (k, factor) in factors.iter().enumerate() {
        let next = enumerate_basis(model, k + 1);
        let mut out = vec![Complex64::new(0.0, 0.0); next.dim()];
        let mut out_bound = vec![0.0f64; next.dim()];
        for ((occ, &amp), &mag) in basis.states().iter().zip(&amps).zip(&bound) {
            if mag == 0.0 {
                continue;
            }
            for (j, s) in shells.iter().enumerate() {
                let kj = occ.0[j];
                if kj == s.omega {
                    continue;
                }
                let mut target = occ.clone();
                target.0[j] += 1;
                let row = next.index_of(&target).expect("target in sector");
                let ladder = raising_amplitude(kj, s.omega);
                out[row] += amp * factor.a[j] * ladder;
                out_bound[row] += mag * factor.a[j].norm() * ladder;
            }
        }
        basis = next;
        amps = out;
        bound = out_bound;
    }
    let norm = amps.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let scale = bound.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm.is_nan() || norm <= ZERO_STATE_TOL * scale {
        return Err(Error::ZeroState);
    }
    let pivot = amps.iter().copied().fold(Complex64::new(0.0, 0.0), |a, v| {
        if v.norm() > a.norm() {
            v
        } else {
            a
        }
    });
    let phase = pivot.conj() / pivot.norm();
    let amplitudes = amps.iter().map(|v| v * phase / norm).collect();
    Ok(ExpandedState {
        pairs: n,
        states: basis.states().to_vec(),
        amplitudes,
        norm,
    })
}

/// `S+_0 (S+_inf)^r prod_i S+_(x_i) |0>` for a nonzero level.
pub fn nonzero_state(model: &ModelSpace, sol: &RapiditySet) -> Result<ExpandedState> {
    let mut factors = vec![CollectivePair::s_plus_zero(model)];
    factors.extend(std::iter::repeat_n(
        CollectivePair::at_infinity(model),
        sol.roots_at_infinity,
    ));
    for &x in &sol.x {
        factors.push(CollectivePair::for_root(model, x)?);
    }
    expand_product(model, &factors)
}

/// `prod_i S+_(x_i) |0>` for a zero-energy state.
pub fn zero_state(model: &ModelSpace, roots: &ZeroModeRoots) -> Result<ExpandedState> {
    let factors = roots
        .x
        .iter()
        .map(|&x| CollectivePair::for_root(model, x))
        .collect::<Result<Vec<_>>>()?;
    expand_product(model, &factors)
}

/// How well a rebuilt state matches the exact eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenCheck {
    /// `|| h psi - E psi ||` for the unit vector `psi`.
    pub residual: f64,
    /// Squared projection of `psi` onto the exact eigenspace nearest `h`.
    pub overlap: f64,
}

pub fn verify_eigenpair(model: &ModelSpace, state: &ExpandedState, h: f64) -> Result<EigenCheck> {
    let sector = build_hamiltonian(model, state.pairs)?;
    let eig = diagonalize_sector(model, state.pairs)?;
    verify_against(&sector, &eig, state, h)
}

/// [`verify_eigenpair`] with the sector matrix and its eigenpairs supplied,
/// for checking many states of one sector.
pub fn verify_against(
    sector: &SectorMatrix,
    eig: &OracleEigenpairs,
    state: &ExpandedState,
    h: f64,
) -> Result<EigenCheck> {
    if sector.pairs != state.pairs || eig.pairs != state.pairs {
        return Err(Error::InvalidArgument(
            "state and sector differ in pair number".into(),
        ));
    }
    let psi = DVector::from_vec(state.amplitudes.clone());
    let hm = sector.entries.map(|v| Complex64::new(v, 0.0));
    let residual = (&hm * &psi - &psi * Complex64::new(h, 0.0)).norm();

    let tol = 1e-8 * eig.h_max().max(1.0);
    let nearest = eig
        .h_values
        .iter()
        .copied()
        .min_by(|a, b| (a - h).abs().total_cmp(&(b - h).abs()))
        .ok_or(Error::EmptySector(state.pairs))?;
    let overlap = eig
        .h_values
        .iter()
        .enumerate()
        .filter(|(_, &v)| (v - nearest).abs() < tol)
        .map(|(i, _)| {
            let col = eig.vectors.column(i);
            col.iter()
                .zip(&state.amplitudes)
                .map(|(&c, a)| a * c)
                .sum::<Complex64>()
                .norm_sqr()
        })
        .sum();
    Ok(EigenCheck { residual, overlap })
}
