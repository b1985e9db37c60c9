use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::Result;

pub(crate) type System<'a> =
    dyn Fn(&[Complex64]) -> Result<(DVector<Complex64>, DMatrix<Complex64>)> + 'a;

/// Multiplicative deflation `prod_k (1/|w(z) - w_k|^2 + 1)` on a linear
/// projection `w(z) = sum_i weights_i z_i` of the unknowns.
pub(crate) struct Deflation<'a> {
    pub known: &'a [Complex64],
    pub weights: Vec<Complex64>,
}

impl Deflation<'_> {
    pub fn project(&self, z: &[Complex64]) -> Complex64 {
        z.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    /// Directional derivative of `ln M` along `step`.
    fn log_derivative(&self, z: &[Complex64], step: &[Complex64]) -> f64 {
        let w = self.project(z);
        let dw = self.project(step);
        self.known
            .iter()
            .map(|&k| {
                let d = w - k;
                let d2 = d.norm_sqr();
                let m = 1.0 / d2 + 1.0;
                let dm = -2.0 * (d.conj() * dw).re / (d2 * d2);
                dm / m
            })
            .sum()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct NewtonOutcome {
    pub z: Vec<Complex64>,
    pub residual: f64,
    pub converged: bool,
}

fn max_norm(v: &DVector<Complex64>) -> f64 {
    v.iter().fold(0.0, |a, c| a.max(c.norm()))
}

/// Damped Newton iteration on a holomorphic system. Holomorphy makes the
/// complex update identical to Newton on the stacked real and imaginary
/// parts with the real Jacobian.
pub(crate) fn damped_newton(
    system: &System<'_>,
    start: &[Complex64],
    tol: f64,
    max_iter: usize,
    deflation: Option<&Deflation<'_>>,
) -> NewtonOutcome {
    let mut z = start.to_vec();
    let (mut f, mut jac) = match system(&z) {
        Ok(v) => v,
        Err(_) => {
            return NewtonOutcome {
                z,
                residual: f64::INFINITY,
                converged: false,
            }
        }
    };
    let mut res = max_norm(&f);
    for _ in 0..max_iter {
        if res < tol {
            return NewtonOutcome {
                z,
                residual: res,
                converged: true,
            };
        }
        let Some(step) = jac.clone().lu().solve(&(-&f)) else {
            break;
        };
        let mut step: Vec<Complex64> = step.iter().copied().collect();
        if let Some(d) = deflation {
            let g = d.log_derivative(&z, &step);
            let tau = 1.0 / (1.0 - g);
            if tau.is_finite() && tau > 0.0 {
                step.iter_mut().for_each(|s| *s *= tau);
            }
        }
        // backtrack until the residual decreases
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1.0 / 4096.0 {
            let trial: Vec<Complex64> = z.iter().zip(&step).map(|(a, s)| a + s * lambda).collect();
            if let Ok((ft, jt)) = system(&trial) {
                let rt = max_norm(&ft);
                if rt.is_finite() && rt < res * (1.0 - 1e-4 * lambda) || (rt < tol) {
                    z = trial;
                    f = ft;
                    jac = jt;
                    res = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            // no descent along the Newton direction; stall
            return NewtonOutcome {
                converged: res < tol,
                z,
                residual: res,
            };
        }
    }
    NewtonOutcome {
        converged: res < tol,
        z,
        residual: res,
    }
}

/// Plain (undamped) Newton corrector used by the path tracker; succeeds only
/// when the update contracts quickly.
pub(crate) fn corrector(
    system: &System<'_>,
    start: &[Complex64],
    max_iter: usize,
    step_tol: f64,
) -> Option<(Vec<Complex64>, usize)> {
    let mut z = start.to_vec();
    let mut last = f64::INFINITY;
    for it in 0..max_iter {
        let (f, jac) = system(&z).ok()?;
        let step = jac.lu().solve(&(-f))?;
        let size = step.iter().fold(0.0f64, |a, c| a.max(c.norm()));
        let scale = 1.0 + z.iter().fold(0.0f64, |a, c| a.max(c.norm()));
        if !size.is_finite() || (it > 0 && size > 0.5 * last) && size > step_tol * scale {
            return None;
        }
        z.iter_mut().zip(step.iter()).for_each(|(a, s)| *a += s);
        if size <= step_tol * scale {
            return Some((z, it + 1));
        }
        last = size;
    }
    None
}
