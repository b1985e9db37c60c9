//! Path tracking in `s = 1/g` for the family
//! `sum_j Omega_j c_j^2/(1 - c_j^2 x_m) + 2 sum_(k!=m) 1/(x_m - x_k) + 2 s/x_m = 0`.
//!
//! For large `s` the roots cluster at the poles `1/c_j^2`; `k` roots at a
//! pole of capacity `Omega` sit at `x = (1 + u/(2s))/c^2` with `u` the
//! zeros of the generalized Laguerre polynomial `L_k^(-Omega-1)(-u)`.
//! Every pole occupation gives one path. `s = 1` is the nonzero-energy
//! system and `s -> 0` the zero-energy one.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::newton::{corrector, damped_newton};
use super::scalar::pole_groups;
use super::zero_system;
use crate::error::Result;
use crate::model::ModelSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Target {
    /// End at `s = 1`.
    Nonzero,
    /// End at `s -> 0`, dropping paths with a root collapsing onto `x = 0`.
    Zero,
}

#[derive(Debug, Clone)]
pub(crate) struct Paths {
    pub starts: usize,
    pub failed: usize,
    pub endpoints: Vec<Vec<Complex64>>,
}

const G_START: f64 = 1e-5;
const S_END_ZERO: f64 = 1e-9;
const COLLAPSE_RADIUS: f64 = 1e-4;
const THETA: f64 = 0.7;
const DT_INIT: f64 = 0.005;
const DT_MAX: f64 = 0.05;
const DT_MIN: f64 = 1e-9;
const DIVERGED: f64 = 1e10;
const MAX_STEPS: usize = 20_000;

type C = Complex64;

/// Occupations `k_g <= Omega_g` of the pole groups with `sum k_g = n`.
fn occupations(caps: &[usize], n: usize) -> Vec<Vec<usize>> {
    fn rec(caps: &[usize], j: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if j == caps.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let tail: usize = caps[j + 1..].iter().sum();
        for k in left.saturating_sub(tail)..=left.min(caps[j]) {
            cur.push(k);
            rec(caps, j + 1, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(caps, 0, n, &mut Vec::new(), &mut out);
    out
}

/// Zeros `u` of `-Omega/u_m + 2 sum_(k!=m) 1/(u_m - u_k) + 1 = 0`.
fn cluster_offsets(k: usize, omega: usize) -> Vec<C> {
    if k == 0 {
        return vec![];
    }
    // L_k^(a)(v) = sum_i (-1)^i binom(k + a, k - i) v^i / i!, a = -Omega - 1
    let a = -(omega as f64) - 1.0;
    let coeff = |i: usize| -> f64 {
        let m = k - i;
        let mut b = 1.0;
        for t in 0..m {
            b *= (k as f64 + a - t as f64) / (t + 1) as f64;
        }
        let fact: f64 = (1..=i).map(|v| v as f64).product();
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sign * b / fact
    };
    let lead = coeff(k);
    let mut comp = DMatrix::<f64>::zeros(k, k);
    for i in 1..k {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..k {
        comp[(i, k - 1)] = -coeff(i) / lead;
    }
    let guess: Vec<C> = comp.complex_eigenvalues().iter().map(|v| -v).collect();
    let om = omega as f64;
    let system = |u: &[C]| -> Result<(DVector<C>, DMatrix<C>)> {
        let n = u.len();
        let mut f = DVector::zeros(n);
        let mut jac = DMatrix::zeros(n, n);
        for m in 0..n {
            let mut r = C::new(1.0, 0.0) - om / u[m];
            let mut dr = om / (u[m] * u[m]);
            for q in 0..n {
                if q != m {
                    let d = u[m] - u[q];
                    r += 2.0 / d;
                    dr -= 2.0 / (d * d);
                    jac[(m, q)] = 2.0 / (d * d);
                }
            }
            f[m] = r;
            jac[(m, m)] = dr;
        }
        Ok((f, jac))
    };
    damped_newton(&system, &guess, 1e-13, 100, None).z
}

struct Homotopy {
    ln_g0: f64,
    ln_g1: f64,
    bump: f64,
}

impl Homotopy {
    fn ln_g(&self, t: f64) -> C {
        C::new(
            (1.0 - t) * self.ln_g0 + t * self.ln_g1,
            self.bump * t * (1.0 - t),
        )
    }

    fn s(&self, t: f64) -> C {
        if t >= 1.0 {
            return C::new((-self.ln_g1).exp(), 0.0);
        }
        (-self.ln_g(t)).exp()
    }

    fn ds_dt(&self, t: f64) -> C {
        let dln = C::new(self.ln_g1 - self.ln_g0, self.bump * (1.0 - 2.0 * t));
        -self.s(t) * dln
    }
}

fn min_separation(x: &[C]) -> f64 {
    let mut sep = f64::INFINITY;
    for i in 0..x.len() {
        for k in i + 1..x.len() {
            sep = sep.min((x[i] - x[k]).norm());
        }
        sep = sep.min(x[i].norm());
    }
    sep
}

enum Tracked {
    Reached(Vec<C>),
    /// A root fell onto `x = 0`; only possible on the way to `s -> 0`.
    Collapsed,
    Lost,
}

/// Follows one path from `t = 0` to `t = 1`.
fn track(model: &ModelSpace, start: &[C], hom: &Homotopy, dt_max: f64, target: Target) -> Tracked {
    let mut x = start.to_vec();
    let mut t = 0.0;
    let mut dt = DT_INIT.min(dt_max);
    let mut steps = 0usize;
    while t < 1.0 {
        steps += 1;
        if steps > MAX_STEPS {
            return Tracked::Lost;
        }
        let step = dt.min(1.0 - t);
        let s = hom.s(t);
        let Ok((_, jac)) = zero_system(model, &x, s) else {
            return Tracked::Lost;
        };
        // dR/ds = 2/x_m
        let rhs = DVector::from_iterator(x.len(), x.iter().map(|v| -2.0 / v * hom.ds_dt(t)));
        let Some(tangent) = jac.lu().solve(&rhs) else {
            return Tracked::Lost;
        };
        let pred: Vec<C> = x
            .iter()
            .zip(tangent.iter())
            .map(|(a, d)| a + d * step)
            .collect();
        let s_next = hom.s(t + step);
        let system = |z: &[C]| zero_system(model, z, s_next);
        let accepted = corrector(&system, &pred, 6, 1e-11).filter(|(z, _)| {
            let jump = z
                .iter()
                .zip(&pred)
                .fold(0.0f64, |a, (p, q)| a.max((p - q).norm()));
            jump < 0.1 * min_separation(&x).min(min_separation(z))
        });
        match accepted {
            Some((z, iters)) => {
                if z.iter().any(|v| v.norm() > DIVERGED) {
                    return Tracked::Lost;
                }
                if target == Target::Zero && z.iter().any(|v| v.norm() < COLLAPSE_RADIUS) {
                    return Tracked::Collapsed;
                }
                x = z;
                t = if 1.0 - (t + step) < 1e-12 {
                    1.0
                } else {
                    t + step
                };
                if iters <= 3 {
                    dt = (dt * 1.5).min(dt_max);
                }
            }
            None => {
                dt *= 0.5;
                if dt < DT_MIN {
                    return Tracked::Lost;
                }
            }
        }
    }
    Tracked::Reached(x)
}

/// Starts at weak coupling for every pole occupation and tracks each path
/// to the target. Failed or colliding paths are retried once on the
/// mirrored complex detour.
pub(crate) fn track_all(model: &ModelSpace, nroots: usize, target: Target) -> Result<Paths> {
    let groups = pole_groups(model);
    let caps: Vec<usize> = groups.iter().map(|g| g.1).collect();
    let occs = occupations(&caps, nroots);
    let ln_g0 = G_START.ln();
    let ln_g1 = match target {
        Target::Nonzero => 0.0,
        Target::Zero => -S_END_ZERO.ln(),
    };
    let span = (ln_g1 - ln_g0).abs();
    let s0 = C::new(1.0 / G_START, 0.0);

    let mut endpoints: Vec<Vec<C>> = Vec::new();
    let mut failed = 0;
    for occ in &occs {
        let mut guess = Vec::with_capacity(nroots);
        for (&(pole, omega), &k) in groups.iter().zip(occ) {
            for u in cluster_offsets(k, omega) {
                guess.push(pole * (1.0 + u / (2.0 * s0)));
            }
        }
        let system = |z: &[C]| zero_system(model, z, s0);
        // residuals are ill-scaled near the poles; converge on the step size
        let Some((start, _)) = corrector(&system, &guess, 50, 1e-13) else {
            log::debug!("continuation start for occupation {occ:?} did not converge");
            failed += 1;
            continue;
        };
        let mut end = None;
        for (theta, dt_max) in [(THETA, DT_MAX), (-THETA, 0.2 * DT_MAX)] {
            let hom = Homotopy {
                ln_g0,
                ln_g1,
                bump: theta * span / 4.0,
            };
            match track(model, &start, &hom, dt_max, target) {
                Tracked::Reached(x) => {
                    let collides = endpoints.iter().any(|e| super::same_roots(e, &x, 1e-6));
                    if !collides || theta < 0.0 {
                        end = Some(Some(x));
                        break;
                    }
                }
                Tracked::Collapsed => {
                    end = Some(None);
                    break;
                }
                Tracked::Lost => {}
            }
        }
        let x = match end {
            Some(Some(x)) => x,
            Some(None) => continue,
            None => {
                log::debug!("path for occupation {occ:?} lost");
                failed += 1;
                continue;
            }
        };
        endpoints.push(x);
    }
    Ok(Paths {
        starts: occs.len(),
        failed,
        endpoints,
    })
}
