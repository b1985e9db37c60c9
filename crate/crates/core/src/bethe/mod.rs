//! Rapidity equations for the separable pairing Hamiltonian.
//!
//! Nonzero-energy eigenstates of `h = S+_0 S-_0` in the `N`-pair sector are
//! `S+_0 S+_(x_1) ... S+_(x_(N-1)) |0>` with collective pairs
//! `S+_x = sum_j c_j / (1 - c_j^2 x) S+(j)`. Writing `x_i = alpha y_i`, the
//! unknowns `{y_i}, alpha` satisfy
//!
//! ```text
//! -(1/2) sum_j Omega_j c_j^2 alpha / (1 - alpha y_i c_j^2) = 1/y_i + sum_(k!=i) 1/(y_i - y_k)
//! sum_i 1/y_i = 1
//! ```
//!
//! and the energy follows from `alpha = -2 / (h + 2 Lambda_1)`.
//! Zero-energy states are `S+_(x_1) ... S+_(x_N) |0>` with
//! `sum_j Omega_j c_j^2 / (1 - x_i c_j^2) + 2 sum_(k!=i) 1/(x_i - x_k) = 0`.
//!
//! When `2N - 1 > Omega_total`, `r = 2N - 1 - Omega_total` of the rapidities
//! sit at infinity. Those factors are proportional to
//! `S+_(-1) = sum_j c_j^(-1) S+(j)`, and the finite roots solve the same
//! equations as the mirror sector `Omega_total + 1 - N`.

mod continuation;
mod newton;
mod scalar;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelSpace;
use newton::{damped_newton, Deflation};

pub use scalar::{n2_energies, zero_roots_single_pair};

/// `|sum 1/x_i|` below this fraction of `sum 1/|x_i|` is treated as a
/// divergent `alpha`.
const BALANCED_TOL: f64 = 1e-6;

/// Denominators smaller than this raise `PoleProximity`.
pub const POLE_GUARD: f64 = 1e-12;
/// Solutions with `|1 - c_j^2 x| <= POLE_EXCLUSION` are rejected as non-states.
pub const POLE_EXCLUSION: f64 = 1e-8;
/// Largest tolerated `|Im h|` for an accepted level.
pub const IMAG_TOL: f64 = 1e-9;

/// How a solution was seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedStrategy {
    /// Path tracking from the weak-coupling limit of an auxiliary coupling.
    Continuation,
    /// Sign-change brackets between consecutive poles (scalar equations).
    Bracket,
    /// Seeded pseudo-random complex starts with deflation.
    Random,
    /// Starts built from reference eigenvalues via `alpha(h)`.
    OracleSeeded,
}

impl std::str::FromStr for SeedStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "continuation" => Ok(SeedStrategy::Continuation),
            "bracket" => Ok(SeedStrategy::Bracket),
            "random" => Ok(SeedStrategy::Random),
            "oracle-seeded" => Ok(SeedStrategy::OracleSeeded),
            other => Err(Error::InvalidArgument(format!(
                "unknown strategy `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Newton stops once the largest residual is below this.
    pub tolerance: f64,
    /// Largest residual accepted when Newton stalls before `tolerance`.
    pub accept_tolerance: f64,
    pub max_iterations: usize,
    pub strategy: SeedStrategy,
    /// Start budget for the random and oracle-seeded strategies.
    pub max_starts: usize,
    pub seed: u64,
    /// Relative root-set distance below which two solutions coincide.
    pub duplicate_radius: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-12,
            accept_tolerance: 1e-10,
            max_iterations: 200,
            strategy: SeedStrategy::Continuation,
            max_starts: 400,
            seed: 0,
            duplicate_radius: 1e-6,
        }
    }
}

/// Solution of the nonzero-energy equations for one level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RapiditySet {
    pub pairs: usize,
    /// Finite `y_i`.
    pub y: Vec<Complex64>,
    /// `None` when `alpha` diverges: every rapidity at infinity, or finite
    /// roots with `sum 1/x_i = 0`. Then `h = -2 Lambda_1` and `y` is empty.
    pub alpha: Option<Complex64>,
    /// Finite `x_i = alpha y_i`.
    pub x: Vec<Complex64>,
    pub roots_at_infinity: usize,
    pub h: f64,
    /// Largest residual of the equations at the solution.
    pub residual: f64,
    pub strategy: SeedStrategy,
}

/// Roots of the zero-energy equations for one state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroModeRoots {
    pub pairs: usize,
    pub x: Vec<Complex64>,
    pub residual: f64,
    pub strategy: SeedStrategy,
}

/// All nonzero levels found in one sector.
#[derive(Debug, Clone, Serialize)]
pub struct NonzeroSolve {
    pub pairs: usize,
    /// Descending in `h`.
    pub solutions: Vec<RapiditySet>,
    /// Number of levels the sector should hold, when known.
    pub expected: Option<usize>,
    pub starts: usize,
    pub failed_starts: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroSolve {
    pub pairs: usize,
    pub roots: Vec<ZeroModeRoots>,
    pub starts: usize,
    pub failed_starts: usize,
}

/// The unique nonzero `N = 1` level, `sum_j c_j^2 Omega_j`.
pub fn n1_energy(model: &ModelSpace) -> f64 {
    model.weighted_capacity()
}

fn guarded(d: Complex64, context: &'static str) -> Result<Complex64> {
    if d.norm() < POLE_GUARD {
        Err(Error::PoleProximity {
            distance: d.norm(),
            context,
        })
    } else {
        Ok(d)
    }
}

/// Residuals of the nonzero-energy equations at `(y, alpha)`: one per `y_i`
/// followed by `sum_i 1/y_i - 1`.
pub fn nonzero_residuals(
    model: &ModelSpace,
    y: &[Complex64],
    alpha: Complex64,
) -> Result<Vec<Complex64>> {
    Ok(nonzero_system(model, y, alpha)?.0.iter().copied().collect())
}

fn nonzero_system(
    model: &ModelSpace,
    y: &[Complex64],
    alpha: Complex64,
) -> Result<(DVector<Complex64>, DMatrix<Complex64>)> {
    let n = y.len();
    let mut f = DVector::zeros(n + 1);
    let mut jac = DMatrix::zeros(n + 1, n + 1);
    let one = Complex64::new(1.0, 0.0);
    let mut constraint = -one;
    for i in 0..n {
        let yi = guarded(y[i], "y_i = 0")?;
        let mut fi = -one / yi;
        let mut dfi_dyi = one / (yi * yi);
        let mut dfi_da = Complex64::new(0.0, 0.0);
        for s in model.shells() {
            let w = s.omega as f64 * s.c_squared;
            let d = guarded(one - alpha * yi * s.c_squared, "1 - alpha y c^2")?;
            fi -= 0.5 * w * alpha / d;
            dfi_dyi -= 0.5 * w * alpha * alpha * s.c_squared / (d * d);
            dfi_da -= 0.5 * w / (d * d);
        }
        for k in 0..n {
            if k == i {
                continue;
            }
            let diff = guarded(yi - y[k], "y_i = y_k")?;
            fi -= one / diff;
            dfi_dyi += one / (diff * diff);
            jac[(i, k)] = -one / (diff * diff);
        }
        f[i] = fi;
        jac[(i, i)] = dfi_dyi;
        jac[(i, n)] = dfi_da;
        constraint += one / yi;
        jac[(n, i)] = -one / (yi * yi);
    }
    f[n] = constraint;
    Ok((f, jac))
}

/// `h = -2/alpha - 2 Lambda_1`; errors when `Im h` is not negligible.
pub fn energy_from_alpha(model: &ModelSpace, alpha: Complex64) -> Result<f64> {
    let a = guarded(alpha, "alpha = 0")?;
    let h = -2.0 / a - 2.0 * model.lambda(1);
    if !h.re.is_finite() || h.im.abs() > IMAG_TOL * h.re.abs().max(1.0) {
        return Err(Error::NonPhysicalSolution(format!("complex energy {h}")));
    }
    Ok(h.re)
}

/// `alpha = -2 / (h + 2 Lambda_1)`; `h = -2 Lambda_1` is the pole of this map.
pub fn alpha_from_energy(model: &ModelSpace, h: f64) -> Result<Complex64> {
    let denom = h + 2.0 * model.lambda(1);
    if denom.abs() < POLE_GUARD {
        return Err(Error::NonPhysicalSolution(format!(
            "h = {h} equals -2 Lambda_1: alpha diverges"
        )));
    }
    Ok(Complex64::new(-2.0 / denom, 0.0))
}

/// Residuals of the zero-energy equations at `x`.
pub fn zero_residuals(model: &ModelSpace, x: &[Complex64]) -> Result<Vec<Complex64>> {
    Ok(zero_system(model, x, Complex64::new(0.0, 0.0))?
        .0
        .iter()
        .copied()
        .collect())
}

/// `R_m = sum_j Omega_j c_j^2/(1 - c_j^2 x_m) + 2 sum_(k!=m) 1/(x_m - x_k) + 2 s/x_m`.
/// `s = 0` gives the zero-energy equations, `s = 1` the finite part of the
/// nonzero-energy equations in `x` form.
pub(crate) fn zero_system(
    model: &ModelSpace,
    x: &[Complex64],
    s: Complex64,
) -> Result<(DVector<Complex64>, DMatrix<Complex64>)> {
    let n = x.len();
    let one = Complex64::new(1.0, 0.0);
    let mut f = DVector::zeros(n);
    let mut jac = DMatrix::zeros(n, n);
    for m in 0..n {
        let xm = x[m];
        let mut r = Complex64::new(0.0, 0.0);
        let mut dr = Complex64::new(0.0, 0.0);
        for sh in model.shells() {
            let d = guarded(one - sh.c_squared * xm, "1 - c^2 x")?;
            let w = sh.omega as f64 * sh.c_squared;
            r += w / d;
            dr += w * sh.c_squared / (d * d);
        }
        if s != Complex64::new(0.0, 0.0) {
            let xg = guarded(xm, "x = 0")?;
            r += 2.0 * s / xg;
            dr -= 2.0 * s / (xg * xg);
        }
        for k in 0..n {
            if k == m {
                continue;
            }
            let diff = guarded(xm - x[k], "x_i = x_k")?;
            r += 2.0 / diff;
            dr -= 2.0 / (diff * diff);
            jac[(m, k)] = 2.0 / (diff * diff);
        }
        f[m] = r;
        jac[(m, m)] = dr;
    }
    Ok((f, jac))
}

/// Largest distance in a greedy nearest-neighbour matching of two root sets.
pub fn root_set_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &ra in a {
        let mut best = f64::INFINITY;
        let mut best_k = None;
        for (k, &rb) in b.iter().enumerate() {
            if !used[k] && (ra - rb).norm() < best {
                best = (ra - rb).norm();
                best_k = Some(k);
            }
        }
        if let Some(k) = best_k {
            used[k] = true;
        }
        worst = worst.max(best);
    }
    worst
}

fn root_scale(x: &[Complex64]) -> f64 {
    1.0 + x.iter().fold(0.0f64, |a, v| a.max(v.norm()))
}

pub(crate) fn same_roots(a: &[Complex64], b: &[Complex64], radius: f64) -> bool {
    root_set_distance(a, b) < radius * root_scale(a).max(root_scale(b))
}

/// Non-real roots must come in conjugate pairs.
pub fn is_conjugate_closed(x: &[Complex64], tol: f64) -> bool {
    let conj: Vec<Complex64> = x.iter().map(|v| v.conj()).collect();
    root_set_distance(x, &conj) <= tol * root_scale(x)
}

fn clear_of_poles(model: &ModelSpace, x: &[Complex64]) -> bool {
    x.iter().all(|&xi| {
        model
            .shells()
            .iter()
            .all(|s| (1.0 - s.c_squared * xi).norm() > POLE_EXCLUSION)
    })
}

/// Number of finite rapidities and rapidities at infinity for sector `n >= 1`.
pub fn rapidity_split(model: &ModelSpace, n: usize) -> (usize, usize) {
    let m = n - 1;
    let cap = model.omega_total();
    if 2 * m < cap {
        (m, 0)
    } else {
        let finite = cap - n;
        (finite, m - finite)
    }
}

impl RapiditySet {
    /// Builds and validates a solution from finite `x` roots (already
    /// refined or not) by polishing the `(y, alpha)` system.
    fn from_x(
        model: &ModelSpace,
        pairs: usize,
        x: &[Complex64],
        at_infinity: usize,
        opts: &SolverOptions,
        strategy: SeedStrategy,
    ) -> Option<Self> {
        if x.is_empty() {
            let h = -2.0 * model.lambda(1);
            return Some(RapiditySet {
                pairs,
                y: vec![],
                alpha: None,
                x: vec![],
                roots_at_infinity: at_infinity,
                h,
                residual: 0.0,
                strategy,
            });
        }
        let inv_sum: Complex64 = x.iter().map(|v| 1.0 / v).sum();
        let inv_scale: f64 = x.iter().map(|v| 1.0 / v.norm()).sum();
        if inv_sum.norm() < BALANCED_TOL * inv_scale {
            return Self::balanced(model, pairs, x, at_infinity, opts, strategy);
        }
        let alpha = 1.0 / inv_sum;
        let mut z: Vec<Complex64> = x.iter().map(|v| v / alpha).collect();
        z.push(alpha);
        Self::polish(model, pairs, &z, at_infinity, opts, strategy)
    }

    /// Roots with `sum 1/x_i` near zero, where `alpha` diverges: polished in
    /// the `x` form, which stays regular there.
    fn balanced(
        model: &ModelSpace,
        pairs: usize,
        x: &[Complex64],
        at_infinity: usize,
        opts: &SolverOptions,
        strategy: SeedStrategy,
    ) -> Option<Self> {
        let one = Complex64::new(1.0, 0.0);
        let system = |x: &[Complex64]| zero_system(model, x, one);
        let out = damped_newton(&system, x, opts.tolerance, opts.max_iterations, None);
        if !(out.converged || out.residual <= opts.accept_tolerance) {
            return None;
        }
        let x = out.z;
        let inv_sum: Complex64 = x.iter().map(|v| 1.0 / v).sum();
        let inv_scale: f64 = x.iter().map(|v| 1.0 / v.norm()).sum();
        if inv_sum.norm() > opts.accept_tolerance.max(1e-10) * inv_scale {
            // close to, but not at, the divergence
            let alpha = 1.0 / inv_sum;
            let mut z: Vec<Complex64> = x.iter().map(|v| v / alpha).collect();
            z.push(alpha);
            return Self::polish(model, pairs, &z, at_infinity, opts, strategy);
        }
        if !clear_of_poles(model, &x) || !is_conjugate_closed(&x, 1e-7) {
            return None;
        }
        Some(RapiditySet {
            pairs,
            y: vec![],
            alpha: None,
            x,
            roots_at_infinity: at_infinity,
            h: -2.0 * model.lambda(1),
            residual: out.residual,
            strategy,
        })
    }

    /// Newton-polishes `z = (y, alpha)` and applies the acceptance rules.
    fn polish(
        model: &ModelSpace,
        pairs: usize,
        z: &[Complex64],
        at_infinity: usize,
        opts: &SolverOptions,
        strategy: SeedStrategy,
    ) -> Option<Self> {
        let n = z.len() - 1;
        let system = |z: &[Complex64]| nonzero_system(model, &z[..n], z[n]);
        let out = damped_newton(&system, z, opts.tolerance, opts.max_iterations, None);
        if !(out.converged || out.residual <= opts.accept_tolerance) {
            return None;
        }
        let y = out.z[..n].to_vec();
        let alpha = out.z[n];
        let x: Vec<Complex64> = y.iter().map(|v| v * alpha).collect();
        if !clear_of_poles(model, &x) || !is_conjugate_closed(&x, 1e-7) {
            return None;
        }
        let h = energy_from_alpha(model, alpha).ok()?;
        Some(RapiditySet {
            pairs,
            y,
            alpha: Some(alpha),
            x,
            roots_at_infinity: at_infinity,
            h,
            residual: out.residual,
            strategy,
        })
    }

    /// Largest residual of the equations, recomputed from the stored roots.
    pub fn max_residual(&self, model: &ModelSpace) -> Result<f64> {
        match self.alpha {
            None if self.x.is_empty() => Ok(0.0),
            None => Ok(zero_system(model, &self.x, Complex64::new(1.0, 0.0))?
                .0
                .iter()
                .fold(0.0, |a, r| a.max(r.norm()))),
            Some(alpha) => Ok(nonzero_residuals(model, &self.y, alpha)?
                .iter()
                .fold(0.0, |a, r| a.max(r.norm()))),
        }
    }
}

fn push_unique_level(found: &mut Vec<RapiditySet>, cand: RapiditySet, radius: f64) -> bool {
    let dup = found.iter().any(|f| {
        (f.h - cand.h).abs() < radius * (1.0 + f.h.abs()) && same_roots(&f.x, &cand.x, radius)
    });
    if !dup {
        found.push(cand);
    }
    !dup
}

/// Solves for every nonzero-energy level of sector `n >= 2`.
///
/// `reference` holds known nonzero levels (from exact diagonalization); it
/// sets the expected count and seeds the oracle-seeded strategy.
pub fn solve_nonzero(
    model: &ModelSpace,
    n: usize,
    opts: &SolverOptions,
    reference: Option<&[f64]>,
) -> Result<NonzeroSolve> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "solve_nonzero needs N >= 2; N = 1 is given by n1_energy".into(),
        ));
    }
    if n > model.omega_total() {
        return Err(Error::PairsOutOfRange {
            n,
            capacity: model.omega_total(),
        });
    }
    let (finite, at_inf) = rapidity_split(model, n);
    let mut found = Vec::new();
    let mut starts = 0;
    let mut failed = 0;

    if finite == 0 {
        starts = 1;
        let sol = RapiditySet::from_x(model, n, &[], at_inf, opts, opts.strategy).unwrap();
        found.push(sol);
    } else {
        match opts.strategy {
            SeedStrategy::Continuation | SeedStrategy::Bracket => {
                let paths = continuation::track_all(model, finite, continuation::Target::Nonzero)?;
                starts = paths.starts;
                failed = paths.failed;
                for x in paths.endpoints {
                    match RapiditySet::from_x(
                        model,
                        n,
                        &x,
                        at_inf,
                        opts,
                        SeedStrategy::Continuation,
                    ) {
                        Some(sol)
                            if sol.h > crate::oracle::ZERO_THRESHOLD * sol.h.abs().max(1.0) =>
                        {
                            push_unique_level(&mut found, sol, opts.duplicate_radius);
                        }
                        // h = 0 endpoints are killed by S+_0
                        Some(_) => {}
                        None => failed += 1,
                    }
                }
            }
            SeedStrategy::Random | SeedStrategy::OracleSeeded => {
                let targets: Vec<Option<(f64, Complex64)>> =
                    if opts.strategy == SeedStrategy::OracleSeeded {
                        let levels = reference.ok_or_else(|| {
                            Error::InvalidArgument(
                                "oracle-seeded strategy needs reference levels".into(),
                            )
                        })?;
                        levels
                            .iter()
                            .filter_map(|&h| alpha_from_energy(model, h).ok().map(|a| Some((h, a))))
                            .collect()
                    } else {
                        vec![None]
                    };
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                let per_target = (opts.max_starts / targets.len().max(1)).max(1);
                let poles: Vec<f64> = model.shells().iter().map(|sh| sh.pole()).collect();
                // finite roots solve the s = 1 member of the x-form family;
                // scaling row m by x_m removes the spurious decay at infinity
                let system = |x: &[Complex64]| {
                    let (f, jac) = zero_system(model, x, Complex64::new(1.0, 0.0))?;
                    let k = x.len();
                    let fs = DVector::from_fn(k, |m, _| x[m] * f[m]);
                    let js = DMatrix::from_fn(k, k, |m, q| {
                        x[m] * jac[(m, q)]
                            + if m == q {
                                f[m]
                            } else {
                                Complex64::new(0.0, 0.0)
                            }
                    });
                    Ok((fs, js))
                };
                let mut known_sums: Vec<Complex64> = Vec::new();
                for target in &targets {
                    if target.is_some_and(|(h, _)| {
                        found
                            .iter()
                            .any(|f: &RapiditySet| (f.h - h).abs() < 1e-6 * h.abs().max(1.0))
                    }) {
                        continue;
                    }
                    for attempt in 0..per_target {
                        starts += 1;
                        // roots scattered around the poles, where they sit at weak coupling
                        let mut x: Vec<Complex64> = (0..finite)
                            .map(|_| {
                                let pole = poles[rng.random_range(0..poles.len())];
                                let spread = [0.05, 0.5, 0.5, 2.0][rng.random_range(0..4)];
                                pole * Complex64::new(
                                    1.0 + spread * rng.random_range(-1.0..1.0),
                                    spread * rng.random_range(-1.0..1.0),
                                )
                            })
                            .collect();
                        if let Some((_, alpha)) = target.filter(|_| attempt % 2 == 0) {
                            // rescale so that sum 1/x = 1/alpha
                            let inv: Complex64 = x.iter().map(|v| 1.0 / v).sum();
                            let k = alpha * inv;
                            x.iter_mut().for_each(|v| *v *= k);
                        }
                        let deflation = Deflation {
                            known: &known_sums,
                            weights: vec![Complex64::new(1.0, 0.0); finite],
                        };
                        let out = damped_newton(
                            &system,
                            &x,
                            opts.tolerance,
                            opts.max_iterations,
                            Some(&deflation),
                        );
                        if !(out.converged || out.residual <= opts.accept_tolerance) {
                            failed += 1;
                            continue;
                        }
                        match RapiditySet::from_x(model, n, &out.z, at_inf, opts, opts.strategy) {
                            Some(sol)
                                if sol.h > crate::oracle::ZERO_THRESHOLD * sol.h.abs().max(1.0) =>
                            {
                                let sum = sol.x.iter().sum();
                                let h = sol.h;
                                if push_unique_level(&mut found, sol, opts.duplicate_radius) {
                                    known_sums.push(sum);
                                }
                                if target
                                    .is_some_and(|(t, _)| (t - h).abs() < 1e-6 * t.abs().max(1.0))
                                {
                                    break;
                                }
                            }
                            Some(_) => {}
                            None => failed += 1,
                        }
                        if reference.is_some_and(|r| found.len() >= r.len()) {
                            break;
                        }
                    }
                }
            }
        }
    }
    found.sort_by(|a, b| b.h.total_cmp(&a.h));
    Ok(NonzeroSolve {
        pairs: n,
        solutions: found,
        expected: reference.map(|r| r.len()),
        starts,
        failed_starts: failed,
    })
}

/// Solves for every zero-energy root set of sector `n >= 1`.
pub fn solve_zero(model: &ModelSpace, n: usize, opts: &SolverOptions) -> Result<ZeroSolve> {
    if n == 0 {
        return Err(Error::InvalidArgument("solve_zero needs N >= 1".into()));
    }
    if n > model.omega_total() {
        return Err(Error::PairsOutOfRange {
            n,
            capacity: model.omega_total(),
        });
    }
    if n == 1 {
        let roots = zero_roots_single_pair(model);
        let count = roots.len();
        return Ok(ZeroSolve {
            pairs: 1,
            roots: roots
                .into_iter()
                .map(|x| {
                    let residual = zero_residuals(model, &[Complex64::new(x, 0.0)])
                        .map(|r| r[0].norm())
                        .unwrap_or(f64::INFINITY);
                    ZeroModeRoots {
                        pairs: 1,
                        x: vec![Complex64::new(x, 0.0)],
                        residual,
                        strategy: SeedStrategy::Bracket,
                    }
                })
                .collect(),
            starts: count,
            failed_starts: 0,
        });
    }
    if 2 * n > model.omega_total() {
        // mirror of S+_0 acting below half filling, which is injective
        return Ok(ZeroSolve {
            pairs: n,
            roots: vec![],
            starts: 0,
            failed_starts: 0,
        });
    }
    let mut found: Vec<ZeroModeRoots> = Vec::new();
    let system = |z: &[Complex64]| zero_system(model, z, Complex64::new(0.0, 0.0));
    let accept =
        |x: Vec<Complex64>, strategy: SeedStrategy, found: &mut Vec<ZeroModeRoots>| -> bool {
            let out = damped_newton(&system, &x, opts.tolerance, opts.max_iterations, None);
            if !(out.converged || out.residual <= opts.accept_tolerance) {
                return false;
            }
            let x = out.z;
            if !clear_of_poles(model, &x) || !is_conjugate_closed(&x, 1e-7) {
                return false;
            }
            // roots must stay distinct
            let sep = x
                .iter()
                .enumerate()
                .flat_map(|(i, a)| x[i + 1..].iter().map(move |b| (a - b).norm()))
                .fold(f64::INFINITY, f64::min);
            if sep < opts.duplicate_radius * root_scale(&x) {
                return false;
            }
            if !found
                .iter()
                .any(|f| same_roots(&f.x, &x, opts.duplicate_radius))
            {
                found.push(ZeroModeRoots {
                    pairs: n,
                    x,
                    residual: out.residual,
                    strategy,
                });
            }
            true
        };
    let (starts, failed) = match opts.strategy {
        SeedStrategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let poles: Vec<f64> = model.shells().iter().map(|s| s.pole()).collect();
            let (lo, hi) = poles
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(a, b), &p| (a.min(p), b.max(p)));
            let mut failed = 0;
            let mut known = Vec::new();
            for _ in 0..opts.max_starts {
                let z: Vec<Complex64> = (0..n)
                    .map(|_| Complex64::new(rng.random_range(lo..hi), rng.random_range(-1.0..1.0)))
                    .collect();
                let deflation = Deflation {
                    known: &known,
                    weights: vec![Complex64::new(1.0, 0.0); n],
                };
                let out = damped_newton(
                    &system,
                    &z,
                    opts.tolerance,
                    opts.max_iterations,
                    Some(&deflation),
                );
                let before = found.len();
                if !accept(out.z, SeedStrategy::Random, &mut found) {
                    failed += 1;
                }
                if found.len() > before {
                    known.push(found.last().unwrap().x.iter().sum());
                }
            }
            (opts.max_starts, failed)
        }
        _ => {
            let paths = continuation::track_all(model, n, continuation::Target::Zero)?;
            let mut failed = paths.failed;
            for x in paths.endpoints {
                if !accept(x, SeedStrategy::Continuation, &mut found) {
                    failed += 1;
                }
            }
            (paths.starts, failed)
        }
    };
    found.sort_by(|a, b| {
        let ka: f64 = a.x.iter().map(|v| v.re).sum();
        let kb: f64 = b.x.iter().map(|v| v.re).sum();
        ka.total_cmp(&kb)
    });
    Ok(ZeroSolve {
        pairs: n,
        roots: found,
        starts,
        failed_starts: failed,
    })
}
