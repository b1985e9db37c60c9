//! Scalar equations solved by bracketing between consecutive poles.

use crate::model::ModelSpace;
use crate::oracle::is_zero_level;

/// Distinct poles `1/c^2` in ascending order, with summed capacities.
pub(crate) fn pole_groups(model: &ModelSpace) -> Vec<(f64, usize)> {
    let mut groups: Vec<(f64, f64, usize)> = Vec::new();
    for s in model.shells() {
        match groups.iter_mut().find(|g| g.0 == s.c_squared) {
            Some(g) => g.2 += s.omega,
            None => groups.push((s.c_squared, s.pole(), s.omega)),
        }
    }
    groups.sort_by(|a, b| a.1.total_cmp(&b.1));
    groups.into_iter().map(|(_, pole, om)| (pole, om)).collect()
}

/// Bisection for a function that is positive just right of `lo` and
/// negative just left of `hi` (either endpoint may be a pole).
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Walks away from `start` in direction `dir` until `pred` holds.
fn expand(start: f64, dir: f64, pred: impl Fn(f64) -> bool) -> Option<f64> {
    let mut step = 1.0f64.max(start.abs());
    for _ in 0..200 {
        let x = start + dir * step;
        if pred(x) {
            return Some(x);
        }
        step *= 2.0;
    }
    None
}

/// Energies of the `N = 2` nonzero levels from the scalar equation
/// `(1/2) sum_j Omega_j c_j^2 x/(x c_j^2 - 1) = 1`, `h = -2/x - 2 Lambda_1`.
/// Roots giving `h = 0` (states annihilated by `S+_0`) are dropped; a
/// two-pair capacity contributes the root at infinity, `h = -2 Lambda_1`.
pub fn n2_energies(model: &ModelSpace) -> Vec<f64> {
    let groups = pole_groups(model);
    let cap = model.omega_total() as f64;
    // x c^2/(x c^2 - 1) = x/(x - pole); decreasing between poles
    let f = |x: f64| {
        0.5 * groups
            .iter()
            .map(|&(p, om)| om as f64 * x / (x - p))
            .sum::<f64>()
            - 1.0
    };
    let mut roots = Vec::new();
    let limit = 0.5 * cap - 1.0;
    let first = groups[0].0;
    if limit > 0.0 {
        if let Some(lo) = expand(first, -1.0, |x| f(x) > 0.0) {
            roots.push(bisect(f, lo, first));
        }
    }
    for w in groups.windows(2) {
        roots.push(bisect(f, w[0].0, w[1].0));
    }
    let last = groups[groups.len() - 1].0;
    if limit < 0.0 {
        if let Some(hi) = expand(last, 1.0, |x| f(x) < 0.0) {
            roots.push(bisect(f, last, hi));
        }
    }
    let shift = -2.0 * model.lambda(1);
    let mut hs: Vec<f64> = roots.into_iter().map(|x| -2.0 / x + shift).collect();
    if model.omega_total() == 2 {
        hs.push(shift);
    }
    let hmax = hs.iter().copied().fold(0.0, f64::max);
    hs.retain(|&h| !is_zero_level(h, hmax));
    hs.sort_by(|a, b| b.total_cmp(a));
    hs
}

/// Real roots of `sum_j Omega_j c_j^2/(1 - x c_j^2) = 0`, one between each
/// pair of consecutive distinct poles, ascending.
pub fn zero_roots_single_pair(model: &ModelSpace) -> Vec<f64> {
    let groups = pole_groups(model);
    // sum Omega/(pole - x): increasing between poles; bisect on -A
    let neg_a = |x: f64| {
        -groups
            .iter()
            .map(|&(p, om)| om as f64 / (p - x))
            .sum::<f64>()
    };
    groups
        .windows(2)
        .map(|w| bisect(neg_a, w[0].0, w[1].0))
        .collect()
}
