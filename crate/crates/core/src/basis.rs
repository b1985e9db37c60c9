//! Seniority-zero pair-product basis.
//!
//! A basis state is an occupation vector `k` with `k_j` pairs in shell `j`,
//! standing for the normalized `prod_j S+(j)^(k_j) |0>`. States of one
//! sector are kept in lexicographic order.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelSpace;

/// Pair-occupation vector, one entry per shell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Occupation(pub Vec<usize>);

impl Occupation {
    pub fn vacuum(p: usize) -> Self {
        Occupation(vec![0; p])
    }

    pub fn pairs(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_allowed(&self, omegas: &[usize]) -> bool {
        self.0.len() == omegas.len() && self.0.iter().zip(omegas).all(|(k, om)| k <= om)
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All Pauli-allowed occupations of one pair-number sector.
#[derive(Debug, Clone, PartialEq)]
pub struct PairBasis {
    pairs: usize,
    states: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

impl PairBasis {
    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, occ: &Occupation) -> Option<usize> {
        self.index.get(occ).copied()
    }
}

/// Enumerates every occupation with `sum k_j = n` and `k_j <= Omega_j`, in
/// lexicographic order. Returns an empty basis when `n` exceeds the capacity.
pub fn enumerate_basis(model: &ModelSpace, n: usize) -> PairBasis {
    let omegas = model.omegas();
    let mut states = Vec::new();
    if n <= model.omega_total() {
        // suffix capacities prune branches that cannot reach n
        let mut tail = vec![0usize; omegas.len() + 1];
        for j in (0..omegas.len()).rev() {
            tail[j] = tail[j + 1] + omegas[j];
        }
        let mut current = vec![0usize; omegas.len()];
        fill(&omegas, &tail, 0, n, &mut current, &mut states);
    }
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    PairBasis {
        pairs: n,
        states,
        index,
    }
}

fn fill(
    omegas: &[usize],
    tail: &[usize],
    j: usize,
    remaining: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Occupation>,
) {
    if j == omegas.len() {
        if remaining == 0 {
            out.push(Occupation(current.clone()));
        }
        return;
    }
    let lo = remaining.saturating_sub(tail[j + 1]);
    let hi = remaining.min(omegas[j]);
    for k in lo..=hi {
        current[j] = k;
        fill(omegas, tail, j + 1, remaining - k, current, out);
    }
    current[j] = 0;
}

/// `binomial(p + n - 1, n)`, the number of occupations without Pauli caps.
pub fn dimension_bound(p: usize, n: usize) -> Result<u64> {
    if p == 0 {
        return Err(Error::InvalidArgument(
            "dimension bound needs p >= 1".into(),
        ));
    }
    // C(p-1+i, i) built incrementally stays integral at every step
    let mut acc: u128 = 1;
    for i in 1..=n as u128 {
        acc = acc
            .checked_mul(p as u128 - 1 + i)
            .ok_or(Error::Overflow("dimension bound"))?
            / i;
    }
    u64::try_from(acc).map_err(|_| Error::Overflow("dimension bound"))
}

/// Squared norm of `prod_j S+(j)^(k_j) |0>`:
/// `prod_j k_j! * Omega_j! / (Omega_j - k_j)!`.
pub fn norm_squared(occ: &Occupation, model: &ModelSpace) -> f64 {
    occ.0
        .iter()
        .zip(model.shells())
        .map(|(&k, shell)| (1..=k).fold(1.0, |acc, i| acc * (i * (shell.omega - i + 1)) as f64))
        .product()
}

/// Matrix element `<k+1| S+(j) |k>` between normalized single-shell states.
pub(crate) fn raising_amplitude(k: usize, omega: usize) -> f64 {
    (((k + 1) * (omega - k)) as f64).sqrt()
}
