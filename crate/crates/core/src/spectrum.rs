//! Per-sector spectra from the oracle, the rapidity solver, or both, and
//! comparison against the published reference tables.

use serde::{Deserialize, Serialize};

use crate::basis::enumerate_basis;
use crate::bethe::{
    n1_energy, solve_nonzero, solve_zero, RapiditySet, SolverOptions, ZeroModeRoots,
};
use crate::error::{Error, Result};
use crate::model::{builtin, ModelConfig, ModelSpace};
use crate::oracle::{build_hamiltonian, diagonalize_sector, is_zero_level, zero_multiplicity};

/// Relative window for grouping degenerate levels.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Largest `|h_bethe - h_oracle|` for a cross-validated level.
pub const MATCH_TOL: f64 = 1e-8;
/// Tolerance for comparing with the printed reference tables.
pub const TABLE_TOL: f64 = 5e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Oracle,
    Bethe,
    Cross,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Mode::Oracle),
            "bethe" => Ok(Mode::Bethe),
            "cross" => Ok(Mode::Cross),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineSource {
    Oracle,
    Bethe,
    CrossValidated,
}

impl LineSource {
    pub fn as_str(self) -> &'static str {
        match self {
            LineSource::Oracle => "oracle",
            LineSource::Bethe => "bethe",
            LineSource::CrossValidated => "cross-validated",
        }
    }
}

/// One (possibly degenerate) level; `E = -|G| h`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumLine {
    pub pairs: usize,
    pub h: f64,
    pub degeneracy: usize,
    pub source: LineSource,
    /// Oracle: largest `||h v - E v||` over the group. Bethe: largest
    /// equation residual. Cross: largest `|h_bethe - h_oracle|`.
    pub residual: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rapidities: Vec<RapiditySet>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub zero_modes: Vec<ZeroModeRoots>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorReport {
    pub pairs: usize,
    pub dim: usize,
    /// Descending in `h`; the zero level, if any, is last.
    pub lines: Vec<SpectrumLine>,
    /// Nonzero levels the sector holds (`dim - zero multiplicity`).
    pub expected_nonzero: usize,
    /// Nonzero levels found by the rapidity solver, when it ran.
    pub bethe_nonzero: Option<usize>,
    /// Oracle levels with no rapidity solution (cross mode).
    pub missing: Vec<f64>,
    /// Zero-energy multiplicity, `dim - rank(S-_0)`.
    pub expected_zero: usize,
    /// Zero-energy root sets found by the rapidity solver, when it ran.
    pub bethe_zero: Option<usize>,
    /// Rapidity levels with no oracle counterpart; never reported as lines.
    pub rejected: Vec<f64>,
}

impl SectorReport {
    pub fn is_complete(&self) -> bool {
        self.bethe_nonzero
            .is_none_or(|b| b == self.expected_nonzero)
            && self.bethe_zero.is_none_or(|z| z == self.expected_zero)
            && self.missing.is_empty()
    }

    /// Largest `h`, the lowest energy of the sector.
    pub fn lowest_level(&self) -> f64 {
        self.lines.iter().map(|l| l.h).fold(0.0, f64::max)
    }

    pub fn total_degeneracy(&self) -> usize {
        self.lines.iter().map(|l| l.degeneracy).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub case: String,
    pub model: ModelConfig,
    pub mode: Mode,
    pub sectors: Vec<SectorReport>,
}

impl SpectrumReport {
    pub fn is_complete(&self) -> bool {
        self.sectors.iter().all(SectorReport::is_complete)
    }
}

/// Groups values sorted in descending order into `(members)` runs whose
/// neighbours differ by at most `tol`.
fn group_runs(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[i - 1] - values[i]).abs() > tol {
            if i > start {
                runs.push(start..i);
            }
            start = i;
        }
    }
    runs
}

struct OracleLevels {
    /// Descending nonzero eigenvalues and their eigen residuals.
    nonzero: Vec<(f64, f64)>,
    zeros: usize,
    zero_residual: f64,
    hmax: f64,
}

fn oracle_levels(model: &ModelSpace, n: usize) -> Result<OracleLevels> {
    let eig = diagonalize_sector(model, n)?;
    let sector = build_hamiltonian(model, n)?;
    let hmax = eig.h_max();
    let mut nonzero = Vec::new();
    let mut zeros = 0;
    let mut zero_residual: f64 = 0.0;
    for (i, &h) in eig.h_values.iter().enumerate() {
        let v = eig.vectors.column(i);
        let r = (&sector.entries * v - v * h).norm();
        if is_zero_level(h, hmax) {
            zeros += 1;
            // residual of the exact zero assigned to the line
            zero_residual = zero_residual.max((&sector.entries * v).norm());
        } else {
            nonzero.push((h, r));
        }
    }
    Ok(OracleLevels {
        nonzero,
        zeros,
        zero_residual,
        hmax,
    })
}

struct BetheLevels {
    nonzero: Vec<RapiditySet>,
    zero_modes: Vec<ZeroModeRoots>,
}

fn bethe_levels(
    model: &ModelSpace,
    n: usize,
    opts: &SolverOptions,
    reference: Option<&[f64]>,
) -> Result<BetheLevels> {
    let nonzero = match n {
        1 => vec![RapiditySet {
            pairs: 1,
            y: vec![],
            alpha: None,
            x: vec![],
            roots_at_infinity: 0,
            h: n1_energy(model),
            residual: 0.0,
            strategy: opts.strategy,
        }],
        _ => solve_nonzero(model, n, opts, reference)?.solutions,
    };
    let zero_modes = solve_zero(model, n, opts)?.roots;
    Ok(BetheLevels {
        nonzero,
        zero_modes,
    })
}

fn zero_line(
    n: usize,
    count: usize,
    source: LineSource,
    residual: f64,
    zero_modes: Vec<ZeroModeRoots>,
) -> SpectrumLine {
    SpectrumLine {
        pairs: n,
        h: 0.0,
        degeneracy: count,
        source,
        residual,
        rapidities: vec![],
        zero_modes,
    }
}

/// Spectrum of sector `n` in the requested mode.
pub fn full_spectrum(
    model: &ModelSpace,
    n: usize,
    mode: Mode,
    opts: &SolverOptions,
) -> Result<SectorReport> {
    if n > model.omega_total() {
        return Err(Error::PairsOutOfRange {
            n,
            capacity: model.omega_total(),
        });
    }
    let dim = enumerate_basis(model, n).dim();
    if n == 0 {
        let source = match mode {
            Mode::Oracle => LineSource::Oracle,
            Mode::Bethe => LineSource::Bethe,
            Mode::Cross => LineSource::CrossValidated,
        };
        return Ok(SectorReport {
            pairs: 0,
            dim,
            lines: vec![zero_line(0, 1, source, 0.0, vec![])],
            expected_nonzero: 0,
            bethe_nonzero: None,
            missing: vec![],
            expected_zero: 1,
            bethe_zero: None,
            rejected: vec![],
        });
    }
    let mut lines = Vec::new();
    let mut missing = Vec::new();
    let mut rejected = Vec::new();
    let mut bethe_nonzero = None;
    let mut bethe_zero = None;
    let expected_nonzero;
    let expected_zero;
    match mode {
        Mode::Oracle => {
            let o = oracle_levels(model, n)?;
            expected_nonzero = o.nonzero.len();
            expected_zero = o.zeros;
            let hs: Vec<f64> = o.nonzero.iter().map(|l| l.0).collect();
            for run in group_runs(&hs, DEGENERACY_TOL * o.hmax.max(1.0)) {
                let members = &o.nonzero[run];
                lines.push(SpectrumLine {
                    pairs: n,
                    h: members.iter().map(|l| l.0).sum::<f64>() / members.len() as f64,
                    degeneracy: members.len(),
                    source: LineSource::Oracle,
                    residual: members.iter().map(|l| l.1).fold(0.0, f64::max),
                    rapidities: vec![],
                    zero_modes: vec![],
                });
            }
            if o.zeros > 0 {
                lines.push(zero_line(
                    n,
                    o.zeros,
                    LineSource::Oracle,
                    o.zero_residual,
                    vec![],
                ));
            }
        }
        Mode::Bethe => {
            let zeros = zero_multiplicity(model, n);
            expected_nonzero = dim - zeros;
            expected_zero = zeros;
            let b = bethe_levels(model, n, opts, None)?;
            bethe_nonzero = Some(b.nonzero.len());
            bethe_zero = Some(b.zero_modes.len());
            let hmax = b.nonzero.first().map_or(0.0, |s| s.h);
            let hs: Vec<f64> = b.nonzero.iter().map(|s| s.h).collect();
            for run in group_runs(&hs, DEGENERACY_TOL * hmax.max(1.0)) {
                let members = &b.nonzero[run];
                lines.push(SpectrumLine {
                    pairs: n,
                    h: members.iter().map(|s| s.h).sum::<f64>() / members.len() as f64,
                    degeneracy: members.len(),
                    source: LineSource::Bethe,
                    residual: members.iter().map(|s| s.residual).fold(0.0, f64::max),
                    rapidities: members.to_vec(),
                    zero_modes: vec![],
                });
            }
            if zeros > 0 {
                let residual = b.zero_modes.iter().map(|z| z.residual).fold(0.0, f64::max);
                lines.push(zero_line(
                    n,
                    zeros,
                    LineSource::Bethe,
                    residual,
                    b.zero_modes,
                ));
            }
        }
        Mode::Cross => {
            let o = oracle_levels(model, n)?;
            expected_nonzero = o.nonzero.len();
            expected_zero = o.zeros;
            let reference: Vec<f64> = o.nonzero.iter().map(|l| l.0).collect();
            let b = bethe_levels(model, n, opts, Some(&reference))?;
            let tol = MATCH_TOL * o.hmax.max(1.0);
            // greedy one-to-one matching, both lists descending
            let mut used = vec![false; reference.len()];
            let mut matched: Vec<Option<(RapiditySet, f64)>> = vec![None; reference.len()];
            let mut accepted = 0;
            for sol in b.nonzero {
                let best = reference
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !used[*i])
                    .min_by(|a, b| (a.1 - sol.h).abs().total_cmp(&(b.1 - sol.h).abs()));
                match best {
                    Some((i, &h)) if (h - sol.h).abs() <= tol => {
                        used[i] = true;
                        accepted += 1;
                        let gap = (h - sol.h).abs();
                        matched[i] = Some((sol, gap));
                    }
                    _ => {
                        log::warn!(
                            "N={n}: rapidity level h={} has no oracle counterpart",
                            sol.h
                        );
                        rejected.push(sol.h);
                    }
                }
            }
            bethe_nonzero = Some(accepted);
            bethe_zero = Some(b.zero_modes.len());
            for run in group_runs(&reference, DEGENERACY_TOL * o.hmax.max(1.0)) {
                let h = reference[run.clone()].iter().sum::<f64>() / run.len() as f64;
                let found: Vec<&(RapiditySet, f64)> =
                    matched[run.clone()].iter().flatten().collect();
                let complete = found.len() == run.len();
                if !complete {
                    missing.extend(
                        run.clone()
                            .filter(|&i| matched[i].is_none())
                            .map(|i| reference[i]),
                    );
                }
                lines.push(SpectrumLine {
                    pairs: n,
                    h,
                    degeneracy: run.len(),
                    source: if complete {
                        LineSource::CrossValidated
                    } else {
                        LineSource::Oracle
                    },
                    residual: if complete {
                        found.iter().map(|f| f.1).fold(0.0, f64::max)
                    } else {
                        o.nonzero[run].iter().map(|l| l.1).fold(0.0, f64::max)
                    },
                    rapidities: found.iter().map(|f| f.0.clone()).collect(),
                    zero_modes: vec![],
                });
            }
            if o.zeros > 0 {
                let ok = b.zero_modes.len() == o.zeros;
                let (source, residual) = if ok {
                    let r = b.zero_modes.iter().map(|z| z.residual).fold(0.0, f64::max);
                    (LineSource::CrossValidated, r)
                } else {
                    log::warn!(
                        "N={n}: {} zero-energy root sets for {} zero levels",
                        b.zero_modes.len(),
                        o.zeros
                    );
                    (LineSource::Oracle, o.zero_residual)
                };
                lines.push(zero_line(n, o.zeros, source, residual, b.zero_modes));
            }
        }
    }
    Ok(SectorReport {
        pairs: n,
        dim,
        lines,
        expected_nonzero,
        bethe_nonzero,
        missing,
        expected_zero,
        bethe_zero,
        rejected,
    })
}

/// Reports for every sector in `pairs`, in increasing `N`.
pub fn spectrum_report(
    case: &str,
    model: &ModelSpace,
    pairs: std::ops::RangeInclusive<usize>,
    mode: Mode,
    opts: &SolverOptions,
) -> Result<SpectrumReport> {
    let sectors = pairs
        .map(|n| full_spectrum(model, n, mode, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumReport {
        case: case.to_string(),
        model: model.to_config(),
        mode,
        sectors,
    })
}

/// Published lowest levels `h(N)`, `N = 0, 1, ...`, per built-in case.
pub mod reference {
    pub const TABLE1: [(&str, [f64; 7]); 4] = [
        ("table1a", [0.0, 2.6, 4.083, 4.735, 4.674, 4.084, 2.600]),
        ("table1b", [0.0, 2.5, 3.866, 4.441, 4.377, 3.866, 2.500]),
        ("table1c", [0.0, 1.9, 2.858, 3.278, 3.100, 2.858, 1.900]),
        ("table1d", [0.0, 1.4, 2.136, 2.481, 2.320, 2.136, 1.400]),
    ];

    pub const TABLE2_SHELL5: [f64; 12] = [
        0.0, 2.860, 5.192, 6.999, 8.283, 9.046, 9.292, 9.024, 8.243, 6.954, 5.515, 2.86,
    ];

    pub const TABLE2_SHELL6: [f64; 17] = [
        0.0, 3.220, 6.014, 8.387, 10.345, 11.893, 13.035, 13.778, 14.125, 14.082, 13.653, 12.843,
        11.655, 10.096, 8.167, 5.874, 3.220,
    ];

    /// `(case, values)` rows of a table, or `None` for an unknown id.
    pub fn table(which: u8) -> Option<Vec<(&'static str, &'static [f64])>> {
        match which {
            1 => Some(TABLE1.iter().map(|(c, v)| (*c, &v[..])).collect()),
            2 => Some(vec![
                ("table2-shell5", &TABLE2_SHELL5[..]),
                ("table2-shell6", &TABLE2_SHELL6[..]),
            ]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCell {
    pub case: String,
    pub pairs: usize,
    /// Lowest level from the rapidity solver.
    pub computed: f64,
    /// Lowest level from exact diagonalization.
    pub oracle: f64,
    pub reference: f64,
    /// `|computed - reference|`.
    pub diff: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub table: u8,
    pub tolerance: f64,
    pub cells: Vec<TableCell>,
}

impl TableReport {
    pub fn passed(&self) -> usize {
        self.cells.iter().filter(|c| c.pass).count()
    }

    pub fn discrepancies(&self) -> impl Iterator<Item = &TableCell> {
        self.cells.iter().filter(|c| !c.pass)
    }
}

/// Lowest level of every sector of a built-in case, from the rapidity
/// solver and from the oracle, against the published table.
pub fn reproduce_table(which: u8, opts: &SolverOptions) -> Result<TableReport> {
    let rows = reference::table(which).ok_or_else(|| {
        Error::InvalidArgument(format!("no reference table {which}; expected 1 or 2"))
    })?;
    let mut cells = Vec::new();
    for (case, values) in rows {
        let model = builtin::get(case).expect("reference cases are built in");
        for (n, &reference) in values.iter().enumerate() {
            let oracle = full_spectrum(&model, n, Mode::Oracle, opts)?.lowest_level();
            let computed = match n {
                0 => 0.0,
                1 => n1_energy(&model),
                _ => solve_nonzero(&model, n, opts, None)?
                    .solutions
                    .first()
                    .map_or(0.0, |s| s.h),
            };
            let diff = (computed - reference).abs();
            cells.push(TableCell {
                case: case.to_string(),
                pairs: n,
                computed,
                oracle,
                reference,
                diff,
                pass: diff <= TABLE_TOL,
            });
        }
    }
    Ok(TableReport {
        table: which,
        tolerance: TABLE_TOL,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> ModelSpace {
        builtin::get("fig1").unwrap()
    }

    #[test]
    fn empty_sector_is_one_zero_line() {
        let r = full_spectrum(&fig1(), 0, Mode::Cross, &SolverOptions::default()).unwrap();
        assert_eq!(r.lines.len(), 1);
        assert_eq!((r.lines[0].h, r.lines[0].degeneracy), (0.0, 1));
    }

    #[test]
    fn fig1_cross_structure() {
        let opts = SolverOptions::default();
        let want = [(1, 1, 2), (2, 3, 2), (3, 5, 1)];
        for (n, nonzero, zeros) in want {
            let r = full_spectrum(&fig1(), n, Mode::Cross, &opts).unwrap();
            assert!(r.is_complete());
            let nz: usize = r
                .lines
                .iter()
                .filter(|l| l.h > 0.0)
                .map(|l| l.degeneracy)
                .sum();
            let z = r.lines.iter().find(|l| l.h == 0.0).unwrap();
            assert_eq!((nz, z.degeneracy), (nonzero, zeros), "N={n}");
            assert!(r
                .lines
                .iter()
                .all(|l| l.source == LineSource::CrossValidated && l.residual <= MATCH_TOL));
        }
    }

    #[test]
    fn modes_agree() {
        let m = builtin::get("table1b").unwrap();
        let opts = SolverOptions::default();
        for n in 0..=m.omega_total() {
            let o = full_spectrum(&m, n, Mode::Oracle, &opts).unwrap();
            let b = full_spectrum(&m, n, Mode::Bethe, &opts).unwrap();
            assert_eq!(o.lines.len(), b.lines.len(), "N={n}");
            for (a, c) in o.lines.iter().zip(&b.lines) {
                assert!((a.h - c.h).abs() < 1e-8);
                assert_eq!(a.degeneracy, c.degeneracy);
            }
            assert_eq!(o.total_degeneracy(), o.dim);
        }
    }

    #[test]
    fn coincident_couplings_group_degenerate_levels() {
        let m = crate::model::validate_model(&[
            crate::model::RawShell {
                label: "a".into(),
                two_j: None,
                omega: Some(2),
                c_squared: 0.5,
            },
            crate::model::RawShell {
                label: "b".into(),
                two_j: None,
                omega: Some(2),
                c_squared: 0.5,
            },
        ])
        .unwrap();
        let r = full_spectrum(&m, 2, Mode::Oracle, &SolverOptions::default()).unwrap();
        assert_eq!(r.total_degeneracy(), r.dim);
    }

    #[test]
    fn grouping_runs() {
        assert_eq!(
            group_runs(&[3.0, 3.0, 2.0, 1.0, 1.0], 1e-9),
            vec![0..2, 2..3, 3..5]
        );
        assert!(group_runs(&[], 1e-9).is_empty());
    }

    #[test]
    fn unknown_table_is_an_error() {
        assert!(reproduce_table(3, &SolverOptions::default()).is_err());
    }

    #[test]
    fn mode_names_parse() {
        assert_eq!("cross".parse::<Mode>().unwrap(), Mode::Cross);
        assert!("both".parse::<Mode>().is_err());
    }
}
