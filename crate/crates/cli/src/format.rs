//! Text, CSV and JSON renderers. Text and CSV print 9 significant digits;
//! JSON uses the shortest representation that round-trips.

use std::fmt::Write as _;

use genpair_core::oracle::CommutatorReport;
use genpair_core::spectrum::{SpectrumReport, TableReport};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// `%.9g`-style formatting without a negative zero.
pub fn sig(x: f64) -> String {
    sig_digits(x, 9)
}

fn sig_digits(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    // rounding can carry into the next decade
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().unwrap_or(x);
    let exp = if rounded.abs() >= 10f64.powi(exp + 1) {
        exp + 1
    } else {
        exp
    };
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{rounded:.decimals$}"))
    } else {
        let s = format!("{:.*e}", digits - 1, x);
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let e: i32 = e.parse().expect("integer exponent");
        let sign = if e < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), e.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn spectrum(reports: &[SpectrumReport], format: Format) -> String {
    match format {
        Format::Json => json(&reports),
        Format::Csv => {
            let mut out = String::from("case,N,h,E_over_G,degeneracy,source,residual\n");
            for r in reports {
                for sector in &r.sectors {
                    for l in &sector.lines {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{},{}",
                            r.case,
                            l.pairs,
                            sig(l.h),
                            sig(-l.h),
                            l.degeneracy,
                            l.source.as_str(),
                            sig(l.residual)
                        );
                    }
                }
            }
            out
        }
        Format::Table => {
            let mut out = String::new();
            for r in reports {
                let _ = writeln!(out, "case {} (mode {:?})", r.case, r.mode);
                let _ = writeln!(
                    out,
                    "{:>4}  {:>16}  {:>16}  {:>4}  {:<16}  {:>12}",
                    "N", "h", "E/|G|", "deg", "source", "residual"
                );
                for sector in &r.sectors {
                    for l in &sector.lines {
                        let _ = writeln!(
                            out,
                            "{:>4}  {:>16}  {:>16}  {:>4}  {:<16}  {:>12}",
                            l.pairs,
                            sig(l.h),
                            sig(-l.h),
                            l.degeneracy,
                            l.source.as_str(),
                            sig_digits(l.residual, 3)
                        );
                    }
                    if !sector.is_complete() {
                        let _ = writeln!(
                            out,
                            "{:>4}  incomplete: {} of {} nonzero levels and {} of {} zero modes solved",
                            sector.pairs,
                            sector.bethe_nonzero.unwrap_or(0),
                            sector.expected_nonzero,
                            sector.bethe_zero.unwrap_or(0),
                            sector.expected_zero
                        );
                    }
                }
            }
            out
        }
    }
}

pub fn table(report: &TableReport, format: Format) -> String {
    match format {
        Format::Json => json(report),
        Format::Csv => {
            let mut out = String::from("table,case,N,computed,oracle,reference,diff,pass\n");
            for c in &report.cells {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    report.table,
                    c.case,
                    c.pairs,
                    sig(c.computed),
                    sig(c.oracle),
                    sig(c.reference),
                    sig(c.diff),
                    c.pass
                );
            }
            out
        }
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{:<14}  {:>3}  {:>12}  {:>12}  {:>9}  {:>10}  pass",
                "case", "N", "computed", "oracle", "reference", "diff"
            );
            for c in &report.cells {
                let _ = writeln!(
                    out,
                    "{:<14}  {:>3}  {:>12}  {:>12}  {:>9}  {:>10}  {}",
                    c.case,
                    c.pairs,
                    sig_digits(c.computed, 7),
                    sig_digits(c.oracle, 7),
                    sig(c.reference),
                    sig_digits(c.diff, 3),
                    if c.pass { "ok" } else { "DIFF" }
                );
            }
            let _ = writeln!(
                out,
                "{} of {} cells within {}",
                report.passed(),
                report.cells.len(),
                sig(report.tolerance)
            );
            out
        }
    }
}

pub fn algebra(report: &CommutatorReport, tol: f64, format: Format) -> String {
    let pass = report.passes(tol);
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                #[serde(flatten)]
                report: &'a CommutatorReport,
                tolerance: f64,
                pass: bool,
            }
            json(&Out {
                report,
                tolerance: tol,
                pass,
            })
        }
        Format::Csv => format!(
            "m_lo,m_hi,identities,max_deviation,pass\n{},{},{},{},{}\n",
            report.m_range.0,
            report.m_range.1,
            report.identities_checked,
            sig(report.max_deviation),
            pass
        ),
        Format::Table => format!(
            "m in {}..{}: {} identities, max deviation {} (worst: {})\n{}\n",
            report.m_range.0,
            report.m_range.1,
            report.identities_checked,
            sig_digits(report.max_deviation, 3),
            report.worst,
            if pass { "pass" } else { "FAIL" }
        ),
    }
}
