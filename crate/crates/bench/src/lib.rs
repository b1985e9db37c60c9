//! Benchmark fixtures.

use genpair_core::model::{builtin, ModelSpace};

/// Builtin models used by the benchmarks, smallest first.
pub fn fixtures() -> Vec<(&'static str, ModelSpace)> {
    ["fig1", "table2-shell5", "table2-shell6"]
        .into_iter()
        .map(|name| (name, builtin::get(name).expect("builtin exists")))
        .collect()
}
