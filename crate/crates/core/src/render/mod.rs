//! Graph output: DOT plates and lines, and a JSON delta trace.

mod dot;

use serde::Serialize;

pub use dot::{emit_dot, RankDir, RenderError, RenderOptions};

use crate::canonical::to_canonical_json;
use crate::montage::{EoSReport, IntensityDelta};

#[derive(Serialize)]
struct Trace<'a> {
    deltas: &'a [IntensityDelta],
}

/// Canonical JSON listing every delta of the run in emission order.
pub fn emit_trace_json(report: &EoSReport) -> String {
    to_canonical_json(&Trace {
        deltas: &report.deltas,
    })
}
