use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::canonical::to_canonical_json;
use crate::intensity::Intensity;
use crate::model::{CrossBorderMove, Effect, UnitId};

use super::{IntensityDelta, ScopeOfEffect};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnitRecord {
    pub effect_before: Effect,
    pub effect_after: Effect,
    #[serde(rename = "intensity_initial_micro")]
    pub intensity_initial: Intensity,
    #[serde(rename = "intensity_final_micro")]
    pub intensity_final: Intensity,
    pub applied_moves: Vec<CrossBorderMove>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AggregateEntry {
    pub id: UnitId,
    pub effect: Effect,
    #[serde(rename = "intensity_micro")]
    pub intensity: Intensity,
}

/// Effect of Structure: the outcome of one montage run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EoSReport {
    pub units: BTreeMap<UnitId, UnitRecord>,
    pub deltas: Vec<IntensityDelta>,
    pub scope: ScopeOfEffect,
    /// Every unit's effect and intensity after montage (and resolution), by id.
    pub aggregate: Vec<AggregateEntry>,
}

impl EoSReport {
    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }

    /// Line-oriented text form:
    ///
    /// ```text
    /// unit e1: Unpleasant{trip} I 1.000000 -> 1.500000
    ///   cross trip: far -> near
    ///   after: Pleasant
    /// scope: e1, e2
    /// deltas: 2
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, rec) in &self.units {
            let _ = writeln!(
                out,
                "unit {id}: {} I {} -> {}",
                rec.effect_before, rec.intensity_initial, rec.intensity_final
            );
            for mv in &rec.applied_moves {
                let _ = writeln!(out, "  cross {mv}");
            }
            if rec.effect_after != rec.effect_before {
                let _ = writeln!(out, "  after: {}", rec.effect_after);
            }
        }
        let scope: Vec<&str> = self.scope.members.iter().map(UnitId::as_str).collect();
        let _ = writeln!(out, "scope: {}", scope.join(", "));
        let _ = writeln!(out, "deltas: {}", self.deltas.len());
        out
    }
}
