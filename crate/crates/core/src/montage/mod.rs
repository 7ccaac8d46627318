//! Montage: synchronous intensity interactions at action points.
//!
//! Each round reads one immutable snapshot of the structure. Every action
//! point computes its deltas from that snapshot alone, the deltas are summed
//! per unit in integer micro units, and the sums are applied with clamping.
//! Nothing propagates along a chain within a round; multi-hop influence only
//! shows up across rounds.

mod config;
mod report;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{
    BetaTable, ConfigError, ConfigOverrides, ConfigValue, MontageConfig, CONFIG_KEYS,
};
pub use report::{AggregateEntry, EoSReport, UnitRecord};

use crate::intensity::Intensity;
use crate::model::{apply_moves, compare, pseudo_will, Effect, ModelError, UnitId};
use crate::relations::{build_action_points, ActionKind, ActionPoint, Mode};
use crate::structure::Structure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("unit `{unit}` has intensity {intensity} above the cap {cap}")]
    IntensityAboveCap {
        unit: UnitId,
        intensity: Intensity,
        cap: Intensity,
    },
    #[error("resolution failed: {0}")]
    Model(#[from] ModelError),
}

/// One attributed contribution within a round.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntensityDelta {
    pub round: u32,
    pub source: ActionPoint,
    pub target: UnitId,
    #[serde(rename = "amount_micro")]
    pub amount: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScopeOfEffect {
    pub members: BTreeSet<UnitId>,
}

impl ScopeOfEffect {
    pub fn contains(&self, id: &UnitId) -> bool {
        self.members.contains(id)
    }

    pub fn is_subset(&self, other: &ScopeOfEffect) -> bool {
        self.members.is_subset(&other.members)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Alternative {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Choice {
    Hesitation,
    Smooth(Alternative),
}

/// Deltas one action point contributes, read from `snapshot` only.
fn point_deltas(
    point: &ActionPoint,
    snapshot: &Structure,
    cfg: &MontageConfig,
    round: u32,
    out: &mut Vec<IntensityDelta>,
) {
    let intensity = |id: &UnitId| {
        snapshot
            .unit(id)
            .expect("action points only reference existing units")
            .intensity()
    };
    let (ia, ib) = (intensity(&point.a), intensity(&point.b));
    let symmetric = |amount: i64| [(&point.a, amount), (&point.b, amount)];
    let targets: Vec<(&UnitId, i64)> = match (point.mode, &point.kind) {
        (Mode::Strengthen, _) => symmetric(cfg.alpha.scale(ia.min(ib))).to_vec(),
        (Mode::Oppose, _) => symmetric(-cfg.gamma.scale(ia.min(ib))).to_vec(),
        (Mode::Neutral, _) => symmetric(cfg.contiguity.scale(ia.min(ib))).to_vec(),
        (Mode::CausalAct, ActionKind::Causation { class }) => {
            vec![(&point.b, cfg.beta.get(*class).scale(ia))]
        }
        (Mode::CausalAct, _) | (Mode::Inert, _) => Vec::new(),
    };
    out.extend(
        targets
            .into_iter()
            .filter(|(_, amount)| *amount != 0)
            .map(|(target, amount)| IntensityDelta {
                round,
                source: point.clone(),
                target: target.clone(),
                amount,
            }),
    );
}

fn round_with_points(
    s: &Structure,
    points: &[ActionPoint],
    cfg: &MontageConfig,
    round: u32,
) -> (Structure, Vec<IntensityDelta>) {
    let mut deltas = Vec::new();
    for point in points {
        point_deltas(point, s, cfg, round, &mut deltas);
    }
    let mut totals: BTreeMap<&UnitId, i128> = BTreeMap::new();
    for d in &deltas {
        *totals.entry(&d.target).or_default() += i128::from(d.amount);
    }
    let units = s
        .units()
        .iter()
        .map(|(id, unit)| {
            let next = match totals.get(id) {
                Some(total) => {
                    unit.with_intensity(unit.intensity().offset_clamped(*total, cfg.i_max))
                }
                None => unit.clone(),
            };
            (id.clone(), next)
        })
        .collect();
    (s.with_units(units), deltas)
}

fn check_inputs(s: &Structure, cfg: &MontageConfig) -> Result<(), EngineError> {
    cfg.validate()?;
    if let Some(unit) = s.units().values().find(|u| u.intensity() > cfg.i_max) {
        return Err(EngineError::IntensityAboveCap {
            unit: unit.id().clone(),
            intensity: unit.intensity(),
            cap: cfg.i_max,
        });
    }
    Ok(())
}

/// One synchronous montage round (numbered 1).
pub fn montage_round(
    s: &Structure,
    cfg: &MontageConfig,
) -> Result<(Structure, Vec<IntensityDelta>), EngineError> {
    check_inputs(s, cfg)?;
    let points = build_action_points(s, cfg.sigma);
    Ok(round_with_points(s, &points, cfg, 1))
}

/// Units whose absolute cumulative delta reaches `tau`. Only units that
/// received at least one delta are candidates.
pub fn scope_of_effect(deltas: &[IntensityDelta], tau: Intensity) -> ScopeOfEffect {
    let mut totals: BTreeMap<&UnitId, i128> = BTreeMap::new();
    for d in deltas {
        *totals.entry(&d.target).or_default() += i128::from(d.amount);
    }
    ScopeOfEffect {
        members: totals
            .into_iter()
            .filter(|(_, total)| total.unsigned_abs() >= u128::from(tau.micro()))
            .map(|(id, _)| id.clone())
            .collect(),
    }
}

/// Hesitation when the two intensities lie within `epsilon` of each other,
/// otherwise a smooth choice of the stronger alternative.
pub fn classify_choice(i_a: Intensity, i_b: Intensity, epsilon: Intensity) -> Choice {
    if i_a.abs_diff(i_b) <= epsilon {
        Choice::Hesitation
    } else if i_a > i_b {
        Choice::Smooth(Alternative::A)
    } else {
        Choice::Smooth(Alternative::B)
    }
}

/// The structure's effect as a mixture: every unit's effect and intensity in
/// id order, without collapsing to a single value.
pub fn aggregate_eos(s: &Structure) -> Vec<AggregateEntry> {
    s.units()
        .values()
        .map(|u| AggregateEntry {
            id: u.id().clone(),
            effect: compare(u),
            intensity: u.intensity(),
        })
        .collect()
}

/// Runs `cfg.rounds` montage rounds, derives the scope of effect, and, when
/// `cfg.resolve` is set, executes the pseudo-will of every contradictory unit
/// whose final intensity reaches the crossing gate `rho`.
pub fn run_eos(s: &Structure, cfg: &MontageConfig) -> Result<EoSReport, EngineError> {
    check_inputs(s, cfg)?;
    // action points depend on ideal placements and effects, which rounds never
    // change, so one set serves the whole run
    let points = build_action_points(s, cfg.sigma);

    let mut current = s.clone();
    let mut deltas = Vec::new();
    for round in 1..=cfg.rounds {
        let (next, mut round_deltas) = round_with_points(&current, &points, cfg, round);
        deltas.append(&mut round_deltas);
        current = next;
    }
    let scope = scope_of_effect(&deltas, cfg.tau);

    let mut units = BTreeMap::new();
    let mut resolved = BTreeMap::new();
    for (id, unit) in current.units() {
        let initial = s.unit(id).expect("rounds preserve unit ids");
        let effect_before = compare(initial);
        let moves = if cfg.resolve && !effect_before.is_pleasant() && unit.intensity() >= cfg.rho {
            pseudo_will(unit)
        } else {
            Vec::new()
        };
        let after = apply_moves(unit, &moves)?;
        let effect_after: Effect = compare(&after);
        units.insert(
            id.clone(),
            UnitRecord {
                effect_before,
                effect_after,
                intensity_initial: initial.intensity(),
                intensity_final: unit.intensity(),
                applied_moves: moves,
            },
        );
        resolved.insert(id.clone(), after);
    }
    let final_structure = current.with_units(resolved);

    Ok(EoSReport {
        units,
        deltas,
        scope,
        aggregate: aggregate_eos(&final_structure),
    })
}
