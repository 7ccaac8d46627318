//! A deterministic engine for contradictory-structure affect models.
//!
//! Scenarios are sets of [`EoCoS`] units (items placed on the near or far
//! side of a border, once as desired and once as found) connected by
//! resemblance, contiguity and causation relations. [`run_eos`] runs
//! synchronous montage rounds over those connections, derives the scope of
//! effect and, optionally, resolves contradictions by executing each unit's
//! pseudo-will. All arithmetic is integer micro units, so results are
//! byte-identical across runs and platforms.

pub mod canonical;
pub mod intensity;
pub mod model;
pub mod montage;
pub mod nl2;
pub mod relations;
pub mod render;
pub mod structure;
pub mod synth;

pub use intensity::{Coefficient, Intensity, MICRO};
pub use model::{
    apply_moves, compare, pseudo_will, CrossBorderMove, Effect, EoCoS, ItemId, ItemKind,
    ModelError, Placement, Side, UnitId,
};
pub use montage::{
    aggregate_eos, classify_choice, montage_round, run_eos, scope_of_effect, Alternative, Choice,
    ConfigError, ConfigOverrides, EngineError, EoSReport, IntensityDelta, MontageConfig,
    ScopeOfEffect,
};
pub use nl2::{
    parse_scenario, parse_with_diagnostics, serialize_scenario, Diagnostic, ScenarioDoc,
};
pub use relations::{
    build_action_points, detect_opposition, detect_resemblance, ActionKind, ActionPoint,
    CausationClass, Mode, Relation, RelationKind,
};
pub use render::{emit_dot, emit_trace_json, RankDir, RenderError, RenderOptions};
pub use structure::{Structure, StructureError};
