//! The montage substrate: units plus the relations declared between them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EoCoS, UnitId};
use crate::relations::{Relation, RelationKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("duplicate unit id `{0}`")]
    DuplicateUnit(UnitId),
    #[error("relation `{relation}` references unknown unit `{id}`")]
    UnknownEndpoint { relation: String, id: UnitId },
    #[error("relation `{0}` connects a unit to itself")]
    SelfRelation(String),
    #[error("relation `{0}` duplicates an existing relation of the same kind")]
    DuplicateRelation(String),
    #[error("relation `{relation}`: item `{via}` is not shared by both units")]
    UnknownViaItem { relation: String, via: String },
}

/// Units keyed by id plus relations in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Structure {
    units: BTreeMap<UnitId, EoCoS>,
    relations: Vec<Relation>,
}

impl Structure {
    pub fn new(
        units: impl IntoIterator<Item = EoCoS>,
        relations: impl IntoIterator<Item = Relation>,
    ) -> Result<Self, StructureError> {
        let mut map = BTreeMap::new();
        for unit in units {
            if let Some(prev) = map.insert(unit.id().clone(), unit) {
                return Err(StructureError::DuplicateUnit(prev.id().clone()));
            }
        }
        let mut relations: Vec<Relation> = relations.into_iter().collect();
        relations.sort_by(|x, y| x.canonical_cmp(y));

        let mut seen = BTreeSet::new();
        for rel in &relations {
            for end in [rel.a(), rel.b()] {
                if !map.contains_key(end) {
                    return Err(StructureError::UnknownEndpoint {
                        relation: rel.to_string(),
                        id: end.clone(),
                    });
                }
            }
            if rel.a() == rel.b() {
                return Err(StructureError::SelfRelation(rel.to_string()));
            }
            if !seen.insert(rel.uniqueness_key()) {
                return Err(StructureError::DuplicateRelation(rel.to_string()));
            }
            if let RelationKind::Contiguity { via } = rel.kind() {
                let shared = [rel.a(), rel.b()]
                    .iter()
                    .all(|u| map[*u].items().contains_key(via));
                if !shared {
                    return Err(StructureError::UnknownViaItem {
                        relation: rel.to_string(),
                        via: via.to_string(),
                    });
                }
            }
        }
        Ok(Structure {
            units: map,
            relations,
        })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn units(&self) -> &BTreeMap<UnitId, EoCoS> {
        &self.units
    }

    pub fn unit(&self, id: &UnitId) -> Option<&EoCoS> {
        self.units.get(id)
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Replaces units by id, keeping relations. Every replacement must keep
    /// its id and the items relations refer to, which holds for intensity
    /// updates and border crossings.
    pub(crate) fn with_units(&self, units: BTreeMap<UnitId, EoCoS>) -> Structure {
        debug_assert!(units.keys().eq(self.units.keys()));
        Structure {
            units,
            relations: self.relations.clone(),
        }
    }
}
