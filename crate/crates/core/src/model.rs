//! The EoCoS unit: items on two sides of a border, an ideal and an actual
//! placement, and an intensity.
//!
//! Comparing the two placements yields the unit's [`Effect`]; when they
//! disagree, [`pseudo_will`] lists the border crossings that would restore the
//! ideal image.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intensity::Intensity;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid identifier `{0}`: expected [a-z][a-z0-9_]*")]
pub struct IdError(pub String);

/// `[a-z][a-z0-9_]*`
pub fn is_valid_id(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b'a'..=b'z'))
        && bytes.all(|b| matches!(b, b'a'..=b'z' | b'0'..=b'9' | b'_'))
}

macro_rules! identifier {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Result<Self, IdError> {
                let s = s.into();
                if is_valid_id(&s) {
                    Ok($name(s))
                } else {
                    Err(IdError(s))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl FromStr for $name {
            type Err = IdError;
            fn from_str(s: &str) -> Result<Self, IdError> {
                $name::new(s)
            }
        }

        impl TryFrom<String> for $name {
            type Error = IdError;
            fn try_from(s: String) -> Result<Self, IdError> {
                $name::new(s)
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.0
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

identifier!(
    /// Identifier of one EoCoS unit within a structure.
    UnitId
);
identifier!(
    /// Identifier of an item. Item ids are global to a structure, so the same
    /// referent (a character, an object) keeps its id across units.
    ItemId
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemKind {
    Subject,
    Object,
    SubjectAspect,
    ObjectAspect,
    PleasantMarker,
}

impl ItemKind {
    /// Keyword used for this kind in scenario text.
    pub fn keyword(self) -> &'static str {
        match self {
            ItemKind::Subject => "subject",
            ItemKind::Object => "object",
            ItemKind::SubjectAspect => "s-aspect",
            ItemKind::ObjectAspect => "o-aspect",
            ItemKind::PleasantMarker => "pleasant",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "subject" => ItemKind::Subject,
            "object" => ItemKind::Object,
            "s-aspect" => ItemKind::SubjectAspect,
            "o-aspect" => ItemKind::ObjectAspect,
            "pleasant" => ItemKind::PleasantMarker,
            _ => return None,
        })
    }
}

/// One of the two regions the border creates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Near,
    Far,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Near => Side::Far,
            Side::Far => Side::Near,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Side::Near => "near",
            Side::Far => "far",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Total map from item to side.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Placement(BTreeMap<ItemId, Side>);

impl Placement {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn side(&self, item: &str) -> Option<Side> {
        self.0.get(item).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ItemId, Side)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }

    /// Items on `side`, in id order.
    pub fn on(&self, side: Side) -> impl Iterator<Item = &ItemId> {
        self.0
            .iter()
            .filter(move |(_, s)| **s == side)
            .map(|(k, _)| k)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn keys_match<V>(&self, items: &BTreeMap<ItemId, V>) -> bool {
        self.0.len() == items.len() && self.0.keys().zip(items.keys()).all(|(a, b)| a == b)
    }
}

impl FromIterator<(ItemId, Side)> for Placement {
    fn from_iter<T: IntoIterator<Item = (ItemId, Side)>>(iter: T) -> Self {
        Placement(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("subject `{0}` is not declared as an item")]
    UndeclaredSubject(ItemId),
    #[error("subject `{0}` is declared with kind `{1}`, expected `subject`")]
    SubjectKind(ItemId, &'static str),
    #[error("expected exactly one subject item, found {0}")]
    SubjectCount(usize),
    #[error("expected exactly one pleasant marker, found {0}")]
    PleasantCount(usize),
    #[error("{0} placement does not cover exactly the declared items")]
    PlacementKeys(&'static str),
    #[error("move references unknown item `{0}`")]
    UnknownItem(ItemId),
    #[error("stale move for `{item}`: expected it on the {expected} side, found {actual}")]
    StaleMove {
        item: ItemId,
        expected: Side,
        actual: Side,
    },
}

/// Effect of one contradictory-structure unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Effect {
    Pleasant,
    /// `mismatched` is never empty.
    Unpleasant {
        mismatched: BTreeSet<ItemId>,
    },
}

impl Effect {
    pub fn is_pleasant(&self) -> bool {
        matches!(self, Effect::Pleasant)
    }

    /// Whether two effects are the same variant, ignoring the mismatch set.
    pub fn same_variant(&self, other: &Effect) -> bool {
        self.is_pleasant() == other.is_pleasant()
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Effect::Pleasant => f.write_str("Pleasant"),
            Effect::Unpleasant { mismatched } => {
                f.write_str("Unpleasant{")?;
                for (i, item) in mismatched.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(item.as_str())?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Moves `item` across the border; `to` is always the side opposite `from`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CrossBorderMove {
    pub item: ItemId,
    pub from: Side,
    pub to: Side,
}

impl CrossBorderMove {
    pub fn new(item: ItemId, from: Side) -> Self {
        CrossBorderMove {
            item,
            from,
            to: from.opposite(),
        }
    }
}

impl fmt::Display for CrossBorderMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.item, self.from, self.to)
    }
}

/// Effect of Contradictory Structure: a validated unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EoCoS {
    id: UnitId,
    subject: ItemId,
    pleasant: ItemId,
    items: BTreeMap<ItemId, ItemKind>,
    ideal: Placement,
    actual: Placement,
    intensity: Intensity,
}

impl EoCoS {
    pub fn new(
        id: UnitId,
        subject: ItemId,
        items: impl IntoIterator<Item = (ItemId, ItemKind)>,
        ideal: Placement,
        actual: Placement,
        intensity: Intensity,
    ) -> Result<Self, ModelError> {
        let items: BTreeMap<ItemId, ItemKind> = items.into_iter().collect();
        match items.get(&subject) {
            None => return Err(ModelError::UndeclaredSubject(subject)),
            Some(ItemKind::Subject) => {}
            Some(other) => return Err(ModelError::SubjectKind(subject, other.keyword())),
        }
        let subjects = items.values().filter(|k| **k == ItemKind::Subject).count();
        if subjects != 1 {
            return Err(ModelError::SubjectCount(subjects));
        }
        let mut markers = items
            .iter()
            .filter(|(_, k)| **k == ItemKind::PleasantMarker)
            .map(|(id, _)| id);
        let pleasant = match (markers.next(), markers.next()) {
            (Some(p), None) => p.clone(),
            _ => {
                let n = items
                    .values()
                    .filter(|k| **k == ItemKind::PleasantMarker)
                    .count();
                return Err(ModelError::PleasantCount(n));
            }
        };
        if !ideal.keys_match(&items) {
            return Err(ModelError::PlacementKeys("ideal"));
        }
        if !actual.keys_match(&items) {
            return Err(ModelError::PlacementKeys("actual"));
        }
        Ok(EoCoS {
            id,
            subject,
            pleasant,
            items,
            ideal,
            actual,
            intensity,
        })
    }

    pub fn id(&self) -> &UnitId {
        &self.id
    }

    pub fn subject(&self) -> &ItemId {
        &self.subject
    }

    /// The unit's pleasant-marker item.
    pub fn pleasant(&self) -> &ItemId {
        &self.pleasant
    }

    pub fn items(&self) -> &BTreeMap<ItemId, ItemKind> {
        &self.items
    }

    pub fn ideal(&self) -> &Placement {
        &self.ideal
    }

    pub fn actual(&self) -> &Placement {
        &self.actual
    }

    pub fn intensity(&self) -> Intensity {
        self.intensity
    }

    pub fn with_intensity(&self, intensity: Intensity) -> EoCoS {
        EoCoS {
            intensity,
            ..self.clone()
        }
    }

    /// Items other than the subject and the pleasant marker.
    pub fn content_items(&self) -> impl Iterator<Item = &ItemId> {
        self.items
            .keys()
            .filter(move |id| **id != self.subject && **id != self.pleasant)
    }

    /// Whether `item` sits on the same side as the pleasant marker in the
    /// ideal image (i.e. it is desired).
    pub fn ideally_contiguous_with_pleasant(&self, item: &str) -> Option<bool> {
        let marker = self.ideal.side(self.pleasant.as_str())?;
        self.ideal.side(item).map(|side| side == marker)
    }
}

/// Compares the ideal image with the actual image.
pub fn compare(e: &EoCoS) -> Effect {
    let mismatched: BTreeSet<ItemId> = e
        .ideal
        .iter()
        .filter(|(item, side)| e.actual.side(item.as_str()) != Some(*side))
        .map(|(item, _)| item.clone())
        .collect();
    if mismatched.is_empty() {
        Effect::Pleasant
    } else {
        Effect::Unpleasant { mismatched }
    }
}

/// Border crossings that would turn the actual image into the ideal one,
/// one per mismatched item, in item-id order. Empty when the unit is pleasant.
pub fn pseudo_will(e: &EoCoS) -> Vec<CrossBorderMove> {
    e.actual
        .iter()
        .filter(|(item, side)| e.ideal.side(item.as_str()) != Some(*side))
        .map(|(item, side)| CrossBorderMove::new(item.clone(), side))
        .collect()
}

/// Executes moves against the actual placement. Ideal placement and
/// intensity are left untouched.
pub fn apply_moves(e: &EoCoS, moves: &[CrossBorderMove]) -> Result<EoCoS, ModelError> {
    let mut actual = e.actual.0.clone();
    for mv in moves {
        let side = actual
            .get_mut(&mv.item)
            .ok_or_else(|| ModelError::UnknownItem(mv.item.clone()))?;
        if *side != mv.from {
            return Err(ModelError::StaleMove {
                item: mv.item.clone(),
                expected: mv.from,
                actual: *side,
            });
        }
        *side = mv.to;
    }
    Ok(EoCoS {
        actual: Placement(actual),
        ..e.clone()
    })
}
