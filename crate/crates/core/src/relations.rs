//! Resemblance, contiguity and causation between units, and the action points
//! they give rise to.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::intensity::{Coefficient, MICRO};
use crate::model::{compare, EoCoS, ItemId, UnitId};
use crate::structure::Structure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausationClass {
    Enabling,
    Preventing,
    Triggering,
}

impl CausationClass {
    pub const ALL: [CausationClass; 3] = [
        CausationClass::Enabling,
        CausationClass::Preventing,
        CausationClass::Triggering,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            CausationClass::Enabling => "enabling",
            CausationClass::Preventing => "preventing",
            CausationClass::Triggering => "triggering",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.keyword() == s)
    }
}

impl fmt::Display for CausationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RelationKind {
    Resemblance,
    Contiguity { via: ItemId },
    Causation { class: CausationClass },
}

impl RelationKind {
    pub fn is_directed(&self) -> bool {
        matches!(self, RelationKind::Causation { .. })
    }

    fn rank(&self) -> u8 {
        match self {
            RelationKind::Resemblance => 0,
            RelationKind::Contiguity { .. } => 1,
            RelationKind::Causation { .. } => 2,
        }
    }
}

/// A typed edge between two units. Undirected relations keep their endpoints
/// in id order so that `e2 ~ e1` and `e1 ~ e2` are the same value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    #[serde(flatten)]
    kind: RelationKind,
    a: UnitId,
    b: UnitId,
}

impl Relation {
    pub fn new(kind: RelationKind, a: UnitId, b: UnitId) -> Self {
        let (a, b) = if !kind.is_directed() && b < a {
            (b, a)
        } else {
            (a, b)
        };
        Relation { kind, a, b }
    }

    pub fn resemblance(a: UnitId, b: UnitId) -> Self {
        Self::new(RelationKind::Resemblance, a, b)
    }

    pub fn contiguity(a: UnitId, b: UnitId, via: ItemId) -> Self {
        Self::new(RelationKind::Contiguity { via }, a, b)
    }

    pub fn causation(from: UnitId, to: UnitId, class: CausationClass) -> Self {
        Self::new(RelationKind::Causation { class }, from, to)
    }

    pub fn kind(&self) -> &RelationKind {
        &self.kind
    }

    pub fn a(&self) -> &UnitId {
        &self.a
    }

    pub fn b(&self) -> &UnitId {
        &self.b
    }

    /// Key under which at most one relation may exist: the kind rank plus the
    /// (already normalized) endpoints.
    pub(crate) fn uniqueness_key(&self) -> (u8, &UnitId, &UnitId) {
        (self.kind.rank(), &self.a, &self.b)
    }

    pub(crate) fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.uniqueness_key()
            .cmp(&other.uniqueness_key())
            .then_with(|| self.kind.cmp_detail(&other.kind))
    }
}

impl RelationKind {
    fn cmp_detail(&self, other: &Self) -> Ordering {
        match (self, other) {
            (RelationKind::Contiguity { via: x }, RelationKind::Contiguity { via: y }) => x.cmp(y),
            (RelationKind::Causation { class: x }, RelationKind::Causation { class: y }) => {
                x.cmp(y)
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            RelationKind::Resemblance => write!(f, "resemble {} ~ {}", self.a, self.b),
            RelationKind::Contiguity { via } => {
                write!(f, "contiguous {} - {} via {}", self.a, self.b, via)
            }
            RelationKind::Causation { class } => {
                write!(f, "cause {} -> {} class = {}", self.a, self.b, class)
            }
        }
    }
}

/// Where an action point comes from: a declared relation, or an opposition
/// synthesized between two units of the same subject.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionKind {
    Resemblance,
    Contiguity { via: ItemId },
    Causation { class: CausationClass },
    Opposition,
}

impl ActionKind {
    fn rank(&self) -> u8 {
        match self {
            ActionKind::Resemblance => 0,
            ActionKind::Contiguity { .. } => 1,
            ActionKind::Causation { .. } => 2,
            ActionKind::Opposition => 3,
        }
    }
}

impl From<&RelationKind> for ActionKind {
    fn from(kind: &RelationKind) -> Self {
        match kind {
            RelationKind::Resemblance => ActionKind::Resemblance,
            RelationKind::Contiguity { via } => ActionKind::Contiguity { via: via.clone() },
            RelationKind::Causation { class } => ActionKind::Causation { class: *class },
        }
    }
}

/// How an action point changes intensity during a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Both partners gain `alpha · min(I_a, I_b)`.
    Strengthen,
    /// The effect unit gains `beta_class · I_cause`.
    CausalAct,
    /// Both partners lose `gamma · min(I_a, I_b)`.
    Oppose,
    /// Contiguity: both partners receive `contiguity · min(I_a, I_b)`; the
    /// coefficient defaults to zero.
    Neutral,
    /// A declared resemblance whose endpoints fail the resemblance test.
    /// Kept for rendering, never changes intensity.
    Inert,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionPoint {
    #[serde(flatten)]
    pub kind: ActionKind,
    pub a: UnitId,
    pub b: UnitId,
    pub mode: Mode,
}

impl ActionPoint {
    /// The declared relation behind this point, if any.
    pub fn relation(&self) -> Option<Relation> {
        let kind = match &self.kind {
            ActionKind::Resemblance => RelationKind::Resemblance,
            ActionKind::Contiguity { via } => RelationKind::Contiguity { via: via.clone() },
            ActionKind::Causation { class } => RelationKind::Causation { class: *class },
            ActionKind::Opposition => return None,
        };
        Some(Relation::new(kind, self.a.clone(), self.b.clone()))
    }

    fn sort_key(&self) -> (u8, &UnitId, &UnitId) {
        (self.kind.rank(), &self.a, &self.b)
    }
}

impl fmt::Display for ActionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ActionKind::Resemblance => write!(f, "{} ~ {}", self.a, self.b),
            ActionKind::Contiguity { via } => write!(f, "{} - {} via {}", self.a, self.b, via),
            ActionKind::Causation { class } => write!(f, "{} -> {} ({class})", self.a, self.b),
            ActionKind::Opposition => write!(f, "{} opp {}", self.a, self.b),
        }
    }
}

/// Resemblance test: same subject item, same effect variant, and a Jaccard
/// overlap of the content items (everything but subject and pleasant marker)
/// of at least `sigma`. Two units with no content items overlap fully.
pub fn detect_resemblance(a: &EoCoS, b: &EoCoS, sigma: Coefficient) -> bool {
    if a.subject() != b.subject() {
        return false;
    }
    if !compare(a).same_variant(&compare(b)) {
        return false;
    }
    let left: BTreeSet<&ItemId> = a.content_items().collect();
    let right: BTreeSet<&ItemId> = b.content_items().collect();
    let union = left.union(&right).count() as i128;
    if union == 0 {
        return i128::from(sigma.micro()) <= i128::from(MICRO);
    }
    let shared = left.intersection(&right).count() as i128;
    shared * i128::from(MICRO) >= i128::from(sigma.micro()) * union
}

/// Opposition test: same subject, and some shared content item is desired
/// (ideally on the pleasant side) in one unit but ideally kept away from the
/// pleasant marker in the other.
pub fn detect_opposition(a: &EoCoS, b: &EoCoS) -> bool {
    if a.subject() != b.subject() {
        return false;
    }
    a.content_items().any(|x| {
        if x == b.subject() || x == b.pleasant() {
            return false;
        }
        match (
            a.ideally_contiguous_with_pleasant(x.as_str()),
            b.ideally_contiguous_with_pleasant(x.as_str()),
        ) {
            (Some(left), Some(right)) => left != right,
            _ => false,
        }
    })
}

/// Every declared relation becomes one action point; resemblance points whose
/// endpoints fail [`detect_resemblance`] are kept as [`Mode::Inert`]. An
/// opposition point is synthesized for each same-subject pair passing
/// [`detect_opposition`]. Output is sorted by (kind rank, a, b).
pub fn build_action_points(structure: &Structure, sigma: Coefficient) -> Vec<ActionPoint> {
    let mut points: Vec<ActionPoint> = structure
        .relations()
        .iter()
        .map(|rel| {
            let mode = match rel.kind() {
                RelationKind::Resemblance => {
                    let a = structure.unit(rel.a()).expect("validated endpoint");
                    let b = structure.unit(rel.b()).expect("validated endpoint");
                    if detect_resemblance(a, b, sigma) {
                        Mode::Strengthen
                    } else {
                        Mode::Inert
                    }
                }
                RelationKind::Contiguity { .. } => Mode::Neutral,
                RelationKind::Causation { .. } => Mode::CausalAct,
            };
            ActionPoint {
                kind: rel.kind().into(),
                a: rel.a().clone(),
                b: rel.b().clone(),
                mode,
            }
        })
        .collect();
    points.extend(opposition_points(structure));
    points.sort_by(|x, y| x.sort_key().cmp(&y.sort_key()));
    points
}

fn opposition_points(structure: &Structure) -> Vec<ActionPoint> {
    let mut by_subject: BTreeMap<&ItemId, Vec<&EoCoS>> = BTreeMap::new();
    for unit in structure.units().values() {
        by_subject.entry(unit.subject()).or_default().push(unit);
    }
    let mut out = Vec::new();
    for group in by_subject.values() {
        // units arrive in id order, so (i, j) with i < j is already (a, b) ordered
        for (i, a) in group.iter().enumerate() {
            for b in &group[i + 1..] {
                if detect_opposition(a, b) {
                    out.push(ActionPoint {
                        kind: ActionKind::Opposition,
                        a: a.id().clone(),
                        b: b.id().clone(),
                        mode: Mode::Oppose,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intensity::Intensity;
    use crate::model::{ItemKind, Placement, Side};

    fn id(s: &str) -> ItemId {
        ItemId::new(s).unwrap()
    }

    fn uid(s: &str) -> UnitId {
        UnitId::new(s).unwrap()
    }

    /// Unit with subject `subject`, marker `pleasant` on Near, and content
    /// items listed as (id, ideal side, actual side).
    fn unit(name: &str, subject: &str, content: &[(&str, Side, Side)]) -> EoCoS {
        let mut items = vec![
            (id(subject), ItemKind::Subject),
            (id("pleasant"), ItemKind::PleasantMarker),
        ];
        let mut ideal: Vec<(ItemId, Side)> =
            vec![(id(subject), Side::Near), (id("pleasant"), Side::Near)];
        let mut actual = ideal.clone();
        for (name, i, a) in content {
            items.push((id(name), ItemKind::Object));
            ideal.push((id(name), *i));
            actual.push((id(name), *a));
        }
        EoCoS::new(
            uid(name),
            id(subject),
            items,
            ideal.into_iter().collect::<Placement>(),
            actual.into_iter().collect::<Placement>(),
            Intensity::ONE,
        )
        .unwrap()
    }

    fn half() -> Coefficient {
        Coefficient::from_micro(500_000)
    }

    #[test]
    fn identical_units_resemble() {
        use Side::*;
        let a = unit("e1", "taro", &[("school", Near, Far)]);
        let b = unit("e2", "taro", &[("school", Near, Far)]);
        assert!(detect_resemblance(&a, &b, half()));
    }

    #[test]
    fn different_subjects_never_resemble() {
        use Side::*;
        let a = unit("e1", "taro", &[("school", Near, Far)]);
        let b = unit("e2", "hanako", &[("school", Near, Far)]);
        assert!(!detect_resemblance(&a, &b, half()));
        assert!(!detect_resemblance(&a, &b, Coefficient::ZERO));
    }

    #[test]
    fn low_overlap_fails_resemblance() {
        use Side::*;
        // {x, y} vs {y, z}: |∩| = 1, |∪| = 3
        let a = unit("e1", "taro", &[("x", Near, Near), ("y", Near, Near)]);
        let b = unit("e2", "taro", &[("y", Near, Near), ("z", Near, Near)]);
        let (inter, union) = (1.0_f64, 3.0_f64);
        assert!(inter / union < 0.5);
        assert!(!detect_resemblance(&a, &b, half()));
        assert!(detect_resemblance(&a, &b, Coefficient::from_micro(333_333)));
    }

    #[test]
    fn effect_variant_must_agree() {
        use Side::*;
        let a = unit("e1", "taro", &[("x", Near, Near)]);
        let b = unit("e2", "taro", &[("x", Near, Far)]);
        assert!(!detect_resemblance(&a, &b, Coefficient::ZERO));
    }

    #[test]
    fn opposition_cases() {
        use Side::*;
        let wants = unit("e1", "child", &[("trip", Near, Far)]);
        let refuses = unit("e2", "child", &[("trip", Far, Far)]);
        assert!(detect_opposition(&wants, &refuses));
        assert!(detect_opposition(&refuses, &wants));

        let same = unit("e3", "child", &[("trip", Near, Near)]);
        assert!(!detect_opposition(&wants, &same));

        let other = unit("e4", "parent", &[("trip", Far, Far)]);
        assert!(!detect_opposition(&wants, &other));
    }

    #[test]
    fn undirected_relations_normalize_endpoints() {
        assert_eq!(
            Relation::resemblance(uid("e2"), uid("e1")),
            Relation::resemblance(uid("e1"), uid("e2"))
        );
        let c = Relation::causation(uid("e2"), uid("e1"), CausationClass::Enabling);
        assert_eq!(c.a().as_str(), "e2");
    }

    #[test]
    fn action_points_from_structure() {
        use Side::*;
        let empty = Structure::new(Vec::new(), Vec::new()).unwrap();
        assert!(build_action_points(&empty, half()).is_empty());

        let e1 = unit("e1", "a", &[("x", Near, Near)]);
        let e2 = unit("e2", "b", &[("y", Near, Near)]);
        let s = Structure::new(
            vec![e1, e2],
            vec![Relation::causation(
                uid("e1"),
                uid("e2"),
                CausationClass::Triggering,
            )],
        )
        .unwrap();
        assert_eq!(
            build_action_points(&s, half()),
            vec![ActionPoint {
                kind: ActionKind::Causation {
                    class: CausationClass::Triggering
                },
                a: uid("e1"),
                b: uid("e2"),
                mode: Mode::CausalAct,
            }]
        );
    }

    #[test]
    fn opposition_is_synthesized_for_all_pairs() {
        use Side::*;
        let units = vec![
            unit("e3", "child", &[("trip", Far, Far)]),
            unit("e1", "child", &[("trip", Near, Far)]),
            unit("e2", "child", &[("trip", Near, Near)]),
            unit("e4", "parent", &[("trip", Far, Far)]),
        ];
        // brute force over every ordered pair, kept once per unordered pair
        let mut oracle = BTreeSet::new();
        for a in &units {
            for b in &units {
                if a.id() < b.id() && detect_opposition(a, b) {
                    oracle.insert((a.id().clone(), b.id().clone()));
                }
            }
        }
        let s = Structure::new(units, Vec::new()).unwrap();
        let got: BTreeSet<_> = build_action_points(&s, half())
            .into_iter()
            .map(|p| {
                assert_eq!(p.mode, Mode::Oppose);
                (p.a, p.b)
            })
            .collect();
        assert_eq!(got, oracle);
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn failing_resemblance_is_inert_and_contiguity_neutral() {
        use Side::*;
        let s = Structure::new(
            vec![
                unit("e1", "a", &[("x", Near, Near)]),
                unit("e2", "b", &[("x", Near, Near)]),
            ],
            vec![
                Relation::resemblance(uid("e2"), uid("e1")),
                Relation::contiguity(uid("e1"), uid("e2"), id("x")),
            ],
        )
        .unwrap();
        let modes: Vec<Mode> = build_action_points(&s, half())
            .iter()
            .map(|p| p.mode)
            .collect();
        assert_eq!(modes, vec![Mode::Inert, Mode::Neutral]);
    }
}
