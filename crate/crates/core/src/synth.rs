//! Seeded generators for scenarios: property tests, the acceptance suite and
//! benchmarks all draw from here so that every run sees the same inputs.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::intensity::{Coefficient, Intensity};
use crate::model::{EoCoS, ItemId, ItemKind, Placement, Side, UnitId};
use crate::montage::ConfigOverrides;
use crate::nl2::ScenarioDoc;
use crate::relations::{CausationClass, Relation, RelationKind};
use crate::structure::Structure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthParams {
    pub units: usize,
    /// Upper bound; duplicates are dropped, so fewer may come out.
    pub relations: usize,
    pub subjects: usize,
    /// Size of the shared content-item pool.
    pub content_items: usize,
    /// Content items per unit, at most.
    pub items_per_unit: usize,
    pub max_intensity: Intensity,
    /// Chance, in permille, that an item's actual side differs from its ideal.
    pub mismatch_permille: u32,
    /// Permit resemblance between units with different subjects.
    pub cross_subject_resemblance: bool,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            units: 8,
            relations: 12,
            subjects: 3,
            content_items: 6,
            items_per_unit: 3,
            max_intensity: Intensity::from_units(10),
            mismatch_permille: 300,
            cross_subject_resemblance: false,
        }
    }
}

impl SynthParams {
    /// Random small shape: up to 20 units and 40 relations.
    pub fn small(rng: &mut impl Rng) -> Self {
        SynthParams {
            units: rng.random_range(1..=20),
            relations: rng.random_range(0..=40),
            subjects: rng.random_range(1..=4),
            content_items: rng.random_range(1..=6),
            items_per_unit: rng.random_range(0..=4),
            mismatch_permille: rng.random_range(0..=600),
            ..SynthParams::default()
        }
    }

    /// The large shape used for the throughput budget.
    pub fn large(units: usize, relations: usize) -> Self {
        SynthParams {
            units,
            relations,
            subjects: (units / 5).max(1),
            content_items: 40,
            items_per_unit: 4,
            ..SynthParams::default()
        }
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn item(name: String) -> ItemId {
    ItemId::new(name).expect("generated ids are valid")
}

fn random_unit(rng: &mut impl Rng, index: usize, p: &SynthParams) -> EoCoS {
    let subject = item(format!("s{}", rng.random_range(0..p.subjects.max(1))));
    let marker = item("pleasant".into());
    let mut items = BTreeMap::new();
    items.insert(subject.clone(), ItemKind::Subject);
    items.insert(marker.clone(), ItemKind::PleasantMarker);
    let count = if p.content_items == 0 {
        0
    } else {
        rng.random_range(0..=p.items_per_unit.min(p.content_items))
    };
    while items.len() < count + 2 {
        let kind = *[
            ItemKind::Object,
            ItemKind::SubjectAspect,
            ItemKind::ObjectAspect,
        ]
        .choose(rng)
        .expect("non-empty");
        items
            .entry(item(format!("x{}", rng.random_range(0..p.content_items))))
            .or_insert(kind);
    }
    let ideal: Placement = items
        .keys()
        .map(|id| {
            let side = if *id == subject || *id == marker || rng.random_bool(0.5) {
                Side::Near
            } else {
                Side::Far
            };
            (id.clone(), side)
        })
        .collect();
    let actual: Placement = ideal
        .iter()
        .map(|(id, side)| {
            if rng.random_range(0..1000) < p.mismatch_permille {
                (id.clone(), side.opposite())
            } else {
                (id.clone(), side)
            }
        })
        .collect();
    let intensity = Intensity::from_micro(rng.random_range(0..=p.max_intensity.micro()));
    EoCoS::new(
        UnitId::new(format!("u{index}")).expect("generated ids are valid"),
        subject,
        items,
        ideal,
        actual,
        intensity,
    )
    .expect("generated units are valid")
}

/// A random valid structure. Units appear in a random order and relations in
/// generation order; both are canonicalized by [`Structure::new`].
pub fn random_structure(rng: &mut impl Rng, p: &SynthParams) -> Structure {
    let units: Vec<EoCoS> = (0..p.units).map(|i| random_unit(rng, i, p)).collect();
    let mut by_subject: BTreeMap<&ItemId, Vec<usize>> = BTreeMap::new();
    for (i, u) in units.iter().enumerate() {
        by_subject.entry(u.subject()).or_default().push(i);
    }

    let mut relations = Vec::new();
    let mut seen = BTreeSet::new();
    if units.len() >= 2 {
        let mut attempts = 0;
        while relations.len() < p.relations && attempts < p.relations * 4 {
            attempts += 1;
            let i = rng.random_range(0..units.len());
            let (a, b) = (&units[i], &units[rng.random_range(0..units.len())]);
            let kind = match rng.random_range(0..3) {
                0 => {
                    let peers = &by_subject[a.subject()];
                    let b = &units[*peers.choose(rng).expect("contains a")];
                    if a.id() == b.id() {
                        continue;
                    }
                    relations_push(
                        &mut relations,
                        &mut seen,
                        Relation::resemblance(a.id().clone(), b.id().clone()),
                    );
                    continue;
                }
                1 => {
                    let shared: Vec<&ItemId> = a
                        .items()
                        .keys()
                        .filter(|x| b.items().contains_key(*x))
                        .collect();
                    match shared.choose(rng) {
                        Some(via) => RelationKind::Contiguity {
                            via: (*via).clone(),
                        },
                        None => continue,
                    }
                }
                _ => RelationKind::Causation {
                    class: *CausationClass::ALL.choose(rng).expect("non-empty"),
                },
            };
            if a.id() == b.id() {
                continue;
            }
            let kind = if p.cross_subject_resemblance && rng.random_bool(0.1) {
                RelationKind::Resemblance
            } else {
                kind
            };
            relations_push(
                &mut relations,
                &mut seen,
                Relation::new(kind, a.id().clone(), b.id().clone()),
            );
        }
    }
    Structure::new(units, relations).expect("generated structures are valid")
}

fn relations_push(
    out: &mut Vec<Relation>,
    seen: &mut BTreeSet<(u8, UnitId, UnitId)>,
    rel: Relation,
) {
    let rank = match rel.kind() {
        RelationKind::Resemblance => 0,
        RelationKind::Contiguity { .. } => 1,
        RelationKind::Causation { .. } => 2,
    };
    if seen.insert((rank, rel.a().clone(), rel.b().clone())) {
        out.push(rel);
    }
}

fn random_coefficient(rng: &mut impl Rng, lo: i64, hi: i64) -> Coefficient {
    Coefficient::from_micro(rng.random_range(lo..=hi))
}

fn random_overrides<R: Rng>(rng: &mut R) -> ConfigOverrides {
    let mut o = ConfigOverrides::default();
    let pick = |rng: &mut R| rng.random_bool(0.3);
    if pick(rng) {
        o.alpha = Some(random_coefficient(rng, 0, 2_000_000));
    }
    if pick(rng) {
        o.beta_enabling = Some(random_coefficient(rng, -1_000_000, 1_000_000));
    }
    if pick(rng) {
        o.beta_preventing = Some(random_coefficient(rng, -1_000_000, 1_000_000));
    }
    if pick(rng) {
        o.beta_triggering = Some(random_coefficient(rng, -1_000_000, 1_000_000));
    }
    if pick(rng) {
        o.contiguity = Some(random_coefficient(rng, -500_000, 500_000));
    }
    if pick(rng) {
        o.gamma = Some(random_coefficient(rng, 0, 1_000_000));
    }
    if pick(rng) {
        // never below the generator's intensity ceiling
        o.i_max = Some(Intensity::from_micro(
            rng.random_range(10_000_000..=50_000_000),
        ));
    }
    if pick(rng) {
        o.resolve = Some(rng.random_bool(0.5));
    }
    if pick(rng) {
        o.rho = Some(Intensity::from_micro(rng.random_range(0..=5_000_000)));
    }
    if pick(rng) {
        o.rounds = Some(rng.random_range(1..=5));
    }
    if pick(rng) {
        o.sigma = Some(random_coefficient(rng, 0, 1_000_000));
    }
    if pick(rng) {
        o.tau = Some(Intensity::from_micro(rng.random_range(0..=2_000_000)));
    }
    o
}

const NAME_PARTS: [&str; 6] = [
    "fox",
    "chicken",
    "promise",
    "letter",
    "say \"hi\"",
    "back\\slash",
];

/// A random valid scenario document: structure, config block and pragma.
pub fn random_doc(rng: &mut impl Rng) -> ScenarioDoc {
    let mut params = SynthParams::small(rng);
    params.cross_subject_resemblance = rng.random_bool(0.2);
    let structure = random_structure(rng, &params);
    let name = (0..rng.random_range(0..3))
        .map(|_| *NAME_PARTS.choose(rng).expect("non-empty"))
        .collect::<Vec<_>>()
        .join(" ");
    ScenarioDoc {
        name,
        structure,
        config_overrides: random_overrides(rng),
        allow_cross_subject_resemblance: params.cross_subject_resemblance,
    }
}

/// Rebuilds `s` from its units and relations fed in a random order.
pub fn shuffled(rng: &mut impl Rng, s: &Structure) -> Structure {
    use rand::seq::SliceRandom;
    let mut units: Vec<EoCoS> = s.units().values().cloned().collect();
    let mut relations = s.relations().to_vec();
    units.shuffle(rng);
    relations.shuffle(rng);
    // undirected relations may also be written back to front
    let relations = relations.into_iter().map(|r| {
        if !r.kind().is_directed() && rng.random_bool(0.5) {
            Relation::new(r.kind().clone(), r.b().clone(), r.a().clone())
        } else {
            r
        }
    });
    Structure::new(units, relations.collect::<Vec<_>>()).expect("reordering keeps validity")
}
