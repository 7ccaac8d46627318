//! A second, deliberately naive montage implementation. It shares nothing
//! with the engine beyond the public accessors: relations are scanned
//! directly, opposition is found by brute force over all ordered pairs, and
//! the arithmetic is done on plain i128 micro values.

use std::collections::{BTreeMap, BTreeSet};

use eocos_core::{CausationClass, EoCoS, MontageConfig, RelationKind, Structure};

const M: i128 = 1_000_000;

fn scale(coef: i64, intensity: i128) -> i128 {
    // i128 division truncates toward zero
    i128::from(coef) * intensity / M
}

fn mismatched(u: &EoCoS) -> BTreeSet<String> {
    u.items()
        .keys()
        .filter(|i| u.ideal().side(i.as_str()) != u.actual().side(i.as_str()))
        .map(|i| i.to_string())
        .collect()
}

fn content(u: &EoCoS) -> BTreeSet<String> {
    u.items()
        .keys()
        .filter(|i| *i != u.subject() && *i != u.pleasant())
        .map(|i| i.to_string())
        .collect()
}

pub fn resembles(a: &EoCoS, b: &EoCoS, sigma: i64) -> bool {
    if a.subject() != b.subject() {
        return false;
    }
    if mismatched(a).is_empty() != mismatched(b).is_empty() {
        return false;
    }
    let (x, y) = (content(a), content(b));
    let union = x.union(&y).count() as i128;
    let inter = x.intersection(&y).count() as i128;
    if union == 0 {
        return true;
    }
    inter * M >= i128::from(sigma) * union
}

fn desired(u: &EoCoS, item: &str) -> Option<bool> {
    let p = u.ideal().side(u.pleasant().as_str())?;
    u.ideal().side(item).map(|s| s == p)
}

pub fn opposed(a: &EoCoS, b: &EoCoS) -> bool {
    if a.subject() != b.subject() {
        return false;
    }
    let shared: Vec<String> = content(a).intersection(&content(b)).cloned().collect();
    shared.iter().any(|i| match (desired(a, i), desired(b, i)) {
        (Some(x), Some(y)) => x != y,
        _ => false,
    })
}

/// Net per-unit delta of one round computed from `intensity`.
pub fn round_totals(
    s: &Structure,
    cfg: &MontageConfig,
    intensity: &BTreeMap<String, i128>,
) -> BTreeMap<String, i128> {
    let mut totals: BTreeMap<String, i128> = BTreeMap::new();
    let mut add = |id: &str, v: i128| *totals.entry(id.to_owned()).or_default() += v;
    for rel in s.relations() {
        let (a, b) = (rel.a().as_str(), rel.b().as_str());
        let (ia, ib) = (intensity[a], intensity[b]);
        match rel.kind() {
            RelationKind::Resemblance => {
                if resembles(
                    s.unit(rel.a()).unwrap(),
                    s.unit(rel.b()).unwrap(),
                    cfg.sigma.micro(),
                ) {
                    let d = scale(cfg.alpha.micro(), ia.min(ib));
                    add(a, d);
                    add(b, d);
                }
            }
            RelationKind::Contiguity { .. } => {
                let d = scale(cfg.contiguity.micro(), ia.min(ib));
                add(a, d);
                add(b, d);
            }
            RelationKind::Causation { class } => {
                let beta = match class {
                    CausationClass::Enabling => cfg.beta.enabling,
                    CausationClass::Preventing => cfg.beta.preventing,
                    CausationClass::Triggering => cfg.beta.triggering,
                };
                add(b, scale(beta.micro(), ia));
            }
        }
    }
    let units: Vec<&EoCoS> = s.units().values().collect();
    for (i, x) in units.iter().enumerate() {
        for y in &units[i + 1..] {
            if opposed(x, y) {
                let d = -scale(
                    cfg.gamma.micro(),
                    intensity[x.id().as_str()].min(intensity[y.id().as_str()]),
                );
                add(x.id().as_str(), d);
                add(y.id().as_str(), d);
            }
        }
    }
    totals
}

pub struct OracleRun {
    pub final_intensity: BTreeMap<String, i128>,
    /// Sum of all deltas received, over every round.
    pub cumulative: BTreeMap<String, i128>,
    pub pleasant_after: BTreeMap<String, bool>,
}

pub fn simulate(s: &Structure, cfg: &MontageConfig) -> OracleRun {
    let cap = i128::from(cfg.i_max.micro());
    let mut intensity: BTreeMap<String, i128> = s
        .units()
        .iter()
        .map(|(id, u)| (id.to_string(), i128::from(u.intensity().micro())))
        .collect();
    let mut cumulative: BTreeMap<String, i128> = BTreeMap::new();
    for _ in 0..cfg.rounds {
        let totals = round_totals(s, cfg, &intensity);
        for (id, t) in &totals {
            *cumulative.entry(id.clone()).or_default() += t;
            let v = intensity.get_mut(id).unwrap();
            *v = (*v + t).clamp(0, cap);
        }
    }
    let pleasant_after = s
        .units()
        .iter()
        .map(|(id, u)| {
            let contradictory = !mismatched(u).is_empty();
            let crosses = cfg.resolve && intensity[id.as_str()] >= i128::from(cfg.rho.micro());
            (id.to_string(), !contradictory || crosses)
        })
        .collect();
    OracleRun {
        final_intensity: intensity,
        cumulative,
        pleasant_after,
    }
}
