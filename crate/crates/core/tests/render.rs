mod common;

use std::path::PathBuf;

use common::dot::parse_dot;
use eocos_core::synth::{random_structure, rng_from_seed, shuffled, SynthParams};
use eocos_core::{
    emit_dot, emit_trace_json, parse_scenario, run_eos, serialize_scenario, MontageConfig, RankDir,
    RenderOptions, Structure,
};

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn checker_rejects_broken_graphs() {
    assert!(parse_dot("digraph { a -> }").is_err());
    assert!(parse_dot("digraph { a [label=\"{x\"]; }").is_err());
    assert!(parse_dot("graph { }").is_err());
    assert!(parse_dot("digraph { a } b").is_err());
    let g = parse_dot("digraph g { rankdir=LR; a; b -> a [style=bold, label=\"x \\\"y\\\"\"]; }")
        .unwrap();
    assert_eq!(g.nodes.len(), 1);
    assert_eq!(g.edges[0].2[1].1, "x \"y\"");
}

#[test]
fn empty_and_single_unit_graphs() {
    let empty = emit_dot(&Structure::empty(), None, &RenderOptions::default()).unwrap();
    let g = parse_dot(&empty).unwrap();
    assert!(g.nodes.is_empty() && g.edges.is_empty());

    let s = random_structure(
        &mut rng_from_seed(1),
        &SynthParams {
            units: 1,
            ..SynthParams::default()
        },
    );
    let g = parse_dot(&emit_dot(&s, None, &RenderOptions::default()).unwrap()).unwrap();
    assert_eq!((g.nodes.len(), g.edges.len()), (1, 0));
}

#[test]
fn shuffled_input_renders_identically() {
    for seed in 0..50 {
        let s = random_structure(&mut rng_from_seed(seed), &SynthParams::default());
        let t = shuffled(&mut rng_from_seed(seed + 1000), &s);
        for opts in [
            RenderOptions::default(),
            RenderOptions {
                after_montage: true,
                rankdir: RankDir::TB,
                ..Default::default()
            },
        ] {
            let cfg = MontageConfig {
                resolve: true,
                ..Default::default()
            };
            let (rs, rt) = (run_eos(&s, &cfg).unwrap(), run_eos(&t, &cfg).unwrap());
            assert_eq!(
                emit_dot(&s, Some(&rs), &opts).unwrap(),
                emit_dot(&t, Some(&rt), &opts).unwrap()
            );
            assert_eq!(emit_trace_json(&rs), emit_trace_json(&rt));
        }
    }
}

#[test]
fn empty_trace() {
    let report = run_eos(&Structure::empty(), &MontageConfig::default()).unwrap();
    assert_eq!(emit_trace_json(&report), "{\n  \"deltas\": []\n}\n");
}

#[test]
fn fixtures_survive_serialization() {
    for name in [
        "education.nl2",
        "fox_and_chicken.nl2",
        "promise.nl2",
        "purloined.nl2",
    ] {
        let doc = parse_scenario(&fixture(name)).unwrap();
        let canonical = serialize_scenario(&doc);
        assert_eq!(parse_scenario(&canonical).unwrap(), doc, "{name}");
        let report = run_eos(&doc.structure, &doc.config_overrides.resolve_config()).unwrap();
        parse_dot(&emit_dot(&doc.structure, Some(&report), &RenderOptions::default()).unwrap())
            .unwrap();
    }
}
