//! NL2: the line-oriented scenario language the engine consumes.
//!
//! ```text
//! scenario "promise"
//! config {
//!   alpha = 0.5
//! }
//! eocos u1 {
//!   subject: parents
//!   intensity: 1.000000
//!   items {
//!     park: object
//!     parents: subject
//!     pleasant: pleasant
//!   }
//!   ideal {
//!     near: [park, parents, pleasant]
//!     far: []
//!   }
//!   actual {
//!     near: [parents, pleasant]
//!     far: [park]
//!   }
//! }
//! cause u1 -> u2 class = triggering
//! ```
//!
//! Relations are `resemble a ~ b`, `contiguous a - b via item` and
//! `cause a -> b class = enabling|preventing|triggering`. `#` starts a comment;
//! `#pragma allow-cross-subject-resemblance` turns E006 into a warning.

mod diagnostics;
mod lexer;
mod parser;

use std::fmt::Write as _;

pub use diagnostics::{codes, Diagnostic, Severity, SourceSpan};
pub use parser::{parse_with_diagnostics, ParseOutcome};

use crate::model::{EoCoS, Side};
use crate::montage::ConfigOverrides;
use crate::relations::Relation;
use crate::structure::Structure;

pub const CROSS_SUBJECT_PRAGMA: &str = "allow-cross-subject-resemblance";

/// A parsed, validated scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioDoc {
    pub name: String,
    pub structure: Structure,
    pub config_overrides: ConfigOverrides,
    pub allow_cross_subject_resemblance: bool,
}

/// Parses and validates scenario text. On failure every diagnostic found is
/// returned, warnings included.
pub fn parse_scenario(text: &str) -> Result<ScenarioDoc, Vec<Diagnostic>> {
    let outcome = parse_with_diagnostics(text);
    match outcome.doc {
        Some(doc) => Ok(doc),
        None => Err(outcome.diagnostics),
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn write_unit(out: &mut String, unit: &EoCoS) {
    let _ = writeln!(out, "eocos {} {{", unit.id());
    let _ = writeln!(out, "  subject: {}", unit.subject());
    let _ = writeln!(out, "  intensity: {}", unit.intensity());
    out.push_str("  items {\n");
    for (item, kind) in unit.items() {
        let _ = writeln!(out, "    {item}: {}", kind.keyword());
    }
    out.push_str("  }\n");
    for (label, placement) in [("ideal", unit.ideal()), ("actual", unit.actual())] {
        let _ = writeln!(out, "  {label} {{");
        for side in [Side::Near, Side::Far] {
            let ids: Vec<&str> = placement.on(side).map(|i| i.as_str()).collect();
            let _ = writeln!(out, "    {side}: [{}]", ids.join(", "));
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
}

fn write_relation(out: &mut String, rel: &Relation) {
    let _ = writeln!(out, "{rel}");
}

/// Canonical text: header, pragma, config, units by id, relations in
/// canonical order, two-space indentation, trailing newline.
pub fn serialize_scenario(doc: &ScenarioDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario {}", quote(&doc.name));
    if doc.allow_cross_subject_resemblance {
        let _ = writeln!(out, "#pragma {CROSS_SUBJECT_PRAGMA}");
    }
    if !doc.config_overrides.is_empty() {
        out.push_str("config {\n");
        for (key, value) in doc.config_overrides.entries() {
            let _ = writeln!(out, "  {key} = {value}");
        }
        out.push_str("}\n");
    }
    for unit in doc.structure.units().values() {
        write_unit(&mut out, unit);
    }
    for rel in doc.structure.relations() {
        write_relation(&mut out, rel);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"scenario "minimal"
eocos e1 {
  subject: child
  intensity: 1.000000
  items {
    child: subject
    pleasant: pleasant
    trip: object
  }
  ideal {
    near: [child, pleasant, trip]
    far: []
  }
  actual {
    near: [child, pleasant]
    far: [trip]
  }
}
"#;

    fn codes_of(text: &str) -> Vec<&'static str> {
        parse_with_diagnostics(text)
            .diagnostics
            .iter()
            .map(|d| d.code)
            .collect()
    }

    fn unit_block(id: &str, subject: &str, extra_items: &str) -> String {
        format!(
            "eocos {id} {{\n subject: {subject}\n intensity: 1\n items {{ {subject}: subject pleasant: pleasant {extra_items} }}\n ideal {{ near: [{subject}, pleasant] far: [] }}\n actual {{ near: [{subject}, pleasant] far: [] }}\n}}\n"
        )
    }

    #[test]
    fn minimal_doc_parses() {
        let doc = parse_scenario(MINIMAL).unwrap();
        assert_eq!(doc.name, "minimal");
        assert_eq!(doc.structure.len(), 1);
        assert!(doc.structure.relations().is_empty());
    }

    #[test]
    fn canonical_text_is_a_fixed_point() {
        let doc = parse_scenario(MINIMAL).unwrap();
        assert_eq!(serialize_scenario(&doc), MINIMAL);
    }

    #[test]
    fn empty_doc_serializes_to_header() {
        let doc = ScenarioDoc {
            name: "empty".into(),
            structure: Structure::empty(),
            config_overrides: ConfigOverrides::default(),
            allow_cross_subject_resemblance: false,
        };
        assert_eq!(serialize_scenario(&doc), "scenario \"empty\"\n");
        assert_eq!(parse_scenario("scenario \"empty\"\n").unwrap(), doc);
    }

    #[test]
    fn cross_subject_resemblance_is_e006() {
        let text = format!(
            "scenario \"x\"\n{}{}resemble e1 ~ e2\n",
            unit_block("e1", "taro", ""),
            unit_block("e2", "hanako", "")
        );
        let outcome = parse_with_diagnostics(&text);
        assert!(outcome.doc.is_none());
        assert_eq!(codes_of(&text), vec!["E006"]);

        let allowed = format!("#pragma {CROSS_SUBJECT_PRAGMA}\n{text}");
        let outcome = parse_with_diagnostics(&allowed);
        assert!(
            outcome
                .doc
                .as_ref()
                .unwrap()
                .allow_cross_subject_resemblance
        );
        assert_eq!(outcome.diagnostics.len(), 1);
        assert_eq!(outcome.diagnostics[0].severity, Severity::Warning);
        let canonical = serialize_scenario(outcome.doc.as_ref().unwrap());
        assert_eq!(parse_scenario(&canonical).unwrap(), outcome.doc.unwrap());
    }

    #[test]
    fn duplicate_units_report_both_spans() {
        let first = unit_block("e1", "taro", "");
        let text = format!("scenario \"x\"\n{first}{first}");
        let diags = parse_scenario(&text).unwrap_err();
        assert_eq!(diags.len(), 1);
        let d = &diags[0];
        assert_eq!(d.code, "E002");
        // oracle: every offset at which `eocos e1` is declared
        let decls: Vec<usize> = text.match_indices("eocos e1").map(|(i, _)| i + 6).collect();
        assert_eq!(decls.len(), 2);
        assert_eq!(d.span.offset, decls[1]);
        assert_eq!(
            d.related.iter().map(|s| s.offset).collect::<Vec<_>>(),
            vec![decls[0]]
        );
    }

    #[test]
    fn validation_codes() {
        let header = "scenario \"x\"\n";
        // missing marker
        let no_marker = "eocos e1 {\n subject: s\n intensity: 1\n items { s: subject }\n ideal { near: [s] far: [] }\n actual { near: [s] far: [] }\n}\n";
        assert_eq!(codes_of(&format!("{header}{no_marker}")), vec!["E004"]);
        // actual misses an item
        let missing = "eocos e1 {\n subject: s\n intensity: 1\n items { s: subject p: pleasant }\n ideal { near: [s, p] far: [] }\n actual { near: [s] far: [] }\n}\n";
        assert_eq!(codes_of(&format!("{header}{missing}")), vec!["E005"]);
        // over the cap
        let hot = unit_block("e1", "s", "").replace("intensity: 1", "intensity: 10.5");
        assert_eq!(codes_of(&format!("{header}{hot}")), vec!["E007"]);
        // cap raised in config
        let cfg = "config {\n i_max = 20\n}\n";
        assert!(parse_scenario(&format!("{header}{cfg}{hot}")).is_ok());
        // unknown relation endpoint
        let rel = format!(
            "{header}{}cause e1 -> e9 class = enabling\n",
            unit_block("e1", "s", "")
        );
        assert_eq!(codes_of(&rel), vec!["E003"]);
        // self relation
        let selfrel = format!("{header}{}resemble e1 ~ e1\n", unit_block("e1", "s", ""));
        assert_eq!(codes_of(&selfrel), vec!["E010"]);
        // subject of the wrong kind
        let wrong = no_marker
            .replace("items { s: subject }", "items { s: object p: pleasant }")
            .replace("[s]", "[s, p]");
        assert_eq!(codes_of(&format!("{header}{wrong}")), vec!["E009"]);
        // bad config values
        assert_eq!(
            codes_of(&format!("{header}config {{\n alpha = -1\n}}\n")),
            vec!["E008"]
        );
        assert_eq!(
            codes_of(&format!("{header}config {{\n omega = 1\n}}\n")),
            vec!["E008"]
        );
        // unknown pragma is only a warning
        let outcome = parse_with_diagnostics(&format!("#pragma shout\n{header}"));
        assert!(outcome.doc.is_some());
        assert_eq!(outcome.diagnostics[0].code, "W001");
    }

    #[test]
    fn relations_parse_and_normalize() {
        let text = format!(
            "scenario \"x\"\n{}{}resemble e2 ~ e1\ncontiguous e2 - e1 via shared\ncause e2 -> e1 class = preventing\n",
            unit_block("e1", "s", "shared: object").replace("near: [s, pleasant]", "near: [s, pleasant, shared]"),
            unit_block("e2", "s", "shared: object").replace("near: [s, pleasant]", "near: [s, pleasant, shared]")
        );
        let doc = parse_scenario(&text).unwrap();
        let canonical = serialize_scenario(&doc);
        assert!(canonical.contains(
            "resemble e1 ~ e2\ncontiguous e1 - e2 via shared\ncause e2 -> e1 class = preventing\n"
        ));
        assert_eq!(
            serialize_scenario(&parse_scenario(&canonical).unwrap()),
            canonical
        );
    }

    #[test]
    fn recovers_after_a_broken_block() {
        let broken = "eocos e1 {\n subject s\n}\n";
        let text = format!(
            "scenario \"x\"\n{broken}{}cause e2 -> e3 class = sometimes\n{}",
            unit_block("e2", "s", ""),
            unit_block("e2", "s", "")
        );
        let codes = codes_of(&text);
        // missing colon, bad class, duplicate e2 (found after recovery)
        assert_eq!(codes, vec!["E001", "E001", "E002"]);
    }

    #[test]
    fn missing_header_and_garbage() {
        let codes = codes_of("eocos");
        assert!(codes.iter().all(|c| *c == "E001"));
        assert!(!codes.is_empty());
        let outcome = parse_with_diagnostics("");
        assert_eq!(outcome.diagnostics.len(), 1);
        assert!(outcome.diagnostics[0].span.is_within(""));
    }

    #[test]
    fn aspects_and_negative_config() {
        let text = "scenario \"a\"\nconfig {\n  beta_preventing = -0.75\n}\neocos e1 {\n subject: s\n intensity: 0.25\n items { s: subject p: pleasant x: s-aspect y: o-aspect }\n ideal { near: [s, p, x] far: [y] }\n actual { near: [s, p] far: [x, y,] }\n}\n";
        let doc = parse_scenario(text).unwrap();
        let canonical = serialize_scenario(&doc);
        assert!(canonical.contains("    x: s-aspect\n    y: o-aspect\n"));
        assert!(canonical.contains("  beta_preventing = -0.750000\n"));
        assert_eq!(parse_scenario(&canonical).unwrap(), doc);
    }
}
