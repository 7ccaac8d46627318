//! Recursive-descent parser for scenario text.
//!
//! Parsing runs in two passes. The syntax pass builds a loosely-typed tree and
//! recovers at block boundaries, so one malformed block does not hide errors in
//! later ones. The validation pass then checks ids, references and unit
//! invariants on that tree and only builds the [`Structure`] when no error was
//! found.

use std::collections::{BTreeMap, HashMap};

use super::diagnostics::{codes, Diagnostic, SourceSpan};
use super::lexer::{lex, Token, TokenKind};
use super::{ScenarioDoc, CROSS_SUBJECT_PRAGMA};
use crate::intensity::{parse_micro, Intensity};
use crate::model::{EoCoS, ItemId, ItemKind, Placement, Side, UnitId};
use crate::montage::ConfigOverrides;
use crate::relations::{CausationClass, Relation};
use crate::structure::Structure;

#[derive(Debug, Clone)]
struct Spanned<T> {
    value: T,
    span: SourceSpan,
}

type Name = Spanned<String>;

#[derive(Debug)]
struct SidesDecl {
    keyword: SourceSpan,
    near: Vec<Name>,
    far: Vec<Name>,
}

#[derive(Debug)]
struct UnitDecl {
    id: Name,
    subject: Name,
    intensity: Spanned<String>,
    items: Vec<(Name, Spanned<ItemKind>)>,
    ideal: SidesDecl,
    actual: SidesDecl,
}

#[derive(Debug)]
enum RelationDeclKind {
    Resemble,
    Contiguous { via: Name },
    Cause { class: Spanned<CausationClass> },
}

#[derive(Debug)]
struct RelationDecl {
    keyword: SourceSpan,
    kind: RelationDeclKind,
    a: Name,
    b: Name,
}

#[derive(Debug)]
struct ConfigEntry {
    key: Name,
    value: Spanned<String>,
}

#[derive(Debug, Default)]
struct DocTree {
    name: Option<String>,
    configs: Vec<(SourceSpan, Vec<ConfigEntry>)>,
    units: Vec<UnitDecl>,
    relations: Vec<RelationDecl>,
}

/// Marker for "a diagnostic has been recorded".
struct Reported;

type PResult<T> = Result<T, Reported>;

const TOP_LEVEL: [&str; 5] = ["eocos", "resemble", "contiguous", "cause", "config"];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diagnostics: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn error_here(&mut self, expected: &str) -> Reported {
        let tok = self.peek();
        let message = format!("expected {expected}, found {}", tok.kind.describe());
        let span = tok.span;
        self.diagnostics
            .push(Diagnostic::error(codes::SYNTAX, span, message));
        Reported
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<SourceSpan> {
        if self.peek().kind == kind {
            Ok(self.bump().span)
        } else {
            Err(self.error_here(&kind.describe()))
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == word)
    }

    fn expect_keyword(&mut self, word: &str) -> PResult<SourceSpan> {
        if self.is_keyword(word) {
            Ok(self.bump().span)
        } else {
            Err(self.error_here(&format!("`{word}`")))
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<Name> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                let value = s.clone();
                let span = self.bump().span;
                Ok(Spanned { value, span })
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn expect_number(&mut self, what: &str) -> PResult<Spanned<String>> {
        match &self.peek().kind {
            TokenKind::Number(n) => {
                let value = n.clone();
                let span = self.bump().span;
                Ok(Spanned { value, span })
            }
            _ => Err(self.error_here(what)),
        }
    }

    /// Whether the next token begins a top-level construct: a top-level
    /// keyword first on its line, followed by an id or `{` (so `cause: object`
    /// inside an items block does not qualify).
    fn at_construct_start(&self) -> bool {
        let tok = self.peek();
        let keyword = matches!(&tok.kind, TokenKind::Ident(w) if TOP_LEVEL.contains(&w.as_str()));
        let next = self.tokens.get(self.pos + 1).map(|t| &t.kind);
        keyword
            && tok.line_start
            && matches!(next, Some(TokenKind::Ident(_)) | Some(TokenKind::LBrace))
    }

    /// Skips to the start of the next top-level construct.
    fn recover(&mut self) {
        while !self.at_eof() && !self.at_construct_start() {
            self.bump();
        }
    }

    fn parse_doc(&mut self) -> DocTree {
        let mut tree = DocTree::default();
        if self.is_keyword("scenario") {
            self.bump();
            match &self.peek().kind {
                TokenKind::Str(s) => {
                    tree.name = Some(s.clone());
                    self.bump();
                }
                _ => {
                    self.error_here("scenario name string");
                }
            }
        } else {
            self.error_here("`scenario \"name\"` header");
        }

        while !self.at_eof() {
            let start = self.pos;
            let result = match &self.peek().kind {
                TokenKind::Ident(w) if w == "eocos" => {
                    self.parse_unit().map(|u| tree.units.push(u))
                }
                TokenKind::Ident(w) if w == "config" => {
                    self.parse_config().map(|c| tree.configs.push(c))
                }
                TokenKind::Ident(w)
                    if matches!(w.as_str(), "resemble" | "contiguous" | "cause") =>
                {
                    self.parse_relation().map(|r| tree.relations.push(r))
                }
                _ => Err(self.error_here("`eocos`, `config`, `resemble`, `contiguous` or `cause`")),
            };
            if result.is_err() {
                self.recover();
                // a construct that failed on its first token must not be retried
                if self.pos == start && !self.at_eof() {
                    self.bump();
                    self.recover();
                }
            }
        }
        tree
    }

    fn parse_config(&mut self) -> PResult<(SourceSpan, Vec<ConfigEntry>)> {
        let keyword = self.expect_keyword("config")?;
        self.expect(TokenKind::LBrace)?;
        let mut entries = Vec::new();
        while self.peek().kind != TokenKind::RBrace {
            let key = self.expect_ident("config key or `}`")?;
            self.expect(TokenKind::Equals)?;
            let negative = if self.peek().kind == TokenKind::Minus {
                Some(self.bump().span)
            } else {
                None
            };
            let number = self.expect_number("decimal value")?;
            let value = match negative {
                Some(minus) => Spanned {
                    value: format!("-{}", number.value),
                    span: join(minus, number.span),
                },
                None => number,
            };
            entries.push(ConfigEntry { key, value });
        }
        self.expect(TokenKind::RBrace)?;
        Ok((keyword, entries))
    }

    fn parse_unit(&mut self) -> PResult<UnitDecl> {
        self.expect_keyword("eocos")?;
        let id = self.expect_ident("unit id")?;
        self.expect(TokenKind::LBrace)?;

        self.expect_keyword("subject")?;
        self.expect(TokenKind::Colon)?;
        let subject = self.expect_ident("subject item id")?;

        self.expect_keyword("intensity")?;
        self.expect(TokenKind::Colon)?;
        let intensity = self.expect_number("intensity value")?;

        self.expect_keyword("items")?;
        self.expect(TokenKind::LBrace)?;
        let mut items = Vec::new();
        loop {
            let item = self.expect_ident("item id")?;
            self.expect(TokenKind::Colon)?;
            let kind = self.parse_item_kind()?;
            items.push((item, kind));
            if self.peek().kind == TokenKind::RBrace {
                break;
            }
        }
        self.expect(TokenKind::RBrace)?;

        let ideal = self.parse_sides("ideal")?;
        let actual = self.parse_sides("actual")?;
        self.expect(TokenKind::RBrace)?;
        Ok(UnitDecl {
            id,
            subject,
            intensity,
            items,
            ideal,
            actual,
        })
    }

    fn parse_item_kind(&mut self) -> PResult<Spanned<ItemKind>> {
        const EXPECTED: &str = "item kind (subject, object, s-aspect, o-aspect, pleasant)";
        let word = match &self.peek().kind {
            TokenKind::Ident(w) => w.clone(),
            _ => return Err(self.error_here(EXPECTED)),
        };
        let start = self.peek().span;
        match word.as_str() {
            "s" | "o" => {
                self.bump();
                self.expect(TokenKind::Minus)?;
                let end = self.expect_keyword("aspect")?;
                let value = if word == "s" {
                    ItemKind::SubjectAspect
                } else {
                    ItemKind::ObjectAspect
                };
                Ok(Spanned {
                    value,
                    span: join(start, end),
                })
            }
            other => match ItemKind::from_keyword(other) {
                Some(value) => {
                    self.bump();
                    Ok(Spanned { value, span: start })
                }
                None => Err(self.error_here(EXPECTED)),
            },
        }
    }

    fn parse_sides(&mut self, keyword: &str) -> PResult<SidesDecl> {
        let kw = self.expect_keyword(keyword)?;
        self.expect(TokenKind::LBrace)?;
        self.expect_keyword("near")?;
        self.expect(TokenKind::Colon)?;
        let near = self.parse_id_list()?;
        self.expect_keyword("far")?;
        self.expect(TokenKind::Colon)?;
        let far = self.parse_id_list()?;
        self.expect(TokenKind::RBrace)?;
        Ok(SidesDecl {
            keyword: kw,
            near,
            far,
        })
    }

    fn parse_id_list(&mut self) -> PResult<Vec<Name>> {
        self.expect(TokenKind::LBracket)?;
        let mut ids = Vec::new();
        while self.peek().kind != TokenKind::RBracket {
            ids.push(self.expect_ident("item id or `]`")?);
            if self.peek().kind == TokenKind::Comma {
                self.bump();
            } else if self.peek().kind != TokenKind::RBracket {
                return Err(self.error_here("`,` or `]`"));
            }
        }
        self.expect(TokenKind::RBracket)?;
        Ok(ids)
    }

    fn parse_relation(&mut self) -> PResult<RelationDecl> {
        let keyword_tok = self.bump();
        let TokenKind::Ident(word) = keyword_tok.kind else {
            unreachable!("caller checked for a relation keyword");
        };
        let a = self.expect_ident("unit id")?;
        let (kind, b) = match word.as_str() {
            "resemble" => {
                self.expect(TokenKind::Tilde)?;
                (RelationDeclKind::Resemble, self.expect_ident("unit id")?)
            }
            "contiguous" => {
                self.expect(TokenKind::Minus)?;
                let b = self.expect_ident("unit id")?;
                self.expect_keyword("via")?;
                let via = self.expect_ident("item id")?;
                (RelationDeclKind::Contiguous { via }, b)
            }
            _ => {
                self.expect(TokenKind::Arrow)?;
                let b = self.expect_ident("unit id")?;
                self.expect_keyword("class")?;
                self.expect(TokenKind::Equals)?;
                let class_name = self.expect_ident("causation class")?;
                let Some(class) = CausationClass::from_keyword(&class_name.value) else {
                    self.diagnostics.push(Diagnostic::error(
                        codes::SYNTAX,
                        class_name.span,
                        format!(
                            "unknown causation class `{}`: expected enabling, preventing or triggering",
                            class_name.value
                        ),
                    ));
                    return Err(Reported);
                };
                (
                    RelationDeclKind::Cause {
                        class: Spanned {
                            value: class,
                            span: class_name.span,
                        },
                    },
                    b,
                )
            }
        };
        Ok(RelationDecl {
            keyword: keyword_tok.span,
            kind,
            a,
            b,
        })
    }
}

fn join(start: SourceSpan, end: SourceSpan) -> SourceSpan {
    // both spans lie on one line in every caller
    let length = if end.line == start.line {
        end.column + end.length - start.column
    } else {
        start.length
    };
    SourceSpan { length, ..start }
}

/// Result of parsing: the document when no errors were found, plus every
/// diagnostic (errors and warnings) in source order.
#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub doc: Option<ScenarioDoc>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutcome {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }

    pub fn has_syntax_errors(&self) -> bool {
        self.errors().any(|d| d.code == codes::SYNTAX)
    }
}

pub fn parse_with_diagnostics(text: &str) -> ParseOutcome {
    let lexed = lex(text);
    let mut parser = Parser {
        tokens: lexed.tokens,
        pos: 0,
        diagnostics: lexed.diagnostics,
    };
    let tree = parser.parse_doc();
    let mut diagnostics = parser.diagnostics;

    let mut allow_cross_subject = false;
    for pragma in &lexed.pragmas {
        if pragma.text == CROSS_SUBJECT_PRAGMA {
            allow_cross_subject = true;
        } else {
            diagnostics.push(Diagnostic::warning(
                codes::UNKNOWN_PRAGMA,
                pragma.span,
                format!("unknown pragma `{}`", pragma.text),
            ));
        }
    }

    let syntax_ok = !diagnostics.iter().any(Diagnostic::is_error);
    let mut validator = Validator {
        diagnostics: Vec::new(),
        allow_cross_subject,
    };
    let doc = validator.validate(tree);
    diagnostics.extend(validator.diagnostics);
    diagnostics.sort_by(|a, b| {
        (a.span.offset, a.code, &a.message).cmp(&(b.span.offset, b.code, &b.message))
    });
    let has_errors = diagnostics.iter().any(Diagnostic::is_error);
    ParseOutcome {
        doc: if syntax_ok && !has_errors { doc } else { None },
        diagnostics,
    }
}

struct Validator {
    diagnostics: Vec<Diagnostic>,
    allow_cross_subject: bool,
}

impl Validator {
    fn error(&mut self, code: &'static str, span: SourceSpan, message: String) {
        self.diagnostics
            .push(Diagnostic::error(code, span, message));
    }

    fn validate(&mut self, tree: DocTree) -> Option<ScenarioDoc> {
        let overrides = self.validate_config(&tree.configs);
        let i_max = overrides.resolve_config().i_max;

        let mut first_unit: HashMap<&str, SourceSpan> = HashMap::new();
        let mut units = Vec::new();
        for decl in &tree.units {
            if let Some(first) = first_unit.get(decl.id.value.as_str()) {
                self.diagnostics.push(
                    Diagnostic::error(
                        codes::DUPLICATE_ID,
                        decl.id.span,
                        format!("duplicate unit id `{}`", decl.id.value),
                    )
                    .with_related(*first),
                );
                continue;
            }
            first_unit.insert(&decl.id.value, decl.id.span);
            if let Some(unit) = self.validate_unit(decl, i_max) {
                units.push(unit);
            }
        }

        let by_id: HashMap<&str, &UnitDecl> = tree
            .units
            .iter()
            .map(|u| (u.id.value.as_str(), u))
            .rev() // first declaration wins
            .collect();
        let mut relations = Vec::new();
        let mut seen: BTreeMap<(u8, String, String), SourceSpan> = BTreeMap::new();
        for decl in &tree.relations {
            if let Some(rel) = self.validate_relation(decl, &by_id, &mut seen) {
                relations.push(rel);
            }
        }

        if self.diagnostics.iter().any(Diagnostic::is_error) {
            return None;
        }
        let structure = match Structure::new(units, relations) {
            Ok(s) => s,
            Err(e) => {
                // every structure rule is checked above with better spans
                self.error(
                    codes::UNKNOWN_REFERENCE,
                    SourceSpan {
                        line: 1,
                        column: 1,
                        length: 0,
                        offset: 0,
                    },
                    e.to_string(),
                );
                return None;
            }
        };
        Some(ScenarioDoc {
            name: tree.name.unwrap_or_default(),
            structure,
            config_overrides: overrides,
            allow_cross_subject_resemblance: self.allow_cross_subject,
        })
    }

    fn validate_config(&mut self, configs: &[(SourceSpan, Vec<ConfigEntry>)]) -> ConfigOverrides {
        let mut overrides = ConfigOverrides::default();
        let mut seen: HashMap<&str, SourceSpan> = HashMap::new();
        for (i, (keyword, entries)) in configs.iter().enumerate() {
            if i > 0 {
                self.error(codes::CONFIG, *keyword, "duplicate `config` block".into());
            }
            for entry in entries {
                if let Some(first) = seen.get(entry.key.value.as_str()) {
                    self.diagnostics.push(
                        Diagnostic::error(
                            codes::CONFIG,
                            entry.key.span,
                            format!("duplicate config key `{}`", entry.key.value),
                        )
                        .with_related(*first),
                    );
                    continue;
                }
                seen.insert(&entry.key.value, entry.key.span);
                if let Err(e) = overrides.set(&entry.key.value, &entry.value.value) {
                    self.error(
                        codes::CONFIG,
                        join(entry.key.span, entry.value.span),
                        e.to_string(),
                    );
                }
            }
        }
        if let Some((keyword, _)) = configs.first() {
            if let Err(e) = overrides.resolve_config().validate() {
                self.error(codes::CONFIG, *keyword, e.to_string());
            }
        }
        overrides
    }

    fn validate_unit(&mut self, decl: &UnitDecl, i_max: Intensity) -> Option<EoCoS> {
        let before = self.diagnostics.len();
        let unit_name = &decl.id.value;

        let intensity = match parse_micro(&decl.intensity.value) {
            Ok(micro) => {
                let value = Intensity::from_micro(micro.max(0) as u64);
                if value > i_max {
                    self.error(
                        codes::INTENSITY_RANGE,
                        decl.intensity.span,
                        format!("intensity {value} of `{unit_name}` exceeds i_max {i_max}"),
                    );
                }
                value
            }
            Err(e) => {
                self.error(codes::INTENSITY_RANGE, decl.intensity.span, e.to_string());
                Intensity::ZERO
            }
        };

        let mut items: BTreeMap<&str, (ItemKind, SourceSpan)> = BTreeMap::new();
        for (name, kind) in &decl.items {
            if let Some((_, first)) = items.get(name.value.as_str()) {
                self.diagnostics.push(
                    Diagnostic::error(
                        codes::DUPLICATE_ID,
                        name.span,
                        format!("duplicate item `{}` in `{unit_name}`", name.value),
                    )
                    .with_related(*first),
                );
                continue;
            }
            items.insert(&name.value, (kind.value, name.span));
        }

        let markers = items
            .values()
            .filter(|(k, _)| *k == ItemKind::PleasantMarker)
            .count();
        if markers != 1 {
            let what = if markers == 0 { "missing" } else { "duplicate" };
            self.error(
                codes::PLEASANT_MARKER,
                decl.id.span,
                format!("{what} pleasant marker in `{unit_name}`: expected exactly one, found {markers}"),
            );
        }

        match items.get(decl.subject.value.as_str()) {
            None => self.error(
                codes::UNKNOWN_REFERENCE,
                decl.subject.span,
                format!(
                    "subject `{}` is not declared in `items`",
                    decl.subject.value
                ),
            ),
            Some((ItemKind::Subject, _)) => {}
            Some((other, _)) => self.error(
                codes::SUBJECT,
                decl.subject.span,
                format!(
                    "subject `{}` is declared as `{}`, expected `subject`",
                    decl.subject.value,
                    other.keyword()
                ),
            ),
        }
        let subjects = items
            .values()
            .filter(|(k, _)| *k == ItemKind::Subject)
            .count();
        if subjects > 1 {
            self.error(
                codes::SUBJECT,
                decl.id.span,
                format!("`{unit_name}` declares {subjects} subject items, expected one"),
            );
        }

        let ideal = self.validate_sides(&decl.ideal, "ideal", &items);
        let actual = self.validate_sides(&decl.actual, "actual", &items);

        if self.diagnostics.len() != before {
            return None;
        }
        let to_item = |s: &str| ItemId::new(s).ok();
        let unit = EoCoS::new(
            UnitId::new(unit_name.as_str()).ok()?,
            to_item(&decl.subject.value)?,
            items
                .iter()
                .map(|(k, (kind, _))| to_item(k).map(|id| (id, *kind)))
                .collect::<Option<Vec<_>>>()?,
            ideal?,
            actual?,
            intensity,
        );
        match unit {
            Ok(u) => Some(u),
            Err(e) => {
                self.error(codes::PLACEMENT_KEYS, decl.id.span, e.to_string());
                None
            }
        }
    }

    fn validate_sides(
        &mut self,
        sides: &SidesDecl,
        which: &str,
        items: &BTreeMap<&str, (ItemKind, SourceSpan)>,
    ) -> Option<Placement> {
        let mut placed: BTreeMap<&str, (Side, SourceSpan)> = BTreeMap::new();
        let mut ok = true;
        for (side, names) in [(Side::Near, &sides.near), (Side::Far, &sides.far)] {
            for name in names {
                if let Some((_, first)) = placed.get(name.value.as_str()) {
                    self.diagnostics.push(
                        Diagnostic::error(
                            codes::DUPLICATE_ID,
                            name.span,
                            format!("item `{}` is placed twice in {which}", name.value),
                        )
                        .with_related(*first),
                    );
                    ok = false;
                    continue;
                }
                if !items.contains_key(name.value.as_str()) {
                    self.error(
                        codes::UNKNOWN_REFERENCE,
                        name.span,
                        format!("{which} places undeclared item `{}`", name.value),
                    );
                    ok = false;
                }
                placed.insert(&name.value, (side, name.span));
            }
        }
        let missing: Vec<&str> = items
            .keys()
            .filter(|k| !placed.contains_key(*k))
            .copied()
            .collect();
        if !missing.is_empty() {
            self.error(
                codes::PLACEMENT_KEYS,
                sides.keyword,
                format!("{which} does not place item(s) {}", missing.join(", ")),
            );
            ok = false;
        }
        if !ok {
            return None;
        }
        placed
            .into_iter()
            .map(|(k, (side, _))| ItemId::new(k).ok().map(|id| (id, side)))
            .collect()
    }

    fn validate_relation(
        &mut self,
        decl: &RelationDecl,
        units: &HashMap<&str, &UnitDecl>,
        seen: &mut BTreeMap<(u8, String, String), SourceSpan>,
    ) -> Option<Relation> {
        let before = self.diagnostics.len();
        let span = join(decl.keyword, decl.b.span);
        let endpoint = |v: &mut Self, name: &Name| match units.get(name.value.as_str()) {
            Some(u) => Some(*u),
            None => {
                v.error(
                    codes::UNKNOWN_REFERENCE,
                    name.span,
                    format!("relation references unknown unit `{}`", name.value),
                );
                None
            }
        };
        let a = endpoint(self, &decl.a);
        let b = endpoint(self, &decl.b);
        if decl.a.value == decl.b.value {
            self.error(
                codes::SELF_RELATION,
                span,
                format!("relation connects `{}` to itself", decl.a.value),
            );
        }

        let (rank, directed) = match decl.kind {
            RelationDeclKind::Resemble => (0, false),
            RelationDeclKind::Contiguous { .. } => (1, false),
            RelationDeclKind::Cause { .. } => (2, true),
        };
        let (x, y) = if !directed && decl.b.value < decl.a.value {
            (decl.b.value.clone(), decl.a.value.clone())
        } else {
            (decl.a.value.clone(), decl.b.value.clone())
        };
        match seen.get(&(rank, x.clone(), y.clone())) {
            Some(first) => self.diagnostics.push(
                Diagnostic::error(
                    codes::DUPLICATE_ID,
                    span,
                    "duplicate relation between the same units".to_string(),
                )
                .with_related(*first),
            ),
            None => {
                seen.insert((rank, x, y), span);
            }
        }

        match &decl.kind {
            RelationDeclKind::Resemble => {
                if let (Some(a), Some(b)) = (a, b) {
                    if a.subject.value != b.subject.value {
                        let message = format!(
                            "resemblance between different subjects `{}` and `{}`",
                            a.subject.value, b.subject.value
                        );
                        if self.allow_cross_subject {
                            self.diagnostics.push(Diagnostic::warning(
                                codes::CROSS_SUBJECT_RESEMBLANCE,
                                span,
                                message,
                            ));
                        } else {
                            self.error(codes::CROSS_SUBJECT_RESEMBLANCE, span, message);
                        }
                    }
                }
            }
            RelationDeclKind::Contiguous { via } => {
                for unit in [a, b].into_iter().flatten() {
                    if !unit.items.iter().any(|(n, _)| n.value == via.value) {
                        self.error(
                            codes::UNKNOWN_REFERENCE,
                            via.span,
                            format!(
                                "item `{}` is not declared in `{}`",
                                via.value, unit.id.value
                            ),
                        );
                    }
                }
            }
            RelationDeclKind::Cause { .. } => {}
        }

        let new_errors = self.diagnostics[before..].iter().any(Diagnostic::is_error);
        if new_errors {
            return None;
        }
        let uid = |n: &Name| UnitId::new(n.value.as_str()).ok();
        let (a, b) = (uid(&decl.a)?, uid(&decl.b)?);
        Some(match &decl.kind {
            RelationDeclKind::Resemble => Relation::resemblance(a, b),
            RelationDeclKind::Contiguous { via } => {
                Relation::contiguity(a, b, ItemId::new(via.value.as_str()).ok()?)
            }
            RelationDeclKind::Cause { class } => Relation::causation(a, b, class.value),
        })
    }
}
