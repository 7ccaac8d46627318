//! A small checker for the DOT subset the renderer emits:
//!
//! ```text
//! graph     := "digraph" ID? "{" stmt* "}"
//! stmt      := (attr_stmt | edge_stmt | node_stmt | ID "=" ID) ";"?
//! attr_stmt := ("graph" | "node" | "edge") attrs
//! node_stmt := ID attrs?
//! edge_stmt := ID "->" ID attrs?
//! attrs     := "[" (ID "=" ID ","?)* "]"
//! ```

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Id(String),
    Arrow,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Comma,
    Semi,
}

pub type Attrs = Vec<(String, String)>;

#[derive(Debug, Default, PartialEq, Eq)]
pub struct DotGraph {
    pub nodes: Vec<(String, Attrs)>,
    pub edges: Vec<(String, String, Attrs)>,
}

fn tokenize(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '{' => {
                out.push(Tok::LBrace);
                i += 1
            }
            '}' => {
                out.push(Tok::RBrace);
                i += 1
            }
            '[' => {
                out.push(Tok::LBracket);
                i += 1
            }
            ']' => {
                out.push(Tok::RBracket);
                i += 1
            }
            '=' => {
                out.push(Tok::Eq);
                i += 1
            }
            ',' => {
                out.push(Tok::Comma);
                i += 1
            }
            ';' => {
                out.push(Tok::Semi);
                i += 1
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Tok::Arrow);
                i += 2
            }
            '"' => {
                i += 1;
                let mut s = String::new();
                loop {
                    match chars.get(i) {
                        None => return Err("unterminated string".into()),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            // DOT keeps the backslash except before a quote
                            match chars.get(i + 1) {
                                Some('"') => s.push('"'),
                                Some(&n) => {
                                    s.push('\\');
                                    s.push(n)
                                }
                                None => return Err("dangling escape".into()),
                            }
                            i += 2;
                        }
                        Some(&c) => {
                            s.push(c);
                            i += 1
                        }
                    }
                }
                out.push(Tok::Id(s));
            }
            c if c.is_ascii_alphanumeric() || c == '_' || c == '.' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '.')
                {
                    i += 1;
                }
                out.push(Tok::Id(chars[start..i].iter().collect()));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

struct P {
    toks: Vec<Tok>,
    pos: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }
    fn expect(&mut self, t: Tok) -> Result<(), String> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(format!("expected {t:?}, found {got:?}")),
        }
    }
    fn id(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Tok::Id(s)) => Ok(s),
            got => Err(format!("expected id, found {got:?}")),
        }
    }
    fn attrs(&mut self) -> Result<Attrs, String> {
        let mut out = Vec::new();
        if self.peek() != Some(&Tok::LBracket) {
            return Ok(out);
        }
        self.next();
        while self.peek() != Some(&Tok::RBracket) {
            let k = self.id()?;
            self.expect(Tok::Eq)?;
            let v = self.id()?;
            out.push((k, v));
            if self.peek() == Some(&Tok::Comma) {
                self.next();
            }
        }
        self.next();
        Ok(out)
    }
}

/// Checks that record labels have balanced, escaped braces.
fn check_record_label(label: &str) -> Result<(), String> {
    let mut depth = 0i32;
    let mut chars = label.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                chars.next();
            }
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth < 0 {
                    return Err(format!("unbalanced record label {label:?}"));
                }
            }
            _ => {}
        }
    }
    if depth == 0 {
        Ok(())
    } else {
        Err(format!("unbalanced record label {label:?}"))
    }
}

pub fn parse_dot(text: &str) -> Result<DotGraph, String> {
    let mut p = P {
        toks: tokenize(text)?,
        pos: 0,
    };
    if p.id()? != "digraph" {
        return Err("expected digraph".into());
    }
    if let Some(Tok::Id(_)) = p.peek() {
        p.next();
    }
    p.expect(Tok::LBrace)?;
    let mut g = DotGraph::default();
    loop {
        match p.peek() {
            Some(Tok::RBrace) => {
                p.next();
                break;
            }
            None => return Err("missing closing brace".into()),
            _ => {}
        }
        let first = p.id()?;
        match p.peek() {
            Some(Tok::Eq) => {
                p.next();
                p.id()?;
            }
            Some(Tok::Arrow) => {
                p.next();
                let to = p.id()?;
                let attrs = p.attrs()?;
                g.edges.push((first, to, attrs));
            }
            _ if matches!(first.as_str(), "graph" | "node" | "edge") => {
                p.attrs()?;
            }
            _ => {
                let attrs = p.attrs()?;
                if let Some((_, label)) = attrs.iter().find(|(k, _)| k == "label") {
                    check_record_label(label)?;
                }
                g.nodes.push((first, attrs));
            }
        }
        if p.peek() == Some(&Tok::Semi) {
            p.next();
        }
    }
    if p.pos != p.toks.len() {
        return Err("trailing tokens after graph".into());
    }
    Ok(g)
}
