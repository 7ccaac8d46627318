use super::diagnostics::{codes, Diagnostic, SourceSpan};
use crate::model::is_valid_id;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Ident(String),
    Str(String),
    Number(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Tilde,
    Minus,
    Arrow,
    Equals,
    Eof,
}

impl TokenKind {
    pub(crate) fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Str(_) => "string".into(),
            TokenKind::Number(n) => format!("number `{n}`"),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::LBracket => "`[`".into(),
            TokenKind::RBracket => "`]`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Tilde => "`~`".into(),
            TokenKind::Minus => "`-`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::Equals => "`=`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
    /// First token on its line.
    pub line_start: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Pragma {
    pub text: String,
    pub span: SourceSpan,
}

pub(crate) struct Lexed {
    pub tokens: Vec<Token>,
    pub pragmas: Vec<Pragma>,
    pub diagnostics: Vec<Diagnostic>,
}

struct Cursor<'a> {
    text: &'a str,
    offset: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.offset..].chars().next()
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.text[self.offset..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn mark(&self) -> (usize, usize, usize) {
        (self.offset, self.line, self.column)
    }

    fn span_from(&self, mark: (usize, usize, usize)) -> SourceSpan {
        SourceSpan {
            offset: mark.0,
            line: mark.1,
            column: mark.2,
            length: self.text[mark.0..self.offset].chars().count(),
        }
    }
}

pub(crate) fn lex(text: &str) -> Lexed {
    let mut cur = Cursor {
        text,
        offset: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    let mut pragmas = Vec::new();
    let mut diagnostics = Vec::new();
    let mut last_line = 0;

    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        let mark = cur.mark();
        if c == '#' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            let body = &text[mark.0 + 1..cur.offset];
            if let Some(rest) = body.strip_prefix("pragma") {
                if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                    // a pragma may carry its own trailing comment
                    let rest = rest.split_once('#').map_or(rest, |(head, _)| head);
                    pragmas.push(Pragma {
                        text: rest.trim().to_owned(),
                        span: cur.span_from(mark),
                    });
                }
            }
            continue;
        }
        let kind = if c.is_ascii_alphabetic() {
            while matches!(cur.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                cur.bump();
            }
            let word = &text[mark.0..cur.offset];
            if !is_valid_id(word) {
                diagnostics.push(Diagnostic::error(
                    codes::SYNTAX,
                    cur.span_from(mark),
                    format!("invalid identifier `{word}`: expected [a-z][a-z0-9_]*"),
                ));
            }
            TokenKind::Ident(word.to_owned())
        } else if c.is_ascii_digit() {
            while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                cur.bump();
            }
            if cur.peek() == Some('.') && matches!(cur.peek_second(), Some(d) if d.is_ascii_digit())
            {
                cur.bump();
                while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                    cur.bump();
                }
            }
            TokenKind::Number(text[mark.0..cur.offset].to_owned())
        } else if c == '"' {
            cur.bump();
            match lex_string(&mut cur) {
                Ok(s) => TokenKind::Str(s),
                Err(message) => {
                    diagnostics.push(Diagnostic::error(
                        codes::SYNTAX,
                        cur.span_from(mark),
                        message,
                    ));
                    continue;
                }
            }
        } else {
            cur.bump();
            match c {
                '{' => TokenKind::LBrace,
                '}' => TokenKind::RBrace,
                '[' => TokenKind::LBracket,
                ']' => TokenKind::RBracket,
                ':' => TokenKind::Colon,
                ',' => TokenKind::Comma,
                '~' => TokenKind::Tilde,
                '=' => TokenKind::Equals,
                '-' if cur.peek() == Some('>') => {
                    cur.bump();
                    TokenKind::Arrow
                }
                '-' => TokenKind::Minus,
                other => {
                    diagnostics.push(Diagnostic::error(
                        codes::SYNTAX,
                        cur.span_from(mark),
                        format!("unexpected character {other:?}"),
                    ));
                    continue;
                }
            }
        };
        let span = cur.span_from(mark);
        tokens.push(Token {
            kind,
            line_start: span.line != last_line,
            span,
        });
        last_line = span.line;
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        span: SourceSpan {
            offset: cur.offset,
            line: cur.line,
            column: cur.column,
            length: 0,
        },
        line_start: cur.line != last_line,
    });
    Lexed {
        tokens,
        pragmas,
        diagnostics,
    }
}

/// Called after the opening quote. Stops after the closing quote.
fn lex_string(cur: &mut Cursor<'_>) -> Result<String, String> {
    let mut out = String::new();
    loop {
        match cur.peek() {
            None | Some('\n') => return Err("unterminated string".into()),
            Some('"') => {
                cur.bump();
                return Ok(out);
            }
            Some('\\') => {
                cur.bump();
                let escaped = match cur.peek() {
                    Some('"') => '"',
                    Some('\\') => '\\',
                    Some('n') => '\n',
                    Some('t') => '\t',
                    Some('r') => '\r',
                    Some(other) => {
                        // consume the rest of the string so recovery resumes after it
                        cur.bump();
                        while !matches!(cur.peek(), None | Some('\n') | Some('"')) {
                            cur.bump();
                        }
                        if cur.peek() == Some('"') {
                            cur.bump();
                        }
                        return Err(format!("unknown escape `\\{other}`"));
                    }
                    None => return Err("unterminated string".into()),
                };
                cur.bump();
                out.push(escaped);
            }
            Some(c) => {
                cur.bump();
                out.push(c);
            }
        }
    }
}
