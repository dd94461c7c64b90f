//! Tokenizer with Python-style INDENT/DEDENT handling.

use crate::diag::{Diagnostic, Span};
use crate::frontend::ast::Directive;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Float(f64),
    Kw(Kw),
    /// Keyword of a construct the language rejects (`class`, `import`, ...).
    Reserved(&'static str),
    Punct(&'static str),
    Newline,
    Indent,
    Dedent,
    Eof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kw {
    Def,
    Return,
    If,
    Elif,
    Else,
    While,
    For,
    In,
    Break,
    Continue,
    Pass,
    And,
    Or,
    Not,
    True,
    False,
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const RESERVED: &[&str] = &[
    "class", "lambda", "import", "from", "try", "except", "finally", "with", "global", "nonlocal", "del", "assert", "raise", "yield",
    "async", "await", "is", "as",
];

// Longest first so that `//=` wins over `//` and `/`.
const PUNCT: &[&str] = &[
    "//=", "**=", "->", "**", "//", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", "+", "-", "*", "/", "%", "<", ">", "=", "(", ")",
    "[", "]", ",", ":", ";",
];

const UNSUPPORTED_PUNCT: &[(&str, &str)] = &[
    ("<<", "bitwise shift"),
    (">>", "bitwise shift"),
    ("&", "bitwise operator"),
    ("|", "bitwise operator"),
    ("^", "bitwise operator"),
    ("~", "bitwise operator"),
    ("@", "decorators and matrix multiplication"),
    (".", "attribute access (objects)"),
    ("{", "dict/set literals"),
    ("}", "dict/set literals"),
];

fn keyword(s: &str) -> Option<Kw> {
    Some(match s {
        "def" => Kw::Def,
        "return" => Kw::Return,
        "if" => Kw::If,
        "elif" => Kw::Elif,
        "else" => Kw::Else,
        "while" => Kw::While,
        "for" => Kw::For,
        "in" => Kw::In,
        "break" => Kw::Break,
        "continue" => Kw::Continue,
        "pass" => Kw::Pass,
        "and" => Kw::And,
        "or" => Kw::Or,
        "not" => Kw::Not,
        "True" => Kw::True,
        "False" => Kw::False,
        "None" => Kw::None,
        _ => return None,
    })
}

pub struct Lexed {
    pub tokens: Vec<Token>,
    pub directives: Vec<Directive>,
}

pub fn lex(text: &str) -> Result<Lexed, Diagnostic> {
    Lexer { text, bytes: text.as_bytes(), pos: 0, depth: 0, indents: vec![0], out: vec![], directives: vec![] }.run()
}

/// Tokenizes a single expression (no layout tokens besides the final EOF).
pub fn lex_expr(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut lx = Lexer { text, bytes: text.as_bytes(), pos: 0, depth: 1, indents: vec![0], out: vec![], directives: vec![] };
    while lx.pos < lx.bytes.len() {
        lx.token()?;
    }
    lx.out.push(Token { tok: Tok::Eof, span: Span::new(text.len(), text.len()) });
    Ok(lx.out)
}

struct Lexer<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    /// Bracket nesting; layout is ignored while > 0.
    depth: usize,
    indents: Vec<usize>,
    out: Vec<Token>,
    directives: Vec<Directive>,
}

impl<'a> Lexer<'a> {
    fn push(&mut self, tok: Tok, start: usize, end: usize) {
        self.out.push(Token { tok, span: Span::new(start, end) });
    }

    fn run(mut self) -> Result<Lexed, Diagnostic> {
        let mut at_line_start = true;
        while self.pos < self.bytes.len() {
            if at_line_start && self.depth == 0 {
                at_line_start = false;
                if self.layout()? {
                    continue;
                }
            }
            let c = self.bytes[self.pos];
            if c == b'\n' {
                if self.depth == 0 {
                    let last_is_newline = matches!(self.out.last().map(|t| &t.tok), None | Some(Tok::Newline));
                    if !last_is_newline {
                        self.push(Tok::Newline, self.pos, self.pos + 1);
                    }
                    at_line_start = true;
                }
                self.pos += 1;
                continue;
            }
            self.token()?;
        }
        let end = self.bytes.len();
        if !matches!(self.out.last().map(|t| &t.tok), None | Some(Tok::Newline)) {
            self.push(Tok::Newline, end, end);
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(Tok::Dedent, end, end);
        }
        self.push(Tok::Eof, end, end);
        Ok(Lexed { tokens: self.out, directives: self.directives })
    }

    /// Handles leading whitespace. Returns true when the line is blank or a
    /// comment (nothing emitted, position moved to the newline).
    fn layout(&mut self) -> Result<bool, Diagnostic> {
        let start = self.pos;
        let mut width = 0;
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' => width += 1,
                b'\t' => return Err(Diagnostic::error("E003", "tab character in indentation", Span::new(self.pos, self.pos + 1))),
                b'\r' => {}
                _ => break,
            }
            self.pos += 1;
        }
        match self.bytes.get(self.pos) {
            None | Some(b'\n') => return Ok(true),
            Some(b'#') => {
                self.comment();
                return Ok(true);
            }
            _ => {}
        }
        let cur = *self.indents.last().unwrap();
        if width > cur {
            self.indents.push(width);
            self.push(Tok::Indent, start, self.pos);
        } else if width < cur {
            while *self.indents.last().unwrap() > width {
                self.indents.pop();
                self.push(Tok::Dedent, self.pos, self.pos);
            }
            if *self.indents.last().unwrap() != width {
                return Err(Diagnostic::error("E001", "unindent does not match any outer indentation level", Span::new(start, self.pos)));
            }
        }
        Ok(false)
    }

    fn comment(&mut self) {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
            self.pos += 1;
        }
        let body = self.text[start + 1..self.pos].trim();
        if let Some(rest) = body.strip_prefix("qplp:") {
            let entry = rest.trim();
            if !entry.is_empty() {
                self.directives.push(Directive { entry: entry.to_string(), span: Span::new(start, self.pos) });
            }
        }
    }

    fn token(&mut self) -> Result<(), Diagnostic> {
        let start = self.pos;
        let c = self.bytes[start];
        match c {
            b' ' | b'\r' => {
                self.pos += 1;
                Ok(())
            }
            b'\t' => {
                self.pos += 1;
                Ok(())
            }
            b'\n' => {
                self.pos += 1;
                Ok(())
            }
            b'#' => {
                self.comment();
                Ok(())
            }
            b'\\' => {
                Err(Diagnostic::error("E001", "explicit line continuation is not supported; use brackets", Span::new(start, start + 1)))
            }
            b'"' | b'\'' => Err(Diagnostic::error("E002", "unsupported construct: string literals", Span::new(start, start + 1))),
            b'0'..=b'9' => self.number(),
            b'.' if self.bytes.get(start + 1).is_some_and(u8::is_ascii_digit) => self.number(),
            c if c == b'_' || c.is_ascii_alphabetic() => {
                while self.pos < self.bytes.len() && (self.bytes[self.pos] == b'_' || self.bytes[self.pos].is_ascii_alphanumeric()) {
                    self.pos += 1;
                }
                let word = &self.text[start..self.pos];
                if word.starts_with("__") {
                    return Err(Diagnostic::error(
                        "E002",
                        format!("unsupported construct: identifier '{word}' (names starting with '__' are reserved)"),
                        Span::new(start, self.pos),
                    ));
                }
                let tok = if let Some(kw) = keyword(word) {
                    Tok::Kw(kw)
                } else if let Some(r) = RESERVED.iter().find(|r| **r == word) {
                    Tok::Reserved(r)
                } else {
                    Tok::Ident(word.to_string())
                };
                self.push(tok, start, self.pos);
                Ok(())
            }
            _ => {
                let rest = &self.text[start..];
                if let Some(p) = PUNCT.iter().find(|p| rest.starts_with(**p)) {
                    self.pos += p.len();
                    match *p {
                        "(" | "[" => self.depth += 1,
                        ")" | "]" => self.depth = self.depth.saturating_sub(1),
                        _ => {}
                    }
                    self.push(Tok::Punct(p), start, self.pos);
                    return Ok(());
                }
                if let Some((p, what)) = UNSUPPORTED_PUNCT.iter().find(|(p, _)| rest.starts_with(*p)) {
                    return Err(Diagnostic::error("E002", format!("unsupported construct: {what}"), Span::new(start, start + p.len())));
                }
                let ch = rest.chars().next().unwrap();
                Err(Diagnostic::error("E001", format!("unexpected character {ch:?}"), Span::new(start, start + ch.len_utf8())))
            }
        }
    }

    fn number(&mut self) -> Result<(), Diagnostic> {
        let start = self.pos;
        let digits = |l: &mut Self| {
            while l.pos < l.bytes.len() && l.bytes[l.pos].is_ascii_digit() {
                l.pos += 1;
            }
        };
        digits(self);
        let mut is_float = false;
        if self.bytes.get(self.pos) == Some(&b'.') {
            is_float = true;
            self.pos += 1;
            digits(self);
        }
        if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                is_float = true;
                digits(self);
            } else {
                self.pos = save;
            }
        }
        if self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_alphabetic() || *b == b'_') {
            return Err(Diagnostic::error("E001", "invalid numeric literal", Span::new(start, self.pos + 1)));
        }
        let text = &self.text[start..self.pos];
        let span = Span::new(start, self.pos);
        let tok = if is_float {
            Tok::Float(
                text.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Diagnostic::error("E001", "invalid float literal", span))?,
            )
        } else {
            Tok::Int(text.parse().map_err(|_| Diagnostic::error("E001", "integer literal too large", span))?)
        };
        self.push(tok, start, self.pos);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src).unwrap().tokens.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn indentation_produces_indent_and_dedent() {
        let t = toks("if True:\n  x = 1\ny = 2\n");
        assert!(t.contains(&Tok::Indent));
        assert!(t.contains(&Tok::Dedent));
        assert_eq!(t.last(), Some(&Tok::Eof));
    }

    #[test]
    fn tabs_in_indentation_are_rejected() {
        let err = lex("if True:\n\tx = 1\n").err().unwrap();
        assert_eq!(err.code, "E003");
    }

    #[test]
    fn brackets_suppress_layout() {
        let t = toks("a = [1,\n     2]\n");
        assert_eq!(t.iter().filter(|t| **t == Tok::Newline).count(), 1);
        assert!(!t.contains(&Tok::Indent));
    }

    #[test]
    fn qplp_directive_is_recorded() {
        let lexed = lex("# qplp: qplp.search.grover\nx = 1\n").unwrap();
        assert_eq!(lexed.directives.len(), 1);
        assert_eq!(lexed.directives[0].entry, "qplp.search.grover");
    }

    #[test]
    fn numbers() {
        assert_eq!(toks("1.5e-3")[0], Tok::Float(1.5e-3));
        assert_eq!(toks(".5")[0], Tok::Float(0.5));
        assert_eq!(toks("42")[0], Tok::Int(42));
        assert_eq!(toks("x//=2")[1], Tok::Punct("//="));
    }

    #[test]
    fn strings_and_attributes_are_unsupported() {
        assert_eq!(lex("x = 'a'\n").err().unwrap().code, "E002");
        assert_eq!(lex("x = a.b\n").err().unwrap().code, "E002");
    }
}
