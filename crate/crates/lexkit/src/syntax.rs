//! Concrete syntax: a recursive-descent parser and a minimal-parentheses
//! printer for terms and types.
//!
//! The grammar is plain ASCII. Substitution suffixes bind tighter than
//! application and attach to the preceding atom, lambda bodies extend as far
//! right as possible, `&` binds tighter than `->`, and `->` associates to
//! the right.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::GenTerm;
use crate::types::Type;

/// Byte offsets into the input, end exclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at {}..{}: expected {}, found {}",
            self.span.start,
            self.span.end,
            self.expected.join(" | "),
            self.found
        )
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn peek2(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos + 1).copied()
    }

    fn err<T>(&mut self, expected: &[&str]) -> Result<T, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let found = match self.src.get(self.pos) {
            Some(&c) => format!("{:?}", c as char),
            None => "end of input".to_string(),
        };
        Err(ParseError {
            span: SourceSpan {
                start,
                end: (start + 1).min(self.src.len()),
            },
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        })
    }

    fn eat(&mut self, c: u8, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&[what])
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return self.err(&["identifier"]),
        }
        let mut end = self.pos + 1;
        while end < self.src.len() {
            let c = self.src[end];
            if c.is_ascii_alphanumeric() || c == b'_' || c == b'\'' {
                end += 1;
            } else {
                break;
            }
        }
        self.pos = end;
        Ok(String::from_utf8_lossy(&self.src[start..end]).into_owned())
    }

    fn term(&mut self) -> Result<GenTerm, ParseError> {
        if self.peek() == Some(b'\\') {
            self.pos += 1;
            let x = self.ident()?;
            self.eat(b'.', "'.'")?;
            let body = self.term()?;
            return Ok(GenTerm::Lam(x, Box::new(body)));
        }
        let mut t = self.suffixed()?;
        loop {
            match self.peek() {
                Some(c) if c == b'(' || c == b'?' || c.is_ascii_alphabetic() => {
                    let u = self.suffixed()?;
                    t = GenTerm::App(Box::new(t), Box::new(u));
                }
                Some(b'\\') => {
                    // lambda directly to the right of an application is a
                    // common slip; report it rather than stopping silently
                    return self.err(&["'(' before lambda argument"]);
                }
                _ => return Ok(t),
            }
        }
    }

    fn suffixed(&mut self) -> Result<GenTerm, ParseError> {
        let mut t = self.atom()?;
        while self.peek() == Some(b'[') {
            let double = self.peek2() == Some(b'[');
            self.pos += if double { 2 } else { 1 };
            let x = self.ident()?;
            self.eat(b'/', "'/'")?;
            let u = self.term()?;
            self.eat(b']', "']'")?;
            if double {
                if self.src.get(self.pos) != Some(&b']') {
                    return self.err(&["']]'"]);
                }
                self.pos += 1;
                t = GenTerm::LSub(Box::new(t), x, Box::new(u));
            } else {
                t = GenTerm::ESub(Box::new(t), x, Box::new(u));
            }
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<GenTerm, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let t = self.term()?;
                self.eat(b')', "')'")?;
                Ok(t)
            }
            Some(b'?') => {
                self.pos += 1;
                let n = self.ident()?;
                self.eat(b'{', "'{'")?;
                let mut deco = BTreeSet::new();
                if self.peek() != Some(b'}') {
                    loop {
                        deco.insert(self.ident()?);
                        if self.peek() == Some(b',') {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                self.eat(b'}', "'}'")?;
                Ok(GenTerm::MetaVar(n, deco))
            }
            Some(c) if c.is_ascii_alphabetic() => Ok(GenTerm::Var(self.ident()?)),
            _ => self.err(&["identifier", "'('", "'?'", "'\\'"]),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let lhs = self.inter()?;
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b'-') && self.src.get(self.pos + 1) == Some(&b'>') {
            self.pos += 2;
            let rhs = self.ty()?;
            return Ok(Type::Arrow(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn inter(&mut self) -> Result<Type, ParseError> {
        let mut t = self.atom_ty()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            let rhs = self.atom_ty()?;
            t = Type::Inter(Box::new(t), Box::new(rhs));
        }
        Ok(t)
    }

    fn atom_ty(&mut self) -> Result<Type, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let t = self.ty()?;
                self.eat(b')', "')'")?;
                Ok(t)
            }
            Some(c) if c.is_ascii_alphabetic() => Ok(Type::Atom(self.ident()?)),
            _ => self.err(&["type atom", "'('"]),
        }
    }

    fn finish<T>(&mut self, t: T) -> Result<T, ParseError> {
        if self.peek().is_none() {
            Ok(t)
        } else {
            self.err(&["end of input"])
        }
    }
}

pub fn parse_term(src: &str) -> Result<GenTerm, ParseError> {
    let mut p = Parser::new(src);
    let t = p.term()?;
    p.finish(t)
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(src);
    let t = p.ty()?;
    p.finish(t)
}

fn needs_parens_app_lhs(t: &GenTerm) -> bool {
    matches!(t, GenTerm::Lam(_, _))
}

fn needs_parens_app_rhs(t: &GenTerm) -> bool {
    matches!(t, GenTerm::App(_, _) | GenTerm::Lam(_, _))
}

fn needs_parens_sub_body(t: &GenTerm) -> bool {
    matches!(t, GenTerm::App(_, _) | GenTerm::Lam(_, _))
}

fn print_into(t: &GenTerm, out: &mut String) {
    match t {
        GenTerm::Var(x) => out.push_str(x),
        GenTerm::App(l, r) => {
            if needs_parens_app_lhs(l) {
                out.push('(');
                print_into(l, out);
                out.push(')');
            } else {
                print_into(l, out);
            }
            out.push(' ');
            if needs_parens_app_rhs(r) {
                out.push('(');
                print_into(r, out);
                out.push(')');
            } else {
                print_into(r, out);
            }
        }
        GenTerm::Lam(x, b) => {
            out.push('\\');
            out.push_str(x);
            out.push('.');
            print_into(b, out);
        }
        GenTerm::ESub(b, x, u) | GenTerm::LSub(b, x, u) => {
            if needs_parens_sub_body(b) {
                out.push('(');
                print_into(b, out);
                out.push(')');
            } else {
                print_into(b, out);
            }
            let double = matches!(t, GenTerm::LSub(_, _, _));
            out.push_str(if double { "[[" } else { "[" });
            out.push_str(x);
            out.push('/');
            print_into(u, out);
            out.push_str(if double { "]]" } else { "]" });
        }
        GenTerm::MetaVar(n, deco) => {
            out.push('?');
            out.push_str(n);
            out.push('{');
            let mut first = true;
            for d in deco {
                if !first {
                    out.push(',');
                }
                first = false;
                out.push_str(d);
            }
            out.push('}');
        }
    }
}

pub fn print_term(t: &GenTerm) -> String {
    let mut out = String::new();
    print_into(t, &mut out);
    out
}

fn print_ty_into(t: &Type, out: &mut String) {
    match t {
        Type::Atom(n) => out.push_str(n),
        Type::Arrow(a, b) => {
            if matches!(**a, Type::Arrow(_, _)) {
                out.push('(');
                print_ty_into(a, out);
                out.push(')');
            } else {
                print_ty_into(a, out);
            }
            out.push_str("->");
            print_ty_into(b, out);
        }
        Type::Inter(a, b) => {
            if matches!(**a, Type::Arrow(_, _)) {
                out.push('(');
                print_ty_into(a, out);
                out.push(')');
            } else {
                print_ty_into(a, out);
            }
            out.push('&');
            if matches!(**b, Type::Arrow(_, _) | Type::Inter(_, _)) {
                out.push('(');
                print_ty_into(b, out);
                out.push(')');
            } else {
                print_ty_into(b, out);
            }
        }
    }
}

pub fn print_type(t: &Type) -> String {
    let mut out = String::new();
    print_ty_into(t, &mut out);
    out
}
