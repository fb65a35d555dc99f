//! Tokenizer, operator-precedence parser and canonical printer for the
//! Prolog subset.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

/// 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("syntax error at {pos}: {message}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

fn err<T>(pos: Pos, message: impl Into<String>) -> Result<T, SyntaxError> {
    Err(SyntaxError {
        pos,
        message: message.into(),
    })
}

/// Functor of the list pair `[H|T]`.
pub const CONS: &str = ".";
/// The empty list atom.
pub const NIL: &str = "[]";

#[derive(Clone, Debug)]
pub enum TermKind {
    Var(String),
    Int(BigInt),
    Atom(String),
    /// Arity is `args.len()`, always at least one.
    Compound(String, Vec<SourceTerm>),
}

/// A parsed term. Equality ignores source positions.
#[derive(Clone, Debug)]
pub struct SourceTerm {
    pub kind: TermKind,
    pub pos: Pos,
}

impl PartialEq for TermKind {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (TermKind::Var(a), TermKind::Var(b)) => a == b,
            (TermKind::Int(a), TermKind::Int(b)) => a == b,
            (TermKind::Atom(a), TermKind::Atom(b)) => a == b,
            (TermKind::Compound(f, xs), TermKind::Compound(g, ys)) => f == g && xs == ys,
            _ => false,
        }
    }
}

impl Eq for TermKind {}

impl PartialEq for SourceTerm {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for SourceTerm {}

impl SourceTerm {
    pub fn new(kind: TermKind) -> SourceTerm {
        SourceTerm {
            kind,
            pos: Pos::default(),
        }
    }

    pub fn var(name: impl Into<String>) -> SourceTerm {
        SourceTerm::new(TermKind::Var(name.into()))
    }

    pub fn int(n: impl Into<BigInt>) -> SourceTerm {
        SourceTerm::new(TermKind::Int(n.into()))
    }

    pub fn atom(name: impl Into<String>) -> SourceTerm {
        SourceTerm::new(TermKind::Atom(name.into()))
    }

    pub fn compound(name: impl Into<String>, args: Vec<SourceTerm>) -> SourceTerm {
        assert!(!args.is_empty(), "compound terms have arity >= 1");
        SourceTerm::new(TermKind::Compound(name.into(), args))
    }

    pub fn list(items: Vec<SourceTerm>, tail: SourceTerm) -> SourceTerm {
        items
            .into_iter()
            .rev()
            .fold(tail, |acc, item| SourceTerm::compound(CONS, vec![item, acc]))
    }

    fn at(mut self, pos: Pos) -> SourceTerm {
        self.pos = pos;
        self
    }

    /// Name and arity of a callable term.
    pub fn functor(&self) -> Option<(&str, usize)> {
        match &self.kind {
            TermKind::Atom(a) => Some((a, 0)),
            TermKind::Compound(f, args) => Some((f, args.len())),
            _ => None,
        }
    }

    /// Variable names in order of first occurrence.
    pub fn variables(&self, out: &mut Vec<String>) {
        match &self.kind {
            TermKind::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            TermKind::Compound(_, args) => args.iter().for_each(|a| a.variables(out)),
            _ => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub head: SourceTerm,
    /// Empty for facts.
    pub body: Vec<SourceTerm>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Assoc {
    Xfx,
    Xfy,
    Yfx,
}

fn infix_op(name: &str) -> Option<(u32, Assoc)> {
    Some(match name {
        ":-" => (1200, Assoc::Xfx),
        "," => (1000, Assoc::Xfy),
        "=" | "is" | "in" | "#=" | "#\\=" | "#<" | "#=<" | "#>" | "#>=" => (700, Assoc::Xfx),
        "\\/" => (650, Assoc::Yfx),
        ".." => (600, Assoc::Xfx),
        "+" | "-" => (500, Assoc::Yfx),
        "*" | "/" => (400, Assoc::Yfx),
        "^" => (200, Assoc::Xfy),
        _ => return None,
    })
}

fn arg_limits(prec: u32, assoc: Assoc) -> (u32, u32) {
    match assoc {
        Assoc::Xfx => (prec - 1, prec - 1),
        Assoc::Xfy => (prec - 1, prec),
        Assoc::Yfx => (prec, prec - 1),
    }
}

const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&$";

fn is_symbol_char(c: char) -> bool {
    SYMBOL_CHARS.contains(c)
}

fn is_alnum(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Var(String),
    Int(BigInt),
    Name(String),
    Punct(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: Pos,
    /// Whitespace or a comment immediately precedes the token.
    layout_before: bool,
}

fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let mut layout = true;
    let advance = |i: &mut usize, line: &mut u32, col: &mut u32, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
            layout = true;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            layout = true;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            let digits: String = chars[start..i].iter().collect();
            Tok::Int(digits.parse().expect("digits"))
        } else if c == '_' || c.is_uppercase() {
            while i < chars.len() && is_alnum(chars[i]) {
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            Tok::Var(chars[start..i].iter().collect())
        } else if c.is_alphabetic() {
            while i < chars.len() && is_alnum(chars[i]) {
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            Tok::Name(chars[start..i].iter().collect())
        } else if c == '\'' {
            advance(&mut i, &mut line, &mut col, c);
            let mut name = String::new();
            loop {
                match chars.get(i) {
                    None => return err(pos, "unterminated quoted atom"),
                    Some('\'') if chars.get(i + 1) == Some(&'\'') => {
                        name.push('\'');
                        advance(&mut i, &mut line, &mut col, '\'');
                        advance(&mut i, &mut line, &mut col, '\'');
                    }
                    Some('\'') => {
                        advance(&mut i, &mut line, &mut col, '\'');
                        break;
                    }
                    Some(&ch) => {
                        name.push(ch);
                        advance(&mut i, &mut line, &mut col, ch);
                    }
                }
            }
            Tok::Name(name)
        } else if c == '.'
            && chars
                .get(i + 1)
                .is_none_or(|&n| n.is_whitespace() || n == '%')
        {
            advance(&mut i, &mut line, &mut col, c);
            Tok::End
        } else if is_symbol_char(c) {
            while i < chars.len() && is_symbol_char(chars[i]) {
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            Tok::Name(chars[start..i].iter().collect())
        } else if "()[]|,".contains(c) {
            advance(&mut i, &mut line, &mut col, c);
            if c == '[' && chars.get(i) == Some(&']') {
                advance(&mut i, &mut line, &mut col, ']');
                Tok::Name(NIL.to_string())
            } else {
                Tok::Punct(c)
            }
        } else {
            return err(pos, format!("unexpected character {c:?}"));
        };
        out.push(Token {
            tok,
            pos,
            layout_before: layout,
        });
        layout = false;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    eof: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.i)
    }

    fn pos(&self) -> Pos {
        self.peek().map(|t| t.pos).unwrap_or(self.eof)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.i).cloned();
        self.i += 1;
        t
    }

    fn expect_punct(&mut self, c: char) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(Token {
                tok: Tok::Punct(p), ..
            }) if *p == c => {
                self.i += 1;
                Ok(())
            }
            Some(t) => err(t.pos, format!("expected `{c}`, found {}", describe(&t.tok))),
            None => err(self.eof, format!("expected `{c}`, found end of input")),
        }
    }

    fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    /// Parses a term whose priority is at most `max`.
    fn term(&mut self, max: u32) -> Result<SourceTerm, SyntaxError> {
        let (mut left, mut left_prec) = self.primary()?;
        while let Some(tok) = self.peek() {
            let name = match &tok.tok {
                Tok::Name(n) => n.clone(),
                Tok::Punct(',') => ",".to_string(),
                _ => break,
            };
            let pos = tok.pos;
            let Some((prec, assoc)) = infix_op(&name) else {
                return err(pos, format!("unknown operator `{name}`"));
            };
            let (lmax, rmax) = arg_limits(prec, assoc);
            if prec > max || left_prec > lmax {
                break;
            }
            self.i += 1;
            let right = self.term(rmax)?;
            left = SourceTerm::compound(name, vec![left, right]).at(pos);
            left_prec = prec;
        }
        Ok(left)
    }

    fn primary(&mut self) -> Result<(SourceTerm, u32), SyntaxError> {
        let pos = self.pos();
        let Some(tok) = self.bump() else {
            return err(self.eof, "unexpected end of input");
        };
        let term = match tok.tok {
            Tok::Int(n) => SourceTerm::int(n),
            Tok::Var(v) => SourceTerm::var(v),
            Tok::Punct('(') => {
                let t = self.term(1200)?;
                self.expect_punct(')')?;
                return Ok((t.at(pos), 0));
            }
            Tok::Punct('[') => self.list()?,
            Tok::Name(name) => {
                let next = self.peek();
                let call = matches!(next, Some(Token { tok: Tok::Punct('('), layout_before: false, .. }));
                let neg_literal = name == "-"
                    && matches!(next, Some(Token { tok: Tok::Int(_), layout_before: false, .. }));
                if call {
                    self.i += 1;
                    let mut args = vec![self.term(999)?];
                    while matches!(self.peek(), Some(Token { tok: Tok::Punct(','), .. })) {
                        self.i += 1;
                        args.push(self.term(999)?);
                    }
                    self.expect_punct(')')?;
                    SourceTerm::compound(name, args)
                } else if neg_literal {
                    let Some(Token { tok: Tok::Int(n), .. }) = self.bump() else {
                        unreachable!("checked above")
                    };
                    SourceTerm::int(-n)
                } else {
                    // An operator atom standing alone as an operand.
                    let prec = infix_op(&name).map(|(p, _)| p).unwrap_or(0);
                    let prec = if prec > 999 { 0 } else { prec };
                    return Ok((SourceTerm::atom(name).at(pos), prec));
                }
            }
            Tok::End => return err(pos, "unexpected end of clause"),
            Tok::Punct(c) => return err(pos, format!("unexpected `{c}`")),
        };
        Ok((term.at(pos), 0))
    }

    fn list(&mut self) -> Result<SourceTerm, SyntaxError> {
        let mut items = vec![self.term(999)?];
        loop {
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Punct(',')) => {
                    self.i += 1;
                    items.push(self.term(999)?);
                }
                Some(Tok::Punct('|')) => {
                    self.i += 1;
                    let tail = self.term(999)?;
                    self.expect_punct(']')?;
                    return Ok(SourceTerm::list(items, tail));
                }
                _ => {
                    self.expect_punct(']')?;
                    return Ok(SourceTerm::list(items, SourceTerm::atom(NIL)));
                }
            }
        }
    }

    /// One `.`-terminated term.
    fn sentence(&mut self) -> Result<SourceTerm, SyntaxError> {
        let t = self.term(1200)?;
        match self.bump() {
            Some(Token { tok: Tok::End, .. }) => Ok(t),
            Some(Token {
                tok: Tok::Punct(')'),
                pos,
                ..
            }) => err(pos, "unbalanced parenthesis"),
            Some(tok) => err(tok.pos, format!("unexpected {}", describe(&tok.tok))),
            None => err(self.eof, "unterminated clause: missing `.`"),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Var(v) => format!("variable `{v}`"),
        Tok::Int(n) => format!("integer `{n}`"),
        Tok::Name(n) => format!("`{n}`"),
        Tok::Punct(c) => format!("`{c}`"),
        Tok::End => "end of clause".to_string(),
    }
}

fn parser_for(text: &str) -> Result<Parser, SyntaxError> {
    let toks = tokenize(text)?;
    let lines = text.split('\n').count() as u32;
    let last_col = text.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) as u32;
    Ok(Parser {
        toks,
        i: 0,
        eof: Pos {
            line: lines.max(1),
            column: last_col + 1,
        },
    })
}

/// Splits a `,`-conjunction into its goals.
pub fn conjuncts(t: SourceTerm, out: &mut Vec<SourceTerm>) {
    match t.kind {
        TermKind::Compound(ref f, ref args) if f == "," && args.len() == 2 => {
            let TermKind::Compound(_, args) = t.kind else { unreachable!() };
            let [a, b]: [SourceTerm; 2] = args.try_into().expect("binary");
            conjuncts(a, out);
            conjuncts(b, out);
        }
        _ => out.push(t),
    }
}

pub fn parse_program(text: &str) -> Result<Vec<Clause>, SyntaxError> {
    let mut p = parser_for(text)?;
    let mut clauses = Vec::new();
    while !p.at_end() {
        let t = p.sentence()?;
        let pos = t.pos;
        let (head, body_term) = match t.kind {
            TermKind::Compound(ref f, ref args) if f == ":-" && args.len() == 2 => {
                let TermKind::Compound(_, args) = t.kind else { unreachable!() };
                let [h, b]: [SourceTerm; 2] = args.try_into().expect("binary");
                (h, Some(b))
            }
            _ => (t, None),
        };
        if !matches!(head.kind, TermKind::Atom(_) | TermKind::Compound(..)) {
            return err(pos, "clause head must be an atom or compound term");
        }
        let mut body = Vec::new();
        if let Some(b) = body_term {
            conjuncts(b, &mut body);
        }
        clauses.push(Clause { head, body });
    }
    Ok(clauses)
}

pub fn parse_query(text: &str) -> Result<Vec<SourceTerm>, SyntaxError> {
    let mut p = parser_for(text)?;
    if p.at_end() {
        return err(p.eof, "empty query");
    }
    let t = p.sentence()?;
    if !p.at_end() {
        return err(p.pos(), "text after end of query");
    }
    let mut goals = Vec::new();
    conjuncts(t, &mut goals);
    Ok(goals)
}

/// Parses a single `.`-terminated term.
pub fn parse_term(text: &str) -> Result<SourceTerm, SyntaxError> {
    let mut p = parser_for(text)?;
    let t = p.sentence()?;
    if !p.at_end() {
        return err(p.pos(), "text after end of term");
    }
    Ok(t)
}

fn atom_needs_quotes(a: &str) -> bool {
    if a == NIL || a.is_empty() {
        return a.is_empty();
    }
    let mut chars = a.chars();
    let first = chars.next().expect("nonempty");
    if first.is_lowercase() {
        return !a.chars().all(is_alnum);
    }
    if a.chars().all(is_symbol_char) {
        return a == ".";
    }
    true
}

fn write_atom(out: &mut String, a: &str) {
    if atom_needs_quotes(a) {
        push_token(out, &format!("'{}'", a.replace('\'', "''")));
    } else {
        push_token(out, a);
    }
}

/// Appends `s`, inserting a space where gluing would merge two tokens.
pub(crate) fn push_token(out: &mut String, s: &str) {
    if let (Some(l), Some(r)) = (out.chars().last(), s.chars().next()) {
        let glue = (is_symbol_char(l) && is_symbol_char(r)) || (is_alnum(l) && is_alnum(r));
        if glue {
            out.push(' ');
        }
    }
    out.push_str(s);
}

/// Canonical writer shared by source terms and rendered heap terms.
fn write_term(out: &mut String, t: &SourceTerm, max: u32) {
    match &t.kind {
        TermKind::Var(v) => push_token(out, v),
        TermKind::Int(n) => push_token(out, &n.to_string()),
        TermKind::Atom(a) => {
            let is_op = infix_op(a).is_some_and(|(p, _)| p > max);
            if is_op {
                push_token(out, "(");
                write_atom(out, a);
                push_token(out, ")");
            } else {
                write_atom(out, a);
            }
        }
        TermKind::Compound(f, args) if f == CONS && args.len() == 2 => {
            push_token(out, "[");
            write_term(out, &args[0], 999);
            let mut tail = &args[1];
            loop {
                match &tail.kind {
                    TermKind::Compound(g, xs) if g == CONS && xs.len() == 2 => {
                        out.push(',');
                        write_term(out, &xs[0], 999);
                        tail = &xs[1];
                    }
                    TermKind::Atom(a) if a == NIL => break,
                    _ => {
                        out.push('|');
                        write_term(out, tail, 999);
                        break;
                    }
                }
            }
            out.push(']');
        }
        TermKind::Compound(f, args) => {
            if let (Some((prec, assoc)), [l, r]) = (infix_op(f), args.as_slice()) {
                let (lmax, rmax) = arg_limits(prec, assoc);
                let paren = prec > max;
                if paren {
                    push_token(out, "(");
                }
                write_term(out, l, lmax);
                match f.as_str() {
                    "," => out.push(','),
                    ":-" => out.push_str(" :- "),
                    "is" | "in" => {
                        out.push(' ');
                        out.push_str(f);
                        out.push(' ');
                    }
                    _ => push_token(out, f),
                }
                write_term(out, r, rmax);
                if paren {
                    out.push(')');
                }
            } else {
                write_atom(out, f);
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_term(out, a, 999);
                }
                out.push(')');
            }
        }
    }
}

impl fmt::Display for SourceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(&mut s, self, 1200);
        f.write_str(&s)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, g) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            let mut s = String::new();
            write_term(&mut s, g, 999);
            f.write_str(&s)?;
        }
        f.write_str(".")
    }
}

/// Prints goals as a `.`-terminated query.
pub fn format_query(goals: &[SourceTerm]) -> String {
    let mut s = String::new();
    for (i, g) in goals.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        write_term(&mut s, g, 999);
    }
    s.push('.');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(f: &str, args: Vec<SourceTerm>) -> SourceTerm {
        SourceTerm::compound(f, args)
    }

    #[test]
    fn factorial_program() {
        let text = "factorial(0, 1).\nfactorial(N, F) :- N #> 0, F #= F0*N, N1 #= N - 1, factorial(N1, F0).";
        let clauses = parse_program(text).unwrap();
        assert_eq!(clauses.len(), 2);
        assert!(clauses[0].body.is_empty());
        assert_eq!(clauses[1].body.len(), 4);
        assert_eq!(
            clauses[1].body[1],
            c("#=", vec![SourceTerm::var("F"), c("*", vec![SourceTerm::var("F0"), SourceTerm::var("N")])])
        );
    }

    #[test]
    fn minimal_fact() {
        let clauses = parse_program("p.").unwrap();
        assert_eq!(clauses, vec![Clause { head: SourceTerm::atom("p"), body: vec![] }]);
    }

    #[test]
    fn arithmetic_precedence() {
        let clauses = parse_program("q :- X #= 1 + 2 * 3.").unwrap();
        let expected = c(
            "#=",
            vec![
                SourceTerm::var("X"),
                c("+", vec![SourceTerm::int(1), c("*", vec![SourceTerm::int(2), SourceTerm::int(3)])]),
            ],
        );
        assert_eq!(clauses[0].body, vec![expected]);
    }

    #[test]
    fn regression_query_parses() {
        let goals = parse_query("X in 0..2, 0/X #= 0, X = 1.").unwrap();
        assert_eq!(goals.len(), 3);
        assert_eq!(
            goals[0],
            c("in", vec![SourceTerm::var("X"), c("..", vec![SourceTerm::int(0), SourceTerm::int(2)])])
        );
        assert_eq!(parse_query("true.").unwrap(), vec![SourceTerm::atom("true")]);
    }

    #[test]
    fn pow_is_right_associative() {
        let goals = parse_query("abs(X)#<7^7^7,X#>Y,Y#>X.").unwrap();
        assert_eq!(goals.len(), 3);
        let seven = || SourceTerm::int(7);
        let expected = c(
            "#<",
            vec![
                c("abs", vec![SourceTerm::var("X")]),
                c("^", vec![seven(), c("^", vec![seven(), seven()])]),
            ],
        );
        assert_eq!(goals[0], expected);
    }

    #[test]
    fn lists_and_negative_literals() {
        let t = parse_term("Xs = [X|Xs].").unwrap();
        assert_eq!(
            t,
            c("=", vec![SourceTerm::var("Xs"), c(CONS, vec![SourceTerm::var("X"), SourceTerm::var("Xs")])])
        );
        let t = parse_term("X in inf.. -1\\/1..sup.").unwrap();
        assert_eq!(t.to_string(), "X in inf.. -1\\/1..sup");
        let t = parse_term("N-1.").unwrap();
        assert_eq!(t, c("-", vec![SourceTerm::var("N"), SourceTerm::int(1)]));
        let t = parse_term("labeling([], [B]).").unwrap();
        assert_eq!(t.to_string(), "labeling([],[B])");
    }

    #[test]
    fn bundled_listings_parse() {
        let mc = "mc_carthy_91(X, Y) :-\n   X #> 100, Y #= X - 10.\nmc_carthy_91(X, Y) :-\n   X #=< 100, Z #= X + 11,\n   mc_carthy_91(Z, Z1),\n   mc_carthy_91(Z1, Y).\n";
        assert_eq!(parse_program(mc).unwrap().len(), 2);
        for q in [
            "Y #\\= 91, mc_carthy_91(X, Y).",
            "Y in 1..5,  factorial(X,Y).",
            "X#>Y, Y#>X, X#>0.",
            "X#>Y, Y#>X, X#>B*Y, B in -1..0, labeling([],[B]).",
            "X#>X*X.",
            "X = 1, X in 0..2, 0/X #= 0.",
            "set_prolog_flag(occurs_check,error).",
            "queens_(Ds,Zs), labeling([],Zs).",
            "queens_(Ds,Zs), false.",
        ] {
            parse_query(q).unwrap_or_else(|e| panic!("{q}: {e}"));
        }
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_program("p :- q").unwrap_err();
        assert!(e.message.contains("unterminated"), "{e}");
        let e = parse_query("X ++ Y.").unwrap_err();
        assert!(e.message.contains("unknown operator"), "{e}");
        assert_eq!(e.pos, Pos { line: 1, column: 3 });
        let e = parse_query("f(X.").unwrap_err();
        assert!(e.message.contains("expected `)`"), "{e}");
        let e = parse_query("X = 1).").unwrap_err();
        assert!(e.message.contains("unbalanced"), "{e}");
        let e = parse_query("X = Y = Z.").unwrap_err();
        assert_eq!(e.pos.column, 7);
    }

    #[test]
    fn comments_are_layout() {
        let clauses = parse_program("% header\np. % trailing\nq :- p.\n").unwrap();
        assert_eq!(clauses.len(), 2);
    }

    #[test]
    fn canonical_printing() {
        for (src, printed) in [
            ("X #= 1 + 2 * 3.", "X#=1+2*3"),
            ("X #=< Y + -1.", "X#=<Y+ -1"),
            ("(a :- b, c).", "a :- b,c"),
            ("X = (a, b).", "X=(a,b)"),
            ("Y = (1 + 2) * 3.", "Y=(1+2)*3"),
            ("Z = 2 ^ (3 ^ 4).", "Z=2^3^4"),
            ("Z = (2 ^ 3) ^ 4.", "Z=(2^3)^4"),
            ("Z = 1 - (2 - 3).", "Z=1-(2-3)"),
            ("X = 'hello world'.", "X='hello world'"),
            ("X = f(-).", "X=f(-)"),
        ] {
            let t = parse_term(src).unwrap();
            assert_eq!(t.to_string(), printed, "{src}");
            assert_eq!(parse_term(&format!("{printed}.")).unwrap(), t, "{src}");
        }
    }
}
