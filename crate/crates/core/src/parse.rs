//! Readers and writers for the `.dlo`, `.cq` and `.abox` text formats.
//!
//! `.dlo` holds one statement per line:
//!
//! ```text
//! # comment
//! A sub some r . (B & some s)
//! some r- sub A
//! r rsub s
//! disj A some r
//! rdisj r s-
//! func r-
//! ```
//!
//! In concept expressions `&` binds loosest and the filler after
//! `some R .` is a single primary, so `some r . A & B` reads as
//! `(some r . A) & B`. A bare `some R` stands for `some R . top`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::syntax::{
    concept_to_eliq, ABox, Atoms, BasicConcept, ConceptLabel, Cq, Eli, Ontology, Role, Symbol,
};

const KEYWORDS: &[&str] = &["top", "some", "sub", "rsub", "disj", "rdisj", "func"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Dot,
    Amp,
    LParen,
    RParen,
    Comma,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    col: usize,
}

fn ident_char(c: char, allow_dot: bool) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || (allow_dot && c == '.')
}

/// Splits a line into tokens. Identifiers may end in a single `-`
/// (inverse roles). When `allow_dot` is set, `.` is an identifier
/// character, which the query formats need for generated variable names.
fn lex(line: &str, lineno: usize, allow_dot: bool) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '.' if !allow_dot => Some(Tok::Dot),
            '&' => Some(Tok::Amp),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Spanned { tok, col });
            i += 1;
            continue;
        }
        if ident_char(c, allow_dot) {
            let start = i;
            while i < chars.len() && ident_char(chars[i], allow_dot) {
                i += 1;
            }
            if i < chars.len() && chars[i] == '-' {
                i += 1;
            }
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
            continue;
        }
        return Err(Error::syntax(
            lineno,
            col,
            format!("unexpected character `{c}`"),
        ));
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Spanned], line: usize, text: &str) -> Self {
        Cursor {
            toks,
            pos: 0,
            line,
            end_col: text.chars().count() + 1,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |s| s.col)
    }

    fn err<T>(&self, msg: impl fmt::Display) -> Result<T> {
        Err(Error::syntax(self.line, self.col(), msg))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect_end(&self) -> Result<()> {
        if self.done() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    fn concept_name(&mut self) -> Result<Symbol> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) && !s.ends_with('-') => {
                self.pos += 1;
                Ok(Symbol::from(s))
            }
            _ => self.err("expected a concept name"),
        }
    }

    fn role(&mut self) -> Result<Role> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                let (name, inv) = match s.strip_suffix('-') {
                    Some(n) => (n.to_string(), true),
                    None => (s.clone(), false),
                };
                if name.is_empty() || KEYWORDS.contains(&name.as_str()) {
                    return self.err("expected a role");
                }
                self.pos += 1;
                Ok(Role {
                    name: Symbol::from(name),
                    inverted: inv,
                })
            }
            _ => self.err("expected a role"),
        }
    }

    fn basic(&mut self) -> Result<BasicConcept> {
        if self.keyword("top") {
            Ok(BasicConcept::Top)
        } else if self.keyword("some") {
            Ok(BasicConcept::Exists(self.role()?))
        } else {
            Ok(BasicConcept::Atomic(self.concept_name()?))
        }
    }

    fn eli(&mut self) -> Result<Eli> {
        let mut acc = self.primary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let rhs = self.primary()?;
            acc = Eli::and(acc, rhs);
        }
        Ok(acc)
    }

    fn primary(&mut self) -> Result<Eli> {
        if self.keyword("top") {
            return Ok(Eli::Top);
        }
        if self.keyword("some") {
            let r = self.role()?;
            if self.peek() == Some(&Tok::Dot) {
                self.pos += 1;
                let filler = self.primary()?;
                return Ok(Eli::some(r, filler));
            }
            return Ok(Eli::some(r, Eli::Top));
        }
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let inner = self.eli()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(inner);
        }
        Ok(Eli::Atom(self.concept_name()?))
    }
}

/// Parses a `.dlo` document.
pub fn parse_ontology(text: &str) -> Result<Ontology> {
    let mut o = Ontology::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = lex(line, lineno, false)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor::new(&toks, lineno, line);
        if c.keyword("func") {
            let r = c.role()?;
            c.expect_end()?;
            o.functional.insert(r);
        } else if c.keyword("disj") {
            let a = c.basic()?;
            let b = c.basic()?;
            c.expect_end()?;
            o.concept_disjointness.push((a, b));
        } else if c.keyword("rdisj") {
            let a = c.role()?;
            let b = c.role()?;
            c.expect_end()?;
            o.role_disjointness.push((a, b));
        } else if matches!(toks.get(1).map(|t| &t.tok), Some(Tok::Ident(s)) if s == "rsub") {
            let a = c.role()?;
            c.pos += 1;
            let b = c.role()?;
            c.expect_end()?;
            o.role_inclusions.push((a, b));
        } else {
            let lhs = c.basic()?;
            if !c.keyword("sub") {
                return c.err("expected `sub`");
            }
            let rhs = c.eli()?;
            c.expect_end()?;
            o.concept_inclusions.push((lhs, rhs));
        }
    }
    Ok(o)
}

/// Parses a standalone concept expression.
pub fn parse_concept(text: &str) -> Result<Eli> {
    let toks = lex(text, 1, false)?;
    let mut c = Cursor::new(&toks, 1, text);
    let e = c.eli()?;
    c.expect_end()?;
    Ok(e)
}

/// Writes an ontology in `.dlo` syntax.
pub fn serialize_ontology(o: &Ontology) -> String {
    o.to_string()
}

impl fmt::Display for Ontology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, c) in &self.concept_inclusions {
            writeln!(f, "{b} sub {c}")?;
        }
        for (r, s) in &self.role_inclusions {
            writeln!(f, "{r} rsub {s}")?;
        }
        for (a, b) in &self.concept_disjointness {
            writeln!(f, "disj {a} {b}")?;
        }
        for (r, s) in &self.role_disjointness {
            writeln!(f, "rdisj {r} {s}")?;
        }
        for r in &self.functional {
            writeln!(f, "func {r}")?;
        }
        Ok(())
    }
}

/// One parsed assertion: `A(t)`, `top(t)` or `R(t, u)`.
enum Assertion {
    Concept(ConceptLabel, Symbol),
    Role(Role, Symbol, Symbol),
}

fn term(c: &mut Cursor<'_>) -> Result<Symbol> {
    match c.peek().cloned() {
        Some(Tok::Ident(s)) if !s.ends_with('-') => {
            c.pos += 1;
            Ok(Symbol::from(s))
        }
        _ => c.err("expected a variable or individual name"),
    }
}

fn assertion(c: &mut Cursor<'_>) -> Result<Assertion> {
    let name = match c.next() {
        Some(Tok::Ident(s)) => s,
        _ => {
            c.pos -= 1;
            return c.err("expected an atom");
        }
    };
    c.expect(Tok::LParen, "`(`")?;
    let t1 = term(c)?;
    if c.peek() == Some(&Tok::Comma) {
        c.pos += 1;
        let t2 = term(c)?;
        c.expect(Tok::RParen, "`)`")?;
        let (base, inv) = match name.strip_suffix('-') {
            Some(n) => (n, true),
            None => (name.as_str(), false),
        };
        if base.is_empty() || KEYWORDS.contains(&base) {
            return c.err("expected a role name");
        }
        let role = Role {
            name: Symbol::new(base),
            inverted: inv,
        };
        return Ok(Assertion::Role(role, t1, t2));
    }
    c.expect(Tok::RParen, "`)`")?;
    if name == "top" {
        return Ok(Assertion::Concept(ConceptLabel::Top, t1));
    }
    if name.ends_with('-') || KEYWORDS.contains(&name.as_str()) {
        return c.err("expected a concept name");
    }
    Ok(Assertion::Concept(
        ConceptLabel::Name(Symbol::from(name)),
        t1,
    ))
}

fn push(atoms: &mut Atoms, a: Assertion) {
    match a {
        Assertion::Concept(l, t) => atoms.add_concept(l, t),
        Assertion::Role(r, a, b) => atoms.add_role(&r, a, b),
    }
}

/// Parses a `.cq` document: either `q(x0) :- atom, atom, ...` (possibly
/// spread over several lines) or `eliq: <concept>`.
pub fn parse_cq(text: &str) -> Result<Cq> {
    let mut body = String::new();
    let mut first_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        if body.is_empty() {
            first_line = idx + 1;
        }
        body.push_str(content);
        body.push(' ');
    }
    let trimmed = body.trim();
    if let Some(rest) = trimmed.strip_prefix("eliq:") {
        let toks = lex(rest, first_line, false)?;
        let mut c = Cursor::new(&toks, first_line, rest);
        let e = c.eli()?;
        c.expect_end()?;
        return Ok(concept_to_eliq(&e));
    }
    let (head, tail) = match trimmed.split_once(":-") {
        Some(p) => p,
        None => {
            return Err(Error::syntax(
                first_line.max(1),
                1,
                "expected `:-` or `eliq:`",
            ))
        }
    };
    let htoks = lex(head, first_line, true)?;
    let mut hc = Cursor::new(&htoks, first_line, head);
    match hc.next() {
        Some(Tok::Ident(_)) => {}
        _ => return Err(Error::syntax(first_line, 1, "expected a query head")),
    }
    hc.expect(Tok::LParen, "`(`")?;
    let answer = term(&mut hc)?;
    hc.expect(Tok::RParen, "`)`")?;
    hc.expect_end()?;

    let btoks = lex(tail, first_line, true)?;
    let mut bc = Cursor::new(&btoks, first_line, tail);
    let mut atoms = Atoms::default();
    while !bc.done() {
        let a = assertion(&mut bc)?;
        push(&mut atoms, a);
        if bc.peek() == Some(&Tok::Comma) {
            bc.pos += 1;
            if bc.done() {
                return bc.err("expected an atom after `,`");
            }
        } else {
            bc.expect_end()?;
        }
    }
    Ok(Cq::from_atoms(answer, atoms))
}

/// Writes a query in `.cq` syntax.
pub fn serialize_cq(q: &Cq) -> String {
    q.to_string()
}

/// Parses an `.abox` document.
pub fn parse_abox(text: &str) -> Result<ABox> {
    let mut atoms = Atoms::default();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = lex(line, lineno, true)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor::new(&toks, lineno, line);
        let a = assertion(&mut c)?;
        c.expect_end()?;
        push(&mut atoms, a);
    }
    Ok(ABox::from_atoms(atoms))
}

/// Writes an ABox in `.abox` syntax.
pub fn serialize_abox(a: &ABox) -> String {
    a.to_string()
}

/// Names that can never be used as identifiers.
pub fn reserved_words() -> BTreeSet<&'static str> {
    KEYWORDS.iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cyclic_existential_ontology() {
        let o = parse_ontology("A sub some r\nsome r sub A\nr rsub s").unwrap();
        let expected = Ontology::new()
            .with_ci(
                BasicConcept::Atomic("A".into()),
                Eli::some(Role::new("r"), Eli::Top),
            )
            .with_ci(BasicConcept::Exists(Role::new("r")), Eli::atom("A"))
            .with_ri(Role::new("r"), Role::new("s"));
        assert_eq!(o, expected);
    }

    #[test]
    fn empty_document_is_empty_ontology() {
        assert!(parse_ontology("").unwrap().is_empty());
        assert!(parse_ontology("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn functionality_on_inverse() {
        let o = parse_ontology("func r-\nA sub some r\nfunc r-").unwrap();
        assert_eq!(o.functional.len(), 1);
        assert!(o.functional.contains(&Role::inv("r")));
    }

    #[test]
    fn ampersand_binds_loosest() {
        let e = parse_concept("some r . A & B").unwrap();
        assert_eq!(
            e,
            Eli::and(Eli::some(Role::new("r"), Eli::atom("A")), Eli::atom("B"))
        );
        let e = parse_concept("some r . (A & B)").unwrap();
        assert_eq!(
            e,
            Eli::some(Role::new("r"), Eli::and(Eli::atom("A"), Eli::atom("B")))
        );
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_ontology("A sub B\nA sub (B & C") {
            Err(Error::Syntax { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 13);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_ontology("A sup B"),
            Err(Error::Syntax {
                line: 1,
                column: 3,
                ..
            })
        ));
        assert!(parse_ontology("some sub A").is_err());
        assert!(parse_ontology("A sub B %").is_err());
    }

    #[test]
    fn cq_round_trip_with_inverse_atoms() {
        let q = parse_cq("q(x0) :- A(x0), r(x0,y), r-(y,z)").unwrap();
        assert_eq!(q.var_count(), 3);
        let text = serialize_cq(&q);
        assert_eq!(parse_cq(&text).unwrap(), q);
        assert!(q
            .role_atoms()
            .any(|(r, a, b)| r.as_str() == "r" && a.as_str() == "z" && b.as_str() == "y"));
    }

    #[test]
    fn cq_from_eliq_expression() {
        let q = parse_cq("eliq: A & some r- . (some s . B & some r . A)").unwrap();
        assert_eq!(q.var_count(), 4);
        let q = parse_cq("eliq: top").unwrap();
        assert_eq!(q.to_string(), "q(x0) :- top(x0)");
    }

    #[test]
    fn cq_variables_may_contain_dots_and_primes() {
        let q = parse_cq("q(x0) :- s(x0, c1.y'), A(c1.y')").unwrap();
        assert_eq!(q.var_count(), 2);
        assert_eq!(parse_cq(&q.to_string()).unwrap(), q);
    }

    #[test]
    fn abox_round_trip() {
        let a = parse_abox("A(a)\ntop(c)\nr(a,b)\nr-(b,c)\n").unwrap();
        assert_eq!(a.individuals().len(), 3);
        assert_eq!(parse_abox(&serialize_abox(&a)).unwrap(), a);
        assert!(parse_abox("A(a").is_err());
    }

    #[test]
    fn ontology_round_trip() {
        let text = "A sub some r . (B & some s-)\nsome r- sub A\nr rsub s-\ndisj A some r\nrdisj r s\nfunc s\n";
        let o = parse_ontology(text).unwrap();
        assert_eq!(parse_ontology(&serialize_ontology(&o)).unwrap(), o);
    }
}
