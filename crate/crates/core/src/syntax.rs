//! Abstract syntax for DL-Lite and for unary conjunctive queries.
//!
//! All values are immutable once built and cheap to clone: identifiers are
//! reference-counted strings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An identifier: concept name, role name, variable or individual.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(s: &str) -> Self {
        Symbol(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol(Arc::from(s))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A role name or its inverse. Double inversion is not representable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Role {
    pub name: Symbol,
    pub inverted: bool,
}

impl Role {
    pub fn new(name: impl Into<Symbol>) -> Self {
        Role {
            name: name.into(),
            inverted: false,
        }
    }

    pub fn inv(name: impl Into<Symbol>) -> Self {
        Role {
            name: name.into(),
            inverted: true,
        }
    }

    pub fn inverse(&self) -> Role {
        Role {
            name: self.name.clone(),
            inverted: !self.inverted,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "{}-", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

impl fmt::Debug for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `top`, a concept name, or an unqualified existential `some R`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum BasicConcept {
    Top,
    Atomic(Symbol),
    Exists(Role),
}

impl BasicConcept {
    pub fn to_eli(&self) -> Eli {
        match self {
            BasicConcept::Top => Eli::Top,
            BasicConcept::Atomic(a) => Eli::Atom(a.clone()),
            BasicConcept::Exists(r) => Eli::Exists(r.clone(), Box::new(Eli::Top)),
        }
    }
}

impl fmt::Display for BasicConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicConcept::Top => f.write_str("top"),
            BasicConcept::Atomic(a) => write!(f, "{a}"),
            BasicConcept::Exists(r) => write!(f, "some {r}"),
        }
    }
}

/// An ELI concept.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Eli {
    Top,
    Atom(Symbol),
    And(Box<Eli>, Box<Eli>),
    Exists(Role, Box<Eli>),
}

impl Eli {
    pub fn atom(name: &str) -> Eli {
        Eli::Atom(Symbol::new(name))
    }

    pub fn and(a: Eli, b: Eli) -> Eli {
        Eli::And(Box::new(a), Box::new(b))
    }

    pub fn some(role: Role, filler: Eli) -> Eli {
        Eli::Exists(role, Box::new(filler))
    }

    /// Conjunction of a list; the empty conjunction is `top`.
    pub fn conj(parts: impl IntoIterator<Item = Eli>) -> Eli {
        let mut it = parts.into_iter();
        match it.next() {
            None => Eli::Top,
            Some(first) => it.fold(first, Eli::and),
        }
    }

    /// Top-level conjuncts after flattening.
    pub fn conjuncts(&self) -> Vec<&Eli> {
        let mut out = Vec::new();
        fn walk<'a>(c: &'a Eli, out: &mut Vec<&'a Eli>) {
            match c {
                Eli::And(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Canonical representative: conjunctions flattened, `top` conjuncts
    /// dropped, duplicates removed and conjuncts sorted (right-nested).
    pub fn canonical(&self) -> Eli {
        let mut parts: BTreeSet<Eli> = BTreeSet::new();
        for c in self.conjuncts() {
            match c {
                Eli::Top => {}
                Eli::Atom(a) => {
                    parts.insert(Eli::Atom(a.clone()));
                }
                Eli::Exists(r, d) => {
                    parts.insert(Eli::Exists(r.clone(), Box::new(d.canonical())));
                }
                Eli::And(..) => unreachable!("flattened"),
            }
        }
        let mut parts: Vec<Eli> = parts.into_iter().collect();
        match parts.len() {
            0 => Eli::Top,
            _ => {
                let mut acc = parts.pop().unwrap();
                while let Some(p) = parts.pop() {
                    acc = Eli::and(p, acc);
                }
                acc
            }
        }
    }

    /// Equality up to reordering and repetition of `&` conjuncts.
    pub fn same_as(&self, other: &Eli) -> bool {
        self.canonical() == other.canonical()
    }

    /// Syntactic size: number of concept names, roles and `top`s.
    pub fn size(&self) -> usize {
        match self {
            Eli::Top | Eli::Atom(_) => 1,
            Eli::And(a, b) => a.size() + b.size(),
            Eli::Exists(_, d) => 1 + d.size(),
        }
    }

    pub fn collect_signature(&self, sig: &mut Signature) {
        match self {
            Eli::Top => {}
            Eli::Atom(a) => {
                sig.concepts.insert(a.clone());
            }
            Eli::And(a, b) => {
                a.collect_signature(sig);
                b.collect_signature(sig);
            }
            Eli::Exists(r, d) => {
                sig.roles.insert(r.name.clone());
                d.collect_signature(sig);
            }
        }
    }

    /// All subconcepts, including `self`.
    pub fn subconcepts(&self) -> Vec<&Eli> {
        let mut out = vec![self];
        match self {
            Eli::And(a, b) => {
                out.extend(a.subconcepts());
                out.extend(b.subconcepts());
            }
            Eli::Exists(_, d) => out.extend(d.subconcepts()),
            _ => {}
        }
        out
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        match self {
            Eli::Top => f.write_str("top"),
            Eli::Atom(a) => write!(f, "{a}"),
            Eli::Exists(r, d) => {
                if **d == Eli::Top {
                    write!(f, "some {r}")
                } else {
                    write!(f, "some {r} . ")?;
                    d.fmt_prec(f, true)
                }
            }
            Eli::And(a, b) => {
                if nested {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, false)?;
                f.write_str(" & ")?;
                // `&` parses left to right, so a conjunction on the right
                // needs its own parentheses
                b.fmt_prec(f, matches!(**b, Eli::And(..)))?;
                if nested {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Eli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

/// A set of concept and role names.
#[derive(Clone, Default, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Signature {
    pub concepts: BTreeSet<Symbol>,
    pub roles: BTreeSet<Symbol>,
}

impl Signature {
    pub fn new<'a>(
        concepts: impl IntoIterator<Item = &'a str>,
        roles: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        Signature {
            concepts: concepts.into_iter().map(Symbol::new).collect(),
            roles: roles.into_iter().map(Symbol::new).collect(),
        }
    }

    pub fn union(&self, other: &Signature) -> Signature {
        Signature {
            concepts: self.concepts.union(&other.concepts).cloned().collect(),
            roles: self.roles.union(&other.roles).cloned().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.concepts.len() + self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ontology language fragment, most specific first.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Dialect {
    /// Neither role inclusions nor functionality assertions.
    Core,
    /// Role inclusions, no functionality.
    R,
    /// Functionality without role inclusions, violating the
    /// restriction on existentials over roles with functional inverse.
    F,
    /// Functionality without role inclusions, restricted.
    FRestricted,
    /// Both role inclusions and functionality.
    RF,
}

impl Dialect {
    pub fn is_f(self) -> bool {
        matches!(self, Dialect::F | Dialect::FRestricted)
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dialect::Core => "core",
            Dialect::R => "r",
            Dialect::F => "f",
            Dialect::FRestricted => "f-restricted",
            Dialect::RF => "rf",
        };
        f.write_str(s)
    }
}

/// A DL-Lite ontology.
#[derive(Clone, Default, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Ontology {
    pub concept_inclusions: Vec<(BasicConcept, Eli)>,
    pub role_inclusions: Vec<(Role, Role)>,
    pub concept_disjointness: Vec<(BasicConcept, BasicConcept)>,
    pub role_disjointness: Vec<(Role, Role)>,
    pub functional: BTreeSet<Role>,
}

/// A concept inclusion that breaks the restriction needed for finite
/// frontiers under functionality: its right-hand side contains `some R . D`
/// while `func(R-)` is asserted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RestrictionViolation {
    pub inclusion: (BasicConcept, Eli),
    pub functional: Role,
}

impl fmt::Display for RestrictionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "`{} sub {}` with `func {}`",
            self.inclusion.0, self.inclusion.1, self.functional
        )
    }
}

impl Ontology {
    pub fn new() -> Self {
        Ontology::default()
    }

    pub fn with_ci(mut self, lhs: BasicConcept, rhs: Eli) -> Self {
        self.concept_inclusions.push((lhs, rhs));
        self
    }

    pub fn with_ri(mut self, sub: Role, sup: Role) -> Self {
        self.role_inclusions.push((sub, sup));
        self
    }

    pub fn with_disj(mut self, a: BasicConcept, b: BasicConcept) -> Self {
        self.concept_disjointness.push((a, b));
        self
    }

    pub fn with_rdisj(mut self, a: Role, b: Role) -> Self {
        self.role_disjointness.push((a, b));
        self
    }

    pub fn with_func(mut self, r: Role) -> Self {
        self.functional.insert(r);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.concept_inclusions.is_empty()
            && self.role_inclusions.is_empty()
            && self.concept_disjointness.is_empty()
            && self.role_disjointness.is_empty()
            && self.functional.is_empty()
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        let basic = |b: &BasicConcept, sig: &mut Signature| match b {
            BasicConcept::Top => {}
            BasicConcept::Atomic(a) => {
                sig.concepts.insert(a.clone());
            }
            BasicConcept::Exists(r) => {
                sig.roles.insert(r.name.clone());
            }
        };
        for (b, c) in &self.concept_inclusions {
            basic(b, &mut sig);
            c.collect_signature(&mut sig);
        }
        for (r, s) in self.role_inclusions.iter().chain(&self.role_disjointness) {
            sig.roles.insert(r.name.clone());
            sig.roles.insert(s.name.clone());
        }
        for (a, b) in &self.concept_disjointness {
            basic(a, &mut sig);
            basic(b, &mut sig);
        }
        for r in &self.functional {
            sig.roles.insert(r.name.clone());
        }
        sig
    }

    /// Size as the number of symbol occurrences plus one per statement.
    pub fn size(&self) -> usize {
        let basic = |b: &BasicConcept| match b {
            BasicConcept::Top | BasicConcept::Atomic(_) => 1,
            BasicConcept::Exists(_) => 2,
        };
        let mut n = 0;
        for (b, c) in &self.concept_inclusions {
            n += 1 + basic(b) + c.size();
        }
        n += 3 * (self.role_inclusions.len() + self.role_disjointness.len());
        for (a, b) in &self.concept_disjointness {
            n += 1 + basic(a) + basic(b);
        }
        n += 2 * self.functional.len();
        n
    }

    /// Every CI whose right-hand side has an existential over a role whose
    /// inverse is functional.
    pub fn restriction_violations(&self) -> Vec<RestrictionViolation> {
        let mut out = Vec::new();
        for ci in &self.concept_inclusions {
            let mut seen = BTreeSet::new();
            for sub in ci.1.subconcepts() {
                if let Eli::Exists(r, _) = sub {
                    let inv = r.inverse();
                    if self.functional.contains(&inv) && seen.insert(inv.clone()) {
                        out.push(RestrictionViolation {
                            inclusion: ci.clone(),
                            functional: inv,
                        });
                    }
                }
            }
        }
        out
    }

    /// The most specific dialect the ontology belongs to.
    pub fn dialect(&self) -> Dialect {
        match (self.role_inclusions.is_empty(), self.functional.is_empty()) {
            (true, true) => Dialect::Core,
            (false, true) => Dialect::R,
            (false, false) => Dialect::RF,
            (true, false) => {
                if self.restriction_violations().is_empty() {
                    Dialect::FRestricted
                } else {
                    Dialect::F
                }
            }
        }
    }
}

/// Most specific dialect of `o`.
pub fn dialect_of(o: &Ontology) -> Dialect {
    o.dialect()
}

/// `A(x)` or `top(x)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum ConceptLabel {
    Top,
    Name(Symbol),
}

impl fmt::Display for ConceptLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConceptLabel::Top => f.write_str("top"),
            ConceptLabel::Name(a) => write!(f, "{a}"),
        }
    }
}

/// A set of concept and role assertions. Variables of a CQ and
/// individuals of an ABox share this representation.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Atoms {
    pub concepts: BTreeSet<(Symbol, Symbol)>,
    pub roles: BTreeSet<(Symbol, Symbol, Symbol)>,
    /// Terms mentioned only through `top(t)`.
    pub tops: BTreeSet<Symbol>,
}

impl Atoms {
    pub fn terms(&self) -> BTreeSet<Symbol> {
        let mut out: BTreeSet<Symbol> = self.tops.clone();
        for (_, t) in &self.concepts {
            out.insert(t.clone());
        }
        for (_, a, b) in &self.roles {
            out.insert(a.clone());
            out.insert(b.clone());
        }
        out
    }

    pub fn add_concept(&mut self, label: ConceptLabel, t: Symbol) {
        match label {
            ConceptLabel::Top => {
                self.tops.insert(t);
            }
            ConceptLabel::Name(a) => {
                self.concepts.insert((a, t));
            }
        }
    }

    /// Adds `role(a, b)`, storing `r-(a, b)` as `r(b, a)`.
    pub fn add_role(&mut self, role: &Role, a: Symbol, b: Symbol) {
        if role.inverted {
            self.roles.insert((role.name.clone(), b, a));
        } else {
            self.roles.insert((role.name.clone(), a, b));
        }
    }

    fn normalize_tops(&mut self) {
        let mut mentioned: BTreeSet<Symbol> = BTreeSet::new();
        for (_, t) in &self.concepts {
            mentioned.insert(t.clone());
        }
        for (_, a, b) in &self.roles {
            mentioned.insert(a.clone());
            mentioned.insert(b.clone());
        }
        self.tops.retain(|t| !mentioned.contains(t));
    }

    pub fn signature(&self) -> Signature {
        Signature {
            concepts: self.concepts.iter().map(|(a, _)| a.clone()).collect(),
            roles: self.roles.iter().map(|(r, _, _)| r.clone()).collect(),
        }
    }

    pub fn atom_count(&self) -> usize {
        self.concepts.len() + self.roles.len()
    }

    fn fmt_atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        for t in &self.tops {
            out.push(format!("top({t})"));
        }
        for (a, t) in &self.concepts {
            out.push(format!("{a}({t})"));
        }
        for (r, a, b) in &self.roles {
            out.push(format!("{r}({a},{b})"));
        }
        out
    }
}

/// A finite set of assertions.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct ABox {
    atoms: Atoms,
}

impl ABox {
    pub fn new() -> Self {
        ABox::default()
    }

    pub fn from_atoms(mut atoms: Atoms) -> Self {
        atoms.normalize_tops();
        ABox { atoms }
    }

    pub fn atoms(&self) -> &Atoms {
        &self.atoms
    }

    pub fn assert_concept(&mut self, label: ConceptLabel, ind: impl Into<Symbol>) {
        self.atoms.add_concept(label, ind.into());
        self.atoms.normalize_tops();
    }

    pub fn assert_name(&mut self, concept: &str, ind: &str) {
        self.assert_concept(ConceptLabel::Name(Symbol::new(concept)), ind);
    }

    pub fn assert_role(&mut self, role: &Role, a: impl Into<Symbol>, b: impl Into<Symbol>) {
        self.atoms.add_role(role, a.into(), b.into());
        self.atoms.normalize_tops();
    }

    pub fn individuals(&self) -> BTreeSet<Symbol> {
        self.atoms.terms()
    }

    pub fn concept_assertions(&self) -> impl Iterator<Item = &(Symbol, Symbol)> {
        self.atoms.concepts.iter()
    }

    pub fn role_assertions(&self) -> impl Iterator<Item = &(Symbol, Symbol, Symbol)> {
        self.atoms.roles.iter()
    }

    pub fn signature(&self) -> Signature {
        self.atoms.signature()
    }

    pub fn len(&self) -> usize {
        self.atoms.atom_count() + self.atoms.tops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Views the ABox as a CQ with answer variable `ind`.
    pub fn to_cq(&self, ind: &Symbol) -> Cq {
        let mut atoms = self.atoms.clone();
        atoms.tops.insert(ind.clone());
        Cq::from_atoms(ind.clone(), atoms)
    }
}

impl fmt::Display for ABox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.atoms.fmt_atoms() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// A unary conjunctive query. Inverse role atoms are stored in forward
/// direction; `top` atoms are kept only for otherwise unmentioned variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Cq {
    answer: Symbol,
    atoms: Atoms,
}

impl Cq {
    /// The query `top(answer)`.
    pub fn top(answer: impl Into<Symbol>) -> Cq {
        let answer = answer.into();
        let mut atoms = Atoms::default();
        atoms.tops.insert(answer.clone());
        Cq { answer, atoms }
    }

    pub fn from_atoms(answer: Symbol, mut atoms: Atoms) -> Cq {
        atoms.tops.insert(answer.clone());
        atoms.normalize_tops();
        Cq { answer, atoms }
    }

    pub fn answer(&self) -> &Symbol {
        &self.answer
    }

    pub fn atoms(&self) -> &Atoms {
        &self.atoms
    }

    pub fn with_concept(mut self, concept: &str, var: &str) -> Cq {
        self.add_concept(Symbol::new(concept), Symbol::new(var));
        self
    }

    pub fn with_role(mut self, role: &Role, a: &str, b: &str) -> Cq {
        self.add_role(role, Symbol::new(a), Symbol::new(b));
        self
    }

    pub fn add_concept(&mut self, concept: Symbol, var: Symbol) {
        self.atoms.concepts.insert((concept, var));
        self.atoms.normalize_tops();
    }

    pub fn add_role(&mut self, role: &Role, a: Symbol, b: Symbol) {
        self.atoms.add_role(role, a, b);
        self.atoms.normalize_tops();
    }

    pub fn concept_atoms(&self) -> impl Iterator<Item = &(Symbol, Symbol)> {
        self.atoms.concepts.iter()
    }

    pub fn role_atoms(&self) -> impl Iterator<Item = &(Symbol, Symbol, Symbol)> {
        self.atoms.roles.iter()
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        self.atoms.terms()
    }

    pub fn var_count(&self) -> usize {
        self.vars().len()
    }

    pub fn signature(&self) -> Signature {
        self.atoms.signature()
    }

    /// Number of atoms plus one; never zero.
    pub fn size(&self) -> usize {
        1 + self.atoms.atom_count()
    }

    /// The ABox obtained by reading variables as individuals.
    pub fn to_abox(&self) -> ABox {
        ABox::from_atoms(self.atoms.clone())
    }

    /// Restriction to atoms over `keep`; the answer variable must be kept.
    pub fn restrict(&self, keep: &BTreeSet<Symbol>) -> Cq {
        let mut atoms = Atoms::default();
        for (a, v) in &self.atoms.concepts {
            if keep.contains(v) {
                atoms.concepts.insert((a.clone(), v.clone()));
            }
        }
        for (r, a, b) in &self.atoms.roles {
            if keep.contains(a) && keep.contains(b) {
                atoms.roles.insert((r.clone(), a.clone(), b.clone()));
            }
        }
        for t in &self.atoms.tops {
            if keep.contains(t) {
                atoms.tops.insert(t.clone());
            }
        }
        Cq::from_atoms(self.answer.clone(), atoms)
    }

    /// Same query with a different answer variable.
    pub fn with_answer(&self, answer: Symbol) -> Cq {
        Cq::from_atoms(answer, self.atoms.clone())
    }

    /// Applies an injective renaming (unmapped variables keep their name).
    pub fn rename(&self, map: &BTreeMap<Symbol, Symbol>) -> Cq {
        let f = |v: &Symbol| map.get(v).cloned().unwrap_or_else(|| v.clone());
        let mut atoms = Atoms::default();
        for (a, v) in &self.atoms.concepts {
            atoms.concepts.insert((a.clone(), f(v)));
        }
        for (r, a, b) in &self.atoms.roles {
            atoms.roles.insert((r.clone(), f(a), f(b)));
        }
        for t in &self.atoms.tops {
            atoms.tops.insert(f(t));
        }
        Cq::from_atoms(f(&self.answer), atoms)
    }

    /// Identifies variables that are successors of the same variable
    /// along a functional role, until no such pair is left. The result is
    /// equivalent to `self` under any ontology asserting `functional`.
    /// The answer variable survives; otherwise the least name does.
    pub fn identify_functional(&self, functional: &BTreeSet<Role>) -> Cq {
        self.functional_quotient(functional).0
    }

    /// [`Cq::identify_functional`] together with the representative of
    /// every variable.
    pub fn functional_quotient(
        &self,
        functional: &BTreeSet<Role>,
    ) -> (Cq, BTreeMap<Symbol, Symbol>) {
        let mut q = self.clone();
        let mut rep: BTreeMap<Symbol, Symbol> =
            self.vars().into_iter().map(|v| (v.clone(), v)).collect();
        loop {
            let mut merge: Option<(Symbol, Symbol)> = None;
            'find: for r in functional {
                let mut succ: BTreeMap<&Symbol, &Symbol> = BTreeMap::new();
                for (name, a, b) in &q.atoms.roles {
                    if *name != r.name {
                        continue;
                    }
                    let (from, to) = if r.inverted { (b, a) } else { (a, b) };
                    match succ.get(from) {
                        Some(&prev) if prev != to => {
                            merge = Some((prev.clone(), to.clone()));
                            break 'find;
                        }
                        _ => {
                            succ.insert(from, to);
                        }
                    }
                }
            }
            let Some((a, b)) = merge else {
                return (q, rep);
            };
            let (keep, drop) = if b == q.answer || (a != q.answer && b < a) {
                (b, a)
            } else {
                (a, b)
            };
            for r in rep.values_mut() {
                if *r == drop {
                    *r = keep.clone();
                }
            }
            q = q.rename(&[(drop, keep)].into_iter().collect());
        }
    }

    /// Undirected adjacency: for each variable, the list of
    /// `(role seen from this variable, neighbour)`.
    pub fn adjacency(&self) -> BTreeMap<Symbol, Vec<(Role, Symbol)>> {
        let mut adj: BTreeMap<Symbol, Vec<(Role, Symbol)>> = BTreeMap::new();
        for v in self.vars() {
            adj.entry(v).or_default();
        }
        for (r, a, b) in &self.atoms.roles {
            adj.get_mut(a)
                .unwrap()
                .push((Role::new(r.clone()), b.clone()));
            if a != b {
                adj.get_mut(b)
                    .unwrap()
                    .push((Role::inv(r.clone()), a.clone()));
            }
        }
        adj
    }

    /// Variables reachable from the answer variable.
    pub fn connected_vars(&self) -> BTreeSet<Symbol> {
        let adj = self.adjacency();
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.answer.clone()];
        while let Some(v) = stack.pop() {
            if !seen.insert(v.clone()) {
                continue;
            }
            if let Some(ns) = adj.get(&v) {
                for (_, n) in ns {
                    if !seen.contains(n) {
                        stack.push(n.clone());
                    }
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.connected_vars().len() == self.var_count()
    }

    /// Tree-shaped Gaifman graph without self-loops or multi-edges.
    pub fn is_eliq(&self) -> bool {
        let mut pairs = BTreeSet::new();
        for (_, a, b) in &self.atoms.roles {
            if a == b {
                return false;
            }
            let key = if a < b { (a, b) } else { (b, a) };
            if !pairs.insert(key) {
                return false;
            }
        }
        self.is_connected() && self.atoms.roles.len() + 1 == self.var_count()
    }

    /// Children of each variable when the query is read as a tree rooted at
    /// the answer variable. Only meaningful for ELIQs.
    pub fn tree_children(&self) -> BTreeMap<Symbol, Vec<(Role, Symbol)>> {
        let adj = self.adjacency();
        let mut out: BTreeMap<Symbol, Vec<(Role, Symbol)>> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.answer.clone()];
        seen.insert(self.answer.clone());
        while let Some(v) = stack.pop() {
            let entry = out.entry(v.clone()).or_default();
            for (r, n) in &adj[&v] {
                if seen.insert(n.clone()) {
                    entry.push((r.clone(), n.clone()));
                    stack.push(n.clone());
                }
            }
        }
        out
    }

    /// Concept names on `v`.
    pub fn labels_of(&self, v: &Symbol) -> BTreeSet<Symbol> {
        self.atoms
            .concepts
            .iter()
            .filter(|(_, t)| t == v)
            .map(|(a, _)| a.clone())
            .collect()
    }
}

impl fmt::Display for Cq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q({}) :- ", self.answer)?;
        let atoms = self.atoms.fmt_atoms();
        write!(f, "{}", atoms.join(", "))
    }
}

/// Translates an ELIQ into the corresponding ELI concept.
pub fn eliq_to_concept(q: &Cq) -> Result<Eli> {
    if !q.is_eliq() {
        return Err(Error::NotAnEliq(q.to_string()));
    }
    let children = q.tree_children();
    fn build(q: &Cq, children: &BTreeMap<Symbol, Vec<(Role, Symbol)>>, v: &Symbol) -> Eli {
        let mut parts: Vec<Eli> = q.labels_of(v).into_iter().map(Eli::Atom).collect();
        for (r, c) in &children[v] {
            parts.push(Eli::some(r.clone(), build(q, children, c)));
        }
        Eli::conj(parts)
    }
    Ok(build(q, &children, q.answer()).canonical())
}

/// Translates an ELI concept into an ELIQ with answer variable `x0`;
/// other variables are named `x1, x2, ...` in depth-first order.
pub fn concept_to_eliq(c: &Eli) -> Cq {
    concept_to_eliq_named(c, "x")
}

/// As [`concept_to_eliq`] with a custom variable prefix.
pub fn concept_to_eliq_named(c: &Eli, prefix: &str) -> Cq {
    let mut atoms = Atoms::default();
    let mut counter = 0usize;
    let root = Symbol::from(format!("{prefix}0"));
    fn walk(c: &Eli, at: &Symbol, atoms: &mut Atoms, counter: &mut usize, prefix: &str) {
        match c {
            Eli::Top => {}
            Eli::Atom(a) => {
                atoms.concepts.insert((a.clone(), at.clone()));
            }
            Eli::And(a, b) => {
                walk(a, at, atoms, counter, prefix);
                walk(b, at, atoms, counter, prefix);
            }
            Eli::Exists(r, d) => {
                *counter += 1;
                let v = Symbol::from(format!("{prefix}{counter}"));
                atoms.add_role(r, at.clone(), v.clone());
                atoms.tops.insert(v.clone());
                walk(d, &v, atoms, counter, prefix);
            }
        }
    }
    walk(c, &root, &mut atoms, &mut counter, prefix);
    Cq::from_atoms(root, atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn role_inverse_is_involution() {
        let r = Role::new("r");
        assert_eq!(r.inverse().inverse(), r);
        assert_eq!(r.inverse().to_string(), "r-");
    }

    #[test]
    fn inverse_atoms_stored_forward() {
        let q = Cq::top("x").with_role(&Role::inv("r"), "x", "y");
        assert!(q
            .role_atoms()
            .any(|(r, a, b)| r.as_str() == "r" && a.as_str() == "y" && b.as_str() == "x"));
    }

    #[test]
    fn nested_eliq_translation() {
        // A & some r- . (some s . B & some r . A)
        let c = Eli::and(
            Eli::atom("A"),
            Eli::some(
                Role::inv("r"),
                Eli::and(
                    Eli::some(Role::new("s"), Eli::atom("B")),
                    Eli::some(Role::new("r"), Eli::atom("A")),
                ),
            ),
        );
        let q = concept_to_eliq(&c);
        assert_eq!(q.var_count(), 4);
        assert_eq!(q.role_atoms().count(), 3);
        assert_eq!(q.concept_atoms().count(), 3);
        assert!(q.is_eliq());
        let back = eliq_to_concept(&q).unwrap();
        assert!(back.same_as(&c));
    }

    #[test]
    fn top_concept_is_single_variable_query() {
        let q = concept_to_eliq(&Eli::Top);
        assert_eq!(q.var_count(), 1);
        assert_eq!(q.to_string(), "q(x0) :- top(x0)");
        assert_eq!(eliq_to_concept(&q).unwrap(), Eli::Top);
    }

    #[test]
    fn functional_quotient_keeps_the_answer() {
        let q = Cq::top("x")
            .with_role(&Role::inv("r"), "x", "a")
            .with_role(&Role::new("r"), "b", "c")
            .with_role(&Role::new("r"), "b", "x")
            .with_concept("A", "c");
        let func: BTreeSet<Role> = [Role::new("r")].into_iter().collect();
        let (m, rep) = q.functional_quotient(&func);
        assert_eq!(m.to_string(), "q(x) :- A(x), r(a,x), r(b,x)");
        assert_eq!(rep[&Symbol::new("c")], Symbol::new("x"));
        assert_eq!(q.identify_functional(&BTreeSet::new()), q);
    }

    #[test]
    fn cyclic_query_is_not_an_eliq() {
        let q = Cq::top("x")
            .with_role(&Role::new("r"), "x", "y")
            .with_role(&Role::new("r"), "y", "z")
            .with_role(&Role::new("r"), "z", "x");
        assert!(!q.is_eliq());
        assert!(matches!(eliq_to_concept(&q), Err(Error::NotAnEliq(_))));
        let loop_q = Cq::top("x").with_role(&Role::new("r"), "x", "x");
        assert!(!loop_q.is_eliq());
        let multi =
            Cq::top("x")
                .with_role(&Role::new("r"), "x", "y")
                .with_role(&Role::new("s"), "x", "y");
        assert!(!multi.is_eliq());
    }

    #[test]
    fn dialects() {
        let unrestricted = Ontology::new()
            .with_ci(
                BasicConcept::Atomic("A".into()),
                Eli::some(Role::new("r"), Eli::Top),
            )
            .with_ci(
                BasicConcept::Exists(Role::inv("r")),
                Eli::some(Role::new("r"), Eli::Top),
            )
            .with_ci(
                BasicConcept::Exists(Role::new("r")),
                Eli::some(Role::new("s"), Eli::Top),
            )
            .with_func(Role::inv("r"));
        assert_eq!(unrestricted.dialect(), Dialect::F);
        assert_eq!(unrestricted.restriction_violations().len(), 2);
        let func_s = Ontology::new().with_func(Role::new("s"));
        assert_eq!(func_s.dialect(), Dialect::FRestricted);
        let rf = Ontology::new()
            .with_ri(Role::new("r"), Role::new("s"))
            .with_func(Role::new("r"));
        assert_eq!(rf.dialect(), Dialect::RF);
        assert_eq!(Ontology::new().dialect(), Dialect::Core);
    }

    #[test]
    fn canonical_flattens_and_sorts() {
        let a = Eli::and(Eli::atom("B"), Eli::and(Eli::Top, Eli::atom("A")));
        let b = Eli::and(Eli::atom("A"), Eli::atom("B"));
        assert!(a.same_as(&b));
        assert_eq!(a.canonical().to_string(), "A & B");
    }
}
