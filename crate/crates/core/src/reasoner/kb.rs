//! Interned view of an ontology: basic-concept closure, role hierarchy,
//! existential generators and constraint lists.
//!
//! Basic concepts are numbered `0` for `top`, `1 + c` for concept name `c`
//! and `1 + nc + R` for `some R`, where a role id is `2 * name + inverted`.

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::normal::normalize;
use crate::syntax::{BasicConcept, Dialect, Eli, Ontology, Role, Signature, Symbol};

pub type RoleId = usize;
pub type BasicId = usize;

pub const TOP: BasicId = 0;

pub fn inv(r: RoleId) -> RoleId {
    r ^ 1
}

/// Which universal-model construction applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Role inclusions allowed, no functionality.
    R,
    /// Functionality allowed, no role inclusions.
    F,
}

/// A normal-form CI `lhs sub some role . filler` (filler a name or `top`).
#[derive(Clone, Copy, Debug)]
pub struct Gen {
    pub lhs: BasicId,
    pub role: RoleId,
    pub filler: BasicId,
}

pub struct Kb {
    pub(crate) ontology: Ontology,
    pub(crate) dialect: Dialect,
    pub(crate) variant: Variant,
    concepts: Vec<Symbol>,
    concept_index: HashMap<Symbol, usize>,
    visible: FixedBitSet,
    roles: Vec<Symbol>,
    role_index: HashMap<Symbol, usize>,
    closure: Vec<FixedBitSet>,
    supers: Vec<Vec<RoleId>>,
    super_sets: Vec<FixedBitSet>,
    pub(crate) gens: Vec<Gen>,
    gens_by_lhs: Vec<Vec<usize>>,
    pub(crate) concept_disj: Vec<(BasicId, BasicId)>,
    pub(crate) role_disj: Vec<(RoleId, RoleId)>,
    functional: FixedBitSet,
    unsat: FixedBitSet,
    signature: Signature,
}

impl Kb {
    /// Builds the knowledge base for `o` over `sig(o)` plus `extra`.
    /// The ontology is normalized internally; names introduced by that
    /// step are hidden from [`Kb::visible_concepts`].
    pub fn new(o: &Ontology, extra: &Signature) -> Result<Kb> {
        let dialect = o.dialect();
        let variant = match dialect {
            Dialect::Core | Dialect::R => Variant::R,
            Dialect::F | Dialect::FRestricted => Variant::F,
            Dialect::RF => {
                return Err(Error::UnsupportedDialect {
                    dialect: dialect.to_string(),
                    operation: "reasoning",
                })
            }
        };
        let (norm, internal) = normalize(o);
        let signature = o.signature().union(extra);
        let mut concepts: Vec<Symbol> = signature.concepts.iter().cloned().collect();
        let mut visible = vec![true; concepts.len()];
        for x in internal.keys() {
            if !signature.concepts.contains(x) {
                concepts.push(x.clone());
                visible.push(false);
            }
        }
        let concept_index: HashMap<Symbol, usize> = concepts
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let roles: Vec<Symbol> = signature.roles.iter().cloned().collect();
        let role_index: HashMap<Symbol, usize> = roles
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), i))
            .collect();
        let nc = concepts.len();
        let nr = 2 * roles.len();
        let nb = 1 + nc + nr;

        let mut vis = FixedBitSet::with_capacity(nc);
        for (i, v) in visible.iter().enumerate() {
            vis.set(i, *v);
        }

        let mut kb = Kb {
            ontology: norm,
            dialect,
            variant,
            concepts,
            concept_index,
            visible: vis,
            roles,
            role_index,
            closure: Vec::new(),
            supers: Vec::new(),
            super_sets: Vec::new(),
            gens: Vec::new(),
            gens_by_lhs: vec![Vec::new(); nb],
            concept_disj: Vec::new(),
            role_disj: Vec::new(),
            functional: FixedBitSet::with_capacity(nr),
            unsat: FixedBitSet::with_capacity(nb),
            signature,
        };
        kb.build_roles();
        kb.build_constraints();
        kb.build_closure();
        kb.build_unsat();
        Ok(kb)
    }

    fn role_of(&self, r: &Role) -> RoleId {
        2 * self.role_index[&r.name] + usize::from(r.inverted)
    }

    fn basic_of(&self, b: &BasicConcept) -> BasicId {
        match b {
            BasicConcept::Top => TOP,
            BasicConcept::Atomic(a) => 1 + self.concept_index[a],
            BasicConcept::Exists(r) => self.exists(self.role_of(r)),
        }
    }

    fn build_roles(&mut self) {
        let nr = self.role_count();
        let mut direct: Vec<Vec<RoleId>> = vec![Vec::new(); nr];
        for (r, s) in &self.ontology.role_inclusions {
            let (r, s) = (self.role_of(r), self.role_of(s));
            direct[r].push(s);
            direct[inv(r)].push(inv(s));
        }
        for r in 0..nr {
            let mut seen = FixedBitSet::with_capacity(nr);
            let mut stack = vec![r];
            while let Some(x) = stack.pop() {
                if seen.put(x) {
                    continue;
                }
                stack.extend(direct[x].iter().copied());
            }
            self.supers.push(seen.ones().collect());
            self.super_sets.push(seen);
        }
    }

    fn build_closure(&mut self) {
        let nb = self.basic_count();
        let mut edges: Vec<Vec<BasicId>> = vec![vec![TOP]; nb];
        let cis = self.ontology.concept_inclusions.clone();
        for (lhs, rhs) in &cis {
            let l = self.basic_of(lhs);
            match rhs {
                Eli::Top => {}
                Eli::Atom(a) => edges[l].push(1 + self.concept_index[a]),
                Eli::Exists(r, d) => {
                    let role = self.role_of(r);
                    edges[l].push(self.exists(role));
                    let filler = match &**d {
                        Eli::Top => TOP,
                        Eli::Atom(a) => 1 + self.concept_index[a],
                        _ => unreachable!("ontology is in normal form"),
                    };
                    self.gens_by_lhs[l].push(self.gens.len());
                    self.gens.push(Gen {
                        lhs: l,
                        role,
                        filler,
                    });
                }
                Eli::And(..) => unreachable!("ontology is in normal form"),
            }
        }
        for r in 0..self.role_count() {
            for &s in &self.supers[r] {
                if s != r {
                    edges[self.exists(r)].push(self.exists(s));
                }
            }
        }
        self.closure = reach(&edges);
        if self.variant == Variant::F {
            // An R-successor of x is the unique R--neighbour of x when
            // func(R-) holds, so whatever it needs along R- lands on x.
            loop {
                let mut added = false;
                for r in 0..self.role_count() {
                    if !self.is_functional(inv(r)) {
                        continue;
                    }
                    let from = self.exists(r);
                    let fillers: Vec<BasicId> = self
                        .active_gens(&self.closure[self.exists(inv(r))])
                        .filter(|g| g.role == inv(r))
                        .map(|g| g.filler)
                        .collect();
                    for f in fillers {
                        if !self.closure[from].contains(f) {
                            edges[from].push(f);
                            added = true;
                        }
                    }
                }
                if !added {
                    break;
                }
                self.closure = reach(&edges);
            }
        }
    }

    fn build_constraints(&mut self) {
        let cd = self.ontology.concept_disjointness.clone();
        for (a, b) in &cd {
            self.concept_disj.push((self.basic_of(a), self.basic_of(b)));
        }
        let rd = self.ontology.role_disjointness.clone();
        let mut set = BTreeSet::new();
        for (r, s) in &rd {
            let (r, s) = (self.role_of(r), self.role_of(s));
            set.insert((r, s));
            set.insert((inv(r), inv(s)));
        }
        self.role_disj = set.into_iter().collect();
        let func = self.ontology.functional.clone();
        for r in &func {
            let id = self.role_of(r);
            self.functional.insert(id);
        }
    }

    fn build_unsat(&mut self) {
        let nb = self.basic_count();
        for b in 0..nb {
            let sat = if b == TOP {
                super::model::Model::from_parts(self, vec![Vec::new()], Vec::new()).consistent()
            } else if let Some(c) = self.concept_of_basic(b) {
                super::model::Model::from_parts(self, vec![vec![c]], Vec::new()).consistent()
            } else {
                let r = self.role_of_basic(b).unwrap();
                let (name, a, c) = if r.is_multiple_of(2) {
                    (r / 2, 0, 1)
                } else {
                    (r / 2, 1, 0)
                };
                super::model::Model::from_parts(
                    self,
                    vec![Vec::new(), Vec::new()],
                    vec![(name, a, c)],
                )
                .consistent()
            };
            if !sat {
                self.unsat.insert(b);
            }
        }
    }

    pub fn concept_count(&self) -> usize {
        self.concepts.len()
    }

    pub fn role_count(&self) -> usize {
        2 * self.roles.len()
    }

    pub fn basic_count(&self) -> usize {
        1 + self.concepts.len() + self.role_count()
    }

    pub fn exists(&self, r: RoleId) -> BasicId {
        1 + self.concepts.len() + r
    }

    pub fn concept_basic(&self, c: usize) -> BasicId {
        1 + c
    }

    pub fn concept_of_basic(&self, b: BasicId) -> Option<usize> {
        (b >= 1 && b <= self.concepts.len()).then(|| b - 1)
    }

    pub fn role_of_basic(&self, b: BasicId) -> Option<RoleId> {
        (b > self.concepts.len()).then(|| b - 1 - self.concepts.len())
    }

    pub fn concept_id(&self, name: &Symbol) -> Option<usize> {
        self.concept_index.get(name).copied()
    }

    pub fn concept_name(&self, c: usize) -> &Symbol {
        &self.concepts[c]
    }

    pub fn is_visible(&self, c: usize) -> bool {
        self.visible.contains(c)
    }

    pub fn role_name_id(&self, name: &Symbol) -> Option<usize> {
        self.role_index.get(name).copied()
    }

    pub fn role_id(&self, r: &Role) -> Option<RoleId> {
        self.role_name_id(&r.name)
            .map(|i| 2 * i + usize::from(r.inverted))
    }

    pub fn role(&self, r: RoleId) -> Role {
        Role {
            name: self.roles[r / 2].clone(),
            inverted: r % 2 == 1,
        }
    }

    pub fn basic_id(&self, b: &BasicConcept) -> Option<BasicId> {
        Some(match b {
            BasicConcept::Top => TOP,
            BasicConcept::Atomic(a) => 1 + self.concept_id(a)?,
            BasicConcept::Exists(r) => self.exists(self.role_id(r)?),
        })
    }

    pub fn basic(&self, b: BasicId) -> BasicConcept {
        if b == TOP {
            BasicConcept::Top
        } else if let Some(c) = self.concept_of_basic(b) {
            BasicConcept::Atomic(self.concepts[c].clone())
        } else {
            BasicConcept::Exists(self.role(self.role_of_basic(b).unwrap()))
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn covers(&self, sig: &Signature) -> bool {
        sig.concepts.is_subset(&self.signature.concepts)
            && sig.roles.is_subset(&self.signature.roles)
    }

    pub fn closure_of(&self, b: BasicId) -> &FixedBitSet {
        &self.closure[b]
    }

    /// Union of the closures of the given basic concepts.
    pub fn close(&self, seeds: impl IntoIterator<Item = BasicId>) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.basic_count());
        out.insert(TOP);
        out.union_with(&self.closure[TOP]);
        for b in seeds {
            out.union_with(&self.closure[b]);
        }
        out
    }

    pub fn supers(&self, r: RoleId) -> &[RoleId] {
        &self.supers[r]
    }

    pub fn is_sub_role(&self, r: RoleId, s: RoleId) -> bool {
        self.super_sets[r].contains(s)
    }

    pub fn is_functional(&self, r: RoleId) -> bool {
        self.functional.contains(r)
    }

    pub fn gens_from(&self, b: BasicId) -> impl Iterator<Item = &Gen> {
        self.gens_by_lhs[b].iter().map(move |&i| &self.gens[i])
    }

    /// Generators whose left-hand side is among `basics`.
    pub fn active_gens<'a>(
        &'a self,
        basics: &'a FixedBitSet,
    ) -> impl Iterator<Item = &'a Gen> + 'a {
        basics.ones().flat_map(move |b| self.gens_from(b))
    }

    pub fn is_unsat(&self, b: BasicId) -> bool {
        self.unsat.contains(b)
    }

    /// `O |= b1 sub b2`.
    pub fn entails(&self, b1: BasicId, b2: BasicId) -> bool {
        self.is_unsat(b1) || self.closure[b1].contains(b2)
    }

    /// `O |= r sub s`.
    pub fn entails_role(&self, r: RoleId, s: RoleId) -> bool {
        self.is_sub_role(r, s) || self.is_unsat(self.exists(r))
    }

    /// Visible concept names in a basic set.
    pub fn visible_concepts<'a>(
        &'a self,
        basics: &'a FixedBitSet,
    ) -> impl Iterator<Item = usize> + 'a {
        basics
            .ones()
            .filter_map(move |b| self.concept_of_basic(b))
            .filter(move |&c| self.is_visible(c))
    }

    /// Concept names (visible or not) in a basic set.
    pub fn concepts_in<'a>(&'a self, basics: &'a FixedBitSet) -> impl Iterator<Item = usize> + 'a {
        basics.ones().filter_map(move |b| self.concept_of_basic(b))
    }

    pub fn clashes(&self, basics: &FixedBitSet) -> bool {
        self.concept_disj
            .iter()
            .any(|&(a, b)| basics.contains(a) && basics.contains(b))
    }

    pub fn role_clash(&self, roles: &FixedBitSet) -> bool {
        self.role_disj
            .iter()
            .any(|&(a, b)| roles.contains(a) && roles.contains(b))
    }

    pub fn super_set(&self, r: RoleId) -> &FixedBitSet {
        &self.super_sets[r]
    }

    /// Anonymous successors demanded by a node with the given basics.
    /// `incoming` is the role that created the node, if it is anonymous.
    /// The result is not yet pruned for dominance.
    pub fn successor_specs(
        &self,
        basics: &FixedBitSet,
        incoming: Option<RoleId>,
    ) -> Vec<(RoleId, FixedBitSet)> {
        let mut out: Vec<(RoleId, FixedBitSet)> = Vec::new();
        match self.variant {
            Variant::R => {
                for g in self.active_gens(basics) {
                    out.push((g.role, self.close([g.filler, self.exists(inv(g.role))])));
                }
            }
            Variant::F => {
                let blocked = incoming.filter(|&r| self.is_functional(inv(r))).map(inv);
                let mut by_role: Vec<Vec<BasicId>> = vec![Vec::new(); self.role_count()];
                for g in self.active_gens(basics) {
                    if Some(g.role) != blocked {
                        by_role[g.role].push(g.filler);
                    }
                }
                for (r, fillers) in by_role.into_iter().enumerate() {
                    if fillers.is_empty() {
                        continue;
                    }
                    if self.is_functional(r) {
                        let mut seeds = fillers;
                        seeds.push(self.exists(inv(r)));
                        out.push((r, self.close(seeds)));
                    } else {
                        for f in fillers {
                            out.push((r, self.close([f, self.exists(inv(r))])));
                        }
                    }
                }
            }
        }
        out
    }

    /// Drops specs dominated by another one: a spec `(r, b)` is dominated
    /// by `(s, c)` when every super-role of `r` is one of `s` and `b` is a
    /// subset of `c`. Among equal specs the first one is kept.
    pub fn prune_dominated(&self, specs: Vec<(RoleId, FixedBitSet)>) -> Vec<(RoleId, FixedBitSet)> {
        let mut keep: Vec<(RoleId, FixedBitSet)> = Vec::new();
        for (i, (r, b)) in specs.iter().enumerate() {
            let dominated = specs.iter().enumerate().any(|(j, (s, c))| {
                if i == j {
                    return false;
                }
                let roles_le = self.super_sets[*r].is_subset(&self.super_sets[*s]);
                let sub = b.is_subset(c);
                if !(roles_le && sub) {
                    return false;
                }
                let equal = self.super_sets[*s].is_subset(&self.super_sets[*r]) && c.is_subset(b);
                !equal || j < i
            });
            if !dominated {
                keep.push((*r, b.clone()));
            }
        }
        keep
    }

    /// The role set of an anonymous edge created for role `r`.
    pub fn edge_roles(&self, r: RoleId) -> &[RoleId] {
        &self.supers[r]
    }

    pub fn ontology(&self) -> &Ontology {
        &self.ontology
    }

    pub fn dialect(&self) -> Dialect {
        self.dialect
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }
}

fn reach(edges: &[Vec<BasicId>]) -> Vec<FixedBitSet> {
    let n = edges.len();
    (0..n)
        .map(|b| {
            let mut seen = FixedBitSet::with_capacity(n);
            let mut stack = vec![b];
            while let Some(x) = stack.pop() {
                if seen.put(x) {
                    continue;
                }
                stack.extend(edges[x].iter().copied());
            }
            seen
        })
        .collect()
}
