//! Frontiers of ELIQs: finite complete sets of least general
//! generalizations w.r.t. an ontology.
//!
//! Both constructions first generalize each variable bottom-up and then
//! compensate each generalization of the answer variable. They run on a normal-form copy of the ontology; fresh names
//! are translated back at the end.

pub mod f;
pub mod r;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::normal::{expand_fresh, normalize};
use crate::reasoner::kb::{Kb, RoleId, Variant};
use crate::reasoner::model::Model;
use crate::reasoner::{subtree, Reasoner};
use crate::syntax::{Atoms, Cq, Dialect, Ontology, Role, Signature, Symbol};

/// How a generalization candidate was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    DropAtom {
        concept: Symbol,
        var: Symbol,
    },
    GeneralizeSub {
        role: Role,
        from: Symbol,
        to: Symbol,
    },
}

/// A query together with the map from its variables back to the
/// variables of the original query they copy.
#[derive(Clone, Debug)]
pub struct GenCandidate {
    pub query: Cq,
    pub down: BTreeMap<Symbol, Symbol>,
    pub provenance: Provenance,
}

/// Which construction to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DialectChoice {
    #[default]
    Auto,
    R,
    F,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub dialect: DialectChoice,
    /// Drop members equivalent to an earlier member.
    pub prune: bool,
}

#[derive(Clone, Debug)]
pub struct Frontier {
    pub members: Vec<Cq>,
    pub source_query: Cq,
    pub ontology: Ontology,
}

impl Frontier {
    pub fn total_vars(&self) -> usize {
        self.members.iter().map(Cq::var_count).sum()
    }
}

/// Frontier with the construction picked from the ontology's dialect.
pub fn frontier(o: &Ontology, q: &Cq) -> Result<Frontier> {
    frontier_with(o, q, Options::default())
}

pub fn frontier_r(o: &Ontology, q: &Cq) -> Result<Frontier> {
    frontier_with(
        o,
        q,
        Options {
            dialect: DialectChoice::R,
            prune: false,
        },
    )
}

pub fn frontier_f(o: &Ontology, q: &Cq) -> Result<Frontier> {
    frontier_with(
        o,
        q,
        Options {
            dialect: DialectChoice::F,
            prune: false,
        },
    )
}

/// Checks that the ontology admits the requested construction and
/// returns the one to run.
pub fn check_dialect(o: &Ontology, choice: DialectChoice) -> Result<DialectChoice> {
    let d = o.dialect();
    let unsupported = || Error::UnsupportedDialect {
        dialect: d.to_string(),
        operation: "frontier computation",
    };
    match d {
        Dialect::RF => Err(unsupported()),
        Dialect::F => Err(Error::NotFRestricted {
            violations: o
                .restriction_violations()
                .iter()
                .map(|v| v.to_string())
                .collect(),
        }),
        Dialect::Core => Ok(match choice {
            DialectChoice::Auto => DialectChoice::R,
            c => c,
        }),
        Dialect::R => match choice {
            DialectChoice::F => Err(unsupported()),
            _ => Ok(DialectChoice::R),
        },
        Dialect::FRestricted => match choice {
            DialectChoice::R => Err(unsupported()),
            _ => Ok(DialectChoice::F),
        },
    }
}

pub fn frontier_with(o: &Ontology, q: &Cq, opts: Options) -> Result<Frontier> {
    if !q.is_eliq() {
        return Err(Error::NotAnEliq(q.to_string()));
    }
    let choice = check_dialect(o, opts.dialect)?;
    let reasoner = Reasoner::with_signature(o, &q.signature())?;
    // the construction expects functionality to hold inside the query
    let minimal = reasoner.minimize_eliq(&q.identify_functional(&o.functional))?;

    let (normal, fresh) = normalize(o);
    let kb = Kb::new(&normal, &q.signature())?;
    let norm_reasoner = Reasoner::with_signature(&normal, &q.signature())?;
    // fresh names can make parts of the query redundant again
    let saturated = norm_reasoner.minimize_eliq(&norm_reasoner.saturate(&minimal)?)?;
    let mut ctx = Ctx::new(&kb, &saturated);

    let candidates = match choice {
        DialectChoice::F => f::generalize(&mut ctx, saturated.answer()),
        _ => r::generalize(&mut ctx, saturated.answer()),
    };
    let functional: BTreeSet<Role> = if choice == DialectChoice::F {
        o.functional.clone()
    } else {
        BTreeSet::new()
    };
    let mut members = Vec::new();
    for cand in &candidates {
        let p = match choice {
            DialectChoice::F => f::compensate(&mut ctx, cand),
            _ => r::compensate(&mut ctx, cand),
        };
        let expanded = expand_fresh(p.query.atoms(), &fresh, &functional);
        let member = Cq::from_atoms(p.query.answer().clone(), expanded);
        if !member.is_eliq() {
            return Err(Error::Invariant(format!("member is not an ELIQ: {member}")));
        }
        if !reasoner.contained(&minimal, &member)? {
            return Err(Error::Invariant(format!(
                "member does not generalize the query: {member}"
            )));
        }
        if reasoner.contained(&member, &minimal)? {
            return Err(Error::Invariant(format!(
                "member is not strictly more general: {member}"
            )));
        }
        members.push(member);
    }
    if opts.prune {
        let mut kept: Vec<Cq> = Vec::new();
        for m in members {
            let mut dup = false;
            for k in &kept {
                if reasoner.equivalent(k, &m)? {
                    dup = true;
                    break;
                }
            }
            if !dup {
                kept.push(m);
            }
        }
        members = kept;
    }
    Ok(Frontier {
        members,
        source_query: q.clone(),
        ontology: o.clone(),
    })
}

/// Shared state of one frontier computation over a normal-form ontology.
pub(crate) struct Ctx<'k> {
    pub kb: &'k Kb,
    /// The query, minimal and saturated.
    pub q: Cq,
    pub model: Model<'k>,
    pub children: BTreeMap<Symbol, Vec<(Role, Symbol)>>,
    pub adjacency: BTreeMap<Symbol, Vec<(Role, Symbol)>>,
    taken: BTreeSet<Symbol>,
    counter: usize,
    memo: BTreeMap<Symbol, Vec<GenCandidate>>,
}

impl<'k> Ctx<'k> {
    pub fn new(kb: &'k Kb, q: &Cq) -> Ctx<'k> {
        Ctx {
            kb,
            q: q.clone(),
            model: Model::new(kb, &q.to_abox(), &[q.answer().clone()]),
            children: q.tree_children(),
            adjacency: q.adjacency(),
            taken: q.vars(),
            counter: 0,
            memo: BTreeMap::new(),
        }
    }

    pub fn fresh(&mut self, base: &str) -> Symbol {
        loop {
            self.counter += 1;
            let s = Symbol::from(format!("{base}.{}", self.counter));
            if self.taken.insert(s.clone()) {
                return s;
            }
        }
    }

    pub fn role_id(&self, r: &Role) -> RoleId {
        self.kb.role_id(r).expect("role in signature")
    }

    pub fn concept_basic(&self, a: &Symbol) -> usize {
        self.kb
            .concept_basic(self.kb.concept_id(a).expect("concept in signature"))
    }

    pub fn node(&self, v: &Symbol) -> usize {
        self.model.individual(v).expect("query variable")
    }

    /// `q_x`: the subtree of the query below `x`, answered at `x`.
    pub fn subquery(&self, x: &Symbol) -> Cq {
        self.q.with_answer(x.clone()).restrict(&subtree(&self.q, x))
    }

    /// Whether the query without the names equivalent to `ba` at `x`
    /// still entails `ba` at `x`.
    fn forced(&self, x: &Symbol, ba: usize) -> bool {
        let kb = self.kb;
        let mut atoms = self.q.atoms().clone();
        atoms.concepts.retain(|(b, v)| {
            let bb = self.concept_basic(b);
            v != x || !(kb.entails(ba, bb) && kb.entails(bb, ba))
        });
        let rest = Cq::from_atoms(self.q.answer().clone(), atoms);
        let model = Model::new(kb, &rest.to_abox(), &[]);
        model.basics(model.individual(x).unwrap()).contains(ba)
    }

    /// Candidates dropping one concept atom at `x`.
    pub fn drop_atoms(&self, x: &Symbol) -> Vec<GenCandidate> {
        let kb = self.kb;
        let labels: Vec<Symbol> = self.q.labels_of(x).into_iter().collect();
        let base = self.subquery(x);
        let mut out: Vec<GenCandidate> = Vec::new();
        for a in &labels {
            let ba = self.concept_basic(a);
            let strictly_below = labels.iter().any(|b| {
                let bb = self.concept_basic(b);
                kb.entails(bb, ba) && !kb.entails(ba, bb)
            });
            if strictly_below {
                continue;
            }
            let implied_by_edge = self.adjacency[x]
                .iter()
                .any(|(r, _)| kb.entails(kb.exists(self.role_id(r)), ba));
            if implied_by_edge {
                continue;
            }
            // under functionality a neighbour can still force A(x)
            if kb.variant() == Variant::F && self.forced(x, ba) {
                continue;
            }
            let mut atoms = base.atoms().clone();
            atoms.concepts.retain(|(b, v)| {
                if v != x {
                    return true;
                }
                let bb = self.concept_basic(b);
                !(kb.entails(ba, bb) && kb.entails(bb, ba))
            });
            let query = Cq::from_atoms(x.clone(), atoms);
            if out.iter().any(|c| c.query == query) {
                continue;
            }
            out.push(GenCandidate {
                down: identity(&query),
                query,
                provenance: Provenance::DropAtom {
                    concept: a.clone(),
                    var: x.clone(),
                },
            });
        }
        out
    }

    /// `q_x` without the child `y` and its subtree.
    pub fn without_child(&self, x: &Symbol, y: &Symbol) -> GenCandidate {
        let qx = self.subquery(x);
        let keep: BTreeSet<Symbol> = qx
            .vars()
            .difference(&subtree(&self.q, y))
            .cloned()
            .collect();
        let query = qx.restrict(&keep);
        GenCandidate {
            down: identity(&query),
            query,
            provenance: Provenance::DropAtom {
                concept: Symbol::new("top"),
                var: x.clone(),
            },
        }
    }

    /// A copy of `c` with fresh variables; returns the copy and the new
    /// name of its answer variable.
    pub fn copy(&mut self, c: &GenCandidate) -> (Cq, BTreeMap<Symbol, Symbol>, Symbol) {
        let mut rename = BTreeMap::new();
        let mut down = BTreeMap::new();
        for v in c.query.vars() {
            let d = c.down.get(&v).cloned().unwrap_or_else(|| v.clone());
            let n = self.fresh(d.as_str());
            down.insert(n.clone(), d);
            rename.insert(v, n);
        }
        let root = rename[c.query.answer()].clone();
        (c.query.rename(&rename), down, root)
    }

    /// A copy of the whole query with variable `at` identified with `to`.
    pub fn glue_query(&mut self, p: &mut GenCandidate, at: &Symbol, to: &Symbol) {
        let mut rename = BTreeMap::new();
        for v in self.q.vars() {
            let n = if v == *at {
                to.clone()
            } else {
                self.fresh(v.as_str())
            };
            p.down.insert(n.clone(), v.clone());
            rename.insert(v, n);
        }
        let copy = self.q.rename(&rename);
        merge(&mut p.query, &copy);
    }

    pub fn memo_get(&self, x: &Symbol) -> Option<&Vec<GenCandidate>> {
        self.memo.get(x)
    }

    pub fn memo_put(&mut self, x: &Symbol, v: Vec<GenCandidate>) {
        self.memo.insert(x.clone(), v);
    }

    /// Names `B` with `O |= some S sub B`.
    pub fn implied_by_exists(&self, s: RoleId) -> Vec<Symbol> {
        let kb = self.kb;
        kb.concepts_in(kb.closure_of(kb.exists(s)))
            .map(|c| kb.concept_name(c).clone())
            .collect()
    }
}

pub(crate) fn identity(q: &Cq) -> BTreeMap<Symbol, Symbol> {
    q.vars().into_iter().map(|v| (v.clone(), v)).collect()
}

/// Adds all atoms of `src` to `dst`.
pub(crate) fn merge(dst: &mut Cq, src: &Cq) {
    let mut atoms: Atoms = dst.atoms().clone();
    atoms.concepts.extend(src.atoms().concepts.iter().cloned());
    atoms.roles.extend(src.atoms().roles.iter().cloned());
    atoms.tops.extend(src.vars());
    *dst = Cq::from_atoms(dst.answer().clone(), atoms);
}

/// Role atoms of an ELIQ directed away from the answer variable, as
/// (from, role, to).
pub(crate) fn away_atoms(q: &Cq) -> Vec<(Symbol, Role, Symbol)> {
    let mut out = Vec::new();
    for (x, cs) in q.tree_children() {
        for (r, y) in cs {
            out.push((x.clone(), r, y));
        }
    }
    out
}

/// Signature of everything a frontier computation may mention.
pub fn working_signature(o: &Ontology, q: &Cq) -> Signature {
    o.signature().union(&q.signature())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_cq, parse_ontology};

    fn o(t: &str) -> Ontology {
        parse_ontology(t).unwrap()
    }

    fn q(t: &str) -> Cq {
        parse_cq(t).unwrap()
    }

    #[test]
    fn empty_ontology_single_atom() {
        let f = frontier(&Ontology::default(), &q("eliq: A")).unwrap();
        assert_eq!(f.members.len(), 1);
        assert_eq!(f.members[0].var_count(), 1);
        assert_eq!(f.members[0].atoms().atom_count(), 0);
    }

    #[test]
    fn top_query_has_empty_frontier() {
        let f = frontier(&Ontology::default(), &Cq::top("x")).unwrap();
        assert!(f.members.is_empty());
    }

    #[test]
    fn rejects_unrestricted_functionality() {
        let unrestricted = o("A sub some r\nsome r- sub some r\nsome r sub some s\nfunc r-");
        let err = frontier(&unrestricted, &q("eliq: A")).unwrap_err();
        assert_eq!(err.reason(), "not_f_restricted");
        let rf = o("r rsub s\nfunc r");
        assert_eq!(
            frontier(&rf, &q("eliq: A")).unwrap_err().reason(),
            "unsupported_dialect"
        );
    }

    #[test]
    fn rejects_cyclic_input() {
        let err = frontier(&Ontology::default(), &q("q(x) :- r(x,x)")).unwrap_err();
        assert_eq!(err.reason(), "not_an_eliq");
    }

    #[test]
    fn pruning_keeps_one_per_class() {
        let cycle = o("A sub some r\nsome r sub A\nr rsub s");
        let opts = Options {
            dialect: DialectChoice::Auto,
            prune: true,
        };
        let f = frontier_with(&cycle, &q("eliq: A & B"), opts).unwrap();
        assert_eq!(f.members.len(), 2);
    }
}
