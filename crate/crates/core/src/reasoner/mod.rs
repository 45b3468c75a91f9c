//! Reasoning services over a fixed ontology.
//!
//! [`Reasoner`] caches the interned ontology; the free functions build a
//! fresh one per call and are meant for one-off use.

pub mod hom;
pub mod kb;
pub mod model;

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::syntax::{ABox, BasicConcept, Cq, Ontology, Role, Signature, Symbol};

pub use hom::QueryGraph;
pub use kb::{Kb, Variant};
pub use model::{Model, NodeId, Prefix, PrefixEdge, PrefixNode};

/// Reasoning over a fixed ontology.
#[derive(Clone)]
pub struct Reasoner {
    ontology: Ontology,
    kb: Arc<Kb>,
}

impl Reasoner {
    pub fn new(o: &Ontology) -> Result<Reasoner> {
        Reasoner::with_signature(o, &Signature::default())
    }

    /// A reasoner whose interned signature also covers `extra`, so that
    /// inputs over it need no rebuild.
    pub fn with_signature(o: &Ontology, extra: &Signature) -> Result<Reasoner> {
        Ok(Reasoner {
            ontology: o.clone(),
            kb: Arc::new(Kb::new(o, extra)?),
        })
    }

    pub fn ontology(&self) -> &Ontology {
        &self.ontology
    }

    pub fn kb(&self) -> &Kb {
        &self.kb
    }

    fn kb_for(&self, sig: &Signature) -> Arc<Kb> {
        if self.kb.covers(sig) {
            self.kb.clone()
        } else {
            let extra = self.kb.signature().union(sig);
            Arc::new(Kb::new(&self.ontology, &extra).expect("dialect already accepted"))
        }
    }

    /// Extends the interned signature in place when needed.
    pub fn extend(&mut self, sig: &Signature) {
        if !self.kb.covers(sig) {
            self.kb = self.kb_for(sig);
        }
    }

    pub fn entails_basic(&self, b1: &BasicConcept, b2: &BasicConcept) -> bool {
        let mut sig = Signature::default();
        for b in [b1, b2] {
            b.to_eli().collect_signature(&mut sig);
        }
        let kb = self.kb_for(&sig);
        let (x, y) = (kb.basic_id(b1).unwrap(), kb.basic_id(b2).unwrap());
        kb.entails(x, y)
    }

    pub fn entails_role(&self, r1: &Role, r2: &Role) -> bool {
        let sig = Signature {
            concepts: BTreeSet::new(),
            roles: [r1.name.clone(), r2.name.clone()].into_iter().collect(),
        };
        let kb = self.kb_for(&sig);
        kb.entails_role(kb.role_id(r1).unwrap(), kb.role_id(r2).unwrap())
    }

    pub fn abox_satisfiable(&self, a: &ABox) -> bool {
        let kb = self.kb_for(&a.signature());
        Model::new(&kb, a, &[]).consistent()
    }

    /// Variables forced equal by functionality are identified first;
    /// only ABox individuals are subject to unique names.
    pub fn cq_satisfiable(&self, q: &Cq) -> bool {
        self.abox_satisfiable(&self.quotient(q).to_abox())
    }

    fn quotient(&self, q: &Cq) -> Cq {
        q.identify_functional(&self.ontology.functional)
    }

    /// Adds every entailed concept atom over a name of the signature.
    pub fn saturate(&self, q: &Cq) -> Result<Cq> {
        let kb = self.kb_for(&q.signature());
        let (merged, rep) = q.functional_quotient(&self.ontology.functional);
        let mut model = Model::new(&kb, &merged.to_abox(), &[q.answer().clone()]);
        if !model.consistent() {
            return Err(Error::Unsatisfiable(q.to_string()));
        }
        let mut out = q.clone();
        for v in q.vars() {
            let n = model.individual(&rep[&v]).unwrap();
            for c in kb.visible_concepts(model.basics(n)) {
                out.add_concept(kb.concept_name(c).clone(), v.clone());
            }
        }
        Ok(out)
    }

    pub fn universal_prefix(&self, a: &ABox, depth: usize) -> Result<Prefix> {
        let kb = self.kb_for(&a.signature());
        let mut model = Model::new(&kb, a, &[]);
        if !model.consistent() {
            return Err(Error::Unsatisfiable(a.to_string()));
        }
        Ok(model.prefix(depth))
    }

    /// `a, O |= q(ind)`; vacuously true on unsatisfiable ABoxes.
    pub fn certain_answer(&self, a: &ABox, q: &Cq, ind: &Symbol) -> bool {
        let kb = self.kb_for(&a.signature().union(&q.signature()));
        let mut model = Model::new(&kb, a, std::slice::from_ref(ind));
        if !model.consistent() {
            return true;
        }
        let anchor = model.individual(ind).unwrap();
        hom::maps_to(&mut model, &QueryGraph::new(&kb, q), anchor)
    }

    /// `q1 ⊆_O q2`.
    pub fn contained(&self, q1: &Cq, q2: &Cq) -> Result<bool> {
        let kb = self.kb_for(&q1.signature().union(&q2.signature()));
        let mut m1 = Model::new(&kb, &self.quotient(q1).to_abox(), &[q1.answer().clone()]);
        if !m1.consistent() {
            return Err(Error::Unsatisfiable(q1.to_string()));
        }
        if !Model::new(&kb, &self.quotient(q2).to_abox(), &[q2.answer().clone()]).consistent() {
            return Err(Error::Unsatisfiable(q2.to_string()));
        }
        let anchor = m1.individual(q1.answer()).unwrap();
        Ok(hom::maps_to(&mut m1, &QueryGraph::new(&kb, q2), anchor))
    }

    /// Containment without the satisfiability checks; an unsatisfiable
    /// `q1` is contained in everything.
    pub fn contained_unchecked(&self, q1: &Cq, q2: &Cq) -> bool {
        self.certain_answer(&self.quotient(q1).to_abox(), q2, q1.answer())
    }

    pub fn equivalent(&self, q1: &Cq, q2: &Cq) -> Result<bool> {
        Ok(self.contained(q1, q2)? && self.contained(q2, q1)?)
    }

    /// An O-minimal, O-saturated ELIQ equivalent to `q`.
    pub fn minimize_eliq(&self, q: &Cq) -> Result<Cq> {
        if !q.is_eliq() {
            return Err(Error::NotAnEliq(q.to_string()));
        }
        let mut cur = self.saturate(q)?;
        'outer: loop {
            for x in subtrees_deepest_first(&cur) {
                let keep: BTreeSet<Symbol> =
                    cur.vars().difference(&subtree(&cur, &x)).cloned().collect();
                let sub = cur.restrict(&keep);
                if self.contained_unchecked(&sub, &cur) {
                    cur = self.saturate(&sub)?;
                    continue 'outer;
                }
            }
            return Ok(cur);
        }
    }
}

/// Non-answer variables of an ELIQ, deepest first.
fn subtrees_deepest_first(q: &Cq) -> Vec<Symbol> {
    let children = q.tree_children();
    let mut out = Vec::new();
    let mut level = vec![q.answer().clone()];
    while !level.is_empty() {
        let mut next = Vec::new();
        for v in &level {
            for (_, c) in children.get(v).into_iter().flatten() {
                next.push(c.clone());
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out.reverse();
    out
}

/// `x` and its descendants in the tree rooted at the answer variable.
pub fn subtree(q: &Cq, x: &Symbol) -> BTreeSet<Symbol> {
    let children = q.tree_children();
    let mut out = BTreeSet::new();
    let mut stack = vec![x.clone()];
    while let Some(v) = stack.pop() {
        if out.insert(v.clone()) {
            for (_, c) in children.get(&v).into_iter().flatten() {
                stack.push(c.clone());
            }
        }
    }
    out
}

pub fn entails_basic(o: &Ontology, b1: &BasicConcept, b2: &BasicConcept) -> Result<bool> {
    Ok(Reasoner::new(o)?.entails_basic(b1, b2))
}

pub fn entails_role(o: &Ontology, r1: &Role, r2: &Role) -> Result<bool> {
    Ok(Reasoner::new(o)?.entails_role(r1, r2))
}

pub fn abox_satisfiable(o: &Ontology, a: &ABox) -> Result<bool> {
    Ok(Reasoner::new(o)?.abox_satisfiable(a))
}

pub fn saturate(o: &Ontology, q: &Cq) -> Result<Cq> {
    Reasoner::new(o)?.saturate(q)
}

pub fn universal_prefix(o: &Ontology, a: &ABox, depth: usize) -> Result<Prefix> {
    Reasoner::new(o)?.universal_prefix(a, depth)
}

pub fn certain_answer(o: &Ontology, a: &ABox, q: &Cq, ind: &Symbol) -> Result<bool> {
    Ok(Reasoner::new(o)?.certain_answer(a, q, ind))
}

pub fn contained(o: &Ontology, q1: &Cq, q2: &Cq) -> Result<bool> {
    Reasoner::new(o)?.contained(q1, q2)
}

pub fn equivalent(o: &Ontology, q1: &Cq, q2: &Cq) -> Result<bool> {
    Reasoner::new(o)?.equivalent(q1, q2)
}

pub fn minimize_eliq(o: &Ontology, q: &Cq) -> Result<Cq> {
    Reasoner::new(o)?.minimize_eliq(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_abox, parse_cq, parse_ontology};

    fn o(t: &str) -> Ontology {
        parse_ontology(t).unwrap()
    }

    fn q(t: &str) -> Cq {
        parse_cq(t).unwrap()
    }

    const CYCLE: &str = "A sub some r\nsome r sub A\nr rsub s";

    #[test]
    fn cyclic_existential_entailments() {
        let r = Reasoner::new(&o(CYCLE)).unwrap();
        assert!(r.entails_basic(
            &BasicConcept::Exists(Role::new("r")),
            &BasicConcept::Atomic("A".into())
        ));
        assert!(r.entails_basic(&BasicConcept::Atomic("B".into()), &BasicConcept::Top));
        assert!(r.entails_role(&Role::inv("r"), &Role::inv("s")));
        assert!(!r.entails_role(&Role::new("s"), &Role::new("r")));
    }

    #[test]
    fn saturation_adds_entailed_names() {
        let r = Reasoner::new(&o(CYCLE)).unwrap();
        let s = r.saturate(&q("q(x0) :- B(x0), r(x0,y)")).unwrap();
        assert!(s.labels_of(&"x0".into()).contains(&Symbol::new("A")));
        assert_eq!(r.saturate(&s).unwrap(), s);
    }

    #[test]
    fn unsatisfiable_aboxes() {
        let r = Reasoner::new(&o("disj A B")).unwrap();
        assert!(!r.abox_satisfiable(&parse_abox("A(a)\nB(a)").unwrap()));
        assert!(r.certain_answer(
            &parse_abox("A(a)\nB(a)").unwrap(),
            &q("q(x) :- C(x)"),
            &"a".into()
        ));
        let f = Reasoner::new(&o("func r")).unwrap();
        assert!(!f.abox_satisfiable(&parse_abox("r(a,b)\nr(a,c)").unwrap()));
        assert!(f.abox_satisfiable(&parse_abox("r(a,b)\nr(c,b)").unwrap()));
    }

    #[test]
    fn unrestricted_prefix_is_an_r_chain_with_s_successors() {
        let r = Reasoner::new(&o(
            "A sub some r\nsome r- sub some r\nsome r sub some s\nfunc r-",
        ))
        .unwrap();
        let p = r.universal_prefix(&parse_abox("A(a)").unwrap(), 3).unwrap();
        let r_edges = p.edges.iter().filter(|e| e.role == "r").count();
        let s_edges = p.edges.iter().filter(|e| e.role == "s").count();
        assert_eq!(r_edges, 3);
        assert_eq!(s_edges, 3);
    }

    #[test]
    fn cyclic_prefix_has_r_and_s_edge() {
        let r = Reasoner::new(&o(CYCLE)).unwrap();
        let p = r
            .universal_prefix(&parse_abox("A(a)\nB(a)").unwrap(), 2)
            .unwrap();
        assert!(p.edges.iter().any(|e| e.from == "a" && e.role == "r"));
        assert!(p.edges.iter().any(|e| e.from == "a" && e.role == "s"));
    }

    #[test]
    fn empty_ontology_prefix_is_the_abox() {
        let r = Reasoner::new(&Ontology::default()).unwrap();
        let p = r
            .universal_prefix(&parse_abox("A(a)\nr(a,b)").unwrap(), 5)
            .unwrap();
        assert_eq!(p.anonymous_count(), 0);
        assert_eq!(p.edges.len(), 1);
    }

    #[test]
    fn role_inclusion_containment() {
        let r = Reasoner::new(&o("r rsub s")).unwrap();
        let a = q("eliq: some r . A");
        let p = q("eliq: some s . A & some r");
        assert!(r.contained(&a, &p).unwrap());
        assert!(!r.contained(&p, &a).unwrap());
    }

    #[test]
    fn minimization_drops_entailed_children() {
        let r = Reasoner::new(&o(CYCLE)).unwrap();
        let m = r.minimize_eliq(&q("eliq: A & B & some r")).unwrap();
        assert_eq!(m.var_count(), 1);
        assert!(r.equivalent(&m, &q("eliq: A & B")).unwrap());
    }

    #[test]
    fn cyclic_queries_map_into_the_abox_only() {
        let r = Reasoner::new(&o("A sub some r . A")).unwrap();
        let a = parse_abox("A(a)").unwrap();
        assert!(r.certain_answer(&a, &q("eliq: some r . some r . A"), &"a".into()));
        assert!(!r.certain_answer(&a, &q("q(x) :- r(x,x)"), &"a".into()));
        let loopy = parse_abox("r(a,a)").unwrap();
        assert!(r.certain_answer(&loopy, &q("q(x) :- r(x,y), r(y,z), r(z,x)"), &"a".into()));
    }

    #[test]
    fn disconnected_components_may_map_anywhere() {
        let r = Reasoner::new(&o("A sub some r . B")).unwrap();
        let a = parse_abox("A(a)\nC(c)").unwrap();
        assert!(r.certain_answer(&a, &q("q(x) :- C(x), B(y)"), &"c".into()));
        assert!(!r.certain_answer(&a, &q("q(x) :- C(x), D(y)"), &"c".into()));
    }

    #[test]
    fn functional_successor_absorbs_fillers() {
        let r = Reasoner::new(&o("A sub some r . B\nfunc r")).unwrap();
        let a = parse_abox("A(a)\nr(a,b)").unwrap();
        assert!(r.certain_answer(&a, &q("q(x) :- B(x)"), &"b".into()));
        let nf = Reasoner::new(&o("A sub some r . B")).unwrap();
        assert!(!nf.certain_answer(&a, &q("q(x) :- B(x)"), &"b".into()));
    }

    #[test]
    fn query_variables_merge_under_functionality() {
        let r = Reasoner::new(&o("func r\ndisj A C")).unwrap();
        let split = q("q(x) :- r(x,y1), A(y1), r(x,y2), B(y2)");
        assert!(r.cq_satisfiable(&split));
        assert!(r.equivalent(&split, &q("eliq: some r . (A & B)")).unwrap());
        let sat = r.saturate(&split).unwrap();
        assert!(sat
            .concept_atoms()
            .any(|(c, v)| c.as_str() == "B" && v.as_str() == "y1"));
        assert!(!r.cq_satisfiable(&q("q(x) :- r(x,y1), A(y1), r(x,y2), C(y2)")));
    }
}
