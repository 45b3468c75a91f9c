//! Normal-form conversion.
//!
//! A CI is in normal form if it reads `A sub B`, `B sub A` or
//! `A sub some R . A'` with `A`, `A'` concept names or `top` and `B` basic.
//! Every other CI `B sub C` is replaced by `B sub X_C` together with
//! defining inclusions for the complex subconcepts of `C`:
//! `X_(D1 & D2) sub X_Di` and `X_(some R . D) sub some R . X_D`.

use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{Atoms, BasicConcept, Eli, Ontology, Role, Symbol};

/// Fresh concept name to the concept it abbreviates.
pub type FreshMap = BTreeMap<Symbol, Eli>;

fn is_name_or_top(b: &BasicConcept) -> bool {
    matches!(b, BasicConcept::Top | BasicConcept::Atomic(_))
}

fn as_basic(c: &Eli) -> Option<BasicConcept> {
    match c {
        Eli::Top => Some(BasicConcept::Top),
        Eli::Atom(a) => Some(BasicConcept::Atomic(a.clone())),
        Eli::Exists(r, d) if **d == Eli::Top => Some(BasicConcept::Exists(r.clone())),
        _ => None,
    }
}

/// Whether a single CI already has one of the normal shapes.
pub fn is_normal_ci(lhs: &BasicConcept, rhs: &Eli) -> bool {
    if let Some(b) = as_basic(rhs) {
        return is_name_or_top(lhs) || is_name_or_top(&b);
    }
    match rhs {
        Eli::Exists(_, d) => is_name_or_top(lhs) && matches!(**d, Eli::Atom(_)),
        _ => false,
    }
}

pub fn is_normal_form(o: &Ontology) -> bool {
    o.concept_inclusions.iter().all(|(b, c)| is_normal_ci(b, c))
}

struct Namer {
    taken: BTreeSet<Symbol>,
    counter: usize,
    by_concept: BTreeMap<Eli, Symbol>,
    map: FreshMap,
    out: Vec<(BasicConcept, Eli)>,
}

impl Namer {
    fn fresh(&mut self) -> Symbol {
        loop {
            self.counter += 1;
            let s = Symbol::from(format!("_X{}", self.counter));
            if !self.taken.contains(&s) {
                self.taken.insert(s.clone());
                return s;
            }
        }
    }

    /// The concept standing for `c` in normalized CIs: `A` for names,
    /// `top` for `top`, otherwise a fresh name with its definition emitted.
    fn name_of(&mut self, c: &Eli) -> Eli {
        match c {
            Eli::Top => Eli::Top,
            Eli::Atom(_) => c.clone(),
            _ => {
                if let Some(x) = self.by_concept.get(c) {
                    return Eli::Atom(x.clone());
                }
                let x = self.fresh();
                self.by_concept.insert(c.clone(), x.clone());
                self.map.insert(x.clone(), c.clone());
                let lhs = BasicConcept::Atomic(x.clone());
                match c {
                    Eli::And(d1, d2) => {
                        for d in [d1, d2] {
                            let xd = self.name_of(d);
                            if xd != Eli::Top {
                                self.out.push((lhs.clone(), xd));
                            }
                        }
                    }
                    Eli::Exists(r, d) => {
                        let xd = self.name_of(d);
                        self.out.push((lhs, Eli::some(r.clone(), xd)));
                    }
                    _ => unreachable!(),
                }
                Eli::Atom(x)
            }
        }
    }
}

/// Converts `o` into normal form. CIs that are already normal are kept
/// verbatim; fresh names `_X<n>` avoid every name of `o`.
pub fn normalize(o: &Ontology) -> (Ontology, FreshMap) {
    let sig = o.signature();
    let mut namer = Namer {
        taken: sig.concepts.union(&sig.roles).cloned().collect(),
        counter: 0,
        by_concept: BTreeMap::new(),
        map: FreshMap::new(),
        out: Vec::new(),
    };
    for (b, c) in &o.concept_inclusions {
        if is_normal_ci(b, c) {
            namer.out.push((b.clone(), c.clone()));
        } else {
            let x = namer.name_of(&c.canonical());
            namer.out.push((b.clone(), x));
        }
    }
    let mut seen = BTreeSet::new();
    let cis: Vec<_> = namer
        .out
        .into_iter()
        .filter(|ci| seen.insert(ci.clone()))
        .collect();
    let normalized = Ontology {
        concept_inclusions: cis,
        role_inclusions: o.role_inclusions.clone(),
        concept_disjointness: o.concept_disjointness.clone(),
        role_disjointness: o.role_disjointness.clone(),
        functional: o.functional.clone(),
    };
    (normalized, namer.map)
}

/// Replaces every assertion `X(t)` with `X` a fresh name by the concept it
/// abbreviates, attached at `t`. Existentials over a role in `functional`
/// reuse an existing successor. New terms are named `<t>.e<k>`.
pub fn expand_fresh(atoms: &Atoms, map: &FreshMap, functional: &BTreeSet<Role>) -> Atoms {
    let mut out = Atoms {
        concepts: atoms
            .concepts
            .iter()
            .filter(|(a, _)| !map.contains_key(a))
            .cloned()
            .collect(),
        roles: atoms.roles.clone(),
        tops: atoms.tops.clone(),
    };
    let mut taken = atoms.terms();
    let pending: Vec<(Symbol, Symbol)> = atoms
        .concepts
        .iter()
        .filter(|(a, _)| map.contains_key(a))
        .cloned()
        .collect();
    for (x, t) in pending {
        out.tops.insert(t.clone());
        attach(&mut out, &t, &map[&x], functional, &mut taken);
    }
    let mentioned: BTreeSet<Symbol> = out
        .concepts
        .iter()
        .map(|(_, t)| t.clone())
        .chain(
            out.roles
                .iter()
                .flat_map(|(_, a, b)| [a.clone(), b.clone()]),
        )
        .collect();
    out.tops.retain(|t| !mentioned.contains(t));
    out
}

fn successor(atoms: &Atoms, t: &Symbol, r: &Role) -> Option<Symbol> {
    atoms.roles.iter().find_map(|(name, a, b)| {
        if *name != r.name {
            return None;
        }
        match (r.inverted, a == t, b == t) {
            (false, true, _) => Some(b.clone()),
            (true, _, true) => Some(a.clone()),
            _ => None,
        }
    })
}

fn attach(
    atoms: &mut Atoms,
    t: &Symbol,
    c: &Eli,
    functional: &BTreeSet<Role>,
    taken: &mut BTreeSet<Symbol>,
) {
    match c {
        Eli::Top => {}
        Eli::Atom(a) => {
            atoms.concepts.insert((a.clone(), t.clone()));
        }
        Eli::And(a, b) => {
            attach(atoms, t, a, functional, taken);
            attach(atoms, t, b, functional, taken);
        }
        Eli::Exists(r, d) => {
            let existing = if functional.contains(r) {
                successor(atoms, t, r)
            } else {
                None
            };
            let u = match existing {
                Some(u) => u,
                None => {
                    let mut k = 0;
                    let u = loop {
                        k += 1;
                        let cand = Symbol::from(format!("{t}.e{k}"));
                        if !taken.contains(&cand) {
                            break cand;
                        }
                    };
                    taken.insert(u.clone());
                    atoms.add_role(r, t.clone(), u.clone());
                    u
                }
            };
            attach(atoms, &u, d, functional, taken);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_concept, parse_ontology};

    fn ci(o: &Ontology) -> Vec<String> {
        let mut v: Vec<String> = o
            .concept_inclusions
            .iter()
            .map(|(b, c)| format!("{b} sub {c}"))
            .collect();
        v.sort();
        v
    }

    #[test]
    fn nested_existential_is_split() {
        let o = parse_ontology("A sub some r . (B & some s)").unwrap();
        let (n, map) = normalize(&o);
        assert!(is_normal_form(&n));
        assert_eq!(
            ci(&n),
            vec![
                "A sub _X1",
                "_X1 sub some r . _X2",
                "_X2 sub B",
                "_X2 sub _X3",
                "_X3 sub some s",
            ]
        );
        assert_eq!(map.len(), 3);
        assert_eq!(
            map[&Symbol::new("_X1")].to_string(),
            "some r . (B & some s)"
        );
    }

    #[test]
    fn normal_cis_are_kept() {
        let o = parse_ontology("A sub B").unwrap();
        assert_eq!(normalize(&o).0, o);
        let cycle = parse_ontology("A sub some r\nsome r sub A\nr rsub s").unwrap();
        let (n, map) = normalize(&cycle);
        assert_eq!(n, cycle);
        assert!(map.is_empty());
    }

    #[test]
    fn existential_to_existential_needs_a_fresh_name() {
        let o = parse_ontology("some r sub some s").unwrap();
        assert!(!is_normal_form(&o));
        let (n, _) = normalize(&o);
        assert_eq!(ci(&n), vec!["_X1 sub some s", "some r sub _X1"]);
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let o = parse_ontology("_X1 sub some r . (B & C)").unwrap();
        let (n, map) = normalize(&o);
        assert!(map.contains_key(&Symbol::new("_X2")));
        assert!(!map.contains_key(&Symbol::new("_X1")));
        assert!(is_normal_form(&n));
    }

    #[test]
    fn shared_subconcepts_share_names() {
        let o = parse_ontology("A sub some r . (B & C)\nD sub (C & B)").unwrap();
        let (_, map) = normalize(&o);
        let conj = parse_concept("B & C").unwrap().canonical();
        assert_eq!(map.values().filter(|c| **c == conj).count(), 1);
    }

    #[test]
    fn expansion_reuses_functional_successors() {
        let mut atoms = Atoms::default();
        atoms.add_role(&Role::new("r"), "a".into(), "b".into());
        atoms.concepts.insert(("_X1".into(), "a".into()));
        let mut map = FreshMap::new();
        map.insert("_X1".into(), parse_concept("some r . B").unwrap());
        let plain = expand_fresh(&atoms, &map, &BTreeSet::new());
        assert_eq!(plain.roles.len(), 2);
        let func: BTreeSet<Role> = [Role::new("r")].into_iter().collect();
        let reused = expand_fresh(&atoms, &map, &func);
        assert_eq!(reused.roles.len(), 1);
        assert!(reused.concepts.contains(&("B".into(), "b".into())));
    }
}
