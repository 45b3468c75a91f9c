//! Unique characterization of an ELIQ by data examples.
//!
//! The positive example is the query itself read as an ABox; there is
//! one negative example per frontier member.

use std::collections::HashMap;

use serde::Serialize;

use crate::enumerate::{eliqs_into, enumerate_trees};
use crate::error::{Error, Result};
use crate::frontier::{frontier_with, Options};
use crate::reasoner::hom::{maps_to, QueryGraph};
use crate::reasoner::model::Model;
use crate::reasoner::Reasoner;
use crate::syntax::{ABox, Cq, Ontology, Symbol};
use crate::testkit::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataExample {
    pub abox: ABox,
    pub individual: Symbol,
    pub polarity: Polarity,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExampleSet {
    pub positives: Vec<DataExample>,
    pub negatives: Vec<DataExample>,
}

impl ExampleSet {
    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Total number of assertions.
    pub fn size(&self) -> usize {
        self.positives
            .iter()
            .chain(&self.negatives)
            .map(|e| e.abox.len())
            .sum()
    }
}

fn example(q: &Cq, polarity: Polarity) -> DataExample {
    DataExample {
        abox: q.to_abox(),
        individual: q.answer().clone(),
        polarity,
    }
}

/// Examples that `q` fits and that no inequivalent ELIQ fits.
pub fn characterize(o: &Ontology, q: &Cq) -> Result<ExampleSet> {
    let r = Reasoner::with_signature(o, &q.signature())?;
    // as an ABox, the query must not violate functionality
    let q = &q.identify_functional(&o.functional);
    if !r.cq_satisfiable(q) {
        return Err(Error::Unsatisfiable(q.to_string()));
    }
    let f = frontier_with(
        o,
        q,
        Options {
            prune: true,
            ..Options::default()
        },
    )?;
    Ok(ExampleSet {
        positives: vec![example(q, Polarity::Positive)],
        negatives: f
            .members
            .iter()
            .map(|m| example(m, Polarity::Negative))
            .collect(),
    })
}

fn fits_with(r: &Reasoner, q: &Cq, e: &ExampleSet) -> bool {
    e.positives
        .iter()
        .all(|x| r.certain_answer(&x.abox, q, &x.individual))
        && !e
            .negatives
            .iter()
            .any(|x| r.certain_answer(&x.abox, q, &x.individual))
}

/// Positives entail `q` at their individual, negatives do not.
pub fn fits(o: &Ontology, q: &Cq, e: &ExampleSet) -> Result<bool> {
    Ok(fits_with(
        &Reasoner::with_signature(o, &q.signature())?,
        q,
        e,
    ))
}

/// Looks for an ELIQ over `sig(o) ∪ sig(q)` with at most `bound`
/// variables that fits `e` but is not equivalent to `q`.
pub fn verify_unique(o: &Ontology, q: &Cq, e: &ExampleSet, bound: usize) -> Result<Verdict> {
    let sig = o.signature().union(&q.signature());
    let r = Reasoner::with_signature(o, &sig)?;
    let kb = r.kb();
    // a fitting query maps into the universal model of the first positive
    let trees = match e.positives.first() {
        Some(p) => {
            let mut model = Model::new(kb, &p.abox, std::slice::from_ref(&p.individual));
            if !model.consistent() {
                enumerate_trees(&sig, bound)
            } else {
                let anchor = model.individual(&p.individual).unwrap();
                eliqs_into(&mut model, anchor, &sig, bound)
            }
        }
        None => enumerate_trees(&sig, bound),
    };
    let mut models: HashMap<usize, (Model, usize)> = HashMap::new();
    let examples: Vec<&DataExample> = e.positives.iter().chain(&e.negatives).collect();
    let query_graph = QueryGraph::new(kb, q);
    for tree in trees {
        let cand = tree.to_cq();
        let qg = QueryGraph::new(kb, &cand);
        let mut fit = true;
        for (i, ex) in examples.iter().enumerate() {
            let (m, a) = models.entry(i).or_insert_with(|| {
                let m = Model::new(kb, &ex.abox, std::slice::from_ref(&ex.individual));
                let a = m.individual(&ex.individual).unwrap();
                (m, a)
            });
            let holds = !m.consistent() || maps_to(m, &qg, *a);
            if holds != (ex.polarity == Polarity::Positive) {
                fit = false;
                break;
            }
        }
        if !fit {
            continue;
        }
        let merged = cand.identify_functional(&o.functional);
        let mut uc = Model::new(kb, &merged.to_abox(), &[cand.answer().clone()]);
        if !uc.consistent() {
            return Ok(Verdict::Counterexample(cand));
        }
        let a = uc.individual(cand.answer()).unwrap();
        if !maps_to(&mut uc, &query_graph, a) || !r.contained(q, &cand)? {
            return Ok(Verdict::Counterexample(cand));
        }
    }
    Ok(Verdict::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_cq, parse_ontology};

    fn cycle() -> (Ontology, Cq) {
        (
            parse_ontology("A sub some r\nsome r sub A\nr rsub s").unwrap(),
            parse_cq("eliq: A & B").unwrap(),
        )
    }

    #[test]
    fn conjunction_under_cycle_is_characterized() {
        let (o, q) = cycle();
        let e = characterize(&o, &q).unwrap();
        assert_eq!(e.positives.len(), 1);
        assert_eq!(e.negatives.len(), 2);
        assert!(fits(&o, &q, &e).unwrap());
        assert!(!fits(&o, &parse_cq("eliq: A").unwrap(), &e).unwrap());
        assert_eq!(verify_unique(&o, &q, &e, 4).unwrap(), Verdict::Ok);
    }

    #[test]
    fn negatives_are_necessary() {
        let (o, q) = cycle();
        let mut e = characterize(&o, &q).unwrap();
        e.negatives.clear();
        assert!(matches!(
            verify_unique(&o, &q, &e, 2).unwrap(),
            Verdict::Counterexample(_)
        ));
    }

    #[test]
    fn empty_ontology_single_concept() {
        let o = Ontology::default();
        let q = parse_cq("eliq: A").unwrap();
        let e = characterize(&o, &q).unwrap();
        assert_eq!(e.negatives.len(), 1);
        assert_eq!(e.negatives[0].abox.to_string().trim(), "top(x0)");
        let q = parse_cq("eliq: some r . A").unwrap();
        let e = characterize(&o, &q).unwrap();
        assert_eq!(verify_unique(&o, &q, &e, 3).unwrap(), Verdict::Ok);
    }
}
