//! Exhaustive enumeration of ELIQs, up to isomorphism.
//!
//! Queries are generated as canonical trees: a sorted label set plus a
//! sorted multiset of (role, subtree) children.

use std::collections::{BTreeSet, HashMap};

use crate::reasoner::model::{Model, NodeId};
use crate::syntax::{Atoms, Cq, Role, Signature, Symbol};

/// A canonical tree-shaped query.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    pub labels: Vec<Symbol>,
    pub children: Vec<(Role, Tree)>,
}

impl Tree {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|(_, t)| t.size()).sum::<usize>()
    }

    /// The ELIQ with answer variable `x0` and further variables `x1, x2, ...`
    /// in depth-first order.
    pub fn to_cq(&self) -> Cq {
        let mut atoms = Atoms::default();
        let mut counter = 0;
        self.emit(&mut atoms, &mut counter);
        Cq::from_atoms("x0".into(), atoms)
    }

    fn emit(&self, atoms: &mut Atoms, counter: &mut usize) -> Symbol {
        let me = Symbol::from(format!("x{counter}"));
        *counter += 1;
        atoms.tops.insert(me.clone());
        for a in &self.labels {
            atoms.concepts.insert((a.clone(), me.clone()));
        }
        for (r, t) in &self.children {
            let c = t.emit(atoms, counter);
            atoms.add_role(r, me.clone(), c);
        }
        me
    }
}

fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for it in items {
        let n = out.len();
        for i in 0..n {
            let mut s = out[i].clone();
            s.push(it.clone());
            out.push(s);
        }
    }
    out
}

/// Sorted selections of items (by index, non-decreasing when `repeat`)
/// whose sizes add up to at most `budget`.
fn selections(
    items: &[(Role, Tree)],
    sizes: &[usize],
    budget: usize,
    repeat: bool,
) -> Vec<Vec<(Role, Tree)>> {
    fn go(
        items: &[(Role, Tree)],
        sizes: &[usize],
        start: usize,
        budget: usize,
        repeat: bool,
        cur: &mut Vec<(Role, Tree)>,
        out: &mut Vec<Vec<(Role, Tree)>>,
    ) {
        out.push(cur.clone());
        for i in start..items.len() {
            if sizes[i] <= budget {
                cur.push(items[i].clone());
                let next = if repeat { i } else { i + 1 };
                go(items, sizes, next, budget - sizes[i], repeat, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(items, sizes, 0, budget, repeat, &mut Vec::new(), &mut out);
    out
}

fn all_roles(sig: &Signature) -> Vec<Role> {
    sig.roles
        .iter()
        .flat_map(|r| [Role::new(r.clone()), Role::inv(r.clone())])
        .collect()
}

/// Every ELIQ over `sig` with at most `max_vars` variables, each
/// isomorphism class exactly once, smaller queries first.
pub fn enumerate_trees(sig: &Signature, max_vars: usize) -> Vec<Tree> {
    let names: Vec<Symbol> = sig.concepts.iter().cloned().collect();
    let label_sets = subsets(&names);
    let roles = all_roles(sig);
    // by_size[k] holds the trees with exactly k + 1 variables
    let mut by_size: Vec<Vec<Tree>> = Vec::new();
    for n in 1..=max_vars {
        let mut items: Vec<(Role, Tree)> = Vec::new();
        for trees in by_size.iter().take(n - 1) {
            for t in trees {
                for r in &roles {
                    items.push((r.clone(), t.clone()));
                }
            }
        }
        items.sort();
        let sizes: Vec<usize> = items.iter().map(|(_, t)| t.size()).collect();
        let mut level = Vec::new();
        for sel in selections(&items, &sizes, n - 1, true) {
            let used: usize = sel.iter().map(|(_, t)| t.size()).sum();
            if used != n - 1 {
                continue;
            }
            for labels in &label_sets {
                level.push(Tree {
                    labels: labels.clone(),
                    children: sel.clone(),
                });
            }
        }
        level.sort();
        by_size.push(level);
    }
    by_size.into_iter().flatten().collect()
}

/// As [`enumerate_trees`], as queries.
pub fn enumerate_eliqs(sig: &Signature, max_vars: usize) -> Vec<Cq> {
    enumerate_trees(sig, max_vars)
        .iter()
        .map(Tree::to_cq)
        .collect()
}

/// Every ELIQ with at most `max_vars` variables, over concept names in
/// `sig`, that maps into `model` with its root on `anchor`. Identical
/// sibling subtrees are not repeated: such a query is equivalent to the
/// one with the copy removed, which is produced instead.
pub fn eliqs_into(
    model: &mut Model,
    anchor: NodeId,
    sig: &Signature,
    max_vars: usize,
) -> Vec<Tree> {
    let mut memo = HashMap::new();
    let mut out: Vec<Tree> = trees_at(model, anchor, sig, max_vars, &mut memo)
        .into_iter()
        .collect();
    out.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    out
}

fn trees_at(
    model: &mut Model,
    n: NodeId,
    sig: &Signature,
    k: usize,
    memo: &mut HashMap<(NodeId, usize), BTreeSet<Tree>>,
) -> BTreeSet<Tree> {
    if let Some(t) = memo.get(&(n, k)) {
        return t.clone();
    }
    let kb = model.kb();
    let names: Vec<Symbol> = kb
        .concepts_in(model.basics(n))
        .map(|c| kb.concept_name(c).clone())
        .filter(|c| sig.concepts.contains(c))
        .collect();
    let mut items: BTreeSet<(Role, Tree)> = BTreeSet::new();
    if k > 1 {
        for p in 0..kb.role_count() {
            let role = kb.role(p);
            if !sig.roles.contains(&role.name) {
                continue;
            }
            for m in model.neighbours(n, p) {
                for t in trees_at(model, m, sig, k - 1, memo) {
                    items.insert((role.clone(), t));
                }
            }
        }
    }
    let items: Vec<(Role, Tree)> = items.into_iter().collect();
    let sizes: Vec<usize> = items.iter().map(|(_, t)| t.size()).collect();
    let mut out = BTreeSet::new();
    let sels = selections(&items, &sizes, k - 1, false);
    for labels in subsets(&names) {
        for sel in &sels {
            out.insert(Tree {
                labels: labels.clone(),
                children: sel.clone(),
            });
        }
    }
    memo.insert((n, k), out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(concepts: &[&str], roles: &[&str], max: usize) -> usize {
        enumerate_eliqs(
            &Signature::new(concepts.iter().copied(), roles.iter().copied()),
            max,
        )
        .len()
    }

    #[test]
    fn single_variable_counts() {
        assert_eq!(count(&["A"], &[], 1), 2);
        assert_eq!(count(&["A", "B", "C"], &["r"], 1), 8);
    }

    #[test]
    fn two_variable_count_matches_hand_count() {
        // 2 one-variable queries plus 2 root labels * 2 directions * 2 leaves
        assert_eq!(count(&["A"], &["r"], 2), 10);
    }

    #[test]
    fn every_output_is_an_eliq() {
        for q in enumerate_eliqs(&Signature::new(["A"], ["r", "s"]), 3) {
            assert!(q.is_eliq(), "{q}");
        }
    }
}
