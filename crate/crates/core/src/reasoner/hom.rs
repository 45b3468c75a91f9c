//! Homomorphisms from queries into universal models.
//!
//! Tree-shaped components are decided by memoized dynamic programming
//! over (variable, element) pairs; other components by backtracking in
//! breadth-first order.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::kb::{inv, BasicId, Kb, RoleId};
use super::model::{Model, NodeId};
use crate::syntax::{Cq, Symbol};

/// A query compiled against a knowledge base.
pub struct QueryGraph {
    pub vars: Vec<Symbol>,
    pub answer: usize,
    labels: Vec<Vec<BasicId>>,
    edges: Vec<(usize, RoleId, usize)>,
    adj: Vec<Vec<(RoleId, usize)>>,
    possible: bool,
}

impl QueryGraph {
    pub fn new(kb: &Kb, q: &Cq) -> QueryGraph {
        let vars: Vec<Symbol> = q.vars().into_iter().collect();
        let index: BTreeMap<&Symbol, usize> =
            vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut possible = true;
        let mut labels = vec![Vec::new(); vars.len()];
        for (c, v) in q.concept_atoms() {
            match kb.concept_id(c) {
                Some(id) => labels[index[v]].push(kb.concept_basic(id)),
                None => possible = false,
            }
        }
        let mut edges = Vec::new();
        let mut adj = vec![Vec::new(); vars.len()];
        for (r, a, b) in q.role_atoms() {
            match kb.role_name_id(r) {
                Some(id) => {
                    let (a, b, r) = (index[a], index[b], 2 * id);
                    edges.push((a, r, b));
                    adj[a].push((r, b));
                    adj[b].push((inv(r), a));
                }
                None => possible = false,
            }
        }
        QueryGraph {
            answer: index[q.answer()],
            vars,
            labels,
            edges,
            adj,
            possible,
        }
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.vars.len()];
        let mut out = Vec::new();
        let order = std::iter::once(self.answer).chain(0..self.vars.len());
        for s in order {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                for &(_, w) in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                    }
                }
            }
            out.push(members);
        }
        out
    }
}

/// Whether `q -> (model, anchor)`.
pub fn maps_to(model: &mut Model, q: &QueryGraph, anchor: NodeId) -> bool {
    if !q.possible {
        return false;
    }
    let comps = q.components();
    let mut search = Search {
        q,
        memo: HashMap::new(),
    };
    for (i, comp) in comps.iter().enumerate() {
        let ok = if i == 0 {
            search.component(model, comp, anchor)
        } else {
            let cands = model.representatives();
            cands.into_iter().any(|n| search.component(model, comp, n))
        };
        if !ok {
            return false;
        }
    }
    true
}

struct Search<'q> {
    q: &'q QueryGraph,
    memo: HashMap<(usize, NodeId), bool>,
}

impl Search<'_> {
    fn component(&mut self, model: &mut Model, comp: &[usize], root_node: NodeId) -> bool {
        let root = comp[0];
        let edge_count = self
            .q
            .edges
            .iter()
            .filter(|(a, _, _)| comp.contains(a))
            .count();
        let loops = self
            .q
            .edges
            .iter()
            .any(|(a, _, b)| a == b && comp.contains(a));
        if edge_count + 1 == comp.len() && !loops {
            self.memo.clear();
            self.tree(model, root, usize::MAX, root_node)
        } else {
            let order = bfs_order(self.q, root);
            let mut assign: Vec<Option<NodeId>> = vec![None; self.q.vars.len()];
            self.backtrack(model, &order, 0, root_node, &mut assign)
        }
    }

    fn labels_ok(&self, model: &Model, v: usize, n: NodeId) -> bool {
        let b = model.basics(n);
        self.q.labels[v].iter().all(|&c| b.contains(c))
    }

    fn tree(&mut self, model: &mut Model, v: usize, parent: usize, n: NodeId) -> bool {
        if let Some(&r) = self.memo.get(&(v, n)) {
            return r;
        }
        let mut ok = self.labels_ok(model, v, n);
        if ok {
            let q = self.q;
            for &(p, w) in &q.adj[v] {
                if w == parent {
                    continue;
                }
                let cands = model.neighbours(n, p);
                if !cands.into_iter().any(|m| self.tree(model, w, v, m)) {
                    ok = false;
                    break;
                }
            }
        }
        self.memo.insert((v, n), ok);
        ok
    }

    fn backtrack(
        &mut self,
        model: &mut Model,
        order: &[(usize, Option<(usize, RoleId)>)],
        i: usize,
        root_node: NodeId,
        assign: &mut Vec<Option<NodeId>>,
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let (v, via) = order[i];
        let cands = match via {
            None => vec![root_node],
            Some((src, p)) => model.neighbours(assign[src].unwrap(), p),
        };
        for n in cands {
            if !self.labels_ok(model, v, n) {
                continue;
            }
            let consistent = self.q.adj[v].iter().all(|&(p, w)| match assign[w] {
                Some(m) => model.holds(n, p, m),
                None if w == v => model.holds(n, p, n),
                None => true,
            });
            if !consistent {
                continue;
            }
            assign[v] = Some(n);
            if self.backtrack(model, order, i + 1, root_node, assign) {
                assign[v] = None;
                return true;
            }
            assign[v] = None;
        }
        false
    }
}

/// Variables of the component of `root` in BFS order, each with the
/// already-visited variable and role it is reached through.
fn bfs_order(q: &QueryGraph, root: usize) -> Vec<(usize, Option<(usize, RoleId)>)> {
    let mut seen = vec![false; q.vars.len()];
    let mut out = vec![(root, None)];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &(p, w) in &q.adj[v] {
            if !seen[w] {
                seen[w] = true;
                out.push((w, Some((v, p))));
                queue.push_back(w);
            }
        }
    }
    out
}
