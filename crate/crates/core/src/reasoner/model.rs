//! Universal models, built lazily.
//!
//! Individuals come first in the arena. Anonymous elements are created on
//! demand when their parent's children are requested; the subtree below an
//! anonymous element only depends on its incoming role and its basic
//! concepts, which is what the satisfiability check exploits.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::kb::{inv, BasicId, Kb, RoleId, Variant, TOP};
use crate::syntax::{ABox, Symbol};

pub type NodeId = usize;

struct Node {
    parent: Option<NodeId>,
    role_in: RoleId,
    basics: FixedBitSet,
    children: Option<Vec<NodeId>>,
}

pub struct Model<'k> {
    kb: &'k Kb,
    names: Vec<Symbol>,
    index: HashMap<Symbol, NodeId>,
    n_ind: usize,
    nodes: Vec<Node>,
    /// Per individual: ABox neighbours with the roles holding towards them.
    adj: Vec<Vec<(NodeId, FixedBitSet)>>,
    abox_clash: bool,
    consistent: Option<bool>,
    representatives: Vec<NodeId>,
}

impl<'k> Model<'k> {
    /// The universal model of `abox`, with `extra` added as isolated
    /// individuals when they do not occur in it.
    pub fn new(kb: &'k Kb, abox: &ABox, extra: &[Symbol]) -> Model<'k> {
        let mut inds = abox.individuals();
        inds.extend(extra.iter().cloned());
        let names: Vec<Symbol> = inds.into_iter().collect();
        let index: HashMap<Symbol, NodeId> = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let mut concepts = vec![Vec::new(); names.len()];
        for (c, t) in abox.concept_assertions() {
            concepts[index[t]].push(kb.concept_id(c).expect("concept outside the signature"));
        }
        let roles = abox
            .role_assertions()
            .map(|(r, a, b)| {
                (
                    kb.role_name_id(r).expect("role outside the signature"),
                    index[a],
                    index[b],
                )
            })
            .collect();
        let mut m = Model::from_parts(kb, concepts, roles);
        m.names = names;
        m.index = index;
        m
    }

    /// Low-level constructor: concept ids per individual and role
    /// assertions as `(role name index, from, to)`.
    pub(crate) fn from_parts(
        kb: &'k Kb,
        concepts: Vec<Vec<usize>>,
        roles: Vec<(usize, NodeId, NodeId)>,
    ) -> Model<'k> {
        let n = concepts.len();
        let nr = kb.role_count();
        let mut pair: BTreeMap<(NodeId, NodeId), FixedBitSet> = BTreeMap::new();
        for (name, a, b) in roles {
            let r = 2 * name;
            for &s in kb.supers(r) {
                pair.entry((a, b))
                    .or_insert_with(|| FixedBitSet::with_capacity(nr))
                    .insert(s);
                pair.entry((b, a))
                    .or_insert_with(|| FixedBitSet::with_capacity(nr))
                    .insert(inv(s));
            }
        }
        let mut adj: Vec<Vec<(NodeId, FixedBitSet)>> = vec![Vec::new(); n];
        for ((a, b), set) in pair {
            adj[a].push((b, set));
        }

        let mut abox_clash = false;
        let mut basics: Vec<FixedBitSet> = (0..n)
            .map(|a| {
                let mut seeds: Vec<BasicId> =
                    concepts[a].iter().map(|&c| kb.concept_basic(c)).collect();
                for (_, set) in &adj[a] {
                    seeds.extend(set.ones().map(|r| kb.exists(r)));
                }
                kb.close(seeds)
            })
            .collect();

        // Functional roles with a single ABox neighbour: the neighbour
        // must absorb every filler demanded along that role.
        if kb.variant() == Variant::F {
            loop {
                let mut changed = false;
                for a in 0..n {
                    for r in 0..nr {
                        if !kb.is_functional(r) {
                            continue;
                        }
                        let nbrs: Vec<NodeId> = adj[a]
                            .iter()
                            .filter(|(_, set)| set.contains(r))
                            .map(|(b, _)| *b)
                            .collect();
                        if nbrs.len() > 1 {
                            abox_clash = true;
                        }
                        if nbrs.len() != 1 {
                            continue;
                        }
                        let b = nbrs[0];
                        let fillers: Vec<BasicId> = kb
                            .active_gens(&basics[a])
                            .filter(|g| g.role == r)
                            .map(|g| g.filler)
                            .collect();
                        for f in fillers {
                            if !basics[b].contains(f) {
                                let add = kb.closure_of(f).clone();
                                basics[b].union_with(&add);
                                changed = true;
                            }
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
        }

        for a in 0..n {
            if kb.clashes(&basics[a]) {
                abox_clash = true;
            }
            for (_, set) in &adj[a] {
                if kb.role_clash(set) {
                    abox_clash = true;
                }
            }
        }

        let nodes = basics
            .drain(..)
            .map(|b| Node {
                parent: None,
                role_in: 0,
                basics: b,
                children: None,
            })
            .collect();
        Model {
            kb,
            names: (0..n).map(|i| Symbol::from(format!("_i{i}"))).collect(),
            index: HashMap::new(),
            n_ind: n,
            nodes,
            adj,
            abox_clash,
            consistent: None,
            representatives: Vec::new(),
        }
    }

    pub fn kb(&self) -> &'k Kb {
        self.kb
    }

    pub fn individual(&self, name: &Symbol) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn individual_name(&self, n: NodeId) -> &Symbol {
        &self.names[n]
    }

    pub fn individual_count(&self) -> usize {
        self.n_ind
    }

    pub fn is_individual(&self, n: NodeId) -> bool {
        n < self.n_ind
    }

    pub fn basics(&self, n: NodeId) -> &FixedBitSet {
        &self.nodes[n].basics
    }

    pub fn parent(&self, n: NodeId) -> Option<NodeId> {
        self.nodes[n].parent
    }

    pub fn role_in(&self, n: NodeId) -> RoleId {
        self.nodes[n].role_in
    }

    /// ABox neighbours of an individual with the roles holding towards them.
    pub fn abox_neighbours(&self, a: NodeId) -> &[(NodeId, FixedBitSet)] {
        &self.adj[a]
    }

    fn excluded(&self, a: NodeId, r: RoleId, basics: &FixedBitSet) -> bool {
        self.adj[a]
            .iter()
            .any(|(b, set)| set.contains(r) && basics.is_subset(&self.nodes[*b].basics))
    }

    pub fn children(&mut self, n: NodeId) -> Vec<NodeId> {
        if let Some(c) = &self.nodes[n].children {
            return c.clone();
        }
        let incoming = self.nodes[n].parent.map(|_| self.nodes[n].role_in);
        let mut specs = self.kb.successor_specs(&self.nodes[n].basics, incoming);
        if self.is_individual(n) {
            specs.retain(|(r, b)| !self.excluded(n, *r, b));
        }
        let specs = self.kb.prune_dominated(specs);
        let mut out = Vec::with_capacity(specs.len());
        for (r, b) in specs {
            out.push(self.nodes.len());
            self.nodes.push(Node {
                parent: Some(n),
                role_in: r,
                basics: b,
                children: None,
            });
        }
        self.nodes[n].children = Some(out.clone());
        out
    }

    /// Whether `p(n, m)` holds.
    pub fn holds(&mut self, n: NodeId, p: RoleId, m: NodeId) -> bool {
        if self.is_individual(n) && self.is_individual(m) {
            return self.adj[n]
                .iter()
                .any(|(b, set)| *b == m && set.contains(p));
        }
        if self.nodes[m].parent == Some(n) {
            return self.kb.is_sub_role(self.nodes[m].role_in, p);
        }
        if self.nodes[n].parent == Some(m) {
            return self.kb.is_sub_role(self.nodes[n].role_in, inv(p));
        }
        false
    }

    /// Every `m` with `p(n, m)`.
    pub fn neighbours(&mut self, n: NodeId, p: RoleId) -> Vec<NodeId> {
        let mut out = Vec::new();
        if self.is_individual(n) {
            out.extend(
                self.adj[n]
                    .iter()
                    .filter(|(_, set)| set.contains(p))
                    .map(|(b, _)| *b),
            );
        } else if let Some(parent) = self.nodes[n].parent {
            if self.kb.is_sub_role(self.nodes[n].role_in, inv(p)) {
                out.push(parent);
            }
        }
        for c in self.children(n) {
            if self.kb.is_sub_role(self.nodes[c].role_in, p) {
                out.push(c);
            }
        }
        out
    }

    /// Whether the ABox is satisfiable. Explores one element per distinct
    /// (incoming role, basic concepts) state.
    pub fn consistent(&mut self) -> bool {
        if let Some(c) = self.consistent {
            return c;
        }
        let ok = !self.abox_clash && self.explore();
        self.consistent = Some(ok);
        ok
    }

    fn explore(&mut self) -> bool {
        let mut seen: HashSet<(RoleId, FixedBitSet)> = HashSet::new();
        let mut queue: VecDeque<NodeId> = VecDeque::new();
        for a in 0..self.n_ind {
            queue.extend(self.children(a));
        }
        let mut reps = Vec::new();
        let mut ok = true;
        while let Some(n) = queue.pop_front() {
            let key = (self.nodes[n].role_in, self.nodes[n].basics.clone());
            if !seen.insert(key) {
                continue;
            }
            reps.push(n);
            if self.kb.clashes(&self.nodes[n].basics)
                || self.kb.role_clash(self.kb.super_set(self.nodes[n].role_in))
            {
                ok = false;
                break;
            }
            queue.extend(self.children(n));
        }
        self.representatives = reps;
        ok
    }

    /// Individuals plus one anonymous element per reachable state: every
    /// element of the model is isomorphic (with its subtree) to one of them.
    pub fn representatives(&mut self) -> Vec<NodeId> {
        self.consistent();
        (0..self.n_ind)
            .chain(self.representatives.iter().copied())
            .collect()
    }

    /// `a ~>R A` for the role-inclusion model: pairs (role, concept name
    /// or `top`) demanded at individual `a` and not already witnessed by an
    /// ABox neighbour.
    pub fn leadsto_r(&self, a: NodeId) -> Vec<(RoleId, BasicId)> {
        let kb = self.kb;
        let mut out: Vec<(RoleId, BasicId)> = Vec::new();
        for g in kb.active_gens(&self.nodes[a].basics) {
            let c = kb.close([g.filler, kb.exists(inv(g.role))]);
            for &r in kb.supers(g.role) {
                for b in std::iter::once(TOP).chain(kb.concepts_in(&c).map(|x| kb.concept_basic(x)))
                {
                    let witnessed = self.adj[a]
                        .iter()
                        .any(|(n, set)| set.contains(r) && self.nodes[*n].basics.contains(b));
                    if !witnessed && !out.contains(&(r, b)) {
                        out.push((r, b));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// `a ~>R M` for the functional model: the maximal concept-name sets
    /// of the successors demanded at `a`, minus those already witnessed.
    pub fn leadsto_f(&self, a: NodeId) -> Vec<(RoleId, Vec<usize>)> {
        let kb = self.kb;
        let mut out: Vec<(RoleId, Vec<usize>)> = Vec::new();
        let specs = kb.successor_specs(&self.nodes[a].basics, None);
        for (r, basics) in &specs {
            let names: Vec<usize> = kb.concepts_in(basics).collect();
            let maximal = !specs
                .iter()
                .any(|(s, other)| s == r && basics.is_subset(other) && !other.is_subset(basics));
            if !maximal || self.witnessed(a, *r, &names) {
                continue;
            }
            if !out.iter().any(|(s, m)| s == r && *m == names) {
                out.push((*r, names));
            }
        }
        out.sort();
        out
    }

    fn witnessed(&self, a: NodeId, r: RoleId, names: &[usize]) -> bool {
        self.adj[a].iter().any(|(n, set)| {
            set.contains(r)
                && names
                    .iter()
                    .all(|&c| self.nodes[*n].basics.contains(self.kb.concept_basic(c)))
        })
    }

    /// Materializes every element at distance at most `depth` from the
    /// individuals.
    pub fn prefix(&mut self, depth: usize) -> Prefix {
        let kb = self.kb;
        let mut labels: Vec<String> = self.names.iter().map(|s| s.to_string()).collect();
        let mut out = Prefix::default();
        let mut frontier: Vec<NodeId> = (0..self.n_ind).collect();
        for a in 0..self.n_ind {
            out.nodes.push(PrefixNode {
                name: labels[a].clone(),
                concepts: self.visible_names(a),
                individual: true,
            });
            for (b, set) in &self.adj[a] {
                for r in set.ones() {
                    if r % 2 == 0 {
                        out.edges.push(PrefixEdge {
                            from: labels[a].clone(),
                            role: kb.role(r).to_string(),
                            to: labels[*b].clone(),
                        });
                    }
                }
            }
        }
        let mut used: HashSet<String> = labels.iter().cloned().collect();
        for _ in 0..depth {
            let mut next = Vec::new();
            for n in frontier {
                for c in self.children(n) {
                    let names = self.visible_names(c);
                    let base = format!(
                        "{}.{}[{}]",
                        labels[n],
                        kb.role(self.nodes[c].role_in),
                        names.join(",")
                    );
                    let mut name = base.clone();
                    let mut k = 1;
                    while used.contains(&name) {
                        k += 1;
                        name = format!("{base}#{k}");
                    }
                    used.insert(name.clone());
                    if labels.len() <= c {
                        labels.resize(c + 1, String::new());
                    }
                    labels[c] = name.clone();
                    for &s in kb.supers(self.nodes[c].role_in) {
                        let (from, to) = (labels[n].clone(), name.clone());
                        let role = kb.role(s);
                        if role.inverted {
                            out.edges.push(PrefixEdge {
                                from: to,
                                role: role.inverse().to_string(),
                                to: from,
                            });
                        } else {
                            out.edges.push(PrefixEdge {
                                from,
                                role: role.to_string(),
                                to,
                            });
                        }
                    }
                    out.nodes.push(PrefixNode {
                        name,
                        concepts: names,
                        individual: false,
                    });
                    next.push(c);
                }
            }
            frontier = next;
        }
        out.depth = depth;
        out
    }

    fn visible_names(&self, n: NodeId) -> Vec<String> {
        let mut v: Vec<String> = self
            .kb
            .visible_concepts(&self.nodes[n].basics)
            .map(|c| self.kb.concept_name(c).to_string())
            .collect();
        v.sort();
        v
    }
}

/// A depth-bounded part of a universal model, for inspection.
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Prefix {
    pub depth: usize,
    pub nodes: Vec<PrefixNode>,
    pub edges: Vec<PrefixEdge>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PrefixNode {
    pub name: String,
    pub concepts: Vec<String>,
    pub individual: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PrefixEdge {
    pub from: String,
    pub role: String,
    pub to: String,
}

impl Prefix {
    pub fn anonymous_count(&self) -> usize {
        self.nodes.iter().filter(|n| !n.individual).count()
    }
}
