//! Exact learning of ELIQs from membership queries.
//!
//! The learner starts from a seed CQ contained in every satisfiable
//! target, turns it into an ELIQ (`treeify`) and then climbs through
//! frontiers, keeping the first member the oracle accepts.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frontier::{check_dialect, frontier_with, DialectChoice, Options};
use crate::normal::{expand_fresh, normalize, FreshMap};
use crate::reasoner::Reasoner;
use crate::syntax::{ABox, Atoms, Cq, Ontology, Role, Signature, Symbol};

/// Answers "does `ind` answer the hidden target on `a`?".
pub trait MembershipOracle {
    fn answer(&mut self, a: &ABox, ind: &Symbol) -> bool;
    fn query_count(&self) -> usize;
}

/// Answers with the certain answers of a known target.
pub struct SimulatedOracle {
    reasoner: Reasoner,
    target: Cq,
    count: usize,
}

impl SimulatedOracle {
    pub fn new(o: &Ontology, target: &Cq) -> Result<SimulatedOracle> {
        Ok(SimulatedOracle {
            reasoner: Reasoner::with_signature(o, &target.signature())?,
            target: target.clone(),
            count: 0,
        })
    }

    pub fn target(&self) -> &Cq {
        &self.target
    }
}

impl MembershipOracle for SimulatedOracle {
    fn answer(&mut self, a: &ABox, ind: &Symbol) -> bool {
        self.count += 1;
        self.reasoner.certain_answer(a, &self.target, ind)
    }

    fn query_count(&self) -> usize {
        self.count
    }
}

impl<O: MembershipOracle + ?Sized> MembershipOracle for &mut O {
    fn answer(&mut self, a: &ABox, ind: &Symbol) -> bool {
        (**self).answer(a, ind)
    }

    fn query_count(&self) -> usize {
        (**self).query_count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success(Cq),
    BudgetExceeded,
}

#[derive(Clone, Debug)]
pub struct LearnTrace {
    pub hypotheses: Vec<Cq>,
    pub membership_queries: usize,
    pub frontier_sizes: Vec<usize>,
    pub outcome: Outcome,
}

#[derive(Serialize)]
struct TraceJson {
    hypotheses: Vec<String>,
    membership_queries: usize,
    frontier_sizes: Vec<usize>,
    outcome: String,
}

impl LearnTrace {
    pub fn hypothesis(&self) -> Option<&Cq> {
        match &self.outcome {
            Outcome::Success(q) => Some(q),
            Outcome::BudgetExceeded => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let t = TraceJson {
            hypotheses: self.hypotheses.iter().map(|q| q.to_string()).collect(),
            membership_queries: self.membership_queries,
            frontier_sizes: self.frontier_sizes.clone(),
            outcome: match self.outcome {
                Outcome::Success(_) => "success".into(),
                Outcome::BudgetExceeded => "budget_exceeded".into(),
            },
        };
        serde_json::to_value(t).expect("plain data")
    }
}

/// `10 * (|var(q_T)| * max(||O||, 1))^2`.
pub fn default_budget(o: &Ontology, target_vars: usize) -> usize {
    let n = target_vars * o.size().max(1);
    10 * n * n
}

/// The seed over `sig(o)`.
pub fn seed_query(o: &Ontology) -> Result<Cq> {
    seed_query_over(o, &Signature::default())
}

/// A satisfiable CQ contained in every satisfiable ELIQ over
/// `sig(o) ∪ extra`.
///
/// Without role disjointness this is the one-variable query with every
/// concept name and a self-loop per role. Otherwise the roles label
/// edge-disjoint directed Hamilton cycles of `K_{2m+1}` (Walecki).
pub fn seed_query_over(o: &Ontology, extra: &Signature) -> Result<Cq> {
    if !o.concept_disjointness.is_empty() {
        return Err(Error::SeedRequired(
            "the ontology has concept disjointness constraints".into(),
        ));
    }
    let sig = o.signature().union(extra);
    let reasoner = Reasoner::with_signature(o, &sig)?;
    let kb = reasoner.kb();
    let concepts: Vec<Symbol> = sig
        .concepts
        .iter()
        .filter(|c| !kb.is_unsat(kb.concept_basic(kb.concept_id(c).unwrap())))
        .cloned()
        .collect();
    let roles: Vec<Symbol> = sig
        .roles
        .iter()
        .filter(|r| !kb.is_unsat(kb.exists(kb.role_id(&Role::new((*r).clone())).unwrap())))
        .cloned()
        .collect();
    let mut q = Cq::top("x0");
    if o.role_disjointness.is_empty() {
        for c in &concepts {
            q.add_concept(c.clone(), "x0".into());
        }
        for r in &roles {
            q.add_role(&Role::new(r.clone()), "x0".into(), "x0".into());
        }
    } else {
        let cycles = walecki(roles.len());
        let n = 2 * roles.len() + 1;
        let var = |i: usize| Symbol::from(format!("x{i}"));
        let mut atoms = Atoms::default();
        for i in 0..n {
            atoms.tops.insert(var(i));
            for c in &concepts {
                atoms.concepts.insert((c.clone(), var(i)));
            }
        }
        for (r, cycle) in roles.iter().zip(&cycles) {
            for &(a, b) in cycle {
                atoms.add_role(&Role::new(r.clone()), var(a), var(b));
            }
        }
        q = Cq::from_atoms("x0".into(), atoms);
    }
    if !reasoner.cq_satisfiable(&q) {
        return Err(Error::Invariant(format!("seed is unsatisfiable: {q}")));
    }
    Ok(q)
}

/// `m` pairwise edge-disjoint directed Hamilton cycles of `K_{2m+1}`,
/// as edge lists over vertices `0..=2m`. Vertex `2m` is the hub.
pub fn walecki(m: usize) -> Vec<Vec<(usize, usize)>> {
    let k = 2 * m;
    let mut out = Vec::new();
    for i in 0..m {
        let mut path = vec![i];
        for j in 1..=m {
            path.push((i + j) % k);
            if j < m {
                path.push((i + k - j) % k);
            }
        }
        let mut cycle = vec![k];
        cycle.extend(path);
        let edges = (0..cycle.len())
            .map(|t| (cycle[t], cycle[(t + 1) % cycle.len()]))
            .collect();
        out.push(edges);
    }
    out
}

/// Stops the learner early.
enum Stop {
    Budget,
    Fail(Error),
}

impl From<Error> for Stop {
    fn from(e: Error) -> Stop {
        Stop::Fail(e)
    }
}

struct Session<'a, O: MembershipOracle> {
    reasoner: Reasoner,
    oracle: &'a mut O,
    asked: usize,
    budget: usize,
}

impl<O: MembershipOracle> Session<'_, O> {
    fn ask(&mut self, q: &Cq) -> std::result::Result<bool, Stop> {
        if self.asked >= self.budget {
            return Err(Stop::Budget);
        }
        self.asked += 1;
        Ok(self.oracle.answer(&q.to_abox(), q.answer()))
    }

    fn minimize(&mut self, q: &Cq) -> std::result::Result<Cq, Stop> {
        let mut cur = canonical_names(&self.reasoner.saturate(q)?);
        'outer: loop {
            let mut atoms: Vec<(Symbol, Symbol, Symbol)> = cur.role_atoms().cloned().collect();
            atoms.sort_by_key(|(r, a, b)| format!("{r}({a},{b})"));
            for atom in atoms {
                let smaller = without_atom(&cur, &atom);
                if self.ask(&smaller)? {
                    cur = smaller;
                    continue 'outer;
                }
            }
            return Ok(canonical_names(&cur));
        }
    }

    fn treeify(&mut self, q: &Cq) -> std::result::Result<Cq, Stop> {
        let mut p = self.minimize(q)?;
        while let Some(atom) = cycle_atom(&p) {
            p = self.minimize(&double_cycle(&p, &atom))?;
        }
        Ok(p)
    }
}

/// Drops `atom` and keeps the component of the answer variable.
fn without_atom(q: &Cq, atom: &(Symbol, Symbol, Symbol)) -> Cq {
    let mut atoms = q.atoms().clone();
    atoms.roles.remove(atom);
    let rest = Cq::from_atoms(q.answer().clone(), atoms);
    rest.restrict(&rest.connected_vars())
}

/// Renames variables to `x0, x1, ...` in breadth-first order from the
/// answer variable.
fn canonical_names(q: &Cq) -> Cq {
    let adj = q.adjacency();
    let mut order: Vec<Symbol> = vec![q.answer().clone()];
    let mut seen: BTreeSet<Symbol> = order.iter().cloned().collect();
    let mut queue: VecDeque<Symbol> = order.iter().cloned().collect();
    while let Some(v) = queue.pop_front() {
        let mut next: Vec<&Symbol> = adj.get(&v).into_iter().flatten().map(|(_, w)| w).collect();
        next.sort();
        for w in next {
            if seen.insert(w.clone()) {
                order.push(w.clone());
                queue.push_back(w.clone());
            }
        }
    }
    for v in q.vars() {
        if seen.insert(v.clone()) {
            order.push(v);
        }
    }
    let map: BTreeMap<Symbol, Symbol> = order
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, Symbol::from(format!("x{i}"))))
        .collect();
    q.rename(&map)
}

/// An atom on a shortest cycle; ties broken by the atom's text.
/// Self-loops and parallel atoms count as cycles.
pub fn cycle_atom(q: &Cq) -> Option<(Symbol, Symbol, Symbol)> {
    let atoms: Vec<(Symbol, Symbol, Symbol)> = q.role_atoms().cloned().collect();
    let mut best: Option<(usize, String, (Symbol, Symbol, Symbol))> = None;
    for (i, atom) in atoms.iter().enumerate() {
        let (_, a, b) = atom;
        let len = if a == b {
            Some(1)
        } else {
            // shortest path a..b avoiding atom i
            let mut dist: BTreeMap<&Symbol, usize> = BTreeMap::new();
            dist.insert(a, 0);
            let mut queue = VecDeque::from([a]);
            while let Some(v) = queue.pop_front() {
                let d = dist[v];
                for (j, (_, u, w)) in atoms.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let next = if u == v {
                        w
                    } else if w == v {
                        u
                    } else {
                        continue;
                    };
                    if !dist.contains_key(next) {
                        dist.insert(next, d + 1);
                        queue.push_back(next);
                    }
                }
            }
            dist.get(b).map(|d| d + 1)
        };
        if let Some(len) = len {
            let key = (len, format!("{}({},{})", atom.0, atom.1, atom.2));
            if best
                .as_ref()
                .is_none_or(|(l, s, _)| (len, &key.1) < (*l, s))
            {
                best = Some((key.0, key.1, atom.clone()));
            }
        }
    }
    best.map(|(_, _, a)| a)
}

/// Removes `r(x,y)`, adds a disjoint copy of the rest and the cross atoms
/// `r(x,y')`, `r(x',y)`.
pub fn double_cycle(q: &Cq, atom: &(Symbol, Symbol, Symbol)) -> Cq {
    let (r, x, y) = atom;
    let mut atoms = q.atoms().clone();
    atoms.roles.remove(atom);
    let taken = q.vars();
    let mut map: BTreeMap<Symbol, Symbol> = BTreeMap::new();
    for v in &taken {
        let mut name = format!("{v}'");
        while taken.contains(&Symbol::from(name.as_str()))
            || map.values().any(|m| m.as_str() == name)
        {
            name.push('\'');
        }
        map.insert(v.clone(), name.into());
    }
    let copy = Cq::from_atoms(q.answer().clone(), atoms.clone()).rename(&map);
    let mut out = atoms;
    out.concepts.extend(copy.atoms().concepts.iter().cloned());
    out.roles.extend(copy.atoms().roles.iter().cloned());
    out.tops.extend(copy.atoms().tops.iter().cloned());
    let role = Role::new(r.clone());
    out.add_role(&role, x.clone(), map[y].clone());
    out.add_role(&role, map[x].clone(), y.clone());
    Cq::from_atoms(q.answer().clone(), out)
}

fn gate(o: &Ontology) -> Result<()> {
    check_dialect(o, DialectChoice::Auto).map(|_| ())
}

/// Exhaustively removes role atoms the oracle does not need. The result
/// is saturated, connected and O-minimal.
pub fn minimize_cq<O: MembershipOracle>(o: &Ontology, oracle: &mut O, q: &Cq) -> Result<Cq> {
    let mut s = Session {
        reasoner: Reasoner::with_signature(o, &q.signature())?,
        oracle,
        asked: 0,
        budget: usize::MAX,
    };
    s.minimize(q).map_err(unwrap_stop)
}

/// An ELIQ `p` with `q ⊆ p ⊆ q_T`, obtained by doubling cycles.
pub fn treeify<O: MembershipOracle>(o: &Ontology, oracle: &mut O, q: &Cq) -> Result<Cq> {
    let mut s = Session {
        reasoner: Reasoner::with_signature(o, &q.signature())?,
        oracle,
        asked: 0,
        budget: usize::MAX,
    };
    s.treeify(q).map_err(unwrap_stop)
}

fn unwrap_stop(s: Stop) -> Error {
    match s {
        Stop::Fail(e) => e,
        Stop::Budget => Error::Invariant("unbounded session ran out of budget".into()),
    }
}

/// Probe order for frontier members: shorter text first.
fn probe_order(members: &mut [Cq]) {
    members.sort_by_cached_key(|m| {
        let s = m.to_string();
        (s.len(), s)
    });
}

/// Learns the oracle's target under `o`, starting from `seed`.
pub fn learn<O: MembershipOracle>(
    o: &Ontology,
    oracle: &mut O,
    seed: &Cq,
    budget: usize,
) -> Result<LearnTrace> {
    gate(o)?;
    let reasoner = Reasoner::with_signature(o, &seed.signature())?;
    if !reasoner.cq_satisfiable(seed) {
        return Err(Error::Unsatisfiable(seed.to_string()));
    }
    let mut s = Session {
        reasoner,
        oracle,
        asked: 0,
        budget,
    };
    let mut trace = LearnTrace {
        hypotheses: Vec::new(),
        membership_queries: 0,
        frontier_sizes: Vec::new(),
        outcome: Outcome::BudgetExceeded,
    };
    let result = run(o, &mut s, seed, &mut trace);
    trace.membership_queries = s.asked;
    match result {
        Ok(q) => trace.outcome = Outcome::Success(q),
        Err(Stop::Budget) => trace.outcome = Outcome::BudgetExceeded,
        Err(Stop::Fail(e)) => return Err(e),
    }
    Ok(trace)
}

fn run<O: MembershipOracle>(
    o: &Ontology,
    s: &mut Session<'_, O>,
    seed: &Cq,
    trace: &mut LearnTrace,
) -> std::result::Result<Cq, Stop> {
    let mut hyp = s.treeify(seed)?;
    trace.hypotheses.push(hyp.clone());
    'outer: loop {
        let f = frontier_with(
            o,
            &hyp,
            Options {
                dialect: DialectChoice::Auto,
                prune: true,
            },
        )?;
        trace.frontier_sizes.push(f.members.len());
        let mut members = f.members;
        probe_order(&mut members);
        for m in members {
            if s.ask(&m)? {
                hyp = s.minimize(&m)?;
                trace.hypotheses.push(hyp.clone());
                continue 'outer;
            }
        }
        return Ok(hyp);
    }
}

/// Forwards membership queries over a normalized ontology to an oracle
/// over the original one, expanding fresh names first.
pub struct RewritingOracle<'a, O: MembershipOracle> {
    inner: &'a mut O,
    fresh: FreshMap,
    functional: BTreeSet<Role>,
}

impl<'a, O: MembershipOracle> RewritingOracle<'a, O> {
    pub fn new(inner: &'a mut O, fresh: FreshMap, functional: BTreeSet<Role>) -> Self {
        RewritingOracle {
            inner,
            fresh,
            functional,
        }
    }

    pub fn rewrite(&self, a: &ABox) -> ABox {
        ABox::from_atoms(expand_fresh(a.atoms(), &self.fresh, &self.functional))
    }
}

impl<O: MembershipOracle> MembershipOracle for RewritingOracle<'_, O> {
    fn answer(&mut self, a: &ABox, ind: &Symbol) -> bool {
        let rewritten = self.rewrite(a);
        self.inner.answer(&rewritten, ind)
    }

    fn query_count(&self) -> usize {
        self.inner.query_count()
    }
}

/// Runs [`learn`] over the normal form of `o`. The hypotheses in the
/// returned trace are translated back to the signature of `o`.
pub fn learn_with_normal_form<O: MembershipOracle>(
    o: &Ontology,
    oracle: &mut O,
    seed: Option<&Cq>,
    budget: usize,
) -> Result<LearnTrace> {
    gate(o)?;
    let (normal, fresh) = normalize(o);
    let seed = match seed {
        Some(q) => q.clone(),
        None => seed_query(&normal)?,
    };
    let functional = o.functional.clone();
    let mut rewriting = RewritingOracle::new(oracle, fresh.clone(), functional.clone());
    let mut trace = learn(&normal, &mut rewriting, &seed, budget)?;
    let back = |q: &Cq| {
        Cq::from_atoms(
            q.answer().clone(),
            expand_fresh(q.atoms(), &fresh, &functional),
        )
    };
    trace.hypotheses = trace.hypotheses.iter().map(back).collect();
    if let Outcome::Success(q) = &trace.outcome {
        trace.outcome = Outcome::Success(back(q));
    }
    Ok(trace)
}

/// Variables of `a` that violate a functionality assertion.
pub fn functionality_violations(a: &ABox, functional: &BTreeSet<Role>) -> Vec<(Role, Symbol)> {
    let atoms: &Atoms = a.atoms();
    let mut out = Vec::new();
    for r in functional {
        let mut succ: BTreeMap<&Symbol, BTreeSet<&Symbol>> = BTreeMap::new();
        for (name, x, y) in &atoms.roles {
            if *name != r.name {
                continue;
            }
            let (from, to) = if r.inverted { (y, x) } else { (x, y) };
            succ.entry(from).or_default().insert(to);
        }
        for (x, ys) in succ {
            if ys.len() > 1 {
                out.push((r.clone(), x.clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_cq, parse_ontology};

    fn learn_target(o: &str, target: &str) -> (LearnTrace, Ontology, Cq) {
        let o = parse_ontology(o).unwrap();
        let t = parse_cq(target).unwrap();
        let mut oracle = SimulatedOracle::new(&o, &t).unwrap();
        let seed = seed_query_over(&o, &t.signature()).unwrap();
        let trace = learn(&o, &mut oracle, &seed, 10_000).unwrap();
        assert_eq!(trace.membership_queries, oracle.query_count());
        (trace, o, t)
    }

    #[test]
    fn loop_seed() {
        let o = parse_ontology("A sub some r").unwrap();
        assert_eq!(
            seed_query(&o).unwrap().to_string(),
            "q(x0) :- A(x0), r(x0,x0)"
        );
        let d = parse_ontology("disj A B").unwrap();
        assert_eq!(seed_query(&d).unwrap_err().reason(), "seed_required");
    }

    #[test]
    fn walecki_cycles_are_hamiltonian_and_disjoint() {
        for m in 1..6 {
            let cycles = walecki(m);
            let n = 2 * m + 1;
            let mut used = BTreeSet::new();
            for c in &cycles {
                assert_eq!(c.len(), n);
                let starts: BTreeSet<usize> = c.iter().map(|e| e.0).collect();
                let ends: BTreeSet<usize> = c.iter().map(|e| e.1).collect();
                assert_eq!(starts.len(), n);
                assert_eq!(ends.len(), n);
                for &(a, b) in c {
                    assert!(used.insert((a.min(b), a.max(b))), "edge reused");
                }
            }
            assert_eq!(used.len(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn role_disjointness_seed() {
        let o = parse_ontology("rdisj r s\nA sub some r").unwrap();
        let q = seed_query(&o).unwrap();
        assert_eq!(q.var_count(), 5);
        assert_eq!(q.role_atoms().count(), 10);
    }

    #[test]
    fn minimize_drops_unneeded_edge() {
        let o = Ontology::default();
        let t = parse_cq("eliq: A").unwrap();
        let mut oracle = SimulatedOracle::new(&o, &t).unwrap();
        let q = minimize_cq(
            &o,
            &mut oracle,
            &parse_cq("q(x0) :- A(x0), r(x0,y)").unwrap(),
        )
        .unwrap();
        assert_eq!(q.to_string(), "q(x0) :- A(x0)");
        assert_eq!(oracle.query_count(), 1);
        let again = minimize_cq(&o, &mut oracle, &q).unwrap();
        assert_eq!(again, q);
    }

    #[test]
    fn minimize_keeps_needed_loop() {
        let o = Ontology::default();
        let t = parse_cq("eliq: some r . A").unwrap();
        let mut oracle = SimulatedOracle::new(&o, &t).unwrap();
        let seed = parse_cq("q(x0) :- A(x0), r(x0,x0)").unwrap();
        assert_eq!(minimize_cq(&o, &mut oracle, &seed).unwrap(), seed);
    }

    #[test]
    fn treeify_unrolls_loop() {
        let o = Ontology::default();
        let t = parse_cq("q(x0) :- A(x0), r(x0,y)").unwrap();
        let mut oracle = SimulatedOracle::new(&o, &t).unwrap();
        let seed = parse_cq("q(x0) :- A(x0), r(x0,x0)").unwrap();
        let p = treeify(&o, &mut oracle, &seed).unwrap();
        assert!(p.is_eliq());
        // only role atoms are removed, so the copy keeps its label
        assert_eq!(p.to_string(), "q(x0) :- A(x0), A(x1), r(x0,x1)");
    }

    #[test]
    fn learns_target_under_cycle() {
        let (trace, o, t) = learn_target("A sub some r\nsome r sub A\nr rsub s", "eliq: A & B");
        let r = Reasoner::new(&o).unwrap();
        assert!(r.equivalent(trace.hypothesis().unwrap(), &t).unwrap());
        for w in trace.hypotheses.windows(2) {
            assert!(r.contained(&w[0], &w[1]).unwrap());
            assert!(!r.contained(&w[1], &w[0]).unwrap());
        }
    }

    #[test]
    fn seed_equivalent_target_needs_no_iteration() {
        let (trace, _, _) = learn_target("", "q(x0) :- A(x0), r(x0,x1), A(x1)");
        assert_eq!(trace.hypotheses.len(), 1);
    }

    #[test]
    fn budget_is_enforced() {
        let o = parse_ontology("A sub some r\nsome r sub A\nr rsub s").unwrap();
        let t = parse_cq("eliq: A & B").unwrap();
        let mut oracle = SimulatedOracle::new(&o, &t).unwrap();
        let trace = learn(&o, &mut oracle, &seed_query(&o).unwrap(), 1).unwrap();
        assert_eq!(trace.outcome, Outcome::BudgetExceeded);
        assert_eq!(trace.membership_queries, 1);
    }

    #[test]
    fn rejects_unrestricted_functionality() {
        let o =
            parse_ontology("A sub some r\nsome r- sub some r\nsome r sub some s\nfunc r-").unwrap();
        let t = parse_cq("eliq: A").unwrap();
        let mut oracle = SimulatedOracle::new(&o, &t).unwrap();
        let err = learn(&o, &mut oracle, &t, 100).unwrap_err();
        assert_eq!(err.reason(), "not_f_restricted");
    }

    #[test]
    fn normal_form_reduction_forwards_original_signature() {
        struct Spy<'a> {
            inner: SimulatedOracle,
            fresh: &'a BTreeSet<Symbol>,
        }
        impl MembershipOracle for Spy<'_> {
            fn answer(&mut self, a: &ABox, ind: &Symbol) -> bool {
                assert!(a.signature().concepts.is_disjoint(self.fresh), "{a}");
                self.inner.answer(a, ind)
            }
            fn query_count(&self) -> usize {
                self.inner.query_count()
            }
        }
        let o = parse_ontology("A sub some r . (B & some s)").unwrap();
        let t = parse_cq("eliq: some r . B").unwrap();
        let fresh: BTreeSet<Symbol> = normalize(&o).1.keys().cloned().collect();
        assert!(!fresh.is_empty());
        let mut spy = Spy {
            inner: SimulatedOracle::new(&o, &t).unwrap(),
            fresh: &fresh,
        };
        let trace = learn_with_normal_form(&o, &mut spy, None, 10_000).unwrap();
        let r = Reasoner::new(&o).unwrap();
        assert!(r.equivalent(trace.hypothesis().unwrap(), &t).unwrap());
    }
}
