//! Brute-force oracles, random instance generators and the fixture
//! families used to check the constructions.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::enumerate::eliqs_into;
use crate::error::{Error, Result};
use crate::reasoner::hom::{maps_to, QueryGraph};
use crate::reasoner::model::Model;
use crate::reasoner::Reasoner;
use crate::syntax::{ABox, Atoms, BasicConcept, Cq, Eli, Ontology, Role, Signature, Symbol};

/// Outcome of a brute-force check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Counterexample(Cq),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

/// Checks that every member generalizes `q` strictly. Returns a
/// description of the first violation.
pub fn check_conditions(o: &Ontology, q: &Cq, members: &[Cq]) -> Result<Option<String>> {
    let r = Reasoner::with_signature(o, &q.signature())?;
    for m in members {
        if !r.contained(q, m)? {
            return Ok(Some(format!("query not contained in member {m}")));
        }
        if r.contained(m, q)? {
            return Ok(Some(format!("member {m} contained in the query")));
        }
    }
    Ok(None)
}

/// Searches for a satisfiable ELIQ `q'` with at most `bound` variables,
/// `q ⊆ q'` and `q' ⊄ q`, that no member is contained in.
pub fn bruteforce_frontier_check(
    o: &Ontology,
    q: &Cq,
    members: &[Cq],
    bound: usize,
) -> Result<Verdict> {
    let mut sig = o.signature().union(&q.signature());
    for m in members {
        sig = sig.union(&m.signature());
    }
    let reasoner = Reasoner::with_signature(o, &sig)?;
    let kb = reasoner.kb();
    let quotient = |c: &Cq| c.identify_functional(&o.functional).to_abox();
    let mut uq = Model::new(kb, &quotient(q), &[q.answer().clone()]);
    if !uq.consistent() {
        return Err(Error::Unsatisfiable(q.to_string()));
    }
    let anchor = uq.individual(q.answer()).unwrap();
    let query_graph = QueryGraph::new(kb, q);
    let mut member_models: Vec<(Model, usize)> = members
        .iter()
        .map(|m| {
            let model = Model::new(kb, &quotient(m), &[m.answer().clone()]);
            let a = model.individual(m.answer()).unwrap();
            (model, a)
        })
        .collect();
    let query_sig = o.signature().union(&q.signature());
    for tree in eliqs_into(&mut uq, anchor, &query_sig, bound) {
        let cand = tree.to_cq();
        let qg = QueryGraph::new(kb, &cand);
        if member_models.iter_mut().any(|(m, a)| maps_to(m, &qg, *a)) {
            continue;
        }
        let mut uc = Model::new(kb, &quotient(&cand), &[cand.answer().clone()]);
        if !uc.consistent() {
            continue;
        }
        let a = uc.individual(cand.answer()).unwrap();
        if maps_to(&mut uc, &query_graph, a) {
            continue;
        }
        return Ok(Verdict::Counterexample(cand));
    }
    Ok(Verdict::Ok)
}

/// Exhaustive certain answers under the empty ontology: tries every
/// assignment of query variables to individuals.
pub fn bruteforce_answer(a: &ABox, q: &Cq, ind: &Symbol) -> bool {
    let mut inds: Vec<Symbol> = a.individuals().into_iter().collect();
    if !inds.contains(ind) {
        inds.push(ind.clone());
    }
    let vars: Vec<Symbol> = q.vars().into_iter().filter(|v| v != q.answer()).collect();
    let mut assign: BTreeMap<Symbol, Symbol> = BTreeMap::new();
    assign.insert(q.answer().clone(), ind.clone());
    fn go(
        i: usize,
        vars: &[Symbol],
        inds: &[Symbol],
        assign: &mut BTreeMap<Symbol, Symbol>,
        a: &ABox,
        q: &Cq,
    ) -> bool {
        if i == vars.len() {
            let concepts_ok = q
                .concept_atoms()
                .all(|(c, v)| a.atoms().concepts.contains(&(c.clone(), assign[v].clone())));
            let roles_ok = q.role_atoms().all(|(r, x, y)| {
                a.atoms()
                    .roles
                    .contains(&(r.clone(), assign[x].clone(), assign[y].clone()))
            });
            return concepts_ok && roles_ok;
        }
        for d in inds {
            assign.insert(vars[i].clone(), d.clone());
            if go(i + 1, vars, inds, assign, a, q) {
                return true;
            }
        }
        false
    }
    go(0, &vars, &inds, &mut assign, a, q)
}

/// A set of CIs `A1 & ... & An sub A` between concept names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConjunctiveOntology {
    pub inclusions: Vec<(BTreeSet<Symbol>, Symbol)>,
}

impl ConjunctiveOntology {
    pub fn closure(&self, s: &BTreeSet<Symbol>) -> BTreeSet<Symbol> {
        let mut out = s.clone();
        loop {
            let before = out.len();
            for (lhs, rhs) in &self.inclusions {
                if lhs.is_subset(&out) {
                    out.insert(rhs.clone());
                }
            }
            if out.len() == before {
                return out;
            }
        }
    }

    /// `p1 ⊆ p2` for conjunctions of concept names.
    pub fn contained(&self, p1: &BTreeSet<Symbol>, p2: &BTreeSet<Symbol>) -> bool {
        p2.is_subset(&self.closure(p1))
    }
}

/// Size of a smallest frontier of the conjunction `q` among conjunctions
/// over `sig`, by exact set cover.
pub fn bruteforce_min_frontier_aq(
    o: &ConjunctiveOntology,
    q: &BTreeSet<Symbol>,
    sig: &BTreeSet<Symbol>,
) -> usize {
    let names: Vec<Symbol> = sig.iter().cloned().collect();
    let mut gens: Vec<BTreeSet<Symbol>> = Vec::new();
    for mask in 0u64..(1u64 << names.len()) {
        let p: BTreeSet<Symbol> = names
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, n)| n.clone())
            .collect();
        if o.contained(q, &p) && !o.contained(&p, q) {
            gens.push(p);
        }
    }
    // covers[i]: generalizations that gens[i] is contained in
    let covers: Vec<BTreeSet<usize>> = gens
        .iter()
        .map(|f| {
            (0..gens.len())
                .filter(|&j| o.contained(f, &gens[j]))
                .collect()
        })
        .collect();
    let all: BTreeSet<usize> = (0..gens.len()).collect();
    let mut best = gens.len();
    cover(&covers, &all, 0, &mut best);
    best
}

fn cover(covers: &[BTreeSet<usize>], uncovered: &BTreeSet<usize>, used: usize, best: &mut usize) {
    if used >= *best {
        return;
    }
    let Some(&target) = uncovered
        .iter()
        .min_by_key(|&&e| covers.iter().filter(|c| c.contains(&e)).count())
    else {
        *best = used;
        return;
    };
    for c in covers.iter().filter(|c| c.contains(&target)) {
        let rest: BTreeSet<usize> = uncovered.difference(c).copied().collect();
        cover(covers, &rest, used + 1, best);
    }
}

/// A member of one of the lower-bound instance families.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub ontology: Ontology,
    /// Only set for the conjunctive-ontology family.
    pub conjunctive: Option<ConjunctiveOntology>,
    pub query: Cq,
    /// A second query the family is stated against, if any.
    pub reference: Option<Cq>,
}

pub const FIXTURES: [&str; 4] = [
    "thm3_conjunctive",
    "thm4_dllitef",
    "thm9_disjointness",
    "thm10_hypotheses",
];

fn zigzag_ontology() -> Ontology {
    Ontology::default()
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
        .with_func(Role::inv("r"))
}

/// The zig-zag query: r-chains `x1..xn` and `x1'..xn'` meeting in a
/// shared s-target, `A` at `x1'`.
fn zigzag(n: usize, atoms: &mut Atoms) {
    let r = Role::new("r");
    let s = Role::new("s");
    for i in 1..n {
        atoms.add_role(&r, format!("x{i}").into(), format!("x{}", i + 1).into());
        atoms.add_role(&r, format!("x{i}'").into(), format!("x{}'", i + 1).into());
    }
    atoms.add_role(&s, format!("x{n}").into(), "y".into());
    atoms.add_role(&s, format!("x{n}'").into(), "y".into());
    atoms.concepts.insert(("A".into(), "x1'".into()));
}

fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..n)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

pub fn fixture(name: &str, n: usize) -> Result<Fixture> {
    if n == 0 {
        return Err(Error::UnknownFixture(format!("{name} needs n >= 1")));
    }
    let pair = |i: usize| {
        (
            Symbol::from(format!("A{i}")),
            Symbol::from(format!("A{i}'")),
        )
    };
    match name {
        "thm3_conjunctive" => {
            let all: Vec<Symbol> = (1..=n).flat_map(|i| [pair(i).0, pair(i).1]).collect();
            let mut inclusions = Vec::new();
            for i in 1..=n {
                let (a, b) = pair(i);
                for c in &all {
                    inclusions.push(([a.clone(), b.clone()].into_iter().collect(), c.clone()));
                }
            }
            let mut query = Cq::top("x");
            for c in &all {
                query.add_concept(c.clone(), "x".into());
            }
            Ok(Fixture {
                ontology: Ontology::default(),
                conjunctive: Some(ConjunctiveOntology { inclusions }),
                query,
                reference: None,
            })
        }
        "thm4_dllitef" => {
            let mut atoms = Atoms::default();
            zigzag(n, &mut atoms);
            Ok(Fixture {
                ontology: zigzag_ontology(),
                conjunctive: None,
                query: Cq::from_atoms("x1".into(), atoms),
                reference: Some(Cq::top("x").with_concept("A", "x")),
            })
        }
        "thm9_disjointness" => {
            let mut o = Ontology::default();
            let mut query = Cq::top("x");
            for i in 1..=n {
                let (a, b) = pair(i);
                o = o.with_disj(BasicConcept::Atomic(a.clone()), BasicConcept::Atomic(b));
                query.add_concept(a, "x".into());
            }
            Ok(Fixture {
                ontology: o,
                conjunctive: None,
                query,
                reference: None,
            })
        }
        "thm10_hypotheses" => {
            if !is_prime(n) {
                return Err(Error::UnknownFixture(format!(
                    "{name} is defined for prime n only, got {n}"
                )));
            }
            let mut atoms = Atoms::default();
            zigzag(n, &mut atoms);
            atoms.concepts.insert(("A".into(), "x0".into()));
            atoms.add_role(&Role::new("r"), "x0".into(), "x1".into());
            let star = Cq::top("x1")
                .with_concept("A", "x0")
                .with_role(&Role::new("r"), "x0", "x1")
                .with_concept("A", "x1");
            Ok(Fixture {
                ontology: zigzag_ontology(),
                conjunctive: None,
                query: Cq::from_atoms("x1".into(), atoms),
                reference: Some(star),
            })
        }
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

/// Which kind of ontology to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Role inclusions, no functionality.
    R,
    /// Functionality, no role inclusions, restricted existentials.
    F,
}

/// Knobs for [`random_ontology`].
#[derive(Clone, Debug)]
pub struct GenConfig {
    pub concepts: usize,
    pub roles: usize,
    pub statements: usize,
    pub kind: Kind,
    /// Only emit normal-form CIs.
    pub normal: bool,
    pub concept_disjointness: bool,
    pub role_disjointness: bool,
}

impl GenConfig {
    pub fn small(kind: Kind) -> GenConfig {
        GenConfig {
            concepts: 2,
            roles: 2,
            statements: 3,
            kind,
            normal: true,
            concept_disjointness: true,
            role_disjointness: true,
        }
    }

    pub fn signature(&self) -> Signature {
        let cs: Vec<String> = (0..self.concepts).map(concept_name).collect();
        let rs: Vec<String> = (0..self.roles).map(role_name).collect();
        Signature::new(cs.iter().map(String::as_str), rs.iter().map(String::as_str))
    }
}

fn concept_name(i: usize) -> String {
    ["A", "B", "C", "D", "E"]
        .get(i)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("A{i}"))
}

fn role_name(i: usize) -> String {
    ["r", "s", "t"]
        .get(i)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("r{i}"))
}

fn pick_concept<R: Rng>(rng: &mut R, sig: &Signature) -> Symbol {
    let v: Vec<&Symbol> = sig.concepts.iter().collect();
    (*v.choose(rng).unwrap()).clone()
}

fn pick_role<R: Rng>(rng: &mut R, sig: &Signature) -> Role {
    let v: Vec<&Symbol> = sig.roles.iter().collect();
    let name = (*v.choose(rng).unwrap()).clone();
    if rng.gen_bool(0.3) {
        Role::inv(name)
    } else {
        Role::new(name)
    }
}

fn pick_basic<R: Rng>(rng: &mut R, sig: &Signature) -> BasicConcept {
    if sig.roles.is_empty() || rng.gen_bool(0.6) {
        BasicConcept::Atomic(pick_concept(rng, sig))
    } else {
        BasicConcept::Exists(pick_role(rng, sig))
    }
}

fn random_rhs<R: Rng>(rng: &mut R, sig: &Signature, depth: usize) -> Eli {
    let roll = rng.gen_range(0..10);
    if sig.roles.is_empty() || depth == 0 || roll < 4 {
        return Eli::Atom(pick_concept(rng, sig));
    }
    if roll < 7 {
        let filler = if rng.gen_bool(0.5) {
            Eli::Top
        } else {
            random_rhs(rng, sig, depth - 1)
        };
        return Eli::some(pick_role(rng, sig), filler);
    }
    Eli::and(
        random_rhs(rng, sig, depth - 1),
        random_rhs(rng, sig, depth - 1),
    )
}

/// A random ontology per `cfg`. F ontologies are kept within the
/// restricted fragment.
pub fn random_ontology<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Ontology {
    let sig = cfg.signature();
    let mut o = Ontology::default();
    let mut added = 0;
    let mut attempts = 0;
    while added < cfg.statements && attempts < 100 * (cfg.statements + 1) {
        attempts += 1;
        let roll = rng.gen_range(0..100);
        let mut next = o.clone();
        if roll < 60 || sig.roles.is_empty() {
            let lhs = pick_basic(rng, &sig);
            let rhs = if cfg.normal {
                match (&lhs, rng.gen_range(0..3)) {
                    (BasicConcept::Atomic(_), 0) if !sig.roles.is_empty() => {
                        let filler = if rng.gen_bool(0.5) {
                            Eli::Top
                        } else {
                            Eli::Atom(pick_concept(rng, &sig))
                        };
                        Eli::some(pick_role(rng, &sig), filler)
                    }
                    (BasicConcept::Exists(_), _) => Eli::Atom(pick_concept(rng, &sig)),
                    (_, 1) if !sig.roles.is_empty() => Eli::some(pick_role(rng, &sig), Eli::Top),
                    _ => Eli::Atom(pick_concept(rng, &sig)),
                }
            } else {
                random_rhs(rng, &sig, 2)
            };
            next = next.with_ci(lhs, rhs);
        } else if roll < 78 {
            match cfg.kind {
                Kind::R => {
                    let (a, b) = (pick_role(rng, &sig), pick_role(rng, &sig));
                    if a == b {
                        continue;
                    }
                    next = next.with_ri(a, b);
                }
                Kind::F => next = next.with_func(pick_role(rng, &sig)),
            }
        } else if roll < 90 {
            if !cfg.concept_disjointness {
                continue;
            }
            next = next.with_disj(pick_basic(rng, &sig), pick_basic(rng, &sig));
        } else {
            if !cfg.role_disjointness || sig.roles.is_empty() {
                continue;
            }
            next = next.with_rdisj(pick_role(rng, &sig), pick_role(rng, &sig));
        }
        let ok = match cfg.kind {
            Kind::R => next.functional.is_empty(),
            Kind::F => next.role_inclusions.is_empty() && next.restriction_violations().is_empty(),
        };
        if ok && next != o {
            o = next;
            added += 1;
        }
    }
    o
}

/// A random ELIQ over `sig` with between 1 and `max_vars` variables.
pub fn random_eliq<R: Rng>(rng: &mut R, sig: &Signature, max_vars: usize) -> Cq {
    let n = rng.gen_range(1..=max_vars);
    let mut atoms = Atoms::default();
    let names: Vec<Symbol> = (0..n).map(|i| Symbol::from(format!("x{i}"))).collect();
    atoms.tops.extend(names.iter().cloned());
    for (i, v) in names.iter().enumerate() {
        for c in &sig.concepts {
            if rng.gen_bool(0.35) {
                atoms.concepts.insert((c.clone(), v.clone()));
            }
        }
        if i > 0 && !sig.roles.is_empty() {
            let parent = names[rng.gen_range(0..i)].clone();
            atoms.add_role(&pick_role(rng, sig), parent, v.clone());
        }
    }
    if sig.roles.is_empty() {
        return Cq::from_atoms(names[0].clone(), atoms)
            .restrict(&[names[0].clone()].into_iter().collect());
    }
    Cq::from_atoms(names[0].clone(), atoms)
}

/// A random ABox over `sig` with individuals `a0..a{n-1}`.
pub fn random_abox<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    individuals: usize,
    assertions: usize,
) -> ABox {
    let inds: Vec<String> = (0..individuals).map(|i| format!("a{i}")).collect();
    let mut a = ABox::new();
    for i in &inds {
        a.assert_concept(crate::syntax::ConceptLabel::Top, i.as_str());
    }
    for _ in 0..assertions {
        if sig.roles.is_empty() || rng.gen_bool(0.5) {
            let c = pick_concept(rng, sig);
            a.assert_name(c.as_str(), inds.choose(rng).unwrap());
        } else {
            let r = pick_role(rng, sig);
            a.assert_role(
                &r,
                inds.choose(rng).unwrap().as_str(),
                inds.choose(rng).unwrap().as_str(),
            );
        }
    }
    a
}

/// A random CQ (not necessarily tree-shaped) over `sig`.
pub fn random_cq<R: Rng>(rng: &mut R, sig: &Signature, vars: usize, atoms: usize) -> Cq {
    let names: Vec<Symbol> = (0..vars).map(|i| Symbol::from(format!("x{i}"))).collect();
    let mut q = Cq::top(names[0].clone());
    for _ in 0..atoms {
        if sig.roles.is_empty() || rng.gen_bool(0.5) {
            q.add_concept(pick_concept(rng, sig), names.choose(rng).unwrap().clone());
        } else {
            let r = pick_role(rng, sig);
            q.add_role(
                &r,
                names.choose(rng).unwrap().clone(),
                names.choose(rng).unwrap().clone(),
            );
        }
    }
    q
}

/// A random basic concept over `sig`.
pub fn random_basic<R: Rng>(rng: &mut R, sig: &Signature) -> BasicConcept {
    match rng.gen_range(0..6) {
        0 => BasicConcept::Top,
        _ => pick_basic(rng, sig),
    }
}

/// `b` as an ELIQ with answer variable `x0`.
pub fn basic_to_eliq(b: &BasicConcept) -> Cq {
    crate::syntax::concept_to_eliq(&b.to_eli())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontier::frontier;
    use crate::parse::{parse_cq, parse_ontology};

    #[test]
    fn cycle_frontier_is_complete() {
        let o = parse_ontology("A sub some r\nsome r sub A\nr rsub s").unwrap();
        let q = parse_cq("eliq: A & B").unwrap();
        let f = frontier(&o, &q).unwrap();
        assert!(bruteforce_frontier_check(&o, &q, &f.members, 4)
            .unwrap()
            .is_ok());
        let p2_only: Vec<Cq> = f
            .members
            .iter()
            .filter(|m| m.labels_of(m.answer()).contains(&Symbol::new("A")))
            .cloned()
            .collect();
        assert_eq!(p2_only.len(), 1);
        match bruteforce_frontier_check(&o, &q, &p2_only, 2).unwrap() {
            Verdict::Counterexample(c) => assert_eq!(c.to_string(), "q(x0) :- B(x0)"),
            Verdict::Ok => panic!("missing member not detected"),
        }
    }

    #[test]
    fn conjunctive_min_frontier_sizes() {
        for (n, expected) in [(1, 2), (2, 4)] {
            let fx = fixture("thm3_conjunctive", n).unwrap();
            let conj = fx.conjunctive.unwrap();
            let q = fx.query.labels_of(fx.query.answer());
            assert_eq!(bruteforce_min_frontier_aq(&conj, &q, &q), expected);
        }
        let single: BTreeSet<Symbol> = [Symbol::new("A")].into_iter().collect();
        assert_eq!(
            bruteforce_min_frontier_aq(&ConjunctiveOntology::default(), &single, &single),
            1
        );
    }

    #[test]
    fn fixtures_match_the_families() {
        let fx = fixture("thm4_dllitef", 2).unwrap();
        assert_eq!(fx.query.var_count(), 5);
        assert_eq!(fx.query.answer().as_str(), "x1");
        let fx = fixture("thm9_disjointness", 1).unwrap();
        assert_eq!(fx.ontology.concept_disjointness.len(), 1);
        assert!(fixture("thm10_hypotheses", 4).is_err());
        assert_eq!(fixture("thm10_hypotheses", 2).unwrap().query.var_count(), 6);
        assert_eq!(fixture("nope", 1).unwrap_err().reason(), "unknown_fixture");
    }

    #[test]
    fn bruteforce_answers_small_cases() {
        let a = crate::parse::parse_abox("r(a,b)\nA(b)").unwrap();
        assert!(bruteforce_answer(
            &a,
            &parse_cq("eliq: some r . A").unwrap(),
            &"a".into()
        ));
        assert!(!bruteforce_answer(
            &a,
            &parse_cq("eliq: some r- . A").unwrap(),
            &"a".into()
        ));
    }

    #[test]
    fn generated_ontologies_respect_their_kind() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let f = random_ontology(&mut rng, &GenConfig::small(Kind::F));
            assert!(f.role_inclusions.is_empty());
            assert!(f.restriction_violations().is_empty());
            let r = random_ontology(&mut rng, &GenConfig::small(Kind::R));
            assert!(r.functional.is_empty());
            assert!(crate::normal::is_normal_form(&r));
        }
    }
}
