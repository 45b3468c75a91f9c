use dlfrontier::frontier::{frontier_with, DialectChoice, Options};
use dlfrontier::reasoner::Reasoner;
use dlfrontier::testkit::{
    bruteforce_frontier_check, check_conditions, random_eliq, random_ontology, GenConfig, Kind,
    Verdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run(kind: Kind, seeds: std::ops::Range<u64>, bound: usize) {
    run_with(kind, seeds, bound, 3, true)
}

fn run_with(
    kind: Kind,
    seeds: std::ops::Range<u64>,
    bound: usize,
    statements: usize,
    normal: bool,
) {
    run_sized(kind, seeds, bound, statements, normal, 3)
}

fn run_sized(
    kind: Kind,
    seeds: std::ops::Range<u64>,
    bound: usize,
    statements: usize,
    normal: bool,
    vars: usize,
) {
    for seed in seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GenConfig {
            statements,
            normal,
            ..GenConfig::small(kind)
        };
        let o = random_ontology(&mut rng, &cfg);
        let q = random_eliq(&mut rng, &cfg.signature(), vars);
        let r = Reasoner::with_signature(&o, &q.signature()).unwrap();
        if !r.cq_satisfiable(&q) {
            continue;
        }
        let dialect = match kind {
            Kind::R => DialectChoice::R,
            Kind::F => DialectChoice::F,
        };
        let f = frontier_with(
            &o,
            &q,
            Options {
                dialect,
                prune: false,
            },
        )
        .unwrap_or_else(|e| panic!("seed {seed}: {e}\n{o}\n{q}"));
        assert_eq!(
            check_conditions(&o, &q, &f.members).unwrap(),
            None,
            "seed {seed}"
        );
        match bruteforce_frontier_check(&o, &q, &f.members, bound).unwrap() {
            Verdict::Ok => {}
            Verdict::Counterexample(c) => panic!(
                "seed {seed}: {c} uncovered\n{o}\nq = {q}\nmembers: {:?}",
                f.members.iter().map(|m| m.to_string()).collect::<Vec<_>>()
            ),
        }
    }
}

#[test]
fn random_r_frontiers_are_complete() {
    run(Kind::R, 0..600, 4);
}

#[test]
fn random_f_frontiers_are_complete() {
    run(Kind::F, 0..600, 4);
}

#[test]
fn larger_non_normal_ontologies() {
    run_with(Kind::R, 0..300, 4, 5, false);
    run_with(Kind::F, 0..300, 4, 5, false);
}

#[test]
fn larger_functional_queries() {
    run_sized(Kind::F, 2000..2400, 4, 3, true, 4);
}
