//! Algebraic properties of the reasoning kernel and the text formats.

use dlfrontier::normal::{is_normal_form, normalize};
use dlfrontier::parse::{parse_abox, parse_cq, parse_ontology};
use dlfrontier::reasoner::Reasoner;
use dlfrontier::testkit::{
    basic_to_eliq, random_abox, random_basic, random_eliq, random_ontology, GenConfig, Kind,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kind(r: bool) -> Kind {
    if r {
        Kind::R
    } else {
        Kind::F
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printed_syntax_parses_back(seed in any::<u64>(), r in any::<bool>(), normal in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GenConfig { statements: 5, normal, ..GenConfig::small(kind(r)) };
        let o = random_ontology(&mut rng, &cfg);
        prop_assert_eq!(parse_ontology(&o.to_string()).unwrap(), o);
        let q = random_eliq(&mut rng, &cfg.signature(), 4);
        prop_assert_eq!(parse_cq(&q.to_string()).unwrap(), q);
        let a = random_abox(&mut rng, &cfg.signature(), 3, 5);
        prop_assert_eq!(parse_abox(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn normalization_is_conservative(seed in any::<u64>(), r in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GenConfig { statements: 4, normal: false, ..GenConfig::small(kind(r)) };
        let sig = cfg.signature();
        let o = random_ontology(&mut rng, &cfg);
        let (n, _) = normalize(&o);
        prop_assert!(is_normal_form(&n));
        let (ro, rn) = (Reasoner::with_signature(&o, &sig).unwrap(), Reasoner::with_signature(&n, &sig).unwrap());
        for _ in 0..10 {
            let (b1, b2) = (random_basic(&mut rng, &sig), random_basic(&mut rng, &sig));
            prop_assert_eq!(ro.entails_basic(&b1, &b2), rn.entails_basic(&b1, &b2), "{} {}", b1, b2);
        }
        let q = random_eliq(&mut rng, &sig, 3);
        let a = random_abox(&mut rng, &sig, 3, 4);
        for i in a.individuals() {
            prop_assert_eq!(ro.certain_answer(&a, &q, &i), rn.certain_answer(&a, &q, &i));
        }
    }

    #[test]
    fn containment_is_a_preorder(seed in any::<u64>(), r in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GenConfig::small(kind(r));
        let sig = cfg.signature();
        let o = random_ontology(&mut rng, &cfg);
        let re = Reasoner::with_signature(&o, &sig).unwrap();
        let qs: Vec<_> = (0..3)
            .map(|_| random_eliq(&mut rng, &sig, 3))
            .filter(|q| re.cq_satisfiable(q))
            .collect();
        for a in &qs {
            prop_assert!(re.contained(a, a).unwrap());
            let m = re.minimize_eliq(a).unwrap();
            prop_assert!(re.equivalent(a, &m).unwrap());
            prop_assert!(m.var_count() <= a.var_count());
            for b in &qs {
                for c in &qs {
                    if re.contained(a, b).unwrap() && re.contained(b, c).unwrap() {
                        prop_assert!(re.contained(a, c).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn basic_entailment_is_transitive(seed in any::<u64>(), r in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GenConfig::small(kind(r));
        let sig = cfg.signature();
        let o = random_ontology(&mut rng, &cfg);
        let re = Reasoner::with_signature(&o, &sig).unwrap();
        let bs: Vec<_> = (0..4).map(|_| random_basic(&mut rng, &sig)).collect();
        for a in &bs {
            prop_assert!(re.entails_basic(a, a));
            for b in &bs {
                for c in &bs {
                    if re.entails_basic(a, b) && re.entails_basic(b, c) {
                        prop_assert!(re.entails_basic(a, c));
                    }
                }
            }
            // a satisfiable concept holds of its own canonical query
            let q = basic_to_eliq(a);
            if re.cq_satisfiable(&q) {
                prop_assert!(re.certain_answer(&q.to_abox(), &q, q.answer()));
            }
        }
    }
}
