//! Randomised invariants.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ccloop::construct::{check_semidirect_theorem, semidirect, ActionMap};
use ccloop::fixtures::{self, random_group, random_relabel};
use ccloop::identities::{classify, is_cc, Property};
use ccloop::search::{find_models, SearchSpec};
use ccloop::structure::{are_isomorphic, center, nuclear_automorphisms, nuclei};
use ccloop::suite::{check_loop, Verdict};
use ccloop::LoopTable;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn groups_pass_the_battery(seed in any::<u64>()) {
        let g = random_group(&mut rng(seed));
        for r in check_loop("group", &g) {
            prop_assert!(!matches!(r.verdict, Verdict::Fail(_)), "{}: {:?}", r.name, r.verdict);
        }
        let n = nuclei(&g);
        prop_assert_eq!(n.nucleus.len(), g.order());
    }

    #[test]
    fn relabelling_preserves_structure(seed in any::<u64>(), which in 0usize..2) {
        let q = if which == 0 { fixtures::t16() } else { fixtures::t27() };
        let p = random_relabel(&q, &mut rng(seed));
        prop_assert!(are_isomorphic(&q, &p));
        prop_assert_eq!(classify(&q).flags, classify(&p).flags);
        prop_assert_eq!(center(&q).len(), center(&p).len());
    }

    #[test]
    fn tbl_round_trip(seed in any::<u64>()) {
        let g = random_group(&mut rng(seed));
        prop_assert_eq!(LoopTable::parse_tbl(&g.to_tbl()).unwrap(), g);
    }

    #[test]
    fn division_laws(seed in any::<u64>(), order in 2usize..8) {
        // any loop the finder produces, not just groups
        let out = find_models(&SearchSpec::new(order).seed(seed).limit(1)).unwrap();
        let q = &out.models[0];
        for x in q.elements() {
            for y in q.elements() {
                prop_assert_eq!(q.mul(x, q.ldiv(x, y)), y);
                prop_assert_eq!(q.mul(q.rdiv(x, y), y), x);
                prop_assert_eq!(q.ldiv(x, q.mul(x, y)), y);
                prop_assert_eq!(q.rdiv(q.mul(x, y), y), x);
            }
        }
    }

    #[test]
    fn models_satisfy_what_was_required(seed in any::<u64>(), order in 4usize..9, pick in 0usize..4) {
        let require = ["cc", "pa", "commutative", "flexible"][pick];
        let spec = SearchSpec::new(order).require(require).unwrap().seed(seed).limit(3);
        let out = find_models(&spec).unwrap();
        let p: Property = require.parse().unwrap();
        for m in &out.models {
            prop_assert!(p.holds(m));
            for (flag, w) in &classify(m).witnesses {
                prop_assert!(w.recheck(m), "witness for {} does not recheck", flag);
            }
        }
        // same spec, same models
        prop_assert_eq!(find_models(&spec).unwrap().models, out.models);
    }

    #[test]
    fn nuclear_actions_give_cc_products(seed in any::<u64>(), pick in 0usize..3) {
        let mut r = rng(seed);
        let k = [random_group(&mut r), fixtures::t16(), fixtures::cyclic(5)][pick].clone();
        let naut = nuclear_automorphisms(&k).unwrap();
        let beta = &naut[(seed as usize) % naut.len()];
        let (a, phi) = ActionMap::cyclic_powers(&k, beta);
        let t = check_semidirect_theorem(&a, &k, &phi).unwrap();
        prop_assert!(t.agree() && t.cc && t.nuclear && t.triples);
        prop_assert!(is_cc(&semidirect(&a, &k, &phi).unwrap()));
    }
}
