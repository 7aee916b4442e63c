// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use synflow::aig::{equivalent, extract_stats, parse_aiger, random_aig, simulate, write_aiger, Aig, Verdict};
use synflow::bench;

fn arb_graph() -> impl Strategy<Value = Aig> {
    (any::<u64>(), 1usize..=14, 0usize..=150, 1usize..=6)
        .prop_map(|(seed, pis, ands, pos)| random_aig(&mut ChaCha8Rng::seed_from_u64(seed), pis, ands, pos))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn both_encodings_round_trip(g in arb_graph()) {
        for ascii in [true, false] {
            let back = parse_aiger(&write_aiger(&g, ascii)).unwrap();
            prop_assert_eq!(&back, &g);
        }
    }

    #[test]
    fn binary_is_never_larger_than_ascii(g in arb_graph()) {
        prop_assert!(write_aiger(&g, false).len() <= write_aiger(&g, true).len());
    }

    #[test]
    fn equivalence_is_reflexive(g in arb_graph()) {
        prop_assert_eq!(equivalent(&g, &g, 0).unwrap(), Verdict::ProvenEquivalent);
    }
}

#[test]
fn benchmarks_survive_a_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for b in bench::all() {
        let path = dir.path().join(format!("{}.aig", b.name));
        std::fs::write(&path, write_aiger(&b.aig, false)).unwrap();
        let back = parse_aiger(&std::fs::read(&path).unwrap()).unwrap();
        assert_eq!(back, b.aig, "{}", b.name);
        assert_eq!(extract_stats(&back), extract_stats(&b.aig));
    }
}

#[test]
fn counterexamples_really_distinguish() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut found = 0;
    for _ in 0..50 {
        let a = random_aig(&mut rng, 6, 30, 1);
        let b = random_aig(&mut rng, 6, 30, 1);
        if let Verdict::Counterexample(cex) = equivalent(&a, &b, 0).unwrap() {
            assert_ne!(simulate(&a, &cex).unwrap(), simulate(&b, &cex).unwrap());
            found += 1;
        }
    }
    assert!(found > 40);
}
