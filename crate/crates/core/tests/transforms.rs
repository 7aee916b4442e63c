// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use synflow::aig::{equivalent, levels, random_aig, Aig, AigBuilder, Lit, Verdict};
use synflow::transforms::{apply, balance, refactor, resub, rewrite, Network, TransformId};

fn chain4() -> Aig {
    let mut b = AigBuilder::new(4);
    let x = b.inputs();
    let mut acc = x[0];
    for &l in &x[1..] {
        acc = b.and(acc, l);
    }
    b.add_output(acc);
    b.finish()
}

fn depth(g: &Aig) -> u32 {
    levels(g).1
}

fn assert_equivalent(a: &Aig, b: &Aig, what: &str) {
    match equivalent(a, b, synflow::aig::DEFAULT_EQUIV_BUDGET) {
        Ok(Verdict::ProvenEquivalent) => {}
        other => panic!("{what}: {other:?}"),
    }
}

#[test]
fn balance_chain_of_four() {
    let g = chain4();
    assert_eq!(depth(&g), 3);
    let b = balance(&g);
    assert_eq!(depth(&b), 2);
    assert_eq!(b.num_ands(), 3);
    assert_equivalent(&g, &b, "balance");
    // A balanced tree is a fixpoint for depth.
    assert_eq!(depth(&balance(&b)), 2);
    assert_eq!(depth(&apply(&g, TransformId::Balance)), 2);
}

#[test]
fn empty_graph_is_preserved() {
    let g = AigBuilder::new(0).finish();
    for t in TransformId::ALL {
        let r = apply(&g, t);
        assert_eq!((r.num_inputs(), r.num_outputs(), r.num_ands()), (0, 0, 0));
    }
}

#[test]
fn transform_names_round_trip() {
    for t in TransformId::ALL {
        assert_eq!(t.name().parse::<TransformId>().unwrap(), t);
        assert_eq!(TransformId::from_index(t.index()), Some(t));
    }
    assert_eq!("rewrite   -z".parse::<TransformId>().unwrap(), TransformId::RewriteZ);
    assert!("rewrite -l".parse::<TransformId>().is_err());
    assert_eq!(TransformId::ALL.len(), TransformId::COUNT);
}

/// `(a & b & c) | (a & b & !c)` written out without sharing.
fn redundant_sop() -> Aig {
    let mut b = AigBuilder::raw(3);
    let x = b.inputs();
    let p = b.and(x[0], x[1]);
    let p1 = b.and(p, x[2]);
    let q = b.and(x[1], x[0]);
    let q1 = b.and(q, !x[2]);
    let o = b.or(p1, q1);
    b.add_output(o);
    b.finish()
}

#[test]
fn duplicated_logic_collapses() {
    let g = synflow::aig::strash(&redundant_sop());
    assert_eq!(g.num_ands(), 4);
    for (name, r) in [("rewrite", rewrite(&g, false)), ("refactor", refactor(&g, false)), ("resub", resub(&g, false))] {
        assert_equivalent(&g, &r, name);
        assert_eq!(r.num_ands(), 1, "{name}");
    }
}

#[test]
fn resub_rewires_through_existing_nodes() {
    // n = a & b & c is rebuilt from scratch although p = a & b and q = b & c exist.
    let mut b = AigBuilder::new(3);
    let x = b.inputs();
    let p = b.and(x[0], x[1]);
    let q = b.and(x[1], x[2]);
    let t = b.and(x[0], x[2]);
    let n = b.and(t, x[1]);
    b.add_output(p);
    b.add_output(q);
    b.add_output(n);
    let g = b.finish();
    assert_eq!(g.num_ands(), 4);
    let r = resub(&g, false);
    assert_equivalent(&g, &r, "resub");
    assert_eq!(r.num_ands(), 3);
}

#[test]
fn parity_is_left_alone_by_refactor() {
    let mut b = AigBuilder::new(5);
    let x = b.inputs();
    let mut acc = x[0];
    for &l in &x[1..] {
        acc = b.xor(acc, l);
    }
    b.add_output(acc);
    let g = b.finish();
    let r = refactor(&g, false);
    assert_eq!(r.num_ands(), g.num_ands());
    assert_equivalent(&g, &r, "refactor");
}

#[test]
fn minimal_graph_is_a_rewrite_fixpoint() {
    let g = chain4();
    let r = rewrite(&g, false);
    assert_eq!(r.num_ands(), 3);
    assert_equivalent(&g, &r, "rewrite");
}

#[test]
fn network_replace_keeps_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let g = random_aig(&mut rng, 6, 60, 3);
        let mut net = Network::from_aig(&g);
        net.check().unwrap();
        // Replace each node by one of its fanins; function changes, structure must stay sound.
        for n in 0..net.len() {
            if net.is_and(n) {
                let f = net.fanins(n)[0];
                net.replace(n, f);
                net.check().unwrap();
            }
        }
        let out = net.to_aig();
        assert_eq!(out.num_outputs(), g.num_outputs());
    }
}

#[test]
fn network_round_trip_is_equivalent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let g = random_aig(&mut rng, 8, 80, 4);
        let net = Network::from_aig(&g);
        assert_eq!(net.num_ands(), g.num_ands());
        assert_equivalent(&g, &net.to_aig(), "round trip");
    }
}

#[test]
fn latches_pass_through() {
    let mut b = AigBuilder::with_latches(2, 1);
    let x = b.inputs();
    let l = b.latch(0);
    let p = b.and(x[0], l);
    let q = b.and(p, x[1]);
    let r = b.and(q, x[0]);
    b.set_latch(0, r, synflow::aig::LatchInit::One);
    b.add_output(!q);
    let g = b.finish();
    for t in TransformId::ALL {
        let out = apply(&g, t);
        assert_eq!(out.num_latches(), 1);
        assert_eq!(out.latches()[0].init, synflow::aig::LatchInit::One);
        assert_equivalent(&g, &out, t.name());
    }
}

fn arb_graph() -> impl Strategy<Value = Aig> {
    (any::<u64>(), 2usize..=10, 5usize..=120, 1usize..=6)
        .prop_map(|(seed, pis, ands, pos)| random_aig(&mut ChaCha8Rng::seed_from_u64(seed), pis, ands, pos))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_transform_preserves_function_and_interface(g in arb_graph()) {
        let (_, depth0) = levels(&g);
        for t in TransformId::ALL {
            let r = apply(&g, t);
            prop_assert_eq!(equivalent(&g, &r, synflow::aig::DEFAULT_EQUIV_BUDGET).unwrap(), Verdict::ProvenEquivalent, "{}", t);
            prop_assert_eq!(r.num_inputs(), g.num_inputs());
            prop_assert_eq!(r.num_outputs(), g.num_outputs());
            prop_assert_eq!(r.num_latches(), g.num_latches());
            match t {
                TransformId::Balance => prop_assert!(levels(&r).1 <= depth0, "balance deepened the graph"),
                TransformId::Resub | TransformId::Rewrite | TransformId::Refactor => {
                    prop_assert!(r.num_ands() <= g.num_ands(), "{} grew {} -> {}", t, g.num_ands(), r.num_ands())
                }
                _ => {}
            }
        }
    }

    #[test]
    fn outputs_never_reference_missing_nodes(g in arb_graph()) {
        for t in TransformId::ALL {
            let r = apply(&g, t);
            for o in r.outputs() {
                prop_assert!(o.node() < r.num_nodes());
            }
            let _: Lit = r.outputs()[0];
        }
    }
}
