// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{strash, Aig, AigError, LatchInit, Node};

/// Random simulation vectors used by [`equivalent`] above the exhaustive limit.
pub const DEFAULT_EQUIV_BUDGET: usize = 4096;

/// Graphs with at most this many combinational inputs are compared
/// exhaustively.
const EXHAUSTIVE_LIMIT: usize = 16;

/// Bit-parallel simulation. `ci_words` holds one 64-pattern word per
/// combinational input (primary inputs, then latch outputs); the result holds
/// one word per node.
pub fn simulate_words(g: &Aig, ci_words: &[u64]) -> Vec<u64> {
    assert_eq!(ci_words.len(), g.num_cis(), "one word per combinational input");
    let mut values = vec![0u64; g.num_nodes()];
    values[1..=g.num_cis()].copy_from_slice(ci_words);
    for (i, node) in g.nodes().iter().enumerate().skip(g.first_and()) {
        if let Node::And(a, b) = *node {
            let va = values[a.node()] ^ if a.is_complemented() { !0 } else { 0 };
            let vb = values[b.node()] ^ if b.is_complemented() { !0 } else { 0 };
            values[i] = va & vb;
        }
    }
    values
}

/// Evaluates the primary outputs under one input assignment. Latches hold
/// their reset value (undefined resets read as 0).
pub fn simulate(g: &Aig, assignment: &[bool]) -> Result<Vec<bool>, AigError> {
    if assignment.len() != g.num_inputs() {
        return Err(AigError::Argument(format!(
            "assignment has {} bits for {} inputs",
            assignment.len(),
            g.num_inputs()
        )));
    }
    let mut words: Vec<u64> = assignment.iter().map(|&b| b as u64).collect();
    words.extend(g.latches().iter().map(|l| (l.init == LatchInit::One) as u64));
    let values = simulate_words(g, &words);
    Ok(g.outputs()
        .iter()
        .map(|o| ((values[o.node()] & 1) == 1) ^ o.is_complemented())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    ProvenEquivalent,
    /// One value per combinational input (primary inputs, then latches).
    Counterexample(Vec<bool>),
    Undecided,
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::ProvenEquivalent)
    }
}

fn co_words(g: &Aig, ci_words: &[u64]) -> Vec<u64> {
    let values = simulate_words(g, ci_words);
    g.co_lits()
        .map(|l| values[l.node()] ^ if l.is_complemented() { !0 } else { 0 })
        .collect()
}

/// Returns the first pattern (bit index) on which the two graphs differ.
fn first_difference(a: &Aig, b: &Aig, ci_words: &[u64], valid: u64) -> Option<u32> {
    let wa = co_words(a, ci_words);
    let wb = co_words(b, ci_words);
    let diff = wa.iter().zip(&wb).fold(0u64, |acc, (x, y)| acc | (x ^ y)) & valid;
    (diff != 0).then(|| diff.trailing_zeros())
}

/// Combinational equivalence of two graphs over matching inputs and outputs.
///
/// Up to 16 combinational inputs the check is exhaustive. Beyond that a
/// structural comparison after hashing can prove equivalence; otherwise
/// `budget` random vectors either find a counterexample or leave the verdict
/// undecided.
pub fn equivalent(a: &Aig, b: &Aig, budget: usize) -> Result<Verdict, AigError> {
    if a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs() || a.num_latches() != b.num_latches() {
        return Err(AigError::Argument(format!(
            "interface mismatch: {}/{}/{} vs {}/{}/{} inputs/outputs/latches",
            a.num_inputs(),
            a.num_outputs(),
            a.num_latches(),
            b.num_inputs(),
            b.num_outputs(),
            b.num_latches()
        )));
    }
    let n = a.num_cis();
    if n <= EXHAUSTIVE_LIMIT {
        let total: u64 = 1 << n;
        let blocks = total.div_ceil(64);
        let valid = if total >= 64 { !0 } else { (1u64 << total) - 1 };
        let mut words = vec![0u64; n];
        for block in 0..blocks {
            for (i, w) in words.iter_mut().enumerate() {
                *w = pattern_word(i, block);
            }
            if let Some(bit) = first_difference(a, b, &words, valid) {
                let p = block * 64 + bit as u64;
                return Ok(Verdict::Counterexample((0..n).map(|i| (p >> i) & 1 == 1).collect()));
            }
        }
        return Ok(Verdict::ProvenEquivalent);
    }
    if strash(a) == strash(b) {
        return Ok(Verdict::ProvenEquivalent);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_a16e);
    let mut words = vec![0u64; n];
    for _ in 0..budget.div_ceil(64) {
        for w in words.iter_mut() {
            *w = rng.gen();
        }
        if let Some(bit) = first_difference(a, b, &words, !0) {
            return Ok(Verdict::Counterexample(words.iter().map(|w| (w >> bit) & 1 == 1).collect()));
        }
    }
    Ok(Verdict::Undecided)
}

/// Word `block` of the exhaustive enumeration for input `i`, where pattern
/// `p` assigns bit `i` of `p` to input `i`.
fn pattern_word(i: usize, block: u64) -> u64 {
    const MASKS: [u64; 6] = [
        0xaaaa_aaaa_aaaa_aaaa,
        0xcccc_cccc_cccc_cccc,
        0xf0f0_f0f0_f0f0_f0f0,
        0xff00_ff00_ff00_ff00,
        0xffff_0000_ffff_0000,
        0xffff_ffff_0000_0000,
    ];
    if i < 6 {
        MASKS[i]
    } else if (block >> (i - 6)) & 1 == 1 {
        !0
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::{AigBuilder, Lit};

    fn and_not() -> Aig {
        let mut b = AigBuilder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let p = b.and(x, !y);
        b.add_output(p);
        b.finish()
    }

    #[test]
    fn simulate_and_not() {
        let g = and_not();
        assert_eq!(simulate(&g, &[true, false]).unwrap(), vec![true]);
        assert_eq!(simulate(&g, &[true, true]).unwrap(), vec![false]);
        assert!(matches!(simulate(&g, &[true]), Err(AigError::Argument(_))));
    }

    #[test]
    fn constant_true_output() {
        let mut b = AigBuilder::new(3);
        b.add_output(Lit::TRUE);
        let g = b.finish();
        for p in 0..8u32 {
            let bits: Vec<bool> = (0..3).map(|i| (p >> i) & 1 == 1).collect();
            assert_eq!(simulate(&g, &bits).unwrap(), vec![true]);
        }
    }

    #[test]
    fn and_versus_miswired_or() {
        let mut b = AigBuilder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let p = b.and(x, y);
        b.add_output(p);
        let and = b.finish();
        // OR(a, b) = !AND(!a, !b), with the output complement left off.
        let mut b = AigBuilder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let p = b.and(!x, !y);
        b.add_output(p);
        let bad_or = b.finish();
        // The first differing pattern in enumeration order is a=0, b=0.
        assert_eq!(equivalent(&and, &bad_or, 0).unwrap(), Verdict::Counterexample(vec![false, false]));
        let mut b = AigBuilder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let p = b.and(!x, !y);
        b.add_output(!p);
        let or = b.finish();
        assert_eq!(equivalent(&and, &or, 0).unwrap(), Verdict::Counterexample(vec![true, false]));
    }

    #[test]
    fn reflexive_and_interface_checked() {
        let g = and_not();
        assert!(equivalent(&g, &g, 0).unwrap().is_equivalent());
        let other = Aig::empty(3);
        assert!(matches!(equivalent(&g, &other, 0), Err(AigError::Argument(_))));
    }

    #[test]
    fn wide_graphs_use_random_vectors() {
        let build = |flip: bool| {
            let mut b = AigBuilder::new(20);
            let ins = b.inputs();
            let mut acc = ins[0];
            for &x in &ins[1..] {
                acc = b.xor(acc, x);
            }
            b.add_output(acc.xor(flip));
            b.finish()
        };
        assert!(equivalent(&build(false), &build(false), 64).unwrap().is_equivalent());
        match equivalent(&build(false), &build(true), 64).unwrap() {
            Verdict::Counterexample(cex) => {
                let a = simulate(&build(false), &cex).unwrap();
                let b = simulate(&build(true), &cex).unwrap();
                assert_ne!(a, b);
            }
            v => panic!("expected counterexample, got {v:?}"),
        }
        // Same function, different structure: random simulation cannot prove it.
        let mut b = AigBuilder::new(20);
        let ins = b.inputs();
        let p = b.and(ins[0], ins[1]);
        b.add_output(p);
        let g1 = b.finish();
        let mut b = AigBuilder::new(20);
        let ins = b.inputs();
        let n = b.or(!ins[0], !ins[1]);
        b.add_output(!n);
        let g2 = b.finish();
        assert!(equivalent(&g1, &g2, 256).unwrap().is_equivalent());
        let mut b = AigBuilder::new(20);
        let ins = b.inputs();
        let t = b.and(ins[0], ins[1]);
        let u = b.and(ins[0], !ins[1]);
        let v = b.or(t, u);
        let w = b.and(v, ins[1]);
        b.add_output(w);
        assert_eq!(equivalent(&g1, &b.finish(), 256).unwrap(), Verdict::Undecided);
    }
}
