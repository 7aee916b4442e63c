// SPDX-License-Identifier: Apache-2.0

//! Collapse-and-refactor of large reconvergent cones.

use crate::aig::{Aig, AigBuilder, Lit};

use super::network::Network;
use super::template::Template;
use super::truth::TruthTable;

const MAX_LEAVES: usize = 12;

/// A product term: `mask` selects variables, `pol` gives their phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cube {
    pub mask: u32,
    pub pol: u32,
}

impl Cube {
    fn has(&self, v: usize, phase: bool) -> bool {
        self.mask >> v & 1 == 1 && (self.pol >> v & 1 == 1) == phase
    }
}

/// Irredundant sum-of-products of an incompletely specified function with
/// on-set `lower` and allowed set `upper` (Minato-Morreale).
pub fn isop(lower: &TruthTable, upper: &TruthTable) -> Vec<Cube> {
    assert!(lower.implies(upper));
    let mut cubes = Vec::new();
    let mut out = vec![0u64; lower.words().len()];
    isop_words(lower.words(), upper.words(), lower.vars(), &mut cubes, &mut out);
    cubes
}

const MASKS: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

fn tag(cubes: &mut [Cube], v: usize, phase: bool) {
    for c in cubes {
        c.mask |= 1 << v;
        if phase {
            c.pol |= 1 << v;
        }
    }
}

/// Recursion over word slices: the cofactors of a variable at or above six
/// are the two halves of the table. Writes the cover's function to `out`.
fn isop_words(l: &[u64], u: &[u64], vars: usize, cubes: &mut Vec<Cube>, out: &mut [u64]) {
    if vars <= 6 {
        out[0] = isop_word(l[0], u[0], vars, cubes);
        return;
    }
    let half = l.len() / 2;
    let (l0, l1) = l.split_at(half);
    let (u0, u1) = u.split_at(half);
    let v = vars - 1;
    if l0 == l1 && u0 == u1 {
        let (o0, o1) = out.split_at_mut(half);
        isop_words(l0, u0, v, cubes, o0);
        o1.copy_from_slice(o0);
        return;
    }
    let mut r0 = vec![0u64; half];
    let mut r1 = vec![0u64; half];
    let mut r2 = vec![0u64; half];
    let lo: Vec<u64> = l0.iter().zip(u1).map(|(a, b)| a & !b).collect();
    let start = cubes.len();
    isop_words(&lo, u0, v, cubes, &mut r0);
    tag(&mut cubes[start..], v, false);
    let hi: Vec<u64> = l1.iter().zip(u0).map(|(a, b)| a & !b).collect();
    let mid = cubes.len();
    isop_words(&hi, u1, v, cubes, &mut r1);
    tag(&mut cubes[mid..], v, true);
    let rest: Vec<u64> = (0..half).map(|i| (l0[i] & !r0[i]) | (l1[i] & !r1[i])).collect();
    let both: Vec<u64> = u0.iter().zip(u1).map(|(a, b)| a & b).collect();
    isop_words(&rest, &both, v, cubes, &mut r2);
    for i in 0..half {
        out[i] = r0[i] | r2[i];
        out[half + i] = r1[i] | r2[i];
    }
}

fn isop_word(l: u64, u: u64, vars: usize, cubes: &mut Vec<Cube>) -> u64 {
    if l == 0 {
        return 0;
    }
    if u == !0 {
        cubes.push(Cube { mask: 0, pol: 0 });
        return !0;
    }
    let cof = |x: u64, v: usize| {
        let s = 1 << v;
        let hi = x & MASKS[v];
        let lo = x & !MASKS[v];
        (lo | lo << s, hi | hi >> s)
    };
    let v = (0..vars)
        .rev()
        .find(|&v| {
            let (a, b) = cof(l, v);
            let (c, d) = cof(u, v);
            a != b || c != d
        })
        .expect("non-constant bounds");
    let (l0, l1) = cof(l, v);
    let (u0, u1) = cof(u, v);
    let start = cubes.len();
    let r0 = isop_word(l0 & !u1, u0, v, cubes);
    tag(&mut cubes[start..], v, false);
    let mid = cubes.len();
    let r1 = isop_word(l1 & !u0, u1, v, cubes);
    tag(&mut cubes[mid..], v, true);
    let r2 = isop_word((l0 & !r0) | (l1 & !r1), u0 & u1, v, cubes);
    (r0 & !MASKS[v]) | (r1 & MASKS[v]) | r2
}

fn balanced(b: &mut AigBuilder, mut lits: Vec<Lit>, or: bool) -> Lit {
    if lits.is_empty() {
        return if or { Lit::FALSE } else { Lit::TRUE };
    }
    while lits.len() > 1 {
        let mut next = Vec::with_capacity(lits.len().div_ceil(2));
        for pair in lits.chunks(2) {
            next.push(match pair {
                [x, y] if or => b.or(*x, *y),
                [x, y] => b.and(*x, *y),
                [x] => *x,
                _ => unreachable!(),
            });
        }
        lits = next;
    }
    lits[0]
}

/// Algebraic factoring by repeatedly dividing out the most frequent literal.
fn factor(b: &mut AigBuilder, leaves: &[Lit], cubes: &[Cube]) -> Lit {
    if cubes.is_empty() {
        return Lit::FALSE;
    }
    if cubes.iter().any(|c| c.mask == 0) {
        return Lit::TRUE;
    }
    let cube_lit = |b: &mut AigBuilder, c: &Cube| {
        let lits = (0..leaves.len())
            .filter(|&v| c.mask >> v & 1 == 1)
            .map(|v| leaves[v].xor(c.pol >> v & 1 == 0))
            .collect();
        balanced(b, lits, false)
    };
    if cubes.len() == 1 {
        return cube_lit(b, &cubes[0]);
    }
    let mut best = (0usize, 0usize, false);
    for v in 0..leaves.len() {
        for phase in [true, false] {
            let n = cubes.iter().filter(|c| c.has(v, phase)).count();
            if n > best.0 {
                best = (n, v, phase);
            }
        }
    }
    let (count, v, phase) = best;
    if count <= 1 {
        let terms = cubes.iter().map(|c| cube_lit(b, c)).collect();
        return balanced(b, terms, true);
    }
    let mut quotient = Vec::new();
    let mut remainder = Vec::new();
    for c in cubes {
        if c.has(v, phase) {
            quotient.push(Cube { mask: c.mask & !(1 << v), pol: c.pol & !(1 << v) });
        } else {
            remainder.push(*c);
        }
    }
    let q = factor(b, leaves, &quotient);
    let lit = leaves[v].xor(!phase);
    let head = b.and(lit, q);
    if remainder.is_empty() {
        return head;
    }
    let r = factor(b, leaves, &remainder);
    b.or(head, r)
}

/// A factored-form template computing `f` over `f.vars()` leaves.
pub fn factored_template(f: &TruthTable) -> Template {
    let build = |func: &TruthTable, negate: bool| {
        let mut b = AigBuilder::new(func.vars());
        let leaves = b.inputs();
        let cubes = isop(func, func);
        let out = factor(&mut b, &leaves, &cubes);
        b.add_output(out.xor(negate));
        Template::from_aig(&b.finish())
    };
    let pos = build(f, false);
    let neg = build(&!f, true);
    if neg.num_gates() < pos.num_gates() {
        neg
    } else {
        pos
    }
}

/// One sweep of cone resynthesis over every node of `g`.
pub fn refactor(g: &Aig, zero_cost: bool) -> Aig {
    let mut net = Network::from_aig(g);
    let original = net.len();
    for n in 0..original {
        if !net.is_and(n) {
            continue;
        }
        let (leaves, interior) = net.reconv_cut(n, MAX_LEAVES, u32::MAX);
        if interior.len() < 2 {
            continue;
        }
        let tts = net.simulate_window(&leaves, &interior);
        let template = factored_template(&tts[&n]);
        let lits: Vec<Lit> = leaves.iter().map(|&l| Lit::new(l, false)).collect();
        let Some(p) = net.price(n, &lits, &template) else { continue };
        if p.gain > 0 || (zero_cost && p.gain == 0) {
            net.commit(n, &lits, &template);
        }
    }
    net.to_aig()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cover_function(cubes: &[Cube], vars: usize) -> TruthTable {
        let mut f = TruthTable::zero(vars);
        for c in cubes {
            let mut t = TruthTable::one(vars);
            for v in 0..vars {
                if c.mask >> v & 1 == 1 {
                    let x = TruthTable::var(vars, v);
                    t = if c.pol >> v & 1 == 1 { &t & &x } else { t.and_not(&x) };
                }
            }
            f = &f | &t;
        }
        f
    }

    #[test]
    fn isop_covers_exactly() {
        let mut state = 0x1234_5678_9abc_def0u64;
        for vars in [3, 5, 7, 9] {
            for _ in 0..20 {
                let words = (0..if vars <= 6 { 1 } else { 1 << (vars - 6) })
                    .map(|_| {
                        state ^= state << 13;
                        state ^= state >> 7;
                        state ^= state << 17;
                        state
                    })
                    .collect();
                let f = TruthTable::from_words(vars, words);
                let cubes = isop(&f, &f);
                assert_eq!(cover_function(&cubes, vars), f);
                let t = factored_template(&f);
                let leaves: Vec<_> = (0..vars).map(|v| TruthTable::var(vars, v)).collect();
                assert_eq!(t.eval(&leaves), f);
            }
        }
    }

    #[test]
    fn isop_is_irredundant_for_known_functions() {
        // Majority of three has exactly three prime implicants.
        let (a, b, c) = (TruthTable::var(3, 0), TruthTable::var(3, 1), TruthTable::var(3, 2));
        let maj = &(&(&a & &b) | &(&a & &c)) | &(&b & &c);
        assert_eq!(isop(&maj, &maj).len(), 3);
        // x0 x1 + !x0 x1 collapses to x1.
        let f = TruthTable::var(3, 1);
        assert_eq!(isop(&f, &f), vec![Cube { mask: 2, pol: 2 }]);
    }
}
