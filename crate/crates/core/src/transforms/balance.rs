// SPDX-License-Identifier: Apache-2.0

//! Depth reduction by rebuilding multi-input AND trees.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::aig::{strash, Aig, AigBuilder, Lit, Node};

/// Collapses every maximal single-fanout AND tree into a multi-input
/// conjunction and rebuilds it, always pairing the two shallowest operands.
pub fn balance(g: &Aig) -> Aig {
    let g = strash(g);
    let n = g.num_nodes();
    // A node is absorbed into its parent's super-gate when its only reference
    // is an uncomplemented AND fanin.
    let mut refs = vec![0u32; n];
    let mut plain_and_refs = vec![0u32; n];
    for (_, a, b) in g.ands() {
        for l in [a, b] {
            refs[l.node()] += 1;
            if !l.is_complemented() {
                plain_and_refs[l.node()] += 1;
            }
        }
    }
    for l in g.co_lits() {
        refs[l.node()] += 1;
    }
    let absorbed = |i: usize| g.node(i).is_and() && refs[i] == 1 && plain_and_refs[i] == 1;

    let mut b = AigBuilder::with_latches(g.num_inputs(), g.num_latches());
    let mut map: Vec<Lit> = (0..g.first_and()).map(|i| Lit::new(i, false)).collect();
    map.resize(n, Lit::FALSE);
    let mut leaves: Vec<Lit> = Vec::new();
    let mut stack: Vec<Lit> = Vec::new();
    for i in g.first_and()..n {
        let Node::And(f0, f1) = g.node(i) else { continue };
        if absorbed(i) {
            continue;
        }
        leaves.clear();
        stack.clear();
        stack.extend([f1, f0]);
        while let Some(l) = stack.pop() {
            if !l.is_complemented() && absorbed(l.node()) {
                let Node::And(a, c) = g.node(l.node()) else { unreachable!() };
                stack.extend([c, a]);
            } else {
                leaves.push(map[l.node()].xor(l.is_complemented()));
            }
        }
        map[i] = conjoin(&mut b, &mut leaves);
    }
    let remap = |l: Lit| map[l.node()].xor(l.is_complemented());
    for (i, latch) in g.latches().iter().enumerate() {
        b.set_latch(i, remap(latch.next), latch.init);
    }
    for &o in g.outputs() {
        b.add_output(remap(o));
    }
    b.finish()
}

fn conjoin(b: &mut AigBuilder, leaves: &mut Vec<Lit>) -> Lit {
    leaves.sort_unstable();
    leaves.dedup();
    if leaves.first() == Some(&Lit::FALSE) {
        return Lit::FALSE;
    }
    leaves.retain(|&l| l != Lit::TRUE);
    if leaves.windows(2).any(|w| w[0].node() == w[1].node()) {
        return Lit::FALSE;
    }
    let mut heap: BinaryHeap<Reverse<(u32, u32)>> =
        leaves.iter().map(|&l| Reverse((b.level(l), l.code()))).collect();
    while heap.len() > 1 {
        let Reverse((_, x)) = heap.pop().expect("two operands");
        let Reverse((_, y)) = heap.pop().expect("two operands");
        let l = b.and(Lit::from_code(x), Lit::from_code(y));
        heap.push(Reverse((b.level(l), l.code())));
    }
    heap.pop().map_or(Lit::TRUE, |Reverse((_, l))| Lit::from_code(l))
}
