// SPDX-License-Identifier: Apache-2.0

//! Window-based resubstitution: re-express a node through existing nodes.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::aig::{Aig, Lit};

use super::network::Network;
use super::truth::TruthTable;

const MAX_LEAVES: usize = 8;
const MAX_DEPTH: u32 = 4;
const MAX_DIVISORS: usize = 64;

enum Candidate {
    /// The node equals an existing literal.
    Zero(Lit),
    /// The node equals `AND(a, b)`, optionally complemented.
    One(Lit, Lit, bool),
}

fn collect_divisors(net: &Network, root: usize, leaves: &[usize], interior: &[usize], mffc: &FxHashSet<usize>) -> Vec<usize> {
    let mut divs: Vec<usize> = leaves.to_vec();
    // Cone nodes come in topological order; the root is last and excluded.
    divs.extend(interior.iter().copied().filter(|&n| n != root));
    divs.truncate(MAX_DIVISORS);
    let mut marked: FxHashSet<usize> = divs.iter().copied().collect();
    let root_level = net.level(root);
    let mut i = 0;
    while i < divs.len() && divs.len() < MAX_DIVISORS {
        let d = divs[i];
        i += 1;
        for &w in net.fanouts(d) {
            let w = w as usize;
            if w == root || marked.contains(&w) || mffc.contains(&w) || net.level(w) >= root_level {
                continue;
            }
            let [a, b] = net.fanins(w);
            if marked.contains(&a.node()) && marked.contains(&b.node()) {
                marked.insert(w);
                divs.push(w);
                if divs.len() == MAX_DIVISORS {
                    break;
                }
            }
        }
    }
    divs
}

/// Cone nodes that stay alive because the replacement references `used`.
fn survivors(net: &Network, used: &[usize], mffc: &FxHashSet<usize>) -> usize {
    let mut seen: FxHashSet<usize> = FxHashSet::default();
    let mut stack: Vec<usize> = used.iter().copied().filter(|n| mffc.contains(n)).collect();
    while let Some(n) = stack.pop() {
        if !seen.insert(n) {
            continue;
        }
        for l in net.fanins(n) {
            if mffc.contains(&l.node()) {
                stack.push(l.node());
            }
        }
    }
    seen.len()
}

fn find_candidate(
    net: &Network,
    root: usize,
    f: &TruthTable,
    divs: &[usize],
    tts: &FxHashMap<usize, TruthTable>,
    mffc: &FxHashSet<usize>,
) -> Option<(Candidate, i32)> {
    let size = mffc.len() as i32;
    let nf = !f;
    let mut best: Option<(Candidate, i32)> = None;
    let mut consider = |cand: Candidate, gain: i32| {
        if best.as_ref().is_none_or(|(_, g)| gain > *g) {
            best = Some((cand, gain));
        }
    };
    for &d in divs {
        let t = &tts[&d];
        if t == f || *t == nf {
            let gain = size - survivors(net, &[d], mffc) as i32;
            consider(Candidate::Zero(Lit::new(d, *t == nf)), gain);
        }
    }
    // Divisor literals implied by the target (for AND) or by its complement
    // (for OR, as the complement of an AND).
    for (target, negate) in [(f, false), (&nf, true)] {
        let mut lits: Vec<(Lit, TruthTable)> = Vec::new();
        for &d in divs {
            let t = &tts[&d];
            if target.implies(t) {
                lits.push((Lit::new(d, false), t.clone()));
            }
            let nt = !t;
            if target.implies(&nt) {
                lits.push((Lit::new(d, true), nt));
            }
        }
        for i in 0..lits.len() {
            for j in i + 1..lits.len() {
                if &(&lits[i].1 & &lits[j].1) != target {
                    continue;
                }
                let (a, b) = (lits[i].0, lits[j].0);
                let (used, added) = match net.find_and(a, b) {
                    Some(l) if l.node() == root => continue,
                    Some(l) => (vec![l.node()], 0),
                    None => (vec![a.node(), b.node()], 1),
                };
                let gain = size - survivors(net, &used, mffc) as i32 - added;
                consider(Candidate::One(a, b, negate), gain);
            }
        }
    }
    best
}

/// One sweep of resubstitution over every node of `g`.
pub fn resub(g: &Aig, zero_cost: bool) -> Aig {
    let mut net = Network::from_aig(g);
    let original = net.len();
    for n in 0..original {
        if !net.is_and(n) {
            continue;
        }
        let (leaves, interior) = net.reconv_cut(n, MAX_LEAVES, MAX_DEPTH);
        let mffc: FxHashSet<usize> = net.mffc(n, &leaves).into_iter().collect();
        let divs = collect_divisors(&net, n, &leaves, &interior, &mffc);
        let mut order = interior.clone();
        order.extend(divs.iter().copied().filter(|d| !interior.contains(d) && !leaves.contains(d)));
        let tts = net.simulate_window(&leaves, &order);
        let Some((cand, gain)) = find_candidate(&net, n, &tts[&n], &divs, &tts, &mffc) else { continue };
        if gain > 0 || (zero_cost && gain == 0) {
            let lit = match cand {
                Candidate::Zero(l) => l,
                Candidate::One(a, b, negate) => net.and(a, b).xor(negate),
            };
            if lit.node() != n {
                net.replace(n, lit);
            }
        }
    }
    net.to_aig()
}
