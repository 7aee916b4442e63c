// SPDX-License-Identifier: Apache-2.0

//! Cut-based rewriting against the precomputed four-input library.

use crate::aig::{Aig, Lit};

use super::library::NpnLibrary;
use super::network::{Network, Pricing};

const MAX_LEAVES: usize = 4;
const CUTS_PER_NODE: usize = 8;
/// Cone size beyond which a four-leaf cut is considered stale.
const MAX_CONE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Cut {
    len: u8,
    leaves: [u32; MAX_LEAVES],
}

impl Cut {
    fn unit(n: usize) -> Cut {
        Cut { len: 1, leaves: [n as u32, 0, 0, 0] }
    }

    pub(crate) fn leaves(&self) -> &[u32] {
        &self.leaves[..self.len as usize]
    }

    fn merge(&self, other: &Cut) -> Option<Cut> {
        let mut out = [0u32; MAX_LEAVES];
        let (a, b) = (self.leaves(), other.leaves());
        let (mut i, mut j, mut k) = (0, 0, 0);
        while i < a.len() || j < b.len() {
            let next = if j == b.len() || (i < a.len() && a[i] < b[j]) {
                i += 1;
                a[i - 1]
            } else if i == a.len() || b[j] < a[i] {
                j += 1;
                b[j - 1]
            } else {
                i += 1;
                j += 1;
                a[i - 1]
            };
            if k == MAX_LEAVES {
                return None;
            }
            out[k] = next;
            k += 1;
        }
        Some(Cut { len: k as u8, leaves: out })
    }

    fn dominates(&self, other: &Cut) -> bool {
        self.len <= other.len && self.leaves().iter().all(|l| other.leaves().contains(l))
    }
}

/// Memoized bottom-up cut sets. Entries are dropped when a node's fanins
/// change; deeper staleness is caught when a cut's cone is simulated.
pub(crate) struct CutSets {
    cuts: Vec<Option<Vec<Cut>>>,
}

impl CutSets {
    pub(crate) fn new() -> CutSets {
        CutSets { cuts: Vec::new() }
    }

    pub(crate) fn get(&mut self, net: &mut Network, root: usize) -> Vec<Cut> {
        if self.cuts.len() < net.len() {
            self.cuts.resize(net.len(), None);
        }
        let mut stack = vec![(root, false)];
        while let Some((n, ready)) = stack.pop() {
            if net.take_touched(n) {
                self.cuts[n] = None;
            }
            if self.cuts[n].is_some() {
                continue;
            }
            if !net.is_and(n) {
                self.cuts[n] = Some(vec![Cut::unit(n)]);
                continue;
            }
            let [a, b] = net.fanins(n);
            if !ready {
                stack.push((n, true));
                stack.push((b.node(), false));
                stack.push((a.node(), false));
                continue;
            }
            let with_unit = |c: &Option<Vec<Cut>>, x: usize| {
                let mut v = c.clone().unwrap_or_default();
                if !v.contains(&Cut::unit(x)) {
                    v.push(Cut::unit(x));
                }
                v
            };
            let ca = with_unit(&self.cuts[a.node()], a.node());
            let cb = with_unit(&self.cuts[b.node()], b.node());
            let mut merged: Vec<Cut> = Vec::new();
            for x in &ca {
                for y in &cb {
                    if let Some(c) = x.merge(y) {
                        merged.push(c);
                    }
                }
            }
            merged.sort_unstable();
            merged.dedup();
            let mut kept: Vec<Cut> = Vec::new();
            for c in merged {
                if !kept.iter().any(|k| k.dominates(&c)) {
                    kept.push(c);
                    if kept.len() == CUTS_PER_NODE {
                        break;
                    }
                }
            }
            self.cuts[n] = Some(kept);
        }
        self.cuts[root].clone().unwrap_or_default()
    }
}

/// One sweep of library rewriting over every node of `g`.
pub fn rewrite(g: &Aig, zero_cost: bool) -> Aig {
    let lib = NpnLibrary::global();
    let mut net = Network::from_aig(g);
    let mut cuts = CutSets::new();
    let original = net.len();
    for n in 0..original {
        if !net.is_and(n) {
            continue;
        }
        let mut best: Option<(Pricing, Vec<Lit>, super::template::Template)> = None;
        for cut in cuts.get(&mut net, n) {
            let leaves: Vec<usize> = cut.leaves().iter().map(|&l| l as usize).collect();
            if leaves == [n] {
                continue;
            }
            let Some(tt) = net.cone_truth64(n, &leaves, MAX_CONE) else { continue };
            let template = lib.instantiate(tt as u16);
            let mut lits: Vec<Lit> = leaves.iter().map(|&l| Lit::new(l, false)).collect();
            lits.resize(MAX_LEAVES, Lit::FALSE);
            let Some(p) = net.price(n, &lits, &template) else { continue };
            let better = match &best {
                None => true,
                Some((q, _, _)) => p.gain > q.gain || (p.gain == q.gain && p.level < q.level),
            };
            if better {
                best = Some((p, lits, template));
            }
        }
        if let Some((p, lits, template)) = best {
            if p.gain > 0 || (zero_cost && p.gain == 0) {
                net.commit(n, &lits, &template);
            }
        }
    }
    net.to_aig()
}
