// SPDX-License-Identifier: Apache-2.0

//! NPN canonicalization of four-variable functions.
//!
//! The canonical representative of a class is its numerically smallest truth
//! table. Every function stores a transform that rebuilds it from that
//! representative.

use std::sync::OnceLock;

/// `f(x) = out ^ rep(y)` where `y_i = x[perm[i]] ^ bit i of neg`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NpnTransform {
    pub perm: [u8; 4],
    pub neg: u8,
    pub out: bool,
}

impl NpnTransform {
    pub const IDENTITY: NpnTransform = NpnTransform { perm: [0, 1, 2, 3], neg: 0, out: false };

    /// Maps minterm `x` of the transformed function to the minterm of the
    /// representative that it reads.
    fn source_minterm(&self, x: usize) -> usize {
        let mut y = 0;
        for i in 0..4 {
            let bit = ((x >> self.perm[i]) & 1) ^ ((self.neg as usize >> i) & 1);
            y |= bit << i;
        }
        y
    }

    pub fn apply(&self, rep: u16) -> u16 {
        let mut f = 0u16;
        for x in 0..16 {
            let bit = ((rep >> self.source_minterm(x)) & 1) ^ self.out as u16;
            f |= bit << x;
        }
        f
    }

    fn all() -> Vec<NpnTransform> {
        let mut perms = Vec::with_capacity(24);
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    for d in 0..4u8 {
                        let p = [a, b, c, d];
                        if (0..4).all(|i| (0..4).filter(|&j| p[j] == i).count() == 1) {
                            perms.push(p);
                        }
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(768);
        for perm in perms {
            for neg in 0..16u8 {
                for o in [false, true] {
                    out.push(NpnTransform { perm, neg, out: o });
                }
            }
        }
        out
    }
}

pub struct NpnTable {
    canon: Vec<u16>,
    transform: Vec<NpnTransform>,
    classes: Vec<u16>,
}

impl NpnTable {
    pub fn build() -> NpnTable {
        let transforms = NpnTransform::all();
        let mut assigned = vec![false; 1 << 16];
        let mut canon = vec![0u16; 1 << 16];
        let mut transform = vec![NpnTransform::IDENTITY; 1 << 16];
        let mut classes = Vec::new();
        for f in 0..=u16::MAX {
            if assigned[f as usize] {
                continue;
            }
            let rep = transforms.iter().map(|t| t.apply(f)).min().expect("non-empty");
            classes.push(rep);
            for t in &transforms {
                let m = t.apply(rep) as usize;
                if !assigned[m] {
                    assigned[m] = true;
                    canon[m] = rep;
                    transform[m] = *t;
                }
            }
        }
        NpnTable { canon, transform, classes }
    }

    pub fn global() -> &'static NpnTable {
        static TABLE: OnceLock<NpnTable> = OnceLock::new();
        TABLE.get_or_init(NpnTable::build)
    }

    /// Representative and the transform that maps it back onto `f`.
    pub fn canonicalize(&self, f: u16) -> (u16, NpnTransform) {
        (self.canon[f as usize], self.transform[f as usize])
    }

    /// Class representatives in increasing order.
    pub fn classes(&self) -> &[u16] {
        &self.classes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_count_is_222() {
        let t = NpnTable::global();
        assert_eq!(t.classes().len(), 222);
        assert!(t.classes().windows(2).all(|w| w[0] < w[1]));
    }

    /// Burnside's lemma over the 768-element NPN group: a function is fixed by
    /// a transform iff it is constant (no output negation) or alternating
    /// (output negation) along every cycle of the induced minterm map.
    #[test]
    fn burnside_orbit_count() {
        let mut total = 0u64;
        for t in NpnTransform::all() {
            let mut seen = [false; 16];
            let mut cycles = 0;
            let mut odd = false;
            for start in 0..16 {
                if seen[start] {
                    continue;
                }
                let mut len = 0;
                let mut x = start;
                while !seen[x] {
                    seen[x] = true;
                    x = t.source_minterm(x);
                    len += 1;
                }
                cycles += 1;
                odd |= len % 2 == 1;
            }
            if !(t.out && odd) {
                total += 1u64 << cycles;
            }
        }
        assert_eq!(total % 768, 0);
        assert_eq!(total / 768, 222);
    }

    #[test]
    fn stored_transforms_reconstruct_every_function() {
        let t = NpnTable::global();
        for f in 0..=u16::MAX {
            let (rep, tr) = t.canonicalize(f);
            assert_eq!(tr.apply(rep), f);
            assert!(rep <= f);
        }
    }

    #[test]
    fn known_classes() {
        let t = NpnTable::global();
        assert_eq!(t.canonicalize(0).0, 0);
        assert_eq!(t.canonicalize(0xffff).0, 0);
        // All single-literal functions share a class.
        let a = t.canonicalize(0xaaaa).0;
        assert_eq!(t.canonicalize(0x5555).0, a);
        assert_eq!(t.canonicalize(0xff00).0, a);
        // AND4 and NOR4 are NPN-equivalent.
        assert_eq!(t.canonicalize(0x8000).0, t.canonicalize(0x0001).0);
    }
}
