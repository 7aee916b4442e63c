// SPDX-License-Identifier: Apache-2.0

//! Truth tables over up to 16 variables.
//!
//! Tables with fewer than six variables occupy one word with the pattern
//! replicated, so word-wise operations never need tail masking.

use std::ops::{BitAnd, BitOr, Not};

const VAR_MASKS: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

pub const MAX_VARS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    vars: usize,
    words: Vec<u64>,
}

fn num_words(vars: usize) -> usize {
    if vars <= 6 {
        1
    } else {
        1 << (vars - 6)
    }
}

impl TruthTable {
    pub fn zero(vars: usize) -> TruthTable {
        assert!(vars <= MAX_VARS);
        TruthTable { vars, words: vec![0; num_words(vars)] }
    }

    pub fn one(vars: usize) -> TruthTable {
        !TruthTable::zero(vars)
    }

    /// The projection onto variable `v`.
    pub fn var(vars: usize, v: usize) -> TruthTable {
        assert!(v < vars);
        let mut t = TruthTable::zero(vars);
        if v < 6 {
            t.words.iter_mut().for_each(|w| *w = VAR_MASKS[v]);
        } else {
            let stride = 1 << (v - 6);
            for (i, w) in t.words.iter_mut().enumerate() {
                if i & stride != 0 {
                    *w = !0;
                }
            }
        }
        t
    }

    pub fn from_words(vars: usize, words: Vec<u64>) -> TruthTable {
        assert_eq!(words.len(), num_words(vars));
        let mut t = TruthTable { vars, words };
        if vars < 6 {
            let bits = 1u32 << vars;
            let base = t.words[0] & ((1u64 << bits) - 1);
            let mut w = base;
            let mut filled = bits;
            while filled < 64 {
                w |= w << filled;
                filled *= 2;
            }
            t.words[0] = w;
        }
        t
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    /// The low 16 bits, meaningful for tables over at most four variables.
    pub fn as_u16(&self) -> u16 {
        debug_assert!(self.vars <= 4);
        self.words[0] as u16
    }

    pub fn bit(&self, minterm: usize) -> bool {
        (self.words[minterm / 64] >> (minterm % 64)) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_one(&self) -> bool {
        self.words.iter().all(|&w| w == !0)
    }

    /// `self` implies `other`.
    pub fn implies(&self, other: &TruthTable) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn and_not(&self, other: &TruthTable) -> TruthTable {
        TruthTable {
            vars: self.vars,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        }
    }

    /// Cofactor with variable `v` fixed to `value`, still expressed over all
    /// variables (independent of `v`).
    pub fn cofactor(&self, v: usize, value: bool) -> TruthTable {
        let mut out = self.clone();
        if v < 6 {
            let shift = 1 << v;
            for w in out.words.iter_mut() {
                *w = if value {
                    let hi = *w & VAR_MASKS[v];
                    hi | (hi >> shift)
                } else {
                    let lo = *w & !VAR_MASKS[v];
                    lo | (lo << shift)
                };
            }
        } else {
            let stride = 1 << (v - 6);
            for i in 0..out.words.len() {
                if i & stride == 0 {
                    let src = if value { i | stride } else { i };
                    let w = self.words[src];
                    out.words[i] = w;
                    out.words[i | stride] = w;
                }
            }
        }
        out
    }

    pub fn depends_on(&self, v: usize) -> bool {
        self.cofactor(v, false) != self.cofactor(v, true)
    }

    pub fn count_ones(&self) -> u32 {
        let full: u32 = self.words.iter().map(|w| w.count_ones()).sum();
        if self.vars < 6 {
            full >> (6 - self.vars)
        } else {
            full
        }
    }
}

impl<'a> BitAnd<&'a TruthTable> for &'a TruthTable {
    type Output = TruthTable;
    fn bitand(self, rhs: &TruthTable) -> TruthTable {
        TruthTable { vars: self.vars, words: self.words.iter().zip(&rhs.words).map(|(a, b)| a & b).collect() }
    }
}

impl<'a> BitOr<&'a TruthTable> for &'a TruthTable {
    type Output = TruthTable;
    fn bitor(self, rhs: &TruthTable) -> TruthTable {
        TruthTable { vars: self.vars, words: self.words.iter().zip(&rhs.words).map(|(a, b)| a | b).collect() }
    }
}

impl Not for TruthTable {
    type Output = TruthTable;
    fn not(mut self) -> TruthTable {
        self.words.iter_mut().for_each(|w| *w = !*w);
        self
    }
}

impl Not for &TruthTable {
    type Output = TruthTable;
    fn not(self) -> TruthTable {
        !self.clone()
    }
}

/// Projection of variable `v` over four variables.
pub const fn var4(v: usize) -> u16 {
    VAR_MASKS[v] as u16
}

/// Cofactor of a four-variable function, returned as a function independent
/// of `v`.
pub fn cofactor4(f: u16, v: usize, value: bool) -> u16 {
    let m = var4(v);
    let shift = 1 << v;
    if value {
        let hi = f & m;
        hi | (hi >> shift)
    } else {
        let lo = f & !m;
        lo | (lo << shift)
    }
}

pub fn depends_on4(f: u16, v: usize) -> bool {
    cofactor4(f, v, false) != cofactor4(f, v, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(t: &TruthTable, f: impl Fn(usize) -> bool) {
        for m in 0..(1usize << t.vars()) {
            assert_eq!(t.bit(m), f(m), "minterm {m}");
        }
    }

    #[test]
    fn projections() {
        for vars in [3, 6, 8] {
            for v in 0..vars {
                brute(&TruthTable::var(vars, v), |m| (m >> v) & 1 == 1);
            }
        }
    }

    #[test]
    fn cofactors_match_brute_force() {
        let vars = 8;
        let a = TruthTable::var(vars, 1);
        let b = TruthTable::var(vars, 7);
        let c = TruthTable::var(vars, 4);
        let f = &(&a & &b) | &(!&c);
        for v in [1, 4, 7] {
            for value in [false, true] {
                let cf = f.cofactor(v, value);
                brute(&cf, |m| {
                    let m2 = if value { m | (1 << v) } else { m & !(1 << v) };
                    f.bit(m2)
                });
            }
        }
        assert!(f.depends_on(7));
        assert!(!f.depends_on(0));
    }

    #[test]
    fn small_tables_replicate() {
        let t = TruthTable::from_words(2, vec![0b1000]);
        assert_eq!(t.words()[0], 0x8888_8888_8888_8888);
        assert_eq!(t.count_ones(), 1);
        assert_eq!(t, &TruthTable::var(2, 0) & &TruthTable::var(2, 1));
    }

    #[test]
    fn four_variable_helpers() {
        let f = var4(0) & var4(3);
        assert_eq!(cofactor4(f, 3, true), var4(0));
        assert_eq!(cofactor4(f, 3, false), 0);
        assert!(depends_on4(f, 0) && !depends_on4(f, 1));
    }
}
