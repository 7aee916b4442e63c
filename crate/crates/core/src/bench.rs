// SPDX-License-Identifier: Apache-2.0

//! Small arithmetic benchmark circuits.
//!
//! Cells are written in two-level form (XOR and majority as sums of
//! minterms, multiplexers as AND-OR) so the graphs carry the kind of
//! redundancy a synthesis flow is expected to remove.

use crate::aig::{strash, Aig, AigBuilder, Lit};

pub struct Benchmark {
    pub name: &'static str,
    pub aig: Aig,
}

pub const NAMES: [&str; 6] = ["adder", "bar", "max", "multiplier", "square", "sqrt"];

/// Every desk benchmark, in [`NAMES`] order.
pub fn all() -> Vec<Benchmark> {
    NAMES.iter().map(|&n| Benchmark { name: n, aig: by_name(n).expect("known name") }).collect()
}

/// The named benchmark, structurally hashed so logic that only feeds unused
/// intermediate results (such as the difference bits of a comparison) is gone.
pub fn by_name(name: &str) -> Option<Aig> {
    Some(strash(&match name {
        "adder" => adder(16),
        "bar" => barrel_shifter(16),
        "max" => max4(6),
        "multiplier" => multiplier(6),
        "square" => square(8),
        "sqrt" => sqrt(12),
        _ => return None,
    }))
}

fn xor3_sop(b: &mut AigBuilder, x: Lit, y: Lit, z: Lit) -> Lit {
    let mut terms = Vec::with_capacity(4);
    for (px, py, pz) in [(true, false, false), (false, true, false), (false, false, true), (true, true, true)] {
        let t = b.and(x.xor(!px), y.xor(!py));
        terms.push(b.and(t, z.xor(!pz)));
    }
    b.or_all(&terms)
}

fn maj_sop(b: &mut AigBuilder, x: Lit, y: Lit, z: Lit) -> Lit {
    let p = b.and(x, y);
    let q = b.and(x, z);
    let r = b.and(y, z);
    b.or_all(&[p, q, r])
}

fn mux_sop(b: &mut AigBuilder, sel: Lit, then: Lit, other: Lit) -> Lit {
    let p = b.and(sel, then);
    let q = b.and(!sel, other);
    // The consensus term keeps the cover hazard-free and is logically redundant.
    let r = b.and(then, other);
    b.or_all(&[p, q, r])
}

/// Ripple-carry sum of two words plus carry-in; returns `width + 1` bits.
fn add(b: &mut AigBuilder, x: &[Lit], y: &[Lit], mut carry: Lit) -> Vec<Lit> {
    let mut out = Vec::with_capacity(x.len() + 1);
    for (&xi, &yi) in x.iter().zip(y) {
        out.push(xor3_sop(b, xi, yi, carry));
        carry = maj_sop(b, xi, yi, carry);
    }
    out.push(carry);
    out
}

/// `x - y` in two's complement; the last bit is the carry (1 when `x >= y`).
fn sub(b: &mut AigBuilder, x: &[Lit], y: &[Lit]) -> Vec<Lit> {
    let ny: Vec<Lit> = y.iter().map(|&l| !l).collect();
    add(b, x, &ny, Lit::TRUE)
}

fn word(b: &AigBuilder, start: usize, width: usize) -> Vec<Lit> {
    (start..start + width).map(|i| b.input(i)).collect()
}

pub fn adder(width: usize) -> Aig {
    let mut b = AigBuilder::new(2 * width);
    let x = word(&b, 0, width);
    let y = word(&b, width, width);
    for l in add(&mut b, &x, &y, Lit::FALSE) {
        b.add_output(l);
    }
    b.finish()
}

/// Logarithmic left rotator with `log2(width)` select bits.
pub fn barrel_shifter(width: usize) -> Aig {
    assert!(width.is_power_of_two());
    let stages = width.trailing_zeros() as usize;
    let mut b = AigBuilder::new(width + stages);
    let mut data = word(&b, 0, width);
    for s in 0..stages {
        let sel = b.input(width + s);
        let shift = 1 << s;
        data = (0..width)
            .map(|i| {
                let rotated = data[(i + width - shift) % width];
                mux_sop(&mut b, sel, rotated, data[i])
            })
            .collect();
    }
    for l in data {
        b.add_output(l);
    }
    b.finish()
}

fn max2(b: &mut AigBuilder, x: &[Lit], y: &[Lit]) -> Vec<Lit> {
    let diff = sub(b, x, y);
    let x_ge_y = *diff.last().expect("carry bit");
    x.iter().zip(y).map(|(&xi, &yi)| mux_sop(b, x_ge_y, xi, yi)).collect()
}

/// Maximum of four unsigned words.
pub fn max4(width: usize) -> Aig {
    let mut b = AigBuilder::new(4 * width);
    let words: Vec<Vec<Lit>> = (0..4).map(|k| word(&b, k * width, width)).collect();
    let m01 = max2(&mut b, &words[0], &words[1]);
    let m23 = max2(&mut b, &words[2], &words[3]);
    for l in max2(&mut b, &m01, &m23) {
        b.add_output(l);
    }
    b.finish()
}

/// Array multiplier built from ripple-carry rows.
fn multiply(b: &mut AigBuilder, x: &[Lit], y: &[Lit]) -> Vec<Lit> {
    let w = x.len();
    let mut acc: Vec<Lit> = x.iter().map(|&xi| b.and(xi, y[0])).collect();
    let mut product = vec![acc[0]];
    for (j, &yj) in y.iter().enumerate().skip(1) {
        let row: Vec<Lit> = x.iter().map(|&xi| b.and(xi, yj)).collect();
        let upper: Vec<Lit> = acc[1..].iter().copied().chain(std::iter::once(Lit::FALSE)).collect();
        acc = add(b, &upper, &row, Lit::FALSE);
        acc.truncate(w + 1);
        product.push(acc[0]);
        if j == y.len() - 1 {
            product.extend_from_slice(&acc[1..]);
        }
    }
    if y.len() == 1 {
        product.extend_from_slice(&acc[1..]);
    }
    product
}

pub fn multiplier(width: usize) -> Aig {
    let mut b = AigBuilder::new(2 * width);
    let x = word(&b, 0, width);
    let y = word(&b, width, width);
    for l in multiply(&mut b, &x, &y) {
        b.add_output(l);
    }
    b.finish()
}

pub fn square(width: usize) -> Aig {
    let mut b = AigBuilder::new(width);
    let x = word(&b, 0, width);
    for l in multiply(&mut b, &x, &x) {
        b.add_output(l);
    }
    b.finish()
}

/// Integer square root of a `width`-bit word by the restoring method.
pub fn sqrt(width: usize) -> Aig {
    assert!(width.is_multiple_of(2));
    let half = width / 2;
    let mut b = AigBuilder::new(width);
    let x = word(&b, 0, width);
    // Remainder and root, least significant bit first.
    let mut rem: Vec<Lit> = vec![Lit::FALSE; half + 3];
    let mut root: Vec<Lit> = Vec::new();
    for step in 0..half {
        // rem = rem * 4 + next two bits of x.
        let hi = width - 2 * step;
        let mut shifted = vec![x[hi - 2], x[hi - 1]];
        shifted.extend_from_slice(&rem[..rem.len() - 2]);
        // Trial subtrahend: root * 4 + 1.
        let mut trial = vec![Lit::TRUE, Lit::FALSE];
        trial.extend(root.iter().copied());
        trial.resize(shifted.len(), Lit::FALSE);
        let diff = sub(&mut b, &shifted, &trial);
        let fits = diff[shifted.len()];
        rem = shifted.iter().zip(&diff).map(|(&s, &d)| mux_sop(&mut b, fits, d, s)).collect();
        root.insert(0, fits);
    }
    for l in root {
        b.add_output(l);
    }
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::simulate;

    fn eval(g: &Aig, inputs: u64) -> u64 {
        let bits: Vec<bool> = (0..g.num_inputs()).map(|i| inputs >> i & 1 == 1).collect();
        simulate(g, &bits).unwrap().iter().enumerate().fold(0, |acc, (i, &v)| acc | (v as u64) << i)
    }

    #[test]
    fn arithmetic_is_correct() {
        let g = adder(4);
        for x in 0..16u64 {
            for y in 0..16u64 {
                assert_eq!(eval(&g, x | y << 4), x + y);
            }
        }
        let g = multiplier(4);
        for x in 0..16u64 {
            for y in 0..16u64 {
                assert_eq!(eval(&g, x | y << 4), x * y, "{x}*{y}");
            }
        }
        let g = square(5);
        for x in 0..32u64 {
            assert_eq!(eval(&g, x), x * x);
        }
        let g = sqrt(8);
        for x in 0..256u64 {
            assert_eq!(eval(&g, x), (x as f64).sqrt().floor() as u64, "sqrt {x}");
        }
        let g = max4(3);
        for v in 0..4096u64 {
            let w: Vec<u64> = (0..4).map(|k| v >> (3 * k) & 7).collect();
            assert_eq!(eval(&g, v), *w.iter().max().unwrap());
        }
        let g = barrel_shifter(8);
        for d in 0..256u64 {
            for s in 0..8u64 {
                let expect = ((d << s) | (d >> ((8 - s) % 8))) & 0xff;
                assert_eq!(eval(&g, d | s << 8), expect);
            }
        }
    }

    #[test]
    fn sizes_are_desk_scale() {
        for bm in all() {
            let n = bm.aig.num_ands();
            assert!((100..=5000).contains(&n), "{} has {n} nodes", bm.name);
        }
    }
}
