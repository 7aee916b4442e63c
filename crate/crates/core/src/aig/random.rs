// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use super::{Aig, AigBuilder, Lit};

/// A random combinational graph with some reconvergence, structurally hashed.
///
/// Fanins are drawn mostly from recently created nodes so the graph has depth
/// rather than being a flat layer over the inputs. Dangling nodes are dropped,
/// so the result may hold fewer than `num_ands` gates.
pub fn random_aig<R: Rng + ?Sized>(rng: &mut R, num_inputs: usize, num_ands: usize, num_outputs: usize) -> Aig {
    assert!(num_inputs >= 1);
    let mut b = AigBuilder::new(num_inputs);
    let mut pool: Vec<Lit> = b.inputs();
    let pick = |rng: &mut R, pool: &[Lit]| {
        let n = pool.len();
        let i = if rng.gen_bool(0.6) { n - 1 - rng.gen_range(0..n.min(8)) } else { rng.gen_range(0..n) };
        pool[i].xor(rng.gen_bool(0.5))
    };
    for _ in 0..num_ands {
        let x = pick(rng, &pool);
        let y = pick(rng, &pool);
        let l = b.and(x, y);
        if !l.is_const() && !pool.contains(&l.regular()) {
            pool.push(l.regular());
        }
    }
    for k in 0..num_outputs {
        let l = if k == 0 { pool[pool.len() - 1] } else { pick(rng, &pool) };
        b.add_output(l.xor(rng.gen_bool(0.5)));
    }
    super::strash(&b.finish())
}
