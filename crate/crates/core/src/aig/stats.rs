// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::{Aig, Node};

/// Per-node logic levels and the maximum level over nodes feeding outputs.
pub fn levels(g: &Aig) -> (Vec<u32>, u32) {
    let mut level = vec![0u32; g.num_nodes()];
    for (i, node) in g.nodes().iter().enumerate() {
        if let Node::And(a, b) = *node {
            level[i] = 1 + level[a.node()].max(level[b.node()]);
        }
    }
    let max = g.co_lits().map(|l| level[l.node()]).max().unwrap_or(0);
    (level, max)
}

/// Raw circuit characteristics from which the agent's state is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AigStats {
    pub num_pi: usize,
    pub num_po: usize,
    pub num_nodes: usize,
    /// AND fanin edges plus output and latch-input edges.
    pub num_edges: usize,
    pub num_levels: usize,
    pub num_latches: usize,
    /// AND nodes over AND nodes plus primary inputs.
    pub pct_ands: f64,
    /// Complemented edges over all counted edges.
    pub pct_nots: f64,
}

pub fn extract_stats(g: &Aig) -> AigStats {
    let num_nodes = g.num_ands();
    let mut complemented = 0usize;
    for (_, a, b) in g.ands() {
        complemented += a.is_complemented() as usize + b.is_complemented() as usize;
    }
    let mut co_edges = 0usize;
    for l in g.co_lits() {
        co_edges += 1;
        complemented += l.is_complemented() as usize;
    }
    let num_edges = 2 * num_nodes + co_edges;
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    AigStats {
        num_pi: g.num_inputs(),
        num_po: g.num_outputs(),
        num_nodes,
        num_edges,
        num_levels: levels(g).1 as usize,
        num_latches: g.num_latches(),
        pct_ands: ratio(num_nodes, num_nodes + g.num_inputs()),
        pct_nots: ratio(complemented, num_edges),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::{simulate, AigBuilder, Lit};

    #[test]
    fn single_and() {
        let mut b = AigBuilder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let p = b.and(x, y);
        b.add_output(p);
        let s = extract_stats(&b.finish());
        assert_eq!(s.num_nodes, 1);
        assert_eq!(s.num_levels, 1);
        assert_eq!(s.num_edges, 3);
        assert_eq!(s.pct_nots, 0.0);
        assert_eq!(s.num_latches, 0);
        assert!((s.pct_ands - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn fully_complemented() {
        let mut b = AigBuilder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let p = b.and(!x, !y);
        b.add_output(!p);
        assert_eq!(extract_stats(&b.finish()).pct_nots, 1.0);
    }

    #[test]
    fn xor_from_three_ands() {
        let mut b = AigBuilder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let p = b.xor(x, y);
        b.add_output(p);
        let g = b.finish();
        for (bits, want) in [([false, false], false), ([true, false], true), ([false, true], true), ([true, true], false)] {
            assert_eq!(simulate(&g, &bits).unwrap(), vec![want]);
        }
        let s = extract_stats(&g);
        assert_eq!((s.num_nodes, s.num_levels), (3, 2));
    }

    #[test]
    fn level_examples() {
        let mut b = AigBuilder::new(4);
        let ins = b.inputs();
        let chain = b.and_all(&ins);
        b.add_output(chain);
        let (lv, max) = levels(&b.finish());
        assert_eq!(max, 3);
        assert_eq!(lv[chain.node()], 3);
        let mut b = AigBuilder::new(2);
        b.add_output(Lit::TRUE);
        assert_eq!(levels(&b.finish()).1, 0);
    }
}
