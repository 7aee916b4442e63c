// SPDX-License-Identifier: Apache-2.0

use crate::aig::{strash, Aig, Lit, Node};

use super::truth::TruthTable;

/// A small single-output AIG over abstract leaves, used as a replacement
/// pattern. Node 0 is the constant, nodes `1..=num_leaves` are the leaves and
/// gate `g` is node `num_leaves + 1 + g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub num_leaves: usize,
    pub gates: Vec<(Lit, Lit)>,
    pub output: Lit,
}

impl Template {
    /// A template that forwards `lit` (a constant or a leaf).
    pub fn trivial(num_leaves: usize, lit: Lit) -> Template {
        Template { num_leaves, gates: Vec::new(), output: lit }
    }

    /// Converts the first output of a latch-free graph, dropping unused nodes.
    pub fn from_aig(g: &Aig) -> Template {
        assert_eq!(g.num_latches(), 0);
        assert!(g.num_outputs() >= 1);
        let single = g.with_outputs(vec![g.outputs()[0]]).expect("output exists");
        let s = strash(&single);
        let gates = s
            .nodes()
            .iter()
            .filter_map(|n| match n {
                Node::And(a, b) => Some((*a, *b)),
                _ => None,
            })
            .collect();
        Template { num_leaves: s.num_inputs(), gates, output: s.outputs()[0] }
    }

    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn eval(&self, leaves: &[TruthTable]) -> TruthTable {
        assert_eq!(leaves.len(), self.num_leaves);
        let vars = leaves.first().map_or(0, |t| t.vars());
        let mut sig = Vec::with_capacity(1 + self.num_leaves + self.gates.len());
        sig.push(TruthTable::zero(vars));
        sig.extend(leaves.iter().cloned());
        let get = |sig: &[TruthTable], l: Lit| {
            let t = sig[l.node()].clone();
            if l.is_complemented() {
                !t
            } else {
                t
            }
        };
        for &(a, b) in &self.gates {
            let t = &get(&sig, a) & &get(&sig, b);
            sig.push(t);
        }
        get(&sig, self.output)
    }

    /// Truth table over four leaves; fewer leaves are padded.
    pub fn truth4(&self) -> u16 {
        assert!(self.num_leaves <= 4);
        let mut sig: Vec<u16> = vec![0];
        sig.extend((0..self.num_leaves).map(super::truth::var4));
        let get = |sig: &[u16], l: Lit| sig[l.node()] ^ if l.is_complemented() { 0xffff } else { 0 };
        for &(a, b) in &self.gates {
            let t = get(&sig, a) & get(&sig, b);
            sig.push(t);
        }
        get(&sig, self.output)
    }
}
