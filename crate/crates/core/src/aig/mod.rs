// SPDX-License-Identifier: Apache-2.0

//! And-Inverter Graphs.
//!
//! An [`Aig`] is an immutable, topologically ordered list of nodes. Node 0 is
//! the constant, nodes `1..=num_inputs` are primary inputs, followed by latch
//! outputs and finally the AND nodes. Inversion lives only on edges, as the
//! complement bit of a [`Lit`].

mod aiger;
mod builder;
mod random;
mod sim;
mod stats;

use std::fmt;
use std::ops::Not;

pub use aiger::{parse_aiger, parse_aiger_with, write_aiger, ParseOptions};
pub use builder::{strash, AigBuilder};
pub use random::random_aig;
pub use sim::{equivalent, simulate, simulate_words, Verdict, DEFAULT_EQUIV_BUDGET};
pub use stats::{extract_stats, levels, AigStats};

/// A reference to a node plus a complement flag, encoded as in AIGER:
/// `2 * node + complemented`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Lit(u32);

impl Lit {
    pub const FALSE: Lit = Lit(0);
    pub const TRUE: Lit = Lit(1);

    #[inline]
    pub fn new(node: usize, complemented: bool) -> Lit {
        Lit(((node as u32) << 1) | complemented as u32)
    }

    #[inline]
    pub fn from_code(code: u32) -> Lit {
        Lit(code)
    }

    /// The AIGER encoding of this literal.
    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn node(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn is_const(self) -> bool {
        self.0 < 2
    }

    /// Flips the complement bit when `c` is set.
    #[inline]
    pub fn xor(self, c: bool) -> Lit {
        Lit(self.0 ^ c as u32)
    }

    /// Drops the complement bit.
    #[inline]
    pub fn regular(self) -> Lit {
        Lit(self.0 & !1)
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_complemented() {
            write!(f, "!n{}", self.node())
        } else {
            write!(f, "n{}", self.node())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Const,
    Input,
    Latch,
    /// Fanins are stored with `fanin0 <= fanin1`.
    And(Lit, Lit),
}

impl Node {
    pub fn fanins(&self) -> Option<(Lit, Lit)> {
        match *self {
            Node::And(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn is_and(&self) -> bool {
        matches!(self, Node::And(..))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LatchInit {
    #[default]
    Zero,
    One,
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Latch {
    pub next: Lit,
    pub init: LatchInit,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AigError {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("structural error: {0}")]
    Structural(String),
    #[error("unsupported feature: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    Argument(String),
}

/// A combinational or sequential And-Inverter Graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Aig {
    nodes: Vec<Node>,
    num_inputs: usize,
    latches: Vec<Latch>,
    outputs: Vec<Lit>,
}

impl Aig {
    /// Assembles a graph from raw parts, checking every structural invariant.
    ///
    /// `nodes` must start with the constant, then `num_inputs` inputs, then one
    /// `Node::Latch` per latch, then AND nodes whose fanins point strictly
    /// backwards. AND fanins are reordered so that `fanin0 <= fanin1`.
    pub fn from_parts(
        mut nodes: Vec<Node>,
        num_inputs: usize,
        latches: Vec<Latch>,
        outputs: Vec<Lit>,
    ) -> Result<Aig, AigError> {
        if nodes.first() != Some(&Node::Const) {
            return Err(AigError::Structural("node 0 must be the constant".into()));
        }
        let first_and = 1 + num_inputs + latches.len();
        if nodes.len() < first_and {
            return Err(AigError::Structural(format!(
                "{} nodes cannot hold {} inputs and {} latches",
                nodes.len(),
                num_inputs,
                latches.len()
            )));
        }
        for (i, node) in nodes.iter_mut().enumerate().skip(1) {
            let expected_kind = if i <= num_inputs {
                Some(Node::Input)
            } else if i < first_and {
                Some(Node::Latch)
            } else {
                None
            };
            match (*node, expected_kind) {
                (Node::And(a, b), None) => {
                    if a.node() >= i || b.node() >= i {
                        return Err(AigError::Structural(format!(
                            "AND node {i} references a later node ({a}, {b})"
                        )));
                    }
                    if a > b {
                        *node = Node::And(b, a);
                    }
                }
                (found, Some(expected)) if found == expected => {}
                (found, _) => {
                    return Err(AigError::Structural(format!(
                        "unexpected node kind {found:?} at index {i}"
                    )))
                }
            }
        }
        let n = nodes.len();
        for lit in outputs.iter().chain(latches.iter().map(|l| &l.next)) {
            if lit.node() >= n {
                return Err(AigError::Structural(format!(
                    "literal {} refers to missing node {}",
                    lit.code(),
                    lit.node()
                )));
            }
        }
        Ok(Aig { nodes, num_inputs, latches, outputs })
    }

    /// A graph with no nodes besides the constant and the given inputs.
    pub fn empty(num_inputs: usize) -> Aig {
        let mut nodes = vec![Node::Const];
        nodes.extend(std::iter::repeat_n(Node::Input, num_inputs));
        Aig { nodes, num_inputs, latches: Vec::new(), outputs: Vec::new() }
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_latches(&self) -> usize {
        self.latches.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Number of AND nodes.
    pub fn num_ands(&self) -> usize {
        self.nodes.len() - self.first_and()
    }

    /// Total node count including the constant, inputs and latches.
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Index of the first AND node.
    pub fn first_and(&self) -> usize {
        1 + self.num_inputs + self.latches.len()
    }

    /// Number of combinational inputs (primary inputs plus latch outputs).
    pub fn num_cis(&self) -> usize {
        self.num_inputs + self.latches.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> Node {
        self.nodes[index]
    }

    pub fn outputs(&self) -> &[Lit] {
        &self.outputs
    }

    pub fn latches(&self) -> &[Latch] {
        &self.latches
    }

    pub fn input(&self, i: usize) -> Lit {
        assert!(i < self.num_inputs, "input {i} out of range");
        Lit::new(1 + i, false)
    }

    /// Combinational outputs: primary outputs followed by latch next-state
    /// functions.
    pub fn co_lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.outputs.iter().copied().chain(self.latches.iter().map(|l| l.next))
    }

    /// Iterates over `(index, fanin0, fanin1)` for every AND node.
    pub fn ands(&self) -> impl Iterator<Item = (usize, Lit, Lit)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .skip(self.first_and())
            .filter_map(|(i, n)| n.fanins().map(|(a, b)| (i, a, b)))
    }

    /// Marks nodes in the transitive fanin of any combinational output.
    pub fn reachable(&self) -> Vec<bool> {
        let mut mark = vec![false; self.nodes.len()];
        for lit in self.co_lits() {
            mark[lit.node()] = true;
        }
        for i in (0..self.nodes.len()).rev() {
            if mark[i] {
                if let Node::And(a, b) = self.nodes[i] {
                    mark[a.node()] = true;
                    mark[b.node()] = true;
                }
            }
        }
        mark
    }

    /// Replaces the output list, keeping the node set.
    pub fn with_outputs(&self, outputs: Vec<Lit>) -> Result<Aig, AigError> {
        Aig::from_parts(self.nodes.clone(), self.num_inputs, self.latches.clone(), outputs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_encoding() {
        let l = Lit::new(3, true);
        assert_eq!(l.code(), 7);
        assert_eq!(l.node(), 3);
        assert!(l.is_complemented());
        assert_eq!(!l, Lit::new(3, false));
        assert_eq!(!Lit::FALSE, Lit::TRUE);
        assert!(Lit::TRUE.is_const());
    }

    #[test]
    fn from_parts_rejects_forward_reference() {
        let nodes = vec![Node::Const, Node::Input, Node::And(Lit::new(1, false), Lit::new(3, false))];
        assert!(matches!(
            Aig::from_parts(nodes, 1, vec![], vec![]),
            Err(AigError::Structural(_))
        ));
    }

    #[test]
    fn from_parts_rejects_dangling_output() {
        let nodes = vec![Node::Const, Node::Input];
        assert!(Aig::from_parts(nodes, 1, vec![], vec![Lit::new(5, false)]).is_err());
    }

    #[test]
    fn from_parts_orders_fanins() {
        let nodes = vec![
            Node::Const,
            Node::Input,
            Node::Input,
            Node::And(Lit::new(2, true), Lit::new(1, false)),
        ];
        let g = Aig::from_parts(nodes, 2, vec![], vec![Lit::new(3, false)]).unwrap();
        assert_eq!(g.node(3), Node::And(Lit::new(1, false), Lit::new(2, true)));
    }
}
