// SPDX-License-Identifier: Apache-2.0

use rustc_hash::FxHashMap;

use super::{Aig, Latch, LatchInit, Lit, Node};

/// Incremental graph constructor.
///
/// A hashing builder (the default) simplifies trivial ANDs and merges
/// structurally identical nodes as they are created. A raw builder creates
/// exactly the nodes it is asked for, which is useful for producing
/// deliberately redundant graphs.
#[derive(Debug, Clone)]
pub struct AigBuilder {
    nodes: Vec<Node>,
    levels: Vec<u32>,
    num_inputs: usize,
    latches: Vec<Latch>,
    outputs: Vec<Lit>,
    table: FxHashMap<(Lit, Lit), u32>,
    hashing: bool,
}

impl AigBuilder {
    pub fn new(num_inputs: usize) -> AigBuilder {
        AigBuilder::with_latches(num_inputs, 0)
    }

    pub fn with_latches(num_inputs: usize, num_latches: usize) -> AigBuilder {
        let mut nodes = vec![Node::Const];
        nodes.extend(std::iter::repeat_n(Node::Input, num_inputs));
        nodes.extend(std::iter::repeat_n(Node::Latch, num_latches));
        let levels = vec![0; nodes.len()];
        AigBuilder {
            nodes,
            levels,
            num_inputs,
            latches: vec![Latch { next: Lit::FALSE, init: LatchInit::Zero }; num_latches],
            outputs: Vec::new(),
            table: FxHashMap::default(),
            hashing: true,
        }
    }

    /// A builder that performs no simplification or sharing.
    pub fn raw(num_inputs: usize) -> AigBuilder {
        AigBuilder { hashing: false, ..AigBuilder::new(num_inputs) }
    }

    pub fn input(&self, i: usize) -> Lit {
        assert!(i < self.num_inputs, "input {i} out of range");
        Lit::new(1 + i, false)
    }

    pub fn inputs(&self) -> Vec<Lit> {
        (0..self.num_inputs).map(|i| self.input(i)).collect()
    }

    pub fn latch(&self, i: usize) -> Lit {
        assert!(i < self.latches.len(), "latch {i} out of range");
        Lit::new(1 + self.num_inputs + i, false)
    }

    pub fn set_latch(&mut self, i: usize, next: Lit, init: LatchInit) {
        self.latches[i] = Latch { next, init };
    }

    pub fn num_ands(&self) -> usize {
        self.nodes.len() - 1 - self.num_inputs - self.latches.len()
    }

    /// Logic level of the node behind `lit`.
    pub fn level(&self, lit: Lit) -> u32 {
        self.levels[lit.node()]
    }

    pub fn and(&mut self, a: Lit, b: Lit) -> Lit {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if self.hashing {
            if a == Lit::FALSE || a == !b {
                return Lit::FALSE;
            }
            if a == Lit::TRUE || a == b {
                return b;
            }
            if let Some(&n) = self.table.get(&(a, b)) {
                return Lit::new(n as usize, false);
            }
        }
        let index = self.nodes.len();
        self.nodes.push(Node::And(a, b));
        self.levels.push(1 + self.levels[a.node()].max(self.levels[b.node()]));
        if self.hashing {
            self.table.insert((a, b), index as u32);
        }
        Lit::new(index, false)
    }

    /// Looks up an existing AND without creating it. Trivial cases resolve to
    /// their simplified literal.
    pub fn find_and(&self, a: Lit, b: Lit) -> Option<Lit> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if a == Lit::FALSE || a == !b {
            return Some(Lit::FALSE);
        }
        if a == Lit::TRUE || a == b {
            return Some(b);
        }
        self.table.get(&(a, b)).map(|&n| Lit::new(n as usize, false))
    }

    pub fn or(&mut self, a: Lit, b: Lit) -> Lit {
        !self.and(!a, !b)
    }

    /// Exclusive or as `!(a & b) & !(!a & !b)`, three AND nodes.
    pub fn xor(&mut self, a: Lit, b: Lit) -> Lit {
        let both = self.and(a, b);
        let neither = self.and(!a, !b);
        self.and(!both, !neither)
    }

    /// `sel ? then : other`
    pub fn mux(&mut self, sel: Lit, then: Lit, other: Lit) -> Lit {
        let t = self.and(sel, then);
        let e = self.and(!sel, other);
        self.or(t, e)
    }

    /// Left-to-right conjunction; `TRUE` when empty.
    pub fn and_all(&mut self, lits: &[Lit]) -> Lit {
        lits.iter().fold(Lit::TRUE, |acc, &l| if acc == Lit::TRUE { l } else { self.and(acc, l) })
    }

    /// Left-to-right disjunction; `FALSE` when empty.
    pub fn or_all(&mut self, lits: &[Lit]) -> Lit {
        lits.iter().fold(Lit::FALSE, |acc, &l| if acc == Lit::FALSE { l } else { self.or(acc, l) })
    }

    pub fn add_output(&mut self, lit: Lit) {
        self.outputs.push(lit);
    }

    pub fn finish(self) -> Aig {
        Aig::from_parts(self.nodes, self.num_inputs, self.latches, self.outputs)
            .expect("builder maintains graph invariants")
    }
}

/// Structural hashing: rebuilds the reachable part of `g` with constant
/// propagation, trivial-AND simplification and merging of identical nodes.
pub fn strash(g: &Aig) -> Aig {
    let reachable = g.reachable();
    let mut b = AigBuilder::with_latches(g.num_inputs(), g.num_latches());
    let mut map: Vec<Lit> = (0..g.first_and()).map(|i| Lit::new(i, false)).collect();
    map.resize(g.num_nodes(), Lit::FALSE);
    for (i, f0, f1) in g.ands() {
        if reachable[i] {
            let a = map[f0.node()].xor(f0.is_complemented());
            let c = map[f1.node()].xor(f1.is_complemented());
            map[i] = b.and(a, c);
        }
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
