// SPDX-License-Identifier: Apache-2.0

//! Mutable AIG used by the local-rewriting passes.
//!
//! Nodes keep fanout lists, reference counts and a structural hash table so a
//! node can be replaced in place. Replacement redirects fanouts, re-hashes
//! them (merging nodes that become identical and simplifying nodes that
//! become trivial) and frees whatever loses its last reference.

use rustc_hash::FxHashMap;

use crate::aig::{Aig, AigBuilder, Latch, Lit};

use super::template::Template;
use super::truth::TruthTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Const,
    Ci,
    And,
}

/// Result of pricing a replacement without performing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pricing {
    /// Nodes freed minus nodes added; a lower bound on the actual saving.
    pub gain: i32,
    /// Level of the replacement's root.
    pub level: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sig {
    Real(Lit),
    New(u32, bool),
}

impl Sig {
    fn not(self) -> Sig {
        match self {
            Sig::Real(l) => Sig::Real(!l),
            Sig::New(i, c) => Sig::New(i, !c),
        }
    }

    fn key(self) -> u64 {
        match self {
            Sig::Real(l) => l.code() as u64,
            Sig::New(i, c) => (1u64 << 40) | ((i as u64) << 1) | c as u64,
        }
    }
}

pub struct Network {
    kind: Vec<Kind>,
    fanins: Vec<[Lit; 2]>,
    fanouts: Vec<Vec<u32>>,
    out_refs: Vec<u32>,
    refs: Vec<u32>,
    level: Vec<u32>,
    dead: Vec<bool>,
    table: FxHashMap<(Lit, Lit), u32>,
    num_inputs: usize,
    latches: Vec<Latch>,
    num_pos: usize,
    /// Primary outputs followed by latch next-state literals.
    outputs: Vec<Lit>,
    forward: FxHashMap<u32, Lit>,
    trav: Vec<u32>,
    trav_id: u32,
    scratch: Vec<u64>,
    /// Set when a node's fanins change; consumers use it to drop cached data.
    touched: Vec<bool>,
    live_ands: usize,
}

impl Network {
    pub fn from_aig(g: &Aig) -> Network {
        let cis = g.num_cis();
        let mut kind = vec![Kind::Const];
        kind.extend(std::iter::repeat_n(Kind::Ci, cis));
        let n = 1 + cis;
        let mut net = Network {
            kind,
            fanins: vec![[Lit::FALSE; 2]; n],
            fanouts: vec![Vec::new(); n],
            out_refs: vec![0; n],
            refs: vec![0; n],
            level: vec![0; n],
            dead: vec![false; n],
            table: FxHashMap::default(),
            num_inputs: g.num_inputs(),
            latches: g.latches().to_vec(),
            num_pos: g.num_outputs(),
            outputs: Vec::new(),
            forward: FxHashMap::default(),
            trav: vec![0; n],
            trav_id: 0,
            scratch: vec![0; n],
            touched: vec![false; n],
            live_ands: 0,
        };
        let reachable = g.reachable();
        let mut map: Vec<Lit> = (0..g.first_and()).map(|i| Lit::new(i, false)).collect();
        map.resize(g.num_nodes(), Lit::FALSE);
        for (i, a, b) in g.ands() {
            if reachable[i] {
                let a = map[a.node()].xor(a.is_complemented());
                let b = map[b.node()].xor(b.is_complemented());
                map[i] = net.and(a, b);
            }
        }
        for l in g.co_lits() {
            let l = map[l.node()].xor(l.is_complemented());
            net.outputs.push(l);
            net.out_refs[l.node()] += 1;
            net.refs[l.node()] += 1;
        }
        // Nodes created while hashing but not reachable from an output.
        for i in 1 + cis..net.kind.len() {
            net.delete_if_unreferenced(i);
        }
        net
    }

    /// Exports the live logic as a structurally hashed graph.
    pub fn to_aig(&self) -> Aig {
        let mut b = AigBuilder::with_latches(self.num_inputs, self.latches.len());
        let mut map: Vec<Option<Lit>> = vec![None; self.kind.len()];
        for i in 0..=self.num_inputs + self.latches.len() {
            map[i] = Some(Lit::new(i, false));
        }
        for &root in &self.outputs {
            let mut stack = vec![(root.node(), false)];
            while let Some((n, expanded)) = stack.pop() {
                if map[n].is_some() {
                    continue;
                }
                let [a, c] = self.fanins[n];
                if expanded {
                    let la = map[a.node()].expect("fanin mapped").xor(a.is_complemented());
                    let lc = map[c.node()].expect("fanin mapped").xor(c.is_complemented());
                    map[n] = Some(b.and(la, lc));
                } else {
                    stack.push((n, true));
                    stack.push((c.node(), false));
                    stack.push((a.node(), false));
                }
            }
        }
        let lit = |l: Lit| map[l.node()].expect("output mapped").xor(l.is_complemented());
        for (i, latch) in self.latches.iter().enumerate() {
            b.set_latch(i, lit(self.outputs[self.num_pos + i]), latch.init);
        }
        for &o in &self.outputs[..self.num_pos] {
            b.add_output(lit(o));
        }
        b.finish()
    }

    pub fn len(&self) -> usize {
        self.kind.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kind.is_empty()
    }

    pub fn num_ands(&self) -> usize {
        self.live_ands
    }

    pub fn is_and(&self, n: usize) -> bool {
        self.kind[n] == Kind::And && !self.dead[n]
    }

    pub fn is_dead(&self, n: usize) -> bool {
        self.dead[n]
    }

    pub fn is_ci(&self, n: usize) -> bool {
        self.kind[n] == Kind::Ci
    }

    pub fn fanins(&self, n: usize) -> [Lit; 2] {
        self.fanins[n]
    }

    pub fn fanouts(&self, n: usize) -> &[u32] {
        &self.fanouts[n]
    }

    pub fn level(&self, n: usize) -> u32 {
        self.level[n]
    }

    pub fn refs(&self, n: usize) -> u32 {
        self.refs[n]
    }

    /// Returns and clears the "fanins changed" flag of `n`.
    pub fn take_touched(&mut self, n: usize) -> bool {
        std::mem::replace(&mut self.touched[n], false)
    }

    fn new_trav(&mut self) -> u32 {
        self.trav_id += 1;
        self.trav_id
    }

    fn simplify(a: Lit, b: Lit) -> Result<Lit, (Lit, Lit)> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if a == Lit::FALSE || a == !b {
            Ok(Lit::FALSE)
        } else if a == Lit::TRUE || a == b {
            Ok(b)
        } else {
            Err((a, b))
        }
    }

    /// Existing node (or trivial simplification) for `a & b`.
    pub fn find_and(&self, a: Lit, b: Lit) -> Option<Lit> {
        match Network::simplify(a, b) {
            Ok(l) => Some(l),
            Err(key) => self.table.get(&key).map(|&n| Lit::new(n as usize, false)),
        }
    }

    pub fn and(&mut self, a: Lit, b: Lit) -> Lit {
        let key = match Network::simplify(a, b) {
            Ok(l) => return l,
            Err(key) => key,
        };
        if let Some(&n) = self.table.get(&key) {
            return Lit::new(n as usize, false);
        }
        let n = self.kind.len();
        self.kind.push(Kind::And);
        self.fanins.push([key.0, key.1]);
        self.fanouts.push(Vec::new());
        self.out_refs.push(0);
        self.refs.push(0);
        self.level.push(1 + self.level[key.0.node()].max(self.level[key.1.node()]));
        self.dead.push(false);
        self.trav.push(0);
        self.scratch.push(0);
        self.touched.push(false);
        for l in [key.0, key.1] {
            self.fanouts[l.node()].push(n as u32);
            self.refs[l.node()] += 1;
        }
        self.table.insert(key, n as u32);
        self.live_ands += 1;
        Lit::new(n, false)
    }

    fn remove_fanout(&mut self, node: usize, fanout: u32) {
        let list = &mut self.fanouts[node];
        let pos = list.iter().position(|&f| f == fanout).expect("fanout registered");
        list.swap_remove(pos);
        self.refs[node] -= 1;
    }

    fn delete_if_unreferenced(&mut self, n: usize) {
        let mut stack = vec![n];
        while let Some(n) = stack.pop() {
            if self.kind[n] != Kind::And || self.dead[n] || self.refs[n] > 0 {
                continue;
            }
            self.dead[n] = true;
            self.live_ands -= 1;
            let [a, b] = self.fanins[n];
            let key = (a, b);
            if self.table.get(&key) == Some(&(n as u32)) {
                self.table.remove(&key);
            }
            for l in [a, b] {
                self.remove_fanout(l.node(), n as u32);
                stack.push(l.node());
            }
        }
    }

    fn resolve(&self, mut l: Lit) -> Lit {
        while let Some(&f) = self.forward.get(&(l.node() as u32)) {
            l = f.xor(l.is_complemented());
        }
        l
    }

    /// Redirects every reference to `old` onto `new` and frees `old`'s
    /// now-unreferenced logic. `new` must not depend on `old`.
    pub fn replace(&mut self, old: usize, new: Lit) {
        let mut queue = vec![(old, new)];
        // Replaced nodes are only freed once the worklist is drained: freeing
        // one earlier could take down a pending merge target in its cone.
        let mut replaced: Vec<usize> = Vec::new();
        let mut targets: Vec<usize> = Vec::new();
        while let Some((o, n)) = queue.pop() {
            if self.dead[o] || self.forward.contains_key(&(o as u32)) {
                continue;
            }
            let n = self.resolve(n);
            if n.node() == o {
                continue;
            }
            let [oa, ob] = self.fanins[o];
            if self.kind[o] == Kind::And && self.table.get(&(oa, ob)) == Some(&(o as u32)) {
                self.table.remove(&(oa, ob));
            }
            self.forward.insert(o as u32, n);
            replaced.push(o);
            targets.push(n.node());
            let fanouts = std::mem::take(&mut self.fanouts[o]);
            for &f in &fanouts {
                let f = f as usize;
                let [a, b] = self.fanins[f];
                let live = !self.forward.contains_key(&(f as u32));
                if live && self.table.get(&(a, b)) == Some(&(f as u32)) {
                    self.table.remove(&(a, b));
                }
                let sub = |l: Lit| if l.node() == o { n.xor(l.is_complemented()) } else { l };
                let (na, nb) = (sub(a), sub(b));
                // Move the references from `o` to `n`.
                let moved = (a.node() == o) as u32 + (b.node() == o) as u32;
                self.refs[o] -= moved;
                let (ka, kb) = if na <= nb { (na, nb) } else { (nb, na) };
                self.fanins[f] = [ka, kb];
                for _ in 0..moved {
                    self.fanouts[n.node()].push(f as u32);
                    self.refs[n.node()] += 1;
                }
                self.touched[f] = true;
                self.level[f] = 1 + self.level[ka.node()].max(self.level[kb.node()]);
                if !live {
                    continue;
                }
                match Network::simplify(ka, kb) {
                    Ok(t) => queue.push((f, t)),
                    Err(key) => match self.table.get(&key) {
                        Some(&h) => queue.push((f, Lit::new(h as usize, false))),
                        None => {
                            self.table.insert(key, f as u32);
                        }
                    },
                }
            }
            if self.out_refs[o] > 0 {
                for out in self.outputs.iter_mut() {
                    if out.node() == o {
                        *out = n.xor(out.is_complemented());
                        self.out_refs[n.node()] += 1;
                        self.refs[n.node()] += 1;
                    }
                }
                self.refs[o] -= self.out_refs[o];
                self.out_refs[o] = 0;
            }
            debug_assert_eq!(self.refs[o], 0);
        }
        for o in replaced {
            self.delete_if_unreferenced(o);
        }
        for t in targets {
            self.delete_if_unreferenced(t);
        }
    }

    /// Nodes freed if `root` lost all references, never crossing `leaves`.
    /// Leaves and combinational inputs are excluded; `root` comes first.
    pub fn mffc(&mut self, root: usize, leaves: &[usize]) -> Vec<usize> {
        let id = self.new_trav();
        for &l in leaves {
            self.trav[l] = id;
        }
        let mut cone = vec![root];
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            for l in self.fanins[n] {
                let c = l.node();
                if self.kind[c] != Kind::And || self.trav[c] == id {
                    continue;
                }
                self.refs[c] -= 1;
                if self.refs[c] == 0 {
                    cone.push(c);
                    stack.push(c);
                }
            }
        }
        // Restore reference counts.
        for &n in &cone {
            for l in self.fanins[n] {
                let c = l.node();
                if self.kind[c] == Kind::And && self.trav[c] != id {
                    self.refs[c] += 1;
                }
            }
        }
        cone
    }

    /// Prices replacing `root` by `template` instantiated on `leaves`
    /// (literals, one per template leaf). Returns `None` when the replacement
    /// would reproduce `root` itself.
    pub fn price(&mut self, root: usize, leaves: &[Lit], template: &Template) -> Option<Pricing> {
        debug_assert_eq!(leaves.len(), template.num_leaves);
        let leaf_nodes: Vec<usize> = leaves.iter().map(|l| l.node()).collect();
        let cone = self.mffc(root, &leaf_nodes);
        let in_cone = self.new_trav();
        for &n in &cone {
            self.trav[n] = in_cone;
        }
        let mut sig: Vec<Sig> = Vec::with_capacity(1 + leaves.len() + template.gates.len());
        let mut sig_level: Vec<u32> = Vec::with_capacity(sig.capacity());
        sig.push(Sig::Real(Lit::FALSE));
        sig_level.push(0);
        for &l in leaves {
            sig.push(Sig::Real(l));
            sig_level.push(self.level[l.node()]);
        }
        let mut local: FxHashMap<(u64, u64), u32> = FxHashMap::default();
        let mut added = 0u32;
        let mut reused: Vec<usize> = Vec::new();
        let map = |sig: &[Sig], l: Lit| {
            let s = sig[l.node()];
            if l.is_complemented() {
                s.not()
            } else {
                s
            }
        };
        for &(ga, gb) in &template.gates {
            let (sa, sb) = (map(&sig, ga), map(&sig, gb));
            let la = sig_level[ga.node()];
            let lb = sig_level[gb.node()];
            let (s, lvl) = match (sa, sb) {
                (Sig::Real(a), Sig::Real(b)) => match self.find_and(a, b) {
                    Some(l) => {
                        if l.node() == root {
                            return None;
                        }
                        (Sig::Real(l), self.level[l.node()])
                    }
                    None => {
                        added += 1;
                        (Sig::New(added, false), 1 + la.max(lb))
                    }
                },
                _ => {
                    let (x, y) = if sa.key() <= sb.key() { (sa, sb) } else { (sb, sa) };
                    if x == y.not() || x == Sig::Real(Lit::FALSE) {
                        (Sig::Real(Lit::FALSE), 0)
                    } else if x == y {
                        (x, la.max(lb))
                    } else if x == Sig::Real(Lit::TRUE) {
                        (y, la.max(lb))
                    } else {
                        let key = (x.key(), y.key());
                        match local.get(&key) {
                            Some(&i) => (Sig::New(i, false), 1 + la.max(lb)),
                            None => {
                                added += 1;
                                local.insert(key, added);
                                (Sig::New(added, false), 1 + la.max(lb))
                            }
                        }
                    }
                }
            };
            if let Sig::Real(l) = s {
                if self.trav[l.node()] == in_cone {
                    reused.push(l.node());
                }
            }
            sig.push(s);
            sig_level.push(lvl);
        }
        let out = map(&sig, template.output);
        if let Sig::Real(l) = out {
            if l.node() == root {
                return None;
            }
            if self.trav[l.node()] == in_cone {
                reused.push(l.node());
            }
        }
        // Cone nodes kept alive through reused nodes.
        let alive = self.new_trav();
        let mut survivors = 0i32;
        while let Some(n) = reused.pop() {
            if self.trav[n] != in_cone {
                continue;
            }
            self.trav[n] = alive;
            survivors += 1;
            for l in self.fanins[n] {
                if self.trav[l.node()] == in_cone {
                    reused.push(l.node());
                }
            }
        }
        let level = sig_level[template.output.node()];
        Some(Pricing { gain: cone.len() as i32 - survivors - added as i32, level })
    }

    /// Builds `template` on `leaves` and substitutes it for `root`.
    pub fn commit(&mut self, root: usize, leaves: &[Lit], template: &Template) {
        let mut sig: Vec<Lit> = Vec::with_capacity(1 + leaves.len() + template.gates.len());
        sig.push(Lit::FALSE);
        sig.extend_from_slice(leaves);
        let map = |sig: &[Lit], l: Lit| sig[l.node()].xor(l.is_complemented());
        for &(a, b) in &template.gates {
            let (a, b) = (map(&sig, a), map(&sig, b));
            let g = self.and(a, b);
            sig.push(g);
        }
        let out = map(&sig, template.output);
        self.replace(root, out);
    }

    /// Truth table of `root` over up to six `leaves`, or `None` if the leaves
    /// do not cut every path from `root` to the inputs.
    pub fn cone_truth64(&mut self, root: usize, leaves: &[usize], max_cone: usize) -> Option<u64> {
        const MASKS: [u64; 6] = [
            0xaaaa_aaaa_aaaa_aaaa,
            0xcccc_cccc_cccc_cccc,
            0xf0f0_f0f0_f0f0_f0f0,
            0xff00_ff00_ff00_ff00,
            0xffff_0000_ffff_0000,
            0xffff_ffff_0000_0000,
        ];
        debug_assert!(leaves.len() <= 6);
        let id = self.new_trav();
        for (i, &l) in leaves.iter().enumerate() {
            if self.dead[l] {
                return None;
            }
            self.trav[l] = id;
            self.scratch[l] = MASKS[i];
        }
        if self.trav[root] == id {
            return Some(self.scratch[root]);
        }
        let mut stack = vec![(root, false)];
        let mut visited = 0;
        while let Some((n, expanded)) = stack.pop() {
            if self.trav[n] == id {
                continue;
            }
            if self.kind[n] != Kind::And || self.dead[n] {
                return None;
            }
            let [a, b] = self.fanins[n];
            if expanded {
                let va = self.scratch[a.node()] ^ if a.is_complemented() { !0 } else { 0 };
                let vb = self.scratch[b.node()] ^ if b.is_complemented() { !0 } else { 0 };
                self.scratch[n] = va & vb;
                self.trav[n] = id;
            } else {
                visited += 1;
                if visited > max_cone {
                    return None;
                }
                stack.push((n, true));
                for c in [b.node(), a.node()] {
                    if self.trav[c] != id {
                        stack.push((c, false));
                    }
                }
            }
        }
        Some(self.scratch[root])
    }

    /// Reconvergence-driven cut of at most `max_leaves` leaves, expanding no
    /// deeper than `max_depth` edges below `root`. Returns the leaves and the
    /// interior nodes (including `root`) in topological order.
    pub fn reconv_cut(&mut self, root: usize, max_leaves: usize, max_depth: u32) -> (Vec<usize>, Vec<usize>) {
        let id = self.new_trav();
        self.trav[root] = id;
        let mut depth: FxHashMap<usize, u32> = FxHashMap::default();
        let mut leaves: Vec<usize> = Vec::new();
        for l in self.fanins[root] {
            let c = l.node();
            if self.trav[c] != id {
                self.trav[c] = id;
                leaves.push(c);
                depth.insert(c, 1);
            }
        }
        loop {
            let mut best: Option<(usize, usize, u32)> = None;
            for (i, &leaf) in leaves.iter().enumerate() {
                if self.kind[leaf] != Kind::And || depth[&leaf] >= max_depth {
                    continue;
                }
                let cost = self.fanins[leaf].iter().filter(|l| self.trav[l.node()] != id).count();
                let better = match best {
                    None => true,
                    Some((_, c, lvl)) => cost < c || (cost == c && self.level[leaf] > lvl),
                };
                if better {
                    best = Some((i, cost, self.level[leaf]));
                }
            }
            let Some((i, cost, _)) = best else { break };
            if leaves.len() - 1 + cost > max_leaves {
                break;
            }
            let leaf = leaves.swap_remove(i);
            let d = depth[&leaf] + 1;
            for l in self.fanins[leaf] {
                let c = l.node();
                if self.trav[c] != id {
                    self.trav[c] = id;
                    leaves.push(c);
                    depth.insert(c, d);
                }
            }
        }
        leaves.sort_unstable();
        let interior = self.cone_order(root, &leaves);
        (leaves, interior)
    }

    /// Interior nodes between `leaves` and `root`, topologically ordered.
    pub fn cone_order(&mut self, root: usize, leaves: &[usize]) -> Vec<usize> {
        let id = self.new_trav();
        for &l in leaves {
            self.trav[l] = id;
        }
        let mut order = Vec::new();
        let mut stack = vec![(root, false)];
        while let Some((n, expanded)) = stack.pop() {
            if expanded {
                order.push(n);
                continue;
            }
            if self.trav[n] == id {
                continue;
            }
            self.trav[n] = id;
            stack.push((n, true));
            if self.kind[n] == Kind::And {
                let [a, b] = self.fanins[n];
                stack.push((b.node(), false));
                stack.push((a.node(), false));
            }
        }
        order
    }

    /// Truth tables over `leaves` for the leaves and `nodes` (which must be
    /// topologically ordered and closed over their fanins).
    pub fn simulate_window(&self, leaves: &[usize], nodes: &[usize]) -> FxHashMap<usize, TruthTable> {
        let vars = leaves.len();
        let mut tts: FxHashMap<usize, TruthTable> = FxHashMap::default();
        for (i, &l) in leaves.iter().enumerate() {
            tts.insert(l, TruthTable::var(vars, i));
        }
        for &n in nodes {
            if tts.contains_key(&n) {
                continue;
            }
            let [a, b] = self.fanins[n];
            let get = |l: Lit| {
                let t = &tts[&l.node()];
                if l.is_complemented() {
                    !t
                } else {
                    t.clone()
                }
            };
            let t = &get(a) & &get(b);
            tts.insert(n, t);
        }
        tts
    }

    /// Checks the structural invariants; used by tests.
    pub fn check(&self) -> Result<(), String> {
        let mut refs = vec![0u32; self.kind.len()];
        let mut live = 0;
        for n in 0..self.kind.len() {
            if self.kind[n] != Kind::And || self.dead[n] {
                continue;
            }
            live += 1;
            let [a, b] = self.fanins[n];
            if self.dead[a.node()] || self.dead[b.node()] {
                return Err(format!("node {n} has a dead fanin"));
            }
            if Network::simplify(a, b).is_ok() {
                return Err(format!("node {n} is trivial"));
            }
            if self.table.get(&(a, b)) != Some(&(n as u32)) {
                return Err(format!("node {n} missing from hash table"));
            }
            refs[a.node()] += 1;
            refs[b.node()] += 1;
        }
        for o in &self.outputs {
            if self.dead[o.node()] {
                return Err("output points to a dead node".into());
            }
            refs[o.node()] += 1;
        }
        for n in 0..self.kind.len() {
            if !self.dead[n] && refs[n] != self.refs[n] {
                return Err(format!("node {n} has {} refs, counted {}", self.refs[n], refs[n]));
            }
        }
        if live != self.live_ands {
            return Err(format!("live count {} vs {live}", self.live_ands));
        }
        Ok(())
    }
}
