// SPDX-License-Identifier: Apache-2.0

//! Precomputed AIG structures for every NPN class of four-variable functions.
//!
//! Small structures come from an exhaustive enumeration of AND programs (up to
//! [`EXACT_GATES`] gates), which is size-optimal for every function it
//! reaches. Functions beyond that bound are synthesized by Shannon expansion
//! over enumerated cofactors, with XOR and constant-cofactor special cases.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use crate::aig::{AigBuilder, Lit};

use super::npn::{NpnTable, NpnTransform};
use super::template::Template;
use super::truth::{cofactor4, depends_on4, var4};

/// Enumeration depth of the exhaustive search.
pub const EXACT_GATES: usize = 6;

const CACHE_VERSION: u32 = 1;

static GLOBAL: OnceLock<NpnLibrary> = OnceLock::new();
const CACHE_MAGIC: &str = "synflow-npn4";

#[derive(Debug, thiserror::Error)]
pub enum LibraryError {
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache file is invalid: {0}")]
    Invalid(String),
}

type Program = (Vec<(Lit, Lit)>, Lit);

/// Exhaustive enumeration of AND programs over four variables.
struct Enumerator {
    max_gates: usize,
    sig: Vec<u16>,
    gates: Vec<(Lit, Lit)>,
    present: Vec<bool>,
    cost: Vec<u8>,
    best: Vec<Option<Program>>,
}

impl Enumerator {
    fn run(max_gates: usize) -> (Vec<u8>, Vec<Option<Program>>) {
        let mut e = Enumerator {
            max_gates,
            sig: vec![0, var4(0), var4(1), var4(2), var4(3)],
            gates: Vec::new(),
            present: vec![false; 1 << 16],
            cost: vec![u8::MAX; 1 << 16],
            best: vec![None; 1 << 16],
        };
        for (i, &t) in e.sig.clone().iter().enumerate() {
            for c in [false, true] {
                let t = if c { !t } else { t };
                e.present[t as usize] = true;
                e.cost[t as usize] = 0;
                e.best[t as usize] = Some((Vec::new(), Lit::new(i, c)));
            }
        }
        if max_gates > 0 {
            e.dfs();
        }
        (e.cost, e.best)
    }

    fn record(&mut self, t: u16, out: Lit, cost: u8) {
        if cost < self.cost[t as usize] {
            self.cost[t as usize] = cost;
            self.best[t as usize] = Some((self.gates.clone(), out));
        }
    }

    fn dfs(&mut self) {
        let n = self.sig.len();
        let depth = n - 5;
        let cost = (depth + 1) as u8;
        for j in 1..n {
            for i in 1..j {
                // Independent consecutive gates must appear in increasing
                // truth-table order; every DAG has one such ordering.
                let ordered = depth == 0 || j == n - 1;
                for ca in [false, true] {
                    for cb in [false, true] {
                        let ta = if ca { !self.sig[i] } else { self.sig[i] };
                        let tb = if cb { !self.sig[j] } else { self.sig[j] };
                        let t = ta & tb;
                        if self.present[t as usize] || (!ordered && t <= self.sig[n - 1]) {
                            continue;
                        }
                        self.gates.push((Lit::new(i, ca), Lit::new(j, cb)));
                        let node = Lit::new(n, false);
                        self.record(t, node, cost);
                        self.record(!t, !node, cost);
                        if depth + 1 < self.max_gates {
                            self.present[t as usize] = true;
                            self.present[!t as usize] = true;
                            self.sig.push(t);
                            self.dfs();
                            self.sig.pop();
                            self.present[t as usize] = false;
                            self.present[!t as usize] = false;
                        }
                        self.gates.pop();
                    }
                }
            }
        }
    }
}

/// Builds functions outside the exhaustive range by Shannon expansion.
struct Synthesizer<'a> {
    cost: &'a [u8],
    best: &'a [Option<Program>],
    estimate: HashMap<u16, u32>,
}

impl Synthesizer<'_> {
    fn expansion_cost(&mut self, f: u16, v: usize) -> u32 {
        let (f0, f1) = (cofactor4(f, v, false), cofactor4(f, v, true));
        if f0 == 0 || f0 == 0xffff {
            self.estimate(f1) + 1
        } else if f1 == 0 || f1 == 0xffff {
            self.estimate(f0) + 1
        } else if f1 == !f0 {
            self.estimate(f0) + 3
        } else {
            self.estimate(f0) + self.estimate(f1) + 3
        }
    }

    fn split_var(&mut self, f: u16) -> usize {
        (0..4)
            .filter(|&v| depends_on4(f, v))
            .min_by_key(|&v| (self.expansion_cost(f, v), v))
            .expect("non-trivial function has support")
    }

    fn estimate(&mut self, f: u16) -> u32 {
        if self.cost[f as usize] != u8::MAX {
            return self.cost[f as usize] as u32;
        }
        if let Some(&c) = self.estimate.get(&f) {
            return c;
        }
        let v = self.split_var(f);
        let c = self.expansion_cost(f, v);
        self.estimate.insert(f, c);
        c
    }

    fn build(&mut self, b: &mut AigBuilder, f: u16) -> Lit {
        if let Some((gates, out)) = &self.best[f as usize] {
            let mut sig: Vec<Lit> = vec![Lit::FALSE];
            sig.extend(b.inputs());
            let map = |sig: &[Lit], l: Lit| sig[l.node()].xor(l.is_complemented());
            for &(x, y) in gates {
                let (x, y) = (map(&sig, x), map(&sig, y));
                let g = b.and(x, y);
                sig.push(g);
            }
            return map(&sig, *out);
        }
        let v = self.split_var(f);
        let x = b.input(v);
        let (f0, f1) = (cofactor4(f, v, false), cofactor4(f, v, true));
        match (f0, f1) {
            (0, _) => {
                let g = self.build(b, f1);
                b.and(x, g)
            }
            (0xffff, _) => {
                let g = self.build(b, f1);
                b.or(!x, g)
            }
            (_, 0) => {
                let g = self.build(b, f0);
                b.and(!x, g)
            }
            (_, 0xffff) => {
                let g = self.build(b, f0);
                b.or(x, g)
            }
            _ if f1 == !f0 => {
                let g = self.build(b, f0);
                b.xor(x, g)
            }
            _ => {
                let g0 = self.build(b, f0);
                let g1 = self.build(b, f1);
                b.mux(x, g1, g0)
            }
        }
    }
}

/// Canonical class representative -> replacement structure.
#[derive(Debug, Clone)]
pub struct NpnLibrary {
    entries: HashMap<u16, Template>,
}

impl NpnLibrary {
    /// Generates the library for all 222 classes.
    pub fn build() -> NpnLibrary {
        let table = NpnTable::global();
        let (cost, best) = Enumerator::run(EXACT_GATES);
        let mut synth = Synthesizer { cost: &cost, best: &best, estimate: HashMap::new() };
        let mut entries = HashMap::with_capacity(table.classes().len());
        for &rep in table.classes() {
            let mut b = AigBuilder::new(4);
            let out = synth.build(&mut b, rep);
            b.add_output(out);
            let t = Template::from_aig(&b.finish());
            assert_eq!(t.truth4(), rep, "library template for {rep:04x} is wrong");
            entries.insert(rep, t);
        }
        NpnLibrary { entries }
    }

    /// The process-wide library, read from the on-disk cache when possible.
    pub fn global() -> &'static NpnLibrary {
        GLOBAL.get_or_init(|| match default_cache_path() {
            Some(path) => NpnLibrary::load_or_build(&path),
            None => NpnLibrary::build(),
        })
    }

    /// Makes `lib` the process-wide library, skipping generation. Fails
    /// (returning `lib`) once the library is already in use.
    pub fn install(lib: NpnLibrary) -> Result<(), NpnLibrary> {
        GLOBAL.set(lib)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn class_template(&self, rep: u16) -> Option<&Template> {
        self.entries.get(&rep)
    }

    /// A template over four leaves computing exactly `f`.
    pub fn instantiate(&self, f: u16) -> Template {
        let (rep, tr) = NpnTable::global().canonicalize(f);
        let t = &self.entries[&rep];
        instantiate(t, tr)
    }

    pub fn to_text(&self) -> String {
        let mut reps: Vec<_> = self.entries.keys().copied().collect();
        reps.sort_unstable();
        let mut s = format!("{CACHE_MAGIC} v{CACHE_VERSION}\n");
        for rep in reps {
            let t = &self.entries[&rep];
            let _ = write!(s, "{rep:04x} {}", t.output.code());
            for (a, b) in &t.gates {
                let _ = write!(s, " {},{}", a.code(), b.code());
            }
            s.push('\n');
        }
        s
    }

    /// Parses and fully verifies a cached library.
    pub fn from_text(text: &str) -> Result<NpnLibrary, LibraryError> {
        let bad = |m: &str| LibraryError::Invalid(m.to_string());
        let mut lines = text.lines();
        if lines.next() != Some(&format!("{CACHE_MAGIC} v{CACHE_VERSION}")) {
            return Err(bad("missing or mismatched version header"));
        }
        let mut entries = HashMap::new();
        for line in lines {
            let mut parts = line.split(' ');
            let rep = parts
                .next()
                .and_then(|p| u16::from_str_radix(p, 16).ok())
                .ok_or_else(|| bad("bad representative"))?;
            let output = parts
                .next()
                .and_then(|p| p.parse::<u32>().ok())
                .ok_or_else(|| bad("bad output literal"))?;
            let mut gates = Vec::new();
            for p in parts {
                let (a, b) = p.split_once(',').ok_or_else(|| bad("bad gate"))?;
                let a = a.parse::<u32>().map_err(|_| bad("bad gate"))?;
                let b = b.parse::<u32>().map_err(|_| bad("bad gate"))?;
                let limit = 2 * (5 + gates.len()) as u32;
                if a >= limit || b >= limit {
                    return Err(bad("gate references a later node"));
                }
                gates.push((Lit::from_code(a), Lit::from_code(b)));
            }
            if output >= 2 * (5 + gates.len()) as u32 {
                return Err(bad("output references a missing node"));
            }
            let t = Template { num_leaves: 4, gates, output: Lit::from_code(output) };
            if t.truth4() != rep {
                return Err(bad("template does not compute its class"));
            }
            entries.insert(rep, t);
        }
        let table = NpnTable::global();
        if entries.len() != table.classes().len() || table.classes().iter().any(|r| !entries.contains_key(r)) {
            return Err(bad("class coverage is incomplete"));
        }
        Ok(NpnLibrary { entries })
    }

    pub fn save(&self, path: &Path) -> Result<(), LibraryError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_text())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<NpnLibrary, LibraryError> {
        NpnLibrary::from_text(&std::fs::read_to_string(path)?)
    }

    /// Loads the cache at `path`, regenerating it when absent or invalid.
    pub fn load_or_build(path: &Path) -> NpnLibrary {
        match NpnLibrary::load(path) {
            Ok(lib) => lib,
            Err(_) => {
                let lib = NpnLibrary::build();
                // An unwritable cache only costs regeneration next time.
                let _ = lib.save(path);
                lib
            }
        }
    }
}

/// Maps a class template onto the function `tr.apply(rep)`.
fn instantiate(t: &Template, tr: NpnTransform) -> Template {
    let map = |l: Lit| -> Lit {
        let n = l.node();
        if (1..=4).contains(&n) {
            let i = n - 1;
            let neg = (tr.neg >> i) & 1 == 1;
            Lit::new(1 + tr.perm[i] as usize, neg ^ l.is_complemented())
        } else {
            l
        }
    };
    Template {
        num_leaves: 4,
        gates: t.gates.iter().map(|&(a, b)| (map(a), map(b))).collect(),
        output: map(t.output).xor(tr.out),
    }
}

/// `$SYNFLOW_NPN_CACHE` when set (an empty value disables caching), otherwise
/// a versioned file in the system temporary directory.
fn default_cache_path() -> Option<PathBuf> {
    if cfg!(target_arch = "wasm32") {
        return None;
    }
    match std::env::var_os("SYNFLOW_NPN_CACHE") {
        Some(p) if p.is_empty() => None,
        Some(p) => Some(PathBuf::from(p)),
        None => Some(std::env::temp_dir().join("synflow").join(format!("npn4-v{CACHE_VERSION}.txt"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_finds_known_optima() {
        let (cost, _) = Enumerator::run(4);
        assert_eq!(cost[0], 0);
        assert_eq!(cost[var4(2) as usize], 0);
        assert_eq!(cost[(var4(0) & var4(1)) as usize], 1);
        assert_eq!(cost[(var4(0) & var4(1) & var4(2) & var4(3)) as usize], 3);
        assert_eq!(cost[(var4(0) ^ var4(1)) as usize], 3);
        // MUX(a; b, c) needs three gates.
        let mux = (var4(0) & var4(1)) | (!var4(0) & var4(2));
        assert_eq!(cost[mux as usize], 3);
    }

    #[test]
    fn library_covers_all_classes() {
        let lib = NpnLibrary::global();
        assert_eq!(lib.len(), 222);
        assert_eq!(lib.class_template(0).unwrap().num_gates(), 0);
        let and4 = NpnTable::global().canonicalize(0x8000).0;
        assert_eq!(lib.class_template(and4).unwrap().num_gates(), 3);
        for &rep in NpnTable::global().classes() {
            assert_eq!(lib.class_template(rep).unwrap().truth4(), rep);
        }
    }

    #[test]
    fn instantiation_reproduces_functions() {
        let lib = NpnLibrary::global();
        let mut x: u32 = 12345;
        for _ in 0..1000 {
            x = x.wrapping_mul(1_103_515_245).wrapping_add(12345);
            let f = (x >> 8) as u16;
            assert_eq!(lib.instantiate(f).truth4(), f);
        }
        for f in [0u16, 0xffff, 0xaaaa, 0x6996, 0x8000] {
            assert_eq!(lib.instantiate(f).truth4(), f);
        }
    }

    #[test]
    fn cache_round_trip_and_rejection() {
        let lib = NpnLibrary::global();
        let text = lib.to_text();
        let back = NpnLibrary::from_text(&text).unwrap();
        assert_eq!(back.len(), 222);
        assert!(NpnLibrary::from_text(&text.replace("v1", "v0")).is_err());
        let truncated: String = text.lines().take(100).map(|l| format!("{l}\n")).collect();
        assert!(NpnLibrary::from_text(&truncated).is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("npn.txt");
        std::fs::write(&path, "garbage").unwrap();
        assert_eq!(NpnLibrary::load_or_build(&path).len(), 222);
        assert!(NpnLibrary::load(&path).is_ok());
    }
}
