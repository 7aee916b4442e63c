// SPDX-License-Identifier: Apache-2.0

//! AIGER reader and writer (ASCII `aag` and binary `aig`).

use std::fmt::Write as _;

use super::{Aig, AigError, Latch, LatchInit, Lit, Node};

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Reject files that declare latches.
    pub combinational_only: bool,
}

pub fn parse_aiger(bytes: &[u8]) -> Result<Aig, AigError> {
    parse_aiger_with(bytes, ParseOptions::default())
}

pub fn parse_aiger_with(bytes: &[u8], options: ParseOptions) -> Result<Aig, AigError> {
    let mut cursor = Cursor { bytes, pos: 0 };
    let header = Header::parse(&mut cursor)?;
    if options.combinational_only && header.l > 0 {
        return Err(AigError::Unsupported(format!(
            "{} latches in a file read as combinational",
            header.l
        )));
    }
    if header.binary {
        parse_binary(&mut cursor, &header)
    } else {
        parse_ascii(&mut cursor, &header)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn error(&self, offset: usize, message: impl Into<String>) -> AigError {
        AigError::Parse { offset, message: message.into() }
    }

    /// Returns the next line (without the newline) and its starting offset.
    fn line(&mut self, what: &str) -> Result<(usize, &'a str), AigError> {
        let start = self.pos;
        if start >= self.bytes.len() {
            return Err(self.error(start, format!("unexpected end of file, expected {what}")));
        }
        let end = self.bytes[start..]
            .iter()
            .position(|&b| b == b'\n')
            .map_or(self.bytes.len(), |p| start + p);
        self.pos = (end + 1).min(self.bytes.len());
        let text = std::str::from_utf8(&self.bytes[start..end])
            .map_err(|_| self.error(start, "line is not valid text"))?;
        Ok((start, text.trim_end_matches('\r')))
    }

    fn numbers(&mut self, what: &str, min: usize, max: usize) -> Result<(usize, Vec<u32>), AigError> {
        let (offset, text) = self.line(what)?;
        let mut out = Vec::new();
        let mut col = 0;
        for tok in text.split(' ') {
            if tok.is_empty() {
                return Err(self.error(offset + col, format!("malformed {what}")));
            }
            let v = tok
                .parse::<u32>()
                .map_err(|_| self.error(offset + col, format!("expected unsigned integer in {what}, found {tok:?}")))?;
            out.push(v);
            col += tok.len() + 1;
        }
        if out.len() < min || out.len() > max {
            return Err(self.error(offset, format!("{what} must have {min}..={max} fields, found {}", out.len())));
        }
        Ok((offset, out))
    }

    fn byte(&mut self) -> Result<u8, AigError> {
        let b = *self
            .bytes
            .get(self.pos)
            .ok_or_else(|| self.error(self.pos, "unexpected end of binary AND section"))?;
        self.pos += 1;
        Ok(b)
    }

    fn varint(&mut self) -> Result<u32, AigError> {
        let start = self.pos;
        let mut value: u64 = 0;
        let mut shift = 0;
        loop {
            let b = self.byte()?;
            value |= u64::from(b & 0x7f) << shift;
            if b & 0x80 == 0 {
                break;
            }
            shift += 7;
            if shift > 35 {
                return Err(self.error(start, "delta encoding overflows 32 bits"));
            }
        }
        u32::try_from(value).map_err(|_| self.error(start, "delta encoding overflows 32 bits"))
    }
}

struct Header {
    binary: bool,
    m: usize,
    i: usize,
    l: usize,
    o: usize,
    a: usize,
}

impl Header {
    fn parse(cursor: &mut Cursor<'_>) -> Result<Header, AigError> {
        let (offset, text) = cursor.line("header")?;
        let mut parts = text.split(' ');
        let binary = match parts.next() {
            Some("aag") => false,
            Some("aig") => true,
            _ => return Err(cursor.error(offset, "header must start with `aag` or `aig`")),
        };
        let mut fields = Vec::new();
        let mut col = 4;
        for tok in parts {
            let v = tok
                .parse::<usize>()
                .map_err(|_| cursor.error(offset + col, format!("malformed header field {tok:?}")))?;
            fields.push(v);
            col += tok.len() + 1;
        }
        if !(5..=9).contains(&fields.len()) {
            return Err(cursor.error(offset, format!("header needs 5 counts, found {}", fields.len())));
        }
        if fields[5..].iter().any(|&v| v != 0) {
            return Err(AigError::Unsupported(
                "bad-state, constraint, justice and fairness sections".into(),
            ));
        }
        let h = Header { binary, m: fields[0], i: fields[1], l: fields[2], o: fields[3], a: fields[4] };
        if h.i + h.l + h.a > h.m {
            return Err(cursor.error(offset, "M is smaller than I + L + A"));
        }
        if binary && h.m != h.i + h.l + h.a {
            return Err(cursor.error(offset, "binary AIGER requires M = I + L + A"));
        }
        Ok(h)
    }
}

fn parse_init(cursor: &Cursor<'_>, offset: usize, cur: u32, fields: &[u32], idx: usize) -> Result<LatchInit, AigError> {
    match fields.get(idx) {
        None | Some(0) => Ok(LatchInit::Zero),
        Some(1) => Ok(LatchInit::One),
        Some(&v) if v == cur => Ok(LatchInit::Undefined),
        Some(v) => Err(cursor.error(offset, format!("invalid latch reset value {v}"))),
    }
}

fn parse_binary(cursor: &mut Cursor<'_>, h: &Header) -> Result<Aig, AigError> {
    let max_lit = 2 * h.m as u32 + 1;
    let mut latches = Vec::with_capacity(h.l);
    for k in 0..h.l {
        let cur = 2 * (h.i + k + 1) as u32;
        let (offset, f) = cursor.numbers("latch line", 1, 2)?;
        if f[0] > max_lit {
            return Err(AigError::Structural(format!("latch next literal {} exceeds M", f[0])));
        }
        let init = parse_init(cursor, offset, cur, &f, 1)?;
        latches.push(Latch { next: Lit::from_code(f[0]), init });
    }
    let mut outputs = Vec::with_capacity(h.o);
    for _ in 0..h.o {
        let (_, f) = cursor.numbers("output line", 1, 1)?;
        if f[0] > max_lit {
            return Err(AigError::Structural(format!("output literal {} exceeds M", f[0])));
        }
        outputs.push(Lit::from_code(f[0]));
    }
    let mut nodes = vec![Node::Const];
    nodes.extend(std::iter::repeat_n(Node::Input, h.i));
    nodes.extend(std::iter::repeat_n(Node::Latch, h.l));
    for k in 0..h.a {
        let offset = cursor.pos;
        let lhs = 2 * (h.i + h.l + k + 1) as u32;
        let d0 = cursor.varint()?;
        let d1 = cursor.varint()?;
        let rhs0 = lhs
            .checked_sub(d0)
            .filter(|_| d0 > 0)
            .ok_or_else(|| cursor.error(offset, "invalid first delta"))?;
        let rhs1 = rhs0.checked_sub(d1).ok_or_else(|| cursor.error(offset, "invalid second delta"))?;
        nodes.push(Node::And(Lit::from_code(rhs1), Lit::from_code(rhs0)));
    }
    Aig::from_parts(nodes, h.i, latches, outputs)
}

fn parse_ascii(cursor: &mut Cursor<'_>, h: &Header) -> Result<Aig, AigError> {
    const UNDEF: u32 = u32::MAX;
    // Variable index in the file -> node index in the graph.
    let mut var_map = vec![UNDEF; h.m + 1];
    var_map[0] = 0;
    let mut next_index = 1u32;
    let mut define = |cursor: &Cursor<'_>, offset: usize, lit: u32, what: &str| -> Result<(), AigError> {
        if lit & 1 == 1 || lit < 2 {
            return Err(cursor.error(offset, format!("{what} literal {lit} must be even and non-constant")));
        }
        let var = (lit >> 1) as usize;
        if var > h.m {
            return Err(AigError::Structural(format!("{what} literal {lit} exceeds M = {}", h.m)));
        }
        if var_map[var] != UNDEF {
            return Err(cursor.error(offset, format!("variable {var} defined twice")));
        }
        var_map[var] = next_index;
        next_index += 1;
        Ok(())
    };
    for _ in 0..h.i {
        let (offset, f) = cursor.numbers("input line", 1, 1)?;
        define(cursor, offset, f[0], "input")?;
    }
    let mut raw_latches = Vec::with_capacity(h.l);
    for _ in 0..h.l {
        let (offset, f) = cursor.numbers("latch line", 2, 3)?;
        define(cursor, offset, f[0], "latch")?;
        let init = parse_init(cursor, offset, f[0], &f, 2)?;
        raw_latches.push((f[1], init));
    }
    let mut raw_outputs = Vec::with_capacity(h.o);
    for _ in 0..h.o {
        let (_, f) = cursor.numbers("output line", 1, 1)?;
        raw_outputs.push(f[0]);
    }
    let mut raw_ands = Vec::with_capacity(h.a);
    // Variable -> position in raw_ands, for the topological sort below.
    let mut and_of_var = vec![UNDEF; h.m + 1];
    for k in 0..h.a {
        let (offset, f) = cursor.numbers("AND line", 3, 3)?;
        let lhs = f[0];
        if lhs & 1 == 1 || lhs < 2 {
            return Err(cursor.error(offset, format!("AND output literal {lhs} must be even and non-constant")));
        }
        let var = (lhs >> 1) as usize;
        if var > h.m {
            return Err(AigError::Structural(format!("AND literal {lhs} exceeds M = {}", h.m)));
        }
        if var_map[var] != UNDEF || and_of_var[var] != UNDEF {
            return Err(cursor.error(offset, format!("variable {var} defined twice")));
        }
        and_of_var[var] = k as u32;
        raw_ands.push((var, f[1], f[2]));
    }

    let check = |var_map: &[u32], lit: u32| -> Result<usize, AigError> {
        let var = (lit >> 1) as usize;
        if var > h.m || (var_map[var] == UNDEF && and_of_var[var] == UNDEF) {
            return Err(AigError::Structural(format!("literal {lit} refers to an undefined variable")));
        }
        Ok(var)
    };

    // Post-order DFS so that ANDs listed in topological order keep their order.
    let mut state = vec![0u8; h.a];
    let mut order = Vec::with_capacity(h.a);
    for root in 0..h.a {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, false)];
        while let Some((k, expanded)) = stack.pop() {
            if expanded {
                state[k] = 2;
                order.push(k);
                continue;
            }
            if state[k] == 2 {
                continue;
            }
            if state[k] == 1 {
                return Err(AigError::Structural("combinational cycle among AND gates".into()));
            }
            state[k] = 1;
            stack.push((k, true));
            let (_, r0, r1) = raw_ands[k];
            for r in [r1, r0] {
                let var = check(&var_map, r)?;
                let dep = and_of_var[var];
                if dep != UNDEF {
                    match state[dep as usize] {
                        0 => stack.push((dep as usize, false)),
                        1 => return Err(AigError::Structural("combinational cycle among AND gates".into())),
                        _ => {}
                    }
                }
            }
        }
    }
    for &k in &order {
        var_map[raw_ands[k].0] = next_index;
        next_index += 1;
    }
    let lit = |code: u32| -> Result<Lit, AigError> {
        let var = check(&var_map, code)?;
        Ok(Lit::new(var_map[var] as usize, code & 1 == 1))
    };
    let mut nodes = vec![Node::Const];
    nodes.extend(std::iter::repeat_n(Node::Input, h.i));
    nodes.extend(std::iter::repeat_n(Node::Latch, h.l));
    for &k in &order {
        let (_, r0, r1) = raw_ands[k];
        nodes.push(Node::And(lit(r0)?, lit(r1)?));
    }
    let latches = raw_latches
        .into_iter()
        .map(|(next, init)| Ok(Latch { next: lit(next)?, init }))
        .collect::<Result<Vec<_>, AigError>>()?;
    let outputs = raw_outputs.into_iter().map(lit).collect::<Result<Vec<_>, _>>()?;
    Aig::from_parts(nodes, h.i, latches, outputs)
}

fn push_varint(out: &mut Vec<u8>, mut v: u32) {
    while v >= 0x80 {
        out.push((v as u8 & 0x7f) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

fn init_field(latch: &Latch, cur: u32) -> Option<u32> {
    match latch.init {
        LatchInit::Zero => None,
        LatchInit::One => Some(1),
        LatchInit::Undefined => Some(cur),
    }
}

/// Serializes `g` as ASCII (`aag`) or binary (`aig`) AIGER. No symbol table
/// or comment section is emitted.
pub fn write_aiger(g: &Aig, ascii: bool) -> Vec<u8> {
    let m = g.num_nodes() - 1;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{} {} {} {} {} {}",
        if ascii { "aag" } else { "aig" },
        m,
        g.num_inputs(),
        g.num_latches(),
        g.num_outputs(),
        g.num_ands()
    );
    if ascii {
        for i in 0..g.num_inputs() {
            let _ = writeln!(text, "{}", 2 * (i + 1));
        }
    }
    for (k, latch) in g.latches().iter().enumerate() {
        let cur = 2 * (g.num_inputs() + k + 1) as u32;
        if ascii {
            let _ = write!(text, "{cur} ");
        }
        let _ = write!(text, "{}", latch.next.code());
        if let Some(init) = init_field(latch, cur) {
            let _ = write!(text, " {init}");
        }
        text.push('\n');
    }
    for o in g.outputs() {
        let _ = writeln!(text, "{}", o.code());
    }
    let mut out = if ascii {
        for (i, a, b) in g.ands() {
            let _ = writeln!(text, "{} {} {}", 2 * i, b.code(), a.code());
        }
        text.into_bytes()
    } else {
        let mut out = text.into_bytes();
        for (i, a, b) in g.ands() {
            let lhs = 2 * i as u32;
            let (hi, lo) = (a.code().max(b.code()), a.code().min(b.code()));
            push_varint(&mut out, lhs - hi);
            push_varint(&mut out, hi - lo);
        }
        out
    };
    out.shrink_to_fit();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::AigBuilder;

    #[test]
    fn single_and_ascii() {
        let g = parse_aiger(b"aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n").unwrap();
        assert_eq!(g.num_inputs(), 2);
        assert_eq!(g.num_outputs(), 1);
        assert_eq!(g.num_ands(), 1);
        assert_eq!(g.node(3), Node::And(Lit::new(1, false), Lit::new(2, false)));
        assert_eq!(g.outputs()[0], Lit::new(3, false));
    }

    #[test]
    fn constant_output_only() {
        let g = parse_aiger(b"aag 0 0 0 1 0\n0\n").unwrap();
        assert_eq!(g.num_ands(), 0);
        assert_eq!(g.outputs(), &[Lit::FALSE]);
        assert_eq!(write_aiger(&g, true), b"aag 0 0 0 1 0\n0\n");
    }

    #[test]
    fn binary_matches_ascii() {
        let ascii = parse_aiger(b"aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n").unwrap();
        let bin = write_aiger(&ascii, false);
        // delta0 = 6 - 4 = 2, delta1 = 4 - 2 = 2
        assert_eq!(bin, b"aig 3 2 0 1 1\n6\n\x02\x02");
        assert_eq!(parse_aiger(&bin).unwrap(), ascii);
        assert!(write_aiger(&ascii, true).starts_with(b"aag 3 2 0 1 1"));
    }

    #[test]
    fn out_of_order_ascii_ands_are_sorted() {
        let g = parse_aiger(b"aag 4 2 0 1 2\n2\n4\n8\n8 6 2\n6 2 5\n").unwrap();
        assert_eq!(g.node(3), Node::And(Lit::new(1, false), Lit::new(2, true)));
        assert_eq!(g.node(4), Node::And(Lit::new(1, false), Lit::new(3, false)));
        assert_eq!(g.outputs()[0], Lit::new(4, false));
    }

    #[test]
    fn malformed_header_reports_offset() {
        match parse_aiger(b"aag 3 x 0 1 1\n") {
            Err(AigError::Parse { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_aiger(b"foo 1 2 3\n"), Err(AigError::Parse { offset: 0, .. })));
    }

    #[test]
    fn dangling_literal_is_structural() {
        assert!(matches!(
            parse_aiger(b"aag 3 2 0 1 1\n2\n4\n6\n6 2 8\n"),
            Err(AigError::Structural(_))
        ));
        assert!(matches!(parse_aiger(b"aag 3 2 0 1 0\n2\n4\n6\n"), Err(AigError::Structural(_))));
    }

    #[test]
    fn cycle_is_structural() {
        assert!(matches!(
            parse_aiger(b"aag 4 1 0 1 2\n2\n6\n6 2 8\n8 2 6\n"),
            Err(AigError::Structural(_))
        ));
    }

    #[test]
    fn latches_round_trip_and_can_be_rejected() {
        let text = b"aag 3 1 2 1 0\n2\n4 2\n6 5 6\n6\n";
        let g = parse_aiger(text).unwrap();
        assert_eq!(g.num_latches(), 2);
        assert_eq!(g.latches()[1].init, LatchInit::Undefined);
        assert_eq!(parse_aiger(&write_aiger(&g, false)).unwrap(), g);
        assert_eq!(parse_aiger(&write_aiger(&g, true)).unwrap(), g);
        let strict = ParseOptions { combinational_only: true };
        assert!(matches!(parse_aiger_with(text, strict), Err(AigError::Unsupported(_))));
    }

    #[test]
    fn large_deltas_use_multibyte_varints() {
        let mut b = AigBuilder::new(200);
        let x = b.input(0);
        let y = b.input(199);
        let p = b.and(x, !y);
        b.add_output(p);
        let g = b.finish();
        assert_eq!(parse_aiger(&write_aiger(&g, false)).unwrap(), g);
    }

    #[test]
    fn truncated_binary_reports_offset() {
        let err = parse_aiger(b"aig 3 2 0 1 1\n6\n\x02").unwrap_err();
        assert!(matches!(err, AigError::Parse { offset: 17, .. }), "{err:?}");
    }
}
