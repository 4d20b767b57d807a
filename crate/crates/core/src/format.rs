//! Line-based text format for power-commutator presentations.
//!
//! ```text
//! # extraspecial group of order 27 and exponent 3
//! p 3
//! ngens 3
//! comm 2 1 : 3 1
//! ```
//!
//! `pow i : j1 e1 j2 e2 ...` means `g_i^p = g_j1^e1 g_j2^e2 ...` and
//! `comm j i : ...` means `[g_j, g_i] = ...` with `j > i`. Indices are
//! 1-based, relations with trivial right side are omitted, and `#` starts a
//! comment.

use std::fmt::Write as _;

use crate::error::PcpError;
use crate::pcp::{pair_index, ExponentVector, PcPresentation, PcRelations};

fn malformed(line: usize, msg: impl std::fmt::Display) -> PcpError {
    PcpError::Malformed(format!("line {line}: {msg}"))
}

/// Parses relations without checking consistency.
pub fn parse_relations(text: &str) -> Result<PcRelations, PcpError> {
    let mut p = None;
    let mut n = None;
    let mut power: Vec<ExponentVector> = Vec::new();
    let mut comm: Vec<ExponentVector> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (head, rhs) = match line.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (line, None),
        };
        let words: Vec<&str> = head.split_whitespace().collect();
        let num = |s: &str| -> Result<usize, PcpError> {
            s.parse().map_err(|_| malformed(lineno, format!("expected a number, found {s:?}")))
        };
        match (words[0], rhs) {
            ("p", None) if words.len() == 2 && p.is_none() => p = Some(num(words[1])? as u32),
            ("ngens", None) if words.len() == 2 && n.is_none() => {
                let m = num(words[1])?;
                n = Some(m);
                power = vec![ExponentVector::identity(m); m];
                comm = vec![ExponentVector::identity(m); m * m.saturating_sub(1) / 2];
            }
            ("pow" | "comm", Some(rhs)) => {
                let (Some(p), Some(n)) = (p, n) else {
                    return Err(malformed(lineno, "relation before `p` and `ngens`"));
                };
                let lhs: Vec<usize> = words[1..].iter().map(|s| num(s)).collect::<Result<_, _>>()?;
                if lhs.iter().any(|&x| x == 0 || x > n) {
                    return Err(malformed(lineno, "generator index out of range"));
                }
                let slot = match (words[0], lhs.as_slice()) {
                    ("pow", &[i]) => &mut power[i - 1],
                    ("comm", &[j, i]) if j > i => &mut comm[pair_index(j - 1, i - 1)],
                    _ => return Err(malformed(lineno, "bad left side")),
                };
                if !seen.insert((words[0], lhs.clone())) {
                    return Err(malformed(lineno, "relation given twice"));
                }
                let terms: Vec<usize> = rhs.split_whitespace().map(num).collect::<Result<_, _>>()?;
                if terms.len() % 2 != 0 {
                    return Err(malformed(lineno, "right side needs generator/exponent pairs"));
                }
                let mut v = vec![0u32; n];
                for pair in terms.chunks(2) {
                    let (g, e) = (pair[0], pair[1]);
                    if g == 0 || g > n {
                        return Err(malformed(lineno, "generator index out of range"));
                    }
                    if e == 0 || e >= p as usize || v[g - 1] != 0 {
                        return Err(malformed(lineno, "exponents must be reduced, nonzero and not repeated"));
                    }
                    v[g - 1] = e as u32;
                }
                *slot = ExponentVector::from_vec(v);
            }
            _ => return Err(malformed(lineno, format!("unrecognized line {line:?}"))),
        }
    }
    let p = p.ok_or_else(|| malformed(0, "missing `p`"))?;
    let n = n.ok_or_else(|| malformed(0, "missing `ngens`"))?;
    PcRelations::new(p, n, power, comm)
}

/// Parses and validates a consistent presentation.
pub fn parse_presentation(text: &str) -> Result<PcPresentation, PcpError> {
    PcPresentation::new(parse_relations(text)?)
}

fn write_rhs(out: &mut String, v: &ExponentVector) {
    let _ = write!(out, " :");
    for (k, e) in v.support() {
        let _ = write!(out, " {} {}", k + 1, e);
    }
    out.push('\n');
}

pub fn render_relations(rels: &PcRelations) -> String {
    let n = rels.ngens();
    let mut out = format!("p {}\nngens {}\n", rels.p(), n);
    for i in 0..n {
        let v = rels.power_rhs(i);
        if !v.is_identity() {
            let _ = write!(out, "pow {}", i + 1);
            write_rhs(&mut out, v);
        }
    }
    for j in 1..n {
        for i in 0..j {
            let v = rels.comm_rhs(j, i);
            if !v.is_identity() {
                let _ = write!(out, "comm {} {}", j + 1, i + 1);
                write_rhs(&mut out, v);
            }
        }
    }
    out
}

pub fn render_presentation(pres: &PcPresentation) -> String {
    render_relations(pres.relations())
}
