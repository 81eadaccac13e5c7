//! Specification patterns as digraphs: loops mark specified diagonal cells,
//! arcs mark specified off-diagonal cells.
//!
//! Canonical forms are computed by brute force over all `n!` relabelings,
//! which is exact and fast enough for `n ≤ 8`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::classes::PartialMatrix;
use crate::error::{Error, Result};
use crate::exact::{Rational, MAX_ORDER};
use crate::format::content_lines;

/// Largest order for which full enumeration is offered.
pub const MAX_ENUMERATION_ORDER: usize = 4;

/// Digraph on vertices `0..n` (rendered 1-based). Cell `(i, j)` is bit
/// `8 i + j` of the adjacency word; diagonal bits are loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    n: usize,
    adj: u64,
}

fn bit(i: usize, j: usize) -> u64 {
    1u64 << (8 * i + j)
}

impl Pattern {
    /// Builds a pattern from 0-based loops and arcs.
    pub fn new(
        n: usize,
        loops: impl IntoIterator<Item = usize>,
        arcs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if n == 0 || n > MAX_ORDER {
            return Err(Error::OrderTooLarge {
                order: n,
                max: MAX_ORDER,
            });
        }
        let mut adj = 0;
        for i in loops {
            if i >= n {
                return Err(Error::IndexOutOfBounds {
                    index: i + 1,
                    order: n,
                });
            }
            adj |= bit(i, i);
        }
        for (i, j) in arcs {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfBounds {
                    index: i.max(j) + 1,
                    order: n,
                });
            }
            if i == j {
                return Err(Error::Precondition(format!(
                    "arc ({},{}) is a loop",
                    i + 1,
                    j + 1
                )));
            }
            adj |= bit(i, j);
        }
        Ok(Pattern { n, adj })
    }

    /// No arcs; loops on every vertex when `all_loops`.
    pub fn null(n: usize, all_loops: bool) -> Result<Self> {
        let loops: Vec<usize> = if all_loops { (0..n).collect() } else { vec![] };
        Pattern::new(n, loops, [])
    }

    /// Every off-diagonal arc; loops on every vertex when `all_loops`.
    pub fn complete(n: usize, all_loops: bool) -> Result<Self> {
        let loops: Vec<usize> = if all_loops { (0..n).collect() } else { vec![] };
        Pattern::new(n, loops, off_diagonal_pairs(n))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        i != j && self.adj & bit(i, j) != 0
    }

    pub fn has_loop(&self, i: usize) -> bool {
        self.adj & bit(i, i) != 0
    }

    /// Cell `(i, j)` is specified.
    pub fn specifies(&self, i: usize, j: usize) -> bool {
        self.adj & bit(i, j) != 0
    }

    pub fn loops(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&i| self.has_loop(i))
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        off_diagonal_pairs(self.n).filter(|&(i, j)| self.has_arc(i, j))
    }

    pub fn arc_count(&self) -> usize {
        self.arcs().count()
    }

    pub fn all_loops(&self) -> bool {
        (0..self.n).all(|i| self.has_loop(i))
    }

    pub fn is_loopless(&self) -> bool {
        self.loops().next().is_none()
    }

    pub fn is_complete(&self) -> bool {
        self.arc_count() == self.n * (self.n - 1)
    }

    pub fn is_null(&self) -> bool {
        self.arc_count() == 0
    }

    /// Vertex `i` of the result is vertex `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Pattern {
        let mut adj = 0;
        for i in 0..self.n {
            for j in 0..self.n {
                if self.specifies(perm[i], perm[j]) {
                    adj |= bit(i, j);
                }
            }
        }
        Pattern { n: self.n, adj }
    }

    /// Row-major adjacency bits, first cell most significant.
    fn encode(&self) -> u64 {
        let n = self.n;
        let mut code = 0u64;
        for i in 0..n {
            for j in 0..n {
                code = (code << 1) | u64::from(self.specifies(i, j));
            }
        }
        code
    }

    /// Builds a partial matrix specifying exactly this pattern.
    pub fn partial_with(&self, mut value: impl FnMut(usize, usize) -> Rational) -> PartialMatrix {
        let rows = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.specifies(i, j).then(|| value(i, j)))
                    .collect()
            })
            .collect();
        PartialMatrix::new(rows).expect("order already validated")
    }
}

fn off_diagonal_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
}

/// Loops for specified diagonal cells, arcs for specified off-diagonal cells.
pub fn pattern_of(p: &PartialMatrix) -> Pattern {
    let n = p.order();
    let loops = (0..n).filter(|&i| p.is_specified(i, i));
    let arcs = off_diagonal_pairs(n).filter(|&(i, j)| p.is_specified(i, j));
    Pattern::new(n, loops, arcs).expect("partial matrix order is valid")
}

/// Minimal row-major adjacency encoding over all vertex relabelings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub n: usize,
    pub code: u64,
}

impl CanonicalForm {
    pub fn bits(&self) -> String {
        let len = self.n * self.n;
        (0..len)
            .map(|k| if self.code >> (len - 1 - k) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// The pattern whose encoding is this code.
    pub fn representative(&self) -> Pattern {
        let n = self.n;
        let mut adj = 0;
        for i in 0..n {
            for j in 0..n {
                if self.code >> (n * n - 1 - (i * n + j)) & 1 == 1 {
                    adj |= bit(i, j);
                }
            }
        }
        Pattern { n, adj }
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bits())
    }
}

impl FromStr for CanonicalForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let n = (1..=MAX_ORDER).find(|n| n * n == s.len()).ok_or(Error::Parse {
            line: 1,
            msg: format!("code `{s}` does not have square length"),
        })?;
        let code = u64::from_str_radix(s, 2).map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?;
        Ok(CanonicalForm { n, code })
    }
}

impl Serialize for CanonicalForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CanonicalForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

pub fn canonical_form(g: &Pattern) -> CanonicalForm {
    let code = (0..g.n)
        .permutations(g.n)
        .map(|perm| g.permuted(&perm).encode())
        .min()
        .expect("at least one permutation");
    CanonicalForm { n: g.n, code }
}

/// Which loops the enumerated universe carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopMode {
    AllLoops,
    NoLoops,
}

/// One canonical representative per isomorphism class of arc sets on
/// `p` vertices, sorted by arc count and then canonical code.
pub fn enumerate_patterns(p: usize, loop_mode: LoopMode) -> Result<Vec<Pattern>> {
    if p == 0 || p > MAX_ENUMERATION_ORDER {
        return Err(Error::OrderTooLarge {
            order: p,
            max: MAX_ENUMERATION_ORDER,
        });
    }
    let pairs: Vec<(usize, usize)> = off_diagonal_pairs(p).collect();
    let all_loops = loop_mode == LoopMode::AllLoops;
    let mut seen = BTreeSet::new();
    for mask in 0u32..(1 << pairs.len()) {
        let arcs = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &a)| a);
        let loops: Vec<usize> = if all_loops { (0..p).collect() } else { vec![] };
        let g = Pattern::new(p, loops, arcs)?;
        let cf = canonical_form(&g);
        seen.insert((g.arc_count(), cf));
    }
    Ok(seen.into_iter().map(|(_, cf)| cf.representative()).collect())
}

/// Class counts per arc count `q = 0..=p(p−1)`.
pub fn bucket_sizes(patterns: &[Pattern]) -> Vec<usize> {
    let Some(first) = patterns.first() else {
        return vec![];
    };
    let n = first.order();
    let mut sizes = vec![0; n * (n - 1) + 1];
    for g in patterns {
        sizes[g.arc_count()] += 1;
    }
    sizes
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralProps {
    pub is_null: bool,
    pub is_complete: bool,
    pub is_asymmetric: bool,
    pub is_symmetric: bool,
    pub has_two_cycle: bool,
    pub all_loops: bool,
    pub arc_count: usize,
}

pub fn structural_props(g: &Pattern) -> StructuralProps {
    let has_two_cycle = g.arcs().any(|(i, j)| g.has_arc(j, i));
    StructuralProps {
        is_null: g.is_null(),
        is_complete: g.is_complete(),
        is_asymmetric: !has_two_cycle,
        is_symmetric: g.arcs().all(|(i, j)| g.has_arc(j, i)),
        has_two_cycle,
        all_loops: g.all_loops(),
        arc_count: g.arc_count(),
    }
}

impl fmt::Display for Pattern {
    /// Digraph text format: `p q [loops=all]`, then `i j` per arc and `i i`
    /// per loop (omitted under `loops=all`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let all = self.all_loops();
        write!(f, "{} {}", self.n, self.arc_count())?;
        if all {
            f.write_str(" loops=all")?;
        }
        writeln!(f)?;
        if !all {
            for i in self.loops() {
                writeln!(f, "{} {}", i + 1, i + 1)?;
            }
        }
        for (i, j) in self.arcs() {
            writeln!(f, "{} {}", i + 1, j + 1)?;
        }
        Ok(())
    }
}

pub fn parse_pattern(text: &str) -> Result<Pattern> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (p, q, all_loops) = match fields.as_slice() {
        [p, q] => (*p, *q, false),
        [p, q, "loops=all"] => (*p, *q, true),
        _ => return Err(perr(line, format!("expected `p q [loops=all]`, found `{header}`"))),
    };
    let p: usize = p
        .parse()
        .map_err(|_| perr(line, format!("invalid order `{p}`")))?;
    let q: usize = q
        .parse()
        .map_err(|_| perr(line, format!("invalid arc count `{q}`")))?;
    if p == 0 || p > MAX_ORDER {
        return Err(perr(line, format!("order must be in 1..={MAX_ORDER}")));
    }
    let mut loops = BTreeSet::new();
    let mut arcs = BTreeSet::new();
    if all_loops {
        loops.extend(0..p);
    }
    for (line, body) in lines {
        let nums: Vec<usize> = body
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| perr(line, format!("invalid vertex `{t}`"))))
            .collect::<Result<_>>()?;
        let &[i, j] = nums.as_slice() else {
            return Err(perr(line, format!("expected `i j`, found `{body}`")));
        };
        if i == 0 || j == 0 || i > p || j > p {
            return Err(perr(line, format!("vertex out of range 1..={p}")));
        }
        let fresh = if i == j {
            loops.insert(i - 1) || all_loops
        } else {
            arcs.insert((i - 1, j - 1))
        };
        if !fresh {
            return Err(perr(line, format!("duplicate arc `{i} {j}`")));
        }
    }
    if arcs.len() != q {
        return Err(perr(
            1,
            format!("header declares {q} arcs but {} were listed", arcs.len()),
        ));
    }
    Pattern::new(p, loops, arcs)
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_pattern(s)
    }
}

/// Groups representatives by arc count.
pub fn by_arc_count(patterns: &[Pattern]) -> BTreeMap<usize, Vec<Pattern>> {
    let mut out: BTreeMap<usize, Vec<Pattern>> = BTreeMap::new();
    for g in patterns {
        out.entry(g.arc_count()).or_default().push(*g);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::format::parse_partial;

    fn loopless(n: usize, arcs: &[(usize, usize)]) -> Pattern {
        Pattern::new(n, [], arcs.iter().map(|&(i, j)| (i - 1, j - 1))).unwrap()
    }

    #[test]
    fn pattern_of_two_cycle_witness() {
        let p = parse_partial("3\n1 -1 ?\n-1 1 ?\n? ? 1\n").unwrap();
        let g = pattern_of(&p);
        assert!(g.all_loops());
        assert_eq!(g.arcs().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn pattern_of_rank_one_witness() {
        let p = parse_partial("3\n1 1 1\n1 1 1\n1 1 ?\n").unwrap();
        let g = pattern_of(&p);
        assert_eq!(g.loops().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(g.arc_count(), 6);
    }

    #[test]
    fn pattern_of_unspecified_is_empty() {
        let g = pattern_of(&PartialMatrix::unspecified(2).unwrap());
        assert!(g.is_loopless() && g.is_null());
    }

    #[test]
    fn canonical_form_examples() {
        assert_eq!(
            canonical_form(&loopless(3, &[(1, 2)])),
            canonical_form(&loopless(3, &[(2, 3)]))
        );
        assert_ne!(
            canonical_form(&loopless(3, &[(1, 2), (2, 1)])),
            canonical_form(&loopless(3, &[(1, 2)]))
        );
        assert_eq!(
            canonical_form(&loopless(3, &[(1, 2), (2, 3), (3, 1)])),
            canonical_form(&loopless(3, &[(2, 1), (3, 2), (1, 3)]))
        );
    }

    #[test]
    fn representative_has_canonical_code() {
        for g in enumerate_patterns(3, LoopMode::AllLoops).unwrap() {
            let cf = canonical_form(&g);
            assert_eq!(cf.representative(), g);
            assert_eq!(cf.bits().parse::<CanonicalForm>().unwrap(), cf);
        }
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_patterns(1, LoopMode::AllLoops).unwrap().len(), 1);
        let two = enumerate_patterns(2, LoopMode::AllLoops).unwrap();
        assert_eq!(bucket_sizes(&two), vec![1, 1, 1]);
        let three = enumerate_patterns(3, LoopMode::NoLoops).unwrap();
        assert_eq!(bucket_sizes(&three), vec![1, 1, 4, 4, 4, 1, 1]);
        assert!(enumerate_patterns(5, LoopMode::AllLoops).is_err());
    }

    #[test]
    fn props() {
        let all = |n: usize, arcs: &[(usize, usize)]| {
            Pattern::new(n, 0..n, arcs.iter().map(|&(i, j)| (i - 1, j - 1))).unwrap()
        };
        let k3 = structural_props(&Pattern::complete(3, true).unwrap());
        assert!(k3.is_complete && k3.is_symmetric && k3.has_two_cycle && k3.all_loops);
        let d = structural_props(&all(3, &[(1, 2), (2, 1)]));
        assert!(d.has_two_cycle && !d.is_complete && !d.is_asymmetric && d.is_symmetric);
        let c3 = structural_props(&all(3, &[(1, 2), (2, 3), (3, 1)]));
        assert!(c3.is_asymmetric && !c3.has_two_cycle && c3.arc_count == 3);
    }

    #[test]
    fn text_format_round_trip() {
        let g = Pattern::new(3, [0, 2], [(0, 1), (2, 0)]).unwrap();
        let text = g.to_string();
        assert_eq!(text, "3 2\n1 1\n3 3\n1 2\n3 1\n");
        assert_eq!(parse_pattern(&text).unwrap(), g);
        let h = Pattern::new(3, 0..3, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(h.to_string(), "3 2 loops=all\n1 2\n2 1\n");
        assert_eq!(parse_pattern(&h.to_string()).unwrap(), h);
    }

    #[test]
    fn text_format_errors() {
        assert!(parse_pattern("3 1\n1 2\n1 3\n").is_err());
        assert!(parse_pattern("3 2\n1 2\n1 2\n").is_err());
        assert!(parse_pattern("3 1\n1 4\n").is_err());
        assert!(parse_pattern("3\n").is_err());
    }

    #[test]
    fn partial_with_round_trips_through_pattern_of() {
        let g = Pattern::new(4, [1, 3], [(0, 1), (3, 2), (2, 0)]).unwrap();
        assert_eq!(pattern_of(&g.partial_with(|_, _| int(1))), g);
    }
}
