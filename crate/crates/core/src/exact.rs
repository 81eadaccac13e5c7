//! Exact rational matrices, determinants and principal-minor enumeration.
//!
//! Determinants are computed fraction-free: every row is scaled to integers
//! by the lcm of its denominators and the integer matrix is reduced with
//! Bareiss elimination, first in checked `i128` arithmetic and, on overflow,
//! in arbitrary precision. [`ExactMatrix::cofactor_det`] expands by minors
//! and shares no code with that path; it is kept as a cross-check oracle.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in canonical form (positive denominator,
/// reduced).
pub type Rational = BigRational;

/// Largest matrix order handled by the library.
pub const MAX_ORDER: usize = 8;

/// Builds a rational from a pair of machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integral rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `p`, `-p` or `p/q`. Zero denominators are rejected.
pub fn parse_rational(token: &str) -> std::result::Result<Rational, String> {
    let token = token.trim();
    let (num, den) = match token.split_once('/') {
        Some((n, d)) => (n, d),
        None => (token, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| format!("invalid rational `{token}`"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| format!("invalid rational `{token}`"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in `{token}`"));
    }
    Ok(Rational::new(num, den))
}

/// Strictly increasing, nonempty set of row/column indices.
///
/// Stored 0-based; `Display` and serde use the 1-based notation of the
/// text formats (`{1,3}`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Builds a set from 0-based indices, validating against order `n`.
    pub fn new(mut elems: Vec<usize>, n: usize) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::InvalidIndexSet("empty".into()));
        }
        elems.sort_unstable();
        if elems.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidIndexSet("repeated index".into()));
        }
        if let Some(&last) = elems.last() {
            if last >= n {
                return Err(Error::IndexOutOfBounds {
                    index: last + 1,
                    order: n,
                });
            }
        }
        Ok(IndexSet(elems))
    }

    /// Builds a set from 1-based indices.
    pub fn one_based(elems: &[usize], n: usize) -> Result<Self> {
        if let Some(&bad) = elems.iter().find(|&&e| e == 0) {
            return Err(Error::IndexOutOfBounds {
                index: bad,
                order: n,
            });
        }
        Self::new(elems.iter().map(|e| e - 1).collect(), n)
    }

    pub(crate) fn from_sorted(elems: Vec<usize>) -> Self {
        debug_assert!(!elems.is_empty() && elems.windows(2).all(|w| w[0] < w[1]));
        IndexSet(elems)
    }

    pub fn elements(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// All index sets of order `k` over `0..n`, lexicographically.
    pub fn all_of_order(n: usize, k: usize) -> impl Iterator<Item = IndexSet> {
        (0..n).combinations(k).map(IndexSet)
    }

    /// Parses `{1,3}` or `1,3` (1-based).
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let body = s.trim().trim_start_matches('{').trim_end_matches('}');
        let elems = body
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidIndexSet(format!("bad element `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::one_based(&elems, n)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().map(|i| i + 1).join(","))
    }
}

/// Square matrix of exact rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl ExactMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("order must be at least 1".into()));
        }
        if n > MAX_ORDER {
            return Err(Error::OrderTooLarge {
                order: n,
                max: MAX_ORDER,
            });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::InvalidMatrix(format!(
                "row of length {} in matrix of order {n}",
                bad.len()
            )));
        }
        Ok(ExactMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from small integers.
    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::diagonal((0..n).map(|_| Rational::one()).collect())
    }

    pub fn diagonal(diag: Vec<Rational>) -> Result<Self> {
        let n = diag.len();
        let mut rows = vec![vec![Rational::zero(); n]; n];
        for (i, d) in diag.into_iter().enumerate() {
            rows[i][i] = d;
        }
        Self::new(rows)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.entries.chunks(self.n)
    }

    pub fn with_rows_swapped(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        for j in 0..self.n {
            out.entries.swap(a * self.n + j, b * self.n + j);
        }
        out
    }

    /// `P A Pᵀ` where row/column `i` of the result is row/column `perm[i]`
    /// of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for &pi in perm {
            for &pj in perm {
                entries.push(self.get(pi, pj).clone());
            }
        }
        ExactMatrix { n, entries }
    }

    pub fn submatrix(&self, s: &IndexSet) -> Result<Self> {
        self.check_set(s)?;
        let rows = s
            .elements()
            .iter()
            .map(|&i| s.elements().iter().map(|&j| self.get(i, j).clone()).collect())
            .collect();
        Self::new(rows)
    }

    fn check_set(&self, s: &IndexSet) -> Result<()> {
        match s.elements().last() {
            Some(&last) if last >= self.n => Err(Error::IndexOutOfBounds {
                index: last + 1,
                order: self.n,
            }),
            _ => Ok(()),
        }
    }

    /// Exact determinant by fraction-free elimination.
    pub fn det(&self) -> Rational {
        IntegerForm::new(self).minor(&IndexSet::from_sorted((0..self.n).collect()))
    }

    /// Determinant by recursive cofactor expansion along the first row.
    ///
    /// Exponential; only meant as an independent oracle for small orders.
    pub fn cofactor_det(&self) -> Rational {
        let cols: Vec<usize> = (0..self.n).collect();
        self.cofactor_rec(0, &cols)
    }

    fn cofactor_rec(&self, row: usize, cols: &[usize]) -> Rational {
        if cols.is_empty() {
            return Rational::one();
        }
        let mut acc = Rational::zero();
        for (pos, &c) in cols.iter().enumerate() {
            let entry = self.get(row, c);
            if entry.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = entry * self.cofactor_rec(row + 1, &rest);
            if pos % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    pub fn principal_minor(&self, s: &IndexSet) -> Result<Rational> {
        self.check_set(s)?;
        Ok(IntegerForm::new(self).minor(s))
    }

    /// All `2ⁿ − 1` principal minors grouped by order.
    pub fn minor_profile(&self) -> MinorProfile {
        let form = IntegerForm::new(self);
        let by_order = (1..=self.n)
            .map(|k| {
                let minors = IndexSet::all_of_order(self.n, k)
                    .map(|s| {
                        let v = form.minor(&s);
                        (s, v)
                    })
                    .collect::<Vec<_>>();
                OrderMinors::summarize(k, minors)
            })
            .collect();
        MinorProfile { n: self.n, by_order }
    }
}

impl fmt::Display for ExactMatrix {
    /// Partial-matrix text format without unspecified cells.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for row in self.rows() {
            writeln!(f, "{}", row.iter().join(" "))?;
        }
        Ok(())
    }
}

/// Minors of one order with summary counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderMinors {
    pub order: usize,
    pub minors: Vec<(IndexSet, Rational)>,
    pub min: Rational,
    pub max: Rational,
    pub positive: usize,
    pub zero: usize,
    pub negative: usize,
}

impl OrderMinors {
    fn summarize(order: usize, minors: Vec<(IndexSet, Rational)>) -> Self {
        let min = minors.iter().map(|(_, v)| v).min().cloned().unwrap_or_default();
        let max = minors.iter().map(|(_, v)| v).max().cloned().unwrap_or_default();
        let positive = minors.iter().filter(|(_, v)| v.is_positive()).count();
        let negative = minors.iter().filter(|(_, v)| v.is_negative()).count();
        let zero = minors.len() - positive - negative;
        OrderMinors {
            order,
            minors,
            min,
            max,
            positive,
            zero,
            negative,
        }
    }

    pub fn values(&self) -> impl Iterator<Item = &Rational> {
        self.minors.iter().map(|(_, v)| v)
    }
}

/// Every principal minor of a matrix, grouped by order `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorProfile {
    pub n: usize,
    pub by_order: Vec<OrderMinors>,
}

impl MinorProfile {
    pub fn order(&self, k: usize) -> &OrderMinors {
        &self.by_order[k - 1]
    }

    pub fn total(&self) -> usize {
        self.by_order.iter().map(|o| o.minors.len()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(IndexSet, Rational)> {
        self.by_order.iter().flat_map(|o| o.minors.iter())
    }

    pub fn get(&self, s: &IndexSet) -> Option<&Rational> {
        self.order(s.len())
            .minors
            .iter()
            .find(|(t, _)| t == s)
            .map(|(_, v)| v)
    }
}

/// Row-scaled integer copy of a rational matrix: row `i` of the original is
/// row `i` of `rows` divided by `scales[i]`.
pub(crate) struct IntegerForm {
    n: usize,
    rows: Vec<BigInt>,
    scales: Vec<BigInt>,
    small: Option<Vec<i128>>,
}

impl IntegerForm {
    pub(crate) fn new(m: &ExactMatrix) -> Self {
        let n = m.order();
        let mut rows = Vec::with_capacity(n * n);
        let mut scales = Vec::with_capacity(n);
        for r in m.rows() {
            let l = r
                .iter()
                .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            for v in r {
                rows.push(v.numer() * (&l / v.denom()));
            }
            scales.push(l);
        }
        let small = rows
            .iter()
            .map(|v| v.to_i64().map(i128::from))
            .collect::<Option<Vec<_>>>();
        IntegerForm {
            n,
            rows,
            scales,
            small,
        }
    }

    /// Integer determinant of the scaled submatrix on `s`.
    pub(crate) fn minor_int(&self, s: &IndexSet) -> BigInt {
        let idx = s.elements();
        if let Some(small) = &self.small {
            let sub = gather(small, self.n, idx);
            if let Some(d) = bareiss(sub, idx.len()) {
                return BigInt::from(d);
            }
        }
        let sub = gather(&self.rows, self.n, idx);
        bareiss(sub, idx.len()).expect("arbitrary-precision elimination cannot overflow")
    }

    pub(crate) fn minor(&self, s: &IndexSet) -> Rational {
        let scale = s
            .elements()
            .iter()
            .fold(BigInt::one(), |acc, &i| acc * &self.scales[i]);
        Rational::new(self.minor_int(s), scale)
    }
}

fn gather<T: Clone>(full: &[T], n: usize, idx: &[usize]) -> Vec<T> {
    let mut out = Vec::with_capacity(idx.len() * idx.len());
    for &i in idx {
        for &j in idx {
            out.push(full[i * n + j].clone());
        }
    }
    out
}

/// Bareiss fraction-free elimination on a row-major `n × n` integer matrix.
///
/// Returns `None` only when a checked operation overflows, which cannot
/// happen for `BigInt`.
pub(crate) fn bareiss<T>(mut a: Vec<T>, n: usize) -> Option<T>
where
    T: Clone + Zero + One + CheckedMul + CheckedSub + CheckedDiv,
{
    if n == 0 {
        return Some(T::one());
    }
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(pivot) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                return Some(T::zero());
            };
            for j in 0..n {
                a.swap(k * n + j, pivot * n + j);
            }
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = a[i * n + j].checked_mul(&a[k * n + k])?;
                let rhs = a[i * n + k].checked_mul(&a[k * n + j])?;
                a[i * n + j] = lhs.checked_sub(&rhs)?.checked_div(&prev)?;
            }
        }
        prev = a[k * n + k].clone();
    }
    let d = a[n * n - 1].clone();
    if negate {
        T::zero().checked_sub(&d)
    } else {
        Some(d)
    }
}

/// Serde helper that stores rationals as `p/q` strings.
pub mod rational_str {
    use super::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

impl Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        IndexSet::parse(&s, MAX_ORDER).map_err(serde::de::Error::custom)
    }
}
