//! Sparse multivariate polynomials over the rationals and symbolic
//! determinants of partial matrices.
//!
//! Unspecified off-diagonal cells `(i,j)` become `x_ij`, unspecified diagonal
//! cells become `d_i`. Polynomials render canonically: monomials by
//! descending total degree, then lexicographically by variable sequence,
//! with explicit signs, e.g. `-x13*x31 - x13*x32 - x23*x31 - x23*x32`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::classes::{MatrixClass, PartialMatrix};
use crate::error::{Error, Result};
use crate::exact::{parse_rational, IndexSet, Rational};

/// Largest order accepted by [`sym_det`].
pub const MAX_SYMBOLIC_ORDER: usize = 6;

/// A polynomial variable. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Diag(usize),
    Off(usize, usize),
    Scale,
}

impl Var {
    pub fn off(i: usize, j: usize) -> Result<Var> {
        if i == j || i == 0 || j == 0 {
            return Err(Error::Precondition(format!(
                "x{i}{j} is not an off-diagonal position"
            )));
        }
        Ok(Var::Off(i, j))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Var::Diag(i) => write!(f, "d{i}"),
            Var::Off(i, j) if i < 10 && j < 10 => write!(f, "x{i}{j}"),
            Var::Off(i, j) => write!(f, "x{i}_{j}"),
            Var::Scale => f.write_str("t"),
        }
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 1,
            msg: format!("invalid variable `{s}`"),
        };
        let num = |t: &str| t.parse::<usize>().ok().filter(|&v| v > 0).ok_or_else(bad);
        if s == "t" {
            return Ok(Var::Scale);
        }
        if let Some(rest) = s.strip_prefix('d') {
            return Ok(Var::Diag(num(rest)?));
        }
        if let Some(rest) = s.strip_prefix('x') {
            let (i, j) = match rest.split_once('_') {
                Some((i, j)) => (num(i)?, num(j)?),
                None if rest.len() == 2 => (num(&rest[..1])?, num(&rest[1..])?),
                None => return Err(bad()),
            };
            return Var::off(i, j).map_err(|_| bad());
        }
        Err(bad())
    }
}

/// Product of variables with positive exponents, sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: BTreeMap<Var, u32> = self.0.iter().copied().collect();
        for &(v, e) in &other.0 {
            *out.entry(v).or_default() += e;
        }
        Monomial(out.into_iter().collect())
    }

    /// Variables repeated by exponent, e.g. `d1^2*x12` → `[d1, d1, x12]`.
    fn expanded(&self) -> impl Iterator<Item = Var> + '_ {
        self.0
            .iter()
            .flat_map(|&(v, e)| std::iter::repeat_n(v, e as usize))
    }

    /// Rendering order: higher degree first, then lexicographic.
    fn display_cmp(&self, other: &Monomial) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| self.expanded().cmp(other.expanded()))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(v, e)| if e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Sparse polynomial; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = MultiPoly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: Var) -> Self {
        let mut p = MultiPoly::zero();
        p.add_term(Monomial::var(v), Rational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// The value when the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self
                .terms
                .get(&Monomial::one())
                .cloned(),
            _ => None,
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| *v))
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Renames every variable through `f`.
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let renamed = m
                .0
                .iter()
                .fold(Monomial::one(), |acc, &(v, e)| acc.mul(&Monomial(vec![(f(v), e)])));
            out.add_term(renamed, c.clone());
        }
        out
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        terms.sort_by(|a, b| a.0.display_cmp(b.0));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            if m.0.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for MultiPoly {
    type Err = Error;

    /// Parses the canonical rendering (and any sum of `coef*var^e*...`
    /// terms written the same way).
    fn from_str(s: &str) -> Result<Self> {
        let err = |msg: String| Error::Parse { line: 1, msg };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty polynomial".into()));
        }
        let mut out = MultiPoly::zero();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let mut sign = Rational::one();
            if let Some(r) = rest.strip_prefix('-') {
                sign = -sign;
                rest = r;
            } else if let Some(r) = rest.strip_prefix('+') {
                rest = r;
            }
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let (term, tail) = rest.split_at(end);
            rest = tail;
            if term.is_empty() {
                return Err(err(format!("dangling sign in `{s}`")));
            }
            let mut coef = sign;
            let mut mono = Monomial::one();
            for factor in term.split('*') {
                if factor.starts_with(|c: char| c.is_ascii_digit()) {
                    coef *= parse_rational(factor).map_err(err)?;
                    continue;
                }
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => (
                        n,
                        e.parse::<u32>()
                            .ok()
                            .filter(|&e| e > 0)
                            .ok_or_else(|| err(format!("bad exponent in `{factor}`")))?,
                    ),
                    None => (factor, 1),
                };
                let v: Var = name.parse()?;
                mono = mono.mul(&Monomial(vec![(v, exp)]));
            }
            out.add_term(mono, coef);
        }
        Ok(out)
    }
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Square matrix of polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicMatrix {
    n: usize,
    entries: Vec<MultiPoly>,
}

impl SymbolicMatrix {
    pub fn new(rows: Vec<Vec<MultiPoly>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("symbolic matrix must be square".into()));
        }
        Ok(SymbolicMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i * self.n + j]
    }

    /// Row/column `i` of the result is row/column `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> SymbolicMatrix {
        let entries = perm
            .iter()
            .flat_map(|&pi| perm.iter().map(move |&pj| (pi, pj)))
            .map(|(pi, pj)| self.get(pi, pj).clone())
            .collect();
        SymbolicMatrix { n: self.n, entries }
    }

    pub fn principal(&self, s: &IndexSet) -> SymbolicMatrix {
        let idx = s.elements();
        let entries = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        SymbolicMatrix {
            n: idx.len(),
            entries,
        }
    }
}

impl fmt::Display for SymbolicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Lifts a partial matrix: specified cells become constants, unspecified
/// off-diagonal cells `x_ij`, unspecified diagonal cells `d_i`.
pub fn lift(p: &PartialMatrix) -> SymbolicMatrix {
    let n = p.order();
    let entries = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| match p.get(i, j) {
            Some(v) => MultiPoly::constant(v.clone()),
            None if i == j => MultiPoly::var(Var::Diag(i + 1)),
            None => MultiPoly::var(Var::Off(i + 1, j + 1)),
        })
        .collect();
    SymbolicMatrix { n, entries }
}

/// Expanded determinant by cofactor expansion (division free), memoized
/// over column subsets.
pub fn sym_det(sm: &SymbolicMatrix) -> Result<MultiPoly> {
    let n = sm.order();
    if n > MAX_SYMBOLIC_ORDER {
        return Err(Error::OrderTooLarge {
            order: n,
            max: MAX_SYMBOLIC_ORDER,
        });
    }
    let mut memo: HashMap<u32, MultiPoly> = HashMap::new();
    Ok(det_rec(sm, (1u32 << n) - 1, &mut memo))
}

/// Determinant of the rows `n - |cols| ..` restricted to the columns in
/// `cols`.
fn det_rec(sm: &SymbolicMatrix, cols: u32, memo: &mut HashMap<u32, MultiPoly>) -> MultiPoly {
    if cols == 0 {
        return MultiPoly::constant(Rational::one());
    }
    if let Some(p) = memo.get(&cols) {
        return p.clone();
    }
    let row = sm.order() - cols.count_ones() as usize;
    let mut acc = MultiPoly::zero();
    let mut pos = 0;
    for c in 0..sm.order() {
        if cols & (1 << c) == 0 {
            continue;
        }
        let entry = sm.get(row, c);
        if !entry.is_zero() {
            let term = entry * &det_rec(sm, cols & !(1 << c), memo);
            acc = if pos % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        pos += 1;
    }
    memo.insert(cols, acc.clone());
    acc
}

/// Exact evaluation; every variable of `p` must be assigned.
pub fn substitute(p: &MultiPoly, assignment: &BTreeMap<Var, Rational>) -> Result<Rational> {
    let mut total = Rational::zero();
    for (m, c) in p.terms() {
        let mut term = c.clone();
        for &(v, e) in m.factors() {
            let val = assignment
                .get(&v)
                .ok_or_else(|| Error::MissingVariable(v.to_string()))?;
            for _ in 0..e {
                term *= val;
            }
        }
        total += term;
    }
    Ok(total)
}

/// Symbolic reason why a partial matrix has no completion in a class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ImpossibilityProof {
    /// The full determinant is the zero polynomial, so the unique top-order
    /// principal minor can never be positive.
    ZeroDeterminant { polynomial: MultiPoly },
    /// A `2 × 2` principal minor equals `c·x_ji` where sign symmetry forces
    /// `x_ji` to share the sign of its specified twin and `c` has the
    /// opposite sign, so the minor is negative for every admissible value.
    ForcedNegativeMinor { set: IndexSet, minor: MultiPoly },
    /// Every principal submatrix of this order is fully specified and none
    /// has a positive determinant.
    NoPositiveSpecifiedOrder { order: usize },
    /// Every listed principal minor is `≤ 0` under sign symmetry: each
    /// monomial is a nonnegative product (diagonal variables, twin products
    /// `x_ij·x_ji`, free entries signed like their specified twins) times a
    /// nonpositive coefficient. Either all minors of `order` are listed, or
    /// the class is strict and one suffices.
    NonPositiveMinors { order: usize, minors: Vec<SetMinor> },
    /// A principal minor whose terms are all `≤ 0` under sign symmetry and
    /// at least one never vanishes, so it is negative for every admissible
    /// assignment.
    NegativeMinor { set: IndexSet, minor: MultiPoly },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetMinor {
    pub set: IndexSet,
    pub minor: MultiPoly,
}

/// A partial matrix together with a re-checkable impossibility proof.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonCompletionCertificate {
    #[serde(with = "crate::format::partial_text")]
    pub partial: PartialMatrix,
    pub class: MatrixClass,
    pub proof: ImpossibilityProof,
}

impl NonCompletionCertificate {
    /// Re-derives the proof from the partial matrix alone.
    pub fn recheck(&self) -> bool {
        match &self.proof {
            ImpossibilityProof::ZeroDeterminant { polynomial } => {
                zero_det_applies(self.class)
                    && polynomial.is_zero()
                    && self.partial.order() <= MAX_SYMBOLIC_ORDER
                    && sym_det(&lift(&self.partial)).is_ok_and(|d| d.is_zero())
            }
            ImpossibilityProof::ForcedNegativeMinor { set, minor } => {
                self.class.sign_symmetric()
                    && set.len() == 2
                    && set.elements().last().is_some_and(|&l| l < self.partial.order())
                    && forced_negative(&self.partial, set).as_ref() == Some(minor)
            }
            ImpossibilityProof::NoPositiveSpecifiedOrder { order } => {
                self.class.needs_positive_per_order()
                    && no_positive_specified_order(&self.partial, *order)
            }
            ImpossibilityProof::NonPositiveMinors { order, minors } => {
                recheck_nonpositive(&self.partial, self.class, *order, minors)
            }
            ImpossibilityProof::NegativeMinor { set, minor } => {
                recheck_negative(&self.partial, self.class, set, minor)
            }
        }
    }
}

fn zero_det_applies(c: MatrixClass) -> bool {
    c.needs_positive_per_order()
}

/// Certifies non-completability when the determinant of the lifted matrix
/// vanishes identically. `None` is not evidence of completability.
pub fn prove_noncompletable_by_zero_det(
    p: &PartialMatrix,
    target: MatrixClass,
) -> Result<Option<NonCompletionCertificate>> {
    if !zero_det_applies(target) {
        return Err(Error::UnsupportedClass(format!(
            "{target} does not require a positive top-order minor"
        )));
    }
    let det = sym_det(&lift(p))?;
    Ok(det.is_zero().then(|| NonCompletionCertificate {
        partial: p.clone(),
        class: target,
        proof: ImpossibilityProof::ZeroDeterminant { polynomial: det },
    }))
}

/// The `2 × 2` minor on `set` when it has the forced-negative shape.
fn forced_negative(p: &PartialMatrix, set: &IndexSet) -> Option<MultiPoly> {
    let (i, j) = (set.elements()[0], set.elements()[1]);
    let minor = sym_det(&lift(p).principal(set)).ok()?;
    let shaped = {
        let mut terms = minor.terms();
        let (m, c) = terms.next()?;
        if terms.next().is_some() {
            return None;
        }
        let &[(Var::Off(a, b), 1)] = m.factors() else {
            return None;
        };
        let (a, b) = (a - 1, b - 1);
        if !((a, b) == (i, j) || (a, b) == (j, i)) {
            return None;
        }
        let twin = p.get(b, a)?;
        !twin.is_zero() && (c * twin).is_negative()
    };
    shaped.then_some(minor)
}

/// Certifies non-completability in a sign symmetric class through a `2 × 2`
/// principal minor of the form `c·x_ji` with `c·a_ij < 0`; this arises when
/// the specified diagonal entries `d_i`, `d_j` have zero product.
pub fn prove_noncompletable_by_forced_minor(
    p: &PartialMatrix,
    target: MatrixClass,
) -> Result<Option<NonCompletionCertificate>> {
    if !target.sign_symmetric() {
        return Err(Error::UnsupportedClass(format!(
            "{target} is not sign symmetric"
        )));
    }
    let n = p.order();
    for s in IndexSet::all_of_order(n, 2) {
        if let Some(minor) = forced_negative(p, &s) {
            return Ok(Some(NonCompletionCertificate {
                partial: p.clone(),
                class: target,
                proof: ImpossibilityProof::ForcedNegativeMinor { set: s, minor },
            }));
        }
    }
    Ok(None)
}

fn no_positive_specified_order(p: &PartialMatrix, k: usize) -> bool {
    k >= 1
        && k <= p.order()
        && IndexSet::all_of_order(p.order(), k).all(|s| {
            p.specified_submatrix(&s)
                .is_some_and(|m| !m.det().is_positive())
        })
}

/// Certifies non-completability when some order has all of its principal
/// submatrices fully specified and none of them has a positive determinant
/// (for instance an all-zero specified diagonal).
pub fn prove_noncompletable_by_specified_order(
    p: &PartialMatrix,
    target: MatrixClass,
) -> Result<Option<NonCompletionCertificate>> {
    if !target.needs_positive_per_order() {
        return Err(Error::UnsupportedClass(format!(
            "{target} does not require a positive minor of every order"
        )));
    }
    Ok((1..=p.order())
        .find(|&k| no_positive_specified_order(p, k))
        .map(|order| NonCompletionCertificate {
            partial: p.clone(),
            class: target,
            proof: ImpossibilityProof::NoPositiveSpecifiedOrder { order },
        }))
}

/// Sign of a monomial over all sign symmetric assignments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TermSign {
    Zero,
    /// Sign `±1`; `strict` when the monomial never vanishes.
    Fixed { sign: i8, strict: bool },
}

/// `None` when the sign is not determined by the constraints.
fn monomial_sign(p: &PartialMatrix, m: &Monomial, c: MatrixClass) -> Option<TermSign> {
    let forced_zero = m.factors().iter().any(|&(v, _)| {
        matches!(v, Var::Off(i, j) if p.get(j - 1, i - 1).is_some_and(|a| a.is_zero()))
    });
    if forced_zero {
        return Some(TermSign::Zero);
    }
    let mut sign = 1i8;
    let mut strict = true;
    for &(v, e) in m.factors() {
        match v {
            Var::Diag(_) => strict &= c.positive_diagonal(),
            Var::Off(i, j) => match p.get(j - 1, i - 1) {
                Some(a) => {
                    if a.is_negative() && e % 2 == 1 {
                        sign = -sign;
                    }
                }
                None => {
                    let twin = m
                        .factors()
                        .iter()
                        .find(|(w, _)| *w == Var::Off(j, i))
                        .map_or(0, |&(_, f)| f);
                    if (e + twin) % 2 == 1 {
                        return None;
                    }
                    strict = false;
                }
            },
            Var::Scale => return None,
        }
    }
    Some(TermSign::Fixed { sign, strict })
}

/// Signs of `coefficient × monomial` for every term, or `None` if some term
/// is undetermined. Each entry is `(sign, strict)`.
fn term_signs(p: &PartialMatrix, poly: &MultiPoly, c: MatrixClass) -> Option<Vec<(i8, bool)>> {
    poly.terms()
        .map(|(m, coef)| {
            monomial_sign(p, m, c).map(|t| match t {
                TermSign::Zero => (0, false),
                TermSign::Fixed { sign, strict } => {
                    let s = if coef.is_negative() { -sign } else { sign };
                    (s, strict)
                }
            })
        })
        .collect()
}

/// `poly ≤ 0` for every sign symmetric assignment.
fn sign_nonpositive(p: &PartialMatrix, poly: &MultiPoly) -> bool {
    term_signs(p, poly, MatrixClass::Ssp0).is_some_and(|t| t.iter().all(|&(s, _)| s <= 0))
}

/// `poly < 0` for every sign symmetric assignment with a diagonal allowed
/// by `c`.
fn sign_negative(p: &PartialMatrix, poly: &MultiPoly, c: MatrixClass) -> bool {
    term_signs(p, poly, c).is_some_and(|t| {
        t.iter().all(|&(s, _)| s <= 0) && t.iter().any(|&(s, strict)| s < 0 && strict)
    })
}

fn recheck_negative(p: &PartialMatrix, class: MatrixClass, set: &IndexSet, minor: &MultiPoly) -> bool {
    class.sign_symmetric()
        && set.len() >= 2
        && set.len() <= MAX_SYMBOLIC_ORDER
        && set.elements().iter().all(|&i| i < p.order())
        && sym_det(&lift(p).principal(set)).is_ok_and(|d| &d == minor)
        && sign_negative(p, minor, class)
}

/// Certifies non-completability in a sign symmetric class through a
/// principal minor that is negative for every admissible assignment.
pub fn prove_noncompletable_by_negative_minor(
    p: &PartialMatrix,
    target: MatrixClass,
) -> Result<Option<NonCompletionCertificate>> {
    if !target.sign_symmetric() {
        return Err(Error::UnsupportedClass(format!(
            "{target} is not sign symmetric"
        )));
    }
    let n = p.order();
    let lifted = lift(p);
    for k in 2..=n.min(MAX_SYMBOLIC_ORDER) {
        for set in IndexSet::all_of_order(n, k) {
            let minor = sym_det(&lifted.principal(&set))?;
            if sign_negative(p, &minor, target) {
                return Ok(Some(NonCompletionCertificate {
                    partial: p.clone(),
                    class: target,
                    proof: ImpossibilityProof::NegativeMinor { set, minor },
                }));
            }
        }
    }
    Ok(None)
}

fn recheck_nonpositive(p: &PartialMatrix, class: MatrixClass, order: usize, minors: &[SetMinor]) -> bool {
    if !(class.sign_symmetric() && class.needs_positive_per_order()) || minors.is_empty() {
        return false;
    }
    let n = p.order();
    if order < 2 || order > n.min(MAX_SYMBOLIC_ORDER) {
        return false;
    }
    let mut sets: Vec<&IndexSet> = minors.iter().map(|m| &m.set).collect();
    sets.sort();
    sets.dedup();
    let covers = if class.strict() {
        true
    } else {
        sets.len() == minors.len() && sets.len() == IndexSet::all_of_order(n, order).count()
    };
    covers
        && minors.iter().all(|m| {
            m.set.len() == order
                && m.set.elements().iter().all(|&i| i < n)
                && sym_det(&lift(p).principal(&m.set)).is_ok_and(|d| d == m.minor)
                && sign_nonpositive(p, &m.minor)
        })
}

/// Certifies non-completability in sign symmetric classes that need a
/// positive minor of every order, when the principal minors of some order
/// cannot be positive (strict classes: when one principal minor cannot).
pub fn prove_noncompletable_by_sign(
    p: &PartialMatrix,
    target: MatrixClass,
) -> Result<Option<NonCompletionCertificate>> {
    if !(target.sign_symmetric() && target.needs_positive_per_order()) {
        return Err(Error::UnsupportedClass(format!(
            "{target} is not a sign symmetric class needing positive minors"
        )));
    }
    let n = p.order();
    if n > MAX_SYMBOLIC_ORDER {
        return Err(Error::OrderTooLarge {
            order: n,
            max: MAX_SYMBOLIC_ORDER,
        });
    }
    let lifted = lift(p);
    for k in 2..=n {
        let mut minors = Vec::new();
        for set in IndexSet::all_of_order(n, k) {
            let minor = sym_det(&lifted.principal(&set))?;
            let nonpositive = sign_nonpositive(p, &minor);
            if target.strict() && nonpositive {
                minors = vec![SetMinor { set, minor }];
                break;
            }
            if !target.strict() && !nonpositive {
                minors.clear();
                break;
            }
            if nonpositive {
                minors.push(SetMinor { set, minor });
            }
        }
        let complete = target.strict() && minors.len() == 1
            || !target.strict() && !minors.is_empty();
        if complete {
            return Ok(Some(NonCompletionCertificate {
                partial: p.clone(),
                class: target,
                proof: ImpossibilityProof::NonPositiveMinors { order: k, minors },
            }));
        }
    }
    Ok(None)
}

/// Runs every applicable symbolic prover for `target`.
pub fn prove_noncompletable(p: &PartialMatrix, target: MatrixClass) -> Option<NonCompletionCertificate> {
    if zero_det_applies(target) && p.order() <= MAX_SYMBOLIC_ORDER {
        if let Ok(Some(c)) = prove_noncompletable_by_zero_det(p, target) {
            return Some(c);
        }
    }
    if target.sign_symmetric() {
        if let Ok(Some(c)) = prove_noncompletable_by_forced_minor(p, target) {
            return Some(c);
        }
        if let Ok(Some(c)) = prove_noncompletable_by_negative_minor(p, target) {
            return Some(c);
        }
    }
    if target.needs_positive_per_order() {
        if let Ok(Some(c)) = prove_noncompletable_by_specified_order(p, target) {
            return Some(c);
        }
    }
    if target.sign_symmetric() && target.needs_positive_per_order() {
        if let Ok(Some(c)) = prove_noncompletable_by_sign(p, target) {
            return Some(c);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::format::parse_partial;

    fn two_cycle_witness() -> PartialMatrix {
        parse_partial("3\n1 -1 ?\n-1 1 ?\n? ? 1\n").unwrap()
    }

    #[test]
    fn var_rendering_and_parsing() {
        for v in [Var::Diag(3), Var::Off(1, 3), Var::Off(12, 3), Var::Scale] {
            assert_eq!(v.to_string().parse::<Var>().unwrap(), v);
        }
        assert!("x11".parse::<Var>().is_err());
        assert!("y1".parse::<Var>().is_err());
    }

    #[test]
    fn two_by_two_symbolic_det() {
        let p = PartialMatrix::unspecified(2).unwrap();
        let d = sym_det(&lift(&p)).unwrap();
        assert_eq!(d.to_string(), "d1*d2 - x12*x21");
    }

    #[test]
    fn two_cycle_witness_determinant() {
        let d = sym_det(&lift(&two_cycle_witness())).unwrap();
        assert_eq!(d.to_string(), "-x13*x31 - x13*x32 - x23*x31 - x23*x32");
        assert_eq!(d.len(), 4);
    }

    #[test]
    fn rank_one_witness_has_zero_det() {
        let p = parse_partial("3\n1 1 1\n1 1 1\n1 1 ?\n").unwrap();
        let sm = lift(&p);
        assert_eq!(sm.get(2, 2), &MultiPoly::var(Var::Diag(3)));
        assert!(sym_det(&sm).unwrap().is_zero());
        let cert = prove_noncompletable_by_zero_det(&p, MatrixClass::Ssp01Plus)
            .unwrap()
            .unwrap();
        assert!(cert.recheck());
    }

    #[test]
    fn nonzero_det_gives_no_certificate() {
        let c = prove_noncompletable_by_zero_det(&two_cycle_witness(), MatrixClass::Ssp01Plus).unwrap();
        assert!(c.is_none());
    }

    #[test]
    fn constant_singular_matrix_is_certified() {
        let p = parse_partial("2\n1 1\n1 1\n").unwrap();
        assert!(prove_noncompletable_by_zero_det(&p, MatrixClass::Ssp01Plus)
            .unwrap()
            .is_some());
    }

    #[test]
    fn zero_det_prover_rejects_nonnegative_only_classes() {
        let p = two_cycle_witness();
        for c in [MatrixClass::P0, MatrixClass::Ssp0, MatrixClass::Ssp01] {
            assert!(matches!(
                prove_noncompletable_by_zero_det(&p, c),
                Err(Error::UnsupportedClass(_))
            ));
        }
    }

    #[test]
    fn substitute_evaluates_and_reports_missing() {
        let p: MultiPoly = "d1*d2 - x12*x21".parse().unwrap();
        let mut a = BTreeMap::new();
        a.insert(Var::Diag(1), int(2));
        a.insert(Var::Diag(2), int(3));
        a.insert(Var::Off(1, 2), int(1));
        assert!(matches!(substitute(&p, &a), Err(Error::MissingVariable(v)) if v == "x21"));
        a.insert(Var::Off(2, 1), int(1));
        assert_eq!(substitute(&p, &a).unwrap(), int(5));
        assert_eq!(substitute(&MultiPoly::zero(), &BTreeMap::new()).unwrap(), int(0));
    }

    #[test]
    fn substitute_two_cycle_candidate() {
        let d = sym_det(&lift(&two_cycle_witness())).unwrap();
        let a: BTreeMap<Var, Rational> = [
            (Var::Off(1, 3), rat(1, 2)),
            (Var::Off(3, 1), rat(1, 2)),
            (Var::Off(2, 3), rat(-1, 4)),
            (Var::Off(3, 2), rat(-4, 5)),
        ]
        .into_iter()
        .collect();
        assert_eq!(substitute(&d, &a).unwrap(), rat(3, 40));
    }

    #[test]
    fn polynomial_text_round_trip() {
        for s in [
            "0",
            "7",
            "-1/2",
            "d1^2*x12 - 3/4*x21 + t + 2",
            "-x13*x31 - x13*x32 - x23*x31 - x23*x32",
        ] {
            let p: MultiPoly = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("x12 +".parse::<MultiPoly>().is_err());
        assert!("".parse::<MultiPoly>().is_err());
    }

    #[test]
    fn forced_minor_on_zero_diagonal() {
        let p = parse_partial("2\n0 -2\n? 0\n").unwrap();
        let cert = prove_noncompletable_by_forced_minor(&p, MatrixClass::Ssp0)
            .unwrap()
            .unwrap();
        match &cert.proof {
            ImpossibilityProof::ForcedNegativeMinor { minor, .. } => {
                assert_eq!(minor.to_string(), "2*x21")
            }
            other => panic!("unexpected proof {other:?}"),
        }
        assert!(cert.recheck());
        let ok = parse_partial("2\n1 -2\n? ?\n").unwrap();
        assert!(prove_noncompletable_by_forced_minor(&ok, MatrixClass::Ssp0)
            .unwrap()
            .is_none());
    }

    #[test]
    fn twin_product_determinant_is_nonpositive() {
        let p = parse_partial("3\n1 ? -2\n? 1/8 0\n-2 0 4\n").unwrap();
        assert_eq!(sym_det(&lift(&p)).unwrap().to_string(), "-4*x12*x21");
        let cert = prove_noncompletable_by_sign(&p, MatrixClass::Ssp01Plus)
            .unwrap()
            .unwrap();
        assert!(cert.recheck());
        assert!(matches!(
            cert.proof,
            ImpossibilityProof::NonPositiveMinors { order: 3, .. }
        ));
        assert!(prove_noncompletable_by_sign(&p, MatrixClass::P01Plus).is_err());
    }

    #[test]
    fn zero_twin_kills_mixed_term() {
        let p = parse_partial("3\n1/2 ? 0\n? 1 -2\n? -1/2 1\n").unwrap();
        assert_eq!(sym_det(&lift(&p)).unwrap().to_string(), "-x12*x21 - 2*x12*x31");
        let cert = prove_noncompletable_by_sign(&p, MatrixClass::Ssp01Plus)
            .unwrap()
            .unwrap();
        assert!(cert.recheck());
    }

    #[test]
    fn signed_three_cycle_minor_is_negative() {
        let p = parse_partial("4\n1/8 ? ? ?\n? 1/2 ? 1\n? 2 1/4 ?\n? ? -1/8 1/8\n").unwrap();
        let cert = prove_noncompletable_by_negative_minor(&p, MatrixClass::Ssp0)
            .unwrap()
            .unwrap();
        assert!(cert.recheck());
        match &cert.proof {
            ImpossibilityProof::NegativeMinor { set, .. } => assert_eq!(set.to_string(), "{2,3,4}"),
            other => panic!("unexpected proof {other:?}"),
        }
        let mut tampered = cert.clone();
        tampered.partial.set(2, 3, Some(rat(1, 8)));
        assert!(!tampered.recheck());
    }

    #[test]
    fn zero_diagonal_variable_is_not_strict() {
        // minor {1,2} = -x12*x21 + 0*d: nonpositive but may vanish.
        let p = parse_partial("2\n0 ?\n? 1\n").unwrap();
        assert!(prove_noncompletable_by_negative_minor(&p, MatrixClass::Ssp0)
            .unwrap()
            .is_none());
    }

    #[test]
    fn cross_pair_terms_are_undetermined() {
        let p = two_cycle_witness();
        assert!(prove_noncompletable_by_sign(&p, MatrixClass::Ssp01Plus)
            .unwrap()
            .is_none());
    }

    #[test]
    fn half_specified_twin_fixes_sign() {
        // minor {1,2} = 1 - 2*x21 with x21 > 0: undetermined.
        let p = parse_partial("2\n1 2\n? 1\n").unwrap();
        assert!(prove_noncompletable_by_sign(&p, MatrixClass::Ssp).unwrap().is_none());
        // minor {1,2} = -2*x21 with x21 > 0: negative.
        let q = parse_partial("2\n0 2\n? 1\n").unwrap();
        let cert = prove_noncompletable_by_sign(&q, MatrixClass::Ssp).unwrap().unwrap();
        assert!(cert.recheck());
    }

    #[test]
    fn zero_specified_diagonal_has_no_positive_first_order() {
        let p = parse_partial("2\n0 ?\n? 0\n").unwrap();
        let cert = prove_noncompletable_by_specified_order(&p, MatrixClass::Ssp0Plus)
            .unwrap()
            .unwrap();
        assert_eq!(cert.proof, ImpossibilityProof::NoPositiveSpecifiedOrder { order: 1 });
        assert!(cert.recheck());
        let q = parse_partial("2\n0 ?\n? 1\n").unwrap();
        assert!(prove_noncompletable_by_specified_order(&q, MatrixClass::Ssp0Plus)
            .unwrap()
            .is_none());
    }

    #[test]
    fn order_bound_is_enforced() {
        let p = PartialMatrix::unspecified(7).unwrap();
        assert!(matches!(
            sym_det(&lift(&p)),
            Err(Error::OrderTooLarge { order: 7, .. })
        ));
    }

    #[test]
    fn tampered_certificate_fails_recheck() {
        let p = parse_partial("3\n1 1 1\n1 1 1\n1 1 ?\n").unwrap();
        let mut cert = prove_noncompletable_by_zero_det(&p, MatrixClass::Ssp01Plus)
            .unwrap()
            .unwrap();
        cert.partial.set(1, 0, Some(int(2)));
        assert!(!cert.recheck());
    }
}
