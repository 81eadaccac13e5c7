//! Matrix classes, partial matrices and membership predicates.
//!
//! "At least one positive `k × k` principal minor" is required for every
//! `k` in `1..=n` in the `P₀⁺` family. An order with a single minor (the
//! full determinant) therefore needs that minor to be strictly positive.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rational_str, ExactMatrix, IndexSet, Rational, MAX_ORDER};

/// The matrix classes the toolkit can test for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixClass {
    P,
    P0,
    P0Plus,
    P01Plus,
    Ssp,
    Ssp0,
    /// Sign symmetric `P₀` with positive diagonal.
    Ssp01,
    Ssp0Plus,
    Ssp01Plus,
}

impl MatrixClass {
    pub const ALL: [MatrixClass; 9] = [
        MatrixClass::P,
        MatrixClass::P0,
        MatrixClass::P0Plus,
        MatrixClass::P01Plus,
        MatrixClass::Ssp,
        MatrixClass::Ssp0,
        MatrixClass::Ssp01,
        MatrixClass::Ssp0Plus,
        MatrixClass::Ssp01Plus,
    ];

    /// Every principal minor must be strictly positive.
    pub fn strict(self) -> bool {
        matches!(self, MatrixClass::P | MatrixClass::Ssp)
    }

    /// Every order must carry at least one positive principal minor.
    pub fn needs_positive_per_order(self) -> bool {
        self.strict()
            || matches!(
                self,
                MatrixClass::P0Plus
                    | MatrixClass::P01Plus
                    | MatrixClass::Ssp0Plus
                    | MatrixClass::Ssp01Plus
            )
    }

    pub fn positive_diagonal(self) -> bool {
        self.strict()
            || matches!(
                self,
                MatrixClass::P01Plus | MatrixClass::Ssp01 | MatrixClass::Ssp01Plus
            )
    }

    pub fn sign_symmetric(self) -> bool {
        matches!(
            self,
            MatrixClass::Ssp
                | MatrixClass::Ssp0
                | MatrixClass::Ssp01
                | MatrixClass::Ssp0Plus
                | MatrixClass::Ssp01Plus
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            MatrixClass::P => "p",
            MatrixClass::P0 => "p0",
            MatrixClass::P0Plus => "p0plus",
            MatrixClass::P01Plus => "p01plus",
            MatrixClass::Ssp => "ssp",
            MatrixClass::Ssp0 => "ssp0",
            MatrixClass::Ssp01 => "ssp01",
            MatrixClass::Ssp0Plus => "ssp0plus",
            MatrixClass::Ssp01Plus => "ssp01plus",
        }
    }
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatrixClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', '-', ','], "").replace('+', "plus");
        MatrixClass::ALL
            .into_iter()
            .find(|c| c.name() == key)
            .ok_or_else(|| Error::UnsupportedClass(s.to_string()))
    }
}

/// A violated membership condition. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    NonPositiveDiagonal {
        index: usize,
        #[serde(with = "rational_str")]
        value: Rational,
    },
    TwinSign {
        i: usize,
        j: usize,
        #[serde(with = "rational_str")]
        product: Rational,
    },
    NegativeMinor {
        set: IndexSet,
        #[serde(with = "rational_str")]
        value: Rational,
    },
    NonPositiveMinor {
        set: IndexSet,
        #[serde(with = "rational_str")]
        value: Rational,
    },
    NoPositiveMinor {
        order: usize,
    },
    CellMismatch {
        i: usize,
        j: usize,
        #[serde(with = "rational_str")]
        expected: Rational,
        #[serde(with = "rational_str")]
        found: Rational,
    },
}

impl Violation {
    /// Re-evaluates the witnessed condition on `m`; true iff it still fails.
    pub fn recheck(&self, m: &ExactMatrix) -> bool {
        let n = m.order();
        let in_range = |i: usize| i >= 1 && i <= n;
        match self {
            Violation::NonPositiveDiagonal { index, value } => {
                in_range(*index) && m.get(index - 1, index - 1) == value && !value.is_positive()
            }
            Violation::TwinSign { i, j, product } => {
                if !in_range(*i) || !in_range(*j) || i == j {
                    return false;
                }
                let (a, b) = (m.get(i - 1, j - 1), m.get(j - 1, i - 1));
                &(a * b) == product && !twins_ok(a, b)
            }
            Violation::NegativeMinor { set, value } => {
                m.principal_minor(set).ok().as_ref() == Some(value) && value.is_negative()
            }
            Violation::NonPositiveMinor { set, value } => {
                m.principal_minor(set).ok().as_ref() == Some(value) && !value.is_positive()
            }
            Violation::NoPositiveMinor { order } => {
                *order >= 1
                    && *order <= n
                    && IndexSet::all_of_order(n, *order)
                        .all(|s| !m.principal_minor(&s).expect("in range").is_positive())
            }
            // Needs the partial matrix; see `verify_completion`.
            Violation::CellMismatch { i, j, found, .. } => {
                in_range(*i) && in_range(*j) && m.get(i - 1, j - 1) == found
            }
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveDiagonal { index, value } => {
                write!(f, "diagonal entry ({index},{index}) = {value} is not positive")
            }
            Violation::TwinSign { i, j, product } => {
                write!(f, "twin pair ({i},{j}) has product {product} and is not both zero")
            }
            Violation::NegativeMinor { set, value } => {
                write!(f, "principal minor {set} = {value} is negative")
            }
            Violation::NonPositiveMinor { set, value } => {
                write!(f, "principal minor {set} = {value} is not positive")
            }
            Violation::NoPositiveMinor { order } => {
                write!(f, "order {order} has no positive principal minor")
            }
            Violation::CellMismatch {
                i,
                j,
                expected,
                found,
            } => write!(f, "cell ({i},{j}) is {found} but the partial matrix specifies {expected}"),
        }
    }
}

/// Outcome of a membership test. Failures always carry a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub member: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Violation>,
}

impl MembershipVerdict {
    pub fn member() -> Self {
        MembershipVerdict {
            member: true,
            witness: None,
        }
    }

    pub fn violated(v: Violation) -> Self {
        MembershipVerdict {
            member: false,
            witness: Some(v),
        }
    }
}

impl fmt::Display for MembershipVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => f.write_str("member"),
            Some(w) => write!(f, "non-member: {w}"),
        }
    }
}

/// Twin entries are compatible iff their product is positive or both vanish.
pub fn twins_ok(a: &Rational, b: &Rational) -> bool {
    (a * b).is_positive() || (a.is_zero() && b.is_zero())
}

fn diagonal_violation(i: usize, v: &Rational, c: MatrixClass) -> Option<Violation> {
    if c.positive_diagonal() {
        (!v.is_positive()).then(|| Violation::NonPositiveDiagonal {
            index: i + 1,
            value: v.clone(),
        })
    } else {
        v.is_negative().then(|| Violation::NegativeMinor {
            set: IndexSet::from_sorted(vec![i]),
            value: v.clone(),
        })
    }
}

fn minor_violation(set: &IndexSet, v: &Rational, c: MatrixClass) -> Option<Violation> {
    if c.strict() {
        (!v.is_positive()).then(|| Violation::NonPositiveMinor {
            set: set.clone(),
            value: v.clone(),
        })
    } else {
        v.is_negative().then(|| Violation::NegativeMinor {
            set: set.clone(),
            value: v.clone(),
        })
    }
}

/// Decides membership of `m` in `c` by exhaustive minor enumeration.
///
/// Checks run in a fixed order (diagonal, twin pairs, minor signs by order
/// and lexicographic index set, positive-minor existence) so the witness is
/// deterministic.
pub fn is_member(m: &ExactMatrix, c: MatrixClass) -> MembershipVerdict {
    let n = m.order();
    for i in 0..n {
        if let Some(v) = diagonal_violation(i, m.get(i, i), c) {
            return MembershipVerdict::violated(v);
        }
    }
    if c.sign_symmetric() {
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (m.get(i, j), m.get(j, i));
                if !twins_ok(a, b) {
                    return MembershipVerdict::violated(Violation::TwinSign {
                        i: i + 1,
                        j: j + 1,
                        product: a * b,
                    });
                }
            }
        }
    }
    let profile = m.minor_profile();
    for (s, v) in profile.iter() {
        if let Some(w) = minor_violation(s, v, c) {
            return MembershipVerdict::violated(w);
        }
    }
    if c.needs_positive_per_order() {
        if let Some(o) = profile.by_order.iter().find(|o| o.positive == 0) {
            return MembershipVerdict::violated(Violation::NoPositiveMinor { order: o.order });
        }
    }
    MembershipVerdict::member()
}

/// Square grid of cells, each specified (a rational) or unspecified.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialMatrix {
    n: usize,
    cells: Vec<Option<Rational>>,
}

impl PartialMatrix {
    pub fn new(rows: Vec<Vec<Option<Rational>>>) -> Result<Self> {
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
                "row of length {} in partial matrix of order {n}",
                bad.len()
            )));
        }
        Ok(PartialMatrix {
            n,
            cells: rows.into_iter().flatten().collect(),
        })
    }

    /// All cells unspecified.
    pub fn unspecified(n: usize) -> Result<Self> {
        Self::new(vec![vec![None; n]; n])
    }

    pub fn from_matrix(m: &ExactMatrix) -> Self {
        PartialMatrix {
            n: m.order(),
            cells: m.rows().flatten().cloned().map(Some).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Rational> {
        self.cells[i * self.n + j].as_ref()
    }

    pub fn is_specified(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.n + j].is_some()
    }

    pub fn set(&mut self, i: usize, j: usize, v: Option<Rational>) {
        self.cells[i * self.n + j] = v;
    }

    pub fn is_fully_specified(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn unspecified_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n)
            .flat_map(move |i| (0..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.is_specified(i, j))
    }

    /// The matrix itself when every cell is specified.
    pub fn to_exact(&self) -> Option<ExactMatrix> {
        if !self.is_fully_specified() {
            return None;
        }
        let rows = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).cloned().unwrap()).collect())
            .collect();
        ExactMatrix::new(rows).ok()
    }

    /// Fills every unspecified cell with `fill(i, j)`.
    pub fn complete_with(&self, mut fill: impl FnMut(usize, usize) -> Rational) -> ExactMatrix {
        let rows = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j).cloned().unwrap_or_else(|| fill(i, j)))
                    .collect()
            })
            .collect();
        ExactMatrix::new(rows).expect("order already validated")
    }

    /// Index sets whose principal submatrix is fully specified.
    pub fn fully_specified_sets(&self) -> impl Iterator<Item = IndexSet> + '_ {
        (1..=self.n)
            .flat_map(move |k| IndexSet::all_of_order(self.n, k))
            .filter(|s| {
                s.elements()
                    .iter()
                    .all(|&i| s.elements().iter().all(|&j| self.is_specified(i, j)))
            })
    }

    /// The principal submatrix on `s`, if fully specified.
    pub fn specified_submatrix(&self, s: &IndexSet) -> Option<ExactMatrix> {
        let rows = s
            .elements()
            .iter()
            .map(|&i| {
                s.elements()
                    .iter()
                    .map(|&j| self.get(i, j).cloned())
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        ExactMatrix::new(rows).ok()
    }
}

/// Which structural case of the partial-member characterization applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartialCase {
    /// (i): at least one diagonal entry unspecified.
    UnspecifiedDiagonal,
    /// (ii): whole diagonal specified, some off-diagonal entry unspecified.
    SpecifiedDiagonal,
    /// (iii): every entry specified.
    FullySpecified,
}

impl PartialCase {
    pub fn of(p: &PartialMatrix) -> Self {
        let n = p.order();
        if (0..n).any(|i| !p.is_specified(i, i)) {
            PartialCase::UnspecifiedDiagonal
        } else if !p.is_fully_specified() {
            PartialCase::SpecifiedDiagonal
        } else {
            PartialCase::FullySpecified
        }
    }

    pub fn roman(self) -> &'static str {
        match self {
            PartialCase::UnspecifiedDiagonal => "i",
            PartialCase::SpecifiedDiagonal => "ii",
            PartialCase::FullySpecified => "iii",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialVerdict {
    pub member: bool,
    pub case: PartialCase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Violation>,
}

impl fmt::Display for PartialVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "member, case ({})", self.case.roman()),
            Some(w) => write!(f, "non-member, case ({}) fails: {w}", self.case.roman()),
        }
    }
}

/// Whether `p` is a partial matrix of class `c`: specified diagonal entries
/// satisfy the class, fully specified twin pairs are sign compatible (for
/// sign symmetric classes), every fully specified principal minor satisfies
/// the class sign condition, and a fully specified `p` is a member.
pub fn partial_member(p: &PartialMatrix, c: MatrixClass) -> MembershipVerdict {
    if let Some(m) = p.to_exact() {
        return is_member(&m, c);
    }
    let n = p.order();
    for i in 0..n {
        if let Some(v) = p.get(i, i).and_then(|d| diagonal_violation(i, d, c)) {
            return MembershipVerdict::violated(v);
        }
    }
    if c.sign_symmetric() {
        for i in 0..n {
            for j in i + 1..n {
                if let (Some(a), Some(b)) = (p.get(i, j), p.get(j, i)) {
                    if !twins_ok(a, b) {
                        return MembershipVerdict::violated(Violation::TwinSign {
                            i: i + 1,
                            j: j + 1,
                            product: a * b,
                        });
                    }
                }
            }
        }
    }
    for s in p.fully_specified_sets() {
        let v = p
            .specified_submatrix(&s)
            .expect("set is fully specified")
            .det();
        if let Some(w) = minor_violation(&s, &v, c) {
            return MembershipVerdict::violated(w);
        }
    }
    MembershipVerdict::member()
}

/// Partial sign symmetric `P₀,₁⁺` membership with the structural case tag.
pub fn is_partial_member(p: &PartialMatrix) -> PartialVerdict {
    let verdict = partial_member(p, MatrixClass::Ssp01Plus);
    PartialVerdict {
        member: verdict.member,
        case: PartialCase::of(p),
        witness: verdict.witness,
    }
}

/// True iff `m` agrees with every specified cell of `p` and belongs to `c`.
pub fn verify_completion(
    p: &PartialMatrix,
    m: &ExactMatrix,
    c: MatrixClass,
) -> Result<MembershipVerdict> {
    if p.order() != m.order() {
        return Err(Error::OrderMismatch {
            expected: p.order(),
            found: m.order(),
        });
    }
    let n = p.order();
    for i in 0..n {
        for j in 0..n {
            if let Some(expected) = p.get(i, j) {
                if expected != m.get(i, j) {
                    return Ok(MembershipVerdict::violated(Violation::CellMismatch {
                        i: i + 1,
                        j: j + 1,
                        expected: expected.clone(),
                        found: m.get(i, j).clone(),
                    }));
                }
            }
        }
    }
    Ok(is_member(m, c))
}
