//! Completion constructions and a randomized, exactly verified search.
//!
//! Every `Found` result has passed [`verify_completion`] before it is
//! returned. `Exhausted` only means the budget ran out; it is never a claim
//! that no completion exists.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classes::{partial_member, verify_completion, MatrixClass, PartialMatrix};
use crate::digraphs::{pattern_of, Pattern};
use crate::error::{Error, Result};
use crate::exact::{bareiss, rat, ExactMatrix, IndexSet, Rational};
use crate::symbolic::{prove_noncompletable, NonCompletionCertificate};

/// Random candidates tried by [`find_hard_partial`] after the structured
/// families.
pub const HARD_RANDOM_CANDIDATES: usize = 16;

/// Off-diagonal search magnitudes include `min(grid) / 4^k` for
/// `k = 1..=SMALL_TAIL`.
pub const SMALL_TAIL: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionConfig {
    pub seed: u64,
    pub budget: u64,
    #[serde(with = "grid_text")]
    pub magnitude_grid: Vec<Rational>,
    pub t_max_exponent: u32,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        CompletionConfig {
            seed: 0,
            budget: 20_000,
            magnitude_grid: vec![
                rat(1, 8),
                rat(1, 4),
                rat(1, 2),
                rat(4, 5),
                rat(1, 1),
                rat(2, 1),
                rat(4, 1),
            ],
            t_max_exponent: 64,
        }
    }
}

impl CompletionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidConfig("budget must be at least 1".into()));
        }
        if self.magnitude_grid.is_empty() {
            return Err(Error::InvalidConfig("magnitude grid is empty".into()));
        }
        if self.magnitude_grid.iter().any(|v| !v.is_positive()) {
            return Err(Error::InvalidConfig("grid magnitudes must be positive".into()));
        }
        if self.magnitude_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "grid must be sorted strictly ascending".into(),
            ));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        CompletionConfig {
            seed,
            ..self.clone()
        }
    }
}

mod grid_text {
    use crate::exact::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// The input was already fully specified.
    Given,
    ZeroCompletion,
    LooplessConstruction,
    Search,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Given => "given",
            Strategy::ZeroCompletion => "zero-completion",
            Strategy::LooplessConstruction => "loopless-construction",
            Strategy::Search => "search",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Found {
        #[serde(with = "crate::format::matrix_text")]
        matrix: ExactMatrix,
    },
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionResult {
    pub outcome: Outcome,
    pub evaluations_used: u64,
    pub strategy: Strategy,
}

impl CompletionResult {
    pub fn found(&self) -> Option<&ExactMatrix> {
        match &self.outcome {
            Outcome::Found { matrix } => Some(matrix),
            Outcome::Exhausted => None,
        }
    }

    pub fn is_found(&self) -> bool {
        self.found().is_some()
    }

    fn exhausted(evaluations_used: u64, strategy: Strategy) -> Self {
        CompletionResult {
            outcome: Outcome::Exhausted,
            evaluations_used,
            strategy,
        }
    }

    /// Returns `Found` only if `m` verifies against `p` and `c`.
    fn checked(
        p: &PartialMatrix,
        m: ExactMatrix,
        c: MatrixClass,
        evaluations_used: u64,
        strategy: Strategy,
    ) -> Self {
        let ok = verify_completion(p, &m, c).is_ok_and(|v| v.member);
        CompletionResult {
            outcome: if ok {
                Outcome::Found { matrix: m }
            } else {
                Outcome::Exhausted
            },
            evaluations_used,
            strategy,
        }
    }
}

impl fmt::Display for CompletionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            Outcome::Found { matrix } => write!(
                f,
                "found by {} after {} evaluations\n{matrix}",
                self.strategy, self.evaluations_used
            ),
            Outcome::Exhausted => write!(
                f,
                "exhausted by {} after {} evaluations",
                self.strategy, self.evaluations_used
            ),
        }
    }
}

/// Sets unspecified off-diagonal cells to 0 and unspecified diagonal cells
/// to 1, then verifies.
pub fn complete_zero(p: &PartialMatrix, c: MatrixClass) -> CompletionResult {
    let m = p.complete_with(|i, j| if i == j { Rational::one() } else { Rational::zero() });
    CompletionResult::checked(p, m, c, 1, Strategy::ZeroCompletion)
}

/// Large-diagonal construction for patterns without loops.
///
/// An unspecified twin of a specified nonzero `a_ij` becomes
/// `sign(a_ij)·2⁻ᵐ`, twins of specified zeros and doubly unspecified pairs
/// become 0, and every diagonal entry becomes `t = 2ᵐ`. Each `k × k`
/// principal minor is `tᵏ` plus lower-order terms, so some `m` works; `m`
/// runs from 0 up to `t_max_exponent`.
pub fn complete_loopless(
    p: &PartialMatrix,
    c: MatrixClass,
    cfg: &CompletionConfig,
) -> Result<CompletionResult> {
    let n = p.order();
    if let Some(i) = (0..n).find(|&i| p.is_specified(i, i)) {
        return Err(Error::Precondition(format!(
            "pattern has a loop at vertex {}",
            i + 1
        )));
    }
    let verdict = partial_member(p, c);
    if let Some(w) = verdict.witness {
        return Err(Error::Precondition(format!("not a partial {c}-matrix: {w}")));
    }
    let two = BigInt::from(2);
    for m in 0..=cfg.t_max_exponent {
        let t = Rational::from_integer(num_traits::pow(two.clone(), m as usize));
        let eps = t.recip();
        let candidate = p.complete_with(|i, j| {
            if i == j {
                return t.clone();
            }
            match p.get(j, i) {
                Some(a) if a.is_positive() => eps.clone(),
                Some(a) if a.is_negative() => -eps.clone(),
                _ => Rational::zero(),
            }
        });
        let result = CompletionResult::checked(
            p,
            candidate,
            c,
            u64::from(m) + 1,
            Strategy::LooplessConstruction,
        );
        if result.is_found() {
            return Ok(result);
        }
    }
    Ok(CompletionResult::exhausted(
        u64::from(cfg.t_max_exponent) + 1,
        Strategy::LooplessConstruction,
    ))
}

/// How an unspecified cell (or twin pair) is filled during search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Diag(usize),
    /// Both `(i,j)` and `(j,i)` unspecified, `i < j`.
    Twin(usize, usize),
    /// `(i,j)` unspecified, its twin specified with the given sign
    /// (`None` when the class does not couple signs).
    Half(usize, usize, Option<i8>),
}

/// Per-slot choice: signs and indices into the magnitude domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Choice {
    signs: [i8; 2],
    mags: [usize; 2],
}

/// Violation summary used to rank candidates; smaller is better.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Score {
    violations: u32,
    magnitude: i128,
}

/// Focus of the next local-improvement step.
enum Focus {
    Set(IndexSet),
    Everything,
}

struct Evaluation {
    score: Score,
    focus: Option<Focus>,
}

/// Integer scalars the evaluator can run on.
trait Scalar: Clone + Zero + One + num_traits::CheckedMul + num_traits::CheckedSub + num_traits::CheckedDiv {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn negated(&self) -> Self;
    fn sign(&self) -> Ordering;
    fn saturating_abs(&self) -> i128;
}

impl Scalar for i128 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64().map(i128::from)
    }
    fn negated(&self) -> Self {
        -self
    }
    fn sign(&self) -> Ordering {
        self.cmp(&0)
    }
    fn saturating_abs(&self) -> i128 {
        i128::saturating_abs(*self)
    }
}

impl Scalar for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn negated(&self) -> Self {
        -self
    }
    fn sign(&self) -> Ordering {
        Signed::signum(self).cmp(&BigInt::zero())
    }
    fn saturating_abs(&self) -> i128 {
        self.abs().to_i128().unwrap_or(i128::MAX)
    }
}

/// Scaled integer data for one scalar type: every entry is `value / denom`.
struct Tables<T> {
    base: Vec<T>,
    grid: Vec<T>,
    diag: Vec<T>,
}

impl<T: Scalar> Tables<T> {
    fn build(base: &[BigInt], grid: &[BigInt], diag: &[BigInt]) -> Option<Self> {
        let conv = |v: &[BigInt]| v.iter().map(T::from_big).collect::<Option<Vec<T>>>();
        Some(Tables {
            base: conv(base)?,
            grid: conv(grid)?,
            diag: conv(diag)?,
        })
    }
}

struct Engine {
    class: MatrixClass,
    n: usize,
    slots: Vec<Slot>,
    denom: BigInt,
    grid_values: Vec<Rational>,
    diag_values: Vec<Rational>,
    big: Tables<BigInt>,
    small: Option<Tables<i128>>,
    /// All index sets, by order then lexicographically, with the weight
    /// `denom^(n-k)` that puts every minor on a common scale.
    sets: Vec<(IndexSet, i128)>,
}

impl Engine {
    fn new(p: &PartialMatrix, class: MatrixClass, cfg: &CompletionConfig) -> Self {
        let n = p.order();
        let grid = &cfg.magnitude_grid;
        let max = grid.last().expect("validated grid").clone();
        let mut diag_values: Vec<Rational> = grid[grid.len() / 2..].to_vec();
        // Small specified diagonals next to large specified entries need
        // twins below the grid.
        let min = grid[0].clone();
        let mut grid_values: Vec<Rational> = (1..=SMALL_TAIL)
            .rev()
            .map(|k| &min / Rational::from_integer(BigInt::from(4).pow(k)))
            .collect();
        grid_values.extend(grid.iter().cloned());
        diag_values.push(&max * rat(4, 1));
        diag_values.push(&max * rat(16, 1));

        let mut slots = Vec::new();
        for i in 0..n {
            if !p.is_specified(i, i) {
                slots.push(Slot::Diag(i));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j || p.is_specified(i, j) {
                    continue;
                }
                match p.get(j, i) {
                    None if i < j => slots.push(Slot::Twin(i, j)),
                    None => {}
                    Some(a) if class.sign_symmetric() => {
                        if !a.is_zero() {
                            let s = if a.is_positive() { 1 } else { -1 };
                            slots.push(Slot::Half(i, j, Some(s)));
                        }
                    }
                    Some(_) => slots.push(Slot::Half(i, j, None)),
                }
            }
        }

        let denom = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| p.get(i, j))
            .chain(grid_values.iter())
            .chain(diag_values.iter())
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let scale = |v: &Rational| v.numer() * (&denom / v.denom());
        let base: Vec<BigInt> = (0..n * n)
            .map(|k| p.get(k / n, k % n).map_or_else(BigInt::zero, &scale))
            .collect();
        let grid: Vec<BigInt> = grid_values.iter().map(&scale).collect();
        let diag: Vec<BigInt> = diag_values.iter().map(&scale).collect();
        let small = Tables::build(&base, &grid, &diag);
        let big = Tables::build(&base, &grid, &diag).expect("BigInt conversion is total");

        let d = denom.to_i128().unwrap_or(i128::MAX);
        let sets = (1..=n)
            .flat_map(|k| IndexSet::all_of_order(n, k))
            .map(|s| {
                let w = (0..n - s.len()).fold(1i128, |acc, _| acc.saturating_mul(d));
                (s, w)
            })
            .collect();

        Engine {
            class,
            n,
            slots,
            denom,
            grid_values,
            diag_values,
            big,
            small,
            sets,
        }
    }

    fn domain(&self, slot: Slot) -> usize {
        match slot {
            Slot::Diag(_) => self.diag_values.len(),
            _ => self.grid_values.len(),
        }
    }

    fn fill<T: Scalar>(&self, t: &Tables<T>, state: &[Choice]) -> Vec<T> {
        let n = self.n;
        let mut m = t.base.clone();
        let signed = |sign: i8, mag: usize| match sign {
            0 => T::zero(),
            s if s > 0 => t.grid[mag].clone(),
            _ => t.grid[mag].negated(),
        };
        for (slot, ch) in self.slots.iter().zip(state) {
            match *slot {
                Slot::Diag(i) => m[i * n + i] = t.diag[ch.mags[0]].clone(),
                Slot::Twin(i, j) => {
                    m[i * n + j] = signed(ch.signs[0], ch.mags[0]);
                    m[j * n + i] = signed(ch.signs[1], ch.mags[1]);
                }
                Slot::Half(i, j, _) => m[i * n + j] = signed(ch.signs[0], ch.mags[0]),
            }
        }
        m
    }

    fn evaluate_with<T: Scalar>(&self, t: &Tables<T>, state: &[Choice]) -> Option<Evaluation> {
        let n = self.n;
        let m = self.fill(t, state);
        let strict = self.class.strict();
        let mut violations = 0u32;
        let mut magnitude = 0i128;
        let mut worst: Option<(i128, &IndexSet)> = None;
        let mut zero_focus: Option<&IndexSet> = None;
        let mut missing_order = false;
        let mut order_has_positive = false;
        let mut current_order = 1;
        for (s, w) in &self.sets {
            if s.len() != current_order {
                missing_order |= !order_has_positive;
                order_has_positive = false;
                current_order = s.len();
            }
            let idx = s.elements();
            let mut sub = Vec::with_capacity(idx.len() * idx.len());
            for &i in idx {
                for &j in idx {
                    sub.push(m[i * n + j].clone());
                }
            }
            let det = bareiss(sub, idx.len())?;
            match det.sign() {
                Ordering::Greater => order_has_positive = true,
                Ordering::Equal => {
                    if strict {
                        violations += 1;
                        if zero_focus.is_none_or(|z| s < z) {
                            zero_focus = Some(s);
                        }
                    }
                }
                Ordering::Less => {
                    violations += 1;
                    let mag = det.saturating_abs().saturating_mul(*w);
                    magnitude = magnitude.saturating_add(mag);
                    let better = match worst {
                        None => true,
                        Some((wm, ws)) => mag > wm || (mag == wm && s < ws),
                    };
                    if better {
                        worst = Some((mag, s));
                    }
                }
            }
        }
        missing_order |= !order_has_positive;
        if self.class.needs_positive_per_order() && missing_order {
            violations += 1;
        }
        let focus = if let Some((_, s)) = worst {
            Some(Focus::Set(s.clone()))
        } else if let Some(s) = zero_focus {
            Some(Focus::Set(s.clone()))
        } else if violations > 0 {
            Some(Focus::Everything)
        } else {
            None
        };
        Some(Evaluation {
            score: Score {
                violations,
                magnitude,
            },
            focus,
        })
    }

    fn evaluate(&self, state: &[Choice]) -> Evaluation {
        if let Some(small) = &self.small {
            if let Some(e) = self.evaluate_with(small, state) {
                return e;
            }
        }
        self.evaluate_with(&self.big, state)
            .expect("arbitrary-precision evaluation cannot overflow")
    }

    fn to_matrix(&self, state: &[Choice]) -> ExactMatrix {
        let ints = self.fill(&self.big, state);
        let rows = ints
            .chunks(self.n)
            .map(|r| {
                r.iter()
                    .map(|v| Rational::new(v.clone(), self.denom.clone()))
                    .collect()
            })
            .collect();
        ExactMatrix::new(rows).expect("order validated")
    }

    fn sign_choices(&self, slot: Slot) -> &'static [i8] {
        match slot {
            Slot::Diag(_) => &[1],
            Slot::Half(_, _, Some(1)) => &[1],
            Slot::Half(_, _, Some(_)) => &[-1],
            _ => &[1, 0, -1],
        }
    }

    fn random_choice(&self, slot: Slot, rng: &mut ChaCha8Rng) -> Choice {
        let dom = self.domain(slot);
        let mags = [rng.gen_range(0..dom), rng.gen_range(0..dom)];
        let pick_sign = |rng: &mut ChaCha8Rng| match rng.gen_range(0..5) {
            0 | 1 => 1,
            2 => 0,
            _ => -1,
        };
        let signs = match slot {
            Slot::Diag(_) => [1, 1],
            Slot::Half(_, _, Some(s)) => [s, s],
            Slot::Twin(..) if self.class.sign_symmetric() => {
                let s = pick_sign(rng);
                [s, s]
            }
            _ => [pick_sign(rng), pick_sign(rng)],
        };
        Choice { signs, mags }
    }

    /// Deterministic opening candidate: twins zero, smallest magnitudes for
    /// forced twins, largest diagonal.
    fn opening(&self) -> Vec<Choice> {
        self.slots
            .iter()
            .map(|&slot| match slot {
                Slot::Diag(_) => Choice {
                    signs: [1, 1],
                    mags: [self.diag_values.len() - 1; 2],
                },
                Slot::Half(_, _, Some(s)) => Choice {
                    signs: [s, s],
                    mags: [0, 0],
                },
                _ => Choice {
                    signs: [0, 0],
                    mags: [0, 0],
                },
            })
            .collect()
    }

    fn touches(&self, slot: Slot, focus: &Focus) -> bool {
        let Focus::Set(s) = focus else {
            return true;
        };
        match slot {
            Slot::Diag(i) => s.contains(i),
            Slot::Twin(i, j) | Slot::Half(i, j, _) => s.contains(i) && s.contains(j),
        }
    }

    /// Single-component modifications of slot `k`, in a fixed order.
    fn moves(&self, state: &[Choice], k: usize) -> Vec<Choice> {
        let slot = self.slots[k];
        let cur = state[k];
        let mut out = Vec::new();
        let coupled = matches!(slot, Slot::Twin(..)) && self.class.sign_symmetric();
        let sides = match slot {
            Slot::Twin(..) => 2,
            _ => 1,
        };
        for &s in self.sign_choices(slot) {
            if coupled {
                if s != cur.signs[0] {
                    out.push(Choice {
                        signs: [s, s],
                        ..cur
                    });
                }
            } else {
                for side in 0..sides {
                    if s != cur.signs[side] {
                        let mut c = cur;
                        c.signs[side] = s;
                        if sides == 1 {
                            c.signs[1] = s;
                        }
                        out.push(c);
                    }
                }
            }
        }
        for side in 0..sides {
            if cur.signs[side] == 0 {
                continue;
            }
            for v in 0..self.domain(slot) {
                if v != cur.mags[side] {
                    let mut c = cur;
                    c.mags[side] = v;
                    out.push(c);
                }
            }
        }
        out
    }
}

/// Randomized search over twin-coupled grid assignments with greedy local
/// improvement on the most violated principal minor. Every evaluation
/// counts against `cfg.budget`; the sequence of candidates depends only on
/// the input and the seed, so a larger budget never loses a completion.
pub fn search_completion(
    p: &PartialMatrix,
    c: MatrixClass,
    cfg: &CompletionConfig,
) -> Result<CompletionResult> {
    cfg.validate()?;
    if let Some(m) = p.to_exact() {
        return Ok(CompletionResult::checked(p, m, c, 1, Strategy::Given));
    }
    if !partial_member(p, c).member {
        return Ok(CompletionResult::exhausted(0, Strategy::Search));
    }
    let engine = Engine::new(p, c, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut used = 0u64;
    let max_steps = 4 * engine.slots.len().max(1);

    let try_found = |state: &[Choice], used: u64| -> Option<CompletionResult> {
        let r = CompletionResult::checked(p, engine.to_matrix(state), c, used, Strategy::Search);
        debug_assert!(r.is_found(), "integer evaluator accepted a non-member");
        r.is_found().then_some(r)
    };

    let mut restart = 0u64;
    while used < cfg.budget {
        let mut state = if restart == 0 {
            engine.opening()
        } else {
            engine
                .slots
                .iter()
                .map(|&s| engine.random_choice(s, &mut rng))
                .collect()
        };
        restart += 1;
        used += 1;
        let mut eval = engine.evaluate(&state);
        if eval.focus.is_none() {
            if let Some(r) = try_found(&state, used) {
                return Ok(r);
            }
        }
        for _ in 0..max_steps {
            let Some(focus) = eval.focus.take() else {
                break;
            };
            let mut best: Option<(Evaluation, usize, Choice)> = None;
            'slots: for k in 0..engine.slots.len() {
                if !engine.touches(engine.slots[k], &focus) {
                    continue;
                }
                for mv in engine.moves(&state, k) {
                    if used >= cfg.budget {
                        break 'slots;
                    }
                    let mut trial = state.clone();
                    trial[k] = mv;
                    used += 1;
                    let e = engine.evaluate(&trial);
                    if e.focus.is_none() {
                        if let Some(r) = try_found(&trial, used) {
                            return Ok(r);
                        }
                    }
                    if best.as_ref().is_none_or(|(b, _, _)| e.score < b.score) {
                        best = Some((e, k, mv));
                    }
                }
            }
            match best {
                Some((e, k, mv)) if e.score < eval.score => {
                    state[k] = mv;
                    eval = e;
                }
                _ => break,
            }
        }
    }
    Ok(CompletionResult::exhausted(used, Strategy::Search))
}

/// Picks the cheapest applicable strategy: the input itself, zero
/// completion, the loopless construction, then search.
pub fn complete(p: &PartialMatrix, c: MatrixClass, cfg: &CompletionConfig) -> Result<CompletionResult> {
    cfg.validate()?;
    if let Some(m) = p.to_exact() {
        return Ok(CompletionResult::checked(p, m, c, 1, Strategy::Given));
    }
    let zero = complete_zero(p, c);
    if zero.is_found() {
        return Ok(zero);
    }
    let g = pattern_of(p);
    if g.is_loopless() && partial_member(p, c).member {
        let r = complete_loopless(p, c, cfg)?;
        if r.is_found() {
            return Ok(r);
        }
    }
    let mut r = search_completion(p, c, cfg)?;
    r.evaluations_used += 1;
    Ok(r)
}

/// A partial member the engine could not complete, with a symbolic
/// impossibility proof when one was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardPartial {
    #[serde(with = "crate::format::partial_text")]
    pub partial: PartialMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<NonCompletionCertificate>,
    /// Evaluations spent by the search that exhausted (0 when proved).
    pub evaluations: u64,
}

/// Seeds of the structured candidate families: all ones, all minus ones,
/// and the alternating signature `a_ij = s_i s_j`.
fn structured_values(n: usize) -> Vec<Box<dyn Fn(usize, usize) -> Rational>> {
    let sig = move |i: usize| if i.is_multiple_of(2) { 1 } else { -1 };
    let _ = n;
    vec![
        Box::new(|_, _| rat(1, 1)),
        Box::new(|_, _| rat(-1, 1)),
        Box::new(move |i, j| rat(sig(i) * sig(j), 1)),
    ]
}

/// Candidate partial members for pattern `g`: structured families first,
/// then random twin-coupled grid values. Specified diagonal entries are 1,
/// plus 0 for classes that allow a zero diagonal.
pub fn hard_candidates(
    g: &Pattern,
    c: MatrixClass,
    cfg: &CompletionConfig,
    random: usize,
) -> Vec<PartialMatrix> {
    let n = g.order();
    let mut diag_options = vec![Rational::one()];
    if !c.positive_diagonal() {
        diag_options.push(Rational::zero());
    }
    let mut out = Vec::new();
    for d in &diag_options {
        for f in structured_values(n) {
            out.push(g.partial_with(|i, j| if i == j { d.clone() } else { f(i, j) }));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    for _ in 0..random {
        out.push(random_partial(g, c, cfg, &diag_options, &mut rng));
    }
    out.retain(|p| partial_member(p, c).member);
    out.dedup();
    out
}

/// Random partial matrix specifying `g`: diagonal from `diag_options`,
/// off-diagonal values `±grid` or 0 with signs coupled per twin pair for
/// sign symmetric classes.
pub fn random_partial(
    g: &Pattern,
    c: MatrixClass,
    cfg: &CompletionConfig,
    diag_options: &[Rational],
    rng: &mut ChaCha8Rng,
) -> PartialMatrix {
    let n = g.order();
    let grid = &cfg.magnitude_grid;
    let mut signs = vec![0i8; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let draw = |rng: &mut ChaCha8Rng| match rng.gen_range(0..5) {
                0 | 1 => 1,
                2 => 0,
                _ => -1,
            };
            let s = draw(rng);
            signs[i * n + j] = s;
            signs[j * n + i] = if c.sign_symmetric() { s } else { draw(rng) };
        }
    }
    g.partial_with(|i, j| {
        if i == j {
            diag_options[rng.gen_range(0..diag_options.len())].clone()
        } else {
            let mag = grid[rng.gen_range(0..grid.len())].clone();
            match signs[i * n + j] {
                0 => Rational::zero(),
                s if s > 0 => mag,
                _ => -mag,
            }
        }
    })
}

/// Looks for a partial member specifying `g` that the engine cannot
/// complete. Candidates with a symbolic impossibility proof win outright;
/// otherwise the first candidate whose search exhausts the budget is
/// returned.
pub fn find_hard_partial(
    g: &Pattern,
    c: MatrixClass,
    cfg: &CompletionConfig,
) -> Result<Option<HardPartial>> {
    cfg.validate()?;
    if g.is_complete() && g.all_loops() {
        return Ok(None);
    }
    let candidates = hard_candidates(g, c, cfg, HARD_RANDOM_CANDIDATES);
    if let Some(cert) = candidates.iter().find_map(|p| prove_noncompletable(p, c)) {
        return Ok(Some(HardPartial {
            partial: cert.partial.clone(),
            certificate: Some(cert),
            evaluations: 0,
        }));
    }
    for (k, p) in candidates.iter().enumerate() {
        if complete_zero(p, c).is_found() {
            continue;
        }
        let r = search_completion(p, c, &cfg.with_seed(cfg.seed.wrapping_add(k as u64)))?;
        if !r.is_found() {
            return Ok(Some(HardPartial {
                partial: p.clone(),
                certificate: None,
                evaluations: r.evaluations_used,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::is_member;
    use crate::exact::int;
    use crate::format::parse_partial;

    fn cfg() -> CompletionConfig {
        CompletionConfig::default()
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        let mut c = cfg();
        c.budget = 0;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.magnitude_grid = vec![rat(1, 1), rat(1, 2)];
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.magnitude_grid = vec![];
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.magnitude_grid = vec![rat(0, 1), rat(1, 2)];
        assert!(c.validate().is_err());
    }

    #[test]
    fn zero_completion_of_null_pattern() {
        let p = parse_partial("3\n1 ? ?\n? 2 ?\n? ? 3\n").unwrap();
        let r = complete_zero(&p, MatrixClass::Ssp01Plus);
        let expected = ExactMatrix::from_ints(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 3]]).unwrap();
        assert_eq!(r.found(), Some(&expected));

        let q = PartialMatrix::unspecified(2).unwrap();
        let r = complete_zero(&q, MatrixClass::Ssp01Plus);
        assert_eq!(r.found(), Some(&ExactMatrix::identity(2).unwrap()));
    }

    #[test]
    fn zero_completion_fails_on_two_cycle_witness() {
        let p = parse_partial("3\n1 -1 ?\n-1 1 ?\n? ? 1\n").unwrap();
        assert!(!complete_zero(&p, MatrixClass::Ssp01Plus).is_found());
    }

    #[test]
    fn loopless_single_negative_entry() {
        let p = parse_partial("2\n? -3\n? ?\n").unwrap();
        let r = complete_loopless(&p, MatrixClass::Ssp01Plus, &cfg()).unwrap();
        let m = r.found().unwrap();
        let expected = parse_partial("2\n2 -3\n-1/2 2\n").unwrap().to_exact().unwrap();
        assert_eq!(m, &expected);
        assert_eq!(m.det(), rat(5, 2));
        assert_eq!(r.evaluations_used, 2);
    }

    #[test]
    fn loopless_order_one_and_zero_entry() {
        let p = PartialMatrix::unspecified(1).unwrap();
        let r = complete_loopless(&p, MatrixClass::Ssp01Plus, &cfg()).unwrap();
        assert_eq!(r.found(), Some(&ExactMatrix::identity(1).unwrap()));

        let p = parse_partial("3\n? 0 ?\n? ? ?\n? ? ?\n").unwrap();
        let r = complete_loopless(&p, MatrixClass::Ssp01Plus, &cfg()).unwrap();
        let m = r.found().unwrap();
        assert_eq!(m.get(1, 0), &int(0));
        let t = m.get(0, 0).clone();
        assert_eq!(m.det(), &t * &t * &t);
    }

    #[test]
    fn loopless_rejects_loops() {
        let p = parse_partial("2\n1 ?\n? ?\n").unwrap();
        assert!(matches!(
            complete_loopless(&p, MatrixClass::Ssp01Plus, &cfg()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn search_completes_two_cycle_witness() {
        let p = parse_partial("3\n1 -1 ?\n-1 1 ?\n? ? 1\n").unwrap();
        let r = search_completion(&p, MatrixClass::Ssp01Plus, &cfg()).unwrap();
        let m = r.found().expect("completion");
        assert!(verify_completion(&p, m, MatrixClass::Ssp01Plus).unwrap().member);
    }

    #[test]
    fn search_exhausts_rank_one_witness() {
        let p = parse_partial("3\n1 1 1\n1 1 1\n1 1 ?\n").unwrap();
        let mut c = cfg();
        c.budget = 500;
        let r = search_completion(&p, MatrixClass::Ssp01Plus, &c).unwrap();
        assert_eq!(r.outcome, Outcome::Exhausted);
        assert_eq!(r.evaluations_used, 500);
    }

    #[test]
    fn search_returns_given_member() {
        let m = ExactMatrix::identity(3).unwrap();
        let p = PartialMatrix::from_matrix(&m);
        let r = search_completion(&p, MatrixClass::Ssp01Plus, &cfg()).unwrap();
        assert_eq!(r.found(), Some(&m));
        assert_eq!(r.strategy, Strategy::Given);
        assert_eq!(r.evaluations_used, 1);
    }

    #[test]
    fn search_handles_strict_class() {
        let p = parse_partial("3\n1 1/2 ?\n1/2 1 ?\n? ? 1\n").unwrap();
        let r = search_completion(&p, MatrixClass::Ssp, &cfg()).unwrap();
        assert!(is_member(r.found().unwrap(), MatrixClass::Ssp).member);
    }

    #[test]
    fn hard_partial_examples() {
        let ex = parse_partial("3\n1 1 1\n1 1 1\n1 1 ?\n").unwrap();
        let g = pattern_of(&ex);
        let hard = find_hard_partial(&g, MatrixClass::Ssp01Plus, &cfg())
            .unwrap()
            .unwrap();
        assert_eq!(hard.partial, ex);
        assert!(hard.certificate.unwrap().recheck());

        let k4 = Pattern::complete(4, true).unwrap();
        assert!(find_hard_partial(&k4, MatrixClass::Ssp01Plus, &cfg()).unwrap().is_none());
        let null = Pattern::null(3, true).unwrap();
        assert!(find_hard_partial(&null, MatrixClass::Ssp01Plus, &cfg()).unwrap().is_none());
    }
}
