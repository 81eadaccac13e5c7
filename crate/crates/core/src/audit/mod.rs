//! Classification of small specification patterns with certificates, and
//! comparison against a reference classification.

mod claims;
mod report;

pub use claims::{
    check_singleton_claims, structural_reference, BucketClaim, ClaimOutcome, Indices, ListEntry,
    ListKind, ReferenceClaimTable, RANK_ONE_WITNESS, TWO_CYCLE_DETERMINANT, TWO_CYCLE_WITNESS_3,
    TWO_CYCLE_WITNESS_4,
};
pub use report::{
    parse_report, render_report, verify_all, verify_row, ReportFormat, RowCheck, Verification,
};

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classes::{partial_member, verify_completion, MatrixClass, PartialMatrix};
use crate::completion::{
    complete_loopless, complete_zero, find_hard_partial, hard_candidates, random_partial,
    search_completion, CompletionConfig, HARD_RANDOM_CANDIDATES,
};
use crate::digraphs::{
    bucket_sizes, canonical_form, enumerate_patterns, pattern_of, structural_props, CanonicalForm,
    LoopMode, Pattern, StructuralProps,
};
use crate::error::{Error, Result};
use crate::exact::{ExactMatrix, Rational};
use crate::symbolic::{lift, prove_noncompletable, sym_det, MultiPoly, NonCompletionCertificate};

pub const DEFAULT_SAMPLES: usize = 50;
pub const DEFAULT_RELATED_SAMPLES: usize = 10;
pub const REPORT_SCHEMA: &str = "signsym-audit/1";

/// Classes evaluated alongside the target for the cross-class rules.
pub const RELATED_CLASSES: [MatrixClass; 4] = [
    MatrixClass::Ssp,
    MatrixClass::Ssp0Plus,
    MatrixClass::Ssp01,
    MatrixClass::Ssp0,
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub completion: CompletionConfig,
    /// Random partial members drawn per pattern for the target class.
    pub samples: usize,
    /// Random partial members per pattern for each related class.
    pub related_samples: usize,
    pub related_classes: bool,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            completion: CompletionConfig::default(),
            samples: DEFAULT_SAMPLES,
            related_samples: DEFAULT_RELATED_SAMPLES,
            related_classes: true,
        }
    }
}

impl AuditConfig {
    pub fn validate(&self) -> Result<()> {
        self.completion.validate()?;
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        if self.related_classes && self.related_samples == 0 {
            return Err(Error::InvalidConfig(
                "related samples must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A partial matrix together with a completion in `class`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionCertificate {
    pub class: MatrixClass,
    #[serde(with = "crate::format::partial_text")]
    pub partial: PartialMatrix,
    #[serde(with = "crate::format::matrix_text")]
    pub completion: ExactMatrix,
}

impl CompletionCertificate {
    pub fn recheck(&self) -> bool {
        partial_member(&self.partial, self.class).member
            && verify_completion(&self.partial, &self.completion, self.class)
                .is_ok_and(|v| v.member)
    }
}

/// Any re-checkable artifact embedded in a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Certificate {
    Completion(CompletionCertificate),
    NonCompletion(NonCompletionCertificate),
    /// The symbolic determinant of a partial matrix.
    Determinant {
        #[serde(with = "crate::format::partial_text")]
        partial: PartialMatrix,
        polynomial: MultiPoly,
    },
}

impl Certificate {
    pub fn recheck(&self) -> bool {
        match self {
            Certificate::Completion(c) => c.recheck(),
            Certificate::NonCompletion(c) => c.recheck(),
            Certificate::Determinant {
                partial,
                polynomial,
            } => sym_det(&lift(partial)).is_ok_and(|d| &d == polynomial),
        }
    }

    pub fn partial(&self) -> &PartialMatrix {
        match self {
            Certificate::Completion(c) => &c.partial,
            Certificate::NonCompletion(c) => &c.partial,
            Certificate::Determinant { partial, .. } => partial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum YesKind {
    /// Every partial member of a fully specified pattern is its own completion.
    Complete,
    ZeroCompletion,
    LooplessConstruction,
}

impl fmt::Display for YesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            YesKind::Complete => "complete",
            YesKind::ZeroCompletion => "zero-completion",
            YesKind::LooplessConstruction => "loopless-construction",
        })
    }
}

/// Verdict on whether every partial member specifying a pattern has a
/// completion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum PatternStatus {
    /// Every partial member completes by a general construction; `example`
    /// shows it on one instance.
    YesProved {
        kind: YesKind,
        example: CompletionCertificate,
    },
    NoProved {
        certificate: NonCompletionCertificate,
    },
    /// All sampled partial members completed.
    YesEvidence {
        completed: usize,
        tried: usize,
        seed: u64,
        example: CompletionCertificate,
    },
    /// A partial member the search could not complete.
    NoEvidence {
        #[serde(with = "crate::format::partial_text")]
        hard: PartialMatrix,
        evaluations: u64,
        completed: usize,
        tried: usize,
        seed: u64,
    },
    Undecided {
        completed: usize,
        tried: usize,
        seed: u64,
    },
}

/// Coarse reading of a status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl PatternStatus {
    pub fn answer(&self) -> Answer {
        match self {
            PatternStatus::YesProved { .. } | PatternStatus::YesEvidence { .. } => Answer::Yes,
            PatternStatus::NoProved { .. } | PatternStatus::NoEvidence { .. } => Answer::No,
            PatternStatus::Undecided { .. } => Answer::Unknown,
        }
    }

    pub fn is_proved(&self) -> bool {
        matches!(
            self,
            PatternStatus::YesProved { .. } | PatternStatus::NoProved { .. }
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            PatternStatus::YesProved { .. } => "yes-proved",
            PatternStatus::NoProved { .. } => "no-proved",
            PatternStatus::YesEvidence { .. } => "yes-evidence",
            PatternStatus::NoEvidence { .. } => "no-evidence",
            PatternStatus::Undecided { .. } => "undecided",
        }
    }

    /// Embedded certificates, if any.
    pub fn certificates(&self) -> Vec<Certificate> {
        match self {
            PatternStatus::YesProved { example, .. } | PatternStatus::YesEvidence { example, .. } => {
                vec![Certificate::Completion(example.clone())]
            }
            PatternStatus::NoProved { certificate } => {
                vec![Certificate::NonCompletion(certificate.clone())]
            }
            _ => vec![],
        }
    }
}

impl fmt::Display for PatternStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternStatus::YesProved { kind, example } => write!(
                f,
                "yes-proved ({kind})\nexample partial:\n{}example completion:\n{}",
                example.partial, example.completion
            ),
            PatternStatus::NoProved { certificate } => write!(
                f,
                "no-proved ({})\npartial:\n{}",
                serde_json::to_string(&certificate.proof).unwrap_or_default(),
                certificate.partial
            ),
            PatternStatus::YesEvidence {
                completed,
                tried,
                seed,
                example,
            } => write!(
                f,
                "yes-evidence ({completed}/{tried} samples completed, seed {seed})\n\
                 example partial:\n{}example completion:\n{}",
                example.partial, example.completion
            ),
            PatternStatus::NoEvidence {
                hard,
                evaluations,
                completed,
                tried,
                seed,
            } => write!(
                f,
                "no-evidence (search exhausted {evaluations} evaluations; \
                 {completed}/{tried} samples completed, seed {seed})\nhard partial:\n{hard}"
            ),
            PatternStatus::Undecided {
                completed,
                tried,
                seed,
            } => write!(
                f,
                "undecided ({completed}/{tried} samples completed, seed {seed})"
            ),
        }
    }
}

/// Per-pattern seed from the configured seed, the class and the canonical
/// code, so results do not depend on enumeration order.
pub fn pattern_seed(seed: u64, class: MatrixClass, code: CanonicalForm) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(class.name().as_bytes());
    h.update((code.n as u64).to_le_bytes());
    h.update(code.code.to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

fn zero_then_search(
    p: &PartialMatrix,
    c: MatrixClass,
    cfg: &CompletionConfig,
) -> Result<(Option<ExactMatrix>, u64)> {
    let z = complete_zero(p, c);
    if let Some(m) = z.found() {
        return Ok((Some(m.clone()), z.evaluations_used));
    }
    let r = search_completion(p, c, cfg)?;
    Ok((r.found().cloned(), r.evaluations_used))
}

fn draw_samples(
    g: &Pattern,
    c: MatrixClass,
    cfg: &CompletionConfig,
    count: usize,
) -> Vec<PartialMatrix> {
    let mut diag_options: Vec<Rational> = cfg.magnitude_grid.clone();
    if !c.positive_diagonal() {
        diag_options.push(Rational::from_integer(0.into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count * 20 {
        if out.len() == count {
            break;
        }
        let p = random_partial(g, c, cfg, &diag_options, &mut rng);
        if partial_member(&p, c).member {
            out.push(p);
        }
    }
    out
}

fn proved_yes(g: &Pattern, c: MatrixClass, cfg: &CompletionConfig) -> Result<Option<PatternStatus>> {
    let one = Rational::from_integer(1.into());
    let zero = Rational::from_integer(0.into());
    if g.is_complete() && g.all_loops() {
        let p = g.partial_with(|i, j| if i == j { one.clone() } else { zero.clone() });
        let m = p.to_exact().expect("fully specified");
        return Ok(Some(PatternStatus::YesProved {
            kind: YesKind::Complete,
            example: CompletionCertificate {
                class: c,
                partial: p,
                completion: m,
            },
        }));
    }
    // A zero diagonal entry defeats zero completion for classes that need a
    // positive minor of every order.
    if g.is_null() && (c.positive_diagonal() || !c.needs_positive_per_order()) {
        let p = g.partial_with(|_, _| one.clone());
        let r = complete_zero(&p, c);
        if let Some(m) = r.found() {
            return Ok(Some(PatternStatus::YesProved {
                kind: YesKind::ZeroCompletion,
                example: CompletionCertificate {
                    class: c,
                    partial: p,
                    completion: m.clone(),
                },
            }));
        }
    }
    if g.is_loopless() {
        let p = g.partial_with(|_, _| -one.clone());
        if partial_member(&p, c).member {
            let r = complete_loopless(&p, c, cfg)?;
            if let Some(m) = r.found() {
                return Ok(Some(PatternStatus::YesProved {
                    kind: YesKind::LooplessConstruction,
                    example: CompletionCertificate {
                        class: c,
                        partial: p,
                        completion: m.clone(),
                    },
                }));
            }
        }
    }
    Ok(None)
}

/// Decision cascade: general constructions, then symbolic proofs on
/// sampled and adversarial partial members, then search evidence.
pub fn classify_pattern_with(
    g: &Pattern,
    c: MatrixClass,
    cfg: &CompletionConfig,
    samples: usize,
) -> Result<PatternStatus> {
    cfg.validate()?;
    if let Some(s) = proved_yes(g, c, cfg)? {
        return Ok(s);
    }
    let seed = pattern_seed(cfg.seed, c, canonical_form(g));
    let local = cfg.with_seed(seed);
    let drawn = draw_samples(g, c, &local, samples);
    let tried = drawn.len();
    let adversarial = hard_candidates(g, c, &local, HARD_RANDOM_CANDIDATES);
    if let Some(certificate) = drawn
        .iter()
        .chain(adversarial.iter())
        .find_map(|p| prove_noncompletable(p, c))
    {
        return Ok(PatternStatus::NoProved { certificate });
    }
    let mut example = None;
    for (k, p) in drawn.iter().enumerate() {
        let (found, evaluations) =
            zero_then_search(p, c, &local.with_seed(seed.wrapping_add(k as u64)))?;
        match found {
            Some(m) => {
                example.get_or_insert_with(|| CompletionCertificate {
                    class: c,
                    partial: p.clone(),
                    completion: m,
                });
            }
            None => {
                return Ok(PatternStatus::NoEvidence {
                    hard: p.clone(),
                    evaluations,
                    completed: k,
                    tried,
                    seed,
                })
            }
        }
    }
    if let Some(hard) = find_hard_partial(g, c, &local)? {
        return Ok(match hard.certificate {
            Some(certificate) => PatternStatus::NoProved { certificate },
            None => PatternStatus::NoEvidence {
                hard: hard.partial,
                evaluations: hard.evaluations,
                completed: tried,
                tried,
                seed,
            },
        });
    }
    Ok(match example {
        Some(example) => PatternStatus::YesEvidence {
            completed: tried,
            tried,
            seed,
            example,
        },
        None => PatternStatus::Undecided {
            completed: 0,
            tried,
            seed,
        },
    })
}

pub fn classify_pattern(g: &Pattern, c: MatrixClass, cfg: &CompletionConfig) -> Result<PatternStatus> {
    classify_pattern_with(g, c, cfg, DEFAULT_SAMPLES)
}

/// Claim status vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimStatus {
    Confirmed,
    Supported,
    RefutedWithCertificate,
    Undecided,
}

impl fmt::Display for ClaimStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClaimStatus::Confirmed => "confirmed",
            ClaimStatus::Supported => "supported",
            ClaimStatus::RefutedWithCertificate => "refuted-with-certificate",
            ClaimStatus::Undecided => "undecided",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternRow {
    pub order: usize,
    pub q: usize,
    pub code: CanonicalForm,
    pub pattern: String,
    pub props: StructuralProps,
    /// Reference verdict where it follows from structure alone.
    pub reference: Option<bool>,
    pub status: PatternStatus,
    #[serde(default, skip_serializing_if = "std::collections::BTreeMap::is_empty")]
    pub related: std::collections::BTreeMap<MatrixClass, PatternStatus>,
}

impl PatternRow {
    pub fn agrees(&self) -> Option<bool> {
        let want = self.reference?;
        match self.status.answer() {
            Answer::Yes => Some(want),
            Answer::No => Some(!want),
            Answer::Unknown => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub order: usize,
    pub q: usize,
    pub classes: usize,
    pub reference_yes: usize,
    pub reference_no: usize,
    pub reference_exhaustive: bool,
    pub yes_proved: usize,
    pub yes_evidence: usize,
    pub no_proved: usize,
    pub no_evidence: usize,
    pub undecided: usize,
    pub status: ClaimStatus,
    pub agrees: Option<bool>,
}

fn tally(bucket: &BucketClaim, rows: &[&PatternRow]) -> Tally {
    let count = |label: &str| rows.iter().filter(|r| r.status.label() == label).count();
    let (yp, ye, np, ne, und) = (
        count("yes-proved"),
        count("yes-evidence"),
        count("no-proved"),
        count("no-evidence"),
        count("undecided"),
    );
    let status = if yp > bucket.yes_count || np > bucket.no_count {
        ClaimStatus::RefutedWithCertificate
    } else if yp == bucket.yes_count && np == bucket.no_count {
        ClaimStatus::Confirmed
    } else if und == 0 && yp + ye == bucket.yes_count && np + ne == bucket.no_count {
        ClaimStatus::Supported
    } else {
        ClaimStatus::Undecided
    };
    let agrees = if und == 0 {
        Some(yp + ye == bucket.yes_count)
    } else {
        None
    };
    Tally {
        order: bucket.order,
        q: bucket.q,
        classes: rows.len(),
        reference_yes: bucket.yes_count,
        reference_no: bucket.no_count,
        reference_exhaustive: bucket.exhaustive(),
        yes_proved: yp,
        yes_evidence: ye,
        no_proved: np,
        no_evidence: ne,
        undecided: und,
        status,
        agrees,
    }
}

/// A cross-class implication between completion properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub name: &'static str,
    pub antecedent: MatrixClass,
    /// `None` means the consequent is "the pattern is null or complete".
    pub consequent: Option<MatrixClass>,
    pub asymmetric_only: bool,
}

pub const RULES: [Rule; 10] = [
    Rule {
        name: "ssp01plus-implies-ssp",
        antecedent: MatrixClass::Ssp01Plus,
        consequent: Some(MatrixClass::Ssp),
        asymmetric_only: false,
    },
    Rule {
        name: "asymmetric-ssp-implies-ssp01plus",
        antecedent: MatrixClass::Ssp,
        consequent: Some(MatrixClass::Ssp01Plus),
        asymmetric_only: true,
    },
    Rule {
        name: "ssp0plus-implies-ssp01plus",
        antecedent: MatrixClass::Ssp0Plus,
        consequent: Some(MatrixClass::Ssp01Plus),
        asymmetric_only: false,
    },
    Rule {
        name: "ssp01plus-implies-ssp01",
        antecedent: MatrixClass::Ssp01Plus,
        consequent: Some(MatrixClass::Ssp01),
        asymmetric_only: false,
    },
    Rule {
        name: "ssp01-implies-ssp",
        antecedent: MatrixClass::Ssp01,
        consequent: Some(MatrixClass::Ssp),
        asymmetric_only: false,
    },
    Rule {
        name: "asymmetric-ssp-implies-ssp01",
        antecedent: MatrixClass::Ssp,
        consequent: Some(MatrixClass::Ssp01),
        asymmetric_only: true,
    },
    Rule {
        name: "ssp0plus-implies-ssp01",
        antecedent: MatrixClass::Ssp0Plus,
        consequent: Some(MatrixClass::Ssp01),
        asymmetric_only: false,
    },
    Rule {
        name: "ssp0plus-implies-ssp",
        antecedent: MatrixClass::Ssp0Plus,
        consequent: Some(MatrixClass::Ssp),
        asymmetric_only: false,
    },
    Rule {
        name: "ssp0-only-null-or-complete",
        antecedent: MatrixClass::Ssp0,
        consequent: None,
        asymmetric_only: false,
    },
    Rule {
        name: "ssp0-implies-ssp01plus",
        antecedent: MatrixClass::Ssp0,
        consequent: Some(MatrixClass::Ssp01Plus),
        asymmetric_only: false,
    },
];

impl Rule {
    pub fn statement(&self) -> String {
        let scope = if self.asymmetric_only { "an asymmetric pattern" } else { "a pattern" };
        match self.consequent {
            Some(c) => format!(
                "{scope} with {}-completion has {c}-completion",
                self.antecedent
            ),
            None => format!(
                "{scope} with {}-completion is null or complete",
                self.antecedent
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleOutcome {
    pub name: String,
    pub statement: String,
    /// Patterns on which both sides were evaluated.
    pub checked: usize,
    /// Proved antecedent with proved failure of the consequent.
    pub violations: Vec<CanonicalForm>,
    /// Evidence-level disagreements.
    pub tensions: Vec<CanonicalForm>,
}

fn status_for(row: &PatternRow, target: MatrixClass, c: MatrixClass) -> Option<&PatternStatus> {
    if c == target {
        Some(&row.status)
    } else {
        row.related.get(&c)
    }
}

/// Evaluates a rule on computed statuses only.
pub fn evaluate_rule(rule: &Rule, rows: &[PatternRow], target: MatrixClass) -> RuleOutcome {
    let mut out = RuleOutcome {
        name: rule.name.into(),
        statement: rule.statement(),
        checked: 0,
        violations: vec![],
        tensions: vec![],
    };
    for row in rows {
        if rule.asymmetric_only && !row.props.is_asymmetric {
            continue;
        }
        let Some(a) = status_for(row, target, rule.antecedent) else {
            continue;
        };
        let (proved_no, no) = match rule.consequent {
            Some(c) => {
                let Some(b) = status_for(row, target, c) else {
                    continue;
                };
                (
                    matches!(b, PatternStatus::NoProved { .. }),
                    b.answer() == Answer::No,
                )
            }
            None => {
                let structural = !(row.props.is_null || row.props.is_complete);
                (structural, structural)
            }
        };
        out.checked += 1;
        let proved_yes = matches!(a, PatternStatus::YesProved { .. });
        if proved_yes && proved_no {
            out.violations.push(row.code);
        } else if a.answer() == Answer::Yes && no {
            out.tensions.push(row.code);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub patterns: usize,
    pub yes_proved: usize,
    pub yes_evidence: usize,
    pub no_proved: usize,
    pub no_evidence: usize,
    pub undecided: usize,
    pub reference_agreements: usize,
    pub reference_disagreements: usize,
    pub rule_violations: usize,
    pub rule_tensions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub schema: String,
    pub class: MatrixClass,
    pub orders: Vec<usize>,
    pub config: AuditConfig,
    pub summary: Summary,
    pub rows: Vec<PatternRow>,
    pub tallies: Vec<Tally>,
    pub claims: Vec<ClaimOutcome>,
    pub rules: Vec<RuleOutcome>,
}

impl AuditReport {
    pub fn has_rule_violations(&self) -> bool {
        self.rules.iter().any(|r| !r.violations.is_empty())
    }
}

fn classify_row(g: &Pattern, c: MatrixClass, cfg: &AuditConfig) -> Result<PatternRow> {
    let status = classify_pattern_with(g, c, &cfg.completion, cfg.samples)?;
    let mut related = std::collections::BTreeMap::new();
    if cfg.related_classes {
        for rc in RELATED_CLASSES.into_iter().filter(|&rc| rc != c) {
            related.insert(
                rc,
                classify_pattern_with(g, rc, &cfg.completion, cfg.related_samples)?,
            );
        }
    }
    Ok(PatternRow {
        order: g.order(),
        q: g.arc_count(),
        code: canonical_form(g),
        pattern: g.to_string(),
        props: structural_props(g),
        reference: structural_reference(g),
        status,
        related,
    })
}

/// Count claims derived from enumeration and the reference lists.
fn structural_claims(buckets: &[(usize, Vec<BucketClaim>)], rows: &[PatternRow]) -> Vec<ClaimOutcome> {
    let all: Vec<&BucketClaim> = buckets.iter().flat_map(|(_, b)| b.iter()).collect();
    let bad: Vec<String> = all
        .iter()
        .filter(|b| !b.exhaustive())
        .map(|b| format!("p={} q={}", b.order, b.q))
        .collect();
    let exhaustive = ClaimOutcome {
        name: "reference-lists-exhaustive".into(),
        statement: "for every (p, q) the completable and non-completable lists \
                    partition the enumerated classes"
            .into(),
        status: if bad.is_empty() { ClaimStatus::Confirmed } else { ClaimStatus::RefutedWithCertificate },
        agrees: Some(bad.is_empty()),
        detail: if bad.is_empty() {
            format!("{} buckets checked", all.len())
        } else {
            format!("buckets not partitioned: {}", bad.join(", "))
        },
        certificate: None,
    };
    let mut mismatched = Vec::new();
    for b in &all {
        let non_asym = rows
            .iter()
            .filter(|r| r.order == b.order && r.q == b.q)
            .filter(|r| r.props.has_two_cycle && !r.props.is_complete)
            .count();
        if non_asym != b.two_cycle_no_count {
            mismatched.push(format!(
                "p={} q={}: listed {} vs {non_asym}",
                b.order, b.q, b.two_cycle_no_count
            ));
        }
    }
    let two_cycle = ClaimOutcome {
        name: "two-cycle-list-matches-structure".into(),
        statement: "the two-cycle list has as many classes per (p, q) as there are \
                    incomplete classes containing a 2-cycle"
            .into(),
        status: if mismatched.is_empty() {
            ClaimStatus::Confirmed
        } else {
            ClaimStatus::RefutedWithCertificate
        },
        agrees: Some(mismatched.is_empty()),
        detail: if mismatched.is_empty() {
            format!("{} buckets checked", all.len())
        } else {
            mismatched.join("; ")
        },
        certificate: None,
    };
    let listed: Vec<&PatternRow> = rows
        .iter()
        .filter(|r| r.reference == Some(false))
        .collect();
    let refuted = listed
        .iter()
        .filter(|r| matches!(r.status, PatternStatus::YesProved { .. }))
        .count();
    let evidence_yes = listed.iter().filter(|r| r.status.answer() == Answer::Yes).count();
    let proved_no = listed
        .iter()
        .filter(|r| matches!(r.status, PatternStatus::NoProved { .. }))
        .count();
    let status = if refuted > 0 {
        ClaimStatus::RefutedWithCertificate
    } else if proved_no == listed.len() {
        ClaimStatus::Confirmed
    } else if evidence_yes == 0 && listed.iter().all(|r| r.status.answer() == Answer::No) {
        ClaimStatus::Supported
    } else {
        ClaimStatus::Undecided
    };
    let two_cycle_patterns = ClaimOutcome {
        name: "incomplete-two-cycle-patterns-not-completable".into(),
        statement: "no incomplete pattern with all loops and a 2-cycle has an \
                    ssp01plus completion"
            .into(),
        status,
        agrees: if evidence_yes > 0 {
            Some(false)
        } else if listed.iter().all(|r| r.status.answer() == Answer::No) {
            Some(true)
        } else {
            None
        },
        detail: format!(
            "{} patterns: {proved_no} no-proved, {} no-evidence, {evidence_yes} with every \
             sampled partial member completed",
            listed.len(),
            listed
                .iter()
                .filter(|r| matches!(r.status, PatternStatus::NoEvidence { .. }))
                .count()
        ),
        certificate: None,
    };
    vec![exhaustive, two_cycle, two_cycle_patterns]
}

/// Classifies every pattern of the given orders in the all-loops universe
/// and compares against the reference classification.
pub fn audit_reference_claims(
    orders: &[usize],
    c: MatrixClass,
    cfg: &AuditConfig,
) -> Result<AuditReport> {
    cfg.validate()?;
    let mut orders = orders.to_vec();
    orders.sort_unstable();
    orders.dedup();
    let table = ReferenceClaimTable::reference();
    let mut patterns = Vec::new();
    let mut buckets = Vec::new();
    for &p in &orders {
        let pats = enumerate_patterns(p, LoopMode::AllLoops)?;
        buckets.push((p, table.buckets(p, &bucket_sizes(&pats))));
        patterns.extend(pats);
    }
    let rows: Vec<PatternRow> = patterns
        .par_iter()
        .map(|g| classify_row(g, c, cfg))
        .collect::<Result<_>>()?;

    let mut tallies = Vec::new();
    for (p, bs) in &buckets {
        for b in bs {
            let in_bucket: Vec<&PatternRow> =
                rows.iter().filter(|r| r.order == *p && r.q == b.q).collect();
            tallies.push(tally(b, &in_bucket));
        }
    }
    let mut claims = check_singleton_claims(&cfg.completion)?;
    claims.extend(structural_claims(&buckets, &rows));
    let rules: Vec<RuleOutcome> = if cfg.related_classes {
        RULES.iter().map(|r| evaluate_rule(r, &rows, c)).collect()
    } else {
        vec![]
    };
    let count = |label: &str| rows.iter().filter(|r| r.status.label() == label).count();
    let summary = Summary {
        patterns: rows.len(),
        yes_proved: count("yes-proved"),
        yes_evidence: count("yes-evidence"),
        no_proved: count("no-proved"),
        no_evidence: count("no-evidence"),
        undecided: count("undecided"),
        reference_agreements: rows.iter().filter(|r| r.agrees() == Some(true)).count(),
        reference_disagreements: rows.iter().filter(|r| r.agrees() == Some(false)).count(),
        rule_violations: rules.iter().map(|r| r.violations.len()).sum(),
        rule_tensions: rules.iter().map(|r| r.tensions.len()).sum(),
    };
    Ok(AuditReport {
        schema: REPORT_SCHEMA.into(),
        class: c,
        orders,
        config: cfg.clone(),
        summary,
        rows,
        tallies,
        claims,
        rules,
    })
}

/// True iff the partial matrix specifies a pattern isomorphic to `code`.
pub fn specifies_class(p: &PartialMatrix, code: CanonicalForm) -> bool {
    canonical_form(&pattern_of(p)) == code
}
