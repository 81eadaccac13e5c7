//! Reference classification table for patterns of order at most four and
//! the named single-witness claims.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classes::{verify_completion, MatrixClass};
use crate::completion::{search_completion, CompletionConfig};
use crate::digraphs::{structural_props, Pattern};
use crate::error::{Error, Result};
use crate::exact::{int, ExactMatrix, Rational};
use crate::format::parse_partial;
use crate::symbolic::{
    lift, prove_noncompletable, prove_noncompletable_by_forced_minor, sym_det, MultiPoly,
};

use super::{Certificate, ClaimStatus, CompletionCertificate};

/// Which list of the reference classification an entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ListKind {
    /// Patterns listed as completable.
    Yes,
    /// Incomplete patterns with a 2-cycle, listed as not completable.
    NoTwoCycle,
    /// Patterns listed as not completable through the strict class.
    NoStrict,
}

impl ListKind {
    pub fn is_yes(self) -> bool {
        self == ListKind::Yes
    }
}

/// Pattern indices within one `(p, q)` bucket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Indices {
    All,
    Ranges(Vec<(u32, u32)>),
}

impl Indices {
    /// Parses `*` or a list like `4-11,13`.
    pub fn parse(s: &str) -> Result<Indices> {
        let s = s.trim();
        if s == "*" {
            return Ok(Indices::All);
        }
        let bad = || Error::Parse {
            line: 1,
            msg: format!("bad index list `{s}`"),
        };
        let mut ranges = Vec::new();
        for part in s.split(',') {
            let (a, b) = match part.split_once('-') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (part.trim(), part.trim()),
            };
            let a: u32 = a.parse().map_err(|_| bad())?;
            let b: u32 = b.parse().map_err(|_| bad())?;
            if a == 0 || a > b {
                return Err(bad());
            }
            ranges.push((a, b));
        }
        Ok(Indices::Ranges(ranges))
    }

    /// Members for a bucket holding `size` classes.
    pub fn members(&self, size: usize) -> Vec<u32> {
        match self {
            Indices::All => (1..=size as u32).collect(),
            Indices::Ranges(r) => r.iter().flat_map(|&(a, b)| a..=b).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListEntry {
    pub kind: ListKind,
    pub order: usize,
    pub q: usize,
    pub indices: Indices,
}

/// `(kind, p, q, indices)` as printed in the reference classification.
const REFERENCE_LISTS: &[(ListKind, usize, usize, &str)] = &[
    (ListKind::Yes, 1, 0, "*"),
    (ListKind::Yes, 2, 0, "*"),
    (ListKind::Yes, 2, 1, "*"),
    (ListKind::Yes, 2, 2, "*"),
    (ListKind::Yes, 3, 0, "*"),
    (ListKind::Yes, 3, 1, "*"),
    (ListKind::Yes, 3, 6, "*"),
    (ListKind::Yes, 3, 2, "2-4"),
    (ListKind::Yes, 3, 3, "3"),
    (ListKind::Yes, 4, 0, "*"),
    (ListKind::Yes, 4, 1, "*"),
    (ListKind::Yes, 4, 12, "*"),
    (ListKind::Yes, 4, 2, "2-5"),
    (ListKind::Yes, 4, 3, "4-11,13"),
    (ListKind::Yes, 4, 4, "16-19,21-23,25-27"),
    (ListKind::Yes, 4, 5, "29,31,33,34,36,37"),
    (ListKind::Yes, 4, 6, "46"),
    (ListKind::NoTwoCycle, 3, 2, "1"),
    (ListKind::NoTwoCycle, 3, 3, "1,4"),
    (ListKind::NoTwoCycle, 3, 4, "*"),
    (ListKind::NoTwoCycle, 3, 5, "*"),
    (ListKind::NoTwoCycle, 4, 2, "1"),
    (ListKind::NoTwoCycle, 4, 3, "1-3"),
    (ListKind::NoTwoCycle, 4, 4, "1-15"),
    (ListKind::NoTwoCycle, 4, 5, "1-28"),
    (ListKind::NoTwoCycle, 4, 6, "1-44"),
    (ListKind::NoTwoCycle, 4, 7, "*"),
    (ListKind::NoTwoCycle, 4, 8, "*"),
    (ListKind::NoTwoCycle, 4, 9, "*"),
    (ListKind::NoTwoCycle, 4, 10, "*"),
    (ListKind::NoTwoCycle, 4, 11, "*"),
    (ListKind::NoStrict, 3, 3, "2"),
    (ListKind::NoStrict, 4, 3, "12"),
    (ListKind::NoStrict, 4, 4, "20,24"),
    (ListKind::NoStrict, 4, 5, "30,32,35,38"),
    (ListKind::NoStrict, 4, 6, "45,47,48"),
];

/// Per-bucket counts read off the reference lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketClaim {
    pub order: usize,
    pub q: usize,
    pub classes: usize,
    pub yes_count: usize,
    pub no_count: usize,
    pub two_cycle_no_count: usize,
    /// Indices listed more than once or outside `1..=classes`.
    pub conflicts: Vec<u32>,
    /// Indices in `1..=classes` that no list mentions.
    pub missing: Vec<u32>,
}

impl BucketClaim {
    pub fn exhaustive(&self) -> bool {
        self.conflicts.is_empty() && self.missing.is_empty() && self.yes_count + self.no_count == self.classes
    }
}

/// The reference classification as per-`(p, q)` counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceClaimTable {
    pub entries: Vec<ListEntry>,
}

impl ReferenceClaimTable {
    pub fn reference() -> Self {
        let entries = REFERENCE_LISTS
            .iter()
            .map(|&(kind, order, q, s)| ListEntry {
                kind,
                order,
                q,
                indices: Indices::parse(s).expect("reference lists are well formed"),
            })
            .collect();
        ReferenceClaimTable { entries }
    }

    /// Resolves the lists against enumerated bucket sizes for `order`.
    pub fn buckets(&self, order: usize, sizes: &[usize]) -> Vec<BucketClaim> {
        sizes
            .iter()
            .enumerate()
            .map(|(q, &classes)| {
                let mut seen: BTreeMap<u32, usize> = BTreeMap::new();
                let (mut yes, mut no, mut two_cycle) = (0, 0, 0);
                for e in self.entries.iter().filter(|e| e.order == order && e.q == q) {
                    let members = e.indices.members(classes);
                    for &m in &members {
                        *seen.entry(m).or_default() += 1;
                    }
                    match e.kind {
                        ListKind::Yes => yes += members.len(),
                        ListKind::NoTwoCycle => {
                            no += members.len();
                            two_cycle += members.len();
                        }
                        ListKind::NoStrict => no += members.len(),
                    }
                }
                let conflicts = seen
                    .iter()
                    .filter(|&(&m, &c)| c > 1 || m as usize > classes)
                    .map(|(&m, _)| m)
                    .collect();
                let missing = (1..=classes as u32).filter(|m| !seen.contains_key(m)).collect();
                BucketClaim {
                    order,
                    q,
                    classes,
                    yes_count: yes,
                    no_count: no,
                    two_cycle_no_count: two_cycle,
                    conflicts,
                    missing,
                }
            })
            .collect()
    }
}

/// The reference verdict for a single pattern where it follows from the
/// structure alone; asymmetric patterns are only covered by counts.
pub fn structural_reference(g: &Pattern) -> Option<bool> {
    let props = structural_props(g);
    if props.is_null || props.is_complete {
        Some(true)
    } else if props.has_two_cycle && props.all_loops {
        Some(false)
    } else {
        None
    }
}

/// Outcome of one named claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimOutcome {
    pub name: String,
    pub statement: String,
    pub status: ClaimStatus,
    /// Whether the computed result agrees with the reference claim.
    pub agrees: Option<bool>,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

pub const RANK_ONE_WITNESS: &str = "3\n1 1 1\n1 1 1\n1 1 ?\n";
pub const TWO_CYCLE_WITNESS_3: &str = "3\n1 -1 ?\n-1 1 ?\n? ? 1\n";
pub const TWO_CYCLE_WITNESS_4: &str = "4\n1 -1 ? ?\n-1 1 ? ?\n? ? 1 ?\n? ? ? 1\n";
pub const TWO_CYCLE_DETERMINANT: &str = "-x13*x31 - x13*x32 - x23*x31 - x23*x32";

fn rank_one_claim() -> ClaimOutcome {
    let p = parse_partial(RANK_ONE_WITNESS).expect("constant");
    let cert = prove_noncompletable(&p, MatrixClass::Ssp01Plus);
    let ok = cert.as_ref().is_some_and(|c| c.recheck());
    ClaimOutcome {
        name: "rank-one-witness-singular".into(),
        statement: "the all-ones partial matrix with one free diagonal entry has a \
                    determinant identically zero, so it has no ssp01plus completion"
            .into(),
        status: if ok { ClaimStatus::Confirmed } else { ClaimStatus::Undecided },
        agrees: Some(ok),
        detail: if ok {
            "symbolic determinant is the zero polynomial".into()
        } else {
            "no symbolic proof found".into()
        },
        certificate: cert.map(Certificate::NonCompletion),
    }
}

fn determinant_formula_claim() -> ClaimOutcome {
    let p = parse_partial(TWO_CYCLE_WITNESS_3).expect("constant");
    let expected: MultiPoly = TWO_CYCLE_DETERMINANT.parse().expect("constant");
    let got = sym_det(&lift(&p)).expect("order 3");
    let ok = got == expected;
    ClaimOutcome {
        name: "two-cycle-determinant-formula".into(),
        statement: format!("the order-3 two-cycle witness has determinant {TWO_CYCLE_DETERMINANT}"),
        status: if ok { ClaimStatus::Confirmed } else { ClaimStatus::RefutedWithCertificate },
        agrees: Some(ok),
        detail: format!("symbolic determinant: {got}"),
        certificate: Some(Certificate::Determinant {
            partial: p,
            polynomial: got,
        }),
    }
}

/// For `[[0, a], [?, 0]]` the free twin must share the sign of `a`, so the
/// minor `-a·x21` is negative.
fn forced_minor_claim(cfg: &CompletionConfig) -> ClaimOutcome {
    let mut checked = 0usize;
    let mut all_negative = true;
    let signed: Vec<Rational> = cfg
        .magnitude_grid
        .iter()
        .flat_map(|m| [m.clone(), -m.clone()])
        .collect();
    for a in &signed {
        for x in signed.iter().filter(|x| (a * *x) > int(0)) {
            let m = ExactMatrix::new(vec![vec![int(0), a.clone()], vec![x.clone(), int(0)]])
                .expect("order 2");
            checked += 1;
            all_negative &= m.det() < int(0);
        }
    }
    let p = parse_partial("2\n0 1\n? 0\n").expect("constant");
    let cert = prove_noncompletable_by_forced_minor(&p, MatrixClass::Ssp0)
        .ok()
        .flatten();
    let proved = cert.as_ref().is_some_and(|c| c.recheck());
    let ok = all_negative && proved;
    ClaimOutcome {
        name: "zero-diagonal-forced-negative-minor".into(),
        statement: "with both diagonal entries zero and one specified nonzero \
                    off-diagonal entry, sign symmetry forces a negative 2x2 minor"
            .into(),
        status: if ok { ClaimStatus::Confirmed } else { ClaimStatus::Undecided },
        agrees: Some(ok),
        detail: format!(
            "{checked} admissible grid assignments all negative: {all_negative}; \
             symbolic minor sign argument: {proved}"
        ),
        certificate: cert.map(Certificate::NonCompletion),
    }
}

/// Settles a witness claimed to have no completion: a verified completion
/// refutes it, a symbolic proof confirms it.
fn witness_claim(name: &str, text: &str, cfg: &CompletionConfig) -> Result<ClaimOutcome> {
    let p = parse_partial(text)?;
    let class = MatrixClass::Ssp01Plus;
    let statement = format!(
        "the order-{} two-cycle witness has no ssp01plus completion",
        p.order()
    );
    if let Some(cert) = prove_noncompletable(&p, class) {
        return Ok(ClaimOutcome {
            name: name.into(),
            statement,
            status: ClaimStatus::Confirmed,
            agrees: Some(true),
            detail: "symbolic impossibility proof".into(),
            certificate: Some(Certificate::NonCompletion(cert)),
        });
    }
    let r = search_completion(&p, class, cfg)?;
    Ok(match r.found() {
        Some(m) => {
            debug_assert!(verify_completion(&p, m, class)?.member);
            ClaimOutcome {
                name: name.into(),
                statement,
                status: ClaimStatus::RefutedWithCertificate,
                agrees: Some(false),
                detail: format!(
                    "verified completion found after {} evaluations, determinant {}",
                    r.evaluations_used,
                    m.det()
                ),
                certificate: Some(Certificate::Completion(CompletionCertificate {
                    class,
                    partial: p.clone(),
                    completion: m.clone(),
                })),
            }
        }
        None => ClaimOutcome {
            name: name.into(),
            statement,
            status: ClaimStatus::Undecided,
            agrees: None,
            detail: format!("search exhausted {} evaluations", r.evaluations_used),
            certificate: None,
        },
    })
}

/// The named claims that concern a single witness matrix or formula.
pub fn check_singleton_claims(cfg: &CompletionConfig) -> Result<Vec<ClaimOutcome>> {
    cfg.validate()?;
    Ok(vec![
        rank_one_claim(),
        determinant_formula_claim(),
        forced_minor_claim(cfg),
        witness_claim("two-cycle-witness-order-3-impossible", TWO_CYCLE_WITNESS_3, cfg)?,
        witness_claim("two-cycle-witness-order-4-impossible", TWO_CYCLE_WITNESS_4, cfg)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_lists_parse() {
        assert_eq!(Indices::parse("4-11,13").unwrap().members(0).len(), 9);
        assert_eq!(Indices::parse("*").unwrap().members(5), vec![1, 2, 3, 4, 5]);
        assert!(Indices::parse("3-1").is_err());
        assert!(Indices::parse("0").is_err());
        assert!(Indices::parse("a").is_err());
    }

    #[test]
    fn reference_counts_order_three() {
        let t = ReferenceClaimTable::reference();
        let b = t.buckets(3, &[1, 1, 4, 4, 4, 1, 1]);
        let yes: Vec<usize> = b.iter().map(|c| c.yes_count).collect();
        let no: Vec<usize> = b.iter().map(|c| c.no_count).collect();
        assert_eq!(yes, vec![1, 1, 3, 1, 0, 0, 1]);
        assert_eq!(no, vec![0, 0, 1, 3, 4, 1, 0]);
        assert!(b.iter().all(BucketClaim::exhaustive));
    }

    #[test]
    fn reference_counts_order_four() {
        let t = ReferenceClaimTable::reference();
        let sizes = [1, 1, 5, 13, 27, 38, 48, 38, 27, 13, 5, 1, 1];
        let b = t.buckets(4, &sizes);
        assert_eq!(b.iter().map(|c| c.yes_count).sum::<usize>(), 33);
        assert_eq!(b.iter().map(|c| c.no_count).sum::<usize>(), 185);
        assert_eq!(b[4].yes_count, 10);
        assert_eq!(b[4].no_count, 17);
        assert!(b.iter().all(BucketClaim::exhaustive));
    }

    #[test]
    fn wrong_bucket_size_is_not_exhaustive() {
        let t = ReferenceClaimTable::reference();
        let b = t.buckets(4, &[1, 1, 6]);
        assert!(!b[2].exhaustive());
        assert_eq!(b[2].missing, vec![6]);
    }

    #[test]
    fn formula_and_rank_one_claims_confirm() {
        assert_eq!(rank_one_claim().status, ClaimStatus::Confirmed);
        assert_eq!(determinant_formula_claim().status, ClaimStatus::Confirmed);
        let c = forced_minor_claim(&CompletionConfig::default());
        assert_eq!(c.status, ClaimStatus::Confirmed, "{}", c.detail);
    }
}
