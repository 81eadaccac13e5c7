//! Report rendering, parsing and certificate re-validation.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{specifies_class, AuditReport, Certificate, PatternStatus, REPORT_SCHEMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

pub fn render_report(r: &AuditReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(r)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Text => Ok(render_text(r)),
    }
}

fn opt(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "agrees",
        Some(false) => "disagrees",
        None => "inconclusive",
    }
}

fn render_text(r: &AuditReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "audit of class {} for orders {:?}", r.class, r.orders);
    let c = &r.config;
    let _ = writeln!(
        s,
        "seed {} budget {} samples {} related samples {}",
        c.completion.seed, c.completion.budget, c.samples, c.related_samples
    );
    let m = &r.summary;
    let _ = writeln!(
        s,
        "{} patterns: {} yes-proved, {} yes-evidence, {} no-proved, {} no-evidence, {} undecided",
        m.patterns, m.yes_proved, m.yes_evidence, m.no_proved, m.no_evidence, m.undecided
    );
    let _ = writeln!(s, "\npatterns");
    for (k, row) in r.rows.iter().enumerate() {
        let related: Vec<String> = row
            .related
            .iter()
            .map(|(c, st)| format!("{c}={}", st.label()))
            .collect();
        let _ = writeln!(
            s,
            "{:>4}  p={} q={:<2} {}  {:<12} reference={:<5} {}",
            k + 1,
            row.order,
            row.q,
            row.code,
            row.status.label(),
            match row.reference {
                Some(true) => "yes",
                Some(false) => "no",
                None => "count",
            },
            related.join(" ")
        );
    }
    let _ = writeln!(s, "\ntallies");
    for t in &r.tallies {
        let _ = writeln!(
            s,
            "p={} q={:<2} classes={:<2} reference yes={} no={}  computed yes={}+{} no={}+{} undecided={}  {} ({})",
            t.order,
            t.q,
            t.classes,
            t.reference_yes,
            t.reference_no,
            t.yes_proved,
            t.yes_evidence,
            t.no_proved,
            t.no_evidence,
            t.undecided,
            t.status,
            opt(t.agrees)
        );
    }
    let _ = writeln!(s, "\nclaims");
    for cl in &r.claims {
        let _ = writeln!(s, "{}: {} ({})\n    {}", cl.name, cl.status, opt(cl.agrees), cl.detail);
    }
    if !r.rules.is_empty() {
        let _ = writeln!(s, "\nrules");
        for rule in &r.rules {
            let _ = writeln!(
                s,
                "{}: checked {}, violations {}, tensions {}",
                rule.name,
                rule.checked,
                rule.violations.len(),
                rule.tensions.len()
            );
        }
    }
    s
}

pub fn parse_report(text: &str) -> Result<AuditReport> {
    let r: AuditReport = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    if r.schema != REPORT_SCHEMA {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unsupported schema `{}`", r.schema),
        });
    }
    Ok(r)
}

/// Re-validation result for one report row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowCheck {
    pub row: usize,
    pub certificates: usize,
    pub valid: bool,
    pub problems: Vec<String>,
}

fn check_status(
    label: &str,
    status: &PatternStatus,
    code: crate::digraphs::CanonicalForm,
    expected: crate::classes::MatrixClass,
    problems: &mut Vec<String>,
) -> usize {
    let certs = status.certificates();
    for cert in &certs {
        if !cert.recheck() {
            problems.push(format!("{label}: certificate does not re-validate"));
        }
        if !specifies_class(cert.partial(), code) {
            problems.push(format!("{label}: certificate specifies a different pattern"));
        }
        let class = match cert {
            Certificate::Completion(c) => Some(c.class),
            Certificate::NonCompletion(c) => Some(c.class),
            Certificate::Determinant { .. } => None,
        };
        if class.is_some_and(|c| c != expected) {
            problems.push(format!("{label}: certificate is for another class"));
        }
    }
    if let PatternStatus::NoEvidence { hard, .. } = status {
        if !crate::classes::partial_member(hard, expected).member {
            problems.push(format!("{label}: hard partial matrix is not a partial member"));
        }
        if !specifies_class(hard, code) {
            problems.push(format!("{label}: hard partial matrix specifies a different pattern"));
        }
    }
    certs.len()
}

/// Re-validates every certificate of row `k` (1-based).
pub fn verify_row(r: &AuditReport, k: usize) -> Result<RowCheck> {
    let row = k
        .checked_sub(1)
        .and_then(|i| r.rows.get(i))
        .ok_or(Error::IndexOutOfBounds {
            index: k,
            order: r.rows.len(),
        })?;
    let mut problems = Vec::new();
    let mut n = check_status(r.class.name(), &row.status, row.code, r.class, &mut problems);
    for (c, st) in &row.related {
        n += check_status(c.name(), st, row.code, *c, &mut problems);
    }
    Ok(RowCheck {
        row: k,
        certificates: n,
        valid: problems.is_empty(),
        problems,
    })
}

/// Row checks and `(claim name, valid)` pairs.
pub type Verification = (Vec<RowCheck>, Vec<(String, bool)>);

/// Re-validates every row and claim certificate.
pub fn verify_all(r: &AuditReport) -> Result<Verification> {
    let rows = (1..=r.rows.len())
        .map(|k| verify_row(r, k))
        .collect::<Result<Vec<_>>>()?;
    let claims = r
        .claims
        .iter()
        .filter_map(|c| c.certificate.as_ref().map(|cert| (c.name.clone(), cert.recheck())))
        .collect();
    Ok((rows, claims))
}

#[cfg(test)]
mod tests {
    use super::super::{audit_reference_claims, AuditConfig};
    use super::*;
    use crate::classes::MatrixClass;

    fn tiny() -> AuditReport {
        let mut cfg = AuditConfig::default();
        cfg.completion.budget = 500;
        cfg.samples = 3;
        cfg.related_samples = 1;
        audit_reference_claims(&[1], MatrixClass::Ssp01Plus, &cfg).unwrap()
    }

    #[test]
    fn order_one_report_round_trips() {
        let r = tiny();
        assert_eq!(r.rows.len(), 1);
        let json = render_report(&r, ReportFormat::Json).unwrap();
        let back = parse_report(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(render_report(&back, ReportFormat::Json).unwrap(), json);
        assert!(render_report(&r, ReportFormat::Text).unwrap().contains("patterns"));
    }

    #[test]
    fn unknown_format_is_rejected() {
        assert!(matches!("xml".parse::<ReportFormat>(), Err(Error::UnknownFormat(_))));
    }

    #[test]
    fn certificates_verify_and_bad_row_errors() {
        let r = tiny();
        assert!(verify_row(&r, 1).unwrap().valid);
        assert!(verify_row(&r, 0).is_err());
        assert!(verify_row(&r, 2).is_err());
        let (rows, claims) = verify_all(&r).unwrap();
        assert!(rows.iter().all(|c| c.valid));
        assert!(claims.iter().all(|(_, ok)| *ok));
    }

    #[test]
    fn tampered_completion_is_detected() {
        let mut r = tiny();
        if let PatternStatus::YesProved { example, .. } = &mut r.rows[0].status {
            example.completion = crate::exact::ExactMatrix::from_ints(&[&[-1]]).unwrap();
        }
        assert!(!verify_row(&r, 1).unwrap().valid);
    }

    #[test]
    fn schema_mismatch_is_rejected() {
        let json = render_report(&tiny(), ReportFormat::Json)
            .unwrap()
            .replace(REPORT_SCHEMA, "other/9");
        assert!(parse_report(&json).is_err());
    }
}
