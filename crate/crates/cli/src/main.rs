use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use signsym::audit::{
    audit_reference_claims, classify_pattern_with, parse_report, render_report, verify_all,
    verify_row, AuditConfig, ReportFormat,
};
use signsym::classes::{is_member, partial_member, PartialCase, PartialVerdict};
use signsym::completion::{complete, CompletionConfig};
use signsym::digraphs::{
    bucket_sizes, by_arc_count, canonical_form, enumerate_patterns, parse_pattern, LoopMode,
};
use signsym::format::{parse_matrix, parse_partial};
use signsym::symbolic::{lift, sym_det};
use signsym::{Error, MatrixClass};

#[derive(Parser)]
#[command(name = "signsym", version, about = "Exact checks for sign symmetric P-matrix completions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = CompletionConfig::default().budget)]
    budget: u64,
}

impl SearchArgs {
    fn config(&self) -> CompletionConfig {
        CompletionConfig {
            seed: self.seed,
            budget: self.budget,
            ..CompletionConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Test a fully specified matrix for membership in a class.
    CheckClass {
        file: PathBuf,
        #[arg(long, default_value = "ssp01plus")]
        class: MatrixClass,
    },
    /// Test a partial matrix for partial membership and report its case.
    CheckPartial {
        file: PathBuf,
        #[arg(long, default_value = "ssp01plus")]
        class: MatrixClass,
    },
    /// Complete a partial matrix.
    Complete {
        file: PathBuf,
        #[arg(long, default_value = "ssp01plus")]
        class: MatrixClass,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Print the determinant of a partial matrix as a polynomial in its
    /// unspecified entries.
    SymDet { file: PathBuf },
    /// List pattern isomorphism classes of an order by arc count.
    Enumerate {
        #[arg(long)]
        order: usize,
        /// Enumerate loopless patterns instead of the all-loops universe.
        #[arg(long)]
        no_loops: bool,
    },
    /// Classify one pattern.
    Classify {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long, default_value = "ssp01plus")]
        class: MatrixClass,
        #[arg(long, default_value_t = signsym::audit::DEFAULT_SAMPLES)]
        samples: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Classify every pattern of the given orders and compare against the
    /// reference classification.
    Audit {
        /// Orders as `1..4`, `1..=4`, `3` or `1,3`.
        #[arg(long, default_value = "1..4")]
        orders: String,
        #[arg(long, default_value = "ssp01plus")]
        class: MatrixClass,
        #[arg(long, default_value_t = signsym::audit::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = signsym::audit::DEFAULT_RELATED_SAMPLES)]
        related_samples: usize,
        /// Skip the related classes and the cross-class rules.
        #[arg(long)]
        no_related: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Re-validate certificates embedded in a JSON audit report.
    VerifyCertificate {
        report: PathBuf,
        /// 1-based row number.
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        row: Option<usize>,
        #[arg(long)]
        all: bool,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::UnknownFormat(_)
            | Error::UnsupportedClass(_)
            | Error::InvalidConfig(_)
            | Error::InvalidIndexSet(_)
            | Error::MissingVariable(_)
            | Error::InvalidMatrix(_) => 2,
            Error::Precondition(_)
            | Error::OrderTooLarge { .. }
            | Error::OrderMismatch { .. }
            | Error::IndexOutOfBounds { .. } => 3,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        msg: format!("cannot read {}: {e}", path.display()),
    })
}

fn parse_orders(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure {
        code: 2,
        msg: format!("bad order list `{s}`"),
    };
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let orders: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        (num(a)?..=num(b)?).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if orders.is_empty() {
        return Err(bad());
    }
    Ok(orders)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::CheckClass { file, class } => {
            let m = parse_matrix(&read(&file)?)?;
            let v = is_member(&m, class);
            println!("{v}");
            Ok(0)
        }
        Command::CheckPartial { file, class } => {
            let p = parse_partial(&read(&file)?)?;
            let v = partial_member(&p, class);
            let verdict = PartialVerdict {
                member: v.member,
                case: PartialCase::of(&p),
                witness: v.witness,
            };
            println!("{verdict}");
            Ok(0)
        }
        Command::Complete {
            file,
            class,
            search,
        } => {
            let p = parse_partial(&read(&file)?)?;
            if let Some(w) = partial_member(&p, class).witness {
                return Err(Error::Precondition(format!("not a partial {class}-matrix: {w}")).into());
            }
            let r = complete(&p, class, &search.config())?;
            print!("{r}");
            if !r.is_found() {
                println!();
            }
            Ok(0)
        }
        Command::SymDet { file } => {
            let p = parse_partial(&read(&file)?)?;
            println!("{}", sym_det(&lift(&p))?);
            Ok(0)
        }
        Command::Enumerate { order, no_loops } => {
            let mode = if no_loops { LoopMode::NoLoops } else { LoopMode::AllLoops };
            let pats = enumerate_patterns(order, mode)?;
            println!(
                "order {order}: {} classes, buckets {:?}",
                pats.len(),
                bucket_sizes(&pats)
            );
            for (q, group) in by_arc_count(&pats) {
                println!("q={q}: {} classes", group.len());
                for g in group {
                    let arcs: Vec<String> =
                        g.arcs().map(|(i, j)| format!("{}->{}", i + 1, j + 1)).collect();
                    println!("  {}  {}", canonical_form(&g), arcs.join(" "));
                }
            }
            Ok(0)
        }
        Command::Classify {
            pattern,
            class,
            samples,
            search,
        } => {
            let g = parse_pattern(&read(&pattern)?)?;
            let status = classify_pattern_with(&g, class, &search.config(), samples)?;
            println!("{status}");
            Ok(0)
        }
        Command::Audit {
            orders,
            class,
            samples,
            related_samples,
            no_related,
            out,
            format,
            search,
        } => {
            let orders = parse_orders(&orders)?;
            let format: ReportFormat = format.parse()?;
            let cfg = AuditConfig {
                completion: search.config(),
                samples,
                related_samples,
                related_classes: !no_related,
            };
            let report = audit_reference_claims(&orders, class, &cfg)?;
            let doc = render_report(&report, format)?;
            match out {
                Some(path) => {
                    fs::write(&path, doc).map_err(|e| Failure {
                        code: 2,
                        msg: format!("cannot write {}: {e}", path.display()),
                    })?;
                    let m = &report.summary;
                    println!(
                        "{} patterns: {} yes-proved, {} yes-evidence, {} no-proved, {} no-evidence, {} undecided; {} rule violations",
                        m.patterns, m.yes_proved, m.yes_evidence, m.no_proved, m.no_evidence, m.undecided, m.rule_violations
                    );
                }
                None => print!("{doc}"),
            }
            Ok(if report.has_rule_violations() { 1 } else { 0 })
        }
        Command::VerifyCertificate { report, row, all } => {
            let r = parse_report(&read(&report)?)?;
            let mut ok = true;
            if all {
                let (rows, claims) = verify_all(&r)?;
                let certs: usize = rows.iter().map(|c| c.certificates).sum();
                for c in rows.iter().filter(|c| !c.valid) {
                    ok = false;
                    println!("row {}: invalid: {}", c.row, c.problems.join("; "));
                }
                for (name, valid) in &claims {
                    ok &= valid;
                    if !valid {
                        println!("claim {name}: invalid");
                    }
                }
                println!(
                    "{} rows, {certs} row certificates, {} claim certificates: {}",
                    rows.len(),
                    claims.len(),
                    if ok { "all valid" } else { "INVALID" }
                );
            } else {
                let k = row.expect("clap requires --row without --all");
                let c = verify_row(&r, k)?;
                ok = c.valid;
                if c.valid {
                    println!("row {k}: {} certificates valid", c.certificates);
                } else {
                    println!("row {k}: invalid: {}", c.problems.join("; "));
                }
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
