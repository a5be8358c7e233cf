//! Command-line surface for the workbench: normal forms, basis
//! enumeration, confluence certification, structural verification suites,
//! projector matrices, the numeric winding pairing and representation
//! residual reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qhopf::bundle::HopfFibration;
use qhopf::galois::StrongConnection;
use qhopf::ncpoly::word_to_text;
use qhopf::oper::{build_family, chern_pairing, FAMILY_NAMES};
use qhopf::report::{all_passed, CheckReport};
use qhopf::rewrite::presets;
use qhopf::scalar::{parse_scalar, AlgebraParams};

#[derive(Parser)]
#[command(
    name = "qhopf",
    about = "Exact and numeric checks for a locally trivial quantum principal U(1)-bundle",
    version
)]
struct Cli {
    /// Deformation parameter p (rational in (0,1)).
    #[arg(long, global = true, default_value = "1/2")]
    p: String,
    /// Deformation parameter q (rational in (0,1)).
    #[arg(long, global = true, default_value = "1/4")]
    q: String,
    /// Emit structured JSON instead of plain text where both exist.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce an expression to its normal form.
    Nf {
        /// Algebra: disc | disc-p | disc-q | circle | sphere | s3 | hopf-u1.
        #[arg(long, default_value = "s3")]
        algebra: String,
        /// Expression, e.g. "x* x" or "a* a b* b".
        expr: String,
    },
    /// List the normal words of one degree (or up to it with --upto).
    Basis {
        #[arg(long, default_value = "s3")]
        algebra: String,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        /// Cumulative basis of all degrees up to --degree.
        #[arg(long)]
        upto: bool,
    },
    /// Complete the rewrite system and certify confluence up to a degree.
    Confluence {
        #[arg(long, default_value = "s3")]
        algebra: String,
        #[arg(long, default_value_t = 8)]
        degree: usize,
    },
    /// Run a verification suite; exit code 0 iff every check passes.
    Verify {
        suite: Suite,
        /// Filtration degree for the bundle checks.
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Winding range for the connection checks.
        #[arg(long = "max-winding", default_value_t = 3)]
        max_winding: i64,
        /// Truncation dimension for the representation checks.
        #[arg(long = "N", default_value_t = 64)]
        dim: usize,
        /// Residual/trace window (must satisfy N > M >= 2).
        #[arg(long = "M", default_value_t = 58)]
        window: usize,
    },
    /// Print the projector matrix of the winding-n line bundle.
    Projector {
        #[arg(long)]
        winding: i64,
    },
    /// Pair the difference trace with a winding projector numerically.
    Pairing {
        #[arg(long)]
        winding: i64,
        #[arg(long = "N", default_value_t = 128)]
        dim: usize,
        #[arg(long = "M", default_value_t = 64)]
        window: usize,
    },
    /// Build a representation family; with --check, report its residuals.
    Reps {
        /// Family: s3-onedim | s3-shift-b | s3-shift-a | disc-shift |
        /// disc-point | sphere-rep-1 | sphere-rep-2.
        #[arg(long)]
        family: String,
        /// Verify the defining relations inside the window.
        #[arg(long)]
        check: bool,
        #[arg(long = "N", default_value_t = 64)]
        dim: usize,
        #[arg(long = "M", default_value_t = 58)]
        window: usize,
        /// Phase parameters of the family, in radians.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        phase: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Bundle,
    Galois,
    Reps,
    All,
}

#[derive(Serialize)]
struct NfDoc {
    input: String,
    normal_form: String,
}

#[derive(Serialize)]
struct ConfluenceDoc {
    algebra: String,
    degree: usize,
    rules: usize,
    new_rules: usize,
    pairs_examined: usize,
    confluent_up_to: usize,
}

#[derive(Serialize)]
struct RepsDoc {
    family: String,
    dim: usize,
    window: usize,
    generator_norms: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    pass: bool,
}

fn emit(out: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<bool, Box<dyn std::error::Error>> {
    let params = AlgebraParams::new(parse_scalar(&cli.p)?, parse_scalar(&cli.q)?)?;
    match &cli.cmd {
        Cmd::Nf { algebra, expr } => {
            let pres = presets::by_name(algebra, &params)?;
            let nf = pres.nf_extending(&pres.parse(expr)?)?;
            let text = if cli.json {
                serde_json::to_string(&NfDoc {
                    input: expr.clone(),
                    normal_form: nf.to_text(),
                })?
            } else {
                nf.to_text()
            };
            emit(&cli.out, &text)?;
            Ok(true)
        }
        Cmd::Basis {
            algebra,
            degree,
            upto,
        } => {
            let pres = presets::by_name(algebra, &params)?;
            pres.ensure_complete(*degree)?;
            let words = if *upto {
                pres.basis_upto(*degree)?
            } else {
                pres.basis(*degree)?
            };
            let names: Vec<String> = words
                .iter()
                .map(|w| word_to_text(w, &pres.alphabet))
                .collect();
            emit(&cli.out, &serde_json::to_string(&names)?)?;
            Ok(true)
        }
        Cmd::Confluence { algebra, degree } => {
            let pres = presets::by_name(algebra, &params)?;
            let stats = pres.ensure_complete(*degree)?;
            let doc = ConfluenceDoc {
                algebra: algebra.clone(),
                degree: *degree,
                rules: pres.system().rules().len(),
                new_rules: stats.new_rules,
                pairs_examined: stats.pairs_examined,
                confluent_up_to: pres.completed_to(),
            };
            emit(&cli.out, &serde_json::to_string(&doc)?)?;
            Ok(doc.confluent_up_to >= *degree)
        }
        Cmd::Verify {
            suite,
            degree,
            max_winding,
            dim,
            window,
        } => {
            check_window(*dim, *window)?;
            let mut reports: Vec<CheckReport> = Vec::new();
            if matches!(suite, Suite::Bundle | Suite::All) {
                let fib = HopfFibration::new(&params)?;
                reports.extend(fib.verify_bundle(*degree)?);
            }
            if matches!(suite, Suite::Galois | Suite::All) {
                let pres = presets::s3(&params)?;
                let conn = StrongConnection::new(&pres)?;
                reports.extend(conn.verify_galois(*max_winding)?);
                reports.extend(conn.verify_unit_contraction(*max_winding)?);
                reports.extend(conn.verify_homogeneity(*max_winding)?);
                for n in -max_winding..=*max_winding {
                    let e = conn.projector(n)?;
                    let name = format!("E({n})");
                    reports.push(if e.is_idempotent(&pres)? {
                        CheckReport::pass("projector-idempotent", &name, None)
                    } else {
                        CheckReport::fail("projector-idempotent", &name, None, "E^2 != E".into())
                    });
                    reports.push(if e.all_entries_coinvariant(&pres)? {
                        CheckReport::pass("projector-coinvariant", &name, None)
                    } else {
                        CheckReport::fail(
                            "projector-coinvariant",
                            &name,
                            None,
                            "entry with nonzero winding".into(),
                        )
                    });
                }
            }
            if matches!(suite, Suite::Reps | Suite::All) {
                for family in FAMILY_NAMES {
                    let fam = build_family(family, &params, *dim, &[])?;
                    let residual = fam.rep.relation_residual(&fam.pres, *window)?;
                    reports.push(if residual <= 1e-12 {
                        CheckReport::pass("relation-residual", family, None)
                    } else {
                        CheckReport::fail(
                            "relation-residual",
                            family,
                            None,
                            format!("residual {residual:e}"),
                        )
                    });
                    let worst = fam
                        .rep
                        .generator_norms()
                        .into_iter()
                        .map(|(_, n)| n)
                        .fold(0.0f64, f64::max);
                    reports.push(if worst <= 1.0 + 1e-12 {
                        CheckReport::pass("generator-norms", family, None)
                    } else {
                        CheckReport::fail(
                            "generator-norms",
                            family,
                            None,
                            format!("norm bound {worst}"),
                        )
                    });
                }
            }
            emit(&cli.out, &serde_json::to_string_pretty(&reports)?)?;
            Ok(all_passed(&reports))
        }
        Cmd::Projector { winding } => {
            let pres = presets::s3(&params)?;
            let conn = StrongConnection::new(&pres)?;
            let e = conn.projector(*winding)?;
            let text = if cli.json {
                e.to_json()
            } else {
                let entries: Vec<Vec<String>> = e
                    .entries
                    .iter()
                    .map(|row| row.iter().map(|f| f.to_text()).collect())
                    .collect();
                serde_json::to_string(&entries)?
            };
            emit(&cli.out, &text)?;
            Ok(true)
        }
        Cmd::Pairing {
            winding,
            dim,
            window,
        } => {
            check_window(*dim, *window)?;
            let pres = presets::s3(&params)?;
            let conn = StrongConnection::new(&pres)?;
            let e = conn.projector(*winding)?;
            let report = chern_pairing(&pres, &e, *dim, *window)?;
            emit(&cli.out, &serde_json::to_string(&report)?)?;
            Ok(report.nearest_int == *winding && report.distance <= 1e-8)
        }
        Cmd::Reps {
            family,
            check,
            dim,
            window,
            phase,
        } => {
            check_window(*dim, *window)?;
            let fam = build_family(family, &params, *dim, phase)?;
            let residual = if *check {
                Some(fam.rep.relation_residual(&fam.pres, *window)?)
            } else {
                None
            };
            let norms = fam.rep.generator_norms();
            let pass = residual.map_or(true, |r| r <= 1e-12)
                && norms.iter().all(|(_, n)| *n <= 1.0 + 1e-12);
            let doc = RepsDoc {
                family: family.clone(),
                dim: fam.rep.dim,
                window: *window,
                generator_norms: norms,
                residual,
                pass,
            };
            emit(&cli.out, &serde_json::to_string(&doc)?)?;
            Ok(pass)
        }
    }
}

fn check_window(dim: usize, window: usize) -> Result<(), qhopf::Error> {
    if window < 2 || window >= dim {
        return Err(qhopf::Error::WindowTooLarge(format!(
            "need N > M >= 2, got N = {dim}, M = {window}"
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
