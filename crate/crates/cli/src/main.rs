//! `nzeta`: closed-form Nielsen zeta functions, twisted-conjugacy
//! enumeration and asymptotic counting fits from the command line.
//!
//! Exit codes are a stable contract:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | verification mismatch or failed cross-check |
//! | 2 | bad command line |
//! | 3 | document or sample parse error |
//! | 4 | descriptor invariant violation or invalid argument |
//! | 5 | fit failure |
//! | 6 | no closed form found within the degree bound |
//! | 7 | I/O failure |

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nielsen_zeta::asymptotics::{self, AsymptoticExpansion};
use nielsen_zeta::corpus;
use nielsen_zeta::document::{parse_descriptor, EndomorphismDocument, RadicalDocument};
use nielsen_zeta::radical::Polynomial;
use nielsen_zeta::twisted::{self, FreeEndomorphism, GroupWord, MappingTorus, TwistedSearch};
use nielsen_zeta::zeta::{exp_sum_series, verify_closed_form, zeta_with};
use nielsen_zeta::{Error, MapDescriptor, Rational, ZetaOptions};

#[derive(Parser)]
#[command(name = "nzeta", version, about = "Exact Nielsen zeta functions and related counts")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Closed form of the Nielsen zeta function of a descriptor document.
    Zeta(ZetaArgs),
    /// Check the closed form against the defining exponential sum.
    Verify(VerifyArgs),
    /// List N(f^n) for n = 1..n_max.
    Nielsen(NielsenArgs),
    /// Bounded twisted-conjugacy searches in free groups.
    #[command(subcommand)]
    Twisted(TwistedCommand),
    /// Asymptotic counting expansion e^{hx} x^{-3/2} Σ C_n x^{-n/2}.
    #[command(subcommand)]
    Asym(AsymCommand),
}

#[derive(Args)]
struct Input {
    /// Descriptor document (JSON); `-` reads standard input.
    input: PathBuf,
}

#[derive(Args)]
struct ZetaArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = nielsen_zeta::DEFAULT_ORDER)]
    order: usize,
    #[arg(long, default_value_t = 8)]
    max_den_degree: usize,
    /// Also print the series coefficients up to z^order.
    #[arg(long)]
    series: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = nielsen_zeta::DEFAULT_ORDER)]
    order: usize,
    #[arg(long, default_value_t = 8)]
    max_den_degree: usize,
    /// Multiply the closed form by (1 + z) before checking (fault injection).
    #[arg(long, hide = true)]
    debug_corrupt: bool,
}

#[derive(Args)]
struct NielsenArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 10)]
    n_max: usize,
}

#[derive(Args)]
struct Endomorphism {
    /// Images of the generators, e.g. "a -> a b, b -> a".
    #[arg(long, conflicts_with = "endomorphism")]
    phi: Option<String>,
    /// Inverse automorphism, needed for mapping-torus searches.
    #[arg(long, requires = "phi")]
    phi_inv: Option<String>,
    /// Endomorphism document instead of --phi / --phi-inv.
    #[arg(long)]
    endomorphism: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TwistedCommand {
    /// Is y = γ x φ(γ)^-1 for some |γ| <= bound?
    Check {
        #[command(flatten)]
        map: Endomorphism,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// Cell counts of the bounded twisted-conjugacy relation per word length.
    Classes {
        #[command(flatten)]
        map: Endomorphism,
        #[arg(long, default_value_t = 4)]
        length: usize,
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// Cross-check twisted conjugacy against conjugacy in the mapping torus.
    #[command(name = "lemma8")]
    Crosscheck {
        #[command(flatten)]
        map: Endomorphism,
        #[arg(long, default_value_t = 5)]
        length: usize,
        #[arg(long, default_value_t = 5)]
        bound: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = corpus::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args)]
struct Expansion {
    #[arg(long, default_value_t = asymptotics::DEFAULT_ENTROPY)]
    h: f64,
    /// C_0,C_1,...,C_N
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    coeffs: Vec<f64>,
}

#[derive(Subcommand)]
enum AsymCommand {
    /// Evaluate the expansion at the given points.
    Eval {
        #[command(flatten)]
        expansion: Expansion,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
    },
    /// Least-squares fit of C_0..C_N to a two-column sample file.
    Fit {
        samples: PathBuf,
        #[arg(long, default_value_t = asymptotics::DEFAULT_ENTROPY)]
        h: f64,
        /// Highest coefficient index N.
        #[arg(long, default_value_t = 2)]
        terms: usize,
        /// Fix the odd coefficients at zero.
        #[arg(long)]
        odd_zero: bool,
        /// Also write the (x, observed, predicted, ratio) table here.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Ratio of the samples to the leading term.
    Ratio {
        samples: PathBuf,
        #[command(flatten)]
        expansion: Expansion,
    },
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) => 3,
            Error::Fit(_) => 5,
            Error::ReconstructionFailed { .. } => 6,
            _ => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

fn io_failure(what: &str, e: io::Error) -> Failure {
    Failure {
        code: 7,
        message: format!("{what}: {e}"),
    }
}

/// Rendered report plus the exit code to finish with.
struct Report {
    body: String,
    code: u8,
}

impl Report {
    fn ok(body: String) -> Self {
        Report { body, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|report| {
        emit(&cli, &report.body)?;
        Ok(report.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("nzeta: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(cli: &Cli, body: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => fs::write(path, body).map_err(|e| io_failure(&path.display().to_string(), e)),
        None => io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| io_failure("stdout", e)),
    }
}

fn read_text(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| io_failure("stdin", e))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| io_failure(&path.display().to_string(), e))
}

fn read_descriptor(input: &Input) -> Result<MapDescriptor, Failure> {
    Ok(parse_descriptor(&read_text(&input.input)?)?)
}

fn machine(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    match &cli.command {
        Command::Zeta(a) => cmd_zeta(a, cli.format),
        Command::Verify(a) => cmd_verify(a, cli.format),
        Command::Nielsen(a) => cmd_nielsen(a, cli.format),
        Command::Twisted(t) => cmd_twisted(t, cli.format),
        Command::Asym(a) => cmd_asym(a, cli.format),
    }
}

fn zeta_options(order: usize, max_den_degree: usize) -> ZetaOptions {
    ZetaOptions {
        order,
        max_den_degree,
        ..ZetaOptions::default()
    }
}

fn cmd_zeta(a: &ZetaArgs, format: Format) -> Result<Report, Failure> {
    let d = read_descriptor(&a.input)?;
    d.validate(a.order)?;
    let series = if a.series {
        Some(exp_sum_series(&d, a.order)?)
    } else {
        None
    };
    let closed = match zeta_with(&d, &zeta_options(a.order, a.max_den_degree)) {
        Ok(e) => Some(e),
        // the series is still worth reporting when reconstruction gives up
        Err(e @ Error::ReconstructionFailed { .. }) if series.is_some() => {
            eprintln!("nzeta: {e}");
            None
        }
        Err(e) => return Err(e.into()),
    };
    let code = if closed.is_some() { 0 } else { 6 };
    let coeffs: Option<Vec<String>> = series.map(|s| s.coeffs().iter().map(|c| c.to_string()).collect());
    let body = match format {
        Format::Machine => machine(json!({
            "type": "zeta_result",
            "descriptor": d.kind(),
            "order": a.order.to_string(),
            "closed_form": closed.as_ref().map(RadicalDocument::from_expr),
            "series": coeffs,
        })),
        Format::Text => {
            let mut out = String::new();
            match &closed {
                Some(e) => {
                    writeln!(out, "{e}").unwrap();
                    writeln!(out, "rational: {}", if e.is_rational() { "yes" } else { "no" }).unwrap();
                }
                None => writeln!(out, "closed form: not found").unwrap(),
            }
            if let Some(cs) = coeffs {
                writeln!(out, "n,coefficient").unwrap();
                for (n, c) in cs.iter().enumerate() {
                    writeln!(out, "{n},{c}").unwrap();
                }
            }
            out
        }
    };
    Ok(Report { body, code })
}

fn cmd_verify(a: &VerifyArgs, format: Format) -> Result<Report, Failure> {
    let d = read_descriptor(&a.input)?;
    let opts = zeta_options(a.order.max(nielsen_zeta::DEFAULT_ORDER), a.max_den_degree);
    let mut closed = zeta_with(&d, &opts)?;
    if a.debug_corrupt {
        closed = closed.mul(&nielsen_zeta::RadicalExpr::factor(
            Polynomial::from_i64s(&[1, 1]),
            Rational::from_integer(1.into()),
        ));
    }
    let report = verify_closed_form(&closed, &d, a.order)?;
    let code = if report.agrees() { 0 } else { 1 };
    let body = match format {
        Format::Machine => machine(json!({
            "type": "verify_report",
            "order": a.order.to_string(),
            "agrees": report.agrees(),
            "first_mismatch": report.first_mismatch.map(|i| i.to_string()),
            "closed_form": RadicalDocument::from_expr(&closed),
        })),
        Format::Text => match report.first_mismatch {
            None => format!("{closed}\nagrees to order {}\n", a.order),
            Some(i) => format!("{closed}\nmismatch at index {i}\n"),
        },
    };
    Ok(Report { body, code })
}

fn cmd_nielsen(a: &NielsenArgs, format: Format) -> Result<Report, Failure> {
    let d = read_descriptor(&a.input)?;
    d.validate(a.n_max)?;
    let seq = d.nielsen_sequence(a.n_max)?;
    let body = match format {
        Format::Machine => machine(json!({
            "type": "nielsen_sequence",
            "descriptor": d.kind(),
            "values": seq.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })),
        Format::Text => {
            let mut out = String::from("n,nielsen\n");
            for (i, v) in seq.iter().enumerate() {
                writeln!(out, "{},{v}", i + 1).unwrap();
            }
            out
        }
    };
    Ok(Report::ok(body))
}

fn load_torus(map: &Endomorphism) -> Result<MappingTorus, Failure> {
    if let Some(path) = &map.endomorphism {
        return Ok(EndomorphismDocument::from_json(&read_text(path)?)?.to_torus()?);
    }
    let Some(phi) = &map.phi else {
        return Err(Failure {
            code: 2,
            message: "one of --phi or --endomorphism is required".into(),
        });
    };
    let phi: FreeEndomorphism = phi.parse()?;
    Ok(match &map.phi_inv {
        Some(inv) => MappingTorus::with_inverse(phi, inv.parse()?)?,
        None => MappingTorus::new(phi),
    })
}

fn parse_word(s: &str, torus: &MappingTorus) -> Result<GroupWord, Failure> {
    let w: GroupWord = s.parse()?;
    torus.phi().check_word(&w)?;
    Ok(w)
}

fn cmd_twisted(t: &TwistedCommand, format: Format) -> Result<Report, Failure> {
    match t {
        TwistedCommand::Check { map, x, y, bound } => {
            let torus = load_torus(map)?;
            let (x, y) = (parse_word(x, &torus)?, parse_word(y, &torus)?);
            let found = twisted::are_twisted_conjugate_bounded(&x, &y, torus.phi(), *bound)?;
            let body = match format {
                Format::Machine => machine(json!({
                    "type": "twisted_check",
                    "x": x.to_string(),
                    "y": y.to_string(),
                    "bound": bound.to_string(),
                    "result": if found.witness().is_some() { "yes" } else { "unknown" },
                    "witness": found.witness().map(|g| g.to_string()),
                })),
                Format::Text => match &found {
                    TwistedSearch::Yes(g) => format!("yes\nwitness: {g}\n"),
                    TwistedSearch::Unknown => format!("unknown (no witness of length <= {bound})\n"),
                },
            };
            Ok(Report::ok(body))
        }
        TwistedCommand::Classes { map, length, bound } => {
            let torus = load_torus(map)?;
            let report = twisted::class_count_lower_bound(torus.phi(), *length, *bound)?;
            let body = match format {
                Format::Machine => machine(json!({
                    "type": "class_counts",
                    "norm": report.norm,
                    "bound": report.bound.to_string(),
                    "rows": report.rows.iter().map(|r| json!({
                        "length": r.length.to_string(),
                        "words": r.words.to_string(),
                        "cells": r.cells.to_string(),
                        "unknown_fraction": r.unknown_fraction,
                    })).collect::<Vec<_>>(),
                })),
                Format::Text => {
                    let mut out = format!("# norm: {} (proxy), conjugator bound {}\n", report.norm, report.bound);
                    out.push_str("length,words,cells,unknown_fraction\n");
                    for r in &report.rows {
                        writeln!(out, "{},{},{},{:.6}", r.length, r.words, r.cells, r.unknown_fraction).unwrap();
                    }
                    out
                }
            };
            Ok(Report::ok(body))
        }
        TwistedCommand::Crosscheck {
            map,
            length,
            bound,
            samples,
            seed,
        } => {
            let torus = load_torus(map)?;
            let mut rng = corpus::rng(*seed);
            let rank = torus.phi().rank();
            let mut rows = Vec::with_capacity(2 * samples);
            for _ in 0..*samples {
                let x = corpus::word(&mut rng, rank, *length);
                let partners = [torus.phi().apply(&x), corpus::word(&mut rng, rank, *length)];
                for y in partners {
                    rows.push(twisted::torus_crosscheck(&x, &y, &torus, *bound)?);
                }
            }
            let agreeing = rows.iter().filter(|r| r.agrees()).count();
            let code = if agreeing == rows.len() { 0 } else { 1 };
            let show = |o: Option<&GroupWord>| o.map(|g| g.to_string()).unwrap_or_else(|| "-".into());
            let body = match format {
                Format::Machine => machine(json!({
                    "type": "torus_crosscheck",
                    "bound": bound.to_string(),
                    "cases": rows.len().to_string(),
                    "agreeing": agreeing.to_string(),
                    "rows": rows.iter().map(|r| json!({
                        "x": r.x.to_string(),
                        "y": r.y.to_string(),
                        "twisted_witness": r.twisted.witness().map(|g| g.to_string()),
                        "torus_conjugator": r.torus.as_ref().map(|g| format!("{} z^{}", g.w, g.t)),
                        "agrees": r.agrees(),
                    })).collect::<Vec<_>>(),
                })),
                Format::Text => {
                    let mut out = String::from("x,y,twisted_witness,torus_conjugator,agrees\n");
                    for r in &rows {
                        let conj = r.torus.as_ref().map(|g| format!("{} z^{}", g.w, g.t));
                        writeln!(
                            out,
                            "{},{},{},{},{}",
                            r.x,
                            r.y,
                            show(r.twisted.witness()),
                            conj.unwrap_or_else(|| "-".into()),
                            r.agrees()
                        )
                        .unwrap();
                    }
                    writeln!(out, "# agreement: {agreeing}/{}", rows.len()).unwrap();
                    out
                }
            };
            Ok(Report { body, code })
        }
    }
}

fn expansion(e: &Expansion) -> Result<AsymptoticExpansion, Failure> {
    Ok(AsymptoticExpansion::new(e.h, e.coeffs.clone())?)
}

fn load_samples(path: &PathBuf) -> Result<Vec<asymptotics::CountSample>, Failure> {
    Ok(asymptotics::parse_samples(&read_text(path)?)?)
}

fn cmd_asym(a: &AsymCommand, format: Format) -> Result<Report, Failure> {
    match a {
        AsymCommand::Eval { expansion: ex, x } => {
            let e = expansion(ex)?;
            let values = x.iter().map(|&x| e.eval(x)).collect::<Result<Vec<_>, _>>()?;
            let body = match format {
                Format::Machine => machine(json!({
                    "type": "asym_eval",
                    "h": e.h,
                    "coeffs": e.coeffs,
                    "points": x.iter().zip(&values).map(|(x, v)| json!({"x": x, "value": v})).collect::<Vec<_>>(),
                })),
                Format::Text => {
                    let mut out = String::from("x,value\n");
                    for (x, v) in x.iter().zip(&values) {
                        writeln!(out, "{x},{v}").unwrap();
                    }
                    out
                }
            };
            Ok(Report::ok(body))
        }
        AsymCommand::Fit {
            samples,
            h,
            terms,
            odd_zero,
            table,
        } => {
            let data = load_samples(samples)?;
            let fit = asymptotics::fit_expansion(&data, *h, *terms, *odd_zero)?;
            if let Some(path) = table {
                let mut csv = String::from("x,observed,predicted,ratio\n");
                for s in &data {
                    let predicted = fit.expansion.eval(s.x)?;
                    let ratio = s.count / fit.expansion.leading_term(s.x)?;
                    writeln!(csv, "{},{},{},{}", s.x, s.count, predicted, ratio).unwrap();
                }
                fs::write(path, csv).map_err(|e| io_failure(&path.display().to_string(), e))?;
            }
            let body = match format {
                Format::Machine => machine(json!({
                    "type": "asym_fit",
                    "h": fit.expansion.h,
                    "coeffs": fit.expansion.coeffs,
                    "odd_zero": odd_zero,
                    "max_relative_residual": fit.max_relative_residual,
                })),
                Format::Text => format!(
                    "{}max_relative_residual = {:.3e}\n",
                    fit.expansion, fit.max_relative_residual
                ),
            };
            Ok(Report::ok(body))
        }
        AsymCommand::Ratio {
            samples,
            expansion: ex,
        } => {
            let e = expansion(ex)?;
            let data = load_samples(samples)?;
            let report = asymptotics::leading_ratio(&e, &data)?;
            let bound_applies = e.odd_zero();
            let body = match format {
                Format::Machine => machine(json!({
                    "type": "asym_ratio",
                    "non_conforming": report.non_conforming,
                    "rows": data.iter().zip(&report.ratios).map(|(s, r)| json!({
                        "x": s.x,
                        "ratio": r,
                        "bound": if bound_applies { Some(e.ratio_bound(s.x)) } else { None },
                    })).collect::<Vec<_>>(),
                })),
                Format::Text => {
                    let mut out = String::from("x,ratio,bound\n");
                    for (s, r) in data.iter().zip(&report.ratios) {
                        let bound = if bound_applies {
                            e.ratio_bound(s.x).to_string()
                        } else {
                            "-".into()
                        };
                        writeln!(out, "{},{r},{bound}", s.x).unwrap();
                    }
                    if report.non_conforming {
                        out.push_str("# non-conforming: some ratios are zero or not finite\n");
                    }
                    out
                }
            };
            Ok(Report::ok(body))
        }
    }
}
