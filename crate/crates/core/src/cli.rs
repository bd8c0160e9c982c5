//! The `ffbundle` command line.
//!
//! Exit status: 0 on success or a true predicate, 1 on a false predicate or a
//! failed verification, 2 on usage and parse errors, 3 when an input violates a
//! precondition (the violated condition is named on stderr).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bundle::HNBundle;
use crate::criteria::{is_quotient, is_subbundle, slopewise_dominates};
use crate::degeneration::{degeneration_trace, normalize_triple, reduced_condition_failures};
use crate::degree::{c_value, dim_hom, StratumReport};
use crate::error::Error;
use crate::rational::Rational;
use crate::render::render_svg;
use crate::serde_int::to_json;
use crate::verify::{self, UniverseSpec, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "ffbundle",
    version,
    about = "Exact HN-polygon calculus for bundles on the Fargues-Fontaine curve"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Is E a subbundle of F?
    CheckSub {
        #[arg(allow_hyphen_values = true)]
        e: String,
        #[arg(allow_hyphen_values = true)]
        f: String,
    },
    /// Does F slopewise dominate E?
    CheckDominate {
        #[arg(allow_hyphen_values = true)]
        e: String,
        #[arg(allow_hyphen_values = true)]
        f: String,
    },
    /// Is Q a quotient of E?
    CheckQuotient {
        #[arg(allow_hyphen_values = true)]
        q: String,
        #[arg(allow_hyphen_values = true)]
        e: String,
    },
    /// dim Hom(E, F), and the stratum dimension and c when Q is given.
    Dims {
        #[arg(allow_hyphen_values = true)]
        e: String,
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        q: Option<String>,
    },
    /// The codimension invariant c_{E,F}(Q).
    C {
        #[arg(allow_hyphen_values = true)]
        e: String,
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        q: String,
    },
    /// The degenerating sequence of a reduced triple.
    Trace {
        #[arg(allow_hyphen_values = true)]
        e: String,
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        q: String,
        /// Stretch, twist and peel the triple into reduced form first.
        #[arg(long)]
        normalize: bool,
    },
    /// Candidate images Q of maps E -> F (necessary conditions only).
    Images {
        #[arg(allow_hyphen_values = true)]
        e: String,
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// List every bundle of a universe.
    Enumerate {
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// Machine-check a property over a universe.
    Verify {
        #[arg(value_enum, default_value_t = Property::All)]
        property: Property,
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// Draw HN polygons as SVG.
    Render {
        /// Output file; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(allow_hyphen_values = true)]
        bundles: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Property {
    All,
    Equivalence,
    Oracles,
    KeyInequality,
    Degeneration,
    Stratification,
    Invariance,
    RoundTrip,
}

#[derive(Args, Debug, Default)]
struct UniverseArgs {
    #[arg(long)]
    max_rank: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    slope_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    slope_max: Option<String>,
    #[arg(long)]
    max_den: Option<u32>,
    /// Check this many seeded random tuples instead of all of them.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leave the zero bundle out of the universe.
    #[arg(long)]
    no_zero: bool,
}

impl UniverseArgs {
    fn apply(&self, mut base: UniverseSpec) -> Result<UniverseSpec, Failure> {
        if let Some(r) = self.max_rank {
            base.max_rank = r;
        }
        if let Some(s) = &self.slope_min {
            base.slope_min = parse_rational(s)?;
        }
        if let Some(s) = &self.slope_max {
            base.slope_max = parse_rational(s)?;
        }
        if let Some(d) = self.max_den {
            if d == 0 {
                return Err(Failure::usage("--max-den must be positive"));
            }
            base.max_denominator = d;
        }
        base.sample_limit = self.samples;
        base.seed = self.seed;
        base.include_zero = !self.no_zero;
        Ok(base)
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => EXIT_USAGE,
            Error::Condition(_)
            | Error::Precondition(_)
            | Error::UndefinedInput(_)
            | Error::Unsupported(_) => EXIT_PRECONDITION,
            Error::Internal(_) => EXIT_FALSE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn parse_bundle(s: &str) -> Result<HNBundle, Failure> {
    s.parse::<HNBundle>()
        .map_err(|e| Failure::usage(format!("cannot parse bundle {s:?}: {e}")))
}

fn parse_rational(s: &str) -> Result<Rational, Failure> {
    s.parse::<Rational>()
        .map_err(|e| Failure::usage(format!("cannot parse slope {s:?}: {e}")))
}

/// Runs the command line `args` (program name first), writing results to `out`
/// and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(
    out: &mut dyn Write,
    format: Format,
    text: &str,
    value: serde_json::Value,
) -> Result<(), Failure> {
    let res = match format {
        Format::Text => writeln!(out, "{text}"),
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&value).expect("json values serialize")
        ),
    };
    res.map_err(|e| Failure {
        code: EXIT_FALSE,
        message: format!("cannot write output: {e}"),
    })
}

fn predicate(out: &mut dyn Write, format: Format, value: bool) -> Result<i32, Failure> {
    emit(out, format, &value.to_string(), json!(value))?;
    Ok(if value { EXIT_OK } else { EXIT_FALSE })
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let format = cli.format;
    match cli.command {
        Command::CheckSub { e, f } => {
            let (e, f) = (parse_bundle(&e)?, parse_bundle(&f)?);
            predicate(out, format, is_subbundle(&e, &f))
        }
        Command::CheckDominate { e, f } => {
            let (e, f) = (parse_bundle(&e)?, parse_bundle(&f)?);
            predicate(out, format, slopewise_dominates(&f, &e))
        }
        Command::CheckQuotient { q, e } => {
            let (q, e) = (parse_bundle(&q)?, parse_bundle(&e)?);
            predicate(out, format, is_quotient(&q, &e))
        }
        Command::Dims { e, f, q } => {
            let (e, f) = (parse_bundle(&e)?, parse_bundle(&f)?);
            let q = q.as_deref().map(parse_bundle).transpose()?;
            let hom = dim_hom(&e, &f);
            let mut text = format!("dim Hom = {hom}");
            let mut value = json!({ "dim_hom": to_json(&hom) });
            if let Some(q) = q {
                let report = StratumReport::new(&e, &f, &q)?;
                text.push_str(&format!(
                    "\nstratum dimension = {}\nc = {}",
                    report.stratum_dimension, report.c_value
                ));
                value["stratum"] = serde_json::to_value(&report).expect("reports serialize");
            }
            emit(out, format, &text, value)?;
            Ok(EXIT_OK)
        }
        Command::C { e, f, q } => {
            let (e, f, q) = (parse_bundle(&e)?, parse_bundle(&f)?, parse_bundle(&q)?);
            let c = c_value(&e, &f, &q);
            emit(out, format, &c.to_string(), json!({ "c": to_json(&c) }))?;
            Ok(EXIT_OK)
        }
        Command::Trace { e, f, q, normalize } => {
            let (e, f, q) = (parse_bundle(&e)?, parse_bundle(&f)?, parse_bundle(&q)?);
            trace(out, format, &e, &f, &q, normalize)
        }
        Command::Images { e, f, universe } => {
            let (e, f) = (parse_bundle(&e)?, parse_bundle(&f)?);
            images(out, format, &e, &f, &universe)
        }
        Command::Enumerate { universe } => {
            let spec = universe.apply(UniverseSpec::desk_pairs())?;
            let all = verify::enumerate_bundles(&spec);
            let text: Vec<String> = all.iter().map(ToString::to_string).collect();
            emit(
                out,
                format,
                &text.join("\n"),
                serde_json::to_value(&all).expect("bundles serialize"),
            )?;
            Ok(EXIT_OK)
        }
        Command::Verify { property, universe } => run_verify(out, format, property, &universe),
        Command::Render { output, bundles } => {
            let bundles = bundles
                .iter()
                .map(|s| parse_bundle(s))
                .collect::<Result<Vec<_>, _>>()?;
            let svg = render_svg(&bundles)?;
            match output {
                Some(path) => std::fs::write(&path, svg).map_err(|e| Failure {
                    code: EXIT_FALSE,
                    message: format!("cannot write {}: {e}", path.display()),
                })?,
                None => out.write_all(svg.as_bytes()).map_err(|e| Failure {
                    code: EXIT_FALSE,
                    message: format!("cannot write output: {e}"),
                })?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn trace(
    out: &mut dyn Write,
    format: Format,
    e: &HNBundle,
    f: &HNBundle,
    q: &HNBundle,
    normalize: bool,
) -> Result<i32, Failure> {
    let (normalized, (e, f, q)) = if normalize && !reduced_condition_failures(e, f, q).is_empty() {
        let n = normalize_triple(e, f, q)?;
        let triple = (n.e.clone(), n.f.clone(), n.q.clone());
        (Some(n), triple)
    } else {
        (None, (e.clone(), f.clone(), q.clone()))
    };
    let t = degeneration_trace(&e, &f, &q)?;
    let mut text = String::new();
    if let Some(n) = &normalized {
        text.push_str(&format!("normalized to E = {e}, F = {f}, Q = {q}\n"));
        let c_orig = n.original_c(&t.c_values[0]);
        text.push_str(&format!("original c = {c_orig}\n"));
    }
    text.push_str("i\tE_i\tc\n");
    for (i, (bundle, c)) in t.chain.iter().zip(&t.c_values).enumerate() {
        text.push_str(&format!("{i}\t{bundle}\t{c}\n"));
    }
    text.push_str(&format!("r = {}", t.terminated_at));
    let mut value = serde_json::to_value(&t).expect("traces serialize");
    if let Some(n) = &normalized {
        value["normalization"] = serde_json::to_value(n).expect("transcripts serialize");
    }
    emit(out, format, &text, value)?;
    Ok(EXIT_OK)
}

/// Every candidate image has slopes in `[μ_min(E), μ_max(F)]`, denominators at
/// most `rk E`, and rank at most `rk E`; that box is the default universe.
fn images(
    out: &mut dyn Write,
    format: Format,
    e: &HNBundle,
    f: &HNBundle,
    args: &UniverseArgs,
) -> Result<i32, Failure> {
    let rank: u32 = u32::try_from(e.rank())
        .map_err(|_| Failure::from(Error::Unsupported("rank too large".into())))?;
    let mut base = UniverseSpec::new(rank, 0, 0, rank.max(1));
    if let (Ok(lo), Ok(hi)) = (e.mu_min(), f.mu_max()) {
        base.slope_min = lo.clone();
        base.slope_max = hi.clone();
    } else {
        base.max_rank = 0;
    }
    let spec = args.apply(base)?;
    let mut reports = Vec::new();
    for q in verify::enumerate_candidate_images(e, f, &spec) {
        reports.push(StratumReport::new(e, f, &q)?);
    }
    let hom = dim_hom(e, f);
    let mut text =
        format!("candidate images (necessary conditions only), dim Hom = {hom}\nQ\tstratum\tc");
    for r in &reports {
        text.push_str(&format!(
            "\n{}\t{}\t{}",
            r.image, r.stratum_dimension, r.c_value
        ));
    }
    let value = json!({
        "necessary_only": true,
        "dim_hom": to_json(&hom),
        "images": reports,
    });
    emit(out, format, &text, value)?;
    Ok(EXIT_OK)
}

fn run_verify(
    out: &mut dyn Write,
    format: Format,
    property: Property,
    args: &UniverseArgs,
) -> Result<i32, Failure> {
    let pairs = args.apply(UniverseSpec::desk_pairs())?;
    let triples = args.apply(UniverseSpec::desk_triples())?;
    let invariance_samples = args.samples.unwrap_or(1000);
    let invariance_spec = UniverseSpec {
        sample_limit: None,
        ..pairs.clone()
    };
    let reports: Vec<VerificationReport> = match property {
        Property::All => {
            let mut v = vec![
                verify::verify_equivalence(&pairs),
                verify::verify_oracles(&pairs),
                verify::verify_key_inequality(&triples),
                verify::verify_degeneration(&triples),
                verify::verify_stratification_dimension(&pairs),
                verify::verify_invariance_laws(&invariance_spec, invariance_samples),
            ];
            v.push(verify::verify_round_trip(&pairs));
            v
        }
        Property::Equivalence => vec![verify::verify_equivalence(&pairs)],
        Property::Oracles => vec![verify::verify_oracles(&pairs)],
        Property::KeyInequality => vec![verify::verify_key_inequality(&triples)],
        Property::Degeneration => vec![verify::verify_degeneration(&triples)],
        Property::Stratification => vec![verify::verify_stratification_dimension(&pairs)],
        Property::Invariance => vec![verify::verify_invariance_laws(
            &invariance_spec,
            invariance_samples,
        )],
        Property::RoundTrip => vec![verify::verify_round_trip(&pairs)],
    };
    let mut text = Vec::new();
    for r in &reports {
        text.push(r.summary());
        for c in r.counterexamples.iter().take(20) {
            text.push(format!("  counterexample: {c}"));
        }
        if r.counterexamples.len() > 20 {
            text.push(format!("  ... {} more", r.counterexamples.len() - 20));
        }
        for f in &r.findings {
            text.push(format!("  {f}"));
        }
    }
    emit(
        out,
        format,
        &text.join("\n"),
        serde_json::to_value(&reports).expect("reports serialize"),
    )?;
    Ok(if reports.iter().all(VerificationReport::passed) {
        EXIT_OK
    } else {
        EXIT_FALSE
    })
}

/// Convenience for tests and bindings: run with owned strings and capture output.
pub fn run_captured<S: AsRef<str>>(args: &[S]) -> (i32, String, String) {
    let mut argv = vec!["ffbundle".to_string()];
    argv.extend(args.iter().map(|s| s.as_ref().to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_sub_true() {
        let (code, out, _) = run_captured(&["check-sub", "0", "1,-1"]);
        assert_eq!((code, out.trim()), (0, "true"));
    }

    #[test]
    fn negative_slopes_parse_as_positionals() {
        let (code, out, err) = run_captured(&["check-sub", "-1/2", "1/2"]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(out.trim(), "true");
        let (code, out, _) = run_captured(&["check-sub", "1", "0:1"]);
        assert_eq!((code, out.trim()), (1, "false"));
    }

    #[test]
    fn c_and_trace() {
        let (code, out, _) = run_captured(&["c", "0:1,-2", "1,-1", "-1"]);
        assert_eq!((code, out.trim()), (0, "2"));
        let (code, out, _) = run_captured(&["trace", "0:1,-2", "1,-1", "-1", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["chain"].as_array().unwrap().len(), 3);
        assert_eq!(v["c"], json!([2, 1, 0]));
    }

    #[test]
    fn trace_names_failed_condition() {
        let (code, _, err) = run_captured(&["trace", "0:1,-1", "1,-1", "-1"]);
        assert_eq!(code, 3);
        assert!(err.contains("condition (iv)"), "{err}");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_captured(&["check-sub", "1/0", "1"]).0, 2);
        assert_eq!(run_captured(&["frobnicate"]).0, 2);
        assert_eq!(run_captured(&["check-sub", "1"]).0, 2);
    }
}
