use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use selfpure::corpus::{crosscheck_instance, generate, run_crosscheck, summarize, CorpusSpec, Shape};
use selfpure::decide::decide_spg;
use selfpure::exlab::{build_truncated_pullback, check_example_claims, TruncatedPullback};
use selfpure::groups::Multiplicity;
use selfpure::instance::{parse_instance, print_instance, Instance};
use selfpure::typelat::{Characteristic, TypeHandle};
use selfpure::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_DISAGREE: u8 = 3;

#[derive(Parser)]
#[command(name = "selfpure", version, about = "Decide the self-pure-generator property for torsion-free abelian groups")]
struct Cli {
    /// Emit JSON instead of plain text where both are available.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice calculator on characteristics and types.
    Type {
        op: TypeOp,
        /// Characteristics such as `char(left=inf, right=0;)`.
        #[arg(required = true, num_args = 1..=2)]
        args: Vec<String>,
    },
    /// Decide one or more instances read from a file or stdin.
    Decide {
        /// Input file; `-` or absent reads stdin.
        input: Option<String>,
    },
    /// Compare the decision procedures with independent checks over a corpus.
    Crosscheck {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Element search bound; defaults to a per-instance bound.
        #[arg(long)]
        bound: Option<u64>,
        /// Check instances from this file instead of generating a corpus.
        #[arg(long)]
        input: Option<String>,
        /// Print only the summary line.
        #[arg(long)]
        summary_only: bool,
    },
    /// Finite-precision checks on the pullback example family.
    Exlab {
        /// Family indices to model.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
        k: Vec<i64>,
        #[arg(long, default_value_t = 8)]
        precision: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Bound on numerators and denominators of enumerated coordinates.
        #[arg(long, default_value_t = 50)]
        denominator_bound: u64,
        /// Use the q-adic digits of this fraction instead of seeded digits.
        #[arg(long, allow_hyphen_values = true)]
        rational: Option<String>,
        /// Also check the claims about the truncation of width m.
        #[arg(long)]
        claims: Option<u32>,
    },
    /// Print a seeded random corpus as JSON lines.
    Gen {
        #[command(flatten)]
        corpus: CorpusArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TypeOp {
    Le,
    Lt,
    Inf,
    Sup,
    Idempotent,
    Equiv,
    Canon,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, value_enum, default_value = "cd")]
    shape: ShapeArg,
    /// Half-width of the prime window carrying exceptions.
    #[arg(long, default_value_t = 3)]
    window: i64,
    #[arg(long, default_value_t = 4)]
    max_summands: usize,
    #[arg(long, default_value_t = 5)]
    max_exponent: u64,
    #[arg(long, value_delimiter = ',', default_value = "1,2,omega")]
    multiplicities: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Cd,
    Product,
    Mixed,
}

impl CorpusArgs {
    fn spec(&self) -> Result<CorpusSpec, Error> {
        let multiplicity_menu = self
            .multiplicities
            .iter()
            .map(|m| m.parse::<Multiplicity>())
            .collect::<Result<Vec<_>, _>>()?;
        let spec = CorpusSpec {
            seed: self.seed,
            count: self.count,
            max_summands: self.max_summands,
            window_half_width: self.window,
            max_exponent: self.max_exponent,
            multiplicity_menu,
            shape: match self.shape {
                ShapeArg::Cd => Shape::Cd,
                ShapeArg::Product => Shape::Product,
                ShapeArg::Mixed => Shape::Mixed,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn error_json(f: &Failure) -> (u8, Value) {
    match f {
        Failure::Usage(m) => (EXIT_USAGE, json!({ "error": { "kind": "usage", "message": m } })),
        Failure::Lib(e) => {
            let (code, kind) = match e {
                Error::Parse { .. } | Error::Json(_) => (EXIT_USAGE, "parse"),
                Error::Unsupported(_) | Error::OutOfRange(_) => (EXIT_USAGE, "unsupported"),
                Error::Invalid(_) => (EXIT_INVALID, "invalid"),
                Error::NotMember(_) | Error::ZeroElement => (EXIT_INVALID, "element"),
            };
            let mut body = json!({ "kind": kind, "message": e.to_string() });
            if let Error::Parse { line, column, .. } = e {
                body["line"] = json!(line);
                body["column"] = json!(column);
            }
            if let Error::Invalid(v) = e {
                body["violations"] = json!(v.iter().map(ToString::to_string).collect::<Vec<_>>());
            }
            (code, json!({ "error": body }))
        }
    }
}

fn read_input(path: Option<&str>) -> io::Result<String> {
    match path {
        None | Some("-") => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
        Some(p) => std::fs::read_to_string(p),
    }
}

/// One instance per JSON value; documents may be pretty-printed or one per
/// line. Error positions refer to the whole input.
fn parse_instances(text: &str) -> Result<Vec<Instance>, Error> {
    let mut out = Vec::new();
    let mut stream = serde_json::Deserializer::from_str(text).into_iter::<Value>();
    let mut start = 0;
    while let Some(item) = stream.next() {
        let end = stream.byte_offset();
        let shift = text[..start].matches('\n').count();
        let slice = &text[start..end];
        let lead = slice.len() - slice.trim_start().len();
        let shift = shift + slice[..lead].matches('\n').count();
        let relocate = |e: Error| match e {
            Error::Parse { line, column, reason } => Error::Parse {
                line: line + shift,
                column,
                reason,
            },
            other => other,
        };
        if let Err(e) = item {
            return Err(Error::Parse {
                line: e.line(),
                column: e.column(),
                reason: e.to_string(),
            });
        }
        out.push(parse_instance(slice.trim_start()).map_err(relocate)?);
        start = end;
    }
    Ok(out)
}

fn type_arg(s: &str) -> Result<Characteristic, Error> {
    s.parse()
}

fn cmd_type(op: TypeOp, args: &[String], as_json: bool, out: &mut impl Write) -> Result<u8, Failure> {
    let chars = args.iter().map(|a| type_arg(a)).collect::<Result<Vec<_>, _>>()?;
    let types: Vec<TypeHandle> = chars.iter().map(TypeHandle::of).collect();
    let binary = matches!(op, TypeOp::Le | TypeOp::Lt | TypeOp::Inf | TypeOp::Sup | TypeOp::Equiv);
    if binary != (types.len() == 2) {
        return Err(Failure::Usage(format!(
            "this operation takes {} argument(s)",
            if binary { 2 } else { 1 }
        )));
    }
    let result = match op {
        TypeOp::Le => json!(types[0].le(&types[1])),
        TypeOp::Lt => json!(types[0].lt(&types[1])),
        TypeOp::Inf => json!(types[0].inf(&types[1]).to_string()),
        TypeOp::Sup => json!(types[0].sup(&types[1]).to_string()),
        TypeOp::Equiv => json!(chars[0].equivalent(&chars[1])),
        TypeOp::Idempotent => json!(types[0].is_idempotent()),
        TypeOp::Canon => json!(types[0].to_string()),
    };
    if as_json {
        let name = op.to_possible_value().map(|p| p.get_name().to_string());
        writeln!(out, "{}", json!({ "op": name, "args": args, "result": result }))?;
    } else {
        match result {
            Value::String(s) => writeln!(out, "{s}")?,
            other => writeln!(out, "{other}")?,
        }
    }
    Ok(0)
}

fn cmd_decide(input: Option<&str>, out: &mut impl Write) -> Result<u8, Failure> {
    let text = read_input(input)?;
    let instances = parse_instances(&text)?;
    if instances.is_empty() {
        return Err(Failure::Usage("no instance in the input".into()));
    }
    for inst in &instances {
        let verdict = decide_spg(&inst.descriptor)?;
        writeln!(out, "{}", serde_json::to_string(&verdict).map_err(Error::from)?)?;
    }
    Ok(0)
}

fn cmd_crosscheck(
    corpus: &CorpusArgs,
    bound: Option<u64>,
    input: Option<&str>,
    summary_only: bool,
    out: &mut impl Write,
) -> Result<u8, Failure> {
    let spec = corpus.spec()?;
    let (lines, summary) = match input {
        Some(path) => {
            let instances = parse_instances(&read_input(Some(path))?)?;
            let lines = instances
                .iter()
                .enumerate()
                .map(|(i, inst)| crosscheck_instance(inst, i, bound))
                .collect::<Result<Vec<_>, _>>()?;
            let summary = summarize(&spec, &lines);
            (lines, summary)
        }
        None => run_crosscheck(&spec, bound)?,
    };
    if !summary_only {
        for l in &lines {
            writeln!(out, "{}", serde_json::to_string(l).map_err(Error::from)?)?;
        }
    }
    writeln!(out, "{}", serde_json::to_string(&summary).map_err(Error::from)?)?;
    Ok(if summary.disagreements == 0 { 0 } else { EXIT_DISAGREE })
}

fn parse_fraction(s: &str) -> Result<(i128, i128), Failure> {
    let bad = || Failure::Usage(format!("`{s}` is not a fraction like -1/7"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    Ok((n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?))
}

#[allow(clippy::too_many_arguments)]
fn cmd_exlab(
    ks: &[i64],
    precision: u32,
    seed: u64,
    denominator_bound: u64,
    rational: Option<&str>,
    claims: Option<u32>,
    as_json: bool,
    out: &mut impl Write,
) -> Result<u8, Failure> {
    let mut all_passed = true;
    for &k in ks {
        let model = match rational {
            Some(r) => {
                let (n, d) = parse_fraction(r)?;
                TruncatedPullback::from_rational(k, precision, n, d, denominator_bound)?
            }
            None => build_truncated_pullback(k, precision, seed, denominator_bound)?,
        };
        let report = model.check_homogeneous();
        all_passed &= report.passed;
        if as_json {
            let line = json!({ "model": model, "homogeneity": report });
            writeln!(out, "{line}")?;
        } else {
            writeln!(
                out,
                "k={} q={} N={} D={} digits={:?}: {} (coordinates {}, members {}, max height {}, full-height elements {})",
                report.k,
                report.q,
                report.precision,
                report.denominator_bound,
                report.unit_digits,
                if report.passed { "pass" } else { "FAIL" },
                report.coordinates,
                report.members,
                report.max_height,
                report.full_height_elements,
            )?;
            for (b, a) in &report.full_height_witnesses {
                writeln!(out, "    height {} at ({b}, {a})", report.precision)?;
            }
        }
    }
    if let Some(m) = claims {
        let report = check_example_claims(m)?;
        all_passed &= report.passed;
        if as_json {
            writeln!(out, "{}", json!({ "claims": report }))?;
        } else {
            writeln!(
                out,
                "claims m={}: {} (types {}, quotients {}, hom ladder {}, no rank-1 summand {})",
                report.m,
                if report.passed { "pass" } else { "FAIL" },
                report.element_types_in_family,
                report.quotient_types_generated,
                report.hom_ladder,
                report.no_rank1_summand,
            )?;
        }
    }
    Ok(if all_passed { 0 } else { EXIT_DISAGREE })
}

fn cmd_gen(corpus: &CorpusArgs, out: &mut impl Write) -> Result<u8, Failure> {
    for inst in generate(&corpus.spec()?)? {
        writeln!(out, "{}", print_instance(&inst))?;
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = match &cli.command {
        Command::Type { op, args } => cmd_type(*op, args, cli.json, &mut out),
        Command::Decide { input } => cmd_decide(input.as_deref(), &mut out),
        Command::Crosscheck {
            corpus,
            bound,
            input,
            summary_only,
        } => cmd_crosscheck(corpus, *bound, input.as_deref(), *summary_only, &mut out),
        Command::Exlab {
            k,
            precision,
            seed,
            denominator_bound,
            rational,
            claims,
        } => cmd_exlab(k, *precision, *seed, *denominator_bound, rational.as_deref(), *claims, cli.json, &mut out),
        Command::Gen { corpus } => cmd_gen(corpus, &mut out),
    }?;
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let (code, body) = error_json(&f);
            eprintln!("{body}");
            ExitCode::from(code)
        }
    }
}
