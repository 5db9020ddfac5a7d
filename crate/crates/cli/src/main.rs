//! Batch front-end: every operation reads JSON files and prints one JSON
//! document `{"params": ..., "result": ...}` on stdout.
//!
//! Exit codes: 0 success or verified, 2 a definite negative answer, 3 not
//! enough truncation to decide, 1 usage or parse errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use hahn_mahler::json as codec;
use hahn_mahler::rational::parse_rational;
use hahn_mahler::{
    admissible_valuations, certify_rational, check_equation, combine_bases, decompose, guess_equation, homogenize,
    invert_base, joint_valuation_consistency, lattice_intersection_filter, normalize_leading, padic_witness,
    rescale_to_lattice, shift_equation, solve_equation, solve_laurent, Base, Error, Exponent, JointOutcome,
    MahlerEquation, Rational, RationalScale, Scale, ScaleContext, SolveOutcome, SupportSet, SymbolicScale, Transformed,
    TruncatedHahnSeries, Verdict,
};

#[derive(Parser, Debug)]
#[command(name = "hahn-mahler", version, about = "Exact Hahn series and Mahler equation toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args, Debug)]
struct Opts {
    /// Truncation order for `solve`
    #[arg(long, global = true, default_value = "64")]
    cutoff: String,
    /// Degree bound for `guess` and `certify`
    #[arg(long, global = true, default_value_t = 8)]
    deg_max: usize,
    /// Order bound for `guess`
    #[arg(long, global = true, default_value_t = 2)]
    d_max: usize,
    /// Window N for `witness` and the span used by `combine`
    #[arg(long, global = true, default_value_t = 2)]
    window: u32,
    /// Extra equations demanded beyond the unknown count
    #[arg(long, global = true, default_value_t = 8)]
    margin: usize,
    /// Interval refinement cap for symbolic scales
    #[arg(long, global = true, default_value_t = 64)]
    precision_cap: u32,
    /// Recorded in the header; reserved for randomized instance generation
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Compact single-line output
    #[arg(long, global = true)]
    json: bool,
    /// Also write the document to this path (a directory for `decompose`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Enclosure `lo,hi` of the symbolic scale alpha
    #[arg(long, global = true)]
    alpha_interval: Option<String>,
    /// Enclosure `lo,hi` of the symbolic scale beta
    #[arg(long, global = true)]
    beta_interval: Option<String>,
    /// Declare alpha and beta algebraically independent
    #[arg(long, global = true)]
    assert_independent: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check a truncated series against an equation
    Verify {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        equation: PathBuf,
    },
    /// Propagate a truncated solution from initial terms
    Solve {
        #[arg(long)]
        equation: PathBuf,
        /// Initial terms `[[exp, coeff], ...]`; defaults to `[[0, "1"]]`
        #[arg(long)]
        init: Option<PathBuf>,
        /// Solve the exact linear system instead of greedy propagation
        #[arg(long)]
        laurent: bool,
    },
    Homogenize {
        #[arg(long)]
        equation: PathBuf,
    },
    Normalize {
        #[arg(long)]
        equation: PathBuf,
    },
    InvertBase {
        #[arg(long)]
        equation: PathBuf,
    },
    Shift {
        #[arg(long)]
        equation: PathBuf,
        #[arg(long)]
        by: String,
    },
    /// Split a series into its support classes
    Decompose {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        base: String,
    },
    Rescale {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        base: String,
    },
    /// Equation in base a^n b^m from equations in bases a and b
    Combine {
        #[arg(long)]
        equation: PathBuf,
        #[arg(long)]
        second: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        n: i32,
        #[arg(long, allow_negative_numbers = true)]
        m: i32,
    },
    Guess {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        base: String,
    },
    Certify {
        #[arg(long)]
        series: PathBuf,
    },
    Witness {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        prime: u64,
    },
    Filter {
        /// JSON array of exponents
        #[arg(long)]
        support: PathBuf,
        /// Inline JSON such as `[[1,0],[0,1]]`
        #[arg(long)]
        pairs: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    /// Joint valuation test for two equations in symbolic bases
    Obstruct {
        #[arg(long)]
        equation: PathBuf,
        #[arg(long)]
        second: PathBuf,
    },
    Valuations {
        #[arg(long)]
        equation: PathBuf,
    },
}

const OK: u8 = 0;
const NEGATIVE: u8 = 2;
const INCONCLUSIVE: u8 = 3;

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::WindowTooSmall { .. }
            | Error::AmbiguousContinuation(..)
            | Error::RefinementExhausted { .. }
            | Error::UndecidableMembership(..) => INCONCLUSIVE,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 1, message: msg.into() }
}

type Outcome = Result<(u8, Value), Failure>;

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::Parse { path: format!("{} (line {}, column {})", path.display(), e.line(), e.column()), message: e.to_string() }
            .into()
    })
}

fn rational_arg(s: &str, what: &str) -> Result<Rational, Failure> {
    parse_rational(s).ok_or_else(|| usage(format!("--{what}: `{s}` is not a rational")))
}

fn interval_arg(s: &str, what: &str) -> Result<(Rational, Rational), Failure> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| usage(format!("--{what} expects `lo,hi`")))?;
    Ok((rational_arg(lo.trim(), what)?, rational_arg(hi.trim(), what)?))
}

fn context(opts: &Opts) -> Result<Option<Arc<ScaleContext>>, Failure> {
    let Some(a) = &opts.alpha_interval else {
        if opts.beta_interval.is_some() {
            return Err(usage("--beta-interval needs --alpha-interval"));
        }
        return Ok(None);
    };
    let (lo, hi) = interval_arg(a, "alpha-interval")?;
    let alpha = Scale::Symbolic(SymbolicScale::fixed("alpha", lo, hi)?.into());
    let beta = match &opts.beta_interval {
        Some(b) => {
            let (lo, hi) = interval_arg(b, "beta-interval")?;
            Some(Scale::Symbolic(SymbolicScale::fixed("beta", lo, hi)?.into()))
        }
        None => None,
    };
    let mut ctx = ScaleContext::new(alpha, beta).with_cap(opts.precision_cap);
    if opts.assert_independent {
        ctx = ctx.assert_independent();
    }
    Ok(Some(ctx.shared()))
}

struct Inputs {
    ctx: Option<Arc<ScaleContext>>,
}

impl Inputs {
    fn series(&self, p: &Path) -> Result<TruncatedHahnSeries, Failure> {
        Ok(codec::series_from(&read_json(p)?, &p.display().to_string(), self.ctx.as_ref())?)
    }

    fn equation(&self, p: &Path) -> Result<MahlerEquation, Failure> {
        Ok(codec::equation_from(&read_json(p)?, &p.display().to_string(), self.ctx.as_ref())?)
    }
}

fn base_arg(s: &str) -> Result<RationalScale, Failure> {
    Ok(RationalScale::from_rational(&rational_arg(s, "base")?)?)
}

fn transformed(t: &Transformed) -> Value {
    json!({"equation": codec::equation_to(&t.equation), "witness": codec::exponent_to(&t.witness)})
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Verified(_) => OK,
        Verdict::Refuted { .. } => NEGATIVE,
        Verdict::Inconclusive(_) => INCONCLUSIVE,
    }
}

fn support_value(s: &SupportSet) -> Value {
    Value::Array(s.iter().map(codec::exponent_to).collect())
}

fn run(cmd: &Cmd, opts: &Opts) -> Outcome {
    let io = Inputs { ctx: context(opts)? };
    match cmd {
        Cmd::Verify { series, equation } => {
            let v = check_equation(&io.series(series)?, &io.equation(equation)?)?;
            Ok((verdict_code(&v), codec::verdict_to(&v)))
        }
        Cmd::Solve { equation, init, laurent } => {
            let eq = io.equation(equation)?;
            let seeds = match init {
                Some(p) => codec::seeds_from(&read_json(p)?, &p.display().to_string(), io.ctx.as_ref())?,
                None => vec![(Exponent::zero(), Rational::from_integer(1.into()))],
            };
            let theta = codec::exponent_from(&Value::String(opts.cutoff.clone()), "--cutoff", io.ctx.as_ref())?;
            let out = if *laurent { solve_laurent(&eq, &seeds, &theta)? } else { solve_equation(&eq, &seeds, &theta)? };
            Ok(match out {
                SolveOutcome::Solution(f) => (OK, json!({"solution": codec::series_to(&f)})),
                SolveOutcome::Obstruction { at, reason } => {
                    (NEGATIVE, json!({"obstruction": {"at": codec::exponent_to(&at), "reason": reason.to_string()}}))
                }
            })
        }
        Cmd::Homogenize { equation } => Ok((OK, transformed(&homogenize(&io.equation(equation)?)?))),
        Cmd::Normalize { equation } => {
            let (t, i) = normalize_leading(&io.equation(equation)?)?;
            let mut v = transformed(&t);
            v["dropped"] = json!(i);
            Ok((OK, v))
        }
        Cmd::InvertBase { equation } => Ok((OK, transformed(&invert_base(&io.equation(equation)?)?))),
        Cmd::Shift { equation, by } => {
            let r = Exponent::from_rational(rational_arg(by, "by")?);
            Ok((OK, transformed(&shift_equation(&io.equation(equation)?, &r)?)))
        }
        Cmd::Decompose { series, base } => {
            let parts = decompose(&io.series(series)?, &base_arg(base)?)?;
            let classes: Vec<Value> = parts
                .iter()
                .map(|(c, f)| json!({"representative": codec::exponent_to(&c.representative), "series": codec::series_to(f)}))
                .collect();
            Ok((OK, json!({"classes": classes})))
        }
        Cmd::Rescale { series, base } => {
            let (l, g) = rescale_to_lattice(&io.series(series)?, &base_arg(base)?)?;
            Ok((OK, json!({"l": l.to_string(), "series": codec::series_to(&g)})))
        }
        Cmd::Combine { equation, second, n, m } => {
            let c = combine_bases(&io.equation(equation)?, &io.equation(second)?, *n, *m)?;
            Ok((OK, json!({"equation": codec::equation_to(&c.equation), "l": c.l.to_string()})))
        }
        Cmd::Guess { series, base } => {
            let base = Base::Rational(base_arg(base)?);
            match guess_equation(&io.series(series)?, &base, opts.d_max, opts.deg_max, opts.margin)? {
                Some(eq) => Ok((OK, json!({"equation": codec::equation_to(&eq)}))),
                None => Ok((NEGATIVE, json!({"equation": Value::Null}))),
            }
        }
        Cmd::Certify { series } => match certify_rational(&io.series(series)?, opts.deg_max, opts.margin)? {
            Some(c) => Ok((OK, json!({"certificate": codec::certificate_to(&c)}))),
            None => Ok((NEGATIVE, json!({"certificate": Value::Null}))),
        },
        Cmd::Witness { alpha, beta, prime } => {
            let w = padic_witness(&rational_arg(alpha, "alpha")?, &rational_arg(beta, "beta")?, *prime, opts.window)?;
            Ok(match w {
                Some((n, m)) => (OK, json!({"witness": [n, m]})),
                None => (NEGATIVE, json!({"witness": Value::Null})),
            })
        }
        Cmd::Filter { support, pairs, alpha, beta } => {
            let path = support.display().to_string();
            let raw = read_json(support)?;
            let items = raw.as_array().ok_or_else(|| Failure::from(Error::Parse { path: path.clone(), message: "expected an array".into() }))?;
            let exps = items
                .iter()
                .enumerate()
                .map(|(i, e)| codec::exponent_from(e, &format!("{path}[{i}]"), io.ctx.as_ref()))
                .collect::<Result<Vec<_>, _>>()?;
            let pairs: Vec<(i32, i32)> =
                serde_json::from_str(pairs).map_err(|e| usage(format!("--pairs: {e}")))?;
            let kept = lattice_intersection_filter(
                &SupportSet::new(exps),
                &pairs,
                &rational_arg(alpha, "alpha")?,
                &rational_arg(beta, "beta")?,
            )?;
            Ok((OK, json!({"support": support_value(&kept)})))
        }
        Cmd::Obstruct { equation, second } => {
            let (a, b) = (io.equation(equation)?, io.equation(second)?);
            let constraint = |c: &hahn_mahler::rationality::Constraint| {
                json!({"pair": [c.pair.0, c.pair.1], "coefficient": codec::exponent_to(&c.den), "value": codec::rational_to(&c.num)})
            };
            Ok(match joint_valuation_consistency(&a, Some(&b))? {
                JointOutcome::Infeasible(o) => (
                    NEGATIVE,
                    json!({"infeasible": {
                        "bases": [o.bases.0, o.bases.1],
                        "first": o.first.iter().map(constraint).collect::<Vec<_>>(),
                        "second": o.second.iter().map(constraint).collect::<Vec<_>>(),
                    }}),
                ),
                JointOutcome::Feasible(pairs) => {
                    let list: Vec<Value> = pairs.iter().map(|(x, y)| json!([constraint(x), constraint(y)])).collect();
                    (OK, json!({"feasible": list}))
                }
            })
        }
        Cmd::Valuations { equation } => {
            let s = admissible_valuations(&io.equation(equation)?)?;
            Ok((OK, json!({"valuations": support_value(&s)})))
        }
    }
}

fn command_name(cmd: &Cmd) -> (&'static str, Vec<String>) {
    let p = |x: &PathBuf| x.display().to_string();
    match cmd {
        Cmd::Verify { series, equation } => ("verify", vec![p(series), p(equation)]),
        Cmd::Solve { equation, init, .. } => ("solve", std::iter::once(p(equation)).chain(init.iter().map(p)).collect()),
        Cmd::Homogenize { equation } => ("homogenize", vec![p(equation)]),
        Cmd::Normalize { equation } => ("normalize", vec![p(equation)]),
        Cmd::InvertBase { equation } => ("invert-base", vec![p(equation)]),
        Cmd::Shift { equation, .. } => ("shift", vec![p(equation)]),
        Cmd::Decompose { series, .. } => ("decompose", vec![p(series)]),
        Cmd::Rescale { series, .. } => ("rescale", vec![p(series)]),
        Cmd::Combine { equation, second, .. } => ("combine", vec![p(equation), p(second)]),
        Cmd::Guess { series, .. } => ("guess", vec![p(series)]),
        Cmd::Certify { series } => ("certify", vec![p(series)]),
        Cmd::Witness { .. } => ("witness", vec![]),
        Cmd::Filter { support, .. } => ("filter", vec![p(support)]),
        Cmd::Obstruct { equation, second } => ("obstruct", vec![p(equation), p(second)]),
        Cmd::Valuations { equation } => ("valuations", vec![p(equation)]),
    }
}

/// Every parameter, defaulted or not, so that outputs are self-describing.
fn header(cmd: &Cmd, opts: &Opts) -> Value {
    let (name, inputs) = command_name(cmd);
    let mut m = Map::new();
    m.insert("command".into(), name.into());
    m.insert("inputs".into(), json!(inputs));
    m.insert("cutoff".into(), opts.cutoff.clone().into());
    m.insert("deg_max".into(), opts.deg_max.into());
    m.insert("d_max".into(), opts.d_max.into());
    m.insert("window".into(), opts.window.into());
    m.insert("margin".into(), opts.margin.into());
    m.insert("precision_cap".into(), opts.precision_cap.into());
    m.insert("seed".into(), opts.seed.into());
    m.insert("alpha_interval".into(), json!(opts.alpha_interval));
    m.insert("beta_interval".into(), json!(opts.beta_interval));
    m.insert("assert_independent".into(), opts.assert_independent.into());
    match cmd {
        Cmd::Solve { laurent, .. } => {
            m.insert("laurent".into(), (*laurent).into());
        }
        Cmd::Shift { by, .. } => {
            m.insert("by".into(), by.clone().into());
        }
        Cmd::Decompose { base, .. } | Cmd::Rescale { base, .. } | Cmd::Guess { base, .. } => {
            m.insert("base".into(), base.clone().into());
        }
        Cmd::Combine { n, m: mm, .. } => {
            m.insert("n".into(), (*n).into());
            m.insert("m".into(), (*mm).into());
        }
        Cmd::Witness { alpha, beta, prime } => {
            m.insert("alpha".into(), alpha.clone().into());
            m.insert("beta".into(), beta.clone().into());
            m.insert("prime".into(), (*prime).into());
        }
        Cmd::Filter { alpha, beta, pairs, .. } => {
            m.insert("alpha".into(), alpha.clone().into());
            m.insert("beta".into(), beta.clone().into());
            m.insert("pairs".into(), pairs.clone().into());
        }
        _ => {}
    }
    Value::Object(m)
}

fn render(v: &Value, compact: bool) -> String {
    if compact {
        serde_json::to_string(v).expect("serializable")
    } else {
        serde_json::to_string_pretty(v).expect("serializable")
    }
}

fn write_outputs(cmd: &Cmd, dir_or_file: &Path, doc: &Value, text: &str) -> std::io::Result<()> {
    if let Cmd::Decompose { .. } = cmd {
        fs::create_dir_all(dir_or_file)?;
        let mut manifest = Vec::new();
        if let Some(classes) = doc["result"]["classes"].as_array() {
            for (k, c) in classes.iter().enumerate() {
                let name = format!("class_{k}.json");
                fs::write(dir_or_file.join(&name), render(&c["series"], false) + "\n")?;
                manifest.push(json!({"file": name, "representative": c["representative"]}));
            }
        }
        let m = json!({"params": doc["params"], "classes": manifest});
        return fs::write(dir_or_file.join("manifest.json"), render(&m, false) + "\n");
    }
    fs::write(dir_or_file, format!("{text}\n"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let params = header(&cli.cmd, &cli.opts);
    match run(&cli.cmd, &cli.opts) {
        Ok((code, result)) => {
            let doc = json!({"params": params, "result": result});
            let text = render(&doc, cli.opts.json);
            println!("{text}");
            if let Some(out) = &cli.opts.out {
                if let Err(e) = write_outputs(&cli.cmd, out, &doc, &text) {
                    eprintln!("error: {}: {e}", out.display());
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(code)
        }
        Err(f) => {
            let doc = json!({"params": params, "error": f.message});
            println!("{}", render(&doc, cli.opts.json));
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
