//! The `qmlab` command-line front end.
//!
//! Every subcommand writes JSON by default; tabular commands accept `--tsv`.
//! Exit status is 0 on success, 1 on a domain error (reported as a JSON
//! error object on stdout) and 2 on a usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::brackets;
use crate::error::{Error, FormError};
use crate::expr;
use crate::growth::{self, GradedRingSpec, GrowthTarget};
use crate::qm::{QExpander, WeightedForm};
use crate::qseries::{QSeries, DEFAULT_PRECISION};
use crate::rational::{fmt_rational, parse_rational, Rational};
use crate::semigroup::{self, InvariantPoint, JumpRule, Point, SaturateOptions, Verdict};
use crate::structure::{self, CheckOptions, GroupElement};
use crate::uea::{self, parse_word};

pub const PRECISION_ENV: &str = "QMLAB_PRECISION";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandResult {
    fn ok(stdout: String) -> Self {
        CommandResult { status: 0, stdout, stderr: String::new() }
    }
}

/// Settings taken from the environment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Env {
    pub precision: Option<String>,
}

impl Env {
    pub fn from_process() -> Self {
        Env { precision: std::env::var(PRECISION_ENV).ok() }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qmlab", version, about = "Exact computations with quasimodular forms")]
struct Cli {
    /// Tab-separated output for tabular commands.
    #[arg(long, global = true)]
    tsv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// q-expansion of a form.
    Qexp {
        /// E2, E4, E6, Delta, phi, an expression or a JSON polynomial.
        #[arg(long)]
        series: String,
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Applies D, δ, H, the Serre derivative or an enveloping-algebra word to a form.
    Apply {
        #[arg(long, value_enum)]
        op: Op,
        #[command(flatten)]
        form: FormArg,
        /// Number of applications.
        #[arg(long, default_value_t = 1)]
        times: u32,
        /// Word such as "d^2 D^2" for `--op word`.
        #[arg(long)]
        word: Option<String>,
    },
    /// Depth decomposition into D^i(modular) parts and the φ-line.
    Decompose {
        #[command(flatten)]
        form: FormArg,
    },
    /// PBW normal form D^a H^b d^c of a word in D, H, d.
    Pbw {
        #[arg(long)]
        word: String,
    },
    /// Compares δ^n D^n mod U·δ with n! H(H+1)...(H+n-1).
    VerifyProp4 {
        #[arg(long)]
        n: u32,
    },
    /// First Rankin–Cohen bracket and its Serre-derivative form.
    Bracket {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Serre derivative D(f) - k φ f.
    Serre {
        #[command(flatten)]
        form: FormArg,
    },
    /// Numeric check of the transformation law at every stack level.
    CheckEq {
        /// Defaults to E2, E4, E6, E2^2 and Delta.
        #[arg(long)]
        form: Option<String>,
        /// a,b,c,d; defaults to T, S, TS, ST^-1S.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
        /// re,im; defaults to 1.1i, 0.3+1.2i, -0.25+0.9i.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Hilbert series of a graded ring and of its differential closure.
    Growth {
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        weights: Vec<u32>,
        #[arg(long)]
        cocompact: bool,
        #[arg(long, default_value_t = 60)]
        kmax: u32,
        /// Also fit a quadratic to the chosen series.
        #[arg(long, value_enum)]
        fit: Option<FitTarget>,
    },
    /// New generators dim (Ĩ/Ĩ²)_k of Q[E2, E4, E6].
    Generators {
        #[arg(long, default_value_t = 40)]
        kmax: u32,
    },
    /// Saturation point A with (A + S) ∩ Λ ⊂ G, and its verification.
    SemigroupBound {
        /// Points "x,y;x,y;..." with rational coordinates.
        #[arg(long, allow_hyphen_values = true)]
        gens: String,
        #[arg(long, default_value_t = semigroup::DEFAULT_RADIUS)]
        radius: i64,
    },
    /// Checks (A + S) ∩ Λ ⊂ G on a window.
    SemigroupVerify {
        #[arg(long, allow_hyphen_values = true)]
        gens: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value_t = semigroup::DEFAULT_RADIUS)]
        radius: i64,
        #[arg(long, default_value_t = semigroup::DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Invariant-point simulation of the D_φ saturation.
    Saturate {
        #[arg(long)]
        init: String,
        #[arg(long, default_value = "1")]
        kappa: String,
        /// "none" or "beta=N".
        #[arg(long, default_value = "none")]
        rule: String,
        #[arg(long, default_value_t = 20)]
        cap: usize,
        #[arg(long, default_value_t = 200)]
        window: i64,
    },
}

#[derive(Args, Debug)]
struct FormArg {
    #[arg(long)]
    form: String,
    /// Required only for the zero form.
    #[arg(long)]
    weight: Option<u32>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Op {
    D,
    Delta,
    H,
    Serre,
    Word,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FitTarget {
    Modular,
    Closure,
}

/// Failure of a command after parsing.
#[derive(Debug)]
enum Failure {
    Input(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<FormError> for Failure {
    fn from(e: FormError) -> Self {
        Failure::Domain(e.into())
    }
}

impl From<crate::error::SemigroupError> for Failure {
    fn from(e: crate::error::SemigroupError) -> Self {
        Failure::Domain(e.into())
    }
}

impl From<crate::error::GrowthError> for Failure {
    fn from(e: crate::error::GrowthError) -> Self {
        Failure::Domain(e.into())
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Series(_) => "evaluation-domain",
        Error::Form(FormError::Series(_)) => "evaluation-domain",
        Error::Form(FormError::NotModular(_)) => "precondition",
        Error::Form(_) => "form",
        Error::Growth(crate::error::GrowthError::UnsupportedModel(_)) => "unsupported-model",
        Error::Growth(_) => "growth",
        Error::Semigroup(crate::error::SemigroupError::Inconclusive(_)) => "inconclusive",
        Error::Semigroup(_) => "semigroup",
    }
}

/// Runs with the process environment.
pub fn run<I, S>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with_env(argv, &Env::from_process())
}

/// `argv` excludes the program name.
pub fn run_with_env<I, S>(argv: I, env: &Env) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once(std::ffi::OsString::from("qmlab")).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandResult::ok(text),
                _ => CommandResult { status: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    let precision = match env.precision.as_deref() {
        None => DEFAULT_PRECISION,
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => {
                return CommandResult {
                    status: 2,
                    stdout: String::new(),
                    stderr: format!("{PRECISION_ENV} must be a positive integer, got `{s}`\n"),
                }
            }
        },
    };
    match dispatch(&cli, precision) {
        Ok(out) => CommandResult::ok(out),
        Err(Failure::Input(msg)) => {
            CommandResult { status: 2, stdout: String::new(), stderr: format!("error: {msg}\n") }
        }
        Err(Failure::Domain(e)) => CommandResult {
            status: 1,
            stdout: pretty(&json!({"error": {"kind": error_kind(&e), "message": e.to_string()}})),
            stderr: String::new(),
        },
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn input<T>(r: Result<T, String>) -> Result<T, Failure> {
    r.map_err(Failure::Input)
}

fn form_json(f: &WeightedForm) -> Value {
    json!({"weight": f.weight(), "poly": f.poly(), "text": f.to_string()})
}

fn parse_form(arg: &FormArg) -> Result<WeightedForm, Failure> {
    // malformed input is a usage error, a well-formed but non-homogeneous form a domain error
    let poly = input(expr::parse_polynomial(&arg.form))?;
    Ok(match arg.weight {
        Some(k) => WeightedForm::new(poly, k)?,
        None => WeightedForm::from_poly(poly)?,
    })
}

fn parse_form_str(s: &str) -> Result<WeightedForm, Failure> {
    parse_form(&FormArg { form: s.to_string(), weight: None })
}

fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>, Failure> {
    let v: Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(Failure::Input(format!("{what}: expected {n} comma-separated numbers, got `{s}`"))),
    }
}

fn parse_points(s: &str) -> Result<Vec<Point>, Failure> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let c: Vec<&str> = p.split(',').collect();
            if c.len() != 2 {
                return Err(Failure::Input(format!("point `{p}` needs two coordinates")));
            }
            Ok([input(parse_rational(c[0].trim()))?, input(parse_rational(c[1].trim()))?])
        })
        .collect()
}

fn point_json(p: &Point) -> Value {
    json!([fmt_rational(&p[0]), fmt_rational(&p[1])])
}

fn dispatch(cli: &Cli, precision: usize) -> Result<String, Failure> {
    let tsv = cli.tsv;
    match &cli.command {
        Command::Qexp { series, terms } => {
            let n = terms.unwrap_or(precision);
            if n == 0 {
                return Err(Failure::Input("--terms must be positive".into()));
            }
            let f = parse_form_str(series)?;
            let s: QSeries = QExpander::new(n).expand(f.poly());
            if tsv {
                let mut out = String::from("n\tcoeff\n");
                for (i, c) in s.coeffs().iter().enumerate() {
                    out.push_str(&format!("{i}\t{}\n", fmt_rational(c)));
                }
                return Ok(out);
            }
            Ok(pretty(&json!({"form": form_json(&f), "series": s, "text": s.to_string()})))
        }
        Command::Apply { op, form, times, word } => {
            let f = parse_form(form)?;
            let out = match op {
                Op::D => f.apply_d_n(*times),
                Op::Delta => f.apply_delta_n(*times),
                Op::H => (0..*times).fold(f.clone(), |g, _| g.apply_h()),
                Op::Serre => (0..*times).fold(f.clone(), |g, _| brackets::serre_derivative(&g)),
                Op::Word => {
                    let w = word.as_deref().ok_or_else(|| Failure::Input("--op word needs --word".into()))?;
                    let letters = input(parse_word(w))?;
                    let e = uea::pbw_reduce(&letters);
                    let shift: i64 = letters.iter().map(|l| l.grading()).sum();
                    let mut g = f.clone();
                    for _ in 0..*times {
                        let k = g.weight() as i64 + shift;
                        if k < 0 {
                            return Err(Failure::Domain(
                                FormError::Invalid("word lowers the weight below zero".to_string()).into(),
                            ));
                        }
                        g = WeightedForm::new(e.act(g.poly()), k as u32)?;
                    }
                    g
                }
            };
            Ok(pretty(&json!({"input": form_json(&f), "result": form_json(&out)})))
        }
        Command::Decompose { form } => {
            let f = parse_form(form)?;
            Ok(pretty(&structure::decompose(&f)))
        }
        Command::Pbw { word } => {
            let letters = input(parse_word(word))?;
            let e = uea::pbw_reduce(&letters);
            if tsv {
                return Ok(format!("{}\n", e.to_text()));
            }
            let terms: Vec<Value> =
                e.terms().map(|(x, c)| json!({"exp": x, "coeff": crate::rational::RationalRef(c)})).collect();
            Ok(pretty(&json!({"word": word, "terms": terms, "text": text_lines(&e)})))
        }
        Command::VerifyProp4 { n } => {
            let (ok, lhs, rhs) = uea::verify_prop4(*n);
            let status = if ok { "match" } else { "mismatch" };
            if tsv {
                let flat = |e: &uea::UeaElement| text_lines(e).join("; ");
                return Ok(format!("{status}\t{}\t{}\n", flat(&lhs), flat(&rhs)));
            }
            Ok(pretty(&json!({
                "n": n,
                "status": status,
                "lhs": text_lines(&lhs),
                "rhs": text_lines(&rhs),
            })))
        }
        Command::Bracket { f, g } => {
            let f = parse_form_str(f)?;
            let g = parse_form_str(g)?;
            let b = brackets::rc1(&f, &g)?;
            let report = brackets::check_trivialization(&f, &g)?;
            Ok(pretty(&json!({"bracket": form_json(&b), "trivialization": report})))
        }
        Command::Serre { form } => {
            let f = parse_form(form)?;
            Ok(pretty(&form_json(&brackets::serre_derivative(&f))))
        }
        Command::CheckEq { form, gamma, z, tol } => {
            let forms: Vec<(String, WeightedForm)> = match form {
                Some(s) => vec![(s.clone(), parse_form_str(s)?)],
                None => standard_forms(),
            };
            let gammas: Vec<(String, GroupElement)> = match gamma {
                Some(s) => {
                    let v: Result<Vec<i64>, _> = s.split(',').map(|x| x.trim().parse()).collect();
                    match v.as_deref() {
                        Ok([a, b, c, d]) => vec![(s.clone(), GroupElement::new(*a, *b, *c, *d)?)],
                        _ => return Err(Failure::Input(format!("--gamma expects a,b,c,d, got `{s}`"))),
                    }
                }
                None => GroupElement::default_samples(),
            };
            let points = match z {
                Some(s) => {
                    let v = parse_floats(s, 2, "--z")?;
                    vec![Complex64::new(v[0], v[1])]
                }
                None => structure::default_sample_points(),
            };
            let opts = CheckOptions { precision, ..CheckOptions::default() };
            let mut rows = Vec::new();
            for (fname, f) in &forms {
                for (gname, g) in &gammas {
                    for &p in &points {
                        let r = structure::check_functional_equation_with(f, g, p, *tol, &opts)?;
                        rows.push((fname.clone(), gname.clone(), r));
                    }
                }
            }
            let all_passed = rows.iter().all(|(_, _, r)| r.passed);
            if tsv {
                let mut out = String::from("form\tgamma\tz\tlevel\tresidual\tpassed\n");
                for (f, g, r) in &rows {
                    for l in &r.levels {
                        out.push_str(&format!(
                            "{f}\t{g}\t{}{:+}i\t{}\t{:.3e}\t{}\n",
                            r.z_re, r.z_im, l.level, l.residual, r.passed
                        ));
                    }
                }
                return Ok(out);
            }
            let reports: Vec<Value> =
                rows.iter().map(|(f, g, r)| json!({"form": f, "gamma_name": g, "report": r})).collect();
            let max = rows.iter().map(|(_, _, r)| r.max_residual).fold(0.0, f64::max);
            Ok(pretty(&json!({
                "tol": tol,
                "precision": precision,
                "max_residual": max,
                "passed": all_passed,
                "reports": reports,
            })))
        }
        Command::Growth { weights, cocompact, kmax, fit } => {
            let spec = GradedRingSpec::free(weights.clone(), *cocompact)?;
            let m = growth::hilbert_modular(&spec, *kmax)?;
            let c = growth::hilbert_closure(&spec, *kmax)?;
            let mut rows = Vec::new();
            for k in (0..=*kmax).step_by(2) {
                rows.push((k, m.dim(k), c.dim(k), growth::new_generator_count(&spec, k)?));
            }
            let fit = match fit {
                None => None,
                Some(t) => Some(growth::growth_fit(
                    &spec,
                    *kmax,
                    match t {
                        FitTarget::Modular => GrowthTarget::Modular,
                        FitTarget::Closure => GrowthTarget::Closure,
                    },
                )?),
            };
            if tsv {
                let mut out = String::from("k\tdim_M\tdim_CL\tnew_generators\n");
                for (k, a, b, n) in rows {
                    out.push_str(&format!("{k}\t{a}\t{b}\t{n}\n"));
                }
                return Ok(out);
            }
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(k, a, b, n)| json!({"k": k, "dim_modular": a, "dim_closure": b, "new_generators": n}))
                .collect();
            Ok(pretty(&json!({
                "spec": spec,
                "epsilon": spec.epsilon(),
                "dim2": growth::dichotomy_dim2(&spec)?,
                "rows": rows,
                "fit": fit,
            })))
        }
        Command::Generators { kmax } => {
            if kmax % 2 != 0 {
                return Err(Failure::Input("--kmax must be even".into()));
            }
            let dims = structure::new_generator_dims_sl2z(*kmax);
            if tsv {
                let mut out = String::from("k\tnew_generators\n");
                for (k, d) in dims {
                    out.push_str(&format!("{k}\t{d}\n"));
                }
                return Ok(out);
            }
            let rows: Vec<Value> =
                dims.into_iter().map(|(k, d)| json!({"k": k, "new_generators": d})).collect();
            Ok(pretty(&json!({"rows": rows})))
        }
        Command::SemigroupBound { gens, radius } => {
            let inst = semigroup::sector_and_lattice(&parse_points(gens)?)?;
            let bound = semigroup::saturation_bound(&inst)?;
            let verdict = semigroup::verify_bound(&inst, &bound.a, *radius)?;
            if tsv {
                let v = match &verdict {
                    Verdict::Holds { .. } => "holds".to_string(),
                    Verdict::Counterexample { point, .. } => {
                        format!("counterexample {}", semigroup::fmt_point(point))
                    }
                };
                return Ok(format!(
                    "A\t{}\nvariant\t{}\nverdict\t{v}\n",
                    semigroup::fmt_point(&bound.a),
                    json!(bound.variant).as_str().unwrap_or_default()
                ));
            }
            Ok(pretty(&json!({
                "instance": instance_json(&inst),
                "A": point_json(&bound.a),
                "bound": bound,
                "radius": radius,
                "verification": verdict,
            })))
        }
        Command::SemigroupVerify { gens, a, radius, budget } => {
            let inst = semigroup::sector_and_lattice(&parse_points(gens)?)?;
            let a = parse_points(a)?;
            let [a] =
                <[Point; 1]>::try_from(a).map_err(|_| Failure::Input("--a expects one point x,y".into()))?;
            let verdict = semigroup::verify_bound_with_budget(&inst, &a, *radius, *budget)?;
            Ok(pretty(&json!({
                "instance": instance_json(&inst),
                "A": point_json(&a),
                "radius": radius,
                "verification": verdict,
            })))
        }
        Command::Saturate { init, kappa, rule, cap, window } => {
            let kappa: Rational = input(parse_rational(kappa))?;
            let pts = parse_points(init)?
                .into_iter()
                .map(|[x, y]| InvariantPoint::new(x, y, kappa.clone()))
                .collect::<Vec<_>>();
            let rule = JumpRule::parse(rule)?;
            let state =
                semigroup::saturate(&pts, &rule, &SaturateOptions { stage_cap: *cap, window: *window })?;
            if tsv {
                let mut out = format!("n0\t{}\n", state.stage);
                out.push_str("stage\toccupied\tnew_generators\tmissing_count\tmissing_below_50\tx_threshold\ty_threshold\n");
                for r in &state.log {
                    let small: Vec<String> =
                        r.missing_lines.iter().filter(|&&y| y < 50).map(|y| y.to_string()).collect();
                    out.push_str(&format!(
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                        r.stage,
                        r.occupied,
                        r.new_generators,
                        r.missing_lines.len(),
                        small.join(","),
                        r.x_threshold,
                        r.y_threshold
                    ));
                }
                return Ok(out);
            }
            Ok(pretty(&json!({"rule": rule.to_string(), "state": state})))
        }
    }
}

fn text_lines(e: &uea::UeaElement) -> Vec<String> {
    e.to_text().lines().map(str::to_string).collect()
}

fn instance_json(inst: &semigroup::SemigroupInstance) -> Value {
    json!({
        "generators": inst.generators().iter().map(point_json).collect::<Vec<_>>(),
        "lattice_basis": inst.lattice_basis().iter().map(point_json).collect::<Vec<_>>(),
        "extremal": inst.extremal().iter().map(|p| point_json(p)).collect::<Vec<_>>(),
        "sector_coords": inst.sector_coords().iter().map(point_json).collect::<Vec<_>>(),
    })
}

/// `E2, E4, E6, E2², Δ`.
pub fn standard_forms() -> Vec<(String, WeightedForm)> {
    vec![
        ("E2".into(), WeightedForm::e2()),
        ("E4".into(), WeightedForm::e4()),
        ("E6".into(), WeightedForm::e6()),
        ("E2^2".into(), &WeightedForm::e2() * &WeightedForm::e2()),
        ("Delta".into(), WeightedForm::delta()),
    ]
}
