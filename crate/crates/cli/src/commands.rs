use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use autoexp::automata::{builtin, parse_dfao, sync_failure_count, Dfao};
use autoexp::congruence::{report_for, solution_table, PoleMode};
use autoexp::experiments::{vdc_fuzz, VdcFuzzConfig};
use autoexp::expsums::{check_gcd_lemma, check_weil, correlation_u, pv_range_scan, weighted_sum, IntervalProgression, YPolicy};
use autoexp::modring::{parse_rational_function_list, primes_between, EqEvaluator, FactoredModulus, RationalFunction};
use autoexp::vandercorput::{carry_violation_count, decompose_weyl, ScalarTransducer, WeylConfig};
use autoexp::{Budget, Phase, Scalar};
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] autoexp::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_budget() => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub struct Context {
    pub seed: u64,
    pub budget: Budget,
}

/// A result renderable as JSON or as text (CSV for tables).
pub struct Output {
    pub json: Value,
    pub text: String,
}

impl Output {
    pub fn new<T: Serialize>(value: &T, text: String) -> CliResult<Self> {
        let json = serde_json::to_value(value).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Output { json, text })
    }

    pub fn table<T: Serialize>(rows: &[T]) -> CliResult<Self> {
        Output::new(&rows, autoexp::report::to_csv(rows)?)
    }

    pub fn emit(&self, json: bool, out: Option<&Path>) -> CliResult<()> {
        let mut body = if json {
            serde_json::to_string_pretty(&self.json).map_err(|e| CliError::Usage(e.to_string()))?
        } else {
            self.text.clone()
        };
        if !body.ends_with('\n') {
            body.push('\n');
        }
        match out {
            Some(path) => std::fs::write(path, body)?,
            None => print!("{body}"),
        }
        Ok(())
    }
}

/// A builtin name or a path to an automaton file.
pub fn load_automaton(source: &str) -> CliResult<Dfao> {
    match builtin(source) {
        Ok(d) => Ok(d),
        Err(autoexp::Error::UnknownName(_)) if Path::new(source).is_file() => Ok(parse_dfao(&std::fs::read_to_string(source)?)?),
        Err(e) => Err(e.into()),
    }
}

fn modulus(q: u64) -> CliResult<FactoredModulus> {
    Ok(FactoredModulus::new(q)?)
}

fn complex_text(re: f64, im: f64) -> String {
    format!("{re:.12} {} {:.12}i", if im < 0.0 { '-' } else { '+' }, im.abs())
}

#[derive(Args, Debug)]
pub struct SumArgs {
    /// Automaton: builtin name or file.
    #[arg(long)]
    pub auto: String,
    #[arg(long)]
    pub f: RationalFunction,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub x: u64,
    #[arg(long, default_value_t = 0)]
    pub y: u64,
    #[arg(long, default_value_t = 1)]
    pub s: u64,
    #[arg(long, default_value_t = 0)]
    pub a: u64,
}

#[derive(Serialize)]
struct ComplexResult {
    re: f64,
    im: f64,
    abs: f64,
    exact: bool,
}

pub fn sum(a: &SumArgs) -> CliResult<Output> {
    let d = load_automaton(&a.auto)?;
    let region = IntervalProgression::new(a.y, a.x, a.s, a.a)?;
    let total = weighted_sum(&d, &a.f, &modulus(a.q)?, &region)?;
    let z = total.to_complex();
    let text = format!("sum = {}\n|sum| = {:.12}", complex_text(z.re, z.im), z.norm());
    Output::new(&ComplexResult { re: z.re, im: z.im, abs: z.norm(), exact: total.is_exact() }, text)
}

#[derive(Args, Debug)]
pub struct CorrelateArgs {
    #[arg(long)]
    pub f: RationalFunction,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub x: u64,
    #[arg(long, default_value_t = 0)]
    pub y: u64,
    #[arg(long)]
    pub h: u64,
    /// Progression modulus.
    #[arg(long, default_value_t = 1)]
    pub modulus: u64,
    #[arg(long, default_value_t = 0)]
    pub a: u64,
}

pub fn correlate(a: &CorrelateArgs) -> CliResult<Output> {
    let ev = EqEvaluator::new(&a.f, &modulus(a.q)?)?;
    let u = correlation_u(|n| ev.eval_scalar(n as i128), a.x, a.y, a.h, a.modulus, a.a)?;
    let z = u.to_complex();
    let text = format!("U = {}\n|U| = {:.12}", complex_text(z.re, z.im), z.norm());
    Output::new(&ComplexResult { re: z.re, im: z.im, abs: z.norm(), exact: u.is_exact() }, text)
}

#[derive(Args, Debug)]
pub struct WeilArgs {
    #[arg(long)]
    pub f: RationalFunction,
    /// Squarefree moduli.
    #[arg(long, value_delimiter = ',', required_unless_present = "primes_upto")]
    pub q: Vec<u64>,
    /// Every prime up to this bound.
    #[arg(long)]
    pub primes_upto: Option<u64>,
}

pub fn verify_weil(a: &WeilArgs) -> CliResult<Output> {
    let mut qs = a.q.clone();
    if let Some(b) = a.primes_upto {
        qs.extend(primes_between(2, b));
    }
    let rows = qs.iter().map(|&q| Ok(check_weil(&a.f, &modulus(q)?)?)).collect::<CliResult<Vec<_>>>()?;
    Output::table(&rows)
}

#[derive(Args, Debug)]
pub struct GcdArgs {
    #[arg(long)]
    pub f: RationalFunction,
    #[arg(long)]
    pub r: i64,
    #[arg(long, default_value_t = 0)]
    pub l: i64,
    #[arg(long, default_value_t = 5)]
    pub p_min: u64,
    #[arg(long, default_value_t = 199)]
    pub p_max: u64,
}

pub fn verify_gcd(a: &GcdArgs) -> CliResult<Output> {
    let rep = check_gcd_lemma(&a.f, a.r, a.l, &primes_between(a.p_min, a.p_max))?;
    let mut text = format!("f = {}, r = {}, l = {}\nchecked {} primes, exempt {}\n", rep.f, rep.r, rep.l, rep.checked.len(), rep.exempt.len());
    for v in &rep.small_primes {
        let _ = writeln!(text, "p = {} <= {}: gcd {}", v.p, rep.degree_bound, v.gcd);
    }
    for v in &rep.violations {
        let _ = writeln!(text, "violation at p = {}: gcd {}", v.p, v.gcd);
    }
    let _ = write!(text, "violations: {}", rep.violations.len());
    Output::new(&rep, text)
}

#[derive(Args, Debug)]
pub struct PvArgs {
    #[arg(long)]
    pub auto: String,
    #[arg(long)]
    pub f: RationalFunction,
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<u64>,
    #[arg(long, default_value_t = 0.75)]
    pub theta: f64,
    /// Fixed interval start.
    #[arg(long, conflicts_with = "y_mult")]
    pub y: Option<u64>,
    /// Interval start as a multiple of q.
    #[arg(long)]
    pub y_mult: Option<u64>,
    /// Exponent in the reported bound column.
    #[arg(long, default_value_t = 0.5)]
    pub c: f64,
}

pub fn scan_pv(a: &PvArgs) -> CliResult<Output> {
    if !(a.theta > 0.0 && a.theta <= 2.0) {
        return Err(CliError::Usage("--theta must lie in (0, 2]".into()));
    }
    let d = load_automaton(&a.auto)?;
    let policy = match (a.y, a.y_mult) {
        (_, Some(c)) => YPolicy::MultipleOfQ(c),
        (y, None) => YPolicy::Fixed(y.unwrap_or(0)),
    };
    let rep = pv_range_scan(&d, &a.auto, &a.f, &a.q, a.theta, policy, a.c)?;
    Ok(Output { json: serde_json::to_value(&rep).map_err(|e| CliError::Usage(e.to_string()))?, text: rep.to_csv()? })
}

#[derive(Args, Debug)]
pub struct VdcArgs {
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 3)]
    pub d_max: usize,
    #[arg(long, default_value_t = 200)]
    pub x_max: usize,
    #[arg(long, default_value_t = 32.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 4)]
    pub k_max: u64,
}

pub fn vdc_check(a: &VdcArgs, ctx: &Context) -> CliResult<Output> {
    if a.d_max == 0 || a.x_max == 0 || a.k_max == 0 || a.r_max < 1.0 {
        return Err(CliError::Usage("d-max, x-max, k-max must be positive and r-max at least 1".into()));
    }
    let cfg = VdcFuzzConfig { trials: a.trials, d_max: a.d_max, x_max: a.x_max, r_max: a.r_max, k_max: a.k_max, seed: ctx.seed };
    let s = vdc_fuzz(&cfg)?;
    let text = format!("trials = {}\nfailures = {}\nmin relative slack = {:.6e}", s.trials, s.failures, s.min_relative_slack);
    Output::new(&s, text)
}

#[derive(Args, Debug)]
pub struct CarryArgs {
    #[arg(long, default_value = "thue_morse")]
    pub transducer: String,
    #[arg(long)]
    pub lambda: u32,
    #[arg(long)]
    pub alpha: u32,
    #[arg(long, value_delimiter = ',', required = true)]
    pub rho: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub r: Vec<u64>,
}

pub fn carry_scan(a: &CarryArgs, ctx: &Context) -> CliResult<Output> {
    let tr = ScalarTransducer::builtin(&a.transducer)?;
    let mut rows = Vec::new();
    for &r in &a.r {
        for &rho in &a.rho {
            let count = carry_violation_count(&tr, a.lambda, a.alpha, rho, r, ctx.budget)?;
            rows.push(autoexp::experiments::CarryRow { r, rho, count });
        }
    }
    Output::table(&rows)
}

#[derive(Args, Debug)]
pub struct SyncArgs {
    #[arg(long)]
    pub auto: String,
    #[arg(long, default_value_t = 0)]
    pub y: u64,
    #[arg(long)]
    pub x: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub lambda: Vec<u32>,
}

pub fn sync_scan(a: &SyncArgs) -> CliResult<Output> {
    let d = load_automaton(&a.auto)?;
    let rows = a
        .lambda
        .iter()
        .map(|&lambda| Ok(autoexp::experiments::SyncRow { lambda, count: sync_failure_count(&d, a.y, a.x, lambda)? }))
        .collect::<CliResult<Vec<_>>>()?;
    Output::table(&rows)
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TauKind {
    /// 1 when the weight product is trivial, else 0.
    Even,
    /// The weight product itself.
    Sign,
}

#[derive(Args, Debug)]
pub struct WeylArgs {
    #[arg(long, default_value = "thue_morse")]
    pub transducer: String,
    #[arg(long, value_enum, default_value_t = TauKind::Sign)]
    pub tau: TauKind,
    /// Twist g(n) = e_q(f(n)); omit for g = 1.
    #[arg(long, requires = "q")]
    pub f: Option<RationalFunction>,
    #[arg(long, requires = "f")]
    pub q: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub y: u64,
    #[arg(long)]
    pub x: u64,
    #[arg(long)]
    pub lambda1: u32,
    #[arg(long)]
    pub lambda2: u32,
    /// Write the per-stage CSV here.
    #[arg(long)]
    pub stages: Option<PathBuf>,
}

pub fn weyl_decompose(a: &WeylArgs) -> CliResult<Output> {
    let tr = ScalarTransducer::builtin(&a.transducer)?;
    let ev = match (&a.f, a.q) {
        (Some(f), Some(q)) => Some(EqEvaluator::new(f, &modulus(q)?)?),
        _ => None,
    };
    let g = |n: u64| ev.as_ref().map_or(Scalar::one(), |ev| ev.eval_scalar(n as i128));
    let cfg = WeylConfig { y: a.y, x: a.x, lambda1: a.lambda1, lambda2: a.lambda2 };
    let rep = match a.tau {
        TauKind::Even => decompose_weyl(&tr, |s: Phase, _| if s.is_zero() { Scalar::one() } else { Scalar::zero() }, g, cfg),
        TauKind::Sign => decompose_weyl(&tr, |s: Phase, _| Scalar::unit(s), g, cfg),
    }?;
    if let Some(path) = &a.stages {
        std::fs::write(path, rep.stage_csv()?)?;
    }
    let mut text = String::new();
    let _ = writeln!(text, "S0 = {}", complex_text(rep.s0_re, rep.s0_im));
    let _ = writeln!(text, "M = {}, R = {}, N = {}", rep.m, rep.r, rep.group_order);
    for (name, ok) in [
        ("S0 from S1", rep.s0_from_s1),
        ("S1 from S2", rep.s1_from_s2),
        ("S3 from S2", rep.s3_from_s2),
        ("S4 from S5", rep.s4_from_s5),
        ("S5 equals U", rep.s5_is_u),
        ("van der Corput", rep.vdc_holds),
    ] {
        let _ = writeln!(text, "{name}: {}", if ok { "ok" } else { "MISMATCH" });
    }
    let _ = writeln!(text, "sync failures = {}, carry failures = {}", rep.sync_failures, rep.carry_failures);
    let eta = rep.eta_fit.map_or("none".to_string(), |e| format!("{e:.6}"));
    let _ = write!(text, "eta fit = {eta}, comparator = {:.6}", rep.comparator);
    let mut json = serde_json::to_value(&rep).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(obj) = json.as_object_mut() {
        obj.remove("rows");
    }
    Ok(Output { json, text })
}

#[derive(Args, Debug)]
pub struct CongruenceArgs {
    /// Indicator automaton: builtin name or file.
    #[arg(long)]
    pub set: String,
    /// Comma-separated list f_1, ..., f_r.
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 0)]
    pub m: u64,
    /// Emit the count for every residue m.
    #[arg(long)]
    pub all_m: bool,
    /// Fail on any pole in [1, q] instead of excluding it.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Serialize)]
struct ResidueCount {
    m: u64,
    count: u128,
}

pub fn count_congruence(a: &CongruenceArgs) -> CliResult<Output> {
    let s = load_automaton(&a.set)?;
    let fs = parse_rational_function_list(&a.f)?;
    let q = modulus(a.q)?;
    let mode = if a.strict { PoleMode::Strict } else { PoleMode::Exclude };
    let table = solution_table(&fs, &s, &q, mode)?;
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    if a.all_m {
        let rows: Vec<ResidueCount> =
            table.histogram.counts.iter().enumerate().map(|(m, &count)| ResidueCount { m: m as u64, count }).collect();
        return Output::table(&rows);
    }
    let rep = report_for(&fs, &q, a.m, &table);
    let text = format!(
        "N = {}\nmain term = {} ({:.6})\nrelative error = {:.6e}\nsupports = {:?}",
        rep.count, rep.main_term, rep.main_term_f64, rep.relative_error, rep.supports
    );
    Output::new(&rep, text)
}
