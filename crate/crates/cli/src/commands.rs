use std::sync::Arc;

use num_complex::Complex64 as C64;
use qmeasure::cfunc::{c_function_product, c_function_trace, CFunctionQuery, CValue, CfuncError, d_operator};
use qmeasure::cqsu2::{Cq2Error, Mono, NormalFormElem};
use qmeasure::haar::{haar_trace, haar_trace_word, quantum_dimension};
use qmeasure::qnum::{Mode, QParams, RatQ};
use qmeasure::qtrace::{qtr, QuasiTraceContext};
use qmeasure::repwt::{factor_operator, make_context, Factor, RepContext, RepError, TensorOp};
use qmeasure::rootdata::{parse_group, CartanDatum, WeylWord};
use qmeasure::suites::{run_suite, suite_names, SuiteOptions, SuiteReport};
use qmeasure::uqmod::{irrep, MatrixCoefficient};
use serde_json::{json, Value};

use crate::expr::{parse_complex_list, Atom, Expression, ParseError, WeightSpec};

#[derive(Debug)]
pub enum CliError {
    Parse { what: &'static str, err: ParseError },
    Config(String),
    Domain(String),
    Module(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 4,
            _ => 3,
        }
    }

    pub fn to_json(&self) -> Value {
        let (code, msg, pos) = match self {
            CliError::Parse { what, err } => ("parse", format!("{what}: {err}"), Some(err.pos)),
            CliError::Config(m) => ("config", m.clone(), None),
            CliError::Domain(m) => ("domain", m.clone(), None),
            CliError::Module(m) => ("module", m.clone(), None),
        };
        json!({ "error": { "code": code, "message": msg, "pos": pos } })
    }
}

impl From<RepError> for CliError {
    fn from(e: RepError) -> Self {
        match &e {
            RepError::Cq2(Cq2Error::NotTraceClass { .. }) => CliError::Domain(e.to_string()),
            RepError::Unsupported(m) if m.contains("trace class") => CliError::Domain(e.to_string()),
            _ => CliError::Module(e.to_string()),
        }
    }
}

impl From<CfuncError> for CliError {
    fn from(e: CfuncError) -> Self {
        match e {
            CfuncError::Domain { .. } | CfuncError::Pole { .. } => CliError::Domain(e.to_string()),
            CfuncError::NotIntegral(_) => CliError::Config(e.to_string()),
            CfuncError::Rep(r) => r.into(),
        }
    }
}

/// What a command produced: a report and whether it counts as a failure.
pub struct Outcome {
    pub report: Value,
    pub failed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    /// Exact unless the input forces floating point.
    Auto,
    Exact,
    Float,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub cd: Arc<CartanDatum>,
    pub word: Option<WeylWord>,
    /// Torus angles in turns; `None` keeps the torus symbolic.
    pub torus: Option<Vec<f64>>,
    pub q: f64,
    pub mode: ModeArg,
    pub trunc: usize,
    pub tol: f64,
}

impl RunConfig {
    pub fn new(group: &str, word: Option<&str>, torus: Option<&str>, q: f64, mode: ModeArg, trunc: usize, tol: f64) -> Result<Self, CliError> {
        let cd = Arc::new(parse_group(group).map_err(|e| CliError::Config(e.to_string()))?);
        let word = word
            .map(|w| {
                let w = WeylWord::parse(w).map_err(|e| CliError::Config(e.to_string()))?;
                cd.word(w.letters()).map_err(|e| CliError::Config(e.to_string()))
            })
            .transpose()?;
        let torus = match torus.map(str::trim) {
            None | Some("") => None,
            Some(t) => {
                let v = t.split(',').map(parse_turns).collect::<Result<Vec<f64>, _>>()?;
                cd.check_rank(&v).map_err(|e| CliError::Config(e.to_string()))?;
                Some(v.iter().map(|x| x * std::f64::consts::TAU).collect())
            }
        };
        if !(q > 1.0 && q.is_finite()) {
            return Err(CliError::Config(format!("q must exceed 1, got {q}")));
        }
        if !(tol >= 0.0) {
            return Err(CliError::Config(format!("tolerance must be non-negative, got {tol}")));
        }
        let cfg = RunConfig { cd, word, torus, q, mode, trunc, tol };
        cfg.params(Mode::Exact).validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    fn params(&self, mode: Mode) -> QParams {
        let mut p = QParams::float(self.q, self.trunc);
        p.mode = mode;
        p.tol = self.tol;
        p
    }

    fn resolved_mode(&self, exact_possible: bool) -> Result<Mode, CliError> {
        match (self.mode, exact_possible) {
            (ModeArg::Exact, false) => Err(CliError::Config("exact mode needs integral input".into())),
            (ModeArg::Exact, true) => Ok(Mode::Exact),
            (ModeArg::Float, _) => Ok(Mode::Float),
            (ModeArg::Auto, ok) => Ok(if ok { Mode::Exact } else { Mode::Float }),
        }
    }

    fn word_or_err(&self) -> Result<&WeylWord, CliError> {
        self.word.as_ref().ok_or_else(|| CliError::Config("--word is required".into()))
    }
}

/// A rational `a/b` or decimal number of turns.
fn parse_turns(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let bad = || CliError::Config(format!("bad torus angle {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0.0 {
                return Err(bad());
            }
            Ok(a / b)
        }
        None => s.parse().map_err(|_| bad()),
    }
}

fn weight(cd: &CartanDatum, w: &WeightSpec) -> Result<Vec<i64>, CliError> {
    let v = match w {
        WeightSpec::Coords(v) => v.clone(),
        WeightSpec::Rho(k) => cd.rho.iter().map(|x| k * x).collect(),
    };
    cd.check_rank(&v).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(v)
}

fn factor(cd: &Arc<CartanDatum>, atom: &Atom) -> Result<Option<Factor>, CliError> {
    Ok(Some(match atom {
        Atom::Unit => return Ok(None),
        Atom::Mon { fam, m, p, r } => {
            let mono = Mono::new(*fam, *m, *p, *r).map_err(|e| CliError::Config(e.to_string()))?;
            Factor::Su2(NormalFormElem::monomial(mono, RatQ::one()))
        }
        Atom::Mc { wt, l, v } => {
            let module = irrep(cd, &weight(cd, wt)?).map_err(|e| CliError::Module(e.to_string()))?;
            let n = module.dim();
            if *l == 0 || *v == 0 || *l > n || *v > n {
                return Err(CliError::Config(format!("mc indices are 1-based and at most {n}, got {l};{v}")));
            }
            Factor::Coef(MatrixCoefficient::basis(module, l - 1, v - 1).map_err(|e| CliError::Module(e.to_string()))?)
        }
        Atom::A(w) => Factor::A(weight(cd, w)?),
        Atom::AStar(w) => Factor::AStar(weight(cd, w)?),
        Atom::D(_) => return Err(CliError::Config("d(...) is an operator, not a coefficient".into())),
    }))
}

/// Real integral coordinates, the inputs exact mode can take.
fn is_integral(l: &[C64]) -> bool {
    l.iter().all(|z| z.im == 0.0 && z.re.fract() == 0.0)
}

pub fn haar(cfg: &RunConfig, e: &Expression) -> Result<Outcome, CliError> {
    let factors: Vec<Factor> = e.0.iter().map(|a| factor(&cfg.cd, a)).collect::<Result<Vec<_>, _>>()?.into_iter().flatten().collect();
    let params = cfg.params(cfg.resolved_mode(true)?);
    let r = match &cfg.word {
        Some(w) => {
            if !cfg.cd.same_element(w, &cfg.cd.longest_element()) {
                return Err(CliError::Config("the Haar trace needs a reduced word for the longest element".into()));
            }
            haar_trace_word(&cfg.cd, w, &factors, &params)?
        }
        None => haar_trace(&cfg.cd, &factors, &params)?,
    };
    let mut report = r.to_json();
    report["expr"] = json!(e.to_string());
    Ok(Outcome { failed: r.tail > cfg.tol, report })
}

fn operator(ctx: &RepContext, e: &Expression) -> Result<TensorOp, CliError> {
    let mut op = ctx.identity();
    for atom in &e.0 {
        let next = match atom {
            Atom::D(l) => {
                ctx.cd.check_rank(l).map_err(|e| CliError::Config(e.to_string()))?;
                d_operator(ctx, l)?
            }
            _ => match factor(&ctx.cd, atom)? {
                Some(f) => factor_operator(ctx, &f)?,
                None => continue,
            },
        };
        op = op.mul(&next)?;
    }
    Ok(op)
}

pub fn qtr_cmd(cfg: &RunConfig, e: &Expression) -> Result<Outcome, CliError> {
    let integral = e.0.iter().all(|a| match a {
        Atom::D(l) => is_integral(l),
        _ => true,
    });
    let ctx = make_context(&cfg.cd, cfg.word_or_err()?, cfg.torus.clone(), cfg.params(cfg.resolved_mode(integral)?))?;
    let op = operator(&ctx, e)?;
    let r = qtr(&QuasiTraceContext::new(ctx)?, &op)?;
    let mut report = r.to_json();
    report["expr"] = json!(e.to_string());
    Ok(Outcome { failed: r.tail > cfg.tol, report })
}

fn lambda_string(l: &[C64]) -> String {
    l.iter().map(|z| format!("{},{}", z.re, z.im)).collect::<Vec<_>>().join(";")
}

struct CfuncRow {
    trace: CValue,
    product: CValue,
    diff: f64,
    agree: bool,
}

fn cfunc_point(cfg: &RunConfig, word: &WeylWord, lambda: &[C64]) -> Result<CfuncRow, CliError> {
    cfg.cd.check_rank(lambda).map_err(|e| CliError::Config(e.to_string()))?;
    let il: Vec<C64> = lambda.iter().map(|z| z * C64::i()).collect();
    let mode = cfg.resolved_mode(is_integral(&il))?;
    let query = CFunctionQuery { cd: cfg.cd.clone(), word: word.clone(), lambda: lambda.to_vec(), params: cfg.params(mode) };
    let trace = c_function_trace(&query)?;
    let product = c_function_product(&query)?;
    let diff = (trace.value - product.value).norm();
    let agree = match (&trace.exact, &product.exact) {
        (Some(a), Some(b)) => a == b,
        _ => diff <= trace.tail + cfg.tol.max(1e-10) * product.value.norm(),
    };
    Ok(CfuncRow { trace, product, diff, agree })
}

pub fn cfunc(cfg: &RunConfig, lambda: &str) -> Result<Outcome, CliError> {
    let l = parse_complex_list(lambda).map_err(|err| CliError::Parse { what: "--lambda", err })?;
    let word = cfg.word_or_err()?;
    let row = cfunc_point(cfg, word, &l)?;
    let report = json!({
        "group": cfg.cd.label(),
        "word": word.letters(),
        "lambda": lambda_string(&l),
        "value": row.product.value.re,
        "trace": row.trace.to_json(),
        "product": row.product.to_json(),
        "abs_diff": row.diff,
    });
    Ok(Outcome { failed: !row.agree, report })
}

/// `FROM:TO:N` scalings of `lambda`, one CSV row each.
pub fn cfunc_sweep(cfg: &RunConfig, lambda: &str, sweep: &str) -> Result<(String, bool), CliError> {
    let l = parse_complex_list(lambda).map_err(|err| CliError::Parse { what: "--lambda", err })?;
    let word = cfg.word_or_err()?;
    let parts: Vec<&str> = sweep.split(':').collect();
    let bad = || CliError::Config(format!("--sweep expects FROM:TO:N, got {sweep:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let from: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let to: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad());
    }
    let mut out = String::from("scale,lambda,trace_re,trace_im,product_re,product_im,abs_diff,status\n");
    let mut failed = false;
    for k in 0..n {
        let s = if n == 1 { from } else { from + (to - from) * k as f64 / (n - 1) as f64 };
        let lk: Vec<C64> = l.iter().map(|z| z * s).collect();
        let ls = lambda_string(&lk);
        match cfunc_point(cfg, word, &lk) {
            Ok(r) => {
                failed |= !r.agree;
                let status = if r.agree { "ok" } else { "mismatch" };
                out.push_str(&format!(
                    "{s},\"{ls}\",{},{},{},{},{:e},{status}\n",
                    r.trace.value.re, r.trace.value.im, r.product.value.re, r.product.value.im, r.diff
                ));
            }
            Err(CliError::Domain(_)) => out.push_str(&format!("{s},\"{ls}\",,,,,,domain\n")),
            Err(e) => return Err(e),
        }
    }
    Ok((out, failed))
}

pub fn verify(names: &[String], q: f64, seed: u64) -> Result<(Vec<SuiteReport>, bool), CliError> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(CliError::Config(format!("q must exceed 1, got {q}")));
    }
    let opts = SuiteOptions { q, seed };
    let names: Vec<String> = if names.is_empty() { suite_names().iter().map(|s| s.to_string()).collect() } else { names.to_vec() };
    let mut reports = Vec::new();
    for n in &names {
        let r = run_suite(n, &opts)
            .ok_or_else(|| CliError::Config(format!("unknown suite {n:?}; known: {}", suite_names().join(", "))))?;
        reports.push(r);
    }
    let failed = reports.iter().any(|r| !r.passed());
    Ok((reports, failed))
}

pub fn info(cfg: &RunConfig, lambda: Option<&str>) -> Result<Outcome, CliError> {
    let cd = &cfg.cd;
    let w0 = cd.longest_element();
    let mut report = json!({
        "group": cd.label(),
        "rank": cd.rank,
        "datum": cd.to_json(),
        "weyl_order": cd.weyl_group().len(),
        "longest_word": w0.letters(),
        "suites": suite_names(),
    });
    if let Some(l) = lambda {
        let e = crate::expr::parse_expression(&format!("a({l})")).map_err(|err| CliError::Parse {
            what: "--lambda",
            err: ParseError { pos: err.pos.saturating_sub(2), ..err },
        })?;
        let Atom::A(w) = &e.0[0] else { unreachable!("parsed as a(...)") };
        let m = irrep(cd, &weight(cd, w)?).map_err(|e| CliError::Module(e.to_string()))?;
        report["module"] = json!({
            "label": m.label,
            "dim": m.dim(),
            "weights": m.weights,
            "quantum_dimension": quantum_dimension(&m).to_string(),
        });
    }
    Ok(Outcome { report, failed: false })
}
