//! Check registry, runner and report for the `verify` binary.

mod checks;

use std::fmt::Write as _;
use std::time::Instant;

use g2monge::Error;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error as ThisError;

pub use checks::{registry, required_lambda, PAIR_FLAT_TOL};

pub type Rat = Ratio<i64>;
/// `((β numerator, β denominator), (γ numerator, γ denominator))`.
pub type PairValue = ((i64, i64), (i64, i64));

/// Version string of the report schema.
pub const SCHEMA: &str = "g2monge-verify/1";

#[derive(Debug, ThisError)]
pub enum VerifyError {
    #[error("unknown check: {0}")]
    UnknownCheck(String),
    #[error("malformed rational {0:?}; expected N or N/D")]
    BadRational(String),
    #[error("--beta and --gamma must be given together")]
    IncompletePair,
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Parses `N` or `N/D` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rat, VerifyError> {
    let bad = || VerifyError::BadRational(text.to_string());
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let n: i64 = n.parse().map_err(|_| bad())?;
    let d: i64 = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    Identity,
    Equivalence,
    Numeric,
}

/// How a check is instantiated over parameters.
#[derive(Clone, Copy, Debug)]
pub enum Params {
    None,
    /// Symbolic `α` unless `--alpha` values are given.
    Alpha,
    /// One instance per `--alpha` value, else per listed default.
    AlphaValues(&'static [(i64, i64)]),
    /// Symbolic `β, γ` unless `--beta/--gamma` are given.
    Pair,
    /// The given `(β, γ)` or each listed default.
    PairValues(&'static [PairValue]),
}

/// Result of a check body.
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
    pub payload: Value,
}

impl Outcome {
    pub fn new(pass: bool, detail: impl Into<String>, payload: Value) -> Outcome {
        Outcome {
            pass,
            detail: detail.into(),
            payload,
        }
    }
}

pub type Body = fn(&Instance) -> g2monge::Result<Outcome>;

/// Registered check.
pub struct Check {
    pub id: &'static str,
    pub anchor: &'static str,
    pub severity: Severity,
    pub params: Params,
    pub body: Body,
    /// Names of the catalogue objects involved, dumped by `explain`.
    pub objects: &'static [&'static str],
}

/// Run settings shared by all checks.
#[derive(Clone, Debug)]
pub struct Settings {
    pub alphas: Vec<Rat>,
    pub pair: Option<(Rat, Rat)>,
    pub seed: u64,
    pub points: usize,
    pub tol: f64,
    pub dump: bool,
    pub timings: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            alphas: Vec::new(),
            pair: None,
            seed: 42,
            points: 20,
            tol: 1e-9,
            dump: false,
            timings: false,
        }
    }
}

/// A check bound to concrete parameters.
pub struct Instance<'a> {
    pub id: String,
    pub check: &'a Check,
    pub alpha: Option<Rat>,
    pub pair: Option<(Rat, Rat)>,
    pub settings: &'a Settings,
}

fn fmt_rat(r: &Rat) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rat((n, d): (i64, i64)) -> Rat {
    Rat::new(n, d)
}

impl Check {
    pub fn instances<'a>(&'a self, s: &'a Settings) -> Vec<Instance<'a>> {
        let one = |alpha: Option<Rat>, pair: Option<(Rat, Rat)>| {
            let mut id = self.id.to_string();
            if let Some(a) = &alpha {
                id += &format!("[alpha={}]", fmt_rat(a));
            }
            if let Some((b, g)) = &pair {
                id += &format!("[beta={},gamma={}]", fmt_rat(b), fmt_rat(g));
            }
            Instance {
                id,
                check: self,
                alpha,
                pair,
                settings: s,
            }
        };
        match self.params {
            Params::None => vec![one(None, None)],
            Params::Alpha if s.alphas.is_empty() => vec![one(None, None)],
            Params::Alpha => s.alphas.iter().map(|a| one(Some(*a), None)).collect(),
            Params::AlphaValues(d) => {
                let list: Vec<Rat> = if s.alphas.is_empty() {
                    d.iter().copied().map(rat).collect()
                } else {
                    s.alphas.clone()
                };
                list.into_iter().map(|a| one(Some(a), None)).collect()
            }
            Params::Pair => vec![one(None, s.pair)],
            Params::PairValues(d) => match s.pair {
                Some(p) => vec![one(None, Some(p))],
                None => d
                    .iter()
                    .map(|(b, g)| one(None, Some((rat(*b), rat(*g)))))
                    .collect(),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    DomainSkip,
}

impl Verdict {
    fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::DomainSkip => "domain-skip",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub anchor: String,
    pub severity: Severity,
    pub verdict: Verdict,
    pub detail: String,
    /// Set when the failure is an internal inconsistency rather than a false claim.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub internal: bool,
    pub payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub domain_skip: usize,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub engine: &'static str,
    pub seed: u64,
    pub points: usize,
    pub tolerance: f64,
    pub alphas: Vec<String>,
    pub pair: Option<[String; 2]>,
    pub conventions: Value,
    pub checks: Vec<CheckReport>,
    pub summary: Summary,
}

impl Report {
    /// 0 when nothing failed, 3 on internal inconsistency, else 1.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.internal) {
            3
        } else if self.summary.fail > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = write!(out, "{:<11} {}", c.verdict.label().to_uppercase(), c.id);
            if let Some(ms) = c.elapsed_ms {
                let _ = write!(out, " ({ms:.0} ms)");
            }
            let _ = writeln!(out, "\n            {}", c.detail);
        }
        let _ = writeln!(
            out,
            "\n{} passed, {} failed, {} skipped (seed {})",
            self.summary.pass, self.summary.fail, self.summary.domain_skip, self.seed
        );
        out
    }
}

/// Conventions embedded in every report.
pub fn conventions() -> Value {
    serde_json::json!({
        "metric": "g = 2 theta1 theta5 - 2 theta2 theta4 + 4/3 theta3 theta3 with a b = (a(x)b + b(x)a)/2",
        "christoffel": "Gamma^a_bc = 1/2 g^ad (d_b g_dc + d_c g_db - d_d g_bc)",
        "riemann": "R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb",
        "ricci": "Ric_bd = R^a_bad",
        "schouten": "P = (Ric - R g / (2(n-1))) / (n-2), n = 5",
        "weyl": "C_abcd = R_abcd - (P_ac g_bd - P_ad g_bc + P_bd g_ac - P_bc g_ad)",
        "flatness": "max|C_abcd| / max|R_abcd| < tolerance at every sample point",
        "oracle": {
            "christoffel_step": g2monge::cartan::FD_STEP,
            "outer_step": g2monge::cartan::FD_OUTER_STEP,
            "agreement": g2monge::cartan::PATH_AGREEMENT,
        },
        "sampling": "coordinates drawn from k/6, k = 2..18, by ChaCha8 seeded with the report seed; guard failures are redrawn",
    })
}

/// Instances matching `selection` (all when empty). A selector matches an
/// instance id exactly or its check id.
pub fn select<'a>(
    checks: &'a [Check],
    selection: &[String],
    s: &'a Settings,
) -> Result<Vec<Instance<'a>>, VerifyError> {
    for sel in selection {
        let known = checks.iter().any(|c| {
            c.id == sel || c.instances(s).iter().any(|i| i.id == *sel)
        });
        if !known {
            return Err(VerifyError::UnknownCheck(sel.clone()));
        }
    }
    Ok(checks
        .iter()
        .flat_map(|c| c.instances(s))
        .filter(|i| selection.is_empty() || selection.iter().any(|s| *s == i.id || s == i.check.id))
        .collect())
}

fn execute(inst: &Instance) -> CheckReport {
    let start = Instant::now();
    let res = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| (inst.check.body)(inst)));
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let (verdict, detail, internal, payload) = match res {
        Ok(Ok(o)) => (
            if o.pass { Verdict::Pass } else { Verdict::Fail },
            o.detail,
            false,
            o.payload,
        ),
        Ok(Err(e @ (Error::GuardViolation(_) | Error::DomainViolation(_)))) => {
            (Verdict::DomainSkip, e.to_string(), false, Value::Null)
        }
        Ok(Err(
            e @ (Error::InconsistentRank { .. } | Error::OracleDisagreement(_) | Error::Internal(_)),
        )) => (Verdict::Fail, e.to_string(), true, Value::Null),
        Ok(Err(e)) => (Verdict::Fail, e.to_string(), false, Value::Null),
        Err(_) => (Verdict::Fail, "check panicked".into(), true, Value::Null),
    };
    CheckReport {
        id: inst.id.clone(),
        anchor: inst.check.anchor.to_string(),
        severity: inst.check.severity,
        verdict,
        detail,
        internal,
        payload,
        elapsed_ms: inst.settings.timings.then_some(elapsed),
    }
}

/// Runs the selected instances on a pool of `threads` workers (rayon default
/// when `None`) and merges the results in registry order.
pub fn run(selection: &[String], s: &Settings, threads: Option<usize>) -> Result<Report, VerifyError> {
    let checks = registry();
    let instances = select(&checks, selection, s)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| VerifyError::Pool(e.to_string()))?;
    let reports: Vec<CheckReport> = pool.install(|| instances.par_iter().map(execute).collect());
    let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
    let summary = Summary {
        pass: count(Verdict::Pass),
        fail: count(Verdict::Fail),
        domain_skip: count(Verdict::DomainSkip),
    };
    Ok(Report {
        schema: SCHEMA,
        engine: env!("CARGO_PKG_VERSION"),
        seed: s.seed,
        points: s.points,
        tolerance: s.tol,
        alphas: s.alphas.iter().map(fmt_rat).collect(),
        pair: s.pair.map(|(b, g)| [fmt_rat(&b), fmt_rat(&g)]),
        conventions: conventions(),
        checks: reports,
        summary,
    })
}

/// One line per registered check: id, severity, anchor.
pub fn list() -> String {
    registry()
        .iter()
        .map(|c| format!("{:<30} {:<12} {}\n", c.id, format!("{:?}", c.severity).to_lowercase(), c.anchor))
        .collect()
}

/// Anchor plus the catalogue objects the check uses, serialized.
pub fn explain(id: &str) -> Result<String, VerifyError> {
    let checks = registry();
    let c = checks
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| VerifyError::UnknownCheck(id.to_string()))?;
    let mut out = format!("{}\n  {}\n  severity: {:?}\n", c.id, c.anchor, c.severity);
    for name in c.objects {
        let _ = writeln!(out, "\n[{name}]");
        match g2monge::models::dump(name, &Default::default()) {
            Ok(text) => out += &text,
            Err(e) => {
                let _ = writeln!(out, "unavailable: {e}");
            }
        }
    }
    Ok(out)
}
