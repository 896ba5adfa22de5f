//! Verification suites. Each suite is a list of independent exact checks;
//! [`run`] executes them concurrently and assembles a [`Report`] in a fixed
//! order.

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{
    check_fontaine_condition, check_trivzero, hecke_parameters, is_p_power_times_root_of_unity, ordinarity,
    regulator_constant, regulator_consistency_residual, valuations_of, weil_check, FontaineVerdict, HeckePolynomial,
};
use crate::coset::cache::Cache;
use crate::coset::{coset_key, decompose_at_depth, decompose_cached, default_depth, Level, SUPPORTED_PRIMES};
use crate::error::{Error, Result};
use crate::group::{iwasawa_ntk, root_element, weyl_w1, weyl_w2, GroupElement, Root, TorusElement};
use crate::induced::{HeckeElement, InducedVector, PrincipalSeries, TransposeNormalization, T_KL, T_SIEG};
use crate::linalg::UniPoly;
use crate::scalar::rational::{rat, rat2};
use crate::scalar::{Cyclotomic, PMode, Rational, Scalar, SymbolSet};
use crate::whittaker::{
    cs_constant, cs_gl2, cs_gsp4, is_whittaker_dominant, recursion_value, solve_spherical_recursion, WhittakerFunctional,
};
use crate::zeta::{
    assemble_ztilde, bare_torus_integral, displayed, f_series_siegel, matches_displayed, NamedTestDatum, TestDatumTag,
    TwistCharacters,
};

pub const REPORT_VERSION: &str = "1.0";

/// Weights for the Hecke-eigenvector suites.
pub const HECKE_WEIGHTS: [(i32, i32); 3] = [(1, 0), (1, 1), (2, 1)];
/// Weights for the zeta-integral suites.
pub const ZETA_WEIGHTS: [(i32, i32); 3] = [(1, 0), (2, 1), (2, 2)];
/// Weights for the regulator bookkeeping.
pub const CONSTANT_WEIGHTS: [(i32, i32); 6] = [(0, 0), (1, 0), (1, 1), (2, 1), (3, 1), (2, 2)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Dimensions,
    Eigenvalues,
    Eigenvectors,
    Trace,
    Dual,
    Whittaker,
    Fseries,
    Zeta,
    Constants,
    Arithmetic,
    Properties,
}

impl SuiteName {
    /// In order of cost, cheapest first.
    pub const ALL: [SuiteName; 11] = [
        SuiteName::Dimensions,
        SuiteName::Properties,
        SuiteName::Eigenvalues,
        SuiteName::Eigenvectors,
        SuiteName::Trace,
        SuiteName::Dual,
        SuiteName::Whittaker,
        SuiteName::Fseries,
        SuiteName::Zeta,
        SuiteName::Constants,
        SuiteName::Arithmetic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteName::Dimensions => "dimensions",
            SuiteName::Eigenvalues => "eigenvalues",
            SuiteName::Eigenvectors => "eigenvectors",
            SuiteName::Trace => "trace",
            SuiteName::Dual => "dual",
            SuiteName::Whittaker => "whittaker",
            SuiteName::Fseries => "fseries",
            SuiteName::Zeta => "zeta",
            SuiteName::Constants => "constants",
            SuiteName::Arithmetic => "arithmetic",
            SuiteName::Properties => "properties",
        }
    }

    /// The acceptance criterion this suite covers, numbered 1 to 11.
    pub fn criterion(self) -> u8 {
        match self {
            SuiteName::Dimensions => 1,
            SuiteName::Eigenvalues => 2,
            SuiteName::Eigenvectors => 3,
            SuiteName::Trace => 4,
            SuiteName::Dual => 5,
            SuiteName::Whittaker => 6,
            SuiteName::Fseries => 7,
            SuiteName::Zeta => 8,
            SuiteName::Constants => 9,
            SuiteName::Arithmetic => 10,
            SuiteName::Properties => 11,
        }
    }

    pub fn parse(s: &str) -> Result<Vec<SuiteName>> {
        if s == "all" {
            return Ok(SuiteName::ALL.to_vec());
        }
        SuiteName::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .map(|n| vec![n])
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub primes: Vec<u32>,
    /// Restrict every suite to one weight pair.
    pub weights: Option<(i32, i32)>,
    /// Restrict the zeta and constant suites to one `(q, r)`.
    pub qr: Option<(i32, i32)>,
    /// Run the symbolic-`p` variants where a suite has them.
    pub symbolic: bool,
    /// Run at the numeric primes where a suite allows both.
    pub numeric: bool,
    /// Random cases per property check.
    pub property_cases: usize,
    pub seed: u64,
    /// Keep only checks whose id contains this string.
    pub filter: Option<String>,
    #[serde(skip)]
    pub parallelism: usize,
    #[serde(skip)]
    pub cache: Option<std::path::PathBuf>,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            primes: vec![2, 3],
            weights: None,
            qr: None,
            symbolic: true,
            numeric: true,
            property_cases: 500,
            seed: 0x6573_7034,
            filter: None,
            parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cache: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.primes.is_empty() {
            return Err(Error::Range("no primes selected".into()));
        }
        if let Some(&p) = self.primes.iter().find(|p| !SUPPORTED_PRIMES.contains(p)) {
            return Err(Error::Unsupported(format!("prime {p}; supported: {SUPPORTED_PRIMES:?}")));
        }
        if let Some((r1, r2)) = self.weights {
            if !(0 <= r2 && r2 <= r1) {
                return Err(Error::Range(format!("need 0 ≤ r2 ≤ r1, got ({r1}, {r2})")));
            }
            if let Some((q, r)) = self.qr {
                crate::arith::check_qr(q, r, r1, r2)?;
            }
        }
        if !self.symbolic && !self.numeric {
            return Err(Error::Range("neither symbolic nor numeric mode selected".into()));
        }
        Ok(())
    }

    fn weights_or(&self, grid: &[(i32, i32)]) -> Vec<(i32, i32)> {
        self.weights.map_or_else(|| grid.to_vec(), |w| vec![w])
    }

    fn qr_pairs(&self, r1: i32, r2: i32) -> Vec<(i32, i32)> {
        let all: Vec<(i32, i32)> = (0..=r2).flat_map(|q| (0..=r1 - r2).map(move |r| (q, r))).collect();
        match self.qr {
            Some(qr) => all.into_iter().filter(|&x| x == qr).collect(),
            None => all,
        }
    }

    /// Modes for suites that run both symbolically and at numeric primes.
    fn modes(&self) -> Vec<PMode> {
        let mut out = Vec::new();
        if self.symbolic {
            out.push(PMode::Symbolic);
        }
        if self.numeric {
            out.extend(self.primes.iter().map(|&p| PMode::Numeric(p)));
        }
        out
    }

    /// Modes for identities required in symbolic `p`, with numeric spot checks.
    fn symbolic_first_modes(&self) -> Vec<PMode> {
        let mut out = vec![PMode::Symbolic];
        if self.numeric {
            out.extend(self.primes.iter().map(|&p| PMode::Numeric(p)));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// A check's verdict. `residual` holds the nonzero difference on failure, or
/// the reported quantity for checks that report rather than assert.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub residual: Option<String>,
}

impl Outcome {
    pub fn zero(residual: &Scalar) -> Outcome {
        match residual.is_zero() {
            true => Outcome { status: Status::Pass, residual: None },
            false => Outcome { status: Status::Fail, residual: Some(residual.to_string()) },
        }
    }

    pub fn equal(a: &Scalar, b: &Scalar) -> Outcome {
        Outcome::zero(&(a - b))
    }

    /// Passes when the residual is nonzero, and always shows it.
    pub fn nonzero(residual: &Scalar) -> Outcome {
        let status = if residual.is_zero() { Status::Fail } else { Status::Pass };
        Outcome { status, residual: Some(residual.to_string()) }
    }

    pub fn holds(ok: bool, detail: impl FnOnce() -> String) -> Outcome {
        match ok {
            true => Outcome { status: Status::Pass, residual: None },
            false => Outcome { status: Status::Fail, residual: Some(detail()) },
        }
    }

    pub fn reported(text: String) -> Outcome {
        Outcome { status: Status::Pass, residual: Some(text) }
    }

    /// Conjunction: the first failure wins.
    pub fn and(self, o: Outcome) -> Outcome {
        match self.status {
            Status::Pass => o,
            _ => self,
        }
    }
}

type Job = Box<dyn FnOnce() -> Result<Outcome> + Send>;

pub struct Check {
    pub id: String,
    pub paper_ref: &'static str,
    job: Job,
}

impl Check {
    pub fn new(id: String, paper_ref: &'static str, job: impl FnOnce() -> Result<Outcome> + Send + 'static) -> Check {
        Check { id, paper_ref, job: Box::new(job) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub paper_ref: &'static str,
    pub status: Status,
    pub residual: Option<String>,
    pub ms: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub config: serde_json::Value,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn count(&self, s: Status) -> usize {
        self.checks.iter().filter(|c| c.status == s).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per check, then totals.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skip => "skip",
            };
            out.push_str(&format!("{tag}  {}  ({} ms)", c.id, c.ms));
            if let Some(r) = c.residual.as_ref().filter(|_| c.status != Status::Pass) {
                out.push_str(&format!("\n      residual: {r}"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "{} passed, {} failed, {} skipped\n",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skip)
        ));
        out
    }
}

/// The checks of one suite, in report order.
pub fn checks(suite: SuiteName, cfg: &RunConfig) -> Vec<Check> {
    match suite {
        SuiteName::Dimensions => dimension_checks(cfg),
        SuiteName::Eigenvalues => eigenvalue_checks(cfg),
        SuiteName::Eigenvectors => eigenvector_checks(cfg),
        SuiteName::Trace => trace_checks(cfg),
        SuiteName::Dual => dual_checks(cfg),
        SuiteName::Whittaker => whittaker_checks(cfg),
        SuiteName::Fseries => fseries_checks(cfg),
        SuiteName::Zeta => zeta_checks(cfg),
        SuiteName::Constants => constant_checks(cfg),
        SuiteName::Arithmetic => arithmetic_checks(cfg),
        SuiteName::Properties => property_checks(cfg),
    }
}

/// Validate, run every check of the selected suites, and assemble the report.
pub fn run(suites: &[SuiteName], cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let all: Vec<Check> = suites
        .iter()
        .flat_map(|&s| checks(s, cfg))
        .filter(|c| cfg.filter.as_ref().is_none_or(|f| c.id.contains(f.as_str())))
        .collect();
    let meta: Vec<(String, &'static str)> = all.iter().map(|c| (c.id.clone(), c.paper_ref)).collect();
    let jobs: Vec<Mutex<Option<Job>>> = all.into_iter().map(|c| Mutex::new(Some(c.job))).collect();
    let results: Vec<Mutex<Option<(Outcome, u64)>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = cfg.parallelism.clamp(1, jobs.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(slot) = jobs.get(i) else { break };
                let job = slot.lock().unwrap().take().expect("each job runs once");
                let start = Instant::now();
                let outcome = match job() {
                    Ok(o) => o,
                    Err(e @ Error::Pole(_)) => Outcome { status: Status::Skip, residual: Some(e.to_string()) },
                    Err(e) => Outcome { status: Status::Fail, residual: Some(format!("error: {e}")) },
                };
                *results[i].lock().unwrap() = Some((outcome, start.elapsed().as_millis() as u64));
            });
        }
    });
    let checks = meta
        .into_iter()
        .zip(results)
        .map(|((id, paper_ref), r)| {
            let (o, ms) = r.into_inner().unwrap().expect("every job ran");
            CheckResult { id, paper_ref, status: o.status, residual: o.residual, ms }
        })
        .collect();
    let mut config = serde_json::to_value(cfg).expect("config serializes");
    config["suites"] = suites.iter().map(|s| s.name()).collect::<Vec<_>>().into();
    Ok(Report { version: REPORT_VERSION, config, checks })
}

fn at(p: u32, (r1, r2): (i32, i32)) -> String {
    format!("p={p},w={r1},{r2}")
}

fn mode_tag(mode: PMode) -> String {
    match mode {
        PMode::Symbolic => "p=sym".into(),
        PMode::Numeric(p) => format!("p={p}"),
    }
}

fn first_nonzero(v: &InducedVector) -> String {
    v.values
        .iter()
        .enumerate()
        .find(|(_, x)| !x.is_zero())
        .map_or_else(|| "0".into(), |(i, x)| format!("cell {i}: {x}"))
}

fn vector_zero(v: &InducedVector) -> Outcome {
    Outcome::holds(v.is_zero(), || first_nonzero(v))
}

/// `T v - λ v`.
fn eigen_defect(ps: &PrincipalSeries, op: &HeckeElement, v: &InducedVector, lambda: &Scalar) -> Result<InducedVector> {
    ps.hecke_apply(op, v)?.sub(&v.scale(lambda))
}

fn is_one(v: &Cyclotomic<Scalar>) -> Outcome {
    let p = v.prime();
    Outcome::holds(v.as_base().is_some_and(|x| x.is_one()), || v.sub(&Cyclotomic::one(p)).to_string())
}

fn ab_over_q(ss: &SymbolSet) -> Scalar {
    &(&ss.alpha() * &ss.beta()) / &ss.p_pow(ss.r2 + 1)
}

/// `1 - x`.
fn one_minus(ss: &SymbolSet, x: Scalar) -> Scalar {
    &ss.int(1) - &x
}

/// `(1 - γ/(pβ))(1 - δ/(pα))(1 - δ/(pβ))`.
fn trace_factor(ss: &SymbolSet) -> Scalar {
    let [a, b, g, d] = ss.params();
    let p = ss.p();
    &(&one_minus(ss, &g / &(&p * &b)) * &one_minus(ss, &d / &(&p * &a))) * &one_minus(ss, &d / &(&p * &b))
}

fn dimension_checks(cfg: &RunConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &p in &cfg.primes {
        out.push(Check::new(format!("dimensions/invariants/p={p}"), "dimensions of parahoric-fixed vectors", move || {
            let ps = PrincipalSeries::new(p, 1, 0);
            let got = [ps.dim(Level::iwahori(1))?, ps.dim(Level::siegel(1))?, ps.dim(Level::klingen(1))?];
            Ok(Outcome::holds(got == [8, 4, 4], || format!("Iw, Sieg, Kl dimensions {got:?}")))
        }));
        let cache = cfg.cache.clone();
        out.push(Check::new(
            format!("dimensions/coset-counts/p={p}"),
            "left coset counts of the U operators",
            move || {
                // [K t K : K] = p^{Σ ⟨α, t⟩} over the roots in the unipotent radical of K's parabolic.
                let cases: [(Level, TorusElement, &[Root]); 5] = [
                    (Level::siegel(1), T_SIEG, &[Root::R23, Root::R13, Root::R14]),
                    (Level::klingen(1), T_KL, &[Root::R12, Root::R13, Root::R14]),
                    (Level::iwahori(1), T_SIEG, &Root::ALL),
                    (Level::iwahori(1), T_KL, &Root::ALL),
                    (Level::SPHERICAL, T_SIEG, &[]),
                ];
                let mut outcome = Outcome::holds(true, String::new);
                for (level, t, radical) in cases {
                    let d = match &cache {
                        Some(dir) => decompose_cached(&Cache::new(dir), &t, level, p)?,
                        None => crate::coset::decompose_double_coset(&t, level, p)?,
                    };
                    let expected = if level == Level::SPHERICAL {
                        (1 + p as usize) * (1 + (p * p) as usize)
                    } else {
                        (p as usize).pow(radical.iter().map(|r| t.pair(r.functional()) as u32).sum())
                    };
                    outcome = outcome
                        .and(Outcome::holds(d.len() == expected, || format!("{level} {t}: {} cosets, expected {expected}", d.len())));
                }
                Ok(outcome)
            },
        ));
    }
    out
}

fn eigenvalue_checks(cfg: &RunConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &p in &cfg.primes {
        for w in cfg.weights_or(&HECKE_WEIGHTS) {
            out.push(Check::new(format!("eigenvalues/u1-siegel/{}", at(p, w)), "Siegel U-operator eigenvalues", move || {
                let ps = PrincipalSeries::new(p, w.0, w.1);
                let cp = ps.charpoly(&HeckeElement::u1_sieg(&ps.ss))?;
                let expected = UniPoly::from_roots(&ps.ss.params());
                Ok(Outcome::holds(cp == expected, || format!("charpoly {cp:?}")))
            }));
            out.push(Check::new(format!("eigenvalues/u2-klingen/{}", at(p, w)), "Klingen U-operator eigenvalue", move || {
                let ps = PrincipalSeries::new(p, w.0, w.1);
                let cp = ps.charpoly(&HeckeElement::u2_kl(&ps.ss))?;
                Ok(Outcome::zero(&cp.eval(&ab_over_q(&ps.ss))))
            }));
            out.push(Check::new(
                format!("eigenvalues/u2-klingen-spectrum/{}", at(p, w)),
                "full Klingen U-operator spectrum (reported)",
                move || {
                    let ps = PrincipalSeries::new(p, w.0, w.1);
                    let ss = ps.ss;
                    let cp = ps.charpoly(&HeckeElement::u2_kl(&ss))?;
                    let [a, b, g, d] = ss.params();
                    let q = ss.p_pow(ss.r2 + 1);
                    let roots = [&a * &b, &a * &g, &b * &d, &g * &d].map(|x| &x / &q);
                    let text = if cp == UniPoly::from_roots(&roots) {
                        "{αβ, αγ, βδ, γδ}/p^(r2+1)".to_string()
                    } else {
                        format!("charpoly {cp:?}")
                    };
                    Ok(Outcome::reported(text))
                },
            ));
        }
    }
    out
}

fn eigenvector_checks(cfg: &RunConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &p in &cfg.primes {
        for w in cfg.weights_or(&HECKE_WEIGHTS) {
            out.push(Check::new(
                format!("eigenvectors/siegel/{}", at(p, w)),
                "Siegel eigenvector is normalized",
                move || {
                    let ps = PrincipalSeries::new(p, w.0, w.1);
                    let op = HeckeElement::u1_sieg(&ps.ss);
                    let v = ps.siegel_combination()?;
                    let eig = vector_zero(&eigen_defect(&ps, &op, &v, &ps.ss.alpha())?);
                    let val = WhittakerFunctional::from_powers(&ps, &op)?.eval(&v)?;
                    Ok(eig.and(is_one(&val)))
                },
            ));
            out.push(Check::new(
                format!("eigenvectors/klingen/{}", at(p, w)),
                "Klingen eigenvector is normalized (γδ factor)",
                move || {
                    let ps = PrincipalSeries::new(p, w.0, w.1);
                    let op = HeckeElement::u2_kl(&ps.ss);
                    let v = ps.klingen_combination(&op)?;
                    let eig = vector_zero(&eigen_defect(&ps, &op, &v, &ab_over_q(&ps.ss))?);
                    let val = WhittakerFunctional::from_powers(&ps, &op)?.eval(&v)?;
                    Ok(eig.and(is_one(&val)))
                },
            ));
            out.push(Check::new(
                format!("eigenvectors/klingen-printed-βγ/{}", at(p, w)),
                "Klingen combination with βγ factor is not an eigenvector",
                move || {
                    let ps = PrincipalSeries::new(p, w.0, w.1);
                    let op = HeckeElement::u2_kl(&ps.ss);
                    let v = ps.klingen_combination_with(&op, &(&ps.ss.beta() * &ps.ss.gamma()))?;
                    let defect = eigen_defect(&ps, &op, &v, &ab_over_q(&ps.ss))?;
                    Ok(Outcome { status: if defect.is_zero() { Status::Fail } else { Status::Pass }, residual: Some(first_nonzero(&defect)) })
                },
            ));
            out.push(Check::new(
                format!("eigenvectors/iwahori/{}", at(p, w)),
                "Iwahori eigenvector from both parahoric vectors",
                move || {
                    let ps = PrincipalSeries::new(p, w.0, w.1);
                    let ss = ps.ss;
                    let iw = Level::iwahori(1);
                    let (u1, u2) = (HeckeElement::u1_iw(&ss), HeckeElement::u2_iw(&ss));
                    let ws = ps.restrict_to(&ps.siegel_combination()?, iw)?;
                    let wk = ps.restrict_to(&ps.klingen_combination(&HeckeElement::u2_kl(&ss))?, iw)?;
                    let ag = &(&ss.alpha() * &ss.gamma()) / &ss.p_pow(ss.r2 + 1);
                    let from_sieg = ps.apply_inverse_factors(&u2, &[ag], &ws)?;
                    let from_kl = ps.apply_inverse_factors(&u1, &[ss.beta()], &wk)?;
                    let same = vector_zero(&from_sieg.sub(&from_kl)?);
                    let e1 = vector_zero(&eigen_defect(&ps, &u1, &from_sieg, &ss.alpha())?);
                    let e2 = vector_zero(&eigen_defect(&ps, &u2, &from_sieg, &ab_over_q(&ss))?);
                    let val = WhittakerFunctional::iwahori(&ps)?.eval(&from_sieg)?;
                    Ok(same.and(e1).and(e2).and(is_one(&val)))
                },
            ));
        }
    }
    out
}

fn trace_checks(cfg: &RunConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &p in &cfg.primes {
        for w in cfg.weights_or(&HECKE_WEIGHTS) {
            out.push(Check::new(format!("trace/klingen/{}", at(p, w)), "trace of the Klingen eigenvector", move || {
                let ps = PrincipalSeries::new(p, w.0, w.1);
                let v = ps.klingen_combination(&HeckeElement::u2_kl(&ps.ss))?;
                let tr = ps.trace_to_level(&v, Level::SPHERICAL)?;
                Ok(Outcome::equal(&tr.values[0], &(&ps.ss.p_pow(3) * &trace_factor(&ps.ss))))
            }));
            out.push(Check::new(
                format!("trace/variant-unshifted/{}", at(p, w)),
                "trace variant with unshifted terms (1 - γ/β)",
                move || {
                    let ps = PrincipalSeries::new(p, w.0, w.1);
                    let ss = ps.ss;
                    let [a, b, g, d] = ss.params();
                    let pp = ss.p();
                    let v = ps.klingen_combination(&HeckeElement::u2_kl(&ss))?;
                    let tr = ps.trace_to_level(&v, Level::SPHERICAL)?;
                    let variant = &(&(&ss.p_pow(3) * &one_minus(&ss, &g / &b)) * &one_minus(&ss, &d / &(&pp * &a)))
                        * &one_minus(&ss, &d / &(&pp * &b));
                    Ok(Outcome::nonzero(&(&tr.values[0] - &variant)))
                },
            ));
        }
    }
    out
}

fn dual_checks(cfg: &RunConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &p in &cfg.primes {
        for w in cfg.weights_or(&HECKE_WEIGHTS) {
            let series = move || PrincipalSeries::new(p, w.0, w.1);
            out.push(Check::new(format!("dual/eigenvector/{}", at(p, w)), "transpose Klingen eigenvector", move || {
                let ps = series();
                let op = HeckeElement::u2_kl_transpose(&ps.ss, TransposeNormalization::PowR1);
                let v = ps.klingen_combination(&op)?;
                Ok(vector_zero(&eigen_defect(&ps, &op, &v, &ab_over_q(&ps.ss))?))
            }));
            out.push(Check::new(format!("dual/trace-equality/{}", at(p, w)), "dual trace equals Klingen trace", move || {
                let ps = series();
                let op = HeckeElement::u2_kl(&ps.ss);
                let dual = HeckeElement::u2_kl_transpose(&ps.ss, TransposeNormalization::PowR1);
                let t1 = ps.trace_to_level(&ps.klingen_combination(&op)?, Level::SPHERICAL)?;
                let t2 = ps.trace_to_level(&ps.klingen_combination(&dual)?, Level::SPHERICAL)?;
                Ok(Outcome::equal(&t1.values[0], &t2.values[0]))
            }));
            out.push(Check::new(format!("dual/phi1-trace/{}", at(p, w)), "trace of the Klingen-supported vector", move || {
                let ps = series();
                let phi = ps.phi1_vector()?;
                let op = HeckeElement::u2_kl_transpose(&ps.ss, TransposeNormalization::PowR1);
                let eig = vector_zero(&eigen_defect(&ps, &op, &phi, &ab_over_q(&ps.ss))?);
                let tr = ps.trace_to_level(&phi, Level::SPHERICAL)?;
                Ok(eig.and(Outcome::equal(&tr.values[0], &ps.ss.p_pow(3))))
            }));
            out.push(Check::new(
                format!("dual/phi1-image/{}", at(p, w)),
                "Whittaker image of the Klingen-supported vector",
                move || {
                    let ps = series();
                    let ss = ps.ss;
                    let op = HeckeElement::u2_kl_transpose(&ss, TransposeNormalization::PowR1);
                    let lambda = ab_over_q(&ss);
                    // A simple eigenvalue makes the eigenspace a line.
                    ps.eigenvector(&op, &lambda)?;
                    let dual = ps.klingen_combination(&op)?;
                    let c = one_minus(&ss, &ss.beta() / &(&ss.p() * &ss.alpha()));
                    // Trace route: Tr(φ1) = p³ sph maps to p³ c_CS w_sph, and Tr(c w') = c p³ F w_sph.
                    let by_trace = Outcome::equal(&(&ss.p_pow(3) * &cs_constant(&ss)), &(&c * &ps.trace_to_level(&dual, Level::SPHERICAL)?.values[0]));
                    let direct = match ps.phi1_vector()?.ratio_to(&dual) {
                        Some(k) => Outcome::equal(&k, &c.checked_div(&cs_constant(&ss))?),
                        None => Outcome::holds(false, || "φ1 is not proportional to the dual vector".into()),
                    };
                    Ok(by_trace.and(direct))
                },
            ));
            out.push(Check::new(
                format!("dual/normalization/{}", at(p, w)),
                "transpose operator normalization (reported)",
                move || {
                    let ps = series();
                    let lambda = ab_over_q(&ps.ss);
                    let mut parts = Vec::new();
                    for (name, norm) in [("p^r1", TransposeNormalization::PowR1), ("p^-r2", TransposeNormalization::PowMinusR2)] {
                        let cp = ps.charpoly(&HeckeElement::u2_kl_transpose(&ps.ss, norm))?;
                        let has = cp.eval(&lambda).is_zero();
                        parts.push(format!("{name}: αβ/p^(r2+1) {} an eigenvalue", if has { "is" } else { "is not" }));
                    }
                    Ok(Outcome::reported(parts.join("; ")))
                },
            ));
            out.push(Check::new(
                format!("dual/value-at-identity/{}", at(p, w)),
                "Whittaker value of the dual vector at the identity (reported)",
                move || {
                    let ps = series();
                    let op = HeckeElement::u2_kl_transpose(&ps.ss, TransposeNormalization::PowR1);
                    let v = ps.klingen_combination(&op)?;
                    Ok(Outcome::reported(WhittakerFunctional::from_powers(&ps, &op)?.eval(&v)?.to_string()))
                },
            ));
        }
    }
    out
}

/// Height of the spherical recursion reaching every coweight with entries in `0..=2`.
pub const RECURSION_HEIGHT: i32 = 4;

fn whittaker_checks(cfg: &RunConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &p in &cfg.primes {
        for w in cfg.weights_or(&HECKE_WEIGHTS) {
            out.push(Check::new(
                format!("whittaker/recursion/{}", at(p, w)),
                "spherical Whittaker values against the Hecke recursion",
                move || {
                    let ps = PrincipalSeries::new(p, w.0, w.1);
                    let table = solve_spherical_recursion(RECURSION_HEIGHT, &ps)?;
                    let mut outcome = Outcome::holds(true, String::new);
                    for n1 in 0..=2 {
                        for n2 in 0..=2 {
                            for n0 in 0..=2 {
                                let t = TorusElement::new(n1, n2, n0);
                                if !is_whittaker_dominant(&t) {
                                    continue;
                                }
                                let o = match recursion_value(&table, &t, &ps.ss) {
                                    Some(v) => Outcome::equal(&v, &cs_gsp4(&t, &ps.ss)),
                                    None => Outcome::holds(false, || format!("{t} beyond the recursion table")),
                                };
                                outcome = outcome.and(o);
                            }
                        }
                    }
                    Ok(outcome)
                },
            ));
        }
    }
    for mode in cfg.symbolic_first_modes() {
        for w in cfg.weights_or(&HECKE_WEIGHTS) {
            out.push(Check::new(
                format!("whittaker/gl2/{}/w={},{}", mode_tag(mode), w.0, w.1),
                "GL2 spherical Whittaker values on the torus",
                move || {
                    let ss = SymbolSet::new(mode, w.0, w.1);
                    // Normalized Satake parameters a' = p^{-w/2}α, b' = p^{-w/2}β;
                    // T_p W = p^{1/2}(a' + b') W gives p W(n+1) = λ W(n) - a'b' W(n-1).
                    let a = &ss.p_half(-ss.w()) * &ss.alpha();
                    let b = &ss.p_half(-ss.w()) * &ss.beta();
                    let lambda = &ss.sqrt_p() * &(&a + &b);
                    let mut outcome = Outcome::equal(&cs_gl2(0, &ss), &ss.int(1));
                    for n in 0..=4 {
                        let lhs = &ss.p() * &cs_gl2(n + 1, &ss);
                        let rhs = &(&lambda * &cs_gl2(n, &ss)) - &(&(&a * &b) * &cs_gl2(n - 1, &ss));
                        outcome = outcome.and(Outcome::equal(&lhs, &rhs));
                    }
                    Ok(outcome)
                },
            ));
        }
    }
    out
}

fn fseries_checks(cfg: &RunConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for mode in cfg.symbolic_first_modes() {
        for w in cfg.weights_or(&ZETA_WEIGHTS) {
            let ss = SymbolSet::new(mode, w.0, w.1);
            for r in (0..=w.0 - w.1).filter(|&r| cfg.qr.is_none_or(|(_, r0)| r0 == r)) {
                out.push(Check::new(
                    format!("fseries/siegel-series/{}/w={},{}/r={r}", mode_tag(mode), w.0, w.1),
                    "generating series of the Siegel eigenvector",
                    move || {
                        let got = f_series_siegel(r, &ss)?;
                        let expected = displayed::f_series_siegel(r, &ss)?;
                        Ok(Outcome::zero(got.sub(&expected).scalar()))
                    },
                ));
            }
            for (q, r) in cfg.qr_pairs(w.0, w.1) {
                out.push(Check::new(
                    format!("fseries/siegel-zeta/{}/w={},{}/q={q},r={r}", mode_tag(mode), w.0, w.1),
                    "Siegel zeta integral closed form",
                    move || {
                        let got = assemble_ztilde(&NamedTestDatum::new(TestDatumTag::SiegelAlpha, q, r), &ss)?;
                        Ok(Outcome::equal(&got, &displayed::siegel_alpha(q, r, &ss)))
                    },
                ));
            }
        }
    }
    out
}

fn sample_datum(tag: TestDatumTag, q: i32, r: i32, mode: PMode) -> Result<NamedTestDatum> {
    let d = NamedTestDatum::new(tag, q, r);
    match tag.is_twisted() {
        true => Ok(d.with_twist(TwistCharacters::sample(tag, mode.prime().unwrap_or(3))?)),
        false => Ok(d),
    }
}

fn zeta_checks(cfg: &RunConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for mode in cfg.modes() {
        for w in cfg.weights_or(&ZETA_WEIGHTS) {
            let ss = SymbolSet::new(mode, w.0, w.1);
            for (q, r) in cfg.qr_pairs(w.0, w.1) {
                for tag in TestDatumTag::ALL {
                    out.push(Check::new(
                        format!("zeta/{}/{}/w={},{}/q={q},r={r}", tag.name(), mode_tag(mode), w.0, w.1),
                        zeta_ref(tag),
                        move || {
                            let d = sample_datum(tag, q, r, mode)?;
                            if matches_displayed(&d, &ss)? {
                                return Ok(Outcome::holds(true, String::new));
                            }
                            let got = match displayed::value(&d, &ss) {
                                Some(_) => assemble_ztilde(&d, &ss)?,
                                None => bare_torus_integral(&d, &ss)?,
                            };
                            let expected = displayed::value(&d, &ss).or_else(|| displayed::bare_table(tag, q, &ss));
                            Ok(Outcome::holds(false, || {
                                format!("computed {got}, closed form {}", expected.map_or("none".into(), |e| e.to_string()))
                            }))
                        },
                    ));
                }
            }
        }
    }
    out
}

fn zeta_ref(tag: TestDatumTag) -> &'static str {
    match tag {
        TestDatumTag::Spherical => "normalized zeta integral of spherical data",
        TestDatumTag::SiegelAlpha => "Siegel zeta integral closed form",
        TestDatumTag::KlingenCritCrit => "Klingen zeta integral for critical-slope data",
        TestDatumTag::KlingenDepCrit | TestDatumTag::KlingenCritDep | TestDatumTag::KlingenDepDep => {
            "torus integral table for depleted data"
        }
        TestDatumTag::TwistedDepDep | TestDatumTag::TwistedDepCrit | TestDatumTag::TwistedShiftedCrit => {
            "twisted torus integrals"
        }
    }
}

fn constant_checks(cfg: &RunConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for r2 in 0..=4 {
        out.push(Check::new(format!("constants/regulator/r2={r2}"), "regulator constant", move || {
            let mut outcome = Outcome::holds(true, String::new);
            for q in 0..=r2 {
                let mut expected = if r2 % 2 == 0 { rat(-1) } else { rat(1) };
                for _ in 0..q {
                    expected *= rat(2);
                }
                for i in 1..=(r2 - q) {
                    expected *= rat(i as i64);
                }
                let got = regulator_constant(q, r2)?;
                outcome = outcome.and(Outcome::holds(got == expected, || format!("q={q}: {got}, expected {expected}")));
            }
            Ok(outcome)
        }));
    }
    for mode in cfg.modes() {
        for w in cfg.weights_or(&CONSTANT_WEIGHTS) {
            let ss = SymbolSet::new(mode, w.0, w.1);
            for (q, r) in cfg.qr_pairs(w.0, w.1) {
                let id = format!("{}/w={},{}/q={q},r={r}", mode_tag(mode), w.0, w.1);
                out.push(Check::new(format!("constants/consistency/{id}"), "regulator formula bookkeeping", move || {
                    Ok(Outcome::zero(&regulator_consistency_residual(q, r, &ss, false)?))
                }));
                if q >= 1 {
                    out.push(Check::new(
                        format!("constants/mutation/{id}"),
                        "regulator bookkeeping without the power of two",
                        move || Ok(Outcome::nonzero(&regulator_consistency_residual(q, r, &ss, true)?)),
                    ));
                }
            }
        }
    }
    out
}

/// Fixture parameters at `p = 3`, weights `(1, 0)`, `χ(p) = 1`, so `αδ = βγ = 81`.
struct Fixture {
    name: &'static str,
    params: [Rational; 4],
}

fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture { name: "borel-ordinary", params: [rat(2), rat(15), rat2(27, 5), rat2(81, 2)] },
        Fixture { name: "negative-valuation", params: [rat2(1, 3), rat(15), rat2(27, 5), rat(243)] },
        Fixture { name: "middle-valuation", params: [rat(9), rat(9), rat(9), rat(9)] },
        Fixture { name: "fontaine-violation", params: [rat(1), rat(3), rat(27), rat(81)] },
    ]
}

fn weil_fixture(t: [i64; 2]) -> HeckePolynomial {
    // (1 - t1 X + 81 X²)(1 - t2 X + 81 X²).
    let (a, b) = (rat(-t[0]), rat(-t[1]));
    let k = rat(81);
    let coeffs = vec![rat(1), &a + &b, &k + &k + &a * &b, &k * (&a + &b), &k * &k];
    HeckePolynomial { p: 3, r1: 1, r2: 0, chi_p: rat(1), coeffs }
}

fn arithmetic_checks(_cfg: &RunConfig) -> Vec<Check> {
    let (p, r1, r2) = (3u32, 1, 0);
    let mut out = Vec::new();
    for f in fixtures() {
        let name = f.name;
        out.push(Check::new(format!("arithmetic/parameters/{name}"), "Hecke parameters from the Hecke polynomial", move || {
            let hp = HeckePolynomial::from_params(p, r1, r2, rat(1), &f.params);
            let json = serde_json::json!({
                "p": p, "r1": r1, "r2": r2, "chi_p": "1",
                "hecke_poly": hp.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            });
            let parsed = HeckePolynomial::from_json(&json.to_string())?;
            let mut got = hecke_parameters(&parsed)?.to_vec();
            let mut want = f.params.to_vec();
            got.sort();
            want.sort();
            Ok(Outcome::holds(parsed.satisfies_functional_equation() && got == want, || format!("recovered {got:?}")))
        }));
    }
    out.push(Check::new("arithmetic/ordinarity/borel-ordinary".into(), "ordinarity predicates", move || {
        let v = valuations_of(&fixtures()[0].params, p)?;
        let rep = ordinarity(&v, r2);
        Ok(Outcome::holds(rep.siegel && rep.klingen && rep.borel && rep.violations.is_empty(), || format!("{rep:?}")))
    }));
    out.push(Check::new("arithmetic/ordinarity/violation".into(), "ordinarity predicates", move || {
        let v = valuations_of(&fixtures()[1].params, p)?;
        let rep = ordinarity(&v, r2);
        Ok(Outcome::holds(rep.violations.len() == 2 && !rep.klingen, || format!("{rep:?}")))
    }));
    out.push(Check::new("arithmetic/trivial-zero/borel-ordinary".into(), "no trivial zero under Klingen ordinarity", move || {
        let f = &fixtures()[0];
        let ok = check_trivzero(&valuations_of(&f.params, p)?, r1, r2)?;
        let direct = f.params.iter().any(|x| is_p_power_times_root_of_unity(x, p) && x == &rat(9));
        Ok(Outcome::holds(ok && !direct, || "trivial-zero check failed on an ordinary fixture".into()))
    }));
    out.push(Check::new("arithmetic/trivial-zero/violation".into(), "no trivial zero under Klingen ordinarity", move || {
        let f = &fixtures()[2];
        let refused = matches!(check_trivzero(&valuations_of(&f.params, p)?, r1, r2), Err(Error::Hypothesis(_)));
        let present = f.params.iter().any(|x| is_p_power_times_root_of_unity(x, p) && x == &rat(9));
        Ok(Outcome::holds(refused && present, || format!("refused: {refused}, p^(w/2) present: {present}")))
    }));
    out.push(Check::new("arithmetic/fontaine/direct".into(), "bijectivity of 1 - φ on the crystalline module", move || {
        let params = &fixtures()[0].params;
        let cert = weil_check(&HeckePolynomial::from_params(p, r1, r2, rat(1), params))?;
        let v = check_fontaine_condition(Some(params), Some(&cert), p, r1, r2)?;
        Ok(Outcome::holds(!cert.holds && v == FontaineVerdict::Direct(true), || format!("{v:?}, {cert:?}")))
    }));
    out.push(Check::new("arithmetic/fontaine/violation".into(), "bijectivity of 1 - φ on the crystalline module", move || {
        let params = &fixtures()[3].params;
        let cert = weil_check(&HeckePolynomial::from_params(p, r1, r2, rat(1), params))?;
        let v = check_fontaine_condition(Some(params), Some(&cert), p, r1, r2)?;
        Ok(Outcome::holds(v == FontaineVerdict::Direct(false), || format!("{v:?}")))
    }));
    out.push(Check::new("arithmetic/fontaine/weil".into(), "bijectivity of 1 - φ on the crystalline module", move || {
        let cert = weil_check(&weil_fixture([1, 2]))?;
        let v = check_fontaine_condition(None, Some(&cert), p, r1, r2)?;
        Ok(Outcome::holds(cert.holds && v == FontaineVerdict::ByWeilArgument(true), || format!("{v:?}, {cert:?}")))
    }));
    out.push(Check::new("arithmetic/weil/violation".into(), "absolute values of Hecke parameters", move || {
        let hp = weil_fixture([30, 2]);
        let cert = weil_check(&hp)?;
        Ok(Outcome::holds(hp.satisfies_functional_equation() && !cert.holds, || format!("{cert:?}")))
    }));
    out
}

fn random_scalar(rng: &mut ChaCha8Rng, ss: &SymbolSet) -> Scalar {
    let term = |rng: &mut ChaCha8Rng| -> Scalar {
        let [a, b, _, d] = ss.params();
        let c = ss.int(rng.gen_range(-4..=4));
        let mono = &(&a.pow(rng.gen_range(-1..=2)) * &b.pow(rng.gen_range(-1..=1))) * &d.pow(rng.gen_range(-1..=1));
        let pp = if rng.gen_bool(0.3) { ss.sqrt_p() } else { ss.p_pow(rng.gen_range(-1..=1)) };
        &(&c * &mono) * &pp
    };
    let num: Scalar = (0..3).map(|_| term(rng)).sum();
    // Binomial denominators keep the gcds small.
    if rng.gen_bool(0.5) {
        let den = &ss.int(1) + &term(rng);
        if !den.is_zero() {
            return &num / &den;
        }
    }
    num
}

fn random_element(rng: &mut ChaCha8Rng, p: u32) -> GroupElement {
    let mut g = GroupElement::identity();
    for _ in 0..rng.gen_range(2..=6) {
        let f = match rng.gen_range(0..4) {
            0 | 1 => {
                let r = Root::ALL[rng.gen_range(0..4)];
                let den = if rng.gen_bool(0.4) { p as i64 } else { 1 };
                root_element(r, rng.gen_bool(0.5), &rat2(rng.gen_range(-6..=6), den))
            }
            2 => TorusElement::new(rng.gen_range(-1..=1), rng.gen_range(-1..=1), rng.gen_range(-1..=2)).to_element(p),
            _ => {
                if rng.gen_bool(0.5) {
                    weyl_w1()
                } else {
                    weyl_w2()
                }
            }
        };
        g = g.mul(&f);
    }
    g
}

fn property_checks(cfg: &RunConfig) -> Vec<Check> {
    let mut out = Vec::new();
    let cases = cfg.property_cases;
    for mode in cfg.modes() {
        let seed = cfg.seed;
        out.push(Check::new(format!("properties/field-axioms/{}", mode_tag(mode)), "exact scalar field axioms", move || {
            let ss = SymbolSet::new(mode, 2, 1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..cases / 5 {
                let (x, y, z) = (random_scalar(&mut rng, &ss), random_scalar(&mut rng, &ss), random_scalar(&mut rng, &ss));
                let assoc = &(&x + &y) + &z == &x + &(&y + &z) && &(&x * &y) * &z == &x * &(&y * &z);
                let comm = &x + &y == &y + &x && &x * &y == &y * &x;
                let dist = &x * &(&y + &z) == &(&x * &y) + &(&x * &z);
                let inv = x.is_zero() || (&x * &x.inv()?).is_one();
                let neg = (&x + &(-&x)).is_zero();
                if !(assoc && comm && dist && inv && neg) {
                    return Ok(Outcome::holds(false, || format!("x = {x}, y = {y}, z = {z}")));
                }
            }
            Ok(Outcome::holds(true, String::new))
        }));
    }
    for &p in &cfg.primes {
        let seed = cfg.seed;
        out.push(Check::new(format!("properties/iwasawa/p={p}"), "Iwasawa decomposition reconstructs", move || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p as u64);
            for _ in 0..cases.max(500) {
                let g = random_element(&mut rng, p);
                let (n, t, k) = iwasawa_ntk(&g, p);
                let ok = n.is_unipotent_upper() && k.in_hyperspecial(p) && n.mul(&t.to_element(p)).mul(&k) == g;
                if !ok {
                    return Ok(Outcome::holds(false, || format!("g = {g}")));
                }
            }
            Ok(Outcome::holds(true, String::new))
        }));
        out.push(Check::new(format!("properties/depth-stability/p={p}"), "coset decomposition is depth-independent", move || {
            let cases = [
                (Level::siegel(1), T_SIEG),
                (Level::klingen(1), T_KL),
                (Level::iwahori(1), T_SIEG),
                (Level::SPHERICAL, T_SIEG),
            ];
            for (level, t) in cases {
                let d = default_depth(&level, &t);
                let keys = |depth| -> Result<HashSet<_>> {
                    Ok(decompose_at_depth(&t, level, p, depth)?.reps.iter().map(|g| coset_key(g, &level, p)).collect())
                };
                if keys(d)? != keys(d + 1)? {
                    return Ok(Outcome::holds(false, || format!("{level} {t}: depths {d} and {} differ", d + 1)));
                }
            }
            Ok(Outcome::holds(true, String::new))
        }));
    }
    for mode in cfg.modes() {
        for w in cfg.weights_or(&ZETA_WEIGHTS) {
            out.push(Check::new(
                format!("properties/center-equivariance/{}/w={},{}", mode_tag(mode), w.0, w.1),
                "scaling Schwartz data by central elements",
                move || center_equivariance(mode, w),
            ));
        }
    }
    out
}

/// `Z̃(a·Φ) = Z̃(Φ) / (|a1|^{2s1} χ1(a1) |a2|^{2s2} χ2(a2))` for `a_i = p^{k_i}`,
/// at `s_i = -t_i/2`.
fn center_equivariance(mode: PMode, (r1, r2): (i32, i32)) -> Result<Outcome> {
    let ss = SymbolSet::new(mode, r1, r2);
    let mut outcome = Outcome::holds(true, String::new);
    for q in 0..=r2 {
        for r in 0..=r1 - r2 {
            let t = crate::zeta::critical_shifts(q, r, &ss);
            for tag in TestDatumTag::ALL {
                let base = sample_datum(tag, q, r, mode)?;
                let z0 = assemble_ztilde(&base, &ss)?;
                for k in [[1, 0], [0, 1], [2, -1], [-1, 3]] {
                    let z = assemble_ztilde(&base.clone().with_center(k), &ss)?;
                    // |p^k|^{2s} = p^{-2ks} = p^{k t}.
                    let abs = |k: i32, t: i32| ss.p_pow(k * t);
                    let denom = &(&abs(k[0], t[0]) * &ss.chi1().pow(k[0])) * &(&abs(k[1], t[1]) * &ss.chi2().pow(k[1]));
                    let o = Outcome::equal(&z, &z0.checked_div(&denom)?);
                    if o.status != Status::Pass {
                        return Ok(Outcome::holds(false, || format!("{} q={q} r={r} k={k:?}: {}", tag.name(), o.residual.unwrap_or_default())));
                    }
                    outcome = outcome.and(o);
                }
            }
        }
    }
    Ok(outcome)
}
