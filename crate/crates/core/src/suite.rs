//! The verification suite: ten end-to-end checks, each returning a pass/fail
//! record with the worst observed metric and the limit it was held to.

use crate::algebra::{FourierElement, Parity};
use crate::arithmetic::{standing_pairs, ConvergentPair, ParityCase, ThetaValue};
use crate::bimodule::{phi_eta_inverse_v1_closed, phi_eta_inverse_v3_closed, Bimodule};
use crate::bump::{build_bump, poisson_check};
use crate::chern::snap_phis;
use crate::error::{param, Error, Result};
use crate::fields::{ac_phi_closed, build_ac_projection, build_e_field, build_p};
use crate::ktheory::{kmatrix_closed, s3_orbit_report, trace_vector, KMatrix};
use crate::real::Real2;
use crate::spectral::{cutdown_invariants, norm_estimate, RepConfig};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::time::Instant;

pub const DEFAULT_SEED: u64 = 20240607;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

impl Level {
    pub fn parse(s: &str) -> Result<Level> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => param(format!("level must be fast or full, got {s:?}")),
        }
    }

    /// Criteria run at this level. Fast skips the cutdowns and the bimodule quadrature.
    pub fn criteria(self) -> Vec<u8> {
        match self {
            Level::Fast => vec![1, 2, 3, 7, 8, 9, 10],
            Level::Full => (1..=10).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// |φ_jk(𝓔(t)) − ½|
    pub phi_half: f64,
    /// ‖𝓔² − 𝓔‖ estimate
    pub projection_norm: f64,
    /// sup residual of the bump function identities
    pub identity_sup: f64,
    /// half-integer snapping and canonical-trace agreement
    pub snap: f64,
    /// bimodule inner-product coefficients
    pub bimodule: f64,
    /// gap between the two sides of the Poisson identities
    pub poisson: f64,
    /// random-element property residuals
    pub property: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            phi_half: 1e-8,
            projection_norm: 1e-8,
            identity_sup: 1e-9,
            snap: 1e-6,
            bimodule: 1e-8,
            poisson: 1e-10,
            property: 1e-9,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 7] =
        ["phi_half", "projection_norm", "identity_sup", "snap", "bimodule", "poisson", "property"];

    /// Applies one `KEY=VAL` override. Values must lie in [1e-15, 1e-2].
    pub fn set(&mut self, kv: &str) -> Result<()> {
        let (key, val) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse { pos: 0, msg: format!("expected KEY=VAL, got {kv:?}") })?;
        let v: f64 = val.trim().parse().map_err(|e| Error::Parse {
            pos: key.len() + 1,
            msg: format!("bad tolerance value {val:?}: {e}"),
        })?;
        if !(1e-15..=1e-2).contains(&v) {
            return param(format!("tolerance {key} = {v:e} outside [1e-15, 1e-2]"));
        }
        let slot = match key.trim() {
            "phi_half" => &mut self.phi_half,
            "projection_norm" => &mut self.projection_norm,
            "identity_sup" => &mut self.identity_sup,
            "snap" => &mut self.snap,
            "bimodule" => &mut self.bimodule,
            "poisson" => &mut self.poisson,
            "property" => &mut self.property,
            k => {
                return param(format!("unknown tolerance {k:?}; known: {}", Tolerances::KEYS.join(", ")))
            }
        };
        *slot = v;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: u8,
    pub criterion: String,
    pub passed: bool,
    pub detail: String,
    /// worst observed value of the checked quantity; None when the check errored
    pub metric: Option<f64>,
    pub limit: f64,
    pub seconds: f64,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {}: {} (metric {:.3e}, limit {:.1e}, {:.1}s) {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.metric.unwrap_or(f64::NAN),
            self.limit,
            self.seconds,
            self.detail
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub level: Level,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

/// What a criterion body hands back before timing is attached.
struct Outcome {
    passed: bool,
    metric: f64,
    detail: String,
}

fn timed(id: u8, name: &str, limit: f64, body: impl FnOnce() -> Result<Outcome>) -> CheckResult {
    let start = Instant::now();
    let (passed, metric, detail) = match body() {
        Ok(o) => (o.passed, Some(o.metric), o.detail),
        Err(e) => (false, None, format!("error: {e}")),
    };
    CheckResult {
        id,
        criterion: name.to_string(),
        passed,
        detail,
        metric,
        limit,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn field_parameters() -> [Real2; 5] {
    [Real2::ratio(1, 2), Real2::ratio(11, 20), Real2::ratio(13, 20), Real2::ratio(4, 5), Real2::ratio(19, 20)]
}

fn golden(p: i64, q: i64, pp: i64, qp: i64) -> Result<ConvergentPair> {
    ConvergentPair::new(ThetaValue::golden().value(), p, q, pp, qp)
}

/// Golden standing pairs used by the cutdown and bimodule checks.
pub fn golden_pairs() -> Result<[ConvergentPair; 2]> {
    Ok([golden(3, 5, 5, 8)?, golden(8, 13, 13, 21)?])
}

/// Standing pairs of golden, its complement and cf [3;1,4,1,5,9,2,6,5,3,5].
pub fn sample_standing_pairs() -> Result<Vec<ConvergentPair>> {
    let mut v = Vec::new();
    for t in [ThetaValue::golden(), ThetaValue::golden_complement(), ThetaValue::parse("cf:3,1,4,1,5,9,2,6,5,3,5")?] {
        v.extend(standing_pairs(&t, 11)?);
    }
    Ok(v)
}

pub fn criterion_1(tol: &Tolerances) -> CheckResult {
    timed(1, "phi traces of the projection field equal 1/2", tol.phi_half, || {
        let mut worst = 0.0f64;
        for t in field_parameters() {
            let e = build_e_field(t)?;
            for v in e.phi_traces() {
                worst = worst.max((v - Complex64::new(0.5, 0.0)).norm());
            }
        }
        Ok(Outcome {
            passed: worst < tol.phi_half,
            metric: worst,
            detail: "4 traces at t = 0.5, 0.55, 0.65, 0.8, 0.95".into(),
        })
    })
}

pub fn criterion_2(tol: &Tolerances) -> CheckResult {
    timed(2, "projection identities", tol.projection_norm, || {
        let cfg = RepConfig::default();
        let (mut norm, mut l1, mut ident) = (0.0f64, 0.0f64, 0.0f64);
        for t in field_parameters() {
            let e = build_e_field(t)?;
            let d = e.mul_self_adjoint(&e)?.sub(&e)?;
            l1 = l1.max(d.l1_norm());
            norm = norm.max(norm_estimate(&d, &cfg)?);
            let b = build_bump(t.to_f64())?;
            for r in b.projection_residuals(8192) {
                ident = ident.max(r);
            }
        }
        let passed = norm < tol.projection_norm && ident < tol.identity_sup;
        Ok(Outcome {
            passed,
            metric: norm,
            detail: format!(
                "identity sup {ident:.3e} (limit {:.1e}), l1 bound on E^2-E {l1:.3e}",
                tol.identity_sup
            ),
        })
    })
}

pub fn criterion_3(tol: &Tolerances) -> CheckResult {
    timed(3, "phi traces of the approximately central projection", tol.snap, || {
        let pairs = sample_standing_pairs()?;
        let cases: HashSet<ParityCase> = pairs.iter().map(|p| p.parity_case()).collect();
        let mut worst = 0.0f64;
        let mut bad = Vec::new();
        for pair in &pairs {
            let e = build_ac_projection(pair)?;
            let phi = e.phi_traces().map(|c| c.re);
            let closed = ac_phi_closed(pair);
            for (v, c) in phi.iter().zip(closed) {
                worst = worst.max((v - c as f64 / 2.0).abs());
            }
            if snap_phis(phi).ok() != Some(closed) {
                bad.push(pair.tuple());
            }
        }
        let passed = pairs.len() >= 6 && cases.len() == 3 && bad.is_empty() && worst < tol.snap;
        Ok(Outcome {
            passed,
            metric: worst,
            detail: format!("{} pairs, {} parity cases, mismatches {bad:?}", pairs.len(), cases.len()),
        })
    })
}

pub fn criterion_4(tol: &Tolerances) -> CheckResult {
    timed(4, "K-matrix columns from numerical cutdowns", tol.snap, || {
        let cfg = RepConfig::default();
        let mut jobs = Vec::new();
        for pair in golden_pairs()? {
            for i in 1..=6 {
                jobs.push((pair, i));
            }
        }
        let rows: Vec<Result<(ConvergentPair, usize, f64, bool)>> = jobs
            .par_iter()
            .map(|&(pair, i)| {
                let e = build_ac_projection(&pair)?;
                let p = build_p(i, pair.theta)?;
                let r = cutdown_invariants(&e, &p, &cfg)?;
                let want_tau = trace_vector(&pair).evaluated[i - 1];
                let column = kmatrix_closed(&pair).column(i - 1);
                let exact = snap_phis(r.phi).ok() == Some(column);
                Ok((pair, i, (r.tau - want_tau).abs(), exact))
            })
            .collect();
        let mut worst = 0.0f64;
        let mut bad = Vec::new();
        for row in rows {
            let (pair, i, dtau, exact) = row?;
            worst = worst.max(dtau);
            if !exact || dtau >= tol.snap {
                bad.push(format!("{:?} P{i}", pair.tuple()));
            }
        }
        Ok(Outcome {
            passed: bad.is_empty(),
            metric: worst,
            detail: format!("pairs (3,5,5,8), (8,13,13,21), 6 columns each; mismatches {bad:?}"),
        })
    })
}

pub fn criterion_5(tol: &Tolerances) -> CheckResult {
    timed(5, "bimodule inner products of f", tol.bimodule, || {
        let mut worst = 0.0f64;
        let mut parts = Vec::new();
        for pair in golden_pairs()? {
            let b = Bimodule::new(&pair)?;
            let r = b.dperp_inner_ff(4)?;
            let perp = (r.c0 - 1.0).norm().max(r.max_other);
            let d = b.d_inner_ff()?.max_abs_diff(&build_ac_projection(&pair)?);
            worst = worst.max(perp).max(d);
            parts.push(format!("{:?}: D-perp {perp:.2e}, D {d:.2e}", pair.tuple()));
        }
        Ok(Outcome { passed: worst < tol.bimodule, metric: worst, detail: parts.join("; ") })
    })
}

pub fn criterion_6(tol: &Tolerances) -> CheckResult {
    timed(6, "phi traces of the bimodule images of V1 and V3", tol.snap, || {
        let mut worst = 0.0f64;
        let mut bad = Vec::new();
        let pairs = golden_pairs()?;
        let parities: HashSet<i64> = pairs.iter().map(|p| p.qp % 2).collect();
        for pair in pairs {
            let b = Bimodule::new(&pair)?;
            for (name, x, closed) in [
                ("V1", b.eta_inverse_v1()?, phi_eta_inverse_v1_closed(&pair)),
                ("V3", b.eta_inverse_v3()?, phi_eta_inverse_v3_closed(&pair)),
            ] {
                let phi = x.phi_traces().map(|c| c.re);
                for (v, c) in phi.iter().zip(closed) {
                    worst = worst.max((v - c as f64 / 2.0).abs());
                }
                if snap_phis(phi).ok() != Some(closed) {
                    bad.push(format!("{:?} {name}", pair.tuple()));
                }
            }
        }
        Ok(Outcome {
            passed: bad.is_empty() && parities.len() == 2 && worst < tol.snap,
            metric: worst,
            detail: format!("both q' parities covered: {}; mismatches {bad:?}", parities.len() == 2),
        })
    })
}

/// The six matrices as displayed for q even and p′ odd, in the order
/// e, σe, κe, κ²e, σκe, σκ²e.
pub fn displayed_orbit() -> [(&'static str, KMatrix); 6] {
    let m = |first: [i64; 6], second: [i64; 6], third: [i64; 6]| {
        KMatrix::from_integers([first, second, third, [0; 6]])
    };
    let z = [0; 6];
    [
        ("e", m([1, 0, 1, 0, 1, 0], [0, 0, 0, 1, 0, -1], z)),
        ("sigma e", m([1, 0, 1, 1, 0, 0], z, [0, 0, 0, 0, 1, -1])),
        ("kappa e", m([1, 0, 1, 1, 0, 0], z, [0, 0, 0, 0, -1, 1])),
        ("kappa^2 e", m([1, 0, 1, 0, 0, 1], [0, 0, 0, -1, 1, 0], z)),
        ("sigma kappa e", m([1, 0, 1, 0, 1, 0], [0, 0, 0, -1, 0, 1], z)),
        ("sigma kappa^2 e", m([1, 0, 1, 0, 0, 1], z, [0, 0, 0, 1, -1, 0])),
    ]
}

pub fn orbit_pair() -> Result<ConvergentPair> {
    ConvergentPair::new(ThetaValue::golden_complement().value(), 3, 8, 5, 13)
}

/// Names of the displayed matrices that differ from the computed orbit.
pub fn orbit_mismatches(pair: &ConvergentPair) -> Result<Vec<&'static str>> {
    let r = s3_orbit_report(pair)?;
    Ok(displayed_orbit()
        .iter()
        .zip(&r.entries)
        .filter(|((_, want), got)| got.kmatrix != *want)
        .map(|((name, _), _)| *name)
        .collect())
}

pub fn criterion_7(_tol: &Tolerances) -> CheckResult {
    timed(7, "S3 orbit of the K-matrix", 0.0, || {
        let pair = orbit_pair()?;
        let r = s3_orbit_report(&pair)?;
        let bad = orbit_mismatches(&pair)?;
        Ok(Outcome {
            passed: bad.is_empty() && r.pairwise_distinct && r.identity_fixed,
            metric: bad.len() as f64,
            detail: format!(
                "pair {:?}: pairwise distinct {}, K(1) fixed {}, differs from display for {bad:?}",
                pair.tuple(),
                r.pairwise_distinct,
                r.identity_fixed
            ),
        })
    })
}

pub fn criterion_8(tol: &Tolerances) -> CheckResult {
    timed(8, "Poisson summation identities", tol.poisson, || {
        let points = [0.0, 0.137, 0.31, 0.5, 0.77];
        let h = |x: f64| (-std::f64::consts::PI * x * x).exp();
        let hh = |n: i64| Complex64::new((-std::f64::consts::PI * (n * n) as f64).exp(), 0.0);
        let mut gauss = 0.0f64;
        for &x in &points {
            gauss = gauss.max(poisson_check(h, hh, x, 30).max_gap());
        }
        let b = build_bump(0.65)?;
        let mut bump = 0.0f64;
        for &x in &points {
            bump = bump.max(poisson_check(|y| b.f(y), |n| b.fhat(n), x, b.bound).max_gap());
        }
        let worst = gauss.max(bump);
        Ok(Outcome {
            passed: worst < tol.poisson,
            metric: worst,
            detail: format!("Gaussian {gauss:.2e}, f_0.65 {bump:.2e} over 5 points"),
        })
    })
}

pub fn criterion_9(_tol: &Tolerances) -> CheckResult {
    timed(9, "convergence of the cutdown functions", 0.0, || {
        let pairs = [golden(3, 5, 5, 8)?, golden(8, 13, 13, 21)?, golden(21, 34, 34, 55)?];
        let mut c = Vec::new();
        let mut h1 = Vec::new();
        for pair in &pairs {
            let d = Bimodule::new(pair)?.cutdown_diagnostics(1024);
            c.push(d.c_minus_one_sup);
            h1.push(d.h1_sup);
        }
        let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
        let passed = decreasing(&c) && decreasing(&h1);
        Ok(Outcome {
            passed,
            metric: c[2],
            detail: format!("sup|C-1| [{}], sup h1 [{}]", sci(&c), sci(&h1)),
        })
    })
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

/// Residual bookkeeping for the property suite.
#[derive(Default)]
struct Tally {
    cases: usize,
    worst: f64,
    worst_name: &'static str,
}

impl Tally {
    fn record(&mut self, name: &'static str, r: f64) {
        self.cases += 1;
        if r.is_nan() || r > self.worst {
            self.worst = r;
            self.worst_name = name;
        }
    }
}

fn sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn even(k: i64) -> f64 {
    (k.rem_euclid(2) == 0) as u8 as f64
}

/// φ^θ_jk∘ζ as a combination of the φ^τ, for the pair (p, q, p′, q′).
pub fn zeta_trace_formula(pair: &ConvergentPair, x: &FourierElement, j: u8, k: u8) -> Complex64 {
    let phi = |a: u8, b: u8| x.phi_trace(Parity(a, b));
    let (jj, kk) = (j as i64, k as i64);
    (phi(0, k) + phi(1, k)) * (even(pair.qp) * even(jj))
        + (phi(j, 0) + phi(j, 1) * sign(jj)) * (even(pair.q) * even(kk))
        + phi(j, k) * (sign(pair.p * jj * kk) * even(pair.qp - 1) * even(pair.q - 1))
}

/// Runs every trace and automorphism relation on seeded random elements.
/// Returns (cases, worst residual, name of the worst relation).
pub fn property_sweep(seed: u64, trials: usize) -> Result<(usize, f64, &'static str)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::default();
    let thetas = [ThetaValue::golden().value(), ThetaValue::golden_complement().value(), Real2::new(0.2071)];
    let d = |a: Complex64, b: Complex64| (a - b).norm();
    for &th in &thetas {
        for _ in 0..trials {
            let x = FourierElement::random(th, 10, 5, &mut rng);
            let y = FourierElement::random(th, 10, 5, &mut rng);
            let xy = x.twisted_mul(&y)?;
            let yx = y.twisted_mul(&x)?;
            t.record("tau(xy) = tau(yx)", d(xy.canonical_trace(), yx.canonical_trace()));
            let fyx = y.flip().twisted_mul(&x)?;
            for p in Parity::ALL {
                t.record("phi(xy) = phi(flip(y) x)", d(xy.phi_trace(p), fyx.phi_trace(p)));
                t.record("phi(flip x) = phi(x)", d(x.flip().phi_trace(p), x.phi_trace(p)));
            }
            let xi = y.xi().twisted_mul(&x.xi())?;
            t.record("Xi(xy) = Xi(y)Xi(x)", xy.xi().max_abs_diff(&xi));
            let (s, k) = (x.fourier(), x.cubic());
            let g = [x.gamma(1)?, x.gamma(2)?, x.gamma(3)?];
            for p in Parity::ALL {
                let (j, kk) = (p.0, p.1);
                t.record("phi_jk(sigma x) = phi_kj(x)", d(s.phi_trace(p), x.phi_trace(Parity(kk, j))));
                t.record(
                    "phi_jk(kappa x) = phi_k,j+k(x)",
                    d(k.phi_trace(p), x.phi_trace(Parity(kk, (j + kk) % 2))),
                );
                let signs = [sign(j as i64), sign(kk as i64), sign((j + kk) as i64)];
                for (gi, sg) in g.iter().zip(signs) {
                    t.record("phi_jk(gamma x) = +-phi_jk(x)", d(gi.phi_trace(p), x.phi_trace(p) * sg));
                }
            }
            // β_s: A_{1−s} → A_s
            let z = FourierElement::random(Real2::ONE.sub(th), 10, 5, &mut rng);
            let bz = z.beta(th)?;
            for p in Parity::ALL {
                let (j, kk) = (p.0 as i64, p.1 as i64);
                t.record(
                    "phi^(1-s) = +-phi^s o beta_s",
                    d(z.phi_trace(p), bz.phi_trace(p) * sign(j * kk + j + kk)),
                );
            }
            // η: A_{2θ} → A_θ
            let w = FourierElement::random(th.mul_int(2), 10, 5, &mut rng);
            let ew = w.eta_doubling(th)?;
            for kk in 0..2u8 {
                let want = w.phi_trace(Parity(0, kk)) - w.phi_trace(Parity(1, kk));
                t.record("phi_0k o eta = phi_0k - phi_1k", d(ew.phi_trace(Parity(0, kk)), want));
                t.record("phi_1k o eta = 0", ew.phi_trace(Parity(1, kk)).norm());
            }
        }
    }
    // ζ over the full parity grid: all three parity cases, all jk, monomials of every parity
    for pair in sample_standing_pairs()? {
        let one = Complex64::new(1.0, 0.0);
        let mut xs: Vec<FourierElement> = Vec::new();
        for m in -2..=2 {
            for n in -2..=2 {
                xs.push(FourierElement::monomial(pair.tau, m, n, one));
            }
        }
        xs.push(FourierElement::random(pair.tau, 10, 4, &mut rng));
        for x in &xs {
            let zx = x.zeta(pair.theta, pair.p, pair.q, pair.qp)?;
            for p in Parity::ALL {
                t.record("phi o zeta formula", d(zx.phi_trace(p), zeta_trace_formula(&pair, x, p.0, p.1)));
            }
        }
    }
    Ok((t.cases, t.worst, t.worst_name))
}

pub fn criterion_10(tol: &Tolerances, seed: u64) -> CheckResult {
    timed(10, "trace and automorphism property suite", tol.property, || {
        let (cases, worst, name) = property_sweep(seed, 40)?;
        Ok(Outcome {
            passed: worst < tol.property,
            metric: worst,
            detail: format!("{cases} cases, seed {seed}, worst relation: {name}"),
        })
    })
}

pub fn run_criterion(id: u8, tol: &Tolerances, seed: u64) -> Result<CheckResult> {
    Ok(match id {
        1 => criterion_1(tol),
        2 => criterion_2(tol),
        3 => criterion_3(tol),
        4 => criterion_4(tol),
        5 => criterion_5(tol),
        6 => criterion_6(tol),
        7 => criterion_7(tol),
        8 => criterion_8(tol),
        9 => criterion_9(tol),
        10 => criterion_10(tol, seed),
        _ => return param(format!("no criterion {id}; valid ids are 1..=10")),
    })
}

pub fn run_suite(level: Level, tol: &Tolerances, seed: u64) -> SuiteReport {
    let checks: Vec<CheckResult> = level
        .criteria()
        .into_par_iter()
        .map(|id| run_criterion(id, tol, seed).expect("ids come from Level::criteria"))
        .collect();
    let all_passed = checks.iter().all(|c| c.passed);
    SuiteReport { level, seed, tolerances: tol.clone(), checks, all_passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.set("snap=1e-7").unwrap();
        assert_eq!(t.snap, 1e-7);
        assert!(t.set("snap=0.5").is_err());
        assert!(t.set("nonsense=1e-6").is_err());
        assert!(matches!(t.set("snap"), Err(Error::Parse { .. })));
        assert!(matches!(t.set("snap=abc"), Err(Error::Parse { pos: 5, .. })));
    }

    #[test]
    fn levels() {
        assert_eq!(Level::parse("fast").unwrap(), Level::Fast);
        assert!(Level::parse("medium").is_err());
        assert_eq!(Level::Full.criteria().len(), 10);
        assert!(!Level::Fast.criteria().contains(&4));
    }

    #[test]
    fn zeta_formula_on_a_monomial() {
        let pair = golden(3, 5, 5, 8).unwrap();
        let x = FourierElement::monomial(pair.tau, 0, 0, Complex64::new(1.0, 0.0));
        // ζ(1) = 1, so φ_00 = 1 and the rest vanish
        let v: Vec<f64> = Parity::ALL.iter().map(|p| zeta_trace_formula(&pair, &x, p.0, p.1).re).collect();
        assert_eq!(v, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn property_sweep_is_deterministic() {
        let a = property_sweep(5, 2).unwrap();
        let b = property_sweep(5, 2).unwrap();
        assert_eq!(a, b);
    }
}
