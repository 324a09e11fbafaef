//! Operator-norm estimates in a truncated representation, the spectral
//! projection χ_{[½,∞)} by the cubic iteration p ← 3p² − 2p³, and cutdowns.
//!
//! The representation is U ↦ multiplication by e(iθ + φ), V ↦ shift on
//! ℓ²(ℤ), cut to the window |i| ≤ N. An element Σ_n A_n(U)V^n acts as
//! (aξ)(i) = Σ_n A_n(e(iθ + φ)) ξ(i + n).

use crate::algebra::FourierElement;
use crate::error::{Error, Result};
use crate::real::{cis_turns, Real2};
use rustfft::FftPlanner;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

#[derive(Clone, Debug)]
pub struct RepConfig {
    /// Minimum half-width N; raised to 8·(V-degree) + margin when smaller.
    pub window: usize,
    pub phase_offsets: Vec<f64>,
    pub margin: usize,
    pub power_steps: usize,
    pub rayleigh_tol: f64,
    /// Relative agreement required between windows N and 2N.
    pub stabilize_tol: f64,
    pub max_doublings: usize,
}

impl Default for RepConfig {
    fn default() -> Self {
        RepConfig {
            window: 0,
            phase_offsets: (0..8).map(|k| k as f64 / 8.0 + 0.0371).collect(),
            margin: 64,
            power_steps: 200,
            rayleigh_tol: 1e-6,
            stabilize_tol: 1e-3,
            max_doublings: 4,
        }
    }
}

/// A(z_i) = Σ_k c_k e((s + k)(iθ + φ)) for i = −N..=N, by a chirp-z
/// transform: e(θkl) = e(θk²/2)·e(θl²/2)·e(−θ(l − k)²/2).
fn eval_row_on_orbit(
    theta: Real2,
    start: i64,
    coeffs: &[Complex64],
    half: i64,
    phase: f64,
    planner: &mut FftPlanner<f64>,
) -> Vec<Complex64> {
    let len = coeffs.len() as i64;
    let pts = 2 * half + 1;
    let size = ((len + pts - 1) as usize).next_power_of_two();
    let hth = theta.half();
    let zero = Complex64::new(0.0, 0.0);
    let mut u = vec![zero; size];
    for (k, c) in coeffs.iter().enumerate() {
        let k = k as i64;
        u[k as usize] = c
            * cis_turns(((start + k) as f64 * phase).fract())
            * theta.phase(-k * half)
            * hth.phase(k * k);
    }
    let mut v = vec![zero; size];
    for d in -(len - 1)..pts {
        v[d.rem_euclid(size as i64) as usize] = hth.phase(-d * d);
    }
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    fwd.process(&mut u);
    fwd.process(&mut v);
    for (a, b) in u.iter_mut().zip(&v) {
        *a *= b / size as f64;
    }
    inv.process(&mut u);
    let lead = theta.phase(-start * half);
    (0..pts)
        .map(|l| u[l as usize] * hth.phase(l * l) * theta.phase(start * l) * lead)
        .collect()
}

struct Truncation {
    half: i64,
    /// (n, values of A_n at z_i for i = −N..=N)
    bands: Vec<(i64, Vec<Complex64>)>,
}

impl Truncation {
    fn new(a: &FourierElement, half: i64, phase: f64) -> Self {
        let theta = a.theta();
        let rows: Vec<(i64, &crate::algebra::Row)> = a.rows().collect();
        let bands = rows
            .par_iter()
            .map_init(FftPlanner::new, |planner, &(n, r)| {
                (n, eval_row_on_orbit(theta, r.start, &r.coeffs, half, phase, planner))
            })
            .collect();
        Truncation { half, bands }
    }

    fn len(&self) -> usize {
        (2 * self.half + 1) as usize
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let len = self.len() as i64;
        let mut y = vec![Complex64::new(0.0, 0.0); len as usize];
        for (n, vals) in &self.bands {
            for i in 0..len {
                let j = i + n;
                if (0..len).contains(&j) {
                    y[i as usize] += vals[i as usize] * x[j as usize];
                }
            }
        }
        y
    }

    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        let len = self.len() as i64;
        let mut x = vec![Complex64::new(0.0, 0.0); len as usize];
        for (n, vals) in &self.bands {
            for i in 0..len {
                let j = i + n;
                if (0..len).contains(&j) {
                    x[j as usize] += vals[i as usize].conj() * y[i as usize];
                }
            }
        }
        x
    }

    /// Largest singular value by power iteration on M*M.
    fn top_singular(&self, cfg: &RepConfig) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut x: Vec<Complex64> =
            (0..self.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut prev = 0.0;
        for _ in 0..cfg.power_steps {
            let nx = norm(&x);
            if nx == 0.0 {
                return 0.0;
            }
            x.iter_mut().for_each(|v| *v /= nx);
            let y = self.apply(&x);
            let est = norm(&y);
            if est == 0.0 {
                return 0.0;
            }
            if (est - prev).abs() <= cfg.rayleigh_tol * est {
                return est;
            }
            prev = est;
            x = self.apply_adjoint(&y);
        }
        prev
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn windowed_estimate(a: &FourierElement, half: i64, cfg: &RepConfig) -> f64 {
    cfg.phase_offsets
        .iter()
        .map(|&ph| Truncation::new(a, half, ph).top_singular(cfg))
        .fold(0.0, f64::max)
}

/// Lower estimate of the C*-norm ‖a‖, stabilized under N → 2N.
pub fn norm_estimate(a: &FourierElement, cfg: &RepConfig) -> Result<f64> {
    if a.is_zero() {
        return Ok(0.0);
    }
    if cfg.phase_offsets.len() < 8 {
        return Err(Error::Parameter("norm estimates need at least 8 phase offsets".into()));
    }
    let span = |r: Option<(i64, i64)>| r.map(|(lo, hi)| lo.abs().max(hi.abs())).unwrap_or(0);
    // σ is isometric and swaps the roles of the U- and V-degrees
    let a = if span(a.v_range()) > span(a.u_range()) { a.fourier() } else { a.clone() };
    let vdeg = span(a.v_range());
    let mut half = (cfg.window as i64).max(8 * vdeg + cfg.margin as i64);
    let mut prev = windowed_estimate(&a, half, cfg);
    for _ in 0..cfg.max_doublings {
        half *= 2;
        let next = windowed_estimate(&a, half, cfg);
        let big = prev.max(next);
        if (prev - next).abs() <= cfg.stabilize_tol * big + 1e-12 {
            return Ok(big);
        }
        prev = next;
    }
    Err(Error::Resolution(format!(
        "norm estimate did not stabilize up to window {half}; last value {prev}"
    )))
}

/// ‖x² − x‖ < ¼ keeps ½ out of the spectrum; this keeps it at least 0.1 away.
pub const GAP_LIMIT: f64 = 0.24;
pub const CHI_TOL: f64 = 1e-10;
pub const CHI_MAX_ITER: usize = 60;

#[derive(Clone, Debug, Serialize)]
pub struct CutdownResult {
    #[serde(skip)]
    pub chi: FourierElement,
    pub iterations: usize,
    /// ‖x² − x‖ estimate before iterating.
    pub gap_metric: f64,
    /// ℓ¹ bound on ‖χ² − χ‖ at exit (dominates the operator norm).
    pub residual: f64,
    /// ℓ¹ residual after each step, starting with the input.
    pub history: Vec<f64>,
}

impl CutdownResult {
    pub fn write_history_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Numeric(format!("csv write failed: {e}"));
        w.write_record(["iteration", "l1_residual"]).map_err(io)?;
        for (i, r) in self.history.iter().enumerate() {
            w.serialize((i, r)).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Numeric(e.to_string()))
    }
}

/// χ_{[½,∞)}(x) for self-adjoint x with ‖x² − x‖ < GAP_LIMIT.
pub fn chi_cutoff(x: &FourierElement, cfg: &RepConfig) -> Result<CutdownResult> {
    let sq = x.mul_self_adjoint(x)?;
    let defect = sq.sub(x)?;
    let mut residual = defect.l1_norm();
    let mut history = vec![residual];
    let gap_metric = if residual < CHI_TOL { residual } else { norm_estimate(&defect, cfg)? };
    if gap_metric >= GAP_LIMIT {
        return Err(Error::Gap {
            metric: gap_metric,
            limit: GAP_LIMIT,
            advice: "use a deeper standing convergent pair".into(),
        });
    }
    let mut p = x.clone();
    let mut p2 = sq;
    let mut iterations = 0;
    while residual >= CHI_TOL {
        if iterations == CHI_MAX_ITER {
            return Err(Error::Numeric(format!(
                "cubic iteration stalled at residual {residual:e} after {CHI_MAX_ITER} steps"
            )));
        }
        let p3 = p2.mul_self_adjoint(&p)?;
        p = p2.lin_comb(3.0, &p3, -2.0)?;
        p2 = p.mul_self_adjoint(&p)?;
        residual = p2.sub(&p)?.l1_norm();
        history.push(residual);
        iterations += 1;
        if !residual.is_finite() || residual > 1e6 {
            return Err(Error::Numeric(format!("cubic iteration diverged (residual {residual:e})")));
        }
    }
    Ok(CutdownResult { chi: p, iterations, gap_metric, residual, history })
}

#[derive(Clone, Debug, Serialize)]
pub struct CutdownInvariants {
    pub tau: f64,
    pub phi: [f64; 4],
    pub iterations: usize,
    pub gap_metric: f64,
    pub residual: f64,
}

/// (τ, φ_jk) of χ(e·P·e).
pub fn cutdown_invariants(
    e: &FourierElement,
    p: &FourierElement,
    cfg: &RepConfig,
) -> Result<CutdownInvariants> {
    let x = e.twisted_mul(p)?.mul_self_adjoint(e)?;
    let r = chi_cutoff(&x, cfg)?;
    Ok(CutdownInvariants {
        tau: r.chi.canonical_trace().re,
        phi: r.chi.phi_traces().map(|c| c.re),
        iterations: r.iterations,
        gap_metric: r.gap_metric,
        residual: r.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::build_e_field;
    use crate::real::Real2;

    fn th() -> Real2 {
        Real2::from_int(5).sqrt().sub(Real2::ONE).half()
    }

    #[test]
    fn chirp_evaluation_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let coeffs: Vec<Complex64> =
            (0..300).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let (start, half, phase) = (-170i64, 40i64, 0.3141);
        let fast = eval_row_on_orbit(th(), start, &coeffs, half, phase, &mut FftPlanner::new());
        for (l, got) in fast.iter().enumerate() {
            let i = l as i64 - half;
            let want: Complex64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let m = start + k as i64;
                    c * cis_turns(th().turns_times(m * i) + (m as f64 * phase).fract())
                })
                .sum();
            assert!((got - want).norm() < 1e-10, "i={i}: {got} vs {want}");
        }
    }

    #[test]
    fn generator_norms() {
        let cfg = RepConfig::default();
        let one = Complex64::new(1.0, 0.0);
        let u = FourierElement::monomial(th(), 1, 0, one);
        assert!((norm_estimate(&u, &cfg).unwrap() - 1.0).abs() < 1e-3);
        let h = u.add(&u.adjoint()).unwrap();
        assert!((norm_estimate(&h, &cfg).unwrap() - 2.0).abs() < 1e-3);
        for &(m, n) in &[(10, -10), (0, 7), (-3, 9)] {
            let w = FourierElement::monomial(th(), m, n, one);
            assert!((norm_estimate(&w, &cfg).unwrap() - 1.0).abs() < 1e-3);
        }
        assert_eq!(norm_estimate(&FourierElement::zero(th()), &cfg).unwrap(), 0.0);
    }

    #[test]
    fn projection_norm() {
        let e = build_e_field(Real2::new(0.7)).unwrap();
        let cfg = RepConfig::default();
        assert!((norm_estimate(&e, &cfg).unwrap() - 1.0).abs() < 1e-3);
        let d = e.mul_self_adjoint(&e).unwrap().sub(&e).unwrap();
        assert!(norm_estimate(&d, &cfg).unwrap() < 1e-8);
    }

    #[test]
    fn scalar_iteration() {
        let step = |a: f64| 3.0 * a * a - 2.0 * a * a * a;
        for &a0 in &[-0.2, -0.1, 0.15, 0.2, 0.8, 0.9, 1.1, 1.2] {
            let mut a: f64 = a0;
            for _ in 0..12 {
                a = step(a);
            }
            let target = if a0 < 0.5 { 0.0 } else { 1.0 };
            assert!((a - target).abs() < 1e-12, "{a0} -> {a}");
        }
    }

    #[test]
    fn chi_of_projection_and_scaled_projection() {
        let cfg = RepConfig::default();
        let e = build_e_field(Real2::new(0.6)).unwrap();
        let r = chi_cutoff(&e, &cfg).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.chi.max_abs_diff(&e) == 0.0);
        let x = e.scale(Complex64::new(0.9, 0.0));
        let r = chi_cutoff(&x, &cfg).unwrap();
        assert!(r.chi.max_abs_diff(&e) < 1e-9);
        assert!(r.residual < CHI_TOL);
        assert!(r.chi.flip().max_abs_diff(&r.chi) < 1e-10);
        let mut buf = Vec::new();
        r.write_history_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("iteration,l1_residual"));
    }

    #[test]
    fn gap_error() {
        let cfg = RepConfig::default();
        let e = build_e_field(Real2::new(0.6)).unwrap();
        let x = e.scale(Complex64::new(0.5, 0.0));
        assert!(matches!(chi_cutoff(&x, &cfg), Err(Error::Gap { .. })));
    }
}
