//! The Heisenberg bimodule over M = ℝ × ℤ_q × ℤ_{q′} linking A_θ with
//! C*(D⊥, h̄): lattices, inner-product coefficients by quadrature, the cutdown
//! diagnostics, and the Φ′-traces ψ₁, ψ₂ of the circle algebra C*(V₁, V₃).

use crate::algebra::FourierElement;
use crate::arithmetic::ConvergentPair;
use crate::bump::{build_bump, BumpProfile};
use crate::error::{param, Error, Result};
use crate::quad::integrate;
use crate::real::{cis_turns, Real2};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Absolute tolerance of each quadrature, before the normalizing constants.
pub const QUAD_TOL: f64 = 1e-10;
/// A Fourier series is cut once a whole block of coefficients falls below this.
pub const SERIES_CUT: f64 = 1e-9;
const BLOCK: i64 = 32;
const MAX_DEGREE: i64 = 6000;

fn centered(x: f64) -> f64 {
    x - x.round()
}

/// A point (t, r, s; t̂, r̂, ŝ) of G = M × M̂.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GPoint {
    pub t: f64,
    pub r: i64,
    pub s: i64,
    pub t_hat: f64,
    pub r_hat: i64,
    pub s_hat: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeBasis {
    pub q: i64,
    pub qp: i64,
    pub alpha: f64,
    /// D = ℤε₁ + ℤε₂
    pub epsilon: [GPoint; 2],
    /// D⊥ = ℤδ₁ + ℤδ₂ + ℤδ₃
    pub delta: [GPoint; 3],
}

impl LatticeBasis {
    pub fn new(pair: &ConvergentPair) -> Self {
        let (p, q, pp, qp) = (pair.p, pair.q, pair.pp, pair.qp);
        let alpha = pair.alpha.to_f64();
        let g = |t, r, s, t_hat, r_hat, s_hat| GPoint { t, r, s, t_hat, r_hat, s_hat };
        LatticeBasis {
            q,
            qp,
            alpha,
            epsilon: [g(alpha / q as f64, p, 0, 0.0, 0, 0), g(0.0, 0, 1, 1.0, 1, 0)],
            delta: [
                g(1.0 / (q * qp) as f64, p, 0, 0.0, 0, pp),
                g(0.0, 0, 0, 1.0 / alpha, qp, 0),
                g(0.0, 0, 1, 0.0, 0, 0),
            ],
        }
    }

    /// h(x, y) = ⟨x_M, y_M̂⟩, in turns.
    pub fn cocycle_turns(&self, x: &GPoint, y: &GPoint) -> f64 {
        x.t * y.t_hat
            + (x.r * y.r_hat).rem_euclid(self.q) as f64 / self.q as f64
            + (x.s * y.s_hat).rem_euclid(self.qp) as f64 / self.qp as f64
    }

    /// h(x, y)·conj h(y, x) in centered turns.
    pub fn commutator_turns(&self, x: &GPoint, y: &GPoint) -> f64 {
        centered(self.cocycle_turns(x, y) - self.cocycle_turns(y, x))
    }

    /// |G/D| with point masses 1/√q, 1/√q′ on the finite factors.
    pub fn covolume(&self) -> f64 {
        let (sq, sqp) = ((self.q as f64).sqrt(), (self.qp as f64).sqrt());
        self.alpha / self.q as f64 * sq * sqp * 1.0 * sq * sqp
    }

    /// Largest commutator phase between a D generator and a D⊥ generator.
    pub fn biorthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for x in &self.epsilon {
            for y in &self.delta {
                worst = worst.max(self.commutator_turns(x, y).abs());
            }
        }
        worst
    }
}

/// θ′ = α′/(q′α) reduced into (0, 1).
pub fn theta_prime(pair: &ConvergentPair) -> f64 {
    pair.alpha_prime.div(pair.alpha.mul_int(pair.qp)).fract().to_f64()
}

/// Residuals of the identities linking the three expressions for θ′, the
/// commutator of δ₁ and δ₂, and q′α + qα′ = 1.
pub fn theta_prime_residuals(pair: &ConvergentPair) -> [f64; 3] {
    let tp = theta_prime(pair);
    let (p, q, qp) = (pair.p, pair.q, pair.qp);
    let a = pair.alpha;
    let direct = Real2::ONE
        .div(a.mul_int(q * qp))
        .add(Real2::ratio((p * qp).rem_euclid(q), q))
        .fract()
        .to_f64();
    let lat = LatticeBasis::new(pair);
    let comm = lat.commutator_turns(&lat.delta[0], &lat.delta[1]);
    let unit = a.mul_int(qp).add(pair.alpha_prime.mul_int(q)).sub(Real2::ONE).to_f64();
    [centered(direct - tp).abs(), centered(comm - tp).abs(), unit.abs()]
}

/// c·e(t_freq·t + r_phase·r/q + s_phase·s/q′)·[r ≡ r0]·[s ≡ s0]·√f₀(t − t0),
/// stored without the constant c.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModuleVector {
    pub r0: i64,
    pub s0: i64,
    pub t0: f64,
    pub t_freq: f64,
    pub r_phase: i64,
    pub s_phase: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DPerpReport {
    pub c0: Complex64,
    /// max |coefficient| away from the origin over the scanned window
    pub max_other: f64,
    pub integrals: usize,
    pub n2_window: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MoritaReport {
    pub tau_e: f64,
    pub covolume: f64,
    /// τ(eUe·(eUe)*)
    pub lhs: f64,
    /// τ(e)·Σ|coefficients of ⟨f, Uf⟩_{D⊥}|²
    pub rhs_quadrature: f64,
    /// τ(e)·∫₀¹|C(t)|² dt
    pub rhs_closed: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CutdownDiagnostics {
    pub pair: (i64, i64, i64, i64),
    pub samples: usize,
    pub c_minus_one_sup: f64,
    pub h0_minus_one_sup: f64,
    pub h1_sup: f64,
}

pub struct Bimodule {
    pub pair: ConvergentPair,
    pub lattice: LatticeBasis,
    profile: BumpProfile,
    /// c² = √(qq′)/α
    c2: f64,
}

impl Bimodule {
    pub fn new(pair: &ConvergentPair) -> Result<Self> {
        if !pair.is_standing() {
            return param(format!("pair {:?} is not standing (tau = {:.6})", pair.tuple(), pair.tau_f64()));
        }
        let profile = build_bump(pair.tau_f64())?;
        let lattice = LatticeBasis::new(pair);
        let c2 = ((pair.q * pair.qp) as f64).sqrt() / lattice.alpha;
        Ok(Bimodule { pair: *pair, lattice, profile, c2 })
    }

    pub fn profile(&self) -> &BumpProfile {
        &self.profile
    }

    fn f0(&self, t: f64) -> f64 {
        self.profile.f(self.pair.qp as f64 * t)
    }

    fn half_width(&self) -> f64 {
        0.5 / self.pair.qp as f64
    }

    pub fn f(&self) -> ModuleVector {
        ModuleVector { r0: 0, s0: 0, t0: 0.0, t_freq: 0.0, r_phase: 0, s_phase: 0 }
    }

    /// (Uf)(t, r, s) = e(t + r/q) f(t, r, s + 1)
    pub fn u_f(&self) -> ModuleVector {
        ModuleVector { s0: -1, t_freq: 1.0, r_phase: 1, ..self.f() }
    }

    /// (Vf)(t, r, s) = f(t + α/q, r + p, s)
    pub fn v_f(&self) -> ModuleVector {
        ModuleVector { r0: -self.pair.p, t0: -self.lattice.alpha / self.pair.q as f64, ..self.f() }
    }

    /// (fV₁)(t, r, s) = e(−p′s/q′) f(t − 1/(qq′), r − p, s)
    pub fn f_v1(&self) -> ModuleVector {
        let pr = &self.pair;
        ModuleVector { r0: pr.p, t0: 1.0 / (pr.q * pr.qp) as f64, s_phase: -pr.pp, ..self.f() }
    }

    /// (fV₃)(t, r, s) = f(t, r, s − 1)
    pub fn f_v3(&self) -> ModuleVector {
        ModuleVector { s0: 1, ..self.f() }
    }

    fn alive(&self, v: &ModuleVector, r: i64, s: i64) -> bool {
        (r - v.r0).rem_euclid(self.pair.q) == 0 && (s - v.s0).rem_euclid(self.pair.qp) == 0
    }

    fn value(&self, v: &ModuleVector, t: f64, r: i64, s: i64) -> Complex64 {
        let (q, qp) = (self.pair.q, self.pair.qp);
        let turns = v.t_freq * t
            + (v.r_phase * r).rem_euclid(q) as f64 / q as f64
            + (v.s_phase * s).rem_euclid(qp) as f64 / qp as f64;
        cis_turns(turns) * self.f0(t - v.t0).max(0.0).sqrt()
    }

    /// Σ_{r,s} ∫ integrand over t, with shift (a, b, c) applied to the second vector,
    /// before the 1/√(qq′) factor and without c².
    fn raw_integral(
        &self,
        g: &ModuleVector,
        h: &ModuleVector,
        shift: (f64, i64, i64),
        hat: (f64, i64, i64),
        d_side: bool,
        tol: f64,
    ) -> Result<(Complex64, usize)> {
        let (q, qp) = (self.pair.q, self.pair.qp);
        let w = self.half_width();
        let mut total = ZERO;
        let mut count = 0;
        for r in 0..q {
            for s in 0..qp {
                if !self.alive(g, r, s) || !self.alive(h, r + shift.1, s + shift.2) {
                    continue;
                }
                let a = (g.t0 - w).max(h.t0 - shift.0 - w);
                let b = (g.t0 + w).min(h.t0 - shift.0 + w);
                if b - a <= 1e-15 {
                    continue;
                }
                let fixed = (hat.1 * r).rem_euclid(q) as f64 / q as f64 + (hat.2 * s).rem_euclid(qp) as f64 / qp as f64;
                let integrand = |t: f64| {
                    let x = self.value(g, t, r, s);
                    let y = self.value(h, t + shift.0, r + shift.1, s + shift.2);
                    let pairing = cis_turns(t * hat.0 + fixed);
                    if d_side {
                        x * y.conj() * pairing.conj()
                    } else {
                        x.conj() * y * pairing
                    }
                };
                let cycles = (hat.0 + h.t_freq - g.t_freq).abs() * (b - a);
                let panels = 8 + 2 * cycles.ceil() as usize;
                total += integrate(&integrand, a, b, tol, panels)?;
                count += 1;
            }
        }
        Ok((total, count))
    }

    /// ⟨g, h⟩_D(mε₁ + nε₂).
    pub fn d_coefficient(&self, g: &ModuleVector, h: &ModuleVector, m: i64, n: i64) -> Result<Complex64> {
        self.d_coefficient_tol(g, h, m, n).map(|c| c.0)
    }

    fn d_coefficient_tol(&self, g: &ModuleVector, h: &ModuleVector, m: i64, n: i64) -> Result<(Complex64, usize)> {
        let pr = &self.pair;
        let shift = (m as f64 * self.lattice.alpha / pr.q as f64, m * pr.p, n);
        let hat = (n as f64, n, 0);
        // assembled coefficient = τ·c²/√(qq′)·raw = q′·raw
        let scale = self.c2 / ((pr.q * pr.qp) as f64).sqrt();
        let (raw, k) = self.raw_integral(g, h, shift, hat, true, QUAD_TOL)?;
        Ok((raw * scale, k))
    }

    /// ⟨g, h⟩_{D⊥}(n₁δ₁ + n₂δ₂ + n₃δ₃).
    pub fn dperp_coefficient(&self, g: &ModuleVector, h: &ModuleVector, n1: i64, n2: i64, n3: i64) -> Result<Complex64> {
        self.dperp_coefficient_tol(g, h, n1, n2, n3).map(|c| c.0)
    }

    fn dperp_coefficient_tol(&self, g: &ModuleVector, h: &ModuleVector, n1: i64, n2: i64, n3: i64) -> Result<(Complex64, usize)> {
        let pr = &self.pair;
        let shift = (n1 as f64 / (pr.q * pr.qp) as f64, n1 * pr.p, n3);
        let hat = (n2 as f64 / self.lattice.alpha, n2 * pr.qp, n1 * pr.pp);
        let scale = self.c2 / ((pr.q * pr.qp) as f64).sqrt();
        let (raw, k) = self.raw_integral(g, h, shift, hat, false, QUAD_TOL)?;
        Ok((raw * scale, k))
    }

    /// ⟨g, h⟩_D = τ Σ coefficient·UⁿVᵐ as an element of A_θ. Each V-band is
    /// summed outward in U until a block of coefficients drops below SERIES_CUT.
    pub fn d_inner(&self, g: &ModuleVector, h: &ModuleVector) -> Result<FourierElement> {
        let pr = &self.pair;
        let (q, qp) = (pr.q, pr.qp);
        let tau = pr.tau_f64();
        let mut terms = Vec::new();
        let w = self.half_width();
        for m in -3 * q..=3 * q {
            let shift_t = m as f64 * self.lattice.alpha / q as f64;
            let a = (g.t0 - w).max(h.t0 - shift_t - w);
            let b = (g.t0 + w).min(h.t0 - shift_t + w);
            let r_ok = (0..q).any(|r| self.alive(g, r, g.s0) && (r + m * pr.p - h.r0).rem_euclid(q) == 0);
            if b - a <= 1e-15 || !r_ok {
                continue;
            }
            let n0 = (h.s0 - g.s0).rem_euclid(qp);
            let coeff = |l: i64| -> Result<(i64, i64, Complex64)> {
                let n = n0 + qp * l;
                let c = self.d_coefficient_tol(g, h, m, n)?.0;
                Ok((n, m, c * tau))
            };
            terms.push(coeff(0)?);
            let mut start = 1;
            loop {
                if start > MAX_DEGREE {
                    return Err(Error::Resolution(format!("inner-product series in band V^{m} did not decay by degree {MAX_DEGREE}")));
                }
                let block: Vec<(i64, i64, Complex64)> = (start..start + BLOCK)
                    .into_par_iter()
                    .flat_map_iter(|l| [l, -l])
                    .map(coeff)
                    .collect::<Result<_>>()?;
                let small = block.iter().all(|t| t.2.norm() < SERIES_CUT);
                terms.extend(block);
                if small {
                    break;
                }
                start += BLOCK;
            }
        }
        Ok(FourierElement::from_terms(pr.theta, terms))
    }

    /// ⟨f, f⟩_{D⊥} over n₁ ∈ [−2q, 2q], all n₃, |n₂| ≤ n2_window.
    pub fn dperp_inner_ff(&self, n2_window: i64) -> Result<DPerpReport> {
        let (q, qp) = (self.pair.q, self.pair.qp);
        let f = self.f();
        let jobs: Vec<(i64, i64, i64)> = (-2 * q..=2 * q)
            .flat_map(|n1| (0..qp).flat_map(move |n3| (-n2_window..=n2_window).map(move |n2| (n1, n2, n3))))
            .collect();
        let vals: Vec<((i64, i64, i64), (Complex64, usize))> = jobs
            .into_par_iter()
            .map(|j| self.dperp_coefficient_tol(&f, &f, j.0, j.1, j.2).map(|v| (j, v)))
            .collect::<Result<_>>()?;
        let mut c0 = ZERO;
        let mut max_other: f64 = 0.0;
        let mut integrals = 0;
        for (j, (v, k)) in vals {
            integrals += k;
            if j == (0, 0, 0) {
                c0 = v;
            } else {
                max_other = max_other.max(v.norm());
            }
        }
        Ok(DPerpReport { c0, max_other, integrals, n2_window })
    }

    /// ⟨f, f⟩_D, to be compared with e.
    pub fn d_inner_ff(&self) -> Result<FourierElement> {
        let f = self.f();
        self.d_inner(&f, &f)
    }

    /// η⁻¹(V₁) = ⟨fV₁, f⟩_D
    pub fn eta_inverse_v1(&self) -> Result<FourierElement> {
        self.d_inner(&self.f_v1(), &self.f())
    }

    /// η⁻¹(V₃) = ⟨fV₃, f⟩_D
    pub fn eta_inverse_v3(&self) -> Result<FourierElement> {
        self.d_inner(&self.f_v3(), &self.f())
    }

    /// Coefficients of ⟨f, Uf⟩_{D⊥} = V₃⁻¹ Σ_m c_m V₂ᵐ, in the sector n₁ = 0.
    pub fn eta_eue_coefficients(&self) -> Result<Vec<(i64, Complex64)>> {
        let (f, uf) = (self.f(), self.u_f());
        let n3 = self.pair.qp - 1;
        let mut out = vec![(0, self.dperp_coefficient(&f, &uf, 0, 0, n3)?)];
        let mut start = 1;
        loop {
            if start > MAX_DEGREE {
                return Err(Error::Resolution("eta(eUe) series did not decay".into()));
            }
            let block: Vec<(i64, Complex64)> = (start..start + BLOCK)
                .into_par_iter()
                .flat_map_iter(|m| [m, -m])
                .map(|m| self.dperp_coefficient(&f, &uf, 0, m, n3).map(|c| (m, c)))
                .collect::<Result<_>>()?;
            let small = block.iter().all(|t| t.1.norm() < SERIES_CUT);
            out.extend(block);
            if small {
                return Ok(out);
            }
            start += BLOCK;
        }
    }

    /// C(t) = f_τ(τt)e(−τt/q′) + f_τ(τ − τt)e((τ − τt)/q′).
    pub fn limit_c(&self, t: f64) -> Complex64 {
        let tau = self.pair.tau_f64();
        let qp = self.pair.qp as f64;
        let f = |x: f64| self.profile.f(x);
        cis_turns(-tau * t / qp) * f(tau * t) + cis_turns((tau - tau * t) / qp) * f(tau - tau * t)
    }

    fn h(&self, y: f64, offset: f64) -> f64 {
        let tau = self.pair.tau_f64();
        let ap = self.pair.alpha_prime.to_f64();
        (self.profile.f(tau * y) * self.profile.f(tau * y - ap + offset)).max(0.0).sqrt()
    }

    /// h₀(−t) + h₀(1 − t), h₀(y) = √(f_τ(τy) f_τ(τy − α′)).
    pub fn h0_sum(&self, t: f64) -> f64 {
        self.h(-t, 0.0) + self.h(1.0 - t, 0.0)
    }

    /// h₁(−t) + h₁(1 − t), h₁(y) = √(f_τ(τy) f_τ(τy − α′ + 1)).
    pub fn h1_sum(&self, t: f64) -> f64 {
        self.h(-t, 1.0) + self.h(1.0 - t, 1.0)
    }

    pub fn cutdown_diagnostics(&self, samples: usize) -> CutdownDiagnostics {
        let mut d = CutdownDiagnostics {
            pair: self.pair.tuple(),
            samples,
            c_minus_one_sup: 0.0,
            h0_minus_one_sup: 0.0,
            h1_sup: 0.0,
        };
        for i in 0..=samples {
            let t = i as f64 / samples as f64;
            d.c_minus_one_sup = d.c_minus_one_sup.max((self.limit_c(t) - 1.0).norm());
            d.h0_minus_one_sup = d.h0_minus_one_sup.max((self.h0_sum(t) - 1.0).abs());
            d.h1_sup = d.h1_sup.max(self.h1_sum(t).abs());
        }
        d
    }

    pub fn write_c_curve_csv<W: Write>(&self, out: W, samples: usize) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Numeric(format!("csv: {e}"));
        w.write_record(["t", "re_c", "im_c", "h0_sum", "h1_sum"]).map_err(io)?;
        for i in 0..=samples {
            let t = i as f64 / samples as f64;
            let c = self.limit_c(t);
            w.serialize((t, c.re, c.im, self.h0_sum(t), self.h1_sum(t))).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Numeric(format!("csv: {e}")))?;
        Ok(())
    }

    /// τ(x) = τ(e)τ′(η(x)) at x = eUe·(eUe)*, where η(eUe(eUe)*) = |C(V₂)|².
    pub fn morita_trace_check(&self, e: &FourierElement) -> Result<MoritaReport> {
        let theta = self.pair.theta;
        let u = FourierElement::monomial(theta, 1, 0, Complex64::new(1.0, 0.0));
        let eue = e.twisted_mul(&u)?.twisted_mul(e)?;
        let lhs: f64 = eue.terms().map(|(_, _, c)| c.norm_sqr()).sum();
        let tau_e = e.canonical_trace().re;
        let coeffs = self.eta_eue_coefficients()?;
        let rhs_quadrature = tau_e * coeffs.iter().map(|c| c.1.norm_sqr()).sum::<f64>();
        let closed = crate::quad::integrate_real(&|t| self.limit_c(t).norm_sqr(), 0.0, 1.0, 1e-12, 64)?;
        Ok(MoritaReport {
            tau_e,
            covolume: self.lattice.covolume(),
            lhs,
            rhs_quadrature,
            rhs_closed: tau_e * closed,
        })
    }
}

fn ev(x: i64) -> i64 {
    (x.rem_euclid(2) == 0) as i64
}

fn sgn(x: i64) -> i64 {
    1 - 2 * x.rem_euclid(2)
}

/// 2φ_ij η⁻¹(V₁) = δ^{j−1}[δ^i + δ^{q′−i}(−1)^{p′}] + δ^{q−j−1}[δ^i + δ^{q′−i}(−1)^{pq′+p′}],
/// indexed by (U parity i, V parity j).
pub fn phi_eta_inverse_v1_closed(pair: &ConvergentPair) -> [i64; 4] {
    let (p, q, pp, qp) = (pair.p, pair.q, pair.pp, pair.qp);
    let mut out = [0; 4];
    for (idx, o) in out.iter_mut().enumerate() {
        let (i, j) = ((idx / 2) as i64, (idx % 2) as i64);
        *o = ev(j - 1) * (ev(i) + ev(qp - i) * sgn(pp)) + ev(q - j - 1) * (ev(i) + ev(qp - i) * sgn(p * qp + pp));
    }
    out
}

/// 2φ_ij η⁻¹(V₃) = (δ^{i−1} + δ^{q′−1−i})(δ^j + (−1)^{pi}δ^{q−j}).
pub fn phi_eta_inverse_v3_closed(pair: &ConvergentPair) -> [i64; 4] {
    let (p, q, qp) = (pair.p, pair.q, pair.qp);
    let mut out = [0; 4];
    for (idx, o) in out.iter_mut().enumerate() {
        let (i, j) = ((idx / 2) as i64, (idx % 2) as i64);
        *o = (ev(i - 1) + ev(qp - 1 - i)) * (ev(j) + sgn(p * i) * ev(q - j));
    }
    out
}

/// Largest |Φ(x) − x*|: η⁻¹ of a Φ′-unitary with Φ′(y) = y* must satisfy this.
pub fn flip_intertwining_defect(x: &FourierElement) -> f64 {
    x.flip().max_abs_diff(&x.adjoint())
}

/// Finite sums of V₃ⁿV₁ᵐ with V₃V₁ = e(p′/q′)V₁V₃, V₃^{q′} = 1; n kept in [0, q′).
#[derive(Clone, Debug, PartialEq)]
pub struct CircleElement {
    pub pp: i64,
    pub qp: i64,
    terms: BTreeMap<(i64, i64), Complex64>,
}

impl CircleElement {
    pub fn zero(pp: i64, qp: i64) -> Self {
        CircleElement { pp, qp, terms: BTreeMap::new() }
    }

    pub fn monomial(pp: i64, qp: i64, n: i64, m: i64, c: Complex64) -> Self {
        let mut x = Self::zero(pp, qp);
        x.add_term(n, m, c);
        x
    }

    pub fn add_term(&mut self, n: i64, m: i64, c: Complex64) {
        *self.terms.entry((n.rem_euclid(self.qp), m)).or_insert(ZERO) += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        self.terms.iter().map(|(&(n, m), &c)| (n, m, c))
    }

    pub fn random(pp: i64, qp: i64, nterms: usize, max_deg: i64, rng: &mut impl Rng) -> Self {
        let mut x = Self::zero(pp, qp);
        for _ in 0..nterms {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            x.add_term(rng.gen_range(0..qp), rng.gen_range(-max_deg..=max_deg), c);
        }
        x
    }

    fn phase(&self, k: i64, denom: i64) -> Complex64 {
        // e(k·p′/denom) with the numerator reduced exactly
        cis_turns((k * self.pp).rem_euclid(denom) as f64 / denom as f64)
    }

    /// V₃ⁿV₁ᵐ·V₃ⁿ′V₁ᵐ′ = e(−p′mn′/q′)V₃^{n+n′}V₁^{m+m′}
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.pp, self.qp);
        for (&(n, m), &c) in &self.terms {
            for (&(n2, m2), &d) in &other.terms {
                out.add_term(n + n2, m + m2, c * d * self.phase(-m * n2, self.qp));
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, m, c) in other.terms() {
            out.add_term(n, m, c);
        }
        out
    }

    /// Φ′(V₃ⁿV₁ᵐ) = V₃⁻ⁿV₁⁻ᵐ
    pub fn flip(&self) -> Self {
        let mut out = Self::zero(self.pp, self.qp);
        for (n, m, c) in self.terms() {
            out.add_term(-n, -m, c);
        }
        out
    }

    /// (V₃ⁿV₁ᵐ)* = e(−p′mn/q′)V₃⁻ⁿV₁⁻ᵐ
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.pp, self.qp);
        for (n, m, c) in self.terms() {
            out.add_term(-n, -m, c.conj() * self.phase(-m * n, self.qp));
        }
        out
    }

    /// (ψ₁, ψ₂) with ψ₁(V₃ⁿV₁ᵐ) = e(p′mn/2q′)δ^m and ψ₂ = e(p′mn/2q′)(−1)^{p′n}δ^{m−q′}.
    pub fn psi_traces(&self) -> [Complex64; 2] {
        let mut out = [ZERO; 2];
        for (n, m, c) in self.terms() {
            let w = c * self.phase(m * n, 2 * self.qp);
            if m.rem_euclid(2) == 0 {
                out[0] += w;
            }
            if (m - self.qp).rem_euclid(2) == 0 {
                out[1] += w * sgn(self.pp * n) as f64;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut keys: Vec<(i64, i64)> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.dedup();
        keys.iter()
            .map(|k| (self.terms.get(k).copied().unwrap_or(ZERO) - other.terms.get(k).copied().unwrap_or(ZERO)).norm())
            .fold(0.0, f64::max)
    }
}

/// π: A_{p′/q′} → C*(V₁, V₃), U′ ↦ V₁, V′ ↦ V₃; U′ᵃV′ᵇ ↦ V₁ᵃV₃ᵇ = e(−p′ab/q′)V₃ᵇV₁ᵃ.
pub fn circle_representation(x: &FourierElement, pp: i64, qp: i64) -> CircleElement {
    let mut out = CircleElement::zero(pp, qp);
    for (a, b, c) in x.terms() {
        let ph = out.phase(-a * b, qp);
        out.add_term(b, a, c * ph);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiIdentityReport {
    pub pp: i64,
    pub qp: i64,
    pub monomials: usize,
    /// max |ψ₁πΞ − (φ₀₀ + φ₁₀)|
    pub psi1_residual: f64,
    /// max |ψ₂πΞ − (φ_{0,q′} + (−1)^{p′}φ_{1,q′})|
    pub psi2_residual: f64,
}

/// Checks ψ₁πΞ = φ₀₀ + φ₁₀ and ψ₂πΞ = φ_{0,q′} + (−1)^{p′}φ_{1,q′} on U′ᵐV′ⁿ,
/// m, n ∈ {−1, 0, 1, 2}.
pub fn psi_pi_xi_identities(pp: i64, qp: i64) -> PsiIdentityReport {
    use crate::algebra::Parity;
    let theta = Real2::ratio(pp, qp);
    let k = qp.rem_euclid(2) as u8;
    let mut rep = PsiIdentityReport { pp, qp, monomials: 0, psi1_residual: 0.0, psi2_residual: 0.0 };
    for m in -1..=2 {
        for n in -1..=2 {
            let x = FourierElement::monomial(theta, m, n, Complex64::new(1.0, 0.0));
            let psi = circle_representation(&x.xi(), pp, qp).psi_traces();
            let rhs1 = x.phi_trace(Parity(0, 0)) + x.phi_trace(Parity(1, 0));
            let rhs2 = x.phi_trace(Parity(0, k)) + x.phi_trace(Parity(1, k)) * sgn(pp) as f64;
            rep.psi1_residual = rep.psi1_residual.max((psi[0] - rhs1).norm());
            rep.psi2_residual = rep.psi2_residual.max((psi[1] - rhs2).norm());
            rep.monomials += 1;
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{standing_pairs, ThetaValue};
    use crate::chern::snap_phis;
    use crate::fields::{ac_phi_closed, build_ac_projection};
    use crate::ktheory::coefficients_a;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn golden(p: i64, q: i64, pp: i64, qp: i64) -> ConvergentPair {
        ConvergentPair::new(ThetaValue::golden().value(), p, q, pp, qp).unwrap()
    }

    fn all_pairs() -> Vec<ConvergentPair> {
        let mut v = Vec::new();
        for t in [ThetaValue::golden(), ThetaValue::golden_complement(), ThetaValue::parse("cf:3,1,4,1,5,9,2,6,5,3,5").unwrap()] {
            v.extend(standing_pairs(&t, 11).unwrap());
        }
        v
    }

    #[test]
    fn lattice_geometry() {
        for pair in all_pairs() {
            let lat = LatticeBasis::new(&pair);
            assert!(lat.biorthogonality_defect() < 1e-9, "{:?}", pair.tuple());
            assert!((lat.covolume() - pair.tau_f64()).abs() < 1e-12);
            let th = lat.commutator_turns(&lat.epsilon[0], &lat.epsilon[1]);
            assert!(centered(lat.cocycle_turns(&lat.epsilon[0], &lat.epsilon[1]) - pair.theta.to_f64()).abs() < 1e-12);
            assert!(centered(th - pair.theta.to_f64()).abs() < 1e-12);
            // V₃V₁ = e(p′/q′)V₁V₃
            let c31 = lat.commutator_turns(&lat.delta[2], &lat.delta[0]);
            assert!(centered(c31 - pair.pp as f64 / pair.qp as f64).abs() < 1e-12);
            assert!(lat.commutator_turns(&lat.delta[1], &lat.delta[2]).abs() < 1e-12);
            let tp = theta_prime(&pair);
            assert!(tp > 0.0 && tp < 1.0);
            for r in theta_prime_residuals(&pair) {
                assert!(r < 1e-9, "{r} for {:?}", pair.tuple());
            }
        }
    }

    #[test]
    fn closed_forms_reduce_to_unit_traces_and_coefficients() {
        for pair in all_pairs() {
            let (p, q, pp, qp) = (pair.p, pair.q, pair.pp, pair.qp);
            let v1 = phi_eta_inverse_v1_closed(&pair);
            let v3 = phi_eta_inverse_v3_closed(&pair);
            let a = coefficients_a(&pair);
            let e = ac_phi_closed(&pair);
            for idx in 0..4 {
                let (i, j) = ((idx / 2) as i64, (idx % 2) as i64);
                if qp % 2 != 0 {
                    assert_eq!(v1[idx], sgn(pp * i) * (ev(j - 1) + sgn(p * i) * ev(q - j - 1)));
                    assert_eq!(v1[idx], a.plus[idx]);
                } else {
                    assert_eq!(v3[idx], 2 * ev(i - 1) * sgn(p * j));
                }
                // φ(e) = a⁻ + a⁺δ^{q′}, φη⁻¹(V₃) = a⁻ − a⁺δ^{q′}
                assert_eq!(e[idx], a.minus[idx] + a.plus[idx] * ev(qp));
                assert_eq!(v3[idx], a.minus[idx] - a.plus[idx] * ev(qp));
            }
        }
    }

    #[test]
    fn psi_traces_basics() {
        let one = CircleElement::monomial(3, 7, 0, 0, Complex64::new(1.0, 0.0));
        assert_eq!(one.psi_traces(), [Complex64::new(1.0, 0.0), ZERO]);
        let v3 = CircleElement::monomial(3, 8, 1, 0, Complex64::new(1.0, 0.0));
        assert_eq!(v3.psi_traces(), [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
        let v1 = CircleElement::monomial(3, 7, 0, 1, Complex64::new(1.0, 0.0));
        assert_eq!(v1.psi_traces(), [ZERO, Complex64::new(1.0, 0.0)]);
        // n and n + q′ name the same monomial
        let a = CircleElement::monomial(3, 7, 9, 3, Complex64::new(1.0, 0.0));
        let b = CircleElement::monomial(3, 7, 2, 3, Complex64::new(1.0, 0.0));
        assert_eq!(a, b);
    }

    #[test]
    fn psi_trace_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (pp, qp) in [(5, 8), (13, 21), (2, 5), (3, 4)] {
            for _ in 0..10 {
                let x = CircleElement::random(pp, qp, 6, 4, &mut rng);
                let y = CircleElement::random(pp, qp, 6, 4, &mut rng);
                let l = x.mul(&y).psi_traces();
                let r = y.flip().mul(&x).psi_traces();
                for k in 0..2 {
                    assert!((l[k] - r[k]).norm() < 1e-12);
                }
                // V₃V₁ = e(p′/q′)V₁V₃ and adjoint is anti-multiplicative
                assert!(x.mul(&y).adjoint().max_abs_diff(&y.adjoint().mul(&x.adjoint())) < 1e-12);
            }
            let v3 = CircleElement::monomial(pp, qp, 1, 0, Complex64::new(1.0, 0.0));
            let v1 = CircleElement::monomial(pp, qp, 0, 1, Complex64::new(1.0, 0.0));
            let lhs = v3.mul(&v1);
            let rhs = v1.mul(&v3);
            let w = cis_turns(pp as f64 / qp as f64);
            assert!(lhs.max_abs_diff(&CircleElement { terms: rhs.terms.iter().map(|(k, c)| (*k, c * w)).collect(), ..rhs.clone() }) < 1e-12);
        }
    }

    #[test]
    fn psi_pi_xi() {
        for (pp, qp) in [(5, 8), (13, 21), (2, 5), (3, 4), (8, 13), (1, 3)] {
            let r = psi_pi_xi_identities(pp, qp);
            assert!(r.psi1_residual < 1e-12 && r.psi2_residual < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn cutdown_functions() {
        let pairs = [golden(3, 5, 5, 8), golden(8, 13, 13, 21), golden(21, 34, 34, 55)];
        let mut last: Option<CutdownDiagnostics> = None;
        for pair in &pairs {
            let b = Bimodule::new(pair).unwrap();
            let d = b.cutdown_diagnostics(1024);
            let f = |x: f64| b.profile().f(x);
            let tau = pair.tau_f64();
            let c0 = f(0.0) + cis_turns(tau / pair.qp as f64) * f(tau);
            assert!((b.limit_c(0.0) - c0).norm() < 1e-15);
            if let Some(prev) = &last {
                assert!(d.c_minus_one_sup < prev.c_minus_one_sup);
                assert!(d.h1_sup < prev.h1_sup);
            }
            last = Some(d);
        }
    }

    #[test]
    fn inner_products_small_pair() {
        // the cheapest standing pair: θ = golden complement, (1,3,2,5)
        let th = ThetaValue::golden_complement().value();
        let pair = ConvergentPair::new(th, 1, 3, 2, 5).unwrap();
        assert!(pair.is_standing());
        let b = Bimodule::new(&pair).unwrap();
        let r = b.dperp_inner_ff(4).unwrap();
        assert!((r.c0 - 1.0).norm() < 1e-8 && r.max_other < 1e-8, "{r:?}");
        let ff = b.d_inner_ff().unwrap();
        let e = build_ac_projection(&pair).unwrap();
        assert!(ff.max_abs_diff(&e) < 1e-8, "{}", ff.max_abs_diff(&e));
        assert_eq!(ff.v_range(), Some((-pair.q, pair.q)));
        let v1 = b.eta_inverse_v1().unwrap();
        let v3 = b.eta_inverse_v3().unwrap();
        assert!(flip_intertwining_defect(&v1) < 1e-9 && flip_intertwining_defect(&v3) < 1e-9);
        assert!(v1.terms().all(|(m, n, _)| m % pair.qp == 0 && (n + 1) % pair.q == 0));
        let got1 = snap_phis(v1.phi_traces().map(|c| c.re)).unwrap();
        let got3 = snap_phis(v3.phi_traces().map(|c| c.re)).unwrap();
        assert_eq!(got1, phi_eta_inverse_v1_closed(&pair));
        assert_eq!(got3, phi_eta_inverse_v3_closed(&pair));
    }
}
