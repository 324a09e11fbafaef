//! Fourier polynomials Σ c_{m,n} U^m V^n in the rotation algebra A_θ.
//!
//! Normal form is U^m V^n with U on the left, so that
//! U^m V^n · U^{m'} V^{n'} = e(θ n m') U^{m+m'} V^{n+n'}.
//! Coefficients are stored per V-degree as a dense run of U-coefficients;
//! anything with modulus below [`PRUNE`] is treated as absent.

use crate::error::{param, Result};
use crate::real::{cis_turns, dist_mod1, Real2};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const PRUNE: f64 = 1e-14;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Parity class (j, k) of a Φ-trace φ_jk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Parity(pub u8, pub u8);

impl Parity {
    pub const ALL: [Parity; 4] = [Parity(0, 0), Parity(0, 1), Parity(1, 0), Parity(1, 1)];

    pub fn index(self) -> usize {
        (2 * self.0 + self.1) as usize
    }

    pub fn from_index(i: usize) -> Parity {
        Parity((i / 2) as u8, (i % 2) as u8)
    }

    /// Reduce arbitrary integers mod 2.
    pub fn of(j: i64, k: i64) -> Parity {
        Parity(j.rem_euclid(2) as u8, k.rem_euclid(2) as u8)
    }

    pub fn label(self) -> String {
        format!("{}{}", self.0, self.1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub start: i64,
    pub coeffs: Vec<Complex64>,
}

impl Row {
    pub fn end(&self) -> i64 {
        self.start + self.coeffs.len() as i64 - 1
    }

    /// Zero out sub-threshold entries and trim; None when nothing survives.
    fn normalized(start: i64, mut coeffs: Vec<Complex64>) -> Option<Row> {
        for c in coeffs.iter_mut() {
            if c.norm_sqr() < PRUNE * PRUNE {
                *c = ZERO;
            }
        }
        let first = coeffs.iter().position(|c| *c != ZERO)?;
        let last = coeffs.iter().rposition(|c| *c != ZERO).unwrap();
        coeffs.truncate(last + 1);
        coeffs.drain(..first);
        Some(Row { start: start + first as i64, coeffs })
    }

    fn get(&self, m: i64) -> Complex64 {
        let i = m - self.start;
        if i < 0 || i as usize >= self.coeffs.len() {
            ZERO
        } else {
            self.coeffs[i as usize]
        }
    }
}

#[derive(Clone, Debug)]
pub struct FourierElement {
    theta: Real2,
    rows: BTreeMap<i64, Row>,
}

/// One serialized coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub m: i64,
    pub n: i64,
    pub re: f64,
    pub im: f64,
}

pub fn same_theta(a: Real2, b: Real2) -> bool {
    dist_mod1(a, b) < 1e-12
}

fn check_theta(a: &FourierElement, b: &FourierElement) -> Result<()> {
    if same_theta(a.theta, b.theta) {
        Ok(())
    } else {
        param(format!(
            "theta mismatch: {} vs {}",
            a.theta.to_f64(),
            b.theta.to_f64()
        ))
    }
}

impl FourierElement {
    pub fn zero(theta: Real2) -> Self {
        FourierElement { theta, rows: BTreeMap::new() }
    }

    pub fn one(theta: Real2) -> Self {
        Self::monomial(theta, 0, 0, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(theta: Real2, m: i64, n: i64, c: Complex64) -> Self {
        Self::from_terms(theta, [(m, n, c)])
    }

    /// Sums repeated (m, n) entries.
    pub fn from_terms(theta: Real2, terms: impl IntoIterator<Item = (i64, i64, Complex64)>) -> Self {
        let mut acc: BTreeMap<i64, BTreeMap<i64, Complex64>> = BTreeMap::new();
        for (m, n, c) in terms {
            *acc.entry(n).or_default().entry(m).or_insert(ZERO) += c;
        }
        let mut rows = BTreeMap::new();
        for (n, row) in acc {
            let (Some((&lo, _)), Some((&hi, _))) = (row.first_key_value(), row.last_key_value()) else {
                continue;
            };
            let mut v = vec![ZERO; (hi - lo + 1) as usize];
            for (m, c) in row {
                v[(m - lo) as usize] = c;
            }
            if let Some(r) = Row::normalized(lo, v) {
                rows.insert(n, r);
            }
        }
        FourierElement { theta, rows }
    }

    /// Build from dense rows (V-degree, first U-degree, coefficients).
    pub fn from_rows(theta: Real2, rows: impl IntoIterator<Item = (i64, i64, Vec<Complex64>)>) -> Self {
        let mut out = FourierElement::zero(theta);
        for (n, start, v) in rows {
            let piece = FourierElement {
                theta,
                rows: Row::normalized(start, v).map(|r| (n, r)).into_iter().collect(),
            };
            out = out.combine(&piece, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        }
        out
    }

    pub fn theta(&self) -> Real2 {
        self.theta
    }

    /// Same coefficients, reinterpreted in A_t (used when θ is only known mod 1).
    pub fn with_theta(mut self, theta: Real2) -> Self {
        self.theta = theta;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn coeff(&self, m: i64, n: i64) -> Complex64 {
        self.rows.get(&n).map_or(ZERO, |r| r.get(m))
    }

    pub fn rows(&self) -> impl Iterator<Item = (i64, &Row)> {
        self.rows.iter().map(|(n, r)| (*n, r))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        self.rows.iter().flat_map(|(&n, r)| {
            r.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != ZERO)
                .map(move |(i, c)| (r.start + i as i64, n, *c))
        })
    }

    pub fn nnz(&self) -> usize {
        self.rows
            .values()
            .map(|r| r.coeffs.iter().filter(|c| **c != ZERO).count())
            .sum()
    }

    /// (min, max) V-degree.
    pub fn v_range(&self) -> Option<(i64, i64)> {
        Some((*self.rows.keys().next()?, *self.rows.keys().next_back()?))
    }

    /// (min, max) U-degree.
    pub fn u_range(&self) -> Option<(i64, i64)> {
        let lo = self.rows.values().map(|r| r.start).min()?;
        let hi = self.rows.values().map(|r| r.end()).max()?;
        Some((lo, hi))
    }

    pub fn l1_norm(&self) -> f64 {
        self.rows.values().flat_map(|r| r.coeffs.iter()).map(|c| c.norm()).sum()
    }

    /// Largest coefficient difference |a_{m,n} − b_{m,n}|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = self.combine(other, Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0));
        d.rows
            .values()
            .flat_map(|r| r.coeffs.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// a·self + b·other without a θ check.
    fn combine(&self, other: &Self, a: Complex64, b: Complex64) -> Self {
        let mut rows = BTreeMap::new();
        let keys: std::collections::BTreeSet<i64> =
            self.rows.keys().chain(other.rows.keys()).copied().collect();
        for n in keys {
            let (x, y) = (self.rows.get(&n), other.rows.get(&n));
            let row = match (x, y) {
                (Some(x), None) => Row::normalized(x.start, x.coeffs.iter().map(|c| a * c).collect()),
                (None, Some(y)) => Row::normalized(y.start, y.coeffs.iter().map(|c| b * c).collect()),
                (Some(x), Some(y)) => {
                    let lo = x.start.min(y.start);
                    let hi = x.end().max(y.end());
                    let mut v = vec![ZERO; (hi - lo + 1) as usize];
                    for (i, c) in x.coeffs.iter().enumerate() {
                        v[(x.start - lo) as usize + i] += a * c;
                    }
                    for (i, c) in y.coeffs.iter().enumerate() {
                        v[(y.start - lo) as usize + i] += b * c;
                    }
                    Row::normalized(lo, v)
                }
                (None, None) => None,
            };
            if let Some(r) = row {
                rows.insert(n, r);
            }
        }
        FourierElement { theta: self.theta, rows }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_theta(self, other)?;
        Ok(self.combine(other, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_theta(self, other)?;
        Ok(self.combine(other, Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)))
    }

    /// a·self + b·other.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        check_theta(self, other)?;
        Ok(self.combine(other, Complex64::new(a, 0.0), Complex64::new(b, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.combine(&FourierElement::zero(self.theta), c, ZERO)
    }

    /// self + c·1.
    pub fn add_scalar(&self, c: Complex64) -> Self {
        self.combine(&FourierElement::one(self.theta), Complex64::new(1.0, 0.0), c)
    }

    pub fn adjoint(&self) -> Self {
        let th = self.theta;
        let rows = self
            .rows
            .iter()
            .map(|(&n, r)| {
                let len = r.coeffs.len();
                let start = -r.end();
                let coeffs = (0..len)
                    .map(|i| {
                        let m = start + i as i64; // new U-degree; source degree is −m
                        let c = r.coeffs[len - 1 - i];
                        c.conj() * th.phase(-m * n)
                    })
                    .collect();
                (-n, Row { start, coeffs })
            })
            .collect();
        FourierElement { theta: th, rows }
    }

    pub fn canonical_trace(&self) -> Complex64 {
        self.coeff(0, 0)
    }

    /// φ_jk(U^mV^n) = e(−θmn/2) when m ≡ j, n ≡ k (mod 2).
    pub fn phi_trace(&self, jk: Parity) -> Complex64 {
        let half = self.theta.half();
        let mut s = ZERO;
        for (&n, r) in self.rows.iter() {
            if n.rem_euclid(2) as u8 != jk.1 {
                continue;
            }
            let first = r.start + ((jk.0 as i64 - r.start).rem_euclid(2));
            let mut m = first;
            while m <= r.end() {
                let c = r.coeffs[(m - r.start) as usize];
                if c != ZERO {
                    s += c * cis_turns(half.turns_times(-m * n));
                }
                m += 2;
            }
        }
        s
    }

    pub fn phi_traces(&self) -> [Complex64; 4] {
        Parity::ALL.map(|p| self.phi_trace(p))
    }

    /// Image under a monomial map (m, n) ↦ (m', n') with coefficient factor.
    fn map_monomials(&self, theta_out: Real2, f: impl Fn(i64, i64) -> (i64, i64, Complex64)) -> Self {
        FourierElement::from_terms(
            theta_out,
            self.terms().map(|(m, n, c)| {
                let (m2, n2, w) = f(m, n);
                (m2, n2, c * w)
            }),
        )
    }

    /// Flip Φ: U ↦ U⁻¹, V ↦ V⁻¹.
    pub fn flip(&self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|(&n, r)| {
                let mut coeffs = r.coeffs.clone();
                coeffs.reverse();
                (-n, Row { start: -r.end(), coeffs })
            })
            .collect();
        FourierElement { theta: self.theta, rows }
    }

    /// Fourier transform σ: U ↦ V⁻¹, V ↦ U.
    pub fn fourier(&self) -> Self {
        let th = self.theta;
        self.map_monomials(th, |m, n| (n, -m, th.phase(-m * n)))
    }

    /// Cubic transform κ: U ↦ e(−θ/2)U⁻¹V, V ↦ U⁻¹.
    pub fn cubic(&self) -> Self {
        let half = self.theta.half();
        self.map_monomials(self.theta, |m, n| {
            (-m - n, m, cis_turns(half.turns_times(-m * (m + 2 * n))))
        })
    }

    /// γ₁ (U ↦ −U), γ₂ (V ↦ −V), γ₃ = γ₁γ₂.
    pub fn gamma(&self, i: u8) -> Result<Self> {
        let sign = |m: i64, n: i64| -> f64 {
            let e = match i {
                1 => m,
                2 => n,
                _ => m + n,
            };
            if e.rem_euclid(2) == 0 {
                1.0
            } else {
                -1.0
            }
        };
        if !(1..=3).contains(&i) {
            return param(format!("gamma index {i} not in 1..3"));
        }
        let rows = self
            .rows
            .iter()
            .filter_map(|(&n, r)| {
                let v = r
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * sign(r.start + k as i64, n))
                    .collect();
                Row::normalized(r.start, v).map(|r| (n, r))
            })
            .collect();
        Ok(FourierElement { theta: self.theta, rows })
    }

    /// β_s: A_{1−s} → A_s, U ↦ −U, V ↦ −V⁻¹. `self` lives at 1 − s.
    pub fn beta(&self, s: Real2) -> Result<Self> {
        if !same_theta(self.theta, Real2::ONE.sub(s)) {
            return param(format!(
                "beta_s expects an element of A_(1-s) with s = {}, got theta = {}",
                s.to_f64(),
                self.theta.to_f64()
            ));
        }
        Ok(self.map_monomials(s, |m, n| {
            let sg = if (m + n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            (m, -n, Complex64::new(sg, 0.0))
        }))
    }

    /// Linear anti-automorphism Ξ(U^mV^n) = U^nV^m.
    pub fn xi(&self) -> Self {
        self.map_monomials(self.theta, |m, n| (n, m, Complex64::new(1.0, 0.0)))
    }

    /// η: A_{2θ} → A_θ, U ↦ −U², V ↦ V. `self` lives at 2θ.
    pub fn eta_doubling(&self, theta: Real2) -> Result<Self> {
        if !same_theta(self.theta, theta.mul_int(2)) {
            return param(format!(
                "eta expects an element of A_(2 theta) for theta = {}, got {}",
                theta.to_f64(),
                self.theta.to_f64()
            ));
        }
        Ok(self.map_monomials(theta, |m, n| {
            let sg = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            (2 * m, n, Complex64::new(sg, 0.0))
        }))
    }

    /// ζ: A_τ → A_θ, U_τ ↦ U^{q'}, V_τ ↦ V^q, for τ = q'(qθ − p).
    pub fn zeta(&self, theta: Real2, p: i64, q: i64, qp: i64) -> Result<Self> {
        let tau = theta.mul_int(q).sub(Real2::from_int(p)).mul_int(qp);
        if !same_theta(self.theta, tau) {
            return param(format!(
                "zeta expects an element of A_tau, tau = {}, got theta = {}",
                tau.to_f64(),
                self.theta.to_f64()
            ));
        }
        let rows = self
            .rows
            .iter()
            .map(|(&n, r)| {
                let len = (r.coeffs.len() - 1) * qp as usize + 1;
                let mut v = vec![ZERO; len];
                for (i, c) in r.coeffs.iter().enumerate() {
                    v[i * qp as usize] = *c;
                }
                (q * n, Row { start: qp * r.start, coeffs: v })
            })
            .collect();
        Ok(FourierElement { theta, rows })
    }

    pub fn random(theta: Real2, nterms: usize, max_deg: i64, rng: &mut impl Rng) -> Self {
        FourierElement::from_terms(
            theta,
            (0..nterms).map(|_| {
                (
                    rng.gen_range(-max_deg..=max_deg),
                    rng.gen_range(-max_deg..=max_deg),
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                )
            }),
        )
    }

    pub fn to_terms(&self) -> Vec<Term> {
        self.terms().map(|(m, n, c)| Term { m, n, re: c.re, im: c.im }).collect()
    }

    pub fn from_term_records(theta: Real2, terms: &[Term]) -> Self {
        FourierElement::from_terms(theta, terms.iter().map(|t| (t.m, t.n, Complex64::new(t.re, t.im))))
    }

    pub fn twisted_mul(&self, other: &Self) -> Result<Self> {
        check_theta(self, other)?;
        Ok(product(self, other, false))
    }

    /// Product whose result the caller knows to be self-adjoint (for example
    /// x·x or x²·x with x = x*). Only rows n ≥ 0 are computed; the others
    /// follow from c_{−m,−n} = e(θmn)·conj(c_{m,n}).
    pub fn mul_self_adjoint(&self, other: &Self) -> Result<Self> {
        check_theta(self, other)?;
        Ok(product(self, other, true))
    }
}

/// FFT sizes 2^a·3^b.
fn good_fft_size(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p3 = 1usize;
    while p3 < best {
        let mut m = p3;
        while m < n {
            m *= 2;
        }
        best = best.min(m);
        p3 *= 3;
    }
    best
}

fn twisted_row(theta: Real2, n: i64, row: &Row, out: &mut [Complex64], offset: usize) {
    for (j, c) in row.coeffs.iter().enumerate() {
        out[offset + j] = if *c == ZERO {
            ZERO
        } else {
            c * theta.phase(n * (row.start + j as i64))
        };
    }
}

fn product(a: &FourierElement, b: &FourierElement, hermitian: bool) -> FourierElement {
    let theta = a.theta;
    if a.is_zero() || b.is_zero() {
        return FourierElement::zero(theta);
    }
    // result row -> contributing (a-row, b-row) pairs
    let mut plan: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
    for &n in a.rows.keys() {
        for &n2 in b.rows.keys() {
            let r = n + n2;
            if !hermitian || r >= 0 {
                plan.entry(r).or_default().push((n, n2));
            }
        }
    }
    let (a0, a1) = a.u_range().unwrap();
    let (b0, b1) = b.u_range().unwrap();
    let len = ((a1 - a0) + (b1 - b0) + 1) as usize;
    let nfft = good_fft_size(len);

    let npairs: usize = plan.values().map(|v| v.len()).sum();
    let direct_cost: f64 = plan
        .values()
        .flatten()
        .map(|(n, n2)| {
            let na = a.rows[n].coeffs.iter().filter(|c| **c != ZERO).count();
            (na * b.rows[n2].coeffs.len()) as f64
        })
        .sum();
    let fft_cost = (a.rows.len() + npairs + plan.len()) as f64 * nfft as f64 * ((nfft as f64).log2() + 4.0) * 1.5;

    let computed: Vec<(i64, Option<Row>)> = if direct_cost <= fft_cost {
        plan.par_iter()
            .map(|(&r, pairs)| {
                let lo = pairs.iter().map(|(n, n2)| a.rows[n].start + b.rows[n2].start).min().unwrap();
                let hi = pairs.iter().map(|(n, n2)| a.rows[n].end() + b.rows[n2].end()).max().unwrap();
                let mut acc = vec![ZERO; (hi - lo + 1) as usize];
                let mut tb = Vec::new();
                for &(n, n2) in pairs {
                    let (ra, rb) = (&a.rows[&n], &b.rows[&n2]);
                    tb.clear();
                    tb.resize(rb.coeffs.len(), ZERO);
                    twisted_row(theta, n, rb, &mut tb, 0);
                    let base = (ra.start + rb.start - lo) as usize;
                    for (i, ca) in ra.coeffs.iter().enumerate() {
                        if *ca == ZERO {
                            continue;
                        }
                        let dst = &mut acc[base + i..base + i + tb.len()];
                        for (d, t) in dst.iter_mut().zip(tb.iter()) {
                            *d += ca * t;
                        }
                    }
                }
                (r, Row::normalized(lo, acc))
            })
            .collect()
    } else {
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(nfft);
        let inv = planner.plan_fft_inverse(nfft);
        let spectra: BTreeMap<i64, Vec<Complex64>> = a
            .rows
            .par_iter()
            .map(|(&n, ra)| {
                let mut buf = vec![ZERO; nfft];
                let off = (ra.start - a0) as usize;
                buf[off..off + ra.coeffs.len()].copy_from_slice(&ra.coeffs);
                fwd.process(&mut buf);
                (n, buf)
            })
            .collect();
        let scale = 1.0 / nfft as f64;
        plan.par_iter()
            .map(|(&r, pairs)| {
                let mut acc = vec![ZERO; nfft];
                let mut buf = vec![ZERO; nfft];
                let mut scratch = vec![ZERO; fwd.get_inplace_scratch_len()];
                for &(n, n2) in pairs {
                    let rb = &b.rows[&n2];
                    buf.iter_mut().for_each(|x| *x = ZERO);
                    twisted_row(theta, n, rb, &mut buf, (rb.start - b0) as usize);
                    fwd.process_with_scratch(&mut buf, &mut scratch);
                    for ((s, x), y) in acc.iter_mut().zip(spectra[&n].iter()).zip(buf.iter()) {
                        *s += x * y;
                    }
                }
                let mut scratch = vec![ZERO; inv.get_inplace_scratch_len()];
                inv.process_with_scratch(&mut acc, &mut scratch);
                acc.truncate(len);
                acc.iter_mut().for_each(|x| *x *= scale);
                (r, Row::normalized(a0 + b0, acc))
            })
            .collect()
    };

    let mut rows: BTreeMap<i64, Row> = computed
        .into_iter()
        .filter_map(|(r, row)| row.map(|x| (r, x)))
        .collect();
    if hermitian {
        let mirrored: Vec<(i64, Row)> = rows
            .iter()
            .filter(|(&n, _)| n > 0)
            .map(|(&n, r)| {
                let len = r.coeffs.len();
                let start = -r.end();
                let coeffs = (0..len)
                    .map(|i| {
                        let m = start + i as i64;
                        r.coeffs[len - 1 - i].conj() * theta.phase(-m * n)
                    })
                    .collect();
                (-n, Row { start, coeffs })
            })
            .collect();
        rows.extend(mirrored);
    }
    FourierElement { theta, rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn golden() -> Real2 {
        Real2::from_int(5).sqrt().sub(Real2::ONE).half()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn u(th: Real2) -> FourierElement {
        FourierElement::monomial(th, 1, 0, c(1.0, 0.0))
    }

    fn v(th: Real2) -> FourierElement {
        FourierElement::monomial(th, 0, 1, c(1.0, 0.0))
    }

    /// Oracle: the normal-form rule applied term by term with no row structure.
    fn naive_product(a: &FourierElement, b: &FourierElement) -> FourierElement {
        let th = a.theta();
        let mut terms = Vec::new();
        for (m, n, x) in a.terms() {
            for (m2, n2, y) in b.terms() {
                let ph = th.mul_int(n * m2).fract().to_f64();
                terms.push((m + m2, n + n2, x * y * cis_turns(ph)));
            }
        }
        FourierElement::from_terms(th, terms)
    }

    #[test]
    fn defining_relation() {
        let th = golden();
        let vu = v(th).twisted_mul(&u(th)).unwrap();
        assert!((vu.coeff(1, 1) - th.phase(1)).norm() < 1e-15);
        assert_eq!(vu.nnz(), 1);
        let uv = u(th).twisted_mul(&v(th)).unwrap();
        assert!((uv.coeff(1, 1) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn product_adjoint_reverses_order() {
        let th = golden();
        let a = u(th).add(&u(th).adjoint()).unwrap();
        let b = v(th).add(&v(th).adjoint()).unwrap();
        let lhs = a.twisted_mul(&b).unwrap().adjoint();
        let rhs = b.adjoint().twisted_mul(&a.adjoint()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);
        // (U+U*)(V+V*) = UV + UV⁻¹ + U⁻¹V + U⁻¹V⁻¹, all with unit coefficients
        let ab = a.twisted_mul(&b).unwrap();
        for (m, n) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            assert!((ab.coeff(m, n) - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn adjoint_of_monomial() {
        let th = golden();
        let x = FourierElement::monomial(th, 3, -2, c(0.5, 0.25));
        let y = x.adjoint();
        assert!((y.coeff(-3, 2) - c(0.5, -0.25) * th.phase(-6)).norm() < 1e-15);
    }

    #[test]
    fn fft_path_matches_naive() {
        let th = golden();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // long dense rows force the FFT branch
        let mk = |rng: &mut ChaCha8Rng| {
            FourierElement::from_rows(
                th,
                (-2..=2).map(|n| {
                    let v: Vec<Complex64> =
                        (0..300).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                    (n, -150 + 7 * n, v)
                }),
            )
        };
        let a = mk(&mut rng);
        let b = mk(&mut rng);
        let fast = a.twisted_mul(&b).unwrap();
        let slow = naive_product(&a, &b);
        assert!(fast.max_abs_diff(&slow) < 1e-11, "{}", fast.max_abs_diff(&slow));
    }

    #[test]
    fn hermitian_product_matches_full() {
        let th = golden();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = FourierElement::random(th, 30, 6, &mut rng);
        let h = x.add(&x.adjoint()).unwrap();
        let full = h.twisted_mul(&h).unwrap();
        let half = h.mul_self_adjoint(&h).unwrap();
        assert!(full.max_abs_diff(&half) < 1e-13);
    }

    #[test]
    fn traces_of_monomials() {
        let th = golden();
        assert_eq!(FourierElement::one(th).canonical_trace(), c(1.0, 0.0));
        assert_eq!(u(th).canonical_trace(), ZERO);
        let t: Vec<_> = FourierElement::one(th).phi_traces().iter().map(|z| z.re).collect();
        assert_eq!(t, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn cubic_and_fourier_on_generators() {
        let th = golden();
        let ku = u(th).cubic();
        assert!((ku.coeff(-1, 1) - cis_turns(-th.half().to_f64())).norm() < 1e-15);
        let kv = v(th).cubic();
        assert!((kv.coeff(-1, 0) - c(1.0, 0.0)).norm() < 1e-15);
        let su = u(th).fourier();
        assert!((su.coeff(0, -1) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zeta_of_generator() {
        let th = golden();
        let tau = th.mul_int(5).sub(Real2::from_int(3)).mul_int(8);
        let x = FourierElement::monomial(tau, 1, 0, c(1.0, 0.0));
        let z = x.zeta(th, 3, 5, 8).unwrap();
        assert!((z.coeff(8, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(x.zeta(tau, 3, 5, 8).is_err());
    }

    #[test]
    fn theta_mismatch_is_parameter_error() {
        let a = FourierElement::one(Real2::new(0.3));
        let b = FourierElement::one(Real2::new(0.4));
        assert!(matches!(a.twisted_mul(&b), Err(crate::error::Error::Parameter(_))));
    }
}
