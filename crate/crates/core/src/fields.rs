//! The projection fields 𝓔(t), 𝓕(s), the K₀ basis P₁…P₆ and the approximately
//! central projection e = ζ𝓔(τ).

use crate::algebra::FourierElement;
use crate::arithmetic::ConvergentPair;
use crate::bump::{build_bump, BumpProfile};
use crate::error::{param, Result};
use crate::real::Real2;
use num_complex::Complex64;

/// 𝓔 built from an existing profile; `theta` must equal profile.t.
pub fn field_from_profile(theta: Real2, b: &BumpProfile) -> FourierElement {
    let bound = b.bound;
    let ks = -bound..=bound;
    let ghat: Vec<Complex64> = ks.clone().map(|k| b.ghat(k)).collect();
    let fhat: Vec<Complex64> = ks.clone().map(|k| Complex64::new(b.fhat(k).re, 0.0)).collect();
    // V·G(U) = Σ ĝ(k) e(θk) U^k V
    let upper: Vec<Complex64> = ks.zip(&ghat).map(|(k, g)| g * theta.phase(k)).collect();
    FourierElement::from_rows(theta, [(-1, -bound, ghat), (0, -bound, fhat), (1, -bound, upper)])
}

/// 𝓔(t) = G_t(U)V⁻¹ + F_t(U) + V·G_t(U) in A_t.
pub fn build_e_field(t: Real2) -> Result<FourierElement> {
    let b = build_bump(t.to_f64())?;
    Ok(field_from_profile(t, &b))
}

/// 𝓕(s) = 1 − β_s𝓔(1 − s) in A_s.
pub fn build_f_field(s: Real2) -> Result<FourierElement> {
    let sv = s.to_f64();
    if !(sv > 0.0 && sv <= 0.5) {
        return param(format!("F(s) needs 0 < s <= 1/2, got {sv}"));
    }
    let e = build_e_field(Real2::ONE.sub(s))?;
    let b = e.beta(s)?;
    Ok(b.scale(Complex64::new(-1.0, 0.0)).add_scalar(Complex64::new(1.0, 0.0)))
}

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() < 1e-12
}

fn branch_guard(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return param(format!("theta = {theta} outside (0, 1)"));
    }
    for b in [0.25, 0.5, 0.75] {
        if near(theta, b) {
            return param(format!("theta = {theta} sits on the basis branch point {b}"));
        }
    }
    Ok(())
}

/// 𝓕(θ) for θ < ½, 𝓔(θ) for θ > ½.
fn p3(theta: Real2) -> Result<FourierElement> {
    if theta.to_f64() < 0.5 {
        build_f_field(theta)
    } else {
        build_e_field(theta)
    }
}

fn p2(theta: Real2) -> Result<FourierElement> {
    let th = theta.to_f64();
    if th > 0.5 {
        return p2(Real2::ONE.sub(theta))?.beta(theta);
    }
    let doubled = theta.mul_int(2);
    let x = if th < 0.25 { build_f_field(doubled)? } else { build_e_field(doubled)? };
    x.eta_doubling(theta)
}

/// The basis projection P_i(θ), i = 1..6.
pub fn build_p(i: usize, theta: Real2) -> Result<FourierElement> {
    branch_guard(theta.to_f64())?;
    match i {
        1 => Ok(FourierElement::one(theta)),
        2 => p2(theta),
        3 => p3(theta),
        4..=6 => p3(theta)?.gamma((i - 3) as u8),
        _ => param(format!("basis index {i} outside 1..=6")),
    }
}

/// e = ζ𝓔(τ) = G_τ(U^{q′})V^{−q} + F_τ(U^{q′}) + V^qG_τ(U^{q′}).
pub fn build_ac_projection(pair: &ConvergentPair) -> Result<FourierElement> {
    if !pair.is_standing() {
        return param(format!(
            "pair {:?} is not standing (tau = {:.6})",
            pair.tuple(),
            pair.tau_f64()
        ));
    }
    build_e_field(pair.tau)?.zeta(pair.theta, pair.p, pair.q, pair.qp)
}

/// Closed form φ_jk(e) = δ^{q′}δ^j + δ^qδ^kδ^j + ½(−1)^{pjk}δ^{q′−1}δ^{q−1}, doubled.
pub fn ac_phi_closed(pair: &ConvergentPair) -> [i64; 4] {
    let ev = |x: i64| (x.rem_euclid(2) == 0) as i64;
    let (p, q, qp) = (pair.p, pair.q, pair.qp);
    let mut out = [0; 4];
    for (idx, o) in out.iter_mut().enumerate() {
        let (j, k) = ((idx / 2) as i64, (idx % 2) as i64);
        let sign = if (p * j * k).rem_euclid(2) == 0 { 1 } else { -1 };
        *o = 2 * ev(qp) * ev(j) + 2 * ev(q) * ev(k) * ev(j) + sign * ev(qp - 1) * ev(q - 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{standing_pairs, ThetaValue};
    use crate::chern::{basis_character, snap_phis};

    fn check_character(x: &FourierElement, tau: f64, phi2: [i64; 4]) {
        assert!((x.canonical_trace().re - tau).abs() < 1e-9, "{} vs {tau}", x.canonical_trace());
        let phis = x.phi_traces().map(|c| c.re);
        assert_eq!(snap_phis(phis).unwrap(), phi2, "{phis:?}");
    }

    #[test]
    fn e_field_character_and_symmetry() {
        for &t in &[0.5, 0.55, 0.7] {
            let e = build_e_field(Real2::new(t)).unwrap();
            check_character(&e, t, [1; 4]);
            assert!(e.adjoint().max_abs_diff(&e) < 1e-12);
            assert!(e.flip().max_abs_diff(&e) < 1e-12);
            assert_eq!(e.v_range(), Some((-1, 1)));
            let sq = e.twisted_mul(&e).unwrap();
            assert!(sq.max_abs_diff(&e) < 1e-9);
        }
    }

    #[test]
    fn f_field() {
        for &s in &[0.5, 0.3] {
            let f = build_f_field(Real2::new(s)).unwrap();
            check_character(&f, s, [1; 4]);
            assert!(f.flip().max_abs_diff(&f) < 1e-12);
            assert!(f.twisted_mul(&f).unwrap().max_abs_diff(&f) < 1e-9);
        }
        assert!(build_f_field(Real2::new(0.6)).is_err());
    }

    #[test]
    fn basis_characters() {
        for &th in &[0.2, 0.3, 0.618, 0.9] {
            let theta = Real2::new(th);
            for i in 1..=6 {
                let p = build_p(i, theta).unwrap();
                let c = basis_character(i, th);
                check_character(&p, c.tau.eval(th), c.phi2);
                assert!(p.flip().max_abs_diff(&p) < 1e-12, "P{i} at {th}");
            }
        }
        assert!(build_p(2, Real2::new(0.25)).is_err());
        assert!(build_p(3, Real2::new(0.5)).is_err());
    }

    #[test]
    fn ac_projection_traces() {
        let g = ThetaValue::golden();
        for pair in standing_pairs(&g, 9).unwrap() {
            let e = build_ac_projection(&pair).unwrap();
            check_character(&e, pair.tau_f64(), ac_phi_closed(&pair));
            assert!(e.flip().max_abs_diff(&e) < 1e-12);
            let (q, qp) = (pair.q, pair.qp);
            assert!(e.terms().all(|(m, n, _)| m % qp == 0 && [-q, 0, q].contains(&n)));
        }
        let th = g.value();
        let bad = ConvergentPair::new(th, 8, 13, 5, 8).unwrap();
        assert!(build_ac_projection(&bad).is_err());
    }
}
