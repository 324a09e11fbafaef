//! K-matrices of the AC projection e: the A·C assembly, the parity-case closed
//! forms, trace vectors, and the action of canonical automorphisms.
//!
//! Matrices hold doubled entries so every half-integer stays exact.

use crate::algebra::{FourierElement, Parity};
use crate::arithmetic::{ConvergentPair, ParityCase};
use crate::chern::{basis_character, snap_phis};
use crate::error::{param, Error, Result};
use crate::fields::build_p;
use crate::real::Real2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

fn ev(x: i64) -> i64 {
    (x.rem_euclid(2) == 0) as i64
}

fn sgn(x: i64) -> i64 {
    if x.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Rows φ₀₀, φ₀₁, φ₁₀, φ₁₁; columns P₁…P₆; entries doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KMatrix(pub [[i64; 6]; 4]);

impl KMatrix {
    pub fn from_halves(rows: [[i64; 6]; 4]) -> Self {
        KMatrix(rows)
    }

    /// From whole-number entries.
    pub fn from_integers(rows: [[i64; 6]; 4]) -> Self {
        KMatrix(rows.map(|r| r.map(|v| 2 * v)))
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.0[row][col] as f64 / 2.0
    }

    pub fn column(&self, col: usize) -> [i64; 4] {
        [self.0[0][col], self.0[1][col], self.0[2][col], self.0[3][col]]
    }
}

impl fmt::Display for KMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, row) in self.0.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .map(|&d| if d % 2 == 0 { format!("{:>4}", d / 2) } else { format!("{:>4}", format!("{d}/2")) })
                .collect();
            writeln!(f, "phi{} [{}]", Parity::from_index(r).label(), cells.join(" "))?;
        }
        Ok(())
    }
}

/// a_jk^∓ doubled, indexed by jk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ACoefficients {
    pub minus: [i64; 4],
    pub plus: [i64; 4],
}

pub fn coefficients_a(pair: &ConvergentPair) -> ACoefficients {
    let (p, q, pp, qp) = (pair.p, pair.q, pair.pp, pair.qp);
    let mut minus = [0; 4];
    let mut plus = [0; 4];
    for idx in 0..4 {
        let (j, k) = ((idx / 2) as i64, (idx % 2) as i64);
        if qp % 2 == 0 {
            minus[idx] = sgn(p * j * k);
            plus[idx] = sgn(j + p * j * k);
        } else {
            minus[idx] = 2 * ev(q) * ev(j) * ev(k) + sgn(p * j * k) * ev(q - 1);
            plus[idx] = sgn(pp * j) * (ev(k - 1) + sgn(p * j) * ev(q - k - 1));
        }
    }
    ACoefficients { minus, plus }
}

/// C₀(P) = φ₀₀ + φ₁₀ and C₁(P) = φ_{0,q′} + (−1)^{p′}φ_{1,q′} over the basis, doubled.
pub fn c_matrix(pair: &ConvergentPair) -> [[i64; 6]; 2] {
    let k = (pair.qp.rem_euclid(2)) as usize;
    let mut c = [[0; 6]; 2];
    for i in 0..6 {
        let phi = basis_character(i + 1, pair.theta.to_f64()).phi2;
        c[0][i] = phi[0] + phi[2];
        c[1][i] = phi[k] + sgn(pair.pp) * phi[2 + k];
    }
    c
}

/// A·C in exact arithmetic.
pub fn kmatrix_from_product(pair: &ConvergentPair) -> Result<KMatrix> {
    let a = coefficients_a(pair);
    let c = c_matrix(pair);
    let mut k = [[0; 6]; 4];
    for r in 0..4 {
        for i in 0..6 {
            let four = a.minus[r] * c[0][i] + a.plus[r] * c[1][i];
            if four % 2 != 0 {
                return Err(Error::Integrity(format!("A·C entry ({r},{i}) = {four}/4 is not a half-integer")));
            }
            k[r][i] = four / 2;
        }
    }
    Ok(KMatrix(k))
}

/// The three parity-case matrices in closed form.
pub fn kmatrix_closed(pair: &ConvergentPair) -> KMatrix {
    let (p, pp) = (pair.p, pair.pp);
    let (d, d1) = (ev(pp), ev(pp - 1));
    let s = sgn(p);
    match pair.parity_case() {
        ParityCase::QPrimeEven => KMatrix([
            [2, 0, 1, 1, 1, 1],
            [2, 0, 1, 1, 1, 1],
            [0, 0, 1, -1, 1, -1],
            [0, 0, s, -s, s, -s],
        ]),
        ParityCase::QEven => KMatrix::from_integers([
            [1, 0, 1, 0, 1, 0],
            [0, 0, d, d1, -d, -d1],
            [0; 6],
            [0; 6],
        ]),
        ParityCase::BothOdd => KMatrix([
            [1, 0, 1 + d, d1, d1, -d1],
            [1, 0, 1 + d, d1, d1, -d1],
            [1, 0, d1, -d1, 1 + d, d1],
            [s, 0, d1, -d1, s * (1 + d), d1],
        ]),
    }
}

/// The unsimplified both-odd matrix, before using that one of p, p′ is even.
pub fn kmatrix_both_odd_unsimplified(pair: &ConvergentPair) -> KMatrix {
    let (d, d1) = (ev(pair.pp), ev(pair.pp - 1));
    let s = sgn(pair.p);
    KMatrix([
        [1, 0, 1 + d, d1, 1 - d, -d1],
        [1, 0, 1 + d, d1, 1 - d, -d1],
        [1, 0, d1, -d1, 1 + d, d1],
        [s, 0, s * d1, -s * d1, s * (1 + d), s * d1],
    ])
}

/// Canonical traces τ(χ(eP_ie)) = (qθ − p)·multiplier_i.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceVector {
    pub multipliers: [i64; 6],
    pub alpha: f64,
    pub evaluated: [f64; 6],
}

pub fn trace_vector(pair: &ConvergentPair) -> TraceVector {
    let (pp, qp) = (pair.pp, pair.qp);
    let p2 = if pair.theta.to_f64() < 0.5 { 2 * pp } else { 2 * (qp - pp) };
    let multipliers = [qp, p2, pp, pp, pp, pp];
    let alpha = pair.alpha.to_f64();
    let evaluated = multipliers.map(|m| pair.alpha.mul_int(m).to_f64());
    TraceVector { multipliers, alpha, evaluated }
}

/// Columns are the φ parts of T(P₁), …, T(P₆).
pub fn kmatrix_of_identity() -> KMatrix {
    let mut k = [[0; 6]; 4];
    for i in 0..6 {
        let phi = basis_character(i + 1, 0.3).phi2;
        for r in 0..4 {
            k[r][i] = phi[r];
        }
    }
    KMatrix(k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    Fourier,
    Cubic,
    Gamma(u8),
}

impl Generator {
    fn apply(self, x: &FourierElement) -> Result<FourierElement> {
        match self {
            Generator::Fourier => Ok(x.fourier()),
            Generator::Cubic => Ok(x.cubic()),
            Generator::Gamma(i) => x.gamma(i),
        }
    }

    /// Word for the inverse map: σ⁻¹ = σ³, κ⁻¹ = κ², γ⁻¹ = γ.
    fn inverse(self) -> Vec<Generator> {
        match self {
            Generator::Fourier => vec![self; 3],
            Generator::Cubic => vec![self; 2],
            Generator::Gamma(_) => vec![self],
        }
    }

    fn symbol(self) -> String {
        match self {
            Generator::Fourier => "sigma".into(),
            Generator::Cubic => "kappa".into(),
            Generator::Gamma(i) => format!("gamma{i}"),
        }
    }
}

/// A composite automorphism; `word = [a, b]` means a∘b.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Automorphism {
    pub word: Vec<Generator>,
}

impl Automorphism {
    pub fn identity() -> Self {
        Automorphism { word: vec![] }
    }

    pub fn of(word: &[Generator]) -> Self {
        Automorphism { word: word.to_vec() }
    }

    pub fn sigma() -> Self {
        Self::of(&[Generator::Fourier])
    }

    pub fn kappa() -> Self {
        Self::of(&[Generator::Cubic])
    }

    pub fn gamma(i: u8) -> Self {
        Self::of(&[Generator::Gamma(i)])
    }

    /// self ∘ other
    pub fn then_after(&self, other: &Automorphism) -> Self {
        Automorphism { word: self.word.iter().chain(&other.word).copied().collect() }
    }

    pub fn name(&self) -> String {
        if self.word.is_empty() {
            return "id".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for g in &self.word {
            let s = g.symbol();
            match parts.last_mut() {
                Some(last) if last.split('^').next() == Some(s.as_str()) => {
                    let n = last.split('^').nth(1).map_or(1, |e| e.parse::<u32>().unwrap()) + 1;
                    *last = format!("{s}^{n}");
                }
                _ => parts.push(s),
            }
        }
        parts.join("·")
    }

    pub fn apply(&self, x: &FourierElement) -> Result<FourierElement> {
        let mut y = x.clone();
        for g in self.word.iter().rev() {
            y = g.apply(&y)?;
        }
        Ok(y)
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism { word: self.word.iter().rev().flat_map(|g| g.inverse()).collect() }
    }
}

/// φ_jk∘α = sign·φ_{perm(jk)} and [α⁻¹(P_i)] = [P_{basis(i)}], both 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismDescriptor {
    pub name: String,
    pub trace_perm: [usize; 4],
    pub trace_sign: [i64; 4],
    pub basis_perm: [usize; 6],
}

fn flip_symmetric_random(theta: Real2, rng: &mut ChaCha8Rng) -> FourierElement {
    let x = FourierElement::random(theta, 12, 4, rng);
    x.add(&x.flip()).expect("same theta")
}

/// Signed permutation of the Φ-traces induced by α, found by matching on random
/// Flip-invariant elements.
pub fn derive_trace_permutation(alpha: &Automorphism, theta: Real2) -> Result<([usize; 4], [i64; 4])> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let samples: Vec<FourierElement> = (0..3).map(|_| flip_symmetric_random(theta, &mut rng)).collect();
    let before: Vec<[Complex64; 4]> = samples.iter().map(|x| x.phi_traces()).collect();
    let after: Vec<[Complex64; 4]> =
        samples.iter().map(|x| alpha.apply(x).map(|y| y.phi_traces())).collect::<Result<_>>()?;
    let mut perm = [0; 4];
    let mut sign = [0; 4];
    for r in 0..4 {
        let mut found = Vec::new();
        for c in 0..4 {
            for s in [1i64, -1] {
                let ok = before.iter().zip(&after).all(|(b, a)| (a[r] - b[c] * s as f64).norm() < 1e-9 * (1.0 + b[c].norm()));
                if ok {
                    found.push((c, s));
                }
            }
        }
        match found.as_slice() {
            [(c, s)] => {
                perm[r] = *c;
                sign[r] = *s;
            }
            _ => {
                return Err(Error::Integrity(format!(
                    "phi{} composed with {} is not a unique signed trace ({} matches)",
                    Parity::from_index(r).label(),
                    alpha.name(),
                    found.len()
                )))
            }
        }
    }
    Ok((perm, sign))
}

/// i ↦ j with [α⁻¹(P_i)] = [P_j], by matching Connes-Chern characters.
pub fn derive_basis_permutation(alpha: &Automorphism, theta: Real2) -> Result<[usize; 6]> {
    let th = theta.to_f64();
    let inv = alpha.inverse();
    let mut out = [0; 6];
    for (i, o) in out.iter_mut().enumerate() {
        let y = inv.apply(&build_p(i + 1, theta)?)?;
        let tau = y.canonical_trace().re;
        let phi2 = snap_phis(y.phi_traces().map(|c| c.re))?;
        let hits: Vec<usize> = (0..6)
            .filter(|&j| {
                let c = basis_character(j + 1, th);
                c.phi2 == phi2 && (c.tau.eval(th) - tau).abs() < 1e-9
            })
            .collect();
        match hits.as_slice() {
            [j] => *o = *j,
            _ => {
                return Err(Error::Integrity(format!(
                    "{}^-1(P{}) has character ({tau}; {phi2:?}/2) matching {} basis elements",
                    alpha.name(),
                    i + 1,
                    hits.len()
                )))
            }
        }
    }
    Ok(out)
}

pub fn describe(alpha: &Automorphism, theta: Real2) -> Result<AutomorphismDescriptor> {
    let (trace_perm, trace_sign) = derive_trace_permutation(alpha, theta)?;
    Ok(AutomorphismDescriptor {
        name: alpha.name(),
        trace_perm,
        trace_sign,
        basis_perm: derive_basis_permutation(alpha, theta)?,
    })
}

/// K(α(e)) from K(e): columns by α⁻¹ on [P_i], then rows by φ_jk∘α.
pub fn act_on_kmatrix(k: &KMatrix, d: &AutomorphismDescriptor) -> KMatrix {
    let mut out = [[0; 6]; 4];
    for r in 0..4 {
        for c in 0..6 {
            out[r][c] = d.trace_sign[r] * k.0[d.trace_perm[r]][d.basis_perm[c]];
        }
    }
    KMatrix(out)
}

/// id, σ, κ, κ², σκ, σκ² in this order.
pub fn s3_elements() -> Vec<Automorphism> {
    use Generator::{Cubic, Fourier};
    vec![
        Automorphism::identity(),
        Automorphism::of(&[Fourier]),
        Automorphism::of(&[Cubic]),
        Automorphism::of(&[Cubic, Cubic]),
        Automorphism::of(&[Fourier, Cubic]),
        Automorphism::of(&[Fourier, Cubic, Cubic]),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitEntry {
    pub name: String,
    pub descriptor: AutomorphismDescriptor,
    pub kmatrix: KMatrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub pair: (i64, i64, i64, i64),
    pub entries: Vec<OrbitEntry>,
    pub pairwise_distinct: bool,
    /// (τ(e); φ part doubled), shared by the whole orbit when `character_shared`.
    pub tau: f64,
    pub phi2: [i64; 4],
    pub character_shared: bool,
    pub identity_fixed: bool,
}

/// The K-matrices of e, σe, κe, κ²e, σκe, σκ²e for a pair with q even, p′ odd.
pub fn s3_orbit_report(pair: &ConvergentPair) -> Result<OrbitReport> {
    if pair.q % 2 != 0 || pair.pp % 2 == 0 {
        return param(format!(
            "the S3 orbit report covers q even and p' odd; ({},{},{},{}) does not qualify",
            pair.p, pair.q, pair.pp, pair.qp
        ));
    }
    let k = kmatrix_closed(pair);
    let id = kmatrix_of_identity();
    let mut entries = Vec::new();
    let mut identity_fixed = true;
    for alpha in s3_elements() {
        let d = describe(&alpha, pair.theta)?;
        identity_fixed &= act_on_kmatrix(&id, &d) == id;
        entries.push(OrbitEntry { name: alpha.name(), kmatrix: act_on_kmatrix(&k, &d), descriptor: d });
    }
    let pairwise_distinct = (0..6).all(|a| (a + 1..6).all(|b| entries[a].kmatrix != entries[b].kmatrix));
    let phi2 = k.column(0);
    let character_shared = entries.iter().all(|e| e.kmatrix.column(0) == phi2);
    Ok(OrbitReport {
        pair: pair.tuple(),
        entries,
        pairwise_distinct,
        tau: pair.tau_f64(),
        phi2,
        character_shared,
        identity_fixed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{standing_pairs, ThetaValue};
    use crate::fields::ac_phi_closed;

    fn pairs() -> Vec<ConvergentPair> {
        let mut v = Vec::new();
        for t in [ThetaValue::golden(), ThetaValue::golden_complement(), ThetaValue::parse("cf:3,1,4,1,5,9,2,6,5,3,5").unwrap()] {
            v.extend(standing_pairs(&t, 11).unwrap());
        }
        v
    }

    #[test]
    fn product_equals_displayed_matrices() {
        let ps = pairs();
        let cases: std::collections::HashSet<_> = ps.iter().map(|p| p.parity_case()).collect();
        assert_eq!(cases.len(), 3);
        for p in &ps {
            assert_eq!(kmatrix_from_product(p).unwrap(), kmatrix_closed(p), "{:?}", p.tuple());
            if p.parity_case() == ParityCase::BothOdd {
                assert_eq!(kmatrix_both_odd_unsimplified(p), kmatrix_closed(p));
            }
        }
    }

    #[test]
    fn identity_column_matches_ac_traces() {
        for p in pairs() {
            let a = coefficients_a(&p);
            let c1 = c_matrix(&p)[1][0];
            assert_eq!(c1, 2 * ((p.qp % 2 == 0) as i64));
            let phi = ac_phi_closed(&p);
            for r in 0..4 {
                assert_eq!(a.minus[r] + a.plus[r] * c1 / 2, phi[r]);
            }
            assert_eq!(kmatrix_closed(&p).column(0), phi);
        }
    }

    #[test]
    fn displayed_c_matrix_for_even_q_prime() {
        let th = ThetaValue::golden().value();
        let p = ConvergentPair::new(th, 3, 5, 5, 8).unwrap();
        assert_eq!(c_matrix(&p), [[2, 0, 2, 0, 2, 0], [2, 0, 0, 2, 0, 2]]);
        let tv = trace_vector(&p);
        assert_eq!(tv.multipliers, [8, 6, 5, 5, 5, 5]);
        assert!((tv.evaluated[0] - p.tau_f64()).abs() < 1e-15);
    }

    #[test]
    fn identity_matrix() {
        let k = kmatrix_of_identity();
        assert_eq!(k.column(0), [2, 0, 0, 0]);
        assert_eq!(k.column(2), [1, 1, 1, 1]);
    }

    #[test]
    fn derived_permutations() {
        let th = ThetaValue::golden().value();
        let s = describe(&Automorphism::sigma(), th).unwrap();
        assert_eq!(s.basis_perm, [0, 1, 2, 4, 3, 5]);
        assert_eq!(s.trace_perm, [0, 2, 1, 3]);
        assert_eq!(s.trace_sign, [1; 4]);
        let k = describe(&Automorphism::kappa(), th).unwrap();
        assert_eq!(&k.basis_perm[..3], &[0, 1, 2]);
        let cyc = &k.basis_perm[3..];
        assert!(cyc.iter().all(|&j| (3..6).contains(&j)) && cyc.iter().enumerate().all(|(i, &j)| j != i + 3));
        for i in 1..=3u8 {
            let g = describe(&Automorphism::gamma(i), th).unwrap();
            assert_eq!(g.trace_perm, [0, 1, 2, 3]);
            let (j, kk) = (i & 1, (i >> 1) & 1);
            for r in 0..4 {
                let (rj, rk) = ((r / 2) as u8, (r % 2) as u8);
                let want = if (rj * j + rk * kk) % 2 == 0 { 1 } else { -1 };
                assert_eq!(g.trace_sign[r], want);
            }
        }
    }

    #[test]
    fn identity_is_fixed_and_group_law_holds() {
        let th = ThetaValue::golden().value();
        let id = kmatrix_of_identity();
        let pair = ConvergentPair::new(ThetaValue::golden_complement().value(), 3, 8, 5, 13).unwrap();
        let k = kmatrix_closed(&pair);
        let els = s3_elements();
        let ds: Vec<_> = els.iter().map(|a| describe(a, th).unwrap()).collect();
        for d in &ds {
            assert_eq!(act_on_kmatrix(&id, d), id, "{}", d.name);
        }
        for g in 1..=3 {
            assert_eq!(act_on_kmatrix(&id, &describe(&Automorphism::gamma(g), th).unwrap()), id);
        }
        for (a, da) in els.iter().zip(&ds) {
            for (b, db) in els.iter().zip(&ds) {
                let ab = describe(&a.then_after(b), th).unwrap();
                assert_eq!(act_on_kmatrix(&act_on_kmatrix(&k, db), da), act_on_kmatrix(&k, &ab));
            }
        }
        // σκσ acts as κ²
        let sks = Automorphism::of(&[Generator::Fourier, Generator::Cubic, Generator::Fourier]);
        assert_eq!(act_on_kmatrix(&k, &describe(&sks, th).unwrap()), act_on_kmatrix(&k, &ds[3]));
    }

    #[test]
    fn orbit_report() {
        let th = ThetaValue::golden_complement().value();
        let pair = ConvergentPair::new(th, 3, 8, 5, 13).unwrap();
        let r = s3_orbit_report(&pair).unwrap();
        assert!(r.pairwise_distinct && r.character_shared && r.identity_fixed);
        assert_eq!(r.phi2, [2, 0, 0, 0]);
        assert_eq!(r.entries[0].kmatrix.0[1], [0, 0, 0, 2, 0, -2]);
        assert_eq!(r.entries[1].kmatrix.0[2], [0, 0, 0, 0, 2, -2]);
        let odd = ConvergentPair::new(ThetaValue::golden().value(), 3, 5, 5, 8).unwrap();
        assert!(s3_orbit_report(&odd).is_err());
    }
}
