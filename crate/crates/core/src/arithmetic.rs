//! Continued fractions, consecutive convergent pairs and the standing filter
//! 1/2 < q′(qθ − p) < 4/5.

use crate::error::{param, Error, Result};
use crate::real::Real2;
use serde::{Deserialize, Serialize};

/// Named constants carry this many cf digits.
pub const NAMED_DEPTH: usize = 64;
/// τ this close to 1/2 or 4/5 is treated as undecidable.
pub const BOUNDARY_GUARD: f64 = 1e-9;
/// Decimal input must pin down at least this many cf digits.
pub const MIN_DECIMAL_DIGITS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ThetaValue {
    Rational { p: i64, q: i64 },
    /// θ = [0; a₁, a₂, …] with `value` accurate to double-double.
    Irrational { value: Real2, cf_digits: Vec<u64> },
}

fn real_from_i128(x: i128) -> Real2 {
    let hi = x as f64;
    let lo = (x - hi as i128) as f64;
    Real2 { hi, lo }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// cf digits [a₀; a₁, …] of num/den > 0 (Euclid).
fn rational_cf(mut num: i128, mut den: i128) -> Vec<u64> {
    let mut out = Vec::new();
    while den != 0 {
        out.push((num / den) as u64);
        let r = num % den;
        num = den;
        den = r;
    }
    out
}

/// Convergents p_k/q_k of [0; digits…]; None on i64 overflow.
fn convergents_of(digits: &[u64]) -> Vec<Option<(i64, i64)>> {
    let (mut p0, mut q0, mut p1, mut q1): (i64, i64, i64, i64) = (1, 0, 0, 1);
    let mut out = Vec::with_capacity(digits.len());
    let mut broken = false;
    for &a in digits {
        let next = i64::try_from(a).ok().and_then(|a| {
            let p = a.checked_mul(p1)?.checked_add(p0)?;
            let q = a.checked_mul(q1)?.checked_add(q0)?;
            Some((p, q))
        });
        match next {
            Some((p, q)) if !broken => {
                out.push(Some((p, q)));
                (p0, q0, p1, q1) = (p1, q1, p, q);
            }
            _ => {
                broken = true;
                out.push(None);
            }
        }
    }
    out
}

impl ThetaValue {
    pub fn golden() -> Self {
        let value = Real2::from_int(5).sqrt().sub(Real2::ONE).half();
        ThetaValue::Irrational { value, cf_digits: vec![1; NAMED_DEPTH] }
    }

    pub fn silver() -> Self {
        let value = Real2::from_int(2).sqrt().sub(Real2::ONE);
        ThetaValue::Irrational { value, cf_digits: vec![2; NAMED_DEPTH] }
    }

    /// 1 − golden = (3 − √5)/2 = [0; 2, 1, 1, …].
    pub fn golden_complement() -> Self {
        let value = Real2::from_int(3).sub(Real2::from_int(5).sqrt()).half();
        let mut cf_digits = vec![1; NAMED_DEPTH];
        cf_digits[0] = 2;
        ThetaValue::Irrational { value, cf_digits }
    }

    /// θ = [0; digits…], valued at its deepest representable convergent.
    pub fn from_cf(digits: Vec<u64>) -> Result<Self> {
        if digits.is_empty() || digits.contains(&0) {
            return param("cf digits must be a nonempty list of positive integers");
        }
        if digits.len() == 1 && digits[0] == 1 {
            return param("[0; 1] = 1 is not in (0, 1)");
        }
        let (p, q) = convergents_of(&digits)
            .into_iter()
            .flatten()
            .last()
            .expect("first convergent always fits");
        Ok(ThetaValue::Irrational { value: Real2::ratio(p, q), cf_digits: digits })
    }

    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q <= 0 || p <= 0 || p >= q {
            return param(format!("{p}/{q} is not in (0, 1)"));
        }
        let g = gcd(p as i128, q as i128) as i64;
        Ok(ThetaValue::Rational { p: p / g, q: q / g })
    }

    /// Accepts `golden`, `silver`, `golden-complement`, `cf:a1,a2,…`, `p/q`
    /// or a decimal such as `0.6180339887`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "golden" => return Ok(Self::golden()),
            "silver" => return Ok(Self::silver()),
            "golden-complement" => return Ok(Self::golden_complement()),
            _ => {}
        }
        if let Some(rest) = t.strip_prefix("cf:") {
            let mut digits = Vec::new();
            let mut pos = 3;
            for part in rest.split(',') {
                let d = part.trim().parse::<u64>().map_err(|e| Error::Parse {
                    pos,
                    msg: format!("bad cf digit {part:?}: {e}"),
                })?;
                digits.push(d);
                pos += part.len() + 1;
            }
            return Self::from_cf(digits);
        }
        if let Some((a, b)) = t.split_once('/') {
            let p = a.trim().parse::<i64>().map_err(|e| Error::Parse { pos: 0, msg: e.to_string() })?;
            let q = b.trim().parse::<i64>().map_err(|e| Error::Parse {
                pos: a.len() + 1,
                msg: e.to_string(),
            })?;
            return Self::rational(p, q);
        }
        Self::parse_decimal(t)
    }

    fn parse_decimal(t: &str) -> Result<Self> {
        let frac = t.strip_prefix("0.").or_else(|| t.strip_prefix('.')).ok_or_else(|| Error::Parse {
            pos: 0,
            msg: format!("expected a name, cf:…, p/q or a decimal in (0, 1), got {t:?}"),
        })?;
        let offset = t.len() - frac.len();
        if let Some(i) = frac.find(|c: char| !c.is_ascii_digit()) {
            return Err(Error::Parse { pos: offset + i, msg: "expected a decimal digit".into() });
        }
        if frac.is_empty() || frac.len() > 30 {
            return Err(Error::Parse { pos: offset, msg: "need between 1 and 30 decimal digits".into() });
        }
        let num: i128 = frac.parse().expect("digits checked");
        let den: i128 = 10i128.pow(frac.len() as u32);
        if num == 0 {
            return param("theta must be positive");
        }
        // every θ rounding to this decimal lies in [lo, hi]; keep the cf prefix they share
        let lo = rational_cf(2 * num - 1, 2 * den);
        let hi = rational_cf(2 * num + 1, 2 * den);
        let shared: Vec<u64> = lo
            .iter()
            .zip(hi.iter())
            .skip(1)
            .take_while(|(a, b)| a == b)
            .map(|(a, _)| *a)
            .collect();
        // the last shared digit may still be one short of a longer expansion
        let usable = shared.len().saturating_sub(1);
        if usable < MIN_DECIMAL_DIGITS {
            return param(format!(
                "{t} determines only {usable} continued-fraction digits (need {MIN_DECIMAL_DIGITS}); \
                 it is rational or too close to a small-denominator rational"
            ));
        }
        let g = gcd(num, den);
        let value = real_from_i128(num / g).div(real_from_i128(den / g));
        Ok(ThetaValue::Irrational { value, cf_digits: shared[..usable].to_vec() })
    }

    pub fn value(&self) -> Real2 {
        match self {
            ThetaValue::Rational { p, q } => Real2::ratio(*p, *q),
            ThetaValue::Irrational { value, .. } => *value,
        }
    }

    pub fn cf_digits(&self) -> Result<&[u64]> {
        match self {
            ThetaValue::Rational { p, q } => param(format!("theta = {p}/{q} is rational")),
            ThetaValue::Irrational { cf_digits, .. } => Ok(cf_digits),
        }
    }
}

/// Convergents p_k/q_k strictly inside (0, 1), using the first `depth` cf digits.
pub fn convergents(theta: &ThetaValue, depth: usize) -> Result<Vec<(i64, i64)>> {
    let digits = theta.cf_digits()?;
    if depth > digits.len() {
        return param(format!("depth {depth} exceeds the {} stored cf digits", digits.len()));
    }
    let mut out = Vec::new();
    for c in convergents_of(&digits[..depth]) {
        let (p, q) = c.ok_or_else(|| {
            Error::Parameter(format!("convergent denominators overflow i64 before depth {depth}"))
        })?;
        if p > 0 && p < q {
            out.push((p, q));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParityCase {
    /// q′ even
    QPrimeEven,
    /// q even (so q′ odd)
    QEven,
    /// q, q′ both odd
    BothOdd,
}

impl ParityCase {
    pub fn label(self) -> &'static str {
        match self {
            ParityCase::QPrimeEven => "q' even",
            ParityCase::QEven => "q even",
            ParityCase::BothOdd => "q, q' odd",
        }
    }
}

/// p/q < θ < p′/q′ with p′q − pq′ = 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergentPair {
    pub p: i64,
    pub q: i64,
    pub pp: i64,
    pub qp: i64,
    pub theta: Real2,
    /// qθ − p
    pub alpha: Real2,
    /// p′ − q′θ
    pub alpha_prime: Real2,
    /// q′(qθ − p)
    pub tau: Real2,
}

impl ConvergentPair {
    pub fn new(theta: Real2, p: i64, q: i64, pp: i64, qp: i64) -> Result<Self> {
        if q <= 0 || qp <= 0 {
            return param("denominators must be positive");
        }
        let det = (pp as i128) * (q as i128) - (p as i128) * (qp as i128);
        if det != 1 {
            return param(format!("p'q - pq' = {det} for ({p},{q},{pp},{qp}); need 1"));
        }
        let alpha = theta.mul_int(q).sub(Real2::from_int(p));
        let alpha_prime = Real2::from_int(pp).sub(theta.mul_int(qp));
        if alpha.to_f64() <= 0.0 || alpha_prime.to_f64() <= 0.0 {
            return param(format!("need {p}/{q} < theta < {pp}/{qp}"));
        }
        Ok(ConvergentPair { p, q, pp, qp, theta, alpha, alpha_prime, tau: alpha.mul_int(qp) })
    }

    pub fn tau_f64(&self) -> f64 {
        self.tau.to_f64()
    }

    pub fn parity_case(&self) -> ParityCase {
        if self.qp % 2 == 0 {
            ParityCase::QPrimeEven
        } else if self.q % 2 == 0 {
            ParityCase::QEven
        } else {
            ParityCase::BothOdd
        }
    }

    pub fn is_standing(&self) -> bool {
        let t = self.tau_f64();
        t > 0.5 && t < 0.8
    }

    pub fn tuple(&self) -> (i64, i64, i64, i64) {
        (self.p, self.q, self.pp, self.qp)
    }

    /// The pair (q′−p′, q′, q−p, q) for 1 − θ; its τ is 1 − τ.
    pub fn complement(&self) -> ConvergentPair {
        let theta = Real2::ONE.sub(self.theta);
        ConvergentPair::new(theta, self.qp - self.pp, self.qp, self.q - self.p, self.q)
            .expect("complement of a valid pair is valid")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanEntry {
    pub pair: ConvergentPair,
    pub standing: bool,
    pub warning: Option<String>,
}

/// All consecutive convergent pairs, oriented so that p/q < θ.
pub fn scan(theta: &ThetaValue, depth: usize) -> Result<Vec<ScanEntry>> {
    let th = theta.value();
    let cs = convergents(theta, depth)?;
    let mut out = Vec::new();
    for w in cs.windows(2) {
        let (a, b) = (w[0], w[1]);
        let below = |(p, q): (i64, i64)| th.mul_int(q).sub(Real2::from_int(p)).to_f64() > 0.0;
        let (lo, hi) = if below(a) { (a, b) } else { (b, a) };
        let Ok(pair) = ConvergentPair::new(th, lo.0, lo.1, hi.0, hi.1) else {
            continue;
        };
        let t = pair.tau_f64();
        let near = [0.5, 0.8].iter().any(|&b| (t - b).abs() < BOUNDARY_GUARD);
        let warning = near.then(|| {
            format!("tau = {t} is within {BOUNDARY_GUARD:e} of a standing boundary; pair rejected")
        });
        out.push(ScanEntry { pair, standing: pair.is_standing() && !near, warning });
    }
    Ok(out)
}

pub fn standing_pairs(theta: &ThetaValue, depth: usize) -> Result<Vec<ConvergentPair>> {
    Ok(scan(theta, depth)?.into_iter().filter(|e| e.standing).map(|e| e.pair).collect())
}

/// Maps a pair with 1/5 < τ < 1/2 to the pair for 1 − θ, whose τ is 1 − τ.
pub fn complementary_reduce(pair: &ConvergentPair) -> Result<(ConvergentPair, Real2)> {
    let t = pair.tau_f64();
    if !(t > 0.2 && t < 0.5) {
        return param(format!("complementary reduction needs 1/5 < tau < 1/2, got {t}"));
    }
    let c = pair.complement();
    Ok((c, c.theta))
}

/// Resolves a user-given (p, q, p′, q′) against θ and requires the standing condition.
pub fn standing_pair(theta: Real2, p: i64, q: i64, pp: i64, qp: i64) -> Result<ConvergentPair> {
    let pair = ConvergentPair::new(theta, p, q, pp, qp)?;
    if !pair.is_standing() {
        return param(format!(
            "({p},{q},{pp},{qp}) has q'(q theta - p) = {:.6}, outside (1/2, 4/5)",
            pair.tau_f64()
        ));
    }
    Ok(pair)
}
