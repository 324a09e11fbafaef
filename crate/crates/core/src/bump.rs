//! Bump functions f_t, g_t and the Fourier coefficients of their periodizations.
//!
//! f_t is built from the smoothstep h on [−½, −t/2]; g_t = √(f_t(1 − f_t)) on
//! [t − ½, ½]. F_t, G_t are the 1-periodizations, with F(x) = Σ f̂(n) e(nx).

use crate::error::{param, Error, Result};
use crate::real::cis_turns;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::io::Write;

pub const DEFAULT_GRID: usize = 1 << 16;
/// Coefficients beyond the truncation bound are below this.
pub const DECAY_FLOOR: f64 = 1e-14;

fn sigma(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// The C∞ step s(u) = σ(u)/(σ(u)+σ(1−u)), 0 for u ≤ 0 and 1 for u ≥ 1.
pub fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = sigma(u);
        a / (a + sigma(1.0 - u))
    }
}

/// h on [−½, −t/2] with h(−½) = 0, h(−t/2) = ½ and flat ends.
#[derive(Clone, Copy, Debug)]
pub struct Interpolant {
    pub t: f64,
}

impl Interpolant {
    pub fn eval(&self, x: f64) -> f64 {
        let u = (x + 0.5) / ((1.0 - self.t) / 2.0);
        0.5 * smoothstep(u)
    }
}

pub fn build_h(t: f64) -> Result<Interpolant> {
    if !(0.5..1.0).contains(&t) {
        return param(format!("bump parameter t = {t} outside [1/2, 1)"));
    }
    Ok(Interpolant { t })
}

#[derive(Clone, Debug)]
pub struct BumpProfile {
    pub t: f64,
    pub grid_n: usize,
    /// Truncation bound: |f̂(n)|, |ĝ(n)| < DECAY_FLOOR for |n| > bound.
    pub bound: i64,
    h: Interpolant,
    fhat: Vec<Complex64>,
    ghat: Vec<Complex64>,
}

pub fn build_bump(t: f64) -> Result<BumpProfile> {
    build_bump_with_grid(t, DEFAULT_GRID)
}

pub fn build_bump_with_grid(t: f64, grid_n: usize) -> Result<BumpProfile> {
    let h = build_h(t)?;
    if !grid_n.is_power_of_two() || grid_n < 64 {
        return param(format!("grid size {grid_n} must be a power of two ≥ 64"));
    }
    let mut p = BumpProfile { t, grid_n, bound: 0, h, fhat: Vec::new(), ghat: Vec::new() };
    p.periodize_coeffs()?;
    Ok(p)
}

impl BumpProfile {
    /// (f, 1 − f), each computed without cancellation.
    pub fn f_pair(&self, x: f64) -> (f64, f64) {
        let t = self.t;
        let h = |y: f64| self.h.eval(y);
        if !(-0.5..=0.5).contains(&x) {
            (0.0, 1.0)
        } else if x <= -t / 2.0 {
            let v = h(x);
            (v, 1.0 - v)
        } else if x <= 0.5 - t {
            let v = h(-x - t);
            (1.0 - v, v)
        } else if x <= t - 0.5 {
            (1.0, 0.0)
        } else if x <= t / 2.0 {
            let v = h(x - t);
            (1.0 - v, v)
        } else {
            let v = h(-x);
            (v, 1.0 - v)
        }
    }

    pub fn f(&self, x: f64) -> f64 {
        self.f_pair(x).0
    }

    pub fn g(&self, x: f64) -> f64 {
        if x < self.t - 0.5 || x > 0.5 {
            return 0.0;
        }
        let (a, b) = self.f_pair(x);
        (a * b).max(0.0).sqrt()
    }

    /// Periodization F(x) = Σ f(x + n).
    pub fn big_f(&self, x: f64) -> f64 {
        self.f(wrap(x))
    }

    pub fn big_g(&self, x: f64) -> f64 {
        self.g(wrap(x))
    }

    pub fn fhat(&self, n: i64) -> Complex64 {
        coeff_at(&self.fhat, self.bound, n)
    }

    pub fn ghat(&self, n: i64) -> Complex64 {
        coeff_at(&self.ghat, self.bound, n)
    }

    /// Σ_{|n| ≤ bound} f̂(n) e(nx).
    pub fn f_series(&self, x: f64) -> f64 {
        (-self.bound..=self.bound).map(|n| self.fhat(n) * cis_turns(n as f64 * x)).sum::<Complex64>().re
    }

    pub fn g_series(&self, x: f64) -> f64 {
        (-self.bound..=self.bound).map(|n| self.ghat(n) * cis_turns(n as f64 * x)).sum::<Complex64>().re
    }

    /// Coefficients from the DFT of the sampled support, truncated where they decay.
    fn periodize_coeffs(&mut self) -> Result<()> {
        let n = self.grid_n;
        let xs: Vec<f64> = (0..n).map(|j| -0.5 + j as f64 / n as f64).collect();
        let mut fs: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(self.f(x), 0.0)).collect();
        let mut gs: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(self.g(x), 0.0)).collect();
        let fft = FftPlanner::new().plan_fft_forward(n);
        fft.process(&mut fs);
        fft.process(&mut gs);
        let scale = 1.0 / n as f64;
        let half = (n / 2) as i64;
        // x_j = −½ + j/N gives an extra factor e(n/2) = (−1)^n
        let at = |v: &[Complex64], k: i64| -> Complex64 {
            let s = if k.rem_euclid(2) == 0 { scale } else { -scale };
            v[k.rem_euclid(n as i64) as usize] * s
        };
        let mut bound = half - 1;
        while bound > 0 {
            let worst = [bound, -bound]
                .iter()
                .map(|&k| at(&fs, k).norm().max(at(&gs, k).norm()))
                .fold(0.0, f64::max);
            if worst >= DECAY_FLOOR {
                break;
            }
            bound -= 1;
        }
        if bound > half / 4 {
            return Err(Error::Resolution(format!(
                "bump coefficients for t = {} do not decay below {DECAY_FLOOR:e} by |n| = {}; raise grid_n above {}",
                self.t,
                half / 4,
                n
            )));
        }
        self.bound = bound;
        self.fhat = (-bound..=bound).map(|k| at(&fs, k)).collect();
        self.ghat = (-bound..=bound).map(|k| at(&gs, k)).collect();
        Ok(())
    }

    /// Sup residuals of the three projection identities for 𝓔(t) on `samples`
    /// points of [−½, ½]:
    /// F − F² − G² − G(·+t)², G·(1 − F − F(·−t)), G·G(·+t).
    pub fn projection_residuals(&self, samples: usize) -> [f64; 3] {
        let t = self.t;
        let mut r = [0.0f64; 3];
        for j in 0..samples {
            let x = -0.5 + j as f64 / samples as f64;
            let (f, g, gp) = (self.big_f(x), self.big_g(x), self.big_g(x + t));
            r[0] = r[0].max((f - f * f - g * g - gp * gp).abs());
            r[1] = r[1].max((g * (1.0 - f - self.big_f(x - t))).abs());
            r[2] = r[2].max((g * gp).abs());
        }
        r
    }

    /// The same identities with the shifts mirrored (F − F² − G² − G(·−t)², …).
    pub fn mirrored_projection_residuals(&self, samples: usize) -> [f64; 3] {
        let t = self.t;
        let mut r = [0.0f64; 3];
        for j in 0..samples {
            let x = -0.5 + j as f64 / samples as f64;
            let (f, g) = (self.big_f(x), self.big_g(x));
            let (gm, gp) = (self.big_g(x - t), self.big_g(x + t));
            r[0] = r[0].max((f - f * f - g * g - gm * gm).abs());
            r[1] = r[1].max((g * (1.0 - f - self.big_f(x + t))).abs());
            r[2] = r[2].max((g * gp).abs());
        }
        r
    }

    /// Largest violation of the shape invariants on `samples` grid points:
    /// evenness, f + f(t − ·) = 1 on [0, ½], f(·+t) = 1 − f on [−½, ½−t],
    /// flat top, g(t − ·) = g.
    pub fn invariant_residual(&self, samples: usize) -> f64 {
        let t = self.t;
        let mut worst = (self.f(t / 2.0) - 0.5).abs();
        for j in 0..=samples {
            let x = -0.5 + j as f64 / samples as f64;
            worst = worst.max((self.f(x) - self.f(-x)).abs());
            worst = worst.max((self.big_g(t - x) - self.big_g(x)).abs());
            if x >= 0.0 {
                worst = worst.max((self.f(x) + self.f(t - x) - 1.0).abs());
            }
            if x <= 0.5 - t {
                worst = worst.max((self.f(x + t) - (1.0 - self.f(x))).abs());
            }
            if (0.5 - t..=t - 0.5).contains(&x) {
                worst = worst.max((self.f(x) - 1.0).abs());
            }
        }
        worst
    }

    /// CSV rows (x, f_t(x), g_t(x)).
    pub fn write_csv<W: Write>(&self, out: W, samples: usize) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Numeric(format!("csv write failed: {e}"));
        w.write_record(["x", "f", "g"]).map_err(io)?;
        for j in 0..=samples {
            let x = -0.5 + j as f64 / samples as f64;
            w.serialize((x, self.f(x), self.g(x))).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Numeric(e.to_string()))
    }
}

fn coeff_at(v: &[Complex64], bound: i64, n: i64) -> Complex64 {
    if n.abs() > bound {
        Complex64::new(0.0, 0.0)
    } else {
        v[(n + bound) as usize]
    }
}

/// x reduced into [−½, ½).
pub fn wrap(x: f64) -> f64 {
    x - (x + 0.5).floor()
}

/// Both sides of the Poisson identities at one point.
#[derive(Clone, Copy, Debug)]
pub struct PoissonSides {
    /// Σ Ĥ(n) e(nx) vs Σ H(x+n)
    pub full: (Complex64, Complex64),
    /// Σ Ĥ(2n) e(nx) vs ½ Σ [H(x/2+n) + H(x/2+½+n)]
    pub even: (Complex64, Complex64),
    /// Σ Ĥ(2n+1) e(nx) vs ½ e(−x/2) Σ [H(x/2+n) − H(x/2+½+n)]
    pub odd: (Complex64, Complex64),
}

impl PoissonSides {
    pub fn max_gap(&self) -> f64 {
        [self.full, self.even, self.odd].iter().map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Evaluates both sides of the Poisson identities; `reach` bounds both the
/// frequency sums and the translate sums.
pub fn poisson_check(
    h: impl Fn(f64) -> f64,
    hhat: impl Fn(i64) -> Complex64,
    x: f64,
    reach: i64,
) -> PoissonSides {
    let c = |v: f64| Complex64::new(v, 0.0);
    let mut full_l = c(0.0);
    let mut full_r = c(0.0);
    let mut even_l = c(0.0);
    let mut odd_l = c(0.0);
    let mut plus = 0.0;
    let mut minus = 0.0;
    for n in -reach..=reach {
        let e = cis_turns(n as f64 * x);
        full_l += hhat(n) * e;
        full_r += c(h(x + n as f64));
        even_l += hhat(2 * n) * e;
        odd_l += hhat(2 * n + 1) * e;
        let a = h(x / 2.0 + n as f64);
        let b = h(x / 2.0 + 0.5 + n as f64);
        plus += a + b;
        minus += a - b;
    }
    PoissonSides {
        full: (full_l, full_r),
        even: (even_l, c(0.5 * plus)),
        odd: (odd_l, cis_turns(-x / 2.0) * 0.5 * minus),
    }
}
