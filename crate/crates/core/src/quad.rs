//! Adaptive Simpson quadrature for complex integrands.

use crate::error::{Error, Result};
use num_complex::Complex64;

const MAX_DEPTH: u32 = 40;

struct Panel {
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
}

fn simpson(a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
    (fa + fm * 4.0 + fb) * ((b - a) / 6.0)
}

fn refine<F: Fn(f64) -> Complex64>(f: &F, p: Panel, tol: f64, depth: u32) -> Result<Complex64> {
    let m = 0.5 * (p.a + p.b);
    let (lm, rm) = (0.5 * (p.a + m), 0.5 * (m + p.b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(p.a, m, p.fa, flm, p.fm);
    let right = simpson(m, p.b, p.fm, frm, p.fb);
    let delta = left + right - p.whole;
    if delta.norm() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Resolution(format!(
            "adaptive Simpson did not reach {tol:e} on [{}, {}]",
            p.a, p.b
        )));
    }
    let l = refine(f, Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left }, tol / 2.0, depth + 1)?;
    let r = refine(f, Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right }, tol / 2.0, depth + 1)?;
    Ok(l + r)
}

/// ∫_a^b f with absolute tolerance `tol`, starting from `panels` equal pieces.
/// Use enough panels to resolve any oscillation before refinement starts.
pub fn integrate<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64, panels: usize) -> Result<Complex64> {
    if b <= a {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n = panels.max(1);
    let h = (b - a) / n as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut fa = f(a);
    for i in 0..n {
        let x0 = a + h * i as f64;
        let x1 = if i + 1 == n { b } else { x0 + h };
        let fm = f(0.5 * (x0 + x1));
        let fb = f(x1);
        let whole = simpson(x0, x1, fa, fm, fb);
        total += refine(f, Panel { a: x0, b: x1, fa, fm, fb, whole }, tol / n as f64, 0)?;
        fa = fb;
    }
    Ok(total)
}

pub fn integrate_real<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, panels: usize) -> Result<f64> {
    integrate(&|x| Complex64::new(f(x), 0.0), a, b, tol, panels).map(|c| c.re)
}
