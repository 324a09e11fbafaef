//! Connes-Chern characters T(x) = (τ(x); φ₀₀, φ₀₁, φ₁₀, φ₁₁) with exact
//! half-integer φ parts and canonical traces as integer forms a + bθ.

use crate::error::{Error, Result};
use crate::real::Real2;
use serde::{Deserialize, Serialize};

/// Residual allowed when snapping a numerical value to ½ℤ.
pub const SNAP_TOL: f64 = 1e-6;

/// Rounds 2·v to an integer; fails if v is not within SNAP_TOL of ½ℤ.
pub fn snap_half(v: f64) -> Result<i64> {
    let d = (2.0 * v).round();
    if (v - d / 2.0).abs() < SNAP_TOL {
        Ok(d as i64)
    } else {
        Err(Error::Numeric(format!("{v} is not within {SNAP_TOL:e} of a half-integer")))
    }
}

/// a + b·θ with integer a, b.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearForm {
    pub a: i64,
    pub b: i64,
}

impl LinearForm {
    pub fn eval(&self, theta: f64) -> f64 {
        self.a as f64 + self.b as f64 * theta
    }

    pub fn eval2(&self, theta: Real2) -> Real2 {
        Real2::from_int(self.a).add(theta.mul_int(self.b))
    }
}

/// φ values are kept doubled so they stay integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernCharacter {
    pub tau: LinearForm,
    pub phi2: [i64; 4],
}

impl ChernCharacter {
    pub fn phi(&self) -> [f64; 4] {
        self.phi2.map(|d| d as f64 / 2.0)
    }

    /// Row (a, b, 2φ₀₀, …, 2φ₁₁) after doubling τ as well.
    fn doubled_row(&self) -> [i64; 6] {
        let p = self.phi2;
        [2 * self.tau.a, 2 * self.tau.b, p[0], p[1], p[2], p[3]]
    }
}

/// T(P_i(θ)) for the six basis fields, i = 1..6.
pub fn basis_character(i: usize, theta: f64) -> ChernCharacter {
    let lf = |a, b| LinearForm { a, b };
    match i {
        1 => ChernCharacter { tau: lf(1, 0), phi2: [2, 0, 0, 0] },
        2 if theta < 0.5 => ChernCharacter { tau: lf(0, 2), phi2: [0; 4] },
        2 => ChernCharacter { tau: lf(2, -2), phi2: [0; 4] },
        3 => ChernCharacter { tau: lf(0, 1), phi2: [1, 1, 1, 1] },
        4 => ChernCharacter { tau: lf(0, 1), phi2: [1, 1, -1, -1] },
        5 => ChernCharacter { tau: lf(0, 1), phi2: [1, -1, 1, -1] },
        6 => ChernCharacter { tau: lf(0, 1), phi2: [1, -1, -1, 1] },
        _ => panic!("basis index {i} outside 1..=6"),
    }
}

/// Generators of the range of T on K₀ of the Flip orbifold, as known independently.
pub fn reference_generators(theta: f64) -> [ChernCharacter; 6] {
    let lf = |a, b| LinearForm { a, b };
    let last = if theta < 0.5 { [1, -1, 1, -1] } else { [1, 1, -1, -1] };
    [
        ChernCharacter { tau: lf(2, 0), phi2: [0; 4] },
        ChernCharacter { tau: lf(1, 0), phi2: [2, 0, 0, 0] },
        ChernCharacter { tau: lf(1, 0), phi2: [0, 2, 0, 0] },
        ChernCharacter { tau: lf(1, 0), phi2: [0, 0, 2, 0] },
        ChernCharacter { tau: lf(1, 0), phi2: [0, 0, 0, 2] },
        ChernCharacter { tau: lf(0, 1), phi2: last },
    ]
}

/// Row-style Hermite normal form of an integer matrix (rows span the lattice).
pub fn hermite_normal_form(rows: &[[i64; 6]]) -> Vec<[i64; 6]> {
    let mut m: Vec<[i64; 6]> = rows.to_vec();
    let mut out = Vec::new();
    for col in 0..6 {
        loop {
            // Euclid on the column among remaining rows
            let nz: Vec<usize> = (0..m.len()).filter(|&r| m[r][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&r| m[r][col].abs()).unwrap();
            for &r in &nz {
                if r != piv {
                    let f = m[r][col] / m[piv][col];
                    for c in 0..6 {
                        m[r][c] -= f * m[piv][c];
                    }
                }
            }
        }
        if let Some(r) = (0..m.len()).find(|&r| m[r][col] != 0) {
            let mut row = m.remove(r);
            if row[col] < 0 {
                row.iter_mut().for_each(|x| *x = -*x);
            }
            out.push((row, col));
        }
    }
    // reduce entries above each pivot into [0, pivot)
    let mut res: Vec<[i64; 6]> = out.iter().map(|(r, _)| *r).collect();
    for i in 0..res.len() {
        let col = out[i].1;
        for k in 0..i {
            let f = res[k][col].div_euclid(res[i][col]);
            for c in 0..6 {
                res[k][c] -= f * res[i][c];
            }
        }
    }
    res
}

/// True when the two character families generate the same lattice.
pub fn same_integral_span(a: &[ChernCharacter], b: &[ChernCharacter]) -> bool {
    let ra: Vec<[i64; 6]> = a.iter().map(|c| c.doubled_row()).collect();
    let rb: Vec<[i64; 6]> = b.iter().map(|c| c.doubled_row()).collect();
    hermite_normal_form(&ra) == hermite_normal_form(&rb)
}

/// Snaps four numerical φ values and pairs them with a canonical trace form.
pub fn snap_phis(phi: [f64; 4]) -> Result<[i64; 4]> {
    let mut out = [0; 4];
    for (o, v) in out.iter_mut().zip(phi) {
        *o = snap_half(v)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapping() {
        assert_eq!(snap_half(0.4999999).unwrap(), 1);
        assert_eq!(snap_half(-1.0000002).unwrap(), -2);
        assert!(snap_half(0.25).is_err());
    }

    #[test]
    fn basis_spans_reference_lattice() {
        for &th in &[0.3, 0.7] {
            let ours: Vec<_> = (1..=6).map(|i| basis_character(i, th)).collect();
            assert!(same_integral_span(&ours, &reference_generators(th)));
        }
        // dropping the identity breaks the span
        let ours: Vec<_> = (2..=6).map(|i| basis_character(i, 0.3)).collect();
        assert!(!same_integral_span(&ours, &reference_generators(0.3)));
    }

    #[test]
    fn hnf_is_canonical() {
        let a = [[2, 0, 0, 0, 0, 0], [0, 3, 0, 0, 0, 0]];
        let b = [[2, 3, 0, 0, 0, 0], [4, 9, 0, 0, 0, 0]];
        assert_eq!(hermite_normal_form(&a), hermite_normal_form(&b));
    }
}
