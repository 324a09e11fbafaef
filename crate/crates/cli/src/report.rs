//! Report types for each subcommand and their text / CSV renderings.
//! Every report derives Deserialize so JSON output can be read back.

use nctorus::arithmetic::{ConvergentPair, ScanEntry};
use nctorus::suite::SuiteReport;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairOut {
    pub p: i64,
    pub q: i64,
    #[serde(rename = "p'")]
    pub pp: i64,
    #[serde(rename = "q'")]
    pub qp: i64,
}

impl From<&ConvergentPair> for PairOut {
    fn from(c: &ConvergentPair) -> Self {
        PairOut { p: c.p, q: c.q, pp: c.pp, qp: c.qp }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergentRow {
    pub pair: PairOut,
    pub tau: f64,
    pub parity_case: String,
    pub standing: bool,
    pub warning: Option<String>,
}

impl From<&ScanEntry> for ConvergentRow {
    fn from(e: &ScanEntry) -> Self {
        ConvergentRow {
            pair: (&e.pair).into(),
            tau: e.pair.tau_f64(),
            parity_case: e.pair.parity_case().label().into(),
            standing: e.standing,
            warning: e.warning.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergentsReport {
    pub theta: f64,
    pub depth: usize,
    pub pairs: Vec<ConvergentRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceVectorOut {
    /// τ(column i) = (qθ − p)·multiplier_i; absent for the identity element
    pub multipliers: Option<[i64; 6]>,
    pub evaluated: [f64; 6],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleColumn {
    pub column: usize,
    pub tau: f64,
    pub tau_residual: f64,
    pub phi: [f64; 4],
    /// max |φ − closed form|
    pub phi_residual: f64,
    pub snapped_match: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMatrixReport {
    pub theta: f64,
    pub element: String,
    pub pair: Option<PairOut>,
    pub parity_case: Option<String>,
    /// rows φ00, φ01, φ10, φ11; entries doubled
    #[serde(rename = "K")]
    pub k: [[i64; 6]; 4],
    pub trace_vector: TraceVectorOut,
    pub oracle: Option<Vec<OracleColumn>>,
}

impl KMatrixReport {
    pub fn oracle_ok(&self, tol: f64) -> bool {
        self.oracle
            .as_ref()
            .is_none_or(|cols| cols.iter().all(|c| c.snapped_match && c.tau_residual < tol && c.phi_residual < tol))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRow {
    pub name: String,
    pub trace_perm: [usize; 4],
    pub trace_sign: [i64; 4],
    pub basis_perm: [usize; 6],
    #[serde(rename = "K")]
    pub k: [[i64; 6]; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitOut {
    pub theta: f64,
    pub pair: PairOut,
    pub entries: Vec<OrbitRow>,
    pub pairwise_distinct: bool,
    pub identity_fixed: bool,
    pub character_shared: bool,
    pub tau: f64,
    /// shared φ part of the character, doubled
    pub phi: [i64; 4],
}

fn half(d: i64) -> String {
    if d % 2 == 0 {
        (d / 2).to_string()
    } else {
        format!("{d}/2")
    }
}

fn matrix_text(k: &[[i64; 6]; 4], out: &mut String) {
    for (r, row) in k.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|&d| format!("{:>5}", half(d))).collect();
        let _ = writeln!(out, "  phi{}{} {}", r / 2, r % 2, cells.join(""));
    }
}

pub fn convergents_text(r: &ConvergentsReport) -> String {
    let mut s = format!("theta = {:.15}, depth {}\n", r.theta, r.depth);
    let _ = writeln!(s, "{:>10} {:>10} {:>10} {:>10}  {:>10}  {:<10} standing", "p", "q", "p'", "q'", "tau", "case");
    for row in &r.pairs {
        let _ = writeln!(
            s,
            "{:>10} {:>10} {:>10} {:>10}  {:>10.6}  {:<10} {}{}",
            row.pair.p,
            row.pair.q,
            row.pair.pp,
            row.pair.qp,
            row.tau,
            row.parity_case,
            if row.standing { "yes" } else { "no" },
            row.warning.as_ref().map(|w| format!("  ({w})")).unwrap_or_default()
        );
    }
    s
}

pub fn kmatrix_text(r: &KMatrixReport) -> String {
    let mut s = format!("theta = {:.15}, element {}\n", r.theta, r.element);
    if let (Some(p), Some(c)) = (&r.pair, &r.parity_case) {
        let _ = writeln!(s, "pair (p, q, p', q') = ({}, {}, {}, {}), {c}", p.p, p.q, p.pp, p.qp);
    }
    s.push_str("K-matrix (columns P1..P6):\n");
    matrix_text(&r.k, &mut s);
    let tv: Vec<String> = r.trace_vector.evaluated.iter().map(|v| format!("{v:.9}")).collect();
    let _ = writeln!(s, "trace vector: {}", tv.join(" "));
    if let Some(m) = &r.trace_vector.multipliers {
        let _ = writeln!(s, "  = (q theta - p) * {m:?}");
    }
    if let Some(cols) = &r.oracle {
        s.push_str("numerical check:\n");
        for c in cols {
            let _ = writeln!(
                s,
                "  P{}: tau {:.9} (residual {:.1e}), phi residual {:.1e}, {}",
                c.column,
                c.tau,
                c.tau_residual,
                c.phi_residual,
                if c.snapped_match { "match" } else { "MISMATCH" }
            );
        }
    }
    s
}

pub fn orbit_text(r: &OrbitOut) -> String {
    let mut s = format!(
        "theta = {:.15}, pair ({}, {}, {}, {})\n",
        r.theta, r.pair.p, r.pair.q, r.pair.pp, r.pair.qp
    );
    for e in &r.entries {
        let _ = writeln!(s, "K({} e):", e.name);
        matrix_text(&e.k, &mut s);
    }
    let phi: Vec<String> = r.phi.iter().map(|&d| half(d)).collect();
    let _ = writeln!(s, "pairwise distinct: {}", r.pairwise_distinct);
    let _ = writeln!(s, "K(1) fixed: {}", r.identity_fixed);
    let _ = writeln!(
        s,
        "shared character: {} (tau {:.9}; {})",
        r.character_shared,
        r.tau,
        phi.join(", ")
    );
    s
}

pub fn suite_text(r: &SuiteReport) -> String {
    let mut s = String::new();
    for c in &r.checks {
        let _ = writeln!(s, "{}", c.line());
    }
    let passed = r.checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(s, "{passed}/{} passed (level {:?}, seed {})", r.checks.len(), r.level, r.seed);
    s
}

type CsvResult = Result<String, csv::Error>;

fn finish(w: csv::Writer<Vec<u8>>) -> CsvResult {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn convergents_csv(r: &ConvergentsReport) -> CsvResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["p", "q", "p'", "q'", "tau", "parity_case", "standing", "warning"])?;
    for row in &r.pairs {
        w.write_record([
            row.pair.p.to_string(),
            row.pair.q.to_string(),
            row.pair.pp.to_string(),
            row.pair.qp.to_string(),
            format!("{:.15}", row.tau),
            row.parity_case.clone(),
            row.standing.to_string(),
            row.warning.clone().unwrap_or_default(),
        ])?;
    }
    finish(w)
}

fn matrix_rows(w: &mut csv::Writer<Vec<u8>>, prefix: &[String], k: &[[i64; 6]; 4]) -> Result<(), csv::Error> {
    for (r, row) in k.iter().enumerate() {
        let mut rec = prefix.to_vec();
        rec.push(format!("phi{}{}", r / 2, r % 2));
        rec.extend(row.iter().map(|&d| half(d)));
        w.write_record(&rec)?;
    }
    Ok(())
}

pub fn kmatrix_csv(r: &KMatrixReport) -> CsvResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["row", "P1", "P2", "P3", "P4", "P5", "P6"])?;
    let mut tau = vec!["tau".to_string()];
    tau.extend(r.trace_vector.evaluated.iter().map(|v| format!("{v:.15}")));
    w.write_record(&tau)?;
    matrix_rows(&mut w, &[], &r.k)?;
    finish(w)
}

pub fn orbit_csv(r: &OrbitOut) -> CsvResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["element", "row", "P1", "P2", "P3", "P4", "P5", "P6"])?;
    for e in &r.entries {
        matrix_rows(&mut w, &[format!("{} e", e.name)], &e.k)?;
    }
    finish(w)
}

pub fn suite_csv(r: &SuiteReport) -> CsvResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "criterion", "passed", "metric", "limit", "seconds", "detail"])?;
    for c in &r.checks {
        w.write_record([
            c.id.to_string(),
            c.criterion.clone(),
            c.passed.to_string(),
            c.metric.map(|m| format!("{m:e}")).unwrap_or_default(),
            format!("{:e}", c.limit),
            format!("{:.3}", c.seconds),
            c.detail.clone(),
        ])?;
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nctorus::suite::{run_criterion, Level, Tolerances};

    fn roundtrip<T: Serialize + for<'de> Deserialize<'de> + PartialEq + std::fmt::Debug>(x: &T) {
        let s = serde_json::to_string(x).unwrap();
        let back: T = serde_json::from_str(&s).unwrap();
        assert_eq!(&back, x);
    }

    #[test]
    fn reports_roundtrip_through_json() {
        let pair = PairOut { p: 3, q: 5, pp: 5, qp: 8 };
        let conv = ConvergentsReport {
            theta: 0.618,
            depth: 4,
            pairs: vec![ConvergentRow {
                pair,
                tau: 0.7,
                parity_case: "q' even".into(),
                standing: true,
                warning: None,
            }],
        };
        roundtrip(&conv);
        let k = KMatrixReport {
            theta: 0.1 + 0.2,
            element: "ac".into(),
            pair: Some(pair),
            parity_case: Some("q' even".into()),
            k: [[1, 0, -1, 2, 0, 0]; 4],
            trace_vector: TraceVectorOut { multipliers: Some([8, 10, 5, 5, 5, 5]), evaluated: [1.0 / 3.0; 6] },
            oracle: Some(vec![OracleColumn {
                column: 1,
                tau: 0.7,
                tau_residual: 1e-12,
                phi: [0.5, 0.0, -0.5, 1.0],
                phi_residual: 3e-13,
                snapped_match: true,
            }]),
        };
        roundtrip(&k);
        assert!(serde_json::to_string(&k).unwrap().contains("\"p'\":5"));
        let tol = Tolerances::default();
        let r = SuiteReport {
            level: Level::Fast,
            seed: 3,
            tolerances: tol.clone(),
            checks: vec![run_criterion(8, &tol, 3).unwrap()],
            all_passed: true,
        };
        roundtrip(&r);
    }

    #[test]
    fn csv_quotes_fields() {
        let r = ConvergentsReport {
            theta: 0.5,
            depth: 1,
            pairs: vec![ConvergentRow {
                pair: PairOut { p: 1, q: 2, pp: 2, qp: 3 },
                tau: 0.7,
                parity_case: "q, q' odd".into(),
                standing: false,
                warning: Some("say \"hi\"".into()),
            }],
        };
        let s = convergents_csv(&r).unwrap();
        assert!(s.contains("\"q, q' odd\""));
        assert!(s.contains("\"say \"\"hi\"\"\""));
    }

    #[test]
    fn half_integers() {
        assert_eq!(half(-3), "-3/2");
        assert_eq!(half(4), "2");
    }
}
