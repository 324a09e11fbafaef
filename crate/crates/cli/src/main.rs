//! nctorus: convergent search, K-matrix reports, S3 orbits and the verification suite.
//!
//! Exit status: 0 when everything requested passed, 1 when a check or a
//! computation failed, 2 for usage errors (bad flags, bad θ, bad pair).

mod report;

use clap::{Parser, Subcommand, ValueEnum};
use nctorus::arithmetic::{scan, standing_pairs, ConvergentPair, ThetaValue};
use nctorus::chern::{basis_character, snap_phis};
use nctorus::fields::{build_ac_projection, build_p};
use nctorus::ktheory::{kmatrix_closed, kmatrix_of_identity, s3_orbit_report, trace_vector};
use nctorus::spectral::{cutdown_invariants, RepConfig};
use nctorus::suite::{run_suite, Level, Tolerances, DEFAULT_SEED};
use nctorus::Error;
use report::*;
use serde::Serialize;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "nctorus", version, about = "K-matrices of approximately central projections in the Flip orbifold")]
struct Cli {
    /// golden, silver, golden-complement, cf:a1,a2,..., p/q or a decimal
    #[arg(long, global = true, default_value = "golden")]
    theta: String,
    /// number of continued-fraction convergents to scan
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..=64))]
    depth: u64,
    /// explicit convergent pair p,q,p',q'
    #[arg(long, global = true, value_parser = parse_pair)]
    pair: Option<[i64; 4]>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// seed for the random-element property checks
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// tolerance override KEY=VAL (repeatable)
    #[arg(long = "tolerance", global = true, value_name = "KEY=VAL")]
    tolerances: Vec<String>,
    /// write the report here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Element {
    /// the approximately central projection e
    Ac,
    /// the unit, whose K-matrix lists the basis characters
    Identity,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// list convergent pairs with τ, parity case and the standing flag
    Convergents,
    /// closed-form K-matrix and trace vector for a standing pair
    Kmatrix {
        /// recompute every column numerically and compare
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value_t = Element::Ac)]
        element: Element,
    },
    /// the six K-matrices of the S3 orbit (q even, p' odd)
    Orbit,
    /// run the acceptance checks
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
    },
}

fn parse_pair(s: &str) -> Result<[i64; 4], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected p,q,p',q' (four integers), got {} fields", parts.len()));
    }
    let mut out = [0i64; 4];
    let mut pos = 0;
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|e| format!("position {pos}: {part:?} is not an integer ({e})"))?;
        pos += part.len() + 1;
    }
    Ok(out)
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) | Error::Parse { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

struct Ctx {
    theta: ThetaValue,
    depth: usize,
    pair: Option<[i64; 4]>,
    format: Format,
}

impl Ctx {
    fn explicit_pair(&self) -> Result<Option<ConvergentPair>, Failure> {
        match self.pair {
            Some([p, q, pp, qp]) => Ok(Some(ConvergentPair::new(self.theta.value(), p, q, pp, qp)?)),
            None => Ok(None),
        }
    }

    fn standing(&self) -> Result<ConvergentPair, Failure> {
        if let Some(pair) = self.explicit_pair()? {
            if !pair.is_standing() {
                return Err(Failure::Usage(format!(
                    "pair {:?} is not standing (tau = {:.6}, need 1/2 < tau < 4/5)",
                    pair.tuple(),
                    pair.tau_f64()
                )));
            }
            return Ok(pair);
        }
        standing_pairs(&self.theta, self.depth)?.into_iter().next().ok_or_else(|| {
            Failure::Usage(format!("no standing pair within depth {}; try --depth or --pair", self.depth))
        })
    }
}

fn render<T: Serialize>(
    ctx: &Ctx,
    report: &T,
    text: impl Fn(&T) -> String,
    csv: impl Fn(&T) -> Result<String, csv::Error>,
) -> Result<String, Failure> {
    Ok(match ctx.format {
        Format::Text => text(report),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| Failure::Check(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => csv(report).map_err(|e| Failure::Check(e.to_string()))?,
    })
}

fn cmd_convergents(ctx: &Ctx) -> Result<(String, bool), Failure> {
    let rows = scan(&ctx.theta, ctx.depth)?;
    let r = ConvergentsReport {
        theta: ctx.theta.value().to_f64(),
        depth: ctx.depth,
        pairs: rows.iter().map(ConvergentRow::from).collect(),
    };
    Ok((render(ctx, &r, convergents_text, convergents_csv)?, true))
}

fn deeper_pair_hint(ctx: &Ctx, pair: &ConvergentPair) -> String {
    let deeper = standing_pairs(&ctx.theta, 64)
        .ok()
        .and_then(|v| v.into_iter().find(|c| c.q > pair.q && c.qp > pair.qp));
    match deeper {
        Some(c) => format!("; try --pair {},{},{},{}", c.p, c.q, c.pp, c.qp),
        None => String::new(),
    }
}

fn ac_oracle(ctx: &Ctx, pair: &ConvergentPair) -> Result<Vec<OracleColumn>, Failure> {
    let cfg = RepConfig::default();
    let e = build_ac_projection(pair)?;
    let k = kmatrix_closed(pair);
    let tv = trace_vector(pair);
    let mut cols = Vec::new();
    for i in 1..=6 {
        let p = build_p(i, pair.theta)?;
        let r = cutdown_invariants(&e, &p, &cfg).map_err(|err| match err {
            Error::Gap { .. } => Failure::Check(format!("P{i}: {err}{}", deeper_pair_hint(ctx, pair))),
            other => other.into(),
        })?;
        cols.push(column_check(i, r.tau, tv.evaluated[i - 1], r.phi, k.column(i - 1)));
    }
    Ok(cols)
}

fn column_check(i: usize, tau: f64, want_tau: f64, phi: [f64; 4], want: [i64; 4]) -> OracleColumn {
    let phi_residual = phi.iter().zip(want).map(|(v, w)| (v - w as f64 / 2.0).abs()).fold(0.0, f64::max);
    OracleColumn {
        column: i,
        tau,
        tau_residual: (tau - want_tau).abs(),
        phi,
        phi_residual,
        snapped_match: snap_phis(phi).ok() == Some(want),
    }
}

fn cmd_kmatrix(ctx: &Ctx, verify: bool, element: Element, tol: &Tolerances) -> Result<(String, bool), Failure> {
    let theta = ctx.theta.value();
    let th = theta.to_f64();
    let r = match element {
        Element::Ac => {
            let pair = ctx.standing()?;
            let tv = trace_vector(&pair);
            KMatrixReport {
                theta: th,
                element: "ac".into(),
                pair: Some((&pair).into()),
                parity_case: Some(pair.parity_case().label().into()),
                k: kmatrix_closed(&pair).0,
                trace_vector: TraceVectorOut { multipliers: Some(tv.multipliers), evaluated: tv.evaluated },
                oracle: if verify { Some(ac_oracle(ctx, &pair)?) } else { None },
            }
        }
        Element::Identity => {
            let k = kmatrix_of_identity();
            let taus: [f64; 6] = std::array::from_fn(|i| basis_character(i + 1, th).tau.eval(th));
            let oracle = if verify {
                let mut cols = Vec::new();
                for i in 1..=6 {
                    let x = build_p(i, theta)?;
                    let phi = x.phi_traces().map(|c| c.re);
                    cols.push(column_check(i, x.canonical_trace().re, taus[i - 1], phi, k.column(i - 1)));
                }
                Some(cols)
            } else {
                None
            };
            KMatrixReport {
                theta: th,
                element: "identity".into(),
                pair: None,
                parity_case: None,
                k: k.0,
                trace_vector: TraceVectorOut { multipliers: None, evaluated: taus },
                oracle,
            }
        }
    };
    let ok = r.oracle_ok(tol.snap);
    Ok((render(ctx, &r, kmatrix_text, kmatrix_csv)?, ok))
}

fn cmd_orbit(ctx: &Ctx) -> Result<(String, bool), Failure> {
    let pair = match ctx.explicit_pair()? {
        Some(p) => p,
        None => standing_pairs(&ctx.theta, ctx.depth)?
            .into_iter()
            .find(|p| p.q % 2 == 0 && p.pp % 2 != 0)
            .ok_or_else(|| {
                Failure::Usage(format!(
                    "no standing pair with q even and p' odd within depth {}; \
                     the orbit report covers only that case (try --theta golden-complement)",
                    ctx.depth
                ))
            })?,
    };
    let o = s3_orbit_report(&pair)?;
    let r = OrbitOut {
        theta: ctx.theta.value().to_f64(),
        pair: (&pair).into(),
        entries: o
            .entries
            .iter()
            .map(|e| OrbitRow {
                name: e.name.clone(),
                trace_perm: e.descriptor.trace_perm,
                trace_sign: e.descriptor.trace_sign,
                basis_perm: e.descriptor.basis_perm,
                k: e.kmatrix.0,
            })
            .collect(),
        pairwise_distinct: o.pairwise_distinct,
        identity_fixed: o.identity_fixed,
        character_shared: o.character_shared,
        tau: o.tau,
        phi: o.phi2,
    };
    let ok = r.pairwise_distinct && r.identity_fixed && r.character_shared;
    Ok((render(ctx, &r, orbit_text, orbit_csv)?, ok))
}

fn cmd_verify(ctx: &Ctx, level: LevelArg, tol: &Tolerances, seed: u64) -> Result<(String, bool), Failure> {
    let level = match level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let r = run_suite(level, tol, seed);
    let ok = r.all_passed;
    Ok((render(ctx, &r, suite_text, suite_csv)?, ok))
}

fn run(cli: Cli) -> Result<(String, bool), Failure> {
    let mut tol = Tolerances::default();
    for t in &cli.tolerances {
        tol.set(t)?;
    }
    let ctx = Ctx {
        theta: ThetaValue::parse(&cli.theta)?,
        depth: cli.depth as usize,
        pair: cli.pair,
        format: cli.format,
    };
    match cli.command {
        Command::Convergents => cmd_convergents(&ctx),
        Command::Kmatrix { verify, element } => cmd_kmatrix(&ctx, verify, element, &tol),
        Command::Orbit => cmd_orbit(&ctx),
        Command::Verify { level } => cmd_verify(&ctx, level, &tol, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok((text, ok)) => {
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
