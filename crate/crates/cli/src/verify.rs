//! The `verify` subcommand: five quantitative checks, each reported as
//! pass/fail with the measured value, the bound it must stay under, and the
//! tolerance that relates them (`pass` iff `measured <= bound * (1 +
//! tolerance)`). Reports embed the seed and resolutions used, carry no
//! timestamps or timings, and are therefore bit-identical across reruns
//! with the same flags.

use anyhow::{bail, Context, Result};
use axisym_euler::{
    analytic_bound_product, corpus_grid, curl_rz, generate_corpus, h_closed, h_upper_bound,
    holder_pairing, stretching_ratio, velocity_bound_rhs, weak_norm_of_g, Dimension,
};
use clap::Args;
use once_cell::sync::Lazy;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::table::write_atomic;
use crate::Outcome;

const LEMMAS: [&str; 5] = [
    "h-bounds",
    "g-weak-norm",
    "holder-corpus",
    "velocity-bound",
    "stretching-corpus",
];

/// The committed regression reference for the corpus-estimated constants;
/// regenerated with `verify --write-baseline <path>`.
#[derive(Serialize, Deserialize)]
pub struct Baseline {
    pub seed: u64,
    pub corpus_size: usize,
    pub grid: BaselineGrid,
    /// Corpus maximum of the stretching ratio `sup(|u_r|/r) / ||omega/r^2||_{2,1}`;
    /// also the growth-envelope rate constant used by `simulate`.
    pub c_est: f64,
    /// Corpus maximum of the duality-pairing ratio
    /// `sum |f g| w / (||g||_{2,1} ||f||_{2,inf})`.
    pub c_h_est: f64,
}

#[derive(Serialize, Deserialize)]
pub struct BaselineGrid {
    pub r_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub nr: usize,
    pub nz: usize,
}

pub static BASELINE: Lazy<Baseline> = Lazy::new(|| {
    serde_json::from_str(include_str!("../../../baseline/corpus_constants.json"))
        .expect("embedded baseline parses")
});

#[derive(Args)]
pub struct VerifyArgs {
    /// Run a single check: h-bounds, g-weak-norm, holder-corpus,
    /// velocity-bound, or stretching-corpus (default: all five)
    #[arg(long)]
    pub lemma: Option<String>,
    /// Grid cells per axis for the weak-norm certificate
    #[arg(long, default_value_t = 2048)]
    pub resolution: usize,
    /// Number of random fields in the corpus-driven checks
    #[arg(long, default_value_t = 50)]
    pub corpus_size: usize,
    /// Seed for every randomized corpus
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Emit the report as JSON instead of the human-readable table
    #[arg(long)]
    pub json: bool,
    /// Write the measured corpus constants to this baseline file
    /// (requires the full suite, i.e. no --lemma filter)
    #[arg(long, value_name = "PATH")]
    pub write_baseline: Option<PathBuf>,
}

#[derive(Serialize)]
struct VerifyReport {
    check: &'static str,
    status: &'static str,
    measured: f64,
    bound: f64,
    tolerance: f64,
    samples: usize,
    resolution: usize,
    corpus_size: usize,
    seed: u64,
}

#[derive(Serialize)]
struct Constants {
    c_est: f64,
    c_h_est: f64,
    /// `(8/pi) * c_h_est * sqrt(8 pi)`: the analytic constant chain of the
    /// radial-velocity bound with the empirical pairing constant spliced in.
    analytic_product: f64,
}

#[derive(Serialize)]
struct VerifyOutput {
    seed: u64,
    resolution: usize,
    corpus_size: usize,
    reports: Vec<VerifyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    constants: Option<Constants>,
}

struct Check {
    name: &'static str,
    measured: f64,
    bound: f64,
    tolerance: f64,
    samples: usize,
}

impl Check {
    fn passed(&self) -> bool {
        self.measured <= self.bound * (1.0 + self.tolerance)
    }
}

/// `0 <= H(s) <= 4s/(1-s)` sampled over `s in [0, 0.999]`. The measured
/// value is the sharpest ratio `H / bound`; a negative `H` anywhere is
/// reported as an infinite ratio so it cannot pass.
fn check_h_bounds() -> Result<Check> {
    const SAMPLES: usize = 10_000;
    let mut sharpest = 0.0f64;
    for i in 0..SAMPLES {
        let s = 0.999 * i as f64 / (SAMPLES - 1) as f64;
        let h = h_closed(s)?;
        if h < 0.0 {
            sharpest = f64::INFINITY;
            break;
        }
        if s > 0.0 {
            sharpest = sharpest.max(h / h_upper_bound(s)?);
        }
    }
    Ok(Check { name: "h-bounds", measured: sharpest, bound: 1.0, tolerance: 0.0, samples: SAMPLES })
}

/// Weak `L^{2,inf}` norm of the comparison kernel `g_{1,0}` under
/// `r^2 dr dz` stays within 2% of `sqrt(8 pi)`.
fn check_g_weak_norm(resolution: usize) -> Result<Check> {
    let measured = weak_norm_of_g(1.0, 0.0, resolution, 8.0)?;
    Ok(Check {
        name: "g-weak-norm",
        measured,
        bound: (8.0 * std::f64::consts::PI).sqrt(),
        tolerance: 0.02,
        samples: resolution,
    })
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Duality pairing on random simple functions: the pairing never exceeds
/// the product of the `L^{2,1}` and weak-`L^2` norms. The measured maximum
/// ratio is the empirical pairing constant `c_h_est`.
fn check_holder_corpus(seed: u64) -> Result<Check> {
    const TRIALS: usize = 1_000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = 0.0f64;
    for _ in 0..TRIALS {
        let n = 1 + (rng.next_u64() % 40) as usize;
        let f: Vec<f64> = (0..n).map(|_| 10.0 * unit(&mut rng)).collect();
        let g: Vec<f64> = (0..n).map(|_| 10.0 * unit(&mut rng)).collect();
        let w: Vec<f64> = (0..n).map(|_| 1e-3 + unit(&mut rng)).collect();
        let (lhs, rhs) = holder_pairing(&f, &g, &w)?;
        if rhs > 0.0 {
            max_ratio = max_ratio.max(lhs / rhs);
        }
    }
    Ok(Check {
        name: "holder-corpus",
        measured: max_ratio,
        bound: 1.0,
        tolerance: 0.0,
        samples: TRIALS,
    })
}

/// 5 x 5 probe lattice shared by the corpus-driven pointwise checks.
fn probes() -> Vec<(f64, f64)> {
    let span = |a: f64, b: f64| (0..5).map(move |i| a + (b - a) * i as f64 / 4.0);
    span(0.3, 1.8)
        .flat_map(|r| span(-1.2, 1.2).map(move |z| (r, z)))
        .collect()
}

/// Pointwise domination `|u_r| <= 1.05 * bound` across the random corpus,
/// with the bound evaluated from each field's own vorticity.
fn check_velocity_bound(seed: u64, corpus_size: usize) -> Result<Check> {
    let corpus = generate_corpus(seed, corpus_size, Dimension::D4);
    let grid = corpus_grid();
    let probes = probes();
    let mut worst = 0.0f64;
    for field in &corpus {
        let omega = field.vorticity(&grid);
        for &(r, z) in &probes {
            let (ur, _) = field.velocity_at(r, z);
            let rhs = velocity_bound_rhs(&omega, (r, z), Dimension::D4)?;
            if ur != 0.0 {
                let ratio = ur.abs() / rhs;
                if !ratio.is_finite() {
                    worst = f64::INFINITY;
                } else {
                    worst = worst.max(ratio);
                }
            }
        }
    }
    Ok(Check {
        name: "velocity-bound",
        measured: worst,
        bound: 1.0,
        tolerance: 0.05,
        samples: corpus_size * probes.len(),
    })
}

/// Stretching-ratio corpus: every ratio finite, and the corpus maximum
/// within a factor of two of the committed baseline (tolerance 1.0).
fn check_stretching_corpus(seed: u64, corpus_size: usize) -> Result<Check> {
    let corpus = generate_corpus(seed, corpus_size, Dimension::D4);
    let grid = corpus_grid();
    let mut max_ratio = 0.0f64;
    for field in &corpus {
        let u = field.velocity_field(&grid);
        let omega = curl_rz(&u);
        let report = stretching_ratio(&u, &omega, Dimension::D4)?;
        if !report.ratio.is_finite() || report.degenerate {
            max_ratio = f64::INFINITY;
            break;
        }
        max_ratio = max_ratio.max(report.ratio);
    }
    Ok(Check {
        name: "stretching-corpus",
        measured: max_ratio,
        bound: BASELINE.c_est,
        tolerance: 1.0,
        samples: corpus_size,
    })
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    if let Some(lemma) = &args.lemma {
        if !LEMMAS.contains(&lemma.as_str()) {
            bail!("unknown lemma {lemma:?}; expected one of {}", LEMMAS.join(", "));
        }
        if args.write_baseline.is_some() {
            bail!("--write-baseline needs the full suite; drop --lemma");
        }
    }
    if args.resolution < 2 {
        bail!("resolution must be at least 2");
    }
    if args.corpus_size == 0 {
        bail!("corpus-size must be at least 1");
    }

    let selected = |name: &str| args.lemma.as_deref().map_or(true, |l| l == name);
    let mut checks = Vec::new();
    if selected("h-bounds") {
        checks.push(check_h_bounds()?);
    }
    if selected("g-weak-norm") {
        checks.push(check_g_weak_norm(args.resolution)?);
    }
    if selected("holder-corpus") {
        checks.push(check_holder_corpus(args.seed)?);
    }
    if selected("velocity-bound") {
        checks.push(check_velocity_bound(args.seed, args.corpus_size)?);
    }
    if selected("stretching-corpus") {
        checks.push(check_stretching_corpus(args.seed, args.corpus_size)?);
    }

    let constants = if args.lemma.is_none() {
        let c_h_est = checks.iter().find(|c| c.name == "holder-corpus").unwrap().measured;
        let c_est = checks.iter().find(|c| c.name == "stretching-corpus").unwrap().measured;
        Some(Constants { c_est, c_h_est, analytic_product: analytic_bound_product(c_h_est) })
    } else {
        None
    };

    if let (Some(path), Some(constants)) = (&args.write_baseline, &constants) {
        let baseline = Baseline {
            seed: args.seed,
            corpus_size: args.corpus_size,
            grid: {
                let g = corpus_grid();
                BaselineGrid {
                    r_max: g.r_max(),
                    z_min: g.z_min(),
                    z_max: g.z_max(),
                    nr: g.nr(),
                    nz: g.nz(),
                }
            },
            c_est: constants.c_est,
            c_h_est: constants.c_h_est,
        };
        let mut body = serde_json::to_string_pretty(&baseline).context("serializing baseline")?;
        body.push('\n');
        write_atomic(path, body.as_bytes())?;
    }

    let all_passed = checks.iter().all(Check::passed);
    let output = VerifyOutput {
        seed: args.seed,
        resolution: args.resolution,
        corpus_size: args.corpus_size,
        reports: checks
            .iter()
            .map(|c| VerifyReport {
                check: c.name,
                status: if c.passed() { "pass" } else { "fail" },
                measured: c.measured,
                bound: c.bound,
                tolerance: c.tolerance,
                samples: c.samples,
                resolution: args.resolution,
                corpus_size: args.corpus_size,
                seed: args.seed,
            })
            .collect(),
        constants,
    };

    if args.json {
        println!("{}", serde_json::to_string_pretty(&output).context("serializing report")?);
    } else {
        for report in &output.reports {
            println!(
                "{:4}  {:<18}  measured {:.6e} vs bound {:.6e} (tolerance {})  [{} samples]",
                report.status, report.check, report.measured, report.bound, report.tolerance,
                report.samples
            );
        }
        if let Some(c) = &output.constants {
            println!(
                "constants: c_est {:.6e}, c_h_est {:.6e}, analytic product {:.6e}",
                c.c_est, c.c_h_est, c.analytic_product
            );
        }
    }
    Ok(if all_passed { Outcome::Success } else { Outcome::CheckFailed })
}
