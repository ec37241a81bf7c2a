//! Acceptance suite: one test per advertised guarantee, each printing a
//! single `PASS`/`FAIL` line (visible with `--nocapture`, and in the panic
//! message on failure). Tolerances are pinned here, not configurable;
//! anything that measures runtime asserts the budget it promises.

use axisym_euler::{
    curl_rz, cyl_divergence, decay_hypothesis_check, gaussian_test_field, gaussian_test_vorticity,
    gaussian_velocity_at, generate_corpus, h_closed, h_quad, h_upper_bound, lorentz_quasinorm,
    preset_initial_data, run, stretching_ratio, velocity_bound_rhs, velocity_from_vorticity,
    weak_norm_of_g, corpus_grid, CylGrid, Dimension, KernelParams, LorentzExponents,
    ReconstructionJob, RunOutput, ScalarField, SimulationConfig, WeightedSamples,
};
use once_cell::sync::Lazy;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const CORPUS_SEED: u64 = 7;
const CORPUS_SIZE: usize = 50;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("{}  {criterion}  {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion}: {detail}");
}

#[derive(serde::Deserialize)]
struct Baseline {
    seed: u64,
    corpus_size: usize,
    /// Corpus maximum of the stretching ratio; doubles as the growth-envelope
    /// rate constant.
    c_est: f64,
    /// Corpus maximum of the duality-pairing ratio (unused here; the verify
    /// command consumes it).
    #[allow(dead_code)]
    c_h_est: f64,
}

static BASELINE: Lazy<Baseline> = Lazy::new(|| {
    serde_json::from_str(include_str!("../../../baseline/corpus_constants.json"))
        .expect("baseline JSON parses")
});

/// The simulation presets exercised by the conservation and envelope
/// criteria; run once, shared by both.
fn run_preset(name: &str) -> RunOutput {
    let grid = CylGrid::new(2.0, -1.5, 1.5, 48, 72).unwrap();
    let omega0 = preset_initial_data(name, &grid).unwrap();
    let h = grid.hr().max(grid.hz());
    let config = SimulationConfig {
        d: Dimension::D4,
        omega0,
        dt: 0.02,
        t_end: 1.0,
        kernel: KernelParams::with_defaults(Dimension::D4, h),
        diagnostics_every: 5,
        envelope_constant: BASELINE.c_est,
    };
    run(&config).unwrap()
}

static RING: Lazy<RunOutput> = Lazy::new(|| run_preset("single-ring"));
static COLLIDING: Lazy<RunOutput> = Lazy::new(|| run_preset("colliding-rings"));

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn probe_lattice() -> Vec<(f64, f64)> {
    let mut probes = Vec::new();
    for &r in &linspace(0.3, 1.8, 5) {
        for &z in &linspace(-1.2, 1.2, 5) {
            probes.push((r, z));
        }
    }
    probes
}

#[test]
fn criterion_01_kernel_identity() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..10_000 {
        let s = 0.99 * i as f64 / 9_999.0;
        let diff = (h_closed(s).unwrap() - h_quad(s, 64).unwrap()).abs();
        worst = worst.max(diff);
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "criterion-01 kernel-identity",
        worst <= 1e-10 && elapsed < 1.0,
        &format!("max |closed - quadrature| = {worst:.3e} over 10^4 points in {elapsed:.2} s (need <= 1e-10, < 1 s)"),
    );
}

#[test]
fn criterion_02_kernel_bounds() {
    let mut violations = 0usize;
    let mut sharpest = 0.0f64;
    for i in 0..10_000 {
        let s = 0.999 * i as f64 / 9_999.0;
        let h = h_closed(s).unwrap();
        let bound = h_upper_bound(s).unwrap();
        if !(h >= 0.0 && h <= bound) {
            violations += 1;
        }
        if s > 0.0 {
            sharpest = sharpest.max(h / bound);
        }
    }
    report(
        "criterion-02 kernel-bounds",
        violations == 0,
        &format!("0 <= H(s) <= 4s/(1-s): {violations} violations over 10^4 points, sharpness sup H/bound = {sharpest:.4}"),
    );
}

#[test]
fn criterion_03_weak_norm_certificate() {
    let start = Instant::now();
    let w1024 = weak_norm_of_g(1.0, 0.0, 1024, 8.0).unwrap();
    let w2048 = weak_norm_of_g(1.0, 0.0, 2048, 8.0).unwrap();
    let shifted = weak_norm_of_g(2.0, 5.0, 2048, 16.0).unwrap();
    let shrunk = weak_norm_of_g(0.5, -3.0, 2048, 4.0).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    let bound = (8.0 * std::f64::consts::PI).sqrt() * 1.02;
    let certified = w2048 <= bound;
    let stable = (w2048 - w1024).abs() <= 0.01 * w2048;
    let invariant =
        (shifted - w2048).abs() <= 0.01 * w2048 && (shrunk - w2048).abs() <= 0.01 * w2048;
    report(
        "criterion-03 weak-norm-certificate",
        certified && stable && invariant && elapsed < 60.0,
        &format!(
            "weak norm {w2048:.6} <= {bound:.6}; doubling step {:.3e}; (2,5) -> {shifted:.6}, (0.5,-3) -> {shrunk:.6}; {elapsed:.1} s",
            (w2048 - w1024).abs() / w2048
        ),
    );
}

#[test]
fn criterion_04_lorentz_engine_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240811);
    let unit = |rng: &mut ChaCha8Rng| (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0);
    let exponents = [1.0, 1.75, 2.0, 2.125];
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let n = 1 + (rng.next_u64() % 30) as usize;
        let values: Vec<f64> = (0..n).map(|_| 10.0 * unit(&mut rng)).collect();
        let weights: Vec<f64> = (0..n).map(|_| 1e-3 + unit(&mut rng)).collect();
        let samples = WeightedSamples::new(values.clone(), weights.clone()).unwrap();
        for &p in &exponents {
            let engine = lorentz_quasinorm(&samples, LorentzExponents::new(p, p).unwrap());
            let direct = values
                .iter()
                .zip(&weights)
                .map(|(v, w)| w * v.abs().powf(p))
                .sum::<f64>()
                .powf(1.0 / p);
            let denom = direct.max(1e-300);
            worst = worst.max((engine - direct).abs() / denom);
        }
    }
    // Indicator functions: the (2,1) norm of a set of measure m is 2 sqrt(m).
    let mut worst_indicator = 0.0f64;
    for k in [1usize, 7, 23] {
        let weights: Vec<f64> = (0..k).map(|_| 0.25 + unit(&mut rng)).collect();
        let m: f64 = weights.iter().sum();
        let samples = WeightedSamples::new(vec![1.0; k], weights).unwrap();
        let engine = lorentz_quasinorm(&samples, LorentzExponents::new(2.0, 1.0).unwrap());
        worst_indicator = worst_indicator.max((engine - 2.0 * m.sqrt()).abs() / (2.0 * m.sqrt()));
    }
    report(
        "criterion-04 lorentz-engine-exactness",
        worst <= 1e-12 && worst_indicator <= 1e-12,
        &format!("L^(p,p) vs direct L^p worst rel dev {worst:.3e} on 10^3 simple functions; indicator dev {worst_indicator:.3e}"),
    );
}

#[test]
fn criterion_05_field_consistency() {
    let mut div_resid = Vec::new();
    let mut curl_err = Vec::new();
    for n in [48usize, 96, 192] {
        let grid: CylGrid<f64> = CylGrid::new(3.0, -3.0, 3.0, n, 2 * n).unwrap();
        let u = gaussian_test_field(&grid);
        let div = cyl_divergence(&u, Dimension::D4);
        div_resid.push(div.values().iter().fold(0.0f64, |m, v| m.max(v.abs())));
        let curl = curl_rz(&u);
        let exact = gaussian_test_vorticity(&grid);
        let err = curl
            .values()
            .iter()
            .zip(exact.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        curl_err.push(err);
    }
    let ratios = [
        div_resid[0] / div_resid[1],
        div_resid[1] / div_resid[2],
        curl_err[0] / curl_err[1],
        curl_err[1] / curl_err[2],
    ];
    let ok = ratios.iter().all(|r| (3.5..=4.5).contains(r));
    report(
        "criterion-05 field-consistency",
        ok,
        &format!(
            "second-order refinement: divergence ratios {:.2}, {:.2}; curl ratios {:.2}, {:.2} (need within [3.5, 4.5])",
            ratios[0], ratios[1], ratios[2], ratios[3]
        ),
    );
}

#[test]
fn criterion_06_reconstruction_convergence() {
    let start = Instant::now();
    let probes = probe_lattice();
    let exact: Vec<(f64, f64)> = probes.iter().map(|&(r, z)| gaussian_velocity_at(r, z)).collect();
    let scale = exact
        .iter()
        .fold(0.0f64, |m, &(ur, uz)| m.max(ur.abs()).max(uz.abs()));
    let mut errs = Vec::new();
    for nr in [32usize, 64, 128, 256] {
        let grid = CylGrid::new(4.0, -4.0, 4.0, nr, 2 * nr).unwrap();
        let omega = gaussian_test_vorticity(&grid);
        let params = KernelParams::with_defaults(Dimension::D4, grid.hr());
        let job = ReconstructionJob::new(&omega, &probes, params);
        let vel = velocity_from_vorticity(&job).unwrap();
        let err = vel
            .iter()
            .zip(&exact)
            .fold(0.0f64, |m, (a, b)| m.max((a.0 - b.0).abs()).max((a.1 - b.1).abs()));
        errs.push(err / scale);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    let last = *errs.last().unwrap();
    report(
        "criterion-06 reconstruction-convergence",
        decreasing && last <= 0.02 && elapsed <= 600.0,
        &format!(
            "relative max-norm errors {errs:.5?} over 32/64/128/256 cells per radius (epsilon = h); finest {last:.4} <= 0.02; {elapsed:.1} s"
        ),
    );
}

#[test]
fn criterion_07_velocity_bound_domination() {
    let corpus = generate_corpus(CORPUS_SEED, CORPUS_SIZE, Dimension::D4);
    let grid = corpus_grid();
    let probes = probe_lattice();
    let mut violations = 0usize;
    let mut min_margin = f64::INFINITY;
    for field in &corpus {
        let omega = field.vorticity(&grid);
        for &(r, z) in &probes {
            let (ur, _) = field.velocity_at(r, z);
            let rhs = velocity_bound_rhs(&omega, (r, z), Dimension::D4).unwrap();
            if ur.abs() > rhs * 1.05 {
                violations += 1;
            }
            if ur.abs() > 1e-12 {
                min_margin = min_margin.min(rhs / ur.abs());
            }
        }
    }
    report(
        "criterion-07 velocity-bound-domination",
        violations == 0,
        &format!(
            "|u_r| <= 1.05 * bound at all {} probes across {CORPUS_SIZE} fields; {violations} violations; smallest bound/|u_r| = {min_margin:.2}",
            CORPUS_SIZE * probes.len()
        ),
    );
}

#[test]
fn criterion_08_stretching_corpus() {
    assert_eq!(BASELINE.seed, CORPUS_SEED, "baseline seed mismatch");
    assert_eq!(BASELINE.corpus_size, CORPUS_SIZE, "baseline size mismatch");
    let corpus = generate_corpus(CORPUS_SEED, CORPUS_SIZE, Dimension::D4);
    let mut max_ratio = 0.0f64;
    let mut all_finite = true;
    let mut worst_scale_dev = 0.0f64;
    for field in &corpus {
        let grid = corpus_grid();
        let u = field.velocity_field(&grid);
        let omega = curl_rz(&u);
        let rep = stretching_ratio(&u, &omega, Dimension::D4).unwrap();
        all_finite &= rep.ratio.is_finite() && !rep.degenerate;
        max_ratio = max_ratio.max(rep.ratio);
        for lambda in [0.5, 2.0] {
            let sgrid = CylGrid::new(
                2.5 * lambda,
                -2.5 * lambda,
                2.5 * lambda,
                grid.nr(),
                grid.nz(),
            )
            .unwrap();
            let sfield = field.rescaled(lambda);
            let su = sfield.velocity_field(&sgrid);
            let somega = curl_rz(&su);
            let srep = stretching_ratio(&su, &somega, Dimension::D4).unwrap();
            worst_scale_dev = worst_scale_dev.max((srep.ratio - rep.ratio).abs() / rep.ratio.max(1e-300));
        }
    }
    let within_baseline = max_ratio <= 2.0 * BASELINE.c_est;
    report(
        "criterion-08 stretching-corpus",
        all_finite && worst_scale_dev <= 1e-3 && within_baseline,
        &format!(
            "max ratio {max_ratio:.6} (baseline {:.6}, must stay within 2x); rescale deviation {worst_scale_dev:.2e} <= 1e-3; all finite: {all_finite}",
            BASELINE.c_est
        ),
    );
}

#[test]
fn criterion_09_transport_conservation() {
    let ring = &*RING;
    let l0 = ring.records[0].l21;
    let mut worst_l21 = 0.0f64;
    for rec in &ring.records {
        worst_l21 = worst_l21.max((rec.l21 - l0).abs() / l0);
    }

    let coll = &*COLLIDING;
    let particles = &coll.particles;
    let mut worst_mirror = 0.0f64;
    for m in 0..particles.paired_len() / 2 {
        let (p, q) = (2 * m, 2 * m + 1);
        worst_mirror = worst_mirror.max((particles.r()[p] - particles.r()[q]).abs());
        worst_mirror = worst_mirror.max((particles.z()[p] + particles.z()[q]).abs());
    }
    let paired = particles.paired_len() == particles.len();
    report(
        "criterion-09 transport-conservation",
        ring.diverged.is_none()
            && coll.diverged.is_none()
            && l0 > 0.0
            && worst_l21 <= 1e-12
            && paired
            && worst_mirror <= 1e-10,
        &format!(
            "ring l21 drift {worst_l21:.2e} <= 1e-12 over t in [0,1] ({} records); colliding mirror defect {worst_mirror:.2e} <= 1e-10 over {} particle pairs",
            ring.records.len(),
            particles.paired_len() / 2
        ),
    );
}

#[test]
fn criterion_10_vorticity_envelope() {
    let mut pass = true;
    let mut detail = String::new();
    for (name, out) in [("single-ring", &*RING), ("colliding-rings", &*COLLIDING)] {
        pass &= out.diverged.is_none();
        let mut worst = 0.0f64;
        for rec in &out.records {
            if rec.omega_sup > rec.envelope {
                pass = false;
            }
            worst = worst.max(rec.omega_sup / rec.envelope);
        }
        let growth = out.records.last().unwrap().omega_sup / out.records[0].omega_sup;
        let allowed = out.records.last().unwrap().envelope / out.records[0].envelope;
        detail.push_str(&format!(
            "{name}: sup growth {growth:.4} vs envelope growth {allowed:.4}, max sup/envelope {worst:.4}; "
        ));
    }
    report("criterion-10 vorticity-envelope", pass, detail.trim_end());
}

#[test]
fn criterion_11_decay_hypothesis() {
    let grid = CylGrid::new(4.0, -4.0, 4.0, 256, 512).unwrap();
    let omega = gaussian_test_vorticity(&grid);
    let rep = decay_hypothesis_check(&omega, Dimension::D4).unwrap();

    let ladders_ok = rep.norm_low.converged
        && rep.norm_high.converged
        && rep.norm_low.last_step < 1e-3
        && rep.norm_high.last_step < 1e-3;

    let l21_at = |res: usize| -> f64 {
        let g: CylGrid<f64> = CylGrid::new(4.0, -4.0, 4.0, res, 2 * res).unwrap();
        let eta = ScalarField::from_fn(g, |r, z| {
            let om = 4.0 * r * z * (4.0 - r * r - z * z) * (-r * r - z * z).exp();
            om / (r * r)
        });
        let samples = WeightedSamples::from_field(&eta, Dimension::D4);
        lorentz_quasinorm(&samples, LorentzExponents::new(2.0, 1.0).unwrap())
    };
    let l21_coarse = l21_at(1024);
    let l21_fine = l21_at(2048);
    let refinement_dev = (l21_fine - l21_coarse).abs() / l21_fine;
    let l21_ok = l21_fine.is_finite() && l21_fine > 0.0 && refinement_dev <= 0.01;

    report(
        "criterion-11 decay-hypothesis",
        rep.passed && ladders_ok && l21_ok,
        &format!(
            "decay check passed: {}; ladder steps {:.2e}/{:.2e} < 1e-3; l21 {l21_fine:.4} refinement dev {refinement_dev:.3e} <= 0.01 (failure: {:?})",
            rep.passed, rep.norm_low.last_step, rep.norm_high.last_step, rep.failure
        ),
    );
}
