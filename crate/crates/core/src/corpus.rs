//! A reproducible family of compactly supported test flows.
//!
//! Each member is an axisymmetric swirl-free velocity field derived from a
//! stream function `psi = r^(d-1) phi` with
//! `phi = sum_k A_k q(|x - c_k| / R_k)` and the bump `q(t) = (1 - t^2)^4`
//! (supported on `t <= 1`). Velocities follow analytically:
//!
//! ```text
//! u_r = r d(phi)/dz          u_z = -((d - 1) phi + r d(phi)/dr)
//! ```
//!
//! which is exactly divergence-free in dimension `d` and vanishes to high
//! order at the axis. Vorticity is sampled by the second-order curl of the
//! analytic velocity on a grid, so every consumer sees a single consistent
//! discretization.

use crate::fields::curl_rz;
use crate::grid::{CylGrid, Dimension, ScalarField, VectorFieldRZ};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One radial bump of the stream-function profile.
#[derive(Clone, Copy, Debug)]
pub struct StreamBump {
    pub r0: f64,
    pub z0: f64,
    pub radius: f64,
    pub amplitude: f64,
}

/// A corpus member: a finite superposition of stream-function bumps.
#[derive(Clone, Debug)]
pub struct CorpusField {
    pub d: Dimension,
    pub bumps: Vec<StreamBump>,
}

impl CorpusField {
    /// Analytic velocity at a point.
    pub fn velocity_at(&self, r: f64, z: f64) -> (f64, f64) {
        let mut phi = 0.0;
        let mut phi_r = 0.0;
        let mut phi_z = 0.0;
        for b in &self.bumps {
            let dr = r - b.r0;
            let dz = z - b.z0;
            let rr = b.radius * b.radius;
            let t2 = (dr * dr + dz * dz) / rr;
            if t2 >= 1.0 {
                continue;
            }
            let m = 1.0 - t2;
            let m2 = m * m;
            // q(t) = (1 - t^2)^4, and q'(t)/t = -8 (1 - t^2)^3, smooth at 0.
            phi += b.amplitude * m2 * m2;
            let slope = b.amplitude * -8.0 * m2 * m / rr;
            phi_r += slope * dr;
            phi_z += slope * dz;
        }
        let dm1 = f64::from(self.d.get() - 1);
        (r * phi_z, -(dm1 * phi + r * phi_r))
    }

    /// Analytic velocity sampled at the cell centers of a grid.
    pub fn velocity_field(&self, grid: &CylGrid<f64>) -> VectorFieldRZ<f64> {
        VectorFieldRZ::from_fn(*grid, |r, z| self.velocity_at(r, z))
    }

    /// Vorticity as the finite-difference curl of the sampled velocity.
    pub fn vorticity(&self, grid: &CylGrid<f64>) -> ScalarField<f64> {
        curl_rz(&self.velocity_field(grid))
    }

    /// The field dilated by `lambda`: every bump center and radius scales,
    /// amplitudes are untouched, and `u_lambda(x) = u(x / lambda)`.
    pub fn rescaled(&self, lambda: f64) -> CorpusField {
        CorpusField {
            d: self.d,
            bumps: self
                .bumps
                .iter()
                .map(|b| StreamBump {
                    r0: lambda * b.r0,
                    z0: lambda * b.z0,
                    radius: lambda * b.radius,
                    amplitude: b.amplitude,
                })
                .collect(),
        }
    }
}

/// The grid every corpus diagnostic runs on: it contains the support of
/// every generated bump.
pub fn corpus_grid() -> CylGrid<f64> {
    CylGrid::new(2.5, -2.5, 2.5, 128, 256).expect("static corpus grid parameters are valid")
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    // 53 uniform mantissa bits; deterministic across platforms.
    (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
}

fn span(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

/// Deterministically generates `size` corpus members from a seed. Most
/// members superpose three mid-radius bumps; every fifth concentrates a
/// small bump near the axis, where the stretching quotient is largest.
pub fn generate_corpus(seed: u64, size: usize, d: Dimension) -> Vec<CorpusField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = Vec::with_capacity(size);
    for k in 0..size {
        let mut bumps = Vec::with_capacity(3);
        if k % 5 == 4 {
            bumps.push(StreamBump {
                r0: span(&mut rng, 0.1, 0.4),
                z0: span(&mut rng, -0.5, 0.5),
                radius: span(&mut rng, 0.08, 0.2),
                amplitude: span(&mut rng, -1.0, 1.0),
            });
            for _ in 0..2 {
                bumps.push(StreamBump {
                    r0: span(&mut rng, 0.3, 1.2),
                    z0: span(&mut rng, -1.0, 1.0),
                    radius: span(&mut rng, 0.2, 0.5),
                    amplitude: span(&mut rng, -1.0, 1.0),
                });
            }
        } else {
            for _ in 0..3 {
                bumps.push(StreamBump {
                    r0: span(&mut rng, 0.3, 1.8),
                    z0: span(&mut rng, -1.5, 1.5),
                    radius: span(&mut rng, 0.25, 0.7),
                    amplitude: span(&mut rng, -1.0, 1.0),
                });
            }
        }
        corpus.push(CorpusField { d, bumps });
    }
    corpus
}
