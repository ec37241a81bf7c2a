//! Velocity-reconstruction kernels for axisymmetric swirl-free flow.
//!
//! The angular part of the Biot–Savart integral in dimension `d` reduces to
//! one-dimensional integrals in `tau = cos(angle)`:
//!
//! ```text
//! I_r = int_{-1}^{1} tau (1 - tau^2)^{(d-4)/2} (A - B tau)^{-d/2} dtau
//! I_z = int_{-1}^{1} (r tau - rbar) (1 - tau^2)^{(d-4)/2} (A - B tau)^{-d/2} dtau
//! ```
//!
//! with `A = r^2 + rbar^2 + dz^2` and `B = 2 r rbar`. In dimension 4 the
//! weight is 1 and both integrals collapse to the closed-form profile
//! `H(s) = int tau (1 - s tau)^{-2} dtau` with `s = B / A`, evaluated here
//! both in closed form and by graded-panel quadrature so each can certify
//! the other.

use crate::error::{Error, Result};
use crate::grid::Dimension;
use crate::quadrature::{
    graded_edges_toward_one, graded_edges_toward_zero_on_pi, integrate_gauss_chebyshev,
    integrate_gl_panels,
};

/// Parameters shared by every kernel evaluation in a reconstruction run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    /// Ambient dimension (`d >= 3`).
    pub d: Dimension,
    /// Nodes per quadrature panel for the tau integrals.
    pub tau_order: usize,
    /// Mollification length; `0` selects exact kernels with diagonal-cell
    /// exclusion.
    pub epsilon: f64,
    /// Sources farther than this in `|r - rbar|` are skipped.
    pub r_cut: f64,
    /// Sources farther than this in `|z - zbar|` are skipped.
    pub z_cut: f64,
}

impl KernelParams {
    pub fn new(d: Dimension, tau_order: usize, epsilon: f64, r_cut: f64, z_cut: f64) -> Result<Self> {
        if tau_order < 4 {
            return Err(Error::InvalidArgument(format!(
                "tau_order must be at least 4, got {tau_order}"
            )));
        }
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be finite and non-negative, got {epsilon}"
            )));
        }
        if !(r_cut > 0.0) || !(z_cut > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cutoffs must be positive, got r_cut = {r_cut}, z_cut = {z_cut}"
            )));
        }
        Ok(Self { d, tau_order, epsilon, r_cut, z_cut })
    }

    /// Defaults for a grid with spacing `h`: mollification `epsilon = h`,
    /// 64-node panels, no cutoff.
    pub fn with_defaults(d: Dimension, h: f64) -> Self {
        Self { d, tau_order: 64, epsilon: h, r_cut: f64::INFINITY, z_cut: f64::INFINITY }
    }
}

/// Number of dyadic refinement levels toward the integrable peak; 14 panels
/// total on `[-1, 1]`, enough that 64-node panels hold 1e-10 absolute
/// accuracy up to `s = 0.99`.
const TAU_PANEL_LEVELS: u32 = 12;
const THETA_PANEL_LEVELS: u32 = 11;

/// Below this `s` the closed form of `H` is evaluated by its power series;
/// the two branches agree to well under 1e-10 at the switch.
const H_SERIES_THRESHOLD: f64 = 0.05;
const H_SERIES_TERMS: u32 = 12;

fn check_s(s: f64) -> Result<()> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::OutOfDomain(format!(
            "kernel profile argument must lie in [0, 1), got {s}"
        )));
    }
    Ok(())
}

/// `H(s)` without the domain check; callers guarantee `0 <= s < 1`.
pub(crate) fn h_closed_raw(s: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&s));
    if s < H_SERIES_THRESHOLD {
        // H(s) = sum_{j>=1} (4j / (2j + 1)) s^(2j - 1); leading term (4/3) s.
        // The closed form loses relative accuracy to cancellation as s -> 0.
        let s2 = s * s;
        let mut term = s;
        let mut acc = 0.0;
        for j in 1..=H_SERIES_TERMS {
            let jf = f64::from(j);
            acc += 4.0 * jf / (2.0 * jf + 1.0) * term;
            term *= s2;
        }
        acc
    } else {
        ((-s).ln_1p() - s.ln_1p() + 2.0 * s / (1.0 - s * s)) / (s * s)
    }
}

/// Closed-form kernel profile `H(s) = int_{-1}^{1} tau (1 - s tau)^{-2} dtau`
/// on `0 <= s < 1`.
pub fn h_closed(s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(h_closed_raw(s))
}

/// The same profile by composite Gauss–Legendre quadrature with `order`
/// nodes on each of 14 panels dyadically graded toward `tau = 1`, where the
/// integrand peaks as `s -> 1`.
pub fn h_quad(s: f64, order: usize) -> Result<f64> {
    check_s(s)?;
    if order < 4 {
        return Err(Error::InvalidArgument(format!(
            "quadrature order must be at least 4, got {order}"
        )));
    }
    let edges = graded_edges_toward_one(TAU_PANEL_LEVELS);
    let f = |tau: f64| {
        let m = 1.0 - s * tau;
        tau / (m * m)
    };
    Ok(integrate_gl_panels(f, &edges, order))
}

/// Pointwise majorant `H(s) <= 4 s / (1 - s)` on `[0, 1)`.
pub fn h_upper_bound(s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(4.0 * s / (1.0 - s))
}

/// Companion profile `G(s) = int_{-1}^{1} (1 - s tau)^{-2} dtau = 2 / (1 - s^2)`,
/// the even counterpart of `H` appearing in the axial velocity component.
pub(crate) fn g_profile_raw(s: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&s));
    2.0 / (1.0 - s * s)
}

/// Which velocity component a tau integral feeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TauComponent {
    /// Radial component: integrand factor `tau`.
    Ur,
    /// Axial component: integrand factor `r tau - rbar`.
    Uz,
}

/// One-dimensional angular kernel integral for a source ring at radius
/// `rbar` and a target at radius `r`, axial separation `dz` (any
/// mollification is folded into `dz` by the caller as
/// `dz_eff^2 = dz^2 + epsilon^2`).
///
/// Dispatches on dimension: Gauss–Chebyshev absorbs the
/// `(1 - tau^2)^{-1/2}` weight at `d = 3`; graded-panel Gauss–Legendre in
/// `tau` at `d = 4`; the substitution `tau = cos(theta)` with panels graded
/// toward `theta = 0` for `d >= 5`.
pub fn tau_kernel(
    d: Dimension,
    r: f64,
    rbar: f64,
    dz: f64,
    component: TauComponent,
    order: usize,
) -> Result<f64> {
    for (name, v) in [("r", r), ("rbar", rbar), ("dz", dz)] {
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{name} must be finite, got {v}")));
        }
    }
    if r < 0.0 || rbar < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "radii must be non-negative, got r = {r}, rbar = {rbar}"
        )));
    }
    if (r - rbar) * (r - rbar) + dz * dz == 0.0 {
        return Err(Error::OutOfDomain(
            "tau kernel is singular where the target meets the source ring".into(),
        ));
    }
    if order < 4 {
        return Err(Error::InvalidArgument(format!(
            "quadrature order must be at least 4, got {order}"
        )));
    }
    let a = r * r + rbar * rbar + dz * dz;
    Ok(tau_kernel_raw(d, r, rbar, a, component, order))
}

/// Unchecked tau integral taking the combined denominator constant
/// `a >= r^2 + rbar^2` directly, so callers can fold a mollification length
/// into it (`a = r^2 + rbar^2 + dz^2 + epsilon^2`) without losing bits to a
/// sqrt/square round-trip. Requires `a > 2 r rbar`.
pub(crate) fn tau_kernel_raw(
    d: Dimension,
    r: f64,
    rbar: f64,
    a: f64,
    component: TauComponent,
    order: usize,
) -> f64 {
    debug_assert!(a > 2.0 * r * rbar);
    if r == 0.0 && component == TauComponent::Ur {
        // The integrand is odd in tau on the axis; return the exact zero
        // rather than quadrature round-off.
        return 0.0;
    }
    let b = 2.0 * r * rbar;
    let half_d = f64::from(d.get()) / 2.0;
    let factor = |tau: f64| match component {
        TauComponent::Ur => tau,
        TauComponent::Uz => r * tau - rbar,
    };
    match d.get() {
        3 => integrate_gauss_chebyshev(|tau| factor(tau) * (a - b * tau).powf(-half_d), order),
        4 => {
            let edges = graded_edges_toward_one(TAU_PANEL_LEVELS);
            integrate_gl_panels(
                |tau| {
                    let m = a - b * tau;
                    factor(tau) / (m * m)
                },
                &edges,
                order,
            )
        }
        dd => {
            // tau = cos(theta): the weight becomes sin^(d-3)(theta) and the
            // peak of (A - B tau)^(-d/2) moves to theta = 0.
            let pow = i32::try_from(dd).expect("dimension fits in i32") - 3;
            let edges = graded_edges_toward_zero_on_pi(THETA_PANEL_LEVELS);
            integrate_gl_panels(
                |theta| {
                    let tau = theta.cos();
                    factor(tau) * theta.sin().powi(pow) * (a - b * tau).powf(-half_d)
                },
                &edges,
                order,
            )
        }
    }
}

/// Two-parameter comparison kernel
/// `g_{a,b}(r, z) = ((a^2 + r^2 + (z - b)^2)^{1/2} ((r - a)^2 + (z - b)^2)^{1/2})^{-1}`,
/// the pointwise majorant shape controlling the radial velocity.
pub fn g_kernel(a: f64, b: f64, r: f64, z: f64) -> Result<f64> {
    for (name, v) in [("a", a), ("b", b), ("r", r), ("z", z)] {
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{name} must be finite, got {v}")));
        }
    }
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("ring radius a must be positive, got {a}")));
    }
    if r == a && z == b {
        return Err(Error::OutOfDomain(
            "g kernel is singular at the ring (r, z) = (a, b)".into(),
        ));
    }
    let dz = z - b;
    let far = (a * a + r * r + dz * dz).sqrt();
    let near = ((r - a) * (r - a) + dz * dz).sqrt();
    Ok(1.0 / (far * near))
}
