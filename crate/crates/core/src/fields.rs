//! The closed-form Gaussian test field and finite-difference operators in
//! cylindrical coordinates.

use crate::grid::{CylGrid, Dimension, ScalarField, VectorFieldRZ};
use crate::scalar::{lit, Real};

/// The explicit axisymmetric swirl-free test field
/// `u = exp(-r^2 - z^2) (r (1 - 2 z^2) e_r - z (3 - 2 r^2) e_z)`,
/// divergence-free in dimension 4.
pub fn gaussian_test_field<T: Real>(grid: &CylGrid<T>) -> VectorFieldRZ<T> {
    VectorFieldRZ::from_fn(*grid, |r, z| {
        let e = (-(r * r) - z * z).exp();
        let two = lit::<T>(2.0);
        let ur = e * r * (T::one() - two * z * z);
        let uz = -e * z * (lit::<T>(3.0) - two * r * r);
        (ur, uz)
    })
}

/// Scalar vorticity of [`gaussian_test_field`]:
/// `omega = 4 r z (4 - r^2 - z^2) exp(-r^2 - z^2)`.
pub fn gaussian_test_vorticity<T: Real>(grid: &CylGrid<T>) -> ScalarField<T> {
    ScalarField::from_fn(*grid, |r, z| {
        lit::<T>(4.0) * r * z * (lit::<T>(4.0) - r * r - z * z) * (-(r * r) - z * z).exp()
    })
}

/// Closed-form pointwise values of the Gaussian test pair, used by oracles
/// that probe off-node positions.
pub fn gaussian_velocity_at<T: Real>(r: T, z: T) -> (T, T) {
    let e = (-(r * r) - z * z).exp();
    let two = lit::<T>(2.0);
    (
        e * r * (T::one() - two * z * z),
        -e * z * (lit::<T>(3.0) - two * r * r),
    )
}

/// Second-order derivative along one storage direction: centered in the
/// interior, one-sided at the two boundary nodes (falls back to the two-point
/// difference when only two nodes exist).
#[inline]
fn deriv<T: Real>(fm2: T, fm1: T, f0: T, fp1: T, fp2: T, pos: Stencil, h: T) -> T {
    let two_h = lit::<T>(2.0) * h;
    match pos {
        Stencil::Interior => (fp1 - fm1) / two_h,
        Stencil::Left => (-lit::<T>(3.0) * f0 + lit::<T>(4.0) * fp1 - fp2) / two_h,
        Stencil::Right => (lit::<T>(3.0) * f0 - lit::<T>(4.0) * fm1 + fm2) / two_h,
        Stencil::LeftShort => (fp1 - f0) / h,
        Stencil::RightShort => (f0 - fm1) / h,
    }
}

#[derive(Clone, Copy)]
enum Stencil {
    Interior,
    Left,
    Right,
    LeftShort,
    RightShort,
}

fn stencil_for(k: usize, n: usize) -> Stencil {
    if k > 0 && k + 1 < n {
        Stencil::Interior
    } else if k == 0 {
        if n >= 3 {
            Stencil::Left
        } else {
            Stencil::LeftShort
        }
    } else if n >= 3 {
        Stencil::Right
    } else {
        Stencil::RightShort
    }
}

fn d_dr<T: Real>(get: impl Fn(usize, usize) -> T, grid: &CylGrid<T>, i: usize, j: usize) -> T {
    let n = grid.nr();
    let s = stencil_for(i, n);
    let at = |k: isize| -> T {
        let k = k.clamp(0, n as isize - 1) as usize;
        get(k, j)
    };
    let i = i as isize;
    deriv(at(i - 2), at(i - 1), at(i), at(i + 1), at(i + 2), s, grid.hr())
}

fn d_dz<T: Real>(get: impl Fn(usize, usize) -> T, grid: &CylGrid<T>, i: usize, j: usize) -> T {
    let n = grid.nz();
    let s = stencil_for(j, n);
    let at = |k: isize| -> T {
        let k = k.clamp(0, n as isize - 1) as usize;
        get(i, k)
    };
    let j = j as isize;
    deriv(at(j - 2), at(j - 1), at(j), at(j + 1), at(j + 2), s, grid.hz())
}

/// Finite-difference cylindrical divergence
/// `div u = d(u_r)/dr + d(u_z)/dz + (d - 2) u_r / r`.
///
/// Second-order centered stencils in the interior, one-sided second-order
/// stencils at boundary nodes; exact for polynomial components of total
/// degree <= 2.
pub fn cyl_divergence<T: Real>(u: &VectorFieldRZ<T>, d: Dimension) -> ScalarField<T> {
    let grid = u.grid;
    let coeff = lit::<T>(f64::from(d.get() - 2));
    let mut out = ScalarField::zeros(grid);
    for i in 0..grid.nr() {
        let r = grid.r_center(i);
        for j in 0..grid.nz() {
            let dur_dr = d_dr(|a, b| u.ur(a, b), &grid, i, j);
            let duz_dz = d_dz(|a, b| u.uz(a, b), &grid, i, j);
            out.set(i, j, dur_dr + duz_dz + coeff * u.ur(i, j) / r);
        }
    }
    out
}

/// Finite-difference scalar vorticity `omega = d(u_z)/dr - d(u_r)/dz`,
/// same stencils as [`cyl_divergence`].
pub fn curl_rz<T: Real>(u: &VectorFieldRZ<T>) -> ScalarField<T> {
    let grid = u.grid;
    let mut out = ScalarField::zeros(grid);
    for i in 0..grid.nr() {
        for j in 0..grid.nz() {
            let duz_dr = d_dr(|a, b| u.uz(a, b), &grid, i, j);
            let dur_dz = d_dz(|a, b| u.ur(a, b), &grid, i, j);
            out.set(i, j, duz_dr - dur_dz);
        }
    }
    out
}
