//! Cell-centered grids on the meridian half-plane and scalar/vector fields
//! sampled on them.
//!
//! All nodes sit at cell centers, so the radial coordinate of every node is
//! strictly positive: quotients like `omega / r^2` are always well defined on
//! samples and the coordinate singularity of the radial unit vector never
//! enters any stored value. Storage is dense row-major with `z` fastest.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Spatial dimension `d >= 3` of the ambient axisymmetric flow.
///
/// `d = 4` is the featured case: it is the default everywhere and the only
/// value exercised by the acceptance suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dimension(u32);

impl Dimension {
    pub const D3: Dimension = Dimension(3);
    pub const D4: Dimension = Dimension(4);

    pub fn new(d: u32) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidArgument(format!(
                "dimension must be >= 3, got {d}"
            )));
        }
        Ok(Dimension(d))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    /// Exponent of the radial measure weight `r^(d-2)`.
    #[inline]
    pub fn weight_exponent(self) -> i32 {
        self.0 as i32 - 2
    }
}

impl Default for Dimension {
    fn default() -> Self {
        Dimension::D4
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The measure weight `r^(d-2)` of `d mu = r^(d-2) dr dz`.
#[inline]
pub fn measure_weight<T: Real>(r: T, d: Dimension) -> T {
    r.powi(d.weight_exponent())
}

/// Uniform cell-centered grid over `(0, r_max] x [z_min, z_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylGrid<T = f64> {
    r_max: T,
    z_min: T,
    z_max: T,
    nr: usize,
    nz: usize,
}

impl<T: Real> CylGrid<T> {
    /// Builds a uniform grid with `nr x nz` cells. Nodes are cell centers,
    /// so every node has `r > 0`.
    pub fn new(r_max: T, z_min: T, z_max: T, nr: usize, nz: usize) -> Result<Self> {
        if !(r_max.is_finite() && z_min.is_finite() && z_max.is_finite()) {
            return Err(Error::InvalidGrid("non-finite extent".into()));
        }
        if r_max <= T::zero() {
            return Err(Error::InvalidGrid(format!("r_max must be > 0, got {r_max}")));
        }
        if z_min >= z_max {
            return Err(Error::InvalidGrid(format!(
                "need z_min < z_max, got [{z_min}, {z_max}]"
            )));
        }
        if nr < 2 || nz < 2 {
            return Err(Error::InvalidGrid(format!(
                "need nr >= 2 and nz >= 2, got {nr} x {nz}"
            )));
        }
        Ok(CylGrid { r_max, z_min, z_max, nr, nz })
    }

    #[inline]
    pub fn r_max(&self) -> T {
        self.r_max
    }
    #[inline]
    pub fn z_min(&self) -> T {
        self.z_min
    }
    #[inline]
    pub fn z_max(&self) -> T {
        self.z_max
    }
    #[inline]
    pub fn nr(&self) -> usize {
        self.nr
    }
    #[inline]
    pub fn nz(&self) -> usize {
        self.nz
    }

    /// Radial cell size.
    #[inline]
    pub fn hr(&self) -> T {
        self.r_max / lit::<T>(self.nr as f64)
    }

    /// Vertical cell size.
    #[inline]
    pub fn hz(&self) -> T {
        (self.z_max - self.z_min) / lit::<T>(self.nz as f64)
    }

    /// Radial coordinate of column `i` (cell center).
    #[inline]
    pub fn r_center(&self, i: usize) -> T {
        (lit::<T>(i as f64) + lit::<T>(0.5)) * self.hr()
    }

    /// Vertical coordinate of row `j` (cell center).
    #[inline]
    pub fn z_center(&self, j: usize) -> T {
        self.z_min + (lit::<T>(j as f64) + lit::<T>(0.5)) * self.hz()
    }

    /// Total node count `nr * nz`.
    #[inline]
    pub fn len(&self) -> usize {
        self.nr * self.nz
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false // nr, nz >= 2 by construction
    }

    /// Flat index of node `(i, j)`; `z` is the fastest-varying direction.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.nz + j
    }

    /// Whether `(r, z)` lies inside the grid's bounding box `[0, r_max] x [z_min, z_max]`.
    #[inline]
    pub fn contains(&self, r: T, z: T) -> bool {
        r >= T::zero() && r <= self.r_max && z >= self.z_min && z <= self.z_max
    }

    /// Index of the cell containing `(r, z)`, clamped to the grid.
    pub fn cell_of(&self, r: T, z: T) -> (usize, usize) {
        let i = (r / self.hr()).floor().to_usize().unwrap_or(0).min(self.nr - 1);
        let j = ((z - self.z_min) / self.hz())
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(self.nz - 1);
        (i, j)
    }
}

/// Builds a uniform cell-centered grid; thin functional alias for [`CylGrid::new`].
pub fn make_uniform_grid<T: Real>(
    r_max: T,
    z_min: T,
    z_max: T,
    nr: usize,
    nz: usize,
) -> Result<CylGrid<T>> {
    CylGrid::new(r_max, z_min, z_max, nr, nz)
}

/// Scalar samples (one per node) on a [`CylGrid`], e.g. the vorticity
/// `omega(r_i, z_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<T = f64> {
    pub grid: CylGrid<T>,
    data: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    /// Wraps existing samples; the vector length must be `nr * nz` and all
    /// entries finite.
    pub fn new(grid: CylGrid<T>, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Inconsistent(format!(
                "field has {} samples for a {} x {} grid",
                data.len(),
                grid.nr(),
                grid.nz()
            )));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Inconsistent(format!(
                "non-finite sample at flat index {k}"
            )));
        }
        Ok(ScalarField { grid, data })
    }

    /// Samples `f(r, z)` at every node.
    pub fn from_fn(grid: CylGrid<T>, f: impl Fn(T, T) -> T) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for i in 0..grid.nr() {
            let r = grid.r_center(i);
            for j in 0..grid.nz() {
                data.push(f(r, grid.z_center(j)));
            }
        }
        ScalarField { grid, data }
    }

    pub fn zeros(grid: CylGrid<T>) -> Self {
        ScalarField { grid, data: vec![T::zero(); grid.len()] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = self.grid.idx(i, j);
        self.data[k] = v;
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }
}

/// Sampled axisymmetric swirl-free velocity `u = u_r e_r + u_z e_z`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldRZ<T = f64> {
    pub grid: CylGrid<T>,
    ur: Vec<T>,
    uz: Vec<T>,
}

impl<T: Real> VectorFieldRZ<T> {
    pub fn new(grid: CylGrid<T>, ur: Vec<T>, uz: Vec<T>) -> Result<Self> {
        if ur.len() != grid.len() || uz.len() != grid.len() {
            return Err(Error::Inconsistent(format!(
                "component lengths {} / {} for a {} x {} grid",
                ur.len(),
                uz.len(),
                grid.nr(),
                grid.nz()
            )));
        }
        if ur.iter().chain(uz.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Inconsistent("non-finite velocity sample".into()));
        }
        Ok(VectorFieldRZ { grid, ur, uz })
    }

    /// Samples `(u_r, u_z) = f(r, z)` at every node.
    pub fn from_fn(grid: CylGrid<T>, f: impl Fn(T, T) -> (T, T)) -> Self {
        let mut ur = Vec::with_capacity(grid.len());
        let mut uz = Vec::with_capacity(grid.len());
        for i in 0..grid.nr() {
            let r = grid.r_center(i);
            for j in 0..grid.nz() {
                let (a, b) = f(r, grid.z_center(j));
                ur.push(a);
                uz.push(b);
            }
        }
        VectorFieldRZ { grid, ur, uz }
    }

    #[inline]
    pub fn ur(&self, i: usize, j: usize) -> T {
        self.ur[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn uz(&self, i: usize, j: usize) -> T {
        self.uz[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn ur_values(&self) -> &[T] {
        &self.ur
    }

    #[inline]
    pub fn uz_values(&self) -> &[T] {
        &self.uz
    }
}
