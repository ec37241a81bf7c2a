//! The three table-shaped commands: `kernel`, `norms`, `reconstruct`,
//! plus the helpers they share (grid inference from a field CSV, atomic
//! file output, 17-significant-digit float formatting).

use anyhow::{bail, Context, Result};
use axisym_euler::{
    h_closed, h_quad, h_upper_bound, lorentz_quasinorm, read_scalar_field, read_targets,
    velocity_from_vorticity, write_velocities, CylGrid, Dimension, KernelParams,
    LorentzExponents, ReconstructionJob, WeightedSamples,
};
use clap::Args;
use std::path::{Path, PathBuf};

use crate::Outcome;

/// Decimal formatting that round-trips every finite `f64` bit-exactly
/// (17 significant digits).
pub fn fmt16(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `bytes` to `path` atomically: a hidden temp sibling is written
/// first and renamed into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .map(str::to_owned)
        .unwrap_or_else(|| "out".into());
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let result = std::fs::write(&tmp, bytes)
        .and_then(|()| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing {}", path.display()))
}

/// Prints to stdout, or writes atomically when `--out` was given.
fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => write_atomic(path, content.as_bytes()),
    }
}

/// Recovers the uniform cell-centered grid behind a field CSV from its
/// `r`/`z` columns. The reader that follows re-validates every row against
/// the inferred grid, so a forged or non-uniform file cannot slip through.
pub fn infer_grid(path: &Path) -> Result<CylGrid<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    {
        let headers = reader.headers()?;
        if headers.len() < 2 || &headers[0] != "r" || &headers[1] != "z" {
            bail!(
                "{}: expected a header starting with r,z, found {:?}",
                path.display(),
                headers
            );
        }
    }
    let mut rs: Vec<f64> = Vec::new();
    let mut zs: Vec<f64> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let line = idx + 2;
        let coord = |col: usize, name: &str| -> Result<f64> {
            let field = record
                .get(col)
                .with_context(|| format!("{}: line {line}: missing {name}", path.display()))?;
            let v: f64 = field
                .parse()
                .with_context(|| format!("{}: line {line}: bad {name} {field:?}", path.display()))?;
            if !v.is_finite() {
                bail!("{}: line {line}: non-finite {name}", path.display());
            }
            Ok(v)
        };
        rs.push(coord(0, "r")?);
        zs.push(coord(1, "z")?);
    }
    rs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    rs.dedup();
    zs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    zs.dedup();
    if rs.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    if zs.len() < 2 {
        bail!(
            "{}: at least two distinct z rows are needed to infer the cell height",
            path.display()
        );
    }

    // Cell centers of a uniform grid sit at odd multiples of half the
    // spacing, so the first r-center fixes hr and the z-center gaps fix hz.
    let hr = 2.0 * rs[0];
    if hr <= 0.0 {
        bail!("{}: r coordinates must be positive cell centers", path.display());
    }
    let hz = zs[1] - zs[0];
    for (axis, centers, h) in [("r", &rs, hr), ("z", &zs, hz)] {
        for pair in centers.windows(2) {
            if ((pair[1] - pair[0]) - h).abs() > 1e-9 * h {
                bail!(
                    "{}: {axis} centers are not uniformly spaced (found gaps {} and {h})",
                    path.display(),
                    pair[1] - pair[0]
                );
            }
        }
    }
    let r_max = rs[rs.len() - 1] + rs[0];
    let z_min = zs[0] - 0.5 * hz;
    let z_max = zs[zs.len() - 1] + 0.5 * hz;
    Ok(CylGrid::new(r_max, z_min, z_max, rs.len(), zs.len())?)
}

#[derive(Args)]
pub struct KernelArgs {
    /// Emit the CSV table (the default and only output mode; accepted for
    /// symmetry with scripts that spell it out)
    #[arg(long)]
    pub table: bool,
    /// Smallest tabulated s (0 <= s < 1)
    #[arg(long, default_value_t = 0.0)]
    pub s_min: f64,
    /// Largest tabulated s (s_min <= s < 1)
    #[arg(long, default_value_t = 0.9)]
    pub s_max: f64,
    /// Number of rows, spaced evenly over [s_min, s_max]
    #[arg(long, default_value_t = 10)]
    pub s_count: usize,
    /// Gauss-Legendre panel order for the quadrature column
    #[arg(long, default_value_t = 64)]
    pub order: usize,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_kernel(args: &KernelArgs) -> Result<Outcome> {
    let _ = args.table; // the table is the only mode
    if !(0.0..1.0).contains(&args.s_min) || !(0.0..1.0).contains(&args.s_max) {
        bail!("s-min and s-max must lie in [0, 1), got {} and {}", args.s_min, args.s_max);
    }
    if args.s_min > args.s_max {
        bail!("s-min {} exceeds s-max {}", args.s_min, args.s_max);
    }
    if args.s_count < 1 {
        bail!("s-count must be at least 1");
    }
    let mut table = String::from("s,H_closed,H_quad,upper_bound\n");
    for i in 0..args.s_count {
        let s = if args.s_count == 1 {
            args.s_min
        } else {
            args.s_min + (args.s_max - args.s_min) * i as f64 / (args.s_count - 1) as f64
        };
        let closed = h_closed(s)?;
        let quad = h_quad(s, args.order)?;
        let bound = h_upper_bound(s)?;
        table.push_str(&format!(
            "{},{},{},{}\n",
            fmt16(s),
            fmt16(closed),
            fmt16(quad),
            fmt16(bound)
        ));
    }
    emit(args.out.as_deref(), &table)?;
    Ok(Outcome::Success)
}

#[derive(Args)]
pub struct NormsArgs {
    /// Primary exponent p >= 1
    #[arg(long)]
    pub p: String,
    /// Secondary exponent q >= 1, or "inf" for the weak norm
    #[arg(long)]
    pub q: String,
    /// Ambient dimension d >= 3 of the measure weight r^(d-2)
    #[arg(long)]
    pub weight_dim: u32,
    /// Scalar-field CSV (header r,z,value)
    pub field: PathBuf,
}

pub fn cmd_norms(args: &NormsArgs) -> Result<Outcome> {
    let p: f64 = args.p.parse().with_context(|| format!("--p {:?} is not a number", args.p))?;
    let q: f64 = args.q.parse().with_context(|| format!("--q {:?} is not a number", args.q))?;
    let exponents = LorentzExponents::new(p, q)?;
    let d = Dimension::new(args.weight_dim)?;
    let grid = infer_grid(&args.field)?;
    let field = read_scalar_field(&args.field, &grid)?;
    let samples = WeightedSamples::from_field(&field, d);
    let value = lorentz_quasinorm(&samples, exponents);
    // Echo the exponents as given; print the value in shortest
    // round-trip form so `4` comes out as `4.0`, not `4.0000000000000000e0`.
    println!("{},{},{:?}", args.p, args.q, value);
    Ok(Outcome::Success)
}

#[derive(Args)]
pub struct ReconstructArgs {
    /// Ambient dimension d >= 3
    #[arg(long, default_value_t = 4)]
    pub dim: u32,
    /// Mollification length; 0 selects the exact kernel with
    /// diagonal-cell exclusion
    #[arg(long)]
    pub epsilon: f64,
    /// Gauss-Legendre panel order for dimensions without a closed form
    #[arg(long, default_value_t = 64)]
    pub tau_order: usize,
    /// Targets CSV (header r,z), or the literal "grid" for every cell center
    #[arg(long)]
    pub targets: String,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Vorticity CSV (header r,z,value)
    pub omega: PathBuf,
}

pub fn cmd_reconstruct(args: &ReconstructArgs) -> Result<Outcome> {
    let d = Dimension::new(args.dim)?;
    let params = KernelParams::new(d, args.tau_order, args.epsilon, f64::INFINITY, f64::INFINITY)?;
    let grid = infer_grid(&args.omega)?;
    let omega = read_scalar_field(&args.omega, &grid)?;
    let targets: Vec<(f64, f64)> = if args.targets == "grid" {
        let mut centers = Vec::with_capacity(grid.nr() * grid.nz());
        for i in 0..grid.nr() {
            for j in 0..grid.nz() {
                centers.push((grid.r_center(i), grid.z_center(j)));
            }
        }
        centers
    } else {
        read_targets(Path::new(&args.targets))?
    };
    let job = ReconstructionJob::new(&omega, &targets, params);
    let velocities = velocity_from_vorticity(&job)?;
    match &args.out {
        Some(path) => write_velocities(path, &targets, &velocities)?,
        None => {
            let mut out = String::from("r,z,ur,uz\n");
            for (&(r, z), &(ur, uz)) in targets.iter().zip(&velocities) {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt16(r),
                    fmt16(z),
                    fmt16(ur),
                    fmt16(uz)
                ));
            }
            print!("{out}");
        }
    }
    Ok(Outcome::Success)
}
