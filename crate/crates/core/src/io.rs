//! CSV import and export.
//!
//! All writers are atomic: output lands in a temporary sibling file that is
//! renamed over the destination only after a complete, flushed write, so a
//! crash never leaves a truncated file behind. Floats are written with
//! seventeen significant digits (`{:.16e}`), which round-trips every `f64`
//! bit pattern exactly.

use crate::error::{Error, Result};
use crate::grid::{CylGrid, ScalarField};
use crate::simulator::{DiagnosticsRecord, ParticleSet};
use std::fs;
use std::path::{Path, PathBuf};

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Maps a csv-crate error to ours, keeping the 1-based line number when the
/// reader knows it.
fn from_csv(err: csv::Error) -> Error {
    let line = err
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or_default();
    match err.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Csv { line, msg: format!("{other:?}") },
    }
}

fn record_line(record: &csv::StringRecord) -> usize {
    record.position().map(|p| p.line() as usize).unwrap_or_default()
}

fn parse_field(record: &csv::StringRecord, idx: usize, what: &str) -> Result<f64> {
    let line = record_line(record);
    let raw = record
        .get(idx)
        .ok_or_else(|| Error::Csv { line, msg: format!("missing `{what}` field") })?;
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::Csv { line, msg: format!("`{}` is not a number for `{what}`", raw.trim()) })?;
    if !v.is_finite() {
        return Err(Error::Csv { line, msg: format!("`{what}` must be finite, got {v}") });
    }
    Ok(v)
}

fn open_reader(path: &Path, expected_header: &[&str]) -> Result<csv::Reader<fs::File>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(from_csv)?;
    let headers = rdr.headers().map_err(from_csv)?;
    let got: Vec<&str> = headers.iter().collect();
    if got != expected_header {
        return Err(Error::Csv {
            line: 1,
            msg: format!("expected header {expected_header:?}, found {got:?}"),
        });
    }
    Ok(rdr)
}

fn tmp_sibling(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("out.csv");
    path.with_file_name(format!(".{name}.{}.tmp", std::process::id()))
}

/// Writes rows through a fresh CSV writer, then renames the finished file
/// into place.
fn atomic_csv<F>(path: &Path, build: F) -> Result<()>
where
    F: FnOnce(&mut csv::Writer<fs::File>) -> Result<()>,
{
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let tmp = tmp_sibling(path);
    let outcome = (|| {
        let mut wtr = csv::Writer::from_writer(fs::File::create(&tmp)?);
        build(&mut wtr)?;
        wtr.flush()?;
        Ok(())
    })();
    match outcome {
        Ok(()) => {
            fs::rename(&tmp, path)?;
            Ok(())
        }
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

fn put(wtr: &mut csv::Writer<fs::File>, fields: &[String]) -> Result<()> {
    wtr.write_record(fields).map_err(from_csv)
}

/// Writes a scalar field as `r,z,value` rows, one per cell, row-major.
pub fn write_scalar_field(path: &Path, field: &ScalarField<f64>) -> Result<()> {
    atomic_csv(path, |wtr| {
        put(wtr, &["r".into(), "z".into(), "value".into()])?;
        let grid = field.grid;
        for i in 0..grid.nr() {
            for j in 0..grid.nz() {
                put(wtr, &[fmt(grid.r_center(i)), fmt(grid.z_center(j)), fmt(field.get(i, j))])?;
            }
        }
        Ok(())
    })
}

/// Reads `r,z,value` rows back onto `grid`. Every grid cell must be covered
/// exactly once; rows may come in any order, and each row's point must fall
/// inside the cell it fills.
pub fn read_scalar_field(path: &Path, grid: &CylGrid<f64>) -> Result<ScalarField<f64>> {
    let mut rdr = open_reader(path, &["r", "z", "value"])?;
    let mut values = vec![0.0f64; grid.len()];
    let mut seen = vec![false; grid.len()];
    for record in rdr.records() {
        let record = record.map_err(from_csv)?;
        let line = record_line(&record);
        let r = parse_field(&record, 0, "r")?;
        let z = parse_field(&record, 1, "z")?;
        let v = parse_field(&record, 2, "value")?;
        if !grid.contains(r, z) {
            return Err(Error::Csv {
                line,
                msg: format!("point ({r}, {z}) lies outside the grid"),
            });
        }
        let (i, j) = grid.cell_of(r, z);
        let idx = grid.idx(i, j);
        if seen[idx] {
            return Err(Error::Csv {
                line,
                msg: format!("cell ({i}, {j}) is filled twice"),
            });
        }
        seen[idx] = true;
        values[idx] = v;
    }
    if let Some(idx) = seen.iter().position(|&s| !s) {
        let missing = seen.iter().filter(|&&s| !s).count();
        return Err(Error::Inconsistent(format!(
            "{missing} of {} grid cells have no row (first missing flat index {idx})",
            grid.len()
        )));
    }
    ScalarField::new(*grid, values)
}

/// Reads probe points from `r,z` rows.
pub fn read_targets(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut rdr = open_reader(path, &["r", "z"])?;
    let mut targets = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(from_csv)?;
        let r = parse_field(&record, 0, "r")?;
        let z = parse_field(&record, 1, "z")?;
        targets.push((r, z));
    }
    Ok(targets)
}

/// Writes probe points and their velocities as `r,z,ur,uz` rows.
pub fn write_velocities(
    path: &Path,
    targets: &[(f64, f64)],
    velocities: &[(f64, f64)],
) -> Result<()> {
    if targets.len() != velocities.len() {
        return Err(Error::Inconsistent(format!(
            "{} targets but {} velocities",
            targets.len(),
            velocities.len()
        )));
    }
    atomic_csv(path, |wtr| {
        put(wtr, &["r".into(), "z".into(), "ur".into(), "uz".into()])?;
        for (&(r, z), &(ur, uz)) in targets.iter().zip(velocities) {
            put(wtr, &[fmt(r), fmt(z), fmt(ur), fmt(uz)])?;
        }
        Ok(())
    })
}

const DIAGNOSTICS_HEADER: [&str; 7] =
    ["t", "omega_sup", "l21", "ur_over_r_sup", "envelope", "kinetic", "axis_reflections"];

/// Writes the simulation diagnostics table.
pub fn write_diagnostics(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    atomic_csv(path, |wtr| {
        put(wtr, &DIAGNOSTICS_HEADER.map(String::from))?;
        for rec in records {
            put(
                wtr,
                &[
                    fmt(rec.t),
                    fmt(rec.omega_sup),
                    fmt(rec.l21),
                    fmt(rec.ur_over_r_sup),
                    fmt(rec.envelope),
                    fmt(rec.kinetic),
                    rec.axis_reflections.to_string(),
                ],
            )?;
        }
        Ok(())
    })
}

/// Reads a diagnostics table written by [`write_diagnostics`].
pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let mut rdr = open_reader(path, &DIAGNOSTICS_HEADER)?;
    let mut records = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(from_csv)?;
        let line = record_line(&record);
        let reflections_raw = record
            .get(6)
            .ok_or_else(|| Error::Csv { line, msg: "missing `axis_reflections` field".into() })?;
        let axis_reflections: usize = reflections_raw.trim().parse().map_err(|_| Error::Csv {
            line,
            msg: format!("`{}` is not a count", reflections_raw.trim()),
        })?;
        records.push(DiagnosticsRecord {
            t: parse_field(&record, 0, "t")?,
            omega_sup: parse_field(&record, 1, "omega_sup")?,
            l21: parse_field(&record, 2, "l21")?,
            ur_over_r_sup: parse_field(&record, 3, "ur_over_r_sup")?,
            envelope: parse_field(&record, 4, "envelope")?,
            kinetic: parse_field(&record, 5, "kinetic")?,
            axis_reflections,
        });
    }
    Ok(records)
}

/// Writes the particle state as `r,z,eta,volume` rows.
pub fn write_particles(path: &Path, set: &ParticleSet) -> Result<()> {
    atomic_csv(path, |wtr| {
        put(wtr, &["r".into(), "z".into(), "eta".into(), "volume".into()])?;
        for k in 0..set.len() {
            put(
                wtr,
                &[fmt(set.r()[k]), fmt(set.z()[k]), fmt(set.eta()[k]), fmt(set.volume()[k])],
            )?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::gaussian_test_vorticity;
    use crate::grid::Dimension;
    use crate::simulator::init_from_vorticity;
    use std::io::Write as _;

    fn small_grid() -> CylGrid<f64> {
        CylGrid::new(2.0, -1.0, 1.0, 6, 8).unwrap()
    }

    #[test]
    fn scalar_fields_round_trip_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.csv");
        let field = gaussian_test_vorticity(&small_grid());
        write_scalar_field(&path, &field).unwrap();
        let back = read_scalar_field(&path, &field.grid).unwrap();
        for (a, b) in back.values().iter().zip(field.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(!dir.path().join(tmp_sibling(&path)).exists());
    }

    #[test]
    fn scalar_rows_may_arrive_in_any_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.csv");
        let grid = CylGrid::new(1.0, 0.0, 1.0, 2, 2).unwrap();
        let mut f = fs::File::create(&path).unwrap();
        writeln!(f, "r,z,value").unwrap();
        writeln!(f, "0.75,0.75,4.0").unwrap();
        writeln!(f, "0.25,0.75,3.0").unwrap();
        writeln!(f, "0.75,0.25,2.0").unwrap();
        writeln!(f, "0.25,0.25,1.0").unwrap();
        drop(f);
        let field = read_scalar_field(&path, &grid).unwrap();
        assert_eq!(field.get(0, 0), 1.0);
        assert_eq!(field.get(0, 1), 3.0);
        assert_eq!(field.get(1, 0), 2.0);
        assert_eq!(field.get(1, 1), 4.0);
    }

    #[test]
    fn scalar_reader_rejects_malformed_tables() {
        let dir = tempfile::tempdir().unwrap();
        let grid = CylGrid::new(1.0, 0.0, 1.0, 2, 2).unwrap();
        let write = |name: &str, body: &str| -> PathBuf {
            let p = dir.path().join(name);
            fs::write(&p, body).unwrap();
            p
        };

        let bad_header = write("h.csv", "a,b,c\n0.25,0.25,1.0\n");
        match read_scalar_field(&bad_header, &grid) {
            Err(Error::Csv { line: 1, .. }) => {}
            other => panic!("expected header error, got {other:?}"),
        }

        let bad_number = write("n.csv", "r,z,value\n0.25,0.25,fast\n");
        match read_scalar_field(&bad_number, &grid) {
            Err(Error::Csv { line: 2, .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }

        let outside = write("o.csv", "r,z,value\n5.0,0.25,1.0\n");
        assert!(matches!(read_scalar_field(&outside, &grid), Err(Error::Csv { line: 2, .. })));

        let dup = write(
            "d.csv",
            "r,z,value\n0.25,0.25,1.0\n0.26,0.26,2.0\n",
        );
        assert!(matches!(read_scalar_field(&dup, &grid), Err(Error::Csv { line: 3, .. })));

        let missing = write("m.csv", "r,z,value\n0.25,0.25,1.0\n");
        assert!(matches!(read_scalar_field(&missing, &grid), Err(Error::Inconsistent(_))));

        let non_finite = write("f.csv", "r,z,value\n0.25,0.25,NaN\n");
        assert!(matches!(read_scalar_field(&non_finite, &grid), Err(Error::Csv { line: 2, .. })));

        assert!(matches!(
            read_scalar_field(&dir.path().join("absent.csv"), &grid),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn targets_and_velocities_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let tpath = dir.path().join("targets.csv");
        let targets = vec![(0.5, -0.25), (1.0, 0.75), (0.125, 0.0)];
        let velocities = vec![(0.1, -0.2), (0.0, 0.0), (1e-300, 3.0)];
        write_velocities(&dir.path().join("vel.csv"), &targets, &velocities).unwrap();
        assert!(write_velocities(&tpath, &targets, &velocities[..2]).is_err());

        let mut f = fs::File::create(&tpath).unwrap();
        writeln!(f, "r,z").unwrap();
        for (r, z) in &targets {
            writeln!(f, "{},{}", fmt(*r), fmt(*z)).unwrap();
        }
        drop(f);
        let back = read_targets(&tpath).unwrap();
        assert_eq!(back, targets);
    }

    #[test]
    fn diagnostics_round_trip_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("diag.csv");
        let records = vec![
            DiagnosticsRecord {
                t: 0.0,
                omega_sup: 1.0 / 3.0,
                l21: 0.123456789123456789,
                ur_over_r_sup: 2.5e-17,
                envelope: 1.0,
                kinetic: 9.87654321e101,
                axis_reflections: 0,
            },
            DiagnosticsRecord {
                t: 0.1,
                omega_sup: f64::MIN_POSITIVE,
                l21: 1.0,
                ur_over_r_sup: 0.0,
                envelope: 1.0000001,
                kinetic: 4.0,
                axis_reflections: 17,
            },
        ];
        write_diagnostics(&path, &records).unwrap();
        let back = read_diagnostics(&path).unwrap();
        assert_eq!(back.len(), records.len());
        for (a, b) in back.iter().zip(&records) {
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            assert_eq!(a.omega_sup.to_bits(), b.omega_sup.to_bits());
            assert_eq!(a.l21.to_bits(), b.l21.to_bits());
            assert_eq!(a.ur_over_r_sup.to_bits(), b.ur_over_r_sup.to_bits());
            assert_eq!(a.envelope.to_bits(), b.envelope.to_bits());
            assert_eq!(a.kinetic.to_bits(), b.kinetic.to_bits());
            assert_eq!(a.axis_reflections, b.axis_reflections);
        }
    }

    #[test]
    fn particle_export_has_the_documented_shape() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("particles.csv");
        let grid = small_grid();
        let omega = gaussian_test_vorticity(&grid);
        let set = init_from_vorticity(&omega, Dimension::D4).unwrap();
        write_particles(&path, &set).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("r,z,eta,volume"));
        assert_eq!(lines.count(), set.len());
    }

    #[test]
    fn writers_create_missing_directories() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a/b/diag.csv");
        write_diagnostics(&path, &[]).unwrap();
        assert!(path.exists());
        assert_eq!(read_diagnostics(&path).unwrap(), vec![]);
    }
}
