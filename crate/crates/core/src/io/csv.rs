use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{CurvatureField, Grid, Profile, DEFAULT_MAX_SPACING_RATIO};

pub const PROFILE_HEADER: [&str; 3] = ["x", "phi", "psi"];
pub const CURVATURE_HEADER: [&str; 9] = ["x", "s", "psi_s", "psi_ss", "K0", "K1", "R", "H", "V"];

/// Scientific notation with 17 significant digits, which round-trips every
/// finite `f64`. Non-finite values print as `inf`, `-inf` or `NaN`.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Writes a header and rows of numbers as CSV.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().map(fmt_num))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_profile_csv<W: Write>(out: W, profile: &Profile) -> Result<()> {
    let x = profile.grid().nodes();
    write_table(
        out,
        &PROFILE_HEADER,
        (0..profile.len()).map(|i| vec![x[i], profile.phi()[i], profile.psi()[i]]),
    )
}

pub fn write_curvature_csv<W: Write>(out: W, field: &CurvatureField) -> Result<()> {
    write_table(
        out,
        &CURVATURE_HEADER,
        (0..field.len()).map(|i| {
            vec![
                field.x[i],
                field.s[i],
                field.psi_s[i],
                field.psi_ss[i],
                field.k0[i],
                field.k1[i],
                field.r[i],
                field.h[i],
                field.v[i],
            ]
        }),
    )
}

/// Reads an `x,phi,psi` CSV. Rows are numbered from 1 after the header.
pub fn load_profile_csv(path: &Path, n: usize) -> Result<Profile> {
    let file = std::fs::File::open(path).map_err(|e| ingest(path, 0, e.to_string()))?;
    read_profile_csv(file, path, n)
}

fn ingest(path: &Path, row: usize, message: impl Into<String>) -> Error {
    Error::Ingestion {
        path: path.to_path_buf(),
        row,
        message: message.into(),
    }
}

pub(crate) fn read_profile_csv<R: std::io::Read>(input: R, path: &Path, n: usize) -> Result<Profile> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = reader.headers().map_err(|e| ingest(path, 0, e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != PROFILE_HEADER {
        return Err(ingest(
            path,
            0,
            format!(
                "expected header `x,phi,psi`, got `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let (mut xs, mut phis, mut psis) = (Vec::new(), Vec::new(), Vec::new());
    for (k, record) in reader.records().enumerate() {
        let row = k + 1;
        let record = record.map_err(|e| ingest(path, row, e.to_string()))?;
        let val = |j: usize| -> Result<f64> {
            let v: f64 = record[j]
                .parse()
                .map_err(|_| ingest(path, row, format!("`{}` is not a number", &record[j])))?;
            if !v.is_finite() {
                return Err(ingest(path, row, format!("non-finite {}", PROFILE_HEADER[j])));
            }
            Ok(v)
        };
        let (x, phi, psi) = (val(0)?, val(1)?, val(2)?);
        if row == 1 && x != 0.0 {
            return Err(ingest(path, row, format!("first node must be x = 0, got {x}")));
        }
        if let Some(&prev) = xs.last() {
            if x <= prev {
                return Err(ingest(
                    path,
                    row,
                    format!("x not strictly increasing ({x} after {prev})"),
                ));
            }
        }
        if phi <= 0.0 {
            return Err(ingest(path, row, format!("phi must be positive, got {phi}")));
        }
        if row == 1 && psi != 0.0 {
            return Err(ingest(path, row, format!("psi(0) must be 0, got {psi}")));
        }
        if row > 1 && psi <= 0.0 {
            return Err(ingest(
                path,
                row,
                format!("psi must be positive away from the origin, got {psi}"),
            ));
        }
        xs.push(x);
        phis.push(phi);
        psis.push(psi);
    }
    let grid = Grid::with_spacing_bound(xs, DEFAULT_MAX_SPACING_RATIO).map_err(|e| ingest(path, 0, e.to_string()))?;
    Profile::new(grid, phis, psis, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_grid;

    fn read(text: &str) -> Result<Profile> {
        read_profile_csv(text.as_bytes(), Path::new("mem.csv"), 2)
    }

    fn row_of(err: Error) -> usize {
        match err {
            Error::Ingestion { row, .. } => row,
            other => panic!("{other}"),
        }
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let grid = build_grid(6.0, 64, 1.3).unwrap();
        let p = Profile::from_fn(grid, 2, |x| 1.0 + 0.1 * x.cos(), |x| x.sinh() / 3.0).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &p).unwrap();
        let q = read_profile_csv(buf.as_slice(), Path::new("mem.csv"), 2).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn ingestion_errors_carry_rows() {
        let good_tail: String = (1..=9).map(|i| format!("{i},1,{i}\n")).collect();
        let base = format!("x,phi,psi\n0,1,0\n{good_tail}");
        assert!(read(&base).is_ok());
        assert_eq!(
            row_of(read(&format!("x,phi,psi\n0,1,0.1\n{good_tail}")).unwrap_err()),
            1
        );
        assert_eq!(row_of(read("x,phi,psi\n0,1,0\n2,1,2\n1,1,1\n").unwrap_err()), 3);
        assert_eq!(row_of(read(&base.replace("4,1,4", "4,0,4")).unwrap_err()), 5);
        assert_eq!(row_of(read(&base.replace("4,1,4", "4,1,abc")).unwrap_err()), 5);
        assert_eq!(row_of(read("x,psi,phi\n").unwrap_err()), 0);
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }
}
