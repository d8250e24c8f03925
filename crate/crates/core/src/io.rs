//! CSV files: point matrices, feature tables and shift tables.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! value read back is bit-identical to the one written. Missing values are
//! empty fields.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::ela::{feature_index, FeatureStatus, FeatureValue, FeatureVector, FEATURE_NAMES};
use crate::error::{Error, Result};
use crate::shift::ShiftRecord;

pub const FEATURE_HEADER: [&str; 9] = [
    "function_id",
    "instance_id",
    "design_id",
    "sample_size",
    "reduced_dim",
    "embedding_id",
    "feature_name",
    "value",
    "status",
];

pub const SHIFT_HEADER: [&str; 10] = [
    "function_id",
    "instance_id",
    "design_id",
    "sample_size",
    "reduced_dim",
    "embedding_id",
    "feature_name",
    "reference_value",
    "projected_value",
    "delta",
];

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

pub fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn parse_num<T: std::str::FromStr>(path: &Path, line: usize, col: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(path, format!("line {line}: bad {col} `{s}`")))
}

fn parse_opt<T: std::str::FromStr>(path: &Path, line: usize, col: &str, s: &str) -> Result<Option<T>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse_num(path, line, col, s).map(Some)
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::parse(path, format!("{other:?}")),
    }
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(file))
}

fn check_header(path: &Path, rdr: &mut csv::Reader<fs::File>, expected: &[&str]) -> Result<()> {
    let got = rdr.headers().map_err(|e| csv_err(path, e))?;
    if got.iter().ne(expected.iter().copied()) {
        return Err(Error::parse(
            path,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                got.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(())
}

/// Writes `bytes` to a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Numeric matrix with a header row `{prefix}1, {prefix}2, ...`.
pub fn matrix_to_csv(m: &DMatrix<f64>, prefix: &str) -> String {
    let mut out = (1..=m.ncols())
        .map(|j| format!("{prefix}{j}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for row in m.row_iter() {
        out.push_str(&row.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>, prefix: &str) -> Result<()> {
    fs::write(path, matrix_to_csv(m, prefix)).map_err(|e| Error::io(path, e))
}

/// Reads a headed numeric CSV into a matrix. Every row must have the same width.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let mut rdr = reader(path)?;
    let width = rdr.headers().map_err(|e| csv_err(path, e))?.len();
    let mut data = Vec::new();
    let mut rows = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        if rec.len() != width {
            return Err(Error::parse(path, format!("line {}: expected {width} fields", i + 2)));
        }
        for (j, field) in rec.iter().enumerate() {
            data.push(parse_num::<f64>(path, i + 2, &format!("column {}", j + 1), field)?);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::parse(path, "no data rows"));
    }
    Ok(DMatrix::from_row_slice(rows, width, &data))
}

/// Reads a single-column headed CSV.
pub fn read_column(path: &Path) -> Result<Vec<f64>> {
    let m = read_matrix(path)?;
    if m.ncols() != 1 {
        return Err(Error::parse(path, format!("expected one column, found {}", m.ncols())));
    }
    Ok(m.iter().copied().collect())
}

/// One line of `features.csv`. Reference rows have no reduced dim or embedding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureRow {
    pub function_id: u32,
    pub instance_id: u32,
    pub design_id: u32,
    pub sample_size: usize,
    pub reduced_dim: Option<usize>,
    pub embedding_id: Option<u32>,
    /// Index into [`FEATURE_NAMES`].
    pub feature: usize,
    pub value: FeatureValue,
}

impl FeatureRow {
    /// Canonical ordering key: coordinates, then reference before projected,
    /// then feature schema order.
    pub fn sort_key(&self) -> (u32, u32, u32, usize, Option<usize>, Option<u32>, usize) {
        (
            self.function_id,
            self.instance_id,
            self.design_id,
            self.sample_size,
            self.reduced_dim,
            self.embedding_id,
            self.feature,
        )
    }

    fn fields(&self) -> [String; 9] {
        [
            self.function_id.to_string(),
            self.instance_id.to_string(),
            self.design_id.to_string(),
            self.sample_size.to_string(),
            fmt_opt(self.reduced_dim),
            fmt_opt(self.embedding_id),
            FEATURE_NAMES[self.feature].to_string(),
            fmt_f64(self.value.value),
            self.value.status.as_str().to_string(),
        ]
    }
}

/// Expands a feature vector into its 61 rows.
pub fn feature_rows(
    function_id: u32,
    instance_id: u32,
    design_id: u32,
    sample_size: usize,
    projection: Option<(usize, u32)>,
    features: &FeatureVector,
) -> Vec<FeatureRow> {
    features
        .entries()
        .iter()
        .enumerate()
        .map(|(q, v)| FeatureRow {
            function_id,
            instance_id,
            design_id,
            sample_size,
            reduced_dim: projection.map(|p| p.0),
            embedding_id: projection.map(|p| p.1),
            feature: q,
            value: *v,
        })
        .collect()
}

pub fn feature_rows_to_csv(rows: &[FeatureRow]) -> String {
    let mut out = FEATURE_HEADER.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.fields().join(","));
        out.push('\n');
    }
    out
}

pub fn read_feature_rows(path: &Path) -> Result<Vec<FeatureRow>> {
    let mut rdr = reader(path)?;
    check_header(path, &mut rdr, &FEATURE_HEADER)?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = i + 2;
        let name = &rec[6];
        let feature =
            feature_index(name).ok_or_else(|| Error::parse(path, format!("line {line}: unknown feature `{name}`")))?;
        let status = FeatureStatus::parse(&rec[8])
            .ok_or_else(|| Error::parse(path, format!("line {line}: unknown status `{}`", &rec[8])))?;
        let value = parse_opt::<f64>(path, line, "value", &rec[7])?.unwrap_or(f64::NAN);
        rows.push(FeatureRow {
            function_id: parse_num(path, line, "function_id", &rec[0])?,
            instance_id: parse_num(path, line, "instance_id", &rec[1])?,
            design_id: parse_num(path, line, "design_id", &rec[2])?,
            sample_size: parse_num(path, line, "sample_size", &rec[3])?,
            reduced_dim: parse_opt(path, line, "reduced_dim", &rec[4])?,
            embedding_id: parse_opt(path, line, "embedding_id", &rec[5])?,
            feature,
            value: FeatureValue { value, status },
        });
    }
    Ok(rows)
}

/// Feature name, value and status for a single vector.
pub fn feature_vector_to_csv(features: &FeatureVector) -> String {
    let mut out = String::from("feature_name,value,status\n");
    for (name, v) in features.iter() {
        out.push_str(&format!("{name},{},{}\n", fmt_f64(v.value), v.status));
    }
    out
}

pub fn shifts_to_csv(records: &[ShiftRecord]) -> String {
    let mut out = SHIFT_HEADER.join(",");
    out.push('\n');
    for r in records {
        let fields = [
            r.function_id.to_string(),
            r.instance_id.to_string(),
            r.design_id.to_string(),
            r.sample_size.to_string(),
            r.reduced_dim.to_string(),
            r.embedding_id.to_string(),
            r.feature_name().to_string(),
            fmt_opt(r.reference_value),
            fmt_opt(r.projected_value),
            fmt_opt(r.delta),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn read_shifts(path: &Path) -> Result<Vec<ShiftRecord>> {
    let mut rdr = reader(path)?;
    check_header(path, &mut rdr, &SHIFT_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = i + 2;
        let name = &rec[6];
        let feature =
            feature_index(name).ok_or_else(|| Error::parse(path, format!("line {line}: unknown feature `{name}`")))?;
        out.push(ShiftRecord {
            function_id: parse_num(path, line, "function_id", &rec[0])?,
            instance_id: parse_num(path, line, "instance_id", &rec[1])?,
            design_id: parse_num(path, line, "design_id", &rec[2])?,
            sample_size: parse_num(path, line, "sample_size", &rec[3])?,
            reduced_dim: parse_num(path, line, "reduced_dim", &rec[4])?,
            embedding_id: parse_num(path, line, "embedding_id", &rec[5])?,
            feature,
            reference_value: parse_opt(path, line, "reference_value", &rec[7])?,
            projected_value: parse_opt(path, line, "projected_value", &rec[8])?,
            delta: parse_opt(path, line, "delta", &rec[9])?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_text() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, f64::INFINITY] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(fmt_f64(f64::NAN), "");
    }

    #[test]
    fn matrix_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let m = DMatrix::from_row_slice(2, 3, &[0.1, -0.2, 3.0, 1e-17, 5.5, -4.999]);
        write_matrix(&p, &m, "x").unwrap();
        assert_eq!(read_matrix(&p).unwrap(), m);
        assert!(read_column(&p).is_err());
    }

    #[test]
    fn shift_table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let recs = vec![ShiftRecord {
            function_id: 3,
            instance_id: 1,
            design_id: 2,
            sample_size: 200,
            reduced_dim: 5,
            embedding_id: 4,
            feature: 17,
            reference_value: Some(0.3),
            projected_value: None,
            delta: None,
        }];
        fs::write(&p, shifts_to_csv(&recs)).unwrap();
        assert_eq!(read_shifts(&p).unwrap(), recs);
    }

    #[test]
    fn bad_header_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        fs::write(&p, "a,b\n1,2\n").unwrap();
        assert!(matches!(read_shifts(&p), Err(Error::Parse { .. })));
        assert!(matches!(
            read_shifts(&dir.path().join("nope.csv")),
            Err(Error::Io { .. })
        ));
    }
}
