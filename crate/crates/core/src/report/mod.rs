//! Presentation tables built from `shifts.csv`: a function x feature heatmap
//! of median absolute shift, and per-feature shift distributions for one
//! function. Both round-trip through CSV and render to SVG.

mod svg;

use std::path::Path;

pub use svg::{heatmap_svg, violin_svg, ColorScale};

use crate::ela::{feature_index, FEATURE_NAMES, NUM_FEATURES};
use crate::error::{Error, Result};
use crate::io::{fmt_opt, read_shifts, write_atomic};
use crate::shift::{aggregate_heatmap, aggregate_violin, ShiftRecord};
use crate::suite::NUM_FUNCTIONS;

/// Median `|delta|` per function (rows) and feature (61 columns, schema
/// order) for one (sample size, reduced dim) slice.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatmapTable {
    pub sample_size: usize,
    pub reduced_dim: usize,
    pub function_ids: Vec<u32>,
    /// `values[row][feature]`; `None` where no delta was available.
    pub values: Vec<Vec<Option<f64>>>,
}

impl HeatmapTable {
    pub fn is_empty(&self) -> bool {
        self.function_ids.is_empty()
    }

    pub fn get(&self, function_id: u32, feature: &str) -> Option<f64> {
        let r = self.function_ids.iter().position(|&f| f == function_id)?;
        self.values[r][feature_index(feature)?]
    }

    /// Column of one feature across all function rows.
    pub fn column(&self, feature: usize) -> Vec<Option<f64>> {
        self.values.iter().map(|row| row[feature]).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("function_id,sample_size,reduced_dim");
        for n in FEATURE_NAMES {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (fid, row) in self.function_ids.iter().zip(&self.values) {
            out.push_str(&format!("{fid},{},{}", self.sample_size, self.reduced_dim));
            for v in row {
                out.push(',');
                out.push_str(&fmt_opt(*v));
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`HeatmapTable::to_csv`] output. A table without rows does
    /// not record its slice and cannot be read back.
    pub fn from_csv(text: &str) -> Result<Self> {
        let src = Path::new("<heatmap>");
        let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let header = rdr.headers().map_err(|e| Error::parse(src, e.to_string()))?.clone();
        if header.len() != 3 + NUM_FEATURES || header.iter().skip(3).ne(FEATURE_NAMES.iter().copied()) {
            return Err(Error::parse(src, "header is not a heatmap header"));
        }
        let mut slice = None;
        let mut function_ids = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::parse(src, e.to_string()))?;
            let num = |i: usize| -> Result<usize> {
                rec[i]
                    .parse()
                    .map_err(|_| Error::parse(src, format!("bad integer `{}`", &rec[i])))
            };
            let this = (num(1)?, num(2)?);
            if *slice.get_or_insert(this) != this {
                return Err(Error::parse(src, "rows from different slices"));
            }
            function_ids.push(num(0)? as u32);
            let row = (3..rec.len())
                .map(|i| match &rec[i] {
                    "" => Ok(None),
                    s => s
                        .parse()
                        .map(Some)
                        .map_err(|_| Error::parse(src, format!("bad value `{s}`"))),
                })
                .collect::<Result<Vec<_>>>()?;
            values.push(row);
        }
        let (sample_size, reduced_dim) = slice.ok_or_else(|| Error::parse(src, "table has no rows"))?;
        Ok(HeatmapTable {
            sample_size,
            reduced_dim,
            function_ids,
            values,
        })
    }
}

/// Heatmap of the records whose sample size and reduced dim match. Row
/// order follows function id, so input order does not matter.
pub fn heatmap_from_records(records: &[ShiftRecord], sample_size: usize, reduced_dim: usize) -> HeatmapTable {
    let agg = aggregate_heatmap(
        records
            .iter()
            .filter(|r| r.sample_size == sample_size && r.reduced_dim == reduced_dim),
    );
    let function_ids = agg.function_ids();
    let values = function_ids
        .iter()
        .map(|&f| {
            (0..NUM_FEATURES)
                .map(|q| agg.get(f, q).and_then(|c| c.median_abs))
                .collect()
        })
        .collect();
    HeatmapTable {
        sample_size,
        reduced_dim,
        function_ids,
        values,
    }
}

pub fn build_heatmap(shifts_csv: &Path, sample_size: usize, reduced_dim: usize) -> Result<HeatmapTable> {
    Ok(heatmap_from_records(
        &read_shifts(shifts_csv)?,
        sample_size,
        reduced_dim,
    ))
}

/// Raw (unclipped) shift samples per feature for one function and slice.
#[derive(Clone, Debug, PartialEq)]
pub struct ViolinTable {
    pub function_id: u32,
    pub sample_size: usize,
    pub reduced_dim: usize,
    /// Indexed by feature, each sorted ascending.
    pub samples: Vec<Vec<f64>>,
}

impl ViolinTable {
    pub fn is_empty(&self) -> bool {
        self.samples.iter().all(Vec::is_empty)
    }

    pub fn feature(&self, name: &str) -> Option<&[f64]> {
        feature_index(name).map(|q| self.samples[q].as_slice())
    }

    /// Long format, one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("function_id,sample_size,reduced_dim,feature_name,delta\n");
        for (q, vals) in self.samples.iter().enumerate() {
            for v in vals {
                out.push_str(&format!(
                    "{},{},{},{},{v}\n",
                    self.function_id, self.sample_size, self.reduced_dim, FEATURE_NAMES[q]
                ));
            }
        }
        out
    }

    /// Parses [`ViolinTable::to_csv`] output; an empty table cannot be read back.
    pub fn from_csv(text: &str) -> Result<Self> {
        let src = Path::new("<violin>");
        let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let mut slice = None;
        let mut samples = vec![Vec::new(); NUM_FEATURES];
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::parse(src, e.to_string()))?;
            if rec.len() != 5 {
                return Err(Error::parse(src, "expected 5 fields"));
            }
            let bad = |s: &str| Error::parse(src, format!("bad field `{s}`"));
            let this: (u32, usize, usize) = (
                rec[0].parse().map_err(|_| bad(&rec[0]))?,
                rec[1].parse().map_err(|_| bad(&rec[1]))?,
                rec[2].parse().map_err(|_| bad(&rec[2]))?,
            );
            if *slice.get_or_insert(this) != this {
                return Err(Error::parse(src, "rows from different slices"));
            }
            let q = feature_index(&rec[3]).ok_or_else(|| bad(&rec[3]))?;
            samples[q].push(rec[4].parse().map_err(|_| bad(&rec[4]))?);
        }
        let (function_id, sample_size, reduced_dim) = slice.ok_or_else(|| Error::parse(src, "table has no rows"))?;
        Ok(ViolinTable {
            function_id,
            sample_size,
            reduced_dim,
            samples,
        })
    }
}

pub fn violin_from_records(
    records: &[ShiftRecord],
    function_id: u32,
    sample_size: usize,
    reduced_dim: usize,
) -> Result<ViolinTable> {
    if !(1..=NUM_FUNCTIONS).contains(&function_id) {
        return Err(Error::domain(format!(
            "function id {function_id} is outside 1..={NUM_FUNCTIONS}"
        )));
    }
    let mut dist = aggregate_violin(records, function_id, reduced_dim, sample_size);
    for s in &mut dist.samples {
        s.sort_by(f64::total_cmp);
    }
    Ok(ViolinTable {
        function_id,
        sample_size,
        reduced_dim,
        samples: dist.samples,
    })
}

pub fn build_violin(
    shifts_csv: &Path,
    function_id: u32,
    sample_size: usize,
    reduced_dim: usize,
) -> Result<ViolinTable> {
    violin_from_records(&read_shifts(shifts_csv)?, function_id, sample_size, reduced_dim)
}

/// Writes `<dir>/<name>.csv` and `<dir>/<name>.svg`.
fn emit_pair(dir: &Path, name: &str, csv: &str, svg: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_atomic(&dir.join(format!("{name}.csv")), csv.as_bytes())?;
    write_atomic(&dir.join(format!("{name}.svg")), svg.as_bytes())
}

pub fn heatmap_name(t: &HeatmapTable) -> String {
    format!("heatmap_s{}_d{}", t.sample_size, t.reduced_dim)
}

pub fn violin_name(t: &ViolinTable) -> String {
    format!("violin_f{:02}_s{}_d{}", t.function_id, t.sample_size, t.reduced_dim)
}

/// Emits the heatmap CSV and SVG into `dir`; returns the base name.
pub fn emit_heatmap(t: &HeatmapTable, dir: &Path, scale: &ColorScale) -> Result<String> {
    let name = heatmap_name(t);
    emit_pair(dir, &name, &t.to_csv(), &heatmap_svg(t, scale))?;
    Ok(name)
}

pub fn emit_violin(t: &ViolinTable, dir: &Path) -> Result<String> {
    let name = violin_name(t);
    emit_pair(dir, &name, &t.to_csv(), &violin_svg(t))?;
    Ok(name)
}
