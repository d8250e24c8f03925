//! Normalized feature shift between projected and reference features, and
//! its aggregation.

use std::collections::BTreeMap;

use rand::seq::index;

use crate::ela::{self, Dataset, FeatureVector, FEATURE_NAMES, NUM_FEATURES};
use crate::error::{Error, Result};
use crate::seed::{self, tag};
use crate::stats;

/// Additive guard in the denominator of the relative shift.
pub const SHIFT_EPSILON: f64 = 1e-9;

/// Default cut-off on the median absolute shift for calling a feature robust.
pub const DEFAULT_ROBUSTNESS_THRESHOLD: f64 = 0.1;

/// `(projected - reference) / (|reference| + 1e-9)`.
#[inline]
pub fn relative_shift(projected: f64, reference: f64) -> f64 {
    (projected - reference) / (reference.abs() + SHIFT_EPSILON)
}

/// Per-feature shifts in schema order; `None` where either side is not ok.
pub fn feature_shift(projected: &FeatureVector, reference: &FeatureVector) -> Result<Vec<Option<f64>>> {
    if projected.len() != NUM_FEATURES || reference.len() != NUM_FEATURES {
        return Err(Error::domain("feature vectors do not carry the full schema"));
    }
    Ok(projected
        .entries()
        .iter()
        .zip(reference.entries())
        .map(|(p, r)| match (p.get(), r.get()) {
            (Some(p), Some(r)) => Some(relative_shift(p, r)),
            _ => None,
        })
        .collect())
}

/// One shift value keyed by its experiment coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftRecord {
    pub function_id: u32,
    pub instance_id: u32,
    pub design_id: u32,
    pub sample_size: usize,
    pub reduced_dim: usize,
    pub embedding_id: u32,
    /// Index into [`FEATURE_NAMES`].
    pub feature: usize,
    pub reference_value: Option<f64>,
    pub projected_value: Option<f64>,
    pub delta: Option<f64>,
}

impl ShiftRecord {
    pub fn feature_name(&self) -> &'static str {
        FEATURE_NAMES[self.feature]
    }
}

/// Coordinates shared by all 61 records of one projected cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftKey {
    pub function_id: u32,
    pub instance_id: u32,
    pub design_id: u32,
    pub sample_size: usize,
    pub reduced_dim: usize,
    pub embedding_id: u32,
}

/// Builds the 61 records of one projected cell.
pub fn shift_records(key: ShiftKey, projected: &FeatureVector, reference: &FeatureVector) -> Result<Vec<ShiftRecord>> {
    let deltas = feature_shift(projected, reference)?;
    Ok(deltas
        .into_iter()
        .enumerate()
        .map(|(q, delta)| ShiftRecord {
            function_id: key.function_id,
            instance_id: key.instance_id,
            design_id: key.design_id,
            sample_size: key.sample_size,
            reduced_dim: key.reduced_dim,
            embedding_id: key.embedding_id,
            feature: q,
            reference_value: reference.entries()[q].get(),
            projected_value: projected.entries()[q].get(),
            delta,
        })
        .collect())
}

/// Median of `|delta|` in one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellStat {
    pub median_abs: Option<f64>,
    /// Number of non-missing deltas that went into the median.
    pub count: usize,
}

/// Function x feature grid of median absolute shifts.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct AggregatedShift {
    pub cells: BTreeMap<(u32, usize), CellStat>,
}

impl AggregatedShift {
    pub fn get(&self, function_id: u32, feature: usize) -> Option<CellStat> {
        self.cells.get(&(function_id, feature)).copied()
    }

    pub fn function_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.cells.keys().map(|k| k.0).collect();
        ids.dedup();
        ids
    }
}

/// Median `|delta|` per (function, feature) over all designs, instances and
/// embeddings in `records`. Every function seen gets all 61 cells; cells
/// without a usable delta are marked missing.
pub fn aggregate_heatmap<'a>(records: impl IntoIterator<Item = &'a ShiftRecord>) -> AggregatedShift {
    let mut buffers: BTreeMap<u32, Vec<Vec<f64>>> = BTreeMap::new();
    for r in records {
        let row = buffers
            .entry(r.function_id)
            .or_insert_with(|| vec![Vec::new(); NUM_FEATURES]);
        if let Some(d) = r.delta {
            row[r.feature].push(d.abs());
        }
    }
    let mut cells = BTreeMap::new();
    for (fid, row) in buffers {
        for (q, mut vals) in row.into_iter().enumerate() {
            let stat = CellStat {
                count: vals.len(),
                median_abs: (!vals.is_empty()).then(|| stats::median_in_place(&mut vals)),
            };
            cells.insert((fid, q), stat);
        }
    }
    AggregatedShift { cells }
}

/// Raw shift samples per feature for one (function, d, S) slice.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ShiftDistribution {
    pub function_id: u32,
    pub reduced_dim: usize,
    pub sample_size: usize,
    /// Indexed by feature; unclipped.
    pub samples: Vec<Vec<f64>>,
}

impl ShiftDistribution {
    pub fn is_empty(&self) -> bool {
        self.samples.iter().all(Vec::is_empty)
    }
}

/// Display clipping for violin plots; never applied to stored data.
pub fn clip_for_display(delta: f64) -> f64 {
    delta.clamp(-1.0, 1.0)
}

pub fn aggregate_violin<'a>(
    records: impl IntoIterator<Item = &'a ShiftRecord>,
    function_id: u32,
    reduced_dim: usize,
    sample_size: usize,
) -> ShiftDistribution {
    let mut samples = vec![Vec::new(); NUM_FEATURES];
    for r in records {
        if r.function_id == function_id && r.reduced_dim == reduced_dim && r.sample_size == sample_size {
            if let Some(d) = r.delta {
                samples[r.feature].push(d);
            }
        }
    }
    ShiftDistribution {
        function_id,
        reduced_dim,
        sample_size,
        samples,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Robustness {
    /// Every shift is exactly zero.
    Invariant,
    /// Median `|delta|` within the threshold at every reduced dimension.
    Robust,
    Sensitive,
}

pub fn classify_robustness<'a>(
    records: impl IntoIterator<Item = &'a ShiftRecord>,
    feature_name: &str,
    threshold: f64,
) -> Result<Robustness> {
    let q =
        ela::feature_index(feature_name).ok_or_else(|| Error::domain(format!("unknown feature `{feature_name}`")))?;
    let mut by_dim: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in records {
        if r.feature == q {
            if let Some(d) = r.delta {
                by_dim.entry(r.reduced_dim).or_default().push(d);
            }
        }
    }
    if by_dim.is_empty() {
        return Err(Error::domain(format!("no shift records for `{feature_name}`")));
    }
    if by_dim.values().flatten().all(|&d| d == 0.0) {
        return Ok(Robustness::Invariant);
    }
    let robust = by_dim.values().all(|v| {
        let abs: Vec<f64> = v.iter().map(|d| d.abs()).collect();
        stats::median(&abs) <= threshold
    });
    Ok(if robust {
        Robustness::Robust
    } else {
        Robustness::Sensitive
    })
}

/// Re-estimates features on random subsets of a projected sample.
///
/// Each round draws `factor * d` rows without replacement (kept in their
/// original order) and runs [`ela::compute_all`] with `seed` as the feature
/// seed, so a subset equal to the whole sample reproduces the full-sample
/// features exactly.
pub fn subsample_features(projected: &Dataset, factor: usize, rounds: usize, seed: u64) -> Result<Vec<FeatureVector>> {
    let size = factor * projected.dim();
    if size > projected.len() {
        return Err(Error::domain(format!(
            "subsample of {size} points requested from {}",
            projected.len()
        )));
    }
    (0..rounds)
        .map(|o| {
            let mut rng = seed::rng(&[tag::SUBSAMPLE, seed, o as u64]);
            let mut idx = index::sample(&mut rng, projected.len(), size).into_vec();
            idx.sort_unstable();
            let subset = projected.select(&idx)?;
            Ok(ela::compute_all(&subset, seed))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ela::{FeatureStatus, FeatureValue};

    fn vector(vals: &[f64]) -> FeatureVector {
        let mut e = vec![FeatureValue::ok(1.0); NUM_FEATURES];
        for (i, v) in vals.iter().enumerate() {
            e[i] = FeatureValue::ok(*v);
        }
        FeatureVector::from_entries(e).unwrap()
    }

    fn rec(fid: u32, d: usize, feature: usize, delta: Option<f64>) -> ShiftRecord {
        ShiftRecord {
            function_id: fid,
            instance_id: 0,
            design_id: 0,
            sample_size: 200,
            reduced_dim: d,
            embedding_id: 0,
            feature,
            reference_value: None,
            projected_value: None,
            delta,
        }
    }

    #[test]
    fn identical_vectors_have_zero_shift() {
        let v = vector(&[3.0, -2.0, 0.0]);
        assert!(feature_shift(&v, &v).unwrap().iter().all(|d| *d == Some(0.0)));
    }

    #[test]
    fn epsilon_and_plain_arithmetic() {
        assert_eq!(relative_shift(1e-9, 0.0), 1.0);
        assert!((relative_shift(3.0, 2.0) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn missing_on_either_side_propagates() {
        let a = vector(&[1.0]);
        let mut e = a.entries().to_vec();
        e[0] = FeatureValue {
            value: f64::INFINITY,
            status: FeatureStatus::NonFinite,
        };
        let b = FeatureVector::from_entries(e).unwrap();
        assert_eq!(feature_shift(&a, &b).unwrap()[0], None);
        assert_eq!(feature_shift(&b, &a).unwrap()[0], None);
    }

    #[test]
    fn heatmap_medians_and_missing_cells() {
        let recs = vec![
            rec(1, 2, 0, Some(0.1)),
            rec(1, 2, 0, Some(-0.2)),
            rec(1, 2, 0, Some(0.3)),
            rec(1, 2, 1, None),
        ];
        let h = aggregate_heatmap(&recs);
        let c = h.get(1, 0).unwrap();
        assert!((c.median_abs.unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(c.count, 3);
        assert_eq!(h.get(1, 1).unwrap().median_abs, None);
        assert_eq!(h.cells.len(), NUM_FEATURES);
    }

    #[test]
    fn violin_keeps_raw_values() {
        let recs = vec![rec(20, 10, 5, Some(5.0)), rec(20, 2, 5, Some(1.0))];
        let v = aggregate_violin(&recs, 20, 10, 200);
        assert_eq!(v.samples[5], vec![5.0]);
        assert_eq!(clip_for_display(5.0), 1.0);
        assert!(aggregate_violin(&recs, 3, 10, 200).is_empty());
    }

    #[test]
    fn robustness_classes() {
        let name = FEATURE_NAMES[7];
        let zeros: Vec<_> = (0..5).map(|_| rec(1, 2, 7, Some(0.0))).collect();
        assert_eq!(classify_robustness(&zeros, name, 0.1).unwrap(), Robustness::Invariant);
        let mut almost = zeros.clone();
        almost.push(rec(1, 5, 7, Some(1e-17)));
        assert_eq!(classify_robustness(&almost, name, 0.1).unwrap(), Robustness::Robust);
        let big: Vec<_> = [0.8, -0.8, 0.9].iter().map(|&d| rec(1, 2, 7, Some(d))).collect();
        assert_eq!(classify_robustness(&big, name, 0.1).unwrap(), Robustness::Sensitive);
        assert!(classify_robustness(&big, FEATURE_NAMES[8], 0.1).is_err());
    }
}
