//! Exploratory landscape analysis features.
//!
//! Eight cheap feature sets (61 features in total) computed from a fixed
//! sample `(X, y)`. None of them evaluates the objective again, so the same
//! code runs unchanged on original and on projected samples.

mod disp;
mod distr;
mod fdc;
mod ic;
mod level;
pub mod meta;
mod nbc;
mod pca;

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::seed;

pub use disp::compute_disp;
pub use distr::{compute_ela_distr, kde_peak_count};
pub use fdc::compute_fitness_distance;
pub use ic::{compute_ic, compute_ic_from_start, entropy_and_partial, epsilon_grid, ic_from_tour, nn_tour, IcCurve};
pub use level::{compute_ela_level, lda_qda_ratio};
pub use meta::{compute_ela_meta, fit_ols, Basis, OlsFit};
pub use nbc::{compute_nbc, nearest_better_distances};
pub use pca::compute_pca;

/// The eight feature sets, in schema order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureSet {
    Distr,
    Level,
    Meta,
    Nbc,
    Disp,
    Ic,
    FitnessDistance,
    Pca,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 8] = [
        FeatureSet::Distr,
        FeatureSet::Level,
        FeatureSet::Meta,
        FeatureSet::Nbc,
        FeatureSet::Disp,
        FeatureSet::Ic,
        FeatureSet::FitnessDistance,
        FeatureSet::Pca,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            FeatureSet::Distr => "ela_distr",
            FeatureSet::Level => "ela_level",
            FeatureSet::Meta => "ela_meta",
            FeatureSet::Nbc => "nbc",
            FeatureSet::Disp => "disp",
            FeatureSet::Ic => "ic",
            FeatureSet::FitnessDistance => "fitness_distance",
            FeatureSet::Pca => "pca",
        }
    }

    fn range(self) -> std::ops::Range<usize> {
        let mut start = 0;
        for set in FeatureSet::ALL {
            let n = set.feature_count();
            if set == self {
                return start..start + n;
            }
            start += n;
        }
        unreachable!()
    }

    pub fn feature_count(self) -> usize {
        match self {
            FeatureSet::Distr => 3,
            FeatureSet::Level => 9,
            FeatureSet::Meta => 9,
            FeatureSet::Nbc => 5,
            FeatureSet::Disp => 16,
            FeatureSet::Ic => 5,
            FeatureSet::FitnessDistance => 6,
            FeatureSet::Pca => 8,
        }
    }

    /// Full feature names belonging to this set.
    pub fn names(self) -> &'static [&'static str] {
        &FEATURE_NAMES[self.range()]
    }

    pub fn of_feature(name: &str) -> Option<FeatureSet> {
        FeatureSet::ALL.into_iter().find(|s| s.names().contains(&name))
    }
}

pub const NUM_FEATURES: usize = 61;

pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "ela_distr.skewness",
    "ela_distr.kurtosis",
    "ela_distr.number_of_peaks",
    "ela_level.mmce_lda_10",
    "ela_level.mmce_qda_10",
    "ela_level.lda_qda_10",
    "ela_level.mmce_lda_25",
    "ela_level.mmce_qda_25",
    "ela_level.lda_qda_25",
    "ela_level.mmce_lda_50",
    "ela_level.mmce_qda_50",
    "ela_level.lda_qda_50",
    "ela_meta.lin_simple.adj_r2",
    "ela_meta.lin_simple.intercept",
    "ela_meta.lin_simple.coef.min",
    "ela_meta.lin_simple.coef.max",
    "ela_meta.lin_simple.coef.max_by_min",
    "ela_meta.lin_w_interact.adj_r2",
    "ela_meta.quad_simple.adj_r2",
    "ela_meta.quad_simple.cond",
    "ela_meta.quad_w_interact.adj_r2",
    "nbc.nn_nb.sd_ratio",
    "nbc.nn_nb.mean_ratio",
    "nbc.nn_nb.cor",
    "nbc.dist_ratio.coeff_var",
    "nbc.nb_fitness.cor",
    "disp.ratio_mean_02",
    "disp.ratio_median_02",
    "disp.diff_mean_02",
    "disp.diff_median_02",
    "disp.ratio_mean_05",
    "disp.ratio_median_05",
    "disp.diff_mean_05",
    "disp.diff_median_05",
    "disp.ratio_mean_10",
    "disp.ratio_median_10",
    "disp.diff_mean_10",
    "disp.diff_median_10",
    "disp.ratio_mean_25",
    "disp.ratio_median_25",
    "disp.diff_mean_25",
    "disp.diff_median_25",
    "ic.h_max",
    "ic.eps_s",
    "ic.eps_max",
    "ic.eps_ratio",
    "ic.m0",
    "fitness_distance.fd_correlation",
    "fitness_distance.fd_rank_correlation",
    "fitness_distance.distance_mean",
    "fitness_distance.distance_std",
    "fitness_distance.fitness_mean",
    "fitness_distance.fitness_std",
    "pca.expl_var.cov_x",
    "pca.expl_var.cor_x",
    "pca.expl_var.cov_init",
    "pca.expl_var.cor_init",
    "pca.expl_var_PC1.cov_x",
    "pca.expl_var_PC1.cor_x",
    "pca.expl_var_PC1.cov_init",
    "pca.expl_var_PC1.cor_init",
];

/// Features that read only the objective values. Their value cannot change
/// under any transformation of the inputs.
pub const OBJECTIVE_ONLY_FEATURES: [&str; 5] = [
    "ela_distr.skewness",
    "ela_distr.kurtosis",
    "ela_distr.number_of_peaks",
    "fitness_distance.fitness_mean",
    "fitness_distance.fitness_std",
];

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|n| *n == name)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureStatus {
    Ok,
    /// The estimator is undefined on this sample (zero variance, empty
    /// class, too few points for the basis, ...).
    Degenerate,
    /// The arithmetic produced an infinity or NaN.
    NonFinite,
}

impl FeatureStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureStatus::Ok => "ok",
            FeatureStatus::Degenerate => "degenerate",
            FeatureStatus::NonFinite => "non-finite",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ok" => Some(FeatureStatus::Ok),
            "degenerate" => Some(FeatureStatus::Degenerate),
            "non-finite" => Some(FeatureStatus::NonFinite),
            _ => None,
        }
    }
}

impl fmt::Display for FeatureStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureValue {
    pub value: f64,
    pub status: FeatureStatus,
}

impl FeatureValue {
    /// A computed value; non-finite results are flagged automatically.
    pub fn ok(value: f64) -> Self {
        let status = if value.is_finite() {
            FeatureStatus::Ok
        } else {
            FeatureStatus::NonFinite
        };
        FeatureValue { value, status }
    }

    pub fn degenerate(value: f64) -> Self {
        FeatureValue {
            value,
            status: FeatureStatus::Degenerate,
        }
    }

    pub fn missing() -> Self {
        Self::degenerate(f64::NAN)
    }

    pub fn from_option(v: Option<f64>) -> Self {
        v.map_or_else(Self::missing, Self::ok)
    }

    pub fn is_ok(&self) -> bool {
        self.status == FeatureStatus::Ok
    }

    /// The value if usable, else `None`.
    pub fn get(&self) -> Option<f64> {
        self.is_ok().then_some(self.value)
    }
}

/// Output of one feature set, in that set's name order.
#[derive(Clone, Debug, PartialEq)]
pub struct SetValues {
    pub set: FeatureSet,
    pub values: Vec<FeatureValue>,
}

impl SetValues {
    fn new(set: FeatureSet, values: Vec<FeatureValue>) -> Self {
        debug_assert_eq!(values.len(), set.feature_count());
        SetValues { set, values }
    }

    /// Looks up by full name (`nbc.nn_nb.cor`) or by the part after the set
    /// prefix (`nn_nb.cor`).
    pub fn get(&self, name: &str) -> Option<FeatureValue> {
        let prefix = self.set.prefix();
        self.set
            .names()
            .iter()
            .position(|n| *n == name || n.strip_prefix(prefix).and_then(|r| r.strip_prefix('.')) == Some(name))
            .map(|i| self.values[i])
    }

    pub fn value(&self, name: &str) -> f64 {
        self.get(name)
            .unwrap_or_else(|| panic!("no feature `{name}` in {}", self.set.prefix()))
            .value
    }
}

/// All 61 features of one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    entries: Vec<FeatureValue>,
}

impl FeatureVector {
    pub fn from_entries(entries: Vec<FeatureValue>) -> Result<Self> {
        if entries.len() != NUM_FEATURES {
            return Err(Error::domain(format!(
                "feature vector needs {NUM_FEATURES} entries, got {}",
                entries.len()
            )));
        }
        Ok(FeatureVector { entries })
    }

    pub fn from_sets(sets: Vec<SetValues>) -> Result<Self> {
        let mut entries = Vec::with_capacity(NUM_FEATURES);
        for (expected, s) in FeatureSet::ALL.iter().zip(&sets) {
            if s.set != *expected || s.values.len() != expected.feature_count() {
                return Err(Error::domain(format!("feature set {} out of place", s.set.prefix())));
            }
            entries.extend_from_slice(&s.values);
        }
        Self::from_entries(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FeatureValue] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<FeatureValue> {
        feature_index(name).map(|i| self.entries[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, FeatureValue)> + '_ {
        FEATURE_NAMES.iter().copied().zip(self.entries.iter().copied())
    }

    pub fn set(&self, set: FeatureSet) -> SetValues {
        SetValues::new(set, self.entries[set.range()].to_vec())
    }

    /// Per-set counts in schema order.
    pub fn set_counts(&self) -> Vec<(FeatureSet, usize)> {
        FeatureSet::ALL
            .iter()
            .map(|s| (*s, self.set(*s).values.len()))
            .collect()
    }
}

/// A sample of points and their objective values.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    points: DMatrix<f64>,
    objectives: Vec<f64>,
}

impl Dataset {
    /// Validates shapes and finiteness, and requires `S >= p + 2`.
    pub fn new(points: DMatrix<f64>, objectives: Vec<f64>) -> Result<Self> {
        if points.nrows() != objectives.len() {
            return Err(Error::domain(format!(
                "{} points but {} objective values",
                points.nrows(),
                objectives.len()
            )));
        }
        if points.ncols() == 0 {
            return Err(Error::domain("points have no columns"));
        }
        if points.nrows() < points.ncols() + 2 {
            return Err(Error::domain(format!(
                "need at least p + 2 = {} points, got {}",
                points.ncols() + 2,
                points.nrows()
            )));
        }
        if points.iter().chain(&objectives).any(|v| !v.is_finite()) {
            return Err(Error::domain("dataset contains non-finite values"));
        }
        Ok(Dataset { points, objectives })
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn objectives(&self) -> &[f64] {
        &self.objectives
    }

    pub fn len(&self) -> usize {
        self.objectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objectives.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    /// Row-major copy of the points.
    pub(crate) fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|i| self.points.row(i).iter().copied().collect())
            .collect()
    }

    /// Keeps the rows listed in `idx`, in that order.
    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        let p = self.dim();
        let points = DMatrix::from_fn(idx.len(), p, |i, j| self.points[(idx[i], j)]);
        let objectives = idx.iter().map(|&i| self.objectives[i]).collect();
        Dataset::new(points, objectives)
    }
}

/// Dense symmetric matrix of Euclidean distances between sample points.
pub struct Distances {
    n: usize,
    d: Vec<f64>,
}

impl Distances {
    pub fn new(ds: &Dataset) -> Self {
        let rows = ds.rows();
        let n = rows.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = euclid(&rows[i], &rows[j]);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Distances { n, d }
    }

    #[cfg(test)]
    pub(crate) fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Distances { n, d }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }
}

pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Computes all 61 features. `seed` drives the cross-validation folds of
/// the level-set features and the start point of the information-content
/// tour; everything else is deterministic in the data.
pub fn compute_all(ds: &Dataset, seed: u64) -> FeatureVector {
    let dist = Distances::new(ds);
    let sets = vec![
        distr::compute_ela_distr(ds),
        level::compute_ela_level(ds, seed),
        meta::compute_ela_meta(ds),
        nbc::compute_nbc_with(ds, &dist),
        disp::compute_disp_with(ds, &dist),
        ic::compute_ic_with(ds, &dist, ic_start(seed, ds.len())),
        fdc::compute_fitness_distance(ds),
        pca::compute_pca(ds),
    ];
    FeatureVector::from_sets(sets).expect("sets come out in schema order")
}

pub(crate) fn ic_start(seed: u64, n: usize) -> usize {
    use rand::Rng;
    seed::rng(&[seed::tag::IC_START, seed]).random_range(0..n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_matches_set_counts() {
        let counts: Vec<usize> = FeatureSet::ALL.iter().map(|s| s.feature_count()).collect();
        assert_eq!(counts, vec![3, 9, 9, 5, 16, 5, 6, 8]);
        assert_eq!(counts.iter().sum::<usize>(), NUM_FEATURES);
        for set in FeatureSet::ALL {
            for name in set.names() {
                assert!(name.starts_with(&format!("{}.", set.prefix())), "{name}");
            }
        }
        let unique: std::collections::HashSet<_> = FEATURE_NAMES.iter().collect();
        assert_eq!(unique.len(), NUM_FEATURES);
    }

    #[test]
    fn dataset_validation() {
        let pts = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 2.0]);
        assert!(Dataset::new(pts.clone(), vec![0.0, 1.0, 2.0]).is_ok());
        assert!(Dataset::new(pts.clone(), vec![0.0, 1.0]).is_err());
        assert!(Dataset::new(pts, vec![0.0, f64::NAN, 2.0]).is_err());
        let wide = DMatrix::zeros(3, 2);
        assert!(Dataset::new(wide, vec![0.0; 3]).is_err());
    }

    #[test]
    fn set_lookup_by_suffix() {
        let sv = SetValues::new(FeatureSet::Ic, (0..5).map(|i| FeatureValue::ok(i as f64)).collect());
        assert_eq!(sv.value("eps_s"), 1.0);
        assert_eq!(sv.value("ic.m0"), 4.0);
        assert!(sv.get("m1").is_none());
    }
}
