//! Level-set features: how well LDA and QDA separate sublevel sets.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::seq::SliceRandom;

use super::{Dataset, FeatureSet, FeatureStatus, FeatureValue, SetValues};
use crate::seed::{self, tag};
use crate::stats;

pub(crate) const QUANTILES: [f64; 3] = [0.10, 0.25, 0.50];
const MAX_FOLDS: usize = 10;
const RIDGE: f64 = 1e-8;

pub fn compute_ela_level(ds: &Dataset, seed: u64) -> SetValues {
    let mut values = Vec::with_capacity(9);
    for (qi, &q) in QUANTILES.iter().enumerate() {
        match quantile_errors(ds, q, seed::mix(&[tag::CV_FOLDS, seed, qi as u64])) {
            Some((lda, qda)) => {
                values.push(FeatureValue::ok(lda));
                values.push(FeatureValue::ok(qda));
                values.push(lda_qda_ratio(lda, qda));
            }
            None => values.extend([FeatureValue::missing(); 3]),
        }
    }
    SetValues::new(FeatureSet::Level, values)
}

/// `mmce_lda / mmce_qda`; a zero denominator is flagged non-finite.
pub fn lda_qda_ratio(lda: f64, qda: f64) -> FeatureValue {
    if qda == 0.0 {
        return FeatureValue {
            value: lda / qda,
            status: FeatureStatus::NonFinite,
        };
    }
    FeatureValue::ok(lda / qda)
}

/// Stratified fold ids for a boolean labelling.
fn stratified_folds(labels: &[bool], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(&[seed]);
    let mut fold_of = vec![0; labels.len()];
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for (pos, i) in idx.into_iter().enumerate() {
            fold_of[i] = pos % folds;
        }
    }
    fold_of
}

/// Mean cross-validated misclassification error of LDA and QDA for the
/// split `y <= quantile(y, q)`. `None` when the split or a fold is unusable.
fn quantile_errors(ds: &Dataset, q: f64, fold_seed: u64) -> Option<(f64, f64)> {
    let y = ds.objectives();
    let threshold = stats::quantile(y, q);
    let labels: Vec<bool> = y.iter().map(|&v| v <= threshold).collect();
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    let folds = MAX_FOLDS.min(n_pos).min(n_neg);
    if folds < 2 {
        return None;
    }
    let fold_of = stratified_folds(&labels, folds, fold_seed);
    let rows = ds.rows();

    let (mut lda_sum, mut qda_sum) = (0.0, 0.0);
    for f in 0..folds {
        let train: Vec<usize> = (0..rows.len()).filter(|&i| fold_of[i] != f).collect();
        let test: Vec<usize> = (0..rows.len()).filter(|&i| fold_of[i] == f).collect();
        let model = Discriminant::fit(&rows, &labels, &train)?;
        let (mut e_lda, mut e_qda) = (0usize, 0usize);
        for &i in &test {
            let x = DVector::from_column_slice(&rows[i]);
            let (l, qd) = model.predict(&x);
            e_lda += usize::from(l != labels[i]);
            e_qda += usize::from(qd != labels[i]);
        }
        lda_sum += e_lda as f64 / test.len() as f64;
        qda_sum += e_qda as f64 / test.len() as f64;
    }
    Some((lda_sum / folds as f64, qda_sum / folds as f64))
}

struct ClassModel {
    mean: DVector<f64>,
    log_prior: f64,
    chol: Cholesky<f64, Dyn>,
    log_det: f64,
}

struct Discriminant {
    /// Index 0 is the negative class, 1 the positive one.
    classes: [ClassModel; 2],
    pooled: Cholesky<f64, Dyn>,
}

fn ridge(mut cov: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let p = cov.nrows();
    let trace = cov.trace();
    let lambda = if trace > 0.0 { RIDGE * trace / p as f64 } else { RIDGE };
    for i in 0..p {
        cov[(i, i)] += lambda;
    }
    Cholesky::new(cov)
}

fn log_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    let l = chol.l_dirty();
    (0..l.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0
}

fn mahalanobis(chol: &Cholesky<f64, Dyn>, diff: &DVector<f64>) -> f64 {
    diff.dot(&chol.solve(diff))
}

impl Discriminant {
    fn fit(rows: &[Vec<f64>], labels: &[bool], train: &[usize]) -> Option<Self> {
        let p = rows[0].len();
        let n = train.len() as f64;
        let mut scatter_total = DMatrix::zeros(p, p);
        let build = |class: bool| -> Option<(ClassModel, DMatrix<f64>)> {
            let members: Vec<&Vec<f64>> = train
                .iter()
                .filter(|&&i| labels[i] == class)
                .map(|&i| &rows[i])
                .collect();
            if members.is_empty() {
                return None;
            }
            let k = members.len() as f64;
            let mut mean = DVector::zeros(p);
            for r in &members {
                mean += DVector::from_column_slice(r);
            }
            mean /= k;
            let mut scatter = DMatrix::zeros(p, p);
            for r in &members {
                let d = DVector::from_column_slice(r) - &mean;
                scatter.ger(1.0, &d, &d, 1.0);
            }
            let cov = &scatter / (k - 1.0).max(1.0);
            let chol = ridge(cov)?;
            let log_det = log_det(&chol);
            Some((
                ClassModel {
                    mean,
                    log_prior: (k / n).ln(),
                    chol,
                    log_det,
                },
                scatter,
            ))
        };
        let (neg, s_neg) = build(false)?;
        let (pos, s_pos) = build(true)?;
        scatter_total += s_neg + s_pos;
        let pooled = ridge(scatter_total / (n - 2.0).max(1.0))?;
        Some(Discriminant {
            classes: [neg, pos],
            pooled,
        })
    }

    /// Returns (LDA says positive, QDA says positive).
    fn predict(&self, x: &DVector<f64>) -> (bool, bool) {
        let mut lda = [0.0; 2];
        let mut qda = [0.0; 2];
        for (c, m) in self.classes.iter().enumerate() {
            let diff = x - &m.mean;
            lda[c] = -0.5 * mahalanobis(&self.pooled, &diff) + m.log_prior;
            qda[c] = -0.5 * m.log_det - 0.5 * mahalanobis(&m.chol, &diff) + m.log_prior;
        }
        (lda[1] > lda[0], qda[1] > qda[0])
    }
}
