//! Nearest-better clustering features.

use super::{Dataset, Distances, FeatureSet, FeatureStatus, FeatureValue, SetValues};
use crate::stats;

/// Per-point nearest-neighbour and nearest-better distances.
///
/// "Better" means strictly smaller objective value. A point with no better
/// point (the global best, and anything tied with it) takes the largest
/// distance to any other point.
pub fn nearest_better_distances(ds: &Dataset, dist: &Distances) -> (Vec<f64>, Vec<f64>) {
    let y = ds.objectives();
    let n = y.len();
    let mut nn = vec![f64::INFINITY; n];
    let mut nb = vec![f64::INFINITY; n];
    for i in 0..n {
        let row = dist.row(i);
        let mut far = 0.0f64;
        for j in 0..n {
            if j == i {
                continue;
            }
            let d = row[j];
            nn[i] = nn[i].min(d);
            far = far.max(d);
            if y[j] < y[i] {
                nb[i] = nb[i].min(d);
            }
        }
        if nb[i].is_infinite() {
            nb[i] = far;
        }
    }
    (nn, nb)
}

pub fn compute_nbc(ds: &Dataset) -> SetValues {
    compute_nbc_with(ds, &Distances::new(ds))
}

fn quotient(num: f64, den: f64, zero_den: FeatureStatus) -> FeatureValue {
    if den == 0.0 {
        FeatureValue {
            value: num / den,
            status: zero_den,
        }
    } else {
        FeatureValue::ok(num / den)
    }
}

pub(crate) fn compute_nbc_with(ds: &Dataset, dist: &Distances) -> SetValues {
    if ds.len() < 3 {
        return SetValues::new(FeatureSet::Nbc, vec![FeatureValue::missing(); 5]);
    }
    let (nn, nb) = nearest_better_distances(ds, dist);
    let sd_ratio = quotient(stats::sample_sd(&nn), stats::sample_sd(&nb), FeatureStatus::Degenerate);
    let mean_ratio = quotient(stats::mean(&nn), stats::mean(&nb), FeatureStatus::NonFinite);
    let cor = FeatureValue::from_option(stats::pearson(&nn, &nb));

    let coeff_var = if nb.contains(&0.0) {
        FeatureValue {
            value: f64::INFINITY,
            status: FeatureStatus::NonFinite,
        }
    } else {
        let ratios: Vec<f64> = nn.iter().zip(&nb).map(|(a, b)| a / b).collect();
        quotient(
            stats::sample_sd(&ratios),
            stats::mean(&ratios),
            FeatureStatus::NonFinite,
        )
    };
    let fitness_cor = FeatureValue::from_option(stats::pearson(&nb, ds.objectives()));

    SetValues::new(FeatureSet::Nbc, vec![sd_ratio, mean_ratio, cor, coeff_var, fitness_cor])
}
