//! Dispersion of the best points relative to the whole sample.

use super::{Dataset, Distances, FeatureSet, FeatureValue, SetValues};
use crate::stats;

pub(crate) const FRACTIONS: [f64; 4] = [0.02, 0.05, 0.10, 0.25];

/// Number of points in the best-`q` subset, `ceil(q S)`.
pub(crate) fn subset_size(q: f64, s: usize) -> usize {
    // guard against products like 0.1 * 30 = 3.0000000000000004
    ((q * s as f64) - 1e-9).ceil() as usize
}

fn pair_distances(dist: &Distances, idx: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(idx.len() * idx.len().saturating_sub(1) / 2);
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            out.push(dist.get(i, j));
        }
    }
    out
}

pub fn compute_disp(ds: &Dataset) -> SetValues {
    compute_disp_with(ds, &Distances::new(ds))
}

pub(crate) fn compute_disp_with(ds: &Dataset, dist: &Distances) -> SetValues {
    disp_from(ds.objectives(), dist)
}

fn disp_from(y: &[f64], dist: &Distances) -> SetValues {
    let n = y.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| y[a].total_cmp(&y[b]).then(a.cmp(&b)));

    let mut full = pair_distances(dist, &(0..n).collect::<Vec<_>>());
    let full_mean = stats::mean(&full);
    let full_median = stats::median_in_place(&mut full);

    let mut values = Vec::with_capacity(16);
    for q in FRACTIONS {
        let k = subset_size(q, n);
        if k < 2 {
            values.extend([FeatureValue::missing(); 4]);
            continue;
        }
        let mut sub = pair_distances(dist, &order[..k]);
        let m = stats::mean(&sub);
        let med = stats::median_in_place(&mut sub);
        values.push(FeatureValue::ok(m / full_mean));
        values.push(FeatureValue::ok(med / full_median));
        values.push(FeatureValue::ok(m - full_mean));
        values.push(FeatureValue::ok(med - full_median));
    }
    SetValues::new(FeatureSet::Disp, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn subset_sizes() {
        assert_eq!(subset_size(0.02, 200), 4);
        assert_eq!(subset_size(0.1, 30), 3);
        assert_eq!(subset_size(0.25, 50), 13);
        assert_eq!(subset_size(0.02, 40), 1);
    }

    #[test]
    fn regular_simplex_has_unit_ratios() {
        // a regular simplex needs p >= S - 1, which a Dataset forbids, so
        // feed the equal-distance matrix directly
        let s = 60;
        let dist = Distances::from_fn(s, |_, _| 1.0);
        let y: Vec<f64> = (0..s).map(|i| ((i * 37) % s) as f64).collect();
        let f = disp_from(&y, &dist);
        for (name, v) in f.set.names().iter().zip(&f.values) {
            if name.contains("ratio") {
                assert!(v.value == 1.0, "{name}");
            } else {
                assert_eq!(v.value, 0.0, "{name}");
            }
        }
    }

    #[test]
    fn small_subsets_are_degenerate() {
        let x = DMatrix::from_fn(40, 2, |i, j| (i * (j + 1)) as f64);
        let y: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let f = compute_disp(&Dataset::new(x, y).unwrap());
        assert!(!f.get("ratio_mean_02").unwrap().is_ok());
        assert!(f.get("ratio_mean_05").unwrap().is_ok());
    }
}
