//! Fitness-distance correlation.

use super::{euclid, Dataset, FeatureSet, FeatureValue, SetValues};
use crate::stats;

pub fn compute_fitness_distance(ds: &Dataset) -> SetValues {
    let y = ds.objectives();
    let rows = ds.rows();
    let best = (0..y.len())
        .min_by(|&a, &b| y[a].total_cmp(&y[b]))
        .expect("dataset is not empty");

    let (dists, fits): (Vec<f64>, Vec<f64>) = (0..y.len())
        .filter(|&i| i != best)
        .map(|i| (euclid(&rows[i], &rows[best]), y[i]))
        .unzip();

    let values = vec![
        FeatureValue::from_option(stats::pearson(&dists, &fits)),
        FeatureValue::from_option(stats::spearman(&dists, &fits)),
        FeatureValue::ok(stats::mean(&dists)),
        FeatureValue::ok(stats::sample_sd(&dists)),
        FeatureValue::ok(stats::mean(y)),
        FeatureValue::ok(stats::sample_sd(y)),
    ];
    SetValues::new(FeatureSet::FitnessDistance, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn squared_distance_objective_has_perfect_rank_correlation() {
        // the best sample sits at the centre, so y is monotone in distance
        let centre: [f64; 3] = [0.5, -1.0, 2.0];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = DMatrix::from_fn(
            40,
            3,
            |i, j| {
                if i == 0 {
                    centre[j]
                } else {
                    rng.random_range(-5.0..5.0)
                }
            },
        );
        let y: Vec<f64> = (0..40)
            .map(|i| (0..3).map(|j| (x[(i, j)] - centre[j]).powi(2)).sum::<f64>() + 7.0)
            .collect();
        let f = compute_fitness_distance(&Dataset::new(x, y).unwrap());
        assert!((f.value("fd_rank_correlation") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fitness_moments_are_plain_mean_and_sd() {
        let x = DMatrix::from_fn(5, 1, |i, _| i as f64);
        let y = vec![1.0, 4.0, 2.0, 8.0, 5.0];
        let f = compute_fitness_distance(&Dataset::new(x, y).unwrap());
        assert_eq!(f.value("fitness_mean"), 4.0);
        assert!((f.value("fitness_std") - 7.5f64.sqrt()).abs() < 1e-15);
        // best is index 0 at x = 0, distances 1..4
        assert_eq!(f.value("distance_mean"), 2.5);
    }
}
