//! Distribution of the objective values.

use std::f64::consts::PI;

use super::{Dataset, FeatureSet, FeatureValue, SetValues};
use crate::stats;

const KDE_GRID: usize = 512;
const PEAK_MASS: f64 = 0.1;

pub fn compute_ela_distr(ds: &Dataset) -> SetValues {
    let y = ds.objectives();
    let n = y.len() as f64;
    let m = stats::mean(y);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in y {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    let (skew, kurt) = if m2 > 0.0 {
        (
            FeatureValue::ok(m3 / m2.powf(1.5)),
            FeatureValue::ok(m4 / (m2 * m2) - 3.0),
        )
    } else {
        (FeatureValue::missing(), FeatureValue::missing())
    };

    SetValues::new(
        FeatureSet::Distr,
        vec![skew, kurt, FeatureValue::ok(kde_peak_count(y) as f64)],
    )
}

/// Number of modes of a Gaussian kernel density estimate of `y` whose
/// probability mass (between the flanking local minima) exceeds 0.1.
pub fn kde_peak_count(y: &[f64]) -> usize {
    let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return 1;
    }
    let h = stats::silverman_bandwidth(y);
    let start = lo - 3.0 * h;
    let step = (hi - lo + 6.0 * h) / (KDE_GRID - 1) as f64;
    let norm = 1.0 / (y.len() as f64 * h * (2.0 * PI).sqrt());
    let density: Vec<f64> = (0..KDE_GRID)
        .map(|k| {
            let g = start + k as f64 * step;
            norm * y
                .iter()
                .map(|v| {
                    let u = (g - v) / h;
                    (-0.5 * u * u).exp()
                })
                .sum::<f64>()
        })
        .collect();

    let mut cuts = vec![0];
    for k in 1..KDE_GRID - 1 {
        if density[k] < density[k - 1] && density[k] <= density[k + 1] {
            cuts.push(k);
        }
    }
    cuts.push(KDE_GRID - 1);

    cuts.windows(2)
        .filter(|w| density[w[0]..=w[1]].iter().sum::<f64>() * step > PEAK_MASS)
        .count()
}
