//! Information content of the objective along a nearest-neighbour tour.

use super::{Dataset, Distances, FeatureSet, FeatureStatus, FeatureValue, SetValues};
use crate::stats;

const GRID_LEN: usize = 1000;
const GRID_LO: f64 = -5.0;
const GRID_HI: f64 = 15.0;
const H_THRESHOLD: f64 = 0.05;
/// Floor for zero step lengths between coincident tour points.
const MIN_STEP: f64 = 1e-12;

/// `log10` of each sensitivity in the grid; the first entry (`eps = 0`) is
/// `-inf`.
pub fn epsilon_grid() -> Vec<f64> {
    let mut g = Vec::with_capacity(GRID_LEN + 1);
    g.push(f64::NEG_INFINITY);
    g.extend((0..GRID_LEN).map(|k| GRID_LO + (GRID_HI - GRID_LO) * k as f64 / (GRID_LEN - 1) as f64));
    g
}

/// Greedy tour: from `start`, repeatedly move to the closest unvisited
/// point (lowest index on ties).
pub fn nn_tour(dist: &Distances, start: usize) -> Vec<usize> {
    let n = dist.len();
    let mut visited = vec![false; n];
    let mut tour = Vec::with_capacity(n);
    let mut cur = start;
    visited[cur] = true;
    tour.push(cur);
    for _ in 1..n {
        let row = dist.row(cur);
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, &d) in row.iter().enumerate() {
            if !visited[j] && d < best_d {
                best = j;
                best_d = d;
            }
        }
        visited[best] = true;
        tour.push(best);
        cur = best;
    }
    tour
}

/// Entropy `H(eps)` and partial information `M(eps)` of a slope sequence.
pub fn entropy_and_partial(slopes: &[f64], eps: f64) -> (f64, f64) {
    let symbols: Vec<i8> = slopes
        .iter()
        .map(|&r| {
            if r < -eps {
                -1
            } else if r > eps {
                1
            } else {
                0
            }
        })
        .collect();

    let mut counts = [[0usize; 3]; 3];
    for w in symbols.windows(2) {
        counts[(w[0] + 1) as usize][(w[1] + 1) as usize] += 1;
    }
    let pairs = symbols.len().saturating_sub(1);
    let mut h = 0.0;
    if pairs > 0 {
        let ln6 = 6f64.ln();
        for (a, row) in counts.iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                if a != b && c > 0 {
                    let p = c as f64 / pairs as f64;
                    h -= p * p.ln() / ln6;
                }
            }
        }
    }

    let mut collapsed = 0usize;
    let mut last = 0i8;
    for &s in &symbols {
        if s != 0 && s != last {
            collapsed += 1;
            last = s;
        }
    }
    (h, collapsed as f64 / slopes.len() as f64)
}

/// Curves of `H` and `M` over the sensitivity grid.
#[derive(Clone, Debug)]
pub struct IcCurve {
    pub log10_eps: Vec<f64>,
    pub entropy: Vec<f64>,
    pub partial: Vec<f64>,
}

/// Slopes `(y_{i+1} - y_i) / |x_{i+1} - x_i|` along a given visiting order.
fn tour_slopes(dist: &Distances, y: &[f64], tour: &[usize]) -> Vec<f64> {
    tour.windows(2)
        .map(|w| (y[w[1]] - y[w[0]]) / dist.get(w[0], w[1]).max(MIN_STEP))
        .collect()
}

fn curve_from_slopes(slopes: &[f64]) -> IcCurve {
    let log10_eps = epsilon_grid();
    let mut entropy = Vec::with_capacity(log10_eps.len());
    let mut partial = Vec::with_capacity(log10_eps.len());
    for &le in &log10_eps {
        let eps = if le.is_infinite() { 0.0 } else { 10f64.powf(le) };
        let (h, m) = entropy_and_partial(slopes, eps);
        entropy.push(h);
        partial.push(m);
    }
    IcCurve {
        log10_eps,
        entropy,
        partial,
    }
}

fn log_eps_value(log10_eps: f64) -> FeatureValue {
    if log10_eps.is_finite() {
        FeatureValue::ok(log10_eps)
    } else {
        FeatureValue {
            value: log10_eps,
            status: FeatureStatus::NonFinite,
        }
    }
}

fn features_from_curve(c: &IcCurve) -> Vec<FeatureValue> {
    let h_max = c.entropy.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    // Several sensitivities can share the maximum; take the median of them.
    let at_max: Vec<f64> = c
        .log10_eps
        .iter()
        .zip(&c.entropy)
        .filter(|(_, &h)| h == h_max)
        .map(|(&le, _)| if le.is_infinite() { 0.0 } else { 10f64.powf(le) })
        .collect();
    let eps_max = log_eps_value(stats::median(&at_max).log10());

    let eps_s = match c.entropy.iter().rposition(|&h| h > H_THRESHOLD) {
        Some(k) => log_eps_value(c.log10_eps[k]),
        None => FeatureValue::missing(),
    };

    let m0 = c.partial[0];
    let eps_ratio = if m0 > 0.0 {
        match c.partial.iter().rposition(|&m| m > 0.5 * m0) {
            Some(k) => log_eps_value(c.log10_eps[k]),
            None => FeatureValue::missing(),
        }
    } else {
        FeatureValue::missing()
    };

    vec![FeatureValue::ok(h_max), eps_s, eps_max, eps_ratio, FeatureValue::ok(m0)]
}

/// Features and curves for an explicit visiting order.
pub fn ic_from_tour(ds: &Dataset, tour: &[usize]) -> (SetValues, IcCurve) {
    let dist = Distances::new(ds);
    let slopes = tour_slopes(&dist, ds.objectives(), tour);
    let curve = curve_from_slopes(&slopes);
    (SetValues::new(FeatureSet::Ic, features_from_curve(&curve)), curve)
}

pub fn compute_ic(ds: &Dataset, seed: u64) -> SetValues {
    compute_ic_with(ds, &Distances::new(ds), super::ic_start(seed, ds.len()))
}

/// Like [`compute_ic`] with the tour start given explicitly.
pub fn compute_ic_from_start(ds: &Dataset, start: usize) -> SetValues {
    compute_ic_with(ds, &Distances::new(ds), start)
}

pub(crate) fn compute_ic_with(ds: &Dataset, dist: &Distances, start: usize) -> SetValues {
    if ds.len() < 3 {
        return SetValues::new(FeatureSet::Ic, vec![FeatureValue::missing(); 5]);
    }
    let tour = nn_tour(dist, start);
    let slopes = tour_slopes(dist, ds.objectives(), &tour);
    SetValues::new(FeatureSet::Ic, features_from_curve(&curve_from_slopes(&slopes)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn line(y: Vec<f64>) -> Dataset {
        let n = y.len();
        Dataset::new(DMatrix::from_fn(n, 1, |i, _| i as f64), y).unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = epsilon_grid();
        assert_eq!(g.len(), 1001);
        assert_eq!(g[1], -5.0);
        assert_eq!(g[1000], 15.0);
    }

    #[test]
    fn tour_on_a_line_from_the_left_end_walks_in_order() {
        let ds = line((0..8).map(f64::from).collect());
        assert_eq!(nn_tour(&Distances::new(&ds), 0), (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn monotone_sequence() {
        let s = 20;
        let ds = line((0..s).map(|i| (i * i) as f64).collect());
        let (f, curve) = ic_from_tour(&ds, &(0..s as usize).collect::<Vec<_>>());
        assert_eq!(curve.entropy[0], 0.0);
        assert!((f.value("m0") - 1.0 / (s - 1) as f64).abs() < 1e-15);
        // beyond the largest slope every symbol is zero
        let (h, m) = entropy_and_partial(&[1.0, 3.0, 5.0], 6.0);
        assert_eq!((h, m), (0.0, 0.0));
    }

    #[test]
    fn zigzag_entropy_is_log6_of_two() {
        let y: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { 0.0 } else { 1.0 }).collect();
        let slopes: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
        let (h, m) = entropy_and_partial(&slopes, 0.0);
        assert!((h - 2f64.ln() / 6f64.ln()).abs() < 1e-12);
        assert!((m - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_stays_in_unit_interval() {
        let y: Vec<f64> = (0..50).map(|i| ((i * 7919) % 31) as f64).collect();
        let f = compute_ic_from_start(&line(y), 10);
        let h = f.value("h_max");
        assert!((0.0..=1.0).contains(&h));
        assert!((0.0..=1.0).contains(&f.value("m0")));
    }

    #[test]
    fn constant_objective_has_degenerate_ratio() {
        let f = compute_ic_from_start(&line(vec![2.0; 12]), 0);
        assert_eq!(f.value("m0"), 0.0);
        assert!(!f.get("eps_ratio").unwrap().is_ok());
        assert!(!f.get("eps_s").unwrap().is_ok());
    }
}
