//! Explained-variance features from principal components.

use nalgebra::DMatrix;

use super::{Dataset, FeatureSet, FeatureValue, SetValues};

const TARGET: f64 = 0.9;

fn covariance(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (s, p) = m.shape();
    let means: Vec<f64> = (0..p).map(|j| m.column(j).mean()).collect();
    let centred = DMatrix::from_fn(s, p, |i, j| m[(i, j)] - means[j]);
    centred.transpose() * &centred / (s as f64 - 1.0)
}

fn correlation(cov: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let p = cov.nrows();
    let sd: Vec<f64> = (0..p).map(|i| cov[(i, i)].sqrt()).collect();
    if sd.iter().any(|&v| v <= 0.0) {
        return None;
    }
    Some(DMatrix::from_fn(p, p, |i, j| {
        if i == j {
            1.0
        } else {
            cov[(i, j)] / (sd[i] * sd[j])
        }
    }))
}

/// (share of components needed for 90% of the variance, share of the first
/// component).
fn explained(mat: &DMatrix<f64>) -> (f64, f64) {
    let p = mat.nrows();
    let mut ev: Vec<f64> = mat.clone().symmetric_eigenvalues().iter().map(|v| v.max(0.0)).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = ev.iter().sum();
    let mut acc = 0.0;
    let mut k = p;
    for (i, v) in ev.iter().enumerate() {
        acc += v;
        if acc >= TARGET * total * (1.0 - 1e-12) {
            k = i + 1;
            break;
        }
    }
    (k as f64 / p as f64, ev[0] / total)
}

pub fn compute_pca(ds: &Dataset) -> SetValues {
    let x = ds.points();
    let (s, p) = x.shape();
    let mut init = DMatrix::zeros(s, p + 1);
    init.columns_mut(0, p).copy_from(x);
    init.column_mut(p).copy_from_slice(ds.objectives());

    let cov_x = covariance(x);
    let cov_init = covariance(&init);
    let one = |m: Option<&DMatrix<f64>>| match m {
        Some(m) => {
            let (e, pc1) = explained(m);
            (FeatureValue::ok(e), FeatureValue::ok(pc1))
        }
        None => (FeatureValue::missing(), FeatureValue::missing()),
    };
    let cor_x = correlation(&cov_x);
    let cor_init = correlation(&cov_init);
    let (e_cov_x, pc_cov_x) = one(Some(&cov_x));
    let (e_cor_x, pc_cor_x) = one(cor_x.as_ref());
    let (e_cov_i, pc_cov_i) = one(Some(&cov_init));
    let (e_cor_i, pc_cor_i) = one(cor_init.as_ref());

    SetValues::new(
        FeatureSet::Pca,
        vec![
            e_cov_x, e_cor_x, e_cov_i, e_cor_i, pc_cov_x, pc_cor_x, pc_cov_i, pc_cor_i,
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn points_on_a_line() {
        let p = 4;
        let dir = [1.0, -2.0, 0.5, 3.0];
        let x = DMatrix::from_fn(30, p, |i, j| (i as f64 - 10.0) * dir[j]);
        let y: Vec<f64> = (0..30).map(|i| (i as f64).sin()).collect();
        let f = compute_pca(&Dataset::new(x, y).unwrap());
        assert!((f.value("expl_var_PC1.cov_x") - 1.0).abs() < 1e-12);
        assert!((f.value("expl_var.cov_x") - 1.0 / p as f64).abs() < 1e-15);
    }

    #[test]
    fn correlation_variant_ignores_axis_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = DMatrix::from_fn(80, 3, |_, _| rng.random_range(-5.0..5.0));
        let y: Vec<f64> = (0..80).map(|i| x[(i, 0)] + x[(i, 1)] * x[(i, 2)]).collect();
        let scaled = DMatrix::from_fn(80, 3, |i, j| x[(i, j)] * [1.0, 100.0, 0.01][j]);
        let a = compute_pca(&Dataset::new(x, y.clone()).unwrap());
        let b = compute_pca(&Dataset::new(scaled, y).unwrap());
        for name in [
            "expl_var.cor_x",
            "expl_var_PC1.cor_x",
            "expl_var.cor_init",
            "expl_var_PC1.cor_init",
        ] {
            assert!((a.value(name) - b.value(name)).abs() < 1e-9, "{name}");
        }
    }

    #[test]
    fn isotropic_cloud_needs_about_ninety_percent_of_axes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = DMatrix::from_fn(2000, 20, |_, _| rng.sample(StandardNormal));
        let y: Vec<f64> = (0..2000).map(|i| x[(i, 0)]).collect();
        let f = compute_pca(&Dataset::new(x, y).unwrap());
        assert!((f.value("expl_var.cov_x") - 0.9).abs() <= 0.05);
    }

    #[test]
    fn constant_column_breaks_only_correlation() {
        let x = DMatrix::from_fn(10, 2, |i, j| if j == 0 { i as f64 } else { 1.0 });
        let y: Vec<f64> = (0..10).map(|i| (i * i) as f64).collect();
        let f = compute_pca(&Dataset::new(x, y).unwrap());
        assert!(f.get("expl_var.cov_x").unwrap().is_ok());
        assert!(!f.get("expl_var.cor_x").unwrap().is_ok());
    }
}
