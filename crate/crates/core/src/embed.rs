//! Random Gaussian embeddings `z = A x / sqrt(d)`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::seed::{self, tag};
use crate::stats;

/// A `d x D` matrix of i.i.d. standard normal entries.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianEmbedding {
    pub embedding_id: u32,
    pub seed: u64,
    matrix: DMatrix<f64>,
}

impl GaussianEmbedding {
    /// Wraps an explicit matrix. Used for hand-checkable cases such as the
    /// identity or a single unit row.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.nrows() > matrix.ncols() {
            return Err(Error::domain(format!(
                "embedding matrix must be d x D with 1 <= d <= D, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("embedding matrix has non-finite entries"));
        }
        Ok(GaussianEmbedding {
            embedding_id: 0,
            seed: 0,
            matrix,
        })
    }

    pub fn reduced_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Projects each row of `points` (an `S x D` matrix) to `S x d`.
    pub fn project(&self, points: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if points.ncols() != self.ambient_dim() {
            return Err(Error::domain(format!(
                "points have {} columns, embedding expects {}",
                points.ncols(),
                self.ambient_dim()
            )));
        }
        let scale = 1.0 / (self.reduced_dim() as f64).sqrt();
        Ok(points * self.matrix.transpose() * scale)
    }

    /// Ratios `|z_i - z_j| / |x_i - x_j|` over all non-coincident pairs.
    pub fn distance_ratios(&self, points: &DMatrix<f64>) -> Result<Vec<f64>> {
        let z = self.project(points)?;
        let s = points.nrows();
        let mut ratios = Vec::with_capacity(s * s.saturating_sub(1) / 2);
        for i in 0..s {
            for j in i + 1..s {
                let dx = (points.row(i) - points.row(j)).norm();
                if dx == 0.0 {
                    continue;
                }
                ratios.push((z.row(i) - z.row(j)).norm() / dx);
            }
        }
        Ok(ratios)
    }

    pub fn distance_distortion(&self, points: &DMatrix<f64>) -> Result<DistortionSummary> {
        if points.nrows() < 2 {
            return Err(Error::domain("distance distortion needs at least two points"));
        }
        let ratios = self.distance_ratios(points)?;
        DistortionSummary::from_ratios(&ratios)
    }
}

/// Summary of pairwise distance ratios under an embedding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistortionSummary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub pairs: usize,
}

impl DistortionSummary {
    pub fn from_ratios(ratios: &[f64]) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::Degenerate("all points coincide".into()));
        }
        Ok(DistortionSummary {
            min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
            median: stats::median(ratios),
            max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            pairs: ratios.len(),
        })
    }

    /// `max / min`, the multiplicative spread of the ratios.
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }
}

pub fn sample_embedding(reduced_dim: usize, ambient_dim: usize, seed: u64) -> Result<GaussianEmbedding> {
    if reduced_dim < 1 || reduced_dim > ambient_dim {
        return Err(Error::domain(format!(
            "reduced_dim {reduced_dim} must lie in 1..={ambient_dim}"
        )));
    }
    let mut rng = seed::rng(&[tag::EMBEDDING, seed, reduced_dim as u64, ambient_dim as u64]);
    // Filled row by row so the stream order does not depend on storage order.
    let mut matrix = DMatrix::zeros(reduced_dim, ambient_dim);
    for i in 0..reduced_dim {
        for j in 0..ambient_dim {
            matrix[(i, j)] = rng.sample(StandardNormal);
        }
    }
    Ok(GaussianEmbedding {
        embedding_id: 0,
        seed,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doe;

    #[test]
    fn deterministic_and_range_checked() {
        assert_eq!(
            sample_embedding(10, 20, 4).unwrap(),
            sample_embedding(10, 20, 4).unwrap()
        );
        assert!(sample_embedding(21, 20, 4).is_err());
        assert!(sample_embedding(0, 20, 4).is_err());
    }

    #[test]
    fn entries_are_centred() {
        let e = sample_embedding(10, 20, 8).unwrap();
        let m = e.matrix().mean();
        assert!(m.abs() < 0.3, "{m}");
    }

    #[test]
    fn zero_maps_to_zero_and_shape_is_checked() {
        let e = sample_embedding(3, 5, 1).unwrap();
        let z = e.project(&DMatrix::zeros(4, 5)).unwrap();
        assert_eq!(z, DMatrix::zeros(4, 3));
        assert!(e.project(&DMatrix::zeros(4, 6)).is_err());
    }

    #[test]
    fn unit_row_picks_first_coordinate() {
        let mut a = DMatrix::zeros(1, 4);
        a[(0, 0)] = 1.0;
        let e = GaussianEmbedding::from_matrix(a).unwrap();
        let x = doe::lhs(10, 4, 2).unwrap().points;
        let z = e.project(&x).unwrap();
        for i in 0..10 {
            assert_eq!(z[(i, 0)], x[(i, 0)]);
        }
    }

    #[test]
    fn identity_ratios_are_inverse_sqrt_d() {
        let d = 4;
        let e = GaussianEmbedding::from_matrix(DMatrix::identity(d, d)).unwrap();
        let x = doe::lhs(12, d, 5).unwrap().points;
        let expected = 1.0 / (d as f64).sqrt();
        for r in e.distance_ratios(&x).unwrap() {
            assert!((r - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn coincident_points_are_degenerate() {
        let e = sample_embedding(2, 3, 0).unwrap();
        let x = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
        assert!(matches!(e.distance_distortion(&x), Err(Error::Degenerate(_))));
    }
}
