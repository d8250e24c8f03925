//! Latin-hypercube designs over the search box.

use nalgebra::DMatrix;
use rand::distr::Open01;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::{self, tag};
use crate::suite::{DOMAIN_LOWER, DOMAIN_UPPER};

/// An `S x D` stratified sample of `[-5, 5]^D`.
#[derive(Clone, Debug, PartialEq)]
pub struct Design {
    pub design_id: u32,
    pub seed: u64,
    pub points: DMatrix<f64>,
}

impl Design {
    pub fn sample_size(&self) -> usize {
        self.points.nrows()
    }

    pub fn dimension(&self) -> usize {
        self.points.ncols()
    }
}

/// Plain Latin hypercube with uniform jitter inside each bin.
///
/// Each column gets its own seeded permutation of the `S` bins. The jitter
/// is drawn from the open unit interval, so no point lands on a bin edge or
/// on the box boundary.
pub fn lhs(sample_size: usize, dimension: usize, seed: u64) -> Result<Design> {
    if sample_size < 2 {
        return Err(Error::domain(format!("sample_size {sample_size} < 2")));
    }
    if dimension < 1 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let mut rng = seed::rng(&[tag::DESIGN, seed, sample_size as u64, dimension as u64]);
    let width = (DOMAIN_UPPER - DOMAIN_LOWER) / sample_size as f64;
    let mut points = DMatrix::zeros(sample_size, dimension);
    let mut bins: Vec<usize> = (0..sample_size).collect();
    for j in 0..dimension {
        bins.shuffle(&mut rng);
        for (i, &b) in bins.iter().enumerate() {
            let u: f64 = rng.sample(Open01);
            points[(i, j)] = DOMAIN_LOWER + (b as f64 + u) * width;
        }
    }
    Ok(Design {
        design_id: 0,
        seed,
        points,
    })
}

/// Bin index of `v` when `[-5, 5]` is cut into `bins` equal pieces.
pub fn bin_of(v: f64, bins: usize) -> usize {
    let w = (DOMAIN_UPPER - DOMAIN_LOWER) / bins as f64;
    (((v - DOMAIN_LOWER) / w).floor() as usize).min(bins - 1)
}

/// True when every column has exactly one point per bin.
pub fn is_stratified(points: &DMatrix<f64>) -> bool {
    let s = points.nrows();
    (0..points.ncols()).all(|j| {
        let mut seen = vec![false; s];
        points.column(j).iter().all(|&v| {
            let b = bin_of(v, s);
            !std::mem::replace(&mut seen[b], true)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_four_points_one_per_bin() {
        let d = lhs(4, 1, 9).unwrap();
        let mut v: Vec<f64> = d.points.column(0).iter().copied().collect();
        v.sort_by(f64::total_cmp);
        for (k, x) in v.iter().enumerate() {
            assert_eq!(bin_of(*x, 4), k);
        }
    }

    #[test]
    fn stratified_and_strictly_inside() {
        let d = lhs(200, 20, 3).unwrap();
        assert!(is_stratified(&d.points));
        assert!(d.points.iter().all(|&v| v > -5.0 && v < 5.0));
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(lhs(200, 20, 5).unwrap(), lhs(200, 20, 5).unwrap());
        assert_ne!(lhs(200, 20, 5).unwrap().points, lhs(200, 20, 6).unwrap().points);
    }

    #[test]
    fn column_means_concentrate() {
        // sd of an LHS column mean is at most (10/sqrt 12)/sqrt S ~ 0.0645 at S = 2000
        let d = lhs(2000, 20, 1).unwrap();
        for j in 0..20 {
            let m = d.points.column(j).mean();
            assert!(m.abs() <= 0.25, "column {j} mean {m}");
        }
    }

    #[test]
    fn too_small_is_rejected() {
        assert!(lhs(1, 3, 0).is_err());
        assert!(lhs(3, 0, 0).is_err());
    }
}
