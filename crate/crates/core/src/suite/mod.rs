//! Noiseless BBOB-style benchmark functions with seeded instances.
//!
//! The 24 function families follow the published noiseless BBOB
//! definitions. Instances are generated by our own counter-based scheme:
//! the same `(function_id, instance_id, dimension)` triple always produces
//! bit-identical transform parameters, but they are not the COCO values.

mod functions;
mod transforms;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::seed::{self, tag};

pub use transforms::{f_pen, t_asy, t_osz};

pub const DOMAIN_LOWER: f64 = -5.0;
pub const DOMAIN_UPPER: f64 = 5.0;
pub const NUM_FUNCTIONS: u32 = 24;

/// Five-way BBOB taxonomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctionGroup {
    Separable,
    LowModerateConditioning,
    HighConditioningUnimodal,
    MultimodalAdequateStructure,
    MultimodalWeakStructure,
}

impl FunctionGroup {
    pub fn of(function_id: u32) -> Option<Self> {
        Some(match function_id {
            1..=5 => FunctionGroup::Separable,
            6..=9 => FunctionGroup::LowModerateConditioning,
            10..=14 => FunctionGroup::HighConditioningUnimodal,
            15..=19 => FunctionGroup::MultimodalAdequateStructure,
            20..=24 => FunctionGroup::MultimodalWeakStructure,
            _ => return None,
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            FunctionGroup::Separable => "separable",
            FunctionGroup::LowModerateConditioning => "low or moderate conditioning",
            FunctionGroup::HighConditioningUnimodal => "high conditioning and unimodal",
            FunctionGroup::MultimodalAdequateStructure => "multi-modal with adequate global structure",
            FunctionGroup::MultimodalWeakStructure => "multi-modal with weak global structure",
        }
    }
}

pub fn function_name(function_id: u32) -> Option<&'static str> {
    const NAMES: [&str; 24] = [
        "Sphere",
        "Separable Ellipsoidal",
        "Separable Rastrigin",
        "Buche-Rastrigin",
        "Linear Slope",
        "Attractive Sector",
        "Step Ellipsoidal",
        "Rosenbrock (original)",
        "Rosenbrock (rotated)",
        "Ellipsoidal",
        "Discus",
        "Bent Cigar",
        "Sharp Ridge",
        "Different Powers",
        "Rastrigin",
        "Weierstrass",
        "Schaffers F7",
        "Schaffers F7 (ill-conditioned)",
        "Composite Griewank-Rosenbrock F8F2",
        "Schwefel x*sin(x)",
        "Gallagher 101 Peaks",
        "Gallagher 21 Peaks",
        "Katsuura",
        "Lunacek bi-Rastrigin",
    ];
    (1..=NUM_FUNCTIONS)
        .contains(&function_id)
        .then(|| NAMES[function_id as usize - 1])
}

/// The box every instance is sampled from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchDomain {
    pub lower: f64,
    pub upper: f64,
    pub dimension: usize,
}

impl SearchDomain {
    pub fn bbob(dimension: usize) -> Self {
        SearchDomain {
            lower: DOMAIN_LOWER,
            upper: DOMAIN_UPPER,
            dimension,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains_strictly(&self, x: &[f64]) -> bool {
        x.len() == self.dimension && x.iter().all(|&v| v > self.lower && v < self.upper)
    }
}

/// Peak layout of the Gallagher functions (f21, f22).
#[derive(Clone, Debug)]
pub(crate) struct PeakField {
    /// Peak centres already rotated, `R * y_i`.
    pub rotated_centres: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Diagonal of `C_i`, one row per peak.
    pub scales: Vec<Vec<f64>>,
}

/// A seeded, transformed benchmark function with a known optimum.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    function_id: u32,
    instance_id: u32,
    dimension: usize,
    x_opt: Vec<f64>,
    f_opt: f64,
    rotation_seeds: (u64, u64),
    group: FunctionGroup,
    pub(crate) rot_r: Option<DMatrix<f64>>,
    pub(crate) rot_q: Option<DMatrix<f64>>,
    pub(crate) peaks: Option<PeakField>,
}

fn uses_r(fid: u32) -> bool {
    matches!(fid, 6 | 7 | 9..=19 | 21..=24)
}

fn uses_q(fid: u32) -> bool {
    matches!(fid, 6 | 7 | 13 | 15..=18 | 23 | 24)
}

/// Orthogonal factor of a seeded standard-Gaussian matrix, with columns
/// sign-corrected so the triangular factor has a positive diagonal.
pub fn seeded_rotation(dimension: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = seed::rng(&[tag::ROTATION, seed]);
    let gauss = DMatrix::from_fn(dimension, dimension, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = gauss.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dimension {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Builds an instance. Deterministic in `(function_id, instance_id, dimension)`.
pub fn make_instance(function_id: u32, instance_id: u32, dimension: usize) -> Result<ProblemInstance> {
    let group = FunctionGroup::of(function_id)
        .ok_or_else(|| Error::domain(format!("function_id {function_id} outside 1..={NUM_FUNCTIONS}")))?;
    if dimension < 2 {
        return Err(Error::domain(format!("dimension {dimension} < 2")));
    }
    let d = dimension;
    let key = [tag::INSTANCE, function_id as u64, instance_id as u64, d as u64];
    let mut rng = seed::rng(&key);

    // Draw order is part of the determinism contract.
    let uniform_opt: Vec<f64> = (0..d).map(|_| rng.random_range(-4.0..4.0)).collect();
    let f_opt = rng.random_range(-100.0..100.0);
    let signs: Vec<f64> = (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();

    let x_opt = match function_id {
        5 => signs.iter().map(|s| 4.0 * s).collect(),
        20 => signs.iter().map(|s| functions::SCHWEFEL_HALF_OPT * s).collect(),
        24 => signs.iter().map(|s| functions::LUNACEK_MU0 / 2.0 * s).collect(),
        _ => uniform_opt,
    };

    let rotation_seeds = (
        seed::mix(&[tag::ROTATION, function_id as u64, instance_id as u64, d as u64, 0]),
        seed::mix(&[tag::ROTATION, function_id as u64, instance_id as u64, d as u64, 1]),
    );
    let rot_r = uses_r(function_id).then(|| seeded_rotation(d, rotation_seeds.0));
    let rot_q = uses_q(function_id).then(|| seeded_rotation(d, rotation_seeds.1));

    let peaks = match function_id {
        21 | 22 => Some(gallagher_field(
            function_id,
            &x_opt,
            rot_r.as_ref().expect("gallagher uses R"),
            &mut rng,
        )),
        _ => None,
    };

    Ok(ProblemInstance {
        function_id,
        instance_id,
        dimension,
        x_opt,
        f_opt,
        rotation_seeds,
        group,
        rot_r,
        rot_q,
        peaks,
    })
}

fn gallagher_field(function_id: u32, x_opt: &[f64], rot: &DMatrix<f64>, rng: &mut impl Rng) -> PeakField {
    let d = x_opt.len();
    let (n_peaks, bound, top_cond) = if function_id == 21 {
        (101usize, 5.0, 1000.0)
    } else {
        (21usize, 4.9, 1000.0 * 1000.0)
    };
    let n_local = n_peaks - 1;

    let mut conds: Vec<f64> = (0..n_local)
        .map(|j| 1000f64.powf(2.0 * j as f64 / (n_local - 1) as f64))
        .collect();
    conds.shuffle(rng);
    conds.insert(0, top_cond);

    let mut centres = vec![x_opt.to_vec()];
    for _ in 1..n_peaks {
        centres.push((0..d).map(|_| rng.random_range(-bound..bound)).collect());
    }

    let mut weights = vec![10.0];
    weights.extend((2..=n_peaks).map(|i| 1.1 + 8.0 * (i - 2) as f64 / (n_peaks - 2) as f64));

    let scales = conds
        .iter()
        .map(|&alpha| {
            let mut perm: Vec<usize> = (0..d).collect();
            perm.shuffle(rng);
            perm.iter()
                .map(|&j| alpha.powf(0.5 * j as f64 / (d - 1) as f64) / alpha.powf(0.25))
                .collect()
        })
        .collect();

    let rotated_centres = centres.iter().map(|c| transforms::mat_vec(rot, c)).collect();

    PeakField {
        rotated_centres,
        weights,
        scales,
    }
}

impl ProblemInstance {
    pub fn function_id(&self) -> u32 {
        self.function_id
    }

    pub fn instance_id(&self) -> u32 {
        self.instance_id
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn x_opt(&self) -> &[f64] {
        &self.x_opt
    }

    pub fn f_opt(&self) -> f64 {
        self.f_opt
    }

    pub fn rotation_seeds(&self) -> (u64, u64) {
        self.rotation_seeds
    }

    pub fn group(&self) -> FunctionGroup {
        self.group
    }

    pub fn domain(&self) -> SearchDomain {
        SearchDomain::bbob(self.dimension)
    }

    /// First rotation, present for rotated functions.
    pub fn rotation_r(&self) -> Option<&DMatrix<f64>> {
        self.rot_r.as_ref()
    }

    /// Second rotation, present for functions that use two.
    pub fn rotation_q(&self) -> Option<&DMatrix<f64>> {
        self.rot_q.as_ref()
    }

    /// Objective value at `x`. Points outside the box are evaluated as is;
    /// functions with a boundary penalty apply it.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension {
            return Err(Error::domain(format!(
                "point has {} coordinates, instance dimension is {}",
                x.len(),
                self.dimension
            )));
        }
        if let Some(bad) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("coordinate {bad} is not finite")));
        }
        Ok(functions::raw_value(self, x) + self.f_opt)
    }

    /// Evaluates every row of a points matrix.
    pub fn evaluate_rows(&self, points: &DMatrix<f64>) -> Result<Vec<f64>> {
        let mut buf = vec![0.0; points.ncols()];
        (0..points.nrows())
            .map(|i| {
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = points[(i, j)];
                }
                self.evaluate(&buf)
            })
            .collect()
    }
}
