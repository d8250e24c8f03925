//! Meta-model features: linear and quadratic least-squares fits.

use nalgebra::{DMatrix, DVector};

use super::{Dataset, FeatureSet, FeatureStatus, FeatureValue, SetValues};
use crate::error::{Error, Result};

/// Regressor sets used by the meta-model features.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// `x_1 .. x_p`
    Linear,
    /// linear terms plus all `x_i x_j`, `i < j`
    LinearInteractions,
    /// linear terms plus `x_i^2`
    PureQuadratic,
    /// linear, squared and interaction terms
    FullQuadratic,
}

impl Basis {
    pub fn width(self, p: usize) -> usize {
        let inter = p * p.saturating_sub(1) / 2;
        match self {
            Basis::Linear => p,
            Basis::LinearInteractions => p + inter,
            Basis::PureQuadratic => 2 * p,
            Basis::FullQuadratic => 2 * p + inter,
        }
    }

    /// Expands an `S x p` matrix into the basis columns, ordered as linear
    /// terms, then squares, then interactions.
    pub fn expand(self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let (s, p) = x.shape();
        let squares = matches!(self, Basis::PureQuadratic | Basis::FullQuadratic);
        let inter = matches!(self, Basis::LinearInteractions | Basis::FullQuadratic);
        let mut out = DMatrix::zeros(s, self.width(p));
        out.columns_mut(0, p).copy_from(x);
        let mut c = p;
        if squares {
            for j in 0..p {
                for i in 0..s {
                    out[(i, c)] = x[(i, j)] * x[(i, j)];
                }
                c += 1;
            }
        }
        if inter {
            for a in 0..p {
                for b in a + 1..p {
                    for i in 0..s {
                        out[(i, c)] = x[(i, a)] * x[(i, b)];
                    }
                    c += 1;
                }
            }
        }
        out
    }
}

/// Least-squares fit with an intercept.
#[derive(Clone, Debug, PartialEq)]
pub struct OlsFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub r2: f64,
    pub adjusted_r2: f64,
    /// Number of non-intercept regressors counted by the adjusted R².
    pub effective_params: usize,
    /// True when the fit came from the ridge fallback.
    pub regularized: bool,
}

fn r_squared(design: &DMatrix<f64>, y: &[f64], intercept: f64, beta: &DVector<f64>) -> (f64, f64) {
    let n = y.len() as f64;
    let ybar = y.iter().sum::<f64>() / n;
    let fitted = design * beta;
    let mut rss = 0.0;
    let mut tss = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let r = yi - intercept - fitted[i];
        rss += r * r;
        tss += (yi - ybar) * (yi - ybar);
    }
    (rss, tss)
}

fn adjusted(r2: f64, s: usize, p: usize) -> f64 {
    1.0 - (1.0 - r2) * (s as f64 - 1.0) / (s as f64 - p as f64 - 1.0)
}

/// Ordinary least squares on `[1 | design]` via Householder QR.
///
/// Errors with [`Error::Degenerate`] when `S < P + 2`, when the augmented
/// design is numerically rank deficient, or when `y` is constant.
pub fn fit_ols(design: &DMatrix<f64>, y: &[f64]) -> Result<OlsFit> {
    let (s, p) = design.shape();
    if y.len() != s {
        return Err(Error::domain(format!("{s} rows but {} targets", y.len())));
    }
    if s < p + 2 {
        return Err(Error::Degenerate(format!("{s} samples for {p} regressors")));
    }
    let mut aug = DMatrix::zeros(s, p + 1);
    aug.column_mut(0).fill(1.0);
    aug.columns_mut(1, p).copy_from(design);

    let qr = aug.qr();
    let r = qr.r();
    let diag_max = (0..=p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    let tol = s.max(p + 1) as f64 * f64::EPSILON * diag_max;
    if (0..=p).any(|i| r[(i, i)].abs() <= tol) {
        return Err(Error::Degenerate("design is rank deficient".into()));
    }
    let qty = qr.q().transpose() * DVector::from_column_slice(y);
    let sol = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Degenerate("singular triangular factor".into()))?;

    let intercept = sol[0];
    let beta = sol.rows(1, p).into_owned();
    let (rss, tss) = r_squared(design, y, intercept, &beta);
    if tss == 0.0 {
        return Err(Error::Degenerate("constant response".into()));
    }
    let r2 = 1.0 - rss / tss;
    Ok(OlsFit {
        intercept,
        coefficients: beta.iter().copied().collect(),
        r2,
        adjusted_r2: adjusted(r2, s, p),
        effective_params: p,
        regularized: false,
    })
}

/// Ridge-stabilised fit on centred columns, for bases wider than the sample.
/// The adjusted R² uses the numerical rank of the centred design in place
/// of the column count.
pub fn fit_ridge(design: &DMatrix<f64>, y: &[f64]) -> Result<OlsFit> {
    let (s, p) = design.shape();
    let n = s as f64;
    let means: Vec<f64> = (0..p).map(|j| design.column(j).sum() / n).collect();
    let ybar = y.iter().sum::<f64>() / n;
    let xc = DMatrix::from_fn(s, p, |i, j| design[(i, j)] - means[j]);
    let yc = DVector::from_fn(s, |i, _| y[i] - ybar);

    let mut gram = xc.transpose() * &xc;
    let lambda = 1e-8 * gram.trace().max(f64::MIN_POSITIVE) / p as f64;
    for i in 0..p {
        gram[(i, i)] += lambda;
    }
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Degenerate("ridge system not positive definite".into()))?;
    let beta = chol.solve(&(xc.transpose() * yc));
    let intercept = ybar - beta.iter().zip(&means).map(|(b, m)| b * m).sum::<f64>();

    let (rss, tss) = r_squared(design, y, intercept, &beta);
    if tss == 0.0 {
        return Err(Error::Degenerate("constant response".into()));
    }
    let sv = xc.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv
        .iter()
        .filter(|&&v| v > s.max(p) as f64 * f64::EPSILON * smax)
        .count();
    let r2 = 1.0 - rss / tss;
    Ok(OlsFit {
        intercept,
        coefficients: beta.iter().copied().collect(),
        r2,
        adjusted_r2: adjusted(r2, s, rank),
        effective_params: rank,
        regularized: true,
    })
}

fn abs_range(coefs: &[f64]) -> (f64, f64) {
    coefs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), c| {
        (lo.min(c.abs()), hi.max(c.abs()))
    })
}

fn ratio(num: f64, den: f64) -> FeatureValue {
    if den == 0.0 {
        FeatureValue {
            value: num / den,
            status: FeatureStatus::NonFinite,
        }
    } else {
        FeatureValue::ok(num / den)
    }
}

/// Adjusted R² of a basis, falling back to the ridge fit (flagged
/// degenerate) when the basis is wider than the sample allows.
fn basis_adj_r2(x: &DMatrix<f64>, y: &[f64], basis: Basis) -> FeatureValue {
    let design = basis.expand(x);
    match fit_ols(&design, y) {
        Ok(fit) => FeatureValue::ok(fit.adjusted_r2),
        Err(_) => match fit_ridge(&design, y) {
            Ok(fit) => FeatureValue::degenerate(fit.adjusted_r2),
            Err(_) => FeatureValue::missing(),
        },
    }
}

pub fn compute_ela_meta(ds: &Dataset) -> SetValues {
    let x = ds.points();
    let y = ds.objectives();
    let p = ds.dim();
    let mut values = Vec::with_capacity(9);

    match fit_ols(x, y) {
        Ok(lin) => {
            let (lo, hi) = abs_range(&lin.coefficients);
            values.push(FeatureValue::ok(lin.adjusted_r2));
            values.push(FeatureValue::ok(lin.intercept));
            values.push(FeatureValue::ok(lo));
            values.push(FeatureValue::ok(hi));
            values.push(ratio(hi, lo));
        }
        Err(_) => values.extend([FeatureValue::missing(); 5]),
    }

    values.push(basis_adj_r2(x, y, Basis::LinearInteractions));

    match fit_ols(&Basis::PureQuadratic.expand(x), y) {
        Ok(q) => {
            let (lo, hi) = abs_range(&q.coefficients[p..]);
            values.push(FeatureValue::ok(q.adjusted_r2));
            values.push(ratio(hi, lo));
        }
        Err(_) => values.extend([FeatureValue::missing(); 2]),
    }

    values.push(basis_adj_r2(x, y, Basis::FullQuadratic));
    SetValues::new(FeatureSet::Meta, values)
}
