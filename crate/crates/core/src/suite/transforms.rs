//! Coordinate transforms shared by the BBOB function definitions.

use nalgebra::DMatrix;

pub(crate) fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    let (rows, cols) = m.shape();
    debug_assert_eq!(cols, x.len());
    (0..rows).map(|i| (0..cols).map(|j| m[(i, j)] * x[j]).sum()).collect()
}

/// Oscillation transform, applied elementwise.
pub fn t_osz(v: &mut [f64]) {
    for x in v.iter_mut() {
        *x = t_osz_scalar(*x);
    }
}

pub(crate) fn t_osz_scalar(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let xh = x.abs().ln();
    let (c1, c2) = if x > 0.0 { (10.0, 7.9) } else { (5.5, 3.1) };
    x.signum() * (xh + 0.049 * ((c1 * xh).sin() + (c2 * xh).sin())).exp()
}

/// Asymmetry transform with strength `beta`; only positive coordinates move.
pub fn t_asy(v: &mut [f64], beta: f64) {
    let n = v.len();
    for (i, x) in v.iter_mut().enumerate() {
        if *x > 0.0 {
            let frac = i as f64 / (n - 1) as f64;
            *x = x.powf(1.0 + beta * frac * x.sqrt());
        }
    }
}

/// Diagonal conditioning factor `alpha^(i / (2(D-1)))` for coordinate `i`.
pub(crate) fn lambda(alpha: f64, i: usize, d: usize) -> f64 {
    alpha.powf(0.5 * i as f64 / (d - 1) as f64)
}

pub(crate) fn scale_lambda(v: &mut [f64], alpha: f64) {
    let d = v.len();
    for (i, x) in v.iter_mut().enumerate() {
        *x *= lambda(alpha, i, d);
    }
}

/// Boundary penalty `sum max(0, |x_i| - 5)^2`.
pub fn f_pen(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| {
            let e = v.abs() - 5.0;
            if e > 0.0 {
                e * e
            } else {
                0.0
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_osz_fixes_zero_and_keeps_sign() {
        assert_eq!(t_osz_scalar(0.0), 0.0);
        assert!(t_osz_scalar(2.0) > 0.0);
        assert!(t_osz_scalar(-2.0) < 0.0);
        // at |x| = 1 the log is zero and the transform is the identity
        assert_eq!(t_osz_scalar(1.0), 1.0);
        assert_eq!(t_osz_scalar(-1.0), -1.0);
    }

    #[test]
    fn t_asy_leaves_first_and_negative_coordinates() {
        let mut v = [2.0, -3.0, 4.0];
        t_asy(&mut v, 0.5);
        assert_eq!(v[0], 2.0);
        assert_eq!(v[1], -3.0);
        assert!((v[2] - 4f64.powf(1.0 + 0.5 * 2.0)).abs() < 1e-12);
    }

    #[test]
    fn penalty_only_outside_box() {
        assert_eq!(f_pen(&[5.0, -5.0, 0.0]), 0.0);
        assert!((f_pen(&[6.0, -7.0]) - 5.0).abs() < 1e-15);
    }
}
