//! Raw objective values (without `f_opt`) for the 24 function families.

use std::f64::consts::PI;

use super::transforms::{f_pen, lambda, mat_vec, scale_lambda, t_asy, t_osz, t_osz_scalar};
use super::ProblemInstance;

/// Half of the Schwefel optimum location in x-hat coordinates.
pub(crate) const SCHWEFEL_HALF_OPT: f64 = 4.209_687_463_3 / 2.0;
const SCHWEFEL_OFFSET: f64 = 4.189_828_872_724_339;
pub(crate) const LUNACEK_MU0: f64 = 2.5;

fn shifted(inst: &ProblemInstance, x: &[f64]) -> Vec<f64> {
    x.iter().zip(&inst.x_opt).map(|(a, b)| a - b).collect()
}

fn rot_r(inst: &ProblemInstance, v: &[f64]) -> Vec<f64> {
    mat_vec(inst.rot_r.as_ref().expect("instance carries R"), v)
}

fn rot_q(inst: &ProblemInstance, v: &[f64]) -> Vec<f64> {
    mat_vec(inst.rot_q.as_ref().expect("instance carries Q"), v)
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn rastrigin_core(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    10.0 * (d - z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>()) + sum_sq(z)
}

fn ellipsoid_core(z: &[f64]) -> f64 {
    let d = z.len();
    z.iter()
        .enumerate()
        .map(|(i, v)| 10f64.powf(6.0 * i as f64 / (d - 1) as f64) * v * v)
        .sum()
}

fn rosenbrock_core(z: &[f64]) -> f64 {
    z.windows(2)
        .map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

fn rosenbrock_scale(d: usize) -> f64 {
    (d as f64).sqrt().max(8.0) / 8.0
}

fn schaffers(inst: &ProblemInstance, x: &[f64], cond: f64) -> f64 {
    let mut z = rot_r(inst, &shifted(inst, x));
    t_asy(&mut z, 0.5);
    let mut z = rot_q(inst, &z);
    scale_lambda(&mut z, cond);
    let d = z.len();
    let mut acc = 0.0;
    for w in z.windows(2) {
        let s = (w[0] * w[0] + w[1] * w[1]).sqrt();
        let rs = s.sqrt();
        acc += rs + rs * (50.0 * s.powf(0.2)).sin().powi(2);
    }
    (acc / (d - 1) as f64).powi(2) + 10.0 * f_pen(x)
}

fn gallagher(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let field = inst.peaks.as_ref().expect("gallagher instance carries peaks");
    let d = x.len();
    let rx = rot_r(inst, x);
    let mut best = f64::NEG_INFINITY;
    for ((centre, w), scale) in field.rotated_centres.iter().zip(&field.weights).zip(&field.scales) {
        let quad: f64 = rx
            .iter()
            .zip(centre)
            .zip(scale)
            .map(|((a, c), s)| s * (a - c) * (a - c))
            .sum();
        best = best.max(w * (-quad / (2.0 * d as f64)).exp());
    }
    t_osz_scalar(10.0 - best).powi(2) + f_pen(x)
}

pub(crate) fn raw_value(inst: &ProblemInstance, x: &[f64]) -> f64 {
    let d = x.len();
    let df = d as f64;
    match inst.function_id {
        1 => sum_sq(&shifted(inst, x)),
        2 => {
            let mut z = shifted(inst, x);
            t_osz(&mut z);
            ellipsoid_core(&z)
        }
        3 => {
            let mut z = shifted(inst, x);
            t_osz(&mut z);
            t_asy(&mut z, 0.2);
            scale_lambda(&mut z, 10.0);
            rastrigin_core(&z)
        }
        4 => {
            let mut z = shifted(inst, x);
            t_osz(&mut z);
            for (i, v) in z.iter_mut().enumerate() {
                let base = lambda(10.0, i, d);
                *v *= if *v > 0.0 && i % 2 == 0 { 10.0 * base } else { base };
            }
            rastrigin_core(&z) + 100.0 * f_pen(x)
        }
        5 => {
            // Slope with its plateau corner at x_opt = +-4.
            let mut acc = 0.0;
            for (i, (&xi, &oi)) in x.iter().zip(&inst.x_opt).enumerate() {
                let s = oi.signum() * 10f64.powf(i as f64 / (df - 1.0));
                let zi = if xi * oi < oi * oi { xi } else { oi };
                acc += oi.abs() * s.abs() - s * zi;
            }
            acc
        }
        6 => {
            let mut z = rot_r(inst, &shifted(inst, x));
            scale_lambda(&mut z, 10.0);
            let z = rot_q(inst, &z);
            let s: f64 = z
                .iter()
                .zip(&inst.x_opt)
                .map(|(zi, oi)| {
                    let si = if zi * oi > 0.0 { 100.0 } else { 1.0 };
                    (si * zi).powi(2)
                })
                .sum();
            t_osz_scalar(s).powf(0.9)
        }
        7 => {
            let mut zh = rot_r(inst, &shifted(inst, x));
            scale_lambda(&mut zh, 10.0);
            let zt: Vec<f64> = zh
                .iter()
                .map(|&v| {
                    if v.abs() > 0.5 {
                        (0.5 + v).floor()
                    } else {
                        (0.5 + 10.0 * v).floor() / 10.0
                    }
                })
                .collect();
            let z = rot_q(inst, &zt);
            let body: f64 = z
                .iter()
                .enumerate()
                .map(|(i, v)| 10f64.powf(2.0 * i as f64 / (df - 1.0)) * v * v)
                .sum();
            0.1 * (zh[0].abs() / 1e4).max(body) + f_pen(x)
        }
        8 => {
            let c = rosenbrock_scale(d);
            let z: Vec<f64> = shifted(inst, x).iter().map(|v| c * v + 1.0).collect();
            rosenbrock_core(&z)
        }
        9 => {
            let c = rosenbrock_scale(d);
            let z: Vec<f64> = rot_r(inst, &shifted(inst, x)).iter().map(|v| c * v + 1.0).collect();
            rosenbrock_core(&z)
        }
        10 => {
            let mut z = rot_r(inst, &shifted(inst, x));
            t_osz(&mut z);
            ellipsoid_core(&z)
        }
        11 => {
            let mut z = rot_r(inst, &shifted(inst, x));
            t_osz(&mut z);
            1e6 * z[0] * z[0] + sum_sq(&z[1..])
        }
        12 => {
            let mut z = rot_r(inst, &shifted(inst, x));
            t_asy(&mut z, 0.5);
            let z = rot_r(inst, &z);
            z[0] * z[0] + 1e6 * sum_sq(&z[1..])
        }
        13 => {
            let mut z = rot_r(inst, &shifted(inst, x));
            scale_lambda(&mut z, 10.0);
            let z = rot_q(inst, &z);
            z[0] * z[0] + 100.0 * sum_sq(&z[1..]).sqrt()
        }
        14 => {
            let z = rot_r(inst, &shifted(inst, x));
            z.iter()
                .enumerate()
                .map(|(i, v)| v.abs().powf(2.0 + 4.0 * i as f64 / (df - 1.0)))
                .sum::<f64>()
                .sqrt()
        }
        15 => {
            let mut z = rot_r(inst, &shifted(inst, x));
            t_osz(&mut z);
            t_asy(&mut z, 0.2);
            let mut z = rot_q(inst, &z);
            scale_lambda(&mut z, 10.0);
            let z = rot_r(inst, &z);
            rastrigin_core(&z)
        }
        16 => {
            let mut z = rot_r(inst, &shifted(inst, x));
            t_osz(&mut z);
            let mut z = rot_q(inst, &z);
            scale_lambda(&mut z, 0.01);
            let z = rot_r(inst, &z);
            let f0: f64 = (0..12).map(|k| 0.5f64.powi(k) * (PI * 3f64.powi(k)).cos()).sum();
            let mut acc = 0.0;
            for v in &z {
                for k in 0..12 {
                    acc += 0.5f64.powi(k) * (2.0 * PI * 3f64.powi(k) * (v + 0.5)).cos();
                }
            }
            10.0 * (acc / df - f0).powi(3) + 10.0 / df * f_pen(x)
        }
        17 => schaffers(inst, x, 10.0),
        18 => schaffers(inst, x, 1000.0),
        19 => {
            let c = rosenbrock_scale(d);
            let z: Vec<f64> = rot_r(inst, &shifted(inst, x)).iter().map(|v| c * v + 1.0).collect();
            let acc: f64 = z
                .windows(2)
                .map(|w| {
                    let s = 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2);
                    s / 4000.0 - s.cos()
                })
                .sum();
            10.0 / (df - 1.0) * acc + 10.0
        }
        20 => {
            let two_abs: Vec<f64> = inst.x_opt.iter().map(|o| 2.0 * o.abs()).collect();
            let xh: Vec<f64> = x
                .iter()
                .zip(&inst.x_opt)
                .map(|(xi, oi)| 2.0 * oi.signum() * xi)
                .collect();
            let mut zh = xh.clone();
            for i in 1..d {
                zh[i] = xh[i] + 0.25 * (xh[i - 1] - two_abs[i - 1]);
            }
            let z: Vec<f64> = (0..d)
                .map(|i| 100.0 * (lambda(10.0, i, d) * (zh[i] - two_abs[i]) + two_abs[i]))
                .collect();
            let zs: Vec<f64> = z.iter().map(|v| v / 100.0).collect();
            let body: f64 = z.iter().map(|v| v * v.abs().sqrt().sin()).sum();
            -body / (100.0 * df) + SCHWEFEL_OFFSET + 100.0 * f_pen(&zs)
        }
        21 | 22 => gallagher(inst, x),
        23 => {
            let mut z = rot_r(inst, &shifted(inst, x));
            scale_lambda(&mut z, 100.0);
            let z = rot_q(inst, &z);
            let expo = 10.0 / df.powf(1.2);
            let mut prod = 1.0;
            for (i, v) in z.iter().enumerate() {
                let mut s = 0.0;
                for j in 1..=32 {
                    let p = 2f64.powi(j);
                    s += (p * v - (p * v).round()).abs() / p;
                }
                prod *= (1.0 + (i + 1) as f64 * s).powf(expo);
            }
            10.0 / (df * df) * prod - 10.0 / (df * df) + f_pen(x)
        }
        24 => {
            let mu0 = LUNACEK_MU0;
            let s = 1.0 - 1.0 / (2.0 * (df + 20.0).sqrt() - 8.2);
            let mu1 = -((mu0 * mu0 - 1.0) / s).sqrt();
            let xh: Vec<f64> = x
                .iter()
                .zip(&inst.x_opt)
                .map(|(xi, oi)| 2.0 * oi.signum() * xi)
                .collect();
            let centred: Vec<f64> = xh.iter().map(|v| v - mu0).collect();
            let mut z = rot_r(inst, &centred);
            scale_lambda(&mut z, 100.0);
            let z = rot_q(inst, &z);
            let first = sum_sq(&centred);
            let second = df + s * xh.iter().map(|v| (v - mu1).powi(2)).sum::<f64>();
            let rast = 10.0 * (df - z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>());
            first.min(second) + rast + 1e4 * f_pen(x)
        }
        _ => unreachable!("function id validated at construction"),
    }
}

#[cfg(test)]
mod tests {
    use super::super::make_instance;
    use super::*;

    #[test]
    fn rosenbrock_hits_zero_at_all_ones_inner_variable() {
        // Invert z = c (x - x_opt) + 1 for z = 1 analytically: x = x_opt.
        // Probe a second point: z = (1, ..., 1, 0) maps to x_opt - e_D / c.
        let inst = make_instance(8, 3, 20).unwrap();
        let c = rosenbrock_scale(20);
        let x = inst.x_opt().to_vec();
        assert!((inst.evaluate(&x).unwrap() - inst.f_opt()).abs() < 1e-9);
        let mut y = x.clone();
        y[19] -= 1.0 / c;
        // only the last window changes: 100 (1 - 0)^2 + 0
        let v = inst.evaluate(&y).unwrap() - inst.f_opt();
        assert!((v - 100.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn weierstrass_offset_cancels() {
        let f0: f64 = (0..12).map(|k| 0.5f64.powi(k) * (PI * 3f64.powi(k)).cos()).sum();
        assert!((f0 + (2.0 - 0.5f64.powi(11))).abs() < 1e-12);
    }
}
