//! Fixed embedded quadrature rules: Gauss-Kronrod 15(7) on an interval and
//! the Genz-Malik degree 7(5) rule on an axis-aligned box, plus
//! Gauss-Legendre node generation for the angular grids.

use alloc::vec;
use alloc::vec::Vec;

use crate::fmath;

/// Output of one rule application on one region.
pub struct RuleOut {
    pub values: Vec<f64>,
    pub err: f64,
    pub split_dim: usize,
    pub evals: u64,
    /// Set when a sample came back non-finite; carries the point.
    pub bad_point: Option<Vec<f64>>,
}

// Gauss-Kronrod 15-point nodes (positive half) and weights, 7-point Gauss
// weights embedded. Standard values.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_2,
    0.949_107_912_342_758_524_5,
    0.864_864_423_359_769_072_8,
    0.741_531_185_599_394_439_9,
    0.586_087_235_467_691_130_3,
    0.405_845_151_377_397_166_9,
    0.207_784_955_007_898_467_6,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_96,
    0.063_092_092_629_978_553_29,
    0.104_790_010_322_250_183_9,
    0.140_653_259_715_525_918_7,
    0.169_004_726_639_267_902_8,
    0.190_350_578_064_785_409_9,
    0.204_432_940_075_298_892_1,
    0.209_482_141_084_727_828_1,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_3,
    0.279_705_391_489_276_667_9,
    0.381_830_050_505_118_944_9,
    0.417_959_183_673_469_387_8,
];

/// Applies GK15(7) to `[a, b]` for an `n_out`-component integrand.
pub fn gauss_kronrod_15<F>(f: &F, a: f64, b: f64, n_out: usize) -> RuleOut
where
    F: Fn(f64, &mut [f64]) + ?Sized,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = vec![0.0; n_out];
    let mut gauss = vec![0.0; n_out];
    let mut buf = vec![0.0; n_out];
    let mut bad_point = None;

    let eval = |x: f64, wk: f64, wg: f64, kr: &mut [f64], gs: &mut [f64], buf: &mut [f64], bad: &mut Option<Vec<f64>>| {
        f(x, buf);
        for (i, v) in buf.iter().enumerate() {
            if !v.is_finite() && bad.is_none() {
                *bad = Some(vec![x]);
            }
            kr[i] += wk * v;
            if wg != 0.0 {
                gs[i] += wg * v;
            }
        }
    };

    for j in 0..8 {
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        if j == 7 {
            eval(c, WGK[7], wg, &mut kronrod, &mut gauss, &mut buf, &mut bad_point);
        } else {
            eval(c - h * XGK[j], WGK[j], wg, &mut kronrod, &mut gauss, &mut buf, &mut bad_point);
            eval(c + h * XGK[j], WGK[j], wg, &mut kronrod, &mut gauss, &mut buf, &mut bad_point);
        }
    }

    let mut err = 0.0f64;
    for i in 0..n_out {
        kronrod[i] *= h;
        gauss[i] *= h;
        err = err.max(fmath::abs(kronrod[i] - gauss[i]));
    }
    RuleOut {
        values: kronrod,
        err,
        split_dim: 0,
        evals: 15,
        bad_point,
    }
}

/// Genz-Malik degree-7 rule with embedded degree-5 error estimate on the box
/// `[lo, hi]`, for an `n_out`-component integrand given in box coordinates.
pub fn genz_malik<F>(f: &F, lo: &[f64], hi: &[f64], n_out: usize) -> RuleOut
where
    F: Fn(&[f64], &mut [f64]) + ?Sized,
{
    let d = lo.len();
    debug_assert!(d >= 2);
    let lambda2 = fmath::sqrt(9.0 / 70.0);
    let lambda3 = fmath::sqrt(9.0 / 10.0);
    let lambda4 = lambda3;
    let lambda5 = fmath::sqrt(9.0 / 19.0);
    let df = d as f64;

    let w1 = (12824.0 - 9120.0 * df + 400.0 * df * df) / 19683.0;
    let w2 = 980.0 / 6561.0;
    let w3 = (1820.0 - 400.0 * df) / 19683.0;
    let w4 = 200.0 / 19683.0;
    let w5 = 6859.0 / 19683.0 / fmath::powi(2.0, d as i32);
    let we1 = (729.0 - 950.0 * df + 50.0 * df * df) / 729.0;
    let we2 = 245.0 / 486.0;
    let we3 = (265.0 - 100.0 * df) / 1458.0;
    let we4 = 25.0 / 729.0;

    let mut center = vec![0.0; d];
    let mut half = vec![0.0; d];
    let mut vol = 1.0;
    for i in 0..d {
        center[i] = 0.5 * (lo[i] + hi[i]);
        half[i] = 0.5 * (hi[i] - lo[i]);
        vol *= hi[i] - lo[i];
    }

    let mut i7 = vec![0.0; n_out];
    let mut i5 = vec![0.0; n_out];
    let mut buf = vec![0.0; n_out];
    let mut x = center.clone();
    let mut evals: u64 = 0;
    let mut bad_point: Option<Vec<f64>> = None;

    macro_rules! sample {
        ($w7:expr, $w5v:expr) => {{
            f(&x, &mut buf);
            evals += 1;
            for (i, v) in buf.iter().enumerate() {
                if !v.is_finite() && bad_point.is_none() {
                    bad_point = Some(x.clone());
                }
                i7[i] += $w7 * v;
                if $w5v != 0.0 {
                    i5[i] += $w5v * v;
                }
            }
        }};
    }

    // center
    sample!(w1, we1);
    let f_center = buf.clone();

    // axis points at lambda2 and lambda3; fourth differences drive the split
    let mut best_diff = -1.0;
    let mut best_width = -1.0;
    let mut split_dim = 0usize;
    let ratio = (lambda2 * lambda2) / (lambda3 * lambda3);
    let mut sum2 = vec![0.0; n_out];
    let mut sum3 = vec![0.0; n_out];
    for dim in 0..d {
        let step2 = lambda2 * half[dim];
        let step3 = lambda3 * half[dim];
        for s in &mut sum2 {
            *s = 0.0;
        }
        for s in &mut sum3 {
            *s = 0.0;
        }
        for &sgn in &[-1.0, 1.0] {
            x[dim] = center[dim] + sgn * step2;
            sample!(w2, we2);
            for i in 0..n_out {
                sum2[i] += buf[i];
            }
            x[dim] = center[dim] + sgn * step3;
            sample!(w3, we3);
            for i in 0..n_out {
                sum3[i] += buf[i];
            }
        }
        x[dim] = center[dim];
        let mut diff = 0.0;
        for i in 0..n_out {
            diff += fmath::abs(sum2[i] - 2.0 * f_center[i] - ratio * (sum3[i] - 2.0 * f_center[i]));
        }
        if diff > best_diff || (diff == best_diff && half[dim] > best_width) {
            best_diff = diff;
            best_width = half[dim];
            split_dim = dim;
        }
    }

    // pair points (lambda4, lambda4)
    for da in 0..d {
        for db in (da + 1)..d {
            for &sa in &[-1.0, 1.0] {
                for &sb in &[-1.0, 1.0] {
                    x[da] = center[da] + sa * lambda4 * half[da];
                    x[db] = center[db] + sb * lambda4 * half[db];
                    sample!(w4, we4);
                }
            }
            x[da] = center[da];
            x[db] = center[db];
        }
    }

    // corner points (lambda5, ..., lambda5)
    for mask in 0..(1u32 << d) {
        for dim in 0..d {
            let sgn = if mask >> dim & 1 == 1 { 1.0 } else { -1.0 };
            x[dim] = center[dim] + sgn * lambda5 * half[dim];
        }
        sample!(w5, 0.0);
    }

    let mut err = 0.0f64;
    for i in 0..n_out {
        i7[i] *= vol;
        i5[i] *= vol;
        err = err.max(fmath::abs(i7[i] - i5[i]));
    }
    RuleOut {
        values: i7,
        err,
        split_dim,
        evals,
        bad_point,
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nn = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = fmath::cos(core::f64::consts::PI * (i as f64 + 0.75) / (nn + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nn * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if fmath::abs(dx) < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk15_integrates_cubic_exactly() {
        let f = |x: f64, out: &mut [f64]| out[0] = 3.0 * x * x + x;
        let r = gauss_kronrod_15(&f, 0.0, 2.0, 1);
        assert!((r.values[0] - 10.0).abs() < 1e-13);
        assert!(r.err < 1e-12);
    }

    #[test]
    fn genz_malik_degree() {
        // degree-7 rule: x^6 y^0 and cross terms integrate exactly on a box
        let f = |x: &[f64], out: &mut [f64]| {
            out[0] = x[0] * x[0] * x[0] * x[0] * x[0] * x[0] + x[0] * x[1] * x[1]
        };
        let r = genz_malik(&f, &[0.0, 0.0], &[1.0, 1.0], 1);
        assert!((r.values[0] - (1.0 / 7.0 + 1.0 / 6.0)).abs() < 1e-13, "{}", r.values[0]);
    }

    #[test]
    fn genz_malik_constant_any_dim() {
        for d in 2..=6 {
            let f = |_: &[f64], out: &mut [f64]| out[0] = 2.5;
            let lo = vec![0.0; d];
            let hi = vec![1.0; d];
            let r = genz_malik(&f, &lo, &hi, 1);
            assert!((r.values[0] - 2.5).abs() < 1e-13, "dim {}", d);
            assert!(r.err < 1e-13);
        }
    }

    #[test]
    fn gauss_legendre_moments() {
        let (x, w) = gauss_legendre(12);
        let m0: f64 = w.iter().sum();
        assert!((m0 - 2.0).abs() < 1e-13);
        let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert!((m2 - 2.0 / 3.0).abs() < 1e-13);
        let m22: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum();
        assert!((m22 - 2.0 / 23.0).abs() < 1e-12);
    }
}
