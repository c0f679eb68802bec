//! Integration over the standard probability simplex with the measure
//! `dmu_n = (prod_i dx_i) delta(1 - sum_i x_i)`.

use alloc::format;
use alloc::vec::Vec;

use super::adaptive::{adapt, Region};
use super::rules::{gauss_kronrod_15, genz_malik, RuleOut};
use super::{check_tol, IntegralResult, QuadError, QuadOptions, VecIntegralResult};

/// A pure real-valued integrand on the `(n-1)`-dimensional simplex.
pub struct SimplexIntegrand<'a> {
    /// Number of Feynman parameters `n >= 2`.
    pub dim: usize,
    pub eval: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    /// Index subsets on whose vanishing locus the integrand is unbounded but
    /// integrable. The first subset orients the Duffy transform.
    pub singular_faces: Vec<Vec<usize>>,
}

/// Vector-valued variant; components share one subdivision tree.
pub struct SimplexVecIntegrand<'a> {
    pub dim: usize,
    pub n_out: usize,
    pub eval: &'a (dyn Fn(&[f64], &mut [f64]) + Sync),
    pub singular_faces: Vec<Vec<usize>>,
}

/// Stick-breaking map from the unit cube `(0,1)^(n-1)` onto the simplex,
/// with the (optional) singular-face group pulled out first so that the
/// face collapses to the coordinate origin `t[0] = 0`.
struct SimplexMap {
    n: usize,
    /// coordinate order: face indices first, then the rest
    order: Vec<usize>,
    /// size of the leading group; 0 means plain stick-breaking
    group: usize,
}

/// Hard cap on the number of Feynman parameters; keeps per-sample buffers
/// on the stack.
pub const MAX_SIMPLEX_DIM: usize = 16;

impl SimplexMap {
    fn new(n: usize, faces: &[Vec<usize>]) -> Result<SimplexMap, QuadError> {
        if n > MAX_SIMPLEX_DIM {
            return Err(QuadError::BadInput(format!(
                "simplex dim {} exceeds the supported maximum {}",
                n, MAX_SIMPLEX_DIM
            )));
        }
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let mut group = 0;
        if let Some(face) = faces.first() {
            let mut f = face.clone();
            f.sort_unstable();
            f.dedup();
            if f.iter().any(|&i| i >= n) {
                return Err(QuadError::BadInput(format!(
                    "singular face {:?} out of range for dim {}",
                    face, n
                )));
            }
            if !f.is_empty() && f.len() < n {
                group = f.len();
                order.extend_from_slice(&f);
                for i in 0..n {
                    if !f.contains(&i) {
                        order.push(i);
                    }
                }
            }
        }
        if order.is_empty() {
            order.extend(0..n);
        }
        Ok(SimplexMap { n, order, group })
    }

    /// Breaks `total` into `m` nonnegative parts from `m-1` cube coordinates,
    /// writing them to `out` and returning the Jacobian factor.
    fn stick_break(total: f64, t: &[f64], out: &mut [f64]) -> f64 {
        let m = out.len();
        let mut jac = 1.0;
        let mut rest = total;
        for i in 0..m - 1 {
            out[i] = rest * t[i];
            // d(out_i)/d(t_i) = rest, and rest itself carries the powers of (1-t)
            jac *= rest;
            rest *= 1.0 - t[i];
        }
        out[m - 1] = rest;
        jac
    }

    /// Maps a cube point to (simplex point in original coordinate order,
    /// Jacobian).
    fn apply(&self, t: &[f64], x: &mut [f64]) -> f64 {
        let n = self.n;
        let mut parts_buf = [0.0f64; MAX_SIMPLEX_DIM];
        let parts = &mut parts_buf[..n];
        let jac;
        if self.group == 0 {
            jac = Self::stick_break(1.0, t, parts);
        } else {
            let m = self.group;
            let u = t[0];
            // split u among the face group, 1-u among the rest
            let j1 = if m == 1 {
                parts[0] = u;
                1.0
            } else {
                Self::stick_break(u, &t[1..m], &mut parts[..m])
            };
            let j2 = if n - m == 1 {
                parts[m] = 1.0 - u;
                1.0
            } else {
                Self::stick_break(1.0 - u, &t[m..], &mut parts[m..])
            };
            jac = j1 * j2;
        }
        for (slot, &orig) in self.order.iter().enumerate() {
            x[orig] = parts[slot];
        }
        jac
    }
}

pub fn integrate_simplex(
    f: &SimplexIntegrand<'_>,
    tol: f64,
    opts: &QuadOptions,
) -> Result<IntegralResult, QuadError> {
    let eval = f.eval;
    let wrapped = move |x: &[f64], out: &mut [f64]| out[0] = eval(x);
    let v = integrate_simplex_vec(
        &SimplexVecIntegrand {
            dim: f.dim,
            n_out: 1,
            eval: &wrapped,
            singular_faces: f.singular_faces.clone(),
        },
        tol,
        opts,
    )?;
    Ok(v.scalar())
}

pub fn integrate_simplex_vec(
    f: &SimplexVecIntegrand<'_>,
    tol: f64,
    opts: &QuadOptions,
) -> Result<VecIntegralResult, QuadError> {
    check_tol(tol)?;
    if f.dim < 2 {
        return Err(QuadError::BadInput(format!(
            "simplex integrand needs dim >= 2, got {}",
            f.dim
        )));
    }
    let map = SimplexMap::new(f.dim, &f.singular_faces)?;
    let d = f.dim - 1;
    let n_out = f.n_out;
    let eval_f = f.eval;

    let rule_eval = move |region: &Region| -> RuleOut {
        let cube_f = |t: &[f64], out: &mut [f64]| {
            let mut xbuf = [0.0f64; MAX_SIMPLEX_DIM];
            let x = &mut xbuf[..map.n];
            let jac = map.apply(t, x);
            eval_f(x, out);
            for v in out.iter_mut() {
                *v *= jac;
            }
        };
        if d == 1 {
            let line_f = |t: f64, out: &mut [f64]| cube_f(&[t], out);
            gauss_kronrod_15(&line_f, region.lo[0], region.hi[0], n_out)
        } else {
            genz_malik(&cube_f, &region.lo, &region.hi, n_out)
        }
    };

    let out = adapt(
        d,
        n_out,
        Region::unit_cube(d),
        &rule_eval,
        tol,
        opts.max_evals,
        opts.workers,
    )?;
    Ok(VecIntegralResult {
        values: out.values,
        error_estimate: out.err,
        evaluations: out.evaluations,
        converged: out.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fmath;
    use alloc::vec;

    fn opts() -> QuadOptions {
        QuadOptions::default()
    }

    #[test]
    fn volume_of_dmu5_is_one_over_24() {
        let f = SimplexIntegrand {
            dim: 5,
            eval: &|_x| 1.0,
            singular_faces: vec![],
        };
        let r = integrate_simplex(&f, 1e-10, &opts()).unwrap();
        assert!(r.converged);
        assert!(
            fmath::abs(r.value - 1.0 / 24.0) < 1e-10,
            "got {} err {}",
            r.value,
            r.error_estimate
        );
        assert!(r.error_estimate > 0.0);
    }

    #[test]
    fn linear_moment_dim2() {
        let f = SimplexIntegrand {
            dim: 2,
            eval: &|x| x[0],
            singular_faces: vec![],
        };
        let r = integrate_simplex(&f, 1e-12, &opts()).unwrap();
        assert!(fmath::abs(r.value - 0.5) < 1e-12, "got {}", r.value);
    }

    #[test]
    fn face_singular_anomaly_moment() {
        // int dmu_5 x3 / (x1+x2+x3)^3 = 1/12, face singularity at x123 -> 0
        let f = SimplexIntegrand {
            dim: 5,
            eval: &|x| {
                let u = x[0] + x[1] + x[2];
                x[2] / (u * u * u)
            },
            singular_faces: vec![vec![0, 1, 2]],
        };
        let r = integrate_simplex(&f, 1e-7, &opts()).unwrap();
        assert!(r.converged);
        assert!(
            fmath::abs(r.value - 1.0 / 12.0) < 1e-5,
            "got {} err {}",
            r.value,
            r.error_estimate
        );
    }

    #[test]
    fn permutation_symmetry_within_errors() {
        let g = SimplexIntegrand {
            dim: 5,
            eval: &|x| x[3] / (1.0 + x[0] * x[0] + 2.0 * x[1]),
            singular_faces: vec![],
        };
        let h = SimplexIntegrand {
            dim: 5,
            eval: &|x| x[0] / (1.0 + x[4] * x[4] + 2.0 * x[2]),
            singular_faces: vec![],
        };
        let rg = integrate_simplex(&g, 1e-9, &opts()).unwrap();
        let rh = integrate_simplex(&h, 1e-9, &opts()).unwrap();
        assert!(
            fmath::abs(rg.value - rh.value) <= 2.0 * (rg.error_estimate + rh.error_estimate),
            "{} vs {}",
            rg.value,
            rh.value
        );
    }

    #[test]
    fn linearity_within_errors() {
        let f = SimplexIntegrand {
            dim: 3,
            eval: &|x| x[0] * x[1],
            singular_faces: vec![],
        };
        let g = SimplexIntegrand {
            dim: 3,
            eval: &|x| 1.0 / (1.0 + x[2]),
            singular_faces: vec![],
        };
        let combo = SimplexIntegrand {
            dim: 3,
            eval: &|x| 2.0 * (x[0] * x[1]) - 0.5 / (1.0 + x[2]),
            singular_faces: vec![],
        };
        let rf = integrate_simplex(&f, 1e-10, &opts()).unwrap();
        let rg = integrate_simplex(&g, 1e-10, &opts()).unwrap();
        let rc = integrate_simplex(&combo, 1e-10, &opts()).unwrap();
        let expect = 2.0 * rf.value - 0.5 * rg.value;
        assert!(
            fmath::abs(rc.value - expect)
                <= 2.0 * rc.error_estimate + 4.0 * rf.error_estimate + rg.error_estimate + 1e-12
        );
    }

    #[test]
    fn refinement_monotonicity_on_golden_value() {
        let mk = || SimplexIntegrand {
            dim: 5,
            eval: &|x: &[f64]| {
                let u = x[0] + x[1] + x[2];
                x[2] / (u * u * u)
            },
            singular_faces: vec![vec![0, 1, 2]],
        };
        let reference = 1.0 / 12.0;
        let mut last = f64::INFINITY;
        for tol in [1e-4, 5e-5, 2.5e-5, 1.25e-5] {
            let r = integrate_simplex(&mk(), tol, &opts()).unwrap();
            let dev = fmath::abs(r.value - reference);
            assert!(dev <= last + 1e-12, "tol {} dev {} last {}", tol, dev, last);
            last = dev;
        }
    }

    #[test]
    fn non_finite_sample_is_a_hard_error_naming_the_point() {
        let f = SimplexIntegrand {
            dim: 3,
            eval: &|x| 1.0 / (x[0] - x[0]),
            singular_faces: vec![],
        };
        match integrate_simplex(&f, 1e-6, &opts()) {
            Err(QuadError::NonFiniteSample { point }) => {
                assert!(!point.is_empty());
            }
            other => panic!("expected NonFiniteSample, got {:?}", other.map(|r| r.value)),
        }
    }

    #[test]
    fn budget_exhaustion_flags_nonconvergence() {
        // regulated integrand with a steep boundary layer at x123 ~ 1e-6
        let f = SimplexIntegrand {
            dim: 5,
            eval: &|x| {
                let u = x[0] + x[1] + x[2];
                let den = 1e-6 + u;
                x[2] * 1e18 / (den * den * den)
            },
            singular_faces: vec![vec![0, 1, 2]],
        };
        let tight = QuadOptions::default().with_budget(2_000);
        let r = integrate_simplex(&f, 1e-12, &tight).unwrap();
        assert!(!r.converged);
        assert!(r.error_estimate > 0.0);
    }

    #[test]
    fn determinism_bitwise() {
        let mk = || SimplexIntegrand {
            dim: 5,
            eval: &|x: &[f64]| {
                let u = x[0] + x[1] + x[2];
                x[2] / (u * u * u + 1e-8)
            },
            singular_faces: vec![vec![0, 1, 2]],
        };
        let a = integrate_simplex(&mk(), 1e-8, &opts()).unwrap();
        let b = integrate_simplex(&mk(), 1e-8, &opts().clone().with_workers(2)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error_estimate.to_bits(), b.error_estimate.to_bits());
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = SimplexIntegrand {
            dim: 1,
            eval: &|_x| 1.0,
            singular_faces: vec![],
        };
        assert!(matches!(
            integrate_simplex(&f, 1e-6, &opts()),
            Err(QuadError::BadInput(_))
        ));
        let g = SimplexIntegrand {
            dim: 3,
            eval: &|_x| 1.0,
            singular_faces: vec![vec![7]],
        };
        assert!(matches!(
            integrate_simplex(&g, 1e-6, &opts()),
            Err(QuadError::BadInput(_))
        ));
        let h = SimplexIntegrand {
            dim: 3,
            eval: &|_x| 1.0,
            singular_faces: vec![],
        };
        assert!(matches!(
            integrate_simplex(&h, -1.0, &opts()),
            Err(QuadError::BadInput(_))
        ));
    }
}
