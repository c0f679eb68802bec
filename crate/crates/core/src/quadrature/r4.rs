//! Integration over momentum space with the measure `d^4k/(2pi)^4`.
//!
//! Spherical split: fixed Gauss-Legendre rules in the two polar angles, an
//! equispaced (trapezoidal) rule in the azimuth, and an adaptive
//! Gauss-Kronrod radial direction compactified by `r = scale * t/(1-t)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::adaptive::{adapt, Region};
use super::rules::{gauss_kronrod_15, gauss_legendre, RuleOut};
use super::{check_tol, IntegralResult, QuadError, QuadOptions, VecIntegralResult};
use crate::fmath;

/// Fixed angular orders of the spherical grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AngularGrid {
    pub n_theta1: usize,
    pub n_theta2: usize,
    pub n_phi: usize,
}

impl Default for AngularGrid {
    fn default() -> Self {
        AngularGrid {
            n_theta1: 32,
            n_theta2: 32,
            n_phi: 16,
        }
    }
}

impl AngularGrid {
    /// The lower-order companion grid used for the angular error check.
    fn coarser(&self) -> AngularGrid {
        AngularGrid {
            n_theta1: (3 * self.n_theta1 / 4).max(4),
            n_theta2: (3 * self.n_theta2 / 4).max(4),
            n_phi: (3 * self.n_phi / 4).max(4),
        }
    }

    pub fn points(&self) -> usize {
        self.n_theta1 * self.n_theta2 * self.n_phi
    }
}

/// A pure integrand on `R^4` with declared large-momentum falloff.
pub struct R4Integrand<'a> {
    pub eval: &'a (dyn Fn([f64; 4]) -> f64 + Sync),
    /// Declared power `d` with `|f(k)| |k|^d` bounded at large `|k|`;
    /// at least 5 is required for the radial integral to converge.
    pub decay_exponent: f64,
}

/// Vector-valued variant of [`R4Integrand`].
pub struct R4VecIntegrand<'a> {
    pub n_out: usize,
    pub eval: &'a (dyn Fn([f64; 4], &mut [f64]) + Sync),
    pub decay_exponent: f64,
}

/// Unit directions and weights of the product angular rule; weights sum to
/// the surface 2 pi^2 of the unit 3-sphere.
struct SphereGrid {
    dirs: Vec<[f64; 4]>,
    weights: Vec<f64>,
}

fn sphere_grid(g: &AngularGrid) -> SphereGrid {
    let (t1n, t1w) = gauss_legendre(g.n_theta1); // theta1 in (0, pi), weight sin^2
    let (c2n, c2w) = gauss_legendre(g.n_theta2); // cos(theta2) in (-1, 1)
    let mut dirs = Vec::with_capacity(g.points());
    let mut weights = Vec::with_capacity(g.points());
    let pi = core::f64::consts::PI;
    for (x1, w1) in t1n.iter().zip(&t1w) {
        let theta1 = 0.5 * pi * (x1 + 1.0);
        let (s1, c1) = (fmath::sin(theta1), fmath::cos(theta1));
        let w1 = 0.5 * pi * w1 * s1 * s1;
        for (c2, w2) in c2n.iter().zip(&c2w) {
            let s2 = fmath::sqrt((1.0 - c2 * c2).max(0.0));
            for m in 0..g.n_phi {
                let phi = 2.0 * pi * (m as f64) / (g.n_phi as f64);
                let wphi = 2.0 * pi / (g.n_phi as f64);
                dirs.push([c1, s1 * c2, s1 * s2 * fmath::cos(phi), s1 * s2 * fmath::sin(phi)]);
                weights.push(w1 * w2 * wphi);
            }
        }
    }
    SphereGrid { dirs, weights }
}

pub fn integrate_r4(
    f: &R4Integrand<'_>,
    tol: f64,
    opts: &QuadOptions,
) -> Result<IntegralResult, QuadError> {
    let eval = f.eval;
    let wrapped = move |k: [f64; 4], out: &mut [f64]| out[0] = eval(k);
    let v = integrate_r4_vec(
        &R4VecIntegrand {
            n_out: 1,
            eval: &wrapped,
            decay_exponent: f.decay_exponent,
        },
        tol,
        opts,
    )?;
    Ok(v.scalar())
}

pub fn integrate_r4_vec(
    f: &R4VecIntegrand<'_>,
    tol: f64,
    opts: &QuadOptions,
) -> Result<VecIntegralResult, QuadError> {
    check_tol(tol)?;
    if f.decay_exponent < 5.0 {
        return Err(QuadError::BadInput(format!(
            "decay exponent {} < 5 cannot converge",
            f.decay_exponent
        )));
    }
    decay_sample_check(f, opts)?;

    let fine = run_radial(f, tol, opts, &opts.angular)?;
    if !opts.angular_check {
        return Ok(fine);
    }
    let coarse = run_radial(f, tol, opts, &opts.angular.coarser())?;
    let mut ang_err = 0.0f64;
    for (a, b) in fine.values.iter().zip(&coarse.values) {
        ang_err = ang_err.max(fmath::abs(a - b));
    }
    Ok(VecIntegralResult {
        values: fine.values,
        error_estimate: fine.error_estimate + ang_err,
        evaluations: fine.evaluations + coarse.evaluations,
        converged: fine.converged,
    })
}

fn run_radial(
    f: &R4VecIntegrand<'_>,
    tol: f64,
    opts: &QuadOptions,
    grid: &AngularGrid,
) -> Result<VecIntegralResult, QuadError> {
    let sphere = sphere_grid(grid);
    let scale = opts.radial_scale;
    if !(scale > 0.0) {
        return Err(QuadError::BadInput(format!("radial scale {} must be positive", scale)));
    }
    let n_out = f.n_out;
    let eval_f = f.eval;
    let norm = 1.0 / fmath::powi(2.0 * core::f64::consts::PI, 4);

    let rule_eval = move |region: &Region| -> RuleOut {
        let radial = |t: f64, out: &mut [f64]| {
            let r = scale * t / (1.0 - t);
            let drdt = scale / ((1.0 - t) * (1.0 - t));
            let mut buf = vec![0.0; n_out];
            for v in out.iter_mut() {
                *v = 0.0;
            }
            for (dir, w) in sphere.dirs.iter().zip(&sphere.weights) {
                let k = [r * dir[0], r * dir[1], r * dir[2], r * dir[3]];
                eval_f(k, &mut buf);
                for (o, b) in out.iter_mut().zip(&buf) {
                    *o += w * b;
                }
            }
            let jac = norm * r * r * r * drdt;
            for v in out.iter_mut() {
                *v *= jac;
            }
        };
        let mut out = gauss_kronrod_15(&radial, region.lo[0], region.hi[0], n_out);
        // each radial node swept the whole sphere
        out.evals *= sphere.dirs.len() as u64;
        out
    };

    let out = adapt(
        1,
        n_out,
        Region::unit_cube(1),
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

/// Samples the integrand on a few large spheres and rejects clear growth of
/// `|f(k)| |k|^decay`.
fn decay_sample_check(f: &R4VecIntegrand<'_>, opts: &QuadOptions) -> Result<(), QuadError> {
    let dirs = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.5, 0.5, 0.5, 0.5],
        [-0.5, 0.5, -0.5, 0.5],
    ];
    let mut buf = vec![0.0; f.n_out];
    let radii = [1e3 * opts.radial_scale, 1e4 * opts.radial_scale];
    let mut bounds = [0.0f64; 2];
    for (bi, r) in radii.iter().enumerate() {
        for d in &dirs {
            let k = [r * d[0], r * d[1], r * d[2], r * d[3]];
            (f.eval)(k, &mut buf);
            let m = buf.iter().fold(0.0f64, |m, v| m.max(fmath::abs(*v)));
            if !m.is_finite() {
                return Err(QuadError::NonFiniteSample { point: k.to_vec() });
            }
            bounds[bi] = bounds[bi].max(m * fmath::powf(*r, f.decay_exponent));
        }
    }
    if bounds[1] > 100.0 * bounds[0].max(f64::MIN_POSITIVE) {
        return Err(QuadError::DecayCheck {
            radius: radii[1],
            ratio: bounds[1] / bounds[0].max(f64::MIN_POSITIVE),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const K_REF: f64 = 0.006_332_573_977_646_111; // 1/(16 pi^2)

    #[test]
    fn gaussian_gives_fujikawa_constant() {
        let f = R4Integrand {
            eval: &|k| fmath::exp(-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + k[3] * k[3])),
            decay_exponent: 8.0,
        };
        let r = integrate_r4(&f, 1e-8, &QuadOptions::default()).unwrap();
        assert!(r.converged);
        assert!(
            fmath::abs(r.value - K_REF) < 1e-6,
            "got {} expected {}",
            r.value,
            K_REF
        );
    }

    #[test]
    fn odd_integrand_vanishes() {
        let f = R4Integrand {
            eval: &|k| k[0] * fmath::exp(-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + k[3] * k[3])),
            decay_exponent: 7.0,
        };
        let r = integrate_r4(&f, 1e-8, &QuadOptions::default()).unwrap();
        assert!(fmath::abs(r.value) < 1e-9, "got {}", r.value);
    }

    #[test]
    fn rational_falloff_matches_radial_oracle() {
        // int d^4k/(2pi)^4 (k^2+1)^-3 = 1/(32 pi^2): the radial integral
        // int r^3/(1+r^2)^3 dr = 1/4 times the sphere surface 2 pi^2.
        let f = R4Integrand {
            eval: &|k| {
                let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + k[3] * k[3];
                let d = 1.0 + k2;
                1.0 / (d * d * d)
            },
            decay_exponent: 6.0,
        };
        let r = integrate_r4(&f, 1e-8, &QuadOptions::default()).unwrap();
        let expected = 0.5 * K_REF; // 1/(32 pi^2)
        assert!(
            fmath::abs(r.value - expected) < 1e-8,
            "got {} expected {}",
            r.value,
            expected
        );
    }

    #[test]
    fn declared_decay_below_five_rejected() {
        let f = R4Integrand {
            eval: &|_k| 1.0,
            decay_exponent: 4.0,
        };
        assert!(matches!(
            integrate_r4(&f, 1e-6, &QuadOptions::default()),
            Err(QuadError::BadInput(_))
        ));
    }

    #[test]
    fn decay_sampling_catches_slow_falloff() {
        // claims decay 6 but actually falls off like |k|^-2
        let f = R4Integrand {
            eval: &|k| {
                let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + k[3] * k[3];
                1.0 / (1.0 + k2)
            },
            decay_exponent: 6.0,
        };
        assert!(matches!(
            integrate_r4(&f, 1e-6, &QuadOptions::default()),
            Err(QuadError::DecayCheck { .. })
        ));
    }

    #[test]
    fn determinism_across_worker_counts() {
        let mk = || R4Integrand {
            eval: &|k: [f64; 4]| {
                let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + k[3] * k[3];
                (1.0 + k[1]) / ((1.0 + k2) * (1.0 + k2) * (1.0 + k2))
            },
            decay_exponent: 5.0,
        };
        let a = integrate_r4(&mk(), 1e-7, &QuadOptions::default()).unwrap();
        let b = integrate_r4(&mk(), 1e-7, &QuadOptions::default().with_workers(3)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
