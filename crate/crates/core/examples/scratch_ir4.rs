// Which momentum is held fixed in the p2-Laplacian?
use anomaly_core::kinematics::{CutoffPair, Kinematics};
use anomaly_core::loop_amplitudes::*;
use anomaly_core::quadrature::QuadOptions;
use anomaly_core::tensor::{epsf, Rank3Tensor, Vec4};

fn main() {
    let opts = QuadOptions::default();
    let lam0 = 50.0;
    let p3t = Vec4([0.0, 0.0, 1.0, 0.0]);
    let sgn = -1.0;
    let structure = Rank3Tensor::from_fn(|mu, nu, rho| {
        let mut s = 0.0;
        for sig in 0..4 {
            s += epsf(mu, nu, rho, sig) * p3t[sig];
        }
        sgn * s
    });
    let sn2 = structure.dot(&structure);

    for lam in [0.1f64, 10f64.powf(-1.5), 0.01] {
        let cut = CutoffPair::new(lam, lam0).unwrap();
        let h = (0.01f64).min(lam / 3.0);
        for fixed_p1 in [false, true] {
            let gam = |p2: Vec4| -> Rank3Tensor {
                let kin = if fixed_p1 {
                    // p1 fixed at -p3t; p3 = -p1 - p2 varies
                    Kinematics::from_two(-p3t, p2)
                } else {
                    // p3 fixed; p1 = -p2 - p3 varies
                    Kinematics::from_two(-(p3t + p2), p2)
                };
                gamma_aaa(&kin, &cut, 1.0, 1e-10, &opts).unwrap().tensor
            };
            let mut acc = gam(Vec4::zero()).scale(-8.0);
            for alpha in 0..4 {
                let mut e = Vec4::zero();
                e.0[alpha] = 1.0;
                acc = acc.add(&gam(e.scale(h)));
                acc = acc.add(&gam(e.scale(-h)));
            }
            let lap = acc.scale(1.0 / (h * h));
            let c = lap.dot(&structure) / sn2;
            let orth = lap.sub(&structure.scale(c)).max_abs();
            println!(
                "lam {:.4} fixed_p1 {}: proj {:+.5e} orth {:.2e}",
                lam, fixed_p1, c, orth
            );
        }
    }
    // reference slopes for comparison
    let r = ir_log_reference();
    for lam in [0.1f64, 10f64.powf(-1.5), 0.01] {
        println!(
            "lam {:.4}: div prediction {:+.5e}",
            lam,
            r * (lam * lam).ln() / (1.0 + lam * lam)
        );
    }
}
