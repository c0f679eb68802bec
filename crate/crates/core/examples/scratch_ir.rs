// IR Laplacian diagnostics.
use anomaly_core::loop_amplitudes::*;
use anomaly_core::quadrature::QuadOptions;
use anomaly_core::tensor::{Rank3Tensor, Vec4};
use std::time::Instant;

fn main() {
    let opts = QuadOptions::default();
    let p3 = Vec4([0.0, 0.0, 1.0, 0.0]);
    let sgn = -1.0f64; // measured trace sign
    let structure = Rank3Tensor::from_fn(|mu, nu, rho| {
        let mut s = 0.0;
        for sig in 0..4 {
            s += anomaly_core::tensor::epsf(mu, nu, rho, sig) * p3[sig];
        }
        sgn * s
    });
    let sn2 = structure.dot(&structure);
    let ir_ref = ir_log_reference();
    for lam in [0.1f64, 10f64.powf(-1.5), 0.01] {
        let h = (0.01f64).min(lam / 3.0);
        for tol in [1e-5f64, 1e-6] {
            let t0 = Instant::now();
            let (lap, err, conv, evals) =
                ir_laplacian(p3, lam, 50.0, 1.0, h, tol, &opts).unwrap();
            let c = lap.dot(&structure) / sn2;
            let orth = lap.sub(&structure.scale(c)).max_abs();
            // divergent prediction: (1/2pi^2) ln(lam^2/mu^2)/(p3^2+lam^2), mu=|p3|
            let pred = ir_ref * (lam * lam).ln() / (1.0 + lam * lam);
            println!(
                "lam {:.4} h {:.4} tol {:.0e}: proj {:+.5e} (pred div {:+.5e}) orth {:.2e} err {:.2e} conv {} evals {:.2e} [{:?}]",
                lam, h, tol, c, pred, orth, err, conv, evals as f64, t0.elapsed()
            );
        }
    }
}
