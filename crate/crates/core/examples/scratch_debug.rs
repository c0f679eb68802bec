// Diagnose the direct-loop vs reconstruction mismatch.
use anomaly_core::kinematics::{CutoffPair, Kinematics};
use anomaly_core::loop_amplitudes::*;
use anomaly_core::quadrature::QuadOptions;
use anomaly_core::tensor::Vec4;
use anomaly_core::tensor_basis::decompose;

fn main() {
    let opts = QuadOptions::default();
    let kin = Kinematics::from_two(Vec4([0.9, 0.2, 0.0, 0.0]), Vec4([-0.1, 0.8, 0.3, 0.0]));
    let cut = CutoffPair::new(0.05, 60.0).unwrap();
    let fitn = 1.0;

    let g = gamma_aaa(&kin, &cut, fitn, 1e-8, &opts).unwrap();
    let d = gamma_aaa_direct(&kin, &cut, 1e-6, &opts).unwrap();

    // contract each slot of each tensor with its own momentum, project on eps
    let p = kin.momenta();
    for (name, t) in [("recon", &g.tensor), ("direct", &d.tensor)] {
        // slot 0 with p1
        let c1 = t.contract_first(&p[0]);
        let (coef, resid) = project_eps_coefficient(&c1, &kin.p2(), &kin.p3());
        println!("{}: p1.G slot0 coef {:+.6e} resid {:.2e}", name, coef, resid);
    }
    // reference from the contracted representation at lambda ~ 0
    let c = contracted_triangle(&kin, 60.0, 1e-8, &opts).unwrap();
    println!("contracted (lambda=0) coef {:+.6e}", c.coefficient);

    // invariants of each tensor (min-norm gauge)
    let ig = decompose(&g.tensor, &kin, g.error_estimate).unwrap();
    let id = decompose(&d.tensor, &kin, d.error_estimate).unwrap();
    println!("recon  invariants: {:?}", ig.a.map(|v| (v * 1e4).round() / 1e4));
    println!("direct invariants: {:?}", id.a.map(|v| (v * 1e4).round() / 1e4));
    println!("recon  residual outside span: {:.3e}", ig.residual_norm);
    println!("direct residual outside span: {:.3e}", id.residual_norm);
    let ratio: Vec<f64> = ig.a.iter().zip(id.a.iter()).map(|(a, b)| b / a).collect();
    println!("ratios direct/recon: {:?}", ratio.iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>());

    // is direct equal to a slot permutation of recon?
    use anomaly_core::tensor::S3;
    for sigma in S3.iter() {
        for sign in [1.0f64, -1.0] {
            // direct_{mnr} =? sign * recon at permuted kin & permuted slots
            let kp = kin.permuted(sigma);
            let gp = gamma_aaa(&kp, &cut, fitn, 1e-8, &opts).unwrap();
            let mut worst = 0.0f64;
            for mu in 0..4 {
                for nu in 0..4 {
                    for rho in 0..4 {
                        let idx = [mu, nu, rho];
                        let pidx = [idx[sigma[0]], idx[sigma[1]], idx[sigma[2]]];
                        let a = d.tensor[(mu, nu, rho)];
                        let b = sign * gp.tensor[(pidx[0], pidx[1], pidx[2])];
                        worst = worst.max((a - b).abs());
                    }
                }
            }
            if worst < 0.05 * d.tensor.max_abs() {
                println!("direct ~= {:+} * recon(sigma={:?}) permuted, worst {:.3e}", sign, sigma, worst);
            }
        }
    }
}
