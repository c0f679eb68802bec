// Scratch experiment: normalization fit, Ward consistency, oracle match.
use anomaly_core::kinematics::{equilateral, oracle_sample_points, CutoffPair};
use anomaly_core::loop_amplitudes::*;
use anomaly_core::quadrature::QuadOptions;
use anomaly_core::tensor_basis::{assignment_from_ab, nor_relation_as_printed, nor_relations, relation_max_residual};
use std::time::Instant;

fn main() {
    let opts = QuadOptions::default();
    let t0 = Instant::now();

    // 1. normalization fit at lambda = 0, lambda0 = 40
    let fit = fit_normalization(40.0, 1e-7, &opts).unwrap();
    println!(
        "fit: N = {:.9}  (unit recon coef {:.6e}, contracted coef {:.6e})  [{:?}]",
        fit.norm, fit.reconstructed_unit_coefficient, fit.contracted_coefficient, t0.elapsed()
    );

    // 2. anomaly reference at lambda0 = 1e3
    let kin = equilateral(1.0);
    let t1 = Instant::now();
    let c = contracted_triangle(&kin, 1e3, 1e-6, &opts).unwrap();
    println!(
        "anomaly coefficient: {:.8e} vs 1/(6pi^2) = {:.8e}  rel dev {:.2e}  evals {}  [{:?}]",
        c.coefficient,
        anomaly_reference(),
        (c.coefficient.abs() - anomaly_reference()).abs() / anomaly_reference(),
        c.evaluations,
        t1.elapsed()
    );

    // 3. Ward consistency at lambda=0.1, lambda0=50 with fitted N
    let cut = CutoffPair::new(0.1, 50.0).unwrap();
    let t2 = Instant::now();
    let g = gamma_aaa(&kin, &cut, fit.norm, 1e-7, &opts).unwrap();
    println!("gamma_aaa: maxabs {:.6e} err {:.2e} evals {} [{:?}]", g.tensor.max_abs(), g.error_estimate, g.evaluations, t2.elapsed());

    // 4. direct oracle
    let t3 = Instant::now();
    let d = gamma_aaa_direct(&kin, &cut, 1e-5, &opts).unwrap();
    println!("direct:    maxabs {:.6e} err {:.2e} evals {} [{:?}]", d.tensor.max_abs(), d.error_estimate, d.evaluations, t3.elapsed());
    let diff = g.tensor.sub(&d.tensor);
    println!(
        "componentwise max diff = {:.3e}  (rel to maxnorm {:.3e})",
        diff.max_abs(),
        diff.max_abs() / d.tensor.max_abs()
    );
    // per-component relative comparison
    let mut worst = 0.0f64;
    for i in 0..64 {
        let a = g.tensor.0[i];
        let b = d.tensor.0[i];
        let denom = a.abs().max(b.abs()).max(1e-3 * d.tensor.max_abs());
        worst = worst.max((a - b).abs() / denom);
    }
    println!("worst per-component rel diff (floored) = {:.3e}", worst);

    // 5. nor relations from computed A, B
    let t4 = Instant::now();
    let amps = permuted_amplitudes(&kin, &cut, fit.norm, 1e-8, &opts).unwrap();
    println!("A values: {:?}", amps.values.a);
    println!("B values: {:?}", amps.values.b);
    let (assign, errs) = assignment_from_ab(&amps.values, &amps.a_errors, &amps.b_errors);
    for rel in nor_relations() {
        let (v, e) = relation_max_residual(&rel, &assign, &errs);
        println!("  {}: residual {:.3e} (err bound {:.3e}) -> {}", rel.name, v, e, if v <= 10.0*e {"ok"} else {"VIOLATED"});
    }
    let printed = nor_relation_as_printed();
    let (v, e) = relation_max_residual(&printed, &assign, &errs);
    println!("  {}: residual {:.3e} (err bound {:.3e})", printed.name, v, e);
    println!("amps took {:?}", t4.elapsed());

    // 6. Bose symmetry residual quick check
    let t5 = Instant::now();
    let mut worst_bose = 0.0f64;
    for sigma in anomaly_core::tensor::S3.iter().skip(1) {
        let kp = kin.permuted(sigma);
        let gp = gamma_aaa(&kp, &cut, fit.norm, 1e-7, &opts).unwrap();
        // Gamma_{idx}(base) = Gamma_{pidx}(permuted)
        let mut diff = 0.0f64;
        for mu in 0..4 {
            for nu in 0..4 {
                for rho in 0..4 {
                    let idx = [mu, nu, rho];
                    let pidx = [idx[sigma[0]], idx[sigma[1]], idx[sigma[2]]];
                    let a = g.tensor[(mu, nu, rho)];
                    let b = gp.tensor[(pidx[0], pidx[1], pidx[2])];
                    diff = diff.max((a - b).abs());
                }
            }
        }
        worst_bose = worst_bose.max(diff);
    }
    println!("bose worst residual {:.3e} vs err scale {:.3e} [{:?}]", worst_bose, g.error_estimate, t5.elapsed());

    // 7. oracle points
    for kin in oracle_sample_points() {
        let g = gamma_aaa(&kin, &cut, fit.norm, 1e-7, &opts).unwrap();
        let d = gamma_aaa_direct(&kin, &cut, 1e-5, &opts).unwrap();
        let diff = g.tensor.sub(&d.tensor).max_abs() / d.tensor.max_abs();
        println!("oracle point: rel maxdiff {:.3e}", diff);
    }
    println!("total {:?}", t0.elapsed());
}
