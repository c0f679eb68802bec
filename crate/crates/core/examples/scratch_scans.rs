// UV scan slope, IR scan fit, and the obstruction report.
use anomaly_core::kinematics::{equilateral, Kinematics};
use anomaly_core::loop_amplitudes::*;
use anomaly_core::quadrature::QuadOptions;
use anomaly_core::tensor::Vec4;
use anomaly_core::vsti::anomaly_obstruction;
use std::time::Instant;

fn main() {
    let opts = QuadOptions::default();
    let kin = equilateral(1.0);

    // UV scan
    let t0 = Instant::now();
    let lambdas: Vec<f64> = [2.0, 2.5, 3.0, 3.5].iter().map(|e| 10f64.powf(*e)).collect();
    let scan = uv_scan(&kin, &lambdas, 1e-7, &opts).unwrap();
    for r in &scan.rows {
        println!(
            "lambda0 {:9.1}: dev_w0 {:.4e} dev_w1 {:.4e} dev_w2 {:.4e}",
            r.lambda0, r.dev_w0, r.dev_w1, r.dev_w2
        );
    }
    println!(
        "slopes: w0 {:+.3} w1 {:+.3} w2 {:+.3}   [{:?}]",
        scan.slope_w0, scan.slope_w1, scan.slope_w2, t0.elapsed()
    );

    // momentum-scaling of the w0 deviation at fixed lambda0
    let t1 = Instant::now();
    let c1 = contracted_triangle(&kin, 100.0, 1e-8, &opts).unwrap();
    let dev1 = c1.tensor.sub(&contracted_limit(&kin.p2(), &kin.p3())).frobenius();
    let kin2 = kin.scaled(2.0);
    let c2 = contracted_triangle(&kin2, 100.0, 1e-8, &opts).unwrap();
    let dev2 = c2.tensor.sub(&contracted_limit(&kin2.p2(), &kin2.p3())).frobenius();
    println!("momentum doubling: dev ratio {:.2} (~16 expected) [{:?}]", dev2 / dev1, t1.elapsed());

    // IR scan
    let t2 = Instant::now();
    let p3 = Vec4([0.0, 0.0, 1.0, 0.0]);
    let lambda_list: Vec<f64> = [-1.0f64, -1.5, -2.0].iter().map(|e| 10f64.powf(*e)).collect();
    match ir_second_derivative_scan(p3, &lambda_list, 50.0, 1.0, 1e-2, &opts) {
        Ok(ir) => {
            for r in &ir.rows {
                println!(
                    "lambda {:.4}: proj {:+.5e} orth {:.2e} f {:+.4e} bound {:.4e} {}",
                    r.lambda,
                    r.projection,
                    r.orthogonal_residual,
                    r.f_residual,
                    r.f_bound,
                    if r.f_residual.abs() <= r.f_bound { "ok" } else { "VIOLATED" }
                );
            }
            println!(
                "fitted coefficient {:+.5e} vs reference {:.5e} (rel dev {:.2e}), R^2 {:.6} [{:?}]",
                ir.fitted_coefficient,
                ir.reference_coefficient,
                (ir.fitted_coefficient.abs() - ir.reference_coefficient).abs() / ir.reference_coefficient,
                ir.r_squared,
                t2.elapsed()
            );
        }
        Err(e) => println!("IR scan failed: {}", e),
    }

    // obstruction
    let t3 = Instant::now();
    let ob = anomaly_obstruction(1e3, &kin, 1e-5, &opts).unwrap();
    println!(
        "obstruction: coef {:+.6e} ref {:.6e} rel dev {:.2e} sym resid {:.2e} w0 {:.3e} w1 {:?} pure2 {:.2e} [{:?}]",
        ob.coefficient,
        ob.reference,
        ob.relative_deviation,
        ob.symmetric_residual,
        ob.w0_norm,
        ob.w1_norms,
        ob.pure_second_sample,
        t3.elapsed()
    );

    // obstruction at a rotated + rescaled non-exceptional point
    let t4 = Instant::now();
    let r = anomaly_core::tensor::double_plane_rotation(0.7, -0.4);
    let kin_rot = Kinematics::from_two(
        anomaly_core::tensor::rotate_vec(&r, &kin.p1()).scale(1.5),
        anomaly_core::tensor::rotate_vec(&r, &kin.p2()).scale(1.5),
    );
    let ob2 = anomaly_obstruction(1e3, &kin_rot, 1e-5, &opts).unwrap();
    println!(
        "obstruction (rotated/rescaled): coef {:+.6e} (variation {:.2e}) [{:?}]",
        ob2.coefficient,
        (ob2.coefficient - ob.coefficient).abs() / ob.coefficient.abs(),
        t4.elapsed()
    );
}
