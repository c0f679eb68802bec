// Brute-force FD Laplacian of gamma_aaa vs the fused ir_laplacian.
use anomaly_core::kinematics::{CutoffPair, Kinematics};
use anomaly_core::loop_amplitudes::*;
use anomaly_core::quadrature::QuadOptions;
use anomaly_core::tensor::{Rank3Tensor, Vec4};

fn main() {
    let opts = QuadOptions::default();
    let lam = 0.1;
    let lam0 = 50.0;
    let cut = CutoffPair::new(lam, lam0).unwrap();
    let p3 = Vec4([0.0, 0.0, 1.0, 0.0]);
    let h = 0.01;

    let gam = |p2: Vec4| -> Rank3Tensor {
        let kin = Kinematics::from_two(-(p3 + p2), p2);
        gamma_aaa(&kin, &cut, 1.0, 1e-10, &opts).unwrap().tensor
    };

    // plain (no Richardson) Laplacian at step h
    let mut acc = gam(Vec4::zero()).scale(-8.0);
    for alpha in 0..4 {
        let mut e = Vec4::zero();
        e.0[alpha] = 1.0;
        acc = acc.add(&gam(e.scale(h)));
        acc = acc.add(&gam(e.scale(-h)));
    }
    let brute_h = acc.scale(1.0 / (h * h));

    // same at h/2
    let mut acc2 = gam(Vec4::zero()).scale(-8.0);
    for alpha in 0..4 {
        let mut e = Vec4::zero();
        e.0[alpha] = 1.0;
        acc2 = acc2.add(&gam(e.scale(0.5 * h)));
        acc2 = acc2.add(&gam(e.scale(-0.5 * h)));
    }
    let brute_h2 = acc2.scale(4.0 / (h * h));
    let brute_rich = brute_h2.scale(4.0 / 3.0).sub(&brute_h.scale(1.0 / 3.0));

    let (fused, err, conv, _evals) = ir_laplacian(p3, lam, lam0, 1.0, h, 1e-7, &opts).unwrap();
    println!("brute(h):    maxabs {:.5e} comp(0,1,3) {:+.5e}", brute_h.max_abs(), brute_h[(0, 1, 3)]);
    println!("brute(rich): maxabs {:.5e} comp(0,1,3) {:+.5e}", brute_rich.max_abs(), brute_rich[(0, 1, 3)]);
    println!("fused:       maxabs {:.5e} comp(0,1,3) {:+.5e} err {:.1e} conv {}", fused.max_abs(), fused[(0, 1, 3)], err, conv);
    println!("fused - brute_rich maxabs: {:.4e}", fused.sub(&brute_rich).max_abs());
}
