// Values of A, B and Gamma components near p2 = 0.
use anomaly_core::kinematics::{CutoffPair, Kinematics};
use anomaly_core::loop_amplitudes::*;
use anomaly_core::quadrature::QuadOptions;
use anomaly_core::tensor::Vec4;

fn main() {
    let opts = QuadOptions::default();
    let cut = CutoffPair::new(0.1, 50.0).unwrap();
    let p3 = Vec4([0.0, 0.0, 1.0, 0.0]);
    for h in [0.0f64, 0.005, 0.01, 0.02] {
        let p2 = Vec4([h, 0.0, 0.0, 0.0]);
        let kin = Kinematics::from_two(-(p3 + p2), p2);
        let f = permuted_amplitudes(&kin, &cut, 1.0, 1e-9, &opts).unwrap();
        let g = gamma_aaa(&kin, &cut, 1.0, 1e-9, &opts).unwrap();
        println!(
            "h {:+.3}: t {:?}\n   A {:?}\n   B {:?}\n   Gamma[(0,1,2)] {:+.6e} [(2,3,0)] {:+.6e} [(0,1,3)] {:+.6e} maxabs {:.4e}",
            h,
            kin.invariants().map(|v| (v * 1e6).round() / 1e6),
            f.values.a.map(|v| (v * 1e6).round() / 1e6),
            f.values.b.map(|v| (v * 1e6).round() / 1e6),
            g.tensor[(0, 1, 2)],
            g.tensor[(2, 3, 0)],
            g.tensor[(0, 1, 3)],
            g.tensor.max_abs()
        );
    }
}
