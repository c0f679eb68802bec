// Ward-coefficient breakdown: scalar-route vs fused-route vs contracted.
use anomaly_core::kinematics::{CutoffPair, Kinematics};
use anomaly_core::loop_amplitudes::*;
use anomaly_core::quadrature::QuadOptions;
use anomaly_core::tensor::{Vec4, S3};

fn main() {
    let opts = QuadOptions::default();
    let kin = Kinematics::from_two(Vec4([0.9, 0.2, 0.0, 0.0]), Vec4([-0.1, 0.8, 0.3, 0.0]));
    let cut = CutoffPair::new(0.05, 60.0).unwrap();
    let t = kin.invariants();
    println!("invariants {:?}", t);
    let p = kin.momenta();
    let (p12, p13) = (p[0].dot(&p[1]), p[0].dot(&p[2]));

    // scalar route with explicit argument orders
    let arg = |perm: [usize; 3]| [t[perm[0]], t[perm[1]], t[perm[2]]];
    let tol = 1e-9;
    let a213 = amplitude_a(arg([1, 0, 2]), &cut, 1.0, tol, &opts).unwrap().value;
    let b312 = amplitude_b(arg([2, 0, 1]), &cut, 1.0, tol, &opts).unwrap().value;
    let b213 = amplitude_b(arg([1, 0, 2]), &cut, 1.0, tol, &opts).unwrap().value;
    let c_scalar = a213 + p12 * b312 + p13 * b213;
    println!("scalar route: A(213) {:+.6e}  B(312) {:+.6e}  B(213) {:+.6e}", a213, b312, b213);
    println!("ward coefficient scalar route: {:+.6e}", c_scalar);

    // fused route
    let f = permuted_amplitudes(&kin, &cut, 1.0, tol, &opts).unwrap();
    println!("fused A: {:?}", f.values.a);
    println!("fused B: {:?}", f.values.b);
    let s3i = |perm: [usize; 3]| S3.iter().position(|p| *p == perm).unwrap();
    let c_fused = f.values.a[s3i([1, 0, 2])]
        + p12 * f.values.b[s3i([2, 0, 1])]
        + p13 * f.values.b[s3i([1, 0, 2])];
    println!("ward coefficient fused route:  {:+.6e}", c_fused);

    // reference
    let c = contracted_triangle(&kin, 60.0, 1e-8, &opts).unwrap();
    println!("contracted coefficient:        {:+.6e}", c.coefficient);

    // all six scalar A and B for comparison with fused
    for (i, perm) in S3.iter().enumerate() {
        let a = amplitude_a(arg(*perm), &cut, 1.0, tol, &opts).unwrap().value;
        let b = amplitude_b(arg(*perm), &cut, 1.0, tol, &opts).unwrap().value;
        println!(
            "perm {:?}: scalar A {:+.6e} fused A {:+.6e} | scalar B {:+.6e} fused B {:+.6e}",
            perm, a, f.values.a[i], b, f.values.b[i]
        );
    }
}
