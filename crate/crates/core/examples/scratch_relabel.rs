// Search numerator-block relabelings against the Ward identity:
//   p1.Gamma == contracted representation
// with c_ward = A(213) + (p1.p2) B(312) + (p1.p3) B(213)  (from the reduced form).
use anomaly_core::kinematics::{CutoffPair, Kinematics};
use anomaly_core::loop_amplitudes::*;
use anomaly_core::quadrature::{integrate_simplex, QuadOptions, SimplexIntegrand};
use anomaly_core::tensor::{Vec4, S3};

// pair sums in z-block order: z1 = x12, z2 = x56, z3 = x34 (slot blocks)
fn zsums(x: &[f64]) -> [f64; 3] {
    [x[0] + x[1], x[4] + x[5], x[2] + x[3]]
}

// numerators in terms of (x12, x34, x56)
fn num_a3(x12: f64, x34: f64, x56: f64) -> f64 {
    2.0 * x56 - (x12 + x34)
}
fn num_a4(x12: f64, x34: f64, x56: f64) -> [f64; 3] {
    [
        x34 * x34 * (1.0 - x34 - 3.0 * x12) - x56 * x56 * (1.0 - x56) + x34 * (x12 - x56),
        3.0 * x56 * (x12 * x12 + x34 * x34) + 2.0 * x12 * x34 - x56 * (x12 + x34),
        x12 * x12 * (1.0 - x12 - 3.0 * x34) - x56 * x56 * (1.0 - x56) + x12 * (x34 - x56),
    ]
}
fn num_b(x12: f64, x34: f64, x56: f64) -> f64 {
    x34 * (x12 * x12 + x56 * x56) - 3.0 * x12 * x34 - x56 * (x12 * x12 + x34 * x34)
}

fn main() {
    let opts = QuadOptions::default();
    let cut = CutoffPair::new(0.02, 80.0).unwrap();
    let kins = [
        Kinematics::from_two(Vec4([0.9, 0.2, 0.0, 0.0]), Vec4([-0.1, 0.8, 0.3, 0.0])),
        Kinematics::from_two(Vec4([1.1, -0.3, 0.2, 0.0]), Vec4([0.2, 0.9, -0.4, 0.3])),
    ];
    let tol = 1e-8;
    let pref = {
        let l2 = cut.lambda() * cut.lambda();
        let l02 = cut.lambda0() * cut.lambda0();
        let d = l02 - l2;
        d * d * d / (core::f64::consts::PI * core::f64::consts::PI)
    };

    // amplitude under relabeling: zn = numerator-block relabel, zw = which
    // invariant multiplies which bracket, applied to function args directly
    let eval_a = |args: [f64; 3], zn: &[usize; 3], zw: &[usize; 3], kin: &Kinematics| -> f64 {
        let _ = kin;
        let f = |x: &[f64]| {
            let z = zsums(x);
            // relabeled groups fed into the numerators as (x12, x34, x56):
            // numerator x12 slot <- z[zn[0]], x34 <- z[zn[2]]... careful:
            // express numerators through (z1, z3, z2) = (x12, x34, x56)
            let x12 = z[zn[0]];
            let x56 = z[zn[1]];
            let x34 = z[zn[2]];
            let d = denominator_d_invariants(x, &cut, args);
            let brackets = num_a4(x12, x34, x56);
            let n4 = args[zw[0]] * brackets[0] + args[zw[1]] * brackets[1] + args[zw[2]] * brackets[2];
            pref * (num_a3(x12, x34, x56) * d + n4) / (d * d * d * d)
        };
        let si = SimplexIntegrand {
            dim: 6,
            eval: &f,
            singular_faces: vec![vec![1, 3, 5]],
        };
        integrate_simplex(&si, tol, &opts).unwrap().value
    };
    let eval_b = |args: [f64; 3], zn: &[usize; 3], kin: &Kinematics| -> f64 {
        let _ = kin;
        let f = |x: &[f64]| {
            let z = zsums(x);
            let x12 = z[zn[0]];
            let x56 = z[zn[1]];
            let x34 = z[zn[2]];
            let d = denominator_d_invariants(x, &cut, args);
            2.0 * pref * num_b(x12, x34, x56) / (d * d * d * d)
        };
        let si = SimplexIntegrand {
            dim: 6,
            eval: &f,
            singular_faces: vec![vec![1, 3, 5]],
        };
        integrate_simplex(&si, tol, &opts).unwrap().value
    };

    // reference contracted coefficients
    let mut refs = Vec::new();
    for kin in &kins {
        let c = contracted_triangle(kin, 80.0, 1e-9, &opts).unwrap();
        refs.push(c.coefficient);
    }
    println!("contracted: {:?}", refs);

    let mut best: Vec<(f64, String)> = Vec::new();
    for zn in S3.iter() {
        for zw in S3.iter() {
            for zb in S3.iter() {
                for sb in [1.0f64, -1.0] {
                    for sa in [1.0f64, -1.0] {
                        let mut worst = 0.0f64;
                        for (kin, cref) in kins.iter().zip(&refs) {
                            let t = kin.invariants();
                            let arg = |p: [usize; 3]| [t[p[0]], t[p[1]], t[p[2]]];
                            let p = kin.momenta();
                            let (p12, p13) = (p[0].dot(&p[1]), p[0].dot(&p[2]));
                            let a213 = sa * eval_a(arg([1, 0, 2]), zn, zw, kin);
                            let b312 = sb * eval_b(arg([2, 0, 1]), zb, kin);
                            let b213 = sb * eval_b(arg([1, 0, 2]), zb, kin);
                            let c = a213 + p12 * b312 + p13 * b213;
                            worst = worst.max(((c - cref) / cref).abs());
                        }
                        if worst < 0.05 {
                            best.push((
                                worst,
                                format!("zn {:?} zw {:?} zb {:?} sa {:+} sb {:+}", zn, zw, zb, sa, sb),
                            ));
                        }
                    }
                }
            }
        }
    }
    best.sort_by(|a, b| a.0.total_cmp(&b.0));
    println!("candidates within 5%:");
    for (e, s) in best.iter().take(20) {
        println!("  {:.3e}  {}", e, s);
    }
    if best.is_empty() {
        println!("none found");
    }
}
