// Brute-force the value-to-structure assignment of the reduced form against
// the direct loop oracle at two scalene kinematics.
use anomaly_core::kinematics::{CutoffPair, Kinematics};
use anomaly_core::loop_amplitudes::*;
use anomaly_core::quadrature::QuadOptions;
use anomaly_core::tensor::{Vec4, S3};
use anomaly_core::tensor_basis::{basis_tensors, decompose, min_norm_gauge};

fn main() {
    let opts = QuadOptions::default();
    let cut = CutoffPair::new(0.05, 60.0).unwrap();
    let kins = [
        Kinematics::from_two(Vec4([0.9, 0.2, 0.0, 0.0]), Vec4([-0.1, 0.8, 0.3, 0.0])),
        Kinematics::from_two(Vec4([1.1, -0.3, 0.2, 0.0]), Vec4([0.2, 0.9, -0.4, 0.3])),
    ];

    // gather data per kinematics: computed A,B values, direct min-norm
    // invariants, and the basis scale for error context
    let mut data = Vec::new();
    for kin in &kins {
        let f = permuted_amplitudes(kin, &cut, 1.0, 1e-9, &opts).unwrap();
        let d = gamma_aaa_direct(kin, &cut, 1e-6, &opts).unwrap();
        let inv = decompose(&d.tensor, kin, d.error_estimate).unwrap();
        println!("kin invariants {:?}: direct minnorm {:?}", kin.invariants(), inv.a);
        data.push((kin.clone(), f.values, inv.a));
    }

    // permutations of S6 over the six B slots are too many combined with A
    // options; but slots factorize after min-norm projection is *linear*:
    // candidate vector v(slots) -> min_norm_gauge(v) compare. We search:
    //   A-slot pair: (order for T1, order for T2) x sign for T2 (T1 sign
    //   fixed +1 to set the global convention), plus global sign absorbed.
    //   B-slots: permutation pi of the six computed-value orders with signs.
    // To keep it tractable, exploit linearity: residual is linear in each
    // slot's contribution; do a full search over B-perms x B-signs with the
    // A slots solved by least squares over the 12 A-options per slot? We
    // instead brute force: for each of 720 B-perms and 64 sign patterns and
    // 36 A-order pairs and 4 A-sign pairs, check kinematics 0; keep best 20;
    // re-rank on kinematics 1.
    let perms: Vec<[usize; 3]> = S3.to_vec();
    let mut candidates: Vec<(f64, [usize; 2], [f64; 2], [usize; 6], [f64; 6])> = Vec::new();

    let eval_candidate = |a_ord: [usize; 2],
                          a_sgn: [f64; 2],
                          b_ord: [usize; 6],
                          b_sgn: [f64; 6],
                          kin: &Kinematics,
                          vals: &anomaly_core::tensor_basis::PermutedAmplitudes,
                          target: &[f64; 8]|
     -> f64 {
        let mut v = [0.0f64; 8];
        v[0] = a_sgn[0] * vals.a[a_ord[0]];
        v[1] = a_sgn[1] * vals.a[a_ord[1]];
        for k in 0..6 {
            v[2 + k] = b_sgn[k] * vals.b[b_ord[k]];
        }
        let g = min_norm_gauge(&v, kin);
        let mut err = 0.0f64;
        for i in 0..8 {
            err = err.max((g[i] - target[i]).abs());
        }
        err
    };

    // generate all 720 permutations of 0..6
    fn perms6() -> Vec<[usize; 6]> {
        let mut out = Vec::new();
        let mut idx = [0usize; 6];
        fn rec(depth: usize, used: &mut [bool; 6], cur: &mut [usize; 6], out: &mut Vec<[usize; 6]>) {
            if depth == 6 {
                out.push(*cur);
                return;
            }
            for i in 0..6 {
                if !used[i] {
                    used[i] = true;
                    cur[depth] = i;
                    rec(depth + 1, used, cur, out);
                    used[i] = false;
                }
            }
        }
        rec(0, &mut [false; 6], &mut idx, &mut out);
        out
    }

    let all_b = perms6();
    let (kin0, vals0, target0) = &data[0];
    let scale0 = target0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for a0 in 0..6 {
        for a1 in 0..6 {
            for sa in [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]] {
                for bp in &all_b {
                    for mask in 0..64u32 {
                        let mut bs = [1.0f64; 6];
                        for k in 0..6 {
                            if mask >> k & 1 == 1 {
                                bs[k] = -1.0;
                            }
                        }
                        let err = eval_candidate([a0, a1], sa, *bp, bs, kin0, vals0, target0);
                        if err < 0.02 * scale0 {
                            candidates.push((err, [a0, a1], sa, *bp, bs));
                        }
                    }
                }
            }
        }
    }
    println!("candidates passing kin0: {}", candidates.len());
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    candidates.truncate(400);

    let (kin1, vals1, target1) = &data[1];
    let mut final_list: Vec<(f64, f64, [usize; 2], [f64; 2], [usize; 6], [f64; 6])> = candidates
        .into_iter()
        .map(|(e0, ao, asg, bo, bs)| {
            let e1 = eval_candidate(ao, asg, bo, bs, kin1, vals1, target1);
            (e1, e0, ao, asg, bo, bs)
        })
        .collect();
    final_list.sort_by(|a, b| (a.0 + a.1).total_cmp(&(b.0 + b.1)));
    for (e1, e0, ao, asg, bo, bs) in final_list.iter().take(10) {
        println!(
            "err0 {:.3e} err1 {:.3e}: A slots orders ({:?}{:+.0}, {:?}{:+.0}), B slots {:?} signs {:?}",
            e0, e1, perms[ao[0]], asg[0], perms[ao[1]], asg[1],
            bo.map(|k| perms[k]), bs
        );
    }

    // context: basis norms
    let b = basis_tensors(&kins[0]);
    println!("basis maxabs: {:?}", b.iter().map(|t| t.max_abs()).collect::<Vec<_>>());
}
