//! Invariant decomposition of the three-photon amplitude.
//!
//! The amplitude `Gamma_{mu nu rho}(p1,p2,p3)` is expanded over eight
//! parity-odd structures (two `p.eps` terms and six
//! `momentum_slot x eps(p1,p2)` terms). In four dimensions these eight form
//! a redundant frame, not a basis: two Schouten identities
//!
//! ```text
//! (p1.p2) T1 - p1^2 T2 + T3 - T5 - T7 = 0
//! -p2^2 T1 + (p1.p2) T2 - T4 + T6 + T8 = 0
//! ```
//!
//! hold exactly, so the span has rank 6 and invariants are defined up to
//! these two null directions. [`decompose`] therefore returns the
//! minimum-norm representative; the canonical representative used
//! everywhere else is the reduced two-amplitude form
//!
//! ```text
//! Gamma = [A(123) p1 - A(213) p2]_tau eps_{tau mu nu rho}
//!       + [B(123) p3_nu + B(321) p1_nu] eps_{alpha beta rho mu} p1_a p2_b
//!       + [B(312) p2_mu + B(213) p3_mu] eps_{alpha beta nu rho} p1_a p2_b
//!       + [B(231) p1_rho + B(132) p2_rho] eps_{alpha beta mu nu} p1_a p2_b
//! ```
//!
//! Bose symmetry ties the eight invariants at the six argument orders
//! together. [`derive_relations`] reproduces those constraints the way they
//! are obtained on paper: each exchanged structure is re-expanded over the
//! base structures by multilinearity (exact integer coefficients, validated
//! numerically at the sampled configurations) and coefficients are matched
//! slot by slot. Seven quoted relations lie in that constraint space; the
//! quoted `A6(123)=A8(213)` does not and is carried separately together
//! with the consistent reading `A7(123)=A8(213)` so the numerics can decide
//! between them.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::fmath;
use crate::kinematics::Kinematics;
use crate::tensor::{eps_contract2, epsf, perm_sign3, Rank3Tensor, Vec4, S3};

#[derive(Clone, Debug, PartialEq)]
pub enum TensorBasisError {
    /// The frame loses rank beyond the generic two Schouten directions.
    DegenerateKinematics { condition_number: f64 },
    BadInput(String),
}

impl fmt::Display for TensorBasisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensorBasisError::DegenerateKinematics { condition_number } => write!(
                f,
                "degenerate kinematics: frame condition number {:.3e}",
                condition_number
            ),
            TensorBasisError::BadInput(m) => write!(f, "{}", m),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TensorBasisError {}

/// Condition number (within the rank-6 subspace) above which a
/// decomposition is refused.
pub const DEGENERACY_THRESHOLD: f64 = 1e8;

/// Index of a permutation inside the canonical [`S3`] order.
pub fn s3_index(perm: &[usize; 3]) -> usize {
    S3.iter().position(|p| p == perm).expect("a permutation of {0,1,2}")
}

/// Tuple composition: applying `b` after `a` to an argument tuple,
/// `(t o a) o b = t o (a o b)` with `(a o b)(i) = a(b(i))`.
pub fn s3_compose(a: &[usize; 3], b: &[usize; 3]) -> [usize; 3] {
    [a[b[0]], a[b[1]], a[b[2]]]
}

/// The eight frame tensors at `(p1, p2)`, in the canonical order
/// `p1.eps`, `p2.eps`, then the six `momentum_slot x eps(p1,p2)` blocks.
pub fn basis_tensors(kin: &Kinematics) -> [Rank3Tensor; 8] {
    let p1 = kin.p1();
    let p2 = kin.p2();
    let e = eps_contract2(&p1, &p2); // e[(c,d)] = eps(c,d,alpha,beta) p1_a p2_b
    let slot_eps = |p: &Vec4| {
        Rank3Tensor::from_fn(|mu, nu, rho| {
            let mut s = 0.0;
            for tau in 0..4 {
                s += p[tau] * epsf(tau, mu, nu, rho);
            }
            s
        })
    };
    [
        slot_eps(&p1),
        slot_eps(&p2),
        // A3: p1_nu eps_{alpha beta mu rho}
        Rank3Tensor::from_fn(|mu, nu, rho| p1[nu] * e[(mu, rho)]),
        Rank3Tensor::from_fn(|mu, nu, rho| p2[nu] * e[(mu, rho)]),
        // A5: p1_mu eps_{alpha beta nu rho}
        Rank3Tensor::from_fn(|mu, nu, rho| p1[mu] * e[(nu, rho)]),
        Rank3Tensor::from_fn(|mu, nu, rho| p2[mu] * e[(nu, rho)]),
        // A7: p1_rho eps_{alpha beta mu nu}
        Rank3Tensor::from_fn(|mu, nu, rho| p1[rho] * e[(mu, nu)]),
        Rank3Tensor::from_fn(|mu, nu, rho| p2[rho] * e[(mu, nu)]),
    ]
}

/// The two exact null combinations of the frame (Schouten identities),
/// as coefficient vectors over the eight structures.
pub fn schouten_null_vectors(kin: &Kinematics) -> [[f64; 8]; 2] {
    let p1 = kin.p1();
    let p2 = kin.p2();
    let d = p1.dot(&p2);
    [
        [d, -p1.norm2(), 1.0, 0.0, -1.0, 0.0, -1.0, 0.0],
        [-p2.norm2(), d, 0.0, -1.0, 0.0, 1.0, 0.0, 1.0],
    ]
}

/// Removes the null components: the minimum-norm representative of an
/// invariant vector.
pub fn min_norm_gauge(a: &[f64; 8], kin: &Kinematics) -> [f64; 8] {
    let nulls = schouten_null_vectors(kin);
    // project out span(n1, n2) via the 2x2 normal equations
    let dot = |x: &[f64; 8], y: &[f64; 8]| -> f64 { x.iter().zip(y).map(|(a, b)| a * b).sum() };
    let g11 = dot(&nulls[0], &nulls[0]);
    let g12 = dot(&nulls[0], &nulls[1]);
    let g22 = dot(&nulls[1], &nulls[1]);
    let b1 = dot(a, &nulls[0]);
    let b2 = dot(a, &nulls[1]);
    let det = g11 * g22 - g12 * g12;
    let mut out = *a;
    if det.max(0.0) > 0.0 {
        let c1 = (b1 * g22 - b2 * g12) / det;
        let c2 = (b2 * g11 - b1 * g12) / det;
        for i in 0..8 {
            out[i] -= c1 * nulls[0][i] + c2 * nulls[1][i];
        }
    }
    out
}

/// `A` and `B` values over the six argument orders, indexed by [`S3`].
#[derive(Clone, Debug, PartialEq)]
pub struct PermutedAmplitudes {
    pub a: [f64; 6],
    pub b: [f64; 6],
}

impl PermutedAmplitudes {
    pub fn a_at(&self, perm: &[usize; 3]) -> f64 {
        self.a[s3_index(perm)]
    }

    pub fn b_at(&self, perm: &[usize; 3]) -> f64 {
        self.b[s3_index(perm)]
    }

    /// The same values reindexed for the kinematics permuted by `sigma`:
    /// an amplitude at order `rho` of the permuted triple is the amplitude
    /// at order `sigma o rho` of the base triple.
    pub fn permuted_base(&self, sigma: &[usize; 3]) -> PermutedAmplitudes {
        let mut a = [0.0; 6];
        let mut b = [0.0; 6];
        for (i, rho) in S3.iter().enumerate() {
            let idx = s3_index(&s3_compose(sigma, rho));
            a[i] = self.a[idx];
            b[i] = self.b[idx];
        }
        PermutedAmplitudes { a, b }
    }
}

/// Weight tensors of the reduced reconstruction: the twelve scalars
/// (six `A(sigma)`, six `B(sigma)`, in [`S3`] order) enter linearly with
/// these tensors; unused `A` orders carry zero weight.
pub fn expr_weight_tensors(kin: &Kinematics) -> [Rank3Tensor; 12] {
    let p1 = kin.p1();
    let p2 = kin.p2();
    let p3 = kin.p3();
    let e = eps_contract2(&p1, &p2);
    let slot_eps = |p: &Vec4, sign: f64| {
        Rank3Tensor::from_fn(|mu, nu, rho| {
            let mut s = 0.0;
            for tau in 0..4 {
                s += p[tau] * epsf(tau, mu, nu, rho);
            }
            sign * s
        })
    };
    let zero = Rank3Tensor::zero;
    // eps_{alpha beta rho mu} p1 p2 = e[(rho, mu)], etc.
    let b_nu = |p: &Vec4| Rank3Tensor::from_fn(|mu, nu, rho| p[nu] * e[(rho, mu)]);
    let b_mu = |p: &Vec4| Rank3Tensor::from_fn(|mu, nu, rho| p[mu] * e[(nu, rho)]);
    let b_rho = |p: &Vec4| Rank3Tensor::from_fn(|mu, nu, rho| p[rho] * e[(mu, nu)]);
    [
        // A weights: only (123) and (213) appear
        slot_eps(&p1, 1.0),  // A(123)
        slot_eps(&p2, -1.0), // A(213)
        zero(),
        zero(),
        zero(),
        zero(),
        // B weights in S3 order: 123, 213, 321, 132, 231, 312
        b_nu(&p3),  // B(123) p3_nu eps_.. rho mu
        b_mu(&p3),  // B(213) p3_mu eps_.. nu rho
        b_nu(&p1),  // B(321) p1_nu eps_.. rho mu
        b_rho(&p2), // B(132) p2_rho eps_.. mu nu
        b_rho(&p1), // B(231) p1_rho eps_.. mu nu
        b_mu(&p2),  // B(312) p2_mu eps_.. nu rho
    ]
}

/// Assembles the amplitude tensor from the reduced two-amplitude form.
pub fn reconstruct_from_ab(values: &PermutedAmplitudes, kin: &Kinematics) -> Rank3Tensor {
    let weights = expr_weight_tensors(kin);
    let mut out = Rank3Tensor::zero();
    for (i, w) in weights.iter().enumerate() {
        let c = if i < 6 { values.a[i] } else { values.b[i - 6] };
        if c != 0.0 {
            out = out.add(&w.scale(c));
        }
    }
    out
}

/// The eight invariants of the reduced representative at the base order:
/// `A1 = A(123)`, `A2 = -A(213)`, `A3 = B(123) - B(321)`, `A4 = B(123)`,
/// `A5 = -B(213)`, `A6 = B(312) - B(213)`, `A7 = B(231)`, `A8 = B(132)`.
pub fn invariants_from_ab(values: &PermutedAmplitudes) -> [f64; 8] {
    let a = |p: [usize; 3]| values.a[s3_index(&p)];
    let b = |p: [usize; 3]| values.b[s3_index(&p)];
    [
        a([0, 1, 2]),
        -a([1, 0, 2]),
        b([0, 1, 2]) - b([2, 1, 0]),
        b([0, 1, 2]),
        -b([1, 0, 2]),
        b([2, 0, 1]) - b([1, 0, 2]),
        b([1, 2, 0]),
        b([0, 2, 1]),
    ]
}

/// The full 48-component invariant assignment (eight invariants at each of
/// the six argument orders) induced by computed `A`, `B` values, together
/// with propagated error bounds.
pub fn assignment_from_ab(
    values: &PermutedAmplitudes,
    a_errors: &[f64; 6],
    b_errors: &[f64; 6],
) -> ([f64; 48], [f64; 48]) {
    let mut out = [0.0f64; 48];
    let mut err = [0.0f64; 48];
    for (s, base) in S3.iter().enumerate() {
        let shifted = values.permuted_base(base);
        let inv = invariants_from_ab(&shifted);
        // error transport mirrors the value mapping
        let ae = |p: [usize; 3]| a_errors[s3_index(&s3_compose(base, &p))];
        let be = |p: [usize; 3]| b_errors[s3_index(&s3_compose(base, &p))];
        let errs = [
            ae([0, 1, 2]),
            ae([1, 0, 2]),
            be([0, 1, 2]) + be([2, 1, 0]),
            be([0, 1, 2]),
            be([1, 0, 2]),
            be([2, 0, 1]) + be([1, 0, 2]),
            be([1, 2, 0]),
            be([0, 2, 1]),
        ];
        for i in 0..8 {
            out[8 * s + i] = inv[i];
            err[8 * s + i] = errs[i];
        }
    }
    (out, err)
}

/// The eight invariants of a decomposed tensor at one argument order.
#[derive(Clone, Debug)]
pub struct InvariantSet {
    /// Minimum-norm representative over the redundant frame.
    pub a: [f64; 8],
    /// Squared invariants `(p1^2, p2^2, p3^2)` of the decomposition point.
    pub args: [f64; 3],
    /// Ratio of largest to smallest retained Gram eigenvalue.
    pub condition_number: f64,
    /// Norm of the component of the input outside the frame span.
    pub residual_norm: f64,
    /// Heuristic per-invariant error bounds for the given input error.
    pub errors: [f64; 8],
}

/// Eigen-decomposition of a symmetric 8x8 matrix by cyclic Jacobi
/// rotations; returns (eigenvalues, eigenvectors as rows).
fn jacobi_eigen8(g: &[[f64; 8]; 8]) -> ([f64; 8], [[f64; 8]; 8]) {
    let mut a = *g;
    let mut v = [[0.0f64; 8]; 8];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..96 {
        let mut off = 0.0;
        for i in 0..8 {
            for j in (i + 1)..8 {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..8 {
            for q in (p + 1)..8 {
                if fmath::abs(a[p][q]) < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + fmath::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + fmath::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / fmath::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..8 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..8 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..8 {
                    let vpk = v[p][k];
                    let vqk = v[q][k];
                    v[p][k] = c * vpk - s * vqk;
                    v[q][k] = s * vpk + c * vqk;
                }
            }
        }
    }
    let mut ev = [0.0f64; 8];
    for i in 0..8 {
        ev[i] = a[i][i];
    }
    (ev, v)
}

/// Least-squares decomposition of a rank-3 tensor over the frame, with
/// condition monitoring.
///
/// The Gram matrix has exactly two null directions at non-degenerate
/// kinematics; the pseudo-inverse over the remaining six eigenvalues gives
/// the minimum-norm invariants. `input_error` is a max-norm bound on the
/// per-component error of `gamma` and propagates into per-invariant bounds.
pub fn decompose(
    gamma: &Rank3Tensor,
    kin: &Kinematics,
    input_error: f64,
) -> Result<InvariantSet, TensorBasisError> {
    let basis = basis_tensors(kin);
    let mut g = [[0.0f64; 8]; 8];
    let mut b = [0.0f64; 8];
    for i in 0..8 {
        for j in 0..8 {
            g[i][j] = basis[i].dot(&basis[j]);
        }
        b[i] = basis[i].dot(gamma);
    }
    let (ev, vecs) = jacobi_eigen8(&g);
    let emax = ev.iter().fold(0.0f64, |m, v| m.max(*v));
    if !(emax > 0.0) {
        return Err(TensorBasisError::DegenerateKinematics {
            condition_number: f64::INFINITY,
        });
    }
    // the two Schouten directions sit at (numerically) zero eigenvalues
    let cutoff = 1e-10 * emax;
    let mut kept_min = f64::INFINITY;
    let mut kept = 0usize;
    for e in ev.iter() {
        if *e > cutoff {
            kept += 1;
            kept_min = kept_min.min(*e);
        }
    }
    if kept < 6 {
        return Err(TensorBasisError::DegenerateKinematics {
            condition_number: f64::INFINITY,
        });
    }
    let condition_number = emax / kept_min;
    if condition_number > DEGENERACY_THRESHOLD {
        return Err(TensorBasisError::DegenerateKinematics { condition_number });
    }

    // pseudo-inverse solve and its diagonal for error transport
    let mut a = [0.0f64; 8];
    let mut ginv_diag = [0.0f64; 8];
    for (e, vec) in ev.iter().zip(vecs.iter()) {
        if *e <= cutoff {
            continue;
        }
        let proj: f64 = vec.iter().zip(b.iter()).map(|(v, b)| v * b).sum();
        for i in 0..8 {
            a[i] += vec[i] * proj / e;
            ginv_diag[i] += vec[i] * vec[i] / e;
        }
    }

    let mut recon = Rank3Tensor::zero();
    for i in 0..8 {
        recon = recon.add(&basis[i].scale(a[i]));
    }
    let diff = gamma.sub(&recon);
    let residual_norm = fmath::sqrt(diff.dot(&diff));

    // |delta a_i| <= sqrt((G^+)_ii) |T^T dgamma|_2
    //            <= sqrt((G^+)_ii  sum_j |T_j|^2) * 8 * input_error
    let basis_l2: f64 = (0..8).map(|i| g[i][i]).sum();
    let mut errors = [0.0f64; 8];
    for i in 0..8 {
        errors[i] = fmath::sqrt(ginv_diag[i] * basis_l2) * 8.0 * input_error;
    }

    Ok(InvariantSet {
        a,
        args: kin.invariants(),
        condition_number,
        residual_norm,
        errors,
    })
}

// ---------------------------------------------------------------------------
// Bose-symmetry relations
// ---------------------------------------------------------------------------

/// One symmetry relation: `sum_k coeff_k A_{i_k}(base o perm_k) = 0`,
/// holding for every base argument order.
#[derive(Clone, Debug)]
pub struct NorRelation {
    pub name: &'static str,
    pub terms: Vec<(usize, [usize; 3], f64)>,
}

const ID3: [usize; 3] = [0, 1, 2];
const SWAP12: [usize; 3] = [1, 0, 2];
const REV: [usize; 3] = [2, 1, 0];
const CYC231: [usize; 3] = [1, 2, 0];
const CYC312: [usize; 3] = [2, 0, 1];

/// The seven consistent quoted relations. The second line of the source
/// list is read as `A1(123) = A1(321)` (its closing parenthesis is clipped
/// there); the rank test against the derived constraint space validates
/// that reading.
pub fn nor_relations() -> Vec<NorRelation> {
    alloc::vec![
        NorRelation {
            name: "A1(123)+A1(231)+A1(312)=0",
            terms: alloc::vec![(0, ID3, 1.0), (0, CYC231, 1.0), (0, CYC312, 1.0)],
        },
        NorRelation {
            name: "A1(123)=A1(321)",
            terms: alloc::vec![(0, ID3, 1.0), (0, REV, -1.0)],
        },
        NorRelation {
            name: "A2(123)=-A1(213)",
            terms: alloc::vec![(1, ID3, 1.0), (0, SWAP12, 1.0)],
        },
        NorRelation {
            name: "A5(123)=-A4(213)",
            terms: alloc::vec![(4, ID3, 1.0), (3, SWAP12, 1.0)],
        },
        NorRelation {
            name: "A6(123)=-A3(213)",
            terms: alloc::vec![(5, ID3, 1.0), (2, SWAP12, 1.0)],
        },
        NorRelation {
            name: "A7(123)=A4(231)",
            terms: alloc::vec![(6, ID3, 1.0), (3, CYC231, -1.0)],
        },
        NorRelation {
            name: "A3(123)=A4(123)-A4(321)",
            terms: alloc::vec![(2, ID3, 1.0), (3, ID3, -1.0), (3, REV, 1.0)],
        },
    ]
}

/// The quoted sixth line as printed, `A6(123)=A8(213)`. It is inconsistent
/// with the other relations (it would force an extra constraint on `B`)
/// and is kept only so the numerics can report its violation.
pub fn nor_relation_as_printed() -> NorRelation {
    NorRelation {
        name: "A6(123)=A8(213) (as printed)",
        terms: alloc::vec![(5, ID3, 1.0), (7, SWAP12, -1.0)],
    }
}

/// The consistent reading of that line, `A7(123)=A8(213)`; this one does
/// lie in the derived constraint space.
pub fn nor_relation_corrected() -> NorRelation {
    NorRelation {
        name: "A7(123)=A8(213) (corrected reading)",
        terms: alloc::vec![(6, ID3, 1.0), (7, SWAP12, -1.0)],
    }
}

/// Flattened unknown index for `A_i` at argument-order block `s`.
fn unknown_index(i: usize, s: usize) -> usize {
    8 * s + i
}

/// A relation expressed as a constant row over the 48 unknowns.
pub fn relation_row(rel: &NorRelation, base: &[usize; 3]) -> [f64; 48] {
    let mut row = [0.0f64; 48];
    for (i, perm, coeff) in &rel.terms {
        let s = s3_index(&s3_compose(base, perm));
        row[unknown_index(*i, s)] += coeff;
    }
    row
}

/// Residual of one relation instance on a 48-component assignment, with
/// the matching combined error bound.
pub fn relation_residual(
    rel: &NorRelation,
    assignment: &[f64; 48],
    errors: &[f64; 48],
    base: &[usize; 3],
) -> (f64, f64) {
    let mut val = 0.0;
    let mut err = 0.0;
    for (i, perm, coeff) in &rel.terms {
        let s = s3_index(&s3_compose(base, perm));
        val += coeff * assignment[unknown_index(*i, s)];
        err += fmath::abs(*coeff) * errors[unknown_index(*i, s)];
    }
    (val, err)
}

/// Worst residual of a relation over all six base orders.
pub fn relation_max_residual(
    rel: &NorRelation,
    assignment: &[f64; 48],
    errors: &[f64; 48],
) -> (f64, f64) {
    let mut worst = (0.0, 0.0);
    for base in S3.iter() {
        let (v, e) = relation_residual(rel, assignment, errors, base);
        if fmath::abs(v) >= worst.0 {
            worst = (fmath::abs(v), e);
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Derivation of the constraint space
// ---------------------------------------------------------------------------

// Formal structure patterns: 0,1 = (p1|p2).eps; 2..8 = prefactor structures
// in the frame order. Expansions of exchanged structures stay inside this
// eight-pattern space with integer coefficients.

// momentum components in the (p1, p2) plane; p3 = -p1 - p2
const PVEC: [[i64; 2]; 3] = [[1, 0], [0, 1], [-1, -1]];
// canonical epsilon slot pair for each prefactor slot (mu, nu, rho)
const CANON_PAIR: [[usize; 2]; 3] = [[1, 2], [0, 2], [0, 1]];
// frame index for (prefactor slot, momentum): PRE_INDEX[slot][v]
const PRE_INDEX: [[usize; 2]; 3] = [[4, 5], [2, 3], [6, 7]];
// structure catalog: (is_eps_type, which momentum argument, own prefactor slot)
const STRUCTS: [(bool, usize, usize); 8] = [
    (true, 0, 0),
    (true, 1, 0),
    (false, 0, 1),
    (false, 1, 1),
    (false, 0, 0),
    (false, 1, 0),
    (false, 0, 2),
    (false, 1, 2),
];

/// Integer matrix `M` of the exchange `sigma`:
/// `T_i(p_sigma(1), p_sigma(2)) at permuted index slots
///  = sum_j M[i][j] T_j(p1, p2)`,
/// by multilinear re-expansion (momentum conservation, bilinearity of
/// `eps(.,.)` and slot antisymmetry only; no Schouten identities).
pub fn exchange_matrix(sigma: &[usize; 3]) -> [[i64; 8]; 8] {
    let mut m = [[0i64; 8]; 8];
    let a = PVEC[sigma[0]];
    let b = PVEC[sigma[1]];
    let det = a[0] * b[1] - a[1] * b[0];
    let sgn = perm_sign3(sigma) as i64;
    for (i, (is_eps, whichq, own_slot)) in STRUCTS.iter().enumerate() {
        let q = PVEC[sigma[*whichq]];
        if *is_eps {
            for (v, c) in [(0usize, q[0]), (1, q[1])] {
                if c != 0 {
                    m[i][v] += c * sgn;
                }
            }
        } else {
            let s = *own_slot;
            let orig_slot = sigma[s];
            let rest: Vec<usize> = (0..3).filter(|k| *k != s).collect();
            let orig_pair = [sigma[rest[0]], sigma[rest[1]]];
            let canon = CANON_PAIR[orig_slot];
            let pair_sign = if orig_pair == canon {
                1
            } else {
                debug_assert_eq!([orig_pair[1], orig_pair[0]], canon);
                -1
            };
            for (v, c) in [(0usize, q[0]), (1, q[1])] {
                if c != 0 {
                    m[i][PRE_INDEX[orig_slot][v]] += c * pair_sign * det;
                }
            }
        }
    }
    m
}

/// Linear constraints over the 48 unknowns `{A_i(sigma)}` obtained by
/// matching structure coefficients across Bose exchanges.
pub struct RelationMatrix {
    /// Raw rows (one per base structure per exchange).
    pub rows: Vec<[f64; 48]>,
    /// Orthonormalized row space.
    basis: Vec<[f64; 48]>,
}

impl RelationMatrix {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Projection residual of a row onto the derived space, relative to the
    /// row norm; ~0 means the row is implied by the derived constraints.
    pub fn containment_residual(&self, row: &[f64; 48]) -> f64 {
        let mut r = *row;
        for q in &self.basis {
            let dot: f64 = r.iter().zip(q.iter()).map(|(a, b)| a * b).sum();
            for (ri, qi) in r.iter_mut().zip(q.iter()) {
                *ri -= dot * qi;
            }
        }
        let num: f64 = fmath::sqrt(r.iter().map(|v| v * v).sum());
        let den: f64 = fmath::sqrt(row.iter().map(|v| v * v).sum());
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    /// Worst violation of the derived rows by an assignment, with the
    /// matching error bounds.
    pub fn max_violation(&self, assignment: &[f64; 48], errors: &[f64; 48]) -> (f64, f64) {
        let mut worst = (0.0f64, 0.0f64);
        for row in &self.rows {
            let v: f64 = row.iter().zip(assignment).map(|(r, a)| r * a).sum();
            let e: f64 = row.iter().zip(errors).map(|(r, er)| fmath::abs(*r) * er).sum();
            if fmath::abs(v) >= worst.0 {
                worst = (fmath::abs(v), e);
            }
        }
        worst
    }
}

/// The momentum-configuration classes used for validation sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConfigClass {
    /// `p1 = (x,0,y,z)`, `p2 = (0,0,0,w)`.
    AxisP2,
    /// Both momenta in the (0,3) coordinate plane.
    Plane03,
    /// Both momenta in the (2,3) coordinate plane.
    Plane23,
}

fn classify(kin: &Kinematics) -> Option<ConfigClass> {
    let p1 = kin.p1();
    let p2 = kin.p2();
    let tiny = 1e-12 * kin.momentum_scale().max(1e-300);
    let z = |v: f64| fmath::abs(v) < tiny;
    if z(p1[1]) && z(p2[0]) && z(p2[1]) && z(p2[2]) {
        Some(ConfigClass::AxisP2)
    } else if z(p1[1]) && z(p1[2]) && z(p2[1]) && z(p2[2]) {
        Some(ConfigClass::Plane03)
    } else if z(p1[0]) && z(p1[1]) && z(p2[0]) && z(p2[1]) {
        Some(ConfigClass::Plane23)
    } else {
        None
    }
}

/// Builds sample kinematics of all three classes sharing one invariant
/// triple `(t1, t2, t3)`; near-equilateral triples are realizable.
pub fn relation_samples(t: [f64; 3]) -> Result<Vec<Kinematics>, TensorBasisError> {
    let fail = |m: &str| Err(TensorBasisError::BadInput(format!("triple {:?}: {}", t, m)));
    if t.iter().any(|v| *v <= 0.0) {
        return fail("invariants must be positive");
    }
    let dot12 = 0.5 * (t[2] - t[0] - t[1]);
    let mut out = Vec::new();
    {
        let w = fmath::sqrt(t[1]);
        let z = dot12 / w;
        let rest = t[0] - z * z;
        if rest <= 0.0 {
            return fail("class-1 embedding impossible");
        }
        let x = fmath::sqrt(0.7 * rest);
        let y = fmath::sqrt(0.3 * rest);
        out.push(Kinematics::from_two(Vec4([x, 0.0, y, z]), Vec4([0.0, 0.0, 0.0, w])));
    }
    {
        let a = fmath::sqrt(t[0]);
        let c = dot12 / a;
        let rest = t[1] - c * c;
        if rest <= 0.0 {
            return fail("class-2 embedding impossible");
        }
        out.push(Kinematics::from_two(
            Vec4([a, 0.0, 0.0, 0.0]),
            Vec4([c, 0.0, 0.0, fmath::sqrt(rest)]),
        ));
    }
    {
        let a = fmath::sqrt(t[0]);
        let c = dot12 / a;
        let rest = t[1] - c * c;
        if rest <= 0.0 {
            return fail("class-3 embedding impossible");
        }
        out.push(Kinematics::from_two(
            Vec4([0.0, 0.0, a, 0.0]),
            Vec4([0.0, 0.0, c, fmath::sqrt(rest)]),
        ));
    }
    Ok(out)
}

/// Derives the Bose constraint space.
///
/// For every exchange, the permuted structures are re-expanded over the
/// base structures ([`exchange_matrix`]) and coefficients matched; the
/// expansion identities are validated componentwise at every sampled
/// configuration, which must cover all three classes.
pub fn derive_relations(samples: &[Kinematics]) -> Result<RelationMatrix, TensorBasisError> {
    if samples.is_empty() {
        return Err(TensorBasisError::BadInput("no samples".into()));
    }
    let mut seen = [false; 3];
    for kin in samples {
        let class = classify(kin).ok_or_else(|| {
            TensorBasisError::BadInput(
                "sample momenta do not sit in a recognized configuration class".into(),
            )
        })?;
        seen[class as usize] = true;
        // validate every exchange expansion at this sample, componentwise
        let base = basis_tensors(kin);
        let moms = kin.momenta();
        let scale = kin.momentum_scale();
        let tol = 1e-10 * scale * scale * scale;
        for sigma in S3.iter() {
            let m = exchange_matrix(sigma);
            let kp = Kinematics::from_two(moms[sigma[0]], moms[sigma[1]]);
            let perm_tensors = basis_tensors(&kp);
            for i in 0..8 {
                for mu in 0..4 {
                    for nu in 0..4 {
                        for rho in 0..4 {
                            let idx = [mu, nu, rho];
                            let pidx = [idx[sigma[0]], idx[sigma[1]], idx[sigma[2]]];
                            let lhs = perm_tensors[i][(pidx[0], pidx[1], pidx[2])];
                            let mut rhs = 0.0;
                            for j in 0..8 {
                                if m[i][j] != 0 {
                                    rhs += m[i][j] as f64 * base[j][(mu, nu, rho)];
                                }
                            }
                            if fmath::abs(lhs - rhs) > tol {
                                return Err(TensorBasisError::BadInput(format!(
                                    "exchange expansion failed validation at sigma {:?}, structure {}, component ({},{},{})",
                                    sigma, i, mu, nu, rho
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    if !seen.iter().all(|s| *s) {
        return Err(TensorBasisError::BadInput(
            "samples must include all three configuration classes".into(),
        ));
    }

    // rows: matching the coefficient of base structure j across exchange sigma
    let mut rows: Vec<[f64; 48]> = Vec::new();
    for sigma in S3.iter().skip(1) {
        let m = exchange_matrix(sigma);
        let sidx = s3_index(sigma);
        for j in 0..8 {
            let mut row = [0.0f64; 48];
            row[unknown_index(j, 0)] += 1.0;
            for i in 0..8 {
                if m[i][j] != 0 {
                    row[unknown_index(i, sidx)] -= m[i][j] as f64;
                }
            }
            rows.push(row);
        }
    }
    let mut basis: Vec<[f64; 48]> = Vec::new();
    for row in &rows {
        let mut r = *row;
        for q in basis.iter() {
            let dot: f64 = r.iter().zip(q.iter()).map(|(a, b)| a * b).sum();
            for (ri, qi) in r.iter_mut().zip(q.iter()) {
                *ri -= dot * qi;
            }
        }
        let norm: f64 = fmath::sqrt(r.iter().map(|v| v * v).sum());
        if norm > 1e-9 {
            for v in r.iter_mut() {
                *v /= norm;
            }
            basis.push(r);
        }
    }
    Ok(RelationMatrix { rows, basis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{equilateral, equilateral_tilted};

    #[test]
    fn schouten_identities_are_exact() {
        for kin in [
            equilateral(1.0),
            equilateral_tilted(1.3),
            Kinematics::from_two(Vec4([0.9, 0.2, -0.4, 0.0]), Vec4([-0.1, 0.8, 0.3, 0.7])),
        ] {
            let t = basis_tensors(&kin);
            for null in schouten_null_vectors(&kin) {
                let mut combo = Rank3Tensor::zero();
                for i in 0..8 {
                    combo = combo.add(&t[i].scale(null[i]));
                }
                assert!(combo.max_abs() < 1e-12, "null combo {:?}", null);
            }
        }
    }

    #[test]
    fn basis_vanishes_for_parallel_momenta() {
        let kin = Kinematics::from_two(Vec4([1.0, 0.0, 0.0, 0.0]), Vec4([-2.0, 0.0, 0.0, 0.0]));
        let t = basis_tensors(&kin);
        for b in &t[2..] {
            assert_eq!(b.max_abs(), 0.0);
        }
        assert!(t[0].max_abs() > 0.0);
    }

    #[test]
    fn basis_antisymmetry_in_epsilon_slots() {
        let kin = equilateral(1.0);
        let t1 = &basis_tensors(&kin)[0];
        for mu in 0..4 {
            for nu in 0..4 {
                for rho in 0..4 {
                    assert_eq!(t1[(mu, nu, rho)], -t1[(nu, mu, rho)]);
                    assert_eq!(t1[(mu, nu, rho)], -t1[(mu, rho, nu)]);
                }
            }
        }
    }

    #[test]
    fn frame_rank_is_six_at_reference_kinematics() {
        let kin = equilateral(1.0);
        let d = decompose(&Rank3Tensor::zero(), &kin, 0.0).unwrap();
        assert!(d.condition_number < 1e3, "cond {}", d.condition_number);
        for v in d.a {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn degenerate_kinematics_detected() {
        let kin = Kinematics::from_two(Vec4([1.0, 0.0, 0.0, 0.0]), Vec4([-2.0, 0.0, 0.0, 0.0]));
        assert!(matches!(
            decompose(&Rank3Tensor::zero(), &kin, 0.0),
            Err(TensorBasisError::DegenerateKinematics { .. })
        ));
    }

    #[test]
    fn decompose_returns_min_norm_gauge_of_frame_elements() {
        let kin = equilateral_tilted(1.0);
        let basis = basis_tensors(&kin);
        for (k, b) in basis.iter().enumerate() {
            let d = decompose(b, &kin, 0.0).unwrap();
            let mut unit = [0.0f64; 8];
            unit[k] = 1.0;
            let expect = min_norm_gauge(&unit, &kin);
            for i in 0..8 {
                assert!(
                    (d.a[i] - expect[i]).abs() < 1e-9,
                    "frame {} invariant {}: {} vs {}",
                    k,
                    i,
                    d.a[i],
                    expect[i]
                );
            }
            // the reconstruction round-trips exactly within the span
            assert!(d.residual_norm < 1e-10);
            let mut recon = Rank3Tensor::zero();
            for i in 0..8 {
                recon = recon.add(&basis[i].scale(d.a[i]));
            }
            assert!(recon.sub(b).max_abs() < 1e-10);
        }
    }

    #[test]
    fn roundtrip_reconstruct_decompose_on_tensors() {
        let kin = equilateral(1.0);
        let vals = PermutedAmplitudes {
            a: [0.3, -0.2, 0.1, 0.4, -0.5, 0.25],
            b: [1.1, 0.7, -0.3, 0.2, 0.9, -0.8],
        };
        let gamma = reconstruct_from_ab(&vals, &kin);
        let d = decompose(&gamma, &kin, 0.0).unwrap();
        assert!(d.residual_norm < 1e-10 * gamma.max_abs().max(1.0));
        // tensor-level round trip
        let basis = basis_tensors(&kin);
        let mut recon = Rank3Tensor::zero();
        for i in 0..8 {
            recon = recon.add(&basis[i].scale(d.a[i]));
        }
        assert!(recon.sub(&gamma).max_abs() < 1e-9);
        // gauge-projected invariants agree with the reduced representative
        let expect = min_norm_gauge(&invariants_from_ab(&vals), &kin);
        for i in 0..8 {
            assert!(
                (d.a[i] - expect[i]).abs() < 1e-9,
                "invariant {}: {} vs {}",
                i,
                d.a[i],
                expect[i]
            );
        }
    }

    #[test]
    fn constant_a_without_b_violates_sum_rule() {
        let vals = PermutedAmplitudes {
            a: [0.5; 6],
            b: [0.0; 6],
        };
        let (assignment, errors) = assignment_from_ab(&vals, &[0.0; 6], &[0.0; 6]);
        let rels = nor_relations();
        let (sum_rule, _) = relation_residual(&rels[0], &assignment, &errors, &ID3);
        assert!((sum_rule - 1.5).abs() < 1e-12, "got {}", sum_rule);
    }

    #[test]
    fn exchange_matrices_validated_and_relations_contained() {
        let samples = relation_samples([1.0, 1.1, 0.9]).unwrap();
        let m = derive_relations(&samples).unwrap();
        assert_eq!(m.rank(), 40, "full Bose content over 48 unknowns");
        for rel in nor_relations() {
            for base in S3.iter() {
                let row = relation_row(&rel, base);
                let resid = m.containment_residual(&row);
                assert!(
                    resid < 1e-9,
                    "relation {} at base {:?}: residual {}",
                    rel.name,
                    base,
                    resid
                );
            }
        }
        // the corrected reading of the sixth line is contained...
        let corr = relation_row(&nor_relation_corrected(), &ID3);
        assert!(m.containment_residual(&corr) < 1e-9);
        // ...the line as printed is not
        let printed = relation_row(&nor_relation_as_printed(), &ID3);
        assert!(m.containment_residual(&printed) > 0.1);
    }

    #[test]
    fn mapping_assignment_satisfies_every_derived_row() {
        // A constrained only by the cyclic sum rule and reversal symmetry,
        // B free: the assignment must annihilate the whole derived space
        let u = 0.37;
        let v = -1.21;
        let w = -u - v;
        let mut a = [0.0; 6];
        a[s3_index(&ID3)] = u;
        a[s3_index(&REV)] = u;
        a[s3_index(&SWAP12)] = v;
        a[s3_index(&CYC312)] = v;
        a[s3_index(&CYC231)] = w;
        a[s3_index(&[0, 2, 1])] = w;
        let vals = PermutedAmplitudes {
            a,
            b: [0.9, -0.4, 1.7, 0.3, -1.1, 0.6],
        };
        let (assignment, errors) = assignment_from_ab(&vals, &[0.0; 6], &[0.0; 6]);
        let samples = relation_samples([1.0, 1.2, 0.8]).unwrap();
        let m = derive_relations(&samples).unwrap();
        let (viol, _) = m.max_violation(&assignment, &errors);
        assert!(viol < 1e-12, "violation {}", viol);
    }

    #[test]
    fn random_asymmetric_assignment_violates_relations() {
        let mut unknowns = [0.0f64; 48];
        for s in 0..6 {
            for i in 0..8 {
                unknowns[8 * s + i] = (i + 1) as f64 + 10.0 * s as f64;
            }
        }
        let mut violated = false;
        for rel in nor_relations() {
            let row = relation_row(&rel, &ID3);
            let v: f64 = row.iter().zip(unknowns.iter()).map(|(a, b)| a * b).sum();
            if v.abs() > 1e-6 {
                violated = true;
            }
        }
        assert!(violated);
    }

    #[test]
    fn insufficient_samples_rejected() {
        let samples = relation_samples([1.0, 1.1, 0.9]).unwrap();
        assert!(matches!(
            derive_relations(&samples[..1]),
            Err(TensorBasisError::BadInput(_))
        ));
        assert!(derive_relations(&[]).is_err());
    }
}
