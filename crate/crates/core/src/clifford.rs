//! Exact Euclidean Dirac algebra.
//!
//! Gamma matrices obey `{gamma_mu, gamma_nu} = -2 delta_{mu nu}` and
//! `gamma5 = -gamma0 gamma1 gamma2 gamma3`, so `gamma5^2 = 1`. Entries are
//! Gaussian rationals; traces are exact. The concrete chiral basis is
//!
//! ```text
//! gamma_0 = [[0, iI], [iI, 0]]      gamma_j = [[0, sigma_j], [-sigma_j, 0]]
//! ```
//!
//! Only evaluated traces are ever needed by the loop integrands, which pull
//! them through [`gamma5_trace7_sparse`] as a precomputed constant table.
//! The sign `s` of `tr(gamma5 g0 g1 g2 g3) = 4 s` is measured from the
//! matrices at run time and exported via [`epsilon_trace_sign`]; with the
//! conventions above it is forced by the algebra alone, not by the basis.

use alloc::vec::Vec;
use core::fmt;

use crate::exact::{Cq, Rational};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliffordError {
    /// A Lorentz index outside 0..=3.
    IndexOutOfRange(usize),
}

impl fmt::Display for CliffordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliffordError::IndexOutOfRange(i) => write!(f, "gamma index {} out of range 0..=3", i),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CliffordError {}

/// A 4x4 matrix over the Gaussian rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct GammaMatrix {
    entries: [[Cq; 4]; 4],
}

impl GammaMatrix {
    pub fn zero() -> Self {
        GammaMatrix {
            entries: core::array::from_fn(|_| core::array::from_fn(|_| Cq::zero())),
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.entries[i][i] = Cq::one();
        }
        m
    }

    pub fn entry(&self, i: usize, j: usize) -> &Cq {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Cq) {
        self.entries[i][j] = v;
    }

    pub fn mul(&self, rhs: &GammaMatrix) -> GammaMatrix {
        let mut out = Self::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = &self.entries[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..4 {
                    let b = &rhs.entries[k][j];
                    if b.is_zero() {
                        continue;
                    }
                    out.entries[i][j] += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &GammaMatrix) -> GammaMatrix {
        let mut out = self.clone();
        for i in 0..4 {
            for j in 0..4 {
                out.entries[i][j] += rhs.entries[i][j].clone();
            }
        }
        out
    }

    pub fn neg(&self) -> GammaMatrix {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.entries[i][j] = -self.entries[i][j].clone();
            }
        }
        out
    }

    pub fn scale(&self, c: &Cq) -> GammaMatrix {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.entries[i][j] = &self.entries[i][j] * c;
            }
        }
        out
    }

    pub fn trace(&self) -> Cq {
        let mut t = Cq::zero();
        for i in 0..4 {
            t += self.entries[i][i].clone();
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|r| r.iter().all(|e| e.is_zero()))
    }
}

impl fmt::Debug for GammaMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..4 {
            write!(f, "[")?;
            for j in 0..4 {
                write!(f, " {}", self.entries[i][j])?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

// (re, im) integer pattern of the chiral basis; entries are in {0, +-1, +-i}.
const G_INT: [[[(i64, i64); 4]; 4]; 5] = [
    // gamma0 = [[0, iI], [iI, 0]]
    [
        [(0, 0), (0, 0), (0, 1), (0, 0)],
        [(0, 0), (0, 0), (0, 0), (0, 1)],
        [(0, 1), (0, 0), (0, 0), (0, 0)],
        [(0, 0), (0, 1), (0, 0), (0, 0)],
    ],
    // gamma1 = [[0, s1], [-s1, 0]]
    [
        [(0, 0), (0, 0), (0, 0), (1, 0)],
        [(0, 0), (0, 0), (1, 0), (0, 0)],
        [(0, 0), (-1, 0), (0, 0), (0, 0)],
        [(-1, 0), (0, 0), (0, 0), (0, 0)],
    ],
    // gamma2 = [[0, s2], [-s2, 0]]
    [
        [(0, 0), (0, 0), (0, 0), (0, -1)],
        [(0, 0), (0, 0), (0, 1), (0, 0)],
        [(0, 0), (0, 1), (0, 0), (0, 0)],
        [(0, -1), (0, 0), (0, 0), (0, 0)],
    ],
    // gamma3 = [[0, s3], [-s3, 0]]
    [
        [(0, 0), (0, 0), (1, 0), (0, 0)],
        [(0, 0), (0, 0), (0, 0), (-1, 0)],
        [(-1, 0), (0, 0), (0, 0), (0, 0)],
        [(0, 0), (1, 0), (0, 0), (0, 0)],
    ],
    // gamma5 = -g0 g1 g2 g3 = diag(1, 1, -1, -1); kept as data, verified in tests
    [
        [(1, 0), (0, 0), (0, 0), (0, 0)],
        [(0, 0), (1, 0), (0, 0), (0, 0)],
        [(0, 0), (0, 0), (-1, 0), (0, 0)],
        [(0, 0), (0, 0), (0, 0), (-1, 0)],
    ],
];

fn from_int_pattern(p: &[[(i64, i64); 4]; 4]) -> GammaMatrix {
    let mut m = GammaMatrix::zero();
    for i in 0..4 {
        for j in 0..4 {
            let (re, im) = p[i][j];
            m.entries[i][j] = Cq::from_ints(re, im);
        }
    }
    m
}

/// The Euclidean gamma matrix `gamma_mu`.
pub fn gamma(mu: usize) -> Result<GammaMatrix, CliffordError> {
    if mu > 3 {
        return Err(CliffordError::IndexOutOfRange(mu));
    }
    Ok(from_int_pattern(&G_INT[mu]))
}

/// `gamma5 = -gamma0 gamma1 gamma2 gamma3`, computed from the product.
pub fn gamma5() -> GammaMatrix {
    let g0 = from_int_pattern(&G_INT[0]);
    let g1 = from_int_pattern(&G_INT[1]);
    let g2 = from_int_pattern(&G_INT[2]);
    let g3 = from_int_pattern(&G_INT[3]);
    g0.mul(&g1).mul(&g2).mul(&g3).neg()
}

/// One factor of a gamma-matrix product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GammaFactor {
    Gamma(usize),
    Gamma5,
    /// A slashed vector, `Sum_mu p_mu gamma_mu`, with exact components.
    Slash([Rational; 4]),
}

fn factor_matrix(f: &GammaFactor) -> Result<GammaMatrix, CliffordError> {
    match f {
        GammaFactor::Gamma(mu) => gamma(*mu),
        GammaFactor::Gamma5 => Ok(gamma5()),
        GammaFactor::Slash(p) => {
            let mut m = GammaMatrix::zero();
            for (mu, coeff) in p.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                m = m.add(&gamma(mu)?.scale(&Cq::real(coeff.clone())));
            }
            Ok(m)
        }
    }
}

/// Exact trace of an ordered product of gamma factors.
///
/// The empty product is the identity, so the empty trace is 4.
pub fn trace_product(factors: &[GammaFactor]) -> Result<Cq, CliffordError> {
    let mut acc = GammaMatrix::identity();
    for f in factors {
        acc = acc.mul(&factor_matrix(f)?);
    }
    Ok(acc.trace())
}

/// Sign of a permutation of `{0,1,2,3}`; 0 on a repeated index.
pub fn epsilon(mu: usize, nu: usize, rho: usize, sigma: usize) -> Result<i32, CliffordError> {
    for &i in &[mu, nu, rho, sigma] {
        if i > 3 {
            return Err(CliffordError::IndexOutOfRange(i));
        }
    }
    Ok(eps4(mu, nu, rho, sigma))
}

/// Unchecked Levi-Civita sign for internal hot paths, `eps(0,1,2,3) = +1`.
pub fn eps4(a: usize, b: usize, c: usize, d: usize) -> i32 {
    let idx = [a, b, c, d];
    let mut sign = 1i32;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if idx[i] == idx[j] {
                return 0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// The measured sign `s` in `tr(gamma5 g_mu g_nu g_rho g_sigma) = 4 s eps_{mu nu rho sigma}`.
///
/// Exported rather than hard-coded; every epsilon-coefficient reported by
/// the crate is stated relative to `eps(0,1,2,3) = +1` together with this
/// sign.
pub fn epsilon_trace_sign() -> i64 {
    use GammaFactor::*;
    let t = trace_product(&[Gamma5, Gamma(0), Gamma(1), Gamma(2), Gamma(3)])
        .expect("indices in range");
    debug_assert!(t.is_real());
    let (re, _) = t.to_f64_pair();
    if re > 0.0 {
        1
    } else {
        -1
    }
}

// ---------------------------------------------------------------------------
// Fast Gaussian-integer path for the rank-7 trace table.
// ---------------------------------------------------------------------------

type Gi = (i64, i64);
type GiMat = [[Gi; 4]; 4];

fn gi_mul(a: &GiMat, b: &GiMat) -> GiMat {
    let mut out = [[(0i64, 0i64); 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let (ar, ai) = a[i][k];
            if ar == 0 && ai == 0 {
                continue;
            }
            for j in 0..4 {
                let (br, bi) = b[k][j];
                if br == 0 && bi == 0 {
                    continue;
                }
                out[i][j].0 += ar * br - ai * bi;
                out[i][j].1 += ar * bi + ai * br;
            }
        }
    }
    out
}

fn gi_gamma(mu: usize) -> GiMat {
    let mut m = [[(0i64, 0i64); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = G_INT[mu][i][j];
        }
    }
    m
}

/// One nonzero entry of the rank-7 trace table.
#[derive(Clone, Copy, Debug)]
pub struct Trace7Entry {
    /// Index of the first slashed vector.
    pub alpha: usize,
    /// First free tensor index.
    pub nu: usize,
    /// Index of the second slashed vector.
    pub beta: usize,
    /// Second free tensor index.
    pub mu: usize,
    /// Index of the third slashed vector.
    pub gamma: usize,
    /// Third free tensor index.
    pub rho: usize,
    /// `tr(gamma5 g_alpha g_nu g_beta g_mu g_gamma g_rho)`, a real integer.
    pub value: f64,
}

/// Sparse table of `tr(gamma5 g_alpha g_nu g_beta g_mu g_gamma g_rho)`.
///
/// This is the constant tensor behind the one-loop triangle integrand
/// `tr(gamma5 a-slash g_nu b-slash g_mu c-slash g_rho)`; contracting
/// `alpha, beta, gamma` with the three loop-line momenta reproduces the
/// trace for any `a, b, c`.
pub fn gamma5_trace7_sparse() -> Vec<Trace7Entry> {
    let g: [GiMat; 4] = [gi_gamma(0), gi_gamma(1), gi_gamma(2), gi_gamma(3)];
    let g5 = gi_gamma(4);

    // pair products indexed [a][b]
    let mut pair = [[[[(0i64, 0i64); 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            pair[a][b] = gi_mul(&g[a], &g[b]);
        }
    }
    let mut g5pair = [[[[(0i64, 0i64); 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            g5pair[a][b] = gi_mul(&g5, &pair[a][b]);
        }
    }

    let mut out = Vec::new();
    for alpha in 0..4 {
        for nu in 0..4 {
            let x = &g5pair[alpha][nu];
            for beta in 0..4 {
                for mu in 0..4 {
                    let y = &pair[beta][mu];
                    for gam in 0..4 {
                        for rho in 0..4 {
                            let z = &pair[gam][rho];
                            // tr(X Y Z) without forming the product
                            let mut tr = (0i64, 0i64);
                            for i in 0..4 {
                                for k in 0..4 {
                                    let (xr, xi) = x[i][k];
                                    if xr == 0 && xi == 0 {
                                        continue;
                                    }
                                    for l in 0..4 {
                                        let (yr, yi) = y[k][l];
                                        if yr == 0 && yi == 0 {
                                            continue;
                                        }
                                        let (zr, zi) = z[l][i];
                                        let pr = xr * yr - xi * yi;
                                        let pi = xr * yi + xi * yr;
                                        tr.0 += pr * zr - pi * zi;
                                        tr.1 += pr * zi + pi * zr;
                                    }
                                }
                            }
                            debug_assert_eq!(tr.1, 0, "gamma5 trace must be real");
                            if tr.0 != 0 {
                                out.push(Trace7Entry {
                                    alpha,
                                    nu,
                                    beta,
                                    mu,
                                    gamma: gam,
                                    rho,
                                    value: tr.0 as f64,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use proptest::prelude::*;

    #[test]
    fn anticommutator_is_minus_two_delta() {
        for mu in 0..4 {
            for nu in 0..4 {
                let a = gamma(mu).unwrap();
                let b = gamma(nu).unwrap();
                let anti = a.mul(&b).add(&b.mul(&a));
                let expected = if mu == nu {
                    GammaMatrix::identity().scale(&Cq::from_ints(-2, 0))
                } else {
                    GammaMatrix::zero()
                };
                assert_eq!(anti, expected, "mu={} nu={}", mu, nu);
            }
        }
    }

    #[test]
    fn gamma_index_out_of_range() {
        assert_eq!(gamma(4).unwrap_err(), CliffordError::IndexOutOfRange(4));
    }

    #[test]
    fn gamma5_squares_to_identity_and_anticommutes() {
        let g5 = gamma5();
        assert_eq!(g5.mul(&g5), GammaMatrix::identity());
        assert!(g5.trace().is_zero());
        for mu in 0..4 {
            let g = gamma(mu).unwrap();
            assert!(g5.mul(&g).add(&g.mul(&g5)).is_zero());
            assert!(g.trace().is_zero());
        }
        // the stored gamma5 pattern agrees with the product definition
        assert_eq!(g5, from_int_pattern(&G_INT[4]));
    }

    #[test]
    fn simple_traces() {
        use GammaFactor::*;
        assert_eq!(trace_product(&[]).unwrap(), Cq::from_ints(4, 0));
        assert_eq!(trace_product(&[Gamma(0)]).unwrap(), Cq::zero());
        for mu in 0..4 {
            for nu in 0..4 {
                let t = trace_product(&[Gamma(mu), Gamma(nu)]).unwrap();
                let expect = if mu == nu {
                    Cq::from_ints(-4, 0)
                } else {
                    Cq::zero()
                };
                assert_eq!(t, expect);
            }
        }
        // gamma5 against fewer than four gammas vanishes
        assert_eq!(trace_product(&[Gamma5]).unwrap(), Cq::zero());
        assert_eq!(trace_product(&[Gamma5, Gamma(1), Gamma(2)]).unwrap(), Cq::zero());
    }

    #[test]
    fn trace_gamma5_four_gammas_is_4s_epsilon() {
        use GammaFactor::*;
        let s = epsilon_trace_sign();
        assert!(s == 1 || s == -1);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let t =
                            trace_product(&[Gamma5, Gamma(a), Gamma(b), Gamma(c), Gamma(d)])
                                .unwrap();
                        let expect = Cq::from_ints(4 * s * eps4(a, b, c, d) as i64, 0);
                        assert_eq!(t, expect, "{} {} {} {}", a, b, c, d);
                    }
                }
            }
        }
        // in this convention the measured sign is forced to -1 by the algebra
        assert_eq!(s, -1);
    }

    #[test]
    fn epsilon_basics() {
        assert_eq!(epsilon(0, 1, 2, 3).unwrap(), 1);
        assert_eq!(epsilon(1, 0, 2, 3).unwrap(), -1);
        assert_eq!(epsilon(0, 0, 2, 3).unwrap(), 0);
        assert!(epsilon(0, 1, 2, 7).is_err());
    }

    #[test]
    fn sparse_trace7_agrees_with_exact_traces() {
        use GammaFactor::*;
        let table = gamma5_trace7_sparse();
        // all-four-odd-multiplicity counting argument gives 480 nonzeros
        assert_eq!(table.len(), 480);
        for e in table.iter().step_by(37) {
            let t = trace_product(&[
                Gamma5,
                Gamma(e.alpha),
                Gamma(e.nu),
                Gamma(e.beta),
                Gamma(e.mu),
                Gamma(e.gamma),
                Gamma(e.rho),
            ])
            .unwrap();
            let (re, im) = t.to_f64_pair();
            assert_eq!(im, 0.0);
            assert_eq!(re, e.value);
        }
        // a handful of zero entries really are zero
        let t = trace_product(&[Gamma5, Gamma(0), Gamma(0), Gamma(1), Gamma(1), Gamma(2), Gamma(2)])
            .unwrap();
        assert!(t.is_zero());
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
    }

    fn rational_vec() -> impl Strategy<Value = [Rational; 4]> {
        [small_rational(), small_rational(), small_rational(), small_rational()]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn odd_number_of_gammas_traceless(seq in proptest::collection::vec(0usize..4, 1..8)) {
            if seq.len() % 2 == 1 {
                let factors: alloc::vec::Vec<_> =
                    seq.iter().map(|&m| GammaFactor::Gamma(m)).collect();
                prop_assert_eq!(trace_product(&factors).unwrap(), Cq::zero());
            }
        }

        #[test]
        fn trace_is_cyclic(seq in proptest::collection::vec(0usize..5, 1..7), rot in 0usize..6) {
            let factors: alloc::vec::Vec<_> = seq
                .iter()
                .map(|&m| if m == 4 { GammaFactor::Gamma5 } else { GammaFactor::Gamma(m) })
                .collect();
            let k = rot % factors.len();
            let mut rotated = factors[k..].to_vec();
            rotated.extend_from_slice(&factors[..k]);
            prop_assert_eq!(
                trace_product(&factors).unwrap(),
                trace_product(&rotated).unwrap()
            );
        }

        #[test]
        fn slash_is_linear(p in rational_vec(), q in rational_vec(), a in small_rational(), b in small_rational()) {
            use GammaFactor::*;
            let combo: [Rational; 4] =
                core::array::from_fn(|i| &a * &p[i] + &b * &q[i]);
            let pre = [Gamma5, Gamma(0), Gamma(1)];
            let mk = |v: [Rational; 4]| {
                let mut f = pre.to_vec();
                f.push(Slash(v));
                f.push(Gamma(2));
                trace_product(&f).unwrap()
            };
            let lhs = mk(combo);
            let rhs = mk(p).scale(&a) + mk(q).scale(&b);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn slash_squares_to_minus_norm(p in rational_vec()) {
            use crate::exact::Rational as R;
            use num_traits::Zero;
            let norm: R = p.iter().map(|c| c * c).fold(R::zero(), |a, b| a + b);
            let t = trace_product(&[GammaFactor::Slash(p.clone()), GammaFactor::Slash(p)]).unwrap();
            // tr(p-slash p-slash) = -4 p^2
            prop_assert_eq!(t, Cq::real(int(-4) * norm));
        }
    }
}
