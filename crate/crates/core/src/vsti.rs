//! The relevant part of the violated Slavnov-Taylor identities.
//!
//! The algebraic residuals are the bracket coefficients of the relations
//! tying the order-hbar renormalization constants together; they are exact
//! rational expressions here. The one genuinely momentum-dependent relation
//! is the three-photon one: its second derivative at any non-exceptional
//! renormalization point contains the constant epsilon-term `1/(6 pi^2)`,
//! which no choice of constants can remove - the obstruction reported by
//! [`anomaly_obstruction`].

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::exact::{to_f64, Rational};
use crate::fmath;
use crate::kinematics::Kinematics;
use crate::loop_amplitudes::{
    anomaly_reference, contracted_deriv2_mixed, contracted_first_derivative,
    contracted_pure_second, contracted_triangle_pq, AmplitudeError,
};
use crate::quadrature::QuadOptions;
use crate::tensor::{epsf, Rank3Tensor, Vec4};

#[derive(Clone, Debug, PartialEq)]
pub enum VstiError {
    DivisionByZero(&'static str),
    Amplitude(AmplitudeError),
    BadInput(String),
}

impl From<AmplitudeError> for VstiError {
    fn from(e: AmplitudeError) -> Self {
        VstiError::Amplitude(e)
    }
}

impl fmt::Display for VstiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VstiError::DivisionByZero(what) => write!(f, "rejected input: {} vanishes", what),
            VstiError::Amplitude(e) => write!(f, "{}", e),
            VstiError::BadInput(m) => write!(f, "{}", m),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for VstiError {}

/// The order-hbar constants entering the relevant part, kept exact.
#[derive(Clone, Debug, PartialEq)]
pub struct RenormalizationConstants {
    pub r1: Rational,
    pub r2: Rational,
    pub r3: Rational,
    pub sigma_psibar_psi: Rational,
    pub sigma_trans: Rational,
    pub sigma_long: Rational,
    pub delta_m2: Rational,
    pub delta_g: Rational,
    pub f_aaaa: Rational,
    pub g: Rational,
    pub alpha: Rational,
    pub m: Rational,
}

impl RenormalizationConstants {
    /// The simple solution: all order-hbar quantities zero.
    pub fn all_zero(g: Rational, alpha: Rational, m: Rational) -> Result<Self, VstiError> {
        if !alpha.is_positive() {
            return Err(VstiError::BadInput("alpha must be positive".into()));
        }
        if !m.is_positive() {
            return Err(VstiError::BadInput("M must be positive".into()));
        }
        Ok(RenormalizationConstants {
            r1: Rational::one(),
            r2: Rational::one(),
            r3: Rational::one(),
            sigma_psibar_psi: Rational::zero(),
            sigma_trans: Rational::zero(),
            sigma_long: Rational::zero(),
            delta_m2: Rational::zero(),
            delta_g: Rational::zero(),
            f_aaaa: Rational::zero(),
            g,
            alpha,
            m,
        })
    }
}

/// Parameters of the solution family: the free order-hbar inputs.
#[derive(Clone, Debug)]
pub struct FamilyParams {
    pub sigma_long: Rational,
    pub sigma_psibar_psi: Rational,
    pub sigma_trans: Rational,
    pub delta_g: Rational,
}

impl FamilyParams {
    pub fn zero() -> Self {
        FamilyParams {
            sigma_long: Rational::zero(),
            sigma_psibar_psi: Rational::zero(),
            sigma_trans: Rational::zero(),
            delta_g: Rational::zero(),
        }
    }
}

/// Solves the five algebraic conditions for the remaining constants given
/// the free inputs: `R1 = 1/(1+S_long)`, `dM^2 = M^2 S_long`,
/// `R2 = R3 = R1 (g+dg) / (g (1+S_psi))`, `F = 0`.
pub fn solve_relations(
    params: &FamilyParams,
    g: Rational,
    alpha: Rational,
    m: Rational,
) -> Result<RenormalizationConstants, VstiError> {
    if !alpha.is_positive() {
        return Err(VstiError::BadInput("alpha must be positive".into()));
    }
    if !m.is_positive() {
        return Err(VstiError::BadInput("M must be positive".into()));
    }
    let one = Rational::one();
    let denom_long = &one + &params.sigma_long;
    if denom_long.is_zero() {
        return Err(VstiError::DivisionByZero("1 + Sigma_long"));
    }
    if g.is_zero() {
        return Err(VstiError::DivisionByZero("g"));
    }
    let g_shift = &g + &params.delta_g;
    if g_shift.is_zero() {
        return Err(VstiError::DivisionByZero("g + delta_g"));
    }
    let denom_psi = &one + &params.sigma_psibar_psi;
    if denom_psi.is_zero() {
        return Err(VstiError::DivisionByZero("1 + Sigma_psibar_psi"));
    }
    let r1 = one.clone() / denom_long;
    let r2 = &r1 * &g_shift / (&g * &denom_psi);
    Ok(RenormalizationConstants {
        r1: r1.clone(),
        r3: r2.clone(),
        r2,
        sigma_psibar_psi: params.sigma_psibar_psi.clone(),
        sigma_trans: params.sigma_trans.clone(),
        sigma_long: params.sigma_long.clone(),
        delta_m2: &m * &m * &params.sigma_long,
        delta_g: params.delta_g.clone(),
        f_aaaa: Rational::zero(),
        g,
        alpha,
        m,
    })
}

// ---------------------------------------------------------------------------
// Algebraic residuals
// ---------------------------------------------------------------------------

/// Residuals of the gauge-ghost relation: the coefficients of the two
/// momentum structures, `M^2 (1 - R1 (1 + dM^2/M^2))` and
/// `(1/alpha)(1 - R1 (1 + Sigma_long))`.
pub fn residual_r1_r2(c: &RenormalizationConstants) -> (Rational, Rational) {
    let one = Rational::one();
    let m2 = &c.m * &c.m;
    let r1 = &m2 * &(&one - &(&c.r1 * &(&one + &(&c.delta_m2 / &m2))));
    let r2 = (&one - &(&c.r1 * &(&one + &c.sigma_long))) / &c.alpha;
    (r1, r2)
}

/// Residuals of the fermion-ghost relation:
/// `R1 (g+dg) - g R_{2,3} (1 + Sigma_psibar_psi)`.
pub fn residual_r3_r4(c: &RenormalizationConstants) -> (Rational, Rational) {
    let shift = &c.g + &c.delta_g;
    let common = &c.r1 * &shift;
    let one = Rational::one();
    let psi = &one + &c.sigma_psibar_psi;
    let r3 = &common - &(&c.g * &(&c.r2 * &psi));
    let r4 = &common - &(&c.g * &(&c.r3 * &psi));
    (r3, r4)
}

/// Residual of the two-fermion-one-photon-ghost relation:
/// `g (g+dg) (R3 - R2)`.
pub fn residual_r6(c: &RenormalizationConstants) -> Rational {
    &c.g * &(&c.g + &c.delta_g) * (&c.r3 - &c.r2)
}

/// The four-photon relation contraction and its first derivatives.
///
/// `p4_mu Gamma^{AAAA}` with the pure local tensor structure is
/// `(F/3)(p4_{m1} d_{m2 m3} + p4_{m2} d_{m1 m3} + p4_{m3} d_{m1 m2})`; the
/// derivative with respect to any `p_{i,nu}` (i = 1..3) is the constant
/// `-(F/3)(d_{nu m1} d_{m2 m3} + ...)`. The box-diagram loop contribution
/// is out of scope here; only the local term enters the relevant part.
#[derive(Clone, Debug)]
pub struct R7Residual {
    /// The contraction at the renormalization point, indexed `(m1,m2,m3)`.
    pub value: Rank3Tensor,
    /// First derivatives, indexed by the derivative direction `nu`.
    pub first_derivatives: [Rank3Tensor; 4],
    pub f_aaaa: f64,
}

impl R7Residual {
    pub fn max_abs(&self) -> f64 {
        let mut m = self.value.max_abs();
        for d in &self.first_derivatives {
            m = m.max(d.max_abs());
        }
        m
    }
}

pub fn residual_r7(c: &RenormalizationConstants, kin4: &[Vec4; 4]) -> R7Residual {
    let f = to_f64(&c.f_aaaa);
    let p4 = kin4[3];
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let value = Rank3Tensor::from_fn(|m1, m2, m3| {
        f / 3.0 * (p4[m1] * delta(m2, m3) + p4[m2] * delta(m1, m3) + p4[m3] * delta(m1, m2))
    });
    let first_derivatives = core::array::from_fn(|nu| {
        Rank3Tensor::from_fn(|m1, m2, m3| {
            -f / 3.0
                * (delta(nu, m1) * delta(m2, m3)
                    + delta(nu, m2) * delta(m1, m3)
                    + delta(nu, m3) * delta(m1, m2))
        })
    });
    R7Residual {
        value,
        first_derivatives,
        f_aaaa: f,
    }
}

// ---------------------------------------------------------------------------
// The anomaly obstruction (r5)
// ---------------------------------------------------------------------------

/// Report on `d^w (p3_mu Gamma^{AAA}_{mu m1 m2})` at the renormalization
/// point, `|w| <= 2`.
#[derive(Clone, Debug)]
pub struct ObstructionReport {
    /// Epsilon-coefficient of the mixed second derivative.
    pub coefficient: f64,
    /// `1/(6 pi^2)`.
    pub reference: f64,
    pub relative_deviation: f64,
    /// Frobenius norm of the second-derivative tensor outside the epsilon
    /// structure (symmetric projections), relative to the epsilon part.
    pub symmetric_residual: f64,
    /// Norm of the undifferentiated contraction at the point.
    pub w0_norm: f64,
    /// Norms of the first derivatives in the two independent momenta.
    pub w1_norms: [f64; 2],
    /// Sampled pure (same-momentum) second derivatives; bounded, no
    /// epsilon content.
    pub pure_second_sample: f64,
    pub lambda0: f64,
}

impl ObstructionReport {
    /// The theorem witness: the mixed second derivative cannot be made
    /// small; `true` when the epsilon-coefficient stays above the floor.
    pub fn obstructs(&self, floor: f64) -> bool {
        fmath::abs(self.coefficient) > floor
    }
}

/// Evaluates the `(r5)` obstruction: derivatives of the contracted
/// amplitude `p3_mu Gamma_{mu m1 m2}(p3, p1, p2)` with respect to the
/// independent momenta `(p1, p2)` at a non-exceptional point.
///
/// The one-loop triangle does not depend on the order-hbar constants, so
/// the result is invariant over the solution family; callers re-run it per
/// family member to witness exactly that.
pub fn anomaly_obstruction(
    lambda0: f64,
    kin3: &Kinematics,
    tol: f64,
    opts: &QuadOptions,
) -> Result<ObstructionReport, VstiError> {
    if !kin3.non_exceptional() {
        return Err(VstiError::BadInput(
            "renormalization point must be non-exceptional".into(),
        ));
    }
    // contracting the third leg with its own momentum: the closed
    // representation applies with the role assignment (p3, p1, p2)
    let q1 = kin3.p1();
    let q2 = kin3.p2();
    let h = 0.01 * kin3.momentum_scale();

    let w0 = contracted_triangle_pq(q1, q2, lambda0, tol, opts)?;

    // first derivatives: finite differences in each slot, reported as norms
    let mut w1 = [0.0f64; 2];
    for (slot, out) in [(0usize, 0usize), (1, 1)] {
        let mut sum = 0.0;
        for alpha in 0..4 {
            let d = contracted_first_derivative(q1, q2, slot, alpha, h, lambda0, tol, opts)?;
            sum += d.dot(&d);
        }
        w1[out] = fmath::sqrt(sum);
    }

    // mixed second derivative over all direction pairs
    let mut d2 = Vec::with_capacity(16);
    for alpha in 0..4 {
        for beta in 0..4 {
            let t = contracted_deriv2_mixed(q1, q2, alpha, beta, h, lambda0, tol, opts)?;
            d2.push(t);
        }
    }
    // project the four-index object onto s * eps_{m1 m2 alpha beta}
    let sgn = crate::clifford::epsilon_trace_sign() as f64;
    let mut num = 0.0;
    let mut eps_norm2 = 0.0;
    for alpha in 0..4 {
        for beta in 0..4 {
            let t = &d2[4 * alpha + beta];
            for m1 in 0..4 {
                for m2 in 0..4 {
                    let e = sgn * epsf(m1, m2, alpha, beta);
                    num += t[(m1, m2)] * e;
                    eps_norm2 += e * e;
                }
            }
        }
    }
    let coefficient = num / eps_norm2;
    let mut resid2 = 0.0;
    let mut eps_part2 = 0.0;
    for alpha in 0..4 {
        for beta in 0..4 {
            let t = &d2[4 * alpha + beta];
            for m1 in 0..4 {
                for m2 in 0..4 {
                    let e = coefficient * sgn * epsf(m1, m2, alpha, beta);
                    let r = t[(m1, m2)] - e;
                    resid2 += r * r;
                    eps_part2 += e * e;
                }
            }
        }
    }

    // a pure second derivative sample (same slot twice): no epsilon content
    let pure = contracted_pure_second(q1, q2, 0, 0, 1, h, lambda0, tol, opts)?.frobenius();

    let reference = anomaly_reference();
    Ok(ObstructionReport {
        coefficient,
        reference,
        relative_deviation: fmath::abs(fmath::abs(coefficient) - reference) / reference,
        symmetric_residual: fmath::sqrt(resid2 / eps_part2.max(f64::MIN_POSITIVE)),
        w0_norm: w0.tensor.frobenius(),
        w1_norms: w1,
        pure_second_sample: pure,
        lambda0,
    })
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

/// One algebraic residual with its pass verdict (exact zero required).
#[derive(Clone, Debug)]
pub struct AlgebraicResidual {
    pub name: &'static str,
    pub value: Rational,
    pub pass: bool,
}

/// Full report: the exact algebraic residuals plus the numeric obstruction.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub algebraic: Vec<AlgebraicResidual>,
    pub r7_max_abs: f64,
    pub obstruction: ObstructionReport,
    /// `true` when all algebraic residuals vanish yet the obstruction
    /// remains: the identities cannot be restored.
    pub anomalous: bool,
}

/// Evaluates every relation for a set of constants at the given
/// renormalization configurations.
pub fn residual_report(
    constants: &RenormalizationConstants,
    kin3: &Kinematics,
    kin4: &[Vec4; 4],
    lambda0: f64,
    tol: f64,
    opts: &QuadOptions,
) -> Result<ResidualReport, VstiError> {
    let (r1, r2) = residual_r1_r2(constants);
    let (r3, r4) = residual_r3_r4(constants);
    let r6 = residual_r6(constants);
    let r7 = residual_r7(constants, kin4);
    let algebraic = alloc::vec![
        AlgebraicResidual {
            name: "r1",
            pass: r1.is_zero(),
            value: r1,
        },
        AlgebraicResidual {
            name: "r2",
            pass: r2.is_zero(),
            value: r2,
        },
        AlgebraicResidual {
            name: "r3",
            pass: r3.is_zero(),
            value: r3,
        },
        AlgebraicResidual {
            name: "r4",
            pass: r4.is_zero(),
            value: r4,
        },
        AlgebraicResidual {
            name: "r6",
            pass: r6.is_zero(),
            value: r6,
        },
        AlgebraicResidual {
            name: "r7",
            pass: constants.f_aaaa.is_zero(),
            value: constants.f_aaaa.clone(),
        },
    ];
    let obstruction = anomaly_obstruction(lambda0, kin3, tol, opts)?;
    let all_zero = algebraic.iter().all(|r| r.pass);
    let anomalous = all_zero && obstruction.obstructs(1e-3);
    Ok(ResidualReport {
        algebraic,
        r7_max_abs: r7.max_abs(),
        obstruction,
        anomalous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    fn base_constants() -> RenormalizationConstants {
        RenormalizationConstants::all_zero(ratio(1, 2), int(1), int(1)).unwrap()
    }

    #[test]
    fn all_zero_solution_passes_every_algebraic_relation() {
        let c = base_constants();
        let (r1, r2) = residual_r1_r2(&c);
        let (r3, r4) = residual_r3_r4(&c);
        assert!(r1.is_zero() && r2.is_zero() && r3.is_zero() && r4.is_zero());
        assert!(residual_r6(&c).is_zero());
        let r7 = residual_r7(&c, &crate::kinematics::tetrahedron(1.0));
        assert_eq!(r7.max_abs(), 0.0);
    }

    #[test]
    fn bel2_kills_r2_and_bel4_kills_r1() {
        let mut c = base_constants();
        c.sigma_long = ratio(3, 10);
        c.r1 = int(1) / (int(1) + c.sigma_long.clone());
        let (r1, r2) = residual_r1_r2(&c);
        assert!(r2.is_zero());
        assert!(!r1.is_zero());
        c.delta_m2 = &(&c.m * &c.m) * &c.sigma_long;
        let (r1, _) = residual_r1_r2(&c);
        assert!(r1.is_zero());
    }

    #[test]
    fn bel3_kills_r3_and_r2_equals_r3_ties_r4_r6() {
        let mut c = base_constants();
        c.sigma_psibar_psi = ratio(1, 5);
        c.delta_g = ratio(1, 7);
        let shift = &c.g + &c.delta_g;
        c.r2 = &c.r1 * &shift / (&c.g * &(int(1) + c.sigma_psibar_psi.clone()));
        let (r3, r4) = residual_r3_r4(&c);
        assert!(r3.is_zero());
        assert!(!r4.is_zero()); // r3 uses R2, r4 uses R3
        c.r3 = c.r2.clone();
        let (_, r4) = residual_r3_r4(&c);
        assert!(r4.is_zero());
        assert!(residual_r6(&c).is_zero());
    }

    #[test]
    fn r6_direct_value() {
        let mut c = base_constants();
        c.g = int(1);
        c.r3 = &c.r2 + &ratio(1, 10);
        let r6 = residual_r6(&c);
        assert_eq!(r6, ratio(1, 10));
        c.g = int(0);
        assert!(residual_r6(&c).is_zero());
    }

    #[test]
    fn family_solution_is_exact_for_every_admissible_input() {
        for (sl, sp, dg) in [
            (ratio(3, 10), ratio(-1, 4), ratio(1, 7)),
            (ratio(-2, 5), ratio(2, 3), ratio(-1, 3)),
            (int(0), int(0), int(0)),
            (ratio(999, 1000), ratio(-999, 1000), ratio(1, 999)),
        ] {
            let params = FamilyParams {
                sigma_long: sl,
                sigma_psibar_psi: sp,
                sigma_trans: ratio(1, 13),
                delta_g: dg,
            };
            let c = solve_relations(&params, ratio(2, 3), int(2), ratio(3, 2)).unwrap();
            let (r1, r2) = residual_r1_r2(&c);
            let (r3, r4) = residual_r3_r4(&c);
            assert!(r1.is_zero());
            assert!(r2.is_zero());
            assert!(r3.is_zero());
            assert!(r4.is_zero());
            assert!(residual_r6(&c).is_zero());
            assert!(c.f_aaaa.is_zero());
        }
    }

    #[test]
    fn family_example_sigma_long_03() {
        let params = FamilyParams {
            sigma_long: ratio(3, 10),
            ..FamilyParams::zero()
        };
        let c = solve_relations(&params, int(1), int(1), int(1)).unwrap();
        assert_eq!(c.r1, ratio(10, 13));
        assert_eq!(c.delta_m2, ratio(3, 10));
    }

    #[test]
    fn family_rejects_degenerate_inputs() {
        let params = FamilyParams {
            sigma_long: int(-1),
            ..FamilyParams::zero()
        };
        assert_eq!(
            solve_relations(&params, int(1), int(1), int(1)).unwrap_err(),
            VstiError::DivisionByZero("1 + Sigma_long")
        );
        let params = FamilyParams {
            delta_g: int(-1),
            ..FamilyParams::zero()
        };
        assert_eq!(
            solve_relations(&params, int(1), int(1), int(1)).unwrap_err(),
            VstiError::DivisionByZero("g + delta_g")
        );
        assert!(matches!(
            solve_relations(&FamilyParams::zero(), int(0), int(1), int(1)),
            Err(VstiError::DivisionByZero("g"))
        ));
    }

    #[test]
    fn r7_linear_in_f() {
        let mut c = base_constants();
        c.f_aaaa = ratio(2, 1);
        let kin4 = crate::kinematics::tetrahedron(1.0);
        let r = residual_r7(&c, &kin4);
        c.f_aaaa = ratio(4, 1);
        let r2 = residual_r7(&c, &kin4);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert!(
                        (2.0 * r.value[(i, j, k)] - r2.value[(i, j, k)]).abs() < 1e-14
                    );
                }
            }
        }
        assert!(r.max_abs() > 0.0);
    }
}
