//! External momentum configurations and cutoff pairs.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::fmath;
use crate::tensor::Vec4;

#[derive(Clone, Debug, PartialEq)]
pub enum KinematicsError {
    /// `p1 + p2 + p3` deviates from zero beyond round-off.
    MomentumNotConserved { residual: f64 },
    /// Cutoffs must satisfy `0 <= lambda <= lambda0`, `lambda0 > 0`.
    BadCutoffs(String),
}

impl fmt::Display for KinematicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KinematicsError::MomentumNotConserved { residual } => {
                write!(f, "p1+p2+p3 != 0 (|sum| = {:.3e})", residual)
            }
            KinematicsError::BadCutoffs(msg) => write!(f, "bad cutoffs: {}", msg),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for KinematicsError {}

/// Three Euclidean momenta with `p1 + p2 + p3 = 0` held exactly: the third
/// is stored as `-p1 - p2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kinematics {
    p1: Vec4,
    p2: Vec4,
}

impl Kinematics {
    pub fn from_two(p1: Vec4, p2: Vec4) -> Self {
        Kinematics { p1, p2 }
    }

    /// Accepts all three momenta and checks conservation against round-off.
    pub fn from_three(p1: Vec4, p2: Vec4, p3: Vec4) -> Result<Self, KinematicsError> {
        let sum = p1 + p2 + p3;
        let scale = p1.norm().max(p2.norm()).max(p3.norm()).max(1e-300);
        let residual = sum.norm() / scale;
        if residual > 1e-12 {
            return Err(KinematicsError::MomentumNotConserved { residual });
        }
        Ok(Kinematics { p1, p2 })
    }

    pub fn p1(&self) -> Vec4 {
        self.p1
    }

    pub fn p2(&self) -> Vec4 {
        self.p2
    }

    pub fn p3(&self) -> Vec4 {
        -(self.p1 + self.p2)
    }

    pub fn momenta(&self) -> [Vec4; 3] {
        [self.p1, self.p2, self.p3()]
    }

    /// Squared invariants `(p1^2, p2^2, p3^2)`.
    pub fn invariants(&self) -> [f64; 3] {
        [self.p1.norm2(), self.p2.norm2(), self.p3().norm2()]
    }

    pub fn momentum_scale(&self) -> f64 {
        self.momenta().iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// No nontrivial subsum vanishes; for three conserved momenta this means
    /// every single momentum is nonzero.
    pub fn non_exceptional(&self) -> bool {
        let scale = self.momentum_scale();
        if scale == 0.0 {
            return false;
        }
        self.momenta().iter().all(|p| p.norm() > 1e-10 * scale)
    }

    /// Kinematics with momenta permuted by `perm`: leg `j` of the result is
    /// leg `perm[j]` of `self`.
    pub fn permuted(&self, perm: &[usize; 3]) -> Kinematics {
        let m = self.momenta();
        Kinematics::from_two(m[perm[0]], m[perm[1]])
    }

    pub fn scaled(&self, s: f64) -> Kinematics {
        Kinematics::from_two(self.p1.scale(s), self.p2.scale(s))
    }
}

/// IR flow parameter and UV cutoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffPair {
    lambda: f64,
    lambda0: f64,
}

impl CutoffPair {
    pub fn new(lambda: f64, lambda0: f64) -> Result<Self, KinematicsError> {
        if !(lambda >= 0.0) || !(lambda0 > 0.0) || lambda > lambda0 {
            return Err(KinematicsError::BadCutoffs(format!(
                "need 0 <= lambda <= lambda0 and lambda0 > 0, got ({}, {})",
                lambda, lambda0
            )));
        }
        Ok(CutoffPair { lambda, lambda0 })
    }

    pub fn uv_only(lambda0: f64) -> Result<Self, KinematicsError> {
        Self::new(0.0, lambda0)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }
}

/// Equilateral reference configuration in the (0,1) coordinate plane:
/// `|p_i| = scale`, pairwise angles 120 degrees.
pub fn equilateral(scale: f64) -> Kinematics {
    let h = 0.5 * fmath::sqrt(3.0);
    Kinematics::from_two(
        Vec4([scale, 0.0, 0.0, 0.0]),
        Vec4([-0.5 * scale, h * scale, 0.0, 0.0]),
    )
}

/// An equilateral configuration with rational components, tilted inside the
/// (0,1,2) coordinate 3-plane; radius `sqrt(2/3) * scale`.
pub fn equilateral_tilted(scale: f64) -> Kinematics {
    let c = scale / 3.0;
    Kinematics::from_two(
        Vec4([scale - c, -c, -c, 0.0]),
        Vec4([-c, scale - c, -c, 0.0]),
    )
}

/// Four tetrahedral momenta with rational components: `v_i = e_i - (1/4)sum e`,
/// `sum v_i = 0`, `|v_i| = sqrt(3)/2 * scale`, pairwise dot `-scale^2/4`.
pub fn tetrahedron(scale: f64) -> [Vec4; 4] {
    let q = 0.25 * scale;
    [
        Vec4([scale - q, -q, -q, -q]),
        Vec4([-q, scale - q, -q, -q]),
        Vec4([-q, -q, scale - q, -q]),
        Vec4([-q, -q, -q, scale - q]),
    ]
}

/// Samples of non-exceptional configurations used by oracle comparisons.
pub fn oracle_sample_points() -> Vec<Kinematics> {
    let mut v = Vec::new();
    v.push(equilateral(1.0));
    v.push(equilateral_tilted(1.2));
    // a scalene non-planar-frame configuration
    v.push(Kinematics::from_two(
        Vec4([0.9, 0.2, 0.0, 0.0]),
        Vec4([-0.1, 0.8, 0.3, 0.0]),
    ));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conservation_is_exact_by_storage() {
        let k = equilateral(2.0);
        let s = k.p1() + k.p2() + k.p3();
        assert_eq!(s, Vec4::zero());
    }

    #[test]
    fn from_three_checks_conservation() {
        let p1 = Vec4([1.0, 0.0, 0.0, 0.0]);
        let p2 = Vec4([0.0, 1.0, 0.0, 0.0]);
        assert!(Kinematics::from_three(p1, p2, -(p1 + p2)).is_ok());
        assert!(matches!(
            Kinematics::from_three(p1, p2, p1),
            Err(KinematicsError::MomentumNotConserved { .. })
        ));
    }

    #[test]
    fn equilateral_invariants() {
        let k = equilateral(1.0);
        let inv = k.invariants();
        for v in inv {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert!(k.non_exceptional());
        let tilted = equilateral_tilted(1.0);
        let ti = tilted.invariants();
        for v in ti {
            assert!((v - 2.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn exceptional_detection() {
        let k = Kinematics::from_two(Vec4([1.0, 0.0, 0.0, 0.0]), Vec4::zero());
        assert!(!k.non_exceptional());
    }

    #[test]
    fn tetrahedron_geometry() {
        let t = tetrahedron(1.0);
        let sum = t[0] + t[1] + t[2] + t[3];
        assert!(sum.norm() < 1e-14);
        for i in 0..4 {
            assert!((t[i].norm2() - 0.75).abs() < 1e-14);
            for j in (i + 1)..4 {
                assert!((t[i].dot(&t[j]) + 0.25).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn cutoff_validation() {
        assert!(CutoffPair::new(0.1, 50.0).is_ok());
        assert!(CutoffPair::new(-0.1, 50.0).is_err());
        assert!(CutoffPair::new(2.0, 1.0).is_err());
        assert!(CutoffPair::new(0.0, 0.0).is_err());
    }
}
