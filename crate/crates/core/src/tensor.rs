//! Small fixed-rank Euclidean tensors and the Levi-Civita contraction
//! helpers used by the three-photon amplitude.

use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::clifford::eps4;
use crate::fmath;

/// A Euclidean 4-vector.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vec4(pub [f64; 4]);

impl Vec4 {
    pub fn zero() -> Self {
        Vec4([0.0; 4])
    }

    pub fn dot(&self, rhs: &Vec4) -> f64 {
        self.0[0] * rhs.0[0] + self.0[1] * rhs.0[1] + self.0[2] * rhs.0[2] + self.0[3] * rhs.0[3]
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        fmath::sqrt(self.norm2())
    }

    pub fn scale(&self, s: f64) -> Vec4 {
        Vec4([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }
}

impl Index<usize> for Vec4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec4 {
    type Output = Vec4;
    fn add(self, r: Vec4) -> Vec4 {
        Vec4([
            self.0[0] + r.0[0],
            self.0[1] + r.0[1],
            self.0[2] + r.0[2],
            self.0[3] + r.0[3],
        ])
    }
}

impl Sub for Vec4 {
    type Output = Vec4;
    fn sub(self, r: Vec4) -> Vec4 {
        Vec4([
            self.0[0] - r.0[0],
            self.0[1] - r.0[1],
            self.0[2] - r.0[2],
            self.0[3] - r.0[3],
        ])
    }
}

impl Neg for Vec4 {
    type Output = Vec4;
    fn neg(self) -> Vec4 {
        self.scale(-1.0)
    }
}

impl Mul<f64> for Vec4 {
    type Output = Vec4;
    fn mul(self, s: f64) -> Vec4 {
        self.scale(s)
    }
}

/// Levi-Civita tensor as floats, `eps(0,1,2,3) = +1`.
#[inline]
pub fn epsf(a: usize, b: usize, c: usize, d: usize) -> f64 {
    eps4(a, b, c, d) as f64
}

/// `eps_{mu nu alpha beta} a_alpha b_beta` for all (mu, nu).
pub fn eps_contract2(a: &Vec4, b: &Vec4) -> Rank2Tensor {
    let mut out = Rank2Tensor::zero();
    for mu in 0..4 {
        for nu in 0..4 {
            let mut s = 0.0;
            for al in 0..4 {
                for be in 0..4 {
                    let e = eps4(mu, nu, al, be);
                    if e != 0 {
                        s += e as f64 * a[al] * b[be];
                    }
                }
            }
            out[(mu, nu)] = s;
        }
    }
    out
}

/// A rank-2 tensor, indexed `(mu, nu)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rank2Tensor(pub [f64; 16]);

impl Rank2Tensor {
    pub fn zero() -> Self {
        Rank2Tensor([0.0; 16])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, v| m.max(fmath::abs(*v)))
    }

    pub fn scale(&self, s: f64) -> Rank2Tensor {
        let mut out = self.clone();
        for v in out.0.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn sub(&self, rhs: &Rank2Tensor) -> Rank2Tensor {
        let mut out = self.clone();
        for (a, b) in out.0.iter_mut().zip(&rhs.0) {
            *a -= b;
        }
        out
    }

    /// Frobenius inner product.
    pub fn dot(&self, rhs: &Rank2Tensor) -> f64 {
        self.0.iter().zip(&rhs.0).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius(&self) -> f64 {
        fmath::sqrt(self.dot(self))
    }
}

impl Index<(usize, usize)> for Rank2Tensor {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[4 * i + j]
    }
}

impl IndexMut<(usize, usize)> for Rank2Tensor {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[4 * i + j]
    }
}

/// A rank-3 tensor, indexed `(mu, nu, rho)`; the 64 components of the
/// three-photon amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct Rank3Tensor(pub [f64; 64]);

impl Rank3Tensor {
    pub fn zero() -> Self {
        Rank3Tensor([0.0; 64])
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut out = Self::zero();
        for mu in 0..4 {
            for nu in 0..4 {
                for rho in 0..4 {
                    out[(mu, nu, rho)] = f(mu, nu, rho);
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, v| m.max(fmath::abs(*v)))
    }

    pub fn add(&self, rhs: &Rank3Tensor) -> Rank3Tensor {
        let mut out = self.clone();
        for (a, b) in out.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, rhs: &Rank3Tensor) -> Rank3Tensor {
        let mut out = self.clone();
        for (a, b) in out.0.iter_mut().zip(&rhs.0) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Rank3Tensor {
        let mut out = self.clone();
        for v in out.0.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn dot(&self, rhs: &Rank3Tensor) -> f64 {
        self.0.iter().zip(&rhs.0).map(|(a, b)| a * b).sum()
    }

    /// Contracts the first index with a vector: `p_mu T_{mu nu rho}`.
    pub fn contract_first(&self, p: &Vec4) -> Rank2Tensor {
        let mut out = Rank2Tensor::zero();
        for nu in 0..4 {
            for rho in 0..4 {
                let mut s = 0.0;
                for mu in 0..4 {
                    s += p[mu] * self[(mu, nu, rho)];
                }
                out[(nu, rho)] = s;
            }
        }
        out
    }

    /// Reorders the index slots: `out_{i1 i2 i3} = self_{i_{perm[0]} ...}`.
    ///
    /// `perm` lists, for each slot of `self`, which slot of the output it
    /// moves to: simultaneous with a momentum permutation this implements
    /// Bose exchange.
    pub fn permute_slots(&self, perm: [usize; 3]) -> Rank3Tensor {
        Rank3Tensor::from_fn(|a, b, c| {
            let out_idx = [a, b, c];
            let src = [out_idx[perm[0]], out_idx[perm[1]], out_idx[perm[2]]];
            self[(src[0], src[1], src[2])]
        })
    }

    /// Applies a rotation to every slot: `(R (x) R (x) R) T`.
    pub fn rotate(&self, r: &[[f64; 4]; 4]) -> Rank3Tensor {
        Rank3Tensor::from_fn(|a, b, c| {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        s += r[a][i] * r[b][j] * r[c][k] * self[(i, j, k)];
                    }
                }
            }
            s
        })
    }

    pub fn components(&self) -> &[f64; 64] {
        &self.0
    }
}

impl Index<(usize, usize, usize)> for Rank3Tensor {
    type Output = f64;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &f64 {
        &self.0[16 * i + 4 * j + k]
    }
}

impl IndexMut<(usize, usize, usize)> for Rank3Tensor {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut f64 {
        &mut self.0[16 * i + 4 * j + k]
    }
}

/// A 4D rotation built from two commuting plane rotations; handy for the
/// Euclidean-invariance property tests.
pub fn double_plane_rotation(theta01: f64, theta23: f64) -> [[f64; 4]; 4] {
    let (s1, c1) = (fmath::sin(theta01), fmath::cos(theta01));
    let (s2, c2) = (fmath::sin(theta23), fmath::cos(theta23));
    [
        [c1, -s1, 0.0, 0.0],
        [s1, c1, 0.0, 0.0],
        [0.0, 0.0, c2, -s2],
        [0.0, 0.0, s2, c2],
    ]
}

pub fn rotate_vec(r: &[[f64; 4]; 4], v: &Vec4) -> Vec4 {
    let mut out = [0.0; 4];
    for (i, row) in r.iter().enumerate() {
        out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
    }
    Vec4(out)
}

/// Collects per-component values into a `Rank3Tensor`.
pub fn rank3_from_slice(v: &[f64]) -> Rank3Tensor {
    let mut out = Rank3Tensor::zero();
    out.0.copy_from_slice(&v[..64]);
    out
}

/// Flattens basis coefficients times tensors: `sum_i c_i T_i`.
pub fn linear_combination(coeffs: &[f64], tensors: &[Rank3Tensor]) -> Rank3Tensor {
    let mut out = Rank3Tensor::zero();
    for (c, t) in coeffs.iter().zip(tensors) {
        out = out.add(&t.scale(*c));
    }
    out
}

/// All six permutations of `{0,1,2}` in a fixed order: identity first.
pub const S3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [1, 0, 2],
    [2, 1, 0],
    [0, 2, 1],
    [1, 2, 0],
    [2, 0, 1],
];

/// Parity of a permutation of three elements.
pub fn perm_sign3(p: &[usize; 3]) -> i32 {
    let mut sign = 1;
    for i in 0..3 {
        for j in (i + 1)..3 {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Gathers the values of a function over all S3 permutations.
pub fn over_s3<T>(mut f: impl FnMut(&[usize; 3]) -> T) -> Vec<T> {
    S3.iter().map(|p| f(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_contract2_is_antisymmetric_and_linear() {
        let a = Vec4([1.0, 2.0, -1.0, 0.5]);
        let b = Vec4([0.0, 1.0, 3.0, -2.0]);
        let t = eps_contract2(&a, &b);
        for mu in 0..4 {
            for nu in 0..4 {
                assert_eq!(t[(mu, nu)], -t[(nu, mu)]);
            }
        }
        let t2 = eps_contract2(&b, &a);
        for i in 0..16 {
            assert!((t.0[i] + t2.0[i]).abs() < 1e-14);
        }
        // parallel vectors contract to zero
        let z = eps_contract2(&a, &a.scale(2.0));
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn slot_permutation_roundtrip() {
        let t = Rank3Tensor::from_fn(|a, b, c| (a * 16 + b * 4 + c) as f64);
        let p = t.permute_slots([1, 0, 2]);
        assert_eq!(p[(3, 1, 2)], t[(1, 3, 2)]);
        let back = p.permute_slots([1, 0, 2]);
        assert_eq!(back, t);
    }

    #[test]
    fn rotation_preserves_epsilon_structure() {
        let a = Vec4([0.3, -1.0, 0.7, 0.2]);
        let b = Vec4([1.1, 0.4, -0.3, 0.9]);
        let r = double_plane_rotation(0.3, -0.8);
        let ra = rotate_vec(&r, &a);
        let rb = rotate_vec(&r, &b);
        // eps is SO(4)-invariant: contraction transforms covariantly
        let t = eps_contract2(&a, &b);
        let rt = eps_contract2(&ra, &rb);
        let mut rot_t = Rank2Tensor::zero();
        for mu in 0..4 {
            for nu in 0..4 {
                let mut s = 0.0;
                for i in 0..4 {
                    for j in 0..4 {
                        s += r[mu][i] * r[nu][j] * t[(i, j)];
                    }
                }
                rot_t[(mu, nu)] = s;
            }
        }
        assert!(rt.sub(&rot_t).max_abs() < 1e-12);
    }
}
