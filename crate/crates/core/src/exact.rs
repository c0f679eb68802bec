//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.
//!
//! Trace identities of the Dirac algebra and the determinant identities of
//! the BRS Jacobian are asserted with zero tolerance, so everything feeding
//! them is kept in `Q(i)`. Conversion to `f64` happens only at the
//! quadrature boundary.

use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Rational from an integer pair, `n/d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Rational from an integer.
pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses a decimal string ("-1.25", "3", "0.3") into an exact rational.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(b) => (-1i64, b),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let mut parts = body.splitn(2, '.');
    let ip = parts.next().unwrap_or("");
    let fp = parts.next().unwrap_or("");
    if !ip.chars().all(|c| c.is_ascii_digit()) || !fp.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    let mut num: BigInt = if ip.is_empty() {
        BigInt::zero()
    } else {
        ip.parse().ok()?
    };
    let mut den = BigInt::one();
    for c in fp.chars() {
        num = num * 10 + (c as u8 - b'0');
        den *= 10;
    }
    Some(BigRational::new(BigInt::from(sign) * num, den))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A Gaussian rational `re + i*im`.
#[derive(Clone, PartialEq, Eq)]
pub struct Cq {
    pub re: Rational,
    pub im: Rational,
}

impl Cq {
    pub fn zero() -> Self {
        Cq {
            re: Rational::zero(),
            im: Rational::zero(),
        }
    }

    pub fn one() -> Self {
        Cq {
            re: Rational::one(),
            im: Rational::zero(),
        }
    }

    pub fn i() -> Self {
        Cq {
            re: Rational::zero(),
            im: Rational::one(),
        }
    }

    pub fn real(r: Rational) -> Self {
        Cq {
            re: r,
            im: Rational::zero(),
        }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Cq {
            re: int(re),
            im: int(im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Cq {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Cq {
            re: &self.re * r,
            im: &self.im * r,
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.re), to_f64(&self.im))
    }
}

impl fmt::Debug for Cq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}i", self.im);
        }
        let (im_abs, s): (Rational, &str) = if self.im.is_negative() {
            (-self.im.clone(), "-")
        } else {
            (self.im.clone(), "+")
        };
        write!(f, "{}{}{}i", self.re, s, im_abs)
    }
}

/// Compact textual form used by the Jacobian certificate.
pub fn cq_to_string(c: &Cq) -> String {
    c.to_string()
}

impl Add for Cq {
    type Output = Cq;
    fn add(self, rhs: Cq) -> Cq {
        Cq {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl<'a> Add<&'a Cq> for Cq {
    type Output = Cq;
    fn add(self, rhs: &Cq) -> Cq {
        Cq {
            re: self.re + &rhs.re,
            im: self.im + &rhs.im,
        }
    }
}

impl AddAssign for Cq {
    fn add_assign(&mut self, rhs: Cq) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for Cq {
    type Output = Cq;
    fn sub(self, rhs: Cq) -> Cq {
        Cq {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl SubAssign for Cq {
    fn sub_assign(&mut self, rhs: Cq) {
        self.re -= rhs.re;
        self.im -= rhs.im;
    }
}

impl Neg for Cq {
    type Output = Cq;
    fn neg(self) -> Cq {
        Cq {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for Cq {
    type Output = Cq;
    fn mul(self, rhs: Cq) -> Cq {
        &self * &rhs
    }
}

impl<'a, 'b> Mul<&'b Cq> for &'a Cq {
    type Output = Cq;
    fn mul(self, rhs: &Cq) -> Cq {
        Cq {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl MulAssign for Cq {
    fn mul_assign(&mut self, rhs: Cq) {
        let r = &*self * &rhs;
        *self = r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_product() {
        let a = Cq::from_ints(1, 2);
        let b = Cq::from_ints(3, -1);
        let c = &a * &b;
        assert_eq!(c, Cq::from_ints(5, 5));
        assert_eq!(Cq::i() * Cq::i(), Cq::from_ints(-1, 0));
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("0.3").unwrap(), ratio(3, 10));
        assert_eq!(parse_decimal("-1.25").unwrap(), ratio(-5, 4));
        assert_eq!(parse_decimal("4").unwrap(), int(4));
        assert_eq!(parse_decimal(".5").unwrap(), ratio(1, 2));
        assert!(parse_decimal("1.2.3").is_none());
        assert!(parse_decimal("abc").is_none());
    }
}
