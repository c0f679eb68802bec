//! Float math shims usable without `std`.
//!
//! Transcendentals go through `libm` unconditionally so that results are
//! bit-identical between `std` and `no_std` builds.

#[inline]
pub fn abs(x: f64) -> f64 {
    f64::from_bits(x.to_bits() & 0x7fff_ffff_ffff_ffff)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn log10(x: f64) -> f64 {
    libm::log10(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Integer power by repeated multiplication; exponents here are tiny.
#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    let mut r = 1.0;
    let mut b = if n < 0 { 1.0 / x } else { x };
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            r *= b;
        }
        b *= b;
        e >>= 1;
    }
    r
}

#[inline]
pub fn hypot4(v: [f64; 4]) -> f64 {
    sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_naive() {
        let x = 1.7;
        let mut acc = 1.0;
        for n in 0..8 {
            assert_eq!(powi(x, n), acc);
            acc *= x;
        }
        assert!(abs(powi(2.0, -2) - 0.25) < 1e-15);
    }

    #[test]
    fn abs_handles_signs_and_zero() {
        assert_eq!(abs(-3.5), 3.5);
        assert_eq!(abs(3.5), 3.5);
        assert_eq!(abs(-0.0), 0.0);
    }
}
