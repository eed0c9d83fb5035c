//! Exact dyadic angles and arithmetic in `Z/2^ℓ`.
//!
//! Every angle in this crate is a rational number of turns whose denominator is
//! a power of two. Such angles are kept exactly as `numerator / 2^level` and
//! only turned into floating point at the last moment, when a point on the unit
//! circle is needed.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::Error;

/// `2^bits` as a big integer.
pub fn pow2(bits: u32) -> BigUint {
    BigUint::one() << bits as usize
}

/// Least nonnegative residue of a signed integer modulo `2^level`.
pub fn reduce_signed(value: &BigInt, level: u32) -> BigUint {
    let modulus = BigInt::from(pow2(level));
    value
        .mod_floor(&modulus)
        .to_biguint()
        .expect("mod_floor of a positive modulus is nonnegative")
}

/// An exact point `e(numerator / 2^level)` on the unit circle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicAngle {
    numerator: BigUint,
    level: u32,
}

impl DyadicAngle {
    /// Builds the angle `numerator / 2^level`, reducing the numerator mod `2^level`.
    pub fn new(numerator: impl Into<BigUint>, level: u32) -> Self {
        let numerator = numerator.into() % pow2(level);
        DyadicAngle { numerator, level }
    }

    pub fn zero(level: u32) -> Self {
        DyadicAngle {
            numerator: BigUint::zero(),
            level,
        }
    }

    /// The angle `1/2` turn at level 1, i.e. the point `-1`.
    pub fn half() -> Self {
        DyadicAngle::new(1u32, 1)
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// The angle `1 - t`, whose point is the complex conjugate of this one.
    pub fn conjugate(&self) -> Self {
        if self.numerator.is_zero() {
            return self.clone();
        }
        DyadicAngle {
            numerator: pow2(self.level) - &self.numerator,
            level: self.level,
        }
    }

    /// Rewrites the same angle with denominator `2^level`, which must not be smaller.
    pub fn lift(&self, level: u32) -> Self {
        assert!(level >= self.level, "cannot lift to a coarser level");
        DyadicAngle {
            numerator: &self.numerator << (level - self.level) as usize,
            level,
        }
    }

    /// Approximate value in turns, in `[0, 1)`.
    pub fn turns(&self) -> f64 {
        let (num, level) = top_bits(&self.numerator, self.level);
        num as f64 / (level as f64).exp2()
    }

    pub fn to_unit_point(&self) -> UnitPoint {
        to_unit_point(self)
    }

    pub fn halves_of_triple(&self) -> (DyadicAngle, DyadicAngle) {
        halves_of_triple(self)
    }

    /// Whether the point has strictly negative real part, i.e. `1/4 < t < 3/4`.
    pub fn has_negative_real_part(&self) -> bool {
        if self.level < 2 {
            return self.level == 1 && !self.numerator.is_zero();
        }
        let quarter = pow2(self.level - 2);
        self.numerator > quarter && self.numerator < &quarter * 3u32
    }
}

impl fmt::Display for DyadicAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.level)
    }
}

/// A point on the unit circle in double precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitPoint {
    pub re: f64,
    pub im: f64,
}

impl std::ops::Mul for UnitPoint {
    type Output = UnitPoint;

    fn mul(self, other: UnitPoint) -> UnitPoint {
        UnitPoint {
            re: self.re * other.re - self.im * other.im,
            im: self.re * other.im + self.im * other.re,
        }
    }
}

impl UnitPoint {
    pub const ONE: UnitPoint = UnitPoint { re: 1.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        UnitPoint { re, im }
    }

    /// `e(turns) = exp(2πi · turns)`.
    pub fn from_turns(turns: f64) -> Self {
        let (s, c) = (std::f64::consts::TAU * turns).sin_cos();
        UnitPoint { re: c, im: s }
    }

    pub fn conj(self) -> Self {
        UnitPoint {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm(self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Argument in turns, in `[0, 1)`.
    pub fn turns(self) -> f64 {
        let t = self.im.atan2(self.re) / std::f64::consts::TAU;
        if t < 0.0 {
            // atan2 can return -0.0 or a tiny negative number just below the positive axis
            let wrapped = t + 1.0;
            if wrapped >= 1.0 {
                0.0
            } else {
                wrapped
            }
        } else {
            t
        }
    }

    pub fn distance(self, other: UnitPoint) -> f64 {
        (self.re - other.re).hypot(self.im - other.im)
    }
}

impl From<UnitPoint> for Complex64 {
    fn from(p: UnitPoint) -> Self {
        Complex64::new(p.re, p.im)
    }
}

/// An odd element of `Z/2^ℓ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OddResidue {
    value: BigUint,
    level: u32,
}

impl OddResidue {
    pub fn new(value: impl Into<BigUint>, level: u32) -> Result<Self, Error> {
        let value = value.into();
        if level == 0 {
            return Err(Error::InvalidParameter(
                "odd residues need level ≥ 1".into(),
            ));
        }
        if value.is_even() || value >= pow2(level) {
            return Err(Error::InvalidParameter(format!(
                "{value} is not an odd residue mod 2^{level}"
            )));
        }
        Ok(OddResidue { value, level })
    }

    /// Wraps a value already known to be odd and below `2^level`.
    pub(crate) fn from_reduced(value: BigUint, level: u32) -> Self {
        debug_assert!(value.is_odd() && value < pow2(level));
        OddResidue { value, level }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// `2^ℓ - z`.
    pub fn negate(&self) -> Self {
        OddResidue {
            value: pow2(self.level) - &self.value,
            level: self.level,
        }
    }

    pub fn as_angle(&self) -> DyadicAngle {
        DyadicAngle {
            numerator: self.value.clone(),
            level: self.level,
        }
    }
}

impl fmt::Display for OddResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.value, self.level)
    }
}

/// The inverse of 3 modulo `2^ℓ`.
///
/// Uses Newton iteration `r ← r(2 - 3r)`, which doubles the number of correct
/// low bits each round, starting from `r = 3` (correct mod 8).
pub fn inv3_mod_pow2(ell: u32) -> BigUint {
    assert!(ell >= 1, "inv3_mod_pow2 needs ℓ ≥ 1");
    let modulus = BigInt::from(pow2(ell));
    let mut r = BigInt::from(3);
    let mut correct_bits = 3u32;
    while correct_bits < ell {
        r = (&r * (BigInt::from(2) - BigInt::from(3) * &r)).mod_floor(&modulus);
        correct_bits *= 2;
    }
    r.mod_floor(&modulus)
        .to_biguint()
        .expect("reduced residue is nonnegative")
}

/// Multiplicative order of 3 in `Z/2^n`.
///
/// The unit group has order `2^(n-1)`, so the order of 3 is the least `2^k`
/// with `3^(2^k) ≡ 1`, found by repeated squaring.
pub fn order_of_3(n: u32) -> Result<BigUint, Error> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "order_of_3 needs n ≥ 3, got {n}"
        )));
    }
    let modulus = pow2(n);
    let mut power = BigUint::from(3u32);
    let mut k = 0u32;
    while !power.is_one() {
        power = (&power * &power) % &modulus;
        k += 1;
    }
    Ok(pow2(k))
}

/// Top 64 significant bits of `numerator / 2^level`, as a (numerator, level)
/// pair with `level ≤ 64`.
fn top_bits(numerator: &BigUint, level: u32) -> (u64, u32) {
    if level <= 64 {
        let n = numerator
            .to_u64()
            .expect("numerator below 2^64 fits in u64");
        (n, level)
    } else {
        let shift = level - 64;
        let n = (numerator >> shift as usize)
            .to_u64()
            .expect("top 64 bits fit in u64");
        (n, 64)
    }
}

/// `e(num / 2^level)` for `level ≤ 64` and `num < 2^level`.
///
/// The angle is folded into the upper half plane and split into the nearest
/// quarter turn plus a remainder of at most an eighth of a turn, so quarter
/// turns come out exact and `e(1 - t)` is the bitwise conjugate of `e(t)`.
pub(crate) fn unit_point_u64(num: u64, level: u32) -> UnitPoint {
    debug_assert!(level <= 64);
    if level == 0 {
        return UnitPoint::ONE;
    }
    let full = 1u128 << level;
    let num = num as u128;
    debug_assert!(num < full);
    let half = full >> 1;
    if num > half {
        return unit_point_u64((full - num) as u64, level).conj();
    }
    // q = round(4t) in {0, 1, 2}
    let q = ((num << 2) + half) >> level;
    let rem = ((num << 2) as i128) - ((q as i128) << level);
    let r = rem as f64 / (level as f64).exp2();
    let (s, c) = (r * std::f64::consts::FRAC_PI_2).sin_cos();
    match q {
        0 => UnitPoint { re: c, im: s },
        1 => UnitPoint { re: -s, im: c },
        _ => UnitPoint { re: -c, im: -s },
    }
}

/// Real part of `e(num / 2^level)`; agrees bitwise with `unit_point_u64(..).re`.
#[inline]
pub(crate) fn unit_re_u64(num: u64, level: u32) -> f64 {
    unit_point_u64(num, level).re
}

pub fn to_unit_point(t: &DyadicAngle) -> UnitPoint {
    let (num, level) = top_bits(&t.numerator, t.level);
    unit_point_u64(num, level)
}

/// The two square roots of the cube of `e(t)`: angles `3t/2` and `3t/2 + 1/2`,
/// both at level `k + 1`.
pub fn halves_of_triple(t: &DyadicAngle) -> (DyadicAngle, DyadicAngle) {
    let level = t.level + 1;
    let modulus = pow2(level);
    let tripled = &t.numerator * 3u32 % &modulus;
    let shifted = (&tripled + pow2(t.level)) % &modulus;
    (
        DyadicAngle {
            numerator: tripled,
            level,
        },
        DyadicAngle {
            numerator: shifted,
            level,
        },
    )
}

/// Signed representative of `value` in `(-2^(ℓ-1), 2^(ℓ-1)]`.
pub fn signed_representative(value: &BigUint, level: u32) -> BigInt {
    let value = value % pow2(level);
    if level == 0 {
        return BigInt::zero();
    }
    if value > pow2(level - 1) {
        BigInt::from_biguint(Sign::Plus, value) - BigInt::from(pow2(level))
    } else {
        BigInt::from(value)
    }
}
