//! Multiplication by `2/3` on `Z/2^ℓ` in signed coordinates.
//!
//! Identify `Z/2^ℓ` with the integers in `(-2^(ℓ-1), 2^(ℓ-1)]`. Then
//! `z ↦ 2·3^(-1)·z` is the five-branch map `z' = (2/3)(z + a·2^(ℓ-1))` with
//! `a ∈ {-2, …, 2}`. Following an odd `z` through `ℓ - 1` steps always lands on
//! `2^(ℓ-1)`, which forces the branch indices to form a base-3/2
//! representation of one:
//!
//! ```text
//! |1 - Σ_{j=1}^{ℓ-1} (2/3)^j a_{ℓ-j}| ≤ (2/3)^(ℓ-1)
//! ```

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::numeric::{inv3_mod_pow2, pow2, reduce_signed, signed_representative};
use crate::{Error, OddResidue, Result};

/// Largest `ℓ` accepted by [`min_nonzero_fraction`].
pub const MAX_SEARCH_LEVEL: u32 = 40;

/// Largest `ℓ` accepted by [`nonzero_fraction_over_z`].
pub const MAX_ENUM_LEVEL: u32 = 24;

/// An element of `Z/2^ℓ` as an integer in `(-2^(ℓ-1), 2^(ℓ-1)]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedResidue {
    value: BigInt,
    level: u32,
}

impl SignedResidue {
    pub fn new(value: impl Into<BigInt>, level: u32) -> Result<Self> {
        let value = value.into();
        if level == 0 {
            return Err(Error::InvalidParameter("signed residues need ℓ ≥ 1".into()));
        }
        let half = BigInt::from(pow2(level - 1));
        if value <= -&half || value > half {
            return Err(Error::InvalidParameter(format!(
                "{value} is outside the signed range (-2^{0}, 2^{0}]",
                level - 1
            )));
        }
        Ok(SignedResidue { value, level })
    }

    /// Signed representative of any integer.
    pub fn reduce(value: &BigInt, level: u32) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidParameter("signed residues need ℓ ≥ 1".into()));
        }
        Ok(SignedResidue {
            value: signed_representative(&reduce_signed(value, level), level),
            level,
        })
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// The same element as a residue in `[0, 2^ℓ)`.
    pub fn lift(&self) -> BigUint {
        reduce_signed(&self.value, self.level)
    }
}

impl From<&OddResidue> for SignedResidue {
    fn from(z: &OddResidue) -> Self {
        SignedResidue {
            value: signed_representative(z.value(), z.level()),
            level: z.level(),
        }
    }
}

impl fmt::Display for SignedResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Branch indices `(a_1, …, a_{ℓ-1})`, each in `{-2, …, 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoeffSeq {
    a: Vec<i8>,
    level: u32,
}

impl CoeffSeq {
    pub fn new(a: Vec<i8>, level: u32) -> Result<Self> {
        if level == 0 || a.len() != level as usize - 1 {
            return Err(Error::InvalidParameter(format!(
                "a coefficient sequence at level {level} needs {} entries, got {}",
                level.max(1) - 1,
                a.len()
            )));
        }
        if let Some(bad) = a.iter().find(|v| !(-2..=2).contains(*v)) {
            return Err(Error::InvalidParameter(format!(
                "coefficient {bad} is outside -2..=2"
            )));
        }
        Ok(CoeffSeq { a, level })
    }

    pub fn coeffs(&self) -> &[i8] {
        &self.a
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn nonzero_count(&self) -> usize {
        self.a.iter().filter(|&&v| v != 0).count()
    }
}

impl fmt::Display for CoeffSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.a.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// One step of the five-branch map: `z' ≡ 2·3^(-1)·z` and the `a` with
/// `3z' = 2(z + a·2^(ℓ-1))`.
pub fn branch_step(z: &SignedResidue) -> Result<(SignedResidue, i8)> {
    let ell = z.level;
    let lifted = (z.lift() * inv3_mod_pow2(ell) * 2u32) % pow2(ell);
    let next = SignedResidue {
        value: signed_representative(&lifted, ell),
        level: ell,
    };
    let numerator = BigInt::from(3) * &next.value - BigInt::from(2) * &z.value;
    let (a, rem) = numerator.div_rem(&BigInt::from(pow2(ell)));
    let a = a.to_i8().filter(|v| (-2..=2).contains(v));
    match a {
        Some(a) if rem.is_zero() => Ok((next, a)),
        _ => Err(Error::Invariant(format!(
            "no branch index for {z} → {next} at level {ell}"
        ))),
    }
}

/// Branch indices along the trajectory of `z`; the walk must end on `2^(ℓ-1)`.
pub fn trajectory_coeffs(z: &OddResidue) -> Result<CoeffSeq> {
    let ell = z.level();
    let mut current = SignedResidue::from(z);
    let mut a = Vec::with_capacity(ell as usize - 1);
    for _ in 1..ell {
        let (next, index) = branch_step(&current)?;
        a.push(index);
        current = next;
    }
    let end = BigInt::from(pow2(ell - 1));
    if current.value != end {
        return Err(Error::Invariant(format!(
            "trajectory of {} at level {ell} ends at {} instead of 2^{}",
            z.value(),
            current.value,
            ell - 1
        )));
    }
    CoeffSeq::new(a, ell)
}

/// Exact outcome of the base-3/2 test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eq7Check {
    pub holds: bool,
    /// `3^(ℓ-1) · (1 - Σ_j (2/3)^j a_{ℓ-j})`.
    pub residual_numerator: BigInt,
    /// `3^(ℓ-1)`.
    pub denominator: BigUint,
    /// `3^(ℓ-1) · (2/3)^(ℓ-1) = 2^(ℓ-1)`.
    pub window_numerator: BigUint,
}

/// Weight of `a_i` (1-based) after clearing the denominator: `2^(ℓ-i) 3^(i-1)`.
fn weights(level: u32) -> Vec<BigInt> {
    (1..level)
        .map(|i| BigInt::from(pow2(level - i)) * BigInt::from(3u32).pow(i - 1))
        .collect()
}

pub fn verify_eq7(c: &CoeffSeq) -> Eq7Check {
    let ell = c.level;
    let denominator = BigUint::from(3u32).pow(ell - 1);
    let sum: BigInt = weights(ell)
        .iter()
        .zip(&c.a)
        .map(|(w, &a)| w * BigInt::from(a))
        .sum();
    let residual_numerator = BigInt::from(denominator.clone()) - sum;
    let window_numerator = pow2(ell - 1);
    Eq7Check {
        holds: residual_numerator.magnitude() <= &window_numerator,
        residual_numerator,
        denominator,
        window_numerator,
    }
}

struct Search {
    w: Vec<i128>,
    prefix: Vec<i128>,
    window: i128,
}

impl Search {
    fn new(level: u32) -> Self {
        let w: Vec<i128> = weights(level)
            .iter()
            .map(|v| v.to_i128().unwrap())
            .collect();
        let mut prefix = vec![0i128];
        for v in &w {
            prefix.push(prefix.last().unwrap() + v);
        }
        Search {
            w,
            prefix,
            window: 1i128 << (level - 1),
        }
    }

    /// Whether positions `low..=top` can bring `residual` into the window
    /// using at most `budget` nonzero coefficients; fills `out` on success.
    fn complete(
        &self,
        low: usize,
        top: usize,
        residual: i128,
        budget: usize,
        out: &mut [i8],
    ) -> bool {
        let excess = residual.abs() - self.window;
        if excess <= 0 {
            for v in &mut out[low..=top] {
                *v = 0;
            }
            return true;
        }
        if budget == 0 || 2 * (self.prefix[top + 1] - self.prefix[low]) < excess {
            return false;
        }
        let mut reach = 0;
        let mut needed = 0;
        for k in (low..=top).rev() {
            reach += 2 * self.w[k];
            needed += 1;
            if reach >= excess {
                break;
            }
        }
        if needed > budget {
            return false;
        }
        let w = self.w[top];
        let mut order = [-2i8, -1, 0, 1, 2];
        order.sort_by_key(|&a| ((residual - a as i128 * w).abs(), a));
        for a in order {
            let rest = residual - a as i128 * w;
            let spend = usize::from(a != 0);
            if spend > budget {
                continue;
            }
            out[top] = a;
            if top == low {
                if rest.abs() <= self.window {
                    return true;
                }
            } else if self.complete(low, top - 1, rest, budget - spend, out) {
                return true;
            }
        }
        false
    }
}

/// Fewest nonzero coefficients in any sequence passing the base-3/2 test,
/// with the lexicographically smallest such sequence.
pub fn min_nonzero_fraction(level: u32) -> Result<(usize, CoeffSeq)> {
    if level < 2 {
        return Err(Error::InvalidParameter(format!(
            "search needs ℓ ≥ 2, got {level}"
        )));
    }
    if level > MAX_SEARCH_LEVEL {
        return Err(Error::ResourceLimit {
            what: "base-3/2 search level ℓ",
            value: level as u64,
            limit: MAX_SEARCH_LEVEL as u64,
        });
    }
    let s = Search::new(level);
    let len = level as usize - 1;
    let target = 3i128.pow(level - 1);
    let mut scratch = vec![0i8; len];
    let count = (0..=len)
        .find(|&k| s.complete(0, len - 1, target, k, &mut scratch))
        .ok_or_else(|| Error::Invariant(format!("no base-3/2 representation at level {level}")))?;

    // Fix a_1, a_2, … in turn to the smallest value that still admits a completion.
    let mut witness = Vec::with_capacity(len);
    let mut residual = target;
    let mut used = 0;
    for (p, &w) in s.w.iter().enumerate() {
        let choice = (-2i8..=2).find(|&a| {
            let spend = usize::from(a != 0);
            if used + spend > count {
                return false;
            }
            let rest = residual - a as i128 * w;
            if p + 1 == len {
                rest.abs() <= s.window
            } else {
                s.complete(p + 1, len - 1, rest, count - used - spend, &mut scratch)
            }
        });
        let a = choice.ok_or_else(|| Error::Invariant("lexicographic witness lost".into()))?;
        witness.push(a);
        residual -= a as i128 * w;
        used += usize::from(a != 0);
    }
    let witness = CoeffSeq::new(witness, level)?;
    if !verify_eq7(&witness).holds || witness.nonzero_count() != count {
        return Err(Error::Invariant(
            "base-3/2 witness fails the exact check".into(),
        ));
    }
    Ok((count, witness))
}

/// Number of nonzero branch indices along the trajectory of `z`, on machine words.
fn trajectory_nonzero_u64(z: u64, level: u32, two_inv3: u64) -> u32 {
    let mask = (1u64 << level) - 1;
    let half = 1i64 << (level - 1);
    let signed = |r: u64| {
        let r = r as i64;
        if r > half {
            r - (1i64 << level)
        } else {
            r
        }
    };
    let mut r = z;
    let mut count = 0;
    for _ in 1..level {
        let next = r.wrapping_mul(two_inv3) & mask;
        if 3 * signed(next) != 2 * signed(r) {
            count += 1;
        }
        r = next;
    }
    count
}

/// Fewest nonzero branch indices over all odd `z ∈ Z/2^ℓ`, and the smallest
/// `z` attaining it.
pub fn nonzero_fraction_over_z(level: u32) -> Result<(usize, OddResidue)> {
    if level == 0 {
        return Err(Error::InvalidParameter("enumeration needs ℓ ≥ 1".into()));
    }
    if level > MAX_ENUM_LEVEL {
        return Err(Error::ResourceLimit {
            what: "trajectory enumeration level ℓ",
            value: level as u64,
            limit: MAX_ENUM_LEVEL as u64,
        });
    }
    let two_inv3 = (inv3_mod_pow2(level) * 2u32 % pow2(level))
        .to_u64()
        .unwrap();
    let odd_count = 1u64 << (level - 1);
    let (count, z) = (0..odd_count)
        .into_par_iter()
        .map(|i| {
            let z = 2 * i + 1;
            (trajectory_nonzero_u64(z, level, two_inv3), z)
        })
        .min()
        .expect("at least one odd residue");
    Ok((count as usize, OddResidue::new(z, level)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sr(v: i64, level: u32) -> SignedResidue {
        SignedResidue::new(v, level).unwrap()
    }

    fn seq(a: &[i8], level: u32) -> CoeffSeq {
        CoeffSeq::new(a.to_vec(), level).unwrap()
    }

    #[test]
    fn signed_range() {
        assert!(SignedResidue::new(2, 2).is_ok());
        assert!(SignedResidue::new(-2, 2).is_err());
        assert!(SignedResidue::new(3, 2).is_err());
        assert_eq!(
            SignedResidue::reduce(&BigInt::from(6), 3).unwrap().value(),
            &BigInt::from(-2)
        );
        assert_eq!(sr(-2, 3).lift(), BigUint::from(6u32));
    }

    #[test]
    fn branch_step_examples() {
        assert_eq!(branch_step(&sr(1, 2)).unwrap(), (sr(2, 2), 1));
        assert_eq!(branch_step(&sr(1, 3)).unwrap(), (sr(-2, 3), -1));
        assert_eq!(branch_step(&sr(-2, 3)).unwrap(), (sr(4, 3), 2));
    }

    #[test]
    fn trajectory_examples() {
        let z = |v: u64, l| OddResidue::new(v, l).unwrap();
        assert_eq!(trajectory_coeffs(&z(1, 2)).unwrap().coeffs(), &[1]);
        assert_eq!(trajectory_coeffs(&z(1, 3)).unwrap().coeffs(), &[-1, 2]);
        let c = trajectory_coeffs(&z(7, 4)).unwrap();
        assert!(verify_eq7(&c).holds);
        assert!(trajectory_coeffs(&z(1, 1)).unwrap().coeffs().is_empty());
    }

    #[test]
    fn exact_check_examples() {
        let c = verify_eq7(&seq(&[1], 2));
        assert!(c.holds);
        assert_eq!(c.residual_numerator, BigInt::from(1));
        assert_eq!(c.denominator, BigUint::from(3u32));

        let c = verify_eq7(&seq(&[-1, 2], 3));
        assert!(c.holds);
        assert_eq!(c.residual_numerator, BigInt::from(1));
        assert_eq!(c.denominator, BigUint::from(9u32));

        let c = verify_eq7(&seq(&[0; 5], 6));
        assert!(!c.holds);
        assert_eq!(c.residual_numerator, BigInt::from(243));
        assert_eq!(c.window_numerator, BigUint::from(32u32));
    }

    #[test]
    fn all_zero_sequences_fail() {
        for level in 2..=200 {
            assert!(!verify_eq7(&seq(&vec![0; level as usize - 1], level)).holds);
        }
    }

    #[test]
    fn coeff_seq_validation() {
        assert!(CoeffSeq::new(vec![3], 2).is_err());
        assert!(CoeffSeq::new(vec![1, 1], 2).is_err());
        assert_eq!(seq(&[-1, 2], 3).to_string(), "-1,2");
    }

    #[test]
    fn every_trajectory_is_a_representation_of_one() {
        for level in 2..=16u32 {
            let inv = inv3_mod_pow2(level) * 2u32 % pow2(level);
            for v in (1..(1u64 << level)).step_by(2) {
                let z = OddResidue::new(v, level).unwrap();
                let c = trajectory_coeffs(&z).unwrap();
                assert!(verify_eq7(&c).holds, "z = {v}, ℓ = {level}");

                let first = branch_step(&SignedResidue::from(&z)).unwrap().0;
                assert_eq!(first.lift(), BigUint::from(v) * &inv % pow2(level));
            }
        }
    }

    #[test]
    fn zero_branch_means_no_wraparound() {
        for level in 2..=12u32 {
            let half = 1i64 << (level - 1);
            for v in (-half + 1)..=half {
                let (next, a) = branch_step(&sr(v, level)).unwrap();
                let direct = 2 * v % 3 == 0 && (2 * v / 3) > -half && (2 * v / 3) <= half;
                assert_eq!(a == 0, direct, "z = {v}, ℓ = {level}");
                if a == 0 {
                    assert_eq!(next.value(), &BigInt::from(2 * v / 3));
                }
            }
        }
    }

    #[test]
    fn search_examples() {
        let (count, w) = min_nonzero_fraction(2).unwrap();
        assert_eq!(count, 1);
        assert_eq!(w.coeffs(), &[1]);
        let (count, w) = min_nonzero_fraction(5).unwrap();
        assert!(count >= 1);
        assert!(verify_eq7(&w).holds);
        assert!(min_nonzero_fraction(41).is_err());
        assert!(min_nonzero_fraction(1).is_err());
    }

    #[test]
    fn search_matches_exhaustive_enumeration() {
        for level in 2..=8u32 {
            let len = level as usize - 1;
            let mut best: Option<(usize, Vec<i8>)> = None;
            for code in 0..5u64.pow(len as u32) {
                let mut c = code;
                let a: Vec<i8> = (0..len)
                    .map(|_| {
                        let d = (c % 5) as i8 - 2;
                        c /= 5;
                        d
                    })
                    .rev()
                    .collect();
                let s = seq(&a, level);
                if verify_eq7(&s).holds {
                    let key = (s.nonzero_count(), a);
                    if best.as_ref().is_none_or(|b| key < *b) {
                        best = Some(key);
                    }
                }
            }
            let (count, witness) = best.unwrap();
            let found = min_nonzero_fraction(level).unwrap();
            assert_eq!(found.0, count, "ℓ = {level}");
            assert_eq!(found.1.coeffs(), witness.as_slice(), "ℓ = {level}");
        }
    }

    #[test]
    fn enumeration_examples() {
        let (count, z) = nonzero_fraction_over_z(2).unwrap();
        assert_eq!((count, z.value().to_u64().unwrap()), (1, 1));
        let (count, z) = nonzero_fraction_over_z(3).unwrap();
        let direct = (1..8u64)
            .step_by(2)
            .map(|v| {
                (
                    trajectory_coeffs(&OddResidue::new(v, 3).unwrap())
                        .unwrap()
                        .nonzero_count(),
                    v,
                )
            })
            .min()
            .unwrap();
        assert_eq!((count, z.value().to_u64().unwrap()), direct);
        assert!(nonzero_fraction_over_z(25).is_err());
    }

    #[test]
    fn word_kernel_matches_exact_trajectories() {
        for level in 2..=12u32 {
            let two_inv3 = (inv3_mod_pow2(level) * 2u32 % pow2(level))
                .to_u64()
                .unwrap();
            for v in (1..(1u64 << level)).step_by(2) {
                let exact = trajectory_coeffs(&OddResidue::new(v, level).unwrap()).unwrap();
                assert_eq!(
                    trajectory_nonzero_u64(v, level, two_inv3) as usize,
                    exact.nonzero_count()
                );
            }
        }
    }

    #[test]
    fn search_is_below_trajectories() {
        for level in 2..=18u32 {
            let (search, _) = min_nonzero_fraction(level).unwrap();
            let (over_z, _) = nonzero_fraction_over_z(level).unwrap();
            assert!(search <= over_z, "ℓ = {level}: {search} > {over_z}");
        }
    }

    proptest! {
        #[test]
        fn branch_step_identity(level in 2u32..200, seed in any::<u64>()) {
            let v = BigInt::from(seed) * BigInt::from(seed ^ 0x9e37_79b9);
            let z = SignedResidue::reduce(&v, level).unwrap();
            let (next, a) = branch_step(&z).unwrap();
            let lhs = BigInt::from(3) * next.value();
            let rhs = BigInt::from(2) * (z.value() + BigInt::from(a) * BigInt::from(pow2(level - 1)));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
