//! Block codes over `Z/2^n`: the message `m` is sent to the rounded points
//! `β_k(m) = e(3^k m / 2^n)` for `0 ≤ k < cn`.
//!
//! Since `β_k(m) β_k(m')† = β_k(m - m')`, the distance between two codewords is
//! controlled by the exponential sum at `m - m'`, which [`conj1_lhs`] evaluates
//! and [`conj1_scan`] maximises over all nonzero `m`.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use crate::numeric::{pow2, unit_re_u64, DyadicAngle};
use crate::treecode::{eta_from_inner, gamma_angle, SymbolWord};
use crate::{Error, Result};

/// Largest `n` accepted by [`conj1_scan`].
pub const MAX_SCAN_BITS: u32 = 24;

/// Largest `n` accepted by [`block_min_distance`].
pub const MAX_AUDIT_BITS: u32 = 12;

/// Number of histogram bins over `[-1, 1]`.
pub const HISTOGRAM_BINS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockParams {
    /// Message length in bits.
    pub n: u32,
    /// Rate constant; codewords have length `c n`.
    pub c: u32,
    pub kappa: u32,
}

impl BlockParams {
    pub fn new(n: u32, c: u32, kappa: u32) -> Result<Self> {
        if n == 0 || c == 0 {
            return Err(Error::InvalidParameter(format!(
                "block parameters need n ≥ 1 and c ≥ 1, got n = {n}, c = {c}"
            )));
        }
        if kappa < 2 {
            return Err(Error::InvalidParameter(format!(
                "alphabet size κ = {kappa} must be ≥ 2"
            )));
        }
        Ok(BlockParams { n, c, kappa })
    }

    /// Codeword length `c n`.
    pub fn length(&self) -> usize {
        self.n as usize * self.c as usize
    }
}

/// Residues `3^k m mod 2^n` for `k = 0..len`.
fn geometric_residues(m: &BigUint, n: u32, len: usize) -> Vec<BigUint> {
    let modulus = pow2(n);
    let mut r = m % &modulus;
    (0..len)
        .map(|_| {
            let current = r.clone();
            r = (&r * 3u32) % &modulus;
            current
        })
        .collect()
}

fn check_message(m: &BigUint, n: u32) -> Result<()> {
    if m >= &pow2(n) {
        return Err(Error::InvalidParameter(format!(
            "message {m} does not fit in {n} bits"
        )));
    }
    Ok(())
}

/// The exact angles `3^k m / 2^n`, `k = 0..cn`.
pub fn block_angles(m: &BigUint, params: &BlockParams) -> Result<Vec<DyadicAngle>> {
    check_message(m, params.n)?;
    Ok(geometric_residues(m, params.n, params.length())
        .into_iter()
        .map(|r| DyadicAngle::new(r, params.n))
        .collect())
}

pub fn block_encode(m: &BigUint, params: &BlockParams) -> Result<SymbolWord> {
    let symbols = block_angles(m, params)?
        .iter()
        .map(|t| gamma_angle(t, params.kappa))
        .collect();
    SymbolWord::new(symbols, params.kappa)
}

/// `(1/cn) Σ_{k<cn} e(3^k m / 2^n)`.
pub fn conj1_sum(m: &BigUint, n: u32, c: u32) -> Result<Complex64> {
    let params = BlockParams::new(n, c, 2)?;
    check_message(m, n)?;
    let total: Complex64 = geometric_residues(m, n, params.length())
        .into_iter()
        .map(|r| Complex64::from(DyadicAngle::new(r, n).to_unit_point()))
        .sum();
    Ok(total / params.length() as f64)
}

/// Real part of [`conj1_sum`].
pub fn conj1_lhs(m: &BigUint, n: u32, c: u32) -> Result<f64> {
    conj1_sum(m, n, c).map(|s| s.re)
}

/// Real part of [`conj1_sum`] times `cn`, on machine words; same summation order.
fn conj1_re_total_u64(m: u64, n: u32, len: usize) -> f64 {
    let mask = (1u64 << n) - 1;
    let mut r = m;
    let mut total = 0.0;
    for _ in 0..len {
        total += unit_re_u64(r, n);
        r = r.wrapping_mul(3) & mask;
    }
    total
}

/// Result of [`conj1_scan`].
#[derive(Clone, Debug, PartialEq)]
pub struct Conj1Scan {
    pub n: u32,
    pub c: u32,
    pub max: f64,
    /// Smallest nonzero `m` attaining `max`.
    pub argmax: u64,
    /// Counts per bin of width 0.01 over `[-1, 1]`; the value 1 lands in the last bin.
    pub histogram: Vec<u64>,
}

impl Conj1Scan {
    /// `(bin_lo, bin_hi, count)` for every bin.
    pub fn bins(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        self.histogram.iter().enumerate().map(|(i, &count)| {
            let lo = -1.0 + i as f64 / 100.0;
            let hi = -1.0 + (i + 1) as f64 / 100.0;
            (lo, hi, count)
        })
    }
}

fn bin_index(value: f64) -> usize {
    let i = ((value + 1.0) * 100.0).floor();
    (i.max(0.0) as usize).min(HISTOGRAM_BINS - 1)
}

/// Evaluates [`conj1_lhs`] for every nonzero `m ∈ Z/2^n`.
pub fn conj1_scan(n: u32, c: u32) -> Result<Conj1Scan> {
    let params = BlockParams::new(n, c, 2)?;
    if n > MAX_SCAN_BITS {
        return Err(Error::ResourceLimit {
            what: "scan bits n",
            value: n as u64,
            limit: MAX_SCAN_BITS as u64,
        });
    }
    let len = params.length();
    let count = 1u64 << n;
    const CHUNK: u64 = 1 << 12;

    struct Partial {
        max: f64,
        argmax: u64,
        histogram: Vec<u64>,
    }

    fn merge(mut a: Partial, b: Partial) -> Partial {
        if b.max > a.max || (b.max == a.max && b.argmax < a.argmax) {
            a.max = b.max;
            a.argmax = b.argmax;
        }
        for (x, y) in a.histogram.iter_mut().zip(b.histogram) {
            *x += y;
        }
        a
    }

    let empty = || Partial {
        max: f64::NEG_INFINITY,
        argmax: u64::MAX,
        histogram: vec![0; HISTOGRAM_BINS],
    };

    let result = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut part = empty();
            for m in (chunk * CHUNK).max(1)..((chunk + 1) * CHUNK).min(count) {
                let value = conj1_re_total_u64(m, n, len) / len as f64;
                part.histogram[bin_index(value)] += 1;
                if value > part.max {
                    part.max = value;
                    part.argmax = m;
                }
            }
            part
        })
        .reduce(empty, merge);

    Ok(Conj1Scan {
        n,
        c,
        max: result.max,
        argmax: result.argmax,
        histogram: result.histogram,
    })
}

/// Average of `e(g^k m / 2^n)` over one period of `g = 3^(2^r)`.
pub fn subgroup_sum(n: u32, r: u32, m: &BigUint) -> Result<Complex64> {
    check_subgroup(n, r)?;
    check_message(m, n)?;
    let modulus = pow2(n);
    let g = BigUint::from(3u32).modpow(&pow2(r), &modulus);
    let period = 1u64 << (n - r - 2);
    let mut u = m.clone();
    let mut total = Complex64::zero();
    for _ in 0..period {
        total += Complex64::from(DyadicAngle::new(u.clone(), n).to_unit_point());
        u = (&u * &g) % &modulus;
    }
    Ok(total / period as f64)
}

/// `e(m / 2^n)` when `2^(n-r-2)` divides `m`, zero otherwise.
pub fn subgroup_closed_form(n: u32, r: u32, m: &BigUint) -> Result<Complex64> {
    check_subgroup(n, r)?;
    check_message(m, n)?;
    if m.is_multiple_of(&pow2(n - r - 2)) {
        Ok(DyadicAngle::new(m.clone(), n).to_unit_point().into())
    } else {
        Ok(Complex64::zero())
    }
}

fn check_subgroup(n: u32, r: u32) -> Result<()> {
    if r == 0 || n < r + 3 {
        return Err(Error::InvalidParameter(format!(
            "subgroup sums need r ≥ 1 and n ≥ r + 3, got n = {n}, r = {r}"
        )));
    }
    if n - r - 2 > 26 {
        return Err(Error::ResourceLimit {
            what: "subgroup period exponent n - r - 2",
            value: (n - r - 2) as u64,
            limit: 26,
        });
    }
    Ok(())
}

/// Distance fraction `η` the inner-product bound guarantees when every nonzero
/// difference has real average at most `1 - δ`.
pub fn block_distance_bound(params: &BlockParams, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "δ = {delta} must lie in (0, 2]"
        )));
    }
    let cos_k = (std::f64::consts::TAU / params.kappa as f64).cos();
    let eta = eta_from_inner(1.0 - delta, params.kappa);
    if eta <= 0.0 {
        let needed = std::f64::consts::TAU / (1.0 - delta).clamp(-1.0, 1.0).acos();
        return Err(Error::InvalidParameter(format!(
            "κ = {} gives cos 2π/κ = {cos_k:.6} ≤ 1 - δ = {:.6}; need κ > {needed:.4}",
            params.kappa,
            1.0 - delta
        )));
    }
    Ok(eta)
}

/// Exhaustive minimum distance of a block code.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockAudit {
    pub params: BlockParams,
    pub min_hamming: usize,
    pub worst_pair: (u64, u64),
    /// Largest `conj1_lhs` over nonzero differences.
    pub max_inner: f64,
    /// `η · cn` at `max_inner`.
    pub inner_product_bound: f64,
}

/// Minimum Hamming distance over all pairs of codewords, next to the bound
/// from the worst exponential sum.
pub fn block_min_distance(params: &BlockParams) -> Result<BlockAudit> {
    if params.n > MAX_AUDIT_BITS {
        return Err(Error::ResourceLimit {
            what: "block audit bits n",
            value: params.n as u64,
            limit: MAX_AUDIT_BITS as u64,
        });
    }
    let count = 1u64 << params.n;
    let words: Vec<Vec<u32>> = (0..count)
        .map(|m| block_encode(&BigUint::from(m), params).map(|w| w.symbols().to_vec()))
        .collect::<Result<_>>()?;
    let (min_hamming, worst_pair) = (0..count)
        .into_par_iter()
        .map(|a| {
            let mut best = (usize::MAX, (a, a));
            for b in (a + 1)..count {
                let h = words[a as usize]
                    .iter()
                    .zip(&words[b as usize])
                    .filter(|(x, y)| x != y)
                    .count();
                if h < best.0 {
                    best = (h, (a, b));
                }
            }
            best
        })
        .reduce(|| (usize::MAX, (u64::MAX, u64::MAX)), |x, y| x.min(y));
    let max_inner = (1..count)
        .map(|m| conj1_re_total_u64(m, params.n, params.length()) / params.length() as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BlockAudit {
        params: *params,
        min_hamming,
        worst_pair,
        max_inner,
        inner_product_bound: eta_from_inner(max_inner, params.kappa) * params.length() as f64,
    })
}
