//! The tree code `α = γ ∘ β` and its metrics.
//!
//! `β` sends a path `x = (x_1, …, x_k)` to the point
//!
//! ```text
//! β(x) = e( S_k(x) / 2^k ),   S_k(x) = Σ_j 2^(j-1) 3^(k-j) x_j
//! ```
//!
//! so that `β(x)^2 = β(parent)^3` and the two children of a node are antipodal.
//! The parent's argument is carried as the exact integer `S_(k-1)` rather than
//! being folded into `[0, 1)` before multiplying by `3/2`; with that choice the
//! inner product `Σ_k β(x_≤k) β(x'_≤k)†` of two paths only depends on the
//! difference sequence `y = x - x'` after their divergence point.
//!
//! `γ` rounds a unit point to the index of the sector of width `2π/κ` centred
//! on `e(ℓ/κ)`, lower bound inclusive.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::numeric::{
    inv3_mod_pow2, pow2, reduce_signed, unit_point_u64, DyadicAngle, OddResidue, UnitPoint,
};
use crate::{Error, Result};

/// Largest depth accepted by [`exhaustive_min_distance`].
pub const MAX_AUDIT_DEPTH: usize = 14;

/// Tolerance used by [`gamma`] to snap a point onto a sector boundary.
const BOUNDARY_SNAP: f64 = 1e-12;

/// A vertex of the binary tree, written as bits from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathWord {
    bits: Vec<u8>,
}

impl PathWord {
    pub fn root() -> Self {
        PathWord { bits: Vec::new() }
    }

    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!(
                "path bit {b} is not 0 or 1"
            )));
        }
        Ok(PathWord { bits })
    }

    /// The path of length `len` whose bits, root first, spell `index` in binary.
    pub fn from_index(index: u64, len: usize) -> Self {
        let bits = (0..len).rev().map(|i| ((index >> i) & 1) as u8).collect();
        PathWord { bits }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn prefix(&self, len: usize) -> PathWord {
        PathWord {
            bits: self.bits[..len].to_vec(),
        }
    }

    pub fn child(&self, bit: u8) -> PathWord {
        let mut bits = self.bits.clone();
        bits.push(bit);
        PathWord { bits }
    }

    pub fn concat(&self, other: &PathWord) -> PathWord {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        PathWord { bits }
    }
}

impl fmt::Display for PathWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for PathWord {
    type Err = Error;

    /// Parses a string of `0`/`1`; the empty string and `ε` denote the root.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "ε" {
            return Ok(PathWord::root());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidParameter(format!(
                    "invalid character {other:?} in bit string {s:?}"
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(|bits| PathWord { bits })
    }
}

/// A word over the alphabet `{0, …, κ-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolWord {
    symbols: Vec<u32>,
    kappa: u32,
}

impl SymbolWord {
    pub fn new(symbols: Vec<u32>, kappa: u32) -> Result<Self> {
        check_kappa(kappa)?;
        if let Some(s) = symbols.iter().find(|&&s| s >= kappa) {
            return Err(Error::InvalidParameter(format!(
                "symbol {s} is not below κ = {kappa}"
            )));
        }
        Ok(SymbolWord { symbols, kappa })
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl fmt::Display for SymbolWord {
    /// Comma separated symbols.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Difference `y_j = x_j - x'_j` of two paths after they diverge, with `y_1 = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiffSeq {
    y: Vec<i8>,
}

impl DiffSeq {
    pub fn new(y: Vec<i8>) -> Result<Self> {
        match y.first() {
            Some(1) => {}
            Some(first) => {
                return Err(Error::InvalidParameter(format!(
                    "difference sequences start with 1, got {first}"
                )))
            }
            None => return Err(Error::InvalidParameter("empty difference sequence".into())),
        }
        if let Some(v) = y.iter().find(|v| !(-1..=1).contains(*v)) {
            return Err(Error::InvalidParameter(format!(
                "difference entry {v} not in {{-1,0,1}}"
            )));
        }
        Ok(DiffSeq { y })
    }

    pub fn values(&self) -> &[i8] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Every difference sequence of length `len`, in lexicographic order.
    pub fn all(len: usize) -> impl Iterator<Item = DiffSeq> {
        assert!(len >= 1);
        let count = 3u64.pow(len as u32 - 1);
        (0..count).map(move |mut code| {
            let mut y = vec![0i8; len];
            y[0] = 1;
            for slot in y[1..].iter_mut().rev() {
                *slot = (code % 3) as i8 - 1;
                code /= 3;
            }
            DiffSeq { y }
        })
    }
}

fn check_kappa(kappa: u32) -> Result<()> {
    if kappa < 2 {
        return Err(Error::InvalidParameter(format!(
            "alphabet size κ = {kappa} must be ≥ 2"
        )));
    }
    Ok(())
}

/// `S_k(x) = Σ_j 2^(j-1) 3^(k-j) x_j` for `k = 1..=n`, as exact integers.
fn lifted_sums(path: &PathWord) -> Vec<BigUint> {
    let mut s = BigUint::zero();
    path.bits
        .iter()
        .enumerate()
        .map(|(i, &bit)| {
            s = &s * 3u32;
            if bit == 1 {
                s += pow2(i as u32);
            }
            s.clone()
        })
        .collect()
}

/// The angle of `β(x)`.
pub fn beta(path: &PathWord) -> DyadicAngle {
    match lifted_sums(path).pop() {
        Some(s) => DyadicAngle::new(s, path.len() as u32),
        None => DyadicAngle::zero(0),
    }
}

/// Angles of `β` along the path, levels `1..=n`.
pub fn beta_prefixes(path: &PathWord) -> Vec<DyadicAngle> {
    lifted_sums(path)
        .into_iter()
        .enumerate()
        .map(|(i, s)| DyadicAngle::new(s, i as u32 + 1))
        .collect()
}

/// `β` with the parent argument folded into `[0, 1)` before every step.
///
/// Same squaring law and the same set of points per level as [`beta`], but
/// children are labelled differently, and inner products of diverging paths
/// then depend on their common prefix.
pub fn beta_reduced(path: &PathWord) -> DyadicAngle {
    path.bits.iter().fold(DyadicAngle::zero(0), |parent, &bit| {
        let (even, odd) = parent.halves_of_triple();
        if bit == 1 {
            odd
        } else {
            even
        }
    })
}

/// Sector index of an exact angle: `round_half_up(κ t) mod κ`.
pub fn gamma_angle(t: &DyadicAngle, kappa: u32) -> u32 {
    let level = t.level();
    if level == 0 {
        return 0;
    }
    let scaled = t.numerator() * kappa + pow2(level - 1);
    let sector = (scaled >> level as usize) % kappa;
    sector.to_u32().expect("sector index is below κ")
}

/// Sector index of a unit point.
///
/// Points within `1e-12` (in units of sectors) of a boundary are treated as
/// lying on it, so exact dyadic inputs at levels up to about 38 agree with
/// [`gamma_angle`].
pub fn gamma(z: UnitPoint, kappa: u32) -> Result<u32> {
    check_kappa(kappa)?;
    if (z.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "γ needs a unit point, got modulus {}",
            z.norm()
        )));
    }
    let mut x = kappa as f64 * z.turns();
    let boundary = (x - 0.5).round() + 0.5;
    if (x - boundary).abs() <= BOUNDARY_SNAP {
        x = boundary;
    }
    let sector = (x + 0.5).floor() as u64 % kappa as u64;
    Ok(sector as u32)
}

/// `α*(x)`: the labels on the path from the root to `x`.
pub fn alpha_star(path: &PathWord, kappa: u32) -> Result<SymbolWord> {
    check_kappa(kappa)?;
    let symbols = beta_prefixes(path)
        .iter()
        .map(|t| gamma_angle(t, kappa))
        .collect();
    Ok(SymbolWord { symbols, kappa })
}

/// `n - (length of the longest common prefix)`.
pub fn tree_distance(x: &PathWord, y: &PathWord) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter(format!(
            "tree distance needs paths of equal length, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let common = x
        .bits
        .iter()
        .zip(&y.bits)
        .take_while(|(a, b)| a == b)
        .count();
    Ok(x.len() - common)
}

pub fn hamming(s: &SymbolWord, t: &SymbolWord) -> Result<usize> {
    if s.len() != t.len() {
        return Err(Error::InvalidParameter(format!(
            "Hamming distance needs words of equal length, got {} and {}",
            s.len(),
            t.len()
        )));
    }
    if s.kappa != t.kappa {
        return Err(Error::InvalidParameter(format!(
            "words over different alphabets (κ = {} and {})",
            s.kappa, t.kappa
        )));
    }
    Ok(s.symbols
        .iter()
        .zip(&t.symbols)
        .filter(|(a, b)| a != b)
        .count())
}

/// The fraction `η` with `d_Σ(γ(z), γ(z')) ≥ η n'` for unit vectors `z`, `z'`.
pub fn eta_bound(z: &[UnitPoint], z_other: &[UnitPoint], kappa: u32) -> Result<f64> {
    check_kappa(kappa)?;
    if z.len() != z_other.len() {
        return Err(Error::InvalidParameter(format!(
            "η needs vectors of equal length, got {} and {}",
            z.len(),
            z_other.len()
        )));
    }
    if z.is_empty() {
        return Err(Error::InvalidParameter(
            "η needs at least one coordinate".into(),
        ));
    }
    if let Some(p) = z
        .iter()
        .chain(z_other)
        .find(|p| (p.norm() - 1.0).abs() > 1e-9)
    {
        return Err(Error::InvalidParameter(format!("non-unit point {p:?}")));
    }
    let inner: f64 = z
        .iter()
        .zip(z_other)
        .map(|(a, b)| a.re * b.re + a.im * b.im)
        .sum();
    Ok(eta_from_inner(inner / z.len() as f64, kappa))
}

/// `η` for a given mean real inner product.
pub fn eta_from_inner(mean_inner: f64, kappa: u32) -> f64 {
    let c = (std::f64::consts::TAU / kappa as f64).cos();
    (c - mean_inner) / (1.0 + c)
}

/// Exact partial sums `Σ_{j≤i} 2^(j-1) 3^(i-j) y_j` for `i = 1..=ℓ`.
fn diff_sums(y: &DiffSeq) -> Vec<BigInt> {
    let mut s = BigInt::zero();
    y.y.iter()
        .enumerate()
        .map(|(i, &v)| {
            s = &s * 3 + BigInt::from(v) * BigInt::from(pow2(i as u32));
            s.clone()
        })
        .collect()
}

/// `(1/ℓ) Σ_i e( (1/2) Σ_{j≤i} (3/2)^(i-j) y_j )`, each exponent held exactly.
pub fn divergent_pair_sum(y: &DiffSeq) -> Complex64 {
    let terms = diff_sums(y);
    let total: Complex64 = terms
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let level = i as u32 + 1;
            Complex64::from(DyadicAngle::new(reduce_signed(s, level), level).to_unit_point())
        })
        .sum();
    total / y.len() as f64
}

/// `z = Σ_j 2^(j-1) 3^(ℓ-j) y_j mod 2^ℓ`.
pub fn y_to_z(y: &DiffSeq) -> OddResidue {
    let level = y.len() as u32;
    let s = diff_sums(y)
        .pop()
        .expect("difference sequences are nonempty");
    OddResidue::from_reduced(reduce_signed(&s, level), level)
}

/// A difference sequence with `y_to_z(y) = z`.
///
/// Built one level at a time: the residue at level `k` is `3^-(ℓ-k) z mod 2^k`,
/// and `y_k` is the first of `0, 1, -1` that extends the partial sum to it.
pub fn z_to_y(z: &OddResidue) -> DiffSeq {
    let level = z.level();
    let inv3 = BigInt::from(inv3_mod_pow2(level));
    let modulus = BigInt::from(pow2(level));
    // targets[k-1] = 3^-(ℓ-k) z, kept mod 2^ℓ and compared mod 2^k
    let mut targets = Vec::with_capacity(level as usize);
    let mut t = BigInt::from(z.value().clone());
    for _ in 0..level {
        targets.push(t.clone());
        t = (&t * &inv3) % &modulus;
    }
    targets.reverse();

    let mut y = Vec::with_capacity(level as usize);
    let mut s = BigInt::zero();
    for (k, target) in targets.iter().enumerate() {
        let level_k = k as u32 + 1;
        let target = reduce_signed(target, level_k);
        let step = BigInt::from(pow2(k as u32));
        let candidates: &[i8] = if k == 0 { &[1] } else { &[0, 1, -1] };
        let choice = candidates
            .iter()
            .copied()
            .find(|&c| reduce_signed(&(&s * 3 + &step * c), level_k) == target)
            .expect("one of 0, 1, -1 always extends an odd residue");
        s = &s * 3 + &step * choice;
        y.push(choice);
    }
    DiffSeq { y }
}

/// A pair of equal-length paths with their distances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairWitness {
    pub x: PathWord,
    pub x_other: PathWord,
    pub hamming: usize,
    pub tree_distance: usize,
}

impl PairWitness {
    pub fn fraction(&self) -> f64 {
        self.hamming as f64 / self.tree_distance as f64
    }
}

/// Worst case among pairs at tree distance `ℓ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceRow {
    pub tree_distance: usize,
    /// Minimum Hamming distance over all pairs with this tree distance.
    pub min_hamming: usize,
    /// Largest `Re` of [`divergent_pair_sum`] over all `y` of this length.
    pub max_mean_inner: f64,
    /// Inner-product lower bound `η ℓ` evaluated at `max_mean_inner`.
    pub inner_product_bound: f64,
}

/// Result of [`exhaustive_min_distance`].
#[derive(Clone, Debug)]
pub struct DistanceAudit {
    pub depth: usize,
    pub kappa: u32,
    /// Pair minimising `d_Σ / d_T` over all levels.
    pub worst: PairWitness,
    /// Same minimum restricted to pairs that diverge at the root.
    pub worst_root_divergent: PairWitness,
    pub by_distance: Vec<DistanceRow>,
    /// Pairs whose Hamming distance falls below their own inner-product bound.
    pub pair_bound_violations: u64,
}

impl DistanceAudit {
    pub fn min_fraction(&self) -> f64 {
        self.worst.fraction()
    }

    /// Whether the root-divergent pairs already attain the overall minimum.
    pub fn root_reduction_agrees(&self) -> bool {
        self.worst.hamming * self.worst_root_divergent.tree_distance
            == self.worst_root_divergent.hamming * self.worst.tree_distance
    }
}

/// Symbol and point of `β` for every vertex of one level.
struct LevelTable {
    symbols: Vec<u8>,
    points: Vec<UnitPoint>,
}

fn level_tables(depth: usize, kappa: u32) -> Vec<LevelTable> {
    // lifted sums stay below 3^depth < 2^23
    let mut sums = vec![0u64];
    let mut tables = Vec::with_capacity(depth);
    for k in 1..=depth {
        let half = 1u64 << (k - 1);
        sums = sums.iter().flat_map(|&s| [3 * s, 3 * s + half]).collect();
        let mask = (1u64 << k) - 1;
        let symbols = sums
            .iter()
            .map(|&s| {
                let angle = DyadicAngle::new(s & mask, k as u32);
                gamma_angle(&angle, kappa) as u8
            })
            .collect();
        let points = sums
            .iter()
            .map(|&s| unit_point_u64(s & mask, k as u32))
            .collect();
        tables.push(LevelTable { symbols, points });
    }
    tables
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    hamming: usize,
    tree_distance: usize,
    level: usize,
    x: u64,
    x_other: u64,
}

impl Candidate {
    /// Smaller fraction first, then the lexicographically smallest pair.
    fn cmp_key(&self, other: &Candidate) -> Ordering {
        (self.hamming * other.tree_distance)
            .cmp(&(other.hamming * self.tree_distance))
            .then(self.level.cmp(&other.level))
            .then(self.x.cmp(&other.x))
            .then(self.x_other.cmp(&other.x_other))
    }

    fn better(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
        match (a, b) {
            (Some(a), Some(b)) => Some(if b.cmp_key(&a) == Ordering::Less {
                b
            } else {
                a
            }),
            (a, None) => a,
            (None, b) => b,
        }
    }

    fn witness(&self) -> PairWitness {
        PairWitness {
            x: PathWord::from_index(self.x, self.level),
            x_other: PathWord::from_index(self.x_other, self.level),
            hamming: self.hamming,
            tree_distance: self.tree_distance,
        }
    }
}

#[derive(Clone, Debug)]
struct ScanAccumulator {
    worst: Option<Candidate>,
    worst_root: Option<Candidate>,
    min_hamming: Vec<usize>,
    violations: u64,
}

impl ScanAccumulator {
    fn new(depth: usize) -> Self {
        ScanAccumulator {
            worst: None,
            worst_root: None,
            min_hamming: vec![usize::MAX; depth + 1],
            violations: 0,
        }
    }

    fn merge(mut self, other: ScanAccumulator) -> Self {
        self.worst = Candidate::better(self.worst, other.worst);
        self.worst_root = Candidate::better(self.worst_root, other.worst_root);
        for (a, b) in self.min_hamming.iter_mut().zip(other.min_hamming) {
            *a = (*a).min(b);
        }
        self.violations += other.violations;
        self
    }
}

/// Largest `Re` of [`divergent_pair_sum`] over all `y` of each length `1..=depth`.
pub fn max_divergent_inner(depth: usize) -> Vec<f64> {
    (1..=depth)
        .map(|len| {
            DiffSeq::all(len)
                .map(|y| divergent_pair_sum(&y).re)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Minimum fractional distance `d_Σ(α*(x), α*(x')) / d_T(x, x')` over all levels
/// `m ≤ n` and all pairs `x ≠ x'` in `L_m`, by scanning every pair.
///
/// Alongside the minimum the audit reports the minimum over pairs diverging at
/// the root, the minimum Hamming distance per tree distance next to the
/// inner-product bound computed from all difference sequences, and the number
/// of pairs whose Hamming distance is below the bound from their own inner
/// product (always zero).
pub fn exhaustive_min_distance(depth: usize, kappa: u32) -> Result<DistanceAudit> {
    check_kappa(kappa)?;
    if depth == 0 {
        return Err(Error::InvalidParameter(
            "audit depth must be at least 1".into(),
        ));
    }
    if depth > MAX_AUDIT_DEPTH {
        return Err(Error::ResourceLimit {
            what: "audit depth",
            value: depth as u64,
            limit: MAX_AUDIT_DEPTH as u64,
        });
    }
    if kappa > u8::MAX as u32 {
        return Err(Error::ResourceLimit {
            what: "alphabet size for the audit",
            value: kappa as u64,
            limit: u8::MAX as u64,
        });
    }
    let tables = level_tables(depth, kappa);
    let cos_k = (std::f64::consts::TAU / kappa as f64).cos();

    let acc = (1..=depth)
        .flat_map(|level| (0..(1u64 << level)).map(move |x| (level, x)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .fold(
            || ScanAccumulator::new(depth),
            |mut acc, (level, x)| {
                for x_other in (x + 1)..(1u64 << level) {
                    let tree_distance = (64 - (x ^ x_other).leading_zeros()) as usize;
                    let mut hamming = 0;
                    let mut inner = 0.0;
                    for k in (level - tree_distance + 1)..=level {
                        let table = &tables[k - 1];
                        let (a, b) = (
                            (x >> (level - k)) as usize,
                            (x_other >> (level - k)) as usize,
                        );
                        if table.symbols[a] != table.symbols[b] {
                            hamming += 1;
                        }
                        let (p, q) = (table.points[a], table.points[b]);
                        inner += p.re * q.re + p.im * q.im;
                    }
                    let bound = (cos_k - inner / tree_distance as f64) / (1.0 + cos_k)
                        * tree_distance as f64;
                    if (hamming as f64) < bound - 1e-9 {
                        acc.violations += 1;
                    }
                    let slot = &mut acc.min_hamming[tree_distance];
                    *slot = (*slot).min(hamming);
                    let candidate = Some(Candidate {
                        hamming,
                        tree_distance,
                        level,
                        x,
                        x_other,
                    });
                    acc.worst = Candidate::better(acc.worst, candidate);
                    if tree_distance == level {
                        acc.worst_root = Candidate::better(acc.worst_root, candidate);
                    }
                }
                acc
            },
        )
        .reduce(|| ScanAccumulator::new(depth), ScanAccumulator::merge);

    let by_distance = max_divergent_inner(depth)
        .into_iter()
        .enumerate()
        .map(|(i, max_mean_inner)| {
            let d = i + 1;
            DistanceRow {
                tree_distance: d,
                min_hamming: acc.min_hamming[d],
                max_mean_inner,
                inner_product_bound: eta_from_inner(max_mean_inner, kappa) * d as f64,
            }
        })
        .collect();

    Ok(DistanceAudit {
        depth,
        kappa,
        worst: acc.worst.expect("level 1 has a pair").witness(),
        worst_root_divergent: acc.worst_root.expect("level 1 has a pair").witness(),
        by_distance,
        pair_bound_violations: acc.violations,
    })
}
