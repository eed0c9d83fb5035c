//! Certifying `1 - δ_ℓ`, the largest real part of the averaged sum
//!
//! ```text
//! (1/ℓ) Σ_{m=0}^{ℓ-1} e( (2/3)^m z / 2^ℓ )      over odd z ∈ Z/2^ℓ.
//! ```
//!
//! Read backwards, the residues `(2/3)^m z` are a walk in the square-root
//! tree: start at `-1` (angle `1/2`) and at each step move to one of the two
//! square roots of the cube of the current point, angles `3t/2` and
//! `3t/2 + 1/2`. The `2^(ℓ-1)` walks of length `ℓ` correspond one to one with the
//! odd residues, the last angle of a walk being `z / 2^ℓ`.
//!
//! [`brute_delta`] evaluates every odd `z`. [`bb_delta`] searches the walk tree
//! depth first, dropping a node as soon as its real sum plus one per missing
//! term cannot beat the best complete walk, and carries the previous length's
//! best sum as a starting bound (extending the best walk by the root with
//! nonnegative real part never lowers the sum).

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::numeric::{
    inv3_mod_pow2, pow2, unit_point_u64, unit_re_u64, DyadicAngle, OddResidue, UnitPoint,
};
use crate::{Error, Result};

/// Largest `ℓ` accepted by [`brute_delta`].
pub const MAX_BRUTE_LEVEL: u32 = 26;

/// Default depth at which parallel searches split into independent subtrees.
pub const DEFAULT_SPLIT_DEPTH: u32 = 12;

/// One row of the `1 - δ_ℓ` table.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaRecord {
    pub ell: u32,
    /// Nodes expanded by the search, or residues evaluated by brute force.
    pub nodes: u64,
    /// Smallest odd `z` attaining the maximum; reported as `z / 2^ℓ`.
    pub worst_z: OddResidue,
    pub one_minus_delta: f64,
}

/// A node of the walk tree: real-and-imaginary sum of the points so far, the
/// number of points, and the angle of the last one.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchNode {
    pub partial_sum: Complex64,
    pub depth: u32,
    pub angle: DyadicAngle,
}

/// Knobs for [`bb_delta_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Fix the second point to `-i`, exploring one of each conjugate pair of walks.
    pub symmetry: bool,
    pub pruning: bool,
    /// Start each length with the previous length's best sum as the bound.
    pub carry_bound: bool,
    /// `1` runs the deterministic sequential search.
    pub workers: usize,
    pub split_depth: u32,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            symmetry: true,
            pruning: true,
            carry_bound: true,
            workers: 1,
            split_depth: DEFAULT_SPLIT_DEPTH,
        }
    }
}

impl SearchNode {
    /// The first node searched for walks of length `ell ≥ 2`.
    pub fn root(symmetry: bool) -> SearchNode {
        let first = DyadicAngle::half();
        let p = first.to_unit_point();
        let node = SearchNode {
            partial_sum: Complex64::new(p.re, p.im),
            depth: 1,
            angle: first,
        };
        if symmetry {
            node.child(DyadicAngle::new(3u32, 2))
        } else {
            node
        }
    }

    pub fn score(&self) -> f64 {
        self.partial_sum.re
    }

    /// The two children, the one with nonnegative real part first.
    pub fn children(&self) -> [SearchNode; 2] {
        let (a, b) = self.angle.halves_of_triple();
        let (first, second) = if a.has_negative_real_part() {
            (b, a)
        } else {
            (a, b)
        };
        [self.child(first), self.child(second)]
    }

    fn child(&self, angle: DyadicAngle) -> SearchNode {
        let p = angle.to_unit_point();
        SearchNode {
            partial_sum: self.partial_sum + Complex64::new(p.re, p.im),
            depth: self.depth + 1,
            angle,
        }
    }
}

/// Angle numerators as machine words or big integers.
trait Word: Clone + Send + Sync {
    fn from_big(n: &BigUint) -> Self;
    fn to_big(&self) -> BigUint;
    /// Children of the angle `self / 2^level`, at `level + 1`.
    fn halves(&self, level: u32) -> (Self, Self);
    fn point(&self, level: u32) -> UnitPoint;
    fn negative_real(&self, level: u32) -> bool;
    fn sector(&self, level: u32) -> bool;
}

impl Word for u128 {
    fn from_big(n: &BigUint) -> Self {
        n.to_u128().expect("numerator fits in u128")
    }

    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }

    #[inline]
    fn halves(&self, level: u32) -> (Self, Self) {
        let mask = (1u128 << (level + 1)) - 1;
        let a = self.wrapping_mul(3) & mask;
        (a, (a + (1u128 << level)) & mask)
    }

    #[inline]
    fn point(&self, level: u32) -> UnitPoint {
        if level <= 64 {
            unit_point_u64(*self as u64, level)
        } else {
            unit_point_u64((*self >> (level - 64)) as u64, 64)
        }
    }

    #[inline]
    fn negative_real(&self, level: u32) -> bool {
        if level < 2 {
            return level == 1 && *self != 0;
        }
        let quarter = 1u128 << (level - 2);
        *self > quarter && *self < 3 * quarter
    }

    fn sector(&self, level: u32) -> bool {
        // t in [-1/6, 1/3)
        let full = 1u128 << level;
        3 * *self < full || 6 * *self >= 5 * full
    }
}

impl Word for BigUint {
    fn from_big(n: &BigUint) -> Self {
        n.clone()
    }

    fn to_big(&self) -> BigUint {
        self.clone()
    }

    fn halves(&self, level: u32) -> (Self, Self) {
        let (a, b) = DyadicAngle::new(self.clone(), level).halves_of_triple();
        (a.numerator().clone(), b.numerator().clone())
    }

    fn point(&self, level: u32) -> UnitPoint {
        DyadicAngle::new(self.clone(), level).to_unit_point()
    }

    fn negative_real(&self, level: u32) -> bool {
        DyadicAngle::new(self.clone(), level).has_negative_real_part()
    }

    fn sector(&self, level: u32) -> bool {
        let full = pow2(level);
        self * 3u32 < full || self * 6u32 >= full * 5u32
    }
}

/// `(1/ℓ) Σ_{m<ℓ} e_{2^ℓ}((2/3)^m z)` with exact residues.
pub fn conj3_sum(z: &OddResidue) -> Complex64 {
    conj3_residues(z)
        .iter()
        .map(|r| Complex64::from(DyadicAngle::new(r.clone(), z.level()).to_unit_point()))
        .sum::<Complex64>()
        / z.level() as f64
}

/// The residues `(2·3^{-1})^m z mod 2^ℓ` for `m = 0..ℓ`.
pub fn conj3_residues(z: &OddResidue) -> Vec<BigUint> {
    let level = z.level();
    let modulus = pow2(level);
    let step = (inv3_mod_pow2(level) << 1usize) % &modulus;
    let mut r = z.value().clone();
    (0..level)
        .map(|_| {
            let current = r.clone();
            r = (&r * &step) % &modulus;
            current
        })
        .collect()
}

/// Real part of `ℓ · conj3_sum(z)` for `ℓ ≤ 63`, summed in the same order.
fn conj3_re_total_u64(z: u64, level: u32, step: u64) -> f64 {
    let mask = if level == 64 {
        u64::MAX
    } else {
        (1u64 << level) - 1
    };
    let mut r = z;
    let mut total = 0.0;
    for _ in 0..level {
        total += unit_re_u64(r, level);
        r = ((r as u128 * step as u128) as u64) & mask;
    }
    total
}

/// Reduction key: larger value wins, then smaller `z`.
fn better(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// `1 - δ_ℓ` by evaluating every odd residue.
pub fn brute_delta(ell: u32) -> Result<DeltaRecord> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ℓ must be at least 1".into()));
    }
    if ell > MAX_BRUTE_LEVEL {
        return Err(Error::ResourceLimit {
            what: "brute-force ℓ",
            value: ell as u64,
            limit: MAX_BRUTE_LEVEL as u64,
        });
    }
    let modulus = 1u64 << ell;
    let step = ((inv3_mod_pow2(ell) << 1usize) % pow2(ell))
        .to_u64()
        .expect("step below 2^26");
    let count = modulus / 2;
    const CHUNK: u64 = 1 << 12;
    let (total, z) = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(count);
            (lo..hi)
                .map(|i| {
                    let z = 2 * i + 1;
                    (conj3_re_total_u64(z, ell, step), z)
                })
                .fold((f64::NEG_INFINITY, u64::MAX), better)
        })
        .reduce(|| (f64::NEG_INFINITY, u64::MAX), better);
    Ok(DeltaRecord {
        ell,
        nodes: count,
        worst_z: OddResidue::from_reduced(BigUint::from(z), ell),
        one_minus_delta: total / ell as f64,
    })
}

/// Best complete walk seen by one search task.
#[derive(Clone, Debug)]
struct Best<W> {
    total: f64,
    /// `min(z, 2^ℓ - z)`, identical for a walk and its conjugate.
    z: Option<W>,
}

impl<W: Word> Best<W> {
    fn none() -> Self {
        Best {
            total: f64::NEG_INFINITY,
            z: None,
        }
    }

    fn offer(&mut self, total: f64, z: W, ell: u32) {
        let z = normalize(z, ell);
        let wins = match &self.z {
            None => true,
            Some(current) => {
                total > self.total || (total == self.total && z.to_big() < current.to_big())
            }
        };
        if wins {
            self.total = total;
            self.z = Some(z);
        }
    }

    fn merge(mut self, other: Best<W>, ell: u32) -> Self {
        if let Some(z) = other.z {
            self.offer(other.total, z, ell);
        }
        self
    }
}

fn normalize<W: Word>(z: W, ell: u32) -> W {
    let big = z.to_big();
    let mirror = pow2(ell) - &big;
    if mirror < big {
        W::from_big(&mirror)
    } else {
        z
    }
}

/// Shared incumbent for pruning, stored as the bits of an `f64` that only grows.
struct Incumbent(AtomicU64);

impl Incumbent {
    fn new(value: f64) -> Self {
        Incumbent(AtomicU64::new(value.to_bits()))
    }

    fn get(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    fn raise(&self, value: f64) {
        let mut current = self.0.load(Ordering::Relaxed);
        while f64::from_bits(current) < value {
            match self.0.compare_exchange_weak(
                current,
                value.to_bits(),
                Ordering::Relaxed,
                Ordering::Relaxed,
            ) {
                Ok(_) => break,
                Err(actual) => current = actual,
            }
        }
    }
}

struct Search<'a> {
    ell: u32,
    pruning: bool,
    incumbent: &'a Incumbent,
}

impl Search<'_> {
    /// Depth-first search below a node; returns the number of nodes expanded.
    fn branch<W: Word>(&self, sum: Complex64, depth: u32, angle: W, best: &mut Best<W>) -> u64 {
        if depth == self.ell {
            if sum.re >= best.total {
                best.offer(sum.re, angle, self.ell);
                self.incumbent.raise(sum.re);
            }
            return 1;
        }
        if self.pruning && sum.re + (self.ell - depth) as f64 <= self.incumbent.get() {
            return 1;
        }
        let (a, b) = angle.halves(depth);
        let (first, second) = if a.negative_real(depth + 1) {
            (b, a)
        } else {
            (a, b)
        };
        let mut nodes = 1;
        for next in [first, second] {
            let p = next.point(depth + 1);
            nodes += self.branch(sum + Complex64::new(p.re, p.im), depth + 1, next, best);
        }
        nodes
    }
}

/// Nodes down to a fixed depth, expanded without pruning, plus their count.
fn frontier<W: Word>(
    sum: Complex64,
    depth: u32,
    angle: W,
    stop: u32,
) -> (Vec<(Complex64, u32, W)>, u64) {
    let mut nodes = vec![(sum, depth, angle)];
    let mut expanded = 0;
    while nodes[0].1 < stop {
        expanded += nodes.len() as u64;
        nodes = nodes
            .into_iter()
            .flat_map(|(s, d, t)| {
                let (a, b) = t.halves(d);
                let (first, second) = if a.negative_real(d + 1) {
                    (b, a)
                } else {
                    (a, b)
                };
                [first, second].map(|next| {
                    let p = next.point(d + 1);
                    (s + Complex64::new(p.re, p.im), d + 1, next)
                })
            })
            .collect();
    }
    (nodes, expanded)
}

fn search_length<W: Word>(ell: u32, options: &SearchOptions, bound: f64) -> (f64, W, u64) {
    let root = SearchNode::root(options.symmetry);
    let sum = root.partial_sum;
    let angle = W::from_big(root.angle.numerator());
    let incumbent = Incumbent::new(bound);
    let search = Search {
        ell,
        pruning: options.pruning,
        incumbent: &incumbent,
    };

    let (best, nodes) = if options.workers <= 1 || options.split_depth >= ell {
        let mut best = Best::none();
        let nodes = search.branch(sum, root.depth, angle, &mut best);
        (best, nodes)
    } else {
        let stop = options.split_depth.max(root.depth);
        let (tasks, expanded) = frontier(sum, root.depth, angle, stop);
        let (best, nodes) = tasks
            .into_par_iter()
            .map(|(s, d, t)| {
                let mut best = Best::none();
                let nodes = search.branch(s, d, t, &mut best);
                (best, nodes)
            })
            .reduce(
                || (Best::none(), 0),
                |(a, na), (b, nb)| (a.merge(b, ell), na + nb),
            );
        (best, nodes + expanded)
    };

    match best.z {
        Some(z) => (best.total, z, nodes),
        None => {
            // the carried bound cut every walk; search again from scratch
            let (total, z, more) = search_length::<W>(ell, options, f64::NEG_INFINITY);
            (total, z, nodes + more)
        }
    }
}

fn bb_records<W: Word>(
    ell_max: u32,
    options: &SearchOptions,
    mut sink: impl FnMut(&DeltaRecord) -> Result<()>,
) -> Result<Vec<DeltaRecord>> {
    let mut records = Vec::with_capacity(ell_max as usize);
    let first = DeltaRecord {
        ell: 1,
        nodes: 1,
        worst_z: OddResidue::from_reduced(BigUint::one(), 1),
        one_minus_delta: -1.0,
    };
    sink(&first)?;
    records.push(first);
    let mut carried = -1.0;
    for ell in 2..=ell_max {
        let bound = if options.carry_bound {
            carried
        } else {
            f64::NEG_INFINITY
        };
        let (total, z, nodes) = search_length::<W>(ell, options, bound);
        carried = total;
        let record = DeltaRecord {
            ell,
            nodes,
            worst_z: OddResidue::from_reduced(z.to_big(), ell),
            one_minus_delta: total / ell as f64,
        };
        sink(&record)?;
        records.push(record);
    }
    Ok(records)
}

/// `1 - δ_ℓ` for `ℓ = 1..=ℓ_max` by branch and bound with default options.
pub fn bb_delta(ell_max: u32) -> Result<Vec<DeltaRecord>> {
    bb_delta_with(ell_max, &SearchOptions::default(), |_| Ok(()))
}

/// Branch and bound with explicit options; `sink` sees each record as soon as
/// its length is finished.
pub fn bb_delta_with(
    ell_max: u32,
    options: &SearchOptions,
    sink: impl FnMut(&DeltaRecord) -> Result<()>,
) -> Result<Vec<DeltaRecord>> {
    if ell_max == 0 {
        return Err(Error::InvalidParameter("ℓ_max must be at least 1".into()));
    }
    if options.workers == 0 {
        return Err(Error::InvalidParameter(
            "worker count must be positive".into(),
        ));
    }
    if ell_max < 127 {
        bb_records::<u128>(ell_max, options, sink)
    } else {
        bb_records::<BigUint>(ell_max, options, sink)
    }
}

/// Average real part of the walk that always takes the root picked by `choose`.
fn greedy(ell: u32, choose: impl Fn(&BigUint, &BigUint, u32) -> bool) -> Result<f64> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ℓ must be at least 1".into()));
    }
    let mut angle = BigUint::one();
    let mut total = -1.0;
    for level in 1..ell {
        let (a, b) = angle.halves(level);
        angle = if choose(&a, &b, level + 1) { a } else { b };
        total += angle.point(level + 1).re;
    }
    Ok(total / ell as f64)
}

/// Greedy walk through the root with positive real part (positive imaginary
/// part when both lie on the imaginary axis).
pub fn greedy_positive_re(ell: u32) -> Result<f64> {
    greedy(ell, |a, b, level| {
        if a.negative_real(level) {
            false
        } else if b.negative_real(level) {
            true
        } else {
            // both roots are ±i
            *a == pow2(level - 2)
        }
    })
}

/// Greedy walk through the root with argument in `[-π/3, 2π/3)`.
pub fn greedy_sector(ell: u32) -> Result<f64> {
    greedy(ell, |a, _, level| a.sector(level))
}

/// Smallest alphabet size `κ > 2π / arccos(sup_value)`.
pub fn alphabet_bound(sup_value: f64) -> Result<u32> {
    if sup_value.is_nan() || sup_value >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "no finite alphabet is certified by a supremum of {sup_value}"
        )));
    }
    if sup_value <= -1.0 {
        return Err(Error::InvalidParameter(format!(
            "supremum {sup_value} is outside (-1, 1)"
        )));
    }
    let threshold = std::f64::consts::TAU / sup_value.acos();
    Ok(threshold.floor() as u32 + 1)
}

/// Least-squares slope of `log2(nodes)` against `ℓ`.
pub fn node_growth_exponent(records: &[DeltaRecord]) -> f64 {
    let n = records.len() as f64;
    let xs: Vec<f64> = records.iter().map(|r| r.ell as f64).collect();
    let ys: Vec<f64> = records.iter().map(|r| (r.nodes as f64).log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// The angles visited by the walk ending at `z`, first point first.
pub fn walk_to(z: &OddResidue) -> Vec<DyadicAngle> {
    let level = z.level();
    let mut residues = conj3_residues(z);
    residues.reverse();
    residues
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let k = i as u32 + 1;
            DyadicAngle::new(r >> (level - k) as usize, k)
        })
        .collect()
}

impl DeltaRecord {
    /// `z / 2^ℓ` as a float.
    pub fn worst_z_fraction(&self) -> f64 {
        self.worst_z.as_angle().turns()
    }
}
