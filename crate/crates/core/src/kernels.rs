//! Kernels `k: [0,1]² → [0,∞)` and the scaling `λ_n`.
//!
//! The connection probability of an IRG is `k(W_i, W_j) / λ_n`. Every kernel
//! carries a declared diagonal maximizer `(m, k(m,m))`; the couplings need it
//! for `p_max`, and [`validate_kernel`] cross-checks it on a grid.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::math;

/// Tolerance used by the validation pass/fail flags.
pub const VALIDATION_TOL: f64 = 1e-12;
/// Default oscillation threshold for the continuity proxy.
pub const DEFAULT_CONTINUITY_THRESHOLD: f64 = 0.05;
/// Box half-widths around `(m,m)` for the continuity proxy.
pub const CONTINUITY_HALF_WIDTHS: [f64; 4] = [0.1, 0.05, 0.01, 0.005];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("kernel parameter {name} = {value} out of range")]
    ValueOutOfRange { name: &'static str, value: f64 },
    #[error("block matrix is not symmetric at ({row}, {col})")]
    AsymmetricBlockMatrix { row: usize, col: usize },
    #[error("block matrix must be square with {expected} columns, row {row} has {found}")]
    NonSquareBlockMatrix {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("block breakpoints must be {expected} strictly increasing values in (0,1)")]
    InvalidBreakpoints { expected: usize },
    #[error("probability {value} exceeds one (k = {kernel_value}, lambda_n = {lambda})")]
    ProbabilityExceedsOne {
        value: f64,
        kernel_value: f64,
        lambda: f64,
    },
    #[error("empty region [{lo}, {hi}]")]
    EmptyRegion { lo: f64, hi: f64 },
    #[error("scaling sequence must be positive, got {value} at n = {n}")]
    NonPositiveScaling { value: f64, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    Constant,
    Rank1,
    Block,
    Bump,
    Custom,
}

impl KernelFamily {
    pub fn tag(self) -> &'static str {
        match self {
            KernelFamily::Constant => "constant",
            KernelFamily::Rank1 => "rank1",
            KernelFamily::Block => "block",
            KernelFamily::Bump => "bump",
            KernelFamily::Custom => "custom",
        }
    }
}

pub type BivariateFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type UnivariateFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Constant(f64),
    Rank1(UnivariateFn),
    Block {
        values: Vec<f64>,
        size: usize,
        breakpoints: Vec<f64>,
    },
    Bump {
        m: f64,
        peak: f64,
        width: f64,
    },
    Custom(BivariateFn),
}

/// A symmetric kernel with its declared diagonal maximizer.
#[derive(Clone)]
pub struct Kernel {
    shape: Shape,
    max_point: f64,
    max_value: f64,
    label: String,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("label", &self.label)
            .field("declared_max", &(self.max_point, self.max_value))
            .finish()
    }
}

fn check_nonneg(name: &'static str, value: f64) -> Result<(), KernelError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(KernelError::ValueOutOfRange { name, value })
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<(), KernelError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(KernelError::ValueOutOfRange { name, value })
    }
}

impl Kernel {
    /// `k ≡ p`. The maximizer is taken at `m = 0.5`.
    pub fn constant(p: f64) -> Result<Self, KernelError> {
        check_nonneg("p", p)?;
        Ok(Self {
            shape: Shape::Constant(p),
            max_point: 0.5,
            max_value: p,
            label: format!("constant(p={p})"),
        })
    }

    /// Symmetric rank-1 kernel `g(x) g(y)`; `m` is the declared argmax of `g`.
    pub fn rank1(g: UnivariateFn, m: f64, label: &str) -> Result<Self, KernelError> {
        check_unit("m", m)?;
        let gm = g(m);
        check_nonneg("g(m)", gm)?;
        Ok(Self {
            shape: Shape::Rank1(g),
            max_point: m,
            max_value: gm * gm,
            label: format!("rank1({label}, m={m})"),
        })
    }

    /// Stochastic block model. `grid` is a symmetric `B×B` matrix and
    /// `breakpoints` the `B−1` interior block boundaries. Block `b` covers
    /// `[t_b, t_{b+1})`; the last block also contains 1.
    pub fn block(grid: &[Vec<f64>], breakpoints: &[f64]) -> Result<Self, KernelError> {
        let size = grid.len();
        if size == 0 {
            return Err(KernelError::NonSquareBlockMatrix {
                row: 0,
                expected: 1,
                found: 0,
            });
        }
        for (row, r) in grid.iter().enumerate() {
            if r.len() != size {
                return Err(KernelError::NonSquareBlockMatrix {
                    row,
                    expected: size,
                    found: r.len(),
                });
            }
            for &v in r {
                check_nonneg("block value", v)?;
            }
        }
        for (a, row) in grid.iter().enumerate() {
            for b in a + 1..size {
                if row[b] != grid[b][a] {
                    return Err(KernelError::AsymmetricBlockMatrix { row: a, col: b });
                }
            }
        }
        let ok = breakpoints.len() == size - 1
            && breakpoints.iter().all(|&t| t > 0.0 && t < 1.0)
            && breakpoints.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(KernelError::InvalidBreakpoints { expected: size - 1 });
        }
        let mut best = 0;
        for b in 1..size {
            if grid[b][b] > grid[best][best] {
                best = b;
            }
        }
        let left = if best == 0 {
            0.0
        } else {
            breakpoints[best - 1]
        };
        let right = if best == size - 1 {
            1.0
        } else {
            breakpoints[best]
        };
        Ok(Self {
            shape: Shape::Block {
                values: grid.iter().flatten().copied().collect(),
                size,
                breakpoints: breakpoints.to_vec(),
            },
            max_point: 0.5 * (left + right),
            max_value: grid[best][best],
            label: format!("block(size={size}, breakpoints={breakpoints:?}, grid={grid:?})"),
        })
    }

    /// Block kernel with `B` equal-width blocks.
    pub fn block_uniform(grid: &[Vec<f64>]) -> Result<Self, KernelError> {
        let size = grid.len().max(1);
        let breaks: Vec<f64> = (1..size).map(|b| b as f64 / size as f64).collect();
        Self::block(grid, &breaks)
    }

    /// `peak · exp(−((x−m)² + (y−m)²) / width²)`.
    pub fn bump(m: f64, peak: f64, width: f64) -> Result<Self, KernelError> {
        check_unit("m", m)?;
        check_nonneg("peak", peak)?;
        if !(width.is_finite() && width > 0.0) {
            return Err(KernelError::ValueOutOfRange {
                name: "width",
                value: width,
            });
        }
        Ok(Self {
            shape: Shape::Bump { m, peak, width },
            max_point: m,
            max_value: peak,
            label: format!("bump(m={m}, peak={peak}, width={width})"),
        })
    }

    /// Arbitrary symmetric kernel with a caller-declared diagonal maximizer `m`.
    pub fn custom(f: BivariateFn, m: f64, label: &str) -> Result<Self, KernelError> {
        check_unit("m", m)?;
        let value = f(m, m);
        check_nonneg("k(m,m)", value)?;
        Ok(Self {
            shape: Shape::Custom(f),
            max_point: m,
            max_value: value,
            label: format!("custom({label}, m={m})"),
        })
    }

    pub fn family(&self) -> KernelFamily {
        match self.shape {
            Shape::Constant(_) => KernelFamily::Constant,
            Shape::Rank1(_) => KernelFamily::Rank1,
            Shape::Block { .. } => KernelFamily::Block,
            Shape::Bump { .. } => KernelFamily::Bump,
            Shape::Custom(_) => KernelFamily::Custom,
        }
    }

    /// Human-readable description used in metadata records.
    pub fn description(&self) -> &str {
        &self.label
    }

    /// `(m, k(m,m))`.
    pub fn declared_max(&self) -> (f64, f64) {
        (self.max_point, self.max_value)
    }

    fn block_index(breakpoints: &[f64], x: f64) -> usize {
        breakpoints.partition_point(|&t| t <= x)
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match &self.shape {
            Shape::Constant(p) => *p,
            Shape::Rank1(g) => g(x) * g(y),
            Shape::Block {
                values,
                size,
                breakpoints,
            } => {
                let a = Self::block_index(breakpoints, x);
                let b = Self::block_index(breakpoints, y);
                values[a * size + b]
            }
            Shape::Bump { m, peak, width } => {
                let (dx, dy) = (x - m, y - m);
                peak * math::exp(-(dx * dx + dy * dy) / (width * width))
            }
            Shape::Custom(f) => f(x, y),
        }
    }

    /// Infimum of `k` over `region × region`.
    pub fn infimum_over(&self, region: &Region) -> Infimum {
        let (lo, hi) = (region.lo, region.hi);
        match &self.shape {
            Shape::Constant(p) => Infimum::analytic(*p),
            Shape::Block {
                values,
                size,
                breakpoints,
            } => {
                let a = Self::block_index(breakpoints, lo);
                let b = Self::block_index(breakpoints, hi);
                let mut min = f64::INFINITY;
                for r in a..=b {
                    for c in a..=b {
                        min = min.min(values[r * size + c]);
                    }
                }
                Infimum::analytic(min)
            }
            Shape::Bump { .. } => {
                // Radially decreasing about (m,m): the minimum sits on a corner.
                let corners = [(lo, lo), (lo, hi), (hi, lo), (hi, hi)];
                let min = corners
                    .iter()
                    .map(|&(x, y)| self.eval(x, y))
                    .fold(f64::INFINITY, f64::min);
                Infimum::analytic(min)
            }
            Shape::Rank1(_) | Shape::Custom(_) => self.grid_infimum(lo, hi),
        }
    }

    fn grid_infimum(&self, lo: f64, hi: f64) -> Infimum {
        const POINTS: usize = 64;
        const REL_TOL: f64 = 1e-9;
        let (mut xlo, mut xhi, mut ylo, mut yhi) = (lo, hi, lo, hi);
        let mut best = f64::INFINITY;
        let mut change = f64::INFINITY;
        for level in 0..80 {
            let sx = (xhi - xlo) / (POINTS - 1) as f64;
            let sy = (yhi - ylo) / (POINTS - 1) as f64;
            let mut level_min = f64::INFINITY;
            let (mut bx, mut by) = (xlo, ylo);
            for i in 0..POINTS {
                let x = if i == POINTS - 1 {
                    xhi
                } else {
                    xlo + sx * i as f64
                };
                for j in 0..POINTS {
                    let y = if j == POINTS - 1 {
                        yhi
                    } else {
                        ylo + sy * j as f64
                    };
                    let v = self.eval(x, y);
                    if v < level_min {
                        level_min = v;
                        bx = x;
                        by = y;
                    }
                }
            }
            let next = best.min(level_min);
            if best.is_finite() {
                change = best - next;
            }
            best = next;
            let scale = math::abs(best).max(f64::MIN_POSITIVE);
            if level >= 2 && change <= REL_TOL * scale {
                break;
            }
            if sx == 0.0 && sy == 0.0 {
                change = 0.0;
                break;
            }
            xlo = (bx - sx).max(lo);
            xhi = (bx + sx).min(hi);
            ylo = (by - sy).max(lo);
            yhi = (by + sy).min(hi);
        }
        Infimum {
            value: best,
            analytic: false,
            tolerance: change,
        }
    }
}

/// Result of an infimum computation. Grid estimates are upper bounds on
/// the true infimum; `tolerance` is the last refinement step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Infimum {
    pub value: f64,
    pub analytic: bool,
    pub tolerance: f64,
}

impl Infimum {
    fn analytic(value: f64) -> Self {
        Self {
            value,
            analytic: true,
            tolerance: 0.0,
        }
    }
}

/// `λ_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingSequence {
    /// `λ_n = C`
    Constant(f64),
    /// `λ_n = C·n`
    Linear(f64),
    /// `λ_n = C·n^α`
    Power { c: f64, alpha: f64 },
}

impl ScalingSequence {
    pub fn value(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            ScalingSequence::Constant(c) => c,
            ScalingSequence::Linear(c) => c * nf,
            ScalingSequence::Power { c, alpha } => c * math::powf(nf, alpha),
        }
    }

    pub fn checked_value(&self, n: usize) -> Result<f64, KernelError> {
        let v = self.value(n);
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(KernelError::NonPositiveScaling { value: v, n })
        }
    }

    /// Exponent of `n` in `λ_n` (0 for constant scaling).
    pub fn exponent(&self) -> f64 {
        match *self {
            ScalingSequence::Constant(_) => 0.0,
            ScalingSequence::Linear(_) => 1.0,
            ScalingSequence::Power { alpha, .. } => alpha,
        }
    }
}

/// The weight window `R_n = [m − r, m + r] ∩ [0,1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub lo: f64,
    pub hi: f64,
}

impl Region {
    pub fn new(lo: f64, hi: f64) -> Result<Self, KernelError> {
        let (lo, hi) = (lo.max(0.0), hi.min(1.0));
        if lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(KernelError::EmptyRegion { lo, hi })
        }
    }

    pub fn around(m: f64, r: f64) -> Result<Self, KernelError> {
        Self::new(m - r, m + r)
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// `p_max = k(m,m) / λ_n`.
pub fn p_max(k: &Kernel, lambda: &ScalingSequence, n: usize) -> Result<f64, KernelError> {
    let l = lambda.checked_value(n)?;
    let value = k.max_value / l;
    if value > 1.0 {
        return Err(KernelError::ProbabilityExceedsOne {
            value,
            kernel_value: k.max_value,
            lambda: l,
        });
    }
    Ok(value)
}

/// `p_inf = inf_{R²} k / λ_n`.
pub fn p_inf_over_region(
    k: &Kernel,
    region: &Region,
    lambda: &ScalingSequence,
    n: usize,
) -> Result<f64, KernelError> {
    let l = lambda.checked_value(n)?;
    Ok(k.infimum_over(region).value / l)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub resolution: usize,
    pub max_symmetry_violation: f64,
    /// `max(k) − k(m,m)` over the grid, clamped at 0.
    pub max_excess: f64,
    /// Grid location of the observed maximum.
    pub observed_max: (f64, f64, f64),
    pub min_value: f64,
    /// `(half-width, oscillation)` for boxes around `(m,m)`.
    pub oscillations: Vec<(f64, f64)>,
    pub continuity_threshold: f64,
    pub symmetric: bool,
    pub bounded: bool,
    pub nonnegative: bool,
    pub continuous_at_max: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.symmetric && self.bounded && self.nonnegative && self.continuous_at_max
    }
}

pub fn validate_kernel(k: &Kernel, grid_resolution: usize) -> ValidationReport {
    validate_kernel_with(k, grid_resolution, DEFAULT_CONTINUITY_THRESHOLD)
}

pub fn validate_kernel_with(
    k: &Kernel,
    grid_resolution: usize,
    continuity_threshold: f64,
) -> ValidationReport {
    let res = grid_resolution.max(2);
    let point = |i: usize| i as f64 / (res - 1) as f64;
    let (m, km) = k.declared_max();
    let mut sym: f64 = 0.0;
    let mut excess: f64 = 0.0;
    let mut observed = (m, m, km);
    let mut min_value = f64::INFINITY;
    for i in 0..res {
        let x = point(i);
        for j in 0..res {
            let y = point(j);
            let v = k.eval(x, y);
            sym = sym.max(math::abs(v - k.eval(y, x)));
            excess = excess.max(v - km);
            min_value = min_value.min(v);
            if v > observed.2 {
                observed = (x, y, v);
            }
        }
    }

    const BOX_POINTS: usize = 21;
    let mut oscillations = vec![];
    for &h in &CONTINUITY_HALF_WIDTHS {
        let (lo, hi) = ((m - h).max(0.0), (m + h).min(1.0));
        let step = (hi - lo) / (BOX_POINTS - 1) as f64;
        let (mut bmin, mut bmax) = (km, km);
        for i in 0..BOX_POINTS {
            for j in 0..BOX_POINTS {
                let v = k.eval(lo + step * i as f64, lo + step * j as f64);
                bmin = bmin.min(v);
                bmax = bmax.max(v);
            }
        }
        oscillations.push((h, bmax - bmin));
    }
    let non_increasing = oscillations
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 + VALIDATION_TOL);
    let last = oscillations.last().map_or(0.0, |o| o.1);

    ValidationReport {
        resolution: res,
        max_symmetry_violation: sym,
        max_excess: excess,
        observed_max: observed,
        min_value,
        oscillations,
        continuity_threshold,
        symmetric: sym <= VALIDATION_TOL,
        bounded: excess <= VALIDATION_TOL,
        nonnegative: min_value >= -VALIDATION_TOL,
        continuous_at_max: non_increasing && last < continuity_threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example_block() -> Kernel {
        Kernel::block(&[vec![0.2, 0.1], vec![0.1, 0.6]], &[0.5]).unwrap()
    }

    #[test]
    fn constructors_declare_max() {
        let c = Kernel::constant(0.5).unwrap();
        assert_eq!(c.eval(0.1, 0.9), 0.5);
        assert_eq!(c.declared_max().1, 0.5);
        assert_eq!(example_block().declared_max(), (0.75, 0.6));
        let b = Kernel::bump(0.5, 0.9, 0.1).unwrap();
        assert_eq!(b.eval(0.5, 0.5), 0.9);
        let oracle = 0.9 * std::f64::consts::E.powf(-(0.1f64 * 0.1) / 0.01);
        assert!((b.eval(0.5, 0.6) - oracle).abs() < 1e-15);
        assert!(b.eval(0.5, 0.6) < 0.9);
        assert_eq!(b.family(), KernelFamily::Bump);
    }

    #[test]
    fn constructor_errors() {
        assert!(matches!(
            Kernel::constant(-0.1),
            Err(KernelError::ValueOutOfRange { .. })
        ));
        assert!(matches!(
            Kernel::block(&[vec![0.2, 0.1], vec![0.3, 0.6]], &[0.5]),
            Err(KernelError::AsymmetricBlockMatrix { row: 0, col: 1 })
        ));
        assert!(matches!(
            Kernel::block(&[vec![0.2, 0.1], vec![0.1, 0.6]], &[0.5, 0.7]),
            Err(KernelError::InvalidBreakpoints { .. })
        ));
        assert!(Kernel::bump(0.5, 1.0, 0.0).is_err());
        assert!(Kernel::bump(1.5, 1.0, 0.1).is_err());
    }

    #[test]
    fn block_lookup_uses_half_open_blocks() {
        let k = example_block();
        assert_eq!(k.eval(0.49, 0.49), 0.2);
        assert_eq!(k.eval(0.5, 0.5), 0.6);
        assert_eq!(k.eval(1.0, 0.0), 0.1);
    }

    #[test]
    fn validation_examples() {
        let r = validate_kernel(&Kernel::constant(0.3).unwrap(), 100);
        assert!(r.passed());
        assert!(r.oscillations.iter().all(|o| o.1 == 0.0));
        assert!(validate_kernel(&example_block(), 64).passed());
        assert!(validate_kernel(&Kernel::bump(0.5, 0.9, 0.1).unwrap(), 101).passed());

        // Maximum at (0.2, 0.8), off the diagonal.
        let off = Kernel::custom(
            Arc::new(|x: f64, y: f64| {
                let f = |a: f64, b: f64| math::exp(-((a - 0.2).powi(2) + (b - 0.8).powi(2)) / 0.01);
                0.5 * (f(x, y) + f(y, x))
            }),
            0.2,
            "off-diagonal",
        )
        .unwrap();
        let r = validate_kernel(&off, 101);
        assert!(r.symmetric);
        assert!(!r.bounded);
        // Grid oracle: the largest value sits at (0.2,0.8) or its mirror.
        let (x, y, _) = r.observed_max;
        assert!(
            ((x - 0.2).abs() < 1e-9 && (y - 0.8).abs() < 1e-9)
                || ((x - 0.8).abs() < 1e-9 && (y - 0.2).abs() < 1e-9)
        );
    }

    #[test]
    fn discontinuous_kernel_fails_proxy() {
        let k = Kernel::custom(
            Arc::new(|x: f64, y: f64| if x == 0.5 && y == 0.5 { 1.0 } else { 0.5 }),
            0.5,
            "spike",
        )
        .unwrap();
        assert!(!validate_kernel(&k, 11).continuous_at_max);
    }

    #[test]
    fn p_max_examples() {
        let c = Kernel::constant(0.5).unwrap();
        assert_eq!(p_max(&c, &ScalingSequence::Constant(1.0), 10).unwrap(), 0.5);
        let b = Kernel::bump(0.5, 0.9, 0.1).unwrap();
        let v = p_max(&b, &ScalingSequence::Linear(1.0), 100).unwrap();
        assert!((v - 0.009).abs() < 1e-15);
        let b3 = Kernel::bump(0.5, 3.0, 0.1).unwrap();
        let v = p_max(&b3, &ScalingSequence::Linear(1.0), 1000).unwrap();
        assert!((v - 0.003).abs() < 1e-15);
        assert!(matches!(
            p_max(&b3, &ScalingSequence::Constant(1.0), 1000),
            Err(KernelError::ProbabilityExceedsOne { .. })
        ));
    }

    #[test]
    fn p_inf_examples() {
        let one = ScalingSequence::Constant(1.0);
        let c = Kernel::constant(0.5).unwrap();
        let reg = Region::new(0.1, 0.3).unwrap();
        assert_eq!(p_inf_over_region(&c, &reg, &one, 5).unwrap(), 0.5);

        let b = Kernel::bump(0.5, 0.9, 0.1).unwrap();
        let reg = Region::new(0.4, 0.6).unwrap();
        let oracle = 0.9 * (-2.0f64 * 0.01 / 0.01).exp();
        let got = p_inf_over_region(&b, &reg, &one, 5).unwrap();
        assert!((got - oracle).abs() < 1e-12, "{got} vs {oracle}");
        assert!((got - 0.1218).abs() < 1e-4);

        let blk = example_block();
        let reg = Region::new(0.6, 0.9).unwrap();
        assert_eq!(
            p_inf_over_region(&blk, &reg, &ScalingSequence::Constant(2.0), 5).unwrap(),
            0.3
        );
        let reg = Region::new(0.4, 0.9).unwrap();
        assert_eq!(p_inf_over_region(&blk, &reg, &one, 5).unwrap(), 0.1);
    }

    #[test]
    fn grid_infimum_matches_closed_form() {
        // Custom bump: the grid route should land on the analytic corner value.
        let custom = Kernel::custom(
            Arc::new(|x: f64, y: f64| {
                0.9 * math::exp(-((x - 0.5).powi(2) + (y - 0.5).powi(2)) / 0.01)
            }),
            0.5,
            "bump",
        )
        .unwrap();
        let reg = Region::new(0.42, 0.55).unwrap();
        let inf = custom.infimum_over(&reg);
        let analytic = Kernel::bump(0.5, 0.9, 0.1).unwrap().infimum_over(&reg);
        assert!(!inf.analytic && analytic.analytic);
        assert!((inf.value - analytic.value).abs() < 1e-12);

        // Interior minimum for a rank-1 kernel with g minimized at 0.3.
        let g: UnivariateFn = Arc::new(|x: f64| 0.2 + (x - 0.3) * (x - 0.3));
        let r1 = Kernel::rank1(g, 1.0, "quadratic").unwrap();
        let inf = r1.infimum_over(&Region::new(0.0, 1.0).unwrap());
        assert!((inf.value - 0.04).abs() < 1e-9, "{inf:?}");
    }

    #[test]
    fn region_clipping() {
        let r = Region::around(0.0, 0.05).unwrap();
        assert_eq!((r.lo, r.hi), (0.0, 0.05));
        assert!(Region::new(0.6, 0.4).is_err());
        assert_eq!(Region::around(0.5, 2.0).unwrap().length(), 1.0);
    }

    #[test]
    fn shrinking_region_converges_to_peak() {
        let b = Kernel::bump(0.5, 0.9, 0.1).unwrap();
        let one = ScalingSequence::Constant(1.0);
        let pmax = p_max(&b, &one, 1).unwrap();
        let mut prev = 0.0;
        for r in [0.2, 0.1, 0.05, 0.01] {
            let v = p_inf_over_region(&b, &Region::around(0.5, r).unwrap(), &one, 1).unwrap();
            assert!(v >= prev && v <= pmax);
            prev = v;
        }
        assert!(pmax - prev < 0.9 * 0.02 + 1e-12);
    }

    proptest! {
        #[test]
        fn symmetry_exact_for_closed_forms(x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
            for k in [
                Kernel::constant(0.4).unwrap(),
                example_block(),
                Kernel::bump(0.3, 2.0, 0.25).unwrap(),
            ] {
                prop_assert_eq!(k.eval(x, y), k.eval(y, x));
                prop_assert!(k.eval(x, y) <= k.declared_max().1);
            }
        }

        #[test]
        fn p_inf_below_p_max_when_region_holds_m(m in 0.0f64..=1.0, r in 0.001f64..0.6) {
            let one = ScalingSequence::Constant(1.0);
            for k in [
                Kernel::constant(0.4).unwrap(),
                Kernel::bump(m, 0.8, 0.2).unwrap(),
            ] {
                let (km, _) = k.declared_max();
                let reg = Region::around(km, r).unwrap();
                let inf = p_inf_over_region(&k, &reg, &one, 1).unwrap();
                let sup = p_max(&k, &one, 1).unwrap();
                prop_assert!(inf <= sup);
                if k.family() == KernelFamily::Constant {
                    prop_assert_eq!(inf, sup);
                }
            }
        }
    }
}
