//! Interval layout of the operator: the singleton `{0}`, then alternating
//! lay-off intervals and fan working intervals.
//!
//! Fan `n` occupies `[c_n, c_n + nu_n]`, where `nu_n` is the last index of
//! fan `n - 1` (`nu_1 = 0`), and is preceded by the lay-off `[nu_n + 1, c_n - 1]`.
//! The first fan index follows the growth rule
//!
//! ```text
//! c_n = nu_n + 1 + g0 * 4^n * (nu_n + deg p_n + 1)^2
//! ```
//!
//! so the lay-off length outgrows `nu_n^2` geometrically, and the fan
//! perturbation is `gamma_n = 2^-n`.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numeric::{fmt_g17, ratio_over_sqrt};
use crate::poly::Polynomial;
use crate::vector::SpaceNorm;

mod enumeration;

pub use enumeration::{enumerate_fan_polynomials, FanEnumerator, FanItem, MasterGrid};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoffSpec {
    pub start: BigUint,
    pub length: BigUint,
}

impl LayoffSpec {
    /// The offset `nu` of the interval `[nu + 1, nu + l]`.
    pub fn nu(&self) -> BigUint {
        &self.start - 1u8
    }

    pub fn end(&self) -> BigUint {
        &self.start + &self.length - 1u8
    }

    pub fn contains(&self, j: &BigUint) -> bool {
        *j >= self.start && *j <= self.end()
    }

    pub fn coefficient(&self, j: &BigUint) -> Result<f64> {
        layoff_coefficient(&self.length, &self.nu(), j)
    }

    pub fn log2_coefficient(&self, j: &BigUint) -> Result<f64> {
        layoff_log2_coefficient(&self.length, &self.nu(), j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FanOrigin {
    /// Item of the generic base-grid stream.
    BaseGrid,
    /// Explicitly requested base-grid polynomial.
    Requested,
    /// `2 X^{c_m}` for an earlier fan `m` (1-based).
    DoublingRequest { of_fan: usize },
}

impl FanOrigin {
    pub fn label(&self) -> String {
        match self {
            FanOrigin::BaseGrid => "BASE".to_string(),
            FanOrigin::Requested => "REQUEST".to_string(),
            FanOrigin::DoublingRequest { of_fan } => format!("DOUBLE:{of_fan}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanSpec {
    /// 1-based fan number.
    pub n: usize,
    pub c: BigUint,
    pub nu: BigUint,
    pub gamma: f64,
    pub p: Polynomial,
    pub origin: FanOrigin,
}

impl FanSpec {
    pub fn end(&self) -> BigUint {
        &self.c + &self.nu
    }

    pub fn contains(&self, j: &BigUint) -> bool {
        *j >= self.c && *j <= self.end()
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::InvalidSchedule(format!("fan {}: {msg}", self.n)));
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        if self.p.modulus() > 2.0 {
            return bad(format!("polynomial modulus {} exceeds 2", self.p.modulus()));
        }
        let deg = self.p.degree().cloned().unwrap_or_default();
        if deg + &self.nu >= self.c {
            return bad("degree(p) + nu must be below c".to_string());
        }
        if self.c <= &self.nu * 2u8 {
            return bad("c must exceed 2 nu".to_string());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Block {
    /// The singleton `{0}` carrying `e_0 = f_0`.
    Origin,
    Layoff(LayoffSpec),
    Fan(FanSpec),
}

impl Block {
    pub fn start(&self) -> BigUint {
        match self {
            Block::Origin => BigUint::zero(),
            Block::Layoff(l) => l.start.clone(),
            Block::Fan(f) => f.c.clone(),
        }
    }

    pub fn end(&self) -> BigUint {
        match self {
            Block::Origin => BigUint::zero(),
            Block::Layoff(l) => l.end(),
            Block::Fan(f) => f.end(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FanLengthMode {
    /// Full fan intervals; interior vectors are validated only near `c_n`.
    Minimal,
    /// Full fan intervals; interior vectors validated across the interval.
    Faithful,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub g0: u64,
    pub n_fans: usize,
    pub fan_length_mode: FanLengthMode,
    pub space: SpaceNorm,
    pub base_grid_depth: u32,
    /// Polynomials served, after rounding to the base grid, as the base
    /// items of segments 3, 4, ... ahead of the generic stream.
    pub requests: Vec<Polynomial>,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        ScheduleParams {
            g0: 16,
            n_fans: 19,
            fan_length_mode: FanLengthMode::Minimal,
            space: SpaceNorm::L1,
            base_grid_depth: 6,
            requests: Vec::new(),
        }
    }
}

impl ScheduleParams {
    pub fn with_fans(n_fans: usize) -> Self {
        ScheduleParams { n_fans, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.g0 < 4 {
            return Err(LabError::InvalidParams(format!("g0 must be at least 4, got {}", self.g0)));
        }
        if self.base_grid_depth == 0 || self.base_grid_depth > 60 {
            return Err(LabError::InvalidParams(format!(
                "base_grid_depth must be in 1..=60, got {}",
                self.base_grid_depth
            )));
        }
        for p in &self.requests {
            let r = p.round_to_grid(self.base_grid_depth);
            if r.is_zero() || r.modulus() > 2.0 {
                return Err(LabError::InvalidParams(format!(
                    "request {p} rounds to a polynomial outside the base grid (modulus must be in (0, 2])"
                )));
            }
        }
        Ok(())
    }

    /// `gamma_n = 2^-n`.
    pub fn gamma(n: usize) -> f64 {
        2f64.powi(-(n as i32))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSchedule {
    blocks: Vec<Block>,
    params: Option<ScheduleParams>,
    total_length: BigUint,
}

impl IntervalSchedule {
    /// Validates and wraps a hand-made block list.
    pub fn from_blocks(blocks: Vec<Block>) -> Result<Self> {
        Self::assemble(blocks, None)
    }

    /// `{0}` followed by the single lay-off `[1, l]`.
    pub fn layoff_only(l: u64) -> Result<Self> {
        Self::from_blocks(vec![
            Block::Origin,
            Block::Layoff(LayoffSpec { start: BigUint::one(), length: BigUint::from(l) }),
        ])
    }

    fn assemble(blocks: Vec<Block>, params: Option<ScheduleParams>) -> Result<Self> {
        let invalid = |msg: String| Err(LabError::InvalidSchedule(msg));
        if blocks.first() != Some(&Block::Origin) {
            return invalid("schedule must start with the singleton {0}".to_string());
        }
        let mut expected_start = BigUint::one();
        let mut last_fan_end = BigUint::zero();
        let mut fan_count = 0usize;
        let mut prev_layoff: Option<&LayoffSpec> = None;
        for block in &blocks[1..] {
            if block.start() != expected_start {
                return invalid(format!(
                    "block starting at {} leaves a gap or overlap (expected {expected_start})",
                    block.start()
                ));
            }
            match block {
                Block::Origin => return invalid("{0} may only appear first".to_string()),
                Block::Layoff(l) => {
                    if l.length.is_zero() {
                        return invalid("lay-off length must be at least 1".to_string());
                    }
                    if prev_layoff.is_some() {
                        return invalid("two consecutive lay-off intervals".to_string());
                    }
                    prev_layoff = Some(l);
                }
                Block::Fan(f) => {
                    fan_count += 1;
                    if f.n != fan_count {
                        return invalid(format!("fan numbered {} at position {fan_count}", f.n));
                    }
                    f.validate()?;
                    if f.nu != last_fan_end {
                        return invalid(format!(
                            "fan {}: nu = {} but the previous fan ends at {last_fan_end}",
                            f.n, f.nu
                        ));
                    }
                    match prev_layoff {
                        Some(l) if l.start == &f.nu + 1u8 && l.end() + 1u8 == f.c => {}
                        _ => {
                            return invalid(format!(
                                "fan {} must be preceded by the lay-off [nu+1, c-1]",
                                f.n
                            ))
                        }
                    }
                    prev_layoff = None;
                    last_fan_end = f.end();
                }
            }
            expected_start = block.end() + 1u8;
        }
        let total_length = blocks.last().map(Block::end).unwrap_or_default();
        Ok(IntervalSchedule { blocks, params, total_length })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn params(&self) -> Option<&ScheduleParams> {
        self.params.as_ref()
    }

    /// Last index covered by the schedule.
    pub fn total_length(&self) -> &BigUint {
        &self.total_length
    }

    pub fn fans(&self) -> impl Iterator<Item = &FanSpec> {
        self.blocks.iter().filter_map(|b| match b {
            Block::Fan(f) => Some(f),
            _ => None,
        })
    }

    pub fn num_fans(&self) -> usize {
        self.fans().count()
    }

    /// Fan number `n` (1-based).
    pub fn fan(&self, n: usize) -> Option<&FanSpec> {
        self.fans().nth(n.checked_sub(1)?)
    }

    pub fn layoffs(&self) -> impl Iterator<Item = &LayoffSpec> {
        self.blocks.iter().filter_map(|b| match b {
            Block::Layoff(l) => Some(l),
            _ => None,
        })
    }

    /// The lay-off immediately preceding fan `n`.
    pub fn layoff_before(&self, n: usize) -> Option<&LayoffSpec> {
        let pos = self
            .blocks
            .iter()
            .position(|b| matches!(b, Block::Fan(f) if f.n == n))?;
        match &self.blocks[pos - 1] {
            Block::Layoff(l) => Some(l),
            _ => None,
        }
    }

    /// The block containing index `j`.
    pub fn locate(&self, j: &BigUint) -> Option<&Block> {
        if *j > self.total_length {
            return None;
        }
        let idx = self.blocks.partition_point(|b| b.start() <= *j);
        self.blocks.get(idx.checked_sub(1)?)
    }

    /// One line per block, tab-separated.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            match b {
                Block::Origin => out.push_str("ORIGIN\t0\n"),
                Block::Layoff(l) => {
                    let _ = writeln!(out, "LAYOFF\t{}\t{}", l.start, l.end());
                }
                Block::Fan(f) => {
                    let _ = writeln!(
                        out,
                        "FAN\t{}\t{}\t{}\t{}\t{}",
                        f.c,
                        f.nu,
                        fmt_g17(f.gamma),
                        f.p.render(),
                        f.origin.label()
                    );
                }
            }
        }
        out
    }
}

/// `c_n = nu + 1 + g0 * 4^n * (nu + deg + 1)^2`
pub fn first_fan_index(g0: u64, n: usize, nu: &BigUint, deg: &BigUint) -> BigUint {
    let base = nu + deg + 1u8;
    let four_n = BigUint::one() << (2 * n);
    nu + 1u8 + BigUint::from(g0) * four_n * &base * &base
}

pub fn build_schedule(params: &ScheduleParams) -> Result<IntervalSchedule> {
    params.validate()?;
    let mut blocks = vec![Block::Origin];
    let mut enumerator = FanEnumerator::new(params.requests.clone(), params.base_grid_depth);
    let mut firsts: Vec<BigUint> = Vec::with_capacity(params.n_fans);
    let mut nu = BigUint::zero();
    for n in 1..=params.n_fans {
        let (p, origin) = match enumerator.next_item() {
            FanItem::Base { poly, origin } => (poly, origin),
            FanItem::Doubling { of_fan } => {
                (Polynomial::monomial(2.0, firsts[of_fan - 1].clone()), FanOrigin::DoublingRequest { of_fan })
            }
        };
        let deg = p.degree().cloned().unwrap_or_default();
        let c = first_fan_index(params.g0, n, &nu, &deg);
        if &deg + &nu >= c {
            return Err(LabError::InvalidParams(format!("fan {n}: degree(p) + nu >= c")));
        }
        blocks.push(Block::Layoff(LayoffSpec { start: &nu + 1u8, length: &c - &nu - 1u8 }));
        let fan = FanSpec { n, c: c.clone(), nu: nu.clone(), gamma: ScheduleParams::gamma(n), p, origin };
        nu = fan.end();
        firsts.push(c);
        blocks.push(Block::Fan(fan));
    }
    IntervalSchedule::assemble(blocks, Some(params.clone()))
}

/// Base-2 logarithm of the lay-off coefficient,
/// `-(l/2 + nu + 1 - j) / sqrt(l)`.
pub fn layoff_log2_coefficient(l: &BigUint, nu: &BigUint, j: &BigUint) -> Result<f64> {
    if l.is_zero() || *j <= *nu || *j > nu + l {
        return Err(LabError::Domain(format!("index {j} outside the lay-off [{nu}+1, {nu}+{l}]")));
    }
    // 2 * (l/2 + nu + 1 - j), exact
    let twice = BigInt::from(l.clone()) + BigInt::from(nu.clone() * 2u8 + 2u8) - BigInt::from(j.clone() * 2u8);
    Ok(-ratio_over_sqrt(&twice, l) / 2.0)
}

/// `2^{-(l/2 + nu + 1 - j)/sqrt(l)}` for `nu + 1 <= j <= nu + l`.
pub fn layoff_coefficient(l: &BigUint, nu: &BigUint, j: &BigUint) -> Result<f64> {
    Ok(layoff_log2_coefficient(l, nu, j)?.exp2())
}

/// Convenience for small intervals.
pub fn layoff_coefficient_u64(l: u64, nu: u64, j: u64) -> Result<f64> {
    layoff_coefficient(&BigUint::from(l), &BigUint::from(nu), &BigUint::from(j))
}

/// Ratio `(nu + 1) / sqrt(l)` bounding twice the midpoint exponent; used by
/// the growth-rule checks.
pub fn midpoint_exponent_bound(layoff: &LayoffSpec) -> f64 {
    let nu_plus = BigInt::from(layoff.start.clone());
    ratio_over_sqrt(&nu_plus, &layoff.length) / 2.0
}



/// A hand-laid three-fan schedule covering `[0, 2047]`, small enough for the
/// dense truncation. Fan 2 doubles fan 1, fan 3 carries a degree-2
/// polynomial, and the fan interiors are exercised up to index 1365.
pub fn compact_schedule() -> IntervalSchedule {
    let lay = |start: u64, end: u64| {
        Block::Layoff(LayoffSpec { start: BigUint::from(start), length: BigUint::from(end - start + 1) })
    };
    let fan = |n: usize, c: u64, nu: u64, p: Polynomial, origin: FanOrigin| {
        Block::Fan(FanSpec {
            n,
            c: BigUint::from(c),
            nu: BigUint::from(nu),
            gamma: ScheduleParams::gamma(n),
            p,
            origin,
        })
    };
    IntervalSchedule::from_blocks(vec![
        Block::Origin,
        lay(1, 64),
        fan(1, 65, 0, Polynomial::constant(1.0), FanOrigin::BaseGrid),
        lay(66, 299),
        fan(2, 300, 65, Polynomial::monomial(2.0, 65u32), FanOrigin::DoublingRequest { of_fan: 1 }),
        lay(366, 999),
        fan(3, 1000, 365, Polynomial::from_coeffs(&[0.5, -0.25, 1.0]), FanOrigin::BaseGrid),
        lay(1366, 2047),
    ])
    .expect("compact schedule is well formed")
}
