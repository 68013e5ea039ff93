//! Approximation along fans, the doubling search, the witness sequences
//! `(w_k, q_k)` and numerical checkers for the Hypercyclicity Criterion.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::operator::ExpansionTable;
use crate::poly::Polynomial;
use crate::schedule::{FanOrigin, FanSpec};
use crate::vector::SpaceNorm;

mod ball;
mod check;
mod orbit;
mod witness;

pub use ball::{ball_condition_search, BallCertificate, BallSearchOutcome, OrbitPoint};
pub use check::{
    check_hc_criterion, check_prop4, rolewicz_instance, CheckReport, CheckRow, CriterionInstance, LinearMap,
    Prop4Bounds, Verdict, HC_FORWARD, HC_IDENTITY, HC_INVERSE, PROP4_Q, PROP4_RESIDUAL, PROP4_W,
};
pub use orbit::{orbit_hitting_report, HitReport, HitRow, PairHitRow};
pub use witness::{theorem2_witness, CriterionWitness, WitnessRow};

/// Base-grid depth assumed for hand-made schedules without parameters.
const DEFAULT_GRID_DEPTH: u32 = 6;

/// Relative slack on the per-step budget checks.
const BUDGET_SLACK: f64 = 1e-12;

fn fan_of(table: &ExpansionTable, n: usize) -> Result<&FanSpec> {
    table.schedule().fan(n).ok_or_else(|| {
        LabError::ScheduleExhausted(format!(
            "fan {n} requested but the schedule has {} fans",
            table.schedule().num_fans()
        ))
    })
}

/// `||e_{c_n} - p(T) e_0||`.
pub fn fan_error(table: &ExpansionTable, n: usize, p: &Polynomial, space: SpaceNorm) -> Result<f64> {
    let fan = fan_of(table, n)?;
    if let Some(d) = p.degree() {
        if *d >= fan.c {
            return Err(LabError::OutOfRange { index: d.to_string(), total: fan.c.to_string() });
        }
    }
    let e = table.expand_e(&fan.c)?;
    Ok((&e - &table.poly_orbit_vector(p)?).norm(space))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainStep {
    /// Fan number `n_m`.
    pub fan: usize,
    pub c: BigUint,
    pub gamma: f64,
    /// `2^{-(j-m+1)} p`, the polynomial approximated after this step.
    pub target: Polynomial,
    /// Measured `||T^{c_{n_m}} e_0 - target(T) e_0||`.
    pub error: f64,
    /// `eps * 2^{-2(j-m+1)}`.
    pub budget: f64,
}

/// A doubling chain `n_1 < ... < n_{j+1}` approximating `p(T) e_0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexChain {
    pub target: Polynomial,
    pub eps: f64,
    /// Smallest `j >= 0` with `|p| <= 2^j`.
    pub j: u32,
    /// The grid polynomial matched by the first step.
    pub base: Polynomial,
    /// `||(base - 2^{-j} p)(T) e_0||`.
    pub rounding_error: f64,
    pub steps: Vec<ChainStep>,
    /// `||T^{c_{n_last}} e_0 - p(T) e_0||`, re-measured.
    pub final_error: f64,
}

impl IndexChain {
    pub fn last_fan(&self) -> usize {
        self.steps.last().map(|s| s.fan).unwrap_or(0)
    }
}

/// Smallest `j >= 0` with `modulus <= 2^j`.
pub fn doubling_exponent(modulus: f64) -> u32 {
    let mut j = 0u32;
    while modulus > 2f64.powi(j as i32) {
        j += 1;
    }
    j
}

/// `eps * 2^{-2(j-m+1)}`: the error allowed after step `m` (1-based).
fn step_budget(eps: f64, j: u32, m: u32) -> f64 {
    eps * 2f64.powi(-2 * (j as i32 - m as i32 + 1))
}

/// Error allowed for the doubling fan itself at step `m >= 2`:
/// `eps * 2^{-(2(j-m+1)+1)}`.
fn doubling_budget(eps: f64, j: u32, m: u32) -> f64 {
    eps * 2f64.powi(-(2 * (j as i32 - m as i32 + 1) + 1))
}

fn within(value: f64, budget: f64) -> bool {
    value < budget * (1.0 + BUDGET_SLACK)
}

/// Finds `n_1 < ... < n_{j+1}` with `||T^{c_{n_{j+1}}} e_0 - p(T) e_0|| < eps`.
///
/// Step 1 is a fan whose polynomial is `2^{-j} p` rounded to the base grid,
/// with error below `eps 2^{-2j}`; step `m` is a fan `2 X^{c_{n_{m-1}}}` whose
/// own error is below `eps 2^{-(2(j-m+1)+1)}` and whose accumulated error is
/// below `eps 2^{-2(j-m+1)}`.
pub fn doubling_search(table: &ExpansionTable, p: &Polynomial, eps: f64, space: SpaceNorm) -> Result<IndexChain> {
    doubling_search_after(table, p, eps, space, 0)
}

/// As [`doubling_search`], restricted to chains whose last fan exceeds
/// `after`.
pub fn doubling_search_after(
    table: &ExpansionTable,
    p: &Polynomial,
    eps: f64,
    space: SpaceNorm,
    after: usize,
) -> Result<IndexChain> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(LabError::Domain(format!("eps must be positive, got {eps}")));
    }
    if p.is_zero() {
        return Err(LabError::GridTooCoarse("the zero polynomial has no base-grid approximant".into()));
    }
    let schedule = table.schedule();
    if schedule.num_fans() == 0 {
        return Err(LabError::ScheduleExhausted("the schedule has no fans".into()));
    }
    let depth = schedule.params().map_or(DEFAULT_GRID_DEPTH, |pr| pr.base_grid_depth);
    let j = doubling_exponent(p.modulus());
    let target_at = |m: u32| p.scaled(2f64.powi(-(j as i32 - m as i32 + 1)));

    let first_target = target_at(1);
    let base = first_target.round_to_grid(depth);
    let degree_cap = BigUint::from(depth - 1);
    if base.is_zero() || base.modulus() > 2.0 || base.degree().is_some_and(|d| *d > degree_cap) {
        return Err(LabError::GridTooCoarse(format!(
            "2^-{j} p = {first_target} has no base-grid item at depth {depth}"
        )));
    }
    let first_budget = step_budget(eps, j, 1);
    let rounding_error = table.poly_orbit_vector(&(&base - &first_target))?.norm(space);
    if !within(rounding_error, first_budget) {
        return Err(LabError::GridTooCoarse(format!(
            "rounding error {rounding_error} of {base} exceeds the step budget {first_budget}; raise base_grid_depth"
        )));
    }

    let fans: Vec<&FanSpec> = schedule.fans().collect();
    let mut saw_base = false;
    for start in fans.iter().filter(|f| f.p == base) {
        saw_base = true;
        let error = fan_error(table, start.n, &first_target, space)?;
        if !within(error, first_budget) {
            continue;
        }
        let mut steps = vec![ChainStep {
            fan: start.n,
            c: start.c.clone(),
            gamma: start.gamma,
            target: first_target.clone(),
            error,
            budget: first_budget,
        }];
        for m in 2..=j + 1 {
            let prev = steps.last().expect("chain has a first step");
            let target = target_at(m);
            let budget = step_budget(eps, j, m);
            let own_budget = doubling_budget(eps, j, m);
            let mut next = None;
            for f in fans.iter().filter(|f| f.n > prev.fan) {
                let doubles_prev = f.origin == FanOrigin::DoublingRequest { of_fan: prev.fan }
                    || f.p == Polynomial::monomial(2.0, prev.c.clone());
                if !doubles_prev || !within(f.gamma, own_budget) {
                    continue;
                }
                let err = fan_error(table, f.n, &target, space)?;
                if within(err, budget) {
                    next = Some(ChainStep { fan: f.n, c: f.c.clone(), gamma: f.gamma, target, error: err, budget });
                    break;
                }
            }
            match next {
                Some(step) => steps.push(step),
                None => break,
            }
        }
        if steps.len() != j as usize + 1 || steps.last().is_none_or(|s| s.fan <= after) {
            continue;
        }
        let last = steps.last().expect("non-empty chain").fan;
        let final_error = fan_error(table, last, p, space)?;
        if !(final_error < eps) {
            continue;
        }
        return Ok(IndexChain {
            target: p.clone(),
            eps,
            j,
            base,
            rounding_error,
            steps,
            final_error,
        });
    }
    let why = if saw_base {
        format!("no chain of length {} after fan {after} meets the budgets for eps = {eps}", j + 1)
    } else {
        format!("base polynomial {base} does not occur among the {} fans", fans.len())
    };
    Err(LabError::ScheduleExhausted(why))
}
