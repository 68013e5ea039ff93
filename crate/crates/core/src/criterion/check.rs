use num_bigint::BigUint;
use serde::Serialize;

use super::witness::CriterionWitness;
use crate::error::{LabError, Result};
use crate::operator::{apply_matrix, apply_power, OperatorMatrix};
use crate::vector::{SpaceNorm, SparseVector};

/// Relative slack when comparing a measured norm against an analytic bound.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub condition: String,
    pub k: u32,
    /// Largest norm over the samples for this `k`.
    pub max_norm: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub rows: Vec<CheckRow>,
    pub verdict: Verdict,
}

impl CheckReport {
    fn from_rows(check: &str, rows: Vec<CheckRow>) -> Self {
        let verdict = if rows.iter().all(|r| r.pass) { Verdict::Pass } else { Verdict::Fail };
        CheckReport { check: check.to_string(), rows, verdict }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Conditions with at least one failing row, in first-failure order.
    pub fn failed_conditions(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in self.rows.iter().filter(|r| !r.pass) {
            if !out.contains(&r.condition.as_str()) {
                out.push(&r.condition);
            }
        }
        out
    }

    pub fn rows_for<'a>(&'a self, condition: &'a str) -> impl Iterator<Item = &'a CheckRow> + 'a {
        self.rows.iter().filter(move |r| r.condition == condition)
    }
}

/// Geometric per-`k` bounds `base^k` for the three witness sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop4Bounds {
    pub w: f64,
    pub q_e0: f64,
    pub residual: f64,
}

impl Default for Prop4Bounds {
    fn default() -> Self {
        Prop4Bounds { w: 0.5, q_e0: 0.5, residual: 0.25 }
    }
}

pub const PROP4_W: &str = "w_k";
pub const PROP4_Q: &str = "q_k(T)e0";
pub const PROP4_RESIDUAL: &str = "q_k(T)w_k-e0";

/// Checks `||w_k|| <= w^k`, `||q_k(T) e_0|| <= q_e0^k` and
/// `||q_k(T) w_k - e_0|| < residual^k`. `||w_k||` is recomputed from the
/// stored vector.
pub fn check_prop4(witness: &CriterionWitness, bounds: &Prop4Bounds) -> CheckReport {
    let space = witness.space;
    let mut rows = Vec::with_capacity(3 * witness.rows.len());
    for (condition, base) in [(PROP4_W, bounds.w), (PROP4_Q, bounds.q_e0), (PROP4_RESIDUAL, bounds.residual)] {
        for r in &witness.rows {
            let value = match condition {
                PROP4_W => r.w.norm(space),
                PROP4_Q => r.norm_q_e0,
                _ => r.norm_residual,
            };
            let bound = base.powi(r.k as i32);
            let pass = if condition == PROP4_RESIDUAL {
                value < bound
            } else {
                value <= bound * (1.0 + BOUND_SLACK)
            };
            rows.push(CheckRow { condition: condition.to_string(), k: r.k, max_norm: value, bound, pass });
        }
    }
    CheckReport::from_rows("prop4", rows)
}

/// A right-inverse-like map `S_{n_k}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum LinearMap {
    Matrix(OperatorMatrix),
    /// `scale * F^power` for `power >= 0` and `scale * B^{-power}` otherwise,
    /// with `F f_j = f_{j+1}`, `B f_j = f_{j-1}`, `B f_0 = 0`.
    ScaledShift { scale: f64, power: i64 },
}

impl LinearMap {
    pub fn apply(&self, x: &SparseVector) -> Result<SparseVector> {
        match self {
            LinearMap::Matrix(m) => apply_matrix(m, x),
            LinearMap::ScaledShift { scale, power } => {
                let by = BigUint::from(power.unsigned_abs());
                let mut out = SparseVector::zero();
                for (j, c) in x.iter() {
                    let idx = if *power >= 0 {
                        j + &by
                    } else if *j >= by {
                        j - &by
                    } else {
                        continue;
                    };
                    out.add_entry(idx, c * scale);
                }
                Ok(out)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionInstance {
    pub name: String,
    pub operator: OperatorMatrix,
    pub d: Vec<SparseVector>,
    pub d_prime: Vec<SparseVector>,
    pub n_seq: Vec<usize>,
    /// `S_{n_k}`, one per entry of `n_seq`.
    pub s: Vec<LinearMap>,
    pub space: SpaceNorm,
}

impl CriterionInstance {
    pub fn validate(&self) -> Result<()> {
        if self.n_seq.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::InvalidParams("n_seq must be strictly increasing".into()));
        }
        if self.s.len() != self.n_seq.len() {
            return Err(LabError::InvalidParams(format!(
                "{} maps S for {} indices n_k",
                self.s.len(),
                self.n_seq.len()
            )));
        }
        Ok(())
    }
}

/// `T = 2B` on `span(f_0, ..., f_{dim-1})`, `D = D' = {f_0, f_0 + f_1}`,
/// `n_k = k` for `k = 1..=len` and `S_k = 2^{-k} F^k`. With `broken` the
/// `2^{-k}` factor is dropped.
pub fn rolewicz_instance(dim: usize, len: usize, broken: bool) -> Result<CriterionInstance> {
    if dim < len + 2 {
        return Err(LabError::InvalidParams(format!("dimension {dim} cannot hold F^{len} (f_0 + f_1)")));
    }
    let samples = vec![SparseVector::single(0u8, 1.0), SparseVector::from_entries([(0u8, 1.0), (1u8, 1.0)])];
    let n_seq: Vec<usize> = (1..=len).collect();
    let s = n_seq
        .iter()
        .map(|&n| LinearMap::ScaledShift { scale: if broken { 1.0 } else { 2f64.powi(-(n as i32)) }, power: n as i64 })
        .collect();
    Ok(CriterionInstance {
        name: if broken { "rolewicz-broken" } else { "rolewicz" }.to_string(),
        operator: OperatorMatrix::backward_shift(dim, 2.0),
        d: samples.clone(),
        d_prime: samples,
        n_seq,
        s,
        space: SpaceNorm::L1,
    })
}

pub const HC_FORWARD: &str = "(i)";
pub const HC_INVERSE: &str = "(ii)";
pub const HC_IDENTITY: &str = "(iii)";

/// Measures `max ||T^{n_k} x||` over `D`, `max ||S_{n_k} y||` and
/// `max ||T^{n_k} S_{n_k} y - y||` over `D'` for every `k`. Rows before the
/// last `k` are informational (bound `inf`); the last row of each condition
/// must be at most `tol`.
pub fn check_hc_criterion(instance: &CriterionInstance, tol: f64) -> Result<CheckReport> {
    instance.validate()?;
    if !(tol >= 0.0) {
        return Err(LabError::InvalidParams(format!("tolerance must be non-negative, got {tol}")));
    }
    let space = instance.space;
    let t = &instance.operator;
    let last = instance.n_seq.len();
    let locate = |e: LabError, which: &str, i: usize, k: usize| match e {
        LabError::Truncation(msg) => LabError::Truncation(format!("sample {which}[{i}] at k = {k}: {msg}")),
        other => other,
    };
    let mut forward = Vec::with_capacity(last);
    let mut inverse = Vec::with_capacity(last);
    let mut identity = Vec::with_capacity(last);
    for (idx, (&n, s)) in instance.n_seq.iter().zip(&instance.s).enumerate() {
        let k = idx + 1;
        let mut m = 0.0f64;
        for (i, x) in instance.d.iter().enumerate() {
            let tx = apply_power(t, x, n).map_err(|e| locate(e, "D", i, k))?;
            m = m.max(tx.norm(space));
        }
        forward.push(m);
        let (mut m2, mut m3) = (0.0f64, 0.0f64);
        for (i, y) in instance.d_prime.iter().enumerate() {
            let sy = s.apply(y).map_err(|e| locate(e, "D'", i, k))?;
            m2 = m2.max(sy.norm(space));
            let tsy = apply_power(t, &sy, n).map_err(|e| locate(e, "D'", i, k))?;
            m3 = m3.max((&tsy - y).norm(space));
        }
        inverse.push(m2);
        identity.push(m3);
    }
    let mut rows = Vec::with_capacity(3 * last);
    for (condition, values) in [(HC_FORWARD, forward), (HC_INVERSE, inverse), (HC_IDENTITY, identity)] {
        for (idx, v) in values.into_iter().enumerate() {
            let (bound, pass) = if idx + 1 == last { (tol, v <= tol) } else { (f64::INFINITY, true) };
            rows.push(CheckRow { condition: condition.to_string(), k: idx as u32 + 1, max_norm: v, bound, pass });
        }
    }
    Ok(CheckReport::from_rows(&format!("hc:{}", instance.name), rows))
}
