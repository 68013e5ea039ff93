//! Lazy expansion of the orbit `e_j = T^j e_0` in the f-basis, polynomial
//! calculus on `e_0`, and a dense truncation used to cross-check both.
//!
//! Expansion rules:
//!
//! * `e_0 = f_0`;
//! * lay-off `[nu + 1, nu + l]`: `e_j = 2^{-(l/2 + nu + 1 - j)/sqrt(l)} f_j`;
//! * fan `n`, `j = c_n + i` with `0 <= i <= nu_n`:
//!   `e_j = gamma_n f_j + sum_m a_m e_{m+i}` where `p_n = sum_m a_m X^m`.
//!
//! Every index referenced by a fan vector is strictly below `c_n`, so the
//! recursion terminates, and the f-expansion of `e_j` is supported in
//! `[0, j]` with a nonzero coefficient at `j`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::poly::Polynomial;
use crate::schedule::{Block, IntervalSchedule};
use crate::vector::{SpaceNorm, SparseVector};

/// Largest truncation accepted by [`build_dense_matrix`].
pub const MAX_DENSE_DIM: usize = 4096;

/// Memoized f-expansions of the orbit vectors of one schedule.
///
/// Only fan vectors are cached; lay-off vectors are single entries and are
/// recomputed on demand. The cache is behind a lock so a table can be shared
/// across threads; an entry computed twice by racing readers is identical.
#[derive(Debug)]
pub struct ExpansionTable {
    schedule: Arc<IntervalSchedule>,
    memo: RwLock<HashMap<BigUint, Arc<SparseVector>>>,
}

impl ExpansionTable {
    pub fn new(schedule: impl Into<Arc<IntervalSchedule>>) -> Self {
        ExpansionTable { schedule: schedule.into(), memo: RwLock::new(HashMap::new()) }
    }

    pub fn schedule(&self) -> &IntervalSchedule {
        &self.schedule
    }

    pub fn cached_entries(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }

    fn out_of_range(&self, j: &BigUint) -> LabError {
        LabError::OutOfRange { index: j.to_string(), total: self.schedule.total_length().to_string() }
    }

    /// The f-expansion of `e_j`.
    pub fn expand_e(&self, j: &BigUint) -> Result<SparseVector> {
        Ok((*self.expand_shared(j)?).clone())
    }

    fn expand_shared(&self, j: &BigUint) -> Result<Arc<SparseVector>> {
        let block = self.schedule.locate(j).ok_or_else(|| self.out_of_range(j))?;
        match block {
            Block::Origin => Ok(Arc::new(SparseVector::single(0u8, 1.0))),
            Block::Layoff(l) => {
                let coef = l.coefficient(j)?;
                if coef == 0.0 || !coef.is_finite() {
                    return Err(LabError::NumericRange(format!(
                        "lay-off coefficient of e_{j} ({}) is not representable",
                        l.log2_coefficient(j)?
                    )));
                }
                Ok(Arc::new(SparseVector::single(j.clone(), coef)))
            }
            Block::Fan(f) => {
                if let Some(v) = self.memo.read().expect("memo lock").get(j) {
                    return Ok(Arc::clone(v));
                }
                let i = j - &f.c;
                let mut v = SparseVector::single(j.clone(), f.gamma);
                for (m, a) in f.p.terms() {
                    let sub = self.expand_shared(&(m + &i))?;
                    v.axpy(a, &sub);
                }
                let v = Arc::new(v);
                self.memo.write().expect("memo lock").insert(j.clone(), Arc::clone(&v));
                Ok(v)
            }
        }
    }

    pub fn expand_e_u64(&self, j: u64) -> Result<SparseVector> {
        self.expand_e(&BigUint::from(j))
    }

    /// `p(T) e_0 = sum_m a_m e_m`.
    pub fn poly_orbit_vector(&self, p: &Polynomial) -> Result<SparseVector> {
        if let Some(d) = p.degree() {
            if d > self.schedule.total_length() {
                return Err(self.out_of_range(d));
            }
        }
        let mut out = SparseVector::zero();
        for (m, a) in p.terms() {
            out.axpy(a, &*self.expand_shared(m)?);
        }
        Ok(out)
    }

    /// Base-2 logarithm of `||e_j||` for a lay-off index, `None` elsewhere.
    pub fn layoff_log2_norm(&self, j: &BigUint) -> Result<Option<f64>> {
        match self.schedule.locate(j).ok_or_else(|| self.out_of_range(j))? {
            Block::Layoff(l) => Ok(Some(l.log2_coefficient(j)?)),
            _ => Ok(None),
        }
    }

    /// `||e_j||`; lay-off vectors are evaluated in the log domain without
    /// building the vector.
    pub fn orbit_norm(&self, j: &BigUint, space: SpaceNorm) -> Result<f64> {
        match self.layoff_log2_norm(j)? {
            Some(log2) => Ok(log2.exp2()),
            None => Ok(self.expand_shared(j)?.norm(space)),
        }
    }
}

/// `T` restricted to `span(f_0, ..., f_{N-1})`: column `j` is the
/// f-expansion of `T f_j`. Only the columns whose image stays inside the
/// truncation are present.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorMatrix {
    dim: usize,
    columns: Vec<SparseVector>,
}

impl OperatorMatrix {
    /// Checks that every column lies in `[0, dim)` and that there are at
    /// most `dim` columns.
    pub fn from_columns(dim: usize, columns: Vec<SparseVector>) -> Result<Self> {
        if columns.len() > dim {
            return Err(LabError::Capacity(format!("{} columns for dimension {dim}", columns.len())));
        }
        for (j, col) in columns.iter().enumerate() {
            if let Some(top) = col.max_index() {
                if top.to_usize().is_none_or(|t| t >= dim) {
                    return Err(LabError::Truncation(format!(
                        "column {j} reaches index {top} outside dimension {dim}"
                    )));
                }
            }
        }
        Ok(OperatorMatrix { dim, columns })
    }

    pub fn zero(dim: usize) -> Self {
        OperatorMatrix { dim, columns: vec![SparseVector::zero(); dim] }
    }

    /// `f_j -> weight * f_{j+1}` on `span(f_0, ..., f_{dim-1})`; the last
    /// column is absent since its image leaves the truncation.
    pub fn forward_shift(dim: usize, weight: f64) -> Self {
        let columns = (0..dim.saturating_sub(1)).map(|j| SparseVector::single(j + 1, weight)).collect();
        OperatorMatrix { dim, columns }
    }

    /// `f_0 -> 0`, `f_j -> weight * f_{j-1}`.
    pub fn backward_shift(dim: usize, weight: f64) -> Self {
        let columns = (0..dim)
            .map(|j| if j == 0 { SparseVector::zero() } else { SparseVector::single(j - 1, weight) })
            .collect();
        OperatorMatrix { dim, columns }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn columns(&self) -> &[SparseVector] {
        &self.columns
    }

    /// Number of basis vectors whose image is known.
    pub fn domain_len(&self) -> usize {
        self.columns.len()
    }
}

/// Builds `T` on `span(f_0, ..., f_{N-1})` from `T e_j = e_{j+1}` by
/// solving the triangular change of basis column by column:
/// `T f_j = (e_{j+1} - sum_{i<j} E_{ij} T f_i) / E_{jj}`.
pub fn build_dense_matrix(schedule: impl Into<Arc<IntervalSchedule>>, n: usize) -> Result<OperatorMatrix> {
    let schedule = schedule.into();
    if n > MAX_DENSE_DIM {
        return Err(LabError::Capacity(format!("dimension {n} exceeds {MAX_DENSE_DIM}")));
    }
    if n == 0 || BigUint::from(n - 1) > *schedule.total_length() {
        return Err(LabError::Capacity(format!(
            "dimension {n} does not fit the schedule (total length {})",
            schedule.total_length()
        )));
    }
    let table = ExpansionTable::new(schedule);
    let mut columns: Vec<SparseVector> = Vec::with_capacity(n.saturating_sub(1));
    for j in 0..n.saturating_sub(1) {
        let ej = table.expand_e_u64(j as u64)?;
        let jj = BigUint::from(j);
        let diag = ej.get(&jj);
        if diag == 0.0 {
            return Err(LabError::Internal(format!("zero diagonal in the change of basis at {j}")));
        }
        let mut col = table.expand_e_u64(j as u64 + 1)?;
        for (i, e) in ej.iter() {
            if *i == jj {
                continue;
            }
            let i = i.to_usize().expect("index below j");
            col.axpy(-e, &columns[i]);
        }
        columns.push(col.scaled(1.0 / diag));
    }
    OperatorMatrix::from_columns(n, columns)
}

/// `sum_j x_j T f_j`. Fails rather than dropping mass when `x` has support
/// outside the known columns.
pub fn apply_matrix(t: &OperatorMatrix, x: &SparseVector) -> Result<SparseVector> {
    let mut out = SparseVector::zero();
    for (j, c) in x.iter() {
        let col = j.to_usize().and_then(|j| t.columns.get(j)).ok_or_else(|| {
            LabError::Truncation(format!(
                "entry at index {j} has no image inside dimension {} ({} columns)",
                t.dim,
                t.columns.len()
            ))
        })?;
        out.axpy(c, col);
    }
    Ok(out)
}

/// `T^k x` by repeated application.
pub fn apply_power(t: &OperatorMatrix, x: &SparseVector, k: usize) -> Result<SparseVector> {
    let mut v = x.clone();
    for _ in 0..k {
        if v.is_empty() {
            break;
        }
        v = apply_matrix(t, &v)?;
    }
    Ok(v)
}

/// Exact L1 operator norm of the truncation: the largest column L1 norm.
pub fn operator_norm_l1(t: &OperatorMatrix) -> f64 {
    t.columns.iter().map(|c| c.norm(SpaceNorm::L1)).fold(0.0, f64::max)
}

/// Relative distance `||a - b|| / max(||b||, tiny)`.
pub fn relative_error(a: &SparseVector, b: &SparseVector, space: SpaceNorm) -> f64 {
    let denom = b.norm(space);
    let diff = (a - b).norm(space);
    if denom.is_zero() {
        diff
    } else {
        diff / denom
    }
}
