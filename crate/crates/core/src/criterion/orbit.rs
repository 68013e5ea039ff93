use serde::Serialize;

use crate::error::{LabError, Result};
use crate::operator::{apply_matrix, OperatorMatrix};
use crate::vector::{SpaceNorm, SparseVector};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HitRow {
    pub start: usize,
    pub target: usize,
    /// Smallest `n` with `||T^n x - u|| < eps`, `None` for a miss.
    pub first_hit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairHitRow {
    pub starts: (usize, usize),
    pub targets: (usize, usize),
    /// Smallest `n` with both coordinates of `(T ⊕ T)^n (x, y)` within `eps`.
    pub first_hit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HitReport {
    pub singles: Vec<HitRow>,
    pub pairs: Vec<PairHitRow>,
}

/// First hit times of orbits `T^n x`, `0 <= n <= horizon`, in the `eps`
/// ball around each target, for every start and every target, and of the
/// diagonal orbits `(T^n x, T^n y)` for every ordered pair of starts against
/// every ordered pair of targets.
pub fn orbit_hitting_report(
    t: &OperatorMatrix,
    starts: &[SparseVector],
    targets: &[SparseVector],
    eps: f64,
    horizon: usize,
    space: SpaceNorm,
) -> Result<HitReport> {
    if !(eps > 0.0) {
        return Err(LabError::InvalidParams(format!("eps must be positive, got {eps}")));
    }
    // dist[s][n][t] = ||T^n x_s - u_t||
    let mut dist: Vec<Vec<Vec<f64>>> = Vec::with_capacity(starts.len());
    for (s, x) in starts.iter().enumerate() {
        let mut rows = Vec::new();
        let mut v = x.clone();
        for n in 0..=horizon {
            let d: Vec<f64> = targets.iter().map(|u| (&v - u).norm(space)).collect();
            rows.push(d);
            if n == horizon {
                break;
            }
            v = apply_matrix(t, &v)
                .map_err(|e| LabError::Truncation(format!("start {s} at n = {}: {e}", n + 1)))?;
        }
        dist.push(rows);
    }
    let first = |s: usize, ti: usize| dist[s].iter().position(|r| r[ti] < eps);
    let mut singles = Vec::new();
    for s in 0..starts.len() {
        for ti in 0..targets.len() {
            singles.push(HitRow { start: s, target: ti, first_hit: first(s, ti) });
        }
    }
    let mut pairs = Vec::new();
    for a in 0..starts.len() {
        for b in 0..starts.len() {
            for c in 0..targets.len() {
                for d in 0..targets.len() {
                    let first_hit = (0..=horizon).find(|&n| dist[a][n][c] < eps && dist[b][n][d] < eps);
                    pairs.push(PairHitRow { starts: (a, b), targets: (c, d), first_hit });
                }
            }
        }
    }
    Ok(HitReport { singles, pairs })
}
