use serde::Serialize;

use super::witness::CriterionWitness;
use crate::error::{LabError, Result};
use crate::operator::ExpansionTable;
use crate::poly::Polynomial;
use crate::vector::{SpaceNorm, SparseVector};

/// Agreement required between a supplied vector and `a(T) e_0`.
const ORBIT_MATCH_TOL: f64 = 1e-12;

/// A vector together with the polynomial `a` claimed to give `a(T) e_0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitPoint {
    pub vector: SparseVector,
    pub poly: Polynomial,
}

impl OrbitPoint {
    pub fn new(table: &ExpansionTable, poly: Polynomial) -> Result<Self> {
        Ok(OrbitPoint { vector: table.poly_orbit_vector(&poly)?, poly })
    }

    /// Unchecked pairing; [`ball_condition_search`] verifies it.
    pub fn from_parts(vector: SparseVector, poly: Polynomial) -> Self {
        OrbitPoint { vector, poly }
    }

    fn verify(&self, table: &ExpansionTable, space: SpaceNorm, name: &str) -> Result<()> {
        let expected = table.poly_orbit_vector(&self.poly)?;
        let diff = (&self.vector - &expected).norm(space);
        if diff > ORBIT_MATCH_TOL * expected.norm(space).max(1.0) {
            return Err(LabError::UnsupportedVector(format!(
                "{name} differs from {}(T)e_0 by {diff}",
                self.poly
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallCertificate {
    pub k: u32,
    /// `p = q_k`.
    pub p: Polynomial,
    /// `w' = 2^{-k} T^{i_k} b(T) e_0`.
    pub w_prime: SparseVector,
    /// `||p(T) u||`.
    pub norm_p_u: f64,
    pub norm_w_prime: f64,
    /// `||p(T) w' - v||`.
    pub norm_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum BallSearchOutcome {
    Found(BallCertificate),
    NotFound,
}

impl BallSearchOutcome {
    pub fn certificate(&self) -> Option<&BallCertificate> {
        match self {
            BallSearchOutcome::Found(c) => Some(c),
            BallSearchOutcome::NotFound => None,
        }
    }
}

/// Looks for `p = q_k` with `p(T)(B(u, r))` meeting `W = B(0, rho)` and
/// `p(T)(W)` meeting `B(v, r)`: the first `k` with `||p(T) u|| < rho`,
/// `||w'|| < rho` and `||p(T) w' - v|| < r`, all evaluated directly.
pub fn ball_condition_search(
    table: &ExpansionTable,
    u: &OrbitPoint,
    v: &OrbitPoint,
    r: f64,
    rho: f64,
    witness: &CriterionWitness,
    space: SpaceNorm,
) -> Result<BallSearchOutcome> {
    if !(r > 0.0 && rho > 0.0) {
        return Err(LabError::InvalidParams(format!("radii must be positive, got r = {r}, rho = {rho}")));
    }
    u.verify(table, space, "u")?;
    v.verify(table, space, "v")?;
    for row in &witness.rows {
        let half = 2f64.powi(-(row.k as i32));
        let p = Polynomial::monomial(half, row.j_k.clone());
        let norm_p_u = table.poly_orbit_vector(&(&p * &u.poly))?.norm(space);
        if !(norm_p_u < rho) {
            continue;
        }
        let w_poly = &Polynomial::monomial(half, row.i_k.clone()) * &v.poly;
        let w_prime = table.poly_orbit_vector(&w_poly)?;
        let norm_w_prime = w_prime.norm(space);
        if !(norm_w_prime < rho) {
            continue;
        }
        let image = table.poly_orbit_vector(&(&p * &w_poly))?;
        let norm_residual = (&image - &v.vector).norm(space);
        if norm_residual < r {
            return Ok(BallSearchOutcome::Found(BallCertificate {
                k: row.k,
                p,
                w_prime,
                norm_p_u,
                norm_w_prime,
                norm_residual,
            }));
        }
    }
    Ok(BallSearchOutcome::NotFound)
}
