use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::operator::ExpansionTable;
use crate::poly::Polynomial;
use crate::vector::{SpaceNorm, SparseVector};

/// One index `k` of the witness sequences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessRow {
    pub k: u32,
    /// Fan with `||T^{c_n} e_0 - 4^k e_0|| < 1`.
    pub n_k: usize,
    pub c_k: BigUint,
    pub i_k: BigUint,
    pub j_k: BigUint,
    /// `||T^{c_{n_k}} e_0 - 4^k e_0||`.
    pub fan_error: f64,
    /// `||w_k|| = 2^{-k} ||e_{i_k}||`.
    pub norm_w: f64,
    /// `||q_k(T) e_0|| = 2^{-k} ||e_{j_k}||`.
    pub norm_q_e0: f64,
    /// `||q_k(T) w_k - e_0||`.
    pub norm_residual: f64,
    pub w: SparseVector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionWitness {
    pub space: SpaceNorm,
    pub rows: Vec<WitnessRow>,
}

/// Builds `w_k = 2^{-k} e_{i_k}` and `q_k = 2^{-k} X^{j_k}` for
/// `k = 1..=big_k`, where `c_k = i_k + j_k` is the first fan index after the
/// previous one with `T^{c_k} e_0` within distance 1 of `4^k e_0`. `K = 0`
/// gives the empty witness.
pub fn theorem2_witness(table: &ExpansionTable, big_k: u32, space: SpaceNorm) -> Result<CriterionWitness> {
    let schedule = table.schedule();
    let e0 = SparseVector::single(0u8, 1.0);
    let mut rows = Vec::with_capacity(big_k as usize);
    let mut after = 0usize;
    for k in 1..=big_k {
        let scale = 4f64.powi(k as i32);
        let mut found = None;
        for fan in schedule.fans().filter(|f| f.n > after) {
            let err = (&table.expand_e(&fan.c)? - &e0.scaled(scale)).norm(space);
            if err < 1.0 {
                found = Some((fan, err));
                break;
            }
        }
        let (fan, fan_error) = found.ok_or_else(|| {
            LabError::ScheduleExhausted(format!(
                "no fan after {after} approximates 4^{k} e_0; {} fans built",
                schedule.num_fans()
            ))
        })?;
        let half = 2f64.powi(-(k as i32));
        let i_k: BigUint = &fan.c >> 1u32;
        let j_k = &fan.c - &i_k;
        let norm_w = half * table.orbit_norm(&i_k, space)?;
        let norm_q_e0 = half * table.orbit_norm(&j_k, space)?;
        let w = table.expand_e(&i_k)?.scaled(half);
        let product = &Polynomial::monomial(half, j_k.clone()) * &Polynomial::monomial(half, i_k.clone());
        let norm_residual = (&table.poly_orbit_vector(&product)? - &e0).norm(space);
        rows.push(WitnessRow {
            k,
            n_k: fan.n,
            c_k: fan.c.clone(),
            i_k,
            j_k,
            fan_error,
            norm_w,
            norm_q_e0,
            norm_residual,
            w,
        });
        after = fan.n;
    }
    Ok(CriterionWitness { space, rows })
}
