//! Sparse vectors over the f-basis.
//!
//! Indices are unbounded non-negative integers; coefficients are `f64`.
//! An entry whose coefficient becomes exactly `0.0` is removed, so that
//! constructed cancellations leave no trace in the support.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

/// The norm used on the ambient sequence space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceNorm {
    L1,
    L2,
    Sup,
}

impl SpaceNorm {
    pub const ALL: [SpaceNorm; 3] = [SpaceNorm::L1, SpaceNorm::L2, SpaceNorm::Sup];

    pub fn name(self) -> &'static str {
        match self {
            SpaceNorm::L1 => "l1",
            SpaceNorm::L2 => "l2",
            SpaceNorm::Sup => "sup",
        }
    }
}

impl std::str::FromStr for SpaceNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" => Ok(SpaceNorm::L1),
            "l2" => Ok(SpaceNorm::L2),
            "sup" | "linf" => Ok(SpaceNorm::Sup),
            other => Err(format!("unknown space norm `{other}` (expected l1, l2 or sup)")),
        }
    }
}

impl fmt::Display for SpaceNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    entries: BTreeMap<BigUint, f64>,
}

impl SparseVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `coef · f_index`; the zero vector when `coef == 0.0`.
    pub fn single(index: impl Into<BigUint>, coef: f64) -> Self {
        let mut v = Self::zero();
        v.add_entry(index.into(), coef);
        v
    }

    pub fn from_entries<I, K>(entries: I) -> Self
    where
        I: IntoIterator<Item = (K, f64)>,
        K: Into<BigUint>,
    {
        let mut v = Self::zero();
        for (k, c) in entries {
            v.add_entry(k.into(), c);
        }
        v
    }

    /// Adds `coef` to the entry at `index`, pruning an exact zero result.
    pub fn add_entry(&mut self, index: BigUint, coef: f64) {
        if coef == 0.0 {
            return;
        }
        match self.entries.entry(index) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = *e.get() + coef;
                if sum == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// `self += scale · other`
    pub fn axpy(&mut self, scale: f64, other: &SparseVector) {
        if scale == 0.0 {
            return;
        }
        for (k, c) in &other.entries {
            self.add_entry(k.clone(), scale * c);
        }
    }

    pub fn get(&self, index: &BigUint) -> f64 {
        self.entries.get(index).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (&BigUint, f64)> {
        self.entries.iter().map(|(k, c)| (k, *c))
    }

    pub fn max_index(&self) -> Option<&BigUint> {
        self.entries.keys().next_back()
    }

    pub fn norm(&self, space: SpaceNorm) -> f64 {
        let coefs = self.entries.values().map(|c| c.abs());
        match space {
            SpaceNorm::L1 => coefs.fold(0.0, |acc, c| acc + c),
            SpaceNorm::L2 => {
                // scaled to avoid overflow with very unequal magnitudes
                let scale = self.norm(SpaceNorm::Sup);
                if scale == 0.0 || !scale.is_finite() {
                    return scale;
                }
                scale * coefs.map(|c| (c / scale).powi(2)).fold(0.0, |acc, c| acc + c).sqrt()
            }
            SpaceNorm::Sup => coefs.fold(0.0, f64::max),
        }
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        let mut out = SparseVector::zero();
        out.axpy(factor, self);
        out
    }

    /// Moves every entry from index `k` to `k + by`.
    pub fn shifted(&self, by: &BigUint) -> SparseVector {
        SparseVector {
            entries: self.entries.iter().map(|(k, c)| (k + by, *c)).collect(),
        }
    }
}

impl Add for &SparseVector {
    type Output = SparseVector;

    fn add(self, rhs: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &SparseVector {
    type Output = SparseVector;

    fn sub(self, rhs: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &SparseVector {
    type Output = SparseVector;

    fn mul(self, rhs: f64) -> SparseVector {
        self.scaled(rhs)
    }
}

impl Neg for &SparseVector {
    type Output = SparseVector;

    fn neg(self) -> SparseVector {
        self.scaled(-1.0)
    }
}

pub fn norm(x: &SparseVector, space: SpaceNorm) -> f64 {
    x.norm(space)
}
