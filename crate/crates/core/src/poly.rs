//! Real polynomials with unbounded exponents.
//!
//! Stored sparsely: doubling requests have the form `2X^c` with `c` far
//! beyond any dense representation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::numeric::fmt_g17;

/// Degrees up to this bound are rendered as a dense coefficient list.
pub const DENSE_RENDER_LIMIT: u64 = 64;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    terms: BTreeMap<BigUint, f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, BigUint::zero())
    }

    pub fn monomial(coef: f64, exponent: impl Into<BigUint>) -> Self {
        let mut p = Self::zero();
        p.add_term(exponent.into(), coef);
        p
    }

    /// Dense coefficients, constant term first.
    pub fn from_coeffs(coeffs: &[f64]) -> Self {
        let mut p = Self::zero();
        for (i, &c) in coeffs.iter().enumerate() {
            p.add_term(BigUint::from(i), c);
        }
        p
    }

    pub fn add_term(&mut self, exponent: BigUint, coef: f64) {
        if coef == 0.0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exponent) {
            Entry::Vacant(e) => {
                e.insert(coef);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<&BigUint> {
        self.terms.keys().next_back()
    }

    /// Sum of the absolute values of the coefficients.
    pub fn modulus(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).fold(0.0, |acc, c| acc + c)
    }

    pub fn coeff(&self, exponent: &BigUint) -> f64 {
        self.terms.get(exponent).copied().unwrap_or(0.0)
    }

    /// Nonzero terms `(exponent, coefficient)` in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, f64)> {
        self.terms.iter().map(|(k, c)| (k, *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Dense coefficient list when the degree is at most `limit`; the zero
    /// polynomial gives an empty list.
    pub fn dense_coeffs(&self, limit: u64) -> Option<Vec<f64>> {
        let deg = match self.degree() {
            None => return Some(Vec::new()),
            Some(d) => d.to_u64().filter(|d| *d <= limit)?,
        };
        let mut out = vec![0.0; deg as usize + 1];
        for (k, c) in &self.terms {
            out[k.to_usize().expect("bounded degree")] = *c;
        }
        Some(out)
    }

    pub fn scaled(&self, factor: f64) -> Polynomial {
        let mut out = Polynomial::zero();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * factor);
        }
        out
    }

    /// Multiplies by `X^by`.
    pub fn shifted(&self, by: &BigUint) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(k, c)| (k + by, *c)).collect(),
        }
    }

    /// Rounds every coefficient to the nearest multiple of `2^(1-depth)`,
    /// the coefficient grid of base-grid level `depth`.
    pub fn round_to_grid(&self, depth: u32) -> Polynomial {
        let step = grid_step(depth);
        let mut out = Polynomial::zero();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), (c / step).round() * step);
        }
        out
    }

    /// Text form used by reports: a dense comma-separated coefficient list
    /// for small degrees, otherwise comma-separated `coef@exponent` terms.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        match self.dense_coeffs(DENSE_RENDER_LIMIT) {
            Some(dense) => dense.iter().map(|c| fmt_g17(*c)).collect::<Vec<_>>().join(","),
            None => self
                .terms
                .iter()
                .map(|(k, c)| format!("{}@{}", fmt_g17(*c), k))
                .collect::<Vec<_>>()
                .join(","),
        }
    }

    /// Parses the forms produced by [`Polynomial::render`]: a single
    /// constant, a dense comma-separated coefficient list, or `coef@exponent`
    /// terms.
    pub fn parse(s: &str) -> Result<Polynomial, String> {
        let s = s.trim();
        if s.is_empty() {
            return Err("empty polynomial".to_string());
        }
        let mut p = Polynomial::zero();
        for (i, item) in s.split(',').enumerate() {
            let item = item.trim();
            if let Some((c, e)) = item.split_once('@') {
                let coef: f64 = c.trim().parse().map_err(|_| format!("bad coefficient `{c}`"))?;
                let exp: BigUint = e.trim().parse().map_err(|_| format!("bad exponent `{e}`"))?;
                check_finite(coef, c)?;
                p.add_term(exp, coef);
            } else {
                let coef: f64 = item.parse().map_err(|_| format!("bad coefficient `{item}`"))?;
                check_finite(coef, item)?;
                p.add_term(BigUint::from(i), coef);
            }
        }
        Ok(p)
    }
}

fn check_finite(c: f64, text: &str) -> Result<(), String> {
    if c.is_finite() {
        Ok(())
    } else {
        Err(format!("non-finite coefficient `{text}`"))
    }
}

/// Coefficient spacing of base-grid level `depth` (level 1 is the integers).
pub fn grid_step(depth: u32) -> f64 {
    2f64.powi(1 - depth as i32)
}

pub fn poly_modulus(p: &Polynomial) -> f64 {
    p.modulus()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(k.clone(), c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &rhs.scaled(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (a, ca) in self.terms() {
            for (b, cb) in rhs.terms() {
                out.add_term(a + b, ca * cb);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn modulus_examples() {
        assert_eq!(Polynomial::zero().modulus(), 0.0);
        assert_eq!(Polynomial::monomial(2.0, 5u32).modulus(), 2.0);
        assert_eq!(Polynomial::from_coeffs(&[1.0, -3.0, 0.5]).modulus(), 4.5);
    }

    #[test]
    fn degree_and_trimming() {
        let p = Polynomial::from_coeffs(&[1.0, 0.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(&BigUint::from(2u32)));
        assert_eq!(p.dense_coeffs(10).unwrap(), vec![1.0, 0.0, 2.0]);
        assert_eq!(Polynomial::from_coeffs(&[0.0, 0.0]).degree(), None);
        assert!(Polynomial::from_coeffs(&[]).dense_coeffs(3).unwrap().is_empty());
    }

    #[test]
    fn cancellation_removes_term() {
        let p = Polynomial::from_coeffs(&[1.0, 2.0]);
        let q = Polynomial::monomial(-2.0, 1u32);
        assert_eq!((&p + &q).degree(), Some(&BigUint::zero()));
    }

    #[test]
    fn render_and_parse() {
        let p = Polynomial::from_coeffs(&[1.0, -3.0, 0.5]);
        assert_eq!(p.render(), "1,-3,0.5");
        assert_eq!(Polynomial::parse("1,-3,0.5").unwrap(), p);
        assert_eq!(Polynomial::parse("4").unwrap(), Polynomial::constant(4.0));
        let big = Polynomial::monomial(2.0, 1_115_202u32);
        assert_eq!(big.render(), "2@1115202");
        assert_eq!(Polynomial::parse(&big.render()).unwrap(), big);
        assert!(Polynomial::parse("1,x").is_err());
        assert!(Polynomial::parse("").is_err());
    }

    #[test]
    fn grid_rounding() {
        let p = Polynomial::from_coeffs(&[0.2222, -0.6667, 0.1111]);
        let r = p.round_to_grid(6);
        assert_eq!(r.dense_coeffs(8).unwrap(), vec![7.0 / 32.0, -21.0 / 32.0, 4.0 / 32.0]);
        assert_eq!(Polynomial::constant(0.2).round_to_grid(1), Polynomial::zero());
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(-10.0f64..10.0, 0..8).prop_map(|c| Polynomial::from_coeffs(&c))
    }

    proptest! {
        #[test]
        fn modulus_subadditive_and_homogeneous(p in arb_poly(), q in arb_poly(), c in -5.0f64..5.0) {
            prop_assert!((&p + &q).modulus() <= (p.modulus() + q.modulus()) * (1.0 + 1e-12));
            let lhs = p.scaled(c).modulus();
            prop_assert!((lhs - c.abs() * p.modulus()).abs() <= 1e-12 * (1.0 + lhs));
        }

        #[test]
        fn modulus_dominates_coefficients(p in arb_poly()) {
            for (_, c) in p.terms() {
                prop_assert!(c.abs() <= p.modulus());
            }
        }
    }
}
