//! The fan polynomial sequence `(p_n)`.
//!
//! The sequence is split into segments. Segment `s` opens with one base item
//! and continues with a run of `4s - 2` doubling requests, each asking for
//! `2 X^{c_m}` where `m` is the fan immediately before it. A run therefore
//! realizes a whole doubling chain `q, 2q, 4q, ...` on consecutive fans with
//! geometrically shrinking `gamma`.
//!
//! The base item of segment `s` is entry `v2(s)` of the master grid list
//! (`v2` = number of trailing zero bits), so every grid polynomial is the
//! base of infinitely many segments, with runs of unbounded length.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::FanOrigin;
use crate::poly::Polynomial;

/// First segment whose base slot may be taken by an explicit request.
const FIRST_REQUEST_SEGMENT: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FanItem {
    Base { poly: Polynomial, origin: FanOrigin },
    /// `2 X^{c_m}` for fan `m` (1-based).
    Doubling { of_fan: usize },
}

/// Lazily generated list of all grid polynomials of modulus at most 2.
///
/// Level `L` holds the polynomials of degree at most `L - 1` whose
/// coefficients are multiples of `2^(1-L)` and which do not already occur at
/// level `L - 1`; inside a level the order is by degree, then
/// lexicographic on coefficients (constant first) with `0 < 1 < -1 < 2 < -2 < ...`.
#[derive(Debug, Clone, Default)]
pub struct MasterGrid {
    items: Vec<Polynomial>,
    levels_done: u32,
}

impl MasterGrid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, i: usize) -> &Polynomial {
        while self.items.len() <= i {
            self.levels_done += 1;
            let level = self.levels_done;
            self.items.extend(grid_level(level));
        }
        &self.items[i]
    }

    pub fn level(level: u32) -> Vec<Polynomial> {
        grid_level(level)
    }
}

fn grid_level(level: u32) -> Vec<Polynomial> {
    assert!((1..=5).contains(&level), "grid level {level} is too large to materialize");
    let budget = 1i64 << level;
    let step = 2f64.powi(1 - level as i32);
    let mut out = Vec::new();
    for degree in 0..level as usize {
        let mut cur = Vec::with_capacity(degree + 1);
        tuples(degree, budget, &mut cur, &mut |ks| {
            let coarser = level > 1 && degree + 2 <= level as usize && ks.iter().all(|k| k % 2 == 0);
            if !coarser {
                let coeffs: Vec<f64> = ks.iter().map(|&k| k as f64 * step).collect();
                out.push(Polynomial::from_coeffs(&coeffs));
            }
        });
    }
    out
}

/// Values in key order: 0, 1, -1, 2, -2, ...
fn key_order(max_abs: i64, allow_zero: bool) -> impl Iterator<Item = i64> {
    let zero = allow_zero.then_some(0);
    zero.into_iter().chain((1..=max_abs).flat_map(|a| [a, -a]))
}

fn tuples(degree: usize, remaining: i64, cur: &mut Vec<i64>, emit: &mut dyn FnMut(&[i64])) {
    let pos = cur.len();
    let last = pos == degree;
    for k in key_order(remaining, !last) {
        cur.push(k);
        if last {
            emit(cur);
        } else {
            tuples(degree, remaining - k.abs(), cur, emit);
        }
        cur.pop();
    }
}

#[derive(Debug, Clone)]
pub struct FanEnumerator {
    grid: MasterGrid,
    requests: VecDeque<Polynomial>,
    depth: u32,
    segment: usize,
    run_left: usize,
    position: usize,
}

impl FanEnumerator {
    pub fn new(requests: Vec<Polynomial>, base_grid_depth: u32) -> Self {
        FanEnumerator {
            grid: MasterGrid::new(),
            requests: requests.into(),
            depth: base_grid_depth,
            segment: 0,
            run_left: 0,
            position: 0,
        }
    }

    /// Number of items emitted so far.
    pub fn position(&self) -> usize {
        self.position
    }

    pub fn segment(&self) -> usize {
        self.segment
    }

    pub fn next_item(&mut self) -> FanItem {
        self.position += 1;
        if self.run_left > 0 {
            self.run_left -= 1;
            return FanItem::Doubling { of_fan: self.position - 1 };
        }
        self.segment += 1;
        self.run_left = 4 * self.segment - 2;
        if self.segment >= FIRST_REQUEST_SEGMENT {
            if let Some(r) = self.requests.pop_front() {
                return FanItem::Base { poly: r.round_to_grid(self.depth), origin: FanOrigin::Requested };
            }
        }
        let idx = self.segment.trailing_zeros() as usize;
        FanItem::Base { poly: self.grid.get(idx).clone(), origin: FanOrigin::BaseGrid }
    }
}

impl Iterator for FanEnumerator {
    type Item = FanItem;

    fn next(&mut self) -> Option<FanItem> {
        Some(self.next_item())
    }
}

/// Item `n` (1-based) of the fan sequence for the given requests.
pub fn enumerate_fan_polynomials(n: usize, requests: &[Polynomial], base_grid_depth: u32) -> FanItem {
    assert!(n >= 1, "fan numbers start at 1");
    let mut e = FanEnumerator::new(requests.to_vec(), base_grid_depth);
    let mut item = e.next_item();
    for _ in 1..n {
        item = e.next_item();
    }
    item
}
