//! Independent oracles and generators shared by the property suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use dfusion::{DNumber, FocalElement, Frame, Trapezoid};
use num_rational::Ratio;
use proptest::prelude::*;

pub const LABELS: [&str; 4] = ["a", "b", "c", "d"];

/// Membership written from the definition as `clamp(min(rise, fall), 0, 1)`.
fn oracle_membership([a, b, c, d]: [f64; 4], x: f64) -> f64 {
    let rise = if b > a {
        (x - a) / (b - a)
    } else if x >= a {
        1.0
    } else {
        0.0
    };
    let fall = if d > c {
        (d - x) / (d - c)
    } else if x <= d {
        1.0
    } else {
        0.0
    };
    rise.min(fall).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy)]
pub struct RiemannAreas {
    pub first: f64,
    pub second: f64,
    pub intersection: f64,
    pub union: f64,
}

/// Midpoint Riemann sums with `cells` intervals over the joint support.
pub fn riemann_areas(t1: &Trapezoid, t2: &Trapezoid, cells: usize) -> RiemannAreas {
    let (p1, p2) = (t1.params(), t2.params());
    let lo = p1[0].min(p2[0]);
    let hi = p1[3].max(p2[3]);
    let h = (hi - lo) / cells as f64;
    let (mut s1, mut s2, mut smin, mut smax) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..cells {
        let x = lo + (i as f64 + 0.5) * h;
        let (u, v) = (oracle_membership(p1, x), oracle_membership(p2, x));
        s1 += u;
        s2 += v;
        smin += u.min(v);
        smax += u.max(v);
    }
    RiemannAreas {
        first: s1 * h,
        second: s2 * h,
        intersection: smin * h,
        union: smax * h,
    }
}

/// Trapezoids on `[-5, 8]`, edges possibly vertical.
pub fn any_trapezoid() -> impl Strategy<Value = Trapezoid> {
    let width = prop_oneof![1 => Just(0.0), 4 => 0.0..3.0f64];
    (-5.0..5.0f64, width.clone(), 0.0..3.0f64, width).prop_map(|(a, rise, top, fall)| {
        Trapezoid::new(a, a + rise, a + rise + top, a + rise + top + fall).unwrap()
    })
}

/// Trapezoids with sloped edges of width at least 0.05, so a midpoint sum
/// converges quadratically.
pub fn sloped_trapezoid() -> impl Strategy<Value = Trapezoid> {
    (-5.0..5.0f64, 0.05..3.0f64, 0.0..3.0f64, 0.05..3.0f64).prop_map(|(a, rise, top, fall)| {
        Trapezoid::new(a, a + rise, a + rise + top, a + rise + top + fall).unwrap()
    })
}

pub fn frame_of(n: usize) -> Frame {
    Frame::new(LABELS[..n].iter().copied()).unwrap()
}

pub fn focal_of(mask: u32) -> FocalElement {
    FocalElement::new(
        LABELS
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, l)| *l),
    )
    .unwrap()
}

pub fn mask_of(f: &FocalElement) -> u32 {
    f.labels()
        .iter()
        .map(|l| 1u32 << LABELS.iter().position(|x| x == l).unwrap())
        .sum()
}

/// Integer weights per non-empty subset of an `n`-label frame, not all zero.
pub fn subset_weights(n: usize, max: u32) -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(0..=max, (1usize << n) - 1)
        .prop_filter("at least one focal element", |w| w.iter().any(|&x| x > 0))
}

/// Complete D number with masses `w / Σw` indexed by subset mask `i + 1`.
pub fn dnumber_from_weights(n: usize, weights: &[u32]) -> DNumber {
    let total: u32 = weights.iter().sum();
    let masses = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0)
        .map(|(i, &w)| (focal_of(i as u32 + 1), w as f64 / total as f64));
    DNumber::new(frame_of(n), masses).unwrap()
}

/// Complete D numbers on a frame of 1 to `max_frame` labels.
pub fn complete_dnumber(n: usize) -> impl Strategy<Value = DNumber> {
    subset_weights(n, 1000).prop_map(move |w| dnumber_from_weights(n, &w))
}

pub fn dnumber_triple(max_frame: usize) -> impl Strategy<Value = (DNumber, DNumber, DNumber)> {
    (1..=max_frame).prop_flat_map(|n| {
        (
            complete_dnumber(n),
            complete_dnumber(n),
            complete_dnumber(n),
        )
    })
}

pub fn dnumber_pair(max_frame: usize) -> impl Strategy<Value = (DNumber, DNumber)> {
    (1..=max_frame).prop_flat_map(|n| (complete_dnumber(n), complete_dnumber(n)))
}

/// Exact combination by enumerating every pair of subsets, in rational
/// arithmetic. `None` on total conflict.
pub fn exact_combination(w1: &[u32], w2: &[u32]) -> Option<BTreeMap<u32, Ratio<i128>>> {
    let mut joint: BTreeMap<u32, i128> = BTreeMap::new();
    let mut agreement: i128 = 0;
    for (i, &x) in w1.iter().enumerate() {
        for (j, &y) in w2.iter().enumerate() {
            let meet = (i as u32 + 1) & (j as u32 + 1);
            let product = x as i128 * y as i128;
            if meet != 0 && product != 0 {
                *joint.entry(meet).or_insert(0) += product;
                agreement += product;
            }
        }
    }
    (agreement != 0).then(|| {
        joint
            .into_iter()
            .map(|(k, v)| (k, Ratio::new(v, agreement)))
            .collect()
    })
}

pub fn ratio_to_f64(r: &Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
