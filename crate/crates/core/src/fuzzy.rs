//! Trapezoidal fuzzy numbers.
//!
//! A trapezoid `(a, b, c, d)` has membership 0 outside `[a, d]`, 1 on the
//! plateau `[b, c]`, and is linear on the two edges. Triangles (`b == c`),
//! rectangles (`a == b`, `c == d`) and crisp points (`a == d`) are all valid.
//!
//! The overlap measures used for exclusivity analysis are the exact areas
//! under the pointwise minimum and maximum of two membership functions. Both
//! are piecewise linear, so they are integrated in closed form over the merged
//! breakpoints of the two shapes plus every point where their edges cross.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Breakpoints closer than this are merged before integration.
pub const BREAKPOINT_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuzzyError {
    #[error("trapezoid parameters must be finite, got ({0}, {1}, {2}, {3})")]
    NonFinite(f64, f64, f64, f64),
    #[error("trapezoid parameters must satisfy a <= b <= c <= d, got ({0}, {1}, {2}, {3})")]
    Unordered(f64, f64, f64, f64),
    #[error("non-exclusive degree is undefined: union area is {0}")]
    UndefinedDegree(f64),
}

/// A trapezoidal membership function on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct Trapezoid {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Trapezoid {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, FuzzyError> {
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(FuzzyError::NonFinite(a, b, c, d));
        }
        if !(a <= b && b <= c && c <= d) {
            return Err(FuzzyError::Unordered(a, b, c, d));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn triangular(a: f64, peak: f64, d: f64) -> Result<Self, FuzzyError> {
        Self::new(a, peak, peak, d)
    }

    pub fn crisp(x: f64) -> Result<Self, FuzzyError> {
        Self::new(x, x, x, x)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn params(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `true` when the support collapses to a single point.
    pub fn is_crisp(&self) -> bool {
        self.a == self.d
    }

    /// Returns the same shape moved by `offset` along the axis.
    pub fn shifted(&self, offset: f64) -> Result<Self, FuzzyError> {
        Self::new(
            self.a + offset,
            self.b + offset,
            self.c + offset,
            self.d + offset,
        )
    }

    /// Degree of membership of `x`, in `[0, 1]`.
    ///
    /// A vertical edge (`a == b` or `c == d`) belongs to the plateau, so the
    /// membership at that point is 1.
    pub fn membership(&self, x: f64) -> f64 {
        if x < self.a || x > self.d {
            0.0
        } else if x >= self.b && x <= self.c {
            1.0
        } else if x < self.b {
            (x - self.a) / (self.b - self.a)
        } else {
            (self.d - x) / (self.d - self.c)
        }
    }

    /// Integral of the membership function over the real line.
    pub fn area(&self) -> f64 {
        ((self.d - self.a) + (self.c - self.b)) / 2.0
    }

    /// The linear piece of the membership function that is active on the
    /// open interval around `mid`, evaluated at `x`.
    ///
    /// Used for one-sided limits at jump discontinuities: integrating over
    /// `[x0, x1]` needs the values the piece takes on that interval, not the
    /// values at the endpoints themselves.
    fn piece_at(&self, mid: f64, x: f64) -> f64 {
        if mid <= self.a || mid >= self.d {
            0.0
        } else if mid < self.b {
            (x - self.a) / (self.b - self.a)
        } else if mid <= self.c {
            1.0
        } else {
            (self.d - x) / (self.d - self.c)
        }
    }
}

impl TryFrom<[f64; 4]> for Trapezoid {
    type Error = FuzzyError;

    fn try_from([a, b, c, d]: [f64; 4]) -> Result<Self, Self::Error> {
        Self::new(a, b, c, d)
    }
}

impl From<Trapezoid> for [f64; 4] {
    fn from(t: Trapezoid) -> Self {
        t.params()
    }
}

impl fmt::Display for Trapezoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.a, self.b, self.c, self.d)
    }
}

#[derive(Clone, Copy)]
enum Envelope {
    Lower,
    Upper,
}

impl Envelope {
    fn pick(self, u: f64, v: f64) -> f64 {
        match self {
            Envelope::Lower => u.min(v),
            Envelope::Upper => u.max(v),
        }
    }
}

/// Sorted union of both shapes' breakpoints, with near-duplicates merged.
fn merged_breakpoints(t1: &Trapezoid, t2: &Trapezoid) -> Vec<f64> {
    let mut xs: Vec<f64> = t1.params().into_iter().chain(t2.params()).collect();
    xs.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::with_capacity(xs.len());
    for x in xs {
        match merged.last() {
            Some(&last) if x - last <= BREAKPOINT_EPS => {}
            _ => merged.push(x),
        }
    }
    merged
}

/// Exact integral of `min(f1, f2)` or `max(f1, f2)`.
///
/// Between consecutive merged breakpoints both functions are linear, so the
/// envelope is linear except at a single possible crossing. The result is
/// bit-identical under argument swap: the breakpoint list is order-free, the
/// crossing formula is antisymmetric in `(f1, f2)`, and `min`/`max` commute.
fn envelope_area(t1: &Trapezoid, t2: &Trapezoid, envelope: Envelope) -> f64 {
    let xs = merged_breakpoints(t1, t2);
    let mut total = 0.0;
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let mid = 0.5 * (x0 + x1);
        let (u0, u1) = (t1.piece_at(mid, x0), t1.piece_at(mid, x1));
        let (v0, v1) = (t2.piece_at(mid, x0), t2.piece_at(mid, x1));
        let (g0, g1) = (u0 - v0, u1 - v1);
        let h0 = envelope.pick(u0, v0);
        let h1 = envelope.pick(u1, v1);
        if (g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0) {
            let xc = x0 + (x1 - x0) * (g0 / (g0 - g1));
            let hc = envelope.pick(t1.piece_at(mid, xc), t2.piece_at(mid, xc));
            total += 0.5 * (xc - x0) * (h0 + hc) + 0.5 * (x1 - xc) * (hc + h1);
        } else {
            total += 0.5 * (x1 - x0) * (h0 + h1);
        }
    }
    total
}

/// Area under the pointwise minimum of the two membership functions.
pub fn intersection_area(t1: &Trapezoid, t2: &Trapezoid) -> f64 {
    envelope_area(t1, t2, Envelope::Lower)
}

/// Area under the pointwise maximum of the two membership functions.
pub fn union_area(t1: &Trapezoid, t2: &Trapezoid) -> f64 {
    envelope_area(t1, t2, Envelope::Upper)
}

/// Ratio of intersection area to union area, in `[0, 1]`.
///
/// Two crisp points have zero union area; they are given degree 1 when they
/// coincide and 0 otherwise. `UndefinedDegree` is only returned when the
/// union area is not a finite number (supports too wide for `f64`).
pub fn non_exclusive_degree(t1: &Trapezoid, t2: &Trapezoid) -> Result<f64, FuzzyError> {
    if t1.is_crisp() && t2.is_crisp() {
        return Ok(if t1.a == t2.a { 1.0 } else { 0.0 });
    }
    let union = union_area(t1, t2);
    if !union.is_finite() || union <= 0.0 {
        return Err(FuzzyError::UndefinedDegree(union));
    }
    let inter = intersection_area(t1, t2);
    Ok((inter / union).clamp(0.0, 1.0))
}
