//! The knot `K^η = F(𝔻) ∩ 𝕊_η` of a branch point, its braid presentation
//! around the axis `{x₁ = x₂ = 0}`, and the identity `2D = e(K) − (N − 1)`.

mod braid;
mod linking;
mod trace;
mod verify;

pub use braid::{algebraic_crossing_number, braid_from_knot, BraidDiagram, Crossing};
pub use linking::{contact_transversality_margin, linking_number_gauss, pushoff, self_linking};
pub use trace::trace_slice;
pub use verify::{
    evaluate_double_point_formula, knot_invariants, negative_orientation_report, select_eta,
    verify_double_point_formula, KnotAnalysis, KnotReport, NegativeOrientationReport, VerifyReport,
};

use serde::{Deserialize, Serialize};

use crate::linalg::Vec4;
use crate::scalar::{Real, C};

/// One closed component of the slice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct KnotLoop<T: Real> {
    /// Points of the unit sphere, `F(z)/η` renormalized.
    pub points: Vec<Vec4<T>>,
    pub preimages: Vec<C<T>>,
    /// Unwrapped fiber angle `arg(F₁ + iF₂)` at each sample.
    pub theta: Vec<T>,
}

impl<T: Real> KnotLoop<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Fiber coordinate `F₃ + iF₄` of each (normalized) sample.
    pub fn fiber_positions(&self) -> Vec<C<T>> {
        self.points.iter().map(|q| C::new(q[2], q[3])).collect()
    }
}

/// The slice as a union of closed polylines on the unit sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct KnotCurve<T: Real> {
    pub eta: T,
    pub loops: Vec<KnotLoop<T>>,
    /// Set after resampling: samples per full turn of the fiber angle,
    /// which sit at `θ = 2πp/M`.
    pub samples_per_turn: Option<usize>,
}

impl<T: Real> KnotCurve<T> {
    pub fn sample_count(&self) -> usize {
        self.loops.iter().map(KnotLoop::len).sum()
    }

    /// Number of turns of `F₁ + iF₂` around 0 along each loop.
    pub fn windings(&self) -> Vec<i64> {
        self.loops
            .iter()
            .map(|l| {
                let n = l.theta.len();
                if n < 2 {
                    return 0;
                }
                let first = l.theta[0];
                let last = l.theta[n - 1];
                // closing increment, wrapped into (−π, π]
                let mut close = first - last;
                let two_pi = T::TAU();
                close = close - two_pi * (close / two_pi).round();
                ((last - first + close) / two_pi)
                    .round()
                    .to_i64()
                    .unwrap_or(0)
            })
            .collect()
    }

    /// Total winding of `F₁ + iF₂`: the number of braid strands.
    pub fn winding(&self) -> i64 {
        self.windings().iter().sum()
    }
}
