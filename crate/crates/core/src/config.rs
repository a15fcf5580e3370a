//! Tolerances and tuning knobs, with their defaults, in one place.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Double-point search ([`crate::intersect::find_double_points`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublePointConfig<T: Real> {
    /// Working disk radius; at most 0.9.
    pub radius: T,
    /// Grid points per side on each level.
    pub grid_n: usize,
    /// Number of nested grids, each covering a quarter of the previous radius.
    pub levels: usize,
    /// Seed pairs with `|F(zᵢ) − F(zⱼ)| < seed_factor · h · (λᵢ + λⱼ)`.
    pub seed_factor: T,
    pub newton_tol: T,
    pub max_iter: usize,
    /// Pairs closer than this in the parameter disk are diagonal artifacts.
    pub pair_sep_tol: T,
    pub dedup_tol: T,
    /// Normalized determinant threshold for [`crate::intersect::is_transverse`].
    pub det_tol: T,
    /// Double points with a preimage beyond `(1 − boundary_margin) · radius` are flagged.
    pub boundary_margin: T,
    /// Search even if the data has branch points in the disk.
    pub allow_branch_points: bool,
    /// With `allow_branch_points`, discard pairs with a preimage this close to a branch point.
    pub branch_exclusion: T,
}

impl<T: Real> Default for DoublePointConfig<T> {
    fn default() -> Self {
        Self {
            radius: T::lit(0.5),
            grid_n: 160,
            levels: 5,
            seed_factor: T::one(),
            newton_tol: T::lit(1e-12).max(T::epsilon() * T::lit(100.0)),
            max_iter: 50,
            pair_sep_tol: T::lit(1e-5),
            dedup_tol: T::lit(1e-6),
            det_tol: T::lit(1e-6),
            boundary_margin: T::lit(0.05),
            allow_branch_points: false,
            branch_exclusion: T::lit(1e-3),
        }
    }
}

/// Rejection sampler ([`crate::deformation::sample_generic`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig<T: Real> {
    pub retry_budget: usize,
    pub root_sep_tol: T,
    /// Also require every double point of the deformed map to be transverse.
    pub require_transverse: bool,
    pub search: DoublePointConfig<T>,
}

impl<T: Real> Default for SamplerConfig<T> {
    fn default() -> Self {
        Self {
            retry_budget: 1000,
            root_sep_tol: T::lit(1e-6),
            require_transverse: true,
            search: DoublePointConfig::default(),
        }
    }
}

/// Level-set tracing ([`crate::knot::trace_slice`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig<T: Real> {
    /// Arc-length step in the parameter disk, relative to the seed radius.
    pub rel_step: T,
    /// Corrector stops once `|‖F‖ − η| ≤ trace_tol · η`.
    pub trace_tol: T,
    pub max_corrector_iter: usize,
    pub max_steps: usize,
    /// Number of seeding rays.
    pub rays: usize,
    /// Samples per braid strand.
    pub samples_per_strand: usize,
}

impl<T: Real> Default for TraceConfig<T> {
    fn default() -> Self {
        Self {
            rel_step: T::lit(0.01),
            trace_tol: T::lit(1e-11).max(T::epsilon() * T::lit(100.0)),
            max_corrector_iter: 30,
            max_steps: 200_000,
            rays: 32,
            samples_per_strand: 512,
        }
    }
}

/// Knot invariants and the double-point identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotConfig<T: Real> {
    pub trace: TraceConfig<T>,
    /// Pushoff distance relative to the smallest distance between far-apart parts of the knot.
    pub pushoff_rel: T,
    /// Fixed angle of the pushoff direction in the `(x₃,x₄)`-plane.
    pub pushoff_angle: T,
    /// `|gauss − round(gauss)|` must stay below this.
    pub linking_tol: T,
    /// Maximal number of sample doublings while waiting for `e` to stabilize.
    pub max_refinements: usize,
}

impl<T: Real> Default for KnotConfig<T> {
    fn default() -> Self {
        Self {
            trace: TraceConfig::default(),
            pushoff_rel: T::lit(0.2),
            pushoff_angle: T::lit(0.7),
            linking_tol: T::lit(0.1),
            max_refinements: 3,
        }
    }
}
