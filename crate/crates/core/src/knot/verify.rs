//! Knot invariants of a slice and the double-point identity `2D = e(K) − (N − 1)`.

use serde::{Deserialize, Serialize};

use crate::config::{DoublePointConfig, KnotConfig};
use crate::deformation::{build_family_member, PerturbParams};
use crate::error::{Error, Result};
use crate::intersect::{find_double_points, is_transverse, DoublePoint};
use crate::linalg::norm4;
use crate::scalar::Real;
use crate::weierstrass::{Orientation, WeierstrassData};

use super::{
    algebraic_crossing_number, braid_from_knot, contact_transversality_margin,
    linking_number_gauss, self_linking, trace_slice, BraidDiagram, KnotCurve,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct KnotReport<T: Real> {
    pub eta: T,
    pub components: usize,
    /// `N`, the winding of `F₁ + iF₂` along the slice.
    pub strands: usize,
    pub crossings: usize,
    /// Algebraic crossing number of the braid.
    pub e: i64,
    /// `lk(K, K̂)` from the Gauss integral.
    pub gauss: T,
    pub sl: i64,
    pub margin_plus: T,
    pub margin_minus: T,
    pub samples_per_turn: usize,
    pub pushoff_delta: T,
}

impl<T: Real> KnotReport<T> {
    /// Both computations of `e` give the same integer, the Gauss value within `tol` of it.
    pub fn gauss_agrees(&self, tol: T) -> bool {
        let r = self.gauss.round();
        (self.gauss - r).abs() <= tol && r.to_i64() == Some(self.e)
    }
}

/// A report together with the resampled knot and its braid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct KnotAnalysis<T: Real> {
    pub report: KnotReport<T>,
    pub knot: KnotCurve<T>,
    pub braid: BraidDiagram<T>,
}

/// Trace the slice at `eta`, present it as a braid and compute `e`, `sl`,
/// the Gauss cross-check and both contact margins.
///
/// Strands start with `cfg.trace.samples_per_strand` samples, doubled until
/// the crossing number is the same for three consecutive resolutions.
pub fn knot_invariants<T: Real>(
    w: &WeierstrassData<T>,
    eta: T,
    cfg: &KnotConfig<T>,
) -> Result<KnotAnalysis<T>> {
    let traced = trace_slice(w, eta, &cfg.trace)?;
    let base_m = cfg.trace.samples_per_strand.max(8);
    let mut history: Vec<(KnotCurve<T>, BraidDiagram<T>, i64)> = Vec::new();
    let mut stable = None;
    for r in 0..=cfg.max_refinements {
        let k = traced.resample_by_fiber_angle(w, base_m << r, &cfg.trace)?;
        let b = braid_from_knot(&k)?;
        let e = algebraic_crossing_number(&b);
        history.push((k, b, e));
        let n = history.len();
        if n >= 3 && history[n - 3..].iter().all(|h| h.2 == e) {
            stable = Some(n - 3);
            break;
        }
    }
    // with fewer than three resolutions allowed, the last two must agree
    let pick = match stable {
        Some(i) => i,
        None if cfg.max_refinements < 2 && history.windows(2).all(|p| p[0].2 == p[1].2) => 0,
        None => {
            let es: Vec<i64> = history.iter().map(|h| h.2).collect();
            return Err(Error::EtaSelection(format!(
                "crossing number does not stabilize under refinement at eta = {eta}: {es:?}"
            )));
        }
    };
    let (knot, braid, e) = history.swap_remove(pick);
    let strands = braid.strand_count();
    let sep = braid
        .min_strand_separation()
        .unwrap_or(T::one())
        .min(T::one());
    let delta = cfg.pushoff_rel * sep;
    let gauss = linking_number_gauss(&knot, delta, cfg.pushoff_angle)?;
    let report = KnotReport {
        eta,
        components: knot.loops.len(),
        strands,
        crossings: braid.crossings.len(),
        e,
        gauss,
        sl: self_linking(e, strands as i64),
        margin_plus: contact_transversality_margin(&knot, Orientation::Plus),
        margin_minus: contact_transversality_margin(&knot, Orientation::Minus),
        samples_per_turn: knot.samples_per_turn.unwrap_or(base_m),
        pushoff_delta: delta,
    };
    Ok(KnotAnalysis {
        report,
        knot,
        braid,
    })
}

/// Scan `η = 0.1, 0.05, …` until two consecutive radii give a braid with
/// `N` strands, agreeing Gauss and braid counts and the same `e`; returns
/// the larger of the two.
pub fn select_eta<T: Real>(w: &WeierstrassData<T>, cfg: &KnotConfig<T>) -> Result<KnotAnalysis<T>> {
    let expected = w.branching_multiplicity();
    let mut eta = T::lit(0.1);
    let mut prev: Option<KnotAnalysis<T>> = None;
    let mut log = Vec::new();
    for _ in 0..12 {
        let current = match knot_invariants(w, eta, cfg) {
            Ok(a) if a.report.strands != expected => {
                log.push(format!("eta {eta}: {} strands", a.report.strands));
                None
            }
            Ok(a) if !a.report.gauss_agrees(cfg.linking_tol) => {
                log.push(format!(
                    "eta {eta}: gauss {} vs e {}",
                    a.report.gauss, a.report.e
                ));
                None
            }
            Ok(a) => Some(a),
            Err(err) => {
                log.push(format!("eta {eta}: {err}"));
                None
            }
        };
        if let (Some(p), Some(c)) = (&prev, &current) {
            if p.report.e == c.report.e {
                return Ok(prev.unwrap());
            }
        }
        prev = current;
        eta *= T::lit(0.5);
    }
    Err(Error::EtaSelection(format!(
        "no stable slice radius: {}",
        log.join("; ")
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct VerifyReport<T: Real> {
    pub eta: T,
    pub t: T,
    pub orientation: Orientation,
    /// Double points of the deformed map with image inside the `η`-ball.
    pub double_points: Vec<DoublePoint<T>>,
    pub d: usize,
    /// Double points found outside the `η`-ball (not counted).
    pub outside_ball: usize,
    pub all_transverse: bool,
    pub base: KnotReport<T>,
    pub deformed: KnotReport<T>,
    /// `2D`
    pub lhs: i64,
    /// `e(K) − (N − 1)`
    pub rhs: i64,
    pub identity_holds: bool,
    /// The deformed slice has the same `e` as the base slice.
    pub isotopy_holds: bool,
    pub gauss_agrees: bool,
}

fn count_inside<T: Real>(
    w: &WeierstrassData<T>,
    eta: T,
    dcfg: &DoublePointConfig<T>,
) -> Result<(Vec<DoublePoint<T>>, usize, bool)> {
    let search = find_double_points(w, dcfg)?;
    let (inside, outside): (Vec<_>, Vec<_>) = search
        .points
        .into_iter()
        .partition(|p| norm4(&p.image) < eta);
    let transverse = inside.iter().all(|p| is_transverse(p, w, dcfg.det_tol));
    Ok((inside, outside.len(), transverse))
}

/// Compute both sides of `2D = e(K) − (N − 1)` without judging them.
///
/// `D` counts double points of the deformed map inside the `η`-ball;
/// `e` and `N` come from the slice of the base map. The deformed slice is
/// analysed as well, to check that `e` is unchanged.
pub fn evaluate_double_point_formula<T: Real>(
    w_base: &WeierstrassData<T>,
    p: &PerturbParams<T>,
    eta: T,
    kcfg: &KnotConfig<T>,
    dcfg: &DoublePointConfig<T>,
) -> Result<VerifyReport<T>> {
    let fm = build_family_member(w_base, p)?;
    let (double_points, outside_ball, all_transverse) = count_inside(fm.deformed(), eta, dcfg)?;
    let base = knot_invariants(w_base, eta, kcfg)?.report;
    if base.strands != w_base.branching_multiplicity() {
        return Err(Error::WindingMismatch {
            winding: base.strands as i64,
            expected: w_base.branching_multiplicity(),
        });
    }
    let deformed = knot_invariants(fm.deformed(), eta, kcfg)?.report;
    let d = double_points.len();
    let lhs = 2 * d as i64;
    let rhs = base.e - (base.strands as i64 - 1);
    Ok(VerifyReport {
        eta,
        t: p.t,
        orientation: p.orientation,
        d,
        double_points,
        outside_ball,
        all_transverse,
        lhs,
        rhs,
        identity_holds: lhs == rhs,
        isotopy_holds: deformed.e == base.e && deformed.strands == base.strands,
        gauss_agrees: base.gauss_agrees(kcfg.linking_tol)
            && deformed.gauss_agrees(kcfg.linking_tol),
        base,
        deformed,
    })
}

/// [`evaluate_double_point_formula`], failing with `FormulaViolation` unless
/// the identity holds and the deformed slice has the same invariants.
pub fn verify_double_point_formula<T: Real>(
    w_base: &WeierstrassData<T>,
    p: &PerturbParams<T>,
    eta: T,
    kcfg: &KnotConfig<T>,
    dcfg: &DoublePointConfig<T>,
) -> Result<VerifyReport<T>> {
    let r = evaluate_double_point_formula(w_base, p, eta, kcfg, dcfg)?;
    if !r.identity_holds {
        return Err(Error::FormulaViolation(format!(
            "2D = {} but e - (N - 1) = {} - {} = {}",
            r.lhs,
            r.base.e,
            r.base.strands - 1,
            r.rhs
        )));
    }
    if !r.isotopy_holds {
        return Err(Error::FormulaViolation(format!(
            "deformed slice has e = {}, N = {}; base slice has e = {}, N = {}",
            r.deformed.e, r.deformed.strands, r.base.e, r.base.strands
        )));
    }
    Ok(r)
}

/// Sides of `2D⁽⁻⁾ = ±e(K) − (N − 1)` for a negative-orientation family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct NegativeOrientationReport<T: Real> {
    pub eta: T,
    pub t: T,
    pub d_minus: usize,
    pub outside_ball: usize,
    pub strands: Option<usize>,
    /// `e` of the slice as traced.
    pub e_standard: Option<i64>,
    /// `e` of the mirror slice (`x₄ ↦ −x₄`), i.e. with the orientation of
    /// the normal plane reversed.
    pub e_reversed: Option<i64>,
    pub holds_standard: Option<bool>,
    pub holds_reversed: Option<bool>,
    /// Why a knot invariant could not be computed, if it could not.
    pub knot_error: Option<String>,
}

impl<T: Real> NegativeOrientationReport<T> {
    pub fn summary(&self) -> String {
        match (self.holds_standard, self.holds_reversed) {
            (Some(s), Some(r)) => format!(
                "2D- = {}; e = {:?}, reversed e = {:?}, N = {:?}; standard convention {}, reversed convention {}",
                2 * self.d_minus,
                self.e_standard,
                self.e_reversed,
                self.strands,
                if s { "holds" } else { "fails" },
                if r { "holds" } else { "fails" }
            ),
            _ => format!(
                "2D- = {}; knot invariants unavailable: {}",
                2 * self.d_minus,
                self.knot_error.as_deref().unwrap_or("unknown")
            ),
        }
    }
}

/// Evaluate the negative-orientation identity under both sign conventions.
///
/// The base slice is not required to be a braid: when it is not (for
/// instance when the base map is not embedded), the report says why and
/// leaves the conventions undecided.
pub fn negative_orientation_report<T: Real>(
    w_base: &WeierstrassData<T>,
    p: &PerturbParams<T>,
    eta: T,
    kcfg: &KnotConfig<T>,
    dcfg: &DoublePointConfig<T>,
) -> Result<NegativeOrientationReport<T>> {
    if p.orientation != Orientation::Minus {
        return Err(Error::InvalidArgument(
            "negative-orientation report needs orientation -".into(),
        ));
    }
    let fm = build_family_member(w_base, p)?;
    let (inside, outside_ball, _) = count_inside(fm.deformed(), eta, dcfg)?;
    let d = inside.len() as i64;
    let f = w_base.fprime();
    let mirror = WeierstrassData::load(
        [f[0].clone(), f[1].clone(), f[3].clone(), f[2].clone()],
        w_base.relative_conformality_residual().max(T::epsilon()) * T::lit(64.0),
    )?;
    let mut out = NegativeOrientationReport {
        eta,
        t: p.t,
        d_minus: inside.len(),
        outside_ball,
        strands: None,
        e_standard: None,
        e_reversed: None,
        holds_standard: None,
        holds_reversed: None,
        knot_error: None,
    };
    match (
        knot_invariants(w_base, eta, kcfg),
        knot_invariants(&mirror, eta, kcfg),
    ) {
        (Ok(a), Ok(b)) => {
            let n = a.report.strands as i64;
            out.strands = Some(a.report.strands);
            out.e_standard = Some(a.report.e);
            out.e_reversed = Some(b.report.e);
            out.holds_standard = Some(2 * d == a.report.e - (n - 1));
            out.holds_reversed = Some(2 * d == b.report.e - (n - 1));
        }
        (Err(err), _) | (_, Err(err)) => out.knot_error = Some(err.to_string()),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TraceConfig;
    use crate::scalar::C;

    type W = WeierstrassData<f64>;

    fn cusp() -> W {
        W::from_real([&[0.0, 2.0], &[], &[0.0, 0.0, 3.0], &[]], 1e-12).unwrap()
    }

    fn torus25() -> W {
        W::from_real([&[0.0, 2.0], &[], &[0.0, 0.0, 0.0, 0.0, 5.0], &[]], 1e-12).unwrap()
    }

    fn fast() -> KnotConfig<f64> {
        KnotConfig {
            trace: TraceConfig {
                samples_per_strand: 128,
                ..TraceConfig::default()
            },
            max_refinements: 2,
            ..KnotConfig::default()
        }
    }

    #[test]
    fn cusp_knot_is_positive_trefoil_braid() {
        let a = knot_invariants(&cusp(), 1e-2, &fast()).unwrap();
        let r = &a.report;
        assert_eq!(r.strands, 2);
        assert_eq!(r.e, 3);
        assert_eq!(r.crossings, 3);
        assert_eq!(r.sl, 1);
        assert!((r.gauss - 3.0).abs() < 0.1, "{}", r.gauss);
        assert!(r.margin_plus > 0.0 && r.margin_minus > 0.0);
    }

    #[test]
    fn torus_knot_has_five_crossings() {
        let r = knot_invariants(&torus25(), 1e-2, &fast()).unwrap().report;
        assert_eq!((r.strands, r.e), (2, 5));
        assert!((r.gauss - 5.0).abs() < 0.1, "{}", r.gauss);
    }

    #[test]
    fn flat_plane_knot_is_trivial() {
        let w = W::from_real([&[1.0], &[], &[], &[]], 1e-12).unwrap();
        let r = knot_invariants(&w, 0.5, &fast()).unwrap().report;
        assert_eq!((r.strands, r.e, r.crossings, r.sl), (1, 0, 0, -1));
        assert!(r.gauss.abs() < 0.1);
        assert!((r.margin_plus - 1.0).abs() < 1e-6);
    }

    #[test]
    fn wide_cusp_is_not_braided_at_large_eta() {
        // F₁ + iF₂ = z² + 2z³ turns back on itself where both terms compete
        let w = W::from_real([&[0.0, 2.0, 6.0], &[], &[0.0, 0.0, 3.0], &[]], 1e-12).unwrap();
        let k = trace_slice(&w, 0.1, &TraceConfig::default()).unwrap();
        assert_eq!(k.winding(), 2);
        assert!(matches!(
            k.resample_by_fiber_angle(&w, 64, &TraceConfig::default()),
            Err(Error::NonMonotoneFiberAngle { .. })
        ));
        // small radii recover the trefoil
        let a = select_eta(&w, &fast()).unwrap();
        assert_eq!((a.report.strands, a.report.e), (2, 3));
    }

    #[test]
    fn select_eta_on_cusp() {
        let a = select_eta(&cusp(), &fast()).unwrap();
        assert_eq!(a.report.e, 3);
        assert!(a.report.eta <= 0.1);
    }

    #[test]
    fn cusp_identity_holds() {
        let w = cusp();
        // α = z, β = z² − t²: h = (2z, 0, 3(z² − t²), 0)
        let t = 0.05;
        let p = PerturbParams {
            a: vec![C::new(0.0, 0.0); 2],
            b: vec![C::new(-t * t, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)],
            orientation: Orientation::Plus,
            t,
        };
        let r = verify_double_point_formula(&w, &p, 1e-2, &fast(), &DoublePointConfig::default())
            .unwrap();
        assert_eq!((r.d, r.base.e, r.base.strands), (1, 3, 2));
        assert_eq!(r.lhs, r.rhs);
        assert!(r.isotopy_holds && r.gauss_agrees && r.all_transverse);
    }

    #[test]
    fn negative_report_requires_minus() {
        let w = cusp();
        let p = PerturbParams::zero(&w, Orientation::Plus).unwrap();
        assert!(matches!(
            negative_orientation_report(&w, &p, 1e-2, &fast(), &DoublePointConfig::default()),
            Err(Error::InvalidArgument(_))
        ));
    }
}
