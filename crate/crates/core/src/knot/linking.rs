//! Linking with a pushoff, computed from the Gauss double integral, and
//! transversality to the contact structures of `H₀` and `K₀`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{dot4, norm4, scale4, sub4, Vec4};
use crate::scalar::Real;
use crate::weierstrass::{apply, reference_structures, Orientation};

use super::KnotCurve;

type V3<T> = [T; 3];

fn cross<T: Real>(a: &V3<T>, b: &V3<T>) -> V3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3<T: Real>(a: &V3<T>, b: &V3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sub3<T: Real>(a: &V3<T>, b: &V3<T>) -> V3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn unit<T: Real>(a: V3<T>) -> Option<V3<T>> {
    let n = dot3(&a, &a).sqrt();
    (n > T::min_positive_value()).then(|| [a[0] / n, a[1] / n, a[2] / n])
}

/// Shift every sample by `δ·(0, 0, cos φ, sin φ)` and project back to the sphere.
///
/// A constant fiber direction is the blackboard framing of the braid, so
/// `lk(K, K̂)` equals the algebraic crossing number.
pub fn pushoff<T: Real>(k: &KnotCurve<T>, delta: T, angle: T) -> KnotCurve<T> {
    let (s, c) = angle.sin_cos();
    let mut out = k.clone();
    for l in &mut out.loops {
        for q in &mut l.points {
            let p = [q[0], q[1], q[2] + delta * c, q[3] + delta * s];
            *q = scale4(&p, T::one() / norm4(&p));
        }
    }
    out
}

/// Closed polygons, one per loop.
fn polygons<T: Real>(k: &KnotCurve<T>) -> Vec<&[Vec4<T>]> {
    k.loops.iter().map(|l| l.points.as_slice()).collect()
}

fn min_distance<T: Real>(a: &KnotCurve<T>, b: &KnotCurve<T>) -> T {
    let bs: Vec<&Vec4<T>> = b.loops.iter().flat_map(|l| &l.points).collect();
    a.loops
        .par_iter()
        .flat_map(|l| l.points.par_iter())
        .map(|p| {
            bs.iter()
                .map(|q| norm4(&sub4(p, q)))
                .fold(T::infinity(), T::min)
        })
        .reduce(T::infinity, T::min)
}

/// Candidate poles: the 24 vertices of the 24-cell.
fn pole_candidates<T: Real>() -> Vec<Vec4<T>> {
    let mut out = Vec::with_capacity(24);
    for i in 0..4 {
        for s in [T::one(), -T::one()] {
            let mut p = [T::zero(); 4];
            p[i] = s;
            out.push(p);
        }
    }
    let h = T::lit(0.5);
    for bits in 0..16u32 {
        out.push([0, 1, 2, 3].map(|i| if bits >> i & 1 == 1 { -h } else { h }));
    }
    out
}

/// An oriented orthonormal frame `(b₁, b₂, b₃, p)` of `ℝ⁴`.
fn frame_with_last<T: Real>(p: &Vec4<T>) -> [Vec4<T>; 4] {
    let mut basis: Vec<Vec4<T>> = vec![*p];
    for i in 0..4 {
        let mut v = [T::zero(); 4];
        v[i] = T::one();
        for b in &basis {
            v = sub4(&v, &scale4(b, dot4(&v, b)));
        }
        let n = norm4(&v);
        if n > T::lit(1e-3) && basis.len() < 4 {
            basis.push(scale4(&v, T::one() / n));
        }
    }
    let mut f = [basis[1], basis[2], basis[3], basis[0]];
    if crate::linalg::det4(&f) < T::zero() {
        f[0] = scale4(&f[0], -T::one());
    }
    f
}

/// Stereographic projection from `frame[3]`; orientation preserving for the
/// boundary orientation of the unit sphere.
fn project<T: Real>(frame: &[Vec4<T>; 4], q: &Vec4<T>) -> V3<T> {
    let y = [0, 1, 2, 3].map(|i| dot4(&frame[i], q));
    let d = T::one() - y[3];
    [y[0] / d, y[1] / d, y[2] / d]
}

/// Signed solid angle swept by segment `a0a1` as seen along segment `b0b1`,
/// over `4π`: the exact contribution of the pair to the Gauss integral.
fn segment_pair<T: Real>(a0: &V3<T>, a1: &V3<T>, b0: &V3<T>, b1: &V3<T>) -> T {
    let r00 = sub3(b0, a0);
    let r01 = sub3(b1, a0);
    let r10 = sub3(b0, a1);
    let r11 = sub3(b1, a1);
    let n = [
        unit(cross(&r00, &r01)),
        unit(cross(&r01, &r11)),
        unit(cross(&r11, &r10)),
        unit(cross(&r10, &r00)),
    ];
    let [Some(n1), Some(n2), Some(n3), Some(n4)] = n else {
        return T::zero();
    };
    let asin = |x: T| x.max(-T::one()).min(T::one()).asin();
    let omega =
        asin(dot3(&n1, &n2)) + asin(dot3(&n2, &n3)) + asin(dot3(&n3, &n4)) + asin(dot3(&n4, &n1));
    let orient = dot3(&cross(&sub3(b1, b0), &sub3(a1, a0)), &r00);
    let sign = if orient > T::zero() {
        T::one()
    } else if orient < T::zero() {
        -T::one()
    } else {
        T::zero()
    };
    omega * sign / (T::lit(4.0) * T::PI())
}

/// Gauss linking number of two disjoint closed polygons in `ℝ³`.
pub(crate) fn polygon_linking<T: Real>(a: &[Vec<V3<T>>], b: &[Vec<V3<T>>]) -> T {
    let segs = |p: &[Vec<V3<T>>]| -> Vec<(V3<T>, V3<T>)> {
        p.iter()
            .flat_map(|l| (0..l.len()).map(move |i| (l[i], l[(i + 1) % l.len()])))
            .collect()
    };
    let sa = segs(a);
    let sb = segs(b);
    // summed in a fixed order so results do not depend on thread scheduling
    let rows: Vec<T> = sa
        .par_iter()
        .map(|(a0, a1)| {
            sb.iter().fold(T::zero(), |acc, (b0, b1)| {
                acc + segment_pair(a0, a1, b0, b1)
            })
        })
        .collect();
    rows.into_iter().fold(T::zero(), |x, y| x + y)
}

/// Gauss linking number of `K` and its pushoff by `delta` in the fixed fiber
/// direction `angle`, after stereographic projection from the candidate pole
/// farthest from both curves.
pub fn linking_number_gauss<T: Real>(k: &KnotCurve<T>, delta: T, angle: T) -> Result<T> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "pushoff distance {delta} must be positive"
        )));
    }
    let kp = pushoff(k, delta, angle);
    let gap = min_distance(k, &kp);
    if !(gap > delta * T::lit(0.5)) {
        return Err(Error::PushoffCollision {
            distance: gap.to_f64_lossy(),
        });
    }
    let all: Vec<&Vec4<T>> = k
        .loops
        .iter()
        .chain(&kp.loops)
        .flat_map(|l| &l.points)
        .collect();
    let (pole, clearance) = pole_candidates::<T>()
        .into_iter()
        .map(|p| {
            let d = all
                .iter()
                .map(|q| norm4(&sub4(&p, q)))
                .fold(T::infinity(), T::min);
            (p, d)
        })
        .fold((None, T::zero()), |(bp, bd), (p, d)| {
            if d > bd {
                (Some(p), d)
            } else {
                (bp, bd)
            }
        });
    let pole = match pole {
        Some(p) if clearance > T::lit(1e-3) => p,
        _ => return Err(Error::ProjectionPoleOnCurve),
    };
    let frame = frame_with_last(&pole);
    let proj = |c: &KnotCurve<T>| -> Vec<Vec<V3<T>>> {
        polygons(c)
            .into_iter()
            .map(|l| l.iter().map(|q| project(&frame, q)).collect())
            .collect()
    };
    Ok(polygon_linking(&proj(k), &proj(&kp)))
}

/// `min |⟨γ, Jq⟩| / (‖γ‖‖q‖)` over the samples, with `γ` the central
/// difference and `J` the complex structure of `H₀` (`+`) or `K₀` (`−`).
/// Zero for a curve tangent to the contact planes somewhere.
pub fn contact_transversality_margin<T: Real>(k: &KnotCurve<T>, orientation: Orientation) -> T {
    let (h0, k0) = reference_structures::<T>();
    let omega = match orientation {
        Orientation::Plus => h0,
        Orientation::Minus => k0,
    };
    let j = omega.normalized().complex_structure();
    let mut margin = T::infinity();
    for l in &k.loops {
        let n = l.len();
        if n < 3 {
            continue;
        }
        for i in 0..n {
            let q = &l.points[i];
            let g = sub4(&l.points[(i + 1) % n], &l.points[(i + n - 1) % n]);
            let d = norm4(&g) * norm4(q);
            if d > T::zero() {
                margin = margin.min(dot4(&g, &apply(&j, q)).abs() / d);
            }
        }
    }
    margin
}

/// `sl(K) = e(K) − N`.
pub fn self_linking(e: i64, n: i64) -> i64 {
    e - n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::KnotLoop;
    use crate::scalar::C;
    use std::f64::consts::TAU;

    fn curve(loops: Vec<Vec<Vec4<f64>>>) -> KnotCurve<f64> {
        KnotCurve {
            eta: 1.0,
            loops: loops
                .into_iter()
                .map(|points| KnotLoop {
                    preimages: vec![C::new(0.0, 0.0); points.len()],
                    theta: vec![0.0; points.len()],
                    points,
                })
                .collect(),
            samples_per_turn: None,
        }
    }

    fn circle(n: usize, f: impl Fn(f64) -> Vec4<f64>) -> Vec<Vec4<f64>> {
        (0..n).map(|i| f(TAU * i as f64 / n as f64)).collect()
    }

    /// Midpoint-rule Gauss integral `(1/4π)∮∮ (a − b)·(da × db)/|a − b|³`.
    fn brute_gauss(a: &[V3<f64>], b: &[V3<f64>]) -> f64 {
        let mut s = 0.0;
        for i in 0..a.len() {
            let (a0, a1) = (a[i], a[(i + 1) % a.len()]);
            let am = [0, 1, 2].map(|k| 0.5 * (a0[k] + a1[k]));
            let da = sub3(&a1, &a0);
            for j in 0..b.len() {
                let (b0, b1) = (b[j], b[(j + 1) % b.len()]);
                let bm = [0, 1, 2].map(|k| 0.5 * (b0[k] + b1[k]));
                let db = sub3(&b1, &b0);
                let r = sub3(&am, &bm);
                s += dot3(&r, &cross(&da, &db)) / dot3(&r, &r).powf(1.5);
            }
        }
        s / (4.0 * std::f64::consts::PI)
    }

    #[test]
    fn polygon_formula_matches_brute_gauss_sum() {
        let n = 400;
        let a: Vec<V3<f64>> = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
        let b: Vec<V3<f64>> = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                [1.0 + t.cos(), 0.0, t.sin()]
            })
            .collect();
        let exact = polygon_linking(std::slice::from_ref(&a), std::slice::from_ref(&b));
        let brute = brute_gauss(&a, &b);
        assert!((exact - brute).abs() < 1e-2, "{exact} vs {brute}");
        assert!((exact.abs() - 1.0).abs() < 1e-6);
        // reversing one component flips the sign
        let rev: Vec<V3<f64>> = b.iter().rev().copied().collect();
        assert!((polygon_linking(&[a], &[rev]) + exact).abs() < 1e-6);
    }

    #[test]
    fn unlinked_polygons() {
        let a: Vec<V3<f64>> = (0..50)
            .map(|i| {
                let t = TAU * i as f64 / 50.0;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
        let b: Vec<V3<f64>> = a.iter().map(|p| [p[0] + 3.0, p[1], p[2]]).collect();
        assert!(polygon_linking(&[a], &[b]).abs() < 1e-6);
    }

    #[test]
    fn complex_hopf_link_is_positive() {
        // {w₂ = 0} and {w₁ = 0}, both with the complex orientation
        let a = circle(200, |t| [t.cos(), t.sin(), 0.0, 0.0]);
        let b = circle(200, |t| [0.0, 0.0, t.cos(), t.sin()]);
        let frame = frame_with_last(&[0.5, -0.5, 0.5, 0.5]);
        let pa: Vec<V3<f64>> = a.iter().map(|q| project(&frame, q)).collect();
        let pb: Vec<V3<f64>> = b.iter().map(|q| project(&frame, q)).collect();
        let lk = polygon_linking(std::slice::from_ref(&pa), std::slice::from_ref(&pb));
        assert!((lk - 1.0).abs() < 1e-6, "{lk}");
        assert!((brute_gauss(&pa, &pb) - 1.0).abs() < 2e-2);
    }

    #[test]
    fn projection_frame_is_oriented() {
        for p in pole_candidates::<f64>() {
            let f = frame_with_last(&p);
            assert!((crate::linalg::det4(&f) - 1.0).abs() < 1e-12);
            assert_eq!(f[3], p);
        }
    }

    #[test]
    fn flat_circle_has_zero_self_linking_pushoff_and_unit_margin() {
        let k = curve(vec![circle(512, |t| [t.cos(), t.sin(), 0.0, 0.0])]);
        let lk = linking_number_gauss(&k, 0.05, 0.7).unwrap();
        assert!(lk.abs() < 1e-6, "{lk}");
        for o in [Orientation::Plus, Orientation::Minus] {
            assert!((contact_transversality_margin(&k, o) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn legendrian_circle_has_zero_margin() {
        let k = curve(vec![circle(256, |t| [t.cos(), 0.0, 0.0, t.sin()])]);
        assert!(contact_transversality_margin(&k, Orientation::Plus) < 1e-12);
    }

    #[test]
    fn two_strand_torus_knot_links_its_pushoff_three_times() {
        // (2,3) torus knot braided around the fiber axis
        let r = 0.1;
        let rho = (1.0f64 - r * r).sqrt();
        let n = 1024;
        let k = curve(vec![(0..n)
            .map(|i| {
                let th = 2.0 * TAU * i as f64 / n as f64;
                let phi = 1.5 * th;
                [rho * th.cos(), rho * th.sin(), r * phi.cos(), r * phi.sin()]
            })
            .collect()]);
        let lk = linking_number_gauss(&k, 0.04, 0.7).unwrap();
        assert!((lk - 3.0).abs() < 0.1, "{lk}");
        // pushoff along the torus normal instead: the torus framing 2·3
        let mut radial = k.clone();
        for q in &mut radial.loops[0].points {
            let s = 1.0 + 0.4 / (q[2].hypot(q[3]) * 10.0);
            let p = [q[0], q[1], q[2] * s, q[3] * s];
            *q = scale4(&p, 1.0 / norm4(&p));
        }
        let frame = frame_with_last(&[0.0, 0.0, 1.0, 0.0]);
        let proj = |c: &KnotCurve<f64>| {
            vec![c.loops[0]
                .points
                .iter()
                .map(|q| project(&frame, q))
                .collect::<Vec<_>>()]
        };
        let framing = polygon_linking(&proj(&k), &proj(&radial));
        assert!((framing - 6.0).abs() < 0.1, "{framing}");
    }

    #[test]
    fn oversized_pushoff_collides() {
        let r = 0.1;
        let k = curve(vec![circle(256, |t| {
            [t.cos() * 0.99f64.sqrt(), t.sin() * 0.99f64.sqrt(), r, 0.0]
        })]);
        // pushing by 2r in direction π lands on the mirror circle, still disjoint,
        // but a second loop there makes it collide
        let mut k2 = k.clone();
        k2.loops.push(KnotLoop {
            points: k.loops[0]
                .points
                .iter()
                .map(|q| [q[0], q[1], -q[2], q[3]])
                .collect(),
            preimages: k.loops[0].preimages.clone(),
            theta: k.loops[0].theta.clone(),
        });
        assert!(matches!(
            linking_number_gauss(&k2, 0.2, std::f64::consts::PI),
            Err(Error::PushoffCollision { .. })
        ));
    }

    #[test]
    fn self_linking_examples() {
        assert_eq!(self_linking(3, 2), 1);
        assert_eq!(self_linking(0, 1), -1);
        assert_eq!(self_linking(5, 2), 3);
    }
}
