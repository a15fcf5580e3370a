//! Predictor–corrector continuation of `‖F(z)‖ = η` in the parameter disk,
//! and resampling at uniform fiber angle.

use crate::config::TraceConfig;
use crate::error::{Error, Result};
use crate::linalg::{dot4, norm4, scale4, Vec4};
use crate::scalar::{Real, C};
use crate::weierstrass::WeierstrassData;

use super::{KnotCurve, KnotLoop};

/// Largest parameter radius a trace may reach.
const DISK_LIMIT: f64 = 0.95;

/// `g = ‖F‖² − η²` and its gradient as the complex number `g_x + i g_y`.
fn level<T: Real>(w: &WeierstrassData<T>, z: C<T>, eta: T) -> (T, C<T>, Vec4<T>) {
    let f = w.evaluate(z);
    let (fx, fy) = w.jacobian(z);
    let two = T::lit(2.0);
    (
        dot4(&f, &f) - eta * eta,
        C::new(two * dot4(&f, &fx), two * dot4(&f, &fy)),
        f,
    )
}

fn correct<T: Real>(
    w: &WeierstrassData<T>,
    mut z: C<T>,
    eta: T,
    cfg: &TraceConfig<T>,
) -> Result<C<T>> {
    let floor = T::epsilon() * eta * w.coefficient_scale().max(T::one());
    for _ in 0..cfg.max_corrector_iter {
        let (g, grad, f) = level(w, z, eta);
        if (norm4(&f) - eta).abs() <= cfg.trace_tol * eta {
            return Ok(z);
        }
        let n2 = grad.norm_sqr();
        if !(n2.sqrt() > floor) {
            return Err(Error::BranchOnSlice);
        }
        z -= grad * (g / n2);
        if !z.re.is_finite() || !z.im.is_finite() {
            break;
        }
    }
    Err(Error::TraceFailure(format!(
        "corrector did not converge near z = {} + {}i",
        z.re, z.im
    )))
}

/// Parameter points on the level set found along `cfg.rays` rays from the origin.
fn seeds<T: Real>(w: &WeierstrassData<T>, eta: T, cfg: &TraceConfig<T>) -> Vec<C<T>> {
    let steps = 400;
    let limit = T::lit(0.9);
    let mut out = Vec::new();
    for k in 0..cfg.rays {
        // offset keeps rays off the coordinate axes, where symmetric data tends to be special
        let phi =
            T::TAU() * (T::from_usize_lossy(k) + T::lit(0.37)) / T::from_usize_lossy(cfg.rays);
        let dir = C::new(phi.cos(), phi.sin());
        let g = |r: T| {
            let f = w.evaluate(dir * r);
            dot4(&f, &f) - eta * eta
        };
        let mut r0 = T::zero();
        let mut g0 = g(r0);
        for j in 1..=steps {
            let r1 = limit * T::from_usize_lossy(j) / T::from_usize_lossy(steps);
            let g1 = g(r1);
            if (g0 < T::zero()) != (g1 < T::zero()) {
                let (mut lo, mut hi) = (r0, r1);
                for _ in 0..80 {
                    let mid = (lo + hi) * T::lit(0.5);
                    if (g(mid) < T::zero()) == (g0 < T::zero()) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(dir * ((lo + hi) * T::lit(0.5)));
            }
            r0 = r1;
            g0 = g1;
        }
    }
    out
}

fn fiber_angle<T: Real>(f: &Vec4<T>) -> T {
    f[1].atan2(f[0])
}

/// Unwrap successive angles so that consecutive differences lie in `(−π, π]`.
fn unwrap<T: Real>(raw: &[T]) -> Vec<T> {
    let two_pi = T::TAU();
    let mut out = Vec::with_capacity(raw.len());
    let mut acc = T::zero();
    for (i, &a) in raw.iter().enumerate() {
        if i == 0 {
            acc = a;
        } else {
            let mut d = a - raw[i - 1];
            d = d - two_pi * (d / two_pi).round();
            acc += d;
        }
        out.push(acc);
    }
    out
}

fn trace_loop<T: Real>(
    w: &WeierstrassData<T>,
    z0: C<T>,
    eta: T,
    cfg: &TraceConfig<T>,
) -> Result<Vec<C<T>>> {
    let s = cfg.rel_step * z0.norm().max(T::lit(1e-12));
    let limit = T::lit(DISK_LIMIT);
    let mut pts = vec![z0];
    let mut z = z0;
    let mut left = false;
    for _ in 0..cfg.max_steps {
        let (_, grad, _) = level(w, z, eta);
        let n = grad.norm();
        if !(n > T::zero()) {
            return Err(Error::BranchOnSlice);
        }
        // counterclockwise around the sublevel set {‖F‖ < η}
        let tangent = C::new(-grad.im, grad.re) / n;
        let zc = correct(w, z + tangent * s, eta, cfg)?;
        if zc.norm() > limit {
            return Err(Error::TraceFailure(
                "slice leaves the parameter disk".into(),
            ));
        }
        let d0 = (zc - z0).norm();
        if !left && d0 > s * T::lit(2.0) {
            left = true;
        }
        if left && d0 < s {
            return Ok(pts);
        }
        pts.push(zc);
        z = zc;
    }
    Err(Error::OpenCurve {
        steps: cfg.max_steps,
    })
}

fn make_loop<T: Real>(w: &WeierstrassData<T>, zs: Vec<C<T>>) -> KnotLoop<T> {
    let images: Vec<Vec4<T>> = zs.iter().map(|&z| w.evaluate(z)).collect();
    let raw: Vec<T> = images.iter().map(fiber_angle).collect();
    let points = images
        .iter()
        .map(|f| scale4(f, T::one() / norm4(f)))
        .collect();
    KnotLoop {
        points,
        preimages: zs,
        theta: unwrap(&raw),
    }
}

/// Trace every component of `{z : ‖F(z)‖ = η}` met by the seeding rays.
pub fn trace_slice<T: Real>(
    w: &WeierstrassData<T>,
    eta: T,
    cfg: &TraceConfig<T>,
) -> Result<KnotCurve<T>> {
    if !(eta > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "slice radius {eta} must be positive"
        )));
    }
    let mut loops: Vec<Vec<C<T>>> = Vec::new();
    for seed in seeds(w, eta, cfg) {
        let seed = correct(w, seed, eta, cfg)?;
        let reach = cfg.rel_step * seed.norm() * T::lit(3.0);
        let known = loops
            .iter()
            .any(|l| l.iter().any(|&z| (z - seed).norm() < reach));
        if known {
            continue;
        }
        loops.push(trace_loop(w, seed, eta, cfg)?);
    }
    if loops.is_empty() {
        return Err(Error::TraceFailure(format!(
            "no point of norm {eta} found in the disk"
        )));
    }
    Ok(KnotCurve {
        eta,
        loops: loops.into_iter().map(|zs| make_loop(w, zs)).collect(),
        samples_per_turn: None,
    })
}

/// Solve `‖F(z)‖ = η`, `arg(F₁ + iF₂) = θ` near `z`.
fn solve_at_angle<T: Real>(
    w: &WeierstrassData<T>,
    mut z: C<T>,
    eta: T,
    theta: T,
    cfg: &TraceConfig<T>,
) -> Result<C<T>> {
    let (s, c) = theta.sin_cos();
    for _ in 0..cfg.max_corrector_iter {
        let f = w.evaluate(z);
        let (fx, fy) = w.jacobian(z);
        let g1 = dot4(&f, &f) - eta * eta;
        let g2 = c * f[1] - s * f[0];
        let on_sphere = (norm4(&f) - eta).abs() <= cfg.trace_tol * eta;
        if on_sphere && g2.abs() <= cfg.trace_tol * eta && c * f[0] + s * f[1] > T::zero() {
            return Ok(z);
        }
        let two = T::lit(2.0);
        let (a11, a12) = (two * dot4(&f, &fx), two * dot4(&f, &fy));
        let (a21, a22) = (c * fx[1] - s * fx[0], c * fy[1] - s * fy[0]);
        let det = a11 * a22 - a12 * a21;
        if !(det.abs() > T::min_positive_value()) {
            break;
        }
        let dx = (g1 * a22 - g2 * a12) / det;
        let dy = (a11 * g2 - a21 * g1) / det;
        z -= C::new(dx, dy);
    }
    Err(Error::TraceFailure(format!(
        "could not place a sample at fiber angle {theta}"
    )))
}

impl<T: Real> KnotCurve<T> {
    /// Resample every loop at the fiber angles `θ = 2πp/m`, `p ∈ ℤ`.
    ///
    /// Loops along which the fiber angle decreases are reversed first; a
    /// fiber angle that is not monotone means the slice is not braided.
    pub fn resample_by_fiber_angle(
        &self,
        w: &WeierstrassData<T>,
        m: usize,
        cfg: &TraceConfig<T>,
    ) -> Result<Self> {
        let two_pi = T::TAU();
        let mut loops = Vec::with_capacity(self.loops.len());
        let mut offset = 0;
        for l in &self.loops {
            let n = l.len();
            let mut zs = l.preimages.clone();
            let mut th = l.theta.clone();
            // closing increment
            let close = {
                let d = th[0] - th[n - 1];
                d - two_pi * (d / two_pi).round()
            };
            let total = th[n - 1] - th[0] + close;
            if total < T::zero() {
                zs.reverse();
                th = unwrap(
                    &zs.iter()
                        .map(|&z| fiber_angle(&w.evaluate(z)))
                        .collect::<Vec<_>>(),
                );
            }
            for i in 1..n {
                if th[i] <= th[i - 1] {
                    return Err(Error::NonMonotoneFiberAngle { index: offset + i });
                }
            }
            let close = {
                let d = th[0] - th[n - 1];
                d - two_pi * (d / two_pi).round()
            };
            if close <= T::zero() {
                return Err(Error::NonMonotoneFiberAngle {
                    index: offset + n - 1,
                });
            }
            offset += n;
            let turns = ((th[n - 1] - th[0] + close) / two_pi)
                .round()
                .to_usize()
                .unwrap_or(0);
            if turns == 0 {
                return Err(Error::TraceFailure(
                    "loop does not wind around the axis".into(),
                ));
            }
            // close the sequence with the first sample, one full winding later
            zs.push(zs[0]);
            th.push(th[n - 1] + close);
            let step = two_pi / T::from_usize_lossy(m);
            let p0 = (th[0] / step).ceil().to_i64().unwrap_or(0);
            let count = turns * m;
            let mut seg = 0;
            let mut pre = Vec::with_capacity(count);
            let mut thetas = Vec::with_capacity(count);
            for p in p0..p0 + count as i64 {
                let target = step * T::from_i64(p).unwrap();
                while seg + 1 < th.len() - 1 && th[seg + 1] <= target {
                    seg += 1;
                }
                let lam = (target - th[seg]) / (th[seg + 1] - th[seg]);
                let guess = zs[seg] + (zs[seg + 1] - zs[seg]) * lam;
                pre.push(solve_at_angle(w, guess, self.eta, target, cfg)?);
                thetas.push(target);
            }
            let images: Vec<Vec4<T>> = pre.iter().map(|&z| w.evaluate(z)).collect();
            loops.push(KnotLoop {
                points: images
                    .iter()
                    .map(|f| scale4(f, T::one() / norm4(f)))
                    .collect(),
                preimages: pre,
                theta: thetas,
            });
        }
        Ok(Self {
            eta: self.eta,
            loops,
            samples_per_turn: Some(m),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    type W = WeierstrassData<f64>;

    fn cusp() -> W {
        W::from_real([&[0.0, 2.0], &[], &[0.0, 0.0, 3.0], &[]], 1e-12).unwrap()
    }

    #[test]
    fn cusp_slice_is_one_loop_near_radius_sqrt_eta() {
        let w = cusp();
        let k = trace_slice(&w, 1e-2, &TraceConfig::default()).unwrap();
        assert_eq!(k.loops.len(), 1);
        for z in &k.loops[0].preimages {
            assert!((z.norm() - 0.1).abs() < 1e-3, "{z}");
            assert!((norm4(&w.evaluate(*z)) - 1e-2).abs() <= 1e-11 * 1e-2);
        }
        for q in &k.loops[0].points {
            assert!((norm4(q) - 1.0).abs() < 1e-10);
        }
        assert_eq!(k.winding(), 2);
    }

    #[test]
    fn flat_plane_slice_is_a_round_circle() {
        let w = W::from_real([&[1.0], &[], &[], &[]], 1e-12).unwrap();
        let k = trace_slice(&w, 0.5, &TraceConfig::default()).unwrap();
        assert_eq!(k.loops.len(), 1);
        for (z, q) in k.loops[0].preimages.iter().zip(&k.loops[0].points) {
            assert!((z.norm() - 0.5).abs() < 1e-10);
            assert!(q[2].abs() < 1e-15 && q[3].abs() < 1e-15);
        }
        assert_eq!(k.winding(), 1);
    }

    #[test]
    fn loop_closes_up() {
        let k = trace_slice(&cusp(), 1e-2, &TraceConfig::default()).unwrap();
        let l = &k.loops[0];
        let first = l.preimages[0];
        let last = *l.preimages.last().unwrap();
        let step = TraceConfig::<f64>::default().rel_step * first.norm();
        // the closing step lands within one step of the start
        assert!((first - last).norm() < 2.01 * step);
    }

    #[test]
    fn resampling_lands_on_exact_angles() {
        let w = cusp();
        let cfg = TraceConfig::default();
        let k = trace_slice(&w, 1e-2, &cfg)
            .unwrap()
            .resample_by_fiber_angle(&w, 64, &cfg)
            .unwrap();
        let l = &k.loops[0];
        assert_eq!(l.len(), 128);
        for (z, th) in l.preimages.iter().zip(&l.theta) {
            let f = w.evaluate(*z);
            let d = f[1].atan2(f[0]) - th;
            assert!((d - std::f64::consts::TAU * (d / std::f64::consts::TAU).round()).abs() < 1e-9);
        }
    }

    #[test]
    fn nonpositive_eta_is_rejected() {
        assert!(matches!(
            trace_slice(&cusp(), 0.0, &TraceConfig::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn unwrap_handles_branch_cut() {
        let raw = [3.0f64, -3.1, -2.9, 3.0];
        let u = unwrap(&raw);
        assert!(u.windows(2).all(|p| (p[1] - p[0]).abs() < 1.0));
    }
}
