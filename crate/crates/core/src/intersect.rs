//! Double points `F(z₁) = F(z₂)`, `z₁ ≠ z₂`, of a minimal disk.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::DoublePointConfig;
use crate::error::{Error, Result};
use crate::linalg::{det4, norm4, scale4, solve4, sub4, Vec4};
use crate::scalar::{Real, C};
use crate::weierstrass::WeierstrassData;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct DoublePoint<T: Real> {
    pub z1: C<T>,
    pub z2: C<T>,
    pub image: Vec4<T>,
    pub residual: T,
    /// `det(∂ₓF(z₁), ∂ᵧF(z₁), ∂ₓF(z₂), ∂ᵧF(z₂))`.
    pub transversality_det: T,
}

/// Per-seed outcomes of a search.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchDiagnostics {
    /// Grid pairs passing the image-proximity test.
    pub candidates: usize,
    /// Distinct Newton starts after the one-step prediction filter.
    pub seeds: usize,
    pub converged: usize,
    pub non_convergence: usize,
    pub diagonal: usize,
    pub outside: usize,
    pub near_branch: usize,
    /// Double points with a preimage close to the rim of the working disk.
    pub near_boundary: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct DoublePointSearch<T: Real> {
    pub points: Vec<DoublePoint<T>>,
    pub diagnostics: SearchDiagnostics,
}

struct Sample<T: Real> {
    z: C<T>,
    f: Vec4<T>,
    lambda: T,
}

fn sample_grid<T: Real>(w: &WeierstrassData<T>, r: T, n: usize) -> (Vec<Sample<T>>, T) {
    let h = T::lit(2.0) * r / T::from_usize_lossy(n);
    let coord = |i: usize| -r + h * (T::from_usize_lossy(i) + T::lit(0.5));
    let pts: Vec<C<T>> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| C::new(coord(i), coord(j)))
        .filter(|z| z.norm() <= r)
        .collect();
    let samples = pts
        .into_par_iter()
        .map(|z| Sample {
            z,
            f: w.evaluate(z),
            lambda: w.conformal_factor(z),
        })
        .collect();
    (samples, h)
}

/// All index pairs `(i, j)`, `i < j`, with `|F(zᵢ) − F(zⱼ)| < factor·(λᵢ + λⱼ)`
/// and `|zᵢ − zⱼ| > min_sep`, found by bucketing the first two image coordinates.
fn close_pairs<T: Real>(s: &[Sample<T>], factor: T, min_sep: T) -> Vec<(usize, usize)> {
    let lmax = s.iter().map(|p| p.lambda).fold(T::zero(), T::max);
    let cell = factor * lmax * T::lit(2.0);
    if s.is_empty() || !(cell > T::zero()) {
        return Vec::new();
    }
    let key = |p: &Sample<T>| {
        let k = |x: T| (x / cell).floor().to_i64().unwrap_or(0);
        (k(p.f[0]), k(p.f[1]))
    };
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in s.iter().enumerate() {
        buckets.entry(key(p)).or_default().push(i);
    }
    let mut pairs: Vec<(usize, usize)> = (0..s.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (kx, ky) = key(&s[i]);
            let mut out = Vec::new();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(bucket) = buckets.get(&(kx + dx, ky + dy)) else {
                        continue;
                    };
                    for &j in bucket {
                        if j > i
                            && (s[i].z - s[j].z).norm() > min_sep
                            && norm4(&sub4(&s[i].f, &s[j].f)) < factor * (s[i].lambda + s[j].lambda)
                        {
                            out.push((i, j));
                        }
                    }
                }
            }
            out
        })
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Newton step for `G(z₁,z₂) = F(z₁) − F(z₂)`; returns `(δz₁, δz₂)`.
fn newton_step<T: Real>(
    w: &WeierstrassData<T>,
    z1: C<T>,
    z2: C<T>,
    g: &Vec4<T>,
) -> Option<(C<T>, C<T>)> {
    let (fx1, fy1) = w.jacobian(z1);
    let (fx2, fy2) = w.jacobian(z2);
    let cols = [fx1, fy1, scale4(&fx2, -T::one()), scale4(&fy2, -T::one())];
    let d = solve4(&cols, scale4(g, -T::one()))?;
    Some((C::new(d[0], d[1]), C::new(d[2], d[3])))
}

fn residual<T: Real>(w: &WeierstrassData<T>, z1: C<T>, z2: C<T>) -> (Vec4<T>, T) {
    let g = sub4(&w.evaluate(z1), &w.evaluate(z2));
    let r = norm4(&g);
    (g, r)
}

enum Outcome<T: Real> {
    Converged(C<T>, C<T>),
    Failed,
    Outside,
}

fn newton<T: Real>(
    w: &WeierstrassData<T>,
    mut z1: C<T>,
    mut z2: C<T>,
    cfg: &DoublePointConfig<T>,
) -> Outcome<T> {
    let limit = cfg.radius * T::lit(1.05);
    let (mut g, mut r) = residual(w, z1, z2);
    for _ in 0..cfg.max_iter {
        if r <= cfg.newton_tol {
            // one polishing step; keep it only if it does not hurt
            if let Some((d1, d2)) = newton_step(w, z1, z2, &g) {
                let (_, r2) = residual(w, z1 + d1, z2 + d2);
                if r2 <= r {
                    z1 += d1;
                    z2 += d2;
                }
            }
            return Outcome::Converged(z1, z2);
        }
        let Some((d1, d2)) = newton_step(w, z1, z2, &g) else {
            return Outcome::Failed;
        };
        let mut s = T::one();
        let mut accepted = false;
        for _ in 0..12 {
            let (n1, n2) = (z1 + d1 * s, z2 + d2 * s);
            let (g2, r2) = residual(w, n1, n2);
            if r2 < r {
                z1 = n1;
                z2 = n2;
                g = g2;
                r = r2;
                accepted = true;
                break;
            }
            s *= T::lit(0.5);
        }
        if !accepted {
            return Outcome::Failed;
        }
        if z1.norm() > limit || z2.norm() > limit {
            return Outcome::Outside;
        }
    }
    if r <= cfg.newton_tol {
        Outcome::Converged(z1, z2)
    } else {
        Outcome::Failed
    }
}

fn lex_less<T: Real>(a: C<T>, b: C<T>) -> bool {
    (a.re, a.im) < (b.re, b.im)
}

fn canonical<T: Real>(z1: C<T>, z2: C<T>) -> (C<T>, C<T>) {
    if lex_less(z2, z1) {
        (z2, z1)
    } else {
        (z1, z2)
    }
}

fn same_pair<T: Real>(a: (C<T>, C<T>), b: (C<T>, C<T>), tol: T) -> bool {
    let d = |x: C<T>, y: C<T>| (x - y).norm();
    (d(a.0, b.0) <= tol && d(a.1, b.1) <= tol) || (d(a.0, b.1) <= tol && d(a.1, b.0) <= tol)
}

/// Tangent-frame determinant at a pair of preimages.
pub fn frame_determinant<T: Real>(w: &WeierstrassData<T>, z1: C<T>, z2: C<T>) -> (T, T) {
    let (fx1, fy1) = w.jacobian(z1);
    let (fx2, fy2) = w.jacobian(z2);
    let cols = [fx1, fy1, fx2, fy2];
    let scale = cols.iter().map(norm4).fold(T::one(), |a, b| a * b);
    (det4(&cols), scale)
}

/// Grid-seeded Newton search for double points inside the disk of radius `cfg.radius`.
///
/// Seeds come from a stack of `cfg.levels` nested grids (radius divided by 4
/// each time) so that double points close to a former branch point are seen
/// at a resolution matching their size.
pub fn find_double_points<T: Real>(
    w: &WeierstrassData<T>,
    cfg: &DoublePointConfig<T>,
) -> Result<DoublePointSearch<T>> {
    if !(cfg.radius > T::zero() && cfg.radius <= T::lit(0.9)) {
        return Err(Error::InvalidArgument(format!(
            "working radius {} outside (0, 0.9]",
            cfg.radius
        )));
    }
    if cfg.grid_n < 4 || cfg.levels == 0 {
        return Err(Error::InvalidArgument(
            "grid_n must be at least 4 and levels at least 1".into(),
        ));
    }
    let branch: Vec<C<T>> = w
        .branch_points(w.default_branch_tol())
        .into_iter()
        .filter(|b| b.norm() <= cfg.radius)
        .collect();
    if let (Some(b), false) = (branch.first(), cfg.allow_branch_points) {
        return Err(Error::BranchPointInRegion {
            re: b.re.to_f64_lossy(),
            im: b.im.to_f64_lossy(),
        });
    }

    let mut candidates = 0;
    let mut seeds: Vec<(C<T>, C<T>)> = Vec::new();
    let mut r = cfg.radius;
    for _ in 0..cfg.levels {
        let (grid, h) = sample_grid(w, r, cfg.grid_n);
        let pairs = close_pairs(&grid, cfg.seed_factor * h, h * T::lit(2.0));
        candidates += pairs.len();
        // keep pairs whose linear prediction stays close and off the diagonal,
        // one per quantized prediction
        let reach = h * T::lit(3.0);
        let predicted: Vec<(C<T>, C<T>)> = pairs
            .into_par_iter()
            .filter_map(|(i, j)| {
                let (z1, z2) = (grid[i].z, grid[j].z);
                let (d1, d2) = newton_step(w, z1, z2, &sub4(&grid[i].f, &grid[j].f))?;
                let far = [d1.re, d1.im, d2.re, d2.im].iter().any(|x| x.abs() > reach);
                let (p1, p2) = (z1 + d1, z2 + d2);
                (!far && (p1 - p2).norm() > h).then(|| canonical(p1, p2))
            })
            .collect();
        let mut keys = std::collections::HashSet::new();
        let q = |x: T| (x / h).round().to_i64().unwrap_or(i64::MAX);
        for (p1, p2) in predicted {
            if keys.insert([q(p1.re), q(p1.im), q(p2.re), q(p2.im)]) {
                seeds.push((p1, p2));
            }
        }
        r /= T::lit(4.0);
    }

    let outcomes: Vec<Outcome<T>> = seeds
        .par_iter()
        .map(|&(a, b)| newton(w, a, b, cfg))
        .collect();

    let mut diag = SearchDiagnostics {
        candidates,
        seeds: seeds.len(),
        ..Default::default()
    };
    let mut found: Vec<(C<T>, C<T>)> = Vec::new();
    for o in outcomes {
        let (z1, z2) = match o {
            Outcome::Converged(a, b) => (a, b),
            Outcome::Failed => {
                diag.non_convergence += 1;
                continue;
            }
            Outcome::Outside => {
                diag.outside += 1;
                continue;
            }
        };
        diag.converged += 1;
        if (z1 - z2).norm() < cfg.pair_sep_tol {
            diag.diagonal += 1;
            continue;
        }
        if z1.norm() > cfg.radius || z2.norm() > cfg.radius {
            diag.outside += 1;
            continue;
        }
        if branch.iter().any(|b| {
            (z1 - b).norm() < cfg.branch_exclusion || (z2 - b).norm() < cfg.branch_exclusion
        }) {
            diag.near_branch += 1;
            continue;
        }
        let pair = canonical(z1, z2);
        if !found.iter().any(|&q| same_pair(q, pair, cfg.dedup_tol)) {
            found.push(pair);
        }
    }

    let rim = cfg.radius * (T::one() - cfg.boundary_margin);
    let mut points: Vec<DoublePoint<T>> = found
        .into_iter()
        .map(|(z1, z2)| {
            let (_, res) = residual(w, z1, z2);
            let (det, _) = frame_determinant(w, z1, z2);
            let a = w.evaluate(z1);
            let b = w.evaluate(z2);
            DoublePoint {
                z1,
                z2,
                image: [0, 1, 2, 3].map(|k| (a[k] + b[k]) * T::lit(0.5)),
                residual: res,
                transversality_det: det,
            }
        })
        .collect();
    diag.near_boundary = points
        .iter()
        .filter(|p| p.z1.norm() > rim || p.z2.norm() > rim)
        .count();
    points.sort_by(|p, q| {
        (p.z1.re, p.z1.im, p.z2.re, p.z2.im)
            .partial_cmp(&(q.z1.re, q.z1.im, q.z2.re, q.z2.im))
            .unwrap()
    });
    Ok(DoublePointSearch {
        points,
        diagnostics: diag,
    })
}

/// The two tangent planes at the double point span ℝ⁴ (scale-invariant test).
pub fn is_transverse<T: Real>(dp: &DoublePoint<T>, w: &WeierstrassData<T>, det_tol: T) -> bool {
    let (det, scale) = frame_determinant(w, dp.z1, dp.z2);
    det.abs() > det_tol * scale
}

/// Independent estimate of the number of double points in the disk of
/// radius `radius`, from an exhaustive pair scan of one `fine_n × fine_n` grid.
///
/// A pair of grid points is kept when their images are closer than
/// `prox · h · (λᵢ+λⱼ)/2` (`h` the spacing, `λ` the conformal factor, so
/// `prox` is dimensionless and must exceed `√2` to see every double point),
/// they are more than `10h` apart, and one linearized step lands inside
/// their product cell, enlarged by half a spacing. Kept pairs are clustered
/// by grid adjacency, with `(i, j)` and `(j, i)` identified; the count of
/// clusters is returned.
pub fn brute_force_double_points<T: Real>(
    w: &WeierstrassData<T>,
    radius: T,
    fine_n: usize,
    prox: T,
) -> usize {
    let n = fine_n.max(2);
    let h = T::lit(2.0) * radius / T::from_usize_lossy(n);
    let coord = |i: usize| -radius + h * (T::from_usize_lossy(i) + T::lit(0.5));
    let mut samples = Vec::new();
    let mut cells = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let z = C::new(coord(i), coord(j));
            if z.norm() <= radius {
                samples.push(z);
                cells.push((i as i64, j as i64));
            }
        }
    }
    let grid: Vec<Sample<T>> = samples
        .par_iter()
        .map(|&z| Sample {
            z,
            f: w.evaluate(z),
            lambda: w.conformal_factor(z),
        })
        .collect();
    let candidates = close_pairs(&grid, prox * h * T::lit(0.5), h * T::lit(10.0));
    // slightly larger than the cell so a root on a cell edge is not lost to
    // linearization error; adjacent duplicates merge in the clustering below
    let half = h * T::lit(0.75);
    let kept: Vec<(usize, usize)> = candidates
        .into_par_iter()
        .filter(|&(i, j)| {
            let (z1, z2) = (grid[i].z, grid[j].z);
            let g = sub4(&grid[i].f, &grid[j].f);
            match newton_step(w, z1, z2, &g) {
                Some((d1, d2)) => [d1.re, d1.im, d2.re, d2.im].iter().all(|x| x.abs() <= half),
                None => false,
            }
        })
        .collect();

    // union-find over ordered pairs
    type Cell = (i64, i64);
    let mut index: HashMap<(Cell, Cell), usize> = HashMap::new();
    for &(i, j) in &kept {
        for key in [(cells[i], cells[j]), (cells[j], cells[i])] {
            let next = index.len();
            index.entry(key).or_insert(next);
        }
    }
    let mut parent: Vec<usize> = (0..index.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let union = |p: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(p, a), find(p, b));
        if ra != rb {
            p[ra] = rb;
        }
    };
    for (&(a, b), &k) in &index {
        let swapped = index[&(b, a)];
        union(&mut parent, k, swapped);
        for da in -1..=1 {
            for db in -1..=1 {
                for ea in -1..=1 {
                    for eb in -1..=1 {
                        let key = ((a.0 + da, a.1 + db), (b.0 + ea, b.1 + eb));
                        if let Some(&m) = index.get(&key) {
                            union(&mut parent, k, m);
                        }
                    }
                }
            }
        }
    }
    let mut roots: Vec<usize> = (0..parent.len()).map(|x| find(&mut parent, x)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}
