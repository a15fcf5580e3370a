//! Closed-braid presentation of a fiber-angle–resampled knot.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

use super::KnotCurve;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Crossing<T: Real> {
    pub theta: T,
    pub i: usize,
    pub j: usize,
    pub sign: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct BraidDiagram<T: Real> {
    /// `strands[s][m]`: fiber position `F₃ + iF₄` of strand `s` at `θ = 2πm/M`.
    pub strands: Vec<Vec<C<T>>>,
    pub crossings: Vec<Crossing<T>>,
}

impl<T: Real> BraidDiagram<T> {
    pub fn strand_count(&self) -> usize {
        self.strands.len()
    }

    /// Smallest distance between two different strands at a common fiber angle.
    pub fn min_strand_separation(&self) -> Option<T> {
        let n = self.strands.len();
        let mut best: Option<T> = None;
        for a in 0..n {
            for b in (a + 1)..n {
                for (u, v) in self.strands[a].iter().zip(&self.strands[b]) {
                    let d = (u - v).norm();
                    best = Some(best.map_or(d, |x| x.min(d)));
                }
            }
        }
        best
    }
}

/// Read off the braid: strands are the laps of each loop between the fiber
/// angles `0` and `2π`; two strands cross where the real parts of their
/// fiber positions swap order.
///
/// The sign is `+1` when the difference of the two fiber positions turns
/// counterclockwise through the crossing, i.e. `−sign(Im d)·sign(Δ Re d)`.
/// This makes the braid of a complex curve positive and matches the
/// orientation used by [`super::linking_number_gauss`].
pub fn braid_from_knot<T: Real>(k: &KnotCurve<T>) -> Result<BraidDiagram<T>> {
    let m = k.samples_per_turn.ok_or_else(|| {
        Error::InvalidArgument("braid needs a knot resampled by fiber angle".into())
    })?;
    let two_pi = T::TAU();
    let step = two_pi / T::from_usize_lossy(m);

    // arcs[m] = (strand, start, end) for every piece from angle index m to m + 1
    type Arc<T> = (usize, C<T>, C<T>);
    let mut arcs: Vec<Vec<Arc<T>>> = vec![Vec::new(); m];
    let mut strands: Vec<Vec<C<T>>> = Vec::new();
    for l in &k.loops {
        let n = l.len();
        let turns = n / m;
        let offset = strands.len();
        strands.extend((0..turns).map(|_| vec![C::new(T::zero(), T::zero()); m]));
        let u = l.fiber_positions();
        let p0 = (l.theta[0] / step).round().to_i64().unwrap_or(0);
        let lap0 = p0.div_euclid(m as i64);
        for (idx, &pos) in u.iter().enumerate() {
            let p = p0 + idx as i64;
            let angle = p.rem_euclid(m as i64) as usize;
            let lap = (p.div_euclid(m as i64) - lap0).rem_euclid(turns as i64) as usize;
            let s = offset + lap;
            strands[s][angle] = pos;
            arcs[angle].push((s, pos, u[(idx + 1) % n]));
        }
    }

    let scale = strands
        .iter()
        .flat_map(|s| s.iter().map(|u| u.norm()))
        .fold(T::zero(), T::max)
        .max(T::min_positive_value());
    let collision = scale * T::epsilon() * T::lit(1e3);
    let mut crossings = Vec::new();
    for (angle, pieces) in arcs.iter().enumerate() {
        for a in 0..pieces.len() {
            for b in (a + 1)..pieces.len() {
                let (sa, a0, a1) = pieces[a];
                let (sb, b0, b1) = pieces[b];
                let d0 = a0 - b0;
                let d1 = a1 - b1;
                if (d0.re < T::zero()) == (d1.re < T::zero()) {
                    continue;
                }
                let lam = d0.re / (d0.re - d1.re);
                let im = d0.im + (d1.im - d0.im) * lam;
                let theta = step * (T::from_usize_lossy(angle) + lam);
                if im.abs() <= collision {
                    return Err(Error::StrandCollision {
                        theta: theta.to_f64_lossy(),
                    });
                }
                let turning = if d1.re > d0.re { T::one() } else { -T::one() };
                let sign = if im * turning < T::zero() { 1 } else { -1 };
                crossings.push(Crossing {
                    theta,
                    i: sa.min(sb),
                    j: sa.max(sb),
                    sign,
                });
            }
        }
    }
    crossings.sort_by(|x, y| x.theta.partial_cmp(&y.theta).unwrap());
    Ok(BraidDiagram { strands, crossings })
}

/// Sum of the crossing signs.
pub fn algebraic_crossing_number<T: Real>(b: &BraidDiagram<T>) -> i64 {
    b.crossings.iter().map(|c| c.sign as i64).sum()
}
