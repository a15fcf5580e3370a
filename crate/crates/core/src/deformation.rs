//! Perturbation families `F(·, A, B)` that remove a branch point while
//! keeping one Gauss map fixed.
//!
//! For orientation `+` (all four derivatives nonzero, `n₁` minimal):
//!
//! ```text
//! h₁ = α f̃₁,   h₂ = z^{n₂−n₃} β f̃₂,   h₃ = β f̃₃,   h₄ = z^{n₄−n₁} α f̃₄
//! ```
//!
//! with `α = z^{n₁} + Σ aᵢzⁱ`, `β = z^{n₃} + Σ bᵢzⁱ` and `fᵢ′ = z^{nᵢ} f̃ᵢ`.
//! Then `h₁h₂ + h₃h₄ = 0` and `h₃/h₂ = f₃′/f₂′`, so `γ₊` is unchanged.
//! Orientation `−` uses `β` of degree `n₄`, puts it on `h₂, h₄` and the
//! shift on `h₃`, which preserves `γ₋ = −h₄/h₂` instead.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::SamplerConfig;
use crate::cpoly::CPoly;
use crate::error::{Error, Result};
use crate::intersect::{find_double_points, is_transverse};
use crate::linalg::det4;
use crate::scalar::{Real, C};
use crate::weierstrass::{Orientation, WeierstrassData};

/// Parameters `(A, B)` of one family member, plus the path coordinate `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct PerturbParams<T: Real> {
    #[serde(rename = "A")]
    pub a: Vec<C<T>>,
    #[serde(rename = "B")]
    pub b: Vec<C<T>>,
    pub orientation: Orientation,
    pub t: T,
}

impl<T: Real> PerturbParams<T> {
    /// `A = B = 0` with the lengths required by `w`.
    pub fn zero(w: &WeierstrassData<T>, orientation: Orientation) -> Result<Self> {
        let (la, lb) = parameter_lengths(w, orientation)?;
        Ok(Self {
            a: vec![C::zero(); la],
            b: vec![C::zero(); lb],
            orientation,
            t: T::zero(),
        })
    }

    /// `(sA, sB)` at path coordinate `s·t`.
    pub fn scaled(&self, s: T) -> Self {
        Self {
            a: self.a.iter().map(|&x| x * s).collect(),
            b: self.b.iter().map(|&x| x * s).collect(),
            orientation: self.orientation,
            t: self.t * s,
        }
    }

    pub fn norm_a(&self) -> T {
        l2(&self.a)
    }

    pub fn norm_b(&self) -> T {
        l2(&self.b)
    }
}

fn l2<T: Real>(v: &[C<T>]) -> T {
    v.iter()
        .map(|x| x.norm_sqr())
        .fold(T::zero(), |a, b| a + b)
        .sqrt()
}

/// Which construction applies to the base data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Recipe {
    /// All four derivatives nonzero.
    Full,
    /// `f₂′ ≡ f₄′ ≡ 0` (a holomorphic curve), orientation `+`.
    ReducedPlus,
    /// `f₂′ ≡ f₃′ ≡ 0`, orientation `−`.
    ReducedMinus,
    /// Only `f₁′` nonzero: a plane. `B` is empty.
    Flat,
}

#[derive(Clone, Debug)]
struct Plan<T: Real> {
    recipe: Recipe,
    orientation: Orientation,
    n1: usize,
    nb: Option<usize>,
    shift: usize,
    tilde: [CPoly<T>; 4],
}

impl<T: Real> Plan<T> {
    fn new(w: &WeierstrassData<T>, orientation: Orientation) -> Result<Self> {
        let orders = w.orders();
        let n1 = orders[0].finite().ok_or_else(|| {
            Error::OrderViolation("f1' vanishes identically; relabel first".into())
        })?;
        if orders.iter().any(|o| o.finite().is_some_and(|n| n < n1)) {
            return Err(Error::OrderViolation(format!(
                "n1 = {n1} is not minimal among {orders:?}; relabel first"
            )));
        }
        let fp = w.fprime();
        let zero = [0, 1, 2, 3].map(|i| fp[i].is_zero());
        let ord = |i: usize| orders[i].finite().unwrap_or(0);
        let tilde = [0, 1, 2, 3].map(|i| fp[i].shift_down(ord(i)));
        let (recipe, nb, shift) = if !zero[1] {
            if zero[2] || zero[3] {
                return Err(Error::OrderViolation(
                    "f2' nonzero but f3' f4' vanishes: data is not conformal".into(),
                ));
            }
            match orientation {
                Orientation::Plus => (Recipe::Full, Some(ord(2)), ord(3) - n1),
                Orientation::Minus => (Recipe::Full, Some(ord(3)), ord(2) - n1),
            }
        } else if zero[3] {
            if zero[2] {
                (Recipe::Flat, None, 0)
            } else if orientation == Orientation::Plus {
                (Recipe::ReducedPlus, Some(ord(2)), 0)
            } else {
                return Err(Error::OrderViolation(
                    "orientation - needs f4' != 0; for f2' = f4' = 0 the family would keep a branch point".into(),
                ));
            }
        } else if orientation == Orientation::Minus {
            (Recipe::ReducedMinus, Some(ord(3)), 0)
        } else {
            return Err(Error::OrderViolation(
                "orientation + needs f3' != 0; for f2' = f3' = 0 the family would keep a branch point".into(),
            ));
        };
        Ok(Self {
            recipe,
            orientation,
            n1,
            nb,
            shift,
            tilde,
        })
    }

    fn lengths(&self) -> (usize, usize) {
        (self.n1 + 1, self.nb.map_or(0, |n| n + 1))
    }

    fn alpha(&self, a: &[C<T>]) -> CPoly<T> {
        CPoly::perturbed_monomial(self.n1, a)
    }

    fn beta(&self, b: &[C<T>]) -> CPoly<T> {
        self.nb
            .map_or_else(CPoly::zero, |n| CPoly::perturbed_monomial(n, b))
    }

    fn h(&self, a: &[C<T>], b: &[C<T>]) -> [CPoly<T>; 4] {
        let alpha = self.alpha(a);
        let beta = self.beta(b);
        let t = &self.tilde;
        let k = self.shift;
        let z = CPoly::zero;
        match (self.recipe, self.orientation) {
            (Recipe::Full, Orientation::Plus) => [
                alpha.mul(&t[0]),
                beta.mul(&t[1]).shift_up(k),
                beta.mul(&t[2]),
                alpha.mul(&t[3]).shift_up(k),
            ],
            (Recipe::Full, Orientation::Minus) => [
                alpha.mul(&t[0]),
                beta.mul(&t[1]).shift_up(k),
                alpha.mul(&t[2]).shift_up(k),
                beta.mul(&t[3]),
            ],
            (Recipe::ReducedPlus, _) => [alpha.mul(&t[0]), z(), beta.mul(&t[2]), z()],
            (Recipe::ReducedMinus, _) => [alpha.mul(&t[0]), z(), z(), beta.mul(&t[3])],
            (Recipe::Flat, _) => [alpha.mul(&t[0]), z(), z(), z()],
        }
    }

    /// `∂hᵢ/∂a₀` and `∂hᵢ/∂b₀`, written out from the recipe; both are
    /// independent of `(A, B)`.
    fn partials(&self) -> ([CPoly<T>; 4], [CPoly<T>; 4]) {
        let t = &self.tilde;
        let k = self.shift;
        let z = CPoly::zero;
        match (self.recipe, self.orientation) {
            (Recipe::Full, Orientation::Plus) => (
                [t[0].clone(), z(), z(), t[3].shift_up(k)],
                [z(), t[1].shift_up(k), t[2].clone(), z()],
            ),
            (Recipe::Full, Orientation::Minus) => (
                [t[0].clone(), z(), t[2].shift_up(k), z()],
                [z(), t[1].shift_up(k), z(), t[3].clone()],
            ),
            (Recipe::ReducedPlus, _) => {
                ([t[0].clone(), z(), z(), z()], [z(), z(), t[2].clone(), z()])
            }
            (Recipe::ReducedMinus, _) => {
                ([t[0].clone(), z(), z(), z()], [z(), z(), z(), t[3].clone()])
            }
            (Recipe::Flat, _) => ([t[0].clone(), z(), z(), z()], [z(), z(), z(), z()]),
        }
    }
}

/// Required lengths of `(A, B)` for the given base data and orientation.
pub fn parameter_lengths<T: Real>(
    w: &WeierstrassData<T>,
    orientation: Orientation,
) -> Result<(usize, usize)> {
    Ok(Plan::new(w, orientation)?.lengths())
}

/// One member `F(·, A, B)` of the family attached to a base map.
#[derive(Clone, Debug)]
pub struct FamilyMember<T: Real> {
    base: WeierstrassData<T>,
    params: PerturbParams<T>,
    recipe: Recipe,
    shift: usize,
    h: [CPoly<T>; 4],
    deformed: WeierstrassData<T>,
}

impl<T: Real> FamilyMember<T> {
    pub fn base(&self) -> &WeierstrassData<T> {
        &self.base
    }

    pub fn params(&self) -> &PerturbParams<T> {
        &self.params
    }

    pub fn recipe(&self) -> Recipe {
        self.recipe
    }

    /// `h₁ … h₄`, the derivatives of the deformed map.
    pub fn h(&self) -> &[CPoly<T>; 4] {
        &self.h
    }

    pub fn deformed(&self) -> &WeierstrassData<T> {
        &self.deformed
    }

    /// Largest coefficient of `h₁h₂ + h₃h₄` relative to the coefficient scale of the `hᵢ`.
    pub fn conformality_residual(&self) -> T {
        let r = self.h[0]
            .mul(&self.h[1])
            .add(&self.h[2].mul(&self.h[3]))
            .max_abs();
        let s = self.h.iter().map(CPoly::max_abs).fold(T::zero(), T::max);
        r / (s * s).max(T::min_positive_value())
    }

    /// Exponent `n₂−n₃` (orientation `+`) or `n₂−n₄` (orientation `−`) of the full recipe.
    pub fn shift(&self) -> usize {
        self.shift
    }
}

/// Build `F(·, A, B)` from base data whose first order `n₁` is minimal.
pub fn build_family_member<T: Real>(
    w: &WeierstrassData<T>,
    p: &PerturbParams<T>,
) -> Result<FamilyMember<T>> {
    let plan = Plan::new(w, p.orientation)?;
    let (la, lb) = plan.lengths();
    if p.a.len() != la || p.b.len() != lb {
        return Err(Error::ParameterShape(format!(
            "expected |A| = {la}, |B| = {lb} for orientation {}, got {}, {}",
            p.orientation.symbol(),
            p.a.len(),
            p.b.len()
        )));
    }
    if p.norm_a() > T::one() || p.norm_b() > T::one() {
        return Err(Error::ParameterShape(
            "parameters must lie in the unit balls".into(),
        ));
    }
    if !(p.t >= T::zero()) {
        return Err(Error::ParameterShape("t must be non-negative".into()));
    }
    let h = plan.h(&p.a, &p.b);
    // the products share factors, so only rounding and the base residual remain
    let tol =
        (w.relative_conformality_residual() * T::lit(64.0)).max(T::epsilon() * T::lit(4096.0));
    let deformed = WeierstrassData::load(h.clone(), tol)?;
    Ok(FamilyMember {
        base: w.clone(),
        params: p.clone(),
        recipe: plan.recipe,
        shift: plan.shift,
        h,
        deformed,
    })
}

/// Roots of `z^n + Σ aᵢzⁱ` are pairwise distinct and away from 0, both
/// measured against `tol`. Missing trailing coefficients count as zero.
pub fn perturbed_roots_generic<T: Real>(n: usize, a: &[C<T>], tol: T) -> bool {
    let p = CPoly::perturbed_monomial(n, a);
    if p.is_zero() {
        return false;
    }
    if p.degree() == Some(0) {
        return true;
    }
    let Ok(roots) = p.roots() else {
        return false;
    };
    if roots.iter().any(|r| r.norm() <= tol) {
        return false;
    }
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            if (roots[i] - roots[j]).norm() <= tol {
                return false;
            }
        }
    }
    true
}

/// Genericity condition `X₁`: both perturbed monomials have simple nonzero roots.
pub fn check_x1<T: Real>(p: &PerturbParams<T>, w: &WeierstrassData<T>, root_sep_tol: T) -> bool {
    let Ok(plan) = Plan::new(w, p.orientation) else {
        return false;
    };
    let (la, lb) = plan.lengths();
    if p.a.len() != la || p.b.len() != lb {
        return false;
    }
    if !perturbed_roots_generic(plan.n1, &p.a, root_sep_tol) {
        return false;
    }
    match plan.nb {
        Some(nb) => perturbed_roots_generic(nb, &p.b, root_sep_tol),
        None => true,
    }
}

/// Uniform point of the complex ball of radius `t` in `ℂ^len`.
fn ball_sample<T: Real>(rng: &mut ChaCha8Rng, len: usize, t: T) -> Vec<C<T>> {
    if len == 0 {
        return Vec::new();
    }
    let g: Vec<f64> = (0..2 * len).map(|_| rng.sample(StandardNormal)).collect();
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u: f64 = rng.gen();
    let r = t.to_f64_lossy() * u.powf(1.0 / (2 * len) as f64) / norm;
    (0..len)
        .map(|k| C::new(T::lit(g[2 * k] * r), T::lit(g[2 * k + 1] * r)))
        .collect()
}

/// Draw `‖A‖, ‖B‖ ≤ t` uniformly until the sample satisfies `X₁` and (if
/// configured) the deformed map has only transverse double points.
pub fn sample_generic<T: Real>(
    w: &WeierstrassData<T>,
    orientation: Orientation,
    t: T,
    seed: u64,
    cfg: &SamplerConfig<T>,
) -> Result<PerturbParams<T>> {
    if t.is_nan() || t < T::zero() || t > T::one() {
        return Err(Error::InvalidArgument(format!(
            "sampling scale t = {t} outside (0, 1]"
        )));
    }
    if t == T::zero() {
        return Err(Error::SamplingExhausted {
            attempts: 0,
            t: 0.0,
        });
    }
    let (la, lb) = parameter_lengths(w, orientation)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cfg.retry_budget {
        let p = PerturbParams {
            a: ball_sample(&mut rng, la, t),
            b: ball_sample(&mut rng, lb, t),
            orientation,
            t,
        };
        if !check_x1(&p, w, cfg.root_sep_tol) {
            continue;
        }
        let Ok(member) = build_family_member(w, &p) else {
            continue;
        };
        if cfg.require_transverse {
            let Ok(found) = find_double_points(member.deformed(), &cfg.search) else {
                continue;
            };
            let det_tol = cfg.search.det_tol;
            if !found
                .points
                .iter()
                .all(|dp| is_transverse(dp, member.deformed(), det_tol))
            {
                continue;
            }
        }
        return Ok(p);
    }
    Err(Error::SamplingExhausted {
        attempts: cfg.retry_budget,
        t: t.to_f64_lossy(),
    })
}

/// Largest chordal distance between the `(γ₊, γ₋)` values of the deformed
/// and the base map over `points`. Points where either value is
/// indeterminate are skipped.
pub fn gauss_residuals<T: Real>(fm: &FamilyMember<T>, points: &[C<T>]) -> (T, T) {
    let mut worst = (T::zero(), T::zero());
    for &z in points {
        let (Ok(b), Ok(d)) = (
            fm.base.gauss_homogeneous(z),
            fm.deformed.gauss_homogeneous(z),
        ) else {
            continue;
        };
        worst.0 = worst.0.max(b[0].chordal_distance(&d[0]));
        worst.1 = worst.1.max(b[1].chordal_distance(&d[1]));
    }
    worst
}

/// Residual of the Gauss map the family is built to preserve.
pub fn gauss_invariance_residual<T: Real>(fm: &FamilyMember<T>, points: &[C<T>]) -> T {
    let (plus, minus) = gauss_residuals(fm, points);
    match fm.params.orientation {
        Orientation::Plus => plus,
        Orientation::Minus => minus,
    }
}

/// Closed form of `det(∂Φ/∂a₀, ∂Φ/∂b̄₀, ε₁, ε₂)` through antiderivatives of the
/// partials of the `hᵢ`: `I(P_a,1)·conj I(P_b,3) − I(P_a,4)·conj I(P_b,2)` for
/// orientation `+`, with `I(g) = ∫_{z₂}^{z₁} g`; indices `(3,4)` trade places
/// for orientation `−`.
pub fn transversality_determinant<T: Real>(fm: &FamilyMember<T>, z1: C<T>, z2: C<T>) -> C<T> {
    let plan = Plan::new(&fm.base, fm.params.orientation).expect("member was built from this plan");
    let (pa, pb) = plan.partials();
    let int = |g: &CPoly<T>| {
        let big = g.antiderivative();
        big.eval(z1) - big.eval(z2)
    };
    // (h index paired with a₀ in the second term, h index carrying b₀ in the first)
    let (ia, ib) = match fm.params.orientation {
        Orientation::Plus => (3, 2),
        Orientation::Minus => (2, 3),
    };
    int(&pa[0]) * int(&pb[ib]).conj() - int(&pa[ia]) * int(&pb[1]).conj()
}

/// The same determinant assembled from the deformed maps themselves: the
/// `a₀`- and `b̄₀`-columns are exact affine differences of `Φ = (Ψ(z₁), Ψ(z₂))`,
/// where `Ψ = (F₁+iF₂, F₃−iF₄)` for `+` (holomorphic in `A`, antiholomorphic in
/// `B`) and `Ψ = (F₁+iF₂, F₃+iF₄)` for `−`.
pub fn transversality_determinant_direct<T: Real>(
    fm: &FamilyMember<T>,
    z1: C<T>,
    z2: C<T>,
) -> C<T> {
    let plan = Plan::new(&fm.base, fm.params.orientation).expect("member was built from this plan");
    let one = C::new(T::one(), T::zero());
    let psi = |a: &[C<T>], b: &[C<T>]| {
        let prim = plan.h(a, b).map(|p| p.antiderivative());
        let at = |z: C<T>| {
            let v = prim.clone().map(|p| p.eval(z));
            let w1 = v[0] + v[1].conj();
            let w2 = v[2] + v[3].conj();
            match plan.orientation {
                Orientation::Plus => [w1, w2.conj()],
                Orientation::Minus => [w1, w2],
            }
        };
        let (p, q) = (at(z1), at(z2));
        [p[0], p[1], q[0], q[1]]
    };
    let p = &fm.params;
    let base = psi(&p.a, &p.b);
    let mut a1 = p.a.clone();
    a1[0] += one;
    let da = psi(&a1, &p.b);
    let col_a = [0, 1, 2, 3].map(|i| da[i] - base[i]);
    let col_b = if p.b.is_empty() {
        [C::zero(); 4]
    } else {
        let mut b1 = p.b.clone();
        b1[0] += one;
        let db = psi(&p.a, &b1);
        [0, 1, 2, 3].map(|i| db[i] - base[i])
    };
    let o = C::zero();
    let e1 = [one, o, one, o];
    let e2 = [o, one, o, one];
    det4(&[col_a, col_b, e1, e2])
}

/// Result of scanning `|det| / |z₁ − z₂|²` over pairs in a small disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterminantBound<T: Real> {
    pub min_ratio: T,
    pub pairs: usize,
    /// False when `n₂−n₃` (resp. `n₂−n₄`) is zero; the bound is then not expected.
    pub strict: bool,
}

/// Minimum of `|det(z₁,z₂)| / |z₁−z₂|²` over all pairs from an `n`-point
/// sunflower sample of the disk of radius `eta`.
pub fn determinant_bound<T: Real>(fm: &FamilyMember<T>, eta: T, n: usize) -> DeterminantBound<T> {
    let pts = sunflower(n, eta);
    let mut min_ratio = T::infinity();
    let mut pairs = 0;
    for (i, &z1) in pts.iter().enumerate() {
        for (j, &z2) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = transversality_determinant(fm, z1, z2).norm();
            min_ratio = min_ratio.min(d / (z1 - z2).norm_sqr());
            pairs += 1;
        }
    }
    DeterminantBound {
        min_ratio,
        pairs,
        strict: fm.recipe != Recipe::Full || fm.shift > 0,
    }
}

/// `n` evenly spread points of the disk of radius `r` (Vogel's spiral).
pub fn sunflower<T: Real>(n: usize, r: T) -> Vec<C<T>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let rho = r.to_f64_lossy() * ((k as f64 + 0.5) / n as f64).sqrt();
            let th = golden * k as f64;
            C::new(T::lit(rho * th.cos()), T::lit(rho * th.sin()))
        })
        .collect()
}
