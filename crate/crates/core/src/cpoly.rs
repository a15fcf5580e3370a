//! Dense complex polynomials.
//!
//! Coefficients are stored lowest degree first and kept trimmed: the highest
//! stored coefficient is nonzero, and the zero polynomial has no coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Default relative cutoff used by [`CPoly::order_at_zero`].
pub const DEFAULT_VALUATION_REL_TOL: f64 = 1e-10;

/// Residual bound for accepted roots, relative to `1 + max|coeff|`.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-9;

const ABERTH_MAX_ITER: usize = 500;

/// Vanishing order of a polynomial at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Order {
    Finite(usize),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<usize> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Order::Infinite)
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CPoly<T: Real> {
    coeffs: Vec<C<T>>,
}

impl<T: Real> Default for CPoly<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> CPoly<T> {
    pub fn new(mut coeffs: Vec<C<T>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C<T>) -> Self {
        Self::new(vec![c])
    }

    /// `c · z^k`.
    pub fn monomial(c: C<T>, k: usize) -> Self {
        let mut coeffs = vec![C::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&x| C::new(T::lit(x), T::zero()))
                .collect(),
        )
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C<T>]) -> Self {
        roots.iter().fold(Self::one(), |acc, &r| {
            acc.mul(&Self::new(vec![-r, C::one()]))
        })
    }

    /// `z^n + Σ_{i=0}^{n} a_i z^i`; the `a_n` entry perturbs the leading coefficient.
    pub fn perturbed_monomial(n: usize, a: &[C<T>]) -> Self {
        let mut coeffs = vec![C::zero(); n + 1];
        coeffs[n] = C::one();
        for (k, &ak) in a.iter().enumerate().take(n + 1) {
            coeffs[k] += ak;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C<T>> {
        self.coeffs
    }

    /// Coefficient of `z^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> C<T> {
        self.coeffs.get(k).copied().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Largest coefficient modulus (zero for the zero polynomial).
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|&c| -c).collect())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Multiply by `z^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![C::zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(coeffs)
    }

    /// Drop the `k` lowest coefficients, i.e. the quotient by `z^k`.
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().skip(k).copied().collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * T::from_usize_lossy(k))
                .collect(),
        )
    }

    /// The primitive vanishing at the origin.
    pub fn antiderivative(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(C::zero());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / T::from_usize_lossy(k + 1)),
        );
        Self::new(coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C<T>) -> C<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: C<T>) -> (C<T>, C<T>) {
        let mut p = C::zero();
        let mut dp = C::zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Smallest `k` with `|coeffs[k]| > tol`, or [`Order::Infinite`] if none.
    pub fn valuation(&self, tol: T) -> Order {
        self.coeffs
            .iter()
            .position(|c| c.norm() > tol)
            .map_or(Order::Infinite, Order::Finite)
    }

    /// Valuation with the default cutoff `1e-10 · max|coeff|`.
    pub fn order_at_zero(&self) -> Order {
        self.valuation(self.max_abs() * T::lit(DEFAULT_VALUATION_REL_TOL))
    }

    /// All complex roots, with multiplicity.
    ///
    /// Exact zero low coefficients contribute roots at the origin; the rest
    /// are found by simultaneous Aberth–Ehrlich iteration followed by a
    /// Newton polish, then residual-checked.
    pub fn roots(&self) -> Result<Vec<C<T>>> {
        let deg = match self.degree() {
            None => return Err(Error::ZeroPolynomial),
            Some(d) => d,
        };
        let zeros_at_origin = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        let reduced = self.shift_down(zeros_at_origin);
        let mut roots = vec![C::zero(); zeros_at_origin];
        if reduced.degree().unwrap_or(0) > 0 {
            let monic = reduced.scale(C::<T>::one() / *reduced.coeffs.last().unwrap());
            roots.extend(aberth(&monic));
        }
        debug_assert_eq!(roots.len(), deg);

        let bound = T::lit(ROOT_RESIDUAL_TOL) * (T::one() + self.max_abs());
        for r in &roots {
            let res = self.eval(*r).norm();
            if res > bound {
                return Err(Error::RootResidual {
                    residual: res.to_f64_lossy(),
                });
            }
        }
        Ok(roots)
    }
}

fn aberth<T: Real>(p: &CPoly<T>) -> Vec<C<T>> {
    let n = p.degree().unwrap_or(0);
    let dp = p.derivative();
    let coeffs = p.coeffs();
    // Fujiwara-type bound on root moduli
    let radius = (0..n)
        .map(|k| {
            let c = coeffs[k].norm();
            c.powf(T::one() / T::from_usize_lossy(n - k))
        })
        .fold(T::zero(), T::max)
        .max(T::lit(1e-3));
    let two_pi = T::TAU();
    let mut z: Vec<C<T>> = (0..n)
        .map(|k| {
            let ang = two_pi * T::from_usize_lossy(k) / T::from_usize_lossy(n) + T::lit(0.4);
            C::from_polar(radius, ang)
        })
        .collect();

    let eps = T::epsilon() * T::lit(8.0);
    for _ in 0..ABERTH_MAX_ITER {
        let mut max_step = T::zero();
        for k in 0..n {
            let zk = z[k];
            let pk = p.eval(zk);
            if pk.is_zero() {
                continue;
            }
            let ratio = pk / dp.eval(zk);
            let repulsion: C<T> = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = zk - z[j];
                    if d.is_zero() {
                        C::zero()
                    } else {
                        C::<T>::one() / d
                    }
                })
                .fold(C::zero(), |a, b| a + b);
            let denom = C::<T>::one() - ratio * repulsion;
            let step = if denom.is_zero() {
                ratio
            } else {
                ratio / denom
            };
            if step.re.is_finite() && step.im.is_finite() {
                z[k] = zk - step;
                max_step = max_step.max(step.norm() / (T::one() + zk.norm()));
            }
        }
        if max_step <= eps {
            break;
        }
    }
    // Newton polish; skipped where the derivative is tiny (clustered roots).
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (v, d) = p.eval_with_derivative(*zk);
            if d.norm() <= T::epsilon() * (T::one() + v.norm()) {
                break;
            }
            let next = *zk - v / d;
            if p.eval(next).norm() < v.norm() {
                *zk = next;
            } else {
                break;
            }
        }
    }
    z
}

impl<T: Real> Add for &CPoly<T> {
    type Output = CPoly<T>;
    fn add(self, rhs: Self) -> CPoly<T> {
        CPoly::add(self, rhs)
    }
}

impl<T: Real> Sub for &CPoly<T> {
    type Output = CPoly<T>;
    fn sub(self, rhs: Self) -> CPoly<T> {
        CPoly::sub(self, rhs)
    }
}

impl<T: Real> Mul for &CPoly<T> {
    type Output = CPoly<T>;
    fn mul(self, rhs: Self) -> CPoly<T> {
        CPoly::mul(self, rhs)
    }
}

impl<T: Real> Neg for &CPoly<T> {
    type Output = CPoly<T>;
    fn neg(self) -> CPoly<T> {
        CPoly::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cl;
    use proptest::prelude::*;

    type P = CPoly<f64>;

    fn re(xs: &[f64]) -> P {
        P::from_real(xs)
    }

    #[test]
    fn add_examples() {
        assert_eq!(re(&[1.0, 1.0]).add(&re(&[-1.0, 1.0])), re(&[0.0, 2.0]));
        let p = re(&[3.0, 0.0, -2.0]);
        assert_eq!(p.add(&P::zero()), p);
        assert_eq!(
            re(&[0.0, 0.0, 1.0]).add(&re(&[0.0, 0.0, 0.0, 1.0])),
            re(&[0.0, 0.0, 1.0, 1.0])
        );
    }

    #[test]
    fn cancellation_trims() {
        let s = re(&[0.0, 1.0]).sub(&re(&[0.0, 1.0]));
        assert!(s.is_zero());
        assert_eq!(s.degree(), None);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(
            re(&[0.0, 1.0]).mul(&re(&[0.0, 0.0, 0.0, 1.0])),
            re(&[0.0, 0.0, 0.0, 0.0, 1.0])
        );
        let p = re(&[2.0, -1.0, 5.0]);
        assert_eq!(p.mul(&P::one()), p);
        assert_eq!(
            re(&[1.0, 1.0]).mul(&re(&[1.0, -1.0])),
            re(&[1.0, 0.0, -1.0])
        );
        assert!(p.mul(&P::zero()).is_zero());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(re(&[0.0, 0.0, 0.0, 1.0]).derivative(), re(&[0.0, 0.0, 3.0]));
        assert!(re(&[7.0]).derivative().is_zero());
        assert_eq!(re(&[0.0, 0.0, 0.5]).derivative(), re(&[0.0, 1.0]));
    }

    #[test]
    fn antiderivative_examples() {
        assert_eq!(re(&[0.0, 1.0]).antiderivative(), re(&[0.0, 0.0, 0.5]));
        assert!(P::zero().antiderivative().is_zero());
        assert_eq!(
            re(&[0.0, 0.0, 3.0]).antiderivative(),
            re(&[0.0, 0.0, 0.0, 1.0])
        );
    }

    #[test]
    fn eval_examples() {
        assert_eq!(re(&[0.0, 0.0, 1.0]).eval(cl(2.0, 0.0)), cl(4.0, 0.0));
        let p = re(&[-3.5, 2.0, 1.0]);
        assert_eq!(p.eval(cl(0.0, 0.0)), cl(-3.5, 0.0));
        assert_eq!(re(&[1.0, 1.0]).eval(cl(0.0, 1.0)), cl(1.0, 1.0));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(
            re(&[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).valuation(0.0),
            Order::Finite(2)
        );
        assert_eq!(P::zero().valuation(0.0), Order::Infinite);
        assert_eq!(
            re(&[0.0, 1e-14, 0.0, 1.0]).valuation(1e-12),
            Order::Finite(3)
        );
        assert_eq!(re(&[1e-14, 0.0]).valuation(1e-12), Order::Infinite);
    }

    fn sorted(mut v: Vec<C<f64>>) -> Vec<C<f64>> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn roots_examples() {
        let r = sorted(re(&[-1.0, 0.0, 1.0]).roots().unwrap());
        assert!((r[0] - cl(-1.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - cl(1.0, 0.0)).norm() < 1e-12);

        let r = re(&[0.0, 0.0, 1.0]).roots().unwrap();
        assert_eq!(r, vec![cl(0.0, 0.0), cl(0.0, 0.0)]);

        let planted = [cl(1.0, 0.0), cl(0.0, 1.0), cl(2.0, 0.0)];
        let p = P::from_roots(&planted);
        assert_eq!(p.coeff(2), cl(-3.0, -1.0));
        let got = p.roots().unwrap();
        assert_eq!(got.len(), 3);
        for want in planted {
            let best = got
                .iter()
                .map(|g| (g - want).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "missed root {want}: {best}");
        }

        assert!(matches!(P::zero().roots(), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn double_root_is_resolved_to_sqrt_eps() {
        // (z + 0.1)^2
        let r = re(&[0.01, 0.2, 1.0]).roots().unwrap();
        for z in r {
            assert!((z - cl(-0.1, 0.0)).norm() < 1e-7);
        }
    }

    #[test]
    fn perturbed_monomial_includes_leading_entry() {
        let a = [cl(0.1, 0.0), cl(0.2, 0.0)];
        assert_eq!(P::perturbed_monomial(1, &a), re(&[0.1, 1.2]));
    }

    #[test]
    fn works_in_single_precision() {
        let p = CPoly::<f32>::from_real(&[-1.0, 0.0, 1.0]);
        let mut r = p.roots().unwrap();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((r[0].re + 1.0).abs() < 1e-5 && (r[1].re - 1.0).abs() < 1e-5);
        assert_eq!(p.derivative().antiderivative().coeff(2).re, 1.0);
    }

    fn arb_poly(max_deg: usize) -> impl Strategy<Value = P> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=max_deg + 1)
            .prop_map(|v| P::new(v.into_iter().map(|(a, b)| C::new(a, b)).collect()))
    }

    fn arb_disk_point() -> impl Strategy<Value = C<f64>> {
        (0.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| C::from_polar(r, t))
    }

    proptest! {
        #[test]
        fn derivative_inverts_antiderivative(p in arb_poly(20)) {
            // c / (k+1) · (k+1) can be off by one rounding
            let back = p.antiderivative().derivative();
            prop_assert_eq!(back.coeffs().len(), p.coeffs().len());
            for (a, b) in back.coeffs().iter().zip(p.coeffs()) {
                prop_assert!((a - b).norm() <= 4.0 * f64::EPSILON * b.norm());
            }
        }

        #[test]
        fn eval_is_multiplicative(p in arb_poly(20), q in arb_poly(20), z in arb_disk_point()) {
            let lhs = p.mul(&q).eval(z);
            let rhs = p.eval(z) * q.eval(z);
            let scale = 1.0 + (p.max_abs() * q.max_abs()) * 21.0;
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale.max(rhs.norm()));
        }

        #[test]
        fn valuation_is_additive(p in arb_poly(10), q in arb_poly(10), sp in 0usize..4, sq in 0usize..4) {
            let (p, q) = (p.shift_up(sp), q.shift_up(sq));
            prop_assume!(!p.is_zero() && !q.is_zero());
            let vp = p.valuation(0.0).finite().unwrap();
            let vq = q.valuation(0.0).finite().unwrap();
            prop_assert_eq!(p.mul(&q).valuation(0.0), Order::Finite(vp + vq));
        }

        #[test]
        fn planted_roots_are_recovered(roots in prop::collection::vec(arb_disk_point(), 1..8)) {
            // keep planted roots distinct
            for i in 0..roots.len() {
                for j in 0..i {
                    prop_assume!((roots[i] - roots[j]).norm() > 0.05);
                }
            }
            let got = P::from_roots(&roots).roots().unwrap();
            prop_assert_eq!(got.len(), roots.len());
            let mut used = vec![false; got.len()];
            for want in &roots {
                let (idx, d) = got.iter().enumerate()
                    .filter(|(i, _)| !used[*i])
                    .map(|(i, g)| (i, (g - want).norm()))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .unwrap();
                used[idx] = true;
                prop_assert!(d < 1e-8, "root {} off by {}", want, d);
            }
        }
    }
}
