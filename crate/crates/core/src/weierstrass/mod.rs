//! Conformal minimal maps `F = (f₁ + f̄₂, f₃ + f̄₄)` of the disk into ℝ⁴ = ℂ².
//!
//! The map is given by the four holomorphic derivatives `f₁′ … f₄′`, which
//! must satisfy `f₁′f₂′ + f₃′f₄′ = 0` (conformality). The primitives `fᵢ` are
//! normalized by `fᵢ(0) = 0`, so `F(0)` is the origin. The point `0` is a
//! branch point of multiplicity `N = 1 + min ordᵢ` whenever `N ≥ 2`.

mod gauss;
mod two_vector;

pub use gauss::{GaussValue, Homogeneous};
pub use two_vector::{apply, TwoVector};

use serde::{Deserialize, Serialize};

use crate::cpoly::{CPoly, Order};
use crate::error::{Error, Result};
use crate::linalg::{norm4, Vec4};
use crate::scalar::{Real, C};

/// Which of the two symplectic structures (self-dual `ω₊` or anti-self-dual `ω₋`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Orientation {
    pub fn sign(self) -> i32 {
        match self {
            Orientation::Plus => 1,
            Orientation::Minus => -1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Orientation::Plus => "+",
            Orientation::Minus => "-",
        }
    }
}

impl std::str::FromStr for Orientation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "pos" => Ok(Orientation::Plus),
            "-" | "minus" | "neg" => Ok(Orientation::Minus),
            other => Err(Error::InvalidArgument(format!(
                "unknown orientation {other:?}"
            ))),
        }
    }
}

/// Index relabeling bringing the smallest vanishing order into slot 1.
///
/// `swap_pairs` exchanges `(f₁,f₂) ↔ (f₃,f₄)`, i.e. `(x₁,x₂,x₃,x₄) ↦ (x₃,x₄,x₁,x₂)`;
/// `conj_first` then exchanges `f₁ ↔ f₂`, i.e. `x₂ ↦ −x₂`. The second one
/// reverses the orientation of ℝ⁴ and therefore swaps `Λ⁺` and `Λ⁻`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relabel {
    pub swap_pairs: bool,
    pub conj_first: bool,
}

impl Relabel {
    pub fn is_identity(&self) -> bool {
        !self.swap_pairs && !self.conj_first
    }

    pub fn apply_to_functions<X: Clone>(&self, f: &[X; 4]) -> [X; 4] {
        let mut g = f.clone();
        if self.swap_pairs {
            g = [g[2].clone(), g[3].clone(), g[0].clone(), g[1].clone()];
        }
        if self.conj_first {
            g.swap(0, 1);
        }
        g
    }

    /// Image of an original-coordinate point in relabeled coordinates.
    pub fn apply_to_point<T: Real>(&self, x: &Vec4<T>) -> Vec4<T> {
        let mut y = *x;
        if self.swap_pairs {
            y = [y[2], y[3], y[0], y[1]];
        }
        if self.conj_first {
            y[1] = -y[1];
        }
        y
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassData<T: Real> {
    fprime: [CPoly<T>; 4],
    f: [CPoly<T>; 4],
    orders: [Order; 4],
    branching: usize,
    residual: T,
    residual_scale: T,
}

impl<T: Real> WeierstrassData<T> {
    /// Validate and cache orders, primitives and the branching multiplicity.
    pub fn load(fprime: [CPoly<T>; 4], conf_tol: T) -> Result<Self> {
        if fprime.iter().all(CPoly::is_zero) {
            return Err(Error::EmptyData);
        }
        let orders = [0, 1, 2, 3].map(|i| fprime[i].order_at_zero());
        if let [Order::Finite(n1), Order::Finite(n2), Order::Finite(n3), Order::Finite(n4)] = orders
        {
            if n1 + n2 != n3 + n4 {
                return Err(Error::OrderMismatch {
                    left: n1 + n2,
                    right: n3 + n4,
                    orders,
                });
            }
        }
        let p12 = fprime[0].mul(&fprime[1]);
        let p34 = fprime[2].mul(&fprime[3]);
        let residual = p12.add(&p34).max_abs();
        let residual_scale = T::one().max(p12.max_abs()).max(p34.max_abs());
        if residual > conf_tol * residual_scale {
            return Err(Error::ConformalityViolation {
                residual: residual.to_f64_lossy(),
                tol: (conf_tol * residual_scale).to_f64_lossy(),
            });
        }
        let min_order = orders.iter().filter_map(|o| o.finite()).min().unwrap();
        let f = [0, 1, 2, 3].map(|i| fprime[i].antiderivative());
        Ok(Self {
            fprime,
            f,
            orders,
            branching: min_order + 1,
            residual,
            residual_scale,
        })
    }

    /// Convenience constructor from real coefficient lists.
    pub fn from_real(fprime: [&[f64]; 4], conf_tol: f64) -> Result<Self> {
        Self::load(fprime.map(CPoly::from_real), T::lit(conf_tol))
    }

    pub fn fprime(&self) -> &[CPoly<T>; 4] {
        &self.fprime
    }

    pub fn primitives(&self) -> &[CPoly<T>; 4] {
        &self.f
    }

    pub fn orders(&self) -> [Order; 4] {
        self.orders
    }

    /// `N`: the map looks like `z ↦ z^N` at the origin; the branching order is `N − 1`.
    pub fn branching_multiplicity(&self) -> usize {
        self.branching
    }

    pub fn is_branched(&self) -> bool {
        self.branching >= 2
    }

    /// Largest coefficient of `f₁′f₂′ + f₃′f₄′`.
    pub fn conformality_residual(&self) -> T {
        self.residual
    }

    /// Residual relative to the coefficient scale of the two products.
    pub fn relative_conformality_residual(&self) -> T {
        self.residual / self.residual_scale
    }

    pub fn coefficient_scale(&self) -> T {
        self.fprime
            .iter()
            .map(CPoly::max_abs)
            .fold(T::zero(), T::max)
    }

    /// True when `f₂′ ≡ 0` (then also `f₃′f₄′ ≡ 0`).
    pub fn is_reduced(&self) -> bool {
        self.fprime[1].is_zero()
    }

    pub fn derivatives_at(&self, z: C<T>) -> [C<T>; 4] {
        [0, 1, 2, 3].map(|i| self.fprime[i].eval(z))
    }

    /// `F(z) = (Re(f₁+f̄₂), Im(f₁+f̄₂), Re(f₃+f̄₄), Im(f₃+f̄₄))`.
    pub fn evaluate(&self, z: C<T>) -> Vec4<T> {
        let v = [0, 1, 2, 3].map(|i| self.f[i].eval(z));
        let w1 = v[0] + v[1].conj();
        let w2 = v[2] + v[3].conj();
        [w1.re, w1.im, w2.re, w2.im]
    }

    /// The two complex coordinates `(F₁ + iF₂, F₃ + iF₄)`.
    pub fn evaluate_complex(&self, z: C<T>) -> [C<T>; 2] {
        let v = [0, 1, 2, 3].map(|i| self.f[i].eval(z));
        [v[0] + v[1].conj(), v[2] + v[3].conj()]
    }

    /// `(∂F/∂x, ∂F/∂y)`.
    pub fn jacobian(&self, z: C<T>) -> (Vec4<T>, Vec4<T>) {
        let d = self.derivatives_at(z);
        let s12 = d[0] + d[1];
        let m12 = d[0] - d[1];
        let s34 = d[2] + d[3];
        let m34 = d[2] - d[3];
        (
            [s12.re, m12.im, s34.re, m34.im],
            [-s12.im, m12.re, -s34.im, m34.re],
        )
    }

    /// `φᵢ = ∂Fᵢ/∂x − i ∂Fᵢ/∂y`.
    pub fn phi(&self, z: C<T>) -> [C<T>; 4] {
        let (fx, fy) = self.jacobian(z);
        [0, 1, 2, 3].map(|i| C::new(fx[i], -fy[i]))
    }

    /// Common zeros of the four derivatives inside the open unit disk.
    pub fn branch_points(&self, tol: T) -> Vec<C<T>> {
        let Some(lowest) = self
            .fprime
            .iter()
            .filter(|p| !p.is_zero())
            .min_by_key(|p| p.degree().unwrap())
        else {
            return Vec::new();
        };
        if lowest.degree() == Some(0) {
            return Vec::new();
        }
        let Ok(roots) = lowest.roots() else {
            return Vec::new();
        };
        let mut out: Vec<C<T>> = Vec::new();
        for r in roots {
            if r.norm() >= T::one() {
                continue;
            }
            if self.fprime.iter().all(|p| p.eval(r).norm() <= tol)
                && !out.iter().any(|q| (*q - r).norm() < T::lit(1e-8))
            {
                out.push(r);
            }
        }
        out
    }

    /// Default branch-point tolerance: `1e-10` of the coefficient scale.
    pub fn default_branch_tol(&self) -> T {
        self.coefficient_scale() * T::lit(1e-10)
    }

    /// Unit oriented tangent plane `∂F/∂x ∧ ∂F/∂y / ‖·‖`.
    pub fn tangent_plane(&self, z: C<T>) -> Result<TwoVector<T>> {
        let (fx, fy) = self.jacobian(z);
        let w = TwoVector::wedge(&fx, &fy);
        let n = w.norm();
        let floor = T::epsilon() * T::epsilon() * self.coefficient_scale().powi(2);
        if !(n > floor) || !n.is_finite() {
            return Err(Error::DegeneratePlane {
                re: z.re.to_f64_lossy(),
                im: z.im.to_f64_lossy(),
            });
        }
        Ok(w.scale(T::one() / n))
    }

    /// `⟨P(z), H₀⟩` (orientation +) or `⟨P(z), K₀⟩` (orientation −), where
    /// `H₀, K₀` split the `(x₁,x₂)`-plane; positive means symplectic at `z`.
    pub fn symplectic_positivity(&self, z: C<T>, orientation: Orientation) -> Result<T> {
        let p = self.tangent_plane(z)?;
        let (h0, k0) = reference_structures::<T>();
        Ok(match orientation {
            Orientation::Plus => p.dot(&h0),
            Orientation::Minus => p.dot(&k0),
        })
    }

    /// Homogeneous coordinates of `(γ₊, γ₋)` from the `φ` form
    /// `γ₊ = (φ₃+iφ₄)/(φ₁−iφ₂)`, `γ₋ = (−φ₃+iφ₄)/(φ₁−iφ₂)`.
    ///
    /// Where both entries of that quotient vanish (e.g. `f₂′ ≡ f₄′ ≡ 0` for γ₋)
    /// the equivalent representative obtained from `φ₁²+…+φ₄² = 0` is used:
    /// `γ₊ = −(φ₁+iφ₂)/(φ₃−iφ₄)`, `γ₋ = (φ₁+iφ₂)/(φ₃+iφ₄)`.
    pub fn gauss_homogeneous(&self, z: C<T>) -> Result<[Homogeneous<T>; 2]> {
        let phi = self.phi(z);
        let i = C::new(T::zero(), T::one());
        let a = phi[0] + i * phi[1]; // 2 f1'
        let b = phi[0] - i * phi[1]; // 2 f2'
        let c = phi[2] + i * phi[3]; // 2 f3'
        let d = phi[2] - i * phi[3]; // 2 f4'
        let plus = gauss::best_of(Homogeneous::new(c, b), Homogeneous::new(-a, d));
        let minus = gauss::best_of(Homogeneous::new(-d, b), Homogeneous::new(a, c));
        let scale = self.coefficient_scale();
        let floor = T::epsilon() * scale * T::lit(1e-3);
        if plus.norm() <= floor || minus.norm() <= floor {
            return Err(Error::IndeterminateGauss);
        }
        Ok([plus, minus])
    }

    /// `(γ₊(z), γ₋(z))` on the Riemann sphere.
    pub fn gauss_maps(&self, z: C<T>) -> Result<(GaussValue<T>, GaussValue<T>)> {
        let [p, m] = self.gauss_homogeneous(z)?;
        Ok((
            GaussValue::from_homogeneous(p),
            GaussValue::from_homogeneous(m),
        ))
    }

    /// Gauss maps from the quotients `γ₊ = f₃′/f₂′`, `γ₋ = −f₄′/f₂′`
    /// (falling back to `−f₁′/f₄′`, `f₁′/f₃′` when those are `0/0`).
    pub fn gauss_maps_quotient(&self, z: C<T>) -> Result<(GaussValue<T>, GaussValue<T>)> {
        let d = self.derivatives_at(z);
        let plus = gauss::best_of(Homogeneous::new(d[2], d[1]), Homogeneous::new(-d[0], d[3]));
        let minus = gauss::best_of(Homogeneous::new(-d[3], d[1]), Homogeneous::new(d[0], d[2]));
        let floor = T::epsilon() * self.coefficient_scale() * T::lit(1e-3);
        if plus.norm() <= floor || minus.norm() <= floor {
            return Err(Error::IndeterminateGauss);
        }
        Ok((
            GaussValue::from_homogeneous(plus),
            GaussValue::from_homogeneous(minus),
        ))
    }

    /// Checks that `f₁` dominates: `n₁ < n₂, n₃, n₄`, so the tangent cone at
    /// the origin is the `(x₁,x₂)`-plane.
    pub fn check_normal_form(&self) -> Result<()> {
        let n1 = self.orders[0];
        if n1.is_infinite() || self.orders[1..].iter().any(|&o| o <= n1) {
            return Err(Error::NotNormalForm {
                orders: self.orders,
            });
        }
        Ok(())
    }

    /// Relabel indices so that `n₁` is a smallest order (first minimum wins).
    pub fn relabeled_min_first(&self) -> (Self, Relabel) {
        let k = (0..4).min_by_key(|&i| self.orders[i]).unwrap();
        let relabel = Relabel {
            swap_pairs: k >= 2,
            conj_first: k % 2 == 1,
        };
        if relabel.is_identity() {
            return (self.clone(), relabel);
        }
        let data = Self {
            fprime: relabel.apply_to_functions(&self.fprime),
            f: relabel.apply_to_functions(&self.f),
            orders: relabel.apply_to_functions(&self.orders),
            ..self.clone()
        };
        (data, relabel)
    }

    /// [`relabeled_min_first`](Self::relabeled_min_first) followed by the
    /// strict normal-form check.
    pub fn normalized(&self) -> Result<(Self, Relabel)> {
        let (data, relabel) = self.relabeled_min_first();
        data.check_normal_form()?;
        Ok((data, relabel))
    }

    /// Conformal factor `‖∂F/∂x‖` at `z`.
    pub fn conformal_factor(&self, z: C<T>) -> T {
        norm4(&self.jacobian(z).0)
    }

    /// Maximum modulus of `F` on a circle, sampled at `m` points.
    pub fn max_norm_on_circle(&self, r: T, m: usize) -> T {
        (0..m)
            .map(|k| {
                let th = T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(m);
                norm4(&self.evaluate(C::from_polar(r, th)))
            })
            .fold(T::zero(), T::max)
    }
}

/// `(H₀, K₀)`: the self-dual and anti-self-dual parts of `e₁ ∧ e₂`.
pub fn reference_structures<T: Real>() -> (TwoVector<T>, TwoVector<T>) {
    TwoVector::basis(1, 2).grassmann_split()
}
