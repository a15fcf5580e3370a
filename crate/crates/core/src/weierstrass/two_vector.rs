//! 2-vectors in Λ²(ℝ⁴), basis order `e12, e13, e14, e23, e24, e34`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::linalg::Vec4;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TwoVector<T: Real>(pub [T; 6]);

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl<T: Real> TwoVector<T> {
    pub fn zero() -> Self {
        Self([T::zero(); 6])
    }

    /// Basis element `e_i ∧ e_j` for `1 ≤ i < j ≤ 4`.
    pub fn basis(i: usize, j: usize) -> Self {
        let k = PAIRS
            .iter()
            .position(|&p| p == (i - 1, j - 1))
            .expect("basis indices must satisfy 1 <= i < j <= 4");
        let mut c = [T::zero(); 6];
        c[k] = T::one();
        Self(c)
    }

    pub fn wedge(u: &Vec4<T>, v: &Vec4<T>) -> Self {
        let mut c = [T::zero(); 6];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            c[k] = u[i] * v[j] - u[j] * v[i];
        }
        Self(c)
    }

    pub fn components(&self) -> [T; 6] {
        self.0
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.map(|c| c * s))
    }

    pub fn normalized(&self) -> Self {
        self.scale(T::one() / self.norm())
    }

    /// `c12 c34 − c13 c24 + c14 c23`; zero exactly for simple 2-vectors.
    pub fn plucker(&self) -> T {
        let c = &self.0;
        c[0] * c[5] - c[1] * c[4] + c[2] * c[3]
    }

    /// ⋆e12 = e34, ⋆e13 = −e24, ⋆e14 = e23 (and the reverse), extended linearly.
    pub fn hodge_star(&self) -> Self {
        let c = &self.0;
        Self([c[5], -c[4], c[3], c[2], -c[1], c[0]])
    }

    /// Self-dual and anti-self-dual parts `((P + ⋆P)/√2, (P − ⋆P)/√2)`.
    pub fn grassmann_split(&self) -> (Self, Self) {
        let s = self.hodge_star();
        let r = T::FRAC_1_SQRT_2();
        ((*self + s).scale(r), (*self - s).scale(r))
    }

    /// `⟨self, u ∧ v⟩`.
    pub fn symplectic_form(&self, u: &Vec4<T>, v: &Vec4<T>) -> T {
        self.dot(&Self::wedge(u, v))
    }

    /// The orthogonal complex structure `J` with `⟨J u, v⟩ = √2 ⟨self, u ∧ v⟩`,
    /// for a unit (anti-)self-dual 2-vector. Stored as `m[row][col]`.
    pub fn complex_structure(&self) -> [[T; 4]; 4] {
        let s2 = T::SQRT_2();
        let mut j = [[T::zero(); 4]; 4];
        for (k, &(a, b)) in PAIRS.iter().enumerate() {
            // J e_a has component c at e_b, J e_b has component -c at e_a
            j[b][a] = self.0[k] * s2;
            j[a][b] = -self.0[k] * s2;
        }
        j
    }
}

/// Apply a 4×4 matrix stored as `m[row][col]`.
pub fn apply<T: Real>(m: &[[T; 4]; 4], v: &Vec4<T>) -> Vec4<T> {
    let mut out = [T::zero(); 4];
    for (r, row) in m.iter().enumerate() {
        out[r] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
    }
    out
}

impl<T: Real> Add for TwoVector<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(rhs.0) {
            *a += b;
        }
        Self(c)
    }
}

impl<T: Real> Sub for TwoVector<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Neg for TwoVector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|c| -c))
    }
}

impl<T: Real> Mul<T> for TwoVector<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}
