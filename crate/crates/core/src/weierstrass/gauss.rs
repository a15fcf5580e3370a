//! Points of the Riemann sphere, used for the two Gauss maps.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::scalar::{Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GaussValue<T: Real> {
    Finite(C<T>),
    Infinity,
}

impl<T: Real> GaussValue<T> {
    /// `[num : den]`; caller guarantees the pair is not `[0 : 0]`.
    pub fn from_homogeneous(h: Homogeneous<T>) -> Self {
        if h.den.is_zero() {
            GaussValue::Infinity
        } else {
            GaussValue::Finite(h.num / h.den)
        }
    }

    pub fn homogeneous(&self) -> Homogeneous<T> {
        match *self {
            GaussValue::Finite(v) => Homogeneous::new(v, C::new(T::one(), T::zero())),
            GaussValue::Infinity => Homogeneous::new(C::new(T::one(), T::zero()), C::zero()),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, GaussValue::Infinity)
    }

    /// Chordal distance on the unit-diameter-2 Riemann sphere.
    pub fn chordal_distance(&self, other: &Self) -> T {
        self.homogeneous().chordal_distance(&other.homogeneous())
    }
}

/// Homogeneous coordinates `[num : den]` of a point of ℂP¹.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Homogeneous<T: Real> {
    pub num: C<T>,
    pub den: C<T>,
}

impl<T: Real> Homogeneous<T> {
    pub fn new(num: C<T>, den: C<T>) -> Self {
        Self { num, den }
    }

    pub fn norm(&self) -> T {
        (self.num.norm_sqr() + self.den.norm_sqr()).sqrt()
    }

    /// `2|a₀b₁ − a₁b₀| / (‖a‖‖b‖)`, the chordal metric in homogeneous form.
    pub fn chordal_distance(&self, other: &Self) -> T {
        let na = self.norm();
        let nb = other.norm();
        // rescale first to keep the cross product in range
        let (a0, a1) = (self.num / na, self.den / na);
        let (b0, b1) = (other.num / nb, other.den / nb);
        T::lit(2.0) * (a0 * b1 - a1 * b0).norm()
    }
}

/// Pick whichever of two representatives of the same point is better conditioned.
pub(crate) fn best_of<T: Real>(a: Homogeneous<T>, b: Homogeneous<T>) -> Homogeneous<T> {
    if a.norm() >= b.norm() {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cl;

    #[test]
    fn chordal_distance_examples() {
        let zero = GaussValue::<f64>::Finite(cl(0.0, 0.0));
        let inf = GaussValue::<f64>::Infinity;
        let one = GaussValue::<f64>::Finite(cl(1.0, 0.0));
        assert!((zero.chordal_distance(&inf) - 2.0).abs() < 1e-15);
        assert!((zero.chordal_distance(&one) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(inf.chordal_distance(&inf), 0.0);
        let big = GaussValue::<f64>::Finite(cl(1e8, 0.0));
        assert!(big.chordal_distance(&inf) < 1e-7);
    }

    #[test]
    fn homogeneous_zero_denominator_is_infinity() {
        let h = Homogeneous::new(cl::<f64>(2.0, 0.0), cl(0.0, 0.0));
        assert!(GaussValue::from_homogeneous(h).is_infinite());
    }
}
