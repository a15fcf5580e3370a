//! Fixed-size dense helpers for the 4×4 systems that appear in the
//! double-point and transversality computations.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

pub type Vec4<T> = [T; 4];

/// Determinant of the matrix whose columns are `cols`, by cofactor expansion.
///
/// Division free, so it works over any commutative ring (real or complex entries).
pub fn det4<S>(cols: &[[S; 4]; 4]) -> S
where
    S: Copy + Add<Output = S> + Sub<Output = S> + Mul<Output = S> + Neg<Output = S>,
{
    // m[row][col]
    let m = |r: usize, c: usize| cols[c][r];
    let det3 = |r: [usize; 3], c: [usize; 3]| {
        m(r[0], c[0]) * (m(r[1], c[1]) * m(r[2], c[2]) - m(r[1], c[2]) * m(r[2], c[1]))
            - m(r[0], c[1]) * (m(r[1], c[0]) * m(r[2], c[2]) - m(r[1], c[2]) * m(r[2], c[0]))
            + m(r[0], c[2]) * (m(r[1], c[0]) * m(r[2], c[1]) - m(r[1], c[1]) * m(r[2], c[0]))
    };
    let rows = [1, 2, 3];
    let minor = |skip: usize| {
        let mut c = [0usize; 3];
        let mut k = 0;
        for j in 0..4 {
            if j != skip {
                c[k] = j;
                k += 1;
            }
        }
        det3(rows, c)
    };
    m(0, 0) * minor(0) - m(0, 1) * minor(1) + m(0, 2) * minor(2) - m(0, 3) * minor(3)
}

/// Solve `A x = b` for a 4×4 real system given by columns, with partial pivoting.
/// Returns `None` when a pivot underflows.
pub fn solve4<T: Real>(cols: &[Vec4<T>; 4], b: Vec4<T>) -> Option<Vec4<T>> {
    let mut a = [[T::zero(); 5]; 4];
    for r in 0..4 {
        for c in 0..4 {
            a[r][c] = cols[c][r];
        }
        a[r][4] = b[r];
    }
    let scale = a
        .iter()
        .flat_map(|row| row[..4].iter())
        .fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() {
        return None;
    }
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[piv][col].abs() <= scale * T::epsilon() * T::lit(16.0) {
            return None;
        }
        a.swap(col, piv);
        for r in (col + 1)..4 {
            let f = a[r][col] / a[col][col];
            let pivot = a[col];
            for (x, v) in a[r][col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * *v;
            }
        }
    }
    let mut x = [T::zero(); 4];
    for r in (0..4).rev() {
        let mut s = a[r][4];
        for c in (r + 1)..4 {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

pub fn dot4<T: Real>(a: &Vec4<T>, b: &Vec4<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

pub fn norm4<T: Real>(a: &Vec4<T>) -> T {
    dot4(a, a).sqrt()
}

pub fn sub4<T: Real>(a: &Vec4<T>, b: &Vec4<T>) -> Vec4<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn add4<T: Real>(a: &Vec4<T>, b: &Vec4<T>) -> Vec4<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

pub fn scale4<T: Real>(a: &Vec4<T>, s: T) -> Vec4<T> {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn det_of_identity_and_permutation() {
        let id = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        assert_eq!(det4(&id), 1.0);
        let swapped = [id[1], id[0], id[2], id[3]];
        assert_eq!(det4(&swapped), -1.0);
    }

    #[test]
    fn det_matches_triangular_product() {
        let cols = [
            [2.0, 0.0, 0.0, 0.0],
            [5.0, 3.0, 0.0, 0.0],
            [1.0, -2.0, 0.5, 0.0],
            [7.0, 1.0, 4.0, -1.0],
        ];
        assert_eq!(det4(&cols), -3.0);
    }

    #[test]
    fn complex_det_is_multilinear() {
        let i = Complex64::new(0.0, 1.0);
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let cols = [[i, o, o, o], [o, l, o, o], [o, o, l, o], [o, o, o, i]];
        assert_eq!(det4(&cols), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn solve_recovers_solution() {
        let cols = [
            [4.0, 1.0, 0.0, 2.0],
            [1.0, 3.0, 1.0, 0.0],
            [0.0, 1.0, 5.0, 1.0],
            [2.0, 0.0, 1.0, 6.0],
        ];
        let x: [f64; 4] = [1.0, -2.0, 0.5, 3.0];
        let mut b = [0.0; 4];
        for c in 0..4 {
            for r in 0..4 {
                b[r] += cols[c][r] * x[c];
            }
        }
        let got = solve4(&cols, b).unwrap();
        for k in 0..4 {
            assert!((got[k] - x[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_system_is_rejected() {
        let cols = [
            [1.0, 0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        assert!(solve4(&cols, [1.0, 0.0, 0.0, 0.0]).is_none());
    }
}
