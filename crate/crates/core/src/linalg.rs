//! Minimal fixed-size complex linear algebra: 3×3 matrices for operators in
//! the three-level Hilbert space and 9×9 matrices acting on the flattened
//! density matrix. Sizes are compile-time constants; nothing here allocates.

use crate::Real;
use num_complex::Complex;

pub type C<T> = Complex<T>;

/// Complex 3×3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<T>(pub [[C<T>; 3]; 3]);

/// Complex 9×9 matrix, row-major.
#[derive(Debug, Clone)]
pub struct Mat9<T>(pub [[C<T>; 9]; 9]);

pub fn czero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

pub fn cre<T: Real>(x: T) -> C<T> {
    C::new(x, T::zero())
}

pub fn cim<T: Real>(x: T) -> C<T> {
    C::new(T::zero(), x)
}

impl<T: Real> Mat3<T> {
    pub fn zeros() -> Self {
        Mat3([[czero(); 3]; 3])
    }

    pub fn from_real(r: [[T; 3]; 3]) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = cre(r[i][j]);
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = czero();
                for k in 0..3 {
                    acc += self.0[i][k] * rhs.0[k][j];
                }
                m.0[i][j] = acc;
            }
        }
        m
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut m = *self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut m = *self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut m = *self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] *= s;
            }
        }
        m
    }

    pub fn apply(&self, v: &[C<T>; 3]) -> [C<T>; 3] {
        let mut out = [czero(); 3];
        for (row, o) in self.0.iter().zip(out.iter_mut()) {
            let mut acc = czero();
            for (m, x) in row.iter().zip(v.iter()) {
                acc += *m * *x;
            }
            *o = acc;
        }
        out
    }

    /// [a, b] = ab - ba
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// {a, b} = ab + ba
    pub fn anticommutator(&self, rhs: &Self) -> Self {
        self.mul(rhs).add(&rhs.mul(self))
    }

    pub fn trace(&self) -> C<T> {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Largest entrywise |self - rhs|.
    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        let mut m = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.0[i][j] - rhs.0[i][j]).norm());
            }
        }
        m
    }
}

impl<T: Real> Mat9<T> {
    pub fn zeros() -> Self {
        Mat9([[czero(); 9]; 9])
    }

    pub fn apply(&self, v: &[C<T>; 9]) -> [C<T>; 9] {
        let mut out = [czero(); 9];
        for (row, o) in self.0.iter().zip(out.iter_mut()) {
            let mut acc = czero();
            for (m, x) in row.iter().zip(v.iter()) {
                acc += *m * *x;
            }
            *o = acc;
        }
        out
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        let mut m = T::zero();
        for i in 0..9 {
            for j in 0..9 {
                m = m.max((self.0[i][j] - rhs.0[i][j]).norm());
            }
        }
        m
    }
}
