use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::Serialize;

use crate::scalar::Real;

/// Hamilton quaternion `w + x i + y j + z k`.
///
/// Vectors of R³ are the imaginary quaternions (`w == 0`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quaternion<T> {
    pub const fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::real(T::one())
    }

    pub fn i() -> Self {
        Self::imag(T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::imag(T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::imag(T::zero(), T::zero(), T::one())
    }

    pub fn real(w: T) -> Self {
        Self::new(w, T::zero(), T::zero(), T::zero())
    }

    pub fn imag(x: T, y: T, z: T) -> Self {
        Self::new(T::zero(), x, y, z)
    }

    pub fn from_vector(v: [T; 3]) -> Self {
        Self::imag(v[0], v[1], v[2])
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// Unit quaternion rotating by `angle` about `axis` (need not be normalized)
    /// under the action `v ↦ q v q̄`.
    pub fn from_axis_angle(axis: [T; 3], angle: T) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let half = angle / T::lit(2.0);
        let s = half.sin() / n;
        Self::new(half.cos(), axis[0] * s, axis[1] * s, axis[2] * s)
    }

    pub fn to_array(self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn vector(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn imag_part(self) -> Self {
        Self::imag(self.x, self.y, self.z)
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn imag_norm(self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn normalized(self) -> Self {
        self.scale(T::one() / self.norm())
    }

    pub fn inverse(self) -> Self {
        self.conj().scale(T::one() / self.norm_sqr())
    }

    /// Euclidean inner product on R⁴.
    pub fn dot(self, o: Self) -> T {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn is_unit(self) -> bool {
        (self.norm_sqr() - T::one()).abs() <= T::lit(1e-12)
    }

    /// Rotates an imaginary quaternion: `q v q̄`.
    pub fn rotate(self, v: Self) -> Self {
        self * v * self.conj()
    }

    /// Matrix of left multiplication `x ↦ q x` in the basis (1, i, j, k).
    pub fn to_real_block(self) -> [[T; 4]; 4] {
        let Self { w, x, y, z } = self;
        [
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ]
    }

    /// Matrix of right multiplication `x ↦ x q` in the basis (1, i, j, k).
    pub fn to_right_block(self) -> [[T; 4]; 4] {
        let Self { w, x, y, z } = self;
        [
            [w, -x, -y, -z],
            [x, w, z, -y],
            [y, -z, w, x],
            [z, y, -x, w],
        ]
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;

    fn mul(self, q: Self) -> Self {
        let p = self;
        Self::new(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + q.w * p.x + (p.y * q.z - p.z * q.y),
            p.w * q.y + q.w * p.y + (p.z * q.x - p.x * q.z),
            p.w * q.z + q.w * p.z + (p.x * q.y - p.y * q.x),
        )
    }
}

impl<T: Real> Add for Quaternion<T> {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Quaternion<T> {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<T: Real> AddAssign for Quaternion<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Quaternion<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> std::iter::Sum for Quaternion<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

/// Hamilton product; free-function form of `p * q`.
pub fn quat_mul<T: Real>(p: Quaternion<T>, q: Quaternion<T>) -> Quaternion<T> {
    p * q
}

pub fn to_real_block<T: Real>(q: Quaternion<T>) -> [[T; 4]; 4] {
    q.to_real_block()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Q = Quaternion<f64>;

    fn matmul(a: [[f64; 4]; 4], b: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
        let mut c = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        c
    }

    fn max_diff(a: [[f64; 4]; 4], b: [[f64; 4]; 4]) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((a[i][j] - b[i][j]).abs());
            }
        }
        m
    }

    fn quat() -> impl Strategy<Value = Q> {
        prop::array::uniform4(-2.0f64..2.0).prop_map(Q::from_array)
    }

    #[test]
    fn basis_products() {
        assert_eq!(Q::i() * Q::j(), Q::k());
        assert_eq!(Q::j() * Q::k(), Q::i());
        assert_eq!(Q::k() * Q::i(), Q::j());
        assert_eq!(Q::i() * Q::i(), -Q::one());
        let q = Q::new(0.3, -1.0, 2.0, 0.5);
        assert_eq!(Q::one() * q, q);
        assert_eq!(quat_mul(q, Q::one()), q);
    }

    #[test]
    fn real_block_basics() {
        let id = to_real_block(Q::one());
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(id[i][j], if i == j { 1.0 } else { 0.0 });
            }
        }
        let ij = matmul(Q::i().to_real_block(), Q::j().to_real_block());
        assert_eq!(max_diff(ij, Q::k().to_real_block()), 0.0);
    }

    #[test]
    fn rotation_of_vector() {
        let q = Q::from_axis_angle([0.0, 0.0, 1.0], std::f64::consts::FRAC_PI_2);
        let v = q.rotate(Q::i());
        assert!((v - Q::j()).norm() < 1e-15);
        assert!(q.is_unit());
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(p in quat(), q in quat()) {
            let lhs = (p * q).norm();
            let rhs = p.norm() * q.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-14 * rhs.max(1e-300) + 1e-300);
        }

        #[test]
        fn left_block_is_homomorphism(p in quat(), q in quat()) {
            let r = matmul(p.to_real_block(), q.to_real_block());
            prop_assert!(max_diff((p * q).to_real_block(), r) <= 1e-14);
            let pt = p.to_real_block();
            let mut t = [[0.0; 4]; 4];
            for i in 0..4 { for j in 0..4 { t[i][j] = pt[j][i]; } }
            prop_assert!(max_diff(p.conj().to_real_block(), t) <= 1e-14);
        }

        #[test]
        fn left_and_right_actions_commute(p in quat(), q in quat(), x in quat()) {
            let lhs = (p * x) * q;
            let rhs = p * (x * q);
            prop_assert!((lhs - rhs).norm() <= 1e-13);
            let v = x.to_array();
            let rb = q.to_right_block();
            let mut out = [0.0; 4];
            for i in 0..4 { for j in 0..4 { out[i] += rb[i][j] * v[j]; } }
            prop_assert!((Q::from_array(out) - x * q).norm() <= 1e-14);
        }
    }
}
