//! Small helpers for `[T; 3]` vectors.

use crate::scalar::Real;

pub type V3<T> = [T; 3];

#[inline]
pub fn add<T: Real>(a: V3<T>, b: V3<T>) -> V3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub<T: Real>(a: V3<T>, b: V3<T>) -> V3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale<T: Real>(a: V3<T>, s: T) -> V3<T> {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot<T: Real>(a: V3<T>, b: V3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross<T: Real>(a: V3<T>, b: V3<T>) -> V3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm<T: Real>(a: V3<T>) -> T {
    dot(a, a).sqrt()
}

pub fn normalize<T: Real>(a: V3<T>) -> V3<T> {
    scale(a, T::one() / norm(a))
}

pub fn zero<T: Real>() -> V3<T> {
    [T::zero(); 3]
}

pub fn add_assign<T: Real>(a: &mut V3<T>, b: V3<T>) {
    a[0] += b[0];
    a[1] += b[1];
    a[2] += b[2];
}
