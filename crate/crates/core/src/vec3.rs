//! Minimal fixed-size vector helpers over `[T; 3]` and `[T; 2]`.

use crate::scalar::Real;

pub type Vec3<T> = [T; 3];
pub type Vec2<T> = [T; 2];

#[inline]
pub fn add<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale<T: Real>(a: Vec3<T>, s: T) -> Vec3<T> {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot<T: Real>(a: Vec3<T>, b: Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm<T: Real>(a: Vec3<T>) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub fn neg<T: Real>(a: Vec3<T>) -> Vec3<T> {
    [-a[0], -a[1], -a[2]]
}

/// Unit vector along `a`, or `None` when `|a|` is below `eps`.
#[inline]
pub fn normalize<T: Real>(a: Vec3<T>, eps: T) -> Option<Vec3<T>> {
    let n = norm(a);
    if n < eps || !n.is_finite() {
        None
    } else {
        Some(scale(a, T::one() / n))
    }
}

/// Twice the signed area of the 2D triangle `(a, b, c)`; positive when counter-clockwise.
#[inline]
pub fn orient2d<T: Real>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>) -> T {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Area of a 3D triangle.
#[inline]
pub fn triangle_area<T: Real>(a: Vec3<T>, b: Vec3<T>, c: Vec3<T>) -> T {
    norm(cross(sub(b, a), sub(c, a))) * T::lit(0.5)
}
