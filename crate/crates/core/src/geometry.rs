//! Planar points, oriented boxes and rigid transforms.
//!
//! Frame convention used everywhere in the crate: an orientation `theta` has
//! frontal axis `(cos θ, sin θ)` and right axis `(sin θ, -cos θ)`.

use core::ops::{Add, Mul, Neg, Sub};

use crate::math::{abs, cos, sin, sqrt};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        sqrt(self.dot(self))
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Rotates the vector counter-clockwise by `angle` about the origin.
    pub fn rotated(self, angle: f64) -> Point {
        let (s, c) = (sin(angle), cos(angle));
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Unit vector of the frontal axis for orientation `theta`.
    pub fn frontal(theta: f64) -> Point {
        Point::new(cos(theta), sin(theta))
    }

    /// Unit vector of the right axis for orientation `theta`.
    pub fn right(theta: f64) -> Point {
        Point::new(sin(theta), -cos(theta))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, rhs: Point) -> Point {
        Point::new(self * rhs.x, self * rhs.y)
    }
}

/// A rectangle with `width` along its right axis and `depth` along its frontal axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox {
    pub center: Point,
    pub theta: f64,
    pub half_width: f64,
    pub half_depth: f64,
}

impl OrientedBox {
    pub fn new(center: Point, theta: f64, width: f64, depth: f64) -> Self {
        OrientedBox {
            center,
            theta,
            half_width: width / 2.0,
            half_depth: depth / 2.0,
        }
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_width * self.half_depth
    }

    /// `[frontal, right]` unit axes.
    pub fn axes(&self) -> [Point; 2] {
        [Point::frontal(self.theta), Point::right(self.theta)]
    }

    /// Corners in counter-clockwise order starting front-right.
    pub fn corners(&self) -> [Point; 4] {
        let [f, r] = self.axes();
        let f = self.half_depth * f;
        let r = self.half_width * r;
        let c = self.center;
        [c + f + r, c + f - r, c - f - r, c - f + r]
    }

    /// Whether `p` lies in the closed rectangle.
    pub fn contains(&self, p: Point) -> bool {
        let [f, r] = self.axes();
        let d = p - self.center;
        abs(d.dot(f)) <= self.half_depth && abs(d.dot(r)) <= self.half_width
    }

    fn project(&self, axis: Point) -> (f64, f64) {
        let [f, r] = self.axes();
        let mid = self.center.dot(axis);
        let reach = self.half_depth * abs(f.dot(axis)) + self.half_width * abs(r.dot(axis));
        (mid - reach, mid + reach)
    }

    /// Smallest overlap of the two projections over the four candidate
    /// separating axes. Negative when the boxes are apart, zero when touching.
    pub fn penetration_depth(&self, other: &OrientedBox) -> f64 {
        let [a0, a1] = self.axes();
        let [b0, b1] = other.axes();
        [a0, a1, b0, b1]
            .into_iter()
            .map(|axis| {
                let (lo_a, hi_a) = self.project(axis);
                let (lo_b, hi_b) = other.project(axis);
                hi_a.min(hi_b) - lo_a.max(lo_b)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Separating-axis overlap test. Touching edges count as intersecting.
pub fn obb_intersects(a: &OrientedBox, b: &OrientedBox) -> bool {
    a.penetration_depth(b) >= 0.0
}

/// A planar rigid motion: rotate by `rotation` about the origin, then translate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: f64,
    pub translation: Point,
}

impl RigidTransform {
    pub const IDENTITY: RigidTransform = RigidTransform {
        rotation: 0.0,
        translation: Point::ORIGIN,
    };

    pub fn apply(&self, p: Point) -> Point {
        p.rotated(self.rotation) + self.translation
    }

    pub fn apply_angle(&self, theta: f64) -> f64 {
        crate::feature::wrap_angle(theta + self.rotation)
    }

    pub fn inverse(&self) -> RigidTransform {
        RigidTransform {
            rotation: -self.rotation,
            translation: -(self.translation.rotated(-self.rotation)),
        }
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: crate::feature::wrap_angle(self.rotation + other.rotation),
            translation: self.apply(other.translation),
        }
    }
}
