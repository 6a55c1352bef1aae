//! Points of the complex projective line and Möbius maps.
//!
//! Points are homogeneous pairs `[a : b]` with affine value `a / b`; infinity is
//! `[1 : 0]`. Maps are 2×2 matrices acting on column vectors.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Projective equality tolerance on the normalized determinant.
pub const TAU_EQ: f64 = 1e-9;
/// Relative tolerance on `tr² − 4 det` for parabolic classification.
pub const TAU_CLS: f64 = 1e-8;

const ONE: Complex = Complex::new(1.0, 0.0);
const ZERO: Complex = Complex::new(0.0, 0.0);

fn is_finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Determinant of two homogeneous representatives, `a_p b_q − a_q b_p`.
pub fn det(p: &ProjectivePoint, q: &ProjectivePoint) -> Complex {
    p.a * q.b - q.a * p.b
}

#[derive(Clone, Copy, Debug)]
pub struct ProjectivePoint {
    a: Complex,
    b: Complex,
}

impl ProjectivePoint {
    pub const INFINITY: Self = Self { a: ONE, b: ZERO };
    pub const ZERO: Self = Self { a: ZERO, b: ONE };
    pub const MINUS_ONE: Self = Self { a: Complex::new(-1.0, 0.0), b: ONE };

    pub fn new(a: Complex, b: Complex) -> Result<Self> {
        if !is_finite(a) || !is_finite(b) {
            return Err(Error::Invalid("non-finite homogeneous coordinate".into()));
        }
        if a == ZERO && b == ZERO {
            return Err(Error::Invalid("homogeneous pair (0, 0)".into()));
        }
        Ok(Self { a, b })
    }

    /// Builds a point from a representative known to be nonzero and finite.
    pub(crate) fn raw(a: Complex, b: Complex) -> Self {
        debug_assert!(a != ZERO || b != ZERO);
        Self { a, b }
    }

    pub fn affine(z: Complex) -> Self {
        Self { a: z, b: ONE }
    }

    pub fn infinity() -> Self {
        Self { a: ONE, b: ZERO }
    }

    pub fn a(&self) -> Complex {
        self.a
    }

    pub fn b(&self) -> Complex {
        self.b
    }

    pub fn norm(&self) -> f64 {
        self.a.norm().hypot(self.b.norm())
    }

    /// Affine value `a / b`, or `None` at infinity.
    pub fn to_affine(&self) -> Option<Complex> {
        if self.b == ZERO {
            None
        } else {
            Some(self.a / self.b)
        }
    }

    /// Scales the larger-modulus component to exactly 1 (the first on ties).
    pub fn normalized(&self) -> Self {
        if (self.a == ONE && self.b.norm() <= 1.0) || (self.b == ONE && self.a.norm() <= 1.0) {
            return *self;
        }
        let pivot = if self.a.norm() >= self.b.norm() { self.a } else { self.b };
        let (a, b) = if self.a.norm() >= self.b.norm() { (ONE, self.b / pivot) } else { (self.a / pivot, ONE) };
        Self { a, b }
    }

    /// Chordal distance `|det(p, q)| / (|p| |q|)`, in `[0, 1]`.
    pub fn distance(&self, other: &Self) -> f64 {
        det(self, other).norm() / (self.norm() * other.norm())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// Projective equality at [`TAU_EQ`].
    pub fn same(&self, other: &Self) -> bool {
        self.approx_eq(other, TAU_EQ)
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_affine() {
            Some(z) => write!(f, "{z}"),
            None => write!(f, "∞"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CrossRatio {
    Value(Complex),
    Zero,
    Infinite,
    Indeterminate,
}

impl CrossRatio {
    pub fn value(&self) -> Option<Complex> {
        match self {
            CrossRatio::Value(z) => Some(*z),
            _ => None,
        }
    }

    /// Finite and nonzero.
    pub fn is_regular(&self) -> bool {
        matches!(self, CrossRatio::Value(z) if *z != ZERO && is_finite(*z))
    }

    pub fn from_value(z: Complex) -> Self {
        if z == ZERO {
            CrossRatio::Zero
        } else if !is_finite(z) {
            CrossRatio::Infinite
        } else {
            CrossRatio::Value(z)
        }
    }

    pub fn recip(self) -> Self {
        use CrossRatio::*;
        match self {
            Value(x) => CrossRatio::from_value(x.inv()),
            Zero => Infinite,
            Infinite => Zero,
            Indeterminate => Indeterminate,
        }
    }
}

impl std::ops::Mul for CrossRatio {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        use CrossRatio::*;
        match (self, other) {
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (Zero, Infinite) | (Infinite, Zero) => Indeterminate,
            (Zero, _) | (_, Zero) => Zero,
            (Infinite, _) | (_, Infinite) => Infinite,
            (Value(x), Value(y)) => CrossRatio::from_value(x * y),
        }
    }
}

impl std::ops::Div for CrossRatio {
    type Output = Self;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, other: Self) -> Self {
        self * other.recip()
    }
}

/// Cross ratio `d12 d34 / (d23 d14)`, so that `(z1−z2)(z3−z4) / ((z2−z3)(z1−z4))`
/// in affine terms. Vanishing determinants are detected at [`TAU_EQ`].
pub fn cross_ratio(
    p1: &ProjectivePoint,
    p2: &ProjectivePoint,
    p3: &ProjectivePoint,
    p4: &ProjectivePoint,
) -> CrossRatio {
    let vanishes = |p: &ProjectivePoint, q: &ProjectivePoint| p.same(q);
    let num_zero = vanishes(p1, p2) || vanishes(p3, p4);
    let den_zero = vanishes(p2, p3) || vanishes(p1, p4);
    match (num_zero, den_zero) {
        (true, true) => CrossRatio::Indeterminate,
        (true, false) => CrossRatio::Zero,
        (false, true) => CrossRatio::Infinite,
        (false, false) => {
            let (p1, p2, p3, p4) = (p1.normalized(), p2.normalized(), p3.normalized(), p4.normalized());
            CrossRatio::from_value(det(&p1, &p2) * det(&p3, &p4) / (det(&p2, &p3) * det(&p1, &p4)))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapClass {
    Identity,
    Parabolic,
    Semisimple,
}

/// Fixed points of a non-scalar map with eigenvalues of its det-1 representative.
#[derive(Clone, Copy, Debug)]
pub enum FixedLines {
    Parabolic { point: ProjectivePoint, eigenvalue: Complex },
    Semisimple { points: [ProjectivePoint; 2], eigenvalues: [Complex; 2] },
}

impl FixedLines {
    pub fn points(&self) -> Vec<ProjectivePoint> {
        match self {
            FixedLines::Parabolic { point, .. } => vec![*point],
            FixedLines::Semisimple { points, .. } => points.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ProjectiveMap {
    m: [[Complex; 2]; 2],
    normal: bool,
}

impl PartialEq for ProjectiveMap {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}

impl ProjectiveMap {
    pub fn new(m: [[Complex; 2]; 2]) -> Result<Self> {
        if m.iter().flatten().any(|z| !is_finite(*z)) {
            return Err(Error::Invalid("non-finite matrix entry".into()));
        }
        let map = Self { m, normal: false };
        let scale = map.frobenius();
        if scale == 0.0 || map.det().norm() <= 1e-14 * scale * scale {
            return Err(Error::Invalid("singular matrix".into()));
        }
        Ok(map)
    }

    pub fn from_entries(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self> {
        Self::new([[a, b], [c, d]])
    }

    pub(crate) fn raw(m: [[Complex; 2]; 2]) -> Self {
        Self { m, normal: false }
    }

    pub fn identity() -> Self {
        Self { m: [[ONE, ZERO], [ZERO, ONE]], normal: true }
    }

    pub fn matrix(&self) -> [[Complex; 2]; 2] {
        self.m
    }

    pub fn det(&self) -> Complex {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Complex {
        self.m[0][0] + self.m[1][1]
    }

    fn frobenius(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply(&self, p: &ProjectivePoint) -> ProjectivePoint {
        let a = self.m[0][0] * p.a + self.m[0][1] * p.b;
        let b = self.m[1][0] * p.a + self.m[1][1] * p.b;
        ProjectivePoint::raw(a, b)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let (x, y) = (&self.m, &other.m);
        let mut m = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        Self::raw(m).rescaled()
    }

    /// Adjugate, which is the inverse up to the scalar `det`.
    pub fn inverse(&self) -> Self {
        let m = &self.m;
        Self::raw([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]).normalized()
    }

    /// `g ∘ self ∘ g⁻¹`.
    pub fn conjugate_by(&self, g: &Self) -> Self {
        g.compose(self).compose(&g.inverse()).normalized()
    }

    fn scaled(&self, s: Complex) -> Self {
        let mut m = self.m;
        m.iter_mut().flatten().for_each(|z| *z *= s);
        Self::raw(m)
    }

    /// Scales by a power of two so that products stay in range.
    fn rescaled(self) -> Self {
        let n = self.frobenius();
        if n > 1e100 || (n < 1e-100 && n > 0.0) {
            self.scaled(Complex::new(1.0 / n, 0.0))
        } else {
            self
        }
    }

    /// Det-1 representative; the sign makes the largest entry (first on ties)
    /// have positive real part, or positive imaginary part if purely imaginary.
    pub fn normalized(&self) -> Self {
        if self.normal {
            return *self;
        }
        let d = self.det();
        let mut out = if (d - ONE).norm() <= 8.0 * f64::EPSILON { *self } else { self.scaled(d.sqrt().inv()) };
        let lead = out.m.iter().flatten().copied().fold(ZERO, |best, z| if z.norm() > best.norm() { z } else { best });
        if lead.re < 0.0 || (lead.re == 0.0 && lead.im < 0.0) {
            out = out.scaled(-ONE);
        }
        out.normal = true;
        out
    }

    pub fn is_scalar(&self, tol: f64) -> bool {
        let half = self.trace() / 2.0;
        let m = &self.m;
        let off = (m[0][0] - half).norm_sqr() + (m[1][1] - half).norm_sqr() + m[0][1].norm_sqr() + m[1][0].norm_sqr();
        off.sqrt() <= tol * self.frobenius()
    }

    pub fn classify(&self) -> MapClass {
        self.classify_with(TAU_CLS)
    }

    pub fn classify_with(&self, tol: f64) -> MapClass {
        if self.is_scalar(tol) {
            return MapClass::Identity;
        }
        let n = self.normalized();
        let disc = n.trace() * n.trace() - 4.0;
        if disc.norm() <= tol * n.det().norm() {
            MapClass::Parabolic
        } else {
            MapClass::Semisimple
        }
    }

    /// Agreement in PGL2 up to `tol` relative to the entries.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let (x, y) = (self.normalized(), other.normalized());
        let scale = x.frobenius().max(y.frobenius());
        let diff = |s: Complex| {
            x.m.iter().flatten().zip(y.m.iter().flatten()).map(|(p, q)| (p - s * q).norm_sqr()).sum::<f64>().sqrt()
        };
        diff(ONE).min(diff(-ONE)) <= tol * scale
    }

    pub fn fixed_lines(&self) -> Result<FixedLines> {
        self.fixed_lines_with(TAU_CLS)
    }

    pub fn fixed_lines_with(&self, tol: f64) -> Result<FixedLines> {
        let class = self.classify_with(tol);
        if class == MapClass::Identity {
            return Err(Error::IdentityMap);
        }
        let n = self.normalized();
        let [[a, b], [c, d]] = n.m;
        let eigenvector = |lambda: Complex| {
            let u = (b, lambda - a);
            let v = (lambda - d, c);
            let (x, y) = if u.0.norm().hypot(u.1.norm()) >= v.0.norm().hypot(v.1.norm()) { u } else { v };
            ProjectivePoint::raw(x, y).normalized()
        };
        let tr = n.trace();
        match class {
            MapClass::Parabolic => {
                let lambda = tr / 2.0;
                Ok(FixedLines::Parabolic { point: eigenvector(lambda), eigenvalue: lambda })
            }
            _ => {
                let root = (tr * tr - 4.0).sqrt();
                let mut l1 = (tr + root) / 2.0;
                let mut l2 = (tr - root) / 2.0;
                // the smaller root is recovered from the product to avoid cancellation
                if l1.norm() >= l2.norm() {
                    l2 = l1.inv();
                } else {
                    l1 = l2.inv();
                }
                Ok(FixedLines::Semisimple { points: [eigenvector(l1), eigenvector(l2)], eigenvalues: [l1, l2] })
            }
        }
    }
}

impl Mul for ProjectiveMap {
    type Output = ProjectiveMap;

    fn mul(self, rhs: Self) -> Self::Output {
        self.compose(&rhs)
    }
}

impl Mul<&ProjectiveMap> for &ProjectiveMap {
    type Output = ProjectiveMap;

    fn mul(self, rhs: &ProjectiveMap) -> Self::Output {
        self.compose(rhs)
    }
}

/// Map sending `(∞, 0, 1)` to `(p1, p2, p3)`.
fn frame(p: &[ProjectivePoint; 3]) -> ProjectiveMap {
    // columns λ p1 and μ p2 with λ p1 + μ p2 = p3
    let d = det(&p[0], &p[1]);
    let lambda = det(&p[2], &p[1]) / d;
    let mu = det(&p[0], &p[2]) / d;
    ProjectiveMap::raw([[lambda * p[0].a, mu * p[1].a], [lambda * p[0].b, mu * p[1].b]])
}

/// The unique map with `g · src[i] = dst[i]`.
pub fn map_from_triples(src: &[ProjectivePoint; 3], dst: &[ProjectivePoint; 3]) -> Result<ProjectiveMap> {
    let distinct = |t: &[ProjectivePoint; 3]| !(t[0].same(&t[1]) || t[1].same(&t[2]) || t[0].same(&t[2]));
    if !distinct(src) {
        return Err(Error::DegenerateTriple("source"));
    }
    if !distinct(dst) {
        return Err(Error::DegenerateTriple("target"));
    }
    let s: [ProjectivePoint; 3] = src.map(|p| p.normalized());
    let t: [ProjectivePoint; 3] = dst.map(|p| p.normalized());
    Ok(frame(&t).compose(&frame(&s).inverse()).normalized())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn pt(re: f64) -> ProjectivePoint {
        ProjectivePoint::affine(c(re, 0.0))
    }

    fn map(a: f64, b: f64, cc: f64, d: f64) -> ProjectiveMap {
        ProjectiveMap::from_entries(c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0)).unwrap()
    }

    #[test]
    fn apply_examples() {
        let swap = map(0.0, 1.0, 1.0, 0.0);
        assert!(swap.apply(&pt(0.0)).same(&ProjectivePoint::infinity()));
        assert!(map(2.0, 0.0, 0.0, 1.0).apply(&pt(1.0)).same(&pt(2.0)));
        let p = ProjectivePoint::affine(c(0.3, -2.0));
        assert!(ProjectiveMap::identity().apply(&p).same(&p));
    }

    #[test]
    fn cross_ratio_examples() {
        let inf = ProjectivePoint::infinity();
        assert_eq!(cross_ratio(&pt(0.0), &pt(-1.0), &inf, &pt(1.0)), CrossRatio::Value(c(1.0, 0.0)));
        assert_eq!(cross_ratio(&pt(2.0), &pt(2.0), &pt(3.0), &pt(5.0)), CrossRatio::Zero);
        assert_eq!(cross_ratio(&pt(2.0), &pt(3.0), &pt(3.0), &pt(5.0)), CrossRatio::Infinite);
        assert_eq!(cross_ratio(&pt(2.0), &pt(2.0), &pt(2.0), &pt(5.0)), CrossRatio::Indeterminate);
    }

    #[test]
    fn cross_ratio_oracle_by_affine_formula() {
        let z = [c(0.3, 1.0), c(-2.0, 0.5), c(1.5, -0.7), c(0.0, 2.0)];
        let expect = (z[0] - z[1]) * (z[2] - z[3]) / ((z[1] - z[2]) * (z[0] - z[3]));
        let p = z.map(ProjectivePoint::affine);
        let got = cross_ratio(&p[0], &p[1], &p[2], &p[3]).value().unwrap();
        assert!((got - expect).norm() < 1e-14);
    }

    #[test]
    fn triples() {
        let inf = ProjectivePoint::infinity();
        let src = [pt(0.0), pt(1.0), inf];
        let dst = [inf, pt(1.0), pt(0.0)];
        let g = map_from_triples(&src, &dst).unwrap();
        for (s, d) in src.iter().zip(&dst) {
            assert!(g.apply(s).same(d));
        }
        assert!(g.approx_eq(&map(0.0, 1.0, 1.0, 0.0), 1e-14));
        assert!(map_from_triples(&src, &src).unwrap().approx_eq(&ProjectiveMap::identity(), 1e-14));
        assert_eq!(map_from_triples(&[pt(0.0), pt(0.0), inf], &dst), Err(Error::DegenerateTriple("source")));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(map(1.0, 1.0, 0.0, 1.0).classify(), MapClass::Parabolic);
        assert_eq!(map(2.0, 0.0, 0.0, 1.0).classify(), MapClass::Semisimple);
        assert_eq!(map(-3.0, 0.0, 0.0, -3.0).classify(), MapClass::Identity);
    }

    #[test]
    fn fixed_line_examples() {
        let FixedLines::Parabolic { point, eigenvalue } = map(1.0, 1.0, 0.0, 1.0).fixed_lines().unwrap() else {
            panic!("expected parabolic");
        };
        assert!(point.same(&ProjectivePoint::infinity()));
        assert!((eigenvalue * eigenvalue - 1.0).norm() < 1e-15);
        let FixedLines::Semisimple { points, eigenvalues } = map(2.0, 0.0, 0.0, 1.0).fixed_lines().unwrap() else {
            panic!("expected semisimple");
        };
        let has = |q: ProjectivePoint| points.iter().any(|p| p.same(&q));
        assert!(has(pt(0.0)) && has(ProjectivePoint::infinity()));
        assert!((eigenvalues[0] * eigenvalues[1] - 1.0).norm() < 1e-15);
        assert_eq!(ProjectiveMap::identity().fixed_lines().unwrap_err(), Error::IdentityMap);
    }

    #[test]
    fn normal_forms() {
        let p = ProjectivePoint::new(c(3.0, 1.0), c(-7.0, 2.0)).unwrap();
        let n = p.normalized();
        assert_eq!(n.b(), ONE);
        let nn = n.normalized();
        assert_eq!((n.a(), n.b()), (nn.a(), nn.b()));
        let m = ProjectiveMap::from_entries(c(1.0, 2.0), c(-3.0, 0.5), c(0.25, 1.0), c(4.0, 0.0)).unwrap();
        let once = m.normalized();
        assert_eq!(once, once.normalized());
        assert!((once.det() - ONE).norm() < 1e-14);
        assert!(ProjectivePoint::new(ZERO, ZERO).is_err());
    }
}
