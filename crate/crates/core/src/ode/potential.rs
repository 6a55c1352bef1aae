use std::f64::consts::PI;

use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::projective::Complex;
use crate::surface::MarkedBorderedSurface;

/// `φ(z) dz²` on the sphere as a reduced quotient of polynomials, denominator monic.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalPotential {
    num: Polynomial,
    den: Polynomial,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PoleLocation {
    Finite(Complex),
    Infinity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoleRecord {
    pub location: PoleLocation,
    pub order: usize,
    /// `a₀` with `φ ≈ a₀·u^{−m}` in the local coordinate `u` (`z − p`, or `1/z` at ∞).
    pub leading: Complex,
    /// `2πi·√(1 + 4a)` for poles of order at most two, `a` the coefficient of `u^{−2}`.
    pub exponent: Option<Complex>,
    /// `4πi·√a` for poles of order at most two.
    pub residue: Option<Complex>,
    /// Directions in the z-plane, sorted in `[0, 2π)`.
    pub stokes_angles: Vec<f64>,
    pub anti_stokes_angles: Vec<f64>,
}

impl PoleRecord {
    pub fn is_irregular(&self) -> bool {
        self.order > 2
    }

    /// Coefficient of `u^{−2}`.
    pub fn a(&self) -> Complex {
        if self.order == 2 {
            self.leading
        } else {
            Complex::new(0.0, 0.0)
        }
    }
}

/// Surface attached to a potential, with the pole behind each marked point.
#[derive(Clone, Debug)]
pub struct PotentialSurface {
    pub surface: MarkedBorderedSurface,
    pub degenerate: bool,
    /// Pole index per boundary circle.
    pub circles: Vec<usize>,
    /// Pole index per puncture.
    pub punctures: Vec<usize>,
}

/// Potential in one coordinate chart, with its singular points.
#[derive(Clone, Debug)]
pub(crate) struct Chart {
    num: Polynomial,
    den: Polynomial,
    singular: Vec<Complex>,
}

impl Chart {
    fn new(num: Polynomial, den: Polynomial) -> Self {
        let singular = den.roots().into_iter().map(|(r, _)| r).collect();
        Self { num, den, singular }
    }

    #[cfg(test)]
    pub(crate) fn eval(&self, x: Complex) -> Complex {
        self.num.eval(x) / self.den.eval(x)
    }

    pub(crate) fn clearance(&self, x: Complex) -> f64 {
        self.singular.iter().map(|s| (x - s).norm()).fold(f64::INFINITY, f64::min)
    }

    /// First `len` Taylor coefficients at `x0`.
    pub(crate) fn taylor(&self, x0: Complex, len: usize) -> Vec<Complex> {
        let mut n = self.num.taylor_at(x0);
        let mut d = self.den.taylor_at(x0);
        n.resize(len.max(n.len()), Complex::new(0.0, 0.0));
        d.resize(len.max(d.len()), Complex::new(0.0, 0.0));
        let mut q = vec![Complex::new(0.0, 0.0); len];
        for k in 0..len {
            let mut acc = n[k];
            for j in 1..=k {
                acc -= d[j] * q[k - j];
            }
            q[k] = acc / d[0];
        }
        q
    }
}

/// The z chart, the w = 1/z chart and the radius where they switch.
#[derive(Clone, Debug)]
pub(crate) struct Charts {
    pub z: Chart,
    pub w: Chart,
    pub r_inf: f64,
    pub finite_poles: Vec<Complex>,
}

fn normalize_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if 2.0 * PI - y < 1e-12 {
        0.0
    } else {
        y
    }
}

fn angle_family(offset: f64, k: usize, flip: bool) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k)
        .map(|j| {
            let psi = (offset + 2.0 * PI * j as f64) / k as f64;
            normalize_angle(if flip { -psi } else { psi })
        })
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    v
}

impl RationalPotential {
    pub fn new(num: Vec<Complex>, den: Vec<Complex>) -> Result<Self> {
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(Error::Invalid("potential coefficients must be finite".into()));
        }
        let (mut n, mut d) = (Polynomial::new(num), Polynomial::new(den));
        if d.is_zero() {
            return Err(Error::Invalid("denominator is identically zero".into()));
        }
        for (r, m) in d.roots() {
            let mut k = 0;
            while k < m && !n.is_zero() && n.vanishes_to(r, k + 1) {
                k += 1;
            }
            for _ in 0..k {
                n = n.deflate(r);
                d = d.deflate(r);
            }
        }
        let lead = d.leading();
        Ok(Self { num: n.scale(1.0 / lead), den: d.scale(1.0 / lead) })
    }

    pub fn polynomial(coeffs: Vec<Complex>) -> Result<Self> {
        Self::new(coeffs, vec![Complex::new(1.0, 0.0)])
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn derivative_at(&self, z: Complex) -> Complex {
        let (n, d) = (self.num.eval(z), self.den.eval(z));
        (self.num.derivative().eval(z) * d - n * self.den.derivative().eval(z)) / (d * d)
    }

    pub fn scaled(&self, s: Complex) -> Self {
        Self { num: self.num.scale(s), den: self.den.clone() }
    }

    /// Pullback under `z = w^k`: `k²·w^{2k−2}·φ(w^k)`.
    pub fn pullback_power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("pullback power must be positive".into()));
        }
        let factor = Complex::new((k * k) as f64, 0.0);
        let num = self.num.compose_power(k).shift_up(2 * k - 2).scale(factor);
        Self::new(num.coeffs().to_vec(), self.den.compose_power(k).coeffs().to_vec())
    }

    /// Order of the pole at ∞, non-positive when ∞ is not a pole.
    fn order_at_infinity(&self) -> i64 {
        let dn = self.num.degree().expect("nonzero") as i64;
        let dd = self.den.degree().expect("nonzero") as i64;
        dn - dd + 4
    }

    pub(crate) fn charts(&self) -> Charts {
        let finite_poles: Vec<Complex> = self.den.roots().into_iter().map(|(r, _)| r).collect();
        let r_inf = 2.0 * (1.0 + finite_poles.iter().map(|p| p.norm()).fold(0.0, f64::max));
        let z = Chart::new(self.num.clone(), self.den.clone());
        let (nr, dr) = (self.num.reversed(), self.den.reversed());
        let e = if self.is_zero() { 0 } else { -self.order_at_infinity() };
        let w =
            if e >= 0 { Chart::new(nr.shift_up(e as usize), dr) } else { Chart::new(nr, dr.shift_up((-e) as usize)) };
        Charts { z, w, r_inf, finite_poles }
    }

    /// One record per pole, finite poles first in lexicographic order, then ∞.
    pub fn analyze(&self) -> Result<Vec<PoleRecord>> {
        if self.is_zero() {
            return Err(Error::NoPoles);
        }
        let mut out = Vec::new();
        for (p, m) in self.den.roots() {
            let mut q = self.den.clone();
            for _ in 0..m {
                q = q.deflate(p);
            }
            let leading = self.num.eval(p) / q.eval(p);
            out.push(Self::record(PoleLocation::Finite(p), m, leading, false));
        }
        let m = self.order_at_infinity();
        if m > 0 {
            let leading = self.num.leading() / self.den.leading();
            out.push(Self::record(PoleLocation::Infinity, m as usize, leading, true));
        }
        if out.is_empty() {
            return Err(Error::NoPoles);
        }
        Ok(out)
    }

    fn record(location: PoleLocation, order: usize, leading: Complex, at_infinity: bool) -> PoleRecord {
        let (mut exponent, mut residue) = (None, None);
        let (mut stokes, mut anti) = (Vec::new(), Vec::new());
        if order <= 2 {
            let a = if order == 2 { leading } else { Complex::new(0.0, 0.0) };
            let i2pi = Complex::new(0.0, 2.0 * PI);
            exponent = Some(i2pi * (1.0 + 4.0 * a).sqrt());
            residue = Some(2.0 * i2pi * a.sqrt());
        } else {
            let k = order - 2;
            stokes = angle_family(leading.arg(), k, at_infinity);
            anti = angle_family(leading.arg() + PI, k, at_infinity);
        }
        PoleRecord { location, order, leading, exponent, residue, stokes_angles: stokes, anti_stokes_angles: anti }
    }

    /// Genus-0 surface: a boundary circle with `m − 2` points per irregular pole,
    /// a puncture per pole of order at most two.
    pub fn surface_of(&self) -> Result<PotentialSurface> {
        let poles = self.analyze()?;
        let mut circles = Vec::new();
        let mut punctures = Vec::new();
        for (i, p) in poles.iter().enumerate() {
            if p.is_irregular() {
                circles.push(i);
            } else {
                punctures.push(i);
            }
        }
        let surface = MarkedBorderedSurface {
            genus: 0,
            boundary: circles.iter().map(|&i| (poles[i].order - 2) as u32).collect(),
            punctures: punctures.len() as u32,
        };
        Ok(PotentialSurface { degenerate: surface.is_degenerate(), surface, circles, punctures })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    #[test]
    fn linear_potential_has_three_stokes_directions() {
        let phi = RationalPotential::polynomial(vec![c(0.0), c(1.0)]).unwrap();
        let poles = phi.analyze().unwrap();
        assert_eq!(poles.len(), 1);
        assert_eq!(poles[0].location, PoleLocation::Infinity);
        assert_eq!(poles[0].order, 5);
        let want = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
        for (a, b) in poles[0].stokes_angles.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in poles[0].anti_stokes_angles.iter().zip([PI / 3.0, PI, 5.0 * PI / 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_square_has_zero_exponent() {
        let phi = RationalPotential::new(vec![c(-0.25)], vec![c(0.0), c(0.0), c(1.0)]).unwrap();
        let poles = phi.analyze().unwrap();
        assert_eq!(poles.len(), 2);
        assert_eq!(poles[0].location, PoleLocation::Finite(c(0.0)));
        assert_eq!(poles[0].order, 2);
        assert!((poles[0].leading - c(-0.25)).norm() < 1e-15);
        assert!(poles[0].exponent.unwrap().norm() < 1e-15);
        let s = phi.surface_of().unwrap();
        assert_eq!(s.surface, MarkedBorderedSurface::sphere(2));
        assert!(s.degenerate);
    }

    #[test]
    fn surfaces_of_examples() {
        let cubic = RationalPotential::polynomial(vec![c(-1.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        let s = cubic.surface_of().unwrap();
        assert_eq!(s.surface, MarkedBorderedSurface::disc(5));
        assert_eq!(s.surface.rank(), 2);
        let mixed = RationalPotential::new(vec![c(1.0), c(0.0), c(0.0), c(1.0)], vec![c(0.0), c(0.0), c(1.0)]).unwrap();
        let s = mixed.surface_of().unwrap();
        assert_eq!(s.surface, MarkedBorderedSurface::punctured_polygon(3));
        assert_eq!(s.surface.rank(), 3);
        let one = RationalPotential::polynomial(vec![c(1.0)]).unwrap();
        let s = one.surface_of().unwrap();
        assert_eq!(s.surface, MarkedBorderedSurface::disc(2));
        assert!(s.degenerate);
        let zero = RationalPotential::polynomial(vec![]).unwrap();
        assert!(matches!(zero.analyze(), Err(Error::NoPoles)));
    }

    #[test]
    fn common_factors_cancel() {
        // (z − 1)·z / ((z − 1)·z³) = 1/z²
        let num = Polynomial::new(vec![c(0.0), c(-1.0), c(1.0)]);
        let den = Polynomial::linear_power(c(1.0), 1).shift_up(3);
        let phi = RationalPotential::new(num.coeffs().to_vec(), den.coeffs().to_vec()).unwrap();
        assert_eq!(phi.denominator().degree(), Some(2));
        assert_eq!(phi.analyze().unwrap()[0].order, 2);
    }

    #[test]
    fn pullbacks() {
        let phi = RationalPotential::new(vec![c(1.0)], vec![c(0.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        assert_eq!(phi.pullback_power(1).unwrap(), phi);
        let w = phi.pullback_power(2).unwrap();
        assert_eq!(w, RationalPotential::new(vec![c(4.0)], vec![c(0.0), c(0.0), c(0.0), c(0.0), c(1.0)]).unwrap());
        assert_eq!(w.analyze().unwrap()[0].order, 4);
    }

    #[test]
    fn chart_at_infinity() {
        // φ = z²: φ(1/w)/w⁴ = w⁻⁶
        let phi = RationalPotential::polynomial(vec![c(0.0), c(0.0), c(1.0)]).unwrap();
        let ch = phi.charts();
        let w = Complex::new(0.3, 0.1);
        assert!((ch.w.eval(w) - w.powi(-6)).norm() < 1e-12 * w.powi(-6).norm());
        assert_eq!(ch.w.clearance(w), w.norm());
        let t = ch.z.taylor(Complex::new(1.0, 0.0), 4);
        assert!((t[0] - 1.0).norm() < 1e-15 && (t[1] - 2.0).norm() < 1e-15 && (t[2] - 1.0).norm() < 1e-15);
    }
}
