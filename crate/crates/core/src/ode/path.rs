use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::projective::Complex;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    Line {
        from: Complex,
        to: Complex,
    },
    /// Points `center + radius·e^{i(start + s·sweep)}` for `s ∈ [0, 1]`.
    Arc {
        center: Complex,
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl Segment {
    pub fn at(&self, s: f64) -> Complex {
        match *self {
            Segment::Line { from, to } => from + (to - from) * s,
            Segment::Arc { center, radius, start, sweep } => center + Complex::from_polar(radius, start + s * sweep),
        }
    }

    pub fn start(&self) -> Complex {
        self.at(0.0)
    }

    pub fn end(&self) -> Complex {
        self.at(1.0)
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn reversed(&self) -> Self {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc { center, radius, start, sweep } => {
                Segment::Arc { center, radius, start: start + sweep, sweep: -sweep }
            }
        }
    }

    /// Distance from `q` to the segment.
    pub fn distance(&self, q: Complex) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                let s = if len2 == 0.0 { 0.0 } else { (((q - from) * d.conj()).re / len2).clamp(0.0, 1.0) };
                (q - self.at(s)).norm()
            }
            Segment::Arc { center, radius, start, sweep } => {
                let ends = (q - self.start()).norm().min((q - self.end()).norm());
                let rel = q - center;
                if rel.norm() == 0.0 {
                    return radius;
                }
                let (lo, span) = if sweep >= 0.0 { (start, sweep) } else { (start + sweep, -sweep) };
                if span >= 2.0 * PI || (rel.arg() - lo).rem_euclid(2.0 * PI) <= span {
                    (rel.norm() - radius).abs().min(ends)
                } else {
                    ends
                }
            }
        }
    }

    /// Parameters in `(0, 1)` where `|z(s)| = r`, ascending.
    pub(crate) fn circle_crossings(&self, r: f64) -> Vec<f64> {
        let mut out = Vec::new();
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let (a, b, c) = (d.norm_sqr(), 2.0 * (from * d.conj()).re, from.norm_sqr() - r * r);
                if a > 0.0 {
                    let disc = b * b - 4.0 * a * c;
                    if disc >= 0.0 {
                        let sq = disc.sqrt();
                        out.push((-b - sq) / (2.0 * a));
                        out.push((-b + sq) / (2.0 * a));
                    }
                }
            }
            Segment::Arc { center, radius, start, sweep } => {
                let cn = center.norm();
                if cn > 0.0 && sweep != 0.0 {
                    let q = (r * r - cn * cn - radius * radius) / (2.0 * radius * cn);
                    if q.abs() <= 1.0 {
                        let base = q.acos();
                        let turns = (sweep.abs() / (2.0 * PI)).ceil() as i64 + 1;
                        for psi in [center.arg() + base, center.arg() - base] {
                            for n in -turns - 1..=turns + 1 {
                                out.push((psi + 2.0 * PI * n as f64 - start) / sweep);
                            }
                        }
                    }
                }
            }
        }
        out.retain(|s| *s > 1e-12 && *s < 1.0 - 1e-12);
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite parameters"));
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        out
    }
}

/// A chain of segments with matching endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarPath {
    segments: Vec<Segment>,
}

impl PlanarPath {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Invalid("path without segments".into()));
        }
        for (i, w) in segments.windows(2).enumerate() {
            let (a, b) = (w[0].end(), w[1].start());
            if (a - b).norm() > 1e-9 * (1.0 + a.norm()) {
                return Err(Error::Invalid(format!("path segments {i} and {} do not meet", i + 1)));
            }
        }
        if segments.iter().any(|s| !s.start().is_finite() || !s.end().is_finite()) {
            return Err(Error::Invalid("path with non-finite points".into()));
        }
        Ok(Self { segments })
    }

    pub fn line(from: Complex, to: Complex) -> Self {
        Self { segments: vec![Segment::Line { from, to }] }
    }

    pub fn arc(center: Complex, radius: f64, start: f64, sweep: f64) -> Self {
        Self { segments: vec![Segment::Arc { center, radius, start, sweep }] }
    }

    /// Counterclockwise circle through `center + radius·e^{i·start}`.
    pub fn circle(center: Complex, radius: f64, start: f64) -> Self {
        Self::arc(center, radius, start, 2.0 * PI)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start(&self) -> Complex {
        self.segments[0].start()
    }

    pub fn end(&self) -> Complex {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn is_closed(&self) -> bool {
        (self.start() - self.end()).norm() <= 1e-9 * (1.0 + self.start().norm())
    }

    pub fn then(mut self, other: &Self) -> Result<Self> {
        self.segments.extend_from_slice(&other.segments);
        Self::new(self.segments)
    }

    pub fn reversed(&self) -> Self {
        Self { segments: self.segments.iter().rev().map(Segment::reversed).collect() }
    }

    pub fn clearance(&self, poles: &[Complex]) -> f64 {
        poles.iter().flat_map(|p| self.segments.iter().map(move |s| s.distance(*p))).fold(f64::INFINITY, f64::min)
    }
}

/// Minimum spacing used to scale the clearance requirement.
pub(crate) fn pole_spacing(poles: &[Complex]) -> f64 {
    let mut d = f64::INFINITY;
    for (i, p) in poles.iter().enumerate() {
        for q in &poles[i + 1..] {
            d = d.min((p - q).norm());
        }
    }
    if d.is_finite() {
        d
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        let l = Segment::Line { from: Complex::new(0.0, 0.0), to: Complex::new(2.0, 0.0) };
        assert!((l.distance(Complex::new(1.0, 1.0)) - 1.0).abs() < 1e-15);
        assert!((l.distance(Complex::new(3.0, 0.0)) - 1.0).abs() < 1e-15);
        let a = Segment::Arc { center: Complex::new(0.0, 0.0), radius: 1.0, start: 0.0, sweep: PI / 2.0 };
        assert!((a.distance(Complex::new(0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((a.distance(Complex::new(2.0_f64.sqrt(), 2.0_f64.sqrt())) - 1.0).abs() < 1e-12);
        assert!((a.distance(Complex::new(-1.0, 0.0)) - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn crossings_of_radius() {
        let l = Segment::Line { from: Complex::new(-3.0, 0.0), to: Complex::new(3.0, 0.0) };
        let s = l.circle_crossings(2.0);
        assert_eq!(s.len(), 2);
        assert!((l.at(s[0]).norm() - 2.0).abs() < 1e-12 && (l.at(s[1]).norm() - 2.0).abs() < 1e-12);
        let a = Segment::Arc { center: Complex::new(2.0, 0.0), radius: 1.0, start: 0.0, sweep: 2.0 * PI };
        let s = a.circle_crossings(2.0);
        assert_eq!(s.len(), 2);
        for x in s {
            assert!((a.at(x).norm() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn chaining_and_reversal() {
        let p = PlanarPath::line(Complex::new(0.0, 0.0), Complex::new(1.0, 0.0))
            .then(&PlanarPath::arc(Complex::new(0.0, 0.0), 1.0, 0.0, PI))
            .unwrap();
        assert!((p.end() - Complex::new(-1.0, 0.0)).norm() < 1e-15);
        let r = p.reversed();
        assert_eq!(r.start(), p.end());
        assert!((r.end() - p.start()).norm() < 1e-15);
        assert!(PlanarPath::line(Complex::new(0.0, 0.0), Complex::new(1.0, 0.0))
            .then(&PlanarPath::line(Complex::new(2.0, 0.0), Complex::new(3.0, 0.0)))
            .is_err());
        assert!(PlanarPath::circle(Complex::new(1.0, 1.0), 0.5, 0.3).is_closed());
    }
}
