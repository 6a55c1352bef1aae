use serde::{Deserialize, Serialize};

use super::path::{pole_spacing, PlanarPath, Segment};
use super::potential::{Chart, Charts, RationalPotential};
use crate::error::{Error, Result};
use crate::projective::{Complex, ProjectiveMap};

/// Taylor order of each step.
const ORDER: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    /// Floor on a column's norm, relative to the largest column, in the error control.
    pub abs_tol: f64,
    /// Largest step in the local chart coordinate.
    pub max_step: f64,
    pub renorm_threshold: f64,
    pub wkb_decay_target: f64,
    /// Largest distance from the anchor to a seed point, and for finite poles the
    /// largest ratio between the anchor and seed distances to the pole.
    pub seed_radius_max: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-30,
            max_step: 0.5,
            renorm_threshold: 1e50,
            wkb_decay_target: 25.0,
            seed_radius_max: 1e4,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| x > 0.0 && x < 1.0;
        if !unit(self.rel_tol) || !unit(self.abs_tol) {
            return Err(Error::Invalid("tolerances must lie in (0, 1)".into()));
        }
        if self.wkb_decay_target.is_nan() || self.wkb_decay_target <= 10.0 {
            return Err(Error::Invalid("decay target must exceed 10".into()));
        }
        if !(self.max_step > 0.0 && self.renorm_threshold > 1.0 && self.seed_radius_max > 1.0) {
            return Err(Error::Invalid("max_step, renorm_threshold and seed_radius_max out of range".into()));
        }
        Ok(())
    }
}

/// Column `(y, −y′)` of a solution of `y″ = φ y`.
pub type Column = [Complex; 2];

#[derive(Clone, Debug)]
pub struct Transport {
    /// Transported columns, to be multiplied by `exp(log_scale)`.
    pub columns: Vec<Column>,
    pub log_scale: f64,
    /// `|det Y_end / det Y₀ − 1|` for two columns.
    pub wronskian_drift: Option<f64>,
    pub steps: usize,
}

impl Transport {
    /// Row-major matrix of the first two columns.
    pub fn matrix(&self) -> [[Complex; 2]; 2] {
        let (c0, c1) = (self.columns[0], self.columns[1]);
        [[c0[0], c1[0]], [c0[1], c1[1]]]
    }
}

fn det(a: &Column, b: &Column) -> Complex {
    a[0] * b[1] - a[1] * b[0]
}

fn to_w(z: Complex, c: Column) -> Column {
    [c[0] / z, -c[0] - z * c[1]]
}

fn from_w(z: Complex, c: Column) -> Column {
    [z * c[0], -c[0] - c[1] / z]
}

struct Run<'a> {
    charts: &'a Charts,
    cfg: &'a IntegratorConfig,
    cols: Vec<Column>,
    in_w: bool,
    /// Keep the second column orthogonal to the first; the Wronskian is unchanged.
    orthogonal: bool,
    log_scale: f64,
    steps: usize,
}

impl Run<'_> {
    fn chart(&self) -> &Chart {
        if self.in_w {
            &self.charts.w
        } else {
            &self.charts.z
        }
    }

    fn local(&self, z: Complex) -> Complex {
        if self.in_w {
            1.0 / z
        } else {
            z
        }
    }

    fn set_chart(&mut self, in_w: bool, z: Complex) {
        if in_w != self.in_w {
            let f = if in_w { to_w } else { from_w };
            for c in &mut self.cols {
                *c = f(z, *c);
            }
            self.in_w = in_w;
        }
    }

    fn renormalize(&mut self) {
        let big = self.cols.iter().flat_map(|c| c.iter().map(|x| x.norm())).fold(0.0, f64::max);
        let t = self.cfg.renorm_threshold;
        if big > t || (big > 0.0 && big < 1.0 / t) {
            for c in &mut self.cols {
                c[0] /= big;
                c[1] /= big;
            }
            self.log_scale += big.ln();
        }
    }

    fn fail(z: Complex, reason: &str) -> Error {
        Error::StepFailure { re: z.re, im: z.im, reason: reason.into() }
    }

    /// Taylor coefficients of each column's `y` at `x`.
    fn series(&self, x: Complex) -> Vec<Vec<Complex>> {
        let phi = self.chart().taylor(x, ORDER - 1);
        self.cols
            .iter()
            .map(|c| {
                let mut y = vec![Complex::new(0.0, 0.0); ORDER + 1];
                y[0] = c[0];
                y[1] = -c[1];
                for n in 0..ORDER - 1 {
                    let mut acc = Complex::new(0.0, 0.0);
                    for k in 0..=n {
                        acc += phi[k] * y[n - k];
                    }
                    y[n + 2] = acc / ((n + 2) * (n + 1)) as f64;
                }
                y
            })
            .collect()
    }

    fn tolerances(&self) -> Vec<f64> {
        let norms: Vec<f64> = self.cols.iter().map(|c| c[0].norm().max(c[1].norm())).collect();
        let big = norms.iter().copied().fold(0.0, f64::max);
        norms.iter().map(|n| self.cfg.rel_tol * n.max(self.cfg.abs_tol * big)).collect()
    }

    /// Step radius from the decay of the last two coefficients.
    fn radius(series: &[Vec<Complex>], tol: &[f64]) -> f64 {
        let mut r = f64::INFINITY;
        for (y, &t) in series.iter().zip(tol) {
            if t == 0.0 {
                continue;
            }
            for n in [ORDER - 1, ORDER] {
                let a = y[n].norm();
                if a > 0.0 {
                    r = r.min((t / a).powf(1.0 / n as f64)).min((t / (n as f64 * a)).powf(1.0 / (n - 1) as f64));
                }
            }
        }
        0.9 * r
    }

    fn error(series: &[Vec<Complex>], tol: &[f64], h: f64) -> f64 {
        let mut worst = 0.0_f64;
        for (y, &t) in series.iter().zip(tol) {
            if t == 0.0 {
                continue;
            }
            let mut e = 0.0;
            for n in [ORDER - 1, ORDER] {
                let a = y[n].norm();
                e += a * h.powi(n as i32) + n as f64 * a * h.powi(n as i32 - 1);
            }
            worst = worst.max(e / t);
        }
        worst
    }

    fn advance(series: &[Vec<Complex>], h: Complex) -> Vec<Column> {
        series
            .iter()
            .map(|y| {
                let mut v = Complex::new(0.0, 0.0);
                let mut d = Complex::new(0.0, 0.0);
                for n in (0..=ORDER).rev() {
                    v = v * h + y[n];
                    if n > 0 {
                        d = d * h + y[n] * n as f64;
                    }
                }
                [v, -d]
            })
            .collect()
    }

    /// Bound on the chart length of `seg` between parameters `s0` and `s1`.
    fn arc_length(&self, seg: &Segment, s0: f64, s1: f64) -> f64 {
        let len = seg.length() * (s1 - s0);
        if self.in_w {
            len / seg.at(s0).norm().min(seg.at(s1).norm()).powi(2)
        } else {
            len
        }
    }

    /// Integrates along `seg` for parameters in `[a, b]` in the current chart.
    fn piece(&mut self, seg: &Segment, a: f64, b: f64) -> Result<()> {
        let mut s = a;
        let mut ds = b - a;
        while s < b {
            let z = seg.at(s);
            let x = self.local(z);
            let clearance = self.chart().clearance(x);
            if clearance == 0.0 {
                return Err(Self::fail(z, "path meets a pole"));
            }
            let series = self.series(x);
            let tol = self.tolerances();
            let mut limit = Self::radius(&series, &tol).min(0.5 * clearance).min(self.cfg.max_step);
            let mut trial = (2.0 * ds).min(b - s);
            let mut accepted = None;
            for _ in 0..200 {
                let end = if s + trial >= b { b } else { s + trial };
                let h = self.local(seg.at(end)) - x;
                let hn = h.norm().max(self.arc_length(seg, s, end));
                if hn > limit {
                    trial *= 0.9 * limit / hn;
                } else if Self::error(&series, &tol, hn) > 1.0 {
                    limit *= 0.5;
                } else {
                    accepted = Some((end, h));
                    break;
                }
                if trial < 1e-15 * (b - a).max(1.0) {
                    break;
                }
            }
            let (end, h) = accepted.ok_or_else(|| Self::fail(z, "tolerance unreachable"))?;
            let next = Self::advance(&series, h);
            if next.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Self::fail(z, "non-finite state"));
            }
            self.cols = next;
            if self.orthogonal {
                let [u, v] = [self.cols[0], self.cols[1]];
                let alpha = (u[0].conj() * v[0] + u[1].conj() * v[1]) / (u[0].norm_sqr() + u[1].norm_sqr());
                self.cols[1] = [v[0] - alpha * u[0], v[1] - alpha * u[1]];
            }
            self.steps += 1;
            self.renormalize();
            ds = end - s;
            s = end;
        }
        Ok(())
    }

    fn segment(&mut self, seg: &Segment) -> Result<()> {
        let r = self.charts.r_inf;
        let mut cuts = vec![0.0];
        cuts.extend(seg.circle_crossings(r));
        cuts.push(1.0);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let in_w = seg.at(0.5 * (a + b)).norm() > r;
            self.set_chart(in_w, seg.at(a));
            self.piece(seg, a, b)?;
        }
        Ok(())
    }
}

fn check_clearance(charts: &Charts, path: &PlanarPath) -> Result<()> {
    let poles = &charts.finite_poles;
    if poles.is_empty() {
        return Ok(());
    }
    let clearance = path.clearance(poles);
    if clearance < 1e-3 * pole_spacing(poles) {
        return Err(Error::PathTooClose { clearance });
    }
    Ok(())
}

pub(crate) fn transport(
    charts: &Charts,
    path: &PlanarPath,
    y0: &[Column],
    cfg: &IntegratorConfig,
) -> Result<Transport> {
    run_transport(charts, path, y0, cfg, false)
}

/// Transport of a solution together with a companion used only for the Wronskian check.
pub(crate) fn transport_with_companion(
    charts: &Charts,
    path: &PlanarPath,
    y0: [Column; 2],
    cfg: &IntegratorConfig,
) -> Result<Transport> {
    run_transport(charts, path, &y0, cfg, true)
}

fn run_transport(
    charts: &Charts,
    path: &PlanarPath,
    y0: &[Column],
    cfg: &IntegratorConfig,
    orthogonal: bool,
) -> Result<Transport> {
    check_clearance(charts, path)?;
    let mut run = Run { charts, cfg, cols: y0.to_vec(), in_w: false, orthogonal, log_scale: 0.0, steps: 0 };
    for seg in path.segments() {
        run.segment(seg)?;
    }
    run.set_chart(false, path.end());
    let wronskian_drift = match y0 {
        [a, b] => {
            let d0 = det(a, b);
            let d1 = det(&run.cols[0], &run.cols[1]);
            (d0.norm() > 0.0).then(|| {
                let ratio = d1 / d0;
                let log = Complex::new(ratio.norm().ln() + 2.0 * run.log_scale, ratio.arg());
                (log.exp() - 1.0).norm()
            })
        }
        _ => None,
    };
    Ok(Transport { columns: run.cols, log_scale: run.log_scale, wronskian_drift, steps: run.steps })
}

/// Transports columns `(y, −y′)` along `path`, in the z chart at both ends.
pub fn integrate(
    phi: &RationalPotential,
    path: &PlanarPath,
    y0: &[Column],
    cfg: &IntegratorConfig,
) -> Result<Transport> {
    cfg.validate()?;
    if y0.is_empty() || y0.len() > 2 {
        return Err(Error::Invalid("integrate takes one or two columns".into()));
    }
    transport(&phi.charts(), path, y0, cfg)
}

pub(crate) fn loop_transport(charts: &Charts, lp: &PlanarPath, cfg: &IntegratorConfig) -> Result<Transport> {
    if !lp.is_closed() {
        return Err(Error::Invalid("monodromy loop is not closed".into()));
    }
    let id = [[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)], [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)]];
    transport(charts, lp, &id, cfg)
}

/// Monodromy of the fundamental matrix around a closed path.
pub fn monodromy(phi: &RationalPotential, lp: &PlanarPath, cfg: &IntegratorConfig) -> Result<ProjectiveMap> {
    cfg.validate()?;
    ProjectiveMap::new(loop_transport(&phi.charts(), lp, cfg)?.matrix())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::projective::MapClass;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn identity() -> [Column; 2] {
        [[c(1.0), c(0.0)], [c(0.0), c(1.0)]]
    }

    #[test]
    fn zero_potential_is_linear() {
        let phi = RationalPotential::new(vec![], vec![c(1.0)]).unwrap();
        let path = PlanarPath::line(c(0.0), Complex::new(1.0, 2.0));
        let charts = phi.charts();
        // y = 2 + 3z, so (y, −y′) = (2, −3) at 0
        let t = transport(&charts, &path, &[[c(2.0), c(-3.0)]], &IntegratorConfig::default()).unwrap();
        let z = Complex::new(1.0, 2.0);
        let y = t.columns[0][0] * t.log_scale.exp();
        assert!((y - (2.0 + 3.0 * z)).norm() < 1e-13);
        assert!((t.columns[0][1] * t.log_scale.exp() - c(-3.0)).norm() < 1e-13);
    }

    #[test]
    fn exponential_solution_and_wronskian() {
        // φ = 1: y = e^z
        let phi = RationalPotential::polynomial(vec![c(1.0)]).unwrap();
        let z = Complex::new(1.5, -0.7);
        let t =
            integrate(&phi, &PlanarPath::line(c(0.0), z), &[[c(1.0), c(-1.0)], [c(1.0), c(1.0)]], &Default::default())
                .unwrap();
        let scale = t.log_scale.exp();
        assert!((t.columns[0][0] * scale - z.exp()).norm() < 1e-12 * z.exp().norm());
        assert!((t.columns[1][0] * scale - (-z).exp()).norm() < 1e-12);
        assert!(t.wronskian_drift.unwrap() < 1e-12);
    }

    #[test]
    fn crossing_into_the_w_chart() {
        // φ = z²: a path through |z| = R_∞ matches a path staying in the z chart
        let phi = RationalPotential::polynomial(vec![c(0.0), c(0.0), c(1.0)]).unwrap();
        let charts = phi.charts();
        assert_eq!(charts.r_inf, 2.0);
        let cfg = IntegratorConfig::default();
        let out = PlanarPath::line(c(0.0), c(3.0)).then(&PlanarPath::arc(c(0.0), 3.0, 0.0, 0.5)).unwrap();
        let end = out.end();
        let t1 = transport(&charts, &out, &identity(), &cfg).unwrap();
        let t2 = transport(&charts, &PlanarPath::line(c(0.0), end), &identity(), &cfg).unwrap();
        let (m1, m2) = (t1.matrix(), t2.matrix());
        let (s1, s2) = (t1.log_scale.exp(), t2.log_scale.exp());
        for i in 0..2 {
            for j in 0..2 {
                assert!((m1[i][j] * s1 - m2[i][j] * s2).norm() < 1e-8 * (m2[i][j] * s2).norm().max(1.0));
            }
        }
        assert!(t1.wronskian_drift.unwrap() < 1e-8);
    }

    #[test]
    fn contractible_loop_is_trivial() {
        let phi = RationalPotential::new(vec![c(1.0)], vec![c(0.0), c(0.0), c(1.0)]).unwrap();
        let m = monodromy(&phi, &PlanarPath::circle(c(3.0), 1.0, 0.0), &Default::default()).unwrap();
        assert_eq!(m.classify(), MapClass::Identity);
    }

    #[test]
    fn critical_inverse_square_is_parabolic() {
        let phi = RationalPotential::new(vec![c(-0.25)], vec![c(0.0), c(0.0), c(1.0)]).unwrap();
        let t = loop_transport(&phi.charts(), &PlanarPath::circle(c(0.0), 1.0, 0.0), &Default::default()).unwrap();
        let m = ProjectiveMap::new(t.matrix()).unwrap();
        assert_eq!(m.classify(), MapClass::Parabolic);
        let tr = (t.matrix()[0][0] + t.matrix()[1][1]) * t.log_scale.exp();
        assert!((tr - c(-2.0)).norm() < 1e-8);
        assert!(t.wronskian_drift.unwrap() < 1e-8);
    }

    #[test]
    fn simple_pole_is_unipotent() {
        let phi = RationalPotential::new(vec![c(1.0)], vec![c(0.0), c(1.0)]).unwrap();
        let t = loop_transport(&phi.charts(), &PlanarPath::circle(c(0.0), 0.5, PI), &Default::default()).unwrap();
        let tr = (t.matrix()[0][0] + t.matrix()[1][1]) * t.log_scale.exp();
        assert!((tr - c(2.0)).norm() < 1e-8);
    }

    #[test]
    fn near_pole_paths_are_rejected() {
        let phi = RationalPotential::new(vec![c(1.0)], vec![c(0.0), c(0.0), c(1.0)]).unwrap();
        let r = integrate(
            &phi,
            &PlanarPath::line(c(-1.0), Complex::new(1.0, 1e-5)),
            &[[c(1.0), c(0.0)]],
            &Default::default(),
        );
        assert!(matches!(r, Err(Error::PathTooClose { .. })));
    }
}
