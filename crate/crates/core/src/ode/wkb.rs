use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::build::{build_framed, Realization};
use super::integrate::IntegratorConfig;
use super::potential::RationalPotential;
use crate::cluster::coordinates;
use crate::error::{Error, Result};
use crate::projective::Complex;
use crate::surface::Signing;

/// Largest phase change accepted between neighbouring sweep points.
const MAX_PHASE_STEP: f64 = PI / 3.0;

#[derive(Clone, Debug)]
pub struct WkbRow {
    pub hbar: f64,
    pub values: BTreeMap<usize, Complex>,
    /// `log X` continued along the sweep from the principal branch at the largest ħ.
    pub logs: BTreeMap<usize, Complex>,
}

impl WkbRow {
    /// `ħ·log X`.
    pub fn scaled_log(&self, arc: usize) -> Option<Complex> {
        self.logs.get(&arc).map(|l| l * self.hbar)
    }
}

#[derive(Clone, Debug)]
pub struct WkbTable {
    pub arcs: Vec<usize>,
    /// Rows in order of decreasing ħ.
    pub rows: Vec<WkbRow>,
}

impl WkbTable {
    /// Least-squares slope of `log X` against `1/ħ`.
    pub fn slope(&self, arc: usize) -> Option<Complex> {
        let pts: Vec<(f64, Complex)> =
            self.rows.iter().filter_map(|r| r.logs.get(&arc).map(|l| (1.0 / r.hbar, *l))).collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<Complex>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: Complex = pts.iter().map(|p| (p.1 - my) * (p.0 - mx)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    }
}

fn values_at(
    phi: &RationalPotential,
    arcs: &[usize],
    x: f64,
    cfg: &IntegratorConfig,
) -> Result<BTreeMap<usize, Complex>> {
    let scaled = phi.scaled(Complex::new(x * x, 0.0));
    let b = build_framed(&scaled, &Signing::default(), &Realization::Auto, cfg)?;
    let coords = coordinates(&b.framed, &b.triangulation)?;
    arcs.iter().map(|&a| coords.value(a).map(|v| (a, v)).ok_or(Error::NonRegularInput(a))).collect()
}

/// Coordinates of `φ/ħ²` for each ħ, with logarithms continued in `1/ħ`.
pub fn wkb_sweep(phi: &RationalPotential, arcs: &[usize], hbars: &[f64], cfg: &IntegratorConfig) -> Result<WkbTable> {
    cfg.validate()?;
    if hbars.is_empty() || hbars.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
        return Err(Error::Invalid("ħ values must be positive and finite".into()));
    }
    let mut targets: Vec<f64> = hbars.to_vec();
    targets.sort_by(|a, b| b.partial_cmp(a).expect("finite ħ"));
    targets.dedup();
    let mut x = 1.0 / targets[0];
    let probe = build_framed(&phi.scaled(Complex::new(x * x, 0.0)), &Signing::default(), &Realization::Auto, cfg)?;
    let arcs: Vec<usize> = if arcs.is_empty() { probe.triangulation.arcs().collect() } else { arcs.to_vec() };
    if let Some(a) = arcs.iter().find(|&&a| !probe.triangulation.is_arc(a)) {
        return Err(Error::Invalid(format!("{a} is not an arc")));
    }
    let mut values = values_at(phi, &arcs, x, cfg)?;
    let mut logs: BTreeMap<usize, Complex> = values.iter().map(|(&a, v)| (a, v.ln())).collect();
    let mut rows = vec![WkbRow { hbar: targets[0], values: values.clone(), logs: logs.clone() }];
    let mut dx = 0.25;
    for &h in &targets[1..] {
        let goal = 1.0 / h;
        while x < goal {
            let next = (x + dx).min(goal);
            let v = values_at(phi, &arcs, next, cfg)?;
            let steps: BTreeMap<usize, Complex> = arcs.iter().map(|a| (*a, (v[a] / values[a]).ln())).collect();
            if steps.values().any(|s| s.im.abs() > MAX_PHASE_STEP) {
                dx *= 0.5;
                if dx < 1e-6 {
                    return Err(Error::StepFailure { re: next, im: 0.0, reason: "phase continuation stalled".into() });
                }
                continue;
            }
            for (a, s) in steps {
                *logs.get_mut(&a).expect("arc") += s;
            }
            values = v;
            x = next;
            dx *= 1.5;
        }
        rows.push(WkbRow { hbar: h, values: values.clone(), logs: logs.clone() });
    }
    Ok(WkbTable { arcs, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_hbar_is_finite() {
        let phi = RationalPotential::polynomial(vec![
            Complex::new(-1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
        ])
        .unwrap();
        let t = wkb_sweep(&phi, &[], &[10.0], &Default::default()).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!(t.rows[0].values.values().all(|v| v.is_finite() && v.norm() > 0.0));
    }
}
