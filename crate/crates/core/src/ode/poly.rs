use crate::projective::Complex;

/// Polynomial with coefficients in ascending degree; zero leading terms are trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: Complex) -> Self {
        Self::new(vec![c])
    }

    /// `(z − r)^k`.
    pub fn linear_power(r: Complex, k: usize) -> Self {
        let mut p = Self::constant(Complex::new(1.0, 0.0));
        for _ in 0..k {
            p = p.mul(&Self::new(vec![-r, Complex::new(1.0, 0.0)]));
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex {
        self.coeffs.last().copied().unwrap_or_default()
    }

    /// Order of vanishing at 0.
    pub fn low_order(&self) -> usize {
        self.coeffs.iter().position(|c| *c != Complex::new(0.0, 0.0)).unwrap_or(0)
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs.iter().rev().fold(Complex::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(Vec::new());
        }
        let mut out = vec![Complex::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Multiplication by `z^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut out = vec![Complex::new(0.0, 0.0); k];
        out.extend_from_slice(&self.coeffs);
        Self::new(out)
    }

    /// Division by `z^k`, dropping the low coefficients.
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().skip(k).copied().collect())
    }

    /// `p(z^k)`.
    pub fn compose_power(&self, k: usize) -> Self {
        let mut out = vec![Complex::new(0.0, 0.0); self.coeffs.len().saturating_sub(1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * k] = *c;
        }
        Self::new(out)
    }

    /// Coefficient reversal `z^d p(1/z)` for `d = deg p`.
    pub fn reversed(&self) -> Self {
        Self::new(self.coeffs.iter().rev().copied().collect())
    }

    /// Quotient by `z − r`, discarding the remainder.
    pub fn deflate(&self, r: Complex) -> Self {
        let d = match self.degree() {
            Some(d) if d > 0 => d,
            _ => return Self::new(Vec::new()),
        };
        let mut q = vec![Complex::new(0.0, 0.0); d];
        let mut acc = Complex::new(0.0, 0.0);
        for i in (1..=d).rev() {
            acc = acc * r + self.coeffs[i];
            q[i - 1] = acc;
        }
        Self::new(q)
    }

    /// Taylor coefficients of `p(z0 + t)` in `t`.
    pub fn taylor_at(&self, z0: Complex) -> Vec<Complex> {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for k in 0..n {
            for i in (k..n - 1).rev() {
                let next = c[i + 1];
                c[i] += z0 * next;
            }
        }
        c
    }

    /// Sum of `|a_i|·C(i,j)·|z|^{i−j}` for the j-th derivative, a magnitude scale.
    fn derivative_scale(&self, z: f64, j: usize) -> f64 {
        let mut s = 0.0;
        for (i, a) in self.coeffs.iter().enumerate().skip(j) {
            s += a.norm() * binomial(i, j) * z.powi((i - j) as i32);
        }
        s
    }

    /// Roots with multiplicity: clusters from simultaneous iteration are merged
    /// when the derivatives vanish at their centroid.
    pub fn roots(&self) -> Vec<(Complex, usize)> {
        let Some(d) = self.degree() else { return Vec::new() };
        let zeros = self.low_order();
        let mut out = Vec::new();
        if zeros > 0 {
            out.push((Complex::new(0.0, 0.0), zeros));
        }
        let rest = self.shift_down(zeros);
        if d == zeros {
            return out;
        }
        let raw = rest.aberth();
        let mut used = vec![false; raw.len()];
        for i in 0..raw.len() {
            if used[i] {
                continue;
            }
            let delta = 1e-3 * (1.0 + raw[i].norm());
            let members: Vec<usize> =
                (i..raw.len()).filter(|&j| !used[j] && (raw[j] - raw[i]).norm() <= delta).collect();
            let m = members.len();
            let centroid = members.iter().map(|&j| raw[j]).sum::<Complex>() / m as f64;
            let refined = if m > 1 { rest.refine_multiple(centroid, m) } else { centroid };
            if m > 1 && rest.vanishes_to(refined, m) {
                for &j in &members {
                    used[j] = true;
                }
                out.push((refined, m));
            } else {
                used[i] = true;
                out.push((raw[i], 1));
            }
        }
        out.sort_by(|a, b| (a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).expect("finite roots"));
        out
    }

    pub(crate) fn vanishes_to(&self, c: Complex, m: usize) -> bool {
        let t = self.taylor_at(c);
        (0..m).all(|j| t[j].norm() <= 1e-7 * self.derivative_scale(c.norm(), j).max(f64::MIN_POSITIVE))
    }

    fn refine_multiple(&self, mut c: Complex, m: usize) -> Complex {
        let mut q = self.clone();
        for _ in 0..m - 1 {
            q = q.derivative();
        }
        let dq = q.derivative();
        for _ in 0..8 {
            let den = dq.eval(c);
            if den.norm() == 0.0 {
                break;
            }
            let step = q.eval(c) / den;
            c -= step;
            if step.norm() <= 1e-16 * (1.0 + c.norm()) {
                break;
            }
        }
        c
    }

    /// Aberth–Ehrlich simultaneous iteration; requires a nonzero constant term.
    fn aberth(&self) -> Vec<Complex> {
        let d = self.degree().expect("nonzero");
        let lead = self.leading();
        let bound = (0..d).map(|i| (self.coeffs[i] / lead).norm().powf(1.0 / (d - i) as f64)).fold(0.0, f64::max) * 2.0;
        let low = {
            let r = self.reversed();
            let lr = r.leading();
            (0..d).map(|i| (r.coeffs[i] / lr).norm().powf(1.0 / (d - i) as f64)).fold(0.0, f64::max) * 2.0
        };
        let radius = (bound * (1.0 / low.max(f64::MIN_POSITIVE))).sqrt().clamp(1e-300, 1e300);
        let mut z: Vec<Complex> = (0..d)
            .map(|k| Complex::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4))
            .collect();
        let dp = self.derivative();
        for _ in 0..1000 {
            let mut converged = true;
            for k in 0..d {
                let p = self.eval(z[k]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp.eval(z[k]);
                let sum: Complex = (0..d).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
                let w = ratio / (1.0 - ratio * sum);
                if !w.is_finite() {
                    continue;
                }
                z[k] -= w;
                if w.norm() > 1e-15 * (1.0 + z[k].norm()) {
                    converged = false;
                }
            }
            if converged {
                break;
            }
        }
        z
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
