//! Composite Gauss-Legendre quadrature with a panel-doubling convergence
//! check.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub nodes_per_panel: usize,
    pub panels: usize,
    pub rel_tolerance: f64,
    /// Panel doublings attempted before giving up. Zero evaluates the
    /// composite rule once, without a convergence check.
    pub max_doublings: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_per_panel: 64,
            panels: 4,
            rel_tolerance: 1e-8,
            max_doublings: 8,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_panel < 2 {
            return Err(Error::invalid("quad_nodes", "need at least 2 nodes per panel"));
        }
        if self.panels < 1 {
            return Err(Error::invalid("quad_panels", "need at least 1 panel"));
        }
        if !(self.rel_tolerance > 0.0) {
            return Err(Error::invalid("quad_tolerance", "must be positive"));
        }
        Ok(())
    }
}

/// A validated [`QuadratureSpec`] together with its Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Quadrature {
    spec: QuadratureSpec,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self::new(QuadratureSpec::default()).expect("default spec is valid")
    }
}

impl Quadrature {
    pub fn new(spec: QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let (nodes, weights) = gauss_legendre(spec.nodes_per_panel);
        Ok(Self { spec, nodes, weights })
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    /// Same rule with the panel count doubled.
    pub fn refined(&self) -> Self {
        Self {
            spec: QuadratureSpec {
                panels: 2 * self.spec.panels,
                ..self.spec
            },
            ..self.clone()
        }
    }

    /// Integral of `f` over `[lo, hi]`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
        self.try_integrate(|x| Ok(f(x)), lo, hi)
    }

    /// Like [`Quadrature::integrate`] for integrands that can fail.
    pub fn try_integrate(&self, mut f: impl FnMut(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<f64> {
        if !(lo <= hi) {
            return Err(Error::Domain(format!("integration bounds [{lo}, {hi}] are reversed")));
        }
        if lo == hi {
            return Ok(0.0);
        }
        let mut panels = self.spec.panels;
        let (mut coarse, _) = self.composite(&mut f, lo, hi, panels)?;
        if self.spec.max_doublings == 0 {
            if !coarse.is_finite() {
                return Err(Error::Numerical(format!("integrand not finite on [{lo}, {hi}]")));
            }
            return Ok(coarse);
        }
        for _ in 0..self.spec.max_doublings {
            panels *= 2;
            let (fine, l1) = self.composite(&mut f, lo, hi, panels)?;
            let change = (fine - coarse).abs();
            if !fine.is_finite() {
                return Err(Error::Numerical(format!("integrand not finite on [{lo}, {hi}]")));
            }
            if change <= self.spec.rel_tolerance * fine.abs().max(l1) {
                return Ok(fine);
            }
            if panels >= self.spec.panels << self.spec.max_doublings {
                return Err(Error::NonConvergence { lo, hi, panels, change });
            }
            coarse = fine;
        }
        unreachable!("loop returns on its last iteration")
    }

    /// Composite rule on `panels` equal panels; also returns the integral
    /// of `|f|` as a scale for the convergence test.
    fn composite(&self, f: &mut impl FnMut(f64) -> Result<f64>, lo: f64, hi: f64, panels: usize) -> Result<(f64, f64)> {
        let width = (hi - lo) / panels as f64;
        let half = 0.5 * width;
        let (mut sum, mut l1) = (0.0, 0.0);
        for p in 0..panels {
            let mid = lo + (p as f64 + 0.5) * width;
            let (mut s, mut a) = (0.0, 0.0);
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let v = f(mid + half * x)?;
                s += w * v;
                a += w * v.abs();
            }
            sum += half * s;
            l1 += half * a;
        }
        Ok((sum, l1))
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// found by Newton iteration on the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess for the i-th largest root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn small_rules_match_tables() {
        let (x, w) = gauss_legendre(2);
        assert_relative_eq!(x[1], 1.0 / 3f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(w[0], 1.0, max_relative = 1e-14);
        let (x, w) = gauss_legendre(3);
        assert_relative_eq!(x[2], (0.6f64).sqrt(), max_relative = 1e-15);
        assert_eq!(x[1], 0.0);
        assert_relative_eq!(w[1], 8.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(w[0], 5.0 / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn weights_sum_to_two_and_polynomials_are_exact() {
        for n in [5, 16, 64, 101] {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-13);
            // x^(2n-2) integrates to 2/(2n-1)
            let deg = 2 * n as i32 - 2;
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            assert_relative_eq!(got, 2.0 / (deg as f64 + 1.0), max_relative = 1e-11);
        }
    }

    #[test]
    fn integrates_textbook_cases() {
        let q = Quadrature::default();
        assert!((q.integrate(f64::sin, 0.0, PI).unwrap() - 2.0).abs() < 1e-10);
        assert!((q.integrate(|x| x * x, 0.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(q.integrate(|x| x, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(q.integrate(|_| 0.0, 0.0, 1.0).unwrap(), 0.0);
        assert!(q.integrate(|x| x, 1.0, 0.0).is_err());
    }

    #[test]
    fn refinement_is_stable() {
        let q = Quadrature::default();
        let f = |x: f64| (-(x - 0.3).powi(2) * 400.0).exp();
        let a = q.integrate(f, 0.0, 1.0).unwrap();
        let b = q.refined().integrate(f, 0.0, 1.0).unwrap();
        assert!((a - b).abs() < 1e-8 * a);
    }

    #[test]
    fn reports_non_convergence() {
        let q = Quadrature::new(QuadratureSpec {
            nodes_per_panel: 2,
            panels: 1,
            rel_tolerance: 1e-15,
            max_doublings: 8,
        })
        .unwrap();
        // 1/sqrt(x) singularity: slow algebraic convergence.
        let err = q.integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn single_pass_skips_the_check() {
        let q = Quadrature::new(QuadratureSpec {
            nodes_per_panel: 2,
            panels: 1,
            rel_tolerance: 1e-15,
            max_doublings: 0,
        })
        .unwrap();
        // the bare two-point rule mapped onto [0, 1]
        let x = |t: f64| 0.5 + 0.5 * t;
        let expected = 0.5 * (1.0 / x(-1.0 / 3f64.sqrt()).sqrt() + 1.0 / x(1.0 / 3f64.sqrt()).sqrt());
        assert_eq!(q.integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0).unwrap(), expected);
    }

    #[test]
    fn spec_validation() {
        assert!(Quadrature::new(QuadratureSpec {
            nodes_per_panel: 1,
            ..Default::default()
        })
        .is_err());
        assert!(Quadrature::new(QuadratureSpec {
            panels: 0,
            ..Default::default()
        })
        .is_err());
        assert!(Quadrature::new(QuadratureSpec {
            rel_tolerance: 0.0,
            ..Default::default()
        })
        .is_err());
    }
}
