//! Dense univariate polynomials over C with companion-matrix root finding.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::proj_geom::{r, C64};

/// Polynomial with coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(r(0.0));
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| r(x)).collect())
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `t`.
    pub fn t() -> Self {
        Self::new(vec![r(0.0), r(1.0)])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Formal degree (index of the last stored coefficient).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Degree after discarding leading coefficients below `tol` relative to
    /// the largest coefficient.
    pub fn effective_degree(&self, tol: f64) -> usize {
        let scale = self.max_coeff();
        if scale == 0.0 {
            return 0;
        }
        self.coeffs
            .iter()
            .rposition(|c| c.norm() > tol * scale)
            .unwrap_or(0)
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_coeff() <= tol
    }

    pub fn eval(&self, t: C64) -> C64 {
        self.coeffs.iter().rev().fold(r(0.0), |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::constant(r(0.0));
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Roots via eigenvalues of the companion matrix, refined by Newton steps.
    /// Leading coefficients below `1e-13` relative are dropped first.
    pub fn roots(&self) -> Vec<C64> {
        let n = self.effective_degree(1e-13);
        if n == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[n];
        let monic: Vec<C64> = self.coeffs[..n].iter().map(|&c| c / lead).collect();
        let roots: Vec<C64> = if n == 1 {
            vec![-monic[0]]
        } else {
            let mut comp = DMatrix::<C64>::zeros(n, n);
            for i in 1..n {
                comp[(i, i - 1)] = r(1.0);
            }
            for (i, &c) in monic.iter().enumerate() {
                comp[(i, n - 1)] = -c;
            }
            comp.schur()
                .eigenvalues()
                .map(|v| v.iter().copied().collect())
                .unwrap_or_default()
        };
        let trimmed = Poly::new(self.coeffs[..=n].to_vec());
        let d = trimmed.derivative();
        roots.into_iter().map(|z| trimmed.polish(&d, z)).collect()
    }

    fn polish(&self, d: &Poly, mut z: C64) -> C64 {
        let mut best = (self.eval(z).norm(), z);
        for _ in 0..8 {
            let dz = d.eval(z);
            if dz.norm() == 0.0 {
                break;
            }
            let step = self.eval(z) / dz;
            // never let a near-multiple root hop to a neighbouring root
            if step.norm() > 1e-4 * (1.0 + z.norm()) {
                break;
            }
            z -= step;
            let v = self.eval(z).norm();
            if !v.is_finite() {
                break;
            }
            if v < best.0 {
                best = (v, z);
            }
        }
        best.1
    }

    /// Roots grouped by proximity, with multiplicities.
    /// An `m`-fold cluster is refined as a simple root of the `(m−1)`-th
    /// derivative.
    pub fn roots_with_multiplicity(&self, cluster_tol: f64) -> Vec<(C64, usize)> {
        cluster(self.roots(), cluster_tol)
            .into_iter()
            .map(|(z, m)| {
                if m == 1 {
                    return (z, m);
                }
                let mut p = self.clone();
                for _ in 1..m {
                    p = p.derivative();
                }
                let d = p.derivative();
                (p.polish(&d, z), m)
            })
            .collect()
    }

    /// Multiplicity of `t0` as a root, judged by vanishing derivatives relative
    /// to the coefficient scale.
    pub fn multiplicity_at(&self, t0: C64, tol: f64) -> usize {
        let scale = self.max_coeff().max(1e-300) * (1.0 + t0.norm()).powi(self.degree() as i32);
        let mut p = self.clone();
        let mut m = 0;
        let mut fact = 1.0;
        while m <= self.degree() {
            if (p.eval(t0) / fact).norm() > tol * scale {
                break;
            }
            m += 1;
            fact *= m as f64;
            p = p.derivative();
        }
        m
    }
}

/// Group nearby values, averaging each group.
pub fn cluster(values: Vec<C64>, tol: f64) -> Vec<(C64, usize)> {
    let mut groups: Vec<(C64, usize)> = Vec::new();
    for z in values {
        if let Some(g) = groups
            .iter_mut()
            .find(|(c, _)| (c - z).norm() <= tol * (1.0 + c.norm()))
        {
            let k = g.1 as f64;
            g.0 = (g.0 * k + z) / (k + 1.0);
            g.1 += 1;
        } else {
            groups.push((z, 1));
        }
    }
    groups
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or_default()
                        + rhs.coeffs.get(k).copied().unwrap_or_default()
                })
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(r(-1.0))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![r(0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proj_geom::I;

    #[test]
    fn quadratic_roots() {
        // s² - 2s - 3 = (s - 3)(s + 1)
        let p = Poly::from_real(&[-3.0, -2.0, 1.0]);
        let mut roots = p.roots();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((roots[0] - r(-1.0)).norm() < 1e-12);
        assert!((roots[1] - r(3.0)).norm() < 1e-12);
    }

    #[test]
    fn complex_roots_of_unity() {
        let p = Poly::from_real(&[-1.0, 0.0, 0.0, 0.0, 1.0]);
        let roots = p.roots();
        assert_eq!(roots.len(), 4);
        for z in [r(1.0), r(-1.0), I, -I] {
            assert!(roots.iter().any(|w| (w - z).norm() < 1e-12));
        }
    }

    #[test]
    fn multiple_root_is_clustered() {
        // (t - 2)³ (t + 1)
        let a = Poly::new(vec![r(-2.0), r(1.0)]);
        let b = Poly::new(vec![r(1.0), r(1.0)]);
        let p = &(&(&a * &a) * &a) * &b;
        let groups = p.roots_with_multiplicity(1e-4);
        assert_eq!(groups.len(), 2);
        assert!(groups.iter().any(|(z, m)| *m == 3 && (z - r(2.0)).norm() < 1e-4));
        assert_eq!(p.multiplicity_at(r(2.0), 1e-10), 3);
        assert_eq!(p.multiplicity_at(r(-1.0), 1e-10), 1);
        assert_eq!(p.multiplicity_at(r(0.5), 1e-10), 0);
    }

    #[test]
    fn degree_drops_vanishing_leading_terms() {
        let p = Poly::new(vec![r(1.0), r(2.0), r(1e-17)]);
        assert_eq!(p.effective_degree(1e-13), 1);
        assert_eq!(p.roots().len(), 1);
    }
}
