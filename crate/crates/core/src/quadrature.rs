//! Gauss-Legendre product quadrature over `[-1, 1]^d` and recovery of spin
//! correlators from moments of a Husimi density.
//!
//! Densities are functions of the cosines `u_k = cos(theta_k)` with the
//! measure `prod du_k` on `[-1, 1]`. Since `int u (1 -+ u)/2 du = -+1/3` and a
//! spin-up label carries the weight `(1 - u)/2`, each correlator factor
//! `S_k` corresponds to `-3 u_k`:
//!
//! ```text
//! <S_{r1} ... S_{rm}> = (-3)^m int mu(u) u_{r1} ... u_{rm} prod du
//! ```
//!
//! The Husimi densities here are multilinear in the `u_k`, so a 2-node rule
//! already integrates these moments exactly.

use crate::error::{Error, Result};

/// A density on `[-1, 1]^d` parameterized by the site cosines.
pub trait PhaseDensity {
    fn dimension(&self) -> usize;
    fn density(&self, u: &[f64]) -> f64;
}

impl<D: PhaseDensity + ?Sized> PhaseDensity for &D {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn density(&self, u: &[f64]) -> f64 {
        (**self).density(u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// One-dimensional integral of `f` over `[-1, 1]`.
    pub fn integrate_1d(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss-Legendre rule with `n` nodes on `[-1, 1]`, `1 <= n <= 64`.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    match n {
        1 => Ok(QuadratureRule {
            nodes: vec![0.0],
            weights: vec![2.0],
        }),
        2 => {
            let x = 1.0 / 3f64.sqrt();
            Ok(QuadratureRule {
                nodes: vec![-x, x],
                weights: vec![1.0, 1.0],
            })
        }
        3..=64 => Ok(newton_legendre(n)),
        _ => Err(Error::InvalidNodeCount(n)),
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn newton_legendre(n: usize) -> QuadratureRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule { nodes, weights }
}

/// Tensor-product integral of `f` over `[-1, 1]^dim`.
pub fn integrate_product(dim: usize, rule: &QuadratureRule, f: impl Fn(&[f64]) -> f64) -> f64 {
    let m = rule.len();
    let mut idx = vec![0usize; dim];
    let mut point: Vec<f64> = vec![rule.nodes[0]; dim];
    let mut total = 0.0;
    loop {
        let w: f64 = idx.iter().map(|&i| rule.weights[i]).product();
        total += w * f(&point);
        // odometer increment
        let mut k = 0;
        loop {
            if k == dim {
                return total;
            }
            idx[k] += 1;
            if idx[k] < m {
                point[k] = rule.nodes[idx[k]];
                break;
            }
            idx[k] = 0;
            point[k] = rule.nodes[0];
            k += 1;
        }
    }
}

/// Total mass of a density.
pub fn integrate<D: PhaseDensity>(density: &D, rule: &QuadratureRule) -> f64 {
    integrate_product(density.dimension(), rule, |u| density.density(u))
}

/// `int mu(u) prod_{k in coords} u_k`, with zero-based coordinate indices.
pub fn product_moment<D: PhaseDensity>(
    density: &D,
    coords: &[usize],
    rule: &QuadratureRule,
) -> f64 {
    integrate_product(density.dimension(), rule, |u| {
        density.density(u) * coords.iter().map(|&k| u[k]).product::<f64>()
    })
}

/// Recovers `<S_{r1} ... S_{rm}>` from a density over exactly those `m`
/// sites, as `(-3)^m` times the quadrature estimate of `<u_{r1} ... u_{rm}>`.
///
/// `sites` labels the density's coordinates in order and must be distinct.
pub fn extract_correlator<D: PhaseDensity>(
    density: &D,
    sites: &[usize],
    rule: &QuadratureRule,
) -> Result<f64> {
    if sites.len() != density.dimension() {
        return Err(Error::LengthMismatch {
            expected: density.dimension(),
            actual: sites.len(),
        });
    }
    check_distinct(sites)?;
    if rule.len() < 2 {
        return Err(Error::RuleTooCoarse(rule.len()));
    }
    let coords: Vec<usize> = (0..sites.len()).collect();
    let m = sites.len() as i32;
    Ok((-3f64).powi(m) * product_moment(density, &coords, rule))
}

fn check_distinct(sites: &[usize]) -> Result<()> {
    let mut sorted = sites.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::SitesNotOrdered(sites.to_vec()));
    }
    Ok(())
}

/// A density integrated over every coordinate except `keep`.
#[derive(Debug, Clone)]
pub struct Marginal<D> {
    inner: D,
    keep: Vec<usize>,
    rule: QuadratureRule,
}

/// Marginalizes `density` onto the (1-based, distinct) sites `keep`,
/// integrating the remaining coordinates with `rule`.
pub fn marginalize<D: PhaseDensity>(
    density: D,
    keep: &[usize],
    rule: QuadratureRule,
) -> Result<Marginal<D>> {
    if keep.is_empty() {
        return Err(Error::EmptySites);
    }
    for &s in keep {
        if s == 0 || s > density.dimension() {
            return Err(Error::SiteOutOfRange {
                index: s,
                sites: density.dimension(),
            });
        }
    }
    check_distinct(keep)?;
    Ok(Marginal {
        inner: density,
        keep: keep.iter().map(|s| s - 1).collect(),
        rule,
    })
}

impl<D: PhaseDensity> PhaseDensity for Marginal<D> {
    fn dimension(&self) -> usize {
        self.keep.len()
    }

    fn density(&self, u: &[f64]) -> f64 {
        assert_eq!(u.len(), self.keep.len(), "marginal coordinate count");
        let full = self.inner.dimension();
        let free: Vec<usize> = (0..full).filter(|k| !self.keep.contains(k)).collect();
        let mut point = vec![0.0; full];
        for (&k, &x) in self.keep.iter().zip(u) {
            point[k] = x;
        }
        integrate_product(free.len(), &self.rule, |v| {
            let mut point = point.clone();
            for (&k, &x) in free.iter().zip(v) {
                point[k] = x;
            }
            self.inner.density(&point)
        })
    }
}
