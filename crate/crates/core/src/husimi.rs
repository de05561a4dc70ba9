//! Closed-form one-site and two-site Husimi marginals, for finite rings and
//! in the thermodynamic limit.
//!
//! Integrating the full Husimi density over every site but one (or two)
//! leaves multilinear polynomials in the remaining cosines:
//!
//! ```text
//! mu(u)        = (1 + m u) / 2,                       m = -<S_z>
//! mu(u_i, u_j) = (1 + m (u_i + u_j) + c u_i u_j) / 4, c = <S_i S_j>
//! ```
//!
//! Note the double negative: `<S_z>` is negative for `B > 0`, so the slope
//! `m` is positive and the density peaks at `u = 1`, i.e. `theta = 0`,
//! which is the spin-down state.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::quadrature::PhaseDensity;
use crate::transfer::{self, spectral};

/// One-site marginal `mu(u) = (1 + slope * u) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalDensity {
    pub slope: f64,
}

impl MarginalDensity {
    pub fn at(&self, u: f64) -> f64 {
        0.5 * (1.0 + self.slope * u)
    }

    /// `|slope| <= 1`, which keeps the density nonnegative on `[-1, 1]`.
    pub fn is_valid(&self) -> bool {
        self.slope.abs() <= 1.0 + 1e-15
    }
}

impl PhaseDensity for MarginalDensity {
    fn dimension(&self) -> usize {
        1
    }

    fn density(&self, u: &[f64]) -> f64 {
        self.at(u[0])
    }
}

/// Two-site marginal `mu(u_i, u_j) = (1 + slope (u_i + u_j) + pair_coeff u_i u_j) / 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDensity {
    pub slope: f64,
    pub pair_coeff: f64,
}

impl JointDensity {
    pub fn at(&self, ui: f64, uj: f64) -> f64 {
        0.25 * (1.0 + self.slope * (ui + uj) + self.pair_coeff * ui * uj)
    }

    /// Nonnegativity on `[-1, 1]^2`, checked at the corners.
    pub fn is_valid(&self) -> bool {
        [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]
            .iter()
            .all(|&(a, b)| self.at(a, b) >= -1e-15)
    }

    /// Integrates out the second site.
    pub fn marginal(&self) -> MarginalDensity {
        MarginalDensity { slope: self.slope }
    }
}

impl PhaseDensity for JointDensity {
    fn dimension(&self) -> usize {
        2
    }

    fn density(&self, u: &[f64]) -> f64 {
        self.at(u[0], u[1])
    }
}

/// One-site Husimi marginal of a ring of `N` sites.
pub fn one_point(params: &ModelParams) -> MarginalDensity {
    MarginalDensity {
        slope: -transfer::magnetization(params),
    }
}

/// Two-site Husimi marginal for sites `1 <= i < j <= N`.
pub fn joint(params: &ModelParams, i: usize, j: usize) -> Result<JointDensity> {
    let pair_coeff = transfer::two_point(params, i, j)?;
    Ok(JointDensity {
        slope: -transfer::magnetization(params),
        pair_coeff,
    })
}

/// `N -> infinity` limit of [`one_point`]: slope `cos 2w`.
pub fn one_point_thermo(params: &ModelParams) -> MarginalDensity {
    MarginalDensity {
        slope: spectral(params).cos2w,
    }
}

/// `N -> infinity` limit of [`joint`] for sites `d` apart:
/// `pair_coeff = cos^2 2w + r^d sin^2 2w`.
pub fn joint_thermo(params: &ModelParams, d: u64) -> Result<JointDensity> {
    if d == 0 {
        return Err(Error::ZeroDistance);
    }
    let s = spectral(params);
    Ok(JointDensity {
        slope: s.cos2w,
        pair_coeff: s.cos2w * s.cos2w + s.ratio_pow(d) * s.sin2w * s.sin2w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(j: f64, b: f64, beta: f64, n: usize) -> ModelParams {
        ModelParams::new(j, b, beta, n).unwrap()
    }

    #[test]
    fn one_point_limits() {
        let hot = one_point(&p(1.0, 1.0, 1e-9, 10));
        assert!(hot.slope.abs() < 1e-8);
        let cold = one_point(&p(1.0, 1.0, 100.0, 10));
        assert!((cold.slope - 1.0).abs() < 1e-8);
        assert!((cold.at(1.0) - 1.0).abs() < 1e-8);
        assert!(cold.at(-1.0).abs() < 1e-8);
        assert_eq!(one_point(&p(0.7, 0.0, 2.0, 10)).slope, 0.0);
    }

    #[test]
    fn joint_limits() {
        let hot = joint(&p(1.0, 1.0, 0.0, 6), 2, 5).unwrap();
        for &(a, b) in &[(-1.0, 0.3), (0.9, 0.9), (0.0, -1.0)] {
            assert_eq!(hot.at(a, b), 0.25);
        }
        let cold = joint(&p(1.0, 1.0, 100.0, 6), 2, 5).unwrap();
        for &(a, b) in &[(-1.0, 0.3), (0.9, 0.9), (0.0, -1.0), (1.0, 1.0)] {
            let target = 0.25 * (1.0 + a) * (1.0 + b);
            assert!((cold.at(a, b) - target).abs() < 1e-8);
        }
        assert!(joint(&p(1.0, 1.0, 1.0, 6), 3, 3).is_err());
    }

    #[test]
    fn thermo_forms() {
        assert_eq!(one_point_thermo(&p(1.0, 0.0, 1.0, 2)).slope, 0.0);
        for &beta in &[0.1, 1.0, 3.0] {
            let params = p(0.8, 0.6, beta, 2);
            let x: f64 = 0.6 * beta;
            let expected = 1.0 / (1.0 + (-4.0 * beta * 0.8f64).exp() / x.sinh().powi(2)).sqrt();
            assert!((one_point_thermo(&params).slope - expected).abs() < 1e-14);
        }
        let hot = joint_thermo(&p(1.0, 0.4, 0.0, 2), 3).unwrap();
        assert_eq!((hot.slope, hot.pair_coeff), (0.0, 0.0));
        assert_eq!(
            joint_thermo(&p(1.0, 0.4, 1.0, 2), 0),
            Err(Error::ZeroDistance)
        );
    }

    #[test]
    fn clustering_at_large_distance() {
        let j = joint_thermo(&p(1.0, 0.3, 1.0, 2), 10_000).unwrap();
        assert!((j.pair_coeff - j.slope * j.slope).abs() < 1e-15);
        let prod = j.marginal().at(0.4) * j.marginal().at(-0.7);
        assert!((j.at(0.4, -0.7) - prod).abs() < 1e-15);
    }

    #[test]
    fn finite_ring_converges_to_thermo() {
        let base = p(1.0, 0.5, 1.0, 2);
        let thermo = one_point_thermo(&base).slope;
        let r = spectral(&base).ratio.abs();
        for n in [10usize, 50, 200, 400] {
            let finite = one_point(&base.with_sites(n).unwrap()).slope;
            assert!((finite - thermo).abs() <= 2.0 * r.powi(n as i32) + 1e-16);
        }
    }

    #[test]
    fn validity_checks() {
        assert!(MarginalDensity { slope: 1.0 }.is_valid());
        assert!(!MarginalDensity { slope: 1.1 }.is_valid());
        assert!(!JointDensity {
            slope: 0.9,
            pair_coeff: -1.0
        }
        .is_valid());
    }
}
