//! Brute-force reference values by explicit summation over all `2^N`
//! basis states.
//!
//! Configurations are enumerated as bitmasks `0..2^N` (bit `k` is site
//! `k + 1`, a set bit is spin `+1`). Boltzmann sums are accumulated after
//! subtracting the largest exponent so that large `beta * J * N` does not
//! overflow.

use crate::error::{Error, Result};
use crate::model::{site_weight, ModelParams, PhasePoint};
use crate::quadrature::PhaseDensity;

/// Largest chain the oracle is willing to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimit {
    max_sites: usize,
}

impl Default for OracleLimit {
    fn default() -> Self {
        Self { max_sites: 20 }
    }
}

impl OracleLimit {
    pub fn new(max_sites: usize) -> Result<Self> {
        if (2..=30).contains(&max_sites) {
            Ok(Self { max_sites })
        } else {
            Err(Error::InvalidCap(max_sites))
        }
    }

    pub fn max_sites(&self) -> usize {
        self.max_sites
    }

    fn check(&self, params: &ModelParams) -> Result<()> {
        if params.sites() > self.max_sites {
            Err(Error::EnumerationRefused {
                sites: params.sites(),
                cap: self.max_sites,
            })
        } else {
            Ok(())
        }
    }

    /// `log Z` by direct summation of `exp(-beta E)`.
    pub fn log_partition(&self, params: &ModelParams) -> Result<f64> {
        self.check(params)?;
        let table = BoltzmannTable::new(params);
        Ok(table.log_max + table.total.ln())
    }

    /// Thermal average of `prod_{m in sites} i_m` (1-based site indices).
    pub fn correlator(&self, params: &ModelParams, sites: &[usize]) -> Result<f64> {
        self.check(params)?;
        let subset = site_mask(params, sites)?;
        let table = BoltzmannTable::new(params);
        let full = table.full_mask();
        let acc: f64 = table
            .weights
            .iter()
            .enumerate()
            .map(|(mask, &w)| parity_sign(!(mask as u64) & full & subset) * w)
            .sum();
        Ok(acc / table.total)
    }

    /// Husimi density from its definition: the Boltzmann average of
    /// `|<z|i>|^2`.
    pub fn husimi(&self, params: &ModelParams, point: &PhasePoint) -> Result<f64> {
        self.check(params)?;
        check_point(params, point)?;
        let table = BoltzmannTable::new(params);
        let per_site: Vec<(f64, f64)> = point
            .angles()
            .iter()
            .map(|&(theta, _)| (site_weight(theta, true), site_weight(theta, false)))
            .collect();
        let acc: f64 = table
            .weights
            .iter()
            .enumerate()
            .map(|(mask, &w)| {
                let overlap: f64 = per_site
                    .iter()
                    .enumerate()
                    .map(|(k, &(up, down))| if mask >> k & 1 == 1 { up } else { down })
                    .product();
                w * overlap
            })
            .sum();
        Ok(acc / table.total)
    }

    /// Husimi density from the correlator expansion
    /// `2^-N sum_S (-1)^{|S|} <prod_S S_z> prod_S u`, over all `2^N` site
    /// subsets. Costs `4^N`.
    pub fn husimi_expansion(&self, params: &ModelParams, point: &PhasePoint) -> Result<f64> {
        self.check(params)?;
        check_point(params, point)?;
        let correlators = self.all_correlators(params)?;
        Ok(expansion_from_correlators(&correlators, &point.cosines()))
    }

    /// Correlators for every site subset, indexed by subset bitmask. Entry 0
    /// (the empty product) is 1.
    pub fn all_correlators(&self, params: &ModelParams) -> Result<Vec<f64>> {
        self.check(params)?;
        let table = BoltzmannTable::new(params);
        let full = table.full_mask();
        let probs: Vec<f64> = table.weights.iter().map(|w| w / table.total).collect();
        Ok((0..=full)
            .map(|subset| {
                probs
                    .iter()
                    .enumerate()
                    .map(|(mask, &p)| parity_sign(!(mask as u64) & full & subset) * p)
                    .sum()
            })
            .collect())
    }
}

/// Evaluates the alternating-sign subset expansion for given correlators
/// (indexed by subset bitmask) at cosines `u`.
pub fn expansion_from_correlators(correlators: &[f64], u: &[f64]) -> f64 {
    let n = u.len();
    debug_assert_eq!(correlators.len(), 1 << n);
    let sum: f64 = correlators
        .iter()
        .enumerate()
        .map(|(subset, &c)| {
            let monomial: f64 = (0..n)
                .filter(|k| subset >> k & 1 == 1)
                .map(|k| -u[k])
                .product();
            c * monomial
        })
        .sum();
    sum / (1u64 << n) as f64
}

pub fn log_partition_brute(params: &ModelParams) -> Result<f64> {
    OracleLimit::default().log_partition(params)
}

pub fn correlator_brute(params: &ModelParams, sites: &[usize]) -> Result<f64> {
    OracleLimit::default().correlator(params, sites)
}

pub fn husimi_brute(params: &ModelParams, point: &PhasePoint) -> Result<f64> {
    OracleLimit::default().husimi(params, point)
}

pub fn husimi_expansion(params: &ModelParams, point: &PhasePoint) -> Result<f64> {
    OracleLimit::default().husimi_expansion(params, point)
}

/// The full `N`-site Husimi density as a function of the cosines `u_k`,
/// evaluated by enumeration. Used for quadrature marginals.
#[derive(Debug, Clone)]
pub struct ExactHusimi {
    sites: usize,
    probs: Vec<f64>,
}

impl ExactHusimi {
    pub fn new(params: &ModelParams, limit: OracleLimit) -> Result<Self> {
        limit.check(params)?;
        let table = BoltzmannTable::new(params);
        let probs = table.weights.iter().map(|w| w / table.total).collect();
        Ok(Self {
            sites: params.sites(),
            probs,
        })
    }
}

impl PhaseDensity for ExactHusimi {
    fn dimension(&self) -> usize {
        self.sites
    }

    fn density(&self, u: &[f64]) -> f64 {
        assert_eq!(u.len(), self.sites, "cosine vector length");
        // sin^2(theta/2) = (1 - u)/2, cos^2(theta/2) = (1 + u)/2
        let per_site: Vec<(f64, f64)> = u
            .iter()
            .map(|&x| (0.5 * (1.0 - x), 0.5 * (1.0 + x)))
            .collect();
        self.probs
            .iter()
            .enumerate()
            .map(|(mask, &p)| {
                p * per_site
                    .iter()
                    .enumerate()
                    .map(|(k, &(up, down))| if mask >> k & 1 == 1 { up } else { down })
                    .product::<f64>()
            })
            .sum()
    }
}

struct BoltzmannTable {
    sites: usize,
    log_max: f64,
    weights: Vec<f64>,
    total: f64,
}

impl BoltzmannTable {
    fn new(params: &ModelParams) -> Self {
        let n = params.sites();
        let beta = params.beta();
        let log_weights: Vec<f64> = (0..1u64 << n)
            .map(|mask| -beta * mask_energy(mask, n, params.coupling(), params.field()))
            .collect();
        let log_max = log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = log_weights.iter().map(|l| (l - log_max).exp()).collect();
        let total = weights.iter().sum();
        Self {
            sites: n,
            log_max,
            weights,
            total,
        }
    }

    fn full_mask(&self) -> u64 {
        (1u64 << self.sites) - 1
    }
}

fn mask_energy(mask: u64, n: usize, coupling: f64, field: f64) -> f64 {
    let full = (1u64 << n) - 1;
    let shifted = ((mask >> 1) | (mask << (n - 1))) & full;
    let broken = (mask ^ shifted).count_ones() as i64;
    let bonds = n as i64 - 2 * broken;
    let magnet = 2 * mask.count_ones() as i64 - n as i64;
    -coupling * bonds as f64 + field * magnet as f64
}

#[inline]
fn parity_sign(bits: u64) -> f64 {
    if bits.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn site_mask(params: &ModelParams, sites: &[usize]) -> Result<u64> {
    if sites.is_empty() {
        return Err(Error::EmptySites);
    }
    let mut mask = 0u64;
    for &s in sites {
        params.check_site(s)?;
        let bit = 1u64 << (s - 1);
        if mask & bit != 0 {
            return Err(Error::SitesNotOrdered(sites.to_vec()));
        }
        mask |= bit;
    }
    Ok(mask)
}

fn check_point(params: &ModelParams, point: &PhasePoint) -> Result<()> {
    if point.len() != params.sites() {
        return Err(Error::LengthMismatch {
            expected: params.sites(),
            actual: point.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{energy, SpinConfiguration};
    use std::f64::consts::{FRAC_PI_2, LN_2};

    fn p(j: f64, b: f64, beta: f64, n: usize) -> ModelParams {
        ModelParams::new(j, b, beta, n).unwrap()
    }

    #[test]
    fn mask_energy_matches_energy() {
        let params = p(0.7, -1.3, 1.0, 5);
        for mask in 0..32 {
            let c = SpinConfiguration::from_bitmask(mask, 5);
            let e = energy(&c, &params).unwrap();
            assert!((mask_energy(mask, 5, 0.7, -1.3) - e).abs() < 1e-14);
        }
    }

    #[test]
    fn infinite_temperature_partition() {
        for n in 2..10 {
            let z = log_partition_brute(&p(1.3, -0.4, 0.0, n)).unwrap();
            assert!((z - n as f64 * LN_2).abs() < 1e-13);
        }
    }

    #[test]
    fn two_site_partition_by_hand() {
        let e = std::f64::consts::E;
        let expected = (e + e.powi(3) + 2.0 * e.powi(-2)).ln();
        let z = log_partition_brute(&p(1.0, 0.5, 1.0, 2)).unwrap();
        assert!((z - expected).abs() < 1e-14);
    }

    #[test]
    fn large_beta_does_not_overflow() {
        let z = log_partition_brute(&p(3.0, 1.0, 500.0, 10)).unwrap();
        assert!(z.is_finite());
        // ground state all-down: E = -3*10 - 10 = -40
        assert!((z - 500.0 * 40.0).abs() < 1e-9 * z);
    }

    #[test]
    fn correlator_symmetry_cases() {
        let zero_field = p(0.8, 0.0, 1.7, 6);
        for k in 1..=6 {
            assert!(correlator_brute(&zero_field, &[k]).unwrap().abs() < 1e-15);
        }
        let hot = p(0.8, 0.9, 0.0, 6);
        assert!(correlator_brute(&hot, &[2, 5]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn zero_field_pair_correlator_on_ring() {
        // frozen from an independent numpy enumeration: N=8, J=1, B=0, beta=0.5
        let expected = [
            0.465_649_250_982_361_2,
            0.222_827_794_412_347_43,
            0.119_512_262_324_444_99,
            0.091_019_840_551_349_62,
        ];
        let params = p(1.0, 0.0, 0.5, 8);
        let r = 0.5f64.tanh();
        for (d, &e) in (1..=4).zip(expected.iter()) {
            let c = correlator_brute(&params, &[1, 1 + d]).unwrap();
            assert!((c - e).abs() < 1e-14, "d={d}: {c} vs {e}");
            let closed = (r.powi(d as i32) + r.powi(8 - d as i32)) / (1.0 + r.powi(8));
            assert!((c - closed).abs() < 1e-14);
        }
    }

    #[test]
    fn correlator_errors() {
        let params = p(1.0, 0.0, 1.0, 4);
        assert_eq!(correlator_brute(&params, &[]), Err(Error::EmptySites));
        assert_eq!(
            correlator_brute(&params, &[0]),
            Err(Error::SiteOutOfRange { index: 0, sites: 4 })
        );
        assert_eq!(
            correlator_brute(&params, &[5]),
            Err(Error::SiteOutOfRange { index: 5, sites: 4 })
        );
        assert!(matches!(
            correlator_brute(&params, &[2, 2]),
            Err(Error::SitesNotOrdered(_))
        ));
    }

    #[test]
    fn cap_is_enforced() {
        let limit = OracleLimit::new(6).unwrap();
        assert_eq!(
            limit.log_partition(&p(1.0, 0.0, 1.0, 7)),
            Err(Error::EnumerationRefused { sites: 7, cap: 6 })
        );
        assert_eq!(OracleLimit::new(1), Err(Error::InvalidCap(1)));
        assert_eq!(OracleLimit::new(31), Err(Error::InvalidCap(31)));
        assert_eq!(OracleLimit::default().max_sites(), 20);
    }

    #[test]
    fn husimi_brute_examples() {
        let hot = p(1.1, 0.3, 0.0, 5);
        let point = PhasePoint::new(vec![
            (0.3, 1.0),
            (1.2, 0.0),
            (2.9, 3.0),
            (0.0, 0.5),
            (3.1, 6.0),
        ])
        .unwrap();
        assert!((husimi_brute(&hot, &point).unwrap() - 1.0 / 32.0).abs() < 1e-16);

        let params = p(1.0, 0.5, 1.3, 4);
        let north = PhasePoint::new(vec![(0.0, 0.0); 4]).unwrap();
        let down = SpinConfiguration::uniform(4, false);
        let expected =
            (-1.3 * energy(&down, &params).unwrap() - log_partition_brute(&params).unwrap()).exp();
        assert!((husimi_brute(&params, &north).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn expansion_examples() {
        let params = p(0.9, -0.7, 1.1, 5);
        let equator = PhasePoint::new(vec![(FRAC_PI_2, 0.0); 5]).unwrap();
        assert!((husimi_expansion(&params, &equator).unwrap() - 1.0 / 32.0).abs() < 1e-16);

        let params = p(0.9, 0.0, 1.1, 2);
        let point = PhasePoint::new(vec![(0.4, 0.0), (2.0, 0.0)]).unwrap();
        let u = point.cosines();
        let pair = correlator_brute(&params, &[1, 2]).unwrap();
        let expected = 0.25 * (1.0 + pair * u[0] * u[1]);
        assert!((husimi_expansion(&params, &point).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn expansion_with_zero_correlators_is_uniform() {
        let mut corr = vec![0.0; 16];
        corr[0] = 1.0;
        assert_eq!(
            expansion_from_correlators(&corr, &[0.3, -0.9, 1.0, 0.2]),
            1.0 / 16.0
        );
    }

    #[test]
    fn exact_density_matches_point_evaluation() {
        let params = p(-0.6, 0.8, 1.4, 4);
        let dens = ExactHusimi::new(&params, OracleLimit::default()).unwrap();
        let u = [0.2, -0.7, 0.9, -0.1];
        let point = PhasePoint::from_cosines(&u).unwrap();
        assert!((dens.density(&u) - husimi_brute(&params, &point).unwrap()).abs() < 1e-15);
    }
}
