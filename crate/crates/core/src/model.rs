//! Model parameters, spin configurations and spin-1/2 coherent-state overlaps.
//!
//! Spin labels follow the eigenvalue convention `S_z |i> = i |i>` with
//! `i = +1` or `i = -1` (not +-1/2). Every closed form in this crate is
//! written in that convention.
//!
//! The Hamiltonian of the periodic chain is
//!
//! ```text
//! H = -J sum_k S_k S_{k+1} + B sum_k S_k,     S_{N+1} = S_1
//! ```
//!
//! so a positive field `B` lowers the energy of spin `-1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Couplings, inverse temperature and chain length of a periodic Ising ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    coupling: f64,
    field: f64,
    beta: f64,
    sites: usize,
}

impl ModelParams {
    /// `coupling` is J, `field` is B, `beta` the inverse temperature and
    /// `sites` the ring length N (at least 2).
    pub fn new(coupling: f64, field: f64, beta: f64, sites: usize) -> Result<Self> {
        for (name, value) in [("J", coupling), ("B", field), ("beta", beta)] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        if beta < 0.0 {
            return Err(Error::NegativeBeta(beta));
        }
        if sites < 2 {
            return Err(Error::ChainTooShort(sites));
        }
        Ok(Self {
            coupling,
            field,
            beta,
            sites,
        })
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Same parameters with a different chain length.
    pub fn with_sites(&self, sites: usize) -> Result<Self> {
        Self::new(self.coupling, self.field, self.beta, sites)
    }

    /// Same parameters with the field reversed, `B -> -B`.
    pub fn reversed_field(&self) -> Self {
        Self {
            field: -self.field,
            ..*self
        }
    }

    pub(crate) fn check_site(&self, index: usize) -> Result<()> {
        if index == 0 || index > self.sites {
            Err(Error::SiteOutOfRange {
                index,
                sites: self.sites,
            })
        } else {
            Ok(())
        }
    }
}

/// A basis state of the chain: one `+1`/`-1` label per site.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    spins: Vec<i8>,
}

impl SpinConfiguration {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidSpin(bad));
        }
        Ok(Self { spins })
    }

    pub fn uniform(sites: usize, spin_up: bool) -> Self {
        Self {
            spins: vec![if spin_up { 1 } else { -1 }; sites],
        }
    }

    /// Decodes an enumeration index: bit `k` (zero based) is site `k + 1`,
    /// a set bit is spin `+1`.
    pub fn from_bitmask(mask: u64, sites: usize) -> Self {
        let spins = (0..sites)
            .map(|k| if mask >> k & 1 == 1 { 1 } else { -1 })
            .collect();
        Self { spins }
    }

    pub fn to_bitmask(&self) -> u64 {
        self.spins
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 1)
            .fold(0, |acc, (k, _)| acc | 1 << k)
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn flipped(&self) -> Self {
        Self {
            spins: self.spins.iter().map(|s| -s).collect(),
        }
    }

    /// Cyclic shift by `by` sites to the right.
    pub fn rotated(&self, by: usize) -> Self {
        let mut spins = self.spins.clone();
        if !spins.is_empty() {
            let by = by % spins.len();
            spins.rotate_right(by);
        }
        Self { spins }
    }
}

/// Coherent-state parameters `(theta_k, phi_k)` for every site.
///
/// `theta = 0` is the spin-down state `|->`, `theta = pi` is `|+>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    angles: Vec<(f64, f64)>,
}

impl PhasePoint {
    pub fn new(angles: Vec<(f64, f64)>) -> Result<Self> {
        for &(theta, phi) in &angles {
            if !(0.0..=PI).contains(&theta) {
                return Err(Error::AngleOutOfRange {
                    name: "theta",
                    value: theta,
                    lo: 0.0,
                    hi: PI,
                });
            }
            if !(0.0..2.0 * PI).contains(&phi) {
                return Err(Error::AngleOutOfRange {
                    name: "phi",
                    value: phi,
                    lo: 0.0,
                    hi: 2.0 * PI,
                });
            }
        }
        Ok(Self { angles })
    }

    /// Point with `cos(theta_k) = u_k` and all `phi_k = 0`.
    pub fn from_cosines(u: &[f64]) -> Result<Self> {
        let angles = u
            .iter()
            .map(|&uk| {
                if !(-1.0..=1.0).contains(&uk) {
                    Err(Error::AngleOutOfRange {
                        name: "u",
                        value: uk,
                        lo: -1.0,
                        hi: 1.0,
                    })
                } else {
                    Ok((uk.acos(), 0.0))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { angles })
    }

    pub fn angles(&self) -> &[(f64, f64)] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// `u_k = cos(theta_k)` for every site.
    pub fn cosines(&self) -> Vec<f64> {
        self.angles.iter().map(|(theta, _)| theta.cos()).collect()
    }

    pub fn with_phis(&self, phis: &[f64]) -> Result<Self> {
        check_len(self.len(), phis.len())?;
        Self::new(
            self.angles
                .iter()
                .zip(phis)
                .map(|(&(theta, _), &phi)| (theta, phi))
                .collect(),
        )
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

/// Energy of a basis state, `-J sum i_k i_{k+1} + B sum i_k` on the ring.
pub fn energy(config: &SpinConfiguration, params: &ModelParams) -> Result<f64> {
    check_len(params.sites(), config.len())?;
    let s = config.spins();
    let n = s.len();
    let bonds: i64 = (0..n).map(|k| (s[k] * s[(k + 1) % n]) as i64).sum();
    let magnet: i64 = s.iter().map(|&x| x as i64).sum();
    Ok(-params.coupling() * bonds as f64 + params.field() * magnet as f64)
}

/// Per-site probability `|<z_k|i_k>|^2`.
#[inline]
pub(crate) fn site_weight(theta: f64, spin_up: bool) -> f64 {
    let half = 0.5 * theta;
    if spin_up {
        half.sin().powi(2)
    } else {
        half.cos().powi(2)
    }
}

/// `|<z|i>|^2`: product over sites of `sin^2(theta/2)` for spin `+1` and
/// `cos^2(theta/2)` for spin `-1`. Does not depend on any `phi_k`.
pub fn overlap_weight(point: &PhasePoint, config: &SpinConfiguration) -> Result<f64> {
    check_len(point.len(), config.len())?;
    Ok(point
        .angles()
        .iter()
        .zip(config.spins())
        .map(|(&(theta, _), &s)| site_weight(theta, s == 1))
        .product())
}

/// `<z|i>`: product over sites of `sin(theta/2) e^{-i phi}` for spin `+1`
/// and `cos(theta/2)` for spin `-1`.
pub fn overlap_amplitude(point: &PhasePoint, config: &SpinConfiguration) -> Result<Complex64> {
    check_len(point.len(), config.len())?;
    Ok(point
        .angles()
        .iter()
        .zip(config.spins())
        .map(|(&(theta, phi), &s)| site_amplitude(theta, phi, s == 1))
        .product())
}

pub(crate) fn site_amplitude(theta: f64, phi: f64, spin_up: bool) -> Complex64 {
    if spin_up {
        Complex64::from_polar((0.5 * theta).sin(), -phi)
    } else {
        Complex64::new((0.5 * theta).cos(), 0.0)
    }
}
