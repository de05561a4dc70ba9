//! Transfer-matrix spectrum and closed-form observables of the periodic chain.
//!
//! The transfer matrix in the `(+, -)` basis is
//!
//! ```text
//! T = [ e^{b(J-B)}   e^{-bJ}    ]
//!     [ e^{-bJ}      e^{b(J+B)} ]
//! ```
//!
//! with `b = beta`. Its eigenvalues are
//! `lambda_pm = e^{bJ} cosh(bB) +- sqrt(e^{2bJ} sinh^2(bB) + e^{-2bJ})`,
//! which is the form implied by the characteristic polynomial (the
//! discriminant `e^{2bJ} cosh^2(bB) - 2 sinh(2bJ)` rewritten).
//!
//! Powers of the eigenvalues are never formed. Everything is expressed
//! through `log lambda_+`, the ratio `r = lambda_- / lambda_+` and the
//! rotation angle `omega` of the eigenbasis, so chains of length `10^9` are
//! as cheap and as safe as chains of length 2.

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Transfer matrix stored as log-entries; the entries themselves overflow
/// for large `beta * |J +- B|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    /// `beta (J - B)`
    pub log_pp: f64,
    /// `-beta J`, shared by both off-diagonal entries
    pub log_pm: f64,
    /// `beta (J + B)`
    pub log_mm: f64,
}

impl TransferMatrix {
    /// Plain entries `[[t_pp, t_pm], [t_mp, t_mm]]`; infinite where an entry
    /// exceeds `f64::MAX`.
    pub fn entries(&self) -> [[f64; 2]; 2] {
        let off = self.log_pm.exp();
        [[self.log_pp.exp(), off], [off, self.log_mm.exp()]]
    }

    /// Whether every entry is a finite, nonzero double.
    pub fn is_representable(&self) -> bool {
        self.entries()
            .iter()
            .flatten()
            .all(|e| e.is_finite() && *e > 0.0)
    }
}

pub fn build_transfer(params: &ModelParams) -> TransferMatrix {
    let b = params.beta();
    let (j, h) = (params.coupling(), params.field());
    TransferMatrix {
        log_pp: b * (j - h),
        log_pm: -b * j,
        log_mm: b * (j + h),
    }
}

/// Eigen-data of the transfer matrix.
///
/// The eigenvectors are `v_+ = (sin w, cos w)` and `v_- = (-cos w, sin w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralData {
    pub log_lambda_plus: f64,
    /// `lambda_- / lambda_+`, in `(-1, 1)`; negative for antiferromagnetic `J`.
    /// Rounds to `+-1` when `beta |J|` exceeds roughly 18.
    pub ratio: f64,
    /// `ln |ratio|`, accurate also when `|ratio|` is within rounding of 1;
    /// `-inf` when the ratio vanishes.
    pub log_abs_ratio: f64,
    pub cos2w: f64,
    pub sin2w: f64,
    pub omega: f64,
}

impl SpectralData {
    pub fn lambda_plus(&self) -> f64 {
        self.log_lambda_plus.exp()
    }

    pub fn lambda_minus(&self) -> f64 {
        self.ratio * self.lambda_plus()
    }

    fn negative_power(&self, n: u64) -> bool {
        self.ratio < 0.0 && n % 2 == 1
    }

    /// `r^n` with `r^0 = 1` even when `r = 0`.
    pub fn ratio_pow(&self, n: u64) -> f64 {
        if n == 0 {
            return 1.0;
        }
        let mag = (n as f64 * self.log_abs_ratio).exp();
        if self.negative_power(n) {
            -mag
        } else {
            mag
        }
    }

    /// `1 + r^n` without cancellation when `r^n` is close to `-1`.
    pub fn one_plus_ratio_pow(&self, n: u64) -> f64 {
        if n == 0 {
            2.0
        } else if self.negative_power(n) {
            -(n as f64 * self.log_abs_ratio).exp_m1()
        } else {
            1.0 + self.ratio_pow(n)
        }
    }

    /// `r^n - 1` without cancellation when `r^n` is close to `1`.
    pub fn ratio_pow_minus_one(&self, n: u64) -> f64 {
        if n == 0 {
            0.0
        } else if self.negative_power(n) {
            self.ratio_pow(n) - 1.0
        } else {
            (n as f64 * self.log_abs_ratio).exp_m1()
        }
    }

    /// `r^a + r^b`, cancellation-free when the two terms have opposite signs.
    pub fn ratio_pow_sum(&self, a: u64, b: u64) -> f64 {
        if self.negative_power(a) == self.negative_power(b) {
            return self.ratio_pow(a) + self.ratio_pow(b);
        }
        let (lo, hi) = (a.min(b), a.max(b));
        // |r|^lo (1 - |r|^(hi - lo)), signed by the lower power
        let diff = -((hi - lo) as f64 * self.log_abs_ratio).exp_m1();
        let mag = (lo as f64 * self.log_abs_ratio).exp() * diff;
        if self.negative_power(lo) {
            -mag
        } else {
            mag
        }
    }

    pub fn eigenvectors(&self) -> ([f64; 2], [f64; 2]) {
        let (s, c) = self.omega.sin_cos();
        ([s, c], [-c, s])
    }
}

/// `ln(2 sinh|x|)` without overflow; `-inf` at `x = 0`.
fn ln_two_sinh_abs(x: f64) -> f64 {
    let a = x.abs();
    a + (-(-2.0 * a).exp_m1()).ln()
}

pub fn spectral(params: &ModelParams) -> SpectralData {
    let b = params.beta();
    let (j, h) = (params.coupling(), params.field());

    // cos 2w = a / sqrt(a^2 + c^2), sin 2w = c / sqrt(a^2 + c^2) with
    // a = e^{bJ} sinh(bB) and c = e^{-bJ}. Evaluated through
    // log|c/a| = -2bJ - ln|sinh bB|, which is +inf at B = 0 or beta = 0.
    let log_tan2w = -2.0 * b * j - (ln_two_sinh_abs(b * h) - std::f64::consts::LN_2);
    let sign = if h > 0.0 {
        1.0
    } else if h < 0.0 {
        -1.0
    } else {
        0.0
    };
    let (cos2w, sin2w) = if log_tan2w > 0.0 {
        let t = (-log_tan2w).exp();
        let norm = t.hypot(1.0);
        (sign * t / norm, 1.0 / norm)
    } else {
        let t = log_tan2w.exp();
        let norm = t.hypot(1.0);
        (sign / norm, t / norm)
    };

    // lambda_+ of the matrix rescaled by e^{-m}, m the largest log-entry.
    let tm = build_transfer(params);
    let m = tm.log_pp.max(tm.log_mm).max(tm.log_pm);
    let pp = (tm.log_pp - m).exp();
    let mm = (tm.log_mm - m).exp();
    let off = (tm.log_pm - m).exp();
    let half_diff = if h == 0.0 || b == 0.0 {
        0.0
    } else {
        // (t_mm - t_pp)/2 = e^{bJ} sinh(bB)
        sign * (b * j + b * h.abs() - m).exp() * 0.5 * -(-2.0 * b * h.abs()).exp_m1()
    };
    let scaled_plus = 0.5 * (pp + mm) + half_diff.hypot(off);
    let log_lambda_plus = m + scaled_plus.ln();

    // lambda_- = det T / lambda_+, det T = 2 sinh(2bJ). Near |r| = 1 the
    // gap 1 - |r| is formed directly: it is trace/lambda_+ when lambda_- < 0
    // and (lambda_+ - lambda_-)/lambda_+ = 2 sqrt(..)/lambda_+ otherwise.
    let (ratio, log_abs_ratio) = if j == 0.0 || b == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        let log_det = ln_two_sinh_abs(2.0 * b * j);
        let log_abs = log_det - 2.0 * log_lambda_plus;
        if log_abs < -std::f64::consts::LN_2 {
            (j.signum() * log_abs.exp(), log_abs)
        } else {
            let gap = if j < 0.0 {
                (pp + mm) / scaled_plus
            } else {
                2.0 * half_diff.hypot(off) / scaled_plus
            };
            let log_abs = (-gap).ln_1p();
            (j.signum() * log_abs.exp(), log_abs)
        }
    };

    let omega = 0.5 * sin2w.atan2(cos2w);
    SpectralData {
        log_lambda_plus,
        ratio,
        log_abs_ratio,
        cos2w,
        sin2w,
        omega,
    }
}

/// `log Z = N log lambda_+ + log(1 + r^N)`.
pub fn log_partition(params: &ModelParams) -> f64 {
    let s = spectral(params);
    let n = params.sites() as u64;
    n as f64 * s.log_lambda_plus + s.one_plus_ratio_pow(n).ln()
}

/// `<S_z> = cos 2w (r^N - 1) / (r^N + 1)`; the same at every site.
pub fn magnetization(params: &ModelParams) -> f64 {
    let s = spectral(params);
    let n = params.sites() as u64;
    s.cos2w * s.ratio_pow_minus_one(n) / s.one_plus_ratio_pow(n)
}

/// `<S_i S_j>` for `1 <= i < j <= N`.
pub fn two_point(params: &ModelParams, i: usize, j: usize) -> Result<f64> {
    params.check_site(i)?;
    params.check_site(j)?;
    if i >= j {
        return Err(Error::SitesNotOrdered(vec![i, j]));
    }
    Ok(two_point_at_distance(
        &spectral(params),
        params.sites() as u64,
        (j - i) as u64,
    ))
}

pub(crate) fn two_point_at_distance(s: &SpectralData, n: u64, d: u64) -> f64 {
    let c2 = s.cos2w * s.cos2w;
    let s2 = s.sin2w * s.sin2w;
    c2 + s2 * s.ratio_pow_sum(d, n - d) / s.one_plus_ratio_pow(n)
}

/// `sigma_z` expressed in the eigenbasis `(v_+, v_-)`.
pub fn sigma_z_rotated(spec: &SpectralData) -> [[f64; 2]; 2] {
    let (c, s) = (spec.cos2w, spec.sin2w);
    [[-c, -s], [-s, c]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_4, LN_2};

    fn p(j: f64, b: f64, beta: f64, n: usize) -> ModelParams {
        ModelParams::new(j, b, beta, n).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn transfer_examples() {
        assert_eq!(
            build_transfer(&p(1.7, -0.2, 0.0, 4)).entries(),
            [[1.0, 1.0], [1.0, 1.0]]
        );
        assert_eq!(
            build_transfer(&p(0.0, 1.0, 1.0, 4)).entries(),
            [[E.recip(), 1.0], [1.0, E]]
        );
        assert_eq!(
            build_transfer(&p(1.0, 0.0, 1.0, 4)).entries(),
            [[E, E.recip()], [E.recip(), E]]
        );
        assert!(!build_transfer(&p(1.0, 0.0, 800.0, 4)).is_representable());
    }

    #[test]
    fn zero_field_spectrum() {
        for &(j, beta) in &[(1.0, 0.5), (0.3, 2.0), (-0.8, 1.1)] {
            let s = spectral(&p(j, 0.0, beta, 4));
            let x: f64 = beta * j;
            assert!(close(s.lambda_plus(), 2.0 * x.abs().cosh(), 1e-14));
            assert!(close(s.lambda_minus(), 2.0 * x.sinh(), 1e-14));
            assert!(close(s.ratio, x.tanh(), 1e-14));
            assert_eq!(s.cos2w, 0.0);
            assert_eq!(s.sin2w, 1.0);
            assert!((s.omega - FRAC_PI_4).abs() < 1e-15);
        }
    }

    #[test]
    fn infinite_temperature_spectrum() {
        let s = spectral(&p(1.3, -0.7, 0.0, 4));
        assert!(close(s.lambda_plus(), 2.0, 1e-15));
        assert_eq!(s.ratio, 0.0);
        assert_eq!(s.lambda_minus(), 0.0);
    }

    #[test]
    fn eigendecomposition_reconstructs_matrix() {
        for &(j, h, beta) in &[
            (1.0, 0.5, 1.0),
            (-1.2, 0.3, 2.0),
            (0.4, -1.7, 0.8),
            (2.0, 2.0, 0.1),
        ] {
            let params = p(j, h, beta, 3);
            let s = spectral(&params);
            let t = build_transfer(&params).entries();
            let (vp, vm) = s.eigenvectors();
            let (lp, lm) = (s.lambda_plus(), s.lambda_minus());
            for a in 0..2 {
                for b in 0..2 {
                    let rec = lp * vp[a] * vp[b] + lm * vm[a] * vm[b];
                    assert!(
                        (rec - t[a][b]).abs() <= 1e-12 * t[a][b].abs(),
                        "{a}{b}: {rec} vs {}",
                        t[a][b]
                    );
                }
            }
        }
    }

    #[test]
    fn spectral_is_finite_at_extremes() {
        for &(j, h, beta) in &[
            (1.0, 1.0, 1000.0),
            (-3.0, 0.1, 400.0),
            (5.0, 0.0, 300.0),
            (0.0, 4.0, 300.0),
        ] {
            let s = spectral(&p(j, h, beta, 10));
            assert!(s.log_lambda_plus.is_finite());
            // the gap closes below double precision once beta|J| is large
            assert!(s.ratio.abs() <= 1.0);
            assert!((s.cos2w.powi(2) + s.sin2w.powi(2) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn log_partition_examples() {
        for n in [2, 7, 100] {
            assert!((log_partition(&p(0.9, 0.4, 0.0, n)) - n as f64 * LN_2).abs() < 1e-12);
        }
        let e = E;
        let expected = (e + e.powi(3) + 2.0 * e.powi(-2)).ln();
        assert!(close(log_partition(&p(1.0, 0.5, 1.0, 2)), expected, 1e-14));

        let big = p(1.0, 0.3, 2.0, 1_000_000);
        let z = log_partition(&big);
        let leading = 1e6 * spectral(&big).log_lambda_plus;
        assert!(z.is_finite());
        assert!((z - leading).abs() <= LN_2);
    }

    #[test]
    fn magnetization_examples() {
        assert_eq!(magnetization(&p(1.0, 0.0, 3.0, 9)), 0.0);
        let m = magnetization(&p(1.0, 1.0, 100.0, 50));
        assert!((m + 1.0).abs() < 1e-8);
        let m = magnetization(&p(1.0, -1.0, 100.0, 50));
        assert!((m - 1.0).abs() < 1e-8);
    }

    #[test]
    fn two_point_examples() {
        let params = p(0.7, 0.0, 1.2, 400);
        assert!(close(
            two_point(&params, 3, 4).unwrap(),
            (0.7f64 * 1.2).tanh(),
            1e-14
        ));
        assert_eq!(two_point(&p(0.7, 0.5, 0.0, 6), 1, 4).unwrap(), 0.0);
        assert!(two_point(&params, 4, 4).is_err());
        assert!(two_point(&params, 5, 2).is_err());
        assert!(two_point(&params, 0, 2).is_err());
        assert!(two_point(&params, 1, 401).is_err());
    }

    #[test]
    fn frozen_finite_ring_values() {
        // numpy enumeration, N=6, J=0.7, B=0.4, beta=1.3
        let params = p(0.7, 0.4, 1.3, 6);
        assert!((magnetization(&params) - -0.955_667_255_090_559_8).abs() < 1e-13);
        assert!((two_point(&params, 2, 4).unwrap() - 0.928_595_842_171_394_6).abs() < 1e-13);
    }

    #[test]
    fn sigma_z_rotated_examples() {
        let s = spectral(&p(1.0, 0.0, 0.7, 4));
        assert_eq!(sigma_z_rotated(&s), [[-0.0, -1.0], [-1.0, 0.0]]);
        let s = spectral(&p(-0.4, 1.3, 0.9, 4));
        let m = sigma_z_rotated(&s);
        assert_eq!(m[0][0] + m[1][1], 0.0);
        for a in 0..2 {
            for b in 0..2 {
                let sq = m[a][0] * m[0][b] + m[a][1] * m[1][b];
                let id = if a == b { 1.0 } else { 0.0 };
                assert!((sq - id).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ratio_pow_edge_cases() {
        let hot = spectral(&p(1.0, 0.3, 0.0, 4));
        assert_eq!(hot.ratio_pow(0), 1.0);
        assert_eq!(hot.ratio_pow(3), 0.0);
        assert_eq!(hot.one_plus_ratio_pow(5), 1.0);

        let anti = spectral(&p(-1.0, 0.0, 0.5, 4));
        let r = (-0.5f64).tanh();
        assert!((anti.ratio - r).abs() < 1e-15);
        assert!((anti.ratio_pow(3) - r.powi(3)).abs() < 1e-15);
        assert!((anti.ratio_pow_sum(2, 5) - (r.powi(2) + r.powi(5))).abs() < 1e-15);
        assert!((anti.ratio_pow_minus_one(3) - (r.powi(3) - 1.0)).abs() < 1e-15);
        assert!(anti.ratio_pow(3_000_000_001) <= 0.0);
    }

    #[test]
    fn near_unit_ratio_keeps_gap() {
        // J < 0, B = 0: r = -tanh(beta|J|), here within 1e-7 of -1.
        // 1 - tanh(x) = 2 / (e^{2x} + 1)
        let s = spectral(&p(-2.0, 0.0, 4.0, 5));
        let exact_gap = 2.0 / ((16.0f64).exp() + 1.0);
        let log_abs = (-exact_gap).ln_1p();
        assert!((s.log_abs_ratio - log_abs).abs() <= 1e-13 * log_abs.abs());
        let one_plus = -(5.0 * log_abs).exp_m1();
        assert!((s.one_plus_ratio_pow(5) - one_plus).abs() <= 1e-12 * one_plus);
    }

    #[test]
    fn long_chain_observables() {
        let params = p(1.0, 0.2, 0.5, 1_000_000_000);
        assert!(log_partition(&params).is_finite());
        let m = magnetization(&params);
        let thermo = -spectral(&params).cos2w;
        assert_eq!(m, thermo);
        assert!(two_point(&params, 1, 500_000_000).unwrap().is_finite());
    }
}
