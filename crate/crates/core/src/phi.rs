//! The function Φ and the auxiliary inequalities used by the bound chain.
//!
//! Φ : [0,1] × (0,∞) → ℝ is defined as (1/μ)·log(1 − μ/(1+ρ)) for μ > 0
//! and −1/(1+ρ) at μ = 0. Everything is evaluated through
//!
//! ```text
//! Φ(μ, ρ) = φ(μ/(1+ρ)) / (1+ρ),    φ(s) = log(1−s)/s,  φ(0) = −1,
//! ```
//!
//! with φ switching to its power series −(1 + s/2 + s²/3 + s³/4) below
//! `s = 1e-4`, so the μ → 0 limit is continuous by construction instead
//! of dying of cancellation in `(1/μ)·log(...)`.
//!
//! The `check_*` functions return signed margins (claimed non-negative),
//! never booleans; sweeps and tests decide what tolerance to hold them
//! to. `eta`/`eta_prime` are the closed forms of t³·h_α″(t) and its
//! derivative on the concavity slice h_α(t) = Φ(t, αt); `f_lemma1`,
//! `g_prime_lemma3` and `partial2_phi` are the other closed forms the
//! chain's correctness rests on, kept separate so each can be
//! cross-checked against finite differences.

use std::f64::consts::E;

use thiserror::Error;

/// 1/e, the cap appearing in the coarser bound.
pub const INV_E: f64 = 1.0 / E;

/// Below this, φ uses its power series instead of `ln_1p`.
const SERIES_CUTOFF: f64 = 1e-4;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum PhiError {
    #[error("series argument {0} outside [0, 1)")]
    SeriesArgOutOfRange(f64),
    #[error("mu {0} outside [0, 1]")]
    MuOutOfRange(f64),
    #[error("rho {0} must be finite and > 0")]
    RhoOutOfRange(f64),
    #[error("alpha {0} must be finite and > 0")]
    AlphaOutOfRange(f64),
    #[error("t {0} outside [0, 1]")]
    TOutOfRange(f64),
    #[error("t {0} must lie strictly inside (0, 1)")]
    EndpointExcluded(f64),
    #[error("mu {0} must lie strictly inside (0, 1)")]
    InteriorMuRequired(f64),
}

/// A point (μ, ρ) in the domain [0,1] × (0,∞) of Φ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiPoint {
    mu: f64,
    rho: f64,
}

impl PhiPoint {
    pub fn new(mu: f64, rho: f64) -> Result<Self, PhiError> {
        if !mu.is_finite() || !(0.0..=1.0).contains(&mu) {
            return Err(PhiError::MuOutOfRange(mu));
        }
        if !rho.is_finite() || rho <= 0.0 {
            return Err(PhiError::RhoOutOfRange(rho));
        }
        Ok(PhiPoint { mu, rho })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// The slope α > 0 of the ray t ↦ (t, αt).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaSlice {
    alpha: f64,
}

impl AlphaSlice {
    pub fn new(alpha: f64) -> Result<Self, PhiError> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(PhiError::AlphaOutOfRange(alpha));
        }
        Ok(AlphaSlice { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

fn phi_series_unchecked(s: f64) -> f64 {
    if s < SERIES_CUTOFF {
        // -(1 + s/2 + s²/3 + s³/4); next term is s⁴/5 < 2e-17 at the cutoff.
        -(1.0 + s * (0.5 + s * (1.0 / 3.0 + s * 0.25)))
    } else {
        (-s).ln_1p() / s
    }
}

/// φ(s) = log(1−s)/s on [0,1), with φ(0) = −1. Strictly decreasing.
pub fn phi_series(s: f64) -> Result<f64, PhiError> {
    if !s.is_finite() || !(0.0..1.0).contains(&s) {
        return Err(PhiError::SeriesArgOutOfRange(s));
    }
    Ok(phi_series_unchecked(s))
}

/// Φ(μ, ρ); the μ = 0 branch −1/(1+ρ) falls out of φ(0) = −1.
///
/// Above the series cutoff the log argument 1 − μ/(1+ρ) is evaluated as
/// ((1−μ) + ρ)/(1+ρ) straight from the inputs; forming it from a rounded
/// μ/(1+ρ) loses up to 1/(1+ρ−μ) of the precision, which is fatal for
/// the margin checks at μ = 1 with small ρ.
pub fn phi(p: PhiPoint) -> f64 {
    let one_plus_rho = 1.0 + p.rho;
    let s = p.mu / one_plus_rho;
    if s < SERIES_CUTOFF {
        phi_series_unchecked(s) / one_plus_rho
    } else {
        let complement = (1.0 - p.mu) + p.rho; // 1 + ρ − μ, no cancellation
        (complement / one_plus_rho).ln() / p.mu
    }
}

/// h_α(t) = Φ(t, αt) on [0,1]; at t = 0 the continuous limit is −1.
pub fn h_alpha(a: AlphaSlice, t: f64) -> Result<f64, PhiError> {
    if !t.is_finite() || !(0.0..=1.0).contains(&t) {
        return Err(PhiError::TOutOfRange(t));
    }
    if t == 0.0 {
        return Ok(-1.0);
    }
    let one_plus_rho = 1.0 + a.alpha * t;
    let s = t / one_plus_rho;
    if s < SERIES_CUTOFF {
        Ok(phi_series_unchecked(s) / one_plus_rho)
    } else {
        let complement = (1.0 - t) + a.alpha * t;
        Ok((complement / one_plus_rho).ln() / t)
    }
}

/// η(t) = t³·h_α″(t) in closed form, on the open interval (0,1).
/// Concavity of h_α is equivalent to η < 0 there.
pub fn eta(a: AlphaSlice, t: f64) -> Result<f64, PhiError> {
    if !t.is_finite() || t <= 0.0 || t >= 1.0 {
        return Err(PhiError::EndpointExcluded(t));
    }
    let al = a.alpha;
    let q = (1.0 - t) + al * t; // 1 − t + αt
    let r = 1.0 + al * t; // 1 + αt
    let numer = t * (2.0 + (6.0 * al - 3.0) * t + 4.0 * (al * al - al) * t * t);
    Ok(numer / (q * q * r * r) + 2.0 * (q / r).ln())
}

/// η′(t) in closed form; strictly negative on (0,1).
pub fn eta_prime(a: AlphaSlice, t: f64) -> Result<f64, PhiError> {
    if !t.is_finite() || t <= 0.0 || t >= 1.0 {
        return Err(PhiError::EndpointExcluded(t));
    }
    let al = a.alpha;
    let q = (1.0 - t) + al * t;
    let r = 1.0 + al * t;
    let inner = 1.0 - 2.0 * al + 2.0 * (al - al * al) * t;
    let numer = t * t * (1.0 + 3.0 * inner * inner);
    Ok(-numer / (2.0 * q.powi(3) * r.powi(3)))
}

/// f(t) = (1 + t/(e−1))·(1 − e^{−t}) − t, the difference form of the
/// basic inequality; f(0) = f(1) = 0 and f ≥ 0 on [0,1].
pub fn f_lemma1(t: f64) -> Result<f64, PhiError> {
    if !t.is_finite() || !(0.0..=1.0).contains(&t) {
        return Err(PhiError::TOutOfRange(t));
    }
    Ok((1.0 + t / (E - 1.0)) * -(-t).exp_m1() - t)
}

/// Margin of 1 − t/(1 + t/(e−1)) ≥ e^{−t} on [0,1].
pub fn check_lemma1(t: f64) -> Result<f64, PhiError> {
    if !t.is_finite() || !(0.0..=1.0).contains(&t) {
        return Err(PhiError::TOutOfRange(t));
    }
    Ok(1.0 - t / (1.0 + t / (E - 1.0)) - (-t).exp())
}

/// Margin of Φ(μ, ρ) ≥ log(min(ρ/(μ+ρ), 1/e)).
pub fn check_lemma3(p: PhiPoint) -> f64 {
    let floor = (p.rho / (p.mu + p.rho)).min(INV_E).ln();
    phi(p) - floor
}

/// g′(ρ) for g(ρ) = Φ(μ, ρ) − log(ρ/(μ+ρ)), in the closed form
/// −(1−μ)((1+ρ)μ − ρ²) / (ρ(1+ρ)(1+ρ−μ)(μ+ρ)). Interior μ only.
pub fn g_prime_lemma3(p: PhiPoint) -> Result<f64, PhiError> {
    if p.mu <= 0.0 || p.mu >= 1.0 {
        return Err(PhiError::InteriorMuRequired(p.mu));
    }
    let (mu, rho) = (p.mu, p.rho);
    let numer = (1.0 - mu) * ((1.0 + rho) * mu - rho * rho);
    let denom = rho * (1.0 + rho) * (1.0 + rho - mu) * (mu + rho);
    Ok(-numer / denom)
}

/// ∂Φ/∂ρ = 1/((1+ρ)(1+ρ−μ)); strictly positive. Interior μ only.
pub fn partial2_phi(p: PhiPoint) -> Result<f64, PhiError> {
    if p.mu <= 0.0 || p.mu >= 1.0 {
        return Err(PhiError::InteriorMuRequired(p.mu));
    }
    Ok(1.0 / ((1.0 + p.rho) * (1.0 + p.rho - p.mu)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn central_second_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        f(x + h) - 2.0 * f(x) + f(x - h)
    }

    fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    fn rel_close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs())
    }

    #[test]
    fn phi_series_values() {
        assert_eq!(phi_series(0.0).unwrap(), -1.0);
        let direct = 0.5f64.ln() / 0.5;
        assert!((phi_series(0.5).unwrap() - direct).abs() < 1e-15);
        // two-term series oracle near zero: -1 - s/2
        let s = 1e-12;
        assert!((phi_series(s).unwrap() - (-1.0 - s / 2.0)).abs() <= 1e-15);
        assert!(phi_series(1.0).is_err());
        assert!(phi_series(-0.1).is_err());
    }

    #[test]
    fn phi_series_is_continuous_at_cutoff() {
        let below = phi_series(SERIES_CUTOFF * (1.0 - 1e-12)).unwrap();
        let above = phi_series(SERIES_CUTOFF).unwrap();
        assert!((below - above).abs() < 1e-13);
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(PhiPoint::new(0.0, 1.0).unwrap()), -0.5);
        let at_one = phi(PhiPoint::new(1.0, 1.0).unwrap());
        assert!((at_one - 0.5f64.ln()).abs() < 1e-15);
        let mid = phi(PhiPoint::new(0.5, 0.5).unwrap());
        assert!((mid - 2.0 * (2.0f64 / 3.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn phi_splice_is_continuous_at_mu_zero() {
        for k in -3..=3 {
            let rho = 10f64.powi(k);
            let near = phi(PhiPoint::new(1e-9, rho).unwrap());
            let limit = phi(PhiPoint::new(0.0, rho).unwrap());
            assert!((near - limit).abs() <= 1e-8, "rho={rho}");
        }
    }

    #[test]
    fn h_alpha_values() {
        let a1 = AlphaSlice::new(1.0).unwrap();
        assert!((h_alpha(a1, 1.0).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(h_alpha(AlphaSlice::new(0.5).unwrap(), 0.0).unwrap(), -1.0);
        let a2 = AlphaSlice::new(2.0).unwrap();
        assert!((h_alpha(a2, 0.5).unwrap() - 2.0 * 0.75f64.ln()).abs() < 1e-15);
        assert!(h_alpha(a1, 1.5).is_err());
    }

    #[test]
    fn eta_vanishes_at_zero_and_is_negative_inside() {
        let a = AlphaSlice::new(1.0).unwrap();
        assert!(eta(a, 1e-4).unwrap().abs() <= 1e-6);
        assert!(eta(a, 0.5).unwrap() < 0.0);
        assert!(eta(a, 0.0).is_err());
        assert!(eta(a, 1.0).is_err());
    }

    #[test]
    fn eta_matches_t_cubed_second_difference() {
        for &alpha in &[0.5, 1.0, 2.0, 10.0] {
            let a = AlphaSlice::new(alpha).unwrap();
            for &t in &[0.1, 0.3, 0.5, 0.7, 0.9] {
                let d2 = central_second_difference(|x| h_alpha(a, x).unwrap(), t, 1e-4);
                let fd = t.powi(3) * d2 / 1e-8;
                let closed = eta(a, t).unwrap();
                assert!(rel_close(closed, fd, 1e-4), "alpha={alpha} t={t}: {closed} vs {fd}");
            }
        }
    }

    #[test]
    fn eta_prime_is_negative_and_matches_difference_of_eta() {
        let a = AlphaSlice::new(2.0).unwrap();
        let fd = central_difference(|x| eta(a, x).unwrap(), 0.3, 1e-5);
        let closed = eta_prime(a, 0.3).unwrap();
        assert!(closed < 0.0);
        assert!(rel_close(closed, fd, 1e-4), "{closed} vs {fd}");

        // monotone decrease on the slice
        let a1 = AlphaSlice::new(1.0).unwrap();
        assert!(eta(a1, 0.6).unwrap() < eta(a1, 0.4).unwrap());
    }

    #[test]
    fn lemma1_margins() {
        assert_eq!(f_lemma1(0.0).unwrap(), 0.0);
        assert!(f_lemma1(1.0).unwrap().abs() <= 1e-15);
        assert!(f_lemma1(0.5).unwrap() > 0.0);
        assert_eq!(check_lemma1(0.0).unwrap(), 0.0);
        assert!(check_lemma1(1.0).unwrap().abs() <= 1e-15);
        assert!(check_lemma1(0.3).unwrap() >= 0.0);
    }

    #[test]
    fn lemma3_margin_values() {
        // At μ = 1, Φ(1, ρ) = log(ρ/(1+ρ)): the floor binds only once
        // ρ/(1+ρ) ≤ 1/e, i.e. ρ ≤ 1/(e−1).
        let at_one = check_lemma3(PhiPoint::new(1.0, 1.0).unwrap());
        assert!((at_one - (1.0 + 0.5f64.ln())).abs() < 1e-12);
        let equality = check_lemma3(PhiPoint::new(1.0, 0.5).unwrap());
        assert!(equality.abs() <= 1e-15);

        let at_zero = check_lemma3(PhiPoint::new(0.0, 1.0).unwrap());
        assert!((at_zero - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lemma3_margin_at_regime_boundary() {
        // ρ = μ/(e−1) is where the two cases of the floor meet.
        let mu = 0.5;
        let rho = mu / (E - 1.0);
        assert!((rho / (mu + rho) - INV_E).abs() < 1e-15);
        let margin = check_lemma3(PhiPoint::new(mu, rho).unwrap());
        assert!(margin > 0.0);
        // Same margin via the basic-inequality margin: the inner log
        // argument is e^{−μ} + check_lemma1(μ).
        let via_lemma1 = ((-mu).exp() + check_lemma1(mu).unwrap()).ln() / mu + 1.0;
        assert!((margin - via_lemma1).abs() <= 1e-12);
    }

    #[test]
    fn g_prime_sign_root_and_difference() {
        let p = PhiPoint::new(0.5, 0.1).unwrap();
        let closed = g_prime_lemma3(p).unwrap();
        assert!(closed < 0.0);
        let g = |rho: f64| {
            let q = PhiPoint::new(0.5, rho).unwrap();
            phi(q) - (rho / (0.5 + rho)).ln()
        };
        let fd = central_difference(g, 0.1, 1e-6);
        assert!(rel_close(closed, fd, 1e-5), "{closed} vs {fd}");

        // (1+ρ)μ − ρ² vanishes at ρ* = (μ + √(μ² + 4μ))/2; for μ = 1/2
        // that is exactly 1.
        let root = g_prime_lemma3(PhiPoint::new(0.5, 1.0).unwrap()).unwrap();
        assert!(root.abs() <= 1e-12);

        assert!(g_prime_lemma3(PhiPoint::new(1.0, 0.5).unwrap()).is_err());
    }

    #[test]
    fn partial2_phi_value_and_difference() {
        let p = PhiPoint::new(0.5, 0.5).unwrap();
        let closed = partial2_phi(p).unwrap();
        assert!((closed - 1.0 / 1.5).abs() < 1e-15);
        let fd = central_difference(|rho| phi(PhiPoint::new(0.5, rho).unwrap()), 1.0, 1e-6);
        let closed_at_one = partial2_phi(PhiPoint::new(0.5, 1.0).unwrap()).unwrap();
        assert!(rel_close(closed_at_one, fd, 1e-6), "{closed_at_one} vs {fd}");
    }

    proptest! {
        #[test]
        fn lemma1_holds_on_random_points(t in 0.0..=1.0f64) {
            prop_assert!(check_lemma1(t).unwrap() >= -1e-12);
            prop_assert!(f_lemma1(t).unwrap() >= -1e-12);
        }

        #[test]
        fn lemma3_holds_on_random_points(mu in 0.0..=1.0f64, log_rho in -3.0..3.0f64) {
            let p = PhiPoint::new(mu, 10f64.powf(log_rho)).unwrap();
            prop_assert!(check_lemma3(p) >= -1e-12);
        }

        #[test]
        fn phi_is_strictly_decreasing_in_mu(
            mu in 0.01..=1.0f64,
            gap in 0.005..0.5f64,
            log_rho in -3.0..3.0f64,
        ) {
            let rho = 10f64.powf(log_rho);
            let lambda = (mu - gap).max(0.0);
            let hi = phi(PhiPoint::new(lambda, rho).unwrap());
            let lo = phi(PhiPoint::new(mu, rho).unwrap());
            prop_assert!(lo < hi, "phi({mu},{rho}) = {lo} !< phi({lambda},{rho}) = {hi}");
        }

        #[test]
        fn eta_and_derivative_are_negative(
            alpha in 0.01..100.0f64,
            t in 0.01..0.99f64,
        ) {
            let a = AlphaSlice::new(alpha).unwrap();
            prop_assert!(eta(a, t).unwrap() < 0.0);
            prop_assert!(eta_prime(a, t).unwrap() < 0.0);
        }

        #[test]
        fn partial2_is_positive(mu in 0.01..0.99f64, log_rho in -3.0..3.0f64) {
            let p = PhiPoint::new(mu, 10f64.powf(log_rho)).unwrap();
            prop_assert!(partial2_phi(p).unwrap() > 0.0);
        }
    }
}
