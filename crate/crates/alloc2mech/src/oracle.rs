//! Semi-analytic oracle for the transformed single-item auction.
//!
//! Under the canonical procedure an agent bidding `b > 0` keeps `x = b` with
//! probability `1 - μ` and otherwise gets `x = b · w^{1/(1-μ)}` with `w`
//! uniform, so `P(x <= v) = μ (v/b)^{1-μ}` for `0 <= v < b`. The winning
//! probability of agent `i` at resampled bid `v` is a product of these
//! distribution functions, and its expected allocation at bid `u` is one
//! integral over `w`. Nothing here runs the mechanism.

use alloc2mech_core::mechanism::myerson_payment_for_curve;
use alloc2mech_core::quadrature::{integrate, QuadratureConfig};
use alloc2mech_core::{Interval, Result};

/// Probability that an opponent bidding `b` ends below `v` (`strict`) or at
/// most `v`.
fn opponent_cdf(v: f64, b: f64, mu: f64, strict: bool) -> f64 {
    if b == 0.0 {
        // a zero bid is never moved
        return if v > 0.0 || (v == 0.0 && !strict) {
            1.0
        } else {
            0.0
        };
    }
    if v <= 0.0 {
        0.0
    } else if v < b {
        mu * (v / b).powf(1.0 - mu)
    } else if v == b {
        if strict {
            mu
        } else {
            1.0
        }
    } else {
        1.0
    }
}

/// Winning probability of `agent` with resampled bid `v` against the others'
/// resampled bids. Ties go to the lowest index.
fn win_probability(bids: &[f64], agent: usize, v: f64, mu: f64) -> f64 {
    bids.iter()
        .enumerate()
        .filter(|&(j, _)| j != agent)
        .map(|(j, &b)| opponent_cdf(v, b, mu, j < agent))
        .product()
}

/// Expected allocation of `agent` at own bid `u` in the transformed
/// single-item auction.
pub fn transformed_allocation(
    bids: &[f64],
    agent: usize,
    u: f64,
    mu: f64,
    cfg: &QuadratureConfig,
) -> f64 {
    if u <= 0.0 {
        return if u == 0.0 {
            win_probability(bids, agent, 0.0, mu)
        } else {
            0.0
        };
    }
    let keep = (1.0 - mu) * win_probability(bids, agent, u, mu);
    let e = 1.0 / (1.0 - mu);
    let moved = integrate(
        |w| win_probability(bids, agent, u * w.powf(e), mu),
        0.0,
        1.0,
        cfg,
    );
    keep + mu * moved
}

/// Myerson payment of `agent` for the transformed allocation curve.
pub fn transformed_payment(
    bids: &[f64],
    agent: usize,
    mu: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let inner = QuadratureConfig {
        tolerance: cfg.tolerance * 1e-2,
        ..*cfg
    };
    myerson_payment_for_curve(
        |u| transformed_allocation(bids, agent, u, mu, &inner),
        bids[agent],
        Interval::NON_NEGATIVE,
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lone_bidder_always_wins() {
        let cfg = QuadratureConfig::default();
        assert!((transformed_allocation(&[2.0], 0, 1.3, 0.3, &cfg) - 1.0).abs() < 1e-12);
        // Myerson payment of a constant curve is zero
        assert!(transformed_payment(&[2.0], 0, 0.3, &cfg).unwrap().abs() < 1e-9);
    }

    #[test]
    fn two_bidders_closed_form() {
        // Agent 1 bids u < b0 = 1 against agent 0; P(win) = (1-μ)·μ u^{1-μ}
        // + μ ∫ μ (u w^{1/(1-μ)})^{1-μ} dw = μ u^{1-μ} (1 - μ + μ/2).
        let (mu, u) = (0.4f64, 0.6f64);
        let want = mu * u.powf(1.0 - mu) * (1.0 - mu + mu / 2.0);
        let got = transformed_allocation(&[1.0, u], 1, u, mu, &QuadratureConfig::default());
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn curve_is_monotone() {
        let cfg = QuadratureConfig::default();
        let bids = [0.5, 0.7, 0.9];
        let mut last = 0.0;
        for k in 0..=40 {
            let a = transformed_allocation(&bids, 1, 0.05 * k as f64, 0.2, &cfg);
            assert!(a >= last - 1e-12);
            last = a;
        }
        assert!(last <= 1.0);
    }
}
