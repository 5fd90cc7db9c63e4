use crate::error::{Error, Result};

/// Pseudo-regret of a run against the best fixed agent, using expected
/// rewards `b_i μ_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretReport {
    pub realized_welfare: f64,
    /// `T · max_i b_i μ_i`.
    pub benchmark: f64,
    pub regret: f64,
    /// `(b_1 μ_1 − b_2 μ_2) / b_max` over the sorted `b_i μ_i`; 0 for one agent.
    pub gap: f64,
}

/// `choices` are 0-based agent ids, one per round.
pub fn regret(
    choices: &[usize],
    bids: &[f64],
    ctrs: &[f64],
    horizon: u64,
    b_max: f64,
) -> Result<RegretReport> {
    if bids.len() != ctrs.len() || bids.is_empty() {
        return Err(Error::BidCount {
            expected: ctrs.len(),
            got: bids.len(),
        });
    }
    if choices.len() as u64 != horizon || choices.iter().any(|&c| c >= bids.len()) {
        return Err(Error::Config("choices must name one valid agent per round"));
    }
    let value = |i: usize| bids[i] * ctrs[i];
    let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for i in 0..bids.len() {
        let v = value(i);
        if v > first {
            second = first;
            first = v;
        } else if v > second {
            second = v;
        }
    }
    let realized_welfare: f64 = choices.iter().map(|&c| value(c)).sum();
    let benchmark = horizon as f64 * first;
    let gap = if bids.len() > 1 {
        (first - second) / b_max
    } else {
        0.0
    };
    Ok(RegretReport {
        realized_welfare,
        benchmark,
        regret: benchmark - realized_welfare,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_agent_has_no_regret() {
        let r = regret(&[0; 10], &[0.7], &[0.4], 10, 1.0).unwrap();
        assert!(r.regret.abs() < 1e-12);
        assert_eq!(r.gap, 0.0);
    }

    #[test]
    fn best_and_worst_fixed_agents() {
        let bids = [1.0, 0.5];
        let ctrs = [0.6, 0.8];
        let best = regret(&[0; 100], &bids, &ctrs, 100, 1.0).unwrap();
        assert!(best.regret.abs() < 1e-12);
        let worst = regret(&[1; 100], &bids, &ctrs, 100, 1.0).unwrap();
        assert!((worst.regret - 100.0 * (0.6 - 0.4)).abs() < 1e-9);
        assert!((worst.gap - 0.2).abs() < 1e-12);
        assert_eq!(worst.regret, worst.benchmark - worst.realized_welfare);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(regret(&[0, 1], &[1.0], &[0.5], 2, 1.0).is_err());
        assert!(regret(&[0; 3], &[1.0], &[0.5], 2, 1.0).is_err());
    }
}
