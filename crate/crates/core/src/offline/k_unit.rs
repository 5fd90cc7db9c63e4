use crate::error::{Error, Result};
use crate::mechanism::{AllocationRule, RuleSeeds};
use alloc::vec;
use alloc::vec::Vec;

/// `k` identical units, at most `cap` per agent, assigned greedily to the
/// highest bids (ties to the lowest index). Returns units per agent.
pub fn k_unit(bids: &[f64], k: usize, cap: usize) -> Result<Vec<f64>> {
    if k == 0 || cap == 0 {
        return Err(Error::Config("k and the per-agent cap must be at least 1"));
    }
    if k > cap.saturating_mul(bids.len()) {
        return Err(Error::Config("k exceeds the total capacity"));
    }
    let mut order: Vec<usize> = (0..bids.len()).collect();
    // stable sort keeps lower indices first among equal bids
    order.sort_by(|&a, &b| bids[b].total_cmp(&bids[a]));
    let mut alloc = vec![0.0; bids.len()];
    let mut left = k;
    for i in order {
        if left == 0 {
            break;
        }
        let units = cap.min(left);
        alloc[i] = units as f64;
        left -= units;
    }
    Ok(alloc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KUnit {
    agents: usize,
    k: usize,
    cap: usize,
}

impl KUnit {
    pub fn new(agents: usize, k: usize, cap: usize) -> Result<Self> {
        if k == 0 || cap == 0 {
            return Err(Error::Config("k and the per-agent cap must be at least 1"));
        }
        if k > cap.saturating_mul(agents) {
            return Err(Error::Config("k exceeds the total capacity"));
        }
        Ok(KUnit { agents, k, cap })
    }

    pub fn units(&self) -> usize {
        self.k
    }

    pub fn cap(&self) -> usize {
        self.cap
    }
}

impl AllocationRule for KUnit {
    fn num_agents(&self) -> usize {
        self.agents
    }
    fn evaluate(&self, bids: &[f64], _seeds: RuleSeeds) -> Result<Vec<f64>> {
        k_unit(bids, self.k, self.cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_assignment() {
        assert_eq!(k_unit(&[3.0, 1.0, 2.0], 2, 1).unwrap(), vec![1.0, 0.0, 1.0]);
        assert_eq!(k_unit(&[3.0, 1.0, 2.0], 2, 2).unwrap(), vec![2.0, 0.0, 0.0]);
        assert_eq!(k_unit(&[3.0, 1.0, 2.0], 3, 2).unwrap(), vec![2.0, 0.0, 1.0]);
    }

    #[test]
    fn capacity_errors() {
        assert!(k_unit(&[1.0, 2.0], 5, 2).is_err());
        assert!(KUnit::new(2, 5, 2).is_err());
        assert!(KUnit::new(2, 0, 2).is_err());
    }

    #[test]
    fn monotone_over_exhaustive_grid() {
        // Every 4-agent profile on a 5-level grid, every own-bid raise.
        let levels = [0.5, 1.0, 1.5, 2.0, 2.5];
        for k in 1..=4 {
            for cap in 1..=2 {
                if k > 4 * cap {
                    continue;
                }
                for code in 0..5usize.pow(4) {
                    let mut bids = [0.0; 4];
                    let mut c = code;
                    for b in bids.iter_mut() {
                        *b = levels[c % 5];
                        c /= 5;
                    }
                    let base = k_unit(&bids, k, cap).unwrap();
                    for i in 0..4 {
                        for &up in levels.iter().filter(|&&l| l > bids[i]) {
                            let mut raised = bids;
                            raised[i] = up;
                            let a = k_unit(&raised, k, cap).unwrap();
                            assert!(a[i] >= base[i], "{bids:?} -> {raised:?}");
                        }
                    }
                }
            }
        }
    }
}
