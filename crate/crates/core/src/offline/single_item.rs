use crate::error::Result;
use crate::mechanism::{AllocationRule, RuleSeeds};
use alloc::vec;
use alloc::vec::Vec;

/// One unit to the highest bidder; ties go to the lowest index.
pub fn single_item(bids: &[f64]) -> Vec<f64> {
    let mut alloc = vec![0.0; bids.len()];
    let mut best: Option<usize> = None;
    for (i, &b) in bids.iter().enumerate() {
        match best {
            Some(w) if bids[w] >= b => {}
            _ => best = Some(i),
        }
    }
    if let Some(w) = best {
        alloc[w] = 1.0;
    }
    alloc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingleItem {
    pub agents: usize,
}

impl SingleItem {
    pub const fn new(agents: usize) -> Self {
        SingleItem { agents }
    }
}

impl AllocationRule for SingleItem {
    fn num_agents(&self) -> usize {
        self.agents
    }
    fn evaluate(&self, bids: &[f64], _seeds: RuleSeeds) -> Result<Vec<f64>> {
        Ok(single_item(bids))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn highest_bid_wins() {
        assert_eq!(single_item(&[3.0, 1.0, 2.0]), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        assert_eq!(single_item(&[2.0, 2.0]), vec![1.0, 0.0]);
        assert_eq!(single_item(&[1.0, 2.0, 2.0]), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn loser_raising_above_max_wins() {
        assert_eq!(single_item(&[3.0, 1.0, 2.0])[1], 0.0);
        assert_eq!(single_item(&[3.0, 3.5, 2.0])[1], 1.0);
    }
}
