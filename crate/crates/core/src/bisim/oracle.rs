//! Brute-force search over all set partitions of a small carrier.

use super::{is_kernel_bisimulation, BisimError};
use crate::systems::{Partition, System};

pub const DEFAULT_ORACLE_LIMIT: usize = 6;

/// Every partition of `0..n`, as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    fn go(i: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if i == rgs.len() {
            out.push(Partition::from_keys(rgs));
            return;
        }
        for b in 0..=max + 1 {
            rgs[i] = b;
            go(i + 1, max.max(b), rgs, out);
        }
    }
    if n == 0 {
        return vec![Partition::discrete(0)];
    }
    // The first state always opens block 0.
    go(1, 0, &mut rgs, &mut out);
    out
}

/// `bis(α)`: every equivalence on the carrier that is a kernel bisimulation.
pub fn all_kernel_bisimulations(s: &System, limit: usize) -> Result<Vec<Partition>, BisimError> {
    if s.len() > limit {
        return Err(BisimError::LimitExceeded { states: s.len(), limit });
    }
    let mut out = Vec::new();
    for p in set_partitions(s.len()) {
        if is_kernel_bisimulation(s, &p)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// The coarsest member of `bis(α)`, checked to be coarser than every other.
pub fn oracle_largest_bisimulation(s: &System, limit: usize) -> Result<Partition, BisimError> {
    let all = all_kernel_bisimulations(s, limit)?;
    let coarsest = all
        .iter()
        .min_by_key(|p| p.num_blocks())
        .cloned()
        .ok_or_else(|| BisimError::Structure("no partition passed, not even the diagonal".into()))?;
    if let Some(p) = all.iter().find(|p| !p.refines(&coarsest)) {
        return Err(BisimError::Structure(format!(
            "{:?} is a bisimulation but does not refine the coarsest candidate {:?}",
            p.blocks(),
            coarsest.blocks()
        )));
    }
    Ok(coarsest)
}
