//! Kernel bisimulations.
//!
//! An equivalence `P` on a system's carrier is a kernel bisimulation when the
//! quotient map `q_P` carries a homomorphism, i.e. all states of a block have
//! the same [`Signature`] under `q_P`. The largest one is computed by
//! signature refinement; [`oracle`] enumerates set partitions independently.

use rayon::prelude::*;

use crate::systems::{disjoint_union, Partition, StateMap, System, SystemError};
use crate::weights::{NestedWeight, StateId};

pub mod approx;
pub mod oracle;

pub use approx::{count_approximants, fingerprint, fingerprint_partition, Fingerprint, FingerprintTable};
pub use oracle::{all_kernel_bisimulations, oracle_largest_bisimulation, DEFAULT_ORACLE_LIMIT};

/// States below this count are refined sequentially.
const PARALLEL_THRESHOLD: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BisimError {
    #[error("partition covers {partition} states, system has {system}")]
    NotCovering { partition: usize, system: usize },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("partition is not a bisimulation: states `{0}` and `{1}` have different signatures")]
    NotBisimulation(String, String),
    #[error("{states} states exceed the oracle limit of {limit}")]
    LimitExceeded { states: usize, limit: usize },
    #[error("bisimulation lattice violated: {0}")]
    Structure(String),
    #[error("monoid `{0}` has an infinite carrier")]
    InfiniteMonoid(String),
    #[error("approximant F_{depth} has more than {limit} elements")]
    CountOverflow { depth: usize, limit: u64 },
    #[error(transparent)]
    System(#[from] SystemError),
}

/// The behaviour of a state seen through a quotient map: one pushed-forward
/// nested weight per slot.
pub type Signature = Vec<NestedWeight<usize>>;

/// `T(q)(α(x))` for the quotient map `q` given as block ids.
pub fn signature(s: &System, quotient: &[usize], x: StateId) -> Signature {
    let stacks = s.ty().slot_stacks();
    s.row(x).iter().zip(stacks).map(|(nw, stack)| nw.push_forward(stack, |&y| quotient[y])).collect()
}

fn signatures(s: &System, quotient: &[usize]) -> Vec<Signature> {
    if s.len() >= PARALLEL_THRESHOLD {
        (0..s.len()).into_par_iter().map(|x| signature(s, quotient, x)).collect()
    } else {
        (0..s.len()).map(|x| signature(s, quotient, x)).collect()
    }
}

fn check_cover(s: &System, p: &Partition) -> Result<(), BisimError> {
    if p.len() != s.len() {
        return Err(BisimError::NotCovering { partition: p.len(), system: s.len() });
    }
    Ok(())
}

/// First pair of related states with different signatures, if any.
pub fn unstable_pair(s: &System, p: &Partition) -> Result<Option<(StateId, StateId)>, BisimError> {
    check_cover(s, p)?;
    let sigs = signatures(s, p.block_ids());
    for block in p.blocks() {
        let first = block[0];
        if let Some(&y) = block[1..].iter().find(|&&y| sigs[y] != sigs[first]) {
            return Ok(Some((first, y)));
        }
    }
    Ok(None)
}

pub fn is_kernel_bisimulation(s: &System, p: &Partition) -> Result<bool, BisimError> {
    Ok(unstable_pair(s, p)?.is_none())
}

/// Whether `f` makes the square `tgt ∘ f = T(f) ∘ src` commute.
pub fn is_homomorphism(f: &StateMap, src: &System, tgt: &System) -> Result<bool, BisimError> {
    if src.ty() != tgt.ty() {
        return Err(BisimError::TypeMismatch("homomorphism between systems of different types".into()));
    }
    f.check(src.len(), tgt.len())?;
    let stacks = src.ty().slot_stacks();
    Ok((0..src.len()).all(|x| {
        let fx = f.apply(x);
        src.row(x)
            .iter()
            .zip(tgt.row(fx))
            .zip(&stacks)
            .all(|((nw, target), stack)| nw.push_forward(stack, |&y| f.apply(y)) == *target)
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub partition: Partition,
    /// Signature rounds run, including the final one that found no split.
    pub rounds: usize,
}

/// The largest bisimulation contained in `initial`.
pub fn refine(s: &System, initial: &Partition) -> Result<Refinement, BisimError> {
    check_cover(s, initial)?;
    let mut current = initial.clone();
    let mut rounds = 0;
    if s.is_empty() {
        return Ok(Refinement { partition: current, rounds });
    }
    loop {
        rounds += 1;
        let keys: Vec<(usize, Signature)> = signatures(s, current.block_ids())
            .into_iter()
            .enumerate()
            .map(|(x, sig)| (current.block_of(x), sig))
            .collect();
        let next = Partition::from_keys(&keys);
        if next.num_blocks() == current.num_blocks() {
            return Ok(Refinement { partition: next, rounds });
        }
        current = next;
    }
}

/// The coarsest kernel bisimulation.
pub fn largest_bisimulation(s: &System) -> Partition {
    refine(s, &Partition::universal(s.len())).expect("universal partition covers the carrier").partition
}

/// The quotient `s / P` with blocks named after their least state, and the
/// quotient map.
pub fn quotient_system(s: &System, p: &Partition) -> Result<(System, StateMap), BisimError> {
    if let Some((x, y)) = unstable_pair(s, p)? {
        return Err(BisimError::NotBisimulation(s.state_name(x).to_string(), s.state_name(y).to_string()));
    }
    let q = p.block_ids();
    let names = p.blocks().iter().map(|b| s.state_name(b[0]).to_string()).collect();
    let rows = p.blocks().iter().map(|b| signature(s, q, b[0])).collect();
    let quotient = System::from_parts(s.ty().clone(), names, rows);
    Ok((quotient, StateMap::new(q.to_vec())))
}

/// Quotient by the largest bisimulation.
pub fn minimize(s: &System) -> (System, StateMap) {
    quotient_system(s, &largest_bisimulation(s)).expect("largest bisimulation is a bisimulation")
}

/// Whether `x` of `s1` and `y` of `s2` are bisimilar, decided on `s1 + s2`.
pub fn bisimilar(s1: &System, x: StateId, s2: &System, y: StateId) -> Result<bool, BisimError> {
    if s1.ty() != s2.ty() {
        return Err(BisimError::TypeMismatch("cannot compare states of systems of different types".into()));
    }
    let (union, left, right) = disjoint_union(s1, s2)?;
    let p = largest_bisimulation(&union);
    Ok(p.related(left.apply(x), right.apply(y)))
}
