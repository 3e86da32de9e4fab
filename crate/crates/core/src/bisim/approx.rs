//! Finite approximants of the final sequence `F_0 = 1`, `F_{n+1} = T F_n`.
//!
//! A state's depth-`n` fingerprint is the image of the state in `F_n` under
//! the cone `x ↦ T(fp_{n-1})(α(x))`. Fingerprints are hash-consed in a
//! [`FingerprintTable`], so equal elements of `F_n` get equal handles and
//! fingerprints from different systems can be compared when they share a
//! table.

use std::collections::{HashMap, HashSet};

use serde_json::{json, Value as Json};

use super::BisimError;
use crate::format::nested_to_json;
use crate::monoid::Monoid;
use crate::systems::{Partition, System, TypeDescriptor};
use crate::weights::{NestedWeight, StateId, WeightFunction};

/// Handle to an element of some approximant `F_depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint {
    depth: usize,
    id: u32,
}

impl Fingerprint {
    pub fn depth(&self) -> usize {
        self.depth
    }
}

/// One branch per slot; empty at depth 0.
type Node = Vec<NestedWeight<Fingerprint>>;

#[derive(Debug, Default)]
pub struct FingerprintTable {
    nodes: Vec<Node>,
    index: HashMap<(usize, Node), u32>,
}

impl FingerprintTable {
    pub fn new() -> FingerprintTable {
        FingerprintTable::default()
    }

    fn intern(&mut self, depth: usize, node: Node) -> Fingerprint {
        if let Some(&id) = self.index.get(&(depth, node.clone())) {
            return Fingerprint { depth, id };
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node.clone());
        self.index.insert((depth, node), id);
        Fingerprint { depth, id }
    }

    /// The unique point of `F_0`.
    pub fn unit(&mut self) -> Fingerprint {
        self.intern(0, Vec::new())
    }

    /// Depth-`depth` fingerprints of every state of `s`.
    pub fn fingerprints(&mut self, s: &System, depth: usize) -> Vec<Fingerprint> {
        let unit = self.unit();
        let mut current = vec![unit; s.len()];
        let stacks = s.ty().slot_stacks();
        for d in 1..=depth {
            let next = (0..s.len())
                .map(|x| {
                    let node: Node = s
                        .row(x)
                        .iter()
                        .zip(&stacks)
                        .map(|(nw, stack)| nw.push_forward(stack, |&y: &StateId| current[y]))
                        .collect();
                    self.intern(d, node)
                })
                .collect();
            current = next;
        }
        current
    }

    /// Branches of a fingerprint, one per slot.
    pub fn branches(&self, fp: Fingerprint) -> &[NestedWeight<Fingerprint>] {
        &self.nodes[fp.id as usize]
    }

    /// The fingerprint as a DAG of shared nodes:
    /// `{"root": id, "nodes": {id: {"depth": d, "slots": [..]}}}`.
    pub fn to_json(&self, fp: Fingerprint, ty: &TypeDescriptor) -> Json {
        let stacks = ty.slot_stacks();
        let slot_names: Vec<String> = (0..ty.slot_count()).map(|i| ty.slot_name(i)).collect();
        let mut nodes = serde_json::Map::new();
        let mut stack = vec![fp];
        let mut seen = HashSet::new();
        while let Some(f) = stack.pop() {
            if !seen.insert(f) {
                continue;
            }
            let slots: Vec<Json> = self
                .branches(f)
                .iter()
                .enumerate()
                .map(|(i, nw)| {
                    let weight = nested_to_json(nw, stacks[i], &mut |k: &Fingerprint| {
                        stack.push(*k);
                        json!(k.id)
                    });
                    json!({"slot": slot_names[i], "weight": weight})
                })
                .collect();
            nodes.insert(f.id.to_string(), json!({"depth": f.depth, "slots": slots}));
        }
        json!({"root": fp.id, "nodes": nodes})
    }
}

/// Fingerprint of a single state, with the table that owns it.
pub fn fingerprint(s: &System, x: StateId, depth: usize) -> (Fingerprint, FingerprintTable) {
    let mut table = FingerprintTable::new();
    let all = table.fingerprints(s, depth);
    (all[x], table)
}

/// States grouped by equal depth-`depth` fingerprints.
pub fn fingerprint_partition(s: &System, depth: usize) -> Partition {
    let mut table = FingerprintTable::new();
    Partition::from_keys(&table.fingerprints(s, depth))
}

/// Ceiling on the number of elements built at any enumeration step.
pub const ENUMERATION_LIMIT: u64 = 1 << 18;

/// `|F_0|, ..., |F_depth|` for a type whose monoids are all finite, found by
/// building every element of each approximant.
pub fn count_approximants(ty: &TypeDescriptor, depth: usize) -> Result<Vec<u64>, BisimError> {
    for c in ty.components() {
        if let Some(m) = c.stack.iter().find(|m| m.carrier().is_none()) {
            return Err(BisimError::InfiniteMonoid(m.name().to_string()));
        }
    }
    let stacks = ty.slot_stacks();
    let mut counts = vec![1u64];
    let mut level_len = 1usize;
    for d in 1..=depth {
        let keys: Vec<usize> = (0..level_len).collect();
        let guard = || BisimError::CountOverflow { depth: d, limit: ENUMERATION_LIMIT };
        let mut per_slot: Vec<Vec<NestedWeight<usize>>> = Vec::with_capacity(stacks.len());
        let mut product: u64 = 1;
        for stack in &stacks {
            let elems = enumerate_nested(stack, &keys).ok_or_else(guard)?;
            product = product.checked_mul(elems.len() as u64).filter(|&p| p <= ENUMERATION_LIMIT).ok_or_else(guard)?;
            per_slot.push(elems);
        }
        let mut next: Vec<Vec<NestedWeight<usize>>> = vec![Vec::new()];
        for elems in &per_slot {
            next = next
                .into_iter()
                .flat_map(|prefix| {
                    elems.iter().map(move |e| {
                        let mut node = prefix.clone();
                        node.push(e.clone());
                        node
                    })
                })
                .collect();
        }
        let distinct: HashSet<&Vec<NestedWeight<usize>>> = next.iter().collect();
        level_len = distinct.len();
        counts.push(level_len as u64);
    }
    Ok(counts)
}

/// Every element of `F_{M0}(...F_{Mm} keys)`, or `None` past the limit.
fn enumerate_nested(stack: &[Monoid], keys: &[usize]) -> Option<Vec<NestedWeight<usize>>> {
    let (outer, rest) = stack.split_first()?;
    if rest.is_empty() {
        let fns = enumerate_functions(outer, keys)?;
        Some(fns.into_iter().map(NestedWeight::Leaf).collect())
    } else {
        let inner = enumerate_nested(rest, keys)?;
        let fns = enumerate_functions(outer, &inner)?;
        Some(fns.into_iter().map(NestedWeight::Node).collect())
    }
}

/// All maps `keys -> M`; each is finitely supported since `keys` is finite.
fn enumerate_functions<K: Ord + Clone>(m: &Monoid, keys: &[K]) -> Option<Vec<WeightFunction<K>>> {
    let carrier = m.carrier()?;
    let total = (carrier.len() as u64).checked_pow(u32::try_from(keys.len()).ok()?)?;
    if total > ENUMERATION_LIMIT {
        return None;
    }
    let mut out: Vec<Vec<(K, crate::monoid::Value)>> = vec![Vec::new()];
    for k in keys {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                carrier.iter().map(move |v| {
                    let mut f = prefix.clone();
                    f.push((k.clone(), v.clone()));
                    f
                })
            })
            .collect();
    }
    Some(out.into_iter().map(|pairs| WeightFunction::normalized(m, pairs)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::largest_bisimulation;
    use crate::systems::Component;

    /// `Π_slots |F_{stack}(n)|`, with `|F_{M}(n)| = |M|^n`.
    fn closed_form(ty: &TypeDescriptor, depth: usize) -> Vec<u64> {
        fn level(stack: &[Monoid], n: u64) -> u64 {
            let m = stack[0].carrier_size().unwrap();
            let inner = if stack.len() == 1 { n } else { level(&stack[1..], n) };
            m.pow(inner as u32)
        }
        let mut out = vec![1u64];
        for _ in 0..depth {
            let n = *out.last().unwrap();
            out.push(ty.slot_stacks().iter().map(|s| level(s, n)).product());
        }
        out
    }

    fn self_loops() -> System {
        System::lts(&["a"], &["p", "q"], &[("p", "a", "p"), ("q", "a", "q")]).unwrap()
    }

    #[test]
    fn depth_zero_is_the_unit() {
        let s = self_loops();
        let mut table = FingerprintTable::new();
        let unit = table.unit();
        assert_eq!(table.fingerprints(&s, 0), vec![unit, unit]);
        assert!(table.branches(unit).is_empty());
    }

    #[test]
    fn self_loops_share_fingerprints() {
        let s = self_loops();
        for k in 0..=4 {
            let mut table = FingerprintTable::new();
            let fps = table.fingerprints(&s, k);
            assert_eq!(fps[0], fps[1]);
            assert_eq!(fps[0].depth(), k);
        }
    }

    #[test]
    fn chain_lengths_separate_at_the_right_depth() {
        let s = System::lts(&["a"], &["x", "y", "z"], &[("x", "a", "y"), ("y", "a", "z")]).unwrap();
        assert_eq!(fingerprint_partition(&s, 1).num_blocks(), 2);
        assert_eq!(fingerprint_partition(&s, 2).num_blocks(), 3);
        assert_eq!(fingerprint_partition(&s, 3), largest_bisimulation(&s));
    }

    #[test]
    fn dead_states_all_agree() {
        let s = System::lts(&["a", "b"], &["x", "y"], &[]).unwrap();
        let (fx, table) = fingerprint(&s, 0, 3);
        assert_eq!(table.branches(fx).len(), 2);
        assert!(table.branches(fx).iter().all(NestedWeight::is_zero));
        assert_eq!(fingerprint_partition(&s, 3).num_blocks(), 1);
    }

    #[test]
    fn dag_json_names_every_reachable_node() {
        let s = System::lts(&["a"], &["x", "y"], &[("x", "a", "y")]).unwrap();
        let (fx, table) = fingerprint(&s, 0, 2);
        let j = table.to_json(fx, s.ty());
        // x at depth 2 and the dead y at depth 1; the unit is never reached.
        assert_eq!(j["nodes"].as_object().unwrap().len(), 2);
        assert_eq!(j["nodes"][j["root"].to_string()]["depth"], 2);
    }

    #[test]
    fn counts_match_the_closed_form() {
        let lts1 = TypeDescriptor::lts(vec!["a".into()]).unwrap();
        assert_eq!(count_approximants(&lts1, 3).unwrap(), vec![1, 2, 4, 16]);
        let lts2 = TypeDescriptor::lts(vec!["a".into(), "b".into()]).unwrap();
        assert_eq!(count_approximants(&lts2, 2).unwrap(), vec![1, 4, 256]);
        let nested = TypeDescriptor::new(vec![
            Component::new(vec!["a".into()], vec![Monoid::bool_or(), Monoid::bool_or()]),
            Component::new(vec!["b".into()], vec![Monoid::bool_or()]),
        ])
        .unwrap();
        for (ty, depth) in [(lts1, 4), (lts2, 2), (nested, 1)] {
            assert_eq!(count_approximants(&ty, depth).unwrap(), closed_form(&ty, depth));
        }
    }

    #[test]
    fn infinite_monoids_are_refused() {
        let ty = TypeDescriptor::wlts(vec!["a".into()], Monoid::nat_plus()).unwrap();
        assert!(matches!(count_approximants(&ty, 1), Err(BisimError::InfiniteMonoid(_))));
    }

    #[test]
    fn oversized_levels_are_refused() {
        let lts1 = TypeDescriptor::lts(vec!["a".into()]).unwrap();
        assert!(matches!(count_approximants(&lts1, 5), Err(BisimError::CountOverflow { depth: 5, .. })));
    }
}
