//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's refinement, signature or enumeration code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use qred_core::monoid::Monoid;
use qred_core::systems::TypeDescriptor;
use qred_core::{NestedWeight, Partition, System, Value};

/// Behaviour of one slot with targets replaced by block ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Canon {
    Leaf(BTreeMap<usize, Value>),
    Node(BTreeMap<Canon, Value>),
}

fn accumulate<K: Ord>(m: &Monoid, map: &mut BTreeMap<K, Value>, k: K, v: &Value) {
    let sum = match map.remove(&k) {
        Some(old) => m.add(&old, v),
        None => v.clone(),
    };
    if !m.is_zero(&sum) {
        map.insert(k, sum);
    }
}

pub fn canon(nw: &NestedWeight<usize>, stack: &[Monoid], block: &[usize]) -> Canon {
    match nw {
        NestedWeight::Leaf(w) => {
            let m = stack.last().unwrap();
            let mut map = BTreeMap::new();
            for (k, v) in w.entries() {
                accumulate(m, &mut map, block[*k], v);
            }
            Canon::Leaf(map)
        }
        NestedWeight::Node(w) => {
            let mut map = BTreeMap::new();
            for (k, v) in w.entries() {
                accumulate(&stack[0], &mut map, canon(k, &stack[1..], block), v);
            }
            Canon::Node(map)
        }
    }
}

pub fn row_canon(s: &System, x: usize, block: &[usize]) -> Vec<Canon> {
    let stacks = s.ty().slot_stacks();
    s.row(x).iter().zip(stacks).map(|(nw, st)| canon(nw, st, block)).collect()
}

/// Block ids of a partition given as a restricted growth string.
pub fn naive_is_bisim(s: &System, block: &[usize]) -> bool {
    (0..s.len()).all(|x| (x + 1..s.len()).all(|y| block[x] != block[y] || row_canon(s, x, block) == row_canon(s, y, block)))
}

/// Every restricted growth string of length `n`.
pub fn growth_strings(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for prefix in out {
            let top = prefix.iter().copied().max().map_or(0, |m| m + 1);
            for b in 0..=top {
                let mut p = prefix.clone();
                p.push(b);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

pub fn naive_bisimulations(s: &System) -> Vec<Vec<usize>> {
    growth_strings(s.len()).into_iter().filter(|b| naive_is_bisim(s, b)).collect()
}

/// The passing partition with the fewest blocks; it is unique because
/// bisimulations are closed under joins.
pub fn naive_largest(s: &System) -> Partition {
    let best = naive_bisimulations(s).into_iter().min_by_key(|b| b.iter().copied().max().map_or(0, |m| m + 1)).unwrap();
    Partition::from_keys(&best)
}

/// `|F_0|..|F_depth|` from `|F_{k+1}| = Π_slots |F_{stack} F_k|`.
pub fn closed_form_counts(ty: &TypeDescriptor, depth: usize) -> Vec<u64> {
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
