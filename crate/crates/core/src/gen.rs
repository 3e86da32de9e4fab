//! Seeded generators of small random systems.
//!
//! Weights are drawn from a handful of small values so that coincidences,
//! and hence nontrivial bisimulations, are common. With probability one half
//! a state is also cloned and the weight flowing into it split between the
//! original and the copy, which produces states bisimilar only because of
//! how class weights add up.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::monoid::{Monoid, Value};
use crate::systems::{Component, System, TypeDescriptor};
use crate::weights::{NestedWeight, StateId, WeightFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Lts,
    WltsNat,
    WltsRational,
    /// `ULTraS(A, ℕ)`, stack `[𝔹, ℕ]`.
    Ultras,
    /// Two components, each with stack `[𝔹, ℕ]`.
    Futs,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Lts, Family::WltsNat, Family::WltsRational, Family::Ultras, Family::Futs];

    pub fn name(self) -> &'static str {
        match self {
            Family::Lts => "lts",
            Family::WltsNat => "wlts-nat",
            Family::WltsRational => "wlts-rational",
            Family::Ultras => "ultras",
            Family::Futs => "futs",
        }
    }

    pub fn parse(name: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == name)
    }

    fn descriptor(self, rng: &mut impl Rng, max_labels: usize) -> TypeDescriptor {
        let labels = |rng: &mut dyn rand::RngCore, prefix: &str| -> Vec<String> {
            let n = rng.gen_range(1..=max_labels);
            (0..n).map(|i| format!("{prefix}{i}")).collect()
        };
        let ultras_stack = || vec![Monoid::bool_or(), Monoid::nat_plus()];
        let components = match self {
            Family::Lts => vec![Component::new(labels(rng, "a"), vec![Monoid::bool_or()])],
            Family::WltsNat => vec![Component::new(labels(rng, "a"), vec![Monoid::nat_plus()])],
            Family::WltsRational => vec![Component::new(labels(rng, "a"), vec![Monoid::rational_plus()])],
            Family::Ultras => vec![Component::new(labels(rng, "a"), ultras_stack())],
            Family::Futs => vec![
                Component::new(labels(rng, "a"), ultras_stack()),
                Component::new(labels(rng, "b"), ultras_stack()),
            ],
        };
        TypeDescriptor::new(components).expect("generated descriptors are valid")
    }
}

fn small_value(m: &Monoid, rng: &mut impl Rng) -> Value {
    match m.kind() {
        crate::monoid::MonoidKind::BoolOr => Value::Bool(true),
        crate::monoid::MonoidKind::RationalPlus => [Value::rat(1, 2), Value::rat(1, 1), Value::rat(3, 2)].choose(rng).unwrap().clone(),
        _ => Value::nat(rng.gen_range(1..=2)),
    }
}

fn random_leaf(m: &Monoid, n: usize, rng: &mut impl Rng) -> WeightFunction<StateId> {
    let support = rng.gen_range(0..=2.min(n));
    let pairs = (0..support).map(|_| (rng.gen_range(0..n), small_value(m, rng))).collect();
    WeightFunction::normalized(m, pairs)
}

fn random_nested(stack: &[Monoid], n: usize, rng: &mut impl Rng) -> NestedWeight<StateId> {
    match stack {
        [m] => NestedWeight::Leaf(random_leaf(m, n, rng)),
        [outer, rest @ ..] => {
            let size = rng.gen_range(0..=2);
            let pairs = (0..size).map(|_| (random_nested(rest, n, rng), small_value(outer, rng))).collect();
            NestedWeight::Node(WeightFunction::normalized(outer, pairs))
        }
        [] => unreachable!("stacks are nonempty"),
    }
}

/// Splits `v` into parts for the original and the clone; `None` means no
/// weight on that side.
fn split_value(m: &Monoid, v: &Value, rng: &mut impl Rng) -> (Option<Value>, Option<Value>) {
    match v {
        Value::Bool(true) => match rng.gen_range(0..3) {
            0 => (Some(v.clone()), None),
            1 => (None, Some(v.clone())),
            _ => (Some(v.clone()), Some(v.clone())),
        },
        Value::Nat(k) if *k >= num::BigUint::from(2u32) => {
            let one = Value::nat(1);
            let rest = Value::Nat(k - 1u32);
            (Some(one), Some(rest))
        }
        Value::Rat(q) => {
            let half = Value::Rat(q / num::BigRational::from_integer(2.into()));
            (Some(half.clone()), Some(half))
        }
        _ if rng.gen_bool(0.5) => (Some(v.clone()), None),
        _ => {
            let _ = m;
            (None, Some(v.clone()))
        }
    }
}

fn split_nested(nw: &NestedWeight<StateId>, stack: &[Monoid], y: StateId, copy: StateId, rng: &mut impl Rng) -> NestedWeight<StateId> {
    match nw {
        NestedWeight::Leaf(w) => {
            let m = &stack[stack.len() - 1];
            let mut pairs = Vec::new();
            for (k, v) in w.entries() {
                if *k == y {
                    let (a, b) = split_value(m, v, rng);
                    pairs.extend(a.map(|a| (y, a)));
                    pairs.extend(b.map(|b| (copy, b)));
                } else {
                    pairs.push((*k, v.clone()));
                }
            }
            NestedWeight::Leaf(WeightFunction::normalized(m, pairs))
        }
        NestedWeight::Node(w) => {
            let pairs = w.entries().iter().map(|(k, v)| (split_nested(k, &stack[1..], y, copy, rng), v.clone())).collect();
            NestedWeight::Node(WeightFunction::normalized(&stack[0], pairs))
        }
    }
}

/// One random system of `family` with between 1 and `max_states` states
/// and at most `max_labels` labels per component.
pub fn random_system(family: Family, rng: &mut impl Rng, max_states: usize, max_labels: usize) -> System {
    let ty = family.descriptor(rng, max_labels.max(1));
    let max_states = max_states.max(1);
    let clone = max_states > 1 && rng.gen_bool(0.5);
    let base = if clone { rng.gen_range(1..max_states) } else { rng.gen_range(1..=max_states) };
    let stacks: Vec<Vec<Monoid>> = ty.slot_stacks().into_iter().map(|s| s.to_vec()).collect();
    let mut rows: Vec<Vec<NestedWeight<StateId>>> =
        (0..base).map(|_| stacks.iter().map(|s| random_nested(s, base, rng)).collect()).collect();
    let mut names: Vec<String> = (0..base).map(|i| format!("s{i}")).collect();
    if clone {
        let y = rng.gen_range(0..base);
        let copy = base;
        rows.push(rows[y].clone());
        names.push(format!("s{y}'"));
        for row in rows.iter_mut() {
            for (nw, stack) in row.iter_mut().zip(&stacks) {
                *nw = split_nested(nw, stack, y, copy, rng);
            }
        }
    }
    System::from_parts(ty, names, rows)
}

/// `count` systems of one family from a fixed seed.
pub fn suite(family: Family, count: usize, seed: u64, max_states: usize, max_labels: usize) -> Vec<System> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (family as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    (0..count).map(|_| random_system(family, &mut rng, max_states, max_labels)).collect()
}
