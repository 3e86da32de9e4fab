//! Finitely supported weight functions and their pushforward.
//!
//! A [`WeightFunction`] stores only its support, sorted by key, so that
//! structural equality coincides with extensional equality. The monoid is
//! not stored with the function; every operation that needs addition takes
//! it as an argument. [`NestedWeight`] stacks weight functions for FuTS
//! behaviour types `F_{M0}(F_{M1}(... F_{Mm} X))`.

use std::fmt;

use crate::monoid::{Monoid, MonoidError, Value};

/// Index of a state in its system's declaration order.
pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("value {value} is not in the carrier of `{monoid}`")]
    NotInCarrier { monoid: String, value: String },
    #[error("map undefined on support key {0}")]
    Undefined(String),
    #[error("expected {expected} levels of nesting, found {found}")]
    Depth { expected: usize, found: usize },
    #[error("`{0}` is not a power monoid")]
    NotPower(String),
    #[error("currying over {labels} labels given {parts} weight functions")]
    Arity { labels: usize, parts: usize },
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

/// A finitely supported map `K -> M`, stored as its sorted support.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightFunction<K> {
    entries: Vec<(K, Value)>,
}

impl<K> Default for WeightFunction<K> {
    fn default() -> Self {
        WeightFunction { entries: Vec::new() }
    }
}

impl<K: Ord + Clone> WeightFunction<K> {
    /// The function with empty support.
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn singleton(monoid: &Monoid, key: K, value: Value) -> Self {
        Self::normalized(monoid, vec![(key, value)])
    }

    /// Builds a weight function from a formal sum: duplicate keys are added
    /// and zero values dropped.
    pub fn from_pairs(monoid: &Monoid, pairs: impl IntoIterator<Item = (K, Value)>) -> Result<Self, WeightError> {
        let pairs: Vec<(K, Value)> = pairs.into_iter().collect();
        if let Some((_, v)) = pairs.iter().find(|(_, v)| !monoid.contains(v)) {
            return Err(WeightError::NotInCarrier { monoid: monoid.name().to_string(), value: format!("{v:?}") });
        }
        Ok(Self::normalized(monoid, pairs))
    }

    /// Like [`WeightFunction::from_pairs`] for values already known to be
    /// in the carrier.
    pub(crate) fn normalized(monoid: &Monoid, mut pairs: Vec<(K, Value)>) -> Self {
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut entries: Vec<(K, Value)> = Vec::with_capacity(pairs.len());
        for (k, v) in pairs {
            match entries.last_mut() {
                Some((last, acc)) if *last == k => *acc = monoid.add(acc, &v),
                _ => entries.push((k, v)),
            }
        }
        entries.retain(|(_, v)| !monoid.is_zero(v));
        WeightFunction { entries }
    }

    pub fn entries(&self) -> &[(K, Value)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(K, Value)> {
        self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.entries.iter().map(|(k, _)| k)
    }

    pub fn get(&self, key: &K) -> Option<&Value> {
        self.entries.binary_search_by(|(k, _)| k.cmp(key)).ok().map(|i| &self.entries[i].1)
    }

    /// Value at `key`, with zero outside the support.
    pub fn value_at(&self, monoid: &Monoid, key: &K) -> Value {
        self.get(key).cloned().unwrap_or_else(|| monoid.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of all weights.
    pub fn total(&self, monoid: &Monoid) -> Value {
        monoid.sum(self.entries.iter().map(|(_, v)| v))
    }

    /// The functorial action: `y ↦ Σ_{f(x) = y} φ(x)`.
    pub fn push_forward<K2: Ord + Clone>(&self, monoid: &Monoid, mut f: impl FnMut(&K) -> K2) -> WeightFunction<K2> {
        WeightFunction::normalized(monoid, self.entries.iter().map(|(k, v)| (f(k), v.clone())).collect())
    }

    /// Pushforward along a partial map, failing if it is undefined on the
    /// support.
    pub fn try_push_forward<K2: Ord + Clone, E>(
        &self,
        monoid: &Monoid,
        mut f: impl FnMut(&K) -> Result<K2, E>,
    ) -> Result<WeightFunction<K2>, E> {
        let mapped = self
            .entries
            .iter()
            .map(|(k, v)| Ok((f(k)?, v.clone())))
            .collect::<Result<Vec<_>, E>>()?;
        Ok(WeightFunction::normalized(monoid, mapped))
    }
}

impl WeightFunction<StateId> {
    /// Pushforward along a state map given as a lookup table.
    pub fn push_forward_by(&self, monoid: &Monoid, map: &[StateId]) -> Result<Self, WeightError> {
        self.try_push_forward(monoid, |&x| map.get(x).copied().ok_or_else(|| WeightError::Undefined(x.to_string())))
    }
}

/// Currying isomorphism `(F_M X)^A ≅ F_{M^A} X`.
///
/// `parts[i]` is the weight function at the `i`-th label of `power`.
pub fn curry<K: Ord + Clone>(power: &Monoid, parts: &[WeightFunction<K>]) -> Result<WeightFunction<K>, WeightError> {
    let (inner, labels) = power.power_labels().ok_or_else(|| WeightError::NotPower(power.name().to_string()))?;
    if labels.len() != parts.len() {
        return Err(WeightError::Arity { labels: labels.len(), parts: parts.len() });
    }
    let mut keys: Vec<&K> = parts.iter().flat_map(|p| p.support()).collect();
    keys.sort();
    keys.dedup();
    let entries = keys
        .into_iter()
        .map(|k| (k.clone(), Value::Tuple(parts.iter().map(|p| p.value_at(inner, k)).collect())))
        .collect();
    Ok(WeightFunction::normalized(power, entries))
}

/// Inverse of [`curry`]: one weight function per label of `power`.
pub fn uncurry<K: Ord + Clone>(power: &Monoid, phi: &WeightFunction<K>) -> Result<Vec<WeightFunction<K>>, WeightError> {
    let (inner, labels) = power.power_labels().ok_or_else(|| WeightError::NotPower(power.name().to_string()))?;
    (0..labels.len())
        .map(|i| {
            let pairs = phi
                .entries()
                .iter()
                .map(|(k, v)| match v {
                    Value::Tuple(xs) if xs.len() == labels.len() => Ok((k.clone(), xs[i].clone())),
                    other => Err(WeightError::NotInCarrier { monoid: power.name().to_string(), value: format!("{other:?}") }),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(WeightFunction::normalized(inner, pairs))
        })
        .collect()
}

/// An element of `F_{M0}(F_{M1}(... F_{Mm} K))` for a stack `[M0, ..., Mm]`.
///
/// The stack lives in the type descriptor, not in the value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NestedWeight<K> {
    /// Innermost level: weights on keys.
    Leaf(WeightFunction<K>),
    /// Outer level: weights on canonical inner nested weights.
    Node(WeightFunction<NestedWeight<K>>),
}

impl<K: Ord + Clone> NestedWeight<K> {
    /// The zero element for a stack of `levels` monoids.
    pub fn zero(levels: usize) -> Self {
        if levels <= 1 {
            NestedWeight::Leaf(WeightFunction::zero())
        } else {
            NestedWeight::Node(WeightFunction::zero())
        }
    }

    /// `{…{key ↦ wₘ}… ↦ w₀}` where each `wᵢ` is the nonzero witness of the
    /// stack's `i`-th monoid.
    pub fn singleton_chain(stack: &[Monoid], key: K) -> Self {
        let (inner, outer) = stack.split_last().expect("nonempty stack");
        let mut nw = NestedWeight::Leaf(WeightFunction::singleton(inner, key, inner.nonzero_witness().clone()));
        for m in outer.iter().rev() {
            nw = NestedWeight::Node(WeightFunction::singleton(m, nw, m.nonzero_witness().clone()));
        }
        nw
    }

    pub fn is_zero(&self) -> bool {
        match self {
            NestedWeight::Leaf(w) => w.is_zero(),
            NestedWeight::Node(w) => w.is_zero(),
        }
    }

    /// Checks that the nesting depth matches `levels` everywhere.
    pub fn check_depth(&self, levels: usize) -> Result<(), WeightError> {
        match self {
            NestedWeight::Leaf(_) if levels == 1 => Ok(()),
            NestedWeight::Node(w) if levels > 1 => w.support().try_for_each(|k| k.check_depth(levels - 1)),
            NestedWeight::Leaf(_) => Err(WeightError::Depth { expected: levels, found: 1 }),
            NestedWeight::Node(_) => Err(WeightError::Depth { expected: levels, found: 2 }),
        }
    }

    /// Every key at the innermost level.
    pub fn leaf_keys(&self) -> Vec<&K> {
        let mut out = Vec::new();
        self.collect_leaf_keys(&mut out);
        out
    }

    fn collect_leaf_keys<'a>(&'a self, out: &mut Vec<&'a K>) {
        match self {
            NestedWeight::Leaf(w) => out.extend(w.support()),
            NestedWeight::Node(w) => w.support().for_each(|k| k.collect_leaf_keys(out)),
        }
    }

    /// Applies `f` at the innermost level and re-canonicalizes outward,
    /// merging inner weights that become equal.
    pub fn try_push_forward<K2: Ord + Clone, E>(
        &self,
        stack: &[Monoid],
        f: &mut impl FnMut(&K) -> Result<K2, E>,
    ) -> Result<NestedWeight<K2>, E> {
        match self {
            NestedWeight::Leaf(w) => Ok(NestedWeight::Leaf(w.try_push_forward(stack.last().expect("nonempty stack"), |k| f(k))?)),
            NestedWeight::Node(w) => {
                let (outer, rest) = stack.split_first().expect("nonempty stack");
                Ok(NestedWeight::Node(w.try_push_forward(outer, |inner| inner.try_push_forward(rest, f))?))
            }
        }
    }

    pub fn push_forward<K2: Ord + Clone>(&self, stack: &[Monoid], mut f: impl FnMut(&K) -> K2) -> NestedWeight<K2> {
        let result: Result<_, std::convert::Infallible> = self.try_push_forward(stack, &mut |k| Ok(f(k)));
        match result {
            Ok(nw) => nw,
            Err(never) => match never {},
        }
    }
}

impl NestedWeight<StateId> {
    pub fn push_forward_by(&self, stack: &[Monoid], map: &[StateId]) -> Result<Self, WeightError> {
        self.try_push_forward(stack, &mut |&x| map.get(x).copied().ok_or_else(|| WeightError::Undefined(x.to_string())))
    }
}

impl<K: fmt::Debug> fmt::Display for WeightFunction<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k:?}↦{v:?}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nat(n: u64) -> Value {
        Value::nat(n)
    }

    fn wf(pairs: &[(usize, u64)]) -> WeightFunction<usize> {
        WeightFunction::from_pairs(&Monoid::nat_plus(), pairs.iter().map(|&(k, v)| (k, nat(v)))).unwrap()
    }

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn make_merges_and_drops_zero() {
        assert_eq!(wf(&[(0, 2), (0, 3)]).entries(), &[(0, nat(5))]);
        assert!(wf(&[(0, 0)]).is_zero());
        let b = Monoid::bool_or();
        let w = WeightFunction::from_pairs(&b, vec![(0usize, Value::Bool(true)), (1, Value::Bool(false))]).unwrap();
        assert_eq!(w.entries(), &[(0, Value::Bool(true))]);
    }

    #[test]
    fn make_rejects_foreign_values() {
        let err = WeightFunction::from_pairs(&Monoid::nat_plus(), vec![(0usize, Value::Bool(true))]);
        assert!(matches!(err, Err(WeightError::NotInCarrier { .. })));
    }

    #[test]
    fn pushforward_sums_fibres() {
        let m = Monoid::nat_plus();
        assert_eq!(wf(&[(0, 2), (1, 3)]).push_forward_by(&m, &[2, 2, 2]).unwrap(), wf(&[(2, 5)]));
        assert_eq!(wf(&[(0, 2)]).push_forward_by(&m, &[0]).unwrap(), wf(&[(0, 2)]));
        let b = Monoid::bool_or();
        let w = WeightFunction::from_pairs(&b, vec![(0usize, Value::Bool(true)), (1, Value::Bool(true))]).unwrap();
        assert_eq!(w.push_forward_by(&b, &[2, 2]).unwrap().entries(), &[(2, Value::Bool(true))]);
    }

    #[test]
    fn pushforward_outside_domain_fails() {
        let err = wf(&[(3, 1)]).push_forward_by(&Monoid::nat_plus(), &[0, 1]);
        assert_eq!(err, Err(WeightError::Undefined("3".into())));
    }

    #[test]
    fn nested_pushforward_relabels_and_merges() {
        let stack = [Monoid::bool_or(), Monoid::nat_plus()];
        let tt = Value::Bool(true);
        let inner = |k: usize| NestedWeight::Leaf(wf(&[(k, 1)]));
        let one = NestedWeight::Node(WeightFunction::from_pairs(&stack[0], vec![(inner(0), tt.clone())]).unwrap());
        assert_eq!(
            one.push_forward_by(&stack, &[2, 2, 2]).unwrap(),
            NestedWeight::Node(WeightFunction::singleton(&stack[0], inner(2), tt.clone()))
        );
        let two = NestedWeight::Node(
            WeightFunction::from_pairs(&stack[0], vec![(inner(0), tt.clone()), (inner(1), tt.clone())]).unwrap(),
        );
        assert_eq!(two.leaf_keys().len(), 2);
        let pushed = two.push_forward_by(&stack, &[2, 2, 2]).unwrap();
        assert_eq!(pushed, NestedWeight::Node(WeightFunction::singleton(&stack[0], inner(2), tt)));
        assert_eq!(two.push_forward_by(&stack, &[0, 1, 2]).unwrap(), two);
    }

    #[test]
    fn nested_outer_weights_add_on_collision() {
        let stack = [Monoid::nat_plus(), Monoid::nat_plus()];
        let inner = |k: usize| NestedWeight::Leaf(wf(&[(k, 1)]));
        let nw = NestedWeight::Node(WeightFunction::from_pairs(&stack[0], vec![(inner(0), nat(2)), (inner(1), nat(3))]).unwrap());
        let pushed = nw.push_forward_by(&stack, &[0, 0]).unwrap();
        assert_eq!(pushed, NestedWeight::Node(WeightFunction::singleton(&stack[0], inner(0), nat(5))));
    }

    #[test]
    fn singleton_chain_depth() {
        let stack = [Monoid::bool_or(), Monoid::nat_plus(), Monoid::int_plus()];
        let nw = NestedWeight::singleton_chain(&stack, 4usize);
        nw.check_depth(3).unwrap();
        assert!(nw.check_depth(2).is_err());
        assert_eq!(nw.leaf_keys(), vec![&4]);
    }

    #[test]
    fn curry_examples() {
        let p = Monoid::power(Monoid::nat_plus(), labels(&["a", "b"])).unwrap();
        let t = |a, b| Value::Tuple(vec![nat(a), nat(b)]);
        let parts = [wf(&[(0, 1)]), wf(&[(0, 2), (1, 1)])];
        let curried = curry(&p, &parts).unwrap();
        assert_eq!(curried.entries(), &[(0, t(1, 2)), (1, t(0, 1))]);
        assert_eq!(uncurry(&p, &curried).unwrap(), parts.to_vec());
        assert!(curry(&p, &[wf(&[]), wf(&[])]).unwrap().is_zero());

        let single = Monoid::power(Monoid::nat_plus(), labels(&["a"])).unwrap();
        let c = curry(&single, &[wf(&[(0, 3), (2, 1)])]).unwrap();
        assert_eq!(c.entries(), &[(0, Value::Tuple(vec![nat(3)])), (2, Value::Tuple(vec![nat(1)]))]);
    }

    #[test]
    fn uncurry_examples() {
        let p = Monoid::power(Monoid::nat_plus(), labels(&["a", "b"])).unwrap();
        let phi = WeightFunction::from_pairs(&p, vec![(0usize, Value::Tuple(vec![nat(0), nat(1)]))]).unwrap();
        assert_eq!(uncurry(&p, &phi).unwrap(), vec![wf(&[]), wf(&[(0, 1)])]);
        assert_eq!(uncurry(&p, &WeightFunction::zero()).unwrap(), vec![wf(&[]), wf(&[])]);
        assert!(matches!(uncurry(&Monoid::nat_plus(), &wf(&[])), Err(WeightError::NotPower(_))));
    }

    fn arb_wf(keys: usize) -> impl Strategy<Value = WeightFunction<usize>> {
        prop::collection::vec((0..keys, 0u64..4), 0..6).prop_map(|pairs| {
            WeightFunction::from_pairs(&Monoid::nat_plus(), pairs.into_iter().map(|(k, v)| (k, nat(v)))).unwrap()
        })
    }

    fn arb_nested(keys: usize) -> impl Strategy<Value = NestedWeight<usize>> {
        prop::collection::vec((arb_wf(keys), 0u64..3), 0..4).prop_map(|pairs| {
            let outer = Monoid::nat_plus();
            NestedWeight::Node(WeightFunction::normalized(
                &outer,
                pairs.into_iter().map(|(w, v)| (NestedWeight::Leaf(w), nat(v))).collect(),
            ))
        })
    }

    proptest! {
        #[test]
        fn functor_laws(phi in arb_wf(6), f in prop::collection::vec(0usize..4, 6), g in prop::collection::vec(0usize..5, 4)) {
            let m = Monoid::nat_plus();
            let id: Vec<usize> = (0..6).collect();
            prop_assert_eq!(phi.push_forward_by(&m, &id).unwrap(), phi.clone());
            let gf: Vec<usize> = f.iter().map(|&y| g[y]).collect();
            let stepwise = phi.push_forward_by(&m, &f).unwrap().push_forward_by(&m, &g).unwrap();
            prop_assert_eq!(phi.push_forward_by(&m, &gf).unwrap(), stepwise);
        }

        #[test]
        fn nested_functor_laws(nw in arb_nested(6), f in prop::collection::vec(0usize..4, 6), g in prop::collection::vec(0usize..5, 4)) {
            let stack = [Monoid::nat_plus(), Monoid::nat_plus()];
            let id: Vec<usize> = (0..6).collect();
            prop_assert_eq!(nw.push_forward_by(&stack, &id).unwrap(), nw.clone());
            let gf: Vec<usize> = f.iter().map(|&y| g[y]).collect();
            let stepwise = nw.push_forward_by(&stack, &f).unwrap().push_forward_by(&stack, &g).unwrap();
            prop_assert_eq!(nw.push_forward_by(&stack, &gf).unwrap(), stepwise);
        }

        #[test]
        fn mass_is_conserved(phi in arb_wf(6), f in prop::collection::vec(0usize..3, 6)) {
            let m = Monoid::nat_plus();
            prop_assert_eq!(phi.push_forward_by(&m, &f).unwrap().total(&m), phi.total(&m));
        }

        #[test]
        fn normalization_is_idempotent(phi in arb_wf(6)) {
            let m = Monoid::nat_plus();
            let again = WeightFunction::from_pairs(&m, phi.entries().to_vec()).unwrap();
            prop_assert_eq!(again, phi);
        }

        #[test]
        fn curry_is_a_natural_bijection(parts in prop::collection::vec(arb_wf(5), 3), f in prop::collection::vec(0usize..3, 5)) {
            let m = Monoid::nat_plus();
            let p = Monoid::power(m.clone(), labels(&["a", "b", "c"])).unwrap();
            let curried = curry(&p, &parts).unwrap();
            prop_assert_eq!(uncurry(&p, &curried).unwrap(), parts.clone());
            prop_assert_eq!(curry(&p, &uncurry(&p, &curried).unwrap()).unwrap(), curried.clone());
            let pushed_parts: Vec<_> = parts.iter().map(|w| w.push_forward_by(&m, &f).unwrap()).collect();
            prop_assert_eq!(curry(&p, &pushed_parts).unwrap(), curried.push_forward_by(&p, &f).unwrap());
        }
    }
}
