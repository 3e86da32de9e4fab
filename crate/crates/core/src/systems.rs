//! The finite system model.
//!
//! Every system is a FuTS: a [`TypeDescriptor`] lists components, each a
//! nonempty label set with a stack of weight monoids. LTS, WLTS, WTS and
//! ULTraS are constructors over this single representation.
//!
//! Behaviours are stored per state in *slots*, one per (component, label)
//! pair, flattened in component order.

use serde::Serialize;

use crate::monoid::{Monoid, MonoidKind, Value};
use crate::weights::{NestedWeight, StateId, WeightError, WeightFunction};

/// Label used by single-label (unlabelled) systems.
pub const WTS_LABEL: &str = "*";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SystemError {
    #[error("degenerate type: {0}")]
    Degenerate(String),
    #[error("invalid system: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("bad partition: {0}")]
    Partition(String),
    #[error("bad state map: {0}")]
    StateMap(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    EmptyComponents,
    EmptyLabels,
    DuplicateLabel,
    TrivialMonoid,
    MonoidLaw,
    DuplicateState,
    MissingEntry,
    UndeclaredState,
    WrongDepth,
    ForeignValue,
    NotCanonical,
}

impl ViolationKind {
    /// Violations that make the behaviour type itself degenerate.
    pub fn is_degenerate(self) -> bool {
        matches!(self, ViolationKind::EmptyComponents | ViolationKind::EmptyLabels | ViolationKind::TrivialMonoid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

fn violation(kind: ViolationKind, location: impl Into<String>, message: impl Into<String>) -> Violation {
    Violation { kind, location: location.into(), message: message.into() }
}

/// One factor `(F_{M0} ... F_{Mm} -)^A` of a behaviour type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub labels: Vec<String>,
    /// Outermost monoid first.
    pub stack: Vec<Monoid>,
}

impl Component {
    pub fn new(labels: Vec<String>, stack: Vec<Monoid>) -> Component {
        Component { labels, stack }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDescriptor {
    components: Vec<Component>,
}

impl TypeDescriptor {
    /// A validated descriptor.
    pub fn new(components: Vec<Component>) -> Result<TypeDescriptor, SystemError> {
        let ty = TypeDescriptor { components };
        match ty.violations().into_iter().next() {
            None => Ok(ty),
            Some(v) if v.kind.is_degenerate() => Err(SystemError::Degenerate(v.to_string())),
            Some(v) => Err(SystemError::Invalid(vec![v])),
        }
    }

    /// Builds a descriptor without checking it; see [`TypeDescriptor::violations`].
    pub fn unchecked(components: Vec<Component>) -> TypeDescriptor {
        TypeDescriptor { components }
    }

    pub fn wlts(labels: Vec<String>, monoid: Monoid) -> Result<TypeDescriptor, SystemError> {
        TypeDescriptor::new(vec![Component::new(labels, vec![monoid])])
    }

    /// `LTS(A)`, identified with `WLTS(A, 𝔹)`.
    pub fn lts(labels: Vec<String>) -> Result<TypeDescriptor, SystemError> {
        TypeDescriptor::wlts(labels, Monoid::bool_or())
    }

    /// `ULTraS(A, M)`: the stack `[𝔹, M]`.
    pub fn ultras(labels: Vec<String>, monoid: Monoid) -> Result<TypeDescriptor, SystemError> {
        TypeDescriptor::new(vec![Component::new(labels, vec![Monoid::bool_or(), monoid])])
    }

    /// A weighted transition system with the single label [`WTS_LABEL`].
    pub fn wts(monoid: Monoid) -> Result<TypeDescriptor, SystemError> {
        TypeDescriptor::wlts(vec![WTS_LABEL.to_string()], monoid)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Total number of (component, label) slots.
    pub fn slot_count(&self) -> usize {
        self.components.iter().map(|c| c.labels.len()).sum()
    }

    /// `(component, label index)` for every slot, in slot order.
    pub fn slots(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.components.iter().enumerate().flat_map(|(i, c)| (0..c.labels.len()).map(move |a| (i, a)))
    }

    pub fn slot_index(&self, component: usize, label: &str) -> Option<usize> {
        let c = self.components.get(component)?;
        let a = c.labels.iter().position(|l| l == label)?;
        Some(self.components[..component].iter().map(|c| c.labels.len()).sum::<usize>() + a)
    }

    /// Monoid stacks of every slot, in slot order.
    pub fn slot_stacks(&self) -> Vec<&[Monoid]> {
        self.components.iter().flat_map(|c| std::iter::repeat_n(c.stack.as_slice(), c.labels.len())).collect()
    }

    pub fn slot_name(&self, slot: usize) -> String {
        let (c, a) = self.slots().nth(slot).expect("slot in range");
        format!("c{c}:{}", self.components[c].labels[a])
    }

    /// Single component with a single-monoid stack.
    pub fn is_wlts(&self) -> bool {
        self.components.len() == 1 && self.components[0].stack.len() == 1
    }

    pub fn is_lts(&self) -> bool {
        self.is_wlts() && self.components[0].stack[0] == Monoid::bool_or()
    }

    pub fn is_ultras(&self) -> bool {
        self.components.len() == 1 && self.components[0].stack.len() == 2 && self.components[0].stack[0] == Monoid::bool_or()
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.components.is_empty() {
            out.push(violation(ViolationKind::EmptyComponents, "type", "a behaviour type needs at least one component"));
        }
        for (i, c) in self.components.iter().enumerate() {
            let loc = format!("type[{i}]");
            if c.labels.is_empty() {
                out.push(violation(ViolationKind::EmptyLabels, &loc, "label set is empty"));
            }
            for (j, l) in c.labels.iter().enumerate() {
                if c.labels[..j].contains(l) {
                    out.push(violation(ViolationKind::DuplicateLabel, &loc, format!("label `{l}` declared twice")));
                }
            }
            if c.stack.is_empty() {
                out.push(violation(ViolationKind::EmptyComponents, &loc, "monoid stack is empty"));
            }
            for (k, m) in c.stack.iter().enumerate() {
                let loc = format!("{loc}.stack[{k}]");
                if m.is_trivial() {
                    out.push(violation(ViolationKind::TrivialMonoid, &loc, format!("monoid `{m}` is trivial")));
                }
                if !table_laws_hold(m) {
                    out.push(violation(ViolationKind::MonoidLaw, &loc, format!("`{m}` is not a commutative monoid")));
                }
            }
        }
        out
    }
}

/// A finite system `(X, α)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct System {
    ty: TypeDescriptor,
    states: Vec<String>,
    rows: Vec<Vec<NestedWeight<StateId>>>,
}

impl System {
    /// A system where every state is deadlocked.
    pub fn new(ty: TypeDescriptor, states: Vec<String>) -> System {
        let stacks = ty.slot_stacks();
        let row: Vec<_> = stacks.iter().map(|s| NestedWeight::zero(s.len())).collect();
        let rows = vec![row; states.len()];
        System { ty, states, rows }
    }

    /// Assembles a system from raw rows without validation. `rows[x][slot]`
    /// is the behaviour of state `x` at the given slot.
    pub fn from_parts(ty: TypeDescriptor, states: Vec<String>, rows: Vec<Vec<NestedWeight<StateId>>>) -> System {
        System { ty, states, rows }
    }

    /// An LTS from `(source, label, target)` triples.
    pub fn lts(labels: &[&str], states: &[&str], edges: &[(&str, &str, &str)]) -> Result<System, SystemError> {
        let b = Monoid::bool_or();
        let weighted: Vec<_> = edges.iter().map(|&(x, a, y)| (x, a, y, Value::Bool(true))).collect();
        System::wlts(labels, b, states, &weighted)
    }

    /// A WLTS from `(source, label, target, weight)` quadruples; weights of
    /// repeated edges are added.
    pub fn wlts(
        labels: &[&str],
        monoid: Monoid,
        states: &[&str],
        edges: &[(&str, &str, &str, Value)],
    ) -> Result<System, SystemError> {
        let ty = TypeDescriptor::wlts(labels.iter().map(|s| s.to_string()).collect(), monoid.clone())?;
        let mut sys = System::new(ty, states.iter().map(|s| s.to_string()).collect());
        let mut pending: Vec<Vec<Vec<(StateId, Value)>>> = vec![vec![Vec::new(); labels.len()]; states.len()];
        for (x, a, y, w) in edges {
            let xi = sys.state_index(x).ok_or_else(|| SystemError::UnknownState(x.to_string()))?;
            let yi = sys.state_index(y).ok_or_else(|| SystemError::UnknownState(y.to_string()))?;
            let slot = sys.ty.slot_index(0, a).ok_or_else(|| SystemError::UnknownLabel(a.to_string()))?;
            pending[xi][slot].push((yi, w.clone()));
        }
        for (x, row) in pending.into_iter().enumerate() {
            for (slot, pairs) in row.into_iter().enumerate() {
                sys.rows[x][slot] = NestedWeight::Leaf(WeightFunction::from_pairs(&monoid, pairs)?);
            }
        }
        Ok(sys)
    }

    pub fn ty(&self) -> &TypeDescriptor {
        &self.ty
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn state_name(&self, x: StateId) -> &str {
        &self.states[x]
    }

    pub fn row(&self, x: StateId) -> &[NestedWeight<StateId>] {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[Vec<NestedWeight<StateId>>] {
        &self.rows
    }

    pub fn behaviour(&self, x: StateId, slot: usize) -> &NestedWeight<StateId> {
        &self.rows[x][slot]
    }

    /// Sets a behaviour; the weight must already be canonical for the
    /// slot's stack.
    pub fn set_behaviour(&mut self, x: StateId, slot: usize, nw: NestedWeight<StateId>) {
        self.rows[x][slot] = nw;
    }

    /// Every [`System`] invariant, each violation located.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = self.ty.violations();
        for (i, s) in self.states.iter().enumerate() {
            if self.states[..i].contains(s) {
                out.push(violation(ViolationKind::DuplicateState, format!("states[{i}]"), format!("state `{s}` declared twice")));
            }
        }
        let stacks = self.ty.slot_stacks();
        for (x, row) in self.rows.iter().enumerate() {
            let state = self.states.get(x).cloned().unwrap_or_else(|| format!("#{x}"));
            if row.len() != stacks.len() {
                out.push(violation(
                    ViolationKind::MissingEntry,
                    format!("state `{state}`"),
                    format!("expected {} behaviour entries, found {}", stacks.len(), row.len()),
                ));
                continue;
            }
            for (slot, nw) in row.iter().enumerate() {
                let loc = format!("state `{state}`, {}", self.ty.slot_name(slot));
                if let Err(e) = nw.check_depth(stacks[slot].len()) {
                    out.push(violation(ViolationKind::WrongDepth, loc, e.to_string()));
                    continue;
                }
                if let Some(bad) = nw.leaf_keys().into_iter().find(|&&y| y >= self.states.len()) {
                    out.push(violation(ViolationKind::UndeclaredState, &loc, format!("weight references undeclared state #{bad}")));
                    continue;
                }
                if !values_in_carrier(nw, stacks[slot]) {
                    out.push(violation(ViolationKind::ForeignValue, &loc, "weight outside its monoid's carrier"));
                    continue;
                }
                if nw.push_forward(stacks[slot], |&y| y) != *nw {
                    out.push(violation(ViolationKind::NotCanonical, &loc, "weight is not in canonical form"));
                }
            }
        }
        if self.rows.len() != self.states.len() {
            out.push(violation(
                ViolationKind::MissingEntry,
                "structure",
                format!("{} states but {} behaviour rows", self.states.len(), self.rows.len()),
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<(), SystemError> {
        let violations = self.violations();
        match violations.iter().find(|v| v.kind.is_degenerate()) {
            Some(v) => Err(SystemError::Degenerate(v.to_string())),
            None if violations.is_empty() => Ok(()),
            None => Err(SystemError::Invalid(violations)),
        }
    }
}

/// Built-in monoids satisfy the laws; tables are checked exhaustively.
fn table_laws_hold(m: &Monoid) -> bool {
    match m.kind() {
        MonoidKind::Table(_) => m.check_laws(&[]).is_ok_and(|r| r.associativity.holds && r.commutativity.holds && r.unit.holds),
        MonoidKind::Power { inner, .. } => table_laws_hold(inner),
        _ => true,
    }
}

fn values_in_carrier(nw: &NestedWeight<StateId>, stack: &[Monoid]) -> bool {
    match nw {
        NestedWeight::Leaf(w) => w.entries().iter().all(|(_, v)| stack[stack.len() - 1].contains(v)),
        NestedWeight::Node(w) => w.entries().iter().all(|(k, v)| stack[0].contains(v) && values_in_carrier(k, &stack[1..])),
    }
}

/// A total function between carriers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateMap {
    image: Vec<StateId>,
}

impl StateMap {
    pub fn new(image: Vec<StateId>) -> StateMap {
        StateMap { image }
    }

    pub fn identity(n: usize) -> StateMap {
        StateMap { image: (0..n).collect() }
    }

    pub fn apply(&self, x: StateId) -> StateId {
        self.image[x]
    }

    pub fn as_slice(&self) -> &[StateId] {
        &self.image
    }

    pub fn domain_len(&self) -> usize {
        self.image.len()
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &StateMap) -> StateMap {
        StateMap { image: self.image.iter().map(|&y| then.image[y]).collect() }
    }

    pub fn is_injective(&self) -> bool {
        self.collision().is_none()
    }

    /// Two distinct states with the same image, if any.
    pub fn collision(&self) -> Option<(StateId, StateId)> {
        let mut seen = std::collections::HashMap::new();
        for (x, &y) in self.image.iter().enumerate() {
            if let Some(&first) = seen.get(&y) {
                return Some((first, x));
            }
            seen.insert(y, x);
        }
        None
    }

    pub fn is_surjective(&self, target_len: usize) -> bool {
        let mut hit = vec![false; target_len];
        for &y in &self.image {
            if y < target_len {
                hit[y] = true;
            }
        }
        hit.into_iter().all(|h| h)
    }

    /// Checks the map goes from a carrier of `domain` states into one of
    /// `codomain` states.
    pub fn check(&self, domain: usize, codomain: usize) -> Result<(), SystemError> {
        if self.image.len() != domain {
            return Err(SystemError::StateMap(format!("defined on {} states, source has {domain}", self.image.len())));
        }
        if let Some(&y) = self.image.iter().find(|&&y| y >= codomain) {
            return Err(SystemError::StateMap(format!("image #{y} outside a carrier of {codomain} states")));
        }
        Ok(())
    }

    /// The partition induced by `ker(f)`.
    pub fn kernel(&self) -> Partition {
        Partition::from_keys(&self.image)
    }
}

/// An equivalence relation on `0..n`, stored as canonical blocks: members
/// ascending, blocks ordered by least member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Vec<StateId>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Groups states by an arbitrary key per state.
    pub fn from_keys<K: Eq + std::hash::Hash>(keys: &[K]) -> Partition {
        let mut ids = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<StateId>> = Vec::new();
        let mut block_of = Vec::with_capacity(keys.len());
        for (x, k) in keys.iter().enumerate() {
            let id = *ids.entry(k).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[id].push(x);
            block_of.push(id);
        }
        Partition { blocks, block_of }
    }

    pub fn from_blocks(n: usize, blocks: Vec<Vec<StateId>>) -> Result<Partition, SystemError> {
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(SystemError::Partition("empty block".into()));
            }
            for &x in block {
                if x >= n {
                    return Err(SystemError::Partition(format!("state #{x} outside a carrier of {n}")));
                }
                if owner[x] != usize::MAX {
                    return Err(SystemError::Partition(format!("state #{x} occurs in two blocks")));
                }
                owner[x] = b;
            }
        }
        if let Some(x) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(SystemError::Partition(format!("state #{x} is not covered")));
        }
        Ok(Partition::from_keys(&owner))
    }

    pub fn discrete(n: usize) -> Partition {
        Partition::from_keys(&(0..n).collect::<Vec<_>>())
    }

    pub fn universal(n: usize) -> Partition {
        Partition::from_keys(&vec![(); n])
    }

    /// Size of the carrier.
    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<StateId>] {
        &self.blocks
    }

    pub fn block_of(&self, x: StateId) -> usize {
        self.block_of[x]
    }

    /// The quotient map `x ↦ [x]` as block indices.
    pub fn block_ids(&self) -> &[usize] {
        &self.block_of
    }

    pub fn related(&self, x: StateId, y: StateId) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.block_of.len()
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.len() == coarser.len()
            && self.blocks.iter().all(|b| b.iter().all(|&x| coarser.block_of[x] == coarser.block_of[b[0]]))
    }
}

/// The coproduct `s1 + s2` with its two injections. States are renamed
/// `1:x` and `2:y`.
pub fn disjoint_union(s1: &System, s2: &System) -> Result<(System, StateMap, StateMap), SystemError> {
    if s1.ty != s2.ty {
        return Err(SystemError::TypeMismatch("disjoint union of systems of different types".into()));
    }
    let offset = s1.len();
    let states = s1
        .states
        .iter()
        .map(|s| format!("1:{s}"))
        .chain(s2.states.iter().map(|s| format!("2:{s}")))
        .collect();
    let stacks = s1.ty.slot_stacks();
    let shift = |row: &Vec<NestedWeight<StateId>>, by: usize| -> Vec<NestedWeight<StateId>> {
        row.iter().zip(&stacks).map(|(nw, stack)| nw.push_forward(stack, |&y| y + by)).collect()
    };
    let rows = s1.rows.iter().map(|r| shift(r, 0)).chain(s2.rows.iter().map(|r| shift(r, offset))).collect();
    let left = StateMap::new((0..offset).collect());
    let right = StateMap::new((offset..offset + s2.len()).collect());
    Ok((System { ty: s1.ty.clone(), states, rows }, left, right))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn wlts_builder_transcribes_edges() {
        let s = System::wlts(&["a"], Monoid::nat_plus(), &["x", "y"], &[("x", "a", "y", Value::nat(3))]).unwrap();
        assert_eq!(s.behaviour(0, 0), &NestedWeight::Leaf(WeightFunction::singleton(&Monoid::nat_plus(), 1, Value::nat(3))));
        assert!(s.behaviour(1, 0).is_zero());
        assert!(s.violations().is_empty());
    }

    #[test]
    fn lts_is_wlts_over_booleans() {
        let lts = System::lts(&["a"], &["x", "y"], &[("x", "a", "y")]).unwrap();
        let wlts = System::wlts(&["a"], Monoid::bool_or(), &["x", "y"], &[("x", "a", "y", Value::Bool(true))]).unwrap();
        assert_eq!(lts, wlts);
        assert!(lts.ty().is_lts());
        let ultras = TypeDescriptor::ultras(labels(&["a"]), Monoid::nat_plus()).unwrap();
        assert_eq!(ultras.components()[0].stack, vec![Monoid::bool_or(), Monoid::nat_plus()]);
        assert!(ultras.is_ultras());
    }

    #[test]
    fn empty_labels_are_degenerate() {
        assert!(matches!(TypeDescriptor::lts(vec![]), Err(SystemError::Degenerate(_))));
    }

    #[test]
    fn undeclared_state_is_one_violation() {
        let ty = TypeDescriptor::wlts(labels(&["a"]), Monoid::nat_plus()).unwrap();
        let bad = NestedWeight::Leaf(WeightFunction::singleton(&Monoid::nat_plus(), 7, Value::nat(1)));
        let s = System::from_parts(ty, labels(&["x"]), vec![vec![bad]]);
        let v = s.violations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::UndeclaredState);
    }

    #[test]
    fn trivial_monoid_is_reported() {
        let trivial = Monoid::table("one", labels(&["0"]), vec![labels(&["0"])], "0", "0").unwrap();
        let ty = TypeDescriptor::unchecked(vec![Component::new(labels(&["a"]), vec![trivial])]);
        let s = System::new(ty, labels(&["x"]));
        let v = s.violations();
        assert!(v.iter().any(|v| v.kind == ViolationKind::TrivialMonoid));
        assert!(matches!(s.validate(), Err(SystemError::Degenerate(_))));
    }

    #[test]
    fn wrong_depth_is_reported() {
        let ty = TypeDescriptor::wlts(labels(&["a"]), Monoid::nat_plus()).unwrap();
        let raw: WeightFunction<usize> = WeightFunction::zero();
        let deep = NestedWeight::Node(WeightFunction::singleton(&Monoid::nat_plus(), NestedWeight::Leaf(raw), Value::nat(1)));
        let s = System::from_parts(ty, labels(&["x"]), vec![vec![deep]]);
        assert_eq!(s.violations()[0].kind, ViolationKind::WrongDepth);
    }

    #[test]
    fn partition_basics() {
        let p = Partition::from_blocks(4, vec![vec![3, 1], vec![0], vec![2]]).unwrap();
        assert_eq!(p.blocks(), &[vec![0], vec![1, 3], vec![2]]);
        assert!(p.related(1, 3));
        assert!(Partition::discrete(4).refines(&p));
        assert!(p.refines(&Partition::universal(4)));
        assert!(!Partition::universal(4).refines(&p));
        assert!(Partition::from_blocks(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::from_blocks(2, vec![vec![0, 1], vec![1]]).is_err());
    }

    #[test]
    fn state_map_properties() {
        let f = StateMap::new(vec![1, 1, 0]);
        assert_eq!(f.collision(), Some((0, 1)));
        assert!(f.is_surjective(2));
        assert!(!f.is_surjective(3));
        assert_eq!(f.kernel().blocks(), &[vec![0, 1], vec![2]]);
        assert_eq!(f.then(&StateMap::new(vec![5, 6])).as_slice(), &[6, 6, 5]);
    }

    #[test]
    fn union_sizes_and_empty_unit() {
        let s2 = System::lts(&["a"], &["x", "y"], &[("x", "a", "y")]).unwrap();
        let s3 = System::lts(&["a"], &["p", "q", "r"], &[("r", "a", "p")]).unwrap();
        let (u, l, r) = disjoint_union(&s2, &s3).unwrap();
        assert_eq!(u.len(), 5);
        assert_eq!(r.as_slice(), &[2, 3, 4]);
        assert_eq!(u.behaviour(4, 0).leaf_keys(), vec![&2]);
        assert_eq!(l.as_slice(), &[0, 1]);
        assert!(u.violations().is_empty());

        let empty = System::new(s2.ty().clone(), vec![]);
        let (u, _, _) = disjoint_union(&s2, &empty).unwrap();
        assert_eq!(u.rows(), s2.rows());

        let other = System::wlts(&["a"], Monoid::nat_plus(), &["x"], &[]).unwrap();
        assert!(matches!(disjoint_union(&s2, &other), Err(SystemError::TypeMismatch(_))));
    }
}
