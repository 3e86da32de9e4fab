//! Reduction witnesses between system types.
//!
//! A witness pairs an injective state map `σ^c` from the source carrier into
//! the target carrier with a rule `σ^b` sending each bisimulation of the
//! source to bisimulations of the target. [`verify_system_reduction`] checks
//! that every instantiated pair preserves and reflects relatedness.

use std::collections::HashSet;

use crate::bisim::{largest_bisimulation, BisimError};
use crate::monoid::{Monoid, Value};
use crate::systems::{Component, Partition, StateMap, System, SystemError, TypeDescriptor};
use crate::weights::{curry, uncurry, NestedWeight, WeightError, WeightFunction};

mod verify;
mod witness;

pub use verify::{verify_system_reduction, Check, Counterexample, VerificationReport};
pub use witness::{witness_from_json, witness_to_json};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductError {
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("degenerate target type: {0}")]
    Degenerate(String),
    #[error("middle systems differ: the first witness's target is not the second's source")]
    MiddleMismatch,
    #[error("witnesses come from different constructors ({0} vs {1})")]
    ConstructorMismatch(String, String),
    #[error("constructor `{0}` defines no action on homomorphisms")]
    NoFunctorialAction(String),
    #[error("the given map is not a homomorphism of the source systems")]
    NotHomomorphism,
    #[error("malformed witness: {0}")]
    Format(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Bisim(#[from] BisimError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// How `σ^b` acts on a source bisimulation `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BisimRule {
    /// `R ↦ R`, for witnesses whose state map is a bijection.
    Identity,
    /// `R ↦ σ^c(R) ∪ Δ`, the diagonal over states outside the image.
    PadDiagonal,
    /// An explicit list of `(R, R')` pairs.
    Explicit(Vec<(Partition, Partition)>),
}

impl BisimRule {
    pub fn name(&self) -> &'static str {
        match self {
            BisimRule::Identity => "identity",
            BisimRule::PadDiagonal => "pad-diagonal",
            BisimRule::Explicit(_) => "explicit",
        }
    }

    /// Every `R'` the rule relates to `r`.
    pub fn apply(&self, r: &Partition, sigma: &StateMap, target_len: usize) -> Vec<Partition> {
        match self {
            BisimRule::Identity | BisimRule::PadDiagonal => vec![transport(r, sigma, target_len)],
            BisimRule::Explicit(pairs) => pairs.iter().filter(|(left, _)| left == r).map(|(_, right)| right.clone()).collect(),
        }
    }
}

/// The constructor that produced a witness; it fixes the action on maps
/// used by [`check_reduction_naturality`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constructor {
    LtsToWlts,
    WltsToUltras,
    CurryToWts,
    CurryFromWts,
    /// Target states `offset..offset + len` form the chain gadget, `g_i`
    /// at `offset + i`.
    Synthesized { offset: usize, len: usize },
    Identity,
    Composed,
    Custom,
}

impl Constructor {
    pub fn name(&self) -> &'static str {
        match self {
            Constructor::LtsToWlts => "lts-to-wlts",
            Constructor::WltsToUltras => "wlts-to-ultras",
            Constructor::CurryToWts => "curry-to-wts",
            Constructor::CurryFromWts => "curry-from-wts",
            Constructor::Synthesized { .. } => "synthesized",
            Constructor::Identity => "identity",
            Constructor::Composed => "composed",
            Constructor::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionWitness {
    pub source: System,
    pub target: System,
    pub state_map: StateMap,
    pub rule: BisimRule,
    pub constructor: Constructor,
}

impl ReductionWitness {
    /// Whether `σ^c` hits every target state.
    pub fn is_full(&self) -> bool {
        self.state_map.is_surjective(self.target.len())
    }

    fn is_identity(&self) -> bool {
        self.rule == BisimRule::Identity && self.source == self.target && self.state_map == StateMap::identity(self.source.len())
    }
}

/// The equivalence closure of `{(σx, σx') | x R x'}` on the target carrier,
/// a singleton block for every other target state.
pub fn transport(r: &Partition, sigma: &StateMap, target_len: usize) -> Partition {
    let mut parent: Vec<usize> = (0..target_len).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for block in r.blocks() {
        let root = find(&mut parent, sigma.apply(block[0]));
        for &x in &block[1..] {
            let other = find(&mut parent, sigma.apply(x));
            parent[other] = root;
        }
    }
    let roots: Vec<usize> = (0..target_len).map(|x| find(&mut parent, x)).collect();
    Partition::from_keys(&roots)
}

/// `x ~ x'` iff `σx P σx'`.
pub fn pullback(p: &Partition, sigma: &StateMap) -> Partition {
    Partition::from_keys(&sigma.as_slice().iter().map(|&y| p.block_of(y)).collect::<Vec<_>>())
}

pub fn identity_witness(s: &System) -> ReductionWitness {
    ReductionWitness {
        source: s.clone(),
        target: s.clone(),
        state_map: StateMap::identity(s.len()),
        rule: BisimRule::Identity,
        constructor: Constructor::Identity,
    }
}

/// An LTS read as a WLTS over 𝔹. Both share one representation, so the
/// target is the source itself.
pub fn lts_to_wlts(s: &System) -> Result<ReductionWitness, ReductError> {
    if !s.ty().is_lts() {
        return Err(ReductError::Unsupported("expected an LTS: one component with stack [bool-or]".into()));
    }
    Ok(ReductionWitness {
        source: s.clone(),
        target: s.clone(),
        state_map: StateMap::identity(s.len()),
        rule: BisimRule::Identity,
        constructor: Constructor::LtsToWlts,
    })
}

/// Treatment of empty weight functions when casting to a ULTraS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroEntries {
    /// `{} ↦ {{} ↦ tt}` like every other entry.
    #[default]
    Wrap,
    /// `{} ↦ {}`.
    Drop,
}

/// Casts a WLTS to a functional ULTraS by wrapping each behaviour into a
/// singleton.
pub fn wlts_to_ultras(s: &System, zero: ZeroEntries) -> Result<ReductionWitness, ReductError> {
    if !s.ty().is_wlts() {
        return Err(ReductError::Unsupported("expected a WLTS: one component with a single-monoid stack".into()));
    }
    let c = &s.ty().components()[0];
    let ty = TypeDescriptor::ultras(c.labels.clone(), c.stack[0].clone())?;
    let b = Monoid::bool_or();
    let rows = s
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|nw| {
                    if zero == ZeroEntries::Drop && nw.is_zero() {
                        NestedWeight::Node(WeightFunction::zero())
                    } else {
                        NestedWeight::Node(WeightFunction::singleton(&b, nw.clone(), Value::Bool(true)))
                    }
                })
                .collect()
        })
        .collect();
    let target = System::from_parts(ty, s.states().to_vec(), rows);
    Ok(ReductionWitness {
        source: s.clone(),
        target,
        state_map: StateMap::identity(s.len()),
        rule: BisimRule::Identity,
        constructor: Constructor::WltsToUltras,
    })
}

/// A ULTraS whose every outer level is empty or a singleton.
pub fn is_functional(s: &System) -> bool {
    s.ty().is_ultras()
        && s.rows().iter().flatten().all(|nw| match nw {
            NestedWeight::Node(w) => w.len() <= 1,
            NestedWeight::Leaf(_) => false,
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurryDirection {
    ToWts,
    FromWts,
}

/// The currying reduction between `WLTS(A, M)` and `WTS(M^A)`.
pub fn curry_reduction(s: &System, direction: CurryDirection) -> Result<ReductionWitness, ReductError> {
    let (target, constructor) = match direction {
        CurryDirection::ToWts => (curry_system(s)?, Constructor::CurryToWts),
        CurryDirection::FromWts => (uncurry_system(s)?, Constructor::CurryFromWts),
    };
    Ok(ReductionWitness {
        source: s.clone(),
        target,
        state_map: StateMap::identity(s.len()),
        rule: BisimRule::Identity,
        constructor,
    })
}

fn leaf(nw: &NestedWeight<usize>) -> &WeightFunction<usize> {
    match nw {
        NestedWeight::Leaf(w) => w,
        NestedWeight::Node(_) => unreachable!("single-monoid stacks hold leaves"),
    }
}

fn curry_system(s: &System) -> Result<System, ReductError> {
    if !s.ty().is_wlts() {
        return Err(ReductError::Unsupported("currying needs a WLTS: one component with a single-monoid stack".into()));
    }
    let c = &s.ty().components()[0];
    let power = Monoid::power(c.stack[0].clone(), c.labels.clone()).map_err(|e| ReductError::Unsupported(e.to_string()))?;
    let ty = TypeDescriptor::wts(power.clone())?;
    let rows = s
        .rows()
        .iter()
        .map(|row| {
            let parts: Vec<WeightFunction<usize>> = row.iter().map(|nw| leaf(nw).clone()).collect();
            Ok(vec![NestedWeight::Leaf(curry(&power, &parts)?)])
        })
        .collect::<Result<Vec<_>, ReductError>>()?;
    Ok(System::from_parts(ty, s.states().to_vec(), rows))
}

fn uncurry_system(s: &System) -> Result<System, ReductError> {
    let comps = s.ty().components();
    fn power_of(c: &Component) -> Option<(&Monoid, &[String])> {
        if c.labels.len() == 1 && c.stack.len() == 1 {
            c.stack[0].power_labels()
        } else {
            None
        }
    }
    let (inner, labels) = match comps {
        [c] => power_of(c),
        _ => None,
    }
    .ok_or_else(|| ReductError::Unsupported("uncurrying needs a single-label WTS over a power monoid".into()))?;
    let power = comps[0].stack[0].clone();
    let ty = TypeDescriptor::wlts(labels.to_vec(), inner.clone())?;
    let rows = s
        .rows()
        .iter()
        .map(|row| Ok(uncurry(&power, leaf(&row[0]))?.into_iter().map(NestedWeight::Leaf).collect()))
        .collect::<Result<Vec<_>, ReductError>>()?;
    Ok(System::from_parts(ty, s.states().to_vec(), rows))
}

/// Embeds `s` into a system of type `target_ty` next to a chain gadget.
///
/// With `k` bisimilarity classes, the gadget has states `g_0 .. g_{k-1}`:
/// `g_0` is dead and `g_i` steps to `g_{i-1}` on the first label of the
/// first component with the nonzero witness at every level of the stack.
/// Classes are taken in order of their least state; the `j`-th class is
/// encoded by chain length `k - 1 - j`, and each of its states copies the
/// behaviour of that gadget state.
pub fn synthesize_reduction(s: &System, target_ty: &TypeDescriptor) -> Result<ReductionWitness, ReductError> {
    if let Some(v) = target_ty.violations().into_iter().next() {
        return Err(ReductError::Degenerate(v.to_string()));
    }
    let classes = largest_bisimulation(s);
    let k = classes.num_blocks();
    let n = s.len();
    let mut names: Vec<String> = s.states().to_vec();
    let taken: HashSet<String> = names.iter().cloned().collect();
    for i in 0..k {
        let mut name = format!("g{i}");
        while taken.contains(&name) {
            name.push('\'');
        }
        names.push(name);
    }
    let stack = &target_ty.components()[0].stack;
    let gadget = |pos: usize| n + pos;
    let mut target = System::new(target_ty.clone(), names);
    let step_to = |pos: usize| NestedWeight::singleton_chain(stack, gadget(pos - 1));
    for pos in 1..k {
        target.set_behaviour(gadget(pos), 0, step_to(pos));
    }
    for x in 0..n {
        let pos = k - 1 - classes.block_of(x);
        if pos > 0 {
            target.set_behaviour(x, 0, step_to(pos));
        }
    }
    Ok(ReductionWitness {
        source: s.clone(),
        target,
        state_map: StateMap::new((0..n).collect()),
        rule: BisimRule::PadDiagonal,
        constructor: Constructor::Synthesized { offset: n, len: k },
    })
}

/// `w2 ∘ w1`: the state maps compose and so do the bisimulation rules.
pub fn compose_reductions(w1: &ReductionWitness, w2: &ReductionWitness) -> Result<ReductionWitness, ReductError> {
    if w1.target != w2.source {
        return Err(ReductError::MiddleMismatch);
    }
    if w2.is_identity() {
        return Ok(w1.clone());
    }
    if w1.is_identity() {
        return Ok(w2.clone());
    }
    let state_map = w1.state_map.then(&w2.state_map);
    let middle_len = w1.target.len();
    let target_len = w2.target.len();
    let rule = match (&w1.rule, &w2.rule) {
        (BisimRule::Identity, BisimRule::Identity) => BisimRule::Identity,
        (BisimRule::Identity | BisimRule::PadDiagonal, BisimRule::Identity | BisimRule::PadDiagonal) => BisimRule::PadDiagonal,
        (BisimRule::Explicit(first), second) => BisimRule::Explicit(
            first
                .iter()
                .flat_map(|(r, mid)| second.apply(mid, &w2.state_map, target_len).into_iter().map(move |out| (r.clone(), out)))
                .collect(),
        ),
        (first, BisimRule::Explicit(second)) => BisimRule::Explicit(
            second
                .iter()
                .filter_map(|(mid, out)| {
                    let r = pullback(mid, &w1.state_map);
                    first.apply(&r, &w1.state_map, middle_len).contains(mid).then(|| (r, out.clone()))
                })
                .collect(),
        ),
    };
    Ok(ReductionWitness {
        source: w1.source.clone(),
        target: w2.target.clone(),
        state_map,
        rule,
        constructor: Constructor::Composed,
    })
}

/// The constructor's action `σ(f)` on a homomorphism `f: α → β`, as a map
/// between the two target carriers.
fn map_action(wa: &ReductionWitness, wb: &ReductionWitness, f: &StateMap) -> Result<Option<StateMap>, ReductError> {
    match (&wa.constructor, &wb.constructor) {
        (
            Constructor::LtsToWlts | Constructor::WltsToUltras | Constructor::CurryToWts | Constructor::CurryFromWts | Constructor::Identity,
            _,
        ) => Ok(Some(f.clone())),
        (Constructor::Synthesized { len: ka, .. }, Constructor::Synthesized { offset: ob, len: kb }) => {
            if ka != kb {
                return Ok(None);
            }
            let image = f.as_slice().iter().copied().chain((0..*ka).map(|i| ob + i)).collect();
            Ok(Some(StateMap::new(image)))
        }
        (other, _) => Err(ReductError::NoFunctorialAction(other.name().to_string())),
    }
}

/// Checks `σ^c_β ∘ f = σ(f) ∘ σ^c_α` pointwise and that `σ(f)` is a
/// homomorphism of the targets.
pub fn check_reduction_naturality(wa: &ReductionWitness, wb: &ReductionWitness, f: &StateMap) -> Result<bool, ReductError> {
    if std::mem::discriminant(&wa.constructor) != std::mem::discriminant(&wb.constructor) {
        return Err(ReductError::ConstructorMismatch(wa.constructor.name().into(), wb.constructor.name().into()));
    }
    if !crate::bisim::is_homomorphism(f, &wa.source, &wb.source)? {
        return Err(ReductError::NotHomomorphism);
    }
    let Some(action) = map_action(wa, wb, f)? else {
        return Ok(false);
    };
    if action.check(wa.target.len(), wb.target.len()).is_err() {
        return Ok(false);
    }
    let commutes = (0..wa.source.len()).all(|x| wb.state_map.apply(f.apply(x)) == action.apply(wa.state_map.apply(x)));
    Ok(commutes && crate::bisim::is_homomorphism(&action, &wa.target, &wb.target)?)
}
