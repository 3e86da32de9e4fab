//! JSON encoding of systems, partitions and nested weights.
//!
//! ```text
//! { "type": [ { "labels": ["a","b"], "stack": [{"kind":"nat-plus"}] } ],
//!   "states": ["x","y"],
//!   "trans": [ { "from":"x", "comp":0, "label":"a", "weight": [["y","3"]] } ] }
//! ```
//!
//! Innermost weights are lists of `[state, value]` pairs; outer levels are
//! lists of `[inner, value]` pairs. A weight may also be wrapped as
//! `{"w": [...]}`. Missing entries are zero and repeated entries are added.

use serde_json::{json, Value as Json};

use crate::monoid::{Monoid, MonoidError};
use crate::systems::{Component, Partition, System, SystemError, TypeDescriptor};
use crate::weights::{NestedWeight, StateId, WeightFunction};

fn format_err(msg: impl Into<String>) -> SystemError {
    SystemError::Format(msg.into())
}

fn monoid_err(e: MonoidError) -> SystemError {
    match e {
        MonoidError::EmptyLabels | MonoidError::Trivial(_) => SystemError::Degenerate(e.to_string()),
        other => format_err(other.to_string()),
    }
}

/// Parses and validates a system.
pub fn parse_system(text: &str) -> Result<System, SystemError> {
    let raw: Json = serde_json::from_str(text).map_err(|e| format_err(e.to_string()))?;
    system_from_json(&raw)
}

/// Parses a system without checking [`System::violations`]; names must
/// still resolve.
pub fn decode_system(text: &str) -> Result<System, SystemError> {
    let raw: Json = serde_json::from_str(text).map_err(|e| format_err(e.to_string()))?;
    decode_system_json(&raw)
}

pub fn system_from_json(raw: &Json) -> Result<System, SystemError> {
    let sys = decode_system_json(raw)?;
    sys.validate()?;
    Ok(sys)
}

pub fn decode_system_json(raw: &Json) -> Result<System, SystemError> {
    let obj = raw.as_object().ok_or_else(|| format_err("a system must be a JSON object"))?;
    let ty = descriptor_from_json(obj.get("type").ok_or_else(|| format_err("missing `type`"))?)?;
    let states = strings(obj.get("states").ok_or_else(|| format_err("missing `states`"))?, "states")?;
    let mut sys = System::new(ty, states);
    let stacks: Vec<Vec<Monoid>> = sys.ty().slot_stacks().into_iter().map(|s| s.to_vec()).collect();
    let empty = Vec::new();
    let trans = match obj.get("trans") {
        Some(t) => t.as_array().ok_or_else(|| format_err("`trans` must be a list"))?,
        None => &empty,
    };
    let mut pending: Vec<Vec<Option<NestedWeight<StateId>>>> = vec![vec![None; stacks.len()]; sys.len()];
    for (i, t) in trans.iter().enumerate() {
        let t = t.as_object().ok_or_else(|| format_err(format!("trans[{i}] must be an object")))?;
        let from = t.get("from").and_then(Json::as_str).ok_or_else(|| format_err(format!("trans[{i}] lacks `from`")))?;
        let comp = match t.get("comp") {
            None => 0,
            Some(c) => c.as_u64().ok_or_else(|| format_err(format!("trans[{i}].comp must be a natural number")))? as usize,
        };
        let label = t.get("label").and_then(Json::as_str).ok_or_else(|| format_err(format!("trans[{i}] lacks `label`")))?;
        let x = sys.state_index(from).ok_or_else(|| SystemError::UnknownState(from.to_string()))?;
        let slot = sys
            .ty()
            .slot_index(comp, label)
            .ok_or_else(|| SystemError::UnknownLabel(format!("{label} (component {comp})")))?;
        let weight = t.get("weight").ok_or_else(|| format_err(format!("trans[{i}] lacks `weight`")))?;
        let nw = nested_from_json(weight, &stacks[slot], &mut |name: &Json| {
            let name = name.as_str().ok_or_else(|| format_err(format!("state names are strings, got {name}")))?;
            sys.state_index(name).ok_or_else(|| SystemError::UnknownState(name.to_string()))
        })?;
        let merged = match pending[x][slot].take() {
            None => nw,
            Some(prev) => add_outermost(&stacks[slot][0], prev, nw),
        };
        pending[x][slot] = Some(merged);
    }
    for (x, row) in pending.into_iter().enumerate() {
        for (slot, nw) in row.into_iter().enumerate() {
            if let Some(nw) = nw {
                sys.set_behaviour(x, slot, nw);
            }
        }
    }
    Ok(sys)
}

fn add_outermost<K: Ord + Clone>(m: &Monoid, a: NestedWeight<K>, b: NestedWeight<K>) -> NestedWeight<K> {
    match (a, b) {
        (NestedWeight::Leaf(a), NestedWeight::Leaf(b)) => {
            NestedWeight::Leaf(WeightFunction::normalized(m, a.into_entries().into_iter().chain(b.into_entries()).collect()))
        }
        (NestedWeight::Node(a), NestedWeight::Node(b)) => {
            NestedWeight::Node(WeightFunction::normalized(m, a.into_entries().into_iter().chain(b.into_entries()).collect()))
        }
        _ => unreachable!("weights of one slot share their depth"),
    }
}

/// Canonical JSON for a system: states in declaration order, nonzero
/// behaviours in (state, component, label) order.
pub fn system_to_json(sys: &System) -> Json {
    let stacks = sys.ty().slot_stacks();
    let slots: Vec<(usize, usize)> = sys.ty().slots().collect();
    let mut trans = Vec::new();
    for x in 0..sys.len() {
        for (slot, &(c, a)) in slots.iter().enumerate() {
            let nw = sys.behaviour(x, slot);
            if nw.is_zero() {
                continue;
            }
            trans.push(json!({
                "from": sys.state_name(x),
                "comp": c,
                "label": sys.ty().components()[c].labels[a],
                "weight": nested_to_json(nw, stacks[slot], &mut |&y: &StateId| json!(sys.state_name(y))),
            }));
        }
    }
    json!({"type": descriptor_to_json(sys.ty()), "states": sys.states(), "trans": trans})
}

/// Compact canonical text; equal systems give identical bytes.
pub fn serialize_system(sys: &System) -> String {
    system_to_json(sys).to_string()
}

pub fn descriptor_from_json(raw: &Json) -> Result<TypeDescriptor, SystemError> {
    let raw = match raw {
        Json::Object(o) if o.contains_key("type") => &o["type"],
        other => other,
    };
    let comps = raw.as_array().ok_or_else(|| format_err("`type` must be a list of components"))?;
    let components = comps
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let labels = strings(c.get("labels").ok_or_else(|| format_err(format!("type[{i}] lacks `labels`")))?, "labels")?;
            let stack = c
                .get("stack")
                .and_then(Json::as_array)
                .ok_or_else(|| format_err(format!("type[{i}] lacks a `stack` list")))?
                .iter()
                .map(|m| Monoid::from_json(m).map_err(monoid_err))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Component::new(labels, stack))
        })
        .collect::<Result<Vec<_>, SystemError>>()?;
    Ok(TypeDescriptor::unchecked(components))
}

pub fn descriptor_to_json(ty: &TypeDescriptor) -> Json {
    Json::Array(
        ty.components()
            .iter()
            .map(|c| json!({"labels": c.labels, "stack": c.stack.iter().map(Monoid::to_json).collect::<Vec<_>>()}))
            .collect(),
    )
}

/// Decodes a nested weight for `stack`, resolving innermost keys with `key`.
pub fn nested_from_json<K: Ord + Clone>(
    raw: &Json,
    stack: &[Monoid],
    key: &mut impl FnMut(&Json) -> Result<K, SystemError>,
) -> Result<NestedWeight<K>, SystemError> {
    let raw = match raw {
        Json::Object(o) if o.contains_key("w") => &o["w"],
        other => other,
    };
    let pairs = raw.as_array().ok_or_else(|| format_err(format!("a weight must be a list of pairs, got {raw}")))?;
    let (outer, rest) = stack.split_first().ok_or_else(|| format_err("empty monoid stack"))?;
    let mut decoded_leaf = Vec::new();
    let mut decoded_node = Vec::new();
    for p in pairs {
        let pair = p.as_array().filter(|p| p.len() == 2).ok_or_else(|| format_err(format!("expected a [key, value] pair, got {p}")))?;
        let value = outer.parse_value(&pair[1]).map_err(|e| format_err(e.to_string()))?;
        if rest.is_empty() {
            decoded_leaf.push((key(&pair[0])?, value));
        } else {
            decoded_node.push((nested_from_json(&pair[0], rest, key)?, value));
        }
    }
    Ok(if rest.is_empty() {
        NestedWeight::Leaf(WeightFunction::normalized(outer, decoded_leaf))
    } else {
        NestedWeight::Node(WeightFunction::normalized(outer, decoded_node))
    })
}

pub fn nested_to_json<K: Ord + Clone>(nw: &NestedWeight<K>, stack: &[Monoid], key: &mut impl FnMut(&K) -> Json) -> Json {
    match nw {
        NestedWeight::Leaf(w) => {
            let m = &stack[stack.len() - 1];
            Json::Array(w.entries().iter().map(|(k, v)| json!([key(k), m.render_value(v)])).collect())
        }
        NestedWeight::Node(w) => Json::Array(
            w.entries()
                .iter()
                .map(|(k, v)| json!([nested_to_json(k, &stack[1..], key), stack[0].render_value(v)]))
                .collect(),
        ),
    }
}

/// `[["x","y"],["z"]]`.
pub fn partition_to_json(p: &Partition, sys: &System) -> Json {
    Json::Array(
        p.blocks()
            .iter()
            .map(|b| Json::Array(b.iter().map(|&x| json!(sys.state_name(x))).collect()))
            .collect(),
    )
}

pub fn partition_from_json(raw: &Json, sys: &System) -> Result<Partition, SystemError> {
    let blocks = raw
        .as_array()
        .ok_or_else(|| format_err("a partition is a list of blocks"))?
        .iter()
        .map(|b| {
            strings(b, "block")?
                .iter()
                .map(|n| sys.state_index(n).ok_or_else(|| SystemError::UnknownState(n.clone())))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Partition::from_blocks(sys.len(), blocks)
}

pub(crate) fn strings(raw: &Json, what: &str) -> Result<Vec<String>, SystemError> {
    raw.as_array()
        .ok_or_else(|| format_err(format!("`{what}` must be a list of strings")))?
        .iter()
        .map(|v| v.as_str().map(str::to_string).ok_or_else(|| format_err(format!("`{what}` must be a list of strings"))))
        .collect()
}
