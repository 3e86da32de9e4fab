//! Witness files.
//!
//! ```text
//! { "constructor": "curry-to-wts",
//!   "sigma_c": {"x": "x", ...},
//!   "rule": "identity" | "pad-diagonal" | {"explicit": [[R, R'], ...]},
//!   "source": <system or path>, "target": <system or path> }
//! ```
//!
//! Synthesized witnesses also carry `"gadget": {"offset": n, "len": k}`.
//! String-valued `source`/`target` are paths relative to `base`.

use std::path::Path;

use serde_json::{json, Map, Value as Json};

use super::{BisimRule, Constructor, ReductError, ReductionWitness};
use crate::format::{partition_from_json, partition_to_json, system_from_json, system_to_json};
use crate::systems::{StateMap, System};

fn err(msg: impl Into<String>) -> ReductError {
    ReductError::Format(msg.into())
}

pub fn witness_to_json(w: &ReductionWitness) -> Json {
    let sigma: Map<String, Json> = (0..w.source.len())
        .map(|x| (w.source.state_name(x).to_string(), json!(w.target.state_name(w.state_map.apply(x)))))
        .collect();
    let rule = match &w.rule {
        BisimRule::Explicit(pairs) => json!({
            "explicit": pairs
                .iter()
                .map(|(r, r2)| json!([partition_to_json(r, &w.source), partition_to_json(r2, &w.target)]))
                .collect::<Vec<_>>()
        }),
        other => json!(other.name()),
    };
    let mut out = Map::new();
    out.insert("constructor".into(), json!(w.constructor.name()));
    if let Constructor::Synthesized { offset, len } = w.constructor {
        out.insert("gadget".into(), json!({"offset": offset, "len": len}));
    }
    out.insert("sigma_c".into(), Json::Object(sigma));
    out.insert("rule".into(), rule);
    out.insert("source".into(), system_to_json(&w.source));
    out.insert("target".into(), system_to_json(&w.target));
    Json::Object(out)
}

fn load_system(raw: &Json, base: Option<&Path>) -> Result<System, ReductError> {
    match raw {
        Json::String(path) => {
            let path = match base {
                Some(b) => b.join(path),
                None => path.into(),
            };
            let text = std::fs::read_to_string(&path).map_err(|e| err(format!("{}: {e}", path.display())))?;
            Ok(crate::format::parse_system(&text)?)
        }
        other => Ok(system_from_json(other)?),
    }
}

pub fn witness_from_json(raw: &Json, base: Option<&Path>) -> Result<ReductionWitness, ReductError> {
    let obj = raw.as_object().ok_or_else(|| err("a witness must be a JSON object"))?;
    let source = load_system(obj.get("source").ok_or_else(|| err("missing `source`"))?, base)?;
    let target = load_system(obj.get("target").ok_or_else(|| err("missing `target`"))?, base)?;

    let sigma = obj.get("sigma_c").and_then(Json::as_object).ok_or_else(|| err("`sigma_c` must be an object"))?;
    if let Some(k) = sigma.keys().find(|k| source.state_index(k).is_none()) {
        return Err(err(format!("`sigma_c` maps unknown source state `{k}`")));
    }
    let image = (0..source.len())
        .map(|x| {
            let name = source.state_name(x);
            let to = sigma
                .get(name)
                .and_then(Json::as_str)
                .ok_or_else(|| err(format!("`sigma_c` is undefined on `{name}`")))?;
            target.state_index(to).ok_or_else(|| err(format!("`sigma_c` targets unknown state `{to}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let rule = match obj.get("rule") {
        Some(Json::String(s)) if s == "identity" => BisimRule::Identity,
        Some(Json::String(s)) if s == "pad-diagonal" => BisimRule::PadDiagonal,
        Some(Json::Object(o)) if o.contains_key("explicit") => {
            let pairs = o["explicit"].as_array().ok_or_else(|| err("`explicit` must be a list of pairs"))?;
            BisimRule::Explicit(
                pairs
                    .iter()
                    .map(|p| {
                        let p = p.as_array().filter(|p| p.len() == 2).ok_or_else(|| err("explicit rule entries are [R, R'] pairs"))?;
                        Ok((partition_from_json(&p[0], &source)?, partition_from_json(&p[1], &target)?))
                    })
                    .collect::<Result<Vec<_>, ReductError>>()?,
            )
        }
        other => return Err(err(format!("unknown rule {}", other.map(Json::to_string).unwrap_or_else(|| "(missing)".into())))),
    };

    let constructor = match obj.get("constructor").and_then(Json::as_str).unwrap_or("custom") {
        "lts-to-wlts" => Constructor::LtsToWlts,
        "wlts-to-ultras" => Constructor::WltsToUltras,
        "curry-to-wts" => Constructor::CurryToWts,
        "curry-from-wts" => Constructor::CurryFromWts,
        "identity" => Constructor::Identity,
        "composed" => Constructor::Composed,
        "custom" => Constructor::Custom,
        "synthesized" => {
            let g = obj.get("gadget").ok_or_else(|| err("synthesized witness without `gadget`"))?;
            let field = |k: &str| g.get(k).and_then(Json::as_u64).map(|v| v as usize).ok_or_else(|| err(format!("`gadget.{k}` missing")));
            Constructor::Synthesized { offset: field("offset")?, len: field("len")? }
        }
        other => return Err(err(format!("unknown constructor `{other}`"))),
    };

    Ok(ReductionWitness { source, target, state_map: StateMap::new(image), rule, constructor })
}
