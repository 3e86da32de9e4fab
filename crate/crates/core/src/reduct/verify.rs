//! Machine check of a reduction witness.

use serde::Serialize;

use super::{BisimRule, ReductError, ReductionWitness};
use crate::bisim::{all_kernel_bisimulations, is_kernel_bisimulation, largest_bisimulation, refine, unstable_pair};
use crate::format::partition_to_json;
use crate::systems::{Partition, System};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl Check {
    fn pass(name: &'static str) -> Check {
        Check { name, passed: true, detail: None, counterexample: None }
    }

    fn fail(name: &'static str, detail: String, counterexample: Counterexample) -> Check {
        Check { name, passed: false, detail: Some(detail), counterexample: Some(counterexample) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    /// Whether every bisimulation of the source was enumerated.
    pub exhaustive: bool,
    pub source_bisimulations: usize,
    pub checked_pairs: usize,
    pub injective: bool,
    pub full: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The first failing check.
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Source bisimulations to instantiate when the carrier is too large to
/// enumerate: the diagonal, the largest bisimulation, and for each
/// nontrivial class the largest bisimulation below the split that isolates
/// the class's least state.
fn sampled_bisimulations(s: &System) -> Vec<Partition> {
    let largest = largest_bisimulation(s);
    let mut out = vec![Partition::discrete(s.len()), largest.clone()];
    for block in largest.blocks().iter().filter(|b| b.len() > 1) {
        let keys: Vec<(usize, bool)> = (0..s.len()).map(|x| (largest.block_of(x), x == block[0])).collect();
        if let Ok(r) = refine(s, &Partition::from_keys(&keys)) {
            out.push(r.partition);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Checks condition (♦) for every instantiated pair `(R, R')`, plus
/// injectivity of `σ^c`, left-totality, and for full witnesses bijectivity
/// and right-uniqueness.
pub fn verify_system_reduction(w: &ReductionWitness, exhaustive_limit: usize) -> Result<VerificationReport, ReductError> {
    w.source.validate()?;
    w.target.validate()?;
    w.state_map.check(w.source.len(), w.target.len())?;

    let src = &w.source;
    let tgt = &w.target;
    let sigma = &w.state_map;
    let names = |s: &System, x: usize, y: usize| (s.state_name(x).to_string(), s.state_name(y).to_string());

    let exhaustive = src.len() <= exhaustive_limit;
    let bis = if exhaustive { all_kernel_bisimulations(src, exhaustive_limit)? } else { sampled_bisimulations(src) };

    let mut checks = Vec::new();

    let injective = match sigma.collision() {
        None => {
            checks.push(Check::pass("injective"));
            true
        }
        Some((x, y)) => {
            checks.push(Check::fail(
                "injective",
                format!("σ^c sends `{}` and `{}` to the same state", src.state_name(x), src.state_name(y)),
                Counterexample { relation: None, image: None, states: Some(names(src, x, y)) },
            ));
            false
        }
    };

    if let BisimRule::Explicit(pairs) = &w.rule {
        let bad = pairs.iter().find(|(r, _)| r.len() != src.len() || !is_kernel_bisimulation(src, r).unwrap_or(false));
        checks.push(match bad {
            None => Check::pass("rule-domain"),
            Some((r, _)) => Check::fail(
                "rule-domain",
                "the rule relates a partition that is not a source bisimulation".into(),
                Counterexample { relation: Some(partition_json(r, src)), image: None, states: None },
            ),
        });
    }

    let mut left_total = Check::pass("left-total");
    let mut target_bisim = Check::pass("target-bisimulation");
    let mut diamond = Check::pass("diamond");
    let mut right_unique = Check::pass("right-unique");
    let mut checked_pairs = 0;

    for r in &bis {
        let images = w.rule.apply(r, sigma, tgt.len());
        if images.is_empty() && left_total.passed {
            left_total = Check::fail(
                "left-total",
                "the rule relates this source bisimulation to nothing".into(),
                Counterexample { relation: Some(partition_json(r, src)), image: None, states: None },
            );
        }
        let mut distinct = images.clone();
        distinct.sort();
        distinct.dedup();
        if distinct.len() > 1 && right_unique.passed {
            right_unique = Check::fail(
                "right-unique",
                format!("this source bisimulation is related to {} target partitions", distinct.len()),
                Counterexample { relation: Some(partition_json(r, src)), image: Some(partition_json(&distinct[0], tgt)), states: None },
            );
        }
        for image in &images {
            checked_pairs += 1;
            let cx = || Counterexample { relation: Some(partition_json(r, src)), image: Some(partition_json(image, tgt)), states: None };
            if image.len() != tgt.len() {
                if target_bisim.passed {
                    target_bisim = Check::fail("target-bisimulation", "image does not partition the target carrier".into(), cx());
                }
                continue;
            }
            if target_bisim.passed {
                if let Some((a, b)) = unstable_pair(tgt, image)? {
                    let mut c = cx();
                    c.states = Some(names(tgt, a, b));
                    target_bisim = Check::fail(
                        "target-bisimulation",
                        format!("`{}` and `{}` are related but behave differently", tgt.state_name(a), tgt.state_name(b)),
                        c,
                    );
                }
            }
            if diamond.passed {
                'pairs: for x in 0..src.len() {
                    for y in x + 1..src.len() {
                        let before = r.related(x, y);
                        let after = image.related(sigma.apply(x), sigma.apply(y));
                        if before != after {
                            let mut c = cx();
                            c.states = Some(names(src, x, y));
                            let (a, b) = if before { ("related", "unrelated") } else { ("unrelated", "related") };
                            diamond = Check::fail(
                                "diamond",
                                format!("`{}` and `{}` are {a} in R but their images are {b} in R'", src.state_name(x), src.state_name(y)),
                                c,
                            );
                            break 'pairs;
                        }
                    }
                }
            }
        }
    }

    checks.push(left_total);
    checks.push(target_bisim);
    checks.push(diamond);

    let full = w.is_full();
    if full {
        checks.push(if injective {
            Check::pass("isomorphism")
        } else {
            Check::fail(
                "isomorphism",
                "σ^c is surjective but not injective".into(),
                Counterexample { relation: None, image: None, states: None },
            )
        });
        checks.push(right_unique);
    }
    if w.rule == BisimRule::Identity && !(full && injective) {
        checks.push(Check::fail(
            "identity-rule",
            "the identity rule needs a bijective state map".into(),
            Counterexample { relation: None, image: None, states: None },
        ));
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerificationReport { passed, exhaustive, source_bisimulations: bis.len(), checked_pairs, injective, full, checks })
}

fn partition_json(p: &Partition, s: &System) -> serde_json::Value {
    if p.len() == s.len() {
        partition_to_json(p, s)
    } else {
        serde_json::json!(p.blocks())
    }
}
