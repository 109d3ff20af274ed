//! JSON forms of instances, allocations and FFV tuples.
//!
//! Chores are written as labels `c1..cm` (1-based) and parsed back to
//! 0-based positions. Thresholds in tuples are `"p/q"` strings;
//! `{"num": p, "den": q}` objects and plain integers are accepted on input.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bundle::{Allocation, Bundle};
use crate::error::{Error, Result};
use crate::hffd::FfvTuple;
use crate::instance::{IdoInstance, Instance};
use crate::threshold::RationalRepr;

pub fn chore_label(c: usize) -> String {
    format!("c{}", c + 1)
}

pub fn parse_chore_label(s: &str) -> Result<usize> {
    s.strip_prefix('c')
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|&k| k >= 1)
        .map(|k| k - 1)
        .ok_or_else(|| Error::InvalidInstance(format!("bad chore label {s:?}, expected c1, c2, ...")))
}

pub fn bundle_labels(b: &Bundle) -> Vec<String> {
    b.iter().map(chore_label).collect()
}

pub fn parse_bundle(labels: &[String]) -> Result<Bundle> {
    Bundle::new(labels.iter().map(|s| parse_chore_label(s)).collect::<Result<_>>()?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceJson {
    n: usize,
    m: usize,
    costs: Vec<Vec<Value>>,
}

/// Parse `{"n", "m", "costs"}`. Ragged rows, negative or non-integer
/// entries and mismatched dimensions are rejected.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let raw: InstanceJson =
        serde_json::from_str(text).map_err(|e| Error::InvalidInstance(format!("malformed instance JSON: {e}")))?;
    let mut rows = Vec::with_capacity(raw.costs.len());
    for (i, row) in raw.costs.iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (j, v) in row.iter().enumerate() {
            let c = match v.as_u64() {
                Some(c) => c,
                None if v.as_i64().is_some_and(|x| x < 0) => {
                    return Err(Error::InvalidInstance(format!("costs[{i}][{j}] = {v} is negative")))
                }
                None => {
                    return Err(Error::InvalidInstance(format!(
                        "costs[{i}][{j}] = {v} is not a non-negative integer"
                    )))
                }
            };
            out.push(c);
        }
        rows.push(out);
    }
    Instance::with_dims(raw.n, raw.m, rows)
}

pub fn instance_json(inst: &Instance) -> Value {
    serde_json::json!({ "n": inst.n(), "m": inst.m(), "costs": inst.costs() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationJson {
    pub bundles: Vec<Vec<String>>,
    /// `assignment[i]` is the bundle index of agent `i`.
    pub assignment: Vec<usize>,
    pub unallocated: Vec<String>,
}

impl AllocationJson {
    pub fn from_allocation(a: &Allocation) -> Self {
        AllocationJson {
            bundles: a.bundles.iter().map(bundle_labels).collect(),
            assignment: a.assignment.clone(),
            unallocated: bundle_labels(&a.unallocated),
        }
    }

    pub fn to_allocation(&self, m: usize) -> Result<Allocation> {
        let a = Allocation {
            bundles: self.bundles.iter().map(|b| parse_bundle(b)).collect::<Result<_>>()?,
            assignment: self.assignment.clone(),
            unallocated: parse_bundle(&self.unallocated)?,
        };
        a.validate(m)?;
        Ok(a)
    }
}

/// An FFV tuple. Costs come either inline (`costs`, non-increasing) or
/// from row `agent` of an identical-order instance supplied separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleJson {
    pub items: Vec<String>,
    pub bundles: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<Vec<u64>>,
    pub tau: RationalRepr,
}

impl TupleJson {
    pub fn from_tuple(t: &FfvTuple, agent: Option<usize>, inline_costs: bool) -> Result<Self> {
        Ok(TupleJson {
            items: bundle_labels(&t.items),
            bundles: t.bundles.iter().map(bundle_labels).collect(),
            agent,
            costs: inline_costs.then(|| t.costs.clone()),
            tau: RationalRepr::from_threshold(&t.tau),
        })
    }

    pub fn to_tuple(&self, inst: Option<&IdoInstance>) -> Result<FfvTuple> {
        let costs = match (&self.costs, inst) {
            (Some(c), _) => c.clone(),
            (None, Some(inst)) => inst.agent_costs(self.agent.unwrap_or(0))?.to_vec(),
            (None, None) => {
                return Err(Error::InvalidInstance(
                    "tuple has no inline costs and no instance was given".into(),
                ))
            }
        };
        FfvTuple::new(
            costs,
            parse_bundle(&self.items)?,
            self.bundles.iter().map(|b| parse_bundle(b)).collect::<Result<_>>()?,
            self.tau.to_threshold()?,
        )
    }
}

pub fn parse_tuple(text: &str, inst: Option<&IdoInstance>) -> Result<FfvTuple> {
    let raw: TupleJson =
        serde_json::from_str(text).map_err(|e| Error::InvalidInstance(format!("malformed tuple JSON: {e}")))?;
    raw.to_tuple(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::threshold::Threshold;
    use proptest::prelude::*;

    #[test]
    fn labels() {
        assert_eq!(chore_label(14), "c15");
        assert_eq!(parse_chore_label("c15").unwrap(), 14);
        for bad in ["c0", "15", "c", "cx", "d3", "c-1"] {
            assert!(parse_chore_label(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn instance_errors() {
        assert!(parse_instance(r#"{"n":2,"m":2,"costs":[[1,2],[3]]}"#)
            .unwrap_err()
            .to_string()
            .contains("row 1"));
        assert!(parse_instance(r#"{"n":1,"m":2,"costs":[[1,-2]]}"#)
            .unwrap_err()
            .to_string()
            .contains("negative"));
        assert!(parse_instance(r#"{"n":1,"m":1,"costs":[[1.5]]}"#).is_err());
        assert!(parse_instance(r#"{"n":2,"m":1,"costs":[[1]]}"#).is_err());
        assert!(parse_instance("{").is_err());
        let inst = parse_instance(r#"{"n":1,"m":0,"costs":[[]]}"#).unwrap();
        assert_eq!(inst.m(), 0);
    }

    #[test]
    fn tau_forms() {
        let base = r#"{"items":["c1","c2"],"bundles":[["c1"]],"costs":[5,3],"tau":TAU}"#;
        for (form, want) in [(r#"{"num":15,"den":2}"#, "15/2"), (r#""15/2""#, "15/2"), ("7", "7")] {
            let t = parse_tuple(&base.replace("TAU", form), None).unwrap();
            assert_eq!(t.tau, want.parse::<Threshold>().unwrap());
        }
    }

    #[test]
    fn tuple_needs_costs() {
        let text = r#"{"items":["c1"],"bundles":[["c1"]],"tau":3}"#;
        assert!(parse_tuple(text, None).is_err());
        let inst = IdoInstance::new(Instance::new(vec![vec![3], vec![2]]).unwrap()).unwrap();
        let raw: TupleJson = serde_json::from_str(text).unwrap();
        assert_eq!(raw.to_tuple(Some(&inst)).unwrap().costs, vec![3]);
        let second = TupleJson {
            agent: Some(1),
            ..raw
        };
        assert_eq!(second.to_tuple(Some(&inst)).unwrap().costs, vec![2]);
    }

    fn arb_allocation() -> impl Strategy<Value = (usize, Allocation)> {
        (1usize..12, 1usize..5).prop_flat_map(|(m, n)| {
            (proptest::collection::vec(0..=n, m), Just(n)).prop_flat_map(move |(owner, n)| {
                let bundles: Vec<Bundle> = (0..n)
                    .map(|k| (0..owner.len()).filter(|&c| owner[c] == k).collect())
                    .collect();
                let unallocated: Bundle = (0..owner.len()).filter(|&c| owner[c] == n).collect();
                (Just((0..n).collect::<Vec<_>>()).prop_shuffle(), Just(bundles), Just(unallocated))
                    .prop_map(move |(assignment, bundles, unallocated)| {
                        (
                            m,
                            Allocation {
                                bundles,
                                assignment,
                                unallocated,
                            },
                        )
                    })
            })
        })
    }

    proptest! {
        #[test]
        fn allocation_round_trip((m, a) in arb_allocation()) {
            let text = serde_json::to_string(&AllocationJson::from_allocation(&a)).unwrap();
            let back: AllocationJson = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.to_allocation(m).unwrap(), a);
        }

        #[test]
        fn tuple_round_trip(
            mut costs in proptest::collection::vec(0u64..60, 1..12),
            cut in proptest::collection::vec(0usize..4, 12),
            num in 1u64..500,
            den in 1u64..20,
        ) {
            costs.sort_unstable_by(|a, b| b.cmp(a));
            let m = costs.len();
            let bundles: Vec<Bundle> = (0..3).map(|k| (0..m).filter(|&c| cut[c] == k).collect()).collect();
            let t = FfvTuple::new(costs, Bundle::full(m), bundles, Threshold::from_fraction(num, den).unwrap()).unwrap();
            let text = serde_json::to_string(&TupleJson::from_tuple(&t, None, true).unwrap()).unwrap();
            prop_assert_eq!(parse_tuple(&text, None).unwrap(), t);
        }

        #[test]
        fn instance_round_trip(rows in proptest::collection::vec(proptest::collection::vec(0u64..1000, 5), 1..5)) {
            let inst = Instance::new(rows).unwrap();
            let text = instance_json(&inst).to_string();
            prop_assert_eq!(parse_instance(&text).unwrap(), inst);
        }
    }
}
