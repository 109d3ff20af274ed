//! Heterogeneous First Fit Decreasing and the First-Fit-Valid abstraction.
//!
//! HFFD generalizes FFD to agents with their own cost functions and
//! thresholds. Seen through the cost function of the agent receiving the
//! last bundle, every HFFD output is a First-Fit-Valid tuple: each bundle is
//! lexicographically at least the greedy benchmark bundle of what remained.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::Zero;

use crate::bundle::{lex_cmp, Allocation, Bundle};
use crate::error::{Error, Result};
use crate::ffd::benchmark_bundle;
use crate::instance::IdoInstance;
use crate::mms::mms;
use crate::report::Report;
use crate::threshold::{int, Threshold};

/// How HFFD picks the owner of a closed bundle among the agents that accept it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum AssignmentRule {
    /// Largest `v_i(A_k) / h_i`, ties to the lowest index.
    #[default]
    MaxRatio,
    LowestIndex,
}

/// Run HFFD with per-agent thresholds.
pub fn hffd(inst: &IdoInstance, thresholds: &[Threshold], rule: AssignmentRule) -> Result<Allocation> {
    let (n, m) = (inst.n(), inst.m());
    if thresholds.len() != n {
        return Err(Error::Precondition(format!(
            "{} thresholds given for {n} agents",
            thresholds.len()
        )));
    }
    let rows: Vec<&[u64]> = (0..n).map(|i| inst.agent_costs(i)).collect::<Result<_>>()?;
    let caps: Vec<u64> = thresholds.iter().map(Threshold::capacity).collect();

    let mut remaining: Vec<usize> = (0..m).collect();
    let mut agents: Vec<usize> = (0..n).collect();
    let mut bundles = Vec::with_capacity(n);
    let mut assignment = vec![usize::MAX; n];

    for k in 0..n {
        let mut loads = vec![0u64; n];
        let mut taken = Vec::new();
        remaining.retain(|&c| {
            let fits = agents
                .iter()
                .any(|&i| loads[i].saturating_add(rows[i][c]) <= caps[i]);
            if fits {
                for &i in &agents {
                    loads[i] = loads[i].saturating_add(rows[i][c]);
                }
                taken.push(c);
            }
            !fits
        });

        let owner = pick_owner(&agents, &loads, &caps, thresholds, rule).ok_or_else(|| {
            Error::Invariant(format!("bundle {k} is acceptable to no remaining agent"))
        })?;
        assignment[owner] = k;
        agents.retain(|&i| i != owner);
        bundles.push(Bundle::from_sorted(taken));
    }

    Ok(Allocation {
        bundles,
        assignment,
        unallocated: Bundle::from_sorted(remaining),
    })
}

fn pick_owner(
    agents: &[usize],
    loads: &[u64],
    caps: &[u64],
    thresholds: &[Threshold],
    rule: AssignmentRule,
) -> Option<usize> {
    let mut accepting = agents.iter().copied().filter(|&i| loads[i] <= caps[i]);
    match rule {
        AssignmentRule::LowestIndex => accepting.next(),
        AssignmentRule::MaxRatio => {
            let ratio = |i: usize| {
                let h = thresholds[i].value();
                if h.is_zero() {
                    BigRational::zero()
                } else {
                    int(loads[i]) / h
                }
            };
            let mut best: Option<(usize, BigRational)> = None;
            for i in accepting {
                let r = ratio(i);
                if best.as_ref().map_or(true, |(_, b)| r > *b) {
                    best = Some((i, r));
                }
            }
            best.map(|(i, _)| i)
        }
    }
}

/// `(items, bundles, v, tau)` seen through a single cost function.
///
/// `costs` is indexed by chore position and must be non-increasing, so
/// positions encode the universal ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FfvTuple {
    pub costs: Vec<u64>,
    pub items: Bundle,
    pub bundles: Vec<Bundle>,
    pub tau: Threshold,
}

/// Whether `is_ffv` should confirm `tau >= MMS` with the exact solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmsPrecondition {
    Verify,
    Trust,
}

impl FfvTuple {
    pub fn new(costs: Vec<u64>, items: Bundle, bundles: Vec<Bundle>, tau: Threshold) -> Result<Self> {
        if costs.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotIdo("single-agent costs must be non-increasing".into()));
        }
        if let Some(c) = items.max_index().filter(|&c| c >= costs.len()) {
            return Err(Error::OutOfRange {
                what: "chore",
                index: c,
                limit: costs.len(),
            });
        }
        let mut seen = Bundle::empty();
        for b in &bundles {
            if !b.is_subset(&items) {
                return Err(Error::Precondition("bundle contains a chore outside the item set".into()));
            }
            if !b.is_disjoint(&seen) {
                return Err(Error::Precondition("bundles overlap".into()));
            }
            seen = seen.union(b);
        }
        Ok(FfvTuple {
            costs,
            items,
            bundles,
            tau,
        })
    }

    pub fn from_instance(
        inst: &IdoInstance,
        agent: usize,
        items: Bundle,
        bundles: Vec<Bundle>,
        tau: Threshold,
    ) -> Result<Self> {
        Self::new(inst.agent_costs(agent)?.to_vec(), items, bundles, tau)
    }

    /// The tuple HFFD produces for its last agent.
    pub fn from_hffd(inst: &IdoInstance, alloc: &Allocation, thresholds: &[Threshold]) -> Result<Self> {
        let n = alloc.bundles.len();
        let last = n
            .checked_sub(1)
            .and_then(|k| alloc.owner_of(k))
            .ok_or_else(|| Error::Precondition("allocation has no last agent".into()))?;
        Self::from_instance(
            inst,
            last,
            inst.all_chores(),
            alloc.bundles.clone(),
            thresholds[last].clone(),
        )
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    pub fn allocated(&self) -> Bundle {
        self.bundles.iter().flat_map(|b| b.iter()).collect()
    }

    pub fn unallocated(&self) -> Bundle {
        self.items.difference(&self.allocated())
    }

    /// Items not in any of the first `k` bundles (0-based `k`).
    pub fn remaining_before(&self, k: usize) -> Bundle {
        let used: Bundle = self.bundles[..k].iter().flat_map(|b| b.iter()).collect();
        self.items.difference(&used)
    }

    pub fn benchmark(&self, k: usize) -> Bundle {
        benchmark_bundle(&self.costs, &self.remaining_before(k), &self.tau)
    }

    pub fn cost(&self, b: &Bundle) -> u64 {
        b.cost(&self.costs)
    }

    pub fn mms(&self) -> Result<u64> {
        Ok(mms(&self.costs, &self.items, self.n())?.mu)
    }

    /// Bundle indices (0-based) that are lexicographically below their benchmark.
    pub fn ffv_violations(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&k| lex_cmp(&self.costs, &self.bundles[k], &self.benchmark(k)) == Ordering::Less)
            .collect()
    }

    /// First-Fit-Valid test. With `Verify`, a threshold below the exact MMS
    /// is reported as a precondition error.
    pub fn is_ffv(&self, pre: MmsPrecondition) -> Result<bool> {
        if pre == MmsPrecondition::Verify {
            let mu = self.mms()?;
            if self.tau.cmp_integer(mu) == Ordering::Less {
                return Err(Error::Precondition(format!("tau {} is below MMS {mu}", self.tau)));
            }
        }
        Ok(self.ffv_violations().is_empty())
    }
}

/// Largest remaining-set size for which subsets are enumerated.
pub const LEMMA_CHECK_MAX_CHORES: usize = 20;

/// Check two consequences of First-Fit-Validity by enumeration:
/// `lex_max`: every remaining subset lexicographically above `A_k` costs
/// more than `tau`; `unallocated_large`: every unallocated chore costs more
/// than `tau - mu`.
pub fn ffv_lemma_checks(t: &FfvTuple) -> Result<Report> {
    if !t.is_ffv(MmsPrecondition::Verify)? {
        return Err(Error::Precondition("tuple is not First-Fit-Valid".into()));
    }
    let mut report = Report::new();
    for k in 0..t.n() {
        let remaining = t.remaining_before(k);
        if remaining.len() > LEMMA_CHECK_MAX_CHORES {
            return Err(Error::SizeLimit(format!(
                "{} remaining chores exceed the enumeration limit {LEMMA_CHECK_MAX_CHORES}",
                remaining.len()
            )));
        }
        let chores = remaining.chores();
        for mask in 0u32..(1u32 << chores.len()) {
            let subset: Bundle = Bundle::from_sorted(
                (0..chores.len()).filter(|i| mask >> i & 1 == 1).map(|i| chores[i]).collect(),
            );
            if lex_cmp(&t.costs, &subset, &t.bundles[k]) == Ordering::Greater && t.tau.admits(t.cost(&subset)) {
                report.fail(
                    "lex_max",
                    format!("bundle {}: subset {:?} is lex-larger yet costs {}", k + 1, subset.chores(), t.cost(&subset)),
                );
            }
        }
    }
    let mu = t.mms()?;
    for c in &t.unallocated() {
        // v(c) > tau - mu  <=>  v(c) + mu > tau
        let lhs = t.costs[c] + mu;
        report.check(t.tau.cmp_integer(lhs) == Ordering::Less, "unallocated_large", || {
            format!("chore {c} costs {} <= tau - mu = {} - {mu}", t.costs[c], t.tau)
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffd::ffd;
    use crate::instance::Instance;

    const TYPE_A: [u64; 15] = [51, 28, 27, 27, 27, 26, 12, 12, 11, 11, 11, 11, 11, 11, 10];
    const TYPE_B: [u64; 15] = [51, 28, 27, 27, 27, 24, 21, 20, 10, 10, 10, 9, 9, 9, 9];

    fn worked_example() -> IdoInstance {
        let rows = vec![TYPE_A.to_vec(), TYPE_A.to_vec(), TYPE_A.to_vec(), TYPE_B.to_vec()];
        IdoInstance::new(Instance::new(rows).unwrap()).unwrap()
    }

    fn labels(b: &Bundle) -> Vec<usize> {
        b.iter().map(|c| c + 1).collect()
    }

    fn t75() -> Vec<Threshold> {
        vec![Threshold::from_integer(75); 4]
    }

    #[test]
    fn worked_example_trace() {
        for rule in [AssignmentRule::MaxRatio, AssignmentRule::LowestIndex] {
            let out = hffd(&worked_example(), &t75(), rule).unwrap();
            let got: Vec<Vec<usize>> = out.bundles.iter().map(labels).collect();
            assert_eq!(
                got,
                vec![vec![1, 6], vec![2, 3, 7], vec![4, 5, 8], (9..=14).collect::<Vec<_>>()]
            );
            assert_eq!(out.owner_of(0), Some(3));
            assert_eq!(labels(&out.unallocated), vec![15]);
        }
    }

    #[test]
    fn identical_agents_match_ffd() {
        let rows = vec![TYPE_A.to_vec(); 4];
        let inst = IdoInstance::new(Instance::new(rows).unwrap()).unwrap();
        let h = hffd(&inst, &t75(), AssignmentRule::MaxRatio).unwrap();
        let f = ffd(&TYPE_A, &Bundle::full(15), &Threshold::from_integer(75), 4);
        assert_eq!(h.bundles, f.bundles);
    }

    #[test]
    fn worked_example_is_ffv_for_last_agent() {
        let inst = worked_example();
        let out = hffd(&inst, &t75(), AssignmentRule::MaxRatio).unwrap();
        let t = FfvTuple::from_hffd(&inst, &out, &t75()).unwrap();
        assert_eq!(t.costs, TYPE_A.to_vec());
        assert!(t.is_ffv(MmsPrecondition::Verify).unwrap());
        assert_eq!(labels(&t.benchmark(0)), vec![1, 7, 8]);
        assert_eq!(labels(&t.benchmark(1)), vec![2, 3, 7]);
    }

    #[test]
    fn swapped_bundles_are_not_ffv() {
        let inst = worked_example();
        let out = hffd(&inst, &t75(), AssignmentRule::MaxRatio).unwrap();
        let mut t = FfvTuple::from_hffd(&inst, &out, &t75()).unwrap();
        t.bundles.swap(0, 1);
        assert!(!t.is_ffv(MmsPrecondition::Verify).unwrap());
        assert_eq!(t.ffv_violations(), vec![0]);
    }

    #[test]
    fn threshold_below_mms_is_a_precondition_error() {
        let t = FfvTuple::new(
            TYPE_A.to_vec(),
            Bundle::full(15),
            ffd(&TYPE_A, &Bundle::full(15), &Threshold::from_integer(73), 4).bundles,
            Threshold::from_integer(73),
        )
        .unwrap();
        assert!(matches!(t.is_ffv(MmsPrecondition::Verify), Err(Error::Precondition(_))));
        assert!(t.is_ffv(MmsPrecondition::Trust).unwrap());
    }

    #[test]
    fn lemma_checks_on_worked_example() {
        let inst = worked_example();
        let out = hffd(&inst, &t75(), AssignmentRule::MaxRatio).unwrap();
        let t = FfvTuple::from_hffd(&inst, &out, &t75()).unwrap();
        assert!(ffv_lemma_checks(&t).unwrap().is_empty());
    }

    #[test]
    fn lemma_checks_flag_a_planted_violation() {
        // A_1 = {c3} is lex-below the feasible {c1}; not FFV, so rejected up front
        let t = FfvTuple::new(
            vec![5, 4, 3],
            Bundle::full(3),
            vec![Bundle::new(vec![2]).unwrap()],
            Threshold::from_integer(12),
        )
        .unwrap();
        assert!(ffv_lemma_checks(&t).is_err());
    }

    #[test]
    fn rejects_overlapping_bundles() {
        let b = Bundle::new(vec![0]).unwrap();
        assert!(FfvTuple::new(vec![3, 2], Bundle::full(2), vec![b.clone(), b], Threshold::from_integer(5)).is_err());
        assert!(FfvTuple::new(vec![2, 3], Bundle::full(2), vec![], Threshold::from_integer(5)).is_err());
    }

    #[test]
    fn wrong_threshold_count() {
        assert!(hffd(&worked_example(), &t75()[..3], AssignmentRule::MaxRatio).is_err());
    }
}
