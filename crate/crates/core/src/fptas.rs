//! Per-agent threshold search and the HFFD-based approximation scheme.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::bundle::{Allocation, Bundle};
use crate::error::{Error, Result};
use crate::ffd::{ffd_succeeds, multifit};
use crate::hffd::{hffd, AssignmentRule};
use crate::instance::{from_ido_allocation, to_ido, IdoInstance, Instance};
use crate::threshold::{ceil_u64, int, Threshold};

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Worst-case ratio of FFD with `n` bins: 8/7, 15/13, 20/17 for 4 to 7
/// bins and 13/11 beyond.
pub fn alpha_ratio(n: usize) -> Result<BigRational> {
    match n {
        0 | 1 => Err(Error::Precondition(format!("ratio is defined for at least 2 bins, got {n}"))),
        2 => Ok(ratio(8, 7)),
        3 => Ok(ratio(15, 13)),
        4..=7 => Ok(ratio(20, 17)),
        _ => Ok(ratio(13, 11)),
    }
}

/// The MultiFit binary search for one agent's threshold.
pub fn binary_search_threshold(inst: &IdoInstance, agent: usize, lo: u64, hi: u64, n: usize) -> Result<u64> {
    let costs = inst.agent_costs(agent)?;
    Ok(multifit(costs, &inst.all_chores(), n, lo, hi)?.threshold)
}

/// The search loop without argument checks; `lo > hi` returns `hi`.
fn search(costs: &[u64], items: &Bundle, n: usize, lo: u64, hi: u64) -> u64 {
    let (mut l, mut u) = (lo, hi);
    while l < u {
        let tau = l + (u - l) / 2;
        if ffd_succeeds(costs, items, tau, n) {
            u = tau;
        } else {
            l = tau + 1;
        }
    }
    u
}

/// Smallest `t` with `(1 + eps)^t >= alpha`.
pub fn update_bound(alpha: &BigRational, eps: &BigRational) -> Result<u32> {
    if !eps.is_positive() {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    let base = BigRational::one() + eps;
    let mut power = BigRational::one();
    let mut t = 0u32;
    while power < *alpha {
        power *= &base;
        t += 1;
    }
    Ok(t)
}

/// The epsilon that makes the scheme exact at the FFD ratio for the bin
/// counts where FFD is known to be monotone: `1/7` for 2 agents, `1/26`
/// for 3.
pub fn exact_small_n_epsilon(n: usize) -> Result<BigRational> {
    match n {
        2 => Ok(ratio(1, 7)),
        3 => Ok(ratio(1, 26)),
        _ => Err(Error::Precondition(format!("exact mode is available for 2 or 3 agents, got {n}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdUpdate {
    pub round: usize,
    pub agent: usize,
    pub from: u64,
    pub to: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FptasTrace {
    pub initial: Vec<u64>,
    pub thresholds: Vec<u64>,
    pub updates: Vec<ThresholdUpdate>,
    /// HFFD runs performed, including the final successful one.
    pub rounds: usize,
}

impl FptasTrace {
    pub fn updates_of(&self, agent: usize) -> usize {
        self.updates.iter().filter(|u| u.agent == agent).count()
    }
}

#[derive(Debug, Clone)]
pub struct FptasOutcome {
    pub allocation: Allocation,
    pub trace: FptasTrace,
}

/// Run HFFD, raising the threshold of the agent that received the last
/// bundle by a factor `1 + eps` (then re-searching) until everything is
/// allocated.
pub fn fptas_allocate(inst: &IdoInstance, eps: &BigRational) -> Result<FptasOutcome> {
    if !eps.is_positive() {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    let (n, m) = (inst.n(), inst.m());
    if n == 0 {
        return Err(Error::Precondition("no agents".into()));
    }
    let items = inst.all_chores();
    let rows: Vec<&[u64]> = (0..n).map(|i| inst.agent_costs(i)).collect::<Result<_>>()?;
    let totals: Vec<u64> = rows.iter().map(|r| r.iter().sum()).collect();
    let mut h: Vec<u64> = (0..n)
        .map(|i| search(rows[i], &items, n, 1.min(totals[i]), totals[i]))
        .collect();
    let initial = h.clone();
    let max_rounds = match n {
        1 => 1,
        _ => n * update_bound(&alpha_ratio(n)?, eps)? as usize + 1,
    };
    let mut updates = Vec::new();
    let factor = BigRational::one() + eps;
    for round in 1..=max_rounds {
        let thresholds: Vec<Threshold> = h.iter().map(|&x| Threshold::from_integer(x)).collect();
        let alloc = hffd(inst, &thresholds, AssignmentRule::MaxRatio)?;
        if alloc.is_complete() {
            return Ok(FptasOutcome {
                allocation: alloc,
                trace: FptasTrace {
                    initial,
                    thresholds: h,
                    updates,
                    rounds: round,
                },
            });
        }
        let last = alloc
            .owner_of(n - 1)
            .ok_or_else(|| Error::Invariant("last bundle has no owner".into()))?;
        let lo = ceil_u64(&(&factor * int(h[last])));
        let to = search(rows[last], &items, n, lo, totals[last]);
        updates.push(ThresholdUpdate {
            round,
            agent: last,
            from: h[last],
            to,
        });
        h[last] = to;
    }
    Err(Error::Invariant(format!(
        "{m} chores still not allocated after {max_rounds} rounds"
    )))
}

/// [`fptas_allocate`] on an arbitrary instance through the identical-order
/// transformation and back.
pub fn allocate(original: &Instance, eps: &BigRational) -> Result<FptasOutcome> {
    let ido = to_ido(original);
    let out = fptas_allocate(&ido, eps)?;
    Ok(FptasOutcome {
        allocation: from_ido_allocation(original, &out.allocation)?,
        trace: out.trace,
    })
}
