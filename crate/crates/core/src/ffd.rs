//! First Fit Decreasing with a fixed number of bins, benchmark bundles and
//! MultiFit.

use serde::Serialize;

use crate::bundle::{Allocation, Bundle};
use crate::error::{Error, Result};
use crate::threshold::Threshold;

/// Fill one bin: scan `remaining` in universal order and take every chore
/// that still fits under `cap`. Taken chores are removed from `remaining`.
pub(crate) fn fill_bin(costs: &[u64], remaining: &mut Vec<usize>, cap: u64) -> Bundle {
    let mut load = 0u64;
    let mut taken = Vec::new();
    remaining.retain(|&c| {
        let next = load.saturating_add(costs[c]);
        if next <= cap {
            load = next;
            taken.push(c);
            false
        } else {
            true
        }
    });
    Bundle::from_sorted(taken)
}

/// FFD with `n` bins of size `tau`; chores that fit nowhere stay unallocated.
pub fn ffd(costs: &[u64], items: &Bundle, tau: &Threshold, n: usize) -> Allocation {
    let mut remaining = items.chores().to_vec();
    let bundles = (0..n)
        .map(|_| fill_bin(costs, &mut remaining, tau.capacity()))
        .collect();
    Allocation::identity(bundles, Bundle::from_sorted(remaining))
}

/// Whether FFD allocates every chore.
pub fn ffd_succeeds(costs: &[u64], items: &Bundle, cap: u64, n: usize) -> bool {
    let mut remaining = items.chores().to_vec();
    for _ in 0..n {
        if remaining.is_empty() {
            break;
        }
        fill_bin(costs, &mut remaining, cap);
    }
    remaining.is_empty()
}

/// The lexicographically maximal subset of `items` costing at most `tau`.
///
/// Greedy insertion in universal order attains it: any subset that beats
/// the greedy bundle at its first differing position would have offered
/// that larger chore to the greedy scan while it still fit.
pub fn benchmark_bundle(costs: &[u64], items: &Bundle, tau: &Threshold) -> Bundle {
    let mut remaining = items.chores().to_vec();
    fill_bin(costs, &mut remaining, tau.capacity())
}

/// Outcome of a MultiFit binary search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultifitResult {
    /// Final upper bound; FFD succeeds at this capacity.
    pub threshold: u64,
    /// Every probed capacity with whether FFD succeeded there.
    pub probes: Vec<(u64, bool)>,
}

/// Integer binary search over the FFD capacity.
///
/// Returns the search's final upper bound `u`. FFD success is not monotone
/// in the capacity, so `u` is not necessarily the smallest capacity at
/// which FFD succeeds; it satisfies `MMS <= u <= max(lo, alpha(n) * MMS)`.
pub fn multifit(costs: &[u64], items: &Bundle, n: usize, lo: u64, hi: u64) -> Result<MultifitResult> {
    if lo > hi {
        return Err(Error::Precondition(format!("lower bound {lo} exceeds upper bound {hi}")));
    }
    if !ffd_succeeds(costs, items, hi, n) {
        return Err(Error::UpperBoundFails(hi));
    }
    let (mut l, mut u) = (lo, hi);
    let mut probes = Vec::new();
    while l < u {
        let tau = l + (u - l) / 2;
        let ok = ffd_succeeds(costs, items, tau, n);
        probes.push((tau, ok));
        if ok {
            u = tau;
        } else {
            l = tau + 1;
        }
    }
    Ok(MultifitResult {
        threshold: u,
        probes,
    })
}
