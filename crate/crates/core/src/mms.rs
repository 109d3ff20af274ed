//! Exact maximin share for desk-scale instances.
//!
//! The decision procedure packs the chores, largest first, into at most `n`
//! bins of capacity `floor(tau)`. Bins holding equal load are
//! interchangeable, so each chore is tried in only one bin per distinct
//! load, and failed `(depth, sorted loads)` states are memoized.

use std::collections::HashSet;

use serde::Serialize;

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::threshold::Threshold;

/// Largest chore count the CLI will hand to the exact solver.
pub const EXACT_MAX_CHORES: usize = 20;
/// Largest bin count the CLI will hand to the exact solver.
pub const EXACT_MAX_BINS: usize = 8;

/// The MMS value together with a partition witnessing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MmsCertificate {
    pub mu: u64,
    pub partition: Vec<Bundle>,
}

impl MmsCertificate {
    pub fn bundle_costs(&self, costs: &[u64]) -> Vec<u64> {
        self.partition.iter().map(|b| b.cost(costs)).collect()
    }
}

/// Can `items` be split into at most `n` bundles each costing at most `tau`?
pub fn feasible(costs: &[u64], items: &Bundle, n: usize, tau: &Threshold) -> bool {
    pack(costs, items, n, tau.capacity()).is_some()
}

/// Exact MMS of `items` under one cost vector with `n` bundles.
pub fn mms(costs: &[u64], items: &Bundle, n: usize) -> Result<MmsCertificate> {
    if n == 0 {
        return Err(Error::Precondition("bundle count must be at least 1".into()));
    }
    let total: u64 = items.cost(costs);
    let largest = items.iter().map(|c| costs[c]).max().unwrap_or(0);
    let mut lo = largest.max(total.div_ceil(n as u64));
    let mut hi = total;
    // the packing at `hi` always exists: everything in one bin
    let mut witness = pack(costs, items, n, hi).expect("one bin holds everything");
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match pack(costs, items, n, mid) {
            Some(p) => {
                hi = mid;
                witness = p;
            }
            None => lo = mid + 1,
        }
    }
    Ok(MmsCertificate {
        mu: hi,
        partition: witness,
    })
}

/// Search for a packing into `n` bins of capacity `cap`.
pub(crate) fn pack(costs: &[u64], items: &Bundle, n: usize, cap: u64) -> Option<Vec<Bundle>> {
    if items.is_empty() {
        return Some(vec![Bundle::empty(); n]);
    }
    if n == 0 {
        return None;
    }
    let sizes: Vec<u64> = items.iter().map(|c| costs[c]).collect();
    if sizes[0] > cap {
        return None;
    }
    let total: u128 = sizes.iter().map(|&s| s as u128).sum();
    if total > cap as u128 * n as u128 {
        return None;
    }
    let mut suffix = vec![0u128; sizes.len() + 1];
    for i in (0..sizes.len()).rev() {
        suffix[i] = suffix[i + 1] + sizes[i] as u128;
    }
    let mut search = Packer {
        sizes: &sizes,
        suffix: &suffix,
        cap,
        loads: vec![0; n],
        place: vec![0; sizes.len()],
        failed: HashSet::new(),
    };
    if !search.dfs(0) {
        return None;
    }
    let mut bins: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, chore) in items.iter().enumerate() {
        bins[search.place[i]].push(chore);
    }
    Some(bins.into_iter().map(Bundle::from_sorted).collect())
}

struct Packer<'a> {
    sizes: &'a [u64],
    suffix: &'a [u128],
    cap: u64,
    loads: Vec<u64>,
    place: Vec<usize>,
    failed: HashSet<(usize, Vec<u64>)>,
}

impl Packer<'_> {
    fn dfs(&mut self, i: usize) -> bool {
        if i == self.sizes.len() {
            return true;
        }
        let free: u128 = self.loads.iter().map(|&l| (self.cap - l) as u128).sum();
        if self.suffix[i] > free {
            return false;
        }
        let mut key_loads = self.loads.clone();
        key_loads.sort_unstable();
        let key = (i, key_loads);
        if self.failed.contains(&key) {
            return false;
        }
        let size = self.sizes[i];
        let mut tried: Vec<u64> = Vec::with_capacity(self.loads.len());
        for b in 0..self.loads.len() {
            let load = self.loads[b];
            if load + size > self.cap || tried.contains(&load) {
                continue;
            }
            tried.push(load);
            self.loads[b] += size;
            self.place[i] = b;
            if self.dfs(i + 1) {
                return true;
            }
            self.loads[b] -= size;
        }
        self.failed.insert(key);
        false
    }
}
