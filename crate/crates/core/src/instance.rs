//! Chore-allocation instances and the identical-order (IDO) transformation.

use std::cmp::Ordering;

use serde::Serialize;

use crate::bundle::{lex_cmp, Allocation, Bundle};
use crate::error::{Error, Result};

/// `n` agents, `m` chores, `costs[i][j]` is agent `i`'s cost for chore `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Instance {
    n: usize,
    m: usize,
    costs: Vec<Vec<u64>>,
}

impl Instance {
    pub fn new(costs: Vec<Vec<u64>>) -> Result<Self> {
        let n = costs.len();
        if n == 0 {
            return Err(Error::InvalidInstance("at least one agent is required".into()));
        }
        let m = costs[0].len();
        Self::with_dims(n, m, costs)
    }

    /// Build with explicit dimensions (so `m = 0` is representable).
    pub fn with_dims(n: usize, m: usize, costs: Vec<Vec<u64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("at least one agent is required".into()));
        }
        if costs.len() != n {
            return Err(Error::InvalidInstance(format!(
                "expected {n} cost rows, found {}",
                costs.len()
            )));
        }
        for (i, row) in costs.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidInstance(format!(
                    "row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            if row.iter().try_fold(0u64, |acc, &c| acc.checked_add(c)).is_none() {
                return Err(Error::InvalidInstance(format!("row {i} total overflows u64")));
            }
        }
        Ok(Instance { n, m, costs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn costs(&self) -> &[Vec<u64>] {
        &self.costs
    }

    pub fn row(&self, agent: usize) -> Result<&[u64]> {
        self.costs.get(agent).map(Vec::as_slice).ok_or(Error::OutOfRange {
            what: "agent",
            index: agent,
            limit: self.n,
        })
    }

    /// A copy with chore columns permuted: new column `p` is old column `perm[p]`.
    pub fn permute_chores(&self, perm: &[usize]) -> Result<Instance> {
        check_permutation(perm, self.m)?;
        let costs = self
            .costs
            .iter()
            .map(|row| perm.iter().map(|&j| row[j]).collect())
            .collect();
        Ok(Instance {
            n: self.n,
            m: self.m,
            costs,
        })
    }
}

fn check_permutation(perm: &[usize], m: usize) -> Result<()> {
    if perm.len() != m {
        return Err(Error::Precondition(format!(
            "ordering has {} entries, expected {m}",
            perm.len()
        )));
    }
    let mut seen = vec![false; m];
    for &j in perm {
        if j >= m || std::mem::replace(&mut seen[j], true) {
            return Err(Error::Precondition("ordering is not a permutation".into()));
        }
    }
    Ok(())
}

/// An instance whose chores are stored in universal order: column `p` is the
/// `p`-th largest chore for every agent. `labels[p]` is the chore's index in
/// the instance it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdoInstance {
    inst: Instance,
    labels: Vec<usize>,
}

impl IdoInstance {
    /// Accept an instance whose columns are already in universal order.
    pub fn new(inst: Instance) -> Result<Self> {
        let labels = (0..inst.m).collect();
        Self::check(&inst)?;
        Ok(IdoInstance { inst, labels })
    }

    /// Accept an instance with an explicit universal ordering
    /// (`ordering[p]` is the chore ranked `p`).
    pub fn with_ordering(inst: &Instance, ordering: &[usize]) -> Result<Self> {
        let sorted = inst.permute_chores(ordering)?;
        Self::check(&sorted)?;
        Ok(IdoInstance {
            inst: sorted,
            labels: ordering.to_vec(),
        })
    }

    /// Find a universal ordering if the instance is IDO.
    pub fn detect(inst: &Instance) -> Result<Self> {
        let mut order: Vec<usize> = (0..inst.m).collect();
        // any valid ordering is consistent with sorting by row 0, then the rest
        order.sort_by(|&a, &b| {
            for row in &inst.costs {
                match row[b].cmp(&row[a]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            a.cmp(&b)
        });
        Self::with_ordering(inst, &order)
    }

    fn check(inst: &Instance) -> Result<()> {
        for (i, row) in inst.costs.iter().enumerate() {
            if let Some(p) = row.windows(2).position(|w| w[0] < w[1]) {
                return Err(Error::NotIdo(format!(
                    "agent {i} ranks position {} above position {p}",
                    p + 1
                )));
            }
        }
        Ok(())
    }

    pub fn instance(&self) -> &Instance {
        &self.inst
    }

    pub fn n(&self) -> usize {
        self.inst.n
    }

    pub fn m(&self) -> usize {
        self.inst.m
    }

    /// Original chore index of universal position `p`.
    pub fn label(&self, p: usize) -> usize {
        self.labels[p]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Agent's costs in universal order (non-increasing).
    pub fn agent_costs(&self, agent: usize) -> Result<&[u64]> {
        self.inst.row(agent)
    }

    pub fn all_chores(&self) -> Bundle {
        Bundle::full(self.m())
    }

    fn check_bundle(&self, b: &Bundle) -> Result<()> {
        match b.max_index() {
            Some(c) if c >= self.m() => Err(Error::OutOfRange {
                what: "chore",
                index: c,
                limit: self.m(),
            }),
            _ => Ok(()),
        }
    }

    pub fn bundle_cost(&self, agent: usize, b: &Bundle) -> Result<u64> {
        let costs = self.agent_costs(agent)?;
        self.check_bundle(b)?;
        Ok(b.cost(costs))
    }

    pub fn lex_compare(&self, agent: usize, a: &Bundle, b: &Bundle) -> Result<Ordering> {
        let costs = self.agent_costs(agent)?;
        self.check_bundle(a)?;
        self.check_bundle(b)?;
        Ok(lex_cmp(costs, a, b))
    }
}

/// Sort every agent's row in non-increasing order. The new universal
/// ordering is positional, so the result is IDO by construction.
pub fn to_ido(inst: &Instance) -> IdoInstance {
    let costs = inst
        .costs
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.sort_unstable_by(|a, b| b.cmp(a));
            r
        })
        .collect();
    IdoInstance {
        inst: Instance {
            n: inst.n,
            m: inst.m,
            costs,
        },
        labels: (0..inst.m).collect(),
    }
}

/// Turn a complete allocation of `to_ido(original)` into an allocation of
/// `original` in which no agent pays more than in the IDO allocation.
///
/// Positions are processed from the smallest (`m`) to the largest; the
/// owner of each position takes their cheapest remaining original chore.
pub fn from_ido_allocation(original: &Instance, ido_alloc: &Allocation) -> Result<Allocation> {
    let (n, m) = (original.n, original.m);
    ido_alloc.validate(m)?;
    if ido_alloc.assignment.len() != n {
        return Err(Error::Precondition(format!(
            "allocation has {} agents, instance has {n}",
            ido_alloc.assignment.len()
        )));
    }
    let allocated: usize = ido_alloc.bundles.iter().map(Bundle::len).sum();
    if allocated != m {
        return Err(Error::Incomplete(m - allocated));
    }

    let mut owner = vec![usize::MAX; m];
    for agent in 0..n {
        for c in ido_alloc.bundle_of(agent) {
            owner[c] = agent;
        }
    }

    // each agent's chores from cheapest to most costly, ties to the later index
    // so that an identical-order input maps back to itself
    let preference: Vec<Vec<usize>> = original
        .costs
        .iter()
        .map(|row| {
            let mut idx: Vec<usize> = (0..m).collect();
            idx.sort_by_key(|&j| (row[j], std::cmp::Reverse(j)));
            idx
        })
        .collect();
    let mut cursor = vec![0usize; n];
    let mut taken = vec![false; m];
    let mut picks: Vec<Vec<usize>> = vec![Vec::new(); n];

    for p in (0..m).rev() {
        let agent = owner[p];
        let pref = &preference[agent];
        while taken[pref[cursor[agent]]] {
            cursor[agent] += 1;
        }
        let chore = pref[cursor[agent]];
        taken[chore] = true;
        picks[agent].push(chore);
    }

    let mut bundles = vec![Bundle::empty(); ido_alloc.bundles.len()];
    for (agent, chores) in picks.into_iter().enumerate() {
        bundles[ido_alloc.assignment[agent]] = chores.into_iter().collect();
    }
    Ok(Allocation {
        bundles,
        assignment: ido_alloc.assignment.clone(),
        unallocated: Bundle::empty(),
    })
}
