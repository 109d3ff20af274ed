//! Bundles, allocations and the lexicographic order on cost profiles.
//!
//! A chore is identified by its position in the universal ordering, so a
//! bundle stored as an ascending list of positions lists its chores from
//! the largest to the smallest: `B[p]` is simply the `p`-th entry.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of chore positions, kept sorted ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bundle(Vec<usize>);

impl Bundle {
    pub fn empty() -> Self {
        Bundle(Vec::new())
    }

    /// Build a bundle, rejecting duplicate chores.
    pub fn new(mut chores: Vec<usize>) -> Result<Self> {
        chores.sort_unstable();
        if chores.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Precondition("bundle contains a duplicate chore".into()));
        }
        Ok(Bundle(chores))
    }

    pub(crate) fn from_sorted(chores: Vec<usize>) -> Self {
        debug_assert!(chores.windows(2).all(|w| w[0] < w[1]));
        Bundle(chores)
    }

    /// All chores `0..m`.
    pub fn full(m: usize) -> Self {
        Bundle((0..m).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn chores(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, chore: usize) -> bool {
        self.0.binary_search(&chore).is_ok()
    }

    /// `B[p]` with 1-based `p`; `None` past the end.
    pub fn nth_largest(&self, p: usize) -> Option<usize> {
        p.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    /// The last (smallest) chore of the bundle.
    pub fn last_chore(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn insert(&mut self, chore: usize) -> bool {
        match self.0.binary_search(&chore) {
            Ok(_) => false,
            Err(at) => {
                self.0.insert(at, chore);
                true
            }
        }
    }

    pub fn remove(&mut self, chore: usize) -> bool {
        match self.0.binary_search(&chore) {
            Ok(at) => {
                self.0.remove(at);
                true
            }
            Err(_) => false,
        }
    }

    pub fn retain(&mut self, f: impl FnMut(&usize) -> bool) {
        self.0.retain(f);
    }

    pub fn union(&self, other: &Bundle) -> Bundle {
        let mut out: Vec<usize> = self.0.iter().chain(other.0.iter()).copied().collect();
        out.sort_unstable();
        out.dedup();
        Bundle(out)
    }

    pub fn difference(&self, other: &Bundle) -> Bundle {
        Bundle(self.iter().filter(|c| !other.contains(*c)).collect())
    }

    pub fn is_disjoint(&self, other: &Bundle) -> bool {
        self.iter().all(|c| !other.contains(c))
    }

    pub fn is_subset(&self, other: &Bundle) -> bool {
        self.iter().all(|c| other.contains(c))
    }

    /// Total cost under a single cost vector.
    pub fn cost(&self, costs: &[u64]) -> u64 {
        self.iter().map(|c| costs[c]).sum()
    }

    /// Cost profile `v(B[1]), v(B[2]), ...`.
    pub fn profile(&self, costs: &[u64]) -> Vec<u64> {
        self.iter().map(|c| costs[c]).collect()
    }
}

impl FromIterator<usize> for Bundle {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Bundle(v)
    }
}

impl<'a> IntoIterator for &'a Bundle {
    type Item = usize;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, usize>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

/// Lexicographic comparison of cost profiles, with `v(B[p]) = 0` past the end.
///
/// `costs` must be non-increasing along positions.
pub fn lex_cmp(costs: &[u64], a: &Bundle, b: &Bundle) -> Ordering {
    lex_cmp_profiles(a.iter().map(|c| costs[c]), b.iter().map(|c| costs[c]))
}

pub(crate) fn lex_cmp_profiles(
    a: impl IntoIterator<Item = u64>,
    b: impl IntoIterator<Item = u64>,
) -> Ordering {
    let mut a = a.into_iter();
    let mut b = b.into_iter();
    loop {
        match (a.next(), b.next()) {
            (None, None) => return Ordering::Equal,
            (x, y) => match x.unwrap_or(0).cmp(&y.unwrap_or(0)) {
                Ordering::Equal => continue,
                other => return other,
            },
        }
    }
}

/// An ordered bundle collection together with an assignment of agents to
/// bundles. `assignment[i]` is the index of the bundle agent `i` receives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub bundles: Vec<Bundle>,
    pub assignment: Vec<usize>,
    pub unallocated: Bundle,
}

impl Allocation {
    /// Bundles with the identity assignment.
    pub fn identity(bundles: Vec<Bundle>, unallocated: Bundle) -> Self {
        let assignment = (0..bundles.len()).collect();
        Allocation {
            bundles,
            assignment,
            unallocated,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.unallocated.is_empty()
    }

    pub fn bundle_of(&self, agent: usize) -> &Bundle {
        &self.bundles[self.assignment[agent]]
    }

    /// The agent receiving bundle `k`, if any.
    pub fn owner_of(&self, k: usize) -> Option<usize> {
        self.assignment.iter().position(|&b| b == k)
    }

    pub fn allocated(&self) -> Bundle {
        self.bundles.iter().flat_map(|b| b.iter()).collect()
    }

    /// Check the structural invariants against a chore count `m`: bundles
    /// and the unallocated set are pairwise disjoint, in range, and the
    /// assignment is a bijection.
    pub fn validate(&self, m: usize) -> Result<()> {
        let mut seen = vec![false; m];
        for b in self.bundles.iter().chain(std::iter::once(&self.unallocated)) {
            for c in b {
                if c >= m {
                    return Err(Error::OutOfRange {
                        what: "chore",
                        index: c,
                        limit: m,
                    });
                }
                if std::mem::replace(&mut seen[c], true) {
                    return Err(Error::Precondition(format!("chore {c} appears twice")));
                }
            }
        }
        let n = self.bundles.len();
        if self.assignment.len() != n {
            return Err(Error::Precondition("assignment length differs from bundle count".into()));
        }
        let mut hit = vec![false; n];
        for &k in &self.assignment {
            if k >= n || std::mem::replace(&mut hit[k], true) {
                return Err(Error::Precondition("assignment is not a permutation".into()));
            }
        }
        Ok(())
    }
}
