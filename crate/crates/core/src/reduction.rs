//! Tidy-Up, domination and the reduction of excessive chores.
//!
//! These procedures operate on a single-agent [`FfvTuple`] that leaves at
//! least one chore unallocated. Tidy-Up shrinks such a tuple while keeping
//! it First-Fit-Valid; the reduction then replaces excessive chores by
//! cheaper ones until every bundle fits under the threshold.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::ffd::ffd;
use crate::hffd::{FfvTuple, MmsPrecondition};
use crate::mms::mms;
use crate::report::Report;
use crate::threshold::{int, Threshold};

/// Many-to-one map from the chores of a dominated bundle to the chores of
/// the dominating one.
pub type Domination = BTreeMap<usize, usize>;

/// Whether the `p`-th largest chore of `b` (1-based) is `mu`-redundant, i.e.
/// the chores before it already cost at least `mu`.
pub fn is_redundant(costs: &[u64], b: &Bundle, p: usize, mu: u64) -> Result<bool> {
    if p == 0 || p > b.len() {
        return Err(Error::OutOfRange {
            what: "bundle position",
            index: p,
            limit: b.len() + 1,
        });
    }
    let prefix: u64 = b.chores()[..p - 1].iter().map(|&c| costs[c]).sum();
    Ok(prefix >= mu)
}

/// All `mu`-redundant chores of `b`.
pub fn redundant_chores(costs: &[u64], b: &Bundle, mu: u64) -> Bundle {
    let mut prefix = 0u64;
    let mut out = Vec::new();
    for c in b {
        if prefix >= mu {
            out.push(c);
        }
        prefix += costs[c];
    }
    Bundle::from_sorted(out)
}

/// A mapping `f: b -> a` with `v(f^-1(c)) <= v(c)` for every `c` in `a`, if
/// one exists.
pub fn dominates(costs: &[u64], a: &Bundle, b: &Bundle) -> Option<Domination> {
    if b.is_empty() {
        return Some(Domination::new());
    }
    if a.is_empty() || b.cost(costs) > a.cost(costs) {
        return None;
    }
    let targets = a.chores();
    let sources = b.chores();
    let mut search = DominationSearch {
        costs,
        sources,
        residual: targets.iter().map(|&c| costs[c]).collect(),
        choice: vec![0; sources.len()],
        suffix: suffix_sums(costs, sources),
    };
    search
        .place(0)
        .then(|| sources.iter().zip(&search.choice).map(|(&s, &t)| (s, targets[t])).collect())
}

fn suffix_sums(costs: &[u64], chores: &[usize]) -> Vec<u64> {
    let mut out = vec![0u64; chores.len() + 1];
    for i in (0..chores.len()).rev() {
        out[i] = out[i + 1] + costs[chores[i]];
    }
    out
}

struct DominationSearch<'a> {
    costs: &'a [u64],
    sources: &'a [usize],
    residual: Vec<u64>,
    choice: Vec<usize>,
    suffix: Vec<u64>,
}

impl DominationSearch<'_> {
    fn place(&mut self, i: usize) -> bool {
        if i == self.sources.len() {
            return true;
        }
        if self.residual.iter().sum::<u64>() < self.suffix[i] {
            return false;
        }
        let c = self.costs[self.sources[i]];
        let mut tried: Vec<u64> = Vec::new();
        for t in 0..self.residual.len() {
            let r = self.residual[t];
            if r < c || tried.contains(&r) {
                continue;
            }
            tried.push(r);
            self.residual[t] -= c;
            self.choice[i] = t;
            if self.place(i + 1) {
                return true;
            }
            self.residual[t] += c;
        }
        false
    }
}

/// A Tidy-Up tuple together with the bookkeeping the lemma checks need.
#[derive(Debug, Clone)]
pub struct TidyContext {
    pub tuple: FfvTuple,
    /// Upper bound on the MMS used for redundancy, normally the exact MMS.
    pub mu: u64,
    pub gamma: BigRational,
    /// The maximin partition after the exchanges, one part per bundle.
    pub partition: Vec<Bundle>,
    pub cstar: usize,
    /// Bundles of the input tuple.
    pub source: Vec<Bundle>,
}

/// Tidy-Up with the exact MMS and its witness partition.
pub fn tidy_up(t: &FfvTuple, cstar: usize) -> Result<TidyContext> {
    let cert = mms(&t.costs, &t.items, t.n())?;
    tidy_up_with_partition(t, cstar, cert.mu, cert.partition)
}

/// Tidy-Up starting from a caller-supplied partition of the items into
/// `n` parts, each of cost at most `mu`.
pub fn tidy_up_with_partition(t: &FfvTuple, cstar: usize, mu: u64, partition: Vec<Bundle>) -> Result<TidyContext> {
    if !t.unallocated().contains(cstar) {
        return Err(Error::Precondition(format!("chore {cstar} is not an unallocated item")));
    }
    if t.tau.cmp_integer(mu) == Ordering::Less {
        return Err(Error::Precondition(format!("tau {} is below mu {mu}", t.tau)));
    }
    if partition.len() != t.n() {
        return Err(Error::Precondition(format!(
            "partition has {} parts for {} bundles",
            partition.len(),
            t.n()
        )));
    }
    let mut covered = Bundle::empty();
    for p in &partition {
        if !p.is_disjoint(&covered) {
            return Err(Error::Precondition("partition parts overlap".into()));
        }
        if p.cost(&t.costs) > mu {
            return Err(Error::Precondition(format!("a partition part costs more than {mu}")));
        }
        covered = covered.union(p);
    }
    if covered != t.items {
        return Err(Error::Precondition("partition does not cover the items".into()));
    }
    if !t.is_ffv(MmsPrecondition::Trust)? {
        return Err(Error::Precondition("tuple is not First-Fit-Valid".into()));
    }
    tidy(t, cstar, mu, partition)
}

fn tidy(t: &FfvTuple, cstar: usize, mu: u64, mut parts: Vec<Bundle>) -> Result<TidyContext> {
    let costs = &t.costs;
    let mut items = t.items.clone();
    let mut bundles = t.bundles.clone();

    let strip = |gone: &Bundle, items: &mut Bundle, bundles: &mut Vec<Bundle>, parts: &mut Vec<Bundle>| {
        *items = items.difference(gone);
        for b in bundles.iter_mut().chain(parts.iter_mut()) {
            *b = b.difference(gone);
        }
    };

    let mut gone = t.unallocated();
    gone.remove(cstar);
    let floor = costs[cstar];
    let small: Bundle = items.iter().filter(|&c| costs[c] < floor).collect();
    gone = gone.union(&small);
    strip(&gone, &mut items, &mut bundles, &mut parts);

    let redundant: Bundle = bundles
        .iter()
        .flat_map(|b| redundant_chores(costs, b, mu).chores().to_vec())
        .collect();
    strip(&redundant, &mut items, &mut bundles, &mut parts);

    'scan: loop {
        for k in 0..bundles.len() {
            for j in 0..parts.len() {
                if let Some(f) = dominates(costs, &bundles[k], &parts[j]) {
                    exchange(&bundles[k], j, &mut parts, f)?;
                    let a = bundles.remove(k);
                    parts.remove(j);
                    items = items.difference(&a);
                    continue 'scan;
                }
            }
        }
        break;
    }

    let tuple = FfvTuple::new(costs.clone(), items, bundles, t.tau.clone())?;
    let gamma = t.tau.value() - int(mu);
    Ok(TidyContext {
        tuple,
        mu,
        gamma,
        partition: parts,
        cstar,
        source: t.bundles.clone(),
    })
}

/// Rewrite the partition so that part `j` equals `a`, moving the preimage
/// of every chore of `a` into the part that chore came from.
fn exchange(a: &Bundle, j: usize, parts: &mut [Bundle], mut f: Domination) -> Result<()> {
    let pj = parts[j].clone();
    // make every chore shared by `a` and part j its own image
    for d in a.iter().filter(|&d| pj.contains(d)) {
        let e = f[&d];
        if e == d {
            continue;
        }
        for x in f.values_mut() {
            if *x == d {
                *x = e;
            }
        }
        f.insert(d, d);
    }
    let mut stray = Bundle::empty();
    for (&x, &y) in &f {
        if !a.contains(x) && pj.contains(y) {
            // only zero-cost chores can share an image with a fixed point
            stray.insert(x);
        }
    }
    let outside = a.difference(&pj);
    for c in &outside {
        let r = (0..parts.len())
            .find(|&r| r != j && parts[r].contains(c))
            .ok_or_else(|| Error::Invariant(format!("chore {c} is in no partition part")))?;
        let pre: Bundle = f.iter().filter(|(_, &y)| y == c).map(|(&x, _)| x).collect();
        parts[r].remove(c);
        parts[r] = parts[r].union(&pre);
    }
    if !stray.is_empty() {
        let r = (0..parts.len())
            .find(|&r| r != j)
            .ok_or_else(|| Error::Invariant("no part left for zero-cost chores".into()))?;
        parts[r] = parts[r].union(&stray);
    }
    parts[j] = a.clone();
    Ok(())
}

/// Verify the Tidy-Up lemma conditions on a context.
pub fn tidy_lemma_check(ctx: &TidyContext) -> Report {
    let t = &ctx.tuple;
    let costs = &t.costs;
    let mu = ctx.mu;
    let mut report = Report::new();

    for (k, b) in t.bundles.iter().enumerate() {
        report.check(ctx.source.iter().any(|s| b.is_subset(s)), "subset", || {
            format!("bundle {} is not inside any input bundle", k + 1)
        });
        let red = redundant_chores(costs, b, mu);
        report.check(red.is_empty(), "no-redundant", || {
            format!("bundle {} has {mu}-redundant chores {:?}", k + 1, red.chores())
        });
    }

    let unallocated = t.unallocated();
    report.check(
        t.items.contains(ctx.cstar) && unallocated == Bundle::from_sorted(vec![ctx.cstar]),
        "smallest",
        || format!("unallocated chores are {:?}, expected only {}", unallocated.chores(), ctx.cstar),
    );
    if let Some(c) = t.items.iter().find(|&c| costs[c] < costs[ctx.cstar]) {
        report.fail("smallest", format!("chore {c} is cheaper than the retained chore"));
    }

    for c in &t.items {
        report.check(int(costs[c]) > ctx.gamma, "hz", || {
            format!("chore {c} costs {} <= tau - mu", costs[c])
        });
    }

    let covered: Bundle = ctx.partition.iter().flat_map(|p| p.iter()).collect();
    report.check(covered == t.items, "maxvalue", || "partition does not cover the items".into());
    report.check(ctx.partition.len() == t.n(), "maxvalue", || {
        format!("{} parts for {} bundles", ctx.partition.len(), t.n())
    });
    for (j, p) in ctx.partition.iter().enumerate() {
        report.check(p.cost(costs) <= mu, "maxvalue", || {
            format!("part {} costs {} > {mu}", j + 1, p.cost(costs))
        });
        report.check(p.len() >= 3, "threechores", || {
            format!("part {} has {} chores", j + 1, p.len())
        });
    }

    for (k, b) in t.bundles.iter().enumerate() {
        report.check(b.len() >= 2, "atleasttwochores", || {
            format!("bundle {} has {} chores", k + 1, b.len())
        });
        let top: u64 = b.chores().iter().take(2).map(|&c| costs[c]).sum();
        report.check(top < mu, "twochores", || {
            format!("two largest chores of bundle {} cost {top} >= {mu}", k + 1)
        });
    }
    report
}

/// `tau - v(B without its last chore)`.
pub fn fit_in_space(costs: &[u64], b: &Bundle, tau: &Threshold) -> Result<BigRational> {
    let last = b
        .last_chore()
        .ok_or_else(|| Error::Precondition("fit-in space of an empty bundle".into()))?;
    Ok(tau.value() - int(b.cost(costs) - costs[last]))
}

/// Index of the first bundle costing more than `tau`.
pub fn first_excessive(t: &FfvTuple) -> Option<usize> {
    t.bundles.iter().position(|b| !t.tau.admits(t.cost(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChoreClass {
    Excessive,
    Regular,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// Per bundle, the class of each chore in bundle order.
    pub classes: Vec<Vec<ChoreClass>>,
    /// Violations of the ordering of r-regular bundles.
    pub report: Report,
}

impl Classification {
    pub fn class_of(&self, t: &FfvTuple, chore: usize) -> Option<ChoreClass> {
        t.bundles.iter().zip(&self.classes).find_map(|(b, cls)| {
            b.chores().iter().position(|&c| c == chore).map(|i| cls[i])
        })
    }

    pub fn regular_count(&self, k: usize) -> usize {
        self.classes[k].iter().filter(|&&c| c == ChoreClass::Regular).count()
    }
}

/// Label allocated chores as excessive, regular or fallback. When a chore is
/// unallocated, bundles with `r` regular chores must all precede those with
/// `r + 1`; violations are reported under `regular_order`.
pub fn classify_chores(t: &FfvTuple) -> Classification {
    let costs = &t.costs;
    let n = t.n();
    let mut classes = Vec::with_capacity(n);
    for k in 0..n {
        let b = &t.bundles[k];
        let next_top = (k + 1 < n)
            .then(|| t.bundles[k + 1].nth_largest(1))
            .flatten()
            .map_or(0, |c| costs[c]);
        let excessive = !t.tau.admits(t.cost(b));
        let last = b.last_chore();
        classes.push(
            b.iter()
                .map(|c| {
                    if excessive && Some(c) == last {
                        ChoreClass::Excessive
                    } else if costs[c] >= next_top {
                        ChoreClass::Regular
                    } else {
                        ChoreClass::Fallback
                    }
                })
                .collect::<Vec<_>>(),
        );
    }
    let mut out = Classification {
        classes,
        report: Report::new(),
    };
    if !t.unallocated().is_empty() {
        let counts: Vec<usize> = (0..n).map(|k| out.regular_count(k)).collect();
        for i in 0..n {
            for j in i + 1..n {
                if counts[j] >= 1 && counts[i] == counts[j] + 1 {
                    out.report.fail(
                        "regular_order",
                        format!(
                            "bundle {} is {}-regular but precedes {}-regular bundle {}",
                            i + 1,
                            counts[i],
                            counts[j],
                            j + 1
                        ),
                    );
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitCase {
    Small,
    Medium,
    Large,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedChore {
    pub cost: BigRational,
    pub case: FitCase,
}

/// Cost of a replacement for the excessive chore of bundle `k`, which must
/// be the first bundle over the threshold.
pub fn suitable_reduced_cost(ctx: &TidyContext, k: usize) -> Result<ReducedChore> {
    let t = &ctx.tuple;
    match first_excessive(t) {
        None => return Err(Error::Precondition("no excessive chore".into())),
        Some(first) if first != k => {
            return Err(Error::Precondition(format!(
                "bundle {} is not the first excessive bundle ({})",
                k + 1,
                first + 1
            )))
        }
        _ => {}
    }
    if int(7) * t.tau.value() < int(8) * int(ctx.mu) {
        return Err(Error::Precondition(format!("tau {} is below 8/7 of {}", t.tau, ctx.mu)));
    }
    let costs = &t.costs;
    let fs = fit_in_space(costs, &t.bundles[k], &t.tau)?;
    let vstar = int(costs[ctx.cstar]);
    let two_gamma = &ctx.gamma * int(2);
    if fs < vstar {
        return Ok(ReducedChore {
            cost: BigRational::zero(),
            case: FitCase::Small,
        });
    }
    if fs <= two_gamma {
        let min_non_last = t.bundles[..=k]
            .iter()
            .flat_map(|b| b.chores()[..b.len().saturating_sub(1)].iter().map(|&c| costs[c]))
            .min();
        let cost = match min_non_last {
            Some(c) if int(c) < fs => int(c),
            _ => fs,
        };
        return Ok(ReducedChore {
            cost,
            case: FitCase::Medium,
        });
    }
    let classes = classify_chores(t);
    let shape = &classes.classes[k];
    if shape != &[ChoreClass::Regular, ChoreClass::Regular, ChoreClass::Excessive] {
        return Err(Error::Invariant(format!(
            "first excessive bundle {} has shape {shape:?}, expected two regular chores and the excessive one",
            k + 1
        )));
    }
    Ok(ReducedChore {
        cost: fs,
        case: FitCase::Large,
    })
}

/// Replacement of the excessive chore of bundle `k` by a fresh chore of
/// cost `new_cost`. Chore positions are renumbered: among equal costs, the
/// chores of bundles `0..=k` come first, then the fresh chore, then the rest.
#[derive(Debug, Clone)]
pub struct Replacement {
    /// The tuple with the excessive chore replaced; bundles `0..=k` are the
    /// ones FFD builds on the new items.
    pub tuple: FfvTuple,
    pub fresh: usize,
    /// New position of each old position (`None` for the removed chore).
    pub moved: Vec<Option<usize>>,
    /// Whether the FFD bundles `0..=k` cover exactly the old first `k + 1`
    /// bundles with the excessive chore swapped for the fresh one.
    pub suitable: bool,
}

pub fn replace_excessive(t: &FfvTuple, k: usize, new_cost: u64) -> Result<Replacement> {
    let old = t.bundles[k]
        .last_chore()
        .ok_or_else(|| Error::Precondition("empty bundle".into()))?;
    if new_cost >= t.costs[old] {
        return Err(Error::Precondition(format!(
            "reduced cost {new_cost} is not below {}",
            t.costs[old]
        )));
    }
    let n = t.n();
    let mut group = vec![n; t.costs.len()];
    for (j, b) in t.bundles.iter().enumerate() {
        for c in b {
            group[c] = j;
        }
    }
    // None marks the fresh chore
    let mut order: Vec<Option<usize>> = t.items.iter().filter(|&c| c != old).map(Some).collect();
    order.push(None);
    let key = |x: &Option<usize>| match *x {
        Some(c) => (std::cmp::Reverse(t.costs[c]), group[c].min(k + 1), c),
        None => (std::cmp::Reverse(new_cost), k, usize::MAX),
    };
    order.sort_by_key(key);

    let mut moved = vec![None; t.costs.len()];
    let mut costs = Vec::with_capacity(order.len());
    let mut fresh = 0;
    for (p, x) in order.iter().enumerate() {
        match *x {
            Some(c) => {
                moved[c] = Some(p);
                costs.push(t.costs[c]);
            }
            None => {
                fresh = p;
                costs.push(new_cost);
            }
        }
    }
    let remap = |b: &Bundle| -> Bundle { b.iter().filter_map(|c| moved[c]).collect() };
    let items = Bundle::full(costs.len());
    let mut expected: Bundle = t.bundles[..=k].iter().map(remap).fold(Bundle::empty(), |a, b| a.union(&b));
    expected.insert(fresh);

    let d = ffd(&costs, &items, &t.tau, k + 1).bundles;
    let got = d.iter().fold(Bundle::empty(), |a, b| a.union(b));
    let suitable = got == expected;

    let mut bundles = d;
    bundles.extend(t.bundles[k + 1..].iter().map(remap));
    let tuple = FfvTuple::new(costs, items, bundles, t.tau.clone())?;
    Ok(Replacement {
        tuple,
        fresh,
        moved,
        suitable,
    })
}

/// Renumber the items so that among equal costs the chores of earlier
/// bundles come first and unallocated chores last. Items outside the tuple
/// are dropped. Returns the new tuple and the new position of each old one.
pub fn canonicalize(t: &FfvTuple) -> Result<(FfvTuple, Vec<Option<usize>>)> {
    let n = t.n();
    let mut group = vec![n; t.costs.len()];
    for (j, b) in t.bundles.iter().enumerate() {
        for c in b {
            group[c] = j;
        }
    }
    let mut order: Vec<usize> = t.items.chores().to_vec();
    order.sort_by_key(|&c| (std::cmp::Reverse(t.costs[c]), group[c], c));
    let mut moved = vec![None; t.costs.len()];
    for (p, &c) in order.iter().enumerate() {
        moved[c] = Some(p);
    }
    let costs = order.iter().map(|&c| t.costs[c]).collect();
    let bundles = t
        .bundles
        .iter()
        .map(|b| b.iter().filter_map(|c| moved[c]).collect())
        .collect();
    Ok((FfvTuple::new(costs, Bundle::full(order.len()), bundles, t.tau.clone())?, moved))
}

/// Multiply costs and threshold by the threshold's denominator.
pub fn scale_to_integer(t: &FfvTuple) -> Result<(FfvTuple, u64)> {
    let s = t
        .tau
        .denom()
        .to_u64()
        .ok_or_else(|| Error::InvalidRational(format!("denominator of {} is too large", t.tau)))?;
    let costs = t
        .costs
        .iter()
        .map(|&c| c.checked_mul(s))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidInstance("scaled costs overflow".into()))?;
    let tau = Threshold::new(t.tau.value() * int(s))?;
    Ok((FfvTuple::new(costs, t.items.clone(), t.bundles.clone(), tau)?, s))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionStep {
    pub bundle: usize,
    pub case: FitCase,
    pub removed_cost: u64,
    pub reduced_cost: u64,
}

/// Output of [`reduce_excessive`]. Costs are in units of `1 / scale` of
/// the input costs so that the threshold is an integer.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub tuple: FfvTuple,
    pub cstar: usize,
    pub scale: u64,
    /// Exact MMS of the scaled input.
    pub mu: u64,
    pub input_bundles: usize,
    pub steps: Vec<ReductionStep>,
}

/// Replace excessive chores by suitable reduced chores until no bundle
/// exceeds the threshold.
pub fn reduce_excessive(t: &FfvTuple, cstar: usize) -> Result<Reduction> {
    if !t.unallocated().contains(cstar) {
        return Err(Error::Precondition(format!("chore {cstar} is not an unallocated item")));
    }
    let (scaled, scale) = scale_to_integer(t)?;
    let mu = scaled.mms()?;
    if int(7) * scaled.tau.value() < int(8 * mu) {
        return Err(Error::Precondition(format!(
            "tau {} is below 8/7 of the MMS {}",
            t.tau,
            int(mu) / int(scale)
        )));
    }
    if !scaled.is_ffv(MmsPrecondition::Trust)? {
        return Err(Error::Precondition("tuple is not First-Fit-Valid".into()));
    }
    let n = t.n();
    let mut ctx = tidy_up(&scaled, cstar)?;
    let mut steps = Vec::new();
    while let Some(k) = first_excessive(&ctx.tuple) {
        if steps.len() >= n {
            return Err(Error::Invariant(format!("excessive chores remain after {n} reductions")));
        }
        let check = tidy_lemma_check(&ctx);
        if !check.is_empty() {
            return Err(Error::Invariant(format!("tidy tuple fails its lemma: {check}")));
        }
        let (tuple, moved) = canonicalize(&ctx.tuple)?;
        let remap = |b: &Bundle| -> Bundle { b.iter().filter_map(|c| moved[c]).collect() };
        let canon = TidyContext {
            cstar: moved[ctx.cstar].ok_or_else(|| Error::Invariant("retained chore vanished".into()))?,
            partition: ctx.partition.iter().map(remap).collect(),
            source: ctx.source.iter().map(remap).collect(),
            tuple,
            mu: ctx.mu,
            gamma: ctx.gamma.clone(),
        };
        let red = suitable_reduced_cost(&canon, k)?;
        if !red.cost.is_integer() {
            return Err(Error::Invariant(format!("reduced cost {} is not integral", red.cost)));
        }
        let new_cost = red
            .cost
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::Invariant("reduced cost out of range".into()))?;
        let old = canon.tuple.bundles[k].last_chore().expect("excessive bundle is non-empty");
        let removed_cost = canon.tuple.costs[old];
        let rep = replace_excessive(&canon.tuple, k, new_cost)?;
        if !rep.suitable {
            return Err(Error::Invariant(format!(
                "reduced chore of cost {new_cost} for bundle {} changes the FFD prefix",
                k + 1
            )));
        }
        steps.push(ReductionStep {
            bundle: k,
            case: red.case,
            removed_cost,
            reduced_cost: new_cost,
        });
        let cstar = rep.moved[canon.cstar].expect("retained chore is never replaced");
        ctx = tidy_up(&rep.tuple, cstar)?;
    }
    // equal-cost chores are interchangeable; put the retained one last
    let (tuple, moved) = canonicalize(&ctx.tuple)?;
    let cstar = moved[ctx.cstar].ok_or_else(|| Error::Invariant("retained chore vanished".into()))?;
    Ok(Reduction {
        tuple,
        cstar,
        scale,
        mu,
        input_bundles: n,
        steps,
    })
}

/// Check the guarantees of [`reduce_excessive`]: the result is FFV, has no
/// more bundles than the input, MMS at most the input's, keeps the retained
/// chore unallocated, has no bundle over the threshold, and FFD on its items
/// still leaves the retained chore out.
pub fn reduction_check(r: &Reduction) -> Result<Report> {
    let t = &r.tuple;
    let mut report = Report::new();
    report.check(t.is_ffv(MmsPrecondition::Trust)?, "ffv", || {
        format!("bundles {:?} are below their benchmarks", t.ffv_violations())
    });
    report.check(t.n() <= r.input_bundles, "bundle_count", || {
        format!("{} bundles, input had {}", t.n(), r.input_bundles)
    });
    let mu = t.mms()?;
    report.check(mu <= r.mu, "maximin", || format!("MMS {mu} exceeds {}", r.mu));
    report.check(t.tau.cmp_integer(mu) != Ordering::Less, "maximin", || {
        format!("tau {} is below MMS {mu}", t.tau)
    });
    report.check(
        t.items.contains(r.cstar) && t.unallocated().contains(r.cstar),
        "unallocated",
        || format!("chore {} is allocated or missing", r.cstar),
    );
    for (k, b) in t.bundles.iter().enumerate() {
        report.check(t.tau.admits(t.cost(b)), "no_excessive", || {
            format!("bundle {} costs {} > {}", k + 1, t.cost(b), t.tau)
        });
    }
    let out = ffd(&t.costs, &t.items, &t.tau, t.n());
    report.check(out.unallocated.contains(r.cstar), "ffd_leaves_cstar", || {
        format!("FFD on the reduced items allocates chore {}", r.cstar)
    });
    Ok(report)
}
