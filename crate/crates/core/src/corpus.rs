//! Seeded random instances and First-Fit-Valid tuples for property runs.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::ffd::ffd;
use crate::hffd::FfvTuple;
use crate::instance::{IdoInstance, Instance};
use crate::mms::mms;
use crate::monotonicity::{enumerate_ffv, Visit};
use crate::threshold::{int, Threshold};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `m` costs in `1..=max_cost`, non-increasing.
pub fn random_costs<R: Rng>(rng: &mut R, m: usize, max_cost: u64) -> Vec<u64> {
    let mut costs: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=max_cost.max(1))).collect();
    costs.sort_unstable_by(|a, b| b.cmp(a));
    costs
}

/// Independent rows in `1..=max_cost`, not in identical order.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, m: usize, max_cost: u64) -> Instance {
    let rows = (0..n)
        .map(|_| (0..m).map(|_| rng.gen_range(1..=max_cost.max(1))).collect())
        .collect();
    Instance::with_dims(n, m, rows).expect("generated rows are rectangular")
}

pub fn random_ido_instance<R: Rng>(rng: &mut R, n: usize, m: usize, max_cost: u64) -> IdoInstance {
    let rows = (0..n).map(|_| random_costs(rng, m, max_cost)).collect();
    IdoInstance::new(Instance::with_dims(n, m, rows).expect("generated rows are rectangular"))
        .expect("sorted rows are in identical order")
}

/// A First-Fit-Valid tuple with `cstar` among its unallocated chores.
#[derive(Debug, Clone)]
pub struct FfvSample {
    pub tuple: FfvTuple,
    pub cstar: usize,
    pub mu: u64,
    pub seed: u64,
}

/// How chore costs of a corpus instance are drawn.
#[derive(Debug, Clone)]
pub enum CostModel {
    /// `m` uniform costs in `1..=max_cost` with `m` in `min_m..=max_m`.
    Uniform { min_m: usize, max_m: usize, max_cost: u64 },
    /// `n` parts of cost exactly `part_cost`, each split into `min_chores..=max_chores`
    /// chores costing more than `part_cost / 7`.
    Partition {
        part_cost: u64,
        min_chores: usize,
        max_chores: usize,
    },
}

impl CostModel {
    pub fn draw<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<u64> {
        match *self {
            CostModel::Uniform { min_m, max_m, max_cost } => {
                let m = rng.gen_range(min_m..=max_m.max(min_m));
                random_costs(rng, m, max_cost)
            }
            CostModel::Partition {
                part_cost,
                min_chores,
                max_chores,
            } => {
                let mut costs = Vec::new();
                for _ in 0..n {
                    let k = rng.gen_range(min_chores.max(1)..=max_chores.max(min_chores));
                    costs.extend(split(rng, part_cost, k, part_cost / 7 + 1));
                }
                costs.sort_unstable_by(|a, b| b.cmp(a));
                costs
            }
        }
    }
}

/// `total` as `k` random summands, each at least `floor` when possible.
fn split<R: Rng>(rng: &mut R, total: u64, k: usize, floor: u64) -> Vec<u64> {
    let floor = if floor * k as u64 > total { total / k as u64 } else { floor };
    let spare = total - floor * k as u64;
    let mut cuts: Vec<u64> = (0..k - 1).map(|_| rng.gen_range(0..=spare)).collect();
    cuts.push(0);
    cuts.push(spare);
    cuts.sort_unstable();
    cuts.windows(2).map(|w| floor + w[1] - w[0]).collect()
}

#[derive(Debug, Clone)]
pub struct FfvCorpusConfig {
    pub bundles: Vec<usize>,
    pub costs: CostModel,
    /// `tau / mu` is drawn from `[ratio_lo, ratio_hi)`.
    pub ratio_lo: BigRational,
    pub ratio_hi: BigRational,
    /// Collections kept per instance and threshold.
    pub per_instance: usize,
    /// Complete collections visited per instance before sampling stops.
    pub visit_limit: usize,
}

/// FFV tuples with leftovers for one seed. Thresholds tried are the lower
/// end `ratio_lo * mu` and every integer inside the window.
pub fn ffv_samples(seed: u64, cfg: &FfvCorpusConfig) -> Result<Vec<FfvSample>> {
    if cfg.bundles.is_empty() {
        return Err(Error::Precondition("empty corpus configuration".into()));
    }
    let mut rng = rng(seed);
    let n = *cfg.bundles.choose(&mut rng).expect("non-empty");
    let costs = cfg.costs.draw(&mut rng, n);
    ffv_samples_for(costs, n, seed, cfg, &mut rng)
}

/// FFV tuples with leftovers on fixed costs (sorted non-increasing).
pub fn ffv_samples_for<R: Rng>(
    costs: Vec<u64>,
    n: usize,
    seed: u64,
    cfg: &FfvCorpusConfig,
    rng: &mut R,
) -> Result<Vec<FfvSample>> {
    if costs.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Precondition("costs must be non-increasing".into()));
    }
    let m = costs.len();
    let items = Bundle::full(m);
    let mu = mms(&costs, &items, n)?.mu;

    let lo = &cfg.ratio_lo * int(mu);
    let hi = &cfg.ratio_hi * int(mu);
    let mut taus = vec![lo.clone()];
    let first = lo.ceil().to_integer();
    let mut x = first;
    while BigRational::from_integer(x.clone()) < hi {
        let v = BigRational::from_integer(x.clone());
        if v != lo {
            taus.push(v);
        }
        x += BigInt::from(1);
    }

    let mut out = Vec::new();
    for tau in taus {
        if tau >= hi {
            continue;
        }
        let tau = Threshold::new(tau)?;
        let mut seen = 0usize;
        let mut kept: Vec<Vec<Bundle>> = Vec::new();
        enumerate_ffv(&costs, &items, &tau, n, m, |stack| {
            let used = stack.iter().fold(Bundle::empty(), |a, b| a.union(b));
            if stack.len() == n {
                if used.len() < m {
                    seen += 1;
                    if kept.len() < cfg.per_instance {
                        kept.push(stack.to_vec());
                    } else {
                        let j = rng.gen_range(0..seen);
                        if j < cfg.per_instance {
                            kept[j] = stack.to_vec();
                        }
                    }
                }
                return if seen >= cfg.visit_limit { Visit::Stop } else { Visit::Continue };
            }
            if tau.admits(items.difference(&used).cost(&costs)) {
                return Visit::Prune;
            }
            Visit::Continue
        })?;
        for bundles in kept {
            let tuple = FfvTuple::new(costs.clone(), items.clone(), bundles, tau.clone())?;
            let left = tuple.unallocated();
            let cstar = *left.chores().choose(rng).expect("collection leaves a chore out");
            out.push(FfvSample { tuple, cstar, mu, seed });
        }
    }
    Ok(out)
}

/// Seeds in `seeds` whose drawn costs make FFD fail at `ratio * mu`
/// with `n` bins, together with those costs and `mu`.
pub fn ffd_hard_instances(
    model: &CostModel,
    n: usize,
    ratio: &BigRational,
    seeds: std::ops::Range<u64>,
) -> Result<Vec<(u64, Vec<u64>, u64)>> {
    let mut out = Vec::new();
    for seed in seeds {
        let costs = model.draw(&mut rng(seed), n);
        let items = Bundle::full(costs.len());
        let total: u64 = costs.iter().sum();
        // cheap filter: FFD at the lower bound ceil(total / n) times the ratio
        let lower = total.div_ceil(n as u64);
        if ffd(&costs, &items, &Threshold::new(ratio * int(lower))?, n).is_complete() {
            continue;
        }
        let mu = mms(&costs, &items, n)?.mu;
        if !ffd(&costs, &items, &Threshold::new(ratio * int(mu))?, n).is_complete() {
            out.push((seed, costs, mu));
        }
    }
    Ok(out)
}
