//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use chorefit::{Bundle, IdoInstance, Instance};
use num_rational::BigRational;

pub const TYPE_A: [u64; 15] = [51, 28, 27, 27, 27, 26, 12, 12, 11, 11, 11, 11, 11, 11, 10];
pub const TYPE_B: [u64; 15] = [51, 28, 27, 27, 27, 24, 21, 20, 10, 10, 10, 9, 9, 9, 9];

/// Three type-A agents followed by one type-B agent.
pub fn worked_instance() -> IdoInstance {
    let rows = vec![TYPE_A.to_vec(), TYPE_A.to_vec(), TYPE_A.to_vec(), TYPE_B.to_vec()];
    IdoInstance::new(Instance::new(rows).unwrap()).unwrap()
}

pub fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

pub fn int(x: u64) -> BigRational {
    BigRational::from_integer(x.into())
}

/// 1-based chore labels to a bundle.
pub fn chores(labels: &[usize]) -> Bundle {
    Bundle::new(labels.iter().map(|c| c - 1).collect()).unwrap()
}

/// MMS by trying every assignment of chores to `n` bins.
pub fn brute_mms(costs: &[u64], items: &[usize], n: usize) -> u64 {
    let m = items.len();
    let mut best = u64::MAX;
    let mut assign = vec![0usize; m];
    loop {
        let mut load = vec![0u64; n];
        for (i, &c) in items.iter().enumerate() {
            load[assign[i]] += costs[c];
        }
        best = best.min(load.into_iter().max().unwrap_or(0));
        let mut i = 0;
        while i < m {
            assign[i] += 1;
            if assign[i] < n {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
        if i == m {
            return best;
        }
    }
}

/// Sorted cost profile, descending.
pub fn profile(costs: &[u64], b: &[usize]) -> Vec<u64> {
    let mut p: Vec<u64> = b.iter().map(|&c| costs[c]).collect();
    p.sort_unstable_by(|a, b| b.cmp(a));
    p
}

/// Lexicographic comparison of descending profiles where a missing entry
/// counts as cost zero.
pub fn lex(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
    for q in 0..a.len().max(b.len()) {
        let x = a.get(q).copied().unwrap_or(0);
        let y = b.get(q).copied().unwrap_or(0);
        if x != y {
            return x.cmp(&y);
        }
    }
    std::cmp::Ordering::Equal
}

/// The lex-largest profile among subsets of `items` costing at most `cap`.
pub fn brute_benchmark(costs: &[u64], items: &[usize], cap: u64) -> Vec<u64> {
    let mut best = Vec::new();
    for mask in 0u32..(1 << items.len()) {
        let sub: Vec<usize> = (0..items.len()).filter(|i| mask >> i & 1 == 1).map(|i| items[i]).collect();
        if sub.iter().map(|&c| costs[c]).sum::<u64>() <= cap {
            let p = profile(costs, &sub);
            if lex(&p, &best).is_gt() {
                best = p;
            }
        }
    }
    best
}

use chorefit::corpus::{ffd_hard_instances, ffv_samples, ffv_samples_for, rng, CostModel, FfvCorpusConfig, FfvSample};

/// FFV tuples with a leftover at `mu <= tau < 3/2 mu`, two or three bundles
/// and at most nine chores.
pub fn tidy_corpus(seeds: u64) -> Vec<FfvSample> {
    let uniform = FfvCorpusConfig {
        bundles: vec![2, 3],
        costs: CostModel::Uniform {
            min_m: 3,
            max_m: 9,
            max_cost: 30,
        },
        ratio_lo: int(1),
        ratio_hi: ratio(3, 2),
        per_instance: 12,
        visit_limit: 5_000,
    };
    let parts = FfvCorpusConfig {
        costs: CostModel::Partition {
            part_cost: 40,
            min_chores: 2,
            max_chores: 3,
        },
        ..uniform.clone()
    };
    let mut out = Vec::new();
    for seed in 0..seeds {
        out.extend(ffv_samples(seed, &uniform).unwrap());
        out.extend(ffv_samples(seed, &parts).unwrap());
    }
    out
}

/// FFV tuples with a leftover at `8/7 mu <= tau`: uniform and exact-partition
/// instances with two to four bundles, plus three-bundle instances on which
/// FFD itself fails at `8/7 mu`.
pub fn reduction_corpus(seeds: u64) -> Vec<FfvSample> {
    let base = FfvCorpusConfig {
        bundles: vec![2, 3, 4],
        costs: CostModel::Uniform {
            min_m: 4,
            max_m: 10,
            max_cost: 40,
        },
        ratio_lo: ratio(8, 7),
        ratio_hi: ratio(20, 17),
        per_instance: 8,
        visit_limit: 20_000,
    };
    let parts = FfvCorpusConfig {
        costs: CostModel::Partition {
            part_cost: 70,
            min_chores: 3,
            max_chores: 3,
        },
        ..base.clone()
    };
    let mut out = Vec::new();
    for seed in 0..seeds {
        out.extend(ffv_samples(seed, &base).unwrap());
        out.extend(ffv_samples(seed, &parts).unwrap());
    }
    let hard = FfvCorpusConfig {
        bundles: vec![3],
        ratio_hi: ratio(15, 13),
        per_instance: 1_000,
        ..base
    };
    for part_cost in 20..=120 {
        let model = CostModel::Partition {
            part_cost,
            min_chores: 3,
            max_chores: 4,
        };
        for (seed, costs, _) in ffd_hard_instances(&model, 3, &ratio(8, 7), 0..seeds * 20).unwrap() {
            out.extend(ffv_samples_for(costs, 3, seed, &hard, &mut rng(seed)).unwrap());
        }
    }
    out
}
