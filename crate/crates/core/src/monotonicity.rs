//! Monotonicity of FFD in the threshold.
//!
//! Weak monotonicity: if FFD allocates everything at `alpha * mu` it does so
//! at every larger threshold. Strong monotonicity: if FFD allocates
//! everything at `alpha * mu`, every First-Fit-Valid collection of `n`
//! bundles at that threshold allocates everything too. Both are checked
//! per instance; the strong check enumerates FFV collections exhaustively.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bundle::{lex_cmp_profiles, Bundle};
use crate::error::{Error, Result};
use crate::ffd::{benchmark_bundle, ffd_succeeds};
use crate::hffd::FfvTuple;
use crate::mms::mms;
use crate::report::Report;
use crate::threshold::{format_rational, Threshold};

/// Default largest item count accepted by [`enumerate_ffv`].
pub const FFV_ENUM_MAX_CHORES: usize = 12;

/// What the enumeration should do after visiting a partial collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Visit {
    Continue,
    /// Skip every completion of this partial collection.
    Prune,
    Stop,
}

/// Visit every ordered collection of `n` disjoint bundles over `items`
/// that is First-Fit-Valid at `tau`, together with all of their prefixes.
///
/// `visit` sees each partial collection before its completions; complete
/// ones have length `n`. Within a level the bundle equal to the benchmark
/// comes first. Returns whether `visit` stopped the search.
pub fn enumerate_ffv<F>(
    costs: &[u64],
    items: &Bundle,
    tau: &Threshold,
    n: usize,
    max_chores: usize,
    visit: F,
) -> Result<bool>
where
    F: FnMut(&[Bundle]) -> Visit,
{
    if items.len() > max_chores {
        return Err(Error::SizeLimit(format!(
            "{} chores exceed the enumeration limit {max_chores}",
            items.len()
        )));
    }
    if costs.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::NotIdo("costs must be non-increasing".into()));
    }
    let mut e = Enumerator {
        costs,
        tau,
        n,
        visit,
        stack: Vec::with_capacity(n),
    };
    Ok(e.level(items) == Flow::Stop)
}

/// Every complete FFV collection, in enumeration order.
pub fn collect_ffv(costs: &[u64], items: &Bundle, tau: &Threshold, n: usize, max_chores: usize) -> Result<Vec<Vec<Bundle>>> {
    let mut out = Vec::new();
    enumerate_ffv(costs, items, tau, n, max_chores, |s| {
        if s.len() == n {
            out.push(s.to_vec());
        }
        Visit::Continue
    })?;
    Ok(out)
}

#[derive(PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Prefix {
    Equal,
    Greater,
}

struct Enumerator<'a, F> {
    costs: &'a [u64],
    tau: &'a Threshold,
    n: usize,
    visit: F,
    stack: Vec<Bundle>,
}

impl<F: FnMut(&[Bundle]) -> Visit> Enumerator<'_, F> {
    fn level(&mut self, remaining: &Bundle) -> Flow {
        match (self.visit)(&self.stack) {
            Visit::Stop => return Flow::Stop,
            Visit::Prune => return Flow::Continue,
            Visit::Continue => {}
        }
        if self.stack.len() == self.n {
            return Flow::Continue;
        }
        let bench: Vec<u64> = benchmark_bundle(self.costs, remaining, self.tau)
            .iter()
            .map(|c| self.costs[c])
            .collect();
        let pool = remaining.chores().to_vec();
        let mut chosen = Vec::new();
        self.bundles(remaining, &pool, &bench, 0, &mut chosen, Prefix::Equal)
    }

    /// Extend `chosen` with chores of `pool[start..]`, keeping its profile
    /// lexicographically at least `bench`.
    fn bundles(
        &mut self,
        remaining: &Bundle,
        pool: &[usize],
        bench: &[u64],
        start: usize,
        chosen: &mut Vec<usize>,
        state: Prefix,
    ) -> Flow {
        if state == Prefix::Greater || bench[chosen.len().min(bench.len())..].iter().all(|&c| c == 0) {
            let b = Bundle::from_sorted(chosen.clone());
            let rest = remaining.difference(&b);
            self.stack.push(b);
            let flow = self.level(&rest);
            self.stack.pop();
            if flow == Flow::Stop {
                return Flow::Stop;
            }
        }
        for i in (start..pool.len()).rev() {
            let x = pool[i];
            let next = match state {
                Prefix::Greater => Prefix::Greater,
                Prefix::Equal => {
                    let target = bench.get(chosen.len()).copied().unwrap_or(0);
                    match self.costs[x].cmp(&target) {
                        Ordering::Greater => Prefix::Greater,
                        Ordering::Equal => Prefix::Equal,
                        Ordering::Less => continue,
                    }
                }
            };
            chosen.push(x);
            let flow = self.bundles(remaining, pool, bench, i + 1, chosen, next);
            chosen.pop();
            if flow == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }
}

/// An FFV collection at `alpha * mu` that leaves chores out although FFD
/// allocates everything at that threshold.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub mu: u64,
    pub alpha: BigRational,
    pub tuple: FfvTuple,
}

/// Search for a strong-monotonicity counterexample at `alpha`.
pub fn check_monotone(
    costs: &[u64],
    items: &Bundle,
    n: usize,
    alpha: &BigRational,
    max_chores: usize,
) -> Result<Option<Counterexample>> {
    if *alpha < BigRational::one() {
        return Err(Error::Precondition(format!("alpha {} is below 1", format_rational(alpha))));
    }
    if items.len() > max_chores {
        return Err(Error::SizeLimit(format!(
            "{} chores exceed the enumeration limit {max_chores}",
            items.len()
        )));
    }
    let mu = mms(costs, items, n)?.mu;
    let tau = Threshold::scaled(alpha, mu)?;
    if !ffd_succeeds(costs, items, tau.capacity(), n) {
        return Ok(None);
    }
    // with positive costs a remainder that fits under tau is always absorbed
    let positive = items.iter().all(|c| costs[c] > 0);
    let mut found = None;
    enumerate_ffv(costs, items, &tau, n, max_chores, |stack| {
        let used = stack.iter().fold(Bundle::empty(), |a, b| a.union(b));
        if stack.len() == n {
            if used.len() < items.len() {
                found = Some(stack.to_vec());
                return Visit::Stop;
            }
            return Visit::Continue;
        }
        if positive && tau.admits(items.difference(&used).cost(costs)) {
            return Visit::Prune;
        }
        Visit::Continue
    })?;
    match found {
        None => Ok(None),
        Some(bundles) => Ok(Some(Counterexample {
            mu,
            alpha: alpha.clone(),
            tuple: FfvTuple::new(costs.to_vec(), items.clone(), bundles, tau)?,
        })),
    }
}

#[derive(Debug, Clone)]
pub struct WeakOutcome {
    pub mu: u64,
    /// Grid points in ascending order with FFD's success at `alpha * mu`.
    pub results: Vec<(BigRational, bool)>,
    /// Pairs `alpha < beta` where FFD succeeds at `alpha` but not at `beta`.
    pub violations: Vec<(BigRational, BigRational)>,
    pub report: Report,
}

/// Run FFD at every grid point and report successes followed by failures.
pub fn check_weak_monotone(costs: &[u64], items: &Bundle, n: usize, grid: &[BigRational]) -> Result<WeakOutcome> {
    let mu = mms(costs, items, n)?.mu;
    let mut alphas = grid.to_vec();
    alphas.sort();
    alphas.dedup();
    let results = alphas
        .into_iter()
        .map(|a| {
            let tau = Threshold::scaled(&a, mu)?;
            let ok = ffd_succeeds(costs, items, tau.capacity(), n);
            Ok((a, ok))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut violations = Vec::new();
    let mut report = Report::new();
    for (i, (a, ok)) in results.iter().enumerate() {
        if !ok {
            continue;
        }
        for (b, ok_b) in &results[i + 1..] {
            if !ok_b {
                report.fail(
                    "weak_monotone",
                    format!(
                        "FFD succeeds at {} * {mu} but fails at {} * {mu}",
                        format_rational(a),
                        format_rational(b)
                    ),
                );
                violations.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(WeakOutcome {
        mu,
        results,
        violations,
        report,
    })
}

/// Filtered benchmark comparison: keeping only chores of cost at least
/// `gamma`, every bundle stays lexicographically at least its benchmark,
/// and strictly larger filtered bundles cost more than `tau`.
pub fn benchmark_filter_check(t: &FfvTuple, gamma: &BigRational) -> Result<Report> {
    if !t.ffv_violations().is_empty() {
        return Err(Error::Precondition("tuple is not First-Fit-Valid".into()));
    }
    let keep = |b: &Bundle| -> Vec<u64> {
        b.iter()
            .map(|c| t.costs[c])
            .filter(|&c| BigRational::from_integer(c.into()) >= *gamma)
            .collect()
    };
    let mut report = Report::new();
    for k in 0..t.n() {
        let a = keep(&t.bundles[k]);
        let b = keep(&t.benchmark(k));
        let ord = lex_cmp_profiles(a.iter().copied(), b.iter().copied());
        report.check(ord != Ordering::Less, "filtered_lex", || {
            format!("bundle {}: filtered profile {a:?} is below {b:?}", k + 1)
        });
        if ord == Ordering::Greater {
            let cost: u64 = a.iter().sum();
            report.check(!t.tau.admits(cost), "filtered_cost", || {
                format!("bundle {}: filtered profile {a:?} is above {b:?} yet costs {cost}", k + 1)
            });
        }
    }
    Ok(report)
}

/// Parameters of a monotonicity fuzz campaign over single-agent instances.
#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub n: usize,
    pub alphas: Vec<BigRational>,
    pub seeds: u64,
    pub first_seed: u64,
    pub max_m: usize,
    pub max_cost: u64,
}

#[derive(Debug, Clone, Default)]
pub struct FuzzOutcome {
    pub instances: u64,
    /// Instance and grid point pairs where FFD succeeded, so the strong
    /// property was actually exercised.
    pub exercised: u64,
    pub counterexamples: Vec<Counterexample>,
    pub weak_violations: Vec<(u64, BigRational, BigRational)>,
    /// Weak violations without a matching strong counterexample; these
    /// would contradict weak monotonicity following from strong.
    pub inconsistencies: Vec<String>,
}

/// Cost vector of the instance generated for `seed`.
pub fn fuzz_instance(cfg: &FuzzConfig, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.first_seed.wrapping_add(seed));
    let m = rng.gen_range(1..=cfg.max_m.max(1));
    let mut costs: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=cfg.max_cost.max(1))).collect();
    costs.sort_unstable_by(|a, b| b.cmp(a));
    costs
}

pub fn fuzz_monotonicity(cfg: &FuzzConfig) -> Result<FuzzOutcome> {
    if cfg.n == 0 {
        return Err(Error::Precondition("need at least one bundle".into()));
    }
    let per_seed = (0..cfg.seeds)
        .into_par_iter()
        .map(|seed| fuzz_seed(cfg, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut out = FuzzOutcome::default();
    for o in per_seed {
        out.instances += o.instances;
        out.exercised += o.exercised;
        out.counterexamples.extend(o.counterexamples);
        out.weak_violations.extend(o.weak_violations);
        out.inconsistencies.extend(o.inconsistencies);
    }
    Ok(out)
}

fn fuzz_seed(cfg: &FuzzConfig, seed: u64) -> Result<FuzzOutcome> {
    let costs = fuzz_instance(cfg, seed);
    let items = Bundle::full(costs.len());
    let mut out = FuzzOutcome {
        instances: 1,
        ..FuzzOutcome::default()
    };
    let weak = check_weak_monotone(&costs, &items, cfg.n, &cfg.alphas)?;
    for (alpha, ok) in &weak.results {
        if !ok {
            continue;
        }
        out.exercised += 1;
        let strong = check_monotone(&costs, &items, cfg.n, alpha, cfg.max_m.max(FFV_ENUM_MAX_CHORES))?;
        if weak.violations.iter().any(|(a, _)| a == alpha) && strong.is_none() {
            out.inconsistencies.push(format!(
                "seed {seed}: costs {costs:?} violate weak monotonicity at {} without a strong counterexample",
                format_rational(alpha)
            ));
        }
        out.counterexamples.extend(strong);
    }
    out.weak_violations
        .extend(weak.violations.into_iter().map(|(a, b)| (seed, a, b)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffd::ffd;
    use crate::hffd::MmsPrecondition;
    use crate::threshold::parse_rational;

    const TYPE_A: [u64; 15] = [51, 28, 27, 27, 27, 26, 12, 12, 11, 11, 11, 11, 11, 11, 10];

    fn ratio(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    /// Every ordered collection of `n` disjoint subsets, filtered by `is_ffv`.
    fn brute_force(costs: &[u64], tau: &Threshold, n: usize) -> Vec<Vec<Bundle>> {
        let m = costs.len();
        let mut out = Vec::new();
        // label each chore with a bundle index or n for "left out"
        let total = (n + 1).pow(m as u32);
        for code in 0..total {
            let mut x = code;
            let mut bundles = vec![Vec::new(); n];
            for c in 0..m {
                let slot = x % (n + 1);
                x /= n + 1;
                if slot < n {
                    bundles[slot].push(c);
                }
            }
            let bundles: Vec<Bundle> = bundles.into_iter().map(Bundle::from_sorted).collect();
            let t = FfvTuple::new(costs.to_vec(), Bundle::full(m), bundles.clone(), tau.clone()).unwrap();
            if t.is_ffv(MmsPrecondition::Trust).unwrap() {
                out.push(bundles);
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let cases: [(&[u64], u64, usize); 5] = [
            (&[5, 4, 3, 3, 2], 7, 2),
            (&[6, 6, 5, 3, 2, 1], 9, 2),
            (&[9, 7, 7, 4, 4, 2, 1], 11, 3),
            (&[3, 3, 3, 3], 5, 2),
            (&[8, 5, 5, 2, 2, 0], 10, 2),
        ];
        for (costs, tau, n) in cases {
            let tau = Threshold::from_integer(tau);
            let mut got = collect_ffv(costs, &Bundle::full(costs.len()), &tau, n, 12).unwrap();
            let mut want = brute_force(costs, &tau, n);
            let len = got.len();
            got.sort();
            got.dedup();
            assert_eq!(got.len(), len, "duplicates for {costs:?}");
            want.sort();
            assert_eq!(got, want, "costs {costs:?}");
        }
    }

    #[test]
    fn single_bundle_collections() {
        let costs = [5, 4, 3, 3, 2];
        let tau = Threshold::from_integer(7);
        let bench = benchmark_bundle(&costs, &Bundle::full(5), &tau);
        let all = collect_ffv(&costs, &Bundle::full(5), &tau, 1, 12).unwrap();
        for s in &all {
            assert_ne!(crate::bundle::lex_cmp(&costs, &s[0], &bench), Ordering::Less);
        }
        assert!(all.iter().any(|s| s[0] == bench));
    }

    #[test]
    fn worked_example_collection_is_enumerated() {
        let items = Bundle::full(15);
        let tau = Threshold::from_integer(75);
        let target: Vec<Bundle> = [vec![0, 5], vec![1, 2, 6], vec![3, 4, 7], (8..14).collect()]
            .into_iter()
            .map(|v| Bundle::new(v).unwrap())
            .collect();
        let mut seen = false;
        enumerate_ffv(&TYPE_A, &items, &tau, 4, 15, |stack| {
            if stack.len() == 4 {
                seen |= stack == target.as_slice();
                return if seen { Visit::Stop } else { Visit::Continue };
            }
            match stack.last() {
                Some(b) if *b != target[stack.len() - 1] => Visit::Prune,
                _ => Visit::Continue,
            }
        })
        .unwrap();
        assert!(seen);
    }

    #[test]
    fn worked_example_strong_check() {
        let items = Bundle::full(15);
        // FFD already fails at the exact MMS of 74
        assert!(check_monotone(&TYPE_A, &items, 4, &ratio("1"), 15).unwrap().is_none());
        // at 75 FFD succeeds but the HFFD-shaped collection leaves c15 out
        let cx = check_monotone(&TYPE_A, &items, 4, &ratio("75/74"), 15).unwrap().unwrap();
        assert_eq!(cx.mu, 74);
        assert!(cx.tuple.is_ffv(MmsPrecondition::Verify).unwrap());
        assert!(!cx.tuple.unallocated().is_empty());
        assert!(ffd(&TYPE_A, &items, &cx.tuple.tau, 4).is_complete());
    }

    #[test]
    fn alpha_below_one_is_rejected() {
        assert!(check_monotone(&[3, 2], &Bundle::full(2), 2, &ratio("1/2"), 12).is_err());
        assert!(check_monotone(&[3; 13], &Bundle::full(13), 2, &ratio("1"), 12).is_err());
    }

    #[test]
    fn weak_check_on_worked_example() {
        let out = check_weak_monotone(&TYPE_A, &Bundle::full(15), 4, &[ratio("1"), ratio("75/74"), ratio("8/7")]).unwrap();
        assert_eq!(out.mu, 74);
        assert_eq!(out.results.iter().map(|r| r.1).collect::<Vec<_>>(), vec![false, true, true]);
        assert!(out.report.is_empty());
    }

    #[test]
    fn weak_check_single_bin() {
        let costs = [4, 3, 2];
        let out = check_weak_monotone(&costs, &Bundle::full(3), 1, &[ratio("1"), ratio("3/2"), ratio("2")]).unwrap();
        assert!(out.results.iter().all(|r| r.1));
    }

    #[test]
    fn filter_check_on_worked_example() {
        let items = Bundle::full(15);
        let tau = Threshold::from_integer(75);
        let t = FfvTuple::new(
            TYPE_A.to_vec(),
            items,
            [vec![0, 5], vec![1, 2, 6], vec![3, 4, 7], (8..14).collect()]
                .into_iter()
                .map(|v| Bundle::new(v).unwrap())
                .collect(),
            tau,
        )
        .unwrap();
        for g in ["0", "25", "11", "27/2"] {
            assert!(benchmark_filter_check(&t, &ratio(g)).unwrap().is_empty(), "gamma {g}");
        }
    }

    #[test]
    fn small_fuzz_finds_nothing_for_two_bins() {
        let cfg = FuzzConfig {
            n: 2,
            alphas: vec![ratio("1"), ratio("8/7")],
            seeds: 40,
            first_seed: 0,
            max_m: 7,
            max_cost: 20,
        };
        let out = fuzz_monotonicity(&cfg).unwrap();
        assert_eq!(out.instances, 40);
        assert!(out.counterexamples.is_empty());
        assert!(out.inconsistencies.is_empty());
    }
}
