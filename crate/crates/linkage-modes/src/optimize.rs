//! Maximizing the assembly-mode count over integer bar lengths: direct
//! Gaussian sampling, simulated annealing with linear cooling, and the
//! cross-entropy method.
//!
//! All three searchers share the same contract: the objective maps the 10
//! free integer lengths to N (the 11th slot is pinned by the caller),
//! candidates always have every coordinate ≥ 1, and identical
//! (config, seed) pairs replay identical trajectories regardless of thread
//! count.

use std::collections::{HashMap, HashSet};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SearchMethod {
    Random,
    Sa,
    Ce,
}

impl std::fmt::Display for SearchMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchMethod::Random => "random",
            SearchMethod::Sa => "sa",
            SearchMethod::Ce => "ce",
        })
    }
}

impl FromStr for SearchMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(SearchMethod::Random),
            "sa" => Ok(SearchMethod::Sa),
            "ce" => Ok(SearchMethod::Ce),
            other => Err(format!("unknown method '{other}' (expected random|sa|ce)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizerConfig {
    pub method: SearchMethod,
    /// Maximum number of distinct objective evaluations.
    pub budget: usize,
    pub seed: u64,
    /// Stop as soon as this value is reached (56: the mixed-volume ceiling).
    pub target: u32,
    // Simulated annealing (linear cooling).
    pub sa_t0: f64,
    pub sa_max_step: usize,
    pub sa_sigma: Vec<f64>,
    pub sa_start: Vec<i64>,
    // Cross-entropy.
    pub ce_samples: usize,
    pub ce_elite: usize,
    pub ce_alpha: f64,
    pub ce_mu: Vec<f64>,
    pub ce_sigma: Vec<f64>,
    pub ce_max_step: usize,
    /// Deviation floor that keeps the integer-lattice search from collapsing
    /// to a point before the budget is spent.
    pub ce_sigma_floor: f64,
    // Direct sampling.
    pub random_center: f64,
    pub random_sigma: f64,
    /// The pinned length slot: edge and value, appended by the caller when
    /// turning a free candidate into a full length vector.
    pub fixed_edge: (u8, u8),
    pub fixed_value: i64,
    /// Memoize N on the candidate vector; cache hits do not consume budget.
    pub memoize: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            method: SearchMethod::Ce,
            budget: 600,
            seed: 0,
            target: 56,
            sa_t0: 4.0,
            sa_max_step: 1000,
            sa_sigma: vec![10.0; 10],
            sa_start: vec![100; 10],
            ce_samples: 20,
            ce_elite: 5,
            ce_alpha: 0.5,
            ce_mu: vec![100.0; 10],
            ce_sigma: vec![100.0; 10],
            ce_max_step: 600,
            ce_sigma_floor: 0.5,
            random_center: 100.0,
            random_sigma: 100.0,
            fixed_edge: (5, 7),
            fixed_value: 100,
            memoize: true,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) {
        assert!(self.budget > 0, "budget must be positive");
        assert!(self.ce_alpha > 0.0 && self.ce_alpha <= 1.0, "0 < α ≤ 1");
        assert!(self.ce_elite >= 1 && self.ce_elite <= self.ce_samples);
        assert!(self.sa_sigma.iter().chain(&self.ce_sigma).all(|&s| s >= 0.0));
        assert_eq!(self.sa_sigma.len(), self.sa_start.len());
        assert_eq!(self.ce_mu.len(), self.ce_sigma.len());
    }
}

/// One examined candidate: the distinct-evaluation counter at that moment,
/// the candidate, and its value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryPoint {
    pub eval: usize,
    pub candidate: Vec<i64>,
    pub value: u32,
}

/// Per-generation cross-entropy statistics (elite threshold and the smoothed
/// distribution parameters after the update).
#[derive(Clone, Debug)]
pub struct CeGeneration {
    pub gamma: u32,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct OptimizerRun {
    pub method: SearchMethod,
    pub seed: u64,
    pub trajectory: Vec<TrajectoryPoint>,
    pub best: Vec<i64>,
    pub best_value: u32,
    /// Distinct evaluations consumed when the best value first appeared.
    pub evals_to_best: usize,
    /// Total distinct evaluations consumed.
    pub evaluations: usize,
    pub wall_ms: u64,
    /// Populated by the cross-entropy method only.
    pub ce_generations: Vec<CeGeneration>,
}

impl OptimizerRun {
    /// Table-style cell: best value with evaluations-to-best in parentheses.
    pub fn display_cell(&self) -> String {
        format!("{} ({})", self.best_value, self.evals_to_best)
    }
}

/// Completes a free 10-length candidate into the 11-entry vector in
/// lexicographic edge order, appending the pinned slot.
pub fn full_length_vector(candidate: &[i64], fixed_value: i64) -> Vec<f64> {
    let mut v: Vec<f64> = candidate.iter().map(|&x| x as f64).collect();
    v.push(fixed_value as f64);
    v
}

/// Each coordinate redrawn from a normal law centered on its current value,
/// rounded to the nearest integer and clamped to ≥ 1. Zero deviation returns
/// the input coordinate unchanged.
pub fn gaussian_neighbour(point: &[i64], sigma: &[f64], rng: &mut impl Rng) -> Vec<i64> {
    assert_eq!(point.len(), sigma.len(), "dimension mismatch");
    point
        .iter()
        .zip(sigma)
        .map(|(&x, &s)| {
            let n = Normal::new(x as f64, s).expect("σ ≥ 0");
            (n.sample(rng).round() as i64).max(1)
        })
        .collect()
}

/// The annealing acceptance rule: improvements always pass; a worsening move
/// passes with probability exp(Δ/T). The uniform draw happens only for
/// non-improving moves, so the RNG stream is a deterministic function of the
/// evaluation outcomes.
pub(crate) fn sa_accept(new_value: u32, value: u32, t: f64, rng: &mut impl Rng) -> bool {
    new_value > value || {
        let delta = new_value as f64 - value as f64;
        rng.gen::<f64>() < (delta / t).exp()
    }
}

// ---------------------------------------------------------------------------
// Shared bookkeeping: budget accounting, memoization, best tracking.

struct Tally<'a, F: Fn(&[i64]) -> u32 + Sync> {
    objective: &'a F,
    cache: HashMap<Vec<i64>, u32>,
    memoize: bool,
    budget: usize,
    evaluations: usize,
    trajectory: Vec<TrajectoryPoint>,
    best: Option<(Vec<i64>, u32)>,
    evals_to_best: usize,
}

impl<'a, F: Fn(&[i64]) -> u32 + Sync> Tally<'a, F> {
    fn new(objective: &'a F, budget: usize, memoize: bool) -> Self {
        Tally {
            objective,
            cache: HashMap::new(),
            memoize,
            budget,
            evaluations: 0,
            trajectory: Vec::new(),
            best: None,
            evals_to_best: 0,
        }
    }

    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }

    fn record(&mut self, candidate: Vec<i64>, value: u32) {
        if self.best.as_ref().is_none_or(|(_, b)| value > *b) {
            self.best = Some((candidate.clone(), value));
            self.evals_to_best = self.evaluations;
        }
        self.trajectory.push(TrajectoryPoint {
            eval: self.evaluations,
            candidate,
            value,
        });
    }

    /// Evaluates one candidate, spending budget only on cache misses.
    /// Returns `None` once the budget is exhausted.
    fn eval(&mut self, candidate: Vec<i64>) -> Option<u32> {
        if self.memoize {
            if let Some(&v) = self.cache.get(&candidate) {
                self.record(candidate, v);
                return Some(v);
            }
        }
        if self.exhausted() {
            return None;
        }
        let v = (self.objective)(&candidate);
        self.evaluations += 1;
        if self.memoize {
            self.cache.insert(candidate.clone(), v);
        }
        self.record(candidate, v);
        Some(v)
    }

    /// Evaluates a batch, running uncached candidates in parallel. Results
    /// are recorded in input order, so trajectories are thread-invariant.
    /// Candidates beyond the budget are dropped (their values are `None`).
    fn eval_batch(&mut self, candidates: &[Vec<i64>]) -> Vec<Option<u32>> {
        let room = self.budget - self.evaluations;
        let mut misses: Vec<usize> = Vec::new();
        let mut seen: HashSet<&[i64]> = HashSet::new();
        for (i, c) in candidates.iter().enumerate() {
            let known =
                self.memoize && (self.cache.contains_key(c) || seen.contains(c.as_slice()));
            if known || misses.len() >= room {
                continue;
            }
            if self.memoize {
                seen.insert(c.as_slice());
            }
            misses.push(i);
        }
        let mut fresh: HashMap<usize, u32> = misses
            .par_iter()
            .map(|&i| (i, (self.objective)(&candidates[i])))
            .collect();
        let mut out = Vec::with_capacity(candidates.len());
        for (i, c) in candidates.iter().enumerate() {
            let value = if let Some(v) = fresh.remove(&i) {
                self.evaluations += 1;
                if self.memoize {
                    self.cache.insert(c.clone(), v);
                }
                Some(v)
            } else if self.memoize {
                self.cache.get(c).copied()
            } else {
                None
            };
            if let Some(v) = value {
                self.record(c.clone(), v);
            }
            out.push(value);
        }
        out
    }

    fn finish(self, method: SearchMethod, seed: u64, started: Instant) -> OptimizerRun {
        let (best, best_value) = self.best.expect("at least one evaluation");
        OptimizerRun {
            method,
            seed,
            trajectory: self.trajectory,
            best,
            best_value,
            evals_to_best: self.evals_to_best,
            evaluations: self.evaluations,
            wall_ms: started.elapsed().as_millis() as u64,
            ce_generations: Vec::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// The three searchers.

/// Independent Gaussian draws around the configured center; tracks the best.
pub fn random_search<F>(cfg: &OptimizerConfig, objective: F) -> OptimizerRun
where
    F: Fn(&[i64]) -> u32 + Sync,
{
    cfg.validate();
    let started = Instant::now();
    let dims = cfg.sa_start.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tally = Tally::new(&objective, cfg.budget, cfg.memoize);
    let center = vec![cfg.random_center.round() as i64; dims];
    let sigma = vec![cfg.random_sigma; dims];
    // With memoization, repeats cost nothing; the iteration cap keeps
    // degenerate configurations (σ = 0) from spinning forever.
    let max_iters = cfg.budget.saturating_mul(10).max(cfg.budget + 100);
    for _ in 0..max_iters {
        if tally.exhausted() {
            break;
        }
        let candidate = gaussian_neighbour(&center, &sigma, &mut rng);
        match tally.eval(candidate) {
            Some(v) if v >= cfg.target => break,
            Some(_) => {}
            None => break,
        }
    }
    tally.finish(SearchMethod::Random, cfg.seed, started)
}

/// Simulated annealing with linear cooling `T = T₀(1 − n/maxStep)`, starting
/// from the all-100 point.
pub fn simulated_annealing<F>(cfg: &OptimizerConfig, objective: F) -> OptimizerRun
where
    F: Fn(&[i64]) -> u32 + Sync,
{
    cfg.validate();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tally = Tally::new(&objective, cfg.budget, cfg.memoize);

    let mut current = cfg.sa_start.clone();
    let mut value = tally.eval(current.clone()).expect("budget > 0");
    for n in 0..cfg.sa_max_step {
        if value >= cfg.target || tally.best.as_ref().is_some_and(|(_, b)| *b >= cfg.target) {
            break;
        }
        let t = cfg.sa_t0 * (1.0 - n as f64 / cfg.sa_max_step as f64);
        let candidate = gaussian_neighbour(&current, &cfg.sa_sigma, &mut rng);
        let Some(new_value) = tally.eval(candidate.clone()) else {
            break;
        };
        if sa_accept(new_value, value, t, &mut rng) {
            current = candidate;
            value = new_value;
        }
    }
    tally.finish(SearchMethod::Sa, cfg.seed, started)
}

/// Cross-entropy: per generation, sample around (μ⃗, σ⃗), keep the elite,
/// refit, and smooth-update with α. σ is floored to keep sampling alive on
/// the integer lattice.
pub fn cross_entropy<F>(cfg: &OptimizerConfig, objective: F) -> OptimizerRun
where
    F: Fn(&[i64]) -> u32 + Sync,
{
    cfg.validate();
    let started = Instant::now();
    let dims = cfg.ce_mu.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tally = Tally::new(&objective, cfg.budget, cfg.memoize);
    let mut mu = cfg.ce_mu.clone();
    let mut sigma: Vec<f64> = cfg.ce_sigma.iter().map(|&s| s.max(cfg.ce_sigma_floor)).collect();
    let mut generations: Vec<CeGeneration> = Vec::new();

    for _ in 0..cfg.ce_max_step {
        if tally.exhausted() || tally.best.as_ref().is_some_and(|(_, b)| *b >= cfg.target) {
            break;
        }
        let samples: Vec<Vec<i64>> = (0..cfg.ce_samples)
            .map(|_| {
                (0..dims)
                    .map(|i| {
                        let n = Normal::new(mu[i], sigma[i]).expect("σ > 0");
                        (n.sample(&mut rng).round() as i64).max(1)
                    })
                    .collect()
            })
            .collect();
        let values = tally.eval_batch(&samples);
        let mut scored: Vec<(&Vec<i64>, u32)> = samples
            .iter()
            .zip(&values)
            .filter_map(|(c, v)| v.map(|v| (c, v)))
            .collect();
        if scored.len() < cfg.ce_elite {
            break; // budget ran dry mid-generation
        }
        // Value descending; the sort is stable, so ties keep their sampling
        // order — deterministic without biasing plateau elites toward
        // lexicographically small candidates.
        scored.sort_by_key(|&(_, v)| std::cmp::Reverse(v));
        let elite = &scored[..cfg.ce_elite];
        let gamma = elite.last().unwrap().1;

        let mut mu_new = vec![0.0; dims];
        let mut sigma_new = vec![0.0; dims];
        for (c, _) in elite {
            for i in 0..dims {
                mu_new[i] += c[i] as f64;
            }
        }
        for m in mu_new.iter_mut() {
            *m /= cfg.ce_elite as f64;
        }
        for (c, _) in elite {
            for i in 0..dims {
                sigma_new[i] += (c[i] as f64 - mu_new[i]).powi(2);
            }
        }
        for s in sigma_new.iter_mut() {
            *s = (*s / cfg.ce_elite as f64).sqrt();
        }
        for i in 0..dims {
            mu[i] = cfg.ce_alpha * mu_new[i] + (1.0 - cfg.ce_alpha) * mu[i];
            sigma[i] =
                (cfg.ce_alpha * sigma_new[i] + (1.0 - cfg.ce_alpha) * sigma[i]).max(cfg.ce_sigma_floor);
        }
        generations.push(CeGeneration {
            gamma,
            mu: mu.clone(),
            sigma: sigma.clone(),
        });
    }

    let mut run = tally.finish(SearchMethod::Ce, cfg.seed, started);
    run.ce_generations = generations;
    run
}

/// Dispatch on the configured method.
pub fn optimize<F>(cfg: &OptimizerConfig, objective: F) -> OptimizerRun
where
    F: Fn(&[i64]) -> u32 + Sync,
{
    match cfg.method {
        SearchMethod::Random => random_search(cfg, objective),
        SearchMethod::Sa => simulated_annealing(cfg, objective),
        SearchMethod::Ce => cross_entropy(cfg, objective),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    /// Smooth surrogate objective with a unique peak at `goal`.
    /// Integer stand-in for the mode count: peaks at 56 on `goal` and, like
    /// the real objective, never goes flat — real counts stay positive at
    /// random length vectors, so the far field keeps a gentle slope while
    /// the neighbourhood of the peak is steep.
    fn surrogate(goal: &'static [i64]) -> impl Fn(&[i64]) -> u32 + Sync {
        move |v: &[i64]| {
            let dist: i64 = v.iter().zip(goal).map(|(a, b)| (a - b).abs()).sum();
            let steep = 56 - dist / 4;
            let gentle = 30 - dist / 40;
            steep.max(gentle).max(1) as u32
        }
    }

    const GOAL: [i64; 10] = [120, 80, 115, 95, 130, 90, 110, 85, 125, 105];

    #[test]
    fn neighbour_identity_at_zero_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = vec![7, 100, 3];
        assert_eq!(gaussian_neighbour(&p, &[0.0, 0.0, 0.0], &mut rng), p);
    }

    #[test]
    fn neighbour_clamps_and_centers() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = vec![2i64; 4];
        for _ in 0..2000 {
            let q = gaussian_neighbour(&p, &[50.0; 4], &mut rng);
            assert!(q.iter().all(|&x| x >= 1));
        }
        // Sample mean at σ=10 stays within 3·σ/√n of the center.
        let p = vec![100i64];
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| gaussian_neighbour(&p, &[10.0], &mut rng)[0] as f64)
            .sum::<f64>()
            / n as f64;
        assert!((mean - 100.0).abs() < 0.3, "mean {mean}");
    }

    #[test]
    fn sa_acceptance_probability() {
        // Worsening move Δ=−2 at T=4: accept with probability exp(−1/2).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 10_000;
        let accepted = (0..trials).filter(|_| sa_accept(8, 10, 4.0, &mut rng)).count();
        let rate = accepted as f64 / trials as f64;
        let expect = (-0.5f64).exp();
        assert!((rate - expect).abs() < 0.02, "rate {rate}, expect {expect}");
        // Improving moves always pass, without consuming randomness.
        assert!(sa_accept(11, 10, 1e-300, &mut rng));
    }

    #[test]
    fn sa_is_deterministic_and_monotone() {
        let cfg = OptimizerConfig {
            method: SearchMethod::Sa,
            budget: 300,
            seed: 17,
            ..OptimizerConfig::default()
        };
        let a = simulated_annealing(&cfg, surrogate(&GOAL));
        let b = simulated_annealing(&cfg, surrogate(&GOAL));
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.best_value, b.best_value);
        let mut best = 0;
        for p in &a.trajectory {
            best = best.max(p.value);
        }
        assert_eq!(best, a.best_value);
        assert!(a.trajectory.iter().all(|p| p.candidate.iter().all(|&x| x >= 1)));
        assert!(a.evals_to_best <= cfg.budget);
    }

    #[test]
    fn ce_reaches_the_surrogate_peak() {
        let mut bests = Vec::new();
        for seed in 1..=6 {
            let cfg = OptimizerConfig {
                method: SearchMethod::Ce,
                budget: 600,
                seed,
                ..OptimizerConfig::default()
            };
            let run = cross_entropy(&cfg, surrogate(&GOAL));
            assert!(run.evaluations <= 600);
            assert!(!run.ce_generations.is_empty());
            // Gammas are recorded per generation and never exceed the best.
            assert!(run.ce_generations.iter().all(|g| g.gamma <= run.best_value));
            bests.push(run.best_value);
        }
        // Every run must converge to the peak's doorstep; landing exactly
        // needs the σ-floored sampling cloud to hit the final integer
        // plateau, which about half the runs do (observed bests with these
        // seeds: [56, 56, 55, 55, 56, 53]).
        assert!(bests.iter().all(|&b| b >= 52), "{bests:?}");
        let exact = bests.iter().filter(|&&b| b == 56).count();
        assert!(exact >= 2, "only {exact} of 6 seeds reached 56: {bests:?}");
    }

    #[test]
    fn ce_updates_match_the_formulas() {
        // With elite = all samples and α = 1, μ after one generation is the
        // plain mean of the generation's candidates.
        let cfg = OptimizerConfig {
            method: SearchMethod::Ce,
            budget: 20,
            seed: 11,
            ce_samples: 20,
            ce_elite: 20,
            ce_alpha: 1.0,
            target: 10_000, // never early-stop
            ..OptimizerConfig::default()
        };
        let run = cross_entropy(&cfg, surrogate(&GOAL));
        assert_eq!(run.trajectory.len(), 20);
        let dims = cfg.ce_mu.len();
        let mut mean = vec![0.0; dims];
        for p in &run.trajectory {
            for (m, &c) in mean.iter_mut().zip(&p.candidate) {
                *m += c as f64;
            }
        }
        for m in mean.iter_mut() {
            *m /= 20.0;
        }
        let got = &run.ce_generations[0].mu;
        for i in 0..dims {
            assert!((got[i] - mean[i]).abs() < 1e-9, "coordinate {i}");
        }
    }

    #[test]
    fn random_search_uses_exactly_the_budget() {
        let cfg = OptimizerConfig {
            method: SearchMethod::Random,
            budget: 50,
            seed: 23,
            target: 10_000,
            memoize: false,
            ..OptimizerConfig::default()
        };
        let run = random_search(&cfg, surrogate(&GOAL));
        assert_eq!(run.trajectory.len(), 50);
        assert_eq!(run.evaluations, 50);
    }

    #[test]
    fn memoization_spares_the_budget() {
        let calls = AtomicUsize::new(0);
        let objective = |v: &[i64]| {
            calls.fetch_add(1, Ordering::SeqCst);
            v[0] as u32
        };
        let cfg = OptimizerConfig {
            method: SearchMethod::Sa,
            budget: 40,
            seed: 2,
            sa_sigma: vec![0.0; 10], // every neighbour equals the start
            sa_max_step: 25,
            target: 10_000,
            ..OptimizerConfig::default()
        };
        let run = simulated_annealing(&cfg, objective);
        assert_eq!(calls.load(Ordering::SeqCst), 1, "identical candidates re-solve");
        assert_eq!(run.evaluations, 1);
        assert!(run.trajectory.len() > 1, "cache hits still appear in the trajectory");
    }

    #[test]
    fn display_cell_matches_table_convention() {
        let run = OptimizerRun {
            method: SearchMethod::Sa,
            seed: 0,
            trajectory: vec![],
            best: vec![1; 10],
            best_value: 56,
            evals_to_best: 425,
            evaluations: 600,
            wall_ms: 12,
            ce_generations: vec![],
        };
        assert_eq!(run.display_cell(), "56 (425)");
    }
}
