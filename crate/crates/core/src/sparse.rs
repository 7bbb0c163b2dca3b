//! Structured group-sparse optimizer with half-space projection.
//!
//! Training proceeds in three phases:
//!
//! 1. **Warm-up** — plain momentum SGD for `warmup_steps` steps.
//! 2. **Target selection** — at the end of warm-up, the `Q` eligible groups
//!    of smallest norm become the target zero set (ties break to lower group
//!    order). `Q = floor(sparsity_rate * |eligible|)`.
//! 3. **Shrinkage** — every later step, each non-frozen target group takes
//!    its trial momentum update and then a proximal group-l2 shrink whose
//!    coefficient comes from a per-step line search: the smallest lambda in
//!    the geometric ladder `lambda0 * eta^t` whose shrink reduces the group
//!    norm to at most `(1 - rho)` of its pre-step value. Crossing the origin
//!    (half-space test) or falling under `eps_proj` projects the group to
//!    exact zeros, permanently.
//!
//! Groups outside the target set follow plain momentum SGD bit-for-bit.

use serde::{Deserialize, Serialize};

use crate::error::{EditKitError, Result};
use crate::linalg::dot;
use crate::nn::{GradRecord, GroupId, ParamStore};

/// Optimizer configuration; every knob of the warm-up / line-search /
/// projection schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparseOptConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub warmup_steps: usize,
    /// Fraction of eligible groups to zero: `Q = floor(rate * |eligible|)`.
    pub sparsity_rate: f64,
    /// Required per-step magnitude reduction factor for target groups.
    pub rho: f64,
    pub lambda0: f64,
    pub eta: f64,
    pub max_trials: usize,
    pub eps_proj: f64,
}

impl Default for SparseOptConfig {
    fn default() -> Self {
        SparseOptConfig {
            learning_rate: 0.02,
            momentum: 0.9,
            warmup_steps: 0,
            sparsity_rate: 0.1,
            rho: 0.02,
            lambda0: 1e-3,
            eta: 2.0,
            max_trials: 20,
            eps_proj: 1e-6,
        }
    }
}

impl SparseOptConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.sparsity_rate) {
            return Err(EditKitError::Config(format!(
                "sparsity rate {} outside [0, 1]",
                self.sparsity_rate
            )));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(EditKitError::Config(format!("rho {} outside [0, 1)", self.rho)));
        }
        if self.eta <= 1.0 {
            return Err(EditKitError::Config(format!("eta {} must exceed 1", self.eta)));
        }
        if self.learning_rate <= 0.0 || self.lambda0 <= 0.0 || self.eps_proj <= 0.0 {
            return Err(EditKitError::Config(
                "learning_rate, lambda0 and eps_proj must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(EditKitError::Config(format!(
                "momentum {} outside [0, 1)",
                self.momentum
            )));
        }
        Ok(())
    }

    pub fn target_cardinality(&self, eligible: usize) -> usize {
        (self.sparsity_rate * eligible as f64).floor() as usize
    }
}

/// Which groups the optimizer updates and which are eligible for zeroing.
#[derive(Debug, Clone)]
pub struct GroupPartition {
    /// Groups that receive updates, in group order.
    pub trainable: Vec<GroupId>,
    /// Subset of trainable groups eligible for zeroing.
    pub eligible: Vec<GroupId>,
}

impl GroupPartition {
    pub fn new(trainable: Vec<GroupId>, eligible: Vec<GroupId>) -> Result<GroupPartition> {
        for g in &eligible {
            if !trainable.contains(g) {
                return Err(EditKitError::Config(format!(
                    "eligible group {g} is not trainable"
                )));
            }
        }
        Ok(GroupPartition { trainable, eligible })
    }

    /// Every group of the store trainable, every group eligible.
    pub fn all(store: &ParamStore) -> GroupPartition {
        let all: Vec<GroupId> = (0..store.num_groups()).collect();
        GroupPartition { trainable: all.clone(), eligible: all }
    }
}

/// Result of one lambda line search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSearch {
    pub lambda: f64,
    pub flagged: bool,
    pub trials: usize,
}

/// Smallest lambda in the ladder `lambda0 * eta^t` whose proximal shrink of
/// the trial update reduces the group norm to `(1 - rho) * pre_norm` or
/// less. If no ladder element succeeds, the last one is returned flagged.
pub fn find_lambda(pre_norm: f64, trial: &[f64], cfg: &SparseOptConfig) -> LambdaSearch {
    let trial_norm = dot(trial, trial).sqrt();
    let goal = (1.0 - cfg.rho) * pre_norm;
    let mut lambda = cfg.lambda0;
    for t in 0..=cfg.max_trials {
        let post = (trial_norm - cfg.learning_rate * lambda).max(0.0);
        if post <= goal {
            return LambdaSearch { lambda, flagged: false, trials: t + 1 };
        }
        if t < cfg.max_trials {
            lambda *= cfg.eta;
        }
    }
    LambdaSearch { lambda, flagged: true, trials: cfg.max_trials + 1 }
}

/// One row of the sparsity trace: a target group's shrink at one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkRecord {
    pub step: usize,
    pub group: GroupId,
    pub group_name: String,
    pub pre_norm: f64,
    pub post_norm: f64,
    pub lambda: f64,
    pub flagged: bool,
    pub frozen: bool,
}

/// What one optimizer step did.
#[derive(Debug, Clone, Default)]
pub struct StepReport {
    pub step: usize,
    pub shrinks: Vec<ShrinkRecord>,
}

/// Final sparsity outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparsityReport {
    pub target_cardinality: usize,
    pub eligible_count: usize,
    pub zero_groups: Vec<String>,
    pub satisfied: bool,
}

/// Momentum-SGD optimizer with group-sparse shrinkage and projection.
#[derive(Debug, Clone)]
pub struct SparseOptimizer {
    cfg: SparseOptConfig,
    partition: GroupPartition,
    momentum: GradRecord,
    step_count: usize,
    target_zero_set: Vec<GroupId>,
    frozen_zero_set: Vec<GroupId>,
    target_selected: bool,
    q: usize,
}

impl SparseOptimizer {
    pub fn new(store: &ParamStore, partition: GroupPartition, cfg: SparseOptConfig) -> Result<Self> {
        cfg.validate()?;
        let q = cfg.target_cardinality(partition.eligible.len());
        Ok(SparseOptimizer {
            cfg,
            partition,
            momentum: GradRecord::zeros_like(store),
            step_count: 0,
            target_zero_set: Vec::new(),
            frozen_zero_set: Vec::new(),
            target_selected: false,
            q,
        })
    }

    pub fn config(&self) -> &SparseOptConfig {
        &self.cfg
    }

    pub fn target_cardinality(&self) -> usize {
        self.q
    }

    pub fn target_zero_set(&self) -> &[GroupId] {
        &self.target_zero_set
    }

    pub fn frozen_zero_set(&self) -> &[GroupId] {
        &self.frozen_zero_set
    }

    pub fn steps_taken(&self) -> usize {
        self.step_count
    }

    /// True once exactly `Q` eligible groups are frozen at zero.
    pub fn cardinality_satisfied(&self) -> bool {
        self.frozen_zero_set.len() == self.q
    }

    fn select_targets(&mut self, store: &ParamStore) -> Result<()> {
        let mut norms: Vec<(GroupId, f64)> = Vec::with_capacity(self.partition.eligible.len());
        for &g in &self.partition.eligible {
            norms.push((g, store.group_norm(g)?));
        }
        // Smallest norm first; ties by lower group order.
        norms.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
        self.target_zero_set = norms.iter().take(self.q).map(|(g, _)| *g).collect();
        self.target_zero_set.sort_unstable();
        self.target_selected = true;
        Ok(())
    }

    /// One optimizer step over all trainable groups. Non-finite gradients
    /// abort before any mutation.
    pub fn step(&mut self, store: &mut ParamStore, grads: &GradRecord) -> Result<StepReport> {
        if !grads.is_finite() {
            return Err(EditKitError::Numeric("non-finite gradient; step aborted".into()));
        }
        let s = self.step_count + 1;
        if !self.target_selected && s > self.cfg.warmup_steps {
            self.select_targets(store)?;
        }
        let mut report = StepReport { step: s, shrinks: Vec::new() };
        let shrink_phase = s > self.cfg.warmup_steps;
        for &g in &self.partition.trainable {
            let is_target = shrink_phase && self.target_zero_set.contains(&g);
            let is_frozen = self.frozen_zero_set.contains(&g);
            if is_frozen {
                report.shrinks.push(ShrinkRecord {
                    step: s,
                    group: g,
                    group_name: store.group(g)?.name.clone(),
                    pre_norm: store.group_norm(g)?,
                    post_norm: store.group_norm(g)?,
                    lambda: 0.0,
                    flagged: false,
                    frozen: true,
                });
                continue;
            }
            // Momentum trial update: v = beta v + g; theta = theta - alpha v.
            let pre = store.group_vec(g)?;
            let grad = grads.group_vec(store, g)?;
            let mut vel = self.momentum.group_vec(store, g)?;
            let mut trial = pre.clone();
            for i in 0..trial.len() {
                vel[i] = self.cfg.momentum * vel[i] + grad[i];
                trial[i] -= self.cfg.learning_rate * vel[i];
            }
            if !is_target {
                self.momentum.set_group_vec(store, g, &vel)?;
                store.set_group_vec(g, &trial)?;
                continue;
            }
            let pre_norm = dot(&pre, &pre).sqrt();
            if pre_norm == 0.0 {
                // Already at the origin: project and freeze.
                self.momentum.set_group_vec(store, g, &vec![0.0; vel.len()])?;
                store.zero_group(g)?;
                self.frozen_zero_set.push(g);
                report.shrinks.push(ShrinkRecord {
                    step: s,
                    group: g,
                    group_name: store.group(g)?.name.clone(),
                    pre_norm,
                    post_norm: 0.0,
                    lambda: 0.0,
                    flagged: false,
                    frozen: true,
                });
                continue;
            }
            let search = find_lambda(pre_norm, &trial, &self.cfg);
            let trial_norm = dot(&trial, &trial).sqrt();
            let factor = if trial_norm > 0.0 {
                (1.0 - self.cfg.learning_rate * search.lambda / trial_norm).max(0.0)
            } else {
                0.0
            };
            let post: Vec<f64> = trial.iter().map(|v| factor * v).collect();
            let post_norm = dot(&post, &post).sqrt();
            // Half-space test: crossed the origin or close enough to it.
            let crossed = dot(&pre, &post) <= 0.0;
            let freeze = crossed || post_norm < self.cfg.eps_proj;
            self.momentum.set_group_vec(store, g, &vel)?;
            if freeze {
                store.zero_group(g)?;
                self.momentum.set_group_vec(store, g, &vec![0.0; vel.len()])?;
                self.frozen_zero_set.push(g);
            } else {
                store.set_group_vec(g, &post)?;
            }
            report.shrinks.push(ShrinkRecord {
                step: s,
                group: g,
                group_name: store.group(g)?.name.clone(),
                pre_norm,
                post_norm: if freeze { 0.0 } else { post_norm },
                lambda: search.lambda,
                flagged: search.flagged,
                frozen: freeze,
            });
        }
        self.step_count = s;
        Ok(report)
    }

    /// Zeroes residual target groups below `eps_proj` and reports whether
    /// exactly `Q` eligible groups are at zero. Failure is explicit, never
    /// silent.
    pub fn finalize(&mut self, store: &mut ParamStore) -> Result<SparsityReport> {
        for &g in &self.target_zero_set.clone() {
            if !self.frozen_zero_set.contains(&g) && store.group_norm(g)? < self.cfg.eps_proj {
                store.zero_group(g)?;
                self.momentum
                    .set_group_vec(store, g, &vec![0.0; store.group_len(g)?])?;
                self.frozen_zero_set.push(g);
            }
        }
        let mut zero_groups = Vec::new();
        for &g in &self.partition.eligible {
            if store.group_norm(g)? == 0.0 {
                zero_groups.push(store.group(g)?.name.clone());
            }
        }
        Ok(SparsityReport {
            target_cardinality: self.q,
            eligible_count: self.partition.eligible.len(),
            satisfied: zero_groups.len() == self.q,
            zero_groups,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;
    use crate::nn::GroupSlice;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Store with `n_groups` vector groups of width `width`.
    fn vector_store(n_groups: usize, width: usize, rng: &mut ChaCha8Rng) -> ParamStore {
        let mut store = ParamStore::new();
        for g in 0..n_groups {
            let vals: Vec<f64> = (0..width).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = store.add_param(&format!("p{g}"), Mat::col_vec(&vals)).unwrap();
            store
                .add_group(&format!("g{g}"), vec![GroupSlice { param: p, row_start: 0, row_end: width }])
                .unwrap();
        }
        store.validate_partition().unwrap();
        store
    }

    fn grads_for(store: &ParamStore, mut f: impl FnMut(usize, usize) -> f64) -> GradRecord {
        let mut g = GradRecord::zeros_like(store);
        for p in 0..store.num_params() {
            let n = store.param(p).unwrap().len();
            for i in 0..n {
                g.mat_mut(p).data[i] = f(p, i);
            }
        }
        g
    }

    #[test]
    fn warmup_matches_reference_momentum_sgd_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut store = vector_store(4, 3, &mut rng);
        let reference_init: Vec<Vec<f64>> =
            (0..4).map(|g| store.group_vec(g).unwrap()).collect();
        let cfg = SparseOptConfig { warmup_steps: 10, ..SparseOptConfig::default() };
        let mut opt = SparseOptimizer::new(&store, GroupPartition::all(&store), cfg).unwrap();

        // Reference implementation: per-scalar v = beta v + g; x -= alpha v.
        let mut ref_x = reference_init;
        let mut ref_v: Vec<Vec<f64>> = ref_x.iter().map(|x| vec![0.0; x.len()]).collect();
        let mut grad_rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let mut draws = vec![vec![0.0; 3]; 4];
            for d in draws.iter_mut() {
                for v in d.iter_mut() {
                    *v = grad_rng.random_range(-0.5..0.5);
                }
            }
            let grads = grads_for(&store, |p, i| draws[p][i]);
            opt.step(&mut store, &grads).unwrap();
            for g in 0..4 {
                for i in 0..3 {
                    ref_v[g][i] = cfg.momentum * ref_v[g][i] + draws[g][i];
                    ref_x[g][i] -= cfg.learning_rate * ref_v[g][i];
                }
            }
        }
        for g in 0..4 {
            assert_eq!(store.group_vec(g).unwrap(), ref_x[g]);
        }
    }

    #[test]
    fn non_target_groups_follow_reference_exactly_during_shrinkage() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut store = vector_store(6, 4, &mut rng);
        // Make groups 0 and 1 tiny so they are selected as targets.
        for g in 0..2 {
            let v = store.group_vec(g).unwrap();
            let scaled: Vec<f64> = v.iter().map(|x| x * 0.01).collect();
            store.set_group_vec(g, &scaled).unwrap();
        }
        let cfg = SparseOptConfig {
            warmup_steps: 2,
            sparsity_rate: 2.0 / 6.0,
            ..SparseOptConfig::default()
        };
        let mut ref_store = store.clone();
        let mut opt = SparseOptimizer::new(&store, GroupPartition::all(&store), cfg).unwrap();
        let plain_cfg = SparseOptConfig { sparsity_rate: 0.0, ..cfg };
        let mut plain =
            SparseOptimizer::new(&ref_store, GroupPartition::all(&ref_store), plain_cfg).unwrap();

        let mut grad_rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let mut draws = vec![vec![0.0; 4]; 6];
            for d in draws.iter_mut() {
                for v in d.iter_mut() {
                    *v = grad_rng.random_range(-0.3..0.3);
                }
            }
            let g1 = grads_for(&store, |p, i| draws[p][i]);
            let g2 = grads_for(&ref_store, |p, i| draws[p][i]);
            opt.step(&mut store, &g1).unwrap();
            plain.step(&mut ref_store, &g2).unwrap();
        }
        assert_eq!(opt.target_zero_set(), &[0, 1]);
        for g in 2..6 {
            assert_eq!(store.group_vec(g).unwrap(), ref_store.group_vec(g).unwrap());
        }
    }

    #[test]
    fn tiny_pre_norm_projects_immediately() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut store = vector_store(3, 2, &mut rng);
        let cfg = SparseOptConfig {
            warmup_steps: 0,
            sparsity_rate: 1.0 / 3.0,
            eps_proj: 1e-3,
            ..SparseOptConfig::default()
        };
        store.set_group_vec(0, &[1e-5, -1e-5]).unwrap();
        let mut opt = SparseOptimizer::new(&store, GroupPartition::all(&store), cfg).unwrap();
        let grads = grads_for(&store, |_, _| 0.01);
        let report = opt.step(&mut store, &grads).unwrap();
        let rec = report.shrinks.iter().find(|r| r.group == 0).unwrap();
        assert!(rec.frozen);
        assert_eq!(store.group_norm(0).unwrap(), 0.0);
    }

    #[test]
    fn shrink_records_satisfy_reduction_postcondition() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut store = vector_store(8, 5, &mut rng);
        let cfg = SparseOptConfig {
            warmup_steps: 3,
            sparsity_rate: 0.25,
            rho: 0.05,
            ..SparseOptConfig::default()
        };
        let mut opt = SparseOptimizer::new(&store, GroupPartition::all(&store), cfg).unwrap();
        let mut grad_rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let grads = grads_for(&store, |_, _| grad_rng.random_range(-0.2..0.2));
            let report = opt.step(&mut store, &grads).unwrap();
            for rec in &report.shrinks {
                if !rec.flagged && rec.lambda > 0.0 {
                    assert!(
                        rec.post_norm <= (1.0 - cfg.rho) * rec.pre_norm + 1e-15,
                        "step {}: {} -> {}",
                        rec.step,
                        rec.pre_norm,
                        rec.post_norm
                    );
                }
            }
        }
    }

    #[test]
    fn frozen_groups_stay_bitwise_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut store = vector_store(5, 3, &mut rng);
        let cfg = SparseOptConfig {
            warmup_steps: 1,
            sparsity_rate: 0.4,
            rho: 0.3,
            ..SparseOptConfig::default()
        };
        let mut opt = SparseOptimizer::new(&store, GroupPartition::all(&store), cfg).unwrap();
        let mut grad_rng = ChaCha8Rng::seed_from_u64(9);
        let mut seen_frozen = false;
        for _ in 0..200 {
            let grads = grads_for(&store, |_, _| grad_rng.random_range(-0.5..0.5));
            opt.step(&mut store, &grads).unwrap();
            for &g in opt.frozen_zero_set() {
                seen_frozen = true;
                let v = store.group_vec(g).unwrap();
                assert!(v.iter().all(|&x| x == 0.0));
            }
        }
        assert!(seen_frozen);
        assert_eq!(opt.frozen_zero_set().len(), 2);
    }

    #[test]
    fn find_lambda_rho_zero_accepts_first_on_descent() {
        let cfg = SparseOptConfig { rho: 0.0, ..SparseOptConfig::default() };
        // Trial already no larger than pre-norm: any shrink suffices.
        let search = find_lambda(1.0, &[0.6, 0.0], &cfg);
        assert_eq!(search.lambda, cfg.lambda0);
        assert!(!search.flagged);
        assert_eq!(search.trials, 1);
    }

    #[test]
    fn find_lambda_large_lambda_always_zeroes() {
        let cfg = SparseOptConfig::default();
        // lambda >= |v| / alpha drives the proximal shrink to exact zero.
        let v = [3.0, 4.0];
        let lambda = 5.0 / cfg.learning_rate;
        let post = (5.0 - cfg.learning_rate * lambda).max(0.0);
        assert_eq!(post, 0.0);
        // So the geometric ladder terminates for any rho < 1.
        let search = find_lambda(5.0, &v, &SparseOptConfig { rho: 0.999, ..cfg });
        assert!(!search.flagged);
    }

    #[test]
    fn find_lambda_returns_minimal_ladder_element() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let cfg = SparseOptConfig { rho: 0.05, ..SparseOptConfig::default() };
        for _ in 0..50 {
            let n = rng.random_range(2..6);
            let trial: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let pre_norm: f64 = rng.random_range(0.5..3.0);
            let got = find_lambda(pre_norm, &trial, &cfg);
            // Exhaustive scan of the whole ladder.
            let trial_norm = dot(&trial, &trial).sqrt();
            let mut want = None;
            let mut lambda = cfg.lambda0;
            for _ in 0..=cfg.max_trials {
                let post = (trial_norm - cfg.learning_rate * lambda).max(0.0);
                if post <= (1.0 - cfg.rho) * pre_norm {
                    want = Some(lambda);
                    break;
                }
                lambda *= cfg.eta;
            }
            match want {
                Some(l) => {
                    assert!(!got.flagged);
                    assert_eq!(got.lambda, l);
                }
                None => assert!(got.flagged),
            }
        }
    }

    #[test]
    fn finalize_zero_q_trivially_satisfied() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut store = vector_store(4, 3, &mut rng);
        let cfg = SparseOptConfig { sparsity_rate: 0.0, ..SparseOptConfig::default() };
        let mut opt = SparseOptimizer::new(&store, GroupPartition::all(&store), cfg).unwrap();
        let grads = grads_for(&store, |_, _| 0.1);
        opt.step(&mut store, &grads).unwrap();
        let report = opt.finalize(&mut store).unwrap();
        assert!(report.satisfied);
        assert!(report.zero_groups.is_empty());
    }

    #[test]
    fn default_run_reaches_exact_cardinality() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut store = vector_store(10, 4, &mut rng);
        let cfg = SparseOptConfig {
            warmup_steps: 30,
            sparsity_rate: 0.3,
            ..SparseOptConfig::default()
        };
        let mut opt = SparseOptimizer::new(&store, GroupPartition::all(&store), cfg).unwrap();
        assert_eq!(opt.target_cardinality(), 3);
        let mut grad_rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..400 {
            let grads = grads_for(&store, |_, _| grad_rng.random_range(-0.2..0.2));
            opt.step(&mut store, &grads).unwrap();
        }
        let report = opt.finalize(&mut store).unwrap();
        assert!(report.satisfied, "zero groups: {:?}", report.zero_groups);
        assert_eq!(report.zero_groups.len(), 3);
    }

    #[test]
    fn cardinality_robust_across_lambda0_values() {
        // The line search makes attainment insensitive to lambda0.
        for lambda0 in [1e-4, 1e-3, 1e-2] {
            let mut rng = ChaCha8Rng::seed_from_u64(14);
            let mut store = vector_store(10, 4, &mut rng);
            let cfg = SparseOptConfig {
                warmup_steps: 20,
                sparsity_rate: 0.2,
                lambda0,
                ..SparseOptConfig::default()
            };
            let mut opt = SparseOptimizer::new(&store, GroupPartition::all(&store), cfg).unwrap();
            let mut grad_rng = ChaCha8Rng::seed_from_u64(15);
            for _ in 0..400 {
                let grads = grads_for(&store, |_, _| grad_rng.random_range(-0.2..0.2));
                opt.step(&mut store, &grads).unwrap();
            }
            let report = opt.finalize(&mut store).unwrap();
            assert!(report.satisfied, "lambda0 {lambda0}: {:?}", report.zero_groups);
        }
    }

    #[test]
    fn non_finite_gradients_abort_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let mut store = vector_store(2, 2, &mut rng);
        let before = store.group_vec(0).unwrap();
        let cfg = SparseOptConfig::default();
        let mut opt = SparseOptimizer::new(&store, GroupPartition::all(&store), cfg).unwrap();
        let grads = grads_for(&store, |_, _| f64::NAN);
        assert!(matches!(
            opt.step(&mut store, &grads),
            Err(EditKitError::Numeric(_))
        ));
        assert_eq!(store.group_vec(0).unwrap(), before);
        assert_eq!(opt.steps_taken(), 0);
    }

    #[test]
    fn target_selection_ties_break_to_lower_group_order() {
        let mut store = ParamStore::new();
        for g in 0..4 {
            let p = store.add_param(&format!("p{g}"), Mat::col_vec(&[0.5, 0.5])).unwrap();
            store
                .add_group(&format!("g{g}"), vec![GroupSlice { param: p, row_start: 0, row_end: 2 }])
                .unwrap();
        }
        let cfg = SparseOptConfig {
            warmup_steps: 0,
            sparsity_rate: 0.5,
            ..SparseOptConfig::default()
        };
        let mut opt = SparseOptimizer::new(&store, GroupPartition::all(&store), cfg).unwrap();
        let grads = GradRecord::zeros_like(&store);
        opt.step(&mut store, &grads).unwrap();
        // All norms equal: the two lowest group ids win.
        assert_eq!(opt.target_zero_set(), &[0, 1]);
    }
}
