//! Gradient learners for repeated normal-form games.
//!
//! Four update rules share one simulation engine:
//!
//! * `Ga`: projected gradient ascent against the opponents' current strategies.
//! * `GaSpp`: gradient ascent with shrinking policy prediction. Each agent
//!   forecasts its opponents one projected gradient step of length `gamma_k`
//!   ahead, then takes an `eta` step against the forecast. When the
//!   forecasts equal the current strategies the run terminates; when the
//!   strategies stall while the forecasts still move, `gamma_k` shrinks by `mu`.
//! * `IgaPp`: the same look-ahead with a fixed `gamma` and no projection of the
//!   forecast, and no shrink/terminate step.
//! * `GigaWolf`: a gradient step blended toward a slower baseline learner
//!   moving at rate `eta / 3`.
//!
//! Agents in one run may use different rules.

use serde::{Deserialize, Serialize};

use crate::equilibrium::exploitability_profile;
use crate::error::{Error, Result};
use crate::game::{BimatrixGame, NormalFormGame, RewardRanges, TensorGame};
use crate::geometry::{contains, project, ReducedStrategy};
use crate::scalar::{max_abs_diff, norm2, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "ga")]
    Ga,
    #[serde(rename = "gaspp")]
    GaSpp,
    #[serde(rename = "igapp")]
    IgaPp,
    #[serde(rename = "gigawolf")]
    GigaWolf,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Ga => "GA",
            Algorithm::GaSpp => "GA-SPP",
            Algorithm::IgaPp => "IGA-PP",
            Algorithm::GigaWolf => "GIGA-WoLF",
        })
    }
}

/// Gradient step `eta`, initial prediction length `gamma0` and shrink factor `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSizes<T> {
    pub eta: T,
    pub gamma0: T,
    pub mu: T,
}

impl<T: Scalar> StepSizes<T> {
    /// Step sizes with the default shrink factor `mu = 0.5`.
    pub fn new(eta: T, gamma0: T) -> Self {
        Self {
            eta,
            gamma0,
            mu: T::lit(0.5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig<T> {
    pub algorithm: Algorithm,
    pub sizes: StepSizes<T>,
}

impl<T: Scalar> LearnerConfig<T> {
    pub fn new(algorithm: Algorithm, eta: T, gamma0: T) -> Self {
        Self {
            algorithm,
            sizes: StepSizes::new(eta, gamma0),
        }
    }

    fn validate(&self, agent: usize) -> Result<()> {
        let s = &self.sizes;
        let positive = |v: T| v.is_finite() && v > T::zero();
        if !positive(s.eta) {
            return Err(Error::InvalidInput(format!("agent {agent}: eta must be positive")));
        }
        if matches!(self.algorithm, Algorithm::GaSpp | Algorithm::IgaPp) && !positive(s.gamma0) {
            return Err(Error::InvalidInput(format!("agent {agent}: gamma0 must be positive")));
        }
        if self.algorithm == Algorithm::GaSpp && !(s.mu > T::zero() && s.mu < T::one()) {
            return Err(Error::InvalidInput(format!("agent {agent}: mu must lie in (0, 1)")));
        }
        Ok(())
    }
}

/// Outcome of the three step-size conditions for a game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport<T> {
    /// `eta > 0` and `gamma0 > 0`.
    pub condition1: bool,
    /// `4 gamma0^2 delta_r delta_c < 1`.
    pub condition2: bool,
    /// `eta, gamma0 < 1 / (delta_r + delta_c)`.
    pub condition3: bool,
    /// The value `4 gamma0^2 delta_r delta_c`.
    pub condition2_value: T,
    /// The bound `1 / (delta_r + delta_c)`; infinite for constant games.
    pub condition3_bound: T,
}

impl<T: Scalar> ConditionReport<T> {
    pub fn all_pass(&self) -> bool {
        self.condition1 && self.condition2 && self.condition3
    }
}

/// Checks the step-size conditions for a two-player game.
pub fn validate_conditions<T: Scalar>(game: &BimatrixGame<T>, sizes: &StepSizes<T>) -> ConditionReport<T> {
    let RewardRanges { delta_r, delta_c } = game.reward_ranges();
    validate_conditions_for_ranges(&[delta_r, delta_c], sizes)
}

/// Step-size conditions for any number of players.
///
/// Condition 2 uses the largest pairwise product of reward ranges and
/// Condition 3 the sum of all ranges; for two players this is exactly the
/// two-player form.
pub fn validate_conditions_for_ranges<T: Scalar>(ranges: &[T], sizes: &StepSizes<T>) -> ConditionReport<T> {
    let four = T::lit(4.0);
    let mut max_product = T::zero();
    for (i, &a) in ranges.iter().enumerate() {
        for &b in &ranges[i + 1..] {
            max_product = max_product.max(a * b);
        }
    }
    let total: T = ranges.iter().copied().sum();
    let condition2_value = four * sizes.gamma0 * sizes.gamma0 * max_product;
    let condition3_bound = if total > T::zero() {
        T::one() / total
    } else {
        T::infinity()
    };
    ConditionReport {
        condition1: sizes.eta > T::zero() && sizes.gamma0 > T::zero(),
        condition2: condition2_value < T::one(),
        condition3: sizes.eta < condition3_bound && sizes.gamma0 < condition3_bound,
        condition2_value,
        condition3_bound,
    }
}

/// Mutable per-agent learner state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerState<T> {
    pub algorithm: Algorithm,
    pub strategy: ReducedStrategy<T>,
    /// Current prediction length; constant except under `GaSpp`.
    pub gamma_k: T,
    /// Slow baseline strategy, `GigaWolf` only.
    pub baseline: Option<ReducedStrategy<T>>,
}

impl<T: Scalar> LearnerState<T> {
    pub fn new(config: &LearnerConfig<T>, strategy: ReducedStrategy<T>) -> Self {
        let baseline = (config.algorithm == Algorithm::GigaWolf).then(|| strategy.clone());
        Self {
            algorithm: config.algorithm,
            strategy,
            gamma_k: config.sizes.gamma0,
            baseline,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepOutcome {
    Continue,
    Terminated,
    /// Strategies did not move but forecasts did; `gamma_k` was multiplied by `mu`.
    GammaShrunk,
}

/// One iteration of a run: the state at iteration `k` and what was computed from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord<T> {
    pub k: usize,
    pub strategies: Vec<Vec<T>>,
    /// Projected forecasts of each agent's next strategy; present when some agent runs `GaSpp`.
    pub predictions: Option<Vec<Vec<T>>>,
    pub gradients: Vec<Vec<T>>,
    pub gamma_k: Vec<T>,
    pub terminated: bool,
}

fn step_along<T: Scalar>(x: &[T], direction: &[T], size: T) -> Vec<T> {
    let moved: Vec<T> = x.iter().zip(direction).map(|(&a, &d)| a + size * d).collect();
    project(&moved)
}

fn raw_step<T: Scalar>(x: &[T], direction: &[T], size: T) -> Vec<T> {
    x.iter().zip(direction).map(|(&a, &d)| a + size * d).collect()
}

fn check_inputs<T: Scalar, G: NormalFormGame<T>>(
    game: &G,
    configs: &[LearnerConfig<T>],
    states: &[LearnerState<T>],
) -> Result<()> {
    let players = game.num_players();
    if configs.len() != players || states.len() != players {
        return Err(Error::InvalidInput(format!(
            "{players}-player game given {} configs and {} states",
            configs.len(),
            states.len()
        )));
    }
    for (i, (cfg, st)) in configs.iter().zip(states).enumerate() {
        cfg.validate(i)?;
        if cfg.algorithm != st.algorithm {
            return Err(Error::InvalidState(format!(
                "agent {i}: state uses {} but config uses {}",
                st.algorithm, cfg.algorithm
            )));
        }
        let dim = game.num_actions(i) - 1;
        let x = st.strategy.coords();
        if x.len() != dim || !contains(x) {
            return Err(Error::InvalidState(format!(
                "agent {i}: strategy {x:?} is not a point of the {dim}-dimensional reduced simplex"
            )));
        }
        if cfg.algorithm == Algorithm::GigaWolf {
            match &st.baseline {
                Some(z) if z.dim() == dim && contains(z.coords()) => {}
                _ => {
                    return Err(Error::InvalidState(format!(
                        "agent {i}: GIGA-WoLF needs a feasible baseline strategy"
                    )))
                }
            }
        }
        if !(st.gamma_k.is_finite() && st.gamma_k > T::zero()) && cfg.algorithm == Algorithm::GaSpp {
            return Err(Error::InvalidState(format!("agent {i}: gamma_k must be positive")));
        }
    }
    Ok(())
}

/// Advances every agent by one iteration.
///
/// Returns the new states, the record of iteration `k` and the outcome of
/// the shrink/terminate test (always `Continue` when no agent runs `GaSpp`).
pub fn step<T: Scalar, G: NormalFormGame<T>>(
    game: &G,
    configs: &[LearnerConfig<T>],
    states: &[LearnerState<T>],
    k: usize,
) -> Result<(Vec<LearnerState<T>>, TrajectoryRecord<T>, StepOutcome)> {
    check_inputs(game, configs, states)?;
    let players = states.len();
    let current: Vec<Vec<T>> = states.iter().map(|s| s.strategy.coords().to_vec()).collect();
    let grads: Vec<Vec<T>> = (0..players).map(|i| game.gradient(i, &current)).collect();

    // Forecast of agent i made by agent `predictor` with its own prediction length.
    let forecast = |i: usize, predictor: usize| step_along(&current[i], &grads[i], states[predictor].gamma_k);
    let spp_agents: Vec<usize> = (0..players)
        .filter(|&i| configs[i].algorithm == Algorithm::GaSpp)
        .collect();
    let predictions: Option<Vec<Vec<T>>> = (!spp_agents.is_empty()).then(|| {
        (0..players)
            .map(|i| {
                let predictor = spp_agents.iter().copied().find(|&j| j != i).unwrap_or(i);
                forecast(i, predictor)
            })
            .collect()
    });

    let mut next: Vec<LearnerState<T>> = states.to_vec();
    for i in 0..players {
        let sizes = &configs[i].sizes;
        let x = &current[i];
        match configs[i].algorithm {
            Algorithm::Ga => {
                next[i].strategy = ReducedStrategy::from_raw(step_along(x, &grads[i], sizes.eta));
            }
            Algorithm::GaSpp => {
                let mut predicted = current.clone();
                for j in (0..players).filter(|&j| j != i) {
                    predicted[j] = forecast(j, i);
                }
                let g = game.gradient(i, &predicted);
                next[i].strategy = ReducedStrategy::from_raw(step_along(x, &g, sizes.eta));
            }
            Algorithm::IgaPp => {
                let mut predicted = current.clone();
                for j in (0..players).filter(|&j| j != i) {
                    predicted[j] = raw_step(&current[j], &grads[j], states[i].gamma_k);
                }
                let g = game.gradient(i, &predicted);
                next[i].strategy = ReducedStrategy::from_raw(step_along(x, &g, sizes.eta));
            }
            Algorithm::GigaWolf => {
                let z = states[i].baseline.as_ref().expect("baseline checked above").coords();
                let hypothetical = step_along(x, &grads[i], sizes.eta);
                let baseline = step_along(z, &grads[i], sizes.eta / T::lit(3.0));
                let toward: Vec<T> = baseline.iter().zip(&hypothetical).map(|(&b, &h)| b - h).collect();
                let moved: Vec<T> = baseline.iter().zip(z).map(|(&b, &a)| b - a).collect();
                let gap = norm2(&toward);
                let blend = if gap > T::zero() {
                    (norm2(&moved) / gap).min(T::one())
                } else {
                    T::one()
                };
                let blended: Vec<T> = hypothetical.iter().zip(&toward).map(|(&h, &d)| h + blend * d).collect();
                // The blend is a convex combination of two feasible points.
                next[i].strategy = ReducedStrategy::from_raw(project(&blended));
                next[i].baseline = Some(ReducedStrategy::from_raw(baseline));
            }
        }
    }

    let mut outcome = StepOutcome::Continue;
    if let Some(preds) = &predictions {
        let tol = T::termination_tol();
        let forecasts_still = preds.iter().zip(&current).all(|(p, x)| max_abs_diff(p, x) <= tol);
        let strategies_still = next
            .iter()
            .zip(&current)
            .all(|(n, x)| max_abs_diff(n.strategy.coords(), x) <= tol);
        if forecasts_still {
            outcome = StepOutcome::Terminated;
            next = states.to_vec();
        } else if strategies_still {
            outcome = StepOutcome::GammaShrunk;
            next = states.to_vec();
            for &i in &spp_agents {
                next[i].gamma_k = states[i].gamma_k * configs[i].sizes.mu;
            }
        }
    }

    let record = TrajectoryRecord {
        k,
        strategies: current,
        predictions,
        gradients: grads,
        gamma_k: states.iter().map(|s| s.gamma_k).collect(),
        terminated: outcome == StepOutcome::Terminated,
    };
    Ok((next, record, outcome))
}

fn two_agent_step<T: Scalar>(
    game: &BimatrixGame<T>,
    algorithm: Algorithm,
    sizes: &StepSizes<T>,
    row: &LearnerState<T>,
    col: &LearnerState<T>,
) -> Result<(LearnerState<T>, LearnerState<T>, TrajectoryRecord<T>, StepOutcome)> {
    let config = LearnerConfig {
        algorithm,
        sizes: *sizes,
    };
    let (mut next, record, outcome) = step(game, &[config, config], &[row.clone(), col.clone()], 0)?;
    let col = next.pop().expect("two states");
    let row = next.pop().expect("two states");
    Ok((row, col, record, outcome))
}

/// One GA-SPP iteration for two agents sharing step sizes.
pub fn gaspp_step<T: Scalar>(
    game: &BimatrixGame<T>,
    sizes: &StepSizes<T>,
    row: &LearnerState<T>,
    col: &LearnerState<T>,
) -> Result<(LearnerState<T>, LearnerState<T>, TrajectoryRecord<T>, StepOutcome)> {
    two_agent_step(game, Algorithm::GaSpp, sizes, row, col)
}

/// One projected gradient ascent iteration for two agents.
pub fn ga_step<T: Scalar>(
    game: &BimatrixGame<T>,
    sizes: &StepSizes<T>,
    row: &LearnerState<T>,
    col: &LearnerState<T>,
) -> Result<(LearnerState<T>, LearnerState<T>, TrajectoryRecord<T>)> {
    two_agent_step(game, Algorithm::Ga, sizes, row, col).map(|(r, c, rec, _)| (r, c, rec))
}

/// One IGA-PP iteration (unprojected forecast, fixed `gamma`).
pub fn igapp_step<T: Scalar>(
    game: &BimatrixGame<T>,
    sizes: &StepSizes<T>,
    row: &LearnerState<T>,
    col: &LearnerState<T>,
) -> Result<(LearnerState<T>, LearnerState<T>, TrajectoryRecord<T>)> {
    two_agent_step(game, Algorithm::IgaPp, sizes, row, col).map(|(r, c, rec, _)| (r, c, rec))
}

/// One GIGA-WoLF iteration.
pub fn gigawolf_step<T: Scalar>(
    game: &BimatrixGame<T>,
    sizes: &StepSizes<T>,
    row: &LearnerState<T>,
    col: &LearnerState<T>,
) -> Result<(LearnerState<T>, LearnerState<T>, TrajectoryRecord<T>)> {
    two_agent_step(game, Algorithm::GigaWolf, sizes, row, col).map(|(r, c, rec, _)| (r, c, rec))
}

/// Number of consecutive sub-tolerance steps required to declare convergence.
pub const DEFAULT_WINDOW: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions<T> {
    pub max_iters: usize,
    /// Threshold on the per-step joint strategy change (infinity norm).
    pub tol_converge: T,
    pub window: usize,
    /// Keep every `record_stride`-th record; `0` keeps none.
    pub record_stride: usize,
}

impl<T: Scalar> RunOptions<T> {
    pub fn new(max_iters: usize, tol_converge: T) -> Self {
        Self {
            max_iters,
            tol_converge,
            window: DEFAULT_WINDOW,
            record_stride: 1,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary<T> {
    pub converged: bool,
    /// The shrink/terminate test fired.
    pub terminated: bool,
    pub iterations: usize,
    pub final_strategies: Vec<Vec<T>>,
    pub final_gammas: Vec<T>,
    pub final_exploitability: T,
    /// Infinity norm of the last strategy change.
    pub last_step_norm: T,
    pub gamma_shrinks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub records: Vec<TrajectoryRecord<T>>,
    pub summary: RunSummary<T>,
}

/// Builds initial learner states from configs and starting strategies.
pub fn initial_states<T: Scalar>(
    configs: &[LearnerConfig<T>],
    initial: &[ReducedStrategy<T>],
) -> Result<Vec<LearnerState<T>>> {
    if configs.len() != initial.len() {
        return Err(Error::InvalidInput(format!(
            "{} learner configs but {} initial strategies",
            configs.len(),
            initial.len()
        )));
    }
    Ok(configs
        .iter()
        .zip(initial)
        .map(|(c, s)| LearnerState::new(c, s.clone()))
        .collect())
}

/// Runs the learners on any game, calling `observe` after every iteration
/// with the iteration's record, its outcome and the resulting states.
///
/// Stops on termination, after `window` consecutive iterations whose joint
/// strategy change is below `tol_converge`, or after `max_iters`
/// iterations. Iterations that only shrink `gamma_k` neither extend nor
/// reset the convergence window. The final state is appended as an extra
/// record (without forecasts) when recording is enabled.
pub fn simulate<T, G, F>(
    game: &G,
    configs: &[LearnerConfig<T>],
    initial: &[ReducedStrategy<T>],
    opts: &RunOptions<T>,
    mut observe: F,
) -> Result<Trajectory<T>>
where
    T: Scalar,
    G: NormalFormGame<T>,
    F: FnMut(&TrajectoryRecord<T>, StepOutcome, &[LearnerState<T>]),
{
    let mut states = initial_states(configs, initial)?;
    check_inputs(game, configs, &states)?;
    let mut records = Vec::new();
    let mut streak = 0usize;
    let mut converged = false;
    let mut terminated = false;
    let mut last_step_norm = T::infinity();
    let mut shrinks = 0usize;
    let mut iterations = 0usize;

    while iterations < opts.max_iters {
        let k = iterations;
        let (next, record, outcome) = step(game, configs, &states, k).map_err(|e| Error::AtIteration {
            iteration: k,
            source: Box::new(e),
        })?;
        iterations += 1;
        observe(&record, outcome, &next);
        let step_norm = states.iter().zip(&next).fold(T::zero(), |acc, (a, b)| {
            acc.max(max_abs_diff(a.strategy.coords(), b.strategy.coords()))
        });
        if opts.record_stride > 0 && k.is_multiple_of(opts.record_stride) {
            records.push(record);
        }
        states = next;
        match outcome {
            StepOutcome::Terminated => {
                converged = true;
                terminated = true;
                last_step_norm = T::zero();
                break;
            }
            StepOutcome::GammaShrunk => shrinks += 1,
            StepOutcome::Continue => {
                last_step_norm = step_norm;
                if step_norm < opts.tol_converge {
                    streak += 1;
                    if streak >= opts.window {
                        converged = true;
                        break;
                    }
                } else {
                    streak = 0;
                }
            }
        }
    }

    let final_strategies: Vec<Vec<T>> = states.iter().map(|s| s.strategy.coords().to_vec()).collect();
    if opts.record_stride > 0 {
        records.push(TrajectoryRecord {
            k: iterations,
            gradients: (0..states.len()).map(|i| game.gradient(i, &final_strategies)).collect(),
            strategies: final_strategies.clone(),
            predictions: None,
            gamma_k: states.iter().map(|s| s.gamma_k).collect(),
            terminated,
        });
    }
    let summary = RunSummary {
        converged,
        terminated,
        iterations,
        final_exploitability: exploitability_profile(game, &final_strategies),
        final_strategies,
        final_gammas: states.iter().map(|s| s.gamma_k).collect(),
        last_step_norm,
        gamma_shrinks: shrinks,
    };
    Ok(Trajectory { records, summary })
}

/// Two-agent run on a bimatrix game. Agents may use different learners.
pub fn run<T: Scalar>(
    game: &BimatrixGame<T>,
    learners: [LearnerConfig<T>; 2],
    initial: [ReducedStrategy<T>; 2],
    opts: &RunOptions<T>,
) -> Result<Trajectory<T>> {
    simulate(game, &learners, &initial, opts, |_, _, _| {})
}

/// Run with any number of players on a payoff-tensor game.
///
/// GA-SPP agents forecast every opponent with that opponent's own gradient
/// and respond to the forecast joint strategy.
pub fn run_nplayer<T: Scalar>(
    game: &TensorGame<T>,
    learners: &[LearnerConfig<T>],
    initial: &[ReducedStrategy<T>],
    opts: &RunOptions<T>,
) -> Result<Trajectory<T>> {
    simulate(game, learners, initial, opts, |_, _, _| {})
}
