//! Seeded experiment loops.
//!
//! Repeat `i` of an experiment with master seed `s` draws its environment
//! from `derive_seed(s, i, ENV_STREAM)` and its agent from
//! `derive_seed(s, i, AGENT_STREAM)`. HTMRL and the baseline therefore face
//! the same environment realization for the same repeat index, and adding
//! repeats never changes earlier ones.

use htmrl_core::analysis::{aggregate_repeats, moving_average, CurveStats};
use htmrl_core::rng::{self, derive_seed, StreamRng};
use htmrl_core::{ContextualBandit, EpsGreedyAgent, GaussianBandit, HtmrlAgent};
use rayon::prelude::*;

use crate::error::Result;
use crate::spec::{AgentKind, CapacityParams, Experiment, ExperimentSpec, NonstationaryParams, GAUSSIAN_ARMS};

pub const ENV_STREAM: u64 = 0;
pub const AGENT_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub repeat: usize,
    pub step: usize,
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub reward_norm: f64,
    pub reward_ma: f64,
    pub optimal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepeatLog {
    pub repeat: usize,
    pub records: Vec<StepRecord>,
    /// Capacity runs: number of steps taken when the halt criterion fired.
    pub converged_at: Option<usize>,
}

impl RepeatLog {
    /// Records up to and including the learning halt (all records if the
    /// repeat never converged).
    pub fn learning_records(&self) -> &[StepRecord] {
        &self.records[..self.converged_at.unwrap_or(self.records.len())]
    }
}

impl RepeatLog {
    pub fn rewards(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.reward).collect()
    }

    pub fn moving_average(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.reward_ma).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub spec: ExperimentSpec,
    pub logs: Vec<RepeatLog>,
    /// Mean and std across repeats of each repeat's moving-average reward.
    pub curve: CurveStats<f64>,
}

impl Outcome {
    pub fn convergence_steps(&self) -> Vec<Option<usize>> {
        self.logs.iter().map(|l| l.converged_at).collect()
    }
}

/// Either learner behind one interface.
enum Learner {
    Htmrl(Box<HtmrlAgent<f64>>),
    EpsGreedy(Box<(EpsGreedyAgent<f64>, StreamRng)>),
}

impl Learner {
    fn act(&mut self, state: usize) -> Result<usize> {
        Ok(match self {
            Learner::Htmrl(a) => a.act(state)?,
            Learner::EpsGreedy(b) => {
                let (agent, rng) = &mut **b;
                agent.act(state, rng)?
            }
        })
    }

    fn learn(&mut self, state: usize, action: usize, reward: f64) -> Result<f64> {
        Ok(match self {
            Learner::Htmrl(a) => a.learn(reward)?,
            Learner::EpsGreedy(b) => {
                b.0.learn(state, action, reward)?;
                reward
            }
        })
    }
}

fn for_each_repeat<F>(spec: &ExperimentSpec, f: F) -> Result<Vec<RepeatLog>>
where
    F: Fn(usize) -> Result<RepeatLog> + Sync + Send,
{
    if spec.parallel {
        (0..spec.repeats).into_par_iter().map(f).collect()
    } else {
        (0..spec.repeats).map(f).collect()
    }
}

pub fn run(spec: &ExperimentSpec) -> Result<Outcome> {
    match &spec.experiment {
        Experiment::Capacity(p) => run_capacity(spec, p),
        Experiment::Nonstationary(p) => run_nonstationary(spec, p),
    }
}

/// Contextual deterministic bandit. Learning stops after `halt_after`
/// consecutive optimal actions (or `max_steps`); a converged repeat then plays
/// `eval_steps` more steps with learning off. Shorter repeats are padded with
/// their final moving average so the aggregate covers the longest repeat.
pub fn run_capacity(spec: &ExperimentSpec, p: &CapacityParams) -> Result<Outcome> {
    spec.validate()?;
    let logs = for_each_repeat(spec, |repeat| capacity_repeat(spec.seed, repeat, p))?;
    let len = logs.iter().map(|l| l.records.len()).max().unwrap_or(0);
    let padded: Vec<Vec<f64>> = logs
        .iter()
        .map(|l| {
            let mut ma = l.moving_average();
            let last = ma.last().copied().unwrap_or(0.0);
            ma.resize(len, last);
            ma
        })
        .collect();
    let curve = aggregate_repeats(&padded)?;
    Ok(Outcome {
        spec: spec.clone(),
        logs,
        curve,
    })
}

fn capacity_repeat(seed: u64, repeat: usize, p: &CapacityParams) -> Result<RepeatLog> {
    let mut env = ContextualBandit::new(p.states, p.arms, derive_seed(seed, repeat as u64, ENV_STREAM))?;
    let mut agent = HtmrlAgent::new(p.agent_config(derive_seed(seed, repeat as u64, AGENT_STREAM))?)?;
    let mut records = Vec::new();
    let mut window = std::collections::VecDeque::with_capacity(p.ma_window);
    let mut window_sum = 0.0;
    let mut streak = 0;
    let mut converged_at = None;
    let mut step = 0;
    let mut end = p.max_steps;
    while step < end {
        let state = env.step();
        let action = agent.act(state)?;
        let reward = env.pull(state, action)?;
        let reward_norm = agent.learn(reward)?;
        // Rewards are +-1, so the running sum is exact.
        if window.len() == p.ma_window {
            window_sum -= window.pop_front().unwrap_or(0.0);
        }
        window.push_back(reward);
        window_sum += reward;
        let optimal = action == env.winning_arm(state)?;
        records.push(StepRecord {
            repeat,
            step,
            state,
            action,
            reward,
            reward_norm,
            reward_ma: window_sum / window.len() as f64,
            optimal,
        });
        step += 1;
        streak = if optimal { streak + 1 } else { 0 };
        if converged_at.is_none() && streak >= p.halt_after {
            converged_at = Some(step);
            agent.set_learning(false);
            end = step + p.eval_steps;
        }
    }
    Ok(RepeatLog {
        repeat,
        records,
        converged_at,
    })
}

/// Ten-armed Gaussian bandit under the configured schedule for a fixed
/// number of steps.
pub fn run_nonstationary(spec: &ExperimentSpec, p: &NonstationaryParams) -> Result<Outcome> {
    spec.validate()?;
    let logs = for_each_repeat(spec, |repeat| nonstationary_repeat(spec.seed, repeat, p))?;
    let series: Vec<Vec<f64>> = logs.iter().map(RepeatLog::moving_average).collect();
    let curve = aggregate_repeats(&series)?;
    Ok(Outcome {
        spec: spec.clone(),
        logs,
        curve,
    })
}

fn nonstationary_repeat(seed: u64, repeat: usize, p: &NonstationaryParams) -> Result<RepeatLog> {
    let mut env = GaussianBandit::<f64>::new(
        GAUSSIAN_ARMS,
        p.schedule,
        derive_seed(seed, repeat as u64, ENV_STREAM),
    )?;
    let agent_seed = derive_seed(seed, repeat as u64, AGENT_STREAM);
    let mut learner = match p.agent {
        AgentKind::Htmrl => Learner::Htmrl(Box::new(HtmrlAgent::new(p.agent_config(agent_seed)?)?)),
        AgentKind::EpsGreedy(eps) => Learner::EpsGreedy(Box::new((
            EpsGreedyAgent::new(1, GAUSSIAN_ARMS, eps)?,
            rng::stream(agent_seed),
        ))),
    };
    let mut records = Vec::with_capacity(p.steps);
    let mut rewards = Vec::with_capacity(p.steps);
    for step in 0..p.steps {
        env.advance(step);
        let action = learner.act(0)?;
        let reward = env.pull(action)?;
        let reward_norm = learner.learn(0, action, reward)?;
        rewards.push(reward);
        records.push(StepRecord {
            repeat,
            step,
            state: 0,
            action,
            reward,
            reward_norm,
            reward_ma: 0.0,
            optimal: action == env.best_arm(),
        });
    }
    for (rec, ma) in records.iter_mut().zip(moving_average(&rewards, p.ma_window)?) {
        rec.reward_ma = ma;
    }
    Ok(RepeatLog {
        repeat,
        records,
        converged_at: None,
    })
}
