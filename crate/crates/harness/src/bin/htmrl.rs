use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use htmrl_core::analysis::{
    all_actions_probability, attainability_monte_carlo, attainability_probability,
    unattainability_probability, AttainabilityParams,
};
use htmrl_core::Schedule;
use htmrl_harness::output::OutputOptions;
use htmrl_harness::spec::{parse_normalization, DEFAULT_BOOST_STRENGTH};
use htmrl_harness::{
    emit_outputs, mean_steps_to_threshold, run, segment_recovery_stats, AgentKind, CapacityParams,
    Experiment, ExperimentSpec, NonstationaryParams, Outcome, Preset,
};

#[derive(Parser)]
#[command(name = "htmrl", version, about = "HTMRL bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct OutputArgs {
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Skip the per-step CSV.
    #[arg(long)]
    no_step_log: bool,
    #[arg(long)]
    no_plot: bool,
    /// Run repeats one after another instead of on the thread pool.
    #[arg(long)]
    serial: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Contextual deterministic bandit until the halt criterion, then a
    /// frozen evaluation phase.
    Capacity {
        #[arg(long, default_value_t = 20)]
        states: usize,
        #[arg(long, default_value_t = 4)]
        arms: usize,
        #[arg(long, default_value_t = 20)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2_000_000)]
        max_steps: usize,
        /// Steps played with learning off after convergence.
        #[arg(long, default_value_t = 1000)]
        eval_steps: usize,
        #[arg(long, default_value_t = DEFAULT_BOOST_STRENGTH)]
        boost_strength: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ten-armed Gaussian bandit with reinit or shuffle events.
    Nonstationary {
        #[arg(long, default_value = "full")]
        preset: String,
        #[arg(long, default_value = "reinit")]
        schedule: String,
        #[arg(long, default_value = "htmrl")]
        agent: String,
        #[arg(long, default_value = "on")]
        boost: String,
        /// Window size, `full` or `off`.
        #[arg(long, default_value = "1000")]
        reward_window: String,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, default_value_t = 2000)]
        period: usize,
        #[arg(long, default_value_t = 100)]
        repeats: usize,
        /// Run 1000 repeats.
        #[arg(long, conflicts_with = "repeats")]
        full_repeats: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BOOST_STRENGTH)]
        boost_strength: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Probability that actions are attainable from a state's encoding.
    Attainability {
        #[arg(long, default_value_t = 400)]
        n: u64,
        #[arg(long, default_value_t = 0.05)]
        d: f64,
        #[arg(long, default_value_t = 0.5)]
        c: f64,
        #[arg(long, default_value_t = 2)]
        cells_per_action: u32,
        #[arg(long, default_value_t = 1024)]
        actions: u64,
        #[arg(long)]
        mc_trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Repeat a run from its manifest.
    Rerun {
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn execute(mut spec: ExperimentSpec, output: &OutputArgs) -> anyhow::Result<Outcome> {
    spec.parallel = !output.serial;
    let started = Instant::now();
    let outcome = run(&spec)?;
    let opts = OutputOptions {
        step_log: !output.no_step_log,
        plot: !output.no_plot,
        smoothed: true,
    };
    let paths = emit_outputs(&outcome, &output.out, opts)?;
    eprintln!(
        "{} repeats in {:.1}s; aggregate written to {}",
        spec.repeats,
        started.elapsed().as_secs_f64(),
        paths.aggregate.display()
    );
    report(&outcome);
    Ok(outcome)
}

fn report(outcome: &Outcome) {
    match &outcome.spec.experiment {
        Experiment::Capacity(_) => {
            let steps = outcome.convergence_steps();
            let done: Vec<usize> = steps.iter().flatten().copied().collect();
            println!("converged: {}/{}", done.len(), steps.len());
            if let (Some(min), Some(max)) = (done.iter().min(), done.iter().max()) {
                let mean = done.iter().sum::<usize>() as f64 / done.len() as f64;
                println!("steps to convergence: min {min}, mean {mean:.0}, max {max}");
            }
        }
        Experiment::Nonstationary(p) => {
            let period = p.period().unwrap_or(outcome.curve.len());
            let Ok(stats) = segment_recovery_stats(&outcome.curve.mean, period, 0.9) else {
                return;
            };
            println!("segment,peak,steps_to_90pct");
            for s in &stats {
                let reached = s
                    .steps_to_threshold
                    .map_or_else(|| "not reached".to_string(), |t| t.to_string());
                println!("{},{:.4},{}", s.index, s.peak, reached);
            }
            if let Some(mean) = mean_steps_to_threshold(&stats, 1, period) {
                println!("mean steps to 90% after changes: {mean:.1}");
            }
        }
    }
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Capacity {
            states,
            arms,
            repeats,
            seed,
            max_steps,
            eval_steps,
            boost_strength,
            output,
        } => {
            let mut p = CapacityParams::new(states, arms);
            p.max_steps = max_steps;
            p.eval_steps = eval_steps;
            p.boost_strength = boost_strength;
            execute(ExperimentSpec::capacity(p, repeats, seed), &output)?;
        }
        Command::Nonstationary {
            preset,
            schedule,
            agent,
            boost,
            reward_window,
            steps,
            period,
            repeats,
            full_repeats,
            seed,
            boost_strength,
            output,
        } => {
            let preset: Preset = preset.parse()?;
            let schedule = Schedule::with_period(&schedule, period)?;
            let agent: AgentKind = agent.parse()?;
            let mut p = NonstationaryParams::new(preset, schedule, agent);
            p.boost = match boost.as_str() {
                "on" => true,
                "off" => false,
                other => bail!("--boost takes on or off, not {other:?}"),
            };
            p.normalization = parse_normalization(&reward_window)?;
            p.steps = steps;
            p.boost_strength = boost_strength;
            let repeats = if full_repeats { 1000 } else { repeats };
            execute(ExperimentSpec::nonstationary(p, repeats, seed), &output)?;
        }
        Command::Attainability {
            n,
            d,
            c,
            cells_per_action,
            actions,
            mc_trials,
            seed,
        } => {
            let p = AttainabilityParams::from_fractions(n, d, c, cells_per_action)?;
            println!("n={n} dn={} cn={} cells_per_action={cells_per_action}", p.active_bits, p.pool_bits);
            println!("P(action attainable) = {:.12}", attainability_probability(&p));
            println!("1 - P = {:.6e}", unattainability_probability(&p));
            println!("P(all {actions} actions attainable) = {:.6}", all_actions_probability(&p, actions));
            if let Some(trials) = mc_trials {
                let mc = attainability_monte_carlo(&p, trials, seed)?;
                println!("Monte Carlo ({trials} trials) = {:.6} +- {:.2e}", mc.estimate, mc.std_error);
            }
        }
        Command::Rerun { manifest, output } => {
            let text = fs::read_to_string(&manifest)
                .with_context(|| format!("reading {}", manifest.display()))?;
            execute(ExperimentSpec::from_manifest(&text)?, &output)?;
        }
    }
    Ok(())
}
