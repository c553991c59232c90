//! Files written for a finished run.
//!
//! - `steps.csv`: `repeat,step,state,action,reward,reward_norm,reward_ma,optimal`
//! - `aggregate.csv`: `step,mean_reward,std_reward[,smoothed]`
//! - `plot.svg`: mean curve with a one-standard-deviation band
//! - `manifest.txt`: `key=value` lines that reproduce the run

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use htmrl_core::analysis::savgol_smooth;
use plotters::prelude::*;

use crate::error::{HarnessError, Result};
use crate::runner::Outcome;

pub const SMOOTHING_WINDOW: usize = 51;
pub const SMOOTHING_ORDER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputOptions {
    pub step_log: bool,
    pub plot: bool,
    pub smoothed: bool,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self {
            step_log: true,
            plot: true,
            smoothed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub steps: Option<PathBuf>,
    pub aggregate: PathBuf,
    pub plot: Option<PathBuf>,
    pub manifest: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub fn emit_outputs(outcome: &Outcome, dir: &Path, opts: OutputOptions) -> Result<OutputPaths> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let steps = if opts.step_log {
        let path = dir.join("steps.csv");
        write_steps(outcome, &path)?;
        Some(path)
    } else {
        None
    };

    let smoothed = if opts.smoothed && outcome.curve.len() >= SMOOTHING_WINDOW {
        Some(savgol_smooth(&outcome.curve.mean, SMOOTHING_WINDOW, SMOOTHING_ORDER)?)
    } else {
        None
    };
    let aggregate = dir.join("aggregate.csv");
    write_aggregate(outcome, smoothed.as_deref(), &aggregate)?;

    let plot = if opts.plot {
        let path = dir.join("plot.svg");
        write_plot(outcome, smoothed.as_deref(), &path)?;
        Some(path)
    } else {
        None
    };

    let manifest = dir.join("manifest.txt");
    let created = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut text = outcome.spec.to_manifest();
    text.push_str(&format!("created_unix={created}\n"));
    fs::write(&manifest, text).map_err(io_err(&manifest))?;

    Ok(OutputPaths {
        steps,
        aggregate,
        plot,
        manifest,
    })
}

fn write_steps(outcome: &Outcome, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record([
        "repeat", "step", "state", "action", "reward", "reward_norm", "reward_ma", "optimal",
    ])
    .map_err(csv_err(path))?;
    for log in &outcome.logs {
        for r in &log.records {
            w.write_record([
                r.repeat.to_string(),
                r.step.to_string(),
                r.state.to_string(),
                r.action.to_string(),
                r.reward.to_string(),
                r.reward_norm.to_string(),
                r.reward_ma.to_string(),
                u8::from(r.optimal).to_string(),
            ])
            .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

fn write_aggregate(outcome: &Outcome, smoothed: Option<&[f64]>, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let mut header = vec!["step", "mean_reward", "std_reward"];
    if smoothed.is_some() {
        header.push("smoothed");
    }
    w.write_record(&header).map_err(csv_err(path))?;
    for t in 0..outcome.curve.len() {
        let mut row = vec![
            t.to_string(),
            outcome.curve.mean[t].to_string(),
            outcome.curve.std[t].to_string(),
        ];
        if let Some(s) = smoothed {
            row.push(s[t].to_string());
        }
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_plot(outcome: &Outcome, smoothed: Option<&[f64]>, path: &Path) -> Result<()> {
    let plot_err = |e: &dyn std::fmt::Display| HarnessError::Plot {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let curve = &outcome.curve;
    let line = smoothed.unwrap_or(&curve.mean);
    let lo: Vec<f64> = line.iter().zip(&curve.std).map(|(m, s)| m - s).collect();
    let hi: Vec<f64> = line.iter().zip(&curve.std).map(|(m, s)| m + s).collect();
    let ymin = lo.iter().copied().fold(f64::INFINITY, f64::min).min(0.0);
    let ymax = hi.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let (ymin, ymax) = if ymin.is_finite() && ymax > ymin {
        (ymin, ymax)
    } else {
        (-1.0, 1.0)
    };
    let steps = curve.len().max(1);

    let root = SVGBackend::new(path, (960, 540)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(&e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(outcome.spec.kind(), ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(56)
        .build_cartesian_2d(0..steps, ymin..ymax)
        .map_err(|e| plot_err(&e))?;
    chart
        .configure_mesh()
        .x_desc("step")
        .y_desc("reward")
        .draw()
        .map_err(|e| plot_err(&e))?;

    let band: Vec<(usize, f64)> = (0..curve.len())
        .map(|t| (t, hi[t]))
        .chain((0..curve.len()).rev().map(|t| (t, lo[t])))
        .collect();
    chart
        .draw_series(std::iter::once(Polygon::new(band, BLUE.mix(0.2).filled())))
        .map_err(|e| plot_err(&e))?;
    chart
        .draw_series(LineSeries::new(line.iter().copied().enumerate(), &BLUE))
        .map_err(|e| plot_err(&e))?;
    root.present().map_err(|e| plot_err(&e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::run;
    use crate::spec::{AgentKind, ExperimentSpec, NonstationaryParams, Preset};
    use htmrl_core::Schedule;

    #[test]
    fn writes_every_file() {
        let mut p = NonstationaryParams::new(Preset::Tiny, Schedule::Reinit(30), AgentKind::Htmrl);
        p.steps = 90;
        let out = run(&ExperimentSpec::nonstationary(p, 2, 1)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = emit_outputs(&out, dir.path(), OutputOptions::default()).unwrap();
        let agg = fs::read_to_string(&paths.aggregate).unwrap();
        assert!(agg.starts_with("step,mean_reward,std_reward,smoothed\n"));
        assert_eq!(agg.lines().count(), 91);
        let steps = fs::read_to_string(paths.steps.unwrap()).unwrap();
        assert!(steps.starts_with("repeat,step,state,action,reward,reward_norm,reward_ma,optimal\n"));
        assert_eq!(steps.lines().count(), 1 + 2 * 90);
        assert!(fs::read_to_string(paths.plot.unwrap()).unwrap().contains("<svg"));
        assert!(fs::read_to_string(paths.manifest).unwrap().contains("kind=nonstationary\n"));
    }

    #[test]
    fn short_runs_skip_smoothing() {
        let mut p = NonstationaryParams::new(Preset::Tiny, Schedule::None, AgentKind::EpsGreedy(0.1));
        p.steps = 20;
        let out = run(&ExperimentSpec::nonstationary(p, 1, 1)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let opts = OutputOptions {
            step_log: false,
            plot: false,
            smoothed: true,
        };
        let paths = emit_outputs(&out, dir.path(), opts).unwrap();
        assert!(paths.steps.is_none() && paths.plot.is_none());
        let agg = fs::read_to_string(&paths.aggregate).unwrap();
        assert!(agg.starts_with("step,mean_reward,std_reward\n"));
    }

    #[test]
    fn unwritable_directory_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let mut p = NonstationaryParams::new(Preset::Tiny, Schedule::None, AgentKind::EpsGreedy(0.1));
        p.steps = 5;
        let out = run(&ExperimentSpec::nonstationary(p, 1, 1)).unwrap();
        let err = emit_outputs(&out, &blocker.join("sub"), OutputOptions::default()).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }
}
