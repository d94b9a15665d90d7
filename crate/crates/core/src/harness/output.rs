//! CSV emission. Floats are printed with 9 significant digits; missing
//! values are empty fields.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{AlphaSummary, Estimate, ExperimentConfig, Snapshot, TrialResult};
use crate::error::{Error, Result};
use crate::format::sig9;

pub const METRICS_HEADER: &str =
    "trial,step,alpha,sum_rate,temporal_smoothness,handovers,zfbf_sum_rate,per_user_rates";
pub const SUMMARY_HEADER: &str = "alpha,trials,sum_rate_mean,sum_rate_se,temporal_smoothness_mean,\
temporal_smoothness_se,handovers_mean,handovers_se,zfbf_sum_rate_mean,zfbf_sum_rate_se";
pub const SNAPSHOT_HEADER: &str = "alpha,entity_type,index,x,y,subnetwork";

fn opt(v: Option<f64>) -> String {
    v.map(sig9).unwrap_or_default()
}

/// Rows are trial-major, step-minor, alpha-innermost.
pub fn metrics_csv(trials: &[TrialResult]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for (i, trial) in trials.iter().enumerate() {
        let steps = trial.records.first().map_or(0, Vec::len);
        for t in 0..steps {
            for (a, &alpha) in trial.alphas.iter().enumerate() {
                let r = &trial.records[a][t];
                let users: Vec<String> = r.per_user_rates.iter().map(|&x| sig9(x)).collect();
                let _ = writeln!(
                    out,
                    "{i},{t},{},{},{},{},{},{}",
                    sig9(alpha),
                    sig9(r.sum_rate),
                    opt(r.temporal_smoothness),
                    r.handovers.map(|h| h.to_string()).unwrap_or_default(),
                    opt(r.zfbf_sum_rate),
                    users.join(";")
                );
            }
        }
    }
    out
}

fn est(e: Option<&Estimate>) -> String {
    match e {
        Some(e) => format!("{},{}", sig9(e.mean), sig9(e.std_err)),
        None => ",".to_string(),
    }
}

pub fn summary_csv(summary: &[AlphaSummary]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in summary {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            sig9(s.alpha),
            s.sum_rate.samples,
            est(Some(&s.sum_rate)),
            est(s.temporal_smoothness.as_ref()),
            est(s.handovers.as_ref()),
            est(s.zfbf_sum_rate.as_ref())
        );
    }
    out
}

/// Positions with the subnetwork of every BS and user, one block per alpha.
pub fn snapshot_csv(snapshot: &Snapshot, alphas: &[f64]) -> String {
    let mut out = String::from(SNAPSHOT_HEADER);
    out.push('\n');
    for (partition, &alpha) in snapshot.partitions.iter().zip(alphas) {
        let alpha = sig9(alpha);
        for (l, p) in snapshot.layout.bs_positions.iter().enumerate() {
            let m = partition.vertex_labels()[l];
            let _ = writeln!(out, "{alpha},bs,{l},{},{},{m}", sig9(p.x), sig9(p.y));
        }
        for (k, p) in snapshot.layout.user_positions.iter().enumerate() {
            let m = partition.user_subnetwork(k).expect("user anchored");
            let _ = writeln!(out, "{alpha},user,{k},{},{},{m}", sig9(p.x), sig9(p.y));
        }
    }
    out
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes `metrics.csv`, `summary.csv`, one `snapshot_<t>.csv` per kept
/// instant and `config.echo` into `dir`. Returns the written paths.
pub fn emit_outputs(
    dir: &Path,
    config: &ExperimentConfig,
    trials: &[TrialResult],
    summary: &[AlphaSummary],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = vec![
        write(dir.join("metrics.csv"), &metrics_csv(trials))?,
        write(dir.join("summary.csv"), &summary_csv(summary))?,
    ];
    if let Some(trial) = trials.iter().find(|t| !t.snapshots.is_empty()) {
        for snap in &trial.snapshots {
            let name = format!("snapshot_{}.csv", snap.time_index);
            written.push(write(dir.join(name), &snapshot_csv(snap, &trial.alphas))?);
        }
    }
    written.push(write(dir.join("config.echo"), &config.echo())?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::run_monte_carlo;

    #[test]
    fn summary_has_one_row_per_alpha() {
        let cfg = ExperimentConfig {
            num_users: 4,
            num_bs: 6,
            num_subnetworks: 2,
            alpha_grid: vec![0.0, 0.5, 1.0],
            time_steps: 2,
            realizations: 3,
            evaluate_zfbf: false,
            ..Default::default()
        };
        let mc = run_monte_carlo(&cfg).unwrap();
        let csv = summary_csv(&mc.summary);
        assert_eq!(csv.lines().count(), 1 + 3);
        let zfbf_cols: Vec<&str> = csv.lines().nth(1).unwrap().split(',').skip(8).collect();
        assert_eq!(zfbf_cols, vec!["", ""]);
        let metrics = metrics_csv(&mc.trials);
        assert_eq!(metrics.lines().count(), 1 + 3 * 2 * 3);
        assert!(metrics.lines().nth(1).unwrap().starts_with("0,0,0,"));
    }
}
