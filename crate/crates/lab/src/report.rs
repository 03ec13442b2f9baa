//! CSV output for sweeps and tables.
//!
//! Each file starts with a `#` comment line carrying the seed and run
//! parameters, followed by a header row. Floats use Rust's shortest
//! round-trip formatting, so output does not depend on the locale.

use std::io::Write;

use crate::experiment::{
    DensityRow, ExperimentConfig, IntervalScale, PointRecord, Setting, TrimCell,
};

pub const SWEEP_COLUMNS: [&str; 8] = [
    "setting",
    "n",
    "x",
    "d2",
    "trials",
    "trim_attempts",
    "mean_det_size",
    "mean_canonical_size",
];

fn preamble<W: Write>(out: &mut W, cfg: &ExperimentConfig, extra: &str) -> std::io::Result<()> {
    writeln!(
        out,
        "# seed={} trials={} steps={} d0={} final_prob={}{}",
        cfg.seed, cfg.trials, cfg.steps, cfg.d0, cfg.final_prob, extra
    )
}

/// One row per point with the aggregate columns of [`SWEEP_COLUMNS`].
pub fn write_points<W: Write>(
    mut out: W,
    cfg: &ExperimentConfig,
    points: &[PointRecord],
) -> csv::Result<()> {
    preamble(&mut out, cfg, "")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for p in points {
        w.write_record([
            p.setting.to_string(),
            p.n.to_string(),
            p.x.map(|x| x.to_string()).unwrap_or_default(),
            p.d2.to_string(),
            p.trials.len().to_string(),
            p.trim_attempts().to_string(),
            p.mean_det_size().to_string(),
            p.mean_canonical_size().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Every trial of every point.
pub fn write_trials<W: Write>(
    mut out: W,
    cfg: &ExperimentConfig,
    points: &[PointRecord],
) -> csv::Result<()> {
    preamble(&mut out, cfg, "")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "setting",
        "n",
        "x",
        "d2",
        "trial",
        "attempts",
        "det_size",
        "canonical_size",
    ])?;
    for p in points {
        for (i, t) in p.trials.iter().enumerate() {
            w.write_record([
                p.setting.to_string(),
                p.n.to_string(),
                p.x.map(|x| x.to_string()).unwrap_or_default(),
                p.d2.to_string(),
                i.to_string(),
                t.attempts.to_string(),
                t.det_size.to_string(),
                t.canonical_size.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn scale_name(scale: IntervalScale) -> &'static str {
    match scale {
        IntervalScale::StdDev => "std_dev",
        IntervalScale::StdError => "std_error",
    }
}

/// Expected and observed peak densities with intervals under both scales.
pub fn write_density_table<W: Write>(
    mut out: W,
    cfg: &ExperimentConfig,
    setting: Setting,
    rows: &[DensityRow],
) -> csv::Result<()> {
    preamble(
        &mut out,
        cfg,
        &format!(" setting={setting} interval={}", scale_name(cfg.scale)),
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "d2",
        "observed_d2",
        "mu",
        "sigma",
        "lo",
        "hi",
        "contained",
        "lo_std_dev",
        "hi_std_dev",
        "contained_std_dev",
        "lo_std_error",
        "hi_std_error",
        "contained_std_error",
    ])?;
    for r in rows {
        let fit = r.fit(cfg.scale);
        w.write_record([
            r.n.to_string(),
            r.expected.to_string(),
            fit.observed_peak.to_string(),
            fit.mu.to_string(),
            fit.sigma.to_string(),
            fit.lo.to_string(),
            fit.hi.to_string(),
            r.contains_expected(cfg.scale).to_string(),
            r.std_dev.lo.to_string(),
            r.std_dev.hi.to_string(),
            r.contains_expected(IntervalScale::StdDev).to_string(),
            r.std_error.lo.to_string(),
            r.std_error.hi.to_string(),
            r.contains_expected(IntervalScale::StdError).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Trim ratios per cell, with the reference percentage where one exists.
pub fn write_trim_table<W: Write>(
    mut out: W,
    cfg: &ExperimentConfig,
    setting: Setting,
    cells: &[TrimCell],
) -> csv::Result<()> {
    writeln!(
        out,
        "# seed={} setting={setting} d0={} final_prob={}",
        cfg.seed, cfg.d0, cfg.final_prob
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "d2",
        "n",
        "draws",
        "trim",
        "percent",
        "half_width",
        "reference_percent",
    ])?;
    for c in cells {
        w.write_record([
            c.d2.to_string(),
            c.n.to_string(),
            c.ratio.trials.to_string(),
            c.ratio.trim.to_string(),
            (100.0 * c.ratio.ratio()).to_string(),
            (100.0 * c.ratio.half_width()).to_string(),
            c.reference.map(|r| r.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::TrialRecord;

    #[test]
    fn sweep_csv_layout() {
        let cfg = ExperimentConfig {
            seed: 9,
            trials: 2,
            ..Default::default()
        };
        let p = PointRecord {
            setting: Setting::B,
            n: 3,
            x: Some(4),
            d2: 0.25,
            trials: vec![
                TrialRecord {
                    attempts: 3,
                    det_size: 5,
                    canonical_size: 2,
                },
                TrialRecord {
                    attempts: 1,
                    det_size: 4,
                    canonical_size: 3,
                },
            ],
            seed: 9,
        };
        let mut buf = Vec::new();
        write_points(&mut buf, &cfg, &[p]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# seed=9 "));
        assert_eq!(lines[1], SWEEP_COLUMNS.join(","));
        assert_eq!(lines[2], "B,3,4,0.25,2,4,4.5,2.5");
        assert_eq!(lines.len(), 3);
    }
}
