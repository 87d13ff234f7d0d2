use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::campaign::{run_campaign_with, AttackReport};
use crate::harness::config::{CampaignConfig, SweepGrid};
use crate::harness::exec::Execution;

/// One CSV row. Missing estimates are written as empty fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: String,
    pub detection_rate: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub eve_acc: Option<f64>,
    pub i_ae_emp: Option<f64>,
    pub i_ae_analytic: Option<f64>,
    pub qber: Option<f64>,
}

impl SweepRow {
    fn from_report(param: String, r: &AttackReport) -> Self {
        SweepRow {
            param,
            detection_rate: r.detection_rate.map(|e| e.value),
            ci_lo: r.detection_rate.map(|e| e.ci_lo),
            ci_hi: r.detection_rate.map(|e| e.ci_hi),
            eve_acc: r.eve_accuracy.map(|e| e.value),
            i_ae_emp: r.information.as_ref().map(|i| i.empirical),
            i_ae_analytic: r.information.as_ref().map(|i| i.analytic),
            qber: r.qber.map(|e| e.value),
        }
    }
}

/// Runs one campaign per grid point. Every point reuses the base seed.
pub fn run_sweep(base: &CampaignConfig, exec: Execution) -> Result<Vec<(SweepRow, AttackReport)>> {
    let grid = base.sweep.as_ref().ok_or_else(|| Error::Config("no sweep grid configured".into()))?;
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    let points: Vec<(String, CampaignConfig)> = match grid {
        SweepGrid::F(fs) => fs.iter().map(|&f| (format!("{f}"), CampaignConfig { f, sweep: None, ..base.clone() })).collect(),
        SweepGrid::N(ns) => ns
            .iter()
            .map(|&n| (format!("{n}"), CampaignConfig { n_qubits: n, sweep: None, ..base.clone() }))
            .collect(),
    };
    points
        .into_iter()
        .map(|(param, cfg)| {
            let report = run_campaign_with(&cfg, exec)?;
            Ok((SweepRow::from_report(param, &report), report))
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ProtocolKind;

    #[test]
    fn csv_header_and_rows() {
        let mut cfg = CampaignConfig::new(ProtocolKind::P2, 2_000, 0.0, 4);
        cfg.sweep = Some(SweepGrid::F(vec![0.0, 1.0]));
        let rows: Vec<_> = run_sweep(&cfg, Execution::default()).unwrap().into_iter().map(|r| r.0).collect();
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("param,detection_rate,ci_lo,ci_hi,eve_acc,i_ae_emp,i_ae_analytic,qber"));
        let first = lines.next().unwrap();
        assert_eq!(first, "0,,,,,0.0,0.0,0.0");
        assert_eq!(lines.count(), 1);
    }

    #[test]
    fn missing_or_empty_grid_is_an_error() {
        let mut cfg = CampaignConfig::new(ProtocolKind::P2, 10, 0.0, 4);
        assert!(run_sweep(&cfg, Execution::default()).is_err());
        cfg.sweep = Some(SweepGrid::F(vec![]));
        assert!(run_sweep(&cfg, Execution::default()).is_err());
    }
}
