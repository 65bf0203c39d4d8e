use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Serialize, Serializer};

use super::metrics::{hp_energy, psnr};
use super::size::{external_size, size_proxy};
use crate::error::Result;
use crate::estimation::ConvergenceTrace;
use crate::lifting::{transform_sequence_traced, CompConfig};
use crate::mvf::side_info_bytes;
use crate::volume::{Slice, TemporalSequence};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SizeMeasure {
    /// 5/3 wavelet plus zero-order entropy.
    #[default]
    Proxy,
    /// Shell command run on each subband, see [`external_size`].
    External(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOptions {
    pub levels: usize,
    pub size: SizeMeasure,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            levels: 4,
            size: SizeMeasure::Proxy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord {
    pub pair: usize,
    pub hp_bytes: u64,
    pub lp_bytes: u64,
    pub mv_bytes: u64,
    /// PSNR of the lowpass band against the even input slice.
    #[serde(serialize_with = "finite_or_inf")]
    pub lp_psnr_db: f64,
    pub hp_energy: u64,
}

impl PairRecord {
    pub fn total_bytes(&self) -> u64 {
        self.hp_bytes + self.lp_bytes + self.mv_bytes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub method: String,
    pub pairs: Vec<PairRecord>,
    pub total_bytes: u64,
    #[serde(serialize_with = "finite_or_inf")]
    pub mean_lp_psnr_db: f64,
    #[serde(skip)]
    pub traces: Vec<Option<ConvergenceTrace>>,
}

fn finite_or_inf<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

fn fmt_db(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.4}")
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn subband_size(s: &Slice, options: &EvalOptions) -> Result<u64> {
    static WORK_DIRS: AtomicUsize = AtomicUsize::new(0);
    match &options.size {
        SizeMeasure::Proxy => size_proxy(s, options.levels),
        SizeMeasure::External(cmd) => {
            let dir: PathBuf = std::env::temp_dir().join(format!(
                "meshlift-{}-{}",
                std::process::id(),
                WORK_DIRS.fetch_add(1, Ordering::Relaxed)
            ));
            std::fs::create_dir_all(&dir)?;
            let size = external_size(s, cmd, &dir);
            let _ = std::fs::remove_dir_all(&dir);
            size
        }
    }
}

/// Transforms `seq` with every configuration and collects per-pair metrics.
pub fn evaluate(
    seq: &TemporalSequence,
    configs: &[CompConfig],
    options: &EvalOptions,
) -> Result<Vec<EvalReport>> {
    let peak = ((1u32 << seq.bit_depth()) - 1) as f64;
    let originals: Vec<&Slice> = seq.pairs()?.map(|(even, _)| even).collect();
    configs
        .iter()
        .map(|config| {
            let results = transform_sequence_traced(seq, config)?;
            let mut pairs = Vec::with_capacity(results.len());
            let mut traces = Vec::with_capacity(results.len());
            for (t, (bands, trace)) in results.into_iter().enumerate() {
                pairs.push(PairRecord {
                    pair: t,
                    hp_bytes: subband_size(&bands.hp, options)?,
                    lp_bytes: subband_size(&bands.lp, options)?,
                    mv_bytes: side_info_bytes(&bands.compensator)? as u64,
                    lp_psnr_db: psnr(&bands.lp, originals[t], peak)?,
                    hp_energy: hp_energy(&bands.hp),
                });
                traces.push(trace);
            }
            let total_bytes = pairs.iter().map(PairRecord::total_bytes).sum();
            let mean_lp_psnr_db =
                pairs.iter().map(|p| p.lp_psnr_db).sum::<f64>() / pairs.len() as f64;
            Ok(EvalReport {
                method: config.method.label().to_string(),
                pairs,
                total_bytes,
                mean_lp_psnr_db,
                traces,
            })
        })
        .collect()
}

/// `pair,method,hp_bytes,lp_bytes,mv_bytes,lp_psnr_db,hp_energy`
pub fn write_report_csv(reports: &[EvalReport], mut out: impl Write) -> Result<()> {
    writeln!(
        out,
        "pair,method,hp_bytes,lp_bytes,mv_bytes,lp_psnr_db,hp_energy"
    )?;
    for r in reports {
        for p in &r.pairs {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                p.pair,
                r.method,
                p.hp_bytes,
                p.lp_bytes,
                p.mv_bytes,
                fmt_db(p.lp_psnr_db),
                p.hp_energy
            )?;
        }
    }
    Ok(())
}

pub fn write_report_json(reports: &[EvalReport], out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(out, reports)?;
    Ok(())
}

/// `iter,active_points,comp_psnr_db,inv_psnr_db`, padded to `rows` lines
/// after the header.
pub fn write_trace_csv(trace: &ConvergenceTrace, rows: usize, mut out: impl Write) -> Result<()> {
    writeln!(out, "iter,active_points,comp_psnr_db,inv_psnr_db")?;
    for r in trace.padded(rows) {
        writeln!(
            out,
            "{},{},{},{}",
            r.iteration,
            r.active_points,
            fmt_db(r.comp_psnr_db),
            fmt_db(r.inv_psnr_db)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::EstimationConfig;
    use crate::lifting::Method;

    fn static_sequence() -> TemporalSequence {
        let s = Slice::from_fn(32, 32, 12, |x, y| ((x * 37 + y * 91) % 4096) as i32);
        TemporalSequence::new(vec![s.clone(), s.clone(), s.clone(), s], 0).unwrap()
    }

    #[test]
    fn static_sequence_report() {
        let seq = static_sequence();
        let configs: Vec<CompConfig> = Method::ALL
            .iter()
            .map(|&m| {
                CompConfig::new(
                    m,
                    EstimationConfig::for_grid(8, crate::mesh::Topology::Quadrilateral),
                )
            })
            .collect();
        let reports = evaluate(&seq, &configs, &EvalOptions::default()).unwrap();
        assert_eq!(reports.len(), 4);
        for r in &reports {
            assert_eq!(r.pairs.len(), 2);
            assert_eq!(r.mean_lp_psnr_db, f64::INFINITY);
            for p in &r.pairs {
                assert_eq!(p.hp_energy, 0);
            }
            assert_eq!(
                r.total_bytes,
                r.pairs
                    .iter()
                    .map(|p| p.hp_bytes + p.lp_bytes + p.mv_bytes)
                    .sum::<u64>()
            );
        }
        assert_eq!(reports[0].pairs[0].mv_bytes, 0);
        assert!(reports[3].pairs[0].mv_bytes > 0);

        let mut csv = Vec::new();
        write_report_csv(&reports, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 1 + 8);
        assert!(text.lines().nth(1).unwrap().contains(",inf,0"));

        let mut json = Vec::new();
        write_report_json(&reports, &mut json).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(v[0]["mean_lp_psnr_db"], "inf");
    }

    #[test]
    fn trace_csv_is_padded() {
        let seq = static_sequence();
        let cfg = CompConfig::new(
            Method::Triangle,
            EstimationConfig::for_grid(8, crate::mesh::Topology::Triangle),
        );
        let reports = evaluate(&seq, &[cfg], &EvalOptions::default()).unwrap();
        let trace = reports[0].traces[0].as_ref().unwrap();
        let mut out = Vec::new();
        write_trace_csv(trace, 15, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 16);
    }
}
