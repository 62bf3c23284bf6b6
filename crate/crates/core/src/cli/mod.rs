//! Implementations behind the `mfspec` subcommands.
//!
//! Commands collect per-item failures instead of stopping at the first one;
//! the binary exits non-zero when any were collected.

mod config;
mod fsutil;
mod report;
pub mod svg;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use rayon::prelude::*;
use serde::Serialize;

use crate::emotion::{self, ClassifiedRecord, InstrumentThreshold, SegmentReport};
use crate::mfdfa::{self, AnalysisConfig};
use crate::signal_io::{self, Instrument, LabeledClip, SampleFormat, TimeSeries};
use crate::synthgen::{self, CascadeParams};

pub use config::RunConfig;
pub use fsutil::{slug, write_atomic, write_json};
pub use report::{cmd_report, ReportOutcome};

pub const SEGMENTS_CSV: &str = "segments.csv";
pub const SEGMENTS_JSON: &str = "segments.json";
pub const RUN_JSON: &str = "run.json";
pub const ERRORS_JSON: &str = "errors.json";
pub const AGGREGATES_CSV: &str = "aggregates.csv";
pub const THRESHOLDS_JSON: &str = "thresholds.json";
pub const CLASSIFIED_CSV: &str = "classified.csv";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemError {
    pub item: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct AnalyzeOutcome {
    pub reports: Vec<SegmentReport>,
    pub errors: Vec<ItemError>,
}

struct ClipResult {
    reports: Vec<SegmentReport>,
    exports: Vec<(PathBuf, String)>,
}

fn analyze_clip(clip: &LabeledClip, config: &AnalysisConfig, run: &RunConfig) -> anyhow::Result<ClipResult> {
    let ts = signal_io::load_wav(&clip.path)?;
    let seg = signal_io::segment(&ts, run.segment_seconds)?;
    if seg.segments.is_empty() {
        bail!(
            "clip is {:.3} s long, shorter than one {} s segment",
            ts.duration().unwrap_or(0.0),
            run.segment_seconds
        );
    }
    let mut reports = Vec::with_capacity(seg.segments.len());
    let mut exports = Vec::new();
    for (i, segment) in seg.segments.iter().enumerate() {
        let analysis = mfdfa::analyze(segment, config).with_context(|| format!("segment {i}"))?;
        if run.emit_plots {
            let dir = PathBuf::from("plots").join(&clip.clip_id);
            exports.push((dir.join(format!("seg{i}_surface.csv")), analysis.surface.to_csv()));
            exports.push((dir.join(format!("seg{i}_hurst.csv")), analysis.hurst.to_csv()));
            exports.push((dir.join(format!("seg{i}_spectrum.csv")), analysis.spectrum.to_csv()));
        }
        reports.push(SegmentReport::from_analysis(
            &clip.clip_id,
            &clip.metadata,
            i,
            &analysis,
        ));
    }
    Ok(ClipResult { reports, exports })
}

fn resolve_manifest(manifest: &Path) -> anyhow::Result<Vec<LabeledClip>> {
    let base = manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut clips = signal_io::read_labels(manifest)?;
    for clip in &mut clips {
        if clip.path.is_relative() {
            clip.path = base.join(&clip.path);
        }
    }
    Ok(clips)
}

/// `mfspec analyze`: segment every manifest clip and analyse each segment.
pub fn cmd_analyze(run: &RunConfig, out: &Path) -> anyhow::Result<AnalyzeOutcome> {
    let manifest = run
        .manifest
        .as_deref()
        .ok_or_else(|| anyhow!("no inputs: no manifest given"))?;
    let config = run.analysis_config()?;
    let clips = resolve_manifest(manifest)?;
    if clips.is_empty() {
        bail!("no inputs: manifest {} lists no clips", manifest.display());
    }
    let mut seen = BTreeSet::new();
    for clip in &clips {
        if !seen.insert(clip.clip_id.as_str()) {
            bail!("duplicate clip id '{}' in manifest", clip.clip_id);
        }
    }

    let results: Vec<anyhow::Result<ClipResult>> = clips.par_iter().map(|c| analyze_clip(c, &config, run)).collect();

    let mut reports = Vec::new();
    let mut errors = Vec::new();
    let mut exports = Vec::new();
    for (clip, result) in clips.iter().zip(results) {
        match result {
            Ok(r) => {
                reports.extend(r.reports);
                exports.extend(r.exports);
            }
            Err(e) => {
                log::error!("{}: {e:#}", clip.clip_id);
                errors.push(ItemError {
                    item: clip.clip_id.clone(),
                    message: format!("{e:#}"),
                });
            }
        }
    }

    let mut csv = Vec::new();
    emotion::write_reports_csv(&reports, &mut csv)?;
    write_atomic(&out.join(SEGMENTS_CSV), &csv)?;
    write_json(&out.join(SEGMENTS_JSON), &reports)?;
    write_atomic(&out.join(RUN_JSON), run.to_json().as_bytes())?;
    write_json(&out.join(ERRORS_JSON), &errors)?;
    for (rel, text) in exports {
        write_atomic(&out.join(rel), text.as_bytes())?;
    }
    Ok(AnalyzeOutcome { reports, errors })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SynthKind {
    White,
    Fgn,
    Cascade,
    Shuffle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthParams {
    pub kind: SynthKind,
    pub n: Option<usize>,
    pub h: Option<f64>,
    pub k: Option<u32>,
    pub a: Option<f64>,
    pub seed: u64,
    pub input: Option<PathBuf>,
    pub rate: u32,
}

impl SynthParams {
    pub fn new(kind: SynthKind) -> Self {
        Self {
            kind,
            n: None,
            h: None,
            k: None,
            a: None,
            seed: 0,
            input: None,
            rate: 22_050,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct SynthSidecar<'a> {
    #[serde(flatten)]
    params: &'a SynthParams,
    samples: usize,
    format: &'static str,
    /// Factor applied before writing (WAV output is peak-limited to 1).
    gain: f64,
}

pub const DEFAULT_SYNTH_LEN: usize = 65_536;

/// Reads a single-column CSV series (an optional non-numeric header is skipped).
pub fn read_series_csv(path: &Path) -> anyhow::Result<TimeSeries> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => samples.push(v),
            Err(_) if i == 0 => {}
            Err(_) => bail!("{}:{}: not a number: '{field}'", path.display(), i + 1),
        }
    }
    Ok(TimeSeries::new(samples).labeled(signal_io::clip_id_for(path)))
}

pub fn series_to_csv(ts: &TimeSeries) -> String {
    let mut out = String::with_capacity(ts.len() * 20 + 6);
    out.push_str("value\n");
    for x in &ts.samples {
        out.push_str(&format!("{x}\n"));
    }
    out
}

fn is_wav(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav"))
}

/// `mfspec synth`: write a synthetic series as CSV or WAV plus a JSON sidecar.
pub fn cmd_synth(params: &SynthParams, out: &Path) -> anyhow::Result<TimeSeries> {
    let n = params.n.unwrap_or(DEFAULT_SYNTH_LEN);
    let ts = match params.kind {
        SynthKind::White => synthgen::white_noise(n, params.seed)?,
        SynthKind::Fgn => {
            let h = params.h.ok_or_else(|| anyhow!("fgn needs --h"))?;
            synthgen::fgn(n, h, params.seed)?
        }
        SynthKind::Cascade => {
            let cascade = CascadeParams::new(params.k.unwrap_or(16), params.a.unwrap_or(0.75))?;
            synthgen::binomial_cascade(cascade)
        }
        SynthKind::Shuffle => {
            let input = params
                .input
                .as_deref()
                .ok_or_else(|| anyhow!("shuffle needs --input"))?;
            let source = if is_wav(input) {
                signal_io::load_wav(input)?
            } else {
                read_series_csv(input)?
            };
            synthgen::shuffle(&source, params.seed)
        }
    };

    let (bytes, format, gain) = if is_wav(out) {
        let peak = ts.samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let gain = if peak > 1.0 { 1.0 / peak } else { 1.0 };
        let scaled = TimeSeries {
            samples: ts.samples.iter().map(|x| x * gain).collect(),
            sample_rate: Some(ts.sample_rate.unwrap_or(params.rate)),
            label: ts.label.clone(),
        };
        (signal_io::encode_wav(&scaled, SampleFormat::Float32)?, "wav_f32", gain)
    } else {
        (series_to_csv(&ts).into_bytes(), "csv", 1.0)
    };
    write_atomic(out, &bytes)?;
    let sidecar = SynthSidecar {
        params,
        samples: ts.len(),
        format,
        gain,
    };
    let mut sidecar_path = out.as_os_str().to_owned();
    sidecar_path.push(".json");
    write_json(Path::new(&sidecar_path), &sidecar)?;
    Ok(ts)
}

#[derive(Debug, Clone)]
pub struct ClassifyOutcome {
    pub thresholds: Vec<InstrumentThreshold>,
    pub classified: Vec<ClassifiedRecord>,
    pub errors: Vec<ItemError>,
}

/// `mfspec classify`: relabel reports, aggregate per clip, learn one
/// threshold per instrument and classify every clip mean.
pub fn cmd_classify(reports_dir: &Path, labels: &Path, out: &Path) -> anyhow::Result<ClassifyOutcome> {
    let reports_path = reports_dir.join(SEGMENTS_CSV);
    let file = std::fs::File::open(&reports_path).with_context(|| format!("opening {}", reports_path.display()))?;
    let mut reports = emotion::read_reports_csv(file)?;
    if reports.is_empty() {
        bail!("no inputs: {} has no segment reports", reports_path.display());
    }
    let label_map: BTreeMap<String, signal_io::ClipMetadata> = signal_io::read_labels(labels)?
        .into_iter()
        .map(|c| (c.clip_id, c.metadata))
        .collect();
    for r in &mut reports {
        let meta = label_map
            .get(&r.clip_id)
            .ok_or_else(|| anyhow!("UnlabeledClip: clip '{}' has no row in {}", r.clip_id, labels.display()))?;
        r.metadata = meta.clone();
    }

    let aggregates = emotion::aggregate(&reports)?;
    let instruments: BTreeSet<Instrument> = aggregates.iter().map(|a| a.metadata.instrument).collect();
    let mut thresholds = Vec::new();
    let mut errors = Vec::new();
    for instrument in instruments {
        match emotion::learn_threshold(&aggregates, instrument) {
            Ok(t) => thresholds.push(t),
            Err(e) => {
                log::warn!("{e}");
                errors.push(ItemError {
                    item: instrument.to_string(),
                    message: format!("SingleClassOnly: {e}"),
                });
            }
        }
    }
    let classified: Vec<ClassifiedRecord> = aggregates
        .iter()
        .filter_map(|a| {
            let t = thresholds.iter().find(|t| t.instrument == a.metadata.instrument)?;
            let c = emotion::classify(a.mean_width, t);
            Some(ClassifiedRecord {
                clip_id: a.clip_id.clone(),
                label: c.label,
                confidence: c.confidence,
                ambiguous: c.ambiguous,
            })
        })
        .collect();

    let mut buf = Vec::new();
    emotion::write_aggregates_csv(&aggregates, &mut buf)?;
    write_atomic(&out.join(AGGREGATES_CSV), &buf)?;
    write_json(&out.join(THRESHOLDS_JSON), &thresholds)?;
    let mut buf = Vec::new();
    emotion::write_classified_csv(&classified, &mut buf)?;
    write_atomic(&out.join(CLASSIFIED_CSV), &buf)?;
    Ok(ClassifyOutcome {
        thresholds,
        classified,
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synth_cascade_csv() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("c.csv");
        let mut p = SynthParams::new(SynthKind::Cascade);
        p.k = Some(10);
        cmd_synth(&p, &out).unwrap();
        let back = read_series_csv(&out).unwrap();
        assert_eq!(back.len(), 1024);
        assert!((back.samples.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let sidecar: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("c.csv.json")).unwrap()).unwrap();
        assert_eq!(sidecar["kind"], "cascade");
        assert_eq!(sidecar["k"], 10);
    }

    #[test]
    fn synth_validation() {
        let dir = tempfile::tempdir().unwrap();
        let mut p = SynthParams::new(SynthKind::White);
        p.n = Some(1);
        assert!(cmd_synth(&p, &dir.path().join("w.csv")).is_err());
        assert!(cmd_synth(&SynthParams::new(SynthKind::Fgn), &dir.path().join("f.csv")).is_err());
        assert!(cmd_synth(&SynthParams::new(SynthKind::Shuffle), &dir.path().join("s.csv")).is_err());
    }

    #[test]
    fn synth_wav_is_peak_limited() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("w.wav");
        let mut p = SynthParams::new(SynthKind::White);
        p.n = Some(4096);
        let ts = cmd_synth(&p, &out).unwrap();
        let wav = signal_io::load_wav(&out).unwrap();
        assert_eq!(wav.sample_rate, Some(22_050));
        let peak = ts.samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!((wav.samples.iter().fold(0.0f64, |m, x| m.max(x.abs())) - 1.0).abs() < 1e-6);
        assert!((wav.samples[7] - ts.samples[7] / peak).abs() < 1e-6);
    }

    #[test]
    fn shuffle_from_csv() {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("src.csv");
        std::fs::write(&src, "value\n1\n2\n3\n4\n").unwrap();
        let mut p = SynthParams::new(SynthKind::Shuffle);
        p.input = Some(src);
        p.seed = 5;
        let ts = cmd_synth(&p, &dir.path().join("s.csv")).unwrap();
        let mut sorted = ts.samples.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(sorted, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn analyze_without_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("clips.csv");
        std::fs::write(&manifest, "path,raga,artist,instrument,valence\n").unwrap();
        let run = RunConfig {
            manifest: Some(manifest),
            ..RunConfig::default()
        };
        let err = cmd_analyze(&run, &dir.path().join("out")).unwrap_err();
        assert!(err.to_string().contains("no inputs"));
        assert!(cmd_analyze(&RunConfig::default(), dir.path())
            .unwrap_err()
            .to_string()
            .contains("no inputs"));
    }
}
