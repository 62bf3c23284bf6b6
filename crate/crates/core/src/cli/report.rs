//! `mfspec report`: tables and SVG charts from an analyze/classify run.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};

use crate::emotion::{self, AggregateRecord, InstrumentThreshold, SegmentReport};
use crate::signal_io::Valence;

use super::svg::{Chart, Style};
use super::{slug, write_atomic, ItemError, AGGREGATES_CSV, SEGMENTS_CSV, THRESHOLDS_JSON};

#[derive(Debug, Clone, Default)]
pub struct ReportOutcome {
    pub written: Vec<PathBuf>,
    pub skipped: Vec<ItemError>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Valid segment widths, averaged per (artist, segment index).
fn raga_table(reports: &[&SegmentReport]) -> BTreeMap<String, BTreeMap<usize, f64>> {
    let mut acc: BTreeMap<String, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for r in reports {
        if let Some(w) = r.valid_width() {
            acc.entry(r.metadata.artist.clone())
                .or_default()
                .entry(r.segment_index)
                .or_default()
                .push(w);
        }
    }
    acc.into_iter()
        .map(|(a, segs)| (a, segs.into_iter().map(|(i, ws)| (i, mean(&ws))).collect()))
        .collect()
}

fn render_raga(raga: &str, reports: &[&SegmentReport]) -> (String, String) {
    let table = raga_table(reports);
    let artists: Vec<&String> = table.keys().collect();
    let segments: BTreeSet<usize> = table.values().flat_map(|s| s.keys().copied()).collect();

    let mut csv = String::from("segment_index");
    for a in &artists {
        csv.push(',');
        csv.push_str(&a.replace(',', " "));
    }
    csv.push('\n');
    for &i in &segments {
        let _ = write!(csv, "{i}");
        for a in &artists {
            let _ = write!(csv, ",{}", fmt_opt(table[*a].get(&i).copied()));
        }
        csv.push('\n');
    }

    let mut chart = Chart::new(
        &format!("Raga {raga}: spectral width per segment"),
        "segment",
        "width W",
    );
    chart = chart.x_ticks(segments.iter().map(|&i| (i as f64, (i + 1).to_string())).collect());
    for a in &artists {
        let pts = table[*a].iter().map(|(&i, &w)| (i as f64, w)).collect();
        chart = chart.series(a, pts, Style::Line);
    }
    (csv, chart.render())
}

/// Mean valid width per (artist, raga) over all clips and segments.
fn render_matrix(reports: &[SegmentReport]) -> (String, String) {
    let mut acc: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for r in reports {
        if let Some(w) = r.valid_width() {
            acc.entry((r.metadata.artist.clone(), r.metadata.raga.clone()))
                .or_default()
                .push(w);
        }
    }
    let ragas: BTreeSet<String> = reports.iter().map(|r| r.metadata.raga.clone()).collect();
    let artists: BTreeSet<String> = reports.iter().map(|r| r.metadata.artist.clone()).collect();
    let cell = |a: &String, g: &String| acc.get(&(a.clone(), g.clone())).map(|v| mean(v));

    let mut csv = String::from("artist");
    for g in &ragas {
        csv.push(',');
        csv.push_str(&g.replace(',', " "));
    }
    csv.push('\n');
    for a in &artists {
        csv.push_str(&a.replace(',', " "));
        for g in &ragas {
            let _ = write!(csv, ",{}", fmt_opt(cell(a, g)));
        }
        csv.push('\n');
    }

    let ticks: Vec<(f64, String)> = ragas.iter().enumerate().map(|(i, g)| (i as f64, g.clone())).collect();
    let mut chart = Chart::new("Mean width by artist and raga", "raga", "mean width W").x_ticks(ticks);
    for a in &artists {
        let pts = ragas
            .iter()
            .enumerate()
            .filter_map(|(i, g)| cell(a, g).map(|w| (i as f64, w)))
            .collect();
        chart = chart.series(a, pts, Style::Points);
    }
    (csv, chart.render())
}

fn render_threshold(t: &InstrumentThreshold, clips: &[&AggregateRecord]) -> (String, String) {
    let mut csv = String::from("clip_id,valence,mean_width\n");
    for c in clips {
        let _ = writeln!(csv, "{},{},{:.6}", c.clip_id, c.valence, c.mean_width);
    }
    let _ = writeln!(csv, "threshold,,{:.6}", t.threshold);

    let mut chart = Chart::new(&format!("{} threshold", t.instrument), "clip", "mean width W");
    for valence in [Valence::Positive, Valence::Negative] {
        let pts = clips
            .iter()
            .enumerate()
            .filter(|(_, c)| c.valence == valence)
            .map(|(i, c)| (i as f64, c.mean_width))
            .collect();
        chart = chart.series(&valence.to_string(), pts, Style::Points);
    }
    if t.overlap {
        chart = chart.band(t.higher_class_min, t.lower_class_max, "overlap");
    }
    chart = chart.hline(t.threshold, &format!("T = {:.3}", t.threshold));
    (csv, chart.render())
}

fn read_thresholds(run: &Path) -> anyhow::Result<Option<(Vec<InstrumentThreshold>, Vec<AggregateRecord>)>> {
    let tpath = run.join(THRESHOLDS_JSON);
    let apath = run.join(AGGREGATES_CSV);
    if !tpath.exists() || !apath.exists() {
        return Ok(None);
    }
    let thresholds: Vec<InstrumentThreshold> = serde_json::from_str(&std::fs::read_to_string(&tpath)?)
        .with_context(|| format!("parsing {}", tpath.display()))?;
    let aggregates = emotion::read_aggregates_csv(std::fs::File::open(&apath)?)?;
    Ok(Some((thresholds, aggregates)))
}

/// Writes everything under `<run>/report/`. Missing classification output
/// skips the threshold charts rather than failing.
pub fn cmd_report(run: &Path) -> anyhow::Result<ReportOutcome> {
    let seg_path = run.join(SEGMENTS_CSV);
    if !seg_path.exists() {
        bail!(
            "MissingArtifacts: {} not found; run `analyze` first",
            seg_path.display()
        );
    }
    let reports = emotion::read_reports_csv(std::fs::File::open(&seg_path)?)?;
    let out_dir = run.join("report");
    let mut outcome = ReportOutcome::default();
    let emit = |name: String, text: String, outcome: &mut ReportOutcome| -> anyhow::Result<()> {
        let path = out_dir.join(name);
        write_atomic(&path, text.as_bytes())?;
        outcome.written.push(path);
        Ok(())
    };

    let mut by_raga: BTreeMap<&str, Vec<&SegmentReport>> = BTreeMap::new();
    for r in &reports {
        by_raga.entry(r.metadata.raga.as_str()).or_default().push(r);
    }
    for (raga, rs) in &by_raga {
        let (csv, svg) = render_raga(raga, rs);
        let stem = format!("raga_{}", slug(raga));
        emit(format!("{stem}.csv"), csv, &mut outcome)?;
        emit(format!("{stem}.svg"), svg, &mut outcome)?;
    }
    let (csv, svg) = render_matrix(&reports);
    emit("artist_raga_matrix.csv".into(), csv, &mut outcome)?;
    emit("artist_raga_matrix.svg".into(), svg, &mut outcome)?;

    let mut summary = String::new();
    let excluded = reports.iter().filter(|r| r.valid_width().is_none()).count();
    let _ = writeln!(summary, "segments: {}", reports.len());
    let _ = writeln!(summary, "segments without a valid width: {excluded}");
    let _ = writeln!(summary, "ragas: {}", by_raga.len());

    match read_thresholds(run)? {
        Some((thresholds, aggregates)) => {
            let _ = writeln!(summary, "\nthresholds:");
            for t in &thresholds {
                let clips: Vec<&AggregateRecord> = aggregates.iter().filter(|a| a.instrument == t.instrument).collect();
                let (csv, svg) = render_threshold(t, &clips);
                let stem = format!("threshold_{}", t.instrument);
                emit(format!("{stem}.csv"), csv, &mut outcome)?;
                emit(format!("{stem}.svg"), svg, &mut outcome)?;
                let _ = writeln!(
                    summary,
                    "  {}: T = {:.4} ({:?}), positive mean {:.4}, negative mean {:.4}, margin {:.4}{}",
                    t.instrument,
                    t.threshold,
                    t.orientation,
                    t.positive_mean,
                    t.negative_mean,
                    t.margin,
                    if t.overlap { ", classes overlap" } else { "" }
                );
            }
        }
        None => {
            log::warn!(
                "no {THRESHOLDS_JSON}/{AGGREGATES_CSV} in {}; skipping threshold charts",
                run.display()
            );
            outcome.skipped.push(ItemError {
                item: "thresholds".into(),
                message: format!("{THRESHOLDS_JSON} or {AGGREGATES_CSV} missing; run `classify` first"),
            });
        }
    }

    let _ = writeln!(
        summary,
        "\nimprovisation scores (max |deviation| from the raga's segment mean):"
    );
    for (raga, rs) in &by_raga {
        let owned: Vec<SegmentReport> = rs.iter().map(|r| (*r).clone()).collect();
        match emotion::style_variation(&owned) {
            Ok(profile) => {
                for a in &profile.artists {
                    let _ = writeln!(summary, "  {raga} / {}: {:.4}", a.artist, a.improvisation_score);
                }
            }
            Err(e) => {
                let _ = writeln!(summary, "  {raga}: {e}");
            }
        }
    }
    emit("summary.txt".into(), summary, &mut outcome)?;
    Ok(outcome)
}
