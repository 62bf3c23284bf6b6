//! Clip-level width aggregates and per-instrument valence thresholds.
//!
//! Widths come from [`SegmentReport`]s (one per analysed segment). A clip's
//! complexity is the mean of its valid segment widths; each instrument gets a
//! midpoint threshold between its positive- and negative-valence class means,
//! with an orientation learned from the data, since instruments disagree on
//! which class sits higher.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mfdfa::{self, Analysis};
use crate::signal_io::{ClipMetadata, Instrument, Valence};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("clip '{0}' has no segment with a valid width")]
    NoValidSegments(String),
    #[error("instrument {0} needs both positive and negative clips")]
    SingleClassOnly(Instrument),
    #[error("raga '{0}' is played by a single artist")]
    SingleArtist(String),
    #[error("style comparison needs one raga, found: {0}")]
    MixedRagas(String),
    #[error("clip '{clip_id}' repeats segment {segment_index}")]
    DuplicateSegment { clip_id: String, segment_index: usize },
    #[error("no reports")]
    Empty,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv: {0}")]
    CsvWrite(String),
}

/// Features of one analysed segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub clip_id: String,
    pub metadata: ClipMetadata,
    pub segment_index: usize,
    /// Quadratic-fit width; `None` when the fit was unusable.
    #[serde(rename = "width_W")]
    pub width_w: Option<f64>,
    pub width_direct: f64,
    pub h2: f64,
    pub alpha0: f64,
    #[serde(rename = "asymmetry_B")]
    pub asymmetry_b: Option<f64>,
    pub quality_flags: BTreeSet<String>,
}

impl SegmentReport {
    pub fn from_analysis(clip_id: &str, metadata: &ClipMetadata, segment_index: usize, a: &Analysis) -> Self {
        Self {
            clip_id: clip_id.to_string(),
            metadata: metadata.clone(),
            segment_index,
            width_w: a.spectrum.width_w,
            width_direct: a.spectrum.width_direct,
            h2: a.h2(),
            alpha0: a.spectrum.alpha0,
            asymmetry_b: a.spectrum.asymmetry_b(),
            quality_flags: a.flags.clone(),
        }
    }

    /// Width usable for aggregation.
    pub fn valid_width(&self) -> Option<f64> {
        if self.quality_flags.contains(mfdfa::flags::WIDTH_INVALID) {
            return None;
        }
        self.width_w.filter(|w| w.is_finite() && *w >= 0.0)
    }
}

/// Flat CSV form of [`SegmentReport`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SegmentRecord {
    clip_id: String,
    raga: String,
    artist: String,
    instrument: Instrument,
    valence: Valence,
    segment_index: usize,
    #[serde(rename = "width_W")]
    width_w: Option<f64>,
    width_direct: f64,
    h2: f64,
    alpha0: f64,
    #[serde(rename = "asymmetry_B")]
    asymmetry_b: Option<f64>,
    quality_flags: String,
}

impl From<&SegmentReport> for SegmentRecord {
    fn from(r: &SegmentReport) -> Self {
        Self {
            clip_id: r.clip_id.clone(),
            raga: r.metadata.raga.clone(),
            artist: r.metadata.artist.clone(),
            instrument: r.metadata.instrument,
            valence: r.metadata.valence,
            segment_index: r.segment_index,
            width_w: r.width_w,
            width_direct: r.width_direct,
            h2: r.h2,
            alpha0: r.alpha0,
            asymmetry_b: r.asymmetry_b,
            quality_flags: r.quality_flags.iter().cloned().collect::<Vec<_>>().join(";"),
        }
    }
}

impl From<SegmentRecord> for SegmentReport {
    fn from(r: SegmentRecord) -> Self {
        Self {
            clip_id: r.clip_id,
            metadata: ClipMetadata {
                raga: r.raga,
                artist: r.artist,
                instrument: r.instrument,
                valence: r.valence,
            },
            segment_index: r.segment_index,
            width_w: r.width_w,
            width_direct: r.width_direct,
            h2: r.h2,
            alpha0: r.alpha0,
            asymmetry_b: r.asymmetry_b,
            quality_flags: r
                .quality_flags
                .split(';')
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
        }
    }
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>, PipelineError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|e| PipelineError::CsvWrite(e.to_string()))?;
    writer.into_inner().map_err(|e| PipelineError::CsvWrite(e.to_string()))
}

pub fn write_reports_csv(reports: &[SegmentReport], mut out: impl Write) -> Result<(), PipelineError> {
    let bytes = csv_bytes(reports.iter().map(SegmentRecord::from))?;
    out.write_all(&bytes)
        .map_err(|e| PipelineError::CsvWrite(e.to_string()))
}

pub fn read_reports_csv(input: impl Read) -> Result<Vec<SegmentReport>, PipelineError> {
    let mut reader = csv::Reader::from_reader(input);
    reader
        .deserialize::<SegmentRecord>()
        .map(|r| r.map(SegmentReport::from).map_err(PipelineError::from))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipAggregate {
    pub clip_id: String,
    pub metadata: ClipMetadata,
    pub mean_width: f64,
    /// Valid widths in segment order.
    pub per_segment_widths: Vec<f64>,
    pub width_range: (f64, f64),
    pub excluded_segments: usize,
}

/// `aggregates.csv` row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRecord {
    pub clip_id: String,
    pub raga: String,
    pub artist: String,
    pub instrument: Instrument,
    pub valence: Valence,
    pub mean_width: f64,
}

impl From<&ClipAggregate> for AggregateRecord {
    fn from(a: &ClipAggregate) -> Self {
        Self {
            clip_id: a.clip_id.clone(),
            raga: a.metadata.raga.clone(),
            artist: a.metadata.artist.clone(),
            instrument: a.metadata.instrument,
            valence: a.metadata.valence,
            mean_width: a.mean_width,
        }
    }
}

pub fn write_aggregates_csv(aggs: &[ClipAggregate], mut out: impl Write) -> Result<(), PipelineError> {
    let bytes = csv_bytes(aggs.iter().map(AggregateRecord::from))?;
    out.write_all(&bytes)
        .map_err(|e| PipelineError::CsvWrite(e.to_string()))
}

pub fn read_aggregates_csv(input: impl Read) -> Result<Vec<AggregateRecord>, PipelineError> {
    let mut reader = csv::Reader::from_reader(input);
    reader.deserialize().map(|r| r.map_err(PipelineError::from)).collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Per-clip mean of valid segment widths, ordered by clip id.
pub fn aggregate(reports: &[SegmentReport]) -> Result<Vec<ClipAggregate>, PipelineError> {
    if reports.is_empty() {
        return Err(PipelineError::Empty);
    }
    let mut by_clip: BTreeMap<&str, Vec<&SegmentReport>> = BTreeMap::new();
    for r in reports {
        by_clip.entry(r.clip_id.as_str()).or_default().push(r);
    }
    by_clip
        .into_iter()
        .map(|(clip_id, mut segs)| {
            segs.sort_by_key(|r| r.segment_index);
            if let Some(w) = segs.windows(2).find(|w| w[0].segment_index == w[1].segment_index) {
                return Err(PipelineError::DuplicateSegment {
                    clip_id: clip_id.to_string(),
                    segment_index: w[0].segment_index,
                });
            }
            let widths: Vec<f64> = segs.iter().filter_map(|r| r.valid_width()).collect();
            if widths.is_empty() {
                return Err(PipelineError::NoValidSegments(clip_id.to_string()));
            }
            let lo = widths.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = widths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(ClipAggregate {
                clip_id: clip_id.to_string(),
                metadata: segs[0].metadata.clone(),
                mean_width: mean(&widths),
                excluded_segments: segs.len() - widths.len(),
                per_segment_widths: widths,
                width_range: (lo, hi),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    PositiveHigher,
    PositiveLower,
}

/// Decision rule for one instrument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstrumentThreshold {
    pub instrument: Instrument,
    pub orientation: Orientation,
    pub threshold: f64,
    /// Gap between the class extremes; negative when the classes overlap.
    pub margin: f64,
    pub overlap: bool,
    pub positive_mean: f64,
    pub negative_mean: f64,
    /// Smallest width of the class lying above the threshold.
    pub higher_class_min: f64,
    /// Largest width of the class lying below the threshold.
    pub lower_class_max: f64,
    pub n_positive: usize,
    pub n_negative: usize,
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Midpoint threshold between the class means of one instrument.
///
/// Widths are sorted before summing, so the result does not depend on the
/// order of `aggregates`.
pub fn learn_threshold(
    aggregates: &[ClipAggregate],
    instrument: Instrument,
) -> Result<InstrumentThreshold, PipelineError> {
    let class = |valence| {
        sorted(
            aggregates
                .iter()
                .filter(|a| a.metadata.instrument == instrument && a.metadata.valence == valence)
                .map(|a| a.mean_width)
                .collect(),
        )
    };
    let positive = class(Valence::Positive);
    let negative = class(Valence::Negative);
    if positive.is_empty() || negative.is_empty() {
        return Err(PipelineError::SingleClassOnly(instrument));
    }
    let positive_mean = mean(&positive);
    let negative_mean = mean(&negative);
    let orientation = if positive_mean >= negative_mean {
        Orientation::PositiveHigher
    } else {
        Orientation::PositiveLower
    };
    let (higher, lower) = match orientation {
        Orientation::PositiveHigher => (&positive, &negative),
        Orientation::PositiveLower => (&negative, &positive),
    };
    let higher_class_min = higher[0];
    let lower_class_max = *lower.last().expect("non-empty class");
    let margin = higher_class_min - lower_class_max;
    Ok(InstrumentThreshold {
        instrument,
        orientation,
        threshold: 0.5 * (positive_mean + negative_mean),
        margin,
        overlap: margin < 0.0,
        positive_mean,
        negative_mean,
        higher_class_min,
        lower_class_max,
        n_positive: positive.len(),
        n_negative: negative.len(),
    })
}

/// Smallest margin used as the confidence denominator.
pub const CONFIDENCE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: Valence,
    pub confidence: f64,
    pub ambiguous: bool,
}

/// Labels a width against a threshold. A width exactly on the threshold is
/// negative for either orientation.
pub fn classify(width: f64, t: &InstrumentThreshold) -> Classification {
    let positive = match t.orientation {
        Orientation::PositiveHigher => width > t.threshold,
        Orientation::PositiveLower => width < t.threshold,
    };
    let confidence = ((width - t.threshold).abs() / t.margin.max(CONFIDENCE_EPSILON)).min(1.0);
    let ambiguous = t.overlap && width >= t.higher_class_min && width <= t.lower_class_max;
    Classification {
        label: if positive { Valence::Positive } else { Valence::Negative },
        confidence,
        ambiguous,
    }
}

/// `classified.csv` row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedRecord {
    pub clip_id: String,
    pub label: Valence,
    pub confidence: f64,
    pub ambiguous: bool,
}

pub fn write_classified_csv(rows: &[ClassifiedRecord], mut out: impl Write) -> Result<(), PipelineError> {
    let bytes = csv_bytes(rows)?;
    out.write_all(&bytes)
        .map_err(|e| PipelineError::CsvWrite(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentDeviation {
    pub segment_index: usize,
    pub width: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtistDeviation {
    pub artist: String,
    pub deviations: Vec<SegmentDeviation>,
    /// Largest absolute deviation from the cross-artist segment mean.
    pub improvisation_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyleProfile {
    pub raga: String,
    /// Cross-artist mean width per segment index.
    pub segment_means: BTreeMap<usize, f64>,
    pub artists: Vec<ArtistDeviation>,
}

/// How far each artist's segment widths stray from the cross-artist mean
/// for one raga.
pub fn style_variation(reports: &[SegmentReport]) -> Result<StyleProfile, PipelineError> {
    let first = reports.first().ok_or(PipelineError::Empty)?;
    let ragas: BTreeSet<&str> = reports.iter().map(|r| r.metadata.raga.as_str()).collect();
    if ragas.len() > 1 {
        return Err(PipelineError::MixedRagas(
            ragas.into_iter().collect::<Vec<_>>().join(", "),
        ));
    }
    let raga = first.metadata.raga.clone();

    // artist -> segment -> widths
    let mut table: BTreeMap<&str, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for r in reports {
        if let Some(w) = r.valid_width() {
            table
                .entry(r.metadata.artist.as_str())
                .or_default()
                .entry(r.segment_index)
                .or_default()
                .push(w);
        }
    }
    if table.len() < 2 {
        return Err(PipelineError::SingleArtist(raga));
    }
    let per_artist: BTreeMap<&str, BTreeMap<usize, f64>> = table
        .into_iter()
        .map(|(artist, segs)| (artist, segs.into_iter().map(|(i, ws)| (i, mean(&ws))).collect()))
        .collect();

    let mut columns: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for segs in per_artist.values() {
        for (&i, &w) in segs {
            columns.entry(i).or_default().push(w);
        }
    }
    let segment_means: BTreeMap<usize, f64> = columns.into_iter().map(|(i, ws)| (i, mean(&ws))).collect();

    let artists = per_artist
        .into_iter()
        .map(|(artist, segs)| {
            let deviations: Vec<SegmentDeviation> = segs
                .into_iter()
                .map(|(i, w)| SegmentDeviation {
                    segment_index: i,
                    width: w,
                    deviation: w - segment_means[&i],
                })
                .collect();
            let improvisation_score = deviations.iter().map(|d| d.deviation.abs()).fold(0.0, f64::max);
            ArtistDeviation {
                artist: artist.to_string(),
                deviations,
                improvisation_score,
            }
        })
        .collect();
    Ok(StyleProfile {
        raga,
        segment_means,
        artists,
    })
}
