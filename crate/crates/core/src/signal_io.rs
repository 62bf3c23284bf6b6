//! Audio ingestion: RIFF/WAVE decoding to a normalized mono [`TimeSeries`],
//! label/manifest CSV parsing, and fixed-duration segmentation.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),
    #[error("malformed WAV header: {0}")]
    MalformedHeader(String),
    #[error("non-finite sample at frame {0}")]
    NonFiniteSample(usize),
    #[error("series has no sample rate; cannot segment by seconds")]
    NoSampleRate,
    #[error("segment of {seconds} s at {sample_rate} Hz is shorter than 2 samples")]
    SegmentTooShort { seconds: f64, sample_rate: u32 },
    #[error("label file {path}: {message}")]
    InvalidLabels { path: PathBuf, message: String },
}

/// A sampled signal. Audio-derived series are mono and normalized to [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub samples: Vec<f64>,
    /// Samples per second; `None` for abstract (synthetic) series.
    pub sample_rate: Option<u32>,
    pub label: Option<String>,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>) -> Self {
        Self {
            samples,
            sample_rate: None,
            label: None,
        }
    }

    pub fn with_rate(samples: Vec<f64>, sample_rate: u32) -> Self {
        Self {
            samples,
            sample_rate: Some(sample_rate),
            label: None,
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds, when a sample rate is known.
    pub fn duration(&self) -> Option<f64> {
        self.sample_rate.map(|rate| self.samples.len() as f64 / f64::from(rate))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Instrument {
    Sitar,
    Sarod,
    Flute,
    Other,
}

impl Instrument {
    pub fn as_str(&self) -> &'static str {
        match self {
            Instrument::Sitar => "sitar",
            Instrument::Sarod => "sarod",
            Instrument::Flute => "flute",
            Instrument::Other => "other",
        }
    }
}

impl fmt::Display for Instrument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Instrument {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sitar" => Ok(Instrument::Sitar),
            "sarod" => Ok(Instrument::Sarod),
            "flute" => Ok(Instrument::Flute),
            "other" | "" => Ok(Instrument::Other),
            other => Err(format!("unknown instrument '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Valence {
    Positive,
    Negative,
    #[default]
    Unlabeled,
}

impl Valence {
    pub fn as_str(&self) -> &'static str {
        match self {
            Valence::Positive => "positive",
            Valence::Negative => "negative",
            Valence::Unlabeled => "unlabeled",
        }
    }
}

impl fmt::Display for Valence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Valence {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" | "pos" => Ok(Valence::Positive),
            "negative" | "neg" => Ok(Valence::Negative),
            "unlabeled" | "" => Ok(Valence::Unlabeled),
            other => Err(format!("unknown valence '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClipMetadata {
    pub raga: String,
    pub artist: String,
    pub instrument: Instrument,
    #[serde(default)]
    pub valence: Valence,
}

/// One row of a manifest or label file.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledClip {
    pub path: PathBuf,
    pub clip_id: String,
    pub metadata: ClipMetadata,
}

/// Identifier of a clip: the file stem of its path.
pub fn clip_id_for(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}

pub const LABEL_HEADER: [&str; 5] = ["path", "raga", "artist", "instrument", "valence"];

/// Reads a `path,raga,artist,instrument,valence` CSV (header row required).
///
/// Relative paths are returned as written; callers resolve them.
pub fn read_labels(path: &Path) -> Result<Vec<LabeledClip>, SignalError> {
    let invalid = |message: String| SignalError::InvalidLabels {
        path: path.to_path_buf(),
        message,
    };
    if !path.exists() {
        return Err(SignalError::FileNotFound(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| invalid(e.to_string()))?;
    let headers = reader.headers().map_err(|e| invalid(e.to_string()))?.clone();
    let got: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    if got != LABEL_HEADER {
        return Err(invalid(format!(
            "expected header '{}', found '{}'",
            LABEL_HEADER.join(","),
            got.join(",")
        )));
    }

    let mut clips = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| invalid(e.to_string()))?;
        let field = |i: usize| record.get(i).unwrap_or("").to_string();
        let clip_path = PathBuf::from(field(0));
        if clip_path.as_os_str().is_empty() {
            return Err(invalid(format!("line {line}: empty path")));
        }
        let instrument = field(3).parse().map_err(|e| invalid(format!("line {line}: {e}")))?;
        let valence = field(4).parse().map_err(|e| invalid(format!("line {line}: {e}")))?;
        clips.push(LabeledClip {
            clip_id: clip_id_for(&clip_path),
            path: clip_path,
            metadata: ClipMetadata {
                raga: field(1),
                artist: field(2),
                instrument,
                valence,
            },
        });
    }
    Ok(clips)
}

const FORMAT_PCM: u16 = 0x0001;
const FORMAT_IEEE_FLOAT: u16 = 0x0003;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

#[derive(Debug, Clone, Copy)]
struct WavFormat {
    float: bool,
    channels: u16,
    sample_rate: u32,
    block_align: u16,
    bits: u16,
}

fn le_u16(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn le_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn parse_fmt(body: &[u8]) -> Result<WavFormat, SignalError> {
    if body.len() < 16 {
        return Err(SignalError::MalformedHeader(format!(
            "fmt chunk is {} bytes, need at least 16",
            body.len()
        )));
    }
    let mut tag = le_u16(body, 0);
    let channels = le_u16(body, 2);
    let sample_rate = le_u32(body, 4);
    let block_align = le_u16(body, 12);
    let bits = le_u16(body, 14);
    if tag == FORMAT_EXTENSIBLE {
        if body.len() < 40 {
            return Err(SignalError::MalformedHeader(
                "WAVE_FORMAT_EXTENSIBLE fmt chunk shorter than 40 bytes".into(),
            ));
        }
        // First two bytes of the sub-format GUID carry the format tag.
        tag = le_u16(body, 24);
    }
    let float = match tag {
        FORMAT_PCM => false,
        FORMAT_IEEE_FLOAT => true,
        other => {
            return Err(SignalError::UnsupportedFormat(format!(
                "format tag 0x{other:04X} (only integer PCM and IEEE float are decoded)"
            )))
        }
    };
    if channels == 0 {
        return Err(SignalError::MalformedHeader("zero channels".into()));
    }
    if sample_rate == 0 {
        return Err(SignalError::MalformedHeader("zero sample rate".into()));
    }
    let supported = if float {
        bits == 32
    } else {
        matches!(bits, 8 | 16 | 24 | 32)
    };
    if !supported {
        return Err(SignalError::UnsupportedFormat(format!(
            "{bits}-bit {} samples",
            if float { "float" } else { "integer" }
        )));
    }
    let expected_align = u32::from(channels) * u32::from(bits / 8);
    if u32::from(block_align) != expected_align {
        return Err(SignalError::MalformedHeader(format!(
            "block align {block_align} does not match {channels} channels x {bits} bits"
        )));
    }
    Ok(WavFormat {
        float,
        channels,
        sample_rate,
        block_align,
        bits,
    })
}

fn decode_sample(fmt: &WavFormat, b: &[u8]) -> f64 {
    if fmt.float {
        return f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]]));
    }
    match fmt.bits {
        8 => (f64::from(b[0]) - 128.0) / 128.0,
        16 => f64::from(i16::from_le_bytes([b[0], b[1]])) / 32_768.0,
        24 => {
            let v = i32::from_le_bytes([0, b[0], b[1], b[2]]) >> 8;
            f64::from(v) / 8_388_608.0
        }
        32 => f64::from(i32::from_le_bytes([b[0], b[1], b[2], b[3]])) / 2_147_483_648.0,
        _ => unreachable!("bit depth validated in parse_fmt"),
    }
}

/// Decodes an in-memory RIFF/WAVE image into a mono series.
pub fn decode_wav(bytes: &[u8]) -> Result<TimeSeries, SignalError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(SignalError::MalformedHeader("missing RIFF/WAVE signature".into()));
    }
    let mut fmt: Option<WavFormat> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = le_u32(bytes, pos + 4) as usize;
        let start = pos + 8;
        let available = bytes.len() - start;
        match id {
            b"fmt " => {
                if size > available {
                    return Err(SignalError::MalformedHeader("truncated fmt chunk".into()));
                }
                fmt = Some(parse_fmt(&bytes[start..start + size])?);
            }
            b"data" => {
                if fmt.is_none() {
                    return Err(SignalError::MalformedHeader("data chunk precedes fmt chunk".into()));
                }
                if size > available {
                    log::warn!("data chunk declares {size} bytes, only {available} present");
                }
                data = Some(&bytes[start..start + size.min(available)]);
                break;
            }
            _ => {}
        }
        // Chunks are word aligned.
        pos = start.saturating_add(size).saturating_add(size & 1);
    }
    let fmt = fmt.ok_or_else(|| SignalError::MalformedHeader("no fmt chunk".into()))?;
    let data = data.ok_or_else(|| SignalError::MalformedHeader("no data chunk".into()))?;

    let frame_bytes = usize::from(fmt.block_align);
    let width = usize::from(fmt.bits / 8);
    let channels = usize::from(fmt.channels);
    let mut samples = Vec::with_capacity(data.len() / frame_bytes);
    for (index, frame) in data.chunks_exact(frame_bytes).enumerate() {
        let sum: f64 = frame.chunks_exact(width).map(|b| decode_sample(&fmt, b)).sum();
        let value = sum / channels as f64;
        if !value.is_finite() {
            return Err(SignalError::NonFiniteSample(index));
        }
        samples.push(value.clamp(-1.0, 1.0));
    }
    Ok(TimeSeries::with_rate(samples, fmt.sample_rate))
}

/// Loads a WAV file; multichannel audio is mixed down by the channel mean.
pub fn load_wav(path: &Path) -> Result<TimeSeries, SignalError> {
    let bytes = std::fs::read(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            SignalError::FileNotFound(path.to_path_buf())
        } else {
            SignalError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })?;
    let ts = decode_wav(&bytes)?;
    Ok(ts.labeled(clip_id_for(path)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    Pcm16,
    Float32,
}

/// Encodes a mono series as a canonical 44-byte-header WAV image.
///
/// 16-bit output scales by 32768 and saturates at the integer range, so any
/// series previously decoded from 16-bit PCM round-trips exactly.
pub fn encode_wav(ts: &TimeSeries, format: SampleFormat) -> Result<Vec<u8>, SignalError> {
    let rate = ts.sample_rate.ok_or(SignalError::NoSampleRate)?;
    let (tag, bits): (u16, u16) = match format {
        SampleFormat::Pcm16 => (FORMAT_PCM, 16),
        SampleFormat::Float32 => (FORMAT_IEEE_FLOAT, 32),
    };
    let block_align = bits / 8;
    let data_len = ts.samples.len() * usize::from(block_align);
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&tag.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&(rate * u32::from(block_align)).to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&bits.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &x in &ts.samples {
        match format {
            SampleFormat::Pcm16 => {
                let v = (x * 32_768.0).round().clamp(-32_768.0, 32_767.0) as i16;
                out.extend_from_slice(&v.to_le_bytes());
            }
            SampleFormat::Float32 => out.extend_from_slice(&(x as f32).to_le_bytes()),
        }
    }
    Ok(out)
}

pub fn write_wav(path: &Path, ts: &TimeSeries, format: SampleFormat) -> Result<(), SignalError> {
    let bytes = encode_wav(ts, format)?;
    let io_err = |source| SignalError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    file.write_all(&bytes).map_err(io_err)?;
    Ok(())
}

/// Result of cutting a series into equal segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub segments: Vec<TimeSeries>,
    pub segment_len: usize,
    /// Trailing samples shorter than one segment; these are dropped, never padded.
    pub dropped_samples: usize,
}

/// Cuts `ts` into contiguous segments of `round(segment_seconds * rate)` samples.
pub fn segment(ts: &TimeSeries, segment_seconds: f64) -> Result<Segmentation, SignalError> {
    let rate = ts.sample_rate.ok_or(SignalError::NoSampleRate)?;
    let too_short = SignalError::SegmentTooShort {
        seconds: segment_seconds,
        sample_rate: rate,
    };
    if !segment_seconds.is_finite() || segment_seconds <= 0.0 {
        return Err(too_short);
    }
    let segment_len = (segment_seconds * f64::from(rate)).round() as usize;
    if segment_len < 2 {
        return Err(too_short);
    }
    let count = ts.samples.len() / segment_len;
    let dropped_samples = ts.samples.len() - count * segment_len;
    if dropped_samples > 0 {
        log::warn!(
            "{}: dropping {dropped_samples} trailing samples ({:.3} s) shorter than one segment",
            ts.label.as_deref().unwrap_or("series"),
            dropped_samples as f64 / f64::from(rate)
        );
    }
    let segments = ts
        .samples
        .chunks_exact(segment_len)
        .enumerate()
        .map(|(i, chunk)| TimeSeries {
            samples: chunk.to_vec(),
            sample_rate: Some(rate),
            label: ts.label.as_ref().map(|l| format!("{l}#{i}")),
        })
        .collect();
    Ok(Segmentation {
        segments,
        segment_len,
        dropped_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pcm16_image(channels: u16, rate: u32, frames: &[i16]) -> Vec<u8> {
        let data_len = frames.len() * 2;
        let mut out = Vec::new();
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
        out.extend_from_slice(b"WAVEfmt ");
        out.extend_from_slice(&16u32.to_le_bytes());
        out.extend_from_slice(&1u16.to_le_bytes());
        out.extend_from_slice(&channels.to_le_bytes());
        out.extend_from_slice(&rate.to_le_bytes());
        out.extend_from_slice(&(rate * 2 * u32::from(channels)).to_le_bytes());
        out.extend_from_slice(&(2 * channels).to_le_bytes());
        out.extend_from_slice(&16u16.to_le_bytes());
        out.extend_from_slice(b"data");
        out.extend_from_slice(&(data_len as u32).to_le_bytes());
        for v in frames {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    #[test]
    fn pcm16_scaling() {
        let ts = decode_wav(&pcm16_image(1, 22050, &[0, 16384, -32768])).unwrap();
        assert_eq!(ts.samples, vec![0.0, 0.5, -1.0]);
        assert_eq!(ts.sample_rate, Some(22050));
    }

    #[test]
    fn stereo_downmix_is_channel_mean() {
        // One frame: left = full scale, right = 0.
        let mut img = Vec::new();
        img.extend_from_slice(b"RIFF");
        img.extend_from_slice(&44u32.to_le_bytes());
        img.extend_from_slice(b"WAVEfmt ");
        img.extend_from_slice(&16u32.to_le_bytes());
        img.extend_from_slice(&3u16.to_le_bytes());
        img.extend_from_slice(&2u16.to_le_bytes());
        img.extend_from_slice(&8000u32.to_le_bytes());
        img.extend_from_slice(&64000u32.to_le_bytes());
        img.extend_from_slice(&8u16.to_le_bytes());
        img.extend_from_slice(&32u16.to_le_bytes());
        img.extend_from_slice(b"data");
        img.extend_from_slice(&8u32.to_le_bytes());
        img.extend_from_slice(&1.0f32.to_le_bytes());
        img.extend_from_slice(&0.0f32.to_le_bytes());
        let ts = decode_wav(&img).unwrap();
        assert_eq!(ts.samples, vec![0.5]);
    }

    #[test]
    fn other_bit_depths() {
        let fmt8 = WavFormat {
            float: false,
            channels: 1,
            sample_rate: 1,
            block_align: 1,
            bits: 8,
        };
        assert_eq!(decode_sample(&fmt8, &[0]), -1.0);
        assert_eq!(decode_sample(&fmt8, &[192]), 0.5);
        let fmt24 = WavFormat {
            bits: 24,
            block_align: 3,
            ..fmt8
        };
        assert_eq!(decode_sample(&fmt24, &[0, 0, 0x80]), -1.0);
        assert_eq!(decode_sample(&fmt24, &[0, 0, 0x40]), 0.5);
        let fmt32 = WavFormat {
            bits: 32,
            block_align: 4,
            ..fmt8
        };
        assert_eq!(decode_sample(&fmt32, &0x4000_0000i32.to_le_bytes()), 0.5);
    }

    #[test]
    fn skips_unknown_chunks_with_padding() {
        let plain = pcm16_image(1, 8000, &[100, -100]);
        let mut img = plain[..12].to_vec();
        img.extend_from_slice(b"LIST");
        img.extend_from_slice(&3u32.to_le_bytes());
        img.extend_from_slice(&[1, 2, 3, 0]);
        img.extend_from_slice(&plain[12..]);
        assert_eq!(decode_wav(&img).unwrap(), decode_wav(&plain).unwrap());
    }

    #[test]
    fn rejects_compressed_and_garbage() {
        let mut img = pcm16_image(1, 8000, &[0]);
        img[20] = 0x55; // MPEG layer 3 tag
        assert!(matches!(decode_wav(&img), Err(SignalError::UnsupportedFormat(_))));
        assert!(matches!(
            decode_wav(b"RIFX....WAVE"),
            Err(SignalError::MalformedHeader(_))
        ));
        let header_only = &pcm16_image(1, 8000, &[])[..36];
        assert!(matches!(decode_wav(header_only), Err(SignalError::MalformedHeader(_))));
    }

    #[test]
    fn missing_file() {
        let err = load_wav(Path::new("/nonexistent/clip.wav")).unwrap_err();
        assert!(matches!(err, SignalError::FileNotFound(_)));
    }

    #[test]
    fn three_minute_clip_length_and_segments() {
        let ts = TimeSeries::with_rate(vec![0.0; 180 * 22050], 22050);
        assert_eq!(ts.len(), 3_969_000);
        let seg = segment(&ts, 45.0).unwrap();
        assert_eq!(seg.segments.len(), 4);
        assert!(seg.segments.iter().all(|s| s.len() == 992_250));
        assert_eq!(seg.dropped_samples, 0);
    }

    #[test]
    fn remainder_is_dropped() {
        let ts = TimeSeries::with_rate(vec![0.0; 100 * 100], 100);
        let seg = segment(&ts, 45.0).unwrap();
        assert_eq!(seg.segments.len(), 2);
        assert_eq!(seg.dropped_samples, 10 * 100);

        let short = TimeSeries::with_rate(vec![0.0; 30 * 100], 100);
        let seg = segment(&short, 45.0).unwrap();
        assert!(seg.segments.is_empty());
        assert_eq!(seg.dropped_samples, 3000);
    }

    #[test]
    fn segment_errors() {
        assert!(matches!(
            segment(&TimeSeries::new(vec![1.0; 10]), 1.0),
            Err(SignalError::NoSampleRate)
        ));
        let ts = TimeSeries::with_rate(vec![0.0; 10], 1);
        assert!(matches!(segment(&ts, 1.0), Err(SignalError::SegmentTooShort { .. })));
        assert!(matches!(segment(&ts, -2.0), Err(SignalError::SegmentTooShort { .. })));
    }

    #[test]
    fn label_file_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.csv");
        std::fs::write(
            &path,
            "path,raga,artist,instrument,valence\nclips/a.wav,Yaman,Chaurasia,Flute,negative\nb.wav,Durga,X,sarod,\n",
        )
        .unwrap();
        let clips = read_labels(&path).unwrap();
        assert_eq!(clips.len(), 2);
        assert_eq!(clips[0].clip_id, "a");
        assert_eq!(clips[0].metadata.instrument, Instrument::Flute);
        assert_eq!(clips[0].metadata.valence, Valence::Negative);
        assert_eq!(clips[1].metadata.valence, Valence::Unlabeled);

        std::fs::write(&path, "a.wav,Yaman,X,flute,negative\n").unwrap();
        assert!(matches!(read_labels(&path), Err(SignalError::InvalidLabels { .. })));
    }

    proptest! {
        #[test]
        fn segments_concatenate_to_prefix(
            samples in proptest::collection::vec(-1.0f64..1.0, 2..400),
            rate in 1u32..50,
            seconds in 0.05f64..3.0,
        ) {
            let ts = TimeSeries::with_rate(samples.clone(), rate);
            if let Ok(seg) = segment(&ts, seconds) {
                let joined: Vec<f64> = seg.segments.iter().flat_map(|s| s.samples.iter().copied()).collect();
                prop_assert_eq!(&joined[..], &samples[..joined.len()]);
                prop_assert_eq!(joined.len() + seg.dropped_samples, samples.len());
            }
        }

        #[test]
        fn pcm16_round_trip(raw in proptest::collection::vec(any::<i16>(), 1..200)) {
            let img = pcm16_image(1, 22050, &raw);
            let loaded = decode_wav(&img).unwrap();
            let again = decode_wav(&encode_wav(&loaded, SampleFormat::Pcm16).unwrap()).unwrap();
            prop_assert_eq!(&loaded, &again);
            prop_assert_eq!(decode_wav(&img).unwrap(), loaded);
        }
    }
}
