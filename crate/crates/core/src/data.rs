//! Synthetic datasets, feature rescaling and CSV I/O.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64`, so generated files
//! are identical across platforms.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::encoding::{Label, LabeledSample};
use crate::error::{Error, Result};

/// Keeps the upper rescaling endpoint strictly below `2 pi`.
const RESCALE_GUARD: f64 = 4.0 * f64::EPSILON;

/// Per-feature affine map `x' = (x - offset) * scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaleRecord {
    pub offsets: Vec<f64>,
    pub scales: Vec<f64>,
}

impl RescaleRecord {
    pub fn identity(dim: usize) -> Self {
        Self { offsets: vec![0.0; dim], scales: vec![1.0; dim] }
    }

    pub fn is_identity(&self) -> bool {
        self.offsets.iter().all(|o| *o == 0.0) && self.scales.iter().all(|s| *s == 1.0)
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(self.offsets.iter().zip(&self.scales)).map(|(v, (o, s))| (v - o) * s).collect()
    }

    pub fn inverse(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(self.offsets.iter().zip(&self.scales)).map(|(v, (o, s))| v / s + o).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub samples: Vec<LabeledSample>,
    pub feature_dim: usize,
    pub rescale: RescaleRecord,
}

impl Dataset {
    pub fn new(samples: Vec<LabeledSample>) -> Result<Self> {
        let feature_dim = samples.first().map(|s| s.x.len()).ok_or_else(|| Error::Data("dataset is empty".into()))?;
        if feature_dim == 0 {
            return Err(Error::Data("samples have no features".into()));
        }
        if let Some(i) = samples.iter().position(|s| s.x.len() != feature_dim) {
            return Err(Error::Data(format!("sample {i} has {} features, expected {feature_dim}", samples[i].x.len())));
        }
        Ok(Self { samples, feature_dim, rescale: RescaleRecord::identity(feature_dim) })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.samples.iter().filter(|s| s.label == Some(label)).count()
    }

    /// Training splits need labels on every sample and both classes present.
    pub fn check_training(&self) -> Result<()> {
        if let Some(i) = self.samples.iter().position(|s| s.label.is_none()) {
            return Err(Error::Data(format!("training sample {i} has no label")));
        }
        if self.count(Label::Plus) == 0 || self.count(Label::Minus) == 0 {
            return Err(Error::Data("training set must contain both classes".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.x.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    TwoBlobs,
    AnnulusVsCore,
    CustomCsv,
}

/// Dataset generator settings. Geometry fields not used by `kind` are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n_train_per_class: usize,
    pub n_test_per_class: usize,
    pub seed: u64,
    /// Class `+1` blob center.
    pub center_plus: [f64; 2],
    /// Class `-1` blob center.
    pub center_minus: [f64; 2],
    /// Per-coordinate standard deviation of both blobs.
    pub spread: f64,
    /// Annulus geometry: center, core radius (class `+1`), ring radii (class `-1`).
    pub annulus_center: [f64; 2],
    pub core_radius: f64,
    pub ring_inner: f64,
    pub ring_outer: f64,
    /// Samples are confined to `[box_low, box_high)` per coordinate.
    pub box_low: f64,
    pub box_high: f64,
    pub train_path: Option<PathBuf>,
    pub test_path: Option<PathBuf>,
}

pub const DEFAULT_CENTER_PLUS: [f64; 2] = [4.58, 4.94];
pub const DEFAULT_CENTER_MINUS: [f64; 2] = [4.91, 3.21];
pub const DEFAULT_SPREAD: f64 = 0.1;

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            kind: GeneratorKind::TwoBlobs,
            n_train_per_class: 400,
            n_test_per_class: 40,
            seed: 0,
            center_plus: DEFAULT_CENTER_PLUS,
            center_minus: DEFAULT_CENTER_MINUS,
            spread: DEFAULT_SPREAD,
            annulus_center: [std::f64::consts::PI; 2],
            core_radius: 1.0,
            ring_inner: 1.8,
            ring_outer: 2.8,
            box_low: 0.0,
            box_high: TAU,
            train_path: None,
            test_path: None,
        }
    }
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_train_per_class == 0 || self.n_test_per_class == 0 {
            return Err(Error::Generator("per-class counts must be at least 1".into()));
        }
        if !(self.box_high > self.box_low) {
            return Err(Error::Generator(format!("empty box [{}, {})", self.box_low, self.box_high)));
        }
        match self.kind {
            GeneratorKind::TwoBlobs => {
                if !(self.spread > 0.0) || !self.spread.is_finite() {
                    return Err(Error::Generator(format!("blob spread must be positive, got {}", self.spread)));
                }
            }
            GeneratorKind::AnnulusVsCore => {
                if !(self.core_radius > 0.0 && self.ring_outer > self.ring_inner && self.ring_inner >= self.core_radius)
                {
                    return Err(Error::Generator(format!(
                        "need 0 < core_radius <= ring_inner < ring_outer, got {}, {}, {}",
                        self.core_radius, self.ring_inner, self.ring_outer
                    )));
                }
            }
            GeneratorKind::CustomCsv => {
                if self.train_path.is_none() || self.test_path.is_none() {
                    return Err(Error::Generator("custom_csv needs train_path and test_path".into()));
                }
            }
        }
        Ok(())
    }
}

/// Draws `(train, test)` splits. Each split holds the `+1` samples followed
/// by the `-1` samples.
pub fn generate(spec: &GeneratorSpec) -> Result<(Dataset, Dataset)> {
    spec.validate()?;
    if spec.kind == GeneratorKind::CustomCsv {
        let train = read_csv(spec.train_path.as_ref().expect("validated"))?;
        let test = read_csv(spec.test_path.as_ref().expect("validated"))?;
        return Ok((train, test));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let train = draw_split(spec, spec.n_train_per_class, &mut rng)?;
    let test = draw_split(spec, spec.n_test_per_class, &mut rng)?;
    Ok((train, test))
}

fn draw_split(spec: &GeneratorSpec, per_class: usize, rng: &mut ChaCha8Rng) -> Result<Dataset> {
    let mut samples = Vec::with_capacity(2 * per_class);
    for label in [Label::Plus, Label::Minus] {
        let mut accepted = 0;
        let mut attempts = 0usize;
        while accepted < per_class {
            attempts += 1;
            if attempts > 1000 * per_class + 1000 {
                return Err(Error::Generator(format!(
                    "class {label} keeps falling outside the box [{}, {})",
                    spec.box_low, spec.box_high
                )));
            }
            let x = draw_point(spec, label, rng)?;
            if x.iter().all(|v| *v >= spec.box_low && *v < spec.box_high) {
                samples.push(LabeledSample::new(x.to_vec(), label));
                accepted += 1;
            }
        }
    }
    Dataset::new(samples)
}

fn draw_point(spec: &GeneratorSpec, label: Label, rng: &mut ChaCha8Rng) -> Result<[f64; 2]> {
    match spec.kind {
        GeneratorKind::TwoBlobs => {
            let center = if label == Label::Plus { spec.center_plus } else { spec.center_minus };
            let mut x = [0.0; 2];
            for (v, c) in x.iter_mut().zip(center) {
                *v = Normal::new(c, spec.spread).map_err(|e| Error::Generator(e.to_string()))?.sample(rng);
            }
            Ok(x)
        }
        GeneratorKind::AnnulusVsCore => {
            // Area-uniform radius within the core disc or the ring.
            let (r_in, r_out) =
                if label == Label::Plus { (0.0, spec.core_radius) } else { (spec.ring_inner, spec.ring_outer) };
            let u: f64 = rng.random();
            let r = (r_in * r_in + u * (r_out * r_out - r_in * r_in)).sqrt();
            let phi = rng.random::<f64>() * TAU;
            Ok([spec.annulus_center[0] + r * phi.cos(), spec.annulus_center[1] + r * phi.sin()])
        }
        GeneratorKind::CustomCsv => unreachable!("custom datasets are read, not drawn"),
    }
}

/// Min-max rescaling of a training split onto `[0, 2 pi)`.
pub fn rescale(train: &Dataset) -> Result<Dataset> {
    if train.is_empty() {
        return Err(Error::Rescale("cannot rescale an empty dataset".into()));
    }
    let d = train.feature_dim;
    let mut offsets = Vec::with_capacity(d);
    let mut scales = Vec::with_capacity(d);
    for j in 0..d {
        let (lo, hi) = train
            .samples
            .iter()
            .map(|s| s.x[j])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if !(hi > lo) {
            return Err(Error::Rescale(format!("feature {} is constant ({lo})", j + 1)));
        }
        offsets.push(lo);
        scales.push(TAU * (1.0 - RESCALE_GUARD) / (hi - lo));
    }
    apply_rescale(train, &RescaleRecord { offsets, scales })
}

/// Maps a split with a record computed on the training split. Values that
/// land outside `[0, 2 pi)` (possible for test data) are clamped into range.
pub fn apply_rescale(data: &Dataset, record: &RescaleRecord) -> Result<Dataset> {
    if record.offsets.len() != data.feature_dim || record.scales.len() != data.feature_dim {
        return Err(Error::Rescale(format!(
            "record covers {} features, dataset has {}",
            record.offsets.len(),
            data.feature_dim
        )));
    }
    let upper = TAU * (1.0 - RESCALE_GUARD);
    let mut clamped = 0usize;
    let samples = data
        .samples
        .iter()
        .map(|s| {
            let x = record
                .forward(&s.x)
                .into_iter()
                .map(|v| {
                    if (0.0..=upper).contains(&v) {
                        v
                    } else {
                        clamped += 1;
                        v.clamp(0.0, upper)
                    }
                })
                .collect();
            LabeledSample { x, label: s.label }
        })
        .collect();
    if clamped > 0 {
        log::warn!("{clamped} rescaled feature values fell outside [0, 2pi) and were clamped");
    }
    Ok(Dataset { samples, feature_dim: data.feature_dim, rescale: record.clone() })
}

/// Parses a label token: `+1`, `1`, `-1` or `−1` (U+2212).
pub fn parse_label(token: &str) -> Option<Label> {
    match token.trim() {
        "+1" | "1" => Some(Label::Plus),
        "-1" | "\u{2212}1" => Some(Label::Minus),
        _ => None,
    }
}

/// Shortest decimal text of `v` rounded to 12 significant digits.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{}", if v == 0.0 { 0.0 } else { v });
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    parse_csv(BufReader::new(file))
}

/// Dataset CSV: header `x1,...,xd,label`, one sample per row. An empty label
/// field marks an unlabeled point.
pub fn parse_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Parse { line: 1, message: e.to_string() })?.clone();
    if header.len() < 2 || header.get(header.len() - 1).map(str::trim) != Some("label") {
        return Err(Error::Parse { line: 1, message: "header must be x1,...,xd,label".into() });
    }
    let dim = header.len() - 1;
    let mut samples = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::Parse { line, message: e.to_string() }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != dim + 1 {
            return Err(Error::Parse { line, message: format!("expected {} fields, found {}", dim + 1, record.len()) });
        }
        let x = (0..dim)
            .map(|j| {
                let field = record[j].trim();
                field.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("invalid number {field:?} in column {}", j + 1),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let token = record[dim].trim();
        let label = if token.is_empty() {
            None
        } else {
            Some(parse_label(token).ok_or_else(|| Error::Data(format!("line {line}: unknown label token {token:?}")))?)
        };
        samples.push(LabeledSample { x, label });
    }
    if samples.is_empty() {
        return Err(Error::Data("dataset file has no samples".into()));
    }
    Dataset::new(samples)
}

pub fn write_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut out = BufWriter::new(file);
    write_csv_to(data, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_csv_to<W: Write>(data: &Dataset, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header: Vec<String> = (1..=data.feature_dim).map(|j| format!("x{j}")).collect();
    header.push("label".into());
    w.write_record(&header).map_err(csv_io)?;
    for s in &data.samples {
        let mut row: Vec<String> = s.x.iter().map(|v| format_sig12(*v)).collect();
        row.push(s.label.map(|l| l.to_string()).unwrap_or_default());
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
