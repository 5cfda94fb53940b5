//! Dataset statistics and a temporal-grounding scorer for external
//! predictions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::TimeInterval;
use crate::synth::{Answer, QaSample};

pub const DEFAULT_TIOU_THRESHOLDS: [f64; 3] = [0.3, 0.5, 0.7];

#[derive(Debug, Error, PartialEq)]
pub enum ProfileError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("prediction references unknown sample {0}")]
    UnknownSampleId(u64),
    #[error("more than one prediction for sample {0}")]
    DuplicatePrediction(u64),
    #[error("tIoU threshold {0} is outside (0, 1]")]
    InvalidThreshold(f64),
    #[error("line {line}: malformed prediction: {message}")]
    MalformedPrediction { line: usize, message: String },
}

/// Intersection over union of two inclusive frame intervals.
pub fn temporal_iou(a: &TimeInterval, b: &TimeInterval) -> f64 {
    let inter = a.intersection(b).map_or(0, |i| i.len());
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanLengthStats {
    pub mean: f64,
    pub median: f64,
    pub min: u64,
    pub max: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub total: usize,
    pub per_depth: BTreeMap<usize, usize>,
    pub per_template: BTreeMap<String, usize>,
    /// Predicate of each sample's final hop; `none` for depth zero.
    pub per_predicate: BTreeMap<String, usize>,
    pub per_answer_kind: BTreeMap<String, usize>,
    /// Length in frames of evidence spans, over samples that have one.
    pub span_length: Option<SpanLengthStats>,
    /// Classes named by seeds or by entity answers.
    pub distinct_classes: usize,
}

pub fn profile_dataset(samples: &[QaSample]) -> Result<DatasetStats, ProfileError> {
    if samples.is_empty() {
        return Err(ProfileError::EmptyDataset);
    }
    let mut per_depth = BTreeMap::new();
    let mut per_template = BTreeMap::new();
    let mut per_predicate = BTreeMap::new();
    let mut per_answer_kind = BTreeMap::new();
    let mut classes = BTreeSet::new();
    let mut lengths = Vec::new();

    for s in samples {
        *per_depth.entry(s.designed_depth).or_insert(0) += 1;
        *per_template.entry(s.template_id.clone()).or_insert(0) += 1;
        let predicate = s
            .program
            .hops
            .last()
            .map_or("none", |h| h.predicate.as_str());
        *per_predicate.entry(predicate.to_string()).or_insert(0) += 1;
        *per_answer_kind
            .entry(s.answer.mode().as_str().to_string())
            .or_insert(0) += 1;
        if let Some(c) = &s.program.seed.class_label {
            classes.insert(c.as_str());
        }
        if let Answer::EntityClass(c) = &s.answer {
            classes.insert(c.as_str());
        }
        if let Some(span) = s.evidence.span {
            lengths.push(span.len());
        }
    }

    lengths.sort_unstable();
    let span_length = (!lengths.is_empty()).then(|| {
        let n = lengths.len();
        let median = if n % 2 == 1 {
            lengths[n / 2] as f64
        } else {
            (lengths[n / 2 - 1] + lengths[n / 2]) as f64 / 2.0
        };
        SpanLengthStats {
            mean: lengths.iter().sum::<u64>() as f64 / n as f64,
            median,
            min: lengths[0],
            max: lengths[n - 1],
        }
    });

    Ok(DatasetStats {
        total: samples.len(),
        per_depth,
        per_template,
        per_predicate,
        per_answer_kind,
        span_length,
        distinct_classes: classes.len(),
    })
}

/// One predicted span for one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prediction {
    pub sample_id: u64,
    pub span: TimeInterval,
}

/// Reads JSON-Lines predictions, skipping blank lines.
pub fn parse_predictions(text: &str) -> Result<Vec<Prediction>, ProfileError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| ProfileError::MalformedPrediction {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecallAt {
    pub threshold: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundingMetrics {
    pub recall_at_1: Vec<RecallAt>,
    #[serde(rename = "mean_tIoU")]
    pub mean_tiou: f64,
    pub n_scored: usize,
}

impl GroundingMetrics {
    pub fn recall_at(&self, threshold: f64) -> Option<f64> {
        self.recall_at_1
            .iter()
            .find(|r| r.threshold == threshold)
            .map(|r| r.recall)
    }
}

/// Scores predicted spans against ground-truth evidence spans. Every sample
/// with an evidence span is scored; one without a prediction scores zero.
pub fn evaluate_predictions(
    samples: &[QaSample],
    predictions: &[Prediction],
    thresholds: &[f64],
) -> Result<GroundingMetrics, ProfileError> {
    if let Some(&t) = thresholds.iter().find(|&&t| !(t > 0.0 && t <= 1.0)) {
        return Err(ProfileError::InvalidThreshold(t));
    }
    let truth: HashMap<u64, Option<TimeInterval>> = samples
        .iter()
        .map(|s| (s.sample_id, s.evidence.span))
        .collect();
    let mut predicted = HashMap::with_capacity(predictions.len());
    for p in predictions {
        if !truth.contains_key(&p.sample_id) {
            return Err(ProfileError::UnknownSampleId(p.sample_id));
        }
        if predicted.insert(p.sample_id, p.span).is_some() {
            return Err(ProfileError::DuplicatePrediction(p.sample_id));
        }
    }

    let scores: Vec<f64> = samples
        .iter()
        .filter_map(|s| {
            let gt = s.evidence.span?;
            Some(
                predicted
                    .get(&s.sample_id)
                    .map_or(0.0, |p| temporal_iou(p, &gt)),
            )
        })
        .collect();
    if scores.is_empty() {
        return Err(ProfileError::EmptyDataset);
    }
    let n = scores.len() as f64;
    let mut sorted_thresholds = thresholds.to_vec();
    sorted_thresholds.sort_by(f64::total_cmp);
    sorted_thresholds.dedup();
    Ok(GroundingMetrics {
        recall_at_1: sorted_thresholds
            .into_iter()
            .map(|threshold| RecallAt {
                threshold,
                recall: scores.iter().filter(|&&s| s >= threshold).count() as f64 / n,
            })
            .collect(),
        mean_tiou: scores.iter().sum::<f64>() / n,
        n_scored: scores.len(),
    })
}
