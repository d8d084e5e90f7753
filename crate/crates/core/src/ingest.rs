//! Dataset loading, validation, balancing and splitting.
//!
//! Datasets are CSV files (RFC 4180 quoting, comma delimiter, UTF-8, header
//! required). Only the `text` column is mandatory; `id`, `label` and `source`
//! are optional. On output the full `id,text,label,source` header is always
//! written and labels are rendered in their decimal forms `0.0`/`1.0`/`2.0`.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// The three comment classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Other = 0,
    Discrimination = 1,
    Supportive = 2,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Other, Label::Discrimination, Label::Supportive];
    pub const COUNT: usize = 3;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Label::ALL.get(i).copied()
    }

    /// Accepts both the integer forms `0`/`1`/`2` and the decimal forms
    /// `0.0`/`1.0`/`2.0` used by the dataset files.
    pub fn parse(s: &str) -> Option<Label> {
        match s.trim() {
            "0" | "0.0" => Some(Label::Other),
            "1" | "1.0" => Some(Label::Discrimination),
            "2" | "2.0" => Some(Label::Supportive),
            _ => None,
        }
    }

    /// Decimal rendering used in CSV output.
    pub fn as_decimal_str(self) -> &'static str {
        match self {
            Label::Other => "0.0",
            Label::Discrimination => "1.0",
            Label::Supportive => "2.0",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_decimal_str())
    }
}

/// One comment record as loaded from disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawComment {
    pub id: String,
    pub text: String,
    pub label: Option<Label>,
    pub source: Option<String>,
}

/// An ordered, id-unique collection of comments.
#[derive(Debug, Clone)]
pub struct Dataset {
    records: Vec<RawComment>,
    all_labeled: bool,
}

impl Dataset {
    /// Validates the dataset invariants: non-empty, unique ids, non-blank text.
    pub fn new(records: Vec<RawComment>) -> Result<Dataset> {
        if records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut seen = HashSet::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if r.text.trim().is_empty() {
                return Err(Error::Row {
                    row: i + 1,
                    reason: "text is empty after trimming".into(),
                });
            }
            if !seen.insert(r.id.as_str()) {
                return Err(Error::Row {
                    row: i + 1,
                    reason: format!("duplicate id {:?}", r.id),
                });
            }
        }
        let all_labeled = records.iter().all(|r| r.label.is_some());
        Ok(Dataset {
            records,
            all_labeled,
        })
    }

    pub fn records(&self) -> &[RawComment] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn all_labeled(&self) -> bool {
        self.all_labeled
    }

    /// Record count per class, indexed by `Label::index`.
    pub fn class_counts(&self) -> [usize; Label::COUNT] {
        let mut counts = [0usize; Label::COUNT];
        for r in &self.records {
            if let Some(l) = r.label {
                counts[l.index()] += 1;
            }
        }
        counts
    }
}

/// Train/validation/test proportions plus the shuffle seed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train: f64, val: f64, test: f64, seed: u64) -> Result<SplitSpec> {
        for (name, f) in [("train", train), ("val", val), ("test", test)] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidSplitSpec(format!(
                    "{name} fraction {f} not in (0, 1)"
                )));
            }
        }
        if (train + val + test - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSplitSpec(format!(
                "fractions sum to {}, expected 1",
                train + val + test
            )));
        }
        Ok(SplitSpec {
            train_fraction: train,
            val_fraction: val,
            test_fraction: test,
            seed,
        })
    }
}

/// Loads a dataset CSV, preserving file order.
///
/// The header must contain a `text` column; `id`, `label` and `source` are
/// optional. Rows without an `id` column get sequential ids `r0`, `r1`, ...
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let text_col = col("text").ok_or_else(|| {
        Error::Schema(format!(
            "missing required column `text` (header: {:?})",
            headers.iter().collect::<Vec<_>>()
        ))
    })?;
    let id_col = col("id");
    let label_col = col("label");
    let source_col = col("source");

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let data_row = i + 1; // 1-based, not counting the header
        let text = row.get(text_col).unwrap_or("").to_string();
        if text.trim().is_empty() {
            return Err(Error::Row {
                row: data_row,
                reason: "text is empty after trimming".into(),
            });
        }
        let label = match label_col.and_then(|c| row.get(c)) {
            None => None,
            Some("") => None,
            Some(raw) => Some(Label::parse(raw).ok_or_else(|| Error::Row {
                row: data_row,
                reason: format!("unparseable label {raw:?} (expected 0/1/2 or 0.0/1.0/2.0)"),
            })?),
        };
        let id = match id_col.and_then(|c| row.get(c)) {
            Some(v) if !v.is_empty() => v.to_string(),
            _ => format!("r{i}"),
        };
        let source = match source_col.and_then(|c| row.get(c)) {
            Some(v) if !v.is_empty() => Some(v.to_string()),
            _ => None,
        };
        records.push(RawComment {
            id,
            text,
            label,
            source,
        });
    }
    Dataset::new(records)
}

/// Writes a dataset with the canonical `id,text,label,source` header.
/// `load_dataset(save_dataset(d))` preserves every field.
pub fn save_dataset<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["id", "text", "label", "source"])?;
    for r in dataset.records() {
        w.write_record([
            r.id.as_str(),
            r.text.as_str(),
            r.label.map(Label::as_decimal_str).unwrap_or(""),
            r.source.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_dataset_to_path(dataset: &Dataset, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    save_dataset(dataset, file)
}

/// Undersamples every class to the minority-class count.
///
/// Within each class, survivors are drawn by seeded uniform sampling without
/// replacement and keep their original relative order. The output lays the
/// classes out as consecutive blocks in label order (0, 1, 2).
pub fn balance_labels(dataset: &Dataset, seed: u64) -> Result<Dataset> {
    require_all_labeled(dataset)?;
    let counts = dataset.class_counts();
    for label in Label::ALL {
        if counts[label.index()] == 0 {
            return Err(Error::MissingClass(label));
        }
    }
    let target = *counts.iter().min().expect("three classes");

    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(target * Label::COUNT);
    for label in Label::ALL {
        let members: Vec<usize> = dataset
            .records()
            .iter()
            .enumerate()
            .filter(|(_, r)| r.label == Some(label))
            .map(|(i, _)| i)
            .collect();
        let mut keep = rng.sample_indices(members.len(), target);
        keep.sort_unstable(); // restore original relative order
        out.extend(keep.into_iter().map(|k| dataset.records()[members[k]].clone()));
    }
    Dataset::new(out)
}

/// Stratified three-way split.
///
/// Per class, record positions are shuffled by the seeded PRNG (one sequence,
/// classes consumed in label order) and cut at `floor(n·train)` and
/// `floor(n·(train+val))`. The three outputs partition the input exactly.
pub fn split(dataset: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset, Dataset)> {
    require_all_labeled(dataset)?;
    let mut rng = SplitMix64::new(spec.seed);
    let mut parts: [Vec<RawComment>; 3] = [Vec::new(), Vec::new(), Vec::new()];

    for label in Label::ALL {
        let mut members: Vec<usize> = dataset
            .records()
            .iter()
            .enumerate()
            .filter(|(_, r)| r.label == Some(label))
            .map(|(i, _)| i)
            .collect();
        if members.is_empty() {
            return Err(Error::MissingClass(label));
        }
        rng.shuffle(&mut members);
        let n = members.len();
        let train_end = (n as f64 * spec.train_fraction).floor() as usize;
        let val_end = (n as f64 * (spec.train_fraction + spec.val_fraction)).floor() as usize;
        let cuts = [&members[..train_end], &members[train_end..val_end], &members[val_end..]];
        for (part, cut) in parts.iter_mut().zip(cuts) {
            if cut.is_empty() {
                return Err(Error::DegenerateSplit(format!(
                    "class {label} with {n} records leaves an empty split"
                )));
            }
            part.extend(cut.iter().map(|&i| dataset.records()[i].clone()));
        }
    }

    let [train, val, test] = parts;
    Ok((Dataset::new(train)?, Dataset::new(val)?, Dataset::new(test)?))
}

fn require_all_labeled(dataset: &Dataset) -> Result<()> {
    if !dataset.all_labeled() {
        return Err(Error::Schema("dataset contains unlabeled records".into()));
    }
    Ok(())
}
