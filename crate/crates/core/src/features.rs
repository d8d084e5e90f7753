//! Bag-of-words count vectorization over preprocessed tokens.
//!
//! [`fit_vocabulary`] learns the term → column mapping from a corpus;
//! [`transform`] turns one document into a sparse count vector. Vocabulary
//! indices are assigned in lexicographic (UTF-8 byte) order, so fitting the
//! same corpus always produces the same mapping.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textprep::ProcessedText;

pub const VOCABULARY_FORMAT_VERSION: u32 = 1;

/// Vectorizer settings: document-frequency floor and optional vocabulary cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorizerConfig {
    pub min_df: usize,
    pub max_features: Option<usize>,
}

impl Default for VectorizerConfig {
    fn default() -> Self {
        VectorizerConfig {
            min_df: 1,
            max_features: None,
        }
    }
}

/// A fitted term → column-index mapping.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    terms: Vec<String>,
    term_index: HashMap<String, usize>,
    doc_freq: Vec<usize>,
    pub min_df: usize,
    pub max_features: Option<usize>,
}

impl Vocabulary {
    fn from_terms(
        terms: Vec<String>,
        doc_freq: Vec<usize>,
        config: VectorizerConfig,
    ) -> Vocabulary {
        let term_index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocabulary {
            terms,
            term_index,
            doc_freq,
            min_df: config.min_df,
            max_features: config.max_features,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in index order.
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.term_index.get(term).copied()
    }

    /// Per-term document frequencies; empty when the vocabulary was loaded
    /// from a file (the persistence format carries terms only).
    pub fn doc_freq(&self) -> &[usize] {
        &self.doc_freq
    }

    pub fn save_to_path(&self, path: &Path) -> Result<()> {
        let file = VocabularyFile {
            version: VOCABULARY_FORMAT_VERSION,
            min_df: self.min_df,
            max_features: self.max_features,
            terms: self.terms.clone(),
        };
        let json = serde_json::to_string_pretty(&file)
            .map_err(|e| Error::Config(format!("vocabulary serialization: {e}")))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load_from_path(path: &Path) -> Result<Vocabulary> {
        let raw = std::fs::read_to_string(path)?;
        let file: VocabularyFile = serde_json::from_str(&raw)
            .map_err(|e| Error::ModelLoad(format!("vocabulary parse: {e}")))?;
        if file.version != VOCABULARY_FORMAT_VERSION {
            return Err(Error::ModelLoad(format!(
                "unsupported vocabulary version {} (expected {})",
                file.version, VOCABULARY_FORMAT_VERSION
            )));
        }
        Ok(Vocabulary::from_terms(
            file.terms,
            Vec::new(),
            VectorizerConfig {
                min_df: file.min_df,
                max_features: file.max_features,
            },
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct VocabularyFile {
    version: u32,
    min_df: usize,
    max_features: Option<usize>,
    terms: Vec<String>,
}

/// Sparse per-document count vector: `(index, count)` entries with strictly
/// increasing indices below `dims`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseVector {
    dims: usize,
    entries: Vec<(usize, u32)>,
}

impl SparseVector {
    pub fn new(dims: usize, entries: Vec<(usize, u32)>) -> Result<SparseVector> {
        let mut prev: Option<usize> = None;
        for &(i, c) in &entries {
            if i >= dims {
                return Err(Error::Shape {
                    expected: dims,
                    got: i + 1,
                });
            }
            if c == 0 {
                return Err(Error::Config("sparse entry with zero count".into()));
            }
            if prev.is_some_and(|p| p >= i) {
                return Err(Error::Config(
                    "sparse entries must have strictly increasing indices".into(),
                ));
            }
            prev = Some(i);
        }
        Ok(SparseVector { dims, entries })
    }

    pub fn zero(dims: usize) -> SparseVector {
        SparseVector {
            dims,
            entries: Vec::new(),
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> u32 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0)
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| c as u64).sum()
    }
}

/// Learns the vocabulary of a corpus.
///
/// Terms must appear in at least `min_df` documents; when `max_features` is
/// set, the terms with the highest total counts are kept (ties broken
/// lexicographically). Indices are assigned in lexicographic term order.
pub fn fit_vocabulary(corpus: &[ProcessedText], config: VectorizerConfig) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if config.min_df < 1 {
        return Err(Error::Config("min_df must be >= 1".into()));
    }
    if config.max_features == Some(0) {
        return Err(Error::Config("max_features must be >= 1".into()));
    }

    // BTreeMap keeps terms in lexicographic order throughout.
    let mut doc_freq: BTreeMap<&str, usize> = BTreeMap::new();
    let mut total_count: BTreeMap<&str, u64> = BTreeMap::new();
    for doc in corpus {
        let mut seen: Vec<&str> = Vec::new();
        for tok in &doc.tokens {
            *total_count.entry(tok).or_insert(0) += 1;
            if !seen.contains(&tok.as_str()) {
                seen.push(tok);
            }
        }
        for tok in seen {
            *doc_freq.entry(tok).or_insert(0) += 1;
        }
    }

    let mut kept: Vec<&str> = doc_freq
        .iter()
        .filter(|(_, &df)| df >= config.min_df)
        .map(|(&t, _)| t)
        .collect();

    if let Some(cap) = config.max_features {
        if kept.len() > cap {
            // Highest total count first, lexicographic on ties; then restore
            // lexicographic order for index assignment.
            kept.sort_by(|a, b| {
                total_count[b]
                    .cmp(&total_count[a])
                    .then_with(|| a.cmp(b))
            });
            kept.truncate(cap);
            kept.sort_unstable();
        }
    }

    if kept.is_empty() {
        return Err(Error::EmptyVocabulary);
    }

    let freq = kept.iter().map(|t| doc_freq[t]).collect();
    let terms = kept.into_iter().map(str::to_string).collect();
    Ok(Vocabulary::from_terms(terms, freq, config))
}

/// Counts a document against a fitted vocabulary. Out-of-vocabulary tokens
/// are ignored.
pub fn transform(doc: &ProcessedText, vocab: &Vocabulary) -> SparseVector {
    let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
    for tok in &doc.tokens {
        if let Some(i) = vocab.index_of(tok) {
            *counts.entry(i).or_insert(0) += 1;
        }
    }
    SparseVector {
        dims: vocab.len(),
        entries: counts.into_iter().collect(),
    }
}

/// Fits on the corpus, then transforms it; vectors align 1:1 with corpus order.
pub fn fit_transform(
    corpus: &[ProcessedText],
    config: VectorizerConfig,
) -> Result<(Vocabulary, Vec<SparseVector>)> {
    let vocab = fit_vocabulary(corpus, config)?;
    let vectors = corpus.iter().map(|d| transform(d, &vocab)).collect();
    Ok((vocab, vectors))
}
