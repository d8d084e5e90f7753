//! The preprocessing pipeline that turns a raw comment into tokens.
//!
//! Stages run in a fixed order, each one toggleable through
//! [`NormalizerConfig`]:
//!
//! 1. [`lowercase`] — Unicode-aware lowercasing
//! 2. [`clean`] — drop URLs, @-mentions and emoji, collapse letter/space
//!    runs, strip punctuation and symbols
//! 3. [`normalize_unicode`] — canonical composition (NFC)
//! 4. [`decode_teencode`] — expand slang abbreviations ("đc" → "được")
//! 5. [`normalize_tones`] — relocate tone marks to the canonical vowel
//! 6. [`segment_words`] — greedy longest-match phrase segmentation,
//!    joining multi-syllable words with "_"
//!
//! The pipeline is idempotent on its own output and never panics on valid
//! UTF-8 input.

mod tones;

pub use tones::normalize_tones;

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use unicode_normalization::UnicodeNormalization;
use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

use crate::error::{Error, Result};

/// Built-in teencode dictionary, shipped with the crate.
pub const BUILTIN_TEENCODE: &str = include_str!("../../data/teencode.tsv");
/// Built-in multi-syllable phrase lexicon, shipped with the crate.
pub const BUILTIN_PHRASES: &str = include_str!("../../data/phrases.txt");

/// A normalized token sequence plus the id of the comment it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessedText {
    pub tokens: Vec<String>,
    pub source_id: String,
}

impl ProcessedText {
    pub fn new(source_id: impl Into<String>, tokens: Vec<String>) -> Self {
        ProcessedText {
            tokens,
            source_id: source_id.into(),
        }
    }

    pub fn from_text(source_id: impl Into<String>, text: &str, config: &NormalizerConfig) -> Self {
        ProcessedText::new(source_id, preprocess(text, config))
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Phrase lexicon for word segmentation: known multi-syllable words stored as
/// space-separated syllable sequences.
#[derive(Debug, Clone, Default)]
pub struct PhraseLexicon {
    phrases: HashSet<String>,
    max_syllables: usize,
}

impl PhraseLexicon {
    /// Builds a lexicon, normalizing each phrase the same way the pipeline
    /// normalizes text so matches line up.
    pub fn new<I: IntoIterator<Item = S>, S: AsRef<str>>(phrases: I) -> Result<PhraseLexicon> {
        let mut set = HashSet::new();
        let mut max_syllables = 0;
        for raw in phrases {
            let normalized: Vec<String> = raw
                .as_ref()
                .split_whitespace()
                .map(|s| normalize_tones(&lowercase(s).nfc().collect::<String>()))
                .collect();
            if normalized.len() < 2 {
                return Err(Error::Config(format!(
                    "phrase {:?} must have at least 2 space-separated syllables",
                    raw.as_ref()
                )));
            }
            max_syllables = max_syllables.max(normalized.len());
            set.insert(normalized.join(" "));
        }
        Ok(PhraseLexicon {
            phrases: set,
            max_syllables,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    fn contains_joined(&self, joined: &str) -> bool {
        self.phrases.contains(joined)
    }
}

/// Configuration for the preprocessing pipeline. Immutable after
/// construction; share freely across worker threads.
#[derive(Debug, Clone)]
pub struct NormalizerConfig {
    teencode: BTreeMap<String, String>,
    lexicon: PhraseLexicon,
    pub enable_lowercase: bool,
    pub enable_clean: bool,
    pub enable_unicode: bool,
    pub enable_teencode: bool,
    pub enable_tones: bool,
    pub enable_segment: bool,
}

impl NormalizerConfig {
    /// Config backed by the built-in teencode dictionary and phrase lexicon.
    pub fn builtin() -> NormalizerConfig {
        NormalizerConfig::from_sources(BUILTIN_TEENCODE, BUILTIN_PHRASES)
            .expect("built-in dictionaries are valid")
    }

    /// Config with empty dictionaries; all stages still run.
    pub fn empty() -> NormalizerConfig {
        NormalizerConfig {
            teencode: BTreeMap::new(),
            lexicon: PhraseLexicon::default(),
            enable_lowercase: true,
            enable_clean: true,
            enable_unicode: true,
            enable_teencode: true,
            enable_tones: true,
            enable_segment: true,
        }
    }

    /// Parses dictionary file contents: one entry per line, `#` lines are
    /// comments; teencode lines are `key<TAB>value`, phrase lines are plain
    /// space-separated phrases.
    pub fn from_sources(teencode_src: &str, phrases_src: &str) -> Result<NormalizerConfig> {
        let teencode = parse_teencode(teencode_src)?;
        let phrases: Vec<&str> = dictionary_lines(phrases_src).collect();
        let lexicon = PhraseLexicon::new(phrases)?;
        Ok(NormalizerConfig {
            teencode,
            lexicon,
            ..NormalizerConfig::empty()
        })
    }

    /// Reads dictionaries from files, falling back to the built-ins for any
    /// path not given.
    pub fn from_files(teencode: Option<&Path>, phrases: Option<&Path>) -> Result<NormalizerConfig> {
        let teencode_src = match teencode {
            Some(p) => std::fs::read_to_string(p)?,
            None => BUILTIN_TEENCODE.to_string(),
        };
        let phrases_src = match phrases {
            Some(p) => std::fs::read_to_string(p)?,
            None => BUILTIN_PHRASES.to_string(),
        };
        NormalizerConfig::from_sources(&teencode_src, &phrases_src)
    }

    pub fn teencode_map(&self) -> &BTreeMap<String, String> {
        &self.teencode
    }

    pub fn lexicon(&self) -> &PhraseLexicon {
        &self.lexicon
    }

    pub fn with_teencode_entry(mut self, key: &str, value: &str) -> Result<Self> {
        let mut map = std::mem::take(&mut self.teencode);
        map.insert(key.to_string(), value.to_string());
        validate_teencode(&map)?;
        self.teencode = map;
        Ok(self)
    }

    pub fn with_lexicon(mut self, lexicon: PhraseLexicon) -> Self {
        self.lexicon = lexicon;
        self
    }
}

fn dictionary_lines(src: &str) -> impl Iterator<Item = &str> {
    src.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn parse_teencode(src: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for line in dictionary_lines(src) {
        let (key, value) = line.split_once('\t').ok_or_else(|| {
            Error::Config(format!("teencode line {line:?} is not key<TAB>value"))
        })?;
        let key: String = key.trim().nfc().collect();
        let value: String = value.trim().nfc().collect();
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::Config(format!("duplicate teencode key {key:?}")));
        }
    }
    validate_teencode(&map)?;
    Ok(map)
}

fn validate_teencode(map: &BTreeMap<String, String>) -> Result<()> {
    for (key, value) in map {
        if key.is_empty() || key.chars().any(char::is_whitespace) {
            return Err(Error::Config(format!(
                "teencode key {key:?} must be non-empty and whitespace-free"
            )));
        }
        if key != &lowercase(key) {
            return Err(Error::Config(format!(
                "teencode key {key:?} must be lowercase"
            )));
        }
        // '_' is the phrase-join character; a key containing it could undo
        // segmentation output and break pipeline idempotence.
        if key.contains('_') {
            return Err(Error::Config(format!(
                "teencode key {key:?} may not contain '_'"
            )));
        }
        if value.trim().is_empty() {
            return Err(Error::Config(format!("teencode key {key:?} has empty value")));
        }
        // Replacement output must not itself be replaceable, or decoding
        // would not be idempotent.
        for token in value.split_whitespace() {
            if map.contains_key(token) {
                return Err(Error::Config(format!(
                    "teencode value token {token:?} (from key {key:?}) is itself a key"
                )));
            }
        }
    }
    Ok(())
}

/// Unicode-aware lowercasing.
pub fn lowercase(text: &str) -> String {
    text.to_lowercase()
}

fn url_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?i)\b(?:[a-z][a-z0-9+.\-]*://|www\.)\S+").expect("valid regex")
    })
}

fn mention_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"@[\w.]+").expect("valid regex"))
}

/// Emoji, pictographs and their invisible plumbing (ZWJ, variation
/// selectors, keycaps). Alphabetic scripts never fall in these ranges.
fn is_pictographic(c: char) -> bool {
    matches!(c,
        '\u{1F000}'..='\u{1FAFF}'
        | '\u{2600}'..='\u{27BF}'
        | '\u{2B00}'..='\u{2BFF}'
        | '\u{FE00}'..='\u{FE0F}'
        | '\u{200D}'
        | '\u{20E3}'
    )
}

fn is_strippable(c: char) -> bool {
    if c == '_' {
        return false; // reserved as the phrase-join character
    }
    matches!(
        c.general_category_group(),
        GeneralCategoryGroup::Punctuation | GeneralCategoryGroup::Symbol
    )
}

/// Noise removal: URLs, @-mentions and emoji go away, runs of three or more
/// identical letters collapse to one, punctuation and symbols (except `_`)
/// are replaced by spaces, and whitespace is collapsed to single spaces with
/// trimmed ends.
pub fn clean(text: &str) -> String {
    let text = url_regex().replace_all(text, " ");
    let text = mention_regex().replace_all(&text, " ");
    let text: String = text
        .chars()
        .map(|c| if is_pictographic(c) { ' ' } else { c })
        .collect();

    // Collapse letter runs of length >= 3 down to a single letter.
    let mut collapsed = String::with_capacity(text.len());
    let mut run_char = '\0';
    let mut run_len = 0usize;
    for c in text.chars() {
        if c == run_char && c.is_alphabetic() {
            run_len += 1;
        } else {
            flush_run(&mut collapsed, run_char, run_len);
            run_char = c;
            run_len = 1;
        }
    }
    flush_run(&mut collapsed, run_char, run_len);

    let stripped: String = collapsed
        .chars()
        .map(|c| if is_strippable(c) { ' ' } else { c })
        .collect();
    stripped.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn flush_run(out: &mut String, c: char, len: usize) {
    if len == 0 {
        return;
    }
    let keep = if len >= 3 { 1 } else { len };
    for _ in 0..keep {
        out.push(c);
    }
}

/// Canonical composition (NFC).
pub fn normalize_unicode(text: &str) -> String {
    text.nfc().collect()
}

/// Replaces every whitespace-delimited token that exactly equals a dictionary
/// key with its expansion. Matching is whole-token; other tokens pass
/// through. Whitespace is normalized to single spaces.
pub fn decode_teencode(text: &str, map: &BTreeMap<String, String>) -> String {
    text.split_whitespace()
        .map(|tok| map.get(tok).map(String::as_str).unwrap_or(tok))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Greedy longest-match segmentation over whitespace-split syllables.
/// Matched phrases come out as single tokens with syllables joined by `_`.
pub fn segment_words(text: &str, lexicon: &PhraseLexicon) -> Vec<String> {
    let syllables: Vec<&str> = text.split_whitespace().collect();
    let mut out = Vec::with_capacity(syllables.len());
    let mut i = 0;
    while i < syllables.len() {
        let longest = lexicon.max_syllables.min(syllables.len() - i);
        let mut matched = 0;
        for len in (2..=longest).rev() {
            if lexicon.contains_joined(&syllables[i..i + len].join(" ")) {
                matched = len;
                break;
            }
        }
        if matched > 0 {
            out.push(syllables[i..i + matched].join("_"));
            i += matched;
        } else {
            out.push(syllables[i].to_string());
            i += 1;
        }
    }
    out
}

/// Runs the full pipeline. Stages disabled in `config` are skipped. An empty
/// token sequence is a legal outcome (e.g. emoji-only input).
pub fn preprocess(text: &str, config: &NormalizerConfig) -> Vec<String> {
    let mut s = text.to_string();
    if config.enable_lowercase {
        s = lowercase(&s);
    }
    if config.enable_clean {
        s = clean(&s);
    }
    if config.enable_unicode {
        s = normalize_unicode(&s);
    }
    if config.enable_teencode {
        s = decode_teencode(&s, &config.teencode);
    }
    if config.enable_tones {
        s = normalize_tones(&s);
    }
    if config.enable_segment {
        segment_words(&s, &config.lexicon)
    } else {
        s.split_whitespace().map(str::to_string).collect()
    }
}
