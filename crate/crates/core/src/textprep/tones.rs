//! Tone-mark relocation for Vietnamese syllables.
//!
//! Social-media text mixes typing conventions: the same word arrives as
//! "hóa" or "hoá", "quà" or "qùa". This module rewrites each syllable so the
//! tone mark sits on one canonical vowel. Placement follows the convention
//! the dataset itself uses (the UniKey default):
//!
//! 1. the tone goes on the last quality-modified vowel (ă â ê ô ơ ư) if the
//!    nucleus has one — "nước", "thuyền", "chứa";
//! 2. otherwise on the middle vowel of a three-vowel nucleus — "ngoài";
//! 3. otherwise on the second vowel when a coda follows — "hoàn";
//! 4. otherwise on the first vowel — "hóa", "khỏe", "thúy", "mùa".
//!
//! A leading "qu"/"gi" claims its u/i for the onset when another vowel
//! follows, so "qùa" → "quà" and "qúy" → "quý".
//!
//! Input is expected to be NFC-normalized lowercase; syllables without a tone
//! mark, or containing characters outside the Vietnamese alphabet, pass
//! through unchanged.

/// The five Vietnamese tone marks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tone {
    Acute = 1,
    Grave = 2,
    Hook = 3,
    Tilde = 4,
    Dot = 5,
}

/// Row per vowel base: `[plain, acute, grave, hook, tilde, dot]`.
/// The plain form doubles as the decomposition target.
const VOWEL_FORMS: [[char; 6]; 12] = [
    ['a', 'á', 'à', 'ả', 'ã', 'ạ'],
    ['ă', 'ắ', 'ằ', 'ẳ', 'ẵ', 'ặ'],
    ['â', 'ấ', 'ầ', 'ẩ', 'ẫ', 'ậ'],
    ['e', 'é', 'è', 'ẻ', 'ẽ', 'ẹ'],
    ['ê', 'ế', 'ề', 'ể', 'ễ', 'ệ'],
    ['i', 'í', 'ì', 'ỉ', 'ĩ', 'ị'],
    ['o', 'ó', 'ò', 'ỏ', 'õ', 'ọ'],
    ['ô', 'ố', 'ồ', 'ổ', 'ỗ', 'ộ'],
    ['ơ', 'ớ', 'ờ', 'ở', 'ỡ', 'ợ'],
    ['u', 'ú', 'ù', 'ủ', 'ũ', 'ụ'],
    ['ư', 'ứ', 'ừ', 'ử', 'ữ', 'ự'],
    ['y', 'ý', 'ỳ', 'ỷ', 'ỹ', 'ỵ'],
];

/// Vowels that carry a quality diacritic (breve, circumflex, horn).
const MODIFIED_BASES: [char; 6] = ['ă', 'â', 'ê', 'ô', 'ơ', 'ư'];

/// Splits a character into its toneless base and tone, if it is a Vietnamese
/// vowel form. `'ắ'` → `('ă', Some(Acute))`, `'a'` → `('a', None)`.
fn decompose(c: char) -> Option<(char, Option<Tone>)> {
    for row in &VOWEL_FORMS {
        if let Some(pos) = row.iter().position(|&f| f == c) {
            let tone = match pos {
                0 => None,
                1 => Some(Tone::Acute),
                2 => Some(Tone::Grave),
                3 => Some(Tone::Hook),
                4 => Some(Tone::Tilde),
                5 => Some(Tone::Dot),
                _ => unreachable!(),
            };
            return Some((row[0], tone));
        }
    }
    None
}

fn compose(base: char, tone: Tone) -> Option<char> {
    VOWEL_FORMS
        .iter()
        .find(|row| row[0] == base)
        .map(|row| row[tone as usize])
}

fn is_vowel_form(c: char) -> bool {
    decompose(c).is_some()
}

/// Letters of the Vietnamese alphabet that can appear outside the nucleus.
fn is_consonant(c: char) -> bool {
    matches!(
        c,
        'b' | 'c' | 'd' | 'đ' | 'g' | 'h' | 'k' | 'l' | 'm' | 'n' | 'p' | 'q' | 'r' | 's' | 't'
            | 'v' | 'x' | 'f' | 'j' | 'w' | 'z'
    )
}

/// Relocates the tone mark within one syllable. Returns `None` when the
/// syllable is not a plausible Vietnamese syllable (leaving it unchanged is
/// the caller's job).
fn normalize_syllable(syllable: &str) -> Option<String> {
    let chars: Vec<char> = syllable.chars().collect();

    // Decompose: bases with tones stripped, remember the leftmost tone.
    let mut bases: Vec<char> = Vec::with_capacity(chars.len());
    let mut tone: Option<Tone> = None;
    let mut saw_tone = false;
    for &c in &chars {
        match decompose(c) {
            Some((base, t)) => {
                if t.is_some() {
                    saw_tone = true;
                    if tone.is_none() {
                        tone = t;
                    }
                }
                bases.push(base);
            }
            None if is_consonant(c) => bases.push(c),
            None => return None, // digits, foreign letters, '_', ...
        }
    }
    if !saw_tone {
        return None; // nothing to relocate
    }
    let tone = tone.expect("tone present");

    // Locate the vowel nucleus.
    let mut vstart = bases.iter().position(|&c| is_vowel_form(c))?;
    // "qu" and "gi" onsets own their u/i when another vowel follows.
    if vstart > 0 {
        let onset_pair = (bases[vstart - 1], bases[vstart]);
        let followed_by_vowel = bases.get(vstart + 1).is_some_and(|&c| is_vowel_form(c));
        if followed_by_vowel && (onset_pair == ('q', 'u') || onset_pair == ('g', 'i')) {
            vstart += 1;
        }
    }
    let mut vend = vstart;
    while vend < bases.len() && is_vowel_form(bases[vend]) {
        vend += 1;
    }
    // A second vowel run after the coda is not a Vietnamese syllable.
    if bases[vend..].iter().any(|&c| is_vowel_form(c)) {
        return None;
    }
    let nucleus = &bases[vstart..vend];
    let has_coda = vend < bases.len();

    let target = vstart
        + match nucleus.len() {
            0 => return None,
            1 => 0,
            n => {
                if let Some(m) = nucleus.iter().rposition(|c| MODIFIED_BASES.contains(c)) {
                    m
                } else if n == 3 || has_coda {
                    1
                } else {
                    0
                }
            }
        };

    let mut out = String::with_capacity(syllable.len());
    for (i, &base) in bases.iter().enumerate() {
        if i == target {
            out.push(compose(base, tone)?);
        } else {
            out.push(base);
        }
    }
    Some(out)
}

/// Normalizes tone placement across a whole string.
///
/// Syllables are maximal alphabetic runs; everything else (spaces, digits,
/// underscores from pre-segmented input) separates them and passes through.
pub fn normalize_tones(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut run = String::new();
    for c in text.chars() {
        if c.is_alphabetic() {
            run.push(c);
        } else {
            flush_syllable(&mut out, &mut run);
            out.push(c);
        }
    }
    flush_syllable(&mut out, &mut run);
    out
}

fn flush_syllable(out: &mut String, run: &mut String) {
    if run.is_empty() {
        return;
    }
    match normalize_syllable(run) {
        Some(fixed) => out.push_str(&fixed),
        None => out.push_str(run),
    }
    run.clear();
}
