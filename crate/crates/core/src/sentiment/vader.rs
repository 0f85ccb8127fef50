//! Rule-based valence-intensity scoring over a term valence lexicon.
//!
//! Token valences are adjusted for preceding booster/dampener words, negation
//! within a three-token window, ALL-CAPS emphasis, "but" contrast and
//! exclamation/question emphasis, then summed and squashed with
//! `s / sqrt(s^2 + 15)`.

use std::collections::HashMap;
use std::sync::OnceLock;

use super::PolarityScore;

const BOOST_INCR: f64 = 0.293;
const BOOST_DECR: f64 = -0.293;
const CAPS_INCR: f64 = 0.733;
/// Multiplier applied to a negated valence.
pub const NEGATION_SCALAR: f64 = -0.74;
/// Compound normalization constant.
pub const ALPHA: f64 = 15.0;

const NEGATIONS: [&str; 59] = [
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt", "ain't", "aren't",
    "can't", "couldn't", "daren't", "didn't", "doesn't", "dont", "hadnt", "hasnt", "havent",
    "isnt", "mightnt", "mustnt", "neither", "don't", "hadn't", "hasn't", "haven't", "isn't",
    "mightn't", "mustn't", "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing",
    "nowhere", "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent", "oughtn't", "shan't",
    "shouldn't", "uh-uh", "wasn't", "weren't", "without", "wont", "wouldnt", "won't", "wouldn't",
    "rarely", "seldom", "despite",
];

const BOOSTERS_UP: [&str; 60] = [
    "absolutely", "amazingly", "awfully", "completely", "considerable", "considerably",
    "decidedly", "deeply", "effing", "enormous", "enormously", "entirely", "especially",
    "exceptional", "exceptionally", "extreme", "extremely", "fabulously", "flipping", "flippin",
    "frackin", "fracking", "fricking", "frickin", "frigging", "friggin", "fully", "fuckin",
    "fucking", "fuggin", "fugging", "greatly", "hella", "highly", "hugely", "incredible",
    "incredibly", "intensely", "major", "majorly", "more", "most", "particularly", "purely",
    "quite", "really", "remarkably", "so", "substantially", "thoroughly", "total", "totally",
    "tremendous", "tremendously", "uber", "unbelievably", "unusually", "utter", "utterly", "very",
];

const BOOSTERS_DOWN: [&str; 24] = [
    "almost", "barely", "hardly", "just enough", "kind of", "kinda", "kindof", "kind-of", "less",
    "little", "marginal", "marginally", "occasional", "occasionally", "partly", "scarce",
    "scarcely", "slight", "slightly", "somewhat", "sort of", "sorta", "sortof", "sort-of",
];

const SPECIAL_CASES: [(&str, f64); 9] = [
    ("the shit", 3.0),
    ("the bomb", 3.0),
    ("bad ass", 1.5),
    ("badass", 1.5),
    ("bus stop", 0.0),
    ("yeah right", -2.0),
    ("kiss of death", -1.5),
    ("to die for", 3.0),
    ("beating heart", 3.5),
];

fn boosters() -> &'static HashMap<&'static str, f64> {
    static MAP: OnceLock<HashMap<&'static str, f64>> = OnceLock::new();
    MAP.get_or_init(|| {
        BOOSTERS_UP
            .iter()
            .map(|w| (*w, BOOST_INCR))
            .chain(BOOSTERS_DOWN.iter().map(|w| (*w, BOOST_DECR)))
            .collect()
    })
}

fn special_case(seq: &str) -> Option<f64> {
    SPECIAL_CASES.iter().find(|(k, _)| *k == seq).map(|(_, v)| *v)
}

fn is_negation(word_lower: &str) -> bool {
    NEGATIONS.contains(&word_lower) || word_lower.contains("n't")
}

/// At least one cased character and no lowercase ones.
fn is_upper(word: &str) -> bool {
    word.chars().any(char::is_uppercase) && !word.chars().any(char::is_lowercase)
}

/// Strips surrounding ASCII punctuation unless that leaves two characters or
/// fewer, which keeps emoticons like ":)" intact.
fn strip_punct_if_word(token: &str) -> &str {
    let stripped = token.trim_matches(|c: char| c.is_ascii_punctuation());
    if stripped.chars().count() <= 2 {
        token
    } else {
        stripped
    }
}

/// Term to mean valence, as loaded from a `term<TAB>valence[<TAB>...]` file.
#[derive(Debug, Clone, Default)]
pub struct ValenceLexicon {
    valence: HashMap<String, f64>,
}

const DEFAULT_VALENCE_LEXICON: &str = include_str!("../../data/vader_lexicon.txt");

impl ValenceLexicon {
    pub fn parse(contents: &str) -> Result<Self, String> {
        let mut valence = HashMap::new();
        for (n, line) in contents.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(term), Some(v)) = (cols.next(), cols.next()) else {
                return Err(format!("line {}: expected term<TAB>valence", n + 1));
            };
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| format!("line {}: bad valence `{v}`", n + 1))?;
            valence.insert(term.to_string(), v);
        }
        Ok(ValenceLexicon { valence })
    }

    /// The bundled 7.5k-term social-media valence lexicon.
    pub fn bundled() -> &'static ValenceLexicon {
        static LEX: OnceLock<ValenceLexicon> = OnceLock::new();
        LEX.get_or_init(|| ValenceLexicon::parse(DEFAULT_VALENCE_LEXICON).expect("bundled lexicon parses"))
    }

    pub fn get(&self, term: &str) -> Option<f64> {
        self.valence.get(term).copied()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.valence.contains_key(term)
    }

    pub fn len(&self) -> usize {
        self.valence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valence.is_empty()
    }

    pub fn insert(&mut self, term: impl Into<String>, valence: f64) {
        self.valence.insert(term.into(), valence);
    }
}

struct Sentence<'a> {
    words: Vec<&'a str>,
    lower: Vec<String>,
    cap_differential: bool,
}

impl<'a> Sentence<'a> {
    fn new(text: &'a str) -> Self {
        let words: Vec<&str> = text.split_whitespace().map(strip_punct_if_word).collect();
        let lower = words.iter().map(|w| w.to_lowercase()).collect();
        let caps = words.iter().filter(|w| is_upper(w)).count();
        let diff = words.len() - caps;
        Sentence {
            cap_differential: diff > 0 && diff < words.len(),
            words,
            lower,
        }
    }
}

fn booster_scalar(word: &str, word_lower: &str, valence: f64, cap_diff: bool) -> f64 {
    let Some(&b) = boosters().get(word_lower) else {
        return 0.0;
    };
    let mut scalar = if valence < 0.0 { -b } else { b };
    if is_upper(word) && cap_diff {
        if valence > 0.0 {
            scalar += CAPS_INCR;
        } else {
            scalar -= CAPS_INCR;
        }
    }
    scalar
}

fn negation_check(mut valence: f64, wl: &[String], start: usize, i: usize) -> f64 {
    match start {
        0 => {
            if is_negation(&wl[i - 1]) {
                valence *= NEGATION_SCALAR;
            }
        }
        1 => {
            if wl[i - 2] == "never" && (wl[i - 1] == "so" || wl[i - 1] == "this") {
                valence *= 1.25;
            } else if wl[i - 2] == "without" && wl[i - 1] == "doubt" {
            } else if is_negation(&wl[i - 2]) {
                valence *= NEGATION_SCALAR;
            }
        }
        _ => {
            if (wl[i - 3] == "never" && (wl[i - 2] == "so" || wl[i - 2] == "this"))
                || (wl[i - 1] == "so" || wl[i - 1] == "this")
            {
                valence *= 1.25;
            } else if wl[i - 3] == "without" && (wl[i - 2] == "doubt" || wl[i - 1] == "doubt") {
            } else if is_negation(&wl[i - 3]) {
                valence *= NEGATION_SCALAR;
            }
        }
    }
    valence
}

/// Only reached with `i >= 3`.
fn idiom_check(mut valence: f64, wl: &[String], i: usize) -> f64 {
    let one_zero = format!("{} {}", wl[i - 1], wl[i]);
    let two_one_zero = format!("{} {} {}", wl[i - 2], wl[i - 1], wl[i]);
    let two_one = format!("{} {}", wl[i - 2], wl[i - 1]);
    let three_two_one = format!("{} {} {}", wl[i - 3], wl[i - 2], wl[i - 1]);
    let three_two = format!("{} {}", wl[i - 3], wl[i - 2]);

    for seq in [&one_zero, &two_one_zero, &two_one, &three_two_one, &three_two] {
        if let Some(v) = special_case(seq) {
            valence = v;
            break;
        }
    }
    if wl.len() - 1 > i {
        if let Some(v) = special_case(&format!("{} {}", wl[i], wl[i + 1])) {
            valence = v;
        }
    }
    if wl.len() - 1 > i + 1 {
        if let Some(v) = special_case(&format!("{} {} {}", wl[i], wl[i + 1], wl[i + 2])) {
            valence = v;
        }
    }
    for gram in [&three_two_one, &three_two, &two_one] {
        if let Some(b) = boosters().get(gram.as_str()) {
            valence += b;
        }
    }
    valence
}

fn least_check(valence: f64, wl: &[String], i: usize, lex: &ValenceLexicon) -> f64 {
    if i > 1 && !lex.contains(&wl[i - 1]) && wl[i - 1] == "least" {
        if wl[i - 2] != "at" && wl[i - 2] != "very" {
            return valence * NEGATION_SCALAR;
        }
    } else if i > 0 && !lex.contains(&wl[i - 1]) && wl[i - 1] == "least" {
        return valence * NEGATION_SCALAR;
    }
    valence
}

fn token_valence(s: &Sentence<'_>, i: usize, lex: &ValenceLexicon) -> f64 {
    let wl = &s.lower;
    let Some(base) = lex.get(&wl[i]) else {
        return 0.0;
    };
    let mut valence = base;
    if wl[i] == "no" && i != wl.len() - 1 && lex.contains(&wl[i + 1]) {
        valence = 0.0;
    }
    if (i > 0 && wl[i - 1] == "no")
        || (i > 1 && wl[i - 2] == "no")
        || (i > 2 && wl[i - 3] == "no" && (wl[i - 1] == "or" || wl[i - 1] == "nor"))
    {
        valence = base * NEGATION_SCALAR;
    }
    if is_upper(s.words[i]) && s.cap_differential {
        if valence > 0.0 {
            valence += CAPS_INCR;
        } else {
            valence -= CAPS_INCR;
        }
    }
    for start in 0..3 {
        if i > start && !lex.contains(&wl[i - (start + 1)]) {
            let j = i - (start + 1);
            let mut scalar = booster_scalar(s.words[j], &wl[j], valence, s.cap_differential);
            if start == 1 && scalar != 0.0 {
                scalar *= 0.95;
            }
            if start == 2 && scalar != 0.0 {
                scalar *= 0.9;
            }
            valence += scalar;
            valence = negation_check(valence, wl, start, i);
            if start == 2 {
                valence = idiom_check(valence, wl, i);
            }
        }
    }
    least_check(valence, wl, i, lex)
}

/// Halves valences before the first "but" and boosts those after it by 1.5.
///
/// Positions are looked up by value (first equal element), which matters when
/// several tokens share a valence; the reference scorer behaves the same way
/// and golden values depend on it.
fn but_check(wl: &[String], sentiments: &mut [f64]) {
    let Some(bi) = wl.iter().position(|w| w == "but") else {
        return;
    };
    for p in 0..sentiments.len() {
        let v = sentiments[p];
        let si = sentiments.iter().position(|x| *x == v).unwrap_or(p);
        if si < bi {
            sentiments[si] = v * 0.5;
        } else if si > bi {
            sentiments[si] = v * 1.5;
        }
    }
}

fn punctuation_emphasis(text: &str) -> f64 {
    let ep = text.matches('!').count().min(4) as f64 * 0.292;
    let qm_count = text.matches('?').count();
    let qm = match qm_count {
        0 | 1 => 0.0,
        2 | 3 => qm_count as f64 * 0.18,
        _ => 0.96,
    };
    ep + qm
}

/// `s / sqrt(s^2 + alpha)`, clamped to [-1, 1].
pub fn normalize_compound(sum: f64) -> f64 {
    (sum / (sum * sum + ALPHA).sqrt()).clamp(-1.0, 1.0)
}

/// Per-token adjusted valences, after the "but" rule.
pub fn token_sentiments(text: &str, lex: &ValenceLexicon) -> Vec<f64> {
    let sentence = Sentence::new(text.trim());
    let n = sentence.words.len();
    let mut sentiments = Vec::with_capacity(n);
    for i in 0..n {
        let w = &sentence.lower[i];
        if boosters().contains_key(w.as_str()) || (i + 1 < n && w == "kind" && sentence.lower[i + 1] == "of") {
            sentiments.push(0.0);
            continue;
        }
        sentiments.push(token_valence(&sentence, i, lex));
    }
    but_check(&sentence.lower, &mut sentiments);
    sentiments
}

pub fn polarity_scores(text: &str, lex: &ValenceLexicon) -> PolarityScore {
    let text = text.trim();
    let sentiments = token_sentiments(text, lex);
    if sentiments.is_empty() {
        return PolarityScore::neutral();
    }
    let mut sum: f64 = sentiments.iter().sum();
    let emphasis = punctuation_emphasis(text);
    if sum > 0.0 {
        sum += emphasis;
    } else if sum < 0.0 {
        sum -= emphasis;
    }
    let compound = normalize_compound(sum);

    let mut pos_sum = 0.0;
    let mut neg_sum = 0.0;
    let mut neu_count = 0.0;
    for &s in &sentiments {
        if s > 0.0 {
            pos_sum += s + 1.0;
        }
        if s < 0.0 {
            neg_sum += s - 1.0;
        }
        if s == 0.0 {
            neu_count += 1.0;
        }
    }
    if pos_sum > neg_sum.abs() {
        pos_sum += emphasis;
    } else if pos_sum < neg_sum.abs() {
        neg_sum -= emphasis;
    }
    let total = pos_sum + neg_sum.abs() + neu_count;
    PolarityScore {
        compound,
        pos: (pos_sum / total).abs(),
        neg: (neg_sum / total).abs(),
        neu: (neu_count / total).abs(),
    }
}
