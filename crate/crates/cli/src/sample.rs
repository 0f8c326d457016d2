//! Generator for the bundled sample corpus: a labeled set for the relevancy
//! classifier and a dated collection whose themes drift week by week.
//!
//! Output is a pure function of the seed.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_xoshiro::Xoshiro256StarStar;
use topictrace_core::corpus::{clean_tokens, Label, PreprocessConfig, RawDocument};
use topictrace_core::time::{Day, Timestamp};
use topictrace_core::trends::{EventTimeline, TimelineEntry};

use crate::synth::{categorical, rng};

const THEMES: [&[&str]; 8] = [
    // origin of the virus
    &[
        "wuhan", "seafood market", "bats", "pangolin", "wet market", "spillover", "origin", "novel virus",
        "animal source", "genome sequence", "lab theory", "first patients", "mystery pneumonia", "zoonotic",
        "outbreak source", "virologists", "hubei", "sample traced",
    ],
    // case statistics
    &[
        "confirmed cases", "death toll", "new cases", "cases rise", "tally", "recovered patients", "infections",
        "reported today", "daily numbers", "the curve", "per capita", "positive tests", "case count",
        "fatality rate", "dashboard", "doubling time", "statistics", "deaths reported",
    ],
    // lockdown and distancing
    &[
        "stay home", "lockdown", "quarantine", "social distancing", "shelter in place", "schools closed",
        "work from home", "curfew", "self isolation", "flatten the curve", "closed borders", "travel ban",
        "empty streets", "remote classes", "zoom meetings", "essential trips", "gatherings banned",
    ],
    // economy and business
    &[
        "stock market", "unemployment", "small business", "layoffs", "stimulus", "economy", "recession",
        "supply chain", "oil prices", "relief package", "restaurants closing", "jobless claims", "rent relief",
        "retail sales", "bailout", "markets tumble", "payroll loans",
    ],
    // health care workers and equipment
    &[
        "nurses", "doctors", "hospital", "ventilators", "face masks", "ppe shortage", "icu beds",
        "frontline workers", "testing kits", "healthcare heroes", "field hospital", "n95 respirators",
        "medical staff", "overwhelmed wards", "protective gear", "clap for carers",
    ],
    // treatment and vaccine research
    &[
        "vaccine trial", "remdesivir", "hydroxychloroquine", "antibody test", "clinical trial", "treatment",
        "researchers", "antiviral drug", "immunity", "convalescent plasma", "vaccine candidate", "drug study",
        "trial results", "phase one", "scientists race", "peer review",
    ],
    // politics and government response
    &[
        "president", "governor", "white house", "briefing", "task force", "congress", "administration",
        "press conference", "senate vote", "federal response", "mayor", "prime minister", "policy",
        "emergency powers", "officials", "government",
    ],
    // personal feelings and everyday life
    &[
        "feel", "scared", "family", "pray", "hope", "anxious", "miss my friends", "love", "together",
        "stay safe", "mental health", "grandma", "bored", "worried", "grateful", "lonely", "kindness",
    ],
];

const NOISE: &[&str] = &[
    "giveaway", "follow us", "win", "crypto", "bitcoin", "cold beer", "lime", "new game", "playlist",
    "album drop", "concert", "discount code", "promo", "flash sale", "fashion", "horoscope", "recipe",
    "cute puppy", "football", "goal", "match tonight", "streaming now", "merch", "free shipping",
    "lottery", "dating app", "nft", "skincare", "sneakers", "fantasy league", "makeup tutorial",
];

const OPENERS: &[&str] = &["", "", "", "", "", "", "", "", "BREAKING:", "Update:", "Just saw this,", "Honestly", "Thread:", "Wow", "Read this:"];
const JOINERS: &[&str] = &["and", "while", "as", "but", "after", "with", "because", "amid"];
const TAGS: &[&str] = &["#COVID-19", "#coronavirus", "#SARS-nCoV", "#StayHome", "#pandemic", "#news", ""];
const EMOJI: &[&str] = &["", "", "\u{1F637}", "\u{1F64F}", "\u{1F622}", "\u{2764}\u{FE0F}", ":)", "\u{1F62D}"];
const HANDLES: &[&str] = &["@who", "@cdcgov", "@nytimes", "@bbcworld", "@reuters", "@friend", "@mom"];
const FILLER: &[&str] = &[
    "today", "again", "now", "really", "this week", "tonight", "everyone", "people", "world", "city",
    "country", "morning", "update", "news", "latest", "local", "global", "community",
];

fn pick<'a>(r: &mut Xoshiro256StarStar, items: &[&'a str]) -> &'a str {
    items.choose(r).copied().unwrap_or("")
}

fn url(r: &mut Xoshiro256StarStar) -> String {
    const ALNUM: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    let code: String = (0..10).map(|_| ALNUM[r.gen_range(0..ALNUM.len())] as char).collect();
    format!("https://t.co/{code}")
}

/// Text drawn from one theme bank (or the noise bank when `theme` is None).
fn compose(r: &mut Xoshiro256StarStar, theme: Option<usize>) -> String {
    let bank: &[&str] = match theme {
        Some(t) => THEMES[t],
        None => NOISE,
    };
    let mut parts: Vec<String> = Vec::new();
    let opener = pick(r, OPENERS);
    if !opener.is_empty() {
        parts.push(opener.to_string());
    }
    if r.gen_bool(0.2) {
        parts.push(pick(r, HANDLES).to_string());
    }
    let n_phrases = r.gen_range(3..=6);
    for i in 0..n_phrases {
        if i > 0 {
            parts.push(pick(r, JOINERS).to_string());
        }
        let phrase = if theme.is_none() && r.gen_bool(0.15) {
            // keyword-matched noise sometimes borrows pandemic vocabulary
            let borrowed = THEMES[r.gen_range(0..THEMES.len())];
            pick(r, borrowed).to_string()
        } else {
            pick(r, bank).to_string()
        };
        parts.push(phrase);
        if r.gen_bool(0.1) {
            parts.push(pick(r, FILLER).to_string());
        }
    }
    if theme == Some(1) && r.gen_bool(0.5) {
        parts.push(format!("{}", r.gen_range(10..50_000)));
    }
    let tag = pick(r, TAGS);
    if !tag.is_empty() {
        parts.push(tag.to_string());
    }
    if r.gen_bool(0.5) {
        parts.push(url(r));
    }
    let e = pick(r, EMOJI);
    if !e.is_empty() {
        parts.push(e.to_string());
    }
    let mut text = parts.join(" ");
    if r.gen_bool(0.3) {
        text.push('!');
    }
    text
}

pub fn study_start() -> Day {
    Day::from_ymd(2020, 1, 1)
}

pub fn study_end() -> Day {
    Day::from_ymd(2020, 4, 30)
}

/// Relative weight of each theme on day `t` (0 = Jan 1).
fn theme_weights(t: f64) -> [f64; 8] {
    let bump = |center: f64, width: f64| (-(t - center).powi(2) / (2.0 * width * width)).exp();
    let ramp = |start: f64| 1.0 / (1.0 + (-(t - start) / 5.0).exp());
    [
        0.2 + 3.0 * bump(10.0, 14.0),
        0.3 + 1.5 * ramp(35.0),
        0.1 + 2.5 * ramp(70.0) * (1.0 - 0.3 * ramp(110.0)),
        0.1 + 2.0 * bump(80.0, 12.0),
        0.1 + 2.0 * ramp(75.0),
        0.1 + 2.0 * ramp(95.0) + 1.5 * bump(118.0, 4.0),
        0.4 + 1.0 * bump(74.0, 10.0),
        0.6,
    ]
}

/// Daily post volume grows through the study window.
fn volume(t: f64) -> f64 {
    1.0 + 6.0 / (1.0 + (-(t - 60.0) / 10.0).exp())
}

fn timestamp_on(r: &mut Xoshiro256StarStar, day: Day) -> Timestamp {
    Timestamp(day.start().0 + r.gen_range(0..86_400))
}

/// Draws texts until one is new after preprocessing.
fn unique_text(
    r: &mut Xoshiro256StarStar,
    theme: Option<usize>,
    config: &PreprocessConfig,
    seen: &mut BTreeSet<Vec<String>>,
) -> String {
    loop {
        let text = compose(r, theme);
        let tokens = clean_tokens(&text, config);
        if !tokens.is_empty() && seen.insert(tokens) {
            return text;
        }
    }
}

/// 1,500 labeled documents: 1,154 relevant and 346 irrelevant, all distinct
/// after preprocessing.
pub fn labeled_sample(seed: u64) -> Vec<RawDocument> {
    let mut r = rng(seed);
    let config = PreprocessConfig::default();
    let mut seen = BTreeSet::new();
    let days = (study_end().0 - study_start().0 + 1) as usize;
    let mut labels: Vec<Label> = std::iter::repeat_n(Label::Relevant, 1154)
        .chain(std::iter::repeat_n(Label::Irrelevant, 346))
        .collect();
    labels.shuffle(&mut r);
    labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let day = study_start().plus(r.gen_range(0..days) as i64);
            let theme = match label {
                Label::Relevant => Some(categorical(&mut r, &theme_weights((day.0 - study_start().0) as f64))),
                Label::Irrelevant => None,
            };
            let text = unique_text(&mut r, theme, &config, &mut seen);
            RawDocument { id: format!("L{i:04}"), text, timestamp: timestamp_on(&mut r, day), label: Some(label) }
        })
        .collect()
}

/// The unlabeled collection: `n` posts, about 20% keyword-matched noise,
/// about 10% reposts that differ only in URL or hashtag, and a few posts
/// that are empty once cleaned.
pub fn collection_sample(n: usize, seed: u64) -> Vec<RawDocument> {
    let mut r = rng(seed);
    let days: Vec<Day> = (study_start().0..=study_end().0).map(Day).collect();
    let vol: Vec<f64> = days.iter().map(|d| volume((d.0 - study_start().0) as f64)).collect();
    let mut docs: Vec<RawDocument> = Vec::with_capacity(n);
    for i in 0..n {
        let id = format!("C{i:05}");
        let roll: f64 = r.gen();
        if roll < 0.10 && !docs.is_empty() {
            let src = docs[r.gen_range(0..docs.len())].clone();
            let later = src.timestamp.day().plus(r.gen_range(0..3)).min(study_end());
            let text = if r.gen_bool(0.5) {
                format!("{} {}", src.text, url(&mut r))
            } else {
                format!("{} #COVID-19", src.text)
            };
            docs.push(RawDocument { id, text, timestamp: timestamp_on(&mut r, later), label: None });
            continue;
        }
        let day = days[categorical(&mut r, &vol)];
        let text = if roll < 0.11 {
            format!("{} {}", url(&mut r), pick(&mut r, &EMOJI[2..]))
        } else if roll < 0.31 {
            compose(&mut r, None)
        } else {
            let theme = categorical(&mut r, &theme_weights((day.0 - study_start().0) as f64));
            compose(&mut r, Some(theme))
        };
        docs.push(RawDocument { id, text, timestamp: timestamp_on(&mut r, day), label: None });
    }
    docs
}

/// Event periods for the study window, in plain descriptive terms.
pub fn sample_timeline() -> EventTimeline {
    let d = |m, day| Day::from_ymd(2020, m, day);
    let e = |s, t, text: &str| TimelineEntry { start: s, end: t, description: text.to_string() };
    EventTimeline::new(vec![
        e(d(1, 1), d(1, 11), "Unexplained pneumonia cluster in Wuhan linked to a new coronavirus"),
        e(d(1, 12), d(1, 31), "First cases confirmed abroad; international health emergency declared on Jan 30"),
        e(d(2, 1), d(2, 29), "Disease receives its official name; outbreaks grow in several countries"),
        e(d(3, 1), d(3, 14), "Outbreak declared a pandemic on Mar 11; national emergencies follow"),
        e(d(3, 15), d(3, 31), "Stay-at-home orders spread; large economic relief bill signed"),
        e(d(4, 1), d(4, 15), "Worldwide confirmed cases pass one million; shortages of protective equipment"),
        e(d(4, 16), d(4, 30), "Early antiviral trial results announced; debate over reopening"),
    ])
    .expect("valid timeline")
}

pub const SAMPLE_CONFIG: &str = r#"# Bundled sample run. Paths are relative to this file.
seed = 42
out = "../../out/sample"

[paths]
labeled = "labeled.jsonl"
corpus = "corpus.jsonl"
timeline = "timeline.json"

[model]
kind = "svm"

[features]
kind = "tfidf"

[cv]
folds = 5

[lda]
k_min = 2
k_max = 10
coherence = "umass"

[trends]
origin = "2020-01-01"
top_m = 3
"#;

/// Master seed and collection size used for `data/sample`.
pub const SAMPLE_SEED: u64 = 2020;
pub const SAMPLE_COLLECTION: usize = 4000;

/// Writes `labeled.jsonl`, `corpus.jsonl`, `timeline.json` and `config.toml`
/// into `dir`.
pub fn write_sample(dir: &std::path::Path, seed: u64, n: usize) -> crate::error::CliResult<()> {
    use topictrace_core::rng::derive_seed;
    crate::io::write_raw(&dir.join("labeled.jsonl"), &labeled_sample(derive_seed(seed, "sample-labeled")))?;
    crate::io::write_raw(&dir.join("corpus.jsonl"), &collection_sample(n, derive_seed(seed, "sample-collection")))?;
    crate::io::write_timeline(&dir.join("timeline.json"), &sample_timeline())?;
    crate::io::write_text(&dir.join("config.toml"), SAMPLE_CONFIG)
}
