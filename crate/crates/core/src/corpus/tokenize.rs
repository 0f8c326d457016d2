use alloc::string::{String, ToString};
use alloc::vec::Vec;

// Whole-word splits from the Treebank tokenizer's contraction tables.
const SPLIT_WORDS: &[(&str, &str)] = &[
    ("cannot", "can"),
    ("d'ye", "d"),
    ("gimme", "gim"),
    ("gonna", "gon"),
    ("gotta", "got"),
    ("lemme", "lem"),
    ("more'n", "more"),
    ("wanna", "wan"),
    ("'tis", "'t"),
    ("'twas", "'t"),
];

const CLITICS_LONG: &[&str] = &["n't", "'ll", "'re", "'ve"];
const CLITICS_SHORT: &[&str] = &["'s", "'m", "'d"];

fn split_clitic(word: &str, out: &mut Vec<String>) {
    // "'s|'m|'d|'" first, then "'ll|'re|'ve|n't", each requiring a preceding
    // character that is not an apostrophe.
    let preceded_ok = |stem: &str| stem.chars().last().is_some_and(|c| c != '\'');
    for suffix in CLITICS_SHORT.iter().copied().chain(core::iter::once("'")) {
        if let Some(stem) = word.strip_suffix(suffix) {
            if preceded_ok(stem) {
                split_clitic(stem, out);
                out.push(suffix.to_string());
                return;
            }
        }
    }
    for suffix in CLITICS_LONG {
        if let Some(stem) = word.strip_suffix(suffix) {
            if preceded_ok(stem) {
                out.push(stem.to_string());
                out.push(suffix.to_string());
                return;
            }
        }
    }
    out.push(word.to_string());
}

/// Penn Treebank style tokenization of already-normalized text: whitespace
/// splitting, then contraction and clitic splitting (`don't` → `do`, `n't`).
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        if let Some(&(whole, head)) = SPLIT_WORDS.iter().find(|(w, _)| *w == word) {
            out.push(head.to_string());
            out.push(whole[head.len()..].to_string());
            continue;
        }
        split_clitic(word, &mut out);
    }
    out
}
