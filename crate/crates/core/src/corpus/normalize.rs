use alloc::string::String;

use super::PreprocessConfig;

fn is_url(chunk: &str) -> bool {
    chunk.starts_with("http://") || chunk.starts_with("https://") || chunk.starts_with("www.")
}

fn keep_char(c: char, config: &PreprocessConfig) -> bool {
    if c == '\'' {
        return true;
    }
    if !config.strip_mentions_hashmarks && (c == '#' || c == '@') {
        return true;
    }
    if config.strip_non_ascii {
        c.is_ascii_alphanumeric()
    } else {
        c.is_alphanumeric()
    }
}

fn is_keyword(chunk: &str, config: &PreprocessConfig) -> bool {
    let core = chunk
        .trim_matches(|c: char| c == '#' || c == '@')
        .trim_matches(|c: char| !c.is_alphanumeric());
    !core.is_empty() && config.collection_keywords.contains(core)
}

/// Lowercases and strips URLs, collection keywords, `#`/`@`, punctuation and
/// anything outside ASCII letters, digits and the apostrophe. Removed
/// characters become spaces; whitespace runs collapse to one space.
///
/// Keywords are matched per whitespace-delimited chunk, once with the chunk's
/// own punctuation (so `#covid-19` matches) and once after character
/// filtering (so `coronavirus/flu` loses `coronavirus`).
pub fn normalize(text: &str, config: &PreprocessConfig) -> String {
    let lower = text.to_lowercase();
    let mut filtered = String::with_capacity(lower.len());
    for chunk in lower.split_whitespace() {
        if config.strip_urls && is_url(chunk) {
            continue;
        }
        if is_keyword(chunk, config) {
            continue;
        }
        filtered.push(' ');
        for c in chunk.chars() {
            filtered.push(if keep_char(c, config) { c } else { ' ' });
        }
    }
    let mut out = String::with_capacity(filtered.len());
    for word in filtered.split_whitespace() {
        if is_keyword(word, config) {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}
