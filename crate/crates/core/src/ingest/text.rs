//! Paragraph extraction, sentence splitting and sentence cleaning.

use std::sync::OnceLock;

use regex::Regex;
use scraper::{Html, Selector};

/// Tokens that end with a period without ending a sentence.
pub const ABBREVIATIONS: &[&str] = &[
    // French
    "M", "MM", "Mme", "Mmes", "Mlle", "Mlles", "Mgr", "Me", "Dr", "Pr", "St", "Ste", "av", "apr",
    "J.-C", "env", "cf", "etc", "p", "pp", "vol", "n°", "no", "éd", "coll", "chap", "dir", "ca",
    // English
    "Mr", "Mrs", "Ms", "Prof", "Jr", "Sr", "Gen", "Col", "Lt", "Capt", "Rev", "vs", "e.g", "i.e",
];

fn regex(cell: &'static OnceLock<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pattern).expect("valid regex"))
}

/// Text content of every `<p>` element, in document order, with markup
/// stripped and whitespace collapsed. Empty paragraphs are dropped.
pub fn extract_page_paragraphs(html: &str) -> Vec<String> {
    let doc = Html::parse_document(html);
    let selector = Selector::parse("p").expect("valid selector");
    doc.select(&selector)
        .map(|p| collapse_ws(&p.text().collect::<String>()))
        .filter(|t| !t.is_empty())
        .collect()
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn is_protected(word: &str) -> bool {
    let word = word.trim_start_matches(|c: char| !c.is_alphanumeric());
    if ABBREVIATIONS.contains(&word) {
        return true;
    }
    // single-letter initials: "J. Dupont", "J.-K."
    let last = word.rsplit(['.', '-']).next().unwrap_or(word);
    let mut chars = last.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if c.is_uppercase())
}

/// Splits a paragraph after `.`, `!` or `?` (plus closing quotes or
/// brackets) when followed by whitespace and an uppercase letter, or by the
/// end of the text. Abbreviations and initials do not end sentences.
pub fn split_sentences(paragraph: &str) -> Vec<String> {
    static BOUNDARY: OnceLock<Regex> = OnceLock::new();
    let boundary = regex(&BOUNDARY, r#"[.!?…]+["»”’)\]]*\s+"#);

    let mut sentences = Vec::new();
    let mut start = 0;
    for m in boundary.find_iter(paragraph) {
        let next = paragraph[m.end()..].chars().next();
        if !next.is_some_and(char::is_uppercase) {
            continue;
        }
        let before = &paragraph[start..m.start()];
        let word = before.rsplit(char::is_whitespace).next().unwrap_or(before);
        let terminal = m.as_str().trim_end();
        if terminal.starts_with('.') && !terminal.starts_with("..") && is_protected(word) {
            continue;
        }
        let sentence = paragraph[start..m.end()].trim();
        if !sentence.is_empty() {
            sentences.push(sentence.to_string());
        }
        start = m.end();
    }
    let rest = paragraph[start..].trim();
    if !rest.is_empty() {
        sentences.push(rest.to_string());
    }
    sentences
}

/// Removes bracketed spans and stray symbols from a sentence.
///
/// Returns `None` when the cleaned sentence is empty or starts with a
/// non-alphanumeric character. Isolated `. , ; : ! ?` tokens are attached to
/// the preceding word; other isolated symbol tokens are removed.
pub fn clean_sentence(sentence: &str) -> Option<String> {
    static PARENS: OnceLock<Regex> = OnceLock::new();
    static SQUARE: OnceLock<Regex> = OnceLock::new();
    let parens = regex(&PARENS, r"\s*\([^()]*\)");
    let square = regex(&SQUARE, r"\s*\[[^\[\]]*\]");

    let mut s = sentence.to_string();
    loop {
        let next = square
            .replace_all(&parens.replace_all(&s, ""), "")
            .into_owned();
        if next == s {
            break;
        }
        s = next;
    }
    let s = collapse_ws(&s);
    if !s.chars().next()?.is_alphanumeric() {
        return None;
    }

    let mut out: Vec<String> = Vec::new();
    for tok in s.split(' ') {
        if tok.chars().any(char::is_alphanumeric) {
            out.push(tok.to_string());
        } else if tok.chars().all(|c| ".,;:!?…".contains(c)) {
            if let Some(prev) = out.last_mut() {
                prev.push_str(tok);
            }
        }
    }
    let cleaned = out.join(" ");
    (!cleaned.is_empty()).then_some(cleaned)
}
