//! Sentiment amplifier cues.

use serde::{Deserialize, Serialize};

use super::tokenize::{TokenKind, TokenStream, EMOTICONS};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmplifierConfig {
    pub interjection_phrases: Vec<String>,
    pub acronyms: Vec<String>,
    pub emoticon_patterns: Vec<String>,
}

const INTERJECTIONS: &[&str] = &[
    "oh please",
    "oh no",
    "oh well",
    "oh god",
    "oh my god",
    "yeah right",
    "as if",
    "ugh",
    "ouch",
    "alas",
    "oops",
    "yikes",
    "gosh",
    "sigh",
    "meh",
];

const ACRONYMS: &[&str] = &[
    "lol", "omg", "smh", "wtf", "idk", "imo", "tbh", "fml", "rofl", "lmao", "ikr", "ffs", "jk",
    "irl", "ftw",
];

impl Default for AmplifierConfig {
    fn default() -> Self {
        let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect();
        AmplifierConfig {
            interjection_phrases: own(INTERJECTIONS),
            acronyms: own(ACRONYMS),
            emoticon_patterns: own(EMOTICONS),
        }
    }
}

pub const SA_WIDTH: usize = 7;
pub const SA_NAMES: [&str; SA_WIDTH] = [
    "emoticon",
    "exclamation_run",
    "all_caps",
    "quoted_span",
    "interjection",
    "acronym",
    "elongation",
];

fn is_all_caps(surface: &str) -> bool {
    let letters = surface.chars().filter(|c| c.is_alphabetic()).count();
    letters >= 2 && !surface.chars().any(char::is_lowercase)
}

fn is_elongated(word: &str) -> bool {
    let mut prev = None;
    let mut run = 0;
    for c in word.chars() {
        if Some(c) == prev && c.is_alphabetic() {
            run += 1;
            if run >= 3 {
                return true;
            }
        } else {
            run = 1;
            prev = Some(c);
        }
    }
    false
}

/// Seven presence flags, in [`SA_NAMES`] order.
pub fn amplifier_features(doc: &TokenStream, cfg: &AmplifierConfig) -> [f64; SA_WIDTH] {
    let toks = &doc.tokens;
    let emoticon = toks.iter().any(|t| {
        (t.kind == TokenKind::Emoticon && t.text.chars().count() == 1)
            || cfg.emoticon_patterns.iter().any(|p| *p == t.text)
    });
    let exclamation = toks
        .iter()
        .any(|t| t.kind == TokenKind::Punct && t.text.matches('!').count() >= 2);
    let caps = toks
        .iter()
        .any(|t| t.kind == TokenKind::Word && is_all_caps(&t.surface));
    let quotes = |q: &str| {
        toks.iter()
            .filter(|t| t.kind == TokenKind::Quote && t.text == q)
            .count()
    };
    let quoted = quotes("\"") >= 2 || quotes("'") >= 2;

    let words = doc.words();
    let joined = format!(" {} ", words.join(" "));
    let interjection = cfg
        .interjection_phrases
        .iter()
        .any(|p| joined.contains(&format!(" {} ", p.to_lowercase())));
    let acronym = words
        .iter()
        .any(|w| cfg.acronyms.iter().any(|a| a.eq_ignore_ascii_case(w)));
    let elongation = words.iter().any(|w| is_elongated(w));

    [
        emoticon,
        exclamation,
        caps,
        quoted,
        interjection,
        acronym,
        elongation,
    ]
    .map(|b| f64::from(u8::from(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexical::tokenize;
    use proptest::prelude::*;

    fn sa(s: &str) -> [f64; SA_WIDTH] {
        amplifier_features(&tokenize(s), &AmplifierConfig::default())
    }

    #[test]
    fn oh_please() {
        assert_eq!(sa("Oh please! whatever")[4], 1.0);
    }

    #[test]
    fn plain_text_is_zero() {
        assert_eq!(sa("i am fine"), [0.0; SA_WIDTH]);
    }

    #[test]
    fn quote_and_emoticon() {
        let f = sa("she said \"help\" :)");
        assert_eq!(f[0], 1.0);
        assert_eq!(f[3], 1.0);
        assert_eq!(f.iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn remaining_cues() {
        assert_eq!(sa("help!!")[1], 1.0);
        assert_eq!(sa("help!")[1], 0.0);
        assert_eq!(sa("I am NOT ok")[2], 1.0);
        assert_eq!(sa("I am ok")[2], 0.0);
        assert_eq!(sa("omg")[5], 1.0);
        assert_eq!(sa("sooo tired")[6], 1.0);
        assert_eq!(sa("too tired")[6], 0.0);
        assert_eq!(sa("crying 😢")[0], 1.0);
    }

    proptest! {
        #[test]
        fn always_binary(s in "\\PC{0,60}") {
            for v in sa(&s) {
                prop_assert!(v == 0.0 || v == 1.0);
            }
        }
    }
}
