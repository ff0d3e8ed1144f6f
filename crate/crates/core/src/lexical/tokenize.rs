use std::ops::Range;

use serde::{Deserialize, Serialize};

/// Emoticons recognised as single tokens. Longer forms come first so the
/// scan can stop at the first hit.
pub const EMOTICONS: &[&str] = &[
    ":'-(", ":'-)", ">:-(", ">:(", ":-)", ":-(", ":-D", ":-P", ":-p", ":-/", ":-|", ":-o", ":-O",
    ";-)", "^_^", "-_-", ":'(", ":')", ":)", ":(", ":D", ":P", ":p", ":/", ":|", ":o", ":O", ";)",
    "<3", "</3", "=)", "=(",
];

const PLACEHOLDERS: &[&str] = &["<USER>", "<URL>", "<EMAIL>"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Word,
    Emoticon,
    Punct,
    Quote,
    /// Anonymization marker such as `<USER>`.
    Placeholder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Normalized form: lowercased words, `"` for every double quote.
    pub text: String,
    /// Text as written, used for case-sensitive cues.
    pub surface: String,
    pub kind: TokenKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    /// Contiguous, in order, covering every token.
    pub sentence_bounds: Vec<Range<usize>>,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    /// Lowercased word tokens in order.
    pub fn words(&self) -> Vec<&str> {
        self.tokens
            .iter()
            .filter(|t| t.kind == TokenKind::Word)
            .map(|t| t.text.as_str())
            .collect()
    }

    pub fn n_sentences(&self) -> usize {
        self.sentence_bounds.len()
    }

    pub fn sentences(&self) -> impl Iterator<Item = &[Token]> {
        self.sentence_bounds.iter().map(|r| &self.tokens[r.clone()])
    }
}

fn is_emoji(c: char) -> bool {
    matches!(u32::from(c), 0x1F300..=0x1FAFF | 0x2600..=0x27BF)
}

fn is_double_quote(c: char) -> bool {
    matches!(c, '"' | '\u{201C}' | '\u{201D}')
}

fn is_single_quote(c: char) -> bool {
    matches!(c, '\'' | '\u{2018}' | '\u{2019}')
}

fn is_boundary(c: Option<char>) -> bool {
    c.is_none_or(|c| !c.is_alphanumeric())
}

/// Splits text into words, emoticons, punctuation runs, quotes and
/// anonymization placeholders.
///
/// A sentence ends after a punctuation token made only of `.`, `!` and `?`
/// that is followed by whitespace or the end of the text.
pub fn tokenize(text: &str) -> TokenStream {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut tokens: Vec<Token> = Vec::new();
    let mut ends_sentence: Vec<bool> = Vec::new();
    let mut i = 0;
    let starts_with = |i: usize, pat: &str| -> bool {
        let mut j = i;
        for pc in pat.chars() {
            if j >= n || chars[j] != pc {
                return false;
            }
            j += 1;
        }
        true
    };

    while i < n {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }

        if let Some(p) = PLACEHOLDERS.iter().find(|p| starts_with(i, p)) {
            let len = p.chars().count();
            tokens.push(Token {
                text: p.to_lowercase(),
                surface: (*p).to_string(),
                kind: TokenKind::Placeholder,
            });
            ends_sentence.push(false);
            i += len;
            continue;
        }

        if !c.is_alphanumeric() {
            let emoticon = EMOTICONS.iter().find(|e| {
                let len = e.chars().count();
                starts_with(i, e) && is_boundary(chars.get(i + len).copied())
            });
            if let Some(e) = emoticon {
                tokens.push(Token {
                    text: (*e).to_string(),
                    surface: (*e).to_string(),
                    kind: TokenKind::Emoticon,
                });
                ends_sentence.push(false);
                i += e.chars().count();
                continue;
            }
        }

        if c.is_alphanumeric() {
            let start = i;
            let mut surface = String::new();
            while i < n {
                let ch = chars[i];
                let next_alnum = chars.get(i + 1).is_some_and(|c| c.is_alphanumeric());
                let prev_digit = i > start && chars[i - 1].is_ascii_digit();
                let next_digit = chars.get(i + 1).is_some_and(|c| c.is_ascii_digit());
                if ch.is_alphanumeric() {
                    surface.push(ch);
                } else if is_single_quote(ch) && next_alnum {
                    surface.push('\'');
                } else if ch == '-' && next_alnum && chars[i - 1].is_alphanumeric() {
                    surface.push('-');
                } else if (ch == '.' || ch == ',') && prev_digit && next_digit {
                    surface.push(ch);
                } else {
                    break;
                }
                i += 1;
            }
            tokens.push(Token {
                text: surface.to_lowercase(),
                surface,
                kind: TokenKind::Word,
            });
            ends_sentence.push(false);
            continue;
        }

        if is_double_quote(c) || is_single_quote(c) {
            let text = if is_double_quote(c) { "\"" } else { "'" };
            tokens.push(Token {
                text: text.to_string(),
                surface: c.to_string(),
                kind: TokenKind::Quote,
            });
            ends_sentence.push(false);
            i += 1;
            continue;
        }

        if is_emoji(c) {
            tokens.push(Token {
                text: c.to_string(),
                surface: c.to_string(),
                kind: TokenKind::Emoticon,
            });
            ends_sentence.push(false);
            i += 1;
            continue;
        }

        // Punctuation run: a mixed run of `!`/`?`, or repeats of one char.
        let start = i;
        if c == '!' || c == '?' {
            while i < n && (chars[i] == '!' || chars[i] == '?') {
                i += 1;
            }
        } else {
            while i < n && chars[i] == c {
                i += 1;
            }
        }
        let run: String = chars[start..i].iter().collect();
        let terminal = run.chars().all(|c| matches!(c, '.' | '!' | '?'))
            && chars.get(i).is_none_or(|c| c.is_whitespace());
        tokens.push(Token {
            text: run.clone(),
            surface: run,
            kind: TokenKind::Punct,
        });
        ends_sentence.push(terminal);
    }

    let mut sentence_bounds = Vec::new();
    let mut start = 0;
    for (k, &end) in ends_sentence.iter().enumerate() {
        if end {
            sentence_bounds.push(start..k + 1);
            start = k + 1;
        }
    }
    if start < tokens.len() {
        sentence_bounds.push(start..tokens.len());
    }
    TokenStream {
        tokens,
        sentence_bounds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_sentences_with_bang_run() {
        let ts = tokenize("I feel low. Help!!");
        assert_eq!(ts.texts(), ["i", "feel", "low", ".", "help", "!!"]);
        assert_eq!(ts.sentence_bounds, vec![0..4, 4..6]);
    }

    #[test]
    fn empty_text() {
        let ts = tokenize("");
        assert!(ts.is_empty());
        assert_eq!(ts.n_sentences(), 0);
    }

    #[test]
    fn emoticons_survive() {
        let ts = tokenize("so sad :( but ok :-) now");
        assert_eq!(ts.texts(), ["so", "sad", ":(", "but", "ok", ":-)", "now"]);
        assert_eq!(ts.tokens[2].kind, TokenKind::Emoticon);
        // Colon inside a clause is not an emoticon.
        let ts = tokenize("note:(see)");
        assert!(ts.tokens.iter().all(|t| t.kind != TokenKind::Emoticon));
        // Emoticon dots never end a sentence.
        assert_eq!(tokenize("fine :) really").n_sentences(), 1);
    }

    #[test]
    fn words_keep_apostrophes_and_numbers() {
        let ts = tokenize("Don’t pay $3.50, it's 1,000 WAY too much...");
        assert_eq!(
            ts.texts(),
            ["don't", "pay", "$", "3.50", ",", "it's", "1,000", "way", "too", "much", "..."]
        );
        assert_eq!(ts.tokens[7].surface, "WAY");
    }

    #[test]
    fn quotes_and_placeholders() {
        let ts = tokenize("she said “help” to <USER>");
        let kinds: Vec<TokenKind> = ts.tokens.iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            [
                TokenKind::Word,
                TokenKind::Word,
                TokenKind::Quote,
                TokenKind::Word,
                TokenKind::Quote,
                TokenKind::Word,
                TokenKind::Placeholder
            ]
        );
        assert_eq!(ts.tokens[2].text, "\"");
        assert_eq!(ts.tokens[6].text, "<user>");
    }

    #[test]
    fn punctuation_runs() {
        let ts = tokenize("what?!? no... ok");
        assert_eq!(ts.texts(), ["what", "?!?", "no", "...", "ok"]);
        assert_eq!(ts.n_sentences(), 3);
        // A period not followed by whitespace does not split.
        assert_eq!(tokenize("a.b c").n_sentences(), 1);
    }

    proptest! {
        #[test]
        fn bounds_partition_tokens(s in "\\PC{0,80}") {
            let ts = tokenize(&s);
            let mut at = 0;
            for r in &ts.sentence_bounds {
                prop_assert_eq!(r.start, at);
                prop_assert!(r.end > r.start);
                at = r.end;
            }
            prop_assert_eq!(at, ts.len());
            prop_assert_eq!(tokenize(&s), ts);
        }
    }
}
