//! Word-category counts in the style of closed-vocabulary dictionaries.

use super::tokenize::TokenStream;
use super::ResourceError;

pub const REQUIRED_CATEGORIES: [&str; 5] = ["affect", "cognition", "work", "achievement", "home"];
pub const PF_GENERAL: [&str; 3] = ["word_count", "words_per_sentence", "mean_word_length"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Exact(String),
    Prefix(String),
}

impl Pattern {
    pub fn parse(s: &str) -> Self {
        let s = s.trim().to_lowercase();
        match s.strip_suffix('*') {
            Some(p) => Pattern::Prefix(p.to_string()),
            None => Pattern::Exact(s),
        }
    }

    pub fn matches(&self, word: &str) -> bool {
        match self {
            Pattern::Exact(w) => w == word,
            Pattern::Prefix(p) => word.starts_with(p.as_str()),
        }
    }
}

/// Categories in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryDictionary {
    categories: Vec<(String, Vec<Pattern>)>,
}

impl CategoryDictionary {
    /// Builds a dictionary without the required-category check.
    pub fn from_categories(categories: Vec<(String, Vec<Pattern>)>) -> Result<Self, ResourceError> {
        let mut seen = std::collections::HashSet::new();
        for (name, _) in &categories {
            if !seen.insert(name.clone()) {
                return Err(ResourceError::DuplicateCategory(name.clone()));
            }
        }
        Ok(CategoryDictionary { categories })
    }

    /// Sections `[name]` followed by one pattern per line; `#` comments.
    /// The five required categories must be present.
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut cats: Vec<(String, Vec<Pattern>)> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim().to_lowercase();
                if name.is_empty() {
                    return Err(ResourceError::invalid(
                        "dictionary",
                        n + 1,
                        "empty category name",
                    ));
                }
                cats.push((name, Vec::new()));
            } else {
                match cats.last_mut() {
                    Some((_, pats)) => pats.push(Pattern::parse(line)),
                    None => {
                        return Err(ResourceError::invalid(
                            "dictionary",
                            n + 1,
                            "pattern before any [category] header",
                        ))
                    }
                }
            }
        }
        let dict = Self::from_categories(cats)?;
        for req in REQUIRED_CATEGORIES {
            if !dict.categories.iter().any(|(c, _)| c == req) {
                return Err(ResourceError::MissingCategory(req.to_string()));
            }
        }
        Ok(dict)
    }

    pub fn names(&self) -> Vec<&str> {
        self.categories.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    /// Width of [`psycholinguistic_features`].
    pub fn width(&self) -> usize {
        PF_GENERAL.len() + self.categories.len()
    }
}

/// Word count, mean words per sentence, mean word length, then the share of
/// words matching each category.
pub fn psycholinguistic_features(doc: &TokenStream, d: &CategoryDictionary) -> Vec<f64> {
    let words = doc.words();
    let mut out = vec![0.0; d.width()];
    if words.is_empty() {
        return out;
    }
    let n = words.len() as f64;
    out[0] = n;
    out[1] = n / doc.n_sentences().max(1) as f64;
    out[2] = words.iter().map(|w| w.chars().count()).sum::<usize>() as f64 / n;
    for (k, (_, pats)) in d.categories.iter().enumerate() {
        let hits = words
            .iter()
            .filter(|w| pats.iter().any(|p| p.matches(w)))
            .count();
        out[PF_GENERAL.len() + k] = hits as f64 / n;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexical::tokenize;

    fn dict() -> CategoryDictionary {
        CategoryDictionary::from_categories(vec![
            ("work".into(), vec![Pattern::parse("work*")]),
            ("home".into(), vec![Pattern::parse("home")]),
        ])
        .unwrap()
    }

    #[test]
    fn wildcard_rule() {
        let f = psycholinguistic_features(&tokenize("work working home"), &dict());
        assert_eq!(&f[3..], &[2.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn general_counts() {
        let f = psycholinguistic_features(&tokenize("I feel low. Help me."), &dict());
        assert_eq!(f[0], 5.0);
        assert_eq!(f[1], 2.5);
        assert_eq!(f[2], 14.0 / 5.0);
        assert_eq!(
            psycholinguistic_features(&tokenize(""), &dict()),
            vec![0.0; 5]
        );
    }

    #[test]
    fn parse_requires_categories() {
        let ok =
            "[affect]\nsad*\n[cognition]\nthink\n[work]\njob\n[achievement]\nwin*\n[home]\nhouse\n";
        let d = CategoryDictionary::parse(ok).unwrap();
        assert_eq!(
            d.names(),
            ["affect", "cognition", "work", "achievement", "home"]
        );
        assert!(matches!(
            CategoryDictionary::parse("[affect]\nsad\n"),
            Err(ResourceError::MissingCategory(_))
        ));
        assert!(CategoryDictionary::parse("orphan\n").is_err());
        assert!(matches!(
            CategoryDictionary::parse(&format!("{ok}[home]\nflat\n")),
            Err(ResourceError::DuplicateCategory(_))
        ));
    }
}
