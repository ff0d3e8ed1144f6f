use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::schema::Corpus;

/// Invariant a corpus record can break.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    CategoryLabelMismatch,
    AnnotatorArity,
    EmptyText,
    EmptyResponseText,
    NegativeHours,
    NegativeLikes,
    DuplicateId,
    MissingImage,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::CategoryLabelMismatch => "category_label_mismatch",
            Rule::AnnotatorArity => "annotator_arity",
            Rule::EmptyText => "empty_text",
            Rule::EmptyResponseText => "empty_response_text",
            Rule::NegativeHours => "negative_hours",
            Rule::NegativeLikes => "negative_likes",
            Rule::DuplicateId => "duplicate_id",
            Rule::MissingImage => "missing_image",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub post_id: String,
    pub rule: Rule,
    pub detail: String,
}

/// Required number of annotator labels when any are present.
pub const ANNOTATORS: usize = 4;

/// Checks every post and response invariant. An empty result means the
/// corpus is well formed.
pub fn validate_corpus(corpus: &Corpus) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |post_id: &str, rule: Rule, detail: String| {
        out.push(Violation {
            post_id: post_id.to_string(),
            rule,
            detail,
        })
    };

    for post in &corpus.posts {
        let id = post.id.as_str();
        if !seen.insert(id) {
            push(id, Rule::DuplicateId, "id appears more than once".into());
        }
        if post.category.expected_label() != post.label {
            push(
                id,
                Rule::CategoryLabelMismatch,
                format!("category {} with label {:?}", post.category, post.label),
            );
        }
        if !post.annotator_labels.is_empty() && post.annotator_labels.len() != ANNOTATORS {
            push(
                id,
                Rule::AnnotatorArity,
                format!(
                    "{} annotator labels, expected 0 or {ANNOTATORS}",
                    post.annotator_labels.len()
                ),
            );
        }
        if crate::corpus::anonymize_text(&post.text).trim().is_empty() {
            push(id, Rule::EmptyText, "post text is empty".into());
        }
        if let Some(image) = &post.image_path {
            let resolved = corpus.resolve_image(image);
            if !resolved.is_file() {
                push(
                    id,
                    Rule::MissingImage,
                    format!("{} does not exist", resolved.display()),
                );
            }
        }
        for (r, resp) in post.responses.iter().enumerate() {
            if resp.text.trim().is_empty() {
                push(
                    id,
                    Rule::EmptyResponseText,
                    format!("response {r} text is empty"),
                );
            }
            if let Some(h) = resp.hours_since_post {
                if !(h >= 0.0) {
                    push(
                        id,
                        Rule::NegativeHours,
                        format!("response {r} hours_since_post {h}"),
                    );
                }
            }
            if let Some(l) = resp.likes {
                if l < 0 {
                    push(id, Rule::NegativeLikes, format!("response {r} likes {l}"));
                }
            }
            if !resp.annotator_labels.is_empty() && resp.annotator_labels.len() != ANNOTATORS {
                push(
                    id,
                    Rule::AnnotatorArity,
                    format!(
                        "response {r}: {} annotator labels, expected 0 or {ANNOTATORS}",
                        resp.annotator_labels.len()
                    ),
                );
            }
        }
    }
    out
}

/// Renders violations as CSV with columns `post_id,rule,detail`.
pub fn violations_csv(violations: &[Violation]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["post_id", "rule", "detail"])
        .expect("in-memory write");
    for v in violations {
        w.write_record([v.post_id.as_str(), v.rule.as_str(), v.detail.as_str()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Category, Post, PostLabel, Response, ResponseLabel, Source};

    fn post(id: &str, category: Category, label: PostLabel) -> Post {
        Post::new(id, Source::Hony, "some text", category, label)
    }

    #[test]
    fn well_formed_has_no_violations() {
        let mut p = post("a", Category::MH, PostLabel::ES);
        p.annotator_labels = vec![PostLabel::ES; 4];
        p.responses
            .push(Response::new("so sorry", ResponseLabel::ER));
        let c = Corpus::new(vec![p, post("b", Category::NEG, PostLabel::NES)]);
        assert!(validate_corpus(&c).is_empty());
    }

    #[test]
    fn neg_with_es_label_is_one_mismatch() {
        let c = Corpus::new(vec![post("x", Category::NEG, PostLabel::ES)]);
        let v = validate_corpus(&c);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::CategoryLabelMismatch);
        assert_eq!(v[0].post_id, "x");
    }

    #[test]
    fn three_annotators_is_one_arity_violation() {
        let mut p = post("x", Category::VA, PostLabel::ES);
        p.annotator_labels = vec![PostLabel::ES; 3];
        let v = validate_corpus(&Corpus::new(vec![p]));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::AnnotatorArity);
    }

    #[test]
    fn response_rules() {
        let mut p = post("x", Category::TS, PostLabel::ES);
        let mut r = Response::new(" ", ResponseLabel::NER);
        r.hours_since_post = Some(-1.0);
        r.likes = Some(-2);
        p.responses.push(r);
        let rules: Vec<Rule> = validate_corpus(&Corpus::new(vec![p]))
            .into_iter()
            .map(|v| v.rule)
            .collect();
        assert_eq!(
            rules,
            vec![
                Rule::EmptyResponseText,
                Rule::NegativeHours,
                Rule::NegativeLikes
            ]
        );
    }

    #[test]
    fn text_that_is_only_a_handle_is_empty_after_anonymization() {
        // "<USER>" is not empty, so only whitespace-only text trips the rule.
        let mut p = post("x", Category::MH, PostLabel::ES);
        p.text = "   ".into();
        let v = validate_corpus(&Corpus::new(vec![p]));
        assert_eq!(v[0].rule, Rule::EmptyText);
    }

    #[test]
    fn missing_image_flagged() {
        let mut p = post("x", Category::MH, PostLabel::ES);
        p.image_path = Some("/definitely/not/here.ppm".into());
        let v = validate_corpus(&Corpus::new(vec![p]));
        assert_eq!(v[0].rule, Rule::MissingImage);
    }

    #[test]
    fn csv_quotes_commas() {
        let v = vec![Violation {
            post_id: "p,1".into(),
            rule: Rule::EmptyText,
            detail: "a \"b\"".into(),
        }];
        assert_eq!(
            violations_csv(&v),
            "post_id,rule,detail\n\"p,1\",empty_text,\"a \"\"b\"\"\"\n"
        );
    }
}
