use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Current corpus schema version, written as the header line.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate post id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("unsupported schema_version {found} (expected {SCHEMA_VERSION})")]
    SchemaVersion { found: u64 },
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Hony,
    Instagram,
    Tumblr,
    Buzzfeed,
    Synthetic,
}

impl Source {
    pub const ALL: [Source; 5] = [
        Source::Hony,
        Source::Instagram,
        Source::Tumblr,
        Source::Buzzfeed,
        Source::Synthetic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Hony => "hony",
            Source::Instagram => "instagram",
            Source::Tumblr => "tumblr",
            Source::Buzzfeed => "buzzfeed",
            Source::Synthetic => "synthetic",
        }
    }
}

/// Topic of a post. `MH`, `VA` and `TS` are the empathy-seeking categories;
/// `NEG` marks the negative pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    /// Mental health.
    MH,
    /// Violence and abuse.
    VA,
    /// Temporal support (loss, short-lived tragedy).
    TS,
    NEG,
}

impl Category {
    pub const POSITIVE: [Category; 3] = [Category::MH, Category::VA, Category::TS];

    pub fn is_positive(self) -> bool {
        self != Category::NEG
    }

    /// The label this category implies for the ES task.
    pub fn expected_label(self) -> PostLabel {
        if self.is_positive() {
            PostLabel::ES
        } else {
            PostLabel::NES
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::MH => "MH",
            Category::VA => "VA",
            Category::TS => "TS",
            Category::NEG => "NEG",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "MH" => Ok(Category::MH),
            "VA" => Ok(Category::VA),
            "TS" => Ok(Category::TS),
            "NEG" => Ok(Category::NEG),
            other => Err(format!(
                "unknown category {other:?} (expected MH, VA, TS or NEG)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PostLabel {
    ES,
    NES,
}

impl PostLabel {
    pub fn is_positive(self) -> bool {
        self == PostLabel::ES
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ResponseLabel {
    ER,
    NER,
}

impl ResponseLabel {
    pub fn is_positive(self) -> bool {
        self == ResponseLabel::ER
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    M,
    F,
    U,
}

/// The two classification tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    /// Post-level: empathy-seeker vs. non-empathy-seeker.
    ES,
    /// Response-level: empathetic vs. non-empathetic response.
    ER,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::ES => "ES",
            Task::ER => "ER",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ES" => Ok(Task::ES),
            "ER" => Ok(Task::ER),
            other => Err(format!("unknown task {other:?} (expected ES or ER)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub text: String,
    pub label: ResponseLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<Gender>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hours_since_post: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub likes: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub annotator_labels: Vec<ResponseLabel>,
    #[serde(flatten, skip_serializing)]
    pub extra: Map<String, Value>,
}

impl Response {
    pub fn new(text: impl Into<String>, label: ResponseLabel) -> Self {
        Response {
            text: text.into(),
            label,
            gender: None,
            hours_since_post: None,
            likes: None,
            annotator_labels: Vec::new(),
            extra: Map::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub source: Source,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_path: Option<String>,
    pub category: Category,
    pub label: PostLabel,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub annotator_labels: Vec<PostLabel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub responses: Vec<Response>,
    /// Original spread of a story that was posted in several parts and
    /// merged into `text`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fragments: Vec<String>,
    /// Unknown keys from the input line; kept in memory, never written back.
    #[serde(flatten, skip_serializing)]
    pub extra: Map<String, Value>,
}

impl Post {
    pub fn new(
        id: impl Into<String>,
        source: Source,
        text: impl Into<String>,
        category: Category,
        label: PostLabel,
    ) -> Self {
        Post {
            id: id.into(),
            source,
            text: text.into(),
            image_path: None,
            category,
            label,
            annotator_labels: Vec::new(),
            responses: Vec::new(),
            fragments: Vec::new(),
            extra: Map::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub schema_version: u32,
    pub posts: Vec<Post>,
    /// Directory that relative `image_path`s resolve against.
    pub base_dir: Option<PathBuf>,
}

impl Default for Corpus {
    fn default() -> Self {
        Corpus {
            schema_version: SCHEMA_VERSION,
            posts: Vec::new(),
            base_dir: None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    schema_version: u64,
}

impl Corpus {
    pub fn new(posts: Vec<Post>) -> Self {
        Corpus {
            posts,
            ..Corpus::default()
        }
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    /// Resolves a post's image path against the corpus directory.
    pub fn resolve_image(&self, image_path: &str) -> PathBuf {
        let p = Path::new(image_path);
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }

    /// Serializes to JSONL: a header line followed by one post per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&Header {
            schema_version: u64::from(self.schema_version),
        })
        .expect("header serializes");
        out.push('\n');
        for post in &self.posts {
            out.push_str(&serde_json::to_string(post).expect("post serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Corpus, CorpusError> {
        let mut corpus = Corpus::default();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim();
            if raw.is_empty() {
                continue;
            }
            let value: Value = serde_json::from_str(raw).map_err(|e| CorpusError::Malformed {
                line,
                message: e.to_string(),
            })?;
            let is_header = value
                .as_object()
                .is_some_and(|o| o.contains_key("schema_version") && !o.contains_key("id"));
            if is_header {
                let header: Header =
                    serde_json::from_value(value).map_err(|e| CorpusError::Malformed {
                        line,
                        message: e.to_string(),
                    })?;
                if header.schema_version != u64::from(SCHEMA_VERSION) {
                    return Err(CorpusError::SchemaVersion {
                        found: header.schema_version,
                    });
                }
                continue;
            }
            let post: Post = serde_json::from_value(value).map_err(|e| CorpusError::Malformed {
                line,
                message: e.to_string(),
            })?;
            if !seen.insert(post.id.clone()) {
                return Err(CorpusError::DuplicateId { line, id: post.id });
            }
            corpus.posts.push(post);
        }
        Ok(corpus)
    }

    pub fn write(&self, path: &Path) -> Result<(), CorpusError> {
        crate::io::write_atomic(path, self.to_jsonl().as_bytes()).map_err(|source| {
            CorpusError::Io {
                path: path.to_path_buf(),
                source,
            }
        })
    }
}

/// Reads a JSONL corpus file. Relative image paths resolve against the
/// file's directory.
pub fn load_corpus(path: &Path) -> Result<Corpus, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut corpus = Corpus::from_jsonl(&text)?;
    corpus.base_dir = path.parent().map(Path::to_path_buf);
    Ok(corpus)
}

/// One labeled unit of a task: a post (ES) or a response (ER).
#[derive(Debug, Clone, Copy)]
pub struct TaskItem<'a> {
    pub post: &'a Post,
    /// Index into `post.responses` for the ER task.
    pub response: Option<usize>,
}

impl<'a> TaskItem<'a> {
    pub fn text(&self) -> &'a str {
        match self.response {
            Some(r) => &self.post.responses[r].text,
            None => &self.post.text,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self.response {
            Some(r) => self.post.responses[r].label.is_positive(),
            None => self.post.label.is_positive(),
        }
    }

    pub fn key(&self) -> String {
        match self.response {
            Some(r) => format!("{}#r{r}", self.post.id),
            None => self.post.id.clone(),
        }
    }
}

impl Corpus {
    /// Items for `task` in a stable order: posts in file order for ES;
    /// responses in (post, response) order for ER.
    pub fn task_items(&self, task: Task) -> Vec<TaskItem<'_>> {
        match task {
            Task::ES => self
                .posts
                .iter()
                .map(|post| TaskItem {
                    post,
                    response: None,
                })
                .collect(),
            Task::ER => self
                .posts
                .iter()
                .flat_map(|post| {
                    (0..post.responses.len()).map(move |r| TaskItem {
                        post,
                        response: Some(r),
                    })
                })
                .collect(),
        }
    }

    pub fn task_labels(&self, task: Task) -> Vec<bool> {
        self.task_items(task)
            .iter()
            .map(|i| i.is_positive())
            .collect()
    }
}
