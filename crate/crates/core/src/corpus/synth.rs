//! Deterministic synthetic corpora.
//!
//! Positive posts draw words from distress, temporal and first-person pools
//! plus a pool for their category; negative posts draw from food, education
//! and technology pools plus upbeat event words. Every word slot takes a
//! class word with probability `signal_strength` and a shared filler word
//! otherwise, so strength 0 makes the classes indistinguishable and strength
//! 1 makes the class pools disjoint.

use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::schema::{
    Category, Corpus, CorpusError, Gender, Post, PostLabel, Response, ResponseLabel, Source,
};
use crate::visual::{hsv_to_rgb, sidecar_path, Face, FaceAnnotations, Raster, Sentiment};

const DISTRESS: &[&str] = &[
    "low",
    "alone",
    "hurt",
    "scared",
    "broken",
    "empty",
    "tired",
    "hopeless",
    "afraid",
    "cry",
    "crying",
    "pain",
    "numb",
    "worthless",
    "anxious",
    "sad",
    "terrible",
    "awful",
];
const TEMPORAL: &[&str] = &[
    "today",
    "tonight",
    "yesterday",
    "weeks",
    "months",
    "ago",
    "days",
    "year",
    "now",
];
const FIRST_PERSON: &[&str] = &["i", "me", "my", "myself", "i'm"];
const MENTAL_HEALTH: &[&str] = &[
    "depression",
    "anxiety",
    "suicide",
    "therapy",
    "panic",
    "sleepless",
    "meds",
    "darkness",
    "overthinking",
    "lonely",
];
const VIOLENCE: &[&str] = &[
    "abuse",
    "raped",
    "hit",
    "bruises",
    "violence",
    "attacked",
    "threatened",
    "screamed",
    "assault",
    "scars",
];
const TEMPORAL_SUPPORT: &[&str] = &[
    "lost", "died", "funeral", "passed", "grief", "miss", "accident", "hospital", "goodbye", "gone",
];
const FOOD: &[&str] = &[
    "pizza",
    "pasta",
    "tacos",
    "dessert",
    "coffee",
    "brunch",
    "recipe",
    "delicious",
    "cheese",
    "baked",
];
const EDUCATION: &[&str] = &[
    "class",
    "exam",
    "campus",
    "lecture",
    "graduation",
    "homework",
    "semester",
    "library",
    "teacher",
    "study",
];
const TECHNOLOGY: &[&str] = &[
    "phone", "laptop", "app", "update", "gadget", "code", "robot", "startup", "wifi", "software",
];
const UPBEAT: &[&str] = &[
    "festival",
    "party",
    "sunny",
    "friends",
    "fun",
    "awesome",
    "celebrate",
    "great",
    "amazing",
    "happy",
];
const FILLER: &[&str] = &[
    "the", "a", "and", "to", "was", "it", "so", "just", "really", "this", "that", "with", "at",
    "on", "people", "street", "city", "went", "got", "some", "thing", "then", "there", "very",
    "still",
];

const EMPATHETIC: &[&str] = &[
    "sorry", "hugs", "strength", "hope", "here", "love", "care", "praying", "healing", "proud",
    "brave", "support", "together", "better", "heart", "thank", "sharing",
];
const DISMISSIVE: &[&str] = &[
    "whatever",
    "attention",
    "fake",
    "drama",
    "pathetic",
    "overreacting",
    "seeker",
    "boring",
    "nobody",
    "cares",
    "deal",
    "grow",
    "weak",
    "lies",
    "stupid",
];
const RESPONSE_FILLER: &[&str] = &[
    "you", "it", "will", "be", "is", "this", "so", "the", "just", "that", "get", "are", "for",
    "all",
];

const POSITIVE_CUES: &[&str] = &[":(", "...", "sooo", ":'("];
const NEGATIVE_CUES: &[&str] = &[":)", "!!", "lol", ":D"];
const SHARED_CUES: &[&str] = &[":)", ":(", "!!", "...", "lol", "sooo"];

/// Generator parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_positive: usize,
    pub n_negative: usize,
    /// Proportions of MH, VA, TS among positives.
    pub category_mix: [f64; 3],
    pub signal_strength: f64,
    pub seed: u64,
    /// Emit a flat-color raster and a face sidecar per post.
    pub with_images: bool,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_positive: 500,
            n_negative: 500,
            category_mix: [0.33, 0.28, 0.39],
            signal_strength: 1.0,
            seed: 42,
            with_images: true,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), CorpusError> {
        let bad = |m: String| Err(CorpusError::InvalidSpec(m));
        if self.n_positive == 0 || self.n_negative == 0 {
            return bad("n_positive and n_negative must be > 0".into());
        }
        if self.category_mix.iter().any(|&p| !(p >= 0.0)) {
            return bad(format!(
                "category_mix {:?} has a negative entry",
                self.category_mix
            ));
        }
        let sum: f64 = self.category_mix.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return bad(format!("category_mix sums to {sum}, expected 1"));
        }
        if !(0.0..=1.0).contains(&self.signal_strength) {
            return bad(format!(
                "signal_strength {} outside [0, 1]",
                self.signal_strength
            ));
        }
        Ok(())
    }

    /// Positive counts per category by largest remainder, so they sum to
    /// `n_positive` exactly.
    pub fn category_counts(&self) -> [usize; 3] {
        let n = self.n_positive as f64;
        let raw: Vec<f64> = self.category_mix.iter().map(|p| p * n).collect();
        let mut counts = [0usize; 3];
        for (c, r) in counts.iter_mut().zip(&raw) {
            *c = r.floor() as usize;
        }
        let mut rest = self.n_positive - counts.iter().sum::<usize>();
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by(|&a, &b| {
            let fa = raw[a] - raw[a].floor();
            let fb = raw[b] - raw[b].floor();
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        for &i in order.iter().cycle() {
            if rest == 0 {
                break;
            }
            counts[i] += 1;
            rest -= 1;
        }
        counts
    }
}

/// A synthetic image and its face sidecar, addressed relative to the corpus
/// directory.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticImage {
    pub rel_path: String,
    pub raster: Raster,
    pub faces: FaceAnnotations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    pub images: Vec<SyntheticImage>,
}

impl SyntheticCorpus {
    /// Writes `corpus.jsonl` plus images and sidecars under `dir`. Returns
    /// the corpus path.
    pub fn write_to_dir(&self, dir: &Path) -> Result<PathBuf, CorpusError> {
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CorpusError::Io { path, source }
        };
        for img in &self.images {
            let path = dir.join(&img.rel_path);
            crate::io::write_atomic(&path, &img.raster.to_ppm()).map_err(io_err(&path))?;
            let side = sidecar_path(&path);
            crate::io::write_atomic(&side, img.faces.to_json().as_bytes())
                .map_err(io_err(&side))?;
        }
        let corpus_path = dir.join("corpus.jsonl");
        self.corpus.write(&corpus_path)?;
        Ok(corpus_path)
    }
}

struct Gen {
    rng: ChaCha8Rng,
    strength: f64,
}

impl Gen {
    fn pick<'a>(&mut self, pool: &[&'a str]) -> &'a str {
        pool.choose(&mut self.rng).expect("non-empty pool")
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.random::<f64>() < p
    }

    fn signal(&mut self) -> bool {
        self.chance(self.strength)
    }

    fn post_words(&mut self, category: Category) -> Vec<&'static str> {
        let len = self.rng.random_range(8..=16);
        let topic = [FOOD, EDUCATION, TECHNOLOGY][self.rng.random_range(0..3)];
        (0..len)
            .map(|_| {
                if !self.signal() {
                    return self.pick(FILLER);
                }
                let roll: f64 = self.rng.random();
                match category {
                    Category::NEG if roll < 0.6 => self.pick(topic),
                    Category::NEG => self.pick(UPBEAT),
                    _ if roll < 0.35 => self.pick(DISTRESS),
                    _ if roll < 0.5 => self.pick(TEMPORAL),
                    _ if roll < 0.7 => self.pick(FIRST_PERSON),
                    Category::MH => self.pick(MENTAL_HEALTH),
                    Category::VA => self.pick(VIOLENCE),
                    Category::TS => self.pick(TEMPORAL_SUPPORT),
                }
            })
            .collect()
    }

    fn cue(&mut self, positive: bool) -> Option<&'static str> {
        if !self.chance(0.4) {
            return None;
        }
        Some(if self.signal() {
            self.pick(if positive {
                POSITIVE_CUES
            } else {
                NEGATIVE_CUES
            })
        } else {
            self.pick(SHARED_CUES)
        })
    }

    /// Joins words into 4–8 word sentences with capitalized starts and
    /// terminal punctuation.
    fn render(&mut self, words: &[&str], cue: Option<&str>) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < words.len() {
            let n = self.rng.random_range(4..=8).min(words.len() - i);
            let sentence = &words[i..i + n];
            i += n;
            if !out.is_empty() {
                out.push(' ');
            }
            for (j, w) in sentence.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                if j == 0 {
                    let mut chars = w.chars();
                    if let Some(c) = chars.next() {
                        out.extend(c.to_uppercase());
                        out.push_str(chars.as_str());
                    }
                } else {
                    out.push_str(w);
                }
            }
            let roll: f64 = self.rng.random();
            out.push(if roll < 0.7 {
                '.'
            } else if roll < 0.9 {
                '!'
            } else {
                '?'
            });
        }
        if let Some(c) = cue {
            out.push(' ');
            out.push_str(c);
        }
        out
    }

    fn response(&mut self, empathetic: bool) -> Response {
        let len = self.rng.random_range(5..=10);
        let words: Vec<&str> = (0..len)
            .map(|_| {
                if self.signal() {
                    self.pick(if empathetic { EMPATHETIC } else { DISMISSIVE })
                } else {
                    self.pick(RESPONSE_FILLER)
                }
            })
            .collect();
        let cue = if self.chance(0.3) {
            Some(if self.signal() {
                if empathetic {
                    "<3"
                } else {
                    "smh"
                }
            } else {
                self.pick(&["<3", "smh"])
            })
        } else {
            None
        };
        let text = self.render(&words, cue);
        let label = if empathetic {
            ResponseLabel::ER
        } else {
            ResponseLabel::NER
        };
        let mut r = Response::new(text, label);
        r.gender = Some(
            *[Gender::M, Gender::F, Gender::U]
                .choose(&mut self.rng)
                .unwrap(),
        );
        r.hours_since_post = Some((self.rng.random::<f64>() * 720.0).round() / 10.0);
        r.likes = Some(self.rng.random_range(0..=50));
        r.annotator_labels = (0..4)
            .map(|_| {
                let agree = self.chance(0.9);
                match (agree, empathetic) {
                    (true, true) | (false, false) => ResponseLabel::ER,
                    _ => ResponseLabel::NER,
                }
            })
            .collect();
        r
    }

    fn image(&mut self, positive: bool) -> (Raster, FaceAnnotations) {
        let (h, s, v) = if self.signal() {
            if positive {
                (
                    self.rng.random_range(180.0..300.0),
                    self.rng.random_range(0.05..0.35),
                    self.rng.random_range(0.10..0.45),
                )
            } else {
                (
                    self.rng.random_range(0.0..120.0),
                    self.rng.random_range(0.60..1.0),
                    self.rng.random_range(0.70..1.0),
                )
            }
        } else {
            (
                self.rng.random_range(0.0..360.0),
                self.rng.random::<f64>(),
                self.rng.random::<f64>(),
            )
        };
        let raster = Raster::filled(8, 8, hsv_to_rgb(h, s, v)).expect("8x8 is valid");

        let signal = self.signal();
        let n_faces = match (signal, positive) {
            (true, true) => *[0usize, 1, 1, 1, 2].choose(&mut self.rng).unwrap(),
            (true, false) => self.rng.random_range(1..=4),
            (false, _) => self.rng.random_range(0..=3),
        };
        let faces = (0..n_faces)
            .map(|_| {
                let (gaze, angle, peaks): (bool, f64, &[usize]) = match (signal, positive) {
                    (true, true) => (
                        self.chance(0.15),
                        self.rng.random_range(15.0..40.0),
                        &[3, 6],
                    ),
                    (true, false) => (self.chance(0.9), self.rng.random_range(0.0..10.0), &[4]),
                    (false, _) => (
                        self.chance(0.5),
                        self.rng.random_range(0.0..40.0),
                        &[0, 1, 2, 3, 4, 5, 6, 7],
                    ),
                };
                let mut p = [0.0f64; 8];
                for slot in &mut p {
                    *slot = self.rng.random::<f64>() * 0.1;
                }
                let peak = *peaks.choose(&mut self.rng).unwrap();
                p[peak] += 1.0;
                let total: f64 = p.iter().sum();
                for slot in &mut p {
                    *slot /= total;
                }
                let side = self.rng.random_range(1.0..4.0f64).floor();
                Face {
                    bbox: [1.0, 1.0, side, side],
                    gaze_direct: gaze,
                    angle_deg: if self.chance(0.5) { angle } else { -angle },
                    sentiment: Sentiment::from_array(p),
                }
            })
            .collect();
        (raster, FaceAnnotations { faces })
    }
}

/// Generates a corpus per `spec`. Identical specs give identical output.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticCorpus, CorpusError> {
    spec.validate()?;
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        strength: spec.signal_strength,
    };

    let [mh, va, ts] = spec.category_counts();
    let mut categories: Vec<Category> = std::iter::repeat_n(Category::MH, mh)
        .chain(std::iter::repeat_n(Category::VA, va))
        .chain(std::iter::repeat_n(Category::TS, ts))
        .chain(std::iter::repeat_n(Category::NEG, spec.n_negative))
        .collect();
    rand::seq::SliceRandom::shuffle(categories.as_mut_slice(), &mut g.rng);

    let width = (categories.len().max(1) as f64).log10().floor() as usize + 1;
    let mut posts = Vec::with_capacity(categories.len());
    let mut images = Vec::new();
    for (i, category) in categories.into_iter().enumerate() {
        let positive = category.is_positive();
        let words = g.post_words(category);
        let cue = g.cue(positive);
        let text = g.render(&words, cue);
        let id = format!("syn-{i:0width$}");
        let mut post = Post::new(
            id.clone(),
            Source::Synthetic,
            text,
            category,
            category.expected_label(),
        );
        post.annotator_labels = (0..4)
            .map(|_| {
                if g.chance(0.9) == positive {
                    PostLabel::ES
                } else {
                    PostLabel::NES
                }
            })
            .collect();
        let mut responses = vec![g.response(true), g.response(false)];
        if g.chance(0.5) {
            responses.swap(0, 1);
        }
        post.responses = responses;
        if spec.with_images {
            let (raster, faces) = g.image(positive);
            let rel_path = format!("images/{id}.ppm");
            post.image_path = Some(rel_path.clone());
            images.push(SyntheticImage {
                rel_path,
                raster,
                faces,
            });
        }
        posts.push(post);
    }

    Ok(SyntheticCorpus {
        corpus: Corpus::new(posts),
        images,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::validate_corpus;
    use std::collections::{BTreeMap, BTreeSet};

    fn spec(strength: f64, seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            n_positive: 100,
            n_negative: 100,
            category_mix: [0.33, 0.28, 0.39],
            signal_strength: strength,
            seed,
            with_images: false,
        }
    }

    #[test]
    fn counts_exact() {
        let s = generate_synthetic(&spec(1.0, 1)).unwrap().corpus;
        assert_eq!(s.len(), 200);
        let mut by_cat: BTreeMap<Category, usize> = BTreeMap::new();
        for p in &s.posts {
            *by_cat.entry(p.category).or_default() += 1;
            assert_eq!(p.responses.len(), 2);
        }
        assert_eq!(by_cat[&Category::MH], 33);
        assert_eq!(by_cat[&Category::VA], 28);
        assert_eq!(by_cat[&Category::TS], 39);
        assert_eq!(by_cat[&Category::NEG], 100);
        assert!(validate_corpus(&s).is_empty());
    }

    #[test]
    fn largest_remainder_rounding() {
        let mut sp = spec(1.0, 1);
        sp.n_positive = 10;
        sp.category_mix = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        assert_eq!(sp.category_counts(), [4, 3, 3]);
    }

    #[test]
    fn deterministic_bytes() {
        let mut sp = spec(0.7, 9);
        sp.with_images = true;
        let a = generate_synthetic(&sp).unwrap();
        let b = generate_synthetic(&sp).unwrap();
        assert_eq!(a.corpus.to_jsonl(), b.corpus.to_jsonl());
        assert_eq!(a.images, b.images);
    }

    #[test]
    fn invalid_specs() {
        let mut sp = spec(1.0, 1);
        sp.category_mix = [0.5, 0.5, 0.5];
        assert!(generate_synthetic(&sp).is_err());
        let mut sp = spec(1.0, 1);
        sp.n_negative = 0;
        assert!(generate_synthetic(&sp).is_err());
        let mut sp = spec(1.5, 1);
        sp.signal_strength = 1.5;
        assert!(generate_synthetic(&sp).is_err());
    }

    /// Unigram-presence oracle: a post is positive iff it contains any word
    /// never seen in a negative post.
    #[test]
    fn full_strength_is_separable_by_unigram_presence() {
        let c = generate_synthetic(&spec(1.0, 3)).unwrap().corpus;
        let words = |t: &str| -> BTreeSet<String> {
            crate::lexical::tokenize(t)
                .words()
                .into_iter()
                .map(str::to_string)
                .collect()
        };
        let negative_vocab: BTreeSet<String> = c
            .posts
            .iter()
            .filter(|p| !p.label.is_positive())
            .flat_map(|p| words(&p.text))
            .collect();
        for p in &c.posts {
            let predicted = words(&p.text).iter().any(|w| !negative_vocab.contains(w));
            assert_eq!(predicted, p.label.is_positive(), "{}", p.text);
        }
    }

    #[test]
    fn images_written_with_sidecars() {
        let mut sp = spec(1.0, 5);
        sp.n_positive = 3;
        sp.n_negative = 3;
        sp.with_images = true;
        let s = generate_synthetic(&sp).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = s.write_to_dir(dir.path()).unwrap();
        let loaded = crate::corpus::load_corpus(&path).unwrap();
        assert!(validate_corpus(&loaded).is_empty());
        for p in &loaded.posts {
            let img = loaded.resolve_image(p.image_path.as_deref().unwrap());
            let raster = crate::visual::decode_image(&img).unwrap();
            let faces = crate::visual::load_face_annotations(&sidecar_path(&img)).unwrap();
            faces.check_bounds(&raster).unwrap();
        }
    }
}
