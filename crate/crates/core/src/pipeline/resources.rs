//! Lexical resources shared by feature extraction, with content hashes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::io::sha256_hex;
use crate::lexical::{
    parse_speech_act_tsv, train_speech_act_model, AmplifierConfig, CategoryDictionary,
    HyperboleConfig, ImageryList, ResourceError, SentimentLexicon, SpeechActModel,
};
use crate::models::LogRegConfig;

pub const BUNDLED_LEXICON: &str = include_str!("../../resources/lexicon.tsv");
pub const BUNDLED_DICTIONARY: &str = include_str!("../../resources/categories.dic");
pub const BUNDLED_IMAGERY: &str = include_str!("../../resources/imagery.txt");
pub const BUNDLED_SPEECH_ACTS: &str = include_str!("../../resources/speech_acts.tsv");

/// Optional resource files; `None` selects the bundled default.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourcePaths {
    pub lexicon: Option<PathBuf>,
    pub dictionary: Option<PathBuf>,
    pub imagery: Option<PathBuf>,
    pub speech_acts: Option<PathBuf>,
    /// Directory holding face sidecars named `<image file name>.faces.json`;
    /// by default the sidecar sits next to its image.
    pub faces_dir: Option<PathBuf>,
}

/// Resources for every feature family. A `None` field makes the families
/// that need it unavailable.
#[derive(Debug, Clone)]
pub struct Resources {
    pub lexicon: Option<SentimentLexicon>,
    pub dictionary: Option<CategoryDictionary>,
    pub imagery: Option<ImageryList>,
    pub speech_acts: Option<SpeechActModel>,
    pub amplifier: AmplifierConfig,
    pub hyperbole: HyperboleConfig,
    pub faces_dir: Option<PathBuf>,
    /// Resource name to SHA-256 of its source bytes.
    pub fingerprints: BTreeMap<String, String>,
}

fn read(path: &Path) -> Result<String, ResourceError> {
    fs::read_to_string(path).map_err(|source| ResourceError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn source(path: &Option<PathBuf>, bundled: &'static str) -> Result<String, ResourceError> {
    match path {
        Some(p) => read(p),
        None => Ok(bundled.to_string()),
    }
}

impl Resources {
    /// No resources at all; only BF and the visual families can be used.
    pub fn empty() -> Self {
        Resources {
            lexicon: None,
            dictionary: None,
            imagery: None,
            speech_acts: None,
            amplifier: AmplifierConfig::default(),
            hyperbole: HyperboleConfig::default(),
            faces_dir: None,
            fingerprints: BTreeMap::new(),
        }
    }

    /// Loads every resource, training the speech-act model with `seed`.
    pub fn load(paths: &ResourcePaths, seed: u64) -> Result<Self, ResourceError> {
        let lex_src = source(&paths.lexicon, BUNDLED_LEXICON)?;
        let dict_src = source(&paths.dictionary, BUNDLED_DICTIONARY)?;
        let img_src = source(&paths.imagery, BUNDLED_IMAGERY)?;
        let sa_src = source(&paths.speech_acts, BUNDLED_SPEECH_ACTS)?;
        let examples = parse_speech_act_tsv(&sa_src)?;
        let speech_acts = train_speech_act_model(&examples, &LogRegConfig::default(), seed)?;
        let fingerprints = [
            ("lexicon", &lex_src),
            ("dictionary", &dict_src),
            ("imagery", &img_src),
            ("speech_acts", &sa_src),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), sha256_hex(v.as_bytes())))
        .collect();
        Ok(Resources {
            lexicon: Some(SentimentLexicon::parse_tsv(&lex_src)?),
            dictionary: Some(CategoryDictionary::parse(&dict_src)?),
            imagery: Some(ImageryList::parse(&img_src)),
            speech_acts: Some(speech_acts),
            amplifier: AmplifierConfig::default(),
            hyperbole: HyperboleConfig::default(),
            faces_dir: paths.faces_dir.clone(),
            fingerprints,
        })
    }

    /// Bundled defaults.
    pub fn bundled(seed: u64) -> Self {
        Self::load(&ResourcePaths::default(), seed).expect("bundled resources are valid")
    }

    /// Where the face sidecar for `image` lives.
    pub fn sidecar_for(&self, image: &Path) -> PathBuf {
        match (&self.faces_dir, image.file_name()) {
            (Some(dir), Some(name)) => {
                let mut n = name.to_os_string();
                n.push(".faces.json");
                dir.join(n)
            }
            _ => crate::visual::sidecar_path(image),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_resources_load() {
        let r = Resources::bundled(42);
        assert!(r.lexicon.as_ref().unwrap().len() > 50);
        assert_eq!(r.fingerprints.len(), 4);
        let sa = r.speech_acts.as_ref().unwrap();
        assert!(sa.holdout_accuracy.is_finite());
    }

    #[test]
    fn sidecar_location() {
        let mut r = Resources::empty();
        assert_eq!(
            r.sidecar_for(Path::new("a/b.ppm")),
            PathBuf::from("a/b.ppm.faces.json")
        );
        r.faces_dir = Some(PathBuf::from("faces"));
        assert_eq!(
            r.sidecar_for(Path::new("a/b.ppm")),
            PathBuf::from("faces/b.ppm.faces.json")
        );
    }
}
