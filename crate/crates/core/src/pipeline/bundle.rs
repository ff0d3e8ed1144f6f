//! Trained bundles: one JSON document followed by a `sha256:<hex>` line.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};

use super::resources::Resources;
use super::space::FeatureSpace;
use crate::corpus::Task;
use crate::io::{sha256_hex, write_atomic};
use crate::lexical::SpeechActModel;
use crate::models::{EnsembleConfig, EnsembleWeights, ForestModel, LogRegModel};

pub const BUNDLE_SCHEMA_VERSION: u32 = 1;
const CHECKSUM_PREFIX: &str = "sha256:";

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bundle checksum line missing or malformed")]
    MissingChecksum,
    #[error("bundle checksum mismatch: file says {expected}, content hashes to {actual}")]
    ChecksumMismatch { expected: String, actual: String },
    #[error("bundle schema version {found} is not supported (expected {BUNDLE_SCHEMA_VERSION})")]
    Version { found: u32 },
    #[error("bundle JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bundle is inconsistent: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedBundle {
    pub schema_version: u32,
    pub tool_version: String,
    /// Unix seconds.
    pub created_at: u64,
    pub task: Task,
    pub seed: u64,
    pub config: EnsembleConfig,
    pub feature_space: FeatureSpace,
    pub lr: LogRegModel,
    pub rf: ForestModel,
    pub ensemble: EnsembleWeights,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speech_act_model: Option<SpeechActModel>,
    /// Resource name to SHA-256 for every resource the mask used.
    pub fingerprints: BTreeMap<String, String>,
}

impl TrainedBundle {
    pub fn check_consistency(&self) -> Result<(), BundleError> {
        let w = self.feature_space.width();
        if self.lr.weights.len() != w || self.rf.dim != w {
            return Err(BundleError::Inconsistent(format!(
                "feature width {w}, LR width {}, RF width {}",
                self.lr.weights.len(),
                self.rf.dim
            )));
        }
        if self.rf.trees.len() != self.rf.n_trees {
            return Err(BundleError::Inconsistent("tree count".into()));
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let json = serde_json::to_string(self).expect("bundle serializes");
        let mut out = json.into_bytes();
        out.push(b'\n');
        let sum = sha256_hex(&out);
        out.extend_from_slice(format!("{CHECKSUM_PREFIX}{sum}\n").as_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, BundleError> {
        let body_end = bytes
            .strip_suffix(b"\n")
            .and_then(|b| b.iter().rposition(|&c| c == b'\n'))
            .ok_or(BundleError::MissingChecksum)?
            + 1;
        let (body, footer) = bytes.split_at(body_end);
        let footer = std::str::from_utf8(footer).map_err(|_| BundleError::MissingChecksum)?;
        let expected = footer
            .trim_end()
            .strip_prefix(CHECKSUM_PREFIX)
            .ok_or(BundleError::MissingChecksum)?
            .to_string();
        let actual = sha256_hex(body);
        if expected != actual {
            return Err(BundleError::ChecksumMismatch { expected, actual });
        }
        let v: serde_json::Value = serde_json::from_slice(body)?;
        let found = v
            .get("schema_version")
            .and_then(|s| s.as_u64())
            .unwrap_or(0) as u32;
        if found != BUNDLE_SCHEMA_VERSION {
            return Err(BundleError::Version { found });
        }
        let b: TrainedBundle = serde_json::from_value(v)?;
        b.check_consistency()?;
        Ok(b)
    }

    /// Names of resources whose hash differs from the one recorded at
    /// training time.
    pub fn fingerprint_mismatches(&self, res: &Resources) -> Vec<String> {
        self.fingerprints
            .iter()
            .filter(|(name, hash)| {
                name.as_str() != "speech_acts" && res.fingerprints.get(*name) != Some(*hash)
            })
            .map(|(name, _)| name.clone())
            .collect()
    }
}

pub fn save_bundle(bundle: &TrainedBundle, path: &Path) -> Result<(), BundleError> {
    write_atomic(path, &bundle.to_bytes()).map_err(|source| BundleError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a bundle and compares its fingerprints with `res`, logging a
/// warning per mismatch. Returns the bundle and the mismatch warnings.
pub fn load_bundle(
    path: &Path,
    res: Option<&Resources>,
) -> Result<(TrainedBundle, Vec<String>), BundleError> {
    let bytes = fs::read(path).map_err(|source| BundleError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let b = TrainedBundle::from_bytes(&bytes)?;
    let mut warnings = Vec::new();
    if let Some(res) = res {
        for name in b.fingerprint_mismatches(res) {
            let msg = format!("resource {name} differs from the one the bundle was trained with");
            warn!("{msg}");
            warnings.push(msg);
        }
    }
    Ok((b, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_synthetic, Corpus, SyntheticSpec};
    use crate::models::EnsembleConfig;
    use crate::pipeline::{train_task, FeatureSetMask, ItemInput, ResourcePaths};

    fn corpus(n: usize, seed: u64) -> Corpus {
        generate_synthetic(&SyntheticSpec {
            n_positive: n,
            n_negative: n,
            seed,
            with_images: false,
            ..SyntheticSpec::default()
        })
        .unwrap()
        .corpus
    }

    fn trained() -> (TrainedBundle, Resources) {
        let res = Resources::bundled(2);
        let mut cfg = EnsembleConfig::default();
        cfg.rf.n_trees = 15;
        let b = train_task(
            &corpus(40, 2),
            Task::ES,
            &FeatureSetMask::verbal(),
            &cfg,
            &res,
            2,
        )
        .unwrap();
        (b, res)
    }

    fn probes() -> Vec<ItemInput> {
        let c = corpus(50, 77);
        c.task_items(Task::ES)
            .iter()
            .map(|it| ItemInput::from_task_item(&c, it))
            .collect()
    }

    #[test]
    fn round_trip_preserves_predictions_bitwise() {
        let (b, res) = trained();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.json");
        save_bundle(&b, &path).unwrap();
        let (back, warnings) = load_bundle(&path, Some(&res)).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(back, b);
        let probe = probes();
        assert_eq!(probe.len(), 100);
        let p1 = b.predict_inputs(probe.clone(), &res).unwrap();
        let p2 = back.predict_inputs(probe, &res).unwrap();
        for (x, y) in p1.iter().zip(&p2) {
            assert_eq!(x.probability.to_bits(), y.probability.to_bits());
            assert_eq!(x.p_lr.to_bits(), y.p_lr.to_bits());
            assert_eq!(x.p_rf.to_bits(), y.p_rf.to_bits());
        }
    }

    #[test]
    fn corruption_is_detected() {
        let (b, _) = trained();
        let bytes = b.to_bytes();
        let truncated = &bytes[..bytes.len() / 2];
        assert!(matches!(
            TrainedBundle::from_bytes(truncated),
            Err(BundleError::ChecksumMismatch { .. } | BundleError::MissingChecksum)
        ));
        let mut flipped = bytes.clone();
        flipped[10] ^= 1;
        assert!(matches!(
            TrainedBundle::from_bytes(&flipped),
            Err(BundleError::ChecksumMismatch { .. })
        ));
        assert!(TrainedBundle::from_bytes(b"").is_err());
        assert!(TrainedBundle::from_bytes(&bytes).is_ok());
    }

    #[test]
    fn schema_version_is_checked() {
        let (mut b, _) = trained();
        b.schema_version = BUNDLE_SCHEMA_VERSION + 1;
        assert!(matches!(
            TrainedBundle::from_bytes(&b.to_bytes()),
            Err(BundleError::Version { found }) if found == BUNDLE_SCHEMA_VERSION + 1
        ));
    }

    #[test]
    fn different_lexicon_warns() {
        let (b, _) = trained();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.json");
        save_bundle(&b, &path).unwrap();
        let lex = dir.path().join("lex.tsv");
        std::fs::write(&lex, "sad\t-0.8\t-0.5\t0.1\t-0.6\t-0.2\n").unwrap();
        let other = Resources::load(
            &ResourcePaths {
                lexicon: Some(lex),
                ..ResourcePaths::default()
            },
            2,
        )
        .unwrap();
        let (_, warnings) = load_bundle(&path, Some(&other)).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("lexicon"));
    }
}
