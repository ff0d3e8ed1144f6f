use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::raster::Raster;

/// Facial sentiment classes, in vector order.
pub const SENTIMENT_CLASSES: [&str; 8] = [
    "anger",
    "contempt",
    "disgust",
    "fear",
    "happiness",
    "neutral",
    "sadness",
    "surprise",
];

const SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum FaceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("face {face}: sentiment sums to {sum}, expected 1")]
    SentimentSum { face: usize, sum: f64 },
    #[error("face {face}: {message}")]
    Invalid { face: usize, message: String },
}

/// Per-face sentiment distribution with the eight fixed keys.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sentiment {
    pub anger: f64,
    pub contempt: f64,
    pub disgust: f64,
    pub fear: f64,
    pub happiness: f64,
    pub neutral: f64,
    pub sadness: f64,
    pub surprise: f64,
}

impl Sentiment {
    pub fn from_array(p: [f64; 8]) -> Self {
        Sentiment {
            anger: p[0],
            contempt: p[1],
            disgust: p[2],
            fear: p[3],
            happiness: p[4],
            neutral: p[5],
            sadness: p[6],
            surprise: p[7],
        }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.anger,
            self.contempt,
            self.disgust,
            self.fear,
            self.happiness,
            self.neutral,
            self.sadness,
            self.surprise,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    /// `[x, y, w, h]` in pixels.
    pub bbox: [f64; 4],
    pub gaze_direct: bool,
    /// Facial angle from the vertical, degrees.
    pub angle_deg: f64,
    pub sentiment: Sentiment,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FaceAnnotations {
    pub faces: Vec<Face>,
}

impl FaceAnnotations {
    pub fn validate(&self) -> Result<(), FaceError> {
        for (i, face) in self.faces.iter().enumerate() {
            let p = face.sentiment.to_array();
            if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(FaceError::Invalid {
                    face: i,
                    message: "sentiment entries must be finite and non-negative".into(),
                });
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(FaceError::SentimentSum { face: i, sum });
            }
            if face.bbox.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(FaceError::Invalid {
                    face: i,
                    message: "bbox entries must be finite and non-negative".into(),
                });
            }
            if !face.angle_deg.is_finite() {
                return Err(FaceError::Invalid {
                    face: i,
                    message: "angle_deg must be finite".into(),
                });
            }
        }
        Ok(())
    }

    /// Checks every bounding box lies inside `img`.
    pub fn check_bounds(&self, img: &Raster) -> Result<(), FaceError> {
        let (w, h) = (img.width() as f64, img.height() as f64);
        for (i, face) in self.faces.iter().enumerate() {
            let [x, y, bw, bh] = face.bbox;
            if x + bw > w || y + bh > h {
                return Err(FaceError::Invalid {
                    face: i,
                    message: format!("bbox {:?} exceeds {}x{} image", face.bbox, w, h),
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("annotations serialize")
    }
}

/// Sidecar location for an image: `<image_path>.faces.json`.
pub fn sidecar_path(image_path: &Path) -> PathBuf {
    let mut s = image_path.as_os_str().to_os_string();
    s.push(".faces.json");
    PathBuf::from(s)
}

/// Loads a face sidecar. A missing file means the image has no faces.
pub fn load_face_annotations(path: &Path) -> Result<FaceAnnotations, FaceError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(FaceAnnotations::default()),
        Err(source) => {
            return Err(FaceError::Io {
                path: path.to_path_buf(),
                source,
            })
        }
    };
    let ann: FaceAnnotations = serde_json::from_str(&text).map_err(|source| FaceError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    ann.validate()?;
    Ok(ann)
}

pub const FP_WIDTH: usize = 2;
pub const FP_NAMES: [&str; FP_WIDTH] = ["fp_has_face", "fp_face_count"];

/// `[has_face, face_count]`.
pub fn face_presence_features(a: &FaceAnnotations) -> Vec<f64> {
    let n = a.faces.len();
    vec![if n > 0 { 1.0 } else { 0.0 }, n as f64]
}

pub const GFS_WIDTH: usize = 10;
pub const GFS_NAMES: [&str; GFS_WIDTH] = [
    "gfs_gaze_direct_fraction",
    "gfs_mean_abs_angle",
    "gfs_anger",
    "gfs_contempt",
    "gfs_disgust",
    "gfs_fear",
    "gfs_happiness",
    "gfs_neutral",
    "gfs_sadness",
    "gfs_surprise",
];

/// Gaze fraction, mean absolute facial angle, and the mean of the per-face
/// sentiment distributions. All zeros when there are no faces.
pub fn gaze_sentiment_features(a: &FaceAnnotations) -> Vec<f64> {
    let mut out = vec![0.0; GFS_WIDTH];
    let n = a.faces.len();
    if n == 0 {
        return out;
    }
    let nf = n as f64;
    out[0] = a.faces.iter().filter(|f| f.gaze_direct).count() as f64 / nf;
    out[1] = a.faces.iter().map(|f| f.angle_deg.abs()).sum::<f64>() / nf;
    for face in &a.faces {
        for (slot, p) in out[2..].iter_mut().zip(face.sentiment.to_array()) {
            *slot += p;
        }
    }
    for slot in &mut out[2..] {
        *slot /= nf;
    }
    out
}
