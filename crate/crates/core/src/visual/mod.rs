//! Visual feature families: facial presence (FP), gaze and facial sentiment
//! (GFS), and hue/saturation/value statistics (HSV).
//!
//! Face detection itself happens upstream; this module consumes per-image
//! JSON sidecars (`<image>.faces.json`) and derives the features from them.

mod faces;
mod hsv;
mod raster;

pub use faces::{
    face_presence_features, gaze_sentiment_features, load_face_annotations, sidecar_path, Face,
    FaceAnnotations, FaceError, Sentiment, FP_NAMES, FP_WIDTH, GFS_NAMES, GFS_WIDTH,
    SENTIMENT_CLASSES,
};
pub use hsv::{hsv_features, hsv_to_rgb, rgb_to_hsv, HsvStats};
pub use raster::{decode_bytes, decode_image, ImageError, Raster, MAX_PIXELS};
