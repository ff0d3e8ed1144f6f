use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::raster::Raster;

/// Hexcone RGB → HSV. Returns hue in degrees `[0, 360)`, saturation and
/// value in `[0, 1]`. Hue is 0 for achromatic colors.
pub fn rgb_to_hsv(r: u8, g: u8, b: u8) -> (f64, f64, f64) {
    let (ri, gi, bi) = (i32::from(r), i32::from(g), i32::from(b));
    let max = ri.max(gi).max(bi);
    let min = ri.min(gi).min(bi);
    let delta = max - min;
    let v = f64::from(max) / 255.0;
    if delta == 0 {
        return (0.0, 0.0, v);
    }
    let s = f64::from(delta) / f64::from(max);
    let d = f64::from(delta);
    let mut h = if max == ri {
        60.0 * f64::from(gi - bi) / d
    } else if max == gi {
        60.0 * (f64::from(bi - ri) / d + 2.0)
    } else {
        60.0 * (f64::from(ri - gi) / d + 4.0)
    };
    if h < 0.0 {
        h += 360.0;
    }
    if h >= 360.0 {
        h -= 360.0;
    }
    (h, s, v)
}

/// HSV → RGB, rounding each channel to the nearest level.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let h = h.rem_euclid(360.0);
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r1, g1, b1) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let level = |u: f64| ((u + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [level(r1), level(g1), level(b1)]
}

/// Pixel-level HSV summary of an image.
///
/// Hue is a circular quantity, so it is summarized by the mean unit vector
/// `(cos h, sin h)` over chromatic pixels (`s > 0`); `hue_resultant` is that
/// vector's length and `hue_mean_deg` its direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsvStats {
    pub hue_cos_mean: f64,
    pub hue_sin_mean: f64,
    pub hue_mean_deg: f64,
    pub hue_resultant: f64,
    pub sat_mean: f64,
    pub val_mean: f64,
}

impl HsvStats {
    pub const WIDTH: usize = 6;
    pub const NAMES: [&'static str; Self::WIDTH] = [
        "hsv_hue_cos_mean",
        "hsv_hue_sin_mean",
        "hsv_hue_mean_deg",
        "hsv_hue_resultant",
        "hsv_sat_mean",
        "hsv_val_mean",
    ];

    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.hue_cos_mean,
            self.hue_sin_mean,
            self.hue_mean_deg,
            self.hue_resultant,
            self.sat_mean,
            self.val_mean,
        ]
    }
}

/// Computes [`HsvStats`] for an image.
///
/// Pixels are first counted per distinct color and the sums run over colors
/// in sorted order, which makes the result independent of pixel order down
/// to the last bit.
pub fn hsv_features(img: &Raster) -> HsvStats {
    let mut counts: HashMap<[u8; 3], u64> = HashMap::new();
    for &px in img.pixels() {
        *counts.entry(px).or_default() += 1;
    }
    let mut colors: Vec<([u8; 3], u64)> = counts.into_iter().collect();
    colors.sort_unstable();

    let total = img.pixels().len() as f64;
    let chromatic: u64 = colors
        .iter()
        .filter(|(c, _)| rgb_to_hsv(c[0], c[1], c[2]).1 > 0.0)
        .map(|&(_, n)| n)
        .sum();

    let (mut cos_sum, mut sin_sum, mut sat, mut val) = (0.0, 0.0, 0.0, 0.0);
    for &(c, n) in &colors {
        let (h, s, v) = rgb_to_hsv(c[0], c[1], c[2]);
        let share = n as f64 / total;
        sat += share * s;
        val += share * v;
        if s > 0.0 {
            let hue_share = n as f64 / chromatic as f64;
            let rad = h.to_radians();
            cos_sum += hue_share * rad.cos();
            sin_sum += hue_share * rad.sin();
        }
    }

    let resultant = cos_sum.hypot(sin_sum);
    let mean_deg = if resultant == 0.0 {
        0.0
    } else {
        let d = sin_sum.atan2(cos_sum).to_degrees();
        let d = if d < 0.0 { d + 360.0 } else { d };
        if d >= 360.0 {
            d - 360.0
        } else {
            d
        }
    };
    HsvStats {
        hue_cos_mean: cos_sum,
        hue_sin_mean: sin_sum,
        hue_mean_deg: mean_deg,
        hue_resultant: resultant,
        sat_mean: sat,
        val_mean: val,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    #[test]
    fn primaries_and_gray() {
        assert_eq!(rgb_to_hsv(255, 0, 0), (0.0, 1.0, 1.0));
        assert_eq!(rgb_to_hsv(0, 0, 255), (240.0, 1.0, 1.0));
        assert_eq!(rgb_to_hsv(0, 255, 0), (120.0, 1.0, 1.0));
        assert_eq!(rgb_to_hsv(128, 128, 128), (0.0, 0.0, 128.0 / 255.0));
        assert_eq!(rgb_to_hsv(0, 0, 0), (0.0, 0.0, 0.0));
        assert_eq!(rgb_to_hsv(0, 255, 255), (180.0, 1.0, 1.0));
    }

    #[test]
    fn uniform_red() {
        let s = hsv_features(&Raster::filled(5, 4, [255, 0, 0]).unwrap());
        assert_eq!(s.hue_mean_deg, 0.0);
        assert_eq!(s.hue_resultant, 1.0);
        assert_eq!(s.sat_mean, 1.0);
        assert_eq!(s.val_mean, 1.0);
    }

    #[test]
    fn uniform_black_is_dark_and_hueless() {
        let s = hsv_features(&Raster::filled(3, 3, [0, 0, 0]).unwrap());
        assert_eq!(s.val_mean, 0.0);
        assert_eq!(s.hue_resultant, 0.0);
        assert_eq!(s.hue_mean_deg, 0.0);
    }

    #[test]
    fn antipodal_hues_cancel() {
        let mut px = vec![[255, 0, 0]; 8];
        px.extend(vec![[0, 255, 255]; 8]);
        let s = hsv_features(&Raster::new(4, 4, px).unwrap());
        assert!(s.hue_resultant < 1e-9, "{}", s.hue_resultant);
        assert_eq!(s.sat_mean, 1.0);
    }

    #[test]
    fn achromatic_pixels_carry_no_hue_mass() {
        let mut px = vec![[0, 0, 255]; 2];
        px.extend(vec![[40, 40, 40]; 6]);
        let s = hsv_features(&Raster::new(4, 2, px).unwrap());
        assert_eq!(s.hue_resultant, 1.0);
        assert!((s.hue_mean_deg - 240.0).abs() < 1e-9);
    }

    #[test]
    fn round_trip_corners() {
        for r in [0u8, 1, 127, 128, 254, 255] {
            for g in [0u8, 1, 127, 128, 254, 255] {
                for b in [0u8, 1, 127, 128, 254, 255] {
                    let (h, s, v) = rgb_to_hsv(r, g, b);
                    let back = hsv_to_rgb(h, s, v);
                    for (x, y) in back.iter().zip([r, g, b]) {
                        assert!((i16::from(*x) - i16::from(y)).abs() <= 1, "{r},{g},{b}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn uniform_image_equals_single_pixel(r: u8, g: u8, b: u8, w in 1usize..7, h in 1usize..7) {
            let (hue, s, v) = rgb_to_hsv(r, g, b);
            let stats = hsv_features(&Raster::filled(w, h, [r, g, b]).unwrap());
            prop_assert_eq!(stats.sat_mean, s);
            prop_assert_eq!(stats.val_mean, v);
            if s > 0.0 {
                prop_assert!((stats.hue_resultant - 1.0).abs() < 1e-12);
                let diff = (stats.hue_mean_deg - hue).abs();
                prop_assert!(diff.min(360.0 - diff) < 1e-9);
            } else {
                prop_assert_eq!(stats.hue_resultant, 0.0);
            }
        }

        #[test]
        fn shuffle_invariant(px in proptest::collection::vec(any::<[u8; 3]>(), 1..64), seed: u64) {
            let n = px.len();
            let a = hsv_features(&Raster::new(n, 1, px.clone()).unwrap());
            let mut shuffled = px;
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let b = hsv_features(&Raster::new(1, n, shuffled).unwrap());
            prop_assert_eq!(a, b);
        }

        #[test]
        fn stats_in_range(px in proptest::collection::vec(any::<[u8; 3]>(), 1..64)) {
            let s = hsv_features(&Raster::new(px.len(), 1, px).unwrap());
            prop_assert!(s.hue_resultant <= 1.0 + 1e-12);
            prop_assert!((0.0..360.0).contains(&s.hue_mean_deg));
            prop_assert!((0.0..=1.0).contains(&s.sat_mean));
            prop_assert!((0.0..=1.0).contains(&s.val_mean));
            prop_assert!((s.hue_cos_mean.hypot(s.hue_sin_mean) - s.hue_resultant).abs() < 1e-15);
        }
    }
}
