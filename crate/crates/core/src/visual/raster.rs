use std::fs;
use std::path::{Path, PathBuf};

/// Largest accepted image, in pixels.
pub const MAX_PIXELS: usize = 1 << 28;

#[derive(Debug, thiserror::Error)]
pub enum ImageError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported image format: {0}")]
    Unsupported(String),
    #[error("truncated image data: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("invalid dimensions {width}x{height}")]
    BadDimensions { width: u64, height: u64 },
    #[error("malformed header: {0}")]
    Header(String),
    #[error("png: {0}")]
    Png(String),
}

/// 8-bit RGB image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl Raster {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self, ImageError> {
        check_dimensions(width as u64, height as u64)?;
        if pixels.len() != width * height {
            return Err(ImageError::Truncated {
                expected: width * height,
                found: pixels.len(),
            });
        }
        Ok(Raster {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self, ImageError> {
        check_dimensions(width as u64, height as u64)?;
        Raster::new(width, height, vec![rgb; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    /// Binary PPM (P6, maxval 255).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for p in &self.pixels {
            out.extend_from_slice(p);
        }
        out
    }

    /// 8-bit RGB PNG.
    pub fn to_png(&self) -> Result<Vec<u8>, ImageError> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc
                .write_header()
                .map_err(|e| ImageError::Png(e.to_string()))?;
            let data: Vec<u8> = self.pixels.iter().flatten().copied().collect();
            w.write_image_data(&data)
                .map_err(|e| ImageError::Png(e.to_string()))?;
        }
        Ok(out)
    }
}

fn check_dimensions(width: u64, height: u64) -> Result<(), ImageError> {
    let bad = ImageError::BadDimensions { width, height };
    if width == 0 || height == 0 {
        return Err(bad);
    }
    match width.checked_mul(height) {
        Some(n) if n <= MAX_PIXELS as u64 => Ok(()),
        _ => Err(bad),
    }
}

/// Reads a PPM (P6) or PNG file.
pub fn decode_image(path: &Path) -> Result<Raster, ImageError> {
    let bytes = fs::read(path).map_err(|source| ImageError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_bytes(&bytes)
}

/// Decodes in-memory PPM (P6) or PNG bytes, chosen by magic number.
pub fn decode_bytes(bytes: &[u8]) -> Result<Raster, ImageError> {
    if bytes.starts_with(b"P6") {
        decode_ppm(bytes)
    } else if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        decode_png(bytes)
    } else {
        let magic: String = bytes.iter().take(4).map(|b| format!("{b:02x}")).collect();
        Err(ImageError::Unsupported(format!("magic bytes {magic}")))
    }
}

fn decode_ppm(bytes: &[u8]) -> Result<Raster, ImageError> {
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for field in &mut fields {
        // whitespace and `#` comments between header fields
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while let Some(&b) = bytes.get(pos) {
                        pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(ImageError::Header("expected a decimal number".into()));
        }
        let digits = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *field = digits
            .parse()
            .map_err(|_| ImageError::Header(format!("number out of range: {digits}")))?;
    }
    let [width, height, maxval] = fields;
    check_dimensions(width, height)?;
    if maxval != 255 {
        return Err(ImageError::Unsupported(format!("PPM maxval {maxval}")));
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(ImageError::Header("missing separator after maxval".into())),
    }
    let (width, height) = (width as usize, height as usize);
    let expected = width * height * 3;
    let data = &bytes[pos..];
    if data.len() < expected {
        return Err(ImageError::Truncated {
            expected,
            found: data.len(),
        });
    }
    let pixels = data[..expected]
        .chunks_exact(3)
        .map(|c| [c[0], c[1], c[2]])
        .collect();
    Raster::new(width, height, pixels)
}

fn decode_png(bytes: &[u8]) -> Result<Raster, ImageError> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder
        .read_info()
        .map_err(|e| ImageError::Png(e.to_string()))?;
    let info = reader.info();
    let (width, height) = (info.width as u64, info.height as u64);
    check_dimensions(width, height)?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(ImageError::Unsupported(format!(
            "PNG bit depth {:?}",
            info.bit_depth
        )));
    }
    let channels = match info.color_type {
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        other => return Err(ImageError::Unsupported(format!("PNG color type {other:?}"))),
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| ImageError::BadDimensions { width, height })?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(|e| match e {
        png::DecodingError::IoError(io) if io.kind() == std::io::ErrorKind::UnexpectedEof => {
            ImageError::Truncated {
                expected: size,
                found: bytes.len(),
            }
        }
        other => ImageError::Png(other.to_string()),
    })?;
    let (width, height) = (width as usize, height as usize);
    let mut pixels = Vec::with_capacity(width * height);
    for row in buf[..frame.buffer_size()].chunks_exact(frame.line_size) {
        for px in row[..width * channels].chunks_exact(channels) {
            pixels.push([px[0], px[1], px[2]]);
        }
    }
    Raster::new(width, height, pixels)
}
