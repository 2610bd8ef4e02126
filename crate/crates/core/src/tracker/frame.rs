use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use super::TrackerError;

/// A video frame: a row-major luminance plane plus an optional interleaved
/// RGB plane of the same size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub index: usize,
    width: usize,
    height: usize,
    gray: Vec<u8>,
    color: Option<Vec<u8>>,
}

impl Frame {
    pub fn from_gray(
        index: usize,
        width: usize,
        height: usize,
        gray: Vec<u8>,
    ) -> Result<Self, TrackerError> {
        if width < 3 || height < 3 {
            return Err(TrackerError::FrameTooSmall { width, height });
        }
        if gray.len() != width * height {
            return Err(TrackerError::MalformedFrame(format!(
                "gray plane has {} bytes, expected {}",
                gray.len(),
                width * height
            )));
        }
        Ok(Self {
            index,
            width,
            height,
            gray,
            color: None,
        })
    }

    /// Builds a frame from interleaved RGB; the gray plane is derived with
    /// Rec. 601 luma weights.
    pub fn from_rgb(
        index: usize,
        width: usize,
        height: usize,
        rgb: Vec<u8>,
    ) -> Result<Self, TrackerError> {
        if rgb.len() != width * height * 3 {
            return Err(TrackerError::MalformedFrame(format!(
                "color plane has {} bytes, expected {}",
                rgb.len(),
                width * height * 3
            )));
        }
        let gray = rgb
            .chunks_exact(3)
            .map(|p| {
                (0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64).round() as u8
            })
            .collect();
        let mut frame = Self::from_gray(index, width, height, gray)?;
        frame.color = Some(rgb);
        Ok(frame)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn gray(&self) -> &[u8] {
        &self.gray
    }

    pub fn color(&self) -> Option<&[u8]> {
        self.color.as_deref()
    }

    pub fn gray_at(&self, x: usize, y: usize) -> u8 {
        self.gray[y * self.width + x]
    }

    /// The RGB plane, replicating gray when the frame has no color.
    pub fn rgb(&self) -> Vec<u8> {
        match &self.color {
            Some(c) => c.clone(),
            None => self.gray.iter().flat_map(|&g| [g, g, g]).collect(),
        }
    }

    /// Decodes a binary PGM (P5) or PPM (P6) image.
    pub fn from_pnm(index: usize, bytes: &[u8]) -> Result<Self, TrackerError> {
        let image = image::load(Cursor::new(bytes), ImageFormat::Pnm)
            .map_err(|e| TrackerError::MalformedFrame(e.to_string()))?;
        let (w, h) = (image.width() as usize, image.height() as usize);
        match image {
            DynamicImage::ImageLuma8(buf) => Self::from_gray(index, w, h, buf.into_raw()),
            other => Self::from_rgb(index, w, h, other.to_rgb8().into_raw()),
        }
    }

    pub fn read_pnm(index: usize, path: &Path) -> Result<Self, TrackerError> {
        let bytes = std::fs::read(path)
            .map_err(|e| TrackerError::MalformedFrame(format!("{}: {e}", path.display())))?;
        Self::from_pnm(index, &bytes)
    }

    /// Encodes as P6 when the frame has color, P5 otherwise.
    pub fn to_pnm(&self) -> Vec<u8> {
        let (magic, data) = match &self.color {
            Some(c) => ("P6", c.as_slice()),
            None => ("P5", self.gray.as_slice()),
        };
        let mut out = format!("{magic}\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(data);
        out
    }
}

/// Binary foreground mask, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl Mask {
    pub fn filled(width: usize, height: usize, value: bool) -> Self {
        Self {
            width,
            height,
            bits: vec![value; width * height],
        }
    }
}

/// Keeps the frame's color where the mask is set and blacks out the rest.
pub fn apply_salient_mask(frame: &Frame, mask: &Mask) -> Result<Frame, TrackerError> {
    if mask.width != frame.width
        || mask.height != frame.height
        || mask.bits.len() != frame.gray.len()
    {
        return Err(TrackerError::DimensionMismatch {
            frame: (frame.width, frame.height),
            mask: (mask.width, mask.height),
        });
    }
    let rgb: Vec<u8> = frame
        .rgb()
        .chunks_exact(3)
        .zip(&mask.bits)
        .flat_map(|(px, &keep)| {
            if keep {
                [px[0], px[1], px[2]]
            } else {
                [0, 0, 0]
            }
        })
        .collect();
    let gray = frame
        .gray
        .iter()
        .zip(&mask.bits)
        .map(|(&g, &keep)| if keep { g } else { 0 })
        .collect();
    Ok(Frame {
        index: frame.index,
        width: frame.width,
        height: frame.height,
        gray,
        color: Some(rgb),
    })
}

/// Reads a session manifest: one frame file per line, relative paths
/// resolved against the manifest's directory. Frames are numbered from
/// `first_index` in listing order.
pub fn load_manifest(path: &Path, first_index: usize) -> Result<Vec<Frame>, TrackerError> {
    let contents = std::fs::read_to_string(path)
        .map_err(|e| TrackerError::MalformedFrame(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    crate::text::data_lines(&contents)
        .enumerate()
        .map(|(i, line)| Frame::read_pnm(first_index + i, &base.join(line)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_tone() -> Frame {
        // 4x3, left half red, right half blue
        let rgb = (0..12)
            .flat_map(|i| {
                if i % 4 < 2 {
                    [200, 10, 10]
                } else {
                    [10, 10, 200]
                }
            })
            .collect();
        Frame::from_rgb(7, 4, 3, rgb).unwrap()
    }

    #[test]
    fn rejects_small_or_inconsistent_frames() {
        assert!(matches!(
            Frame::from_gray(0, 2, 5, vec![0; 10]),
            Err(TrackerError::FrameTooSmall { .. })
        ));
        assert!(matches!(
            Frame::from_gray(0, 3, 3, vec![0; 8]),
            Err(TrackerError::MalformedFrame(_))
        ));
    }

    #[test]
    fn mask_identity_and_blackout() {
        let f = two_tone();
        let same = apply_salient_mask(&f, &Mask::filled(4, 3, true)).unwrap();
        assert_eq!(same.rgb(), f.rgb());
        assert_eq!(same.gray(), f.gray());
        assert_eq!(same.index, 7);
        let black = apply_salient_mask(&f, &Mask::filled(4, 3, false)).unwrap();
        assert!(black.rgb().iter().all(|&v| v == 0));
    }

    #[test]
    fn half_mask_is_pixelwise() {
        let f = two_tone();
        let mask = Mask {
            width: 4,
            height: 3,
            bits: (0..12).map(|i| i % 4 < 2).collect(),
        };
        let mixed = apply_salient_mask(&f, &mask).unwrap();
        let (orig, out) = (f.rgb(), mixed.rgb());
        for y in 0..3 {
            for x in 0..4 {
                let p = (y * 4 + x) * 3;
                let expected: &[u8] = if x < 2 { &orig[p..p + 3] } else { &[0, 0, 0] };
                assert_eq!(&out[p..p + 3], expected, "pixel ({x},{y})");
            }
        }
    }

    #[test]
    fn mask_dimension_mismatch() {
        assert!(matches!(
            apply_salient_mask(&two_tone(), &Mask::filled(3, 3, true)),
            Err(TrackerError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gray_frames_gain_color_when_masked() {
        let f = Frame::from_gray(0, 3, 3, (0..9).collect()).unwrap();
        let mixed = apply_salient_mask(&f, &Mask::filled(3, 3, true)).unwrap();
        assert_eq!(mixed.color().unwrap()[3..6], [1, 1, 1]);
    }

    #[test]
    fn pnm_round_trip() {
        let gray = Frame::from_gray(3, 3, 4, (0..12).map(|v| v * 20).collect()).unwrap();
        assert_eq!(Frame::from_pnm(3, &gray.to_pnm()).unwrap(), gray);
        let color = two_tone();
        assert_eq!(Frame::from_pnm(7, &color.to_pnm()).unwrap(), color);
        assert!(matches!(
            Frame::from_pnm(0, b"P5\n1 1\n"),
            Err(TrackerError::MalformedFrame(_))
        ));
    }

    #[test]
    fn manifest_loads_in_order() {
        let dir = tempfile::tempdir().unwrap();
        for (i, v) in [10u8, 20, 30].iter().enumerate() {
            let f = Frame::from_gray(0, 3, 3, vec![*v; 9]).unwrap();
            std::fs::write(dir.path().join(format!("f{i}.pgm")), f.to_pnm()).unwrap();
        }
        std::fs::write(dir.path().join("session.txt"), "# frames\nf2.pgm\nf0.pgm\n").unwrap();
        let frames = load_manifest(&dir.path().join("session.txt"), 5).unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!((frames[0].index, frames[0].gray()[0]), (5, 30));
        assert_eq!((frames[1].index, frames[1].gray()[0]), (6, 10));
    }
}
