use super::{Frame, TrackerError};

/// Population variance of the 4-neighbour Laplacian
/// `[[0,1,0],[1,-4,1],[0,1,0]]` over interior pixels (no padding). Low
/// values mean a blurry frame.
pub fn laplacian_variance(frame: &Frame) -> Result<f64, TrackerError> {
    let (w, h) = (frame.width(), frame.height());
    if w < 3 || h < 3 {
        return Err(TrackerError::FrameTooSmall {
            width: w,
            height: h,
        });
    }
    let g = frame.gray();
    let mut responses = Vec::with_capacity((w - 2) * (h - 2));
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let c = y * w + x;
            let r = g[c - w] as i32 + g[c + w] as i32 + g[c - 1] as i32 + g[c + 1] as i32
                - 4 * g[c] as i32;
            responses.push(r as f64);
        }
    }
    let n = responses.len() as f64;
    let mean = responses.iter().sum::<f64>() / n;
    Ok(responses.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n)
}
