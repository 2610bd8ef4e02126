//! Frame-level packing verification: blur gate, detector cascade,
//! smoothing and the missed-items list.

use std::error::Error;

use tripminder::tracker::{
    laplacian_variance, missed_items, Backends, Frame, LabelSynonyms, PackingSession, ScriptRecord,
    ScriptedClassifier, ScriptedDetector, ThresholdSegmenter, TrackerConfig,
};

fn sharp(index: usize) -> Frame {
    let gray = (0..24 * 24)
        .map(|i| {
            if (i / 24 / 3 + i % 24 / 3) % 2 == 0 {
                30
            } else {
                220
            }
        })
        .collect();
    Frame::from_gray(index, 24, 24, gray).expect("valid frame")
}

fn blurred(index: usize) -> Frame {
    Frame::from_gray(index, 24, 24, vec![128; 24 * 24]).expect("valid frame")
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let record = |frame_index, label: &str, confidence| ScriptRecord {
        frame_index,
        label: label.into(),
        confidence,
    };
    // Frames 0-11 show a bottle, 12-23 a jacket the detector is unsure
    // about, and frame 5 has one spurious "hat".
    let mut detections: Vec<_> = (0..12).map(|i| record(i, "bottle", 0.9)).collect();
    detections[5] = record(5, "hat", 0.95);
    detections.extend((12..24).map(|i| record(i, "jacket", 0.55)));
    let fallback: Vec<_> = (12..24).map(|i| record(i, "coat", 0.8)).collect();

    let mut backends = Backends {
        primary: Box::new(ScriptedDetector::new(
            detections,
            ["bottle", "hat", "jacket"].map(String::from),
        )),
        segmenter: Box::new(ThresholdSegmenter::new(128)),
        fallback: Box::new(ScriptedClassifier::new(fallback)),
    };
    let frames: Vec<Frame> = (0..24)
        .map(|i| if i % 7 == 3 { blurred(i) } else { sharp(i) })
        .collect();
    println!(
        "blur scores: sharp {:.1}, blurred {:.1}",
        laplacian_variance(&frames[0])?,
        laplacian_variance(&frames[3])?
    );

    let mut session = PackingSession::new(TrackerConfig::default())?;
    for verdict in session.ingest(&frames, &mut backends)? {
        println!(
            "frame {:>2} {:?} {:?}",
            verdict.frame_index,
            verdict.status,
            verdict.accepted_label()
        );
    }
    let progress = session.progress();
    println!("confirmed {:?}", progress.confirmed);

    let pruned = ["ID", "card", "jacket", "water", "hat"].map(String::from);
    let missed = missed_items(&pruned, session.confirmed(), &LabelSynonyms::bundled());
    println!("missed {missed:?}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
