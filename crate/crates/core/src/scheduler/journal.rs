use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{EventKind, SchedulerError};
use crate::itinerary::Itinerary;
use crate::mining::RecommendationList;
use crate::tracker::{FrameVerdict, TrackerConfig};

/// One line of the append-only trip journal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum JournalRecord {
    TripCreated {
        trip_id: String,
        itinerary: Itinerary,
        recommendations: RecommendationList,
    },
    Scheduled {
        trip_id: String,
        events: Vec<(String, EventKind, DateTime<Utc>)>,
    },
    Selected {
        trip_id: String,
        items: Vec<String>,
    },
    PackingStarted {
        trip_id: String,
        config: TrackerConfig,
    },
    PackingProgress {
        trip_id: String,
        verdicts: Vec<FrameVerdict>,
    },
    Fired {
        event_id: String,
        payload: Vec<String>,
        /// Whether firing moved the trip to ALERTED.
        alerted: bool,
    },
    Alerted {
        trip_id: String,
    },
    Delivered {
        event_id: String,
    },
}

/// JSON-lines journal file. Every append is flushed and synced before the
/// in-memory state changes.
#[derive(Debug)]
pub struct Journal {
    path: PathBuf,
    file: File,
}

impl Journal {
    /// Opens (creating if needed) the journal and returns it with the
    /// records already on disk. A torn final line is dropped and truncated
    /// away; a malformed line anywhere else is an error.
    pub fn open(path: &Path) -> Result<(Self, Vec<JournalRecord>), SchedulerError> {
        let io = |e: std::io::Error| SchedulerError::Journal(format!("{}: {e}", path.display()));
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
        let mut records = Vec::new();
        let mut good_len = 0u64;
        if path.exists() {
            let reader = BufReader::new(File::open(path).map_err(io)?);
            let mut lines = reader.split(b'\n').peekable();
            let mut offset = 0u64;
            while let Some(line) = lines.next() {
                let line = line.map_err(io)?;
                let is_last = lines.peek().is_none();
                offset += line.len() as u64 + 1;
                if line.iter().all(u8::is_ascii_whitespace) {
                    good_len = offset;
                    continue;
                }
                match serde_json::from_slice::<JournalRecord>(&line) {
                    Ok(r) => {
                        records.push(r);
                        good_len = offset;
                    }
                    Err(_) if is_last => break,
                    Err(e) => {
                        return Err(SchedulerError::Journal(format!(
                            "{}: corrupt record: {e}",
                            path.display()
                        )))
                    }
                }
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io)?;
        let mut file = file;
        let on_disk = file.metadata().map_err(io)?.len();
        if on_disk > good_len {
            file.set_len(good_len).map_err(io)?;
        } else if on_disk < good_len {
            // Complete last record without its newline.
            file.write_all(b"\n").map_err(io)?;
        }
        Ok((
            Self {
                path: path.to_owned(),
                file,
            },
            records,
        ))
    }

    pub fn append(&mut self, record: &JournalRecord) -> Result<(), SchedulerError> {
        let mut line = serde_json::to_vec(record)
            .map_err(|e| SchedulerError::Journal(format!("encode: {e}")))?;
        line.push(b'\n');
        self.file
            .write_all(&line)
            .and_then(|_| self.file.sync_data())
            .map_err(|e| SchedulerError::Journal(format!("{}: {e}", self.path.display())))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torn_tail_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("j.jsonl");
        {
            let (mut j, records) = Journal::open(&path).unwrap();
            assert!(records.is_empty());
            j.append(&JournalRecord::Delivered {
                event_id: "a".into(),
            })
            .unwrap();
        }
        std::fs::OpenOptions::new()
            .append(true)
            .open(&path)
            .unwrap()
            .write_all(br#"{"type":"deliv"#)
            .unwrap();
        let (mut j, records) = Journal::open(&path).unwrap();
        assert_eq!(records.len(), 1);
        j.append(&JournalRecord::Delivered {
            event_id: "b".into(),
        })
        .unwrap();
        drop(j);
        let (_, records) = Journal::open(&path).unwrap();
        assert_eq!(records.len(), 2);
    }

    #[test]
    fn corruption_in_the_middle_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("j.jsonl");
        std::fs::write(
            &path,
            "garbage\n{\"type\":\"delivered\",\"event_id\":\"a\"}\n",
        )
        .unwrap();
        assert!(matches!(
            Journal::open(&path),
            Err(SchedulerError::Journal(_))
        ));
    }
}
