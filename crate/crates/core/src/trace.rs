//! JSON Lines trace log, one completed session per line:
//!
//! ```json
//! {"session":"s-1","level":1,"triplet":[3,4,1],"target":42,"moves":[{"kind":"single_left","count":4,"t_ms":1234}],"optimal":5,"score":970}
//! ```

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::model::{ClickTriplet, MoveKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceMove {
    pub kind: MoveKind,
    pub count: i64,
    pub t_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord {
    pub session: String,
    pub level: u32,
    pub triplet: ClickTriplet,
    pub target: i64,
    pub moves: Vec<TraceMove>,
    pub optimal: u32,
    pub score: i64,
}

impl TraceRecord {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("trace record serializes")
    }

    pub fn from_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }

    pub fn kinds(&self) -> impl Iterator<Item = MoveKind> + '_ {
        self.moves.iter().map(|m| m.kind)
    }
}

/// Append-only writer; each record lands as one `write` of a full line.
#[derive(Debug)]
pub struct TraceWriter {
    file: Mutex<File>,
}

impl TraceWriter {
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self {
            file: Mutex::new(file),
        })
    }

    pub fn append(&self, record: &TraceRecord) -> io::Result<()> {
        let mut line = record.to_line();
        line.push('\n');
        let mut file = self.file.lock().unwrap_or_else(|e| e.into_inner());
        file.write_all(line.as_bytes())?;
        file.flush()
    }
}

/// One parsed line of a trace log with its 1-based line number. Blank lines
/// are skipped.
pub type ParsedLine = (usize, Result<TraceRecord, serde_json::Error>);

pub fn read_traces(reader: impl BufRead) -> io::Result<Vec<ParsedLine>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push((i + 1, TraceRecord::from_line(&line)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = r#"{"session":"s-1","level":1,"triplet":[3,4,1],"target":42,"moves":[{"kind":"single_left","count":4,"t_ms":1234}],"optimal":5,"score":970}"#;

    #[test]
    fn documented_line_round_trips() {
        let rec = TraceRecord::from_line(LINE).unwrap();
        assert_eq!(rec.moves[0].kind, MoveKind::SingleLeft);
        assert_eq!(rec.to_line(), LINE);
    }

    #[test]
    fn rejects_unknown_kinds_and_fields() {
        assert!(TraceRecord::from_line(&LINE.replace("single_left", "triple_left")).is_err());
        assert!(
            TraceRecord::from_line(&LINE.replace(r#""score":970"#, r#""score":970,"x":1"#))
                .is_err()
        );
    }

    #[test]
    fn writer_appends_whole_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl");
        let rec = TraceRecord::from_line(LINE).unwrap();
        {
            let w = TraceWriter::open(&path).unwrap();
            w.append(&rec).unwrap();
            w.append(&rec).unwrap();
        }
        let w = TraceWriter::open(&path).unwrap();
        w.append(&rec).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = read_traces(text.as_bytes()).unwrap();
        assert_eq!(parsed.len(), 3);
        assert!(parsed.iter().all(|(_, r)| r.as_ref().unwrap() == &rec));
    }

    #[test]
    fn reader_numbers_lines_and_skips_blanks() {
        let text = format!("{LINE}\n\nnot json\n{LINE}\n");
        let parsed = read_traces(text.as_bytes()).unwrap();
        let numbers: Vec<_> = parsed.iter().map(|(n, r)| (*n, r.is_ok())).collect();
        assert_eq!(numbers, vec![(1, true), (3, false), (4, true)]);
    }
}
