//! CSV and JSON emission and ingestion.
//!
//! Event files carry a `time` column and optionally a `parent` column, one
//! row per event in ascending time order. Parent labels follow the
//! [`EventSequence`] convention: `0` is background, `j >= 1` is the `j`-th
//! event of pre-history followed by the listed events.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::EventSequence;

/// Rows of an event CSV before a window is attached.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventTable {
    pub times: Vec<f64>,
    pub parents: Option<Vec<usize>>,
}

impl EventTable {
    /// Observation window `[start, end]` over these events.
    pub fn into_sequence(self, start: f64, end: f64) -> Result<EventSequence> {
        let seq = EventSequence::new(self.times, start, end)?;
        match self.parents {
            Some(p) => seq.with_parents(p),
            None => Ok(seq),
        }
    }

    /// Window from `start` to the last event (or `start` when empty).
    pub fn into_sequence_from(self, start: f64) -> Result<EventSequence> {
        let end = self.times.last().copied().unwrap_or(start).max(start);
        self.into_sequence(start, end)
    }
}

pub fn read_events<R: Read>(reader: R) -> Result<EventTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let time_col = column(&headers, "time")?
        .ok_or_else(|| Error::InvalidSequence("event CSV needs a `time` column".into()))?;
    let parent_col = column(&headers, "parent")?;
    let mut table = EventTable {
        times: Vec::new(),
        parents: parent_col.map(|_| Vec::new()),
    };
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let line = row + 2;
        let time = parse_field::<f64>(&record, time_col, line, "time")?;
        if !time.is_finite() {
            return Err(Error::InvalidSequence(format!("line {line}: time {time} is not finite")));
        }
        if table.times.last().is_some_and(|&prev| time < prev) {
            return Err(Error::InvalidSequence(format!(
                "line {line}: times must be ascending"
            )));
        }
        table.times.push(time);
        if let (Some(col), Some(parents)) = (parent_col, table.parents.as_mut()) {
            parents.push(parse_field::<usize>(&record, col, line, "parent")?);
        }
    }
    Ok(table)
}

pub fn read_events_file(path: impl AsRef<Path>) -> Result<EventTable> {
    read_events(BufReader::new(File::open(path)?))
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<Option<usize>> {
    let mut hits = headers.iter().enumerate().filter(|(_, h)| *h == name);
    let first = hits.next().map(|(i, _)| i);
    if hits.next().is_some() {
        return Err(Error::InvalidSequence(format!("duplicate `{name}` column")));
    }
    Ok(first)
}

fn parse_field<T: std::str::FromStr>(
    record: &csv::StringRecord,
    col: usize,
    line: usize,
    name: &str,
) -> Result<T> {
    let raw = record
        .get(col)
        .ok_or_else(|| Error::InvalidSequence(format!("line {line}: missing {name}")))?;
    raw.parse()
        .map_err(|_| Error::InvalidSequence(format!("line {line}: cannot parse {name} `{raw}`")))
}

/// Writes the in-window events of `seq`, with parents when it has them.
pub fn write_events<W: Write>(writer: W, seq: &EventSequence) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    match seq.parents() {
        Some(parents) => {
            w.write_record(["time", "parent"])?;
            for (t, p) in seq.times().iter().zip(parents) {
                w.write_record([t.to_string(), p.to_string()])?;
            }
        }
        None => {
            w.write_record(["time"])?;
            for t in seq.times() {
                w.write_record([t.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_events_file(path: impl AsRef<Path>, seq: &EventSequence) -> Result<()> {
    write_events(BufWriter::new(File::create(path)?), seq)
}

/// Two-column `theoretical,empirical` quantile table.
pub fn write_qq<W: Write>(writer: W, pairs: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["theoretical", "empirical"])?;
    for (q, e) in pairs {
        w.write_record([q.to_string(), e.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_qq_file(path: impl AsRef<Path>, pairs: &[(f64, f64)]) -> Result<()> {
    write_qq(BufWriter::new(File::create(path)?), pairs)
}

pub fn write_json_file<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json_file<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
