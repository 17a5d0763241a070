//! JSON snapshot container for sealed nets.
//!
//! ```text
//! {
//!   "version": 1,
//!   "places": ["<address>", ...],          // id order
//!   "transitions": ["<tx id>", ...],       // id order
//!   "pre":  [[row, col, value], ...],      // sorted by row, then col
//!   "post": [[row, col, value], ...]
//! }
//! ```
//!
//! Writing the same net always produces the same bytes. Loading validates
//! every section and reports the first one that is wrong.

use super::{PlaceTransitionNet, Side, SparseIncidence};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot I/O: {0}")]
    Io(#[from] io::Error),
    #[error("only sealed nets can be saved")]
    NotSealed,
    #[error("snapshot version {found} is not supported (expected {SNAPSHOT_VERSION})")]
    VersionMismatch { found: u64 },
    #[error("snapshot section `{section}` is invalid: {message}")]
    Section { section: &'static str, message: String },
}

impl SnapshotError {
    /// Name of the offending section, when the error is tied to one.
    pub fn section(&self) -> Option<&'static str> {
        match self {
            SnapshotError::Section { section, .. } => Some(section),
            SnapshotError::VersionMismatch { .. } => Some("version"),
            _ => None,
        }
    }

    fn section_err(section: &'static str, message: impl ToString) -> Self {
        SnapshotError::Section {
            section,
            message: message.to_string(),
        }
    }
}

struct Triplets<'a>(&'a SparseIncidence);

impl Serialize for Triplets<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.nnz()))?;
        for (row, col, value) in self.0.triplets() {
            seq.serialize_element(&[row as u64, col as u64, value as u64])?;
        }
        seq.end()
    }
}

#[derive(Serialize)]
struct SnapshotOut<'a> {
    version: u32,
    places: &'a [String],
    transitions: &'a [String],
    pre: Triplets<'a>,
    post: Triplets<'a>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SnapshotIn<'a> {
    #[serde(borrow)]
    version: &'a RawValue,
    #[serde(borrow)]
    places: &'a RawValue,
    #[serde(borrow)]
    transitions: &'a RawValue,
    #[serde(borrow)]
    pre: &'a RawValue,
    #[serde(borrow)]
    post: &'a RawValue,
}

impl PlaceTransitionNet {
    /// Writes the snapshot document to `writer`.
    pub fn save_snapshot<W: Write>(&self, writer: W) -> Result<(), SnapshotError> {
        if !self.is_sealed() {
            return Err(SnapshotError::NotSealed);
        }
        let doc = SnapshotOut {
            version: SNAPSHOT_VERSION,
            places: self.addresses(),
            transitions: self.transaction_ids(),
            pre: Triplets(self.side(Side::Pre)),
            post: Triplets(self.side(Side::Post)),
        };
        let mut writer = BufWriter::new(writer);
        serde_json::to_writer(&mut writer, &doc).map_err(io::Error::from)?;
        writer.flush()?;
        Ok(())
    }

    pub fn save_snapshot_file(&self, path: impl AsRef<Path>) -> Result<(), SnapshotError> {
        self.save_snapshot(File::create(path)?)
    }

    /// Serializes to an in-memory byte vector.
    pub fn snapshot_bytes(&self) -> Result<Vec<u8>, SnapshotError> {
        let mut buf = Vec::new();
        self.save_snapshot(&mut buf)?;
        Ok(buf)
    }

    pub fn load_snapshot<R: Read>(reader: R) -> Result<Self, SnapshotError> {
        let mut text = String::new();
        BufReader::new(reader)
            .read_to_string(&mut text)
            .map_err(|e| match e.kind() {
                io::ErrorKind::InvalidData => SnapshotError::section_err("document", "not valid UTF-8"),
                _ => SnapshotError::Io(e),
            })?;
        Self::load_snapshot_str(&text)
    }

    pub fn load_snapshot_file(path: impl AsRef<Path>) -> Result<Self, SnapshotError> {
        Self::load_snapshot(File::open(path)?)
    }

    pub fn load_snapshot_str(text: &str) -> Result<Self, SnapshotError> {
        let doc: SnapshotIn<'_> =
            serde_json::from_str(text).map_err(|e| SnapshotError::section_err("document", e))?;

        let version: u64 = serde_json::from_str(doc.version.get())
            .map_err(|e| SnapshotError::section_err("version", e))?;
        if version != SNAPSHOT_VERSION as u64 {
            return Err(SnapshotError::VersionMismatch { found: version });
        }

        let places: Vec<String> = serde_json::from_str(doc.places.get())
            .map_err(|e| SnapshotError::section_err("places", e))?;
        let transitions: Vec<String> = serde_json::from_str(doc.transitions.get())
            .map_err(|e| SnapshotError::section_err("transitions", e))?;
        let (rows, cols) = (places.len(), transitions.len());

        let parse_side = |section: &'static str, raw: &RawValue| {
            let triplets: Vec<[u64; 3]> =
                serde_json::from_str(raw.get()).map_err(|e| SnapshotError::section_err(section, e))?;
            let mut converted = Vec::with_capacity(triplets.len());
            for [r, c, v] in triplets {
                let value = u32::try_from(v)
                    .map_err(|_| SnapshotError::section_err(section, format!("value {v} too large")))?;
                converted.push((r as usize, c as usize, value));
            }
            SparseIncidence::from_sorted_triplets(rows, cols, converted)
                .map_err(|e| SnapshotError::section_err(section, e))
        };
        let pre = parse_side("pre", doc.pre)?;
        let post = parse_side("post", doc.post)?;

        PlaceTransitionNet::from_parts(places, transitions, pre, post).map_err(|message| {
            let section = if message.starts_with("places") {
                "places"
            } else {
                "transitions"
            };
            SnapshotError::section_err(section, message)
        })
    }
}
