//! Canonical JSON files for interval and rectangle tilings.
//!
//! ```text
//! {"kind":"interval","length":N,"gap_set":[[d,k],...],"tiles":[[p0,p1,...],...],"annotations":{...}}
//! {"kind":"rectangle","width":W,"height":H,"step_type":[[[dx,dy],k],...],"paths":[[[x,y],...],...]}
//! ```
//!
//! Output is compact and field order is fixed, so equal tilings serialize to
//! identical bytes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gapset::GapSet;
use crate::interval::{Annotations, IntervalTiling};
use crate::lattice::{LatticePath, RectangleTiling, StepType};
use crate::tile::Tile;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed tiling file {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TilingFile {
    Interval {
        length: u64,
        gap_set: GapSet,
        tiles: Vec<Tile>,
        #[serde(default)]
        annotations: Annotations,
    },
    Rectangle {
        width: u64,
        height: u64,
        step_type: StepType,
        paths: Vec<LatticePath>,
        #[serde(default, skip_serializing_if = "is_false")]
        windowed: bool,
    },
}

impl From<IntervalTiling> for TilingFile {
    fn from(t: IntervalTiling) -> Self {
        TilingFile::Interval {
            length: t.length,
            gap_set: t.gap_set,
            tiles: t.tiles,
            annotations: t.annotations,
        }
    }
}

impl From<RectangleTiling> for TilingFile {
    fn from(r: RectangleTiling) -> Self {
        TilingFile::Rectangle {
            width: r.width,
            height: r.height,
            step_type: r.step_type,
            paths: r.paths,
            windowed: r.windowed,
        }
    }
}

impl TilingFile {
    pub fn into_interval(self) -> Option<IntervalTiling> {
        match self {
            TilingFile::Interval {
                length,
                gap_set,
                tiles,
                annotations,
            } => Some(IntervalTiling {
                length,
                gap_set,
                tiles,
                annotations,
            }),
            TilingFile::Rectangle { .. } => None,
        }
    }

    pub fn into_rectangle(self) -> Option<RectangleTiling> {
        match self {
            TilingFile::Rectangle {
                width,
                height,
                step_type,
                paths,
                windowed,
            } => Some(RectangleTiling {
                width,
                height,
                step_type,
                windowed,
                paths,
            }),
            TilingFile::Interval { .. } => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tiling files always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Writes any serializable value as compact JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    let io = |source| FormatError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    serde_json::to_writer(&mut w, value).map_err(|e| FormatError::Json {
        path: path.display().to_string(),
        source: e,
    })?;
    w.write_all(b"\n").map_err(io)?;
    w.flush().map_err(io)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FormatError> {
    let f = File::open(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_reader(BufReader::new(f)).map_err(|source| FormatError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_tiling(path: &Path, t: &TilingFile) -> Result<(), FormatError> {
    write_json(path, t)
}

pub fn read_tiling(path: &Path) -> Result<TilingFile, FormatError> {
    read_json(path)
}
