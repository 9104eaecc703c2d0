use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lattice::Point2;

/// Violations stored per report unless configured otherwise.
pub const DEFAULT_VIOLATION_CAP: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationKind {
    Overlap,
    Hole,
    OutOfRange,
    GapMismatch,
    Malformed,
    BoundaryPrefixViolation,
    WindowMismatch,
    TypeMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Point(i64),
    Cell(Point2),
    Tile(usize),
    TileGap { tile: usize, gap: usize },
    Window { sequence: usize, start: usize },
    Path(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Point(p) => write!(f, "point {p}"),
            Location::Cell([x, y]) => write!(f, "cell ({x},{y})"),
            Location::Tile(i) => write!(f, "tile {i}"),
            Location::TileGap { tile, gap } => write!(f, "tile {tile} gap {gap}"),
            Location::Window { sequence, start } => write!(f, "sequence {sequence} window {start}"),
            Location::Path(i) => write!(f, "path {i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: Location,
    pub detail: String,
}

/// Outcome of a verifier. `ok` reflects every violation found, even those
/// dropped by the storage cap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub total_violations: u64,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn clean() -> Self {
        VerificationReport {
            ok: true,
            total_violations: 0,
            violations: Vec::new(),
        }
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    /// Combines two reports, keeping at most `cap` violations.
    pub fn merge(mut self, other: VerificationReport, cap: usize) -> Self {
        self.ok &= other.ok;
        self.total_violations += other.total_violations;
        let room = cap.saturating_sub(self.violations.len());
        self.violations
            .extend(other.violations.into_iter().take(room));
        self
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return f.write_str("ok");
        }
        writeln!(f, "{} violation(s)", self.total_violations)?;
        for v in &self.violations {
            writeln!(f, "  {:?} at {}: {}", v.kind, v.location, v.detail)?;
        }
        if (self.violations.len() as u64) < self.total_violations {
            writeln!(
                f,
                "  ... {} more",
                self.total_violations - self.violations.len() as u64
            )?;
        }
        Ok(())
    }
}

#[derive(Debug)]
pub(crate) struct ReportBuilder {
    cap: usize,
    total: u64,
    violations: Vec<Violation>,
}

impl ReportBuilder {
    pub(crate) fn new(cap: usize) -> Self {
        ReportBuilder {
            cap: cap.max(1),
            total: 0,
            violations: Vec::new(),
        }
    }

    pub(crate) fn push(
        &mut self,
        kind: ViolationKind,
        location: Location,
        detail: impl Into<String>,
    ) {
        self.total += 1;
        if self.violations.len() < self.cap {
            self.violations.push(Violation {
                kind,
                location,
                detail: detail.into(),
            });
        }
    }

    pub(crate) fn finish(self) -> VerificationReport {
        VerificationReport {
            ok: self.total == 0,
            total_violations: self.total,
            violations: self.violations,
        }
    }
}
