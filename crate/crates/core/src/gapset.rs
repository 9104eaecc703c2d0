//! Gap multisets `{d_1^(k_1), ..., d_s^(k_s)}` and the optional `(s, p)` split
//! that the staged construction indexes them by.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GapSetError {
    #[error("gap distance must be at least 1")]
    ZeroDistance,
    #[error("multiplicity of distance {0} must be at least 1")]
    ZeroMultiplicity(u64),
    #[error("gap set is empty")]
    Empty,
    #[error("distance {0} is listed more than once; indexed gap sets need distinct distances")]
    CoincidentDistances(u64),
    #[error("split (s={s}, p={p}) needs s >= 2 and s + p = {distinct} distinct distances")]
    BadSplit { s: usize, p: usize, distinct: usize },
    #[error("cannot parse gap entry {0:?}; expected `d:k` or `d`")]
    Parse(String),
}

/// How the distinct distances of a gap set are divided between the
/// boundary-prefix stages (the first `s`) and the homogeneous-tail stages
/// (the remaining `p`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SplitSpec {
    pub s: usize,
    pub p: usize,
}

impl SplitSpec {
    pub fn new(s: usize, p: usize) -> Self {
        SplitSpec { s, p }
    }

    pub fn stages(&self) -> usize {
        self.s + self.p
    }
}

impl fmt::Display for SplitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s={}, p={}", self.s, self.p)
    }
}

impl FromStr for SplitSpec {
    type Err = GapSetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GapSetError::Parse(s.to_string());
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        Ok(SplitSpec {
            s: a.trim().parse().map_err(|_| bad())?,
            p: b.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// A multiset of positive gap lengths, stored as `(distance, multiplicity)`
/// pairs with strictly increasing distances.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u64, usize)>", into = "Vec<(u64, usize)>")]
pub struct GapSet {
    entries: Vec<(u64, usize)>,
    split: Option<SplitSpec>,
}

impl GapSet {
    /// Builds a normalized gap set. Repeated distances are merged.
    pub fn new<I: IntoIterator<Item = (u64, usize)>>(entries: I) -> Result<Self, GapSetError> {
        let mut raw: Vec<(u64, usize)> = entries.into_iter().collect();
        for &(d, k) in &raw {
            if d == 0 {
                return Err(GapSetError::ZeroDistance);
            }
            if k == 0 {
                return Err(GapSetError::ZeroMultiplicity(d));
            }
        }
        if raw.is_empty() {
            return Err(GapSetError::Empty);
        }
        raw.sort_unstable();
        let mut entries: Vec<(u64, usize)> = Vec::with_capacity(raw.len());
        for (d, k) in raw {
            match entries.last_mut() {
                Some(last) if last.0 == d => last.1 += k,
                _ => entries.push((d, k)),
            }
        }
        Ok(GapSet {
            entries,
            split: None,
        })
    }

    /// Builds an indexed gap set `d_1 < d_2 < ...` where every distance must be
    /// supplied exactly once, then attaches `split`.
    pub fn indexed(entries: &[(u64, usize)], split: SplitSpec) -> Result<Self, GapSetError> {
        let mut seen: Vec<u64> = entries.iter().map(|e| e.0).collect();
        seen.sort_unstable();
        for w in seen.windows(2) {
            if w[0] == w[1] {
                return Err(GapSetError::CoincidentDistances(w[0]));
            }
        }
        GapSet::new(entries.iter().copied())?.with_split(split)
    }

    /// The multiset of the given gap values.
    pub fn from_gaps(gaps: &[u64]) -> Result<Self, GapSetError> {
        GapSet::new(gaps.iter().map(|&g| (g, 1)))
    }

    pub fn with_split(mut self, split: SplitSpec) -> Result<Self, GapSetError> {
        if split.s < 2 || split.s + split.p != self.entries.len() {
            return Err(GapSetError::BadSplit {
                s: split.s,
                p: split.p,
                distinct: self.entries.len(),
            });
        }
        self.split = Some(split);
        Ok(self)
    }

    pub fn split(&self) -> Option<SplitSpec> {
        self.split
    }

    pub fn entries(&self) -> &[(u64, usize)] {
        &self.entries
    }

    /// Number of distinct distances.
    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    /// `|T|`, the total multiplicity.
    pub fn size(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn points_per_tile(&self) -> usize {
        self.size() + 1
    }

    /// `d_i` with 1-based `i`.
    pub fn distance(&self, i: usize) -> u64 {
        self.entries[i - 1].0
    }

    /// `k_i` with 1-based `i`.
    pub fn multiplicity(&self, i: usize) -> usize {
        self.entries[i - 1].1
    }

    pub fn multiplicity_of(&self, d: u64) -> usize {
        self.entries
            .binary_search_by_key(&d, |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn min_distance(&self) -> u64 {
        self.entries[0].0
    }

    pub fn max_distance(&self) -> u64 {
        self.entries[self.entries.len() - 1].0
    }

    /// All gaps in ascending order, repeated by multiplicity.
    pub fn expanded(&self) -> Vec<u64> {
        self.entries
            .iter()
            .flat_map(|&(d, k)| std::iter::repeat_n(d, k))
            .collect()
    }

    /// The gap set of the first `i` distinct distances.
    pub fn prefix(&self, i: usize) -> GapSet {
        GapSet {
            entries: self.entries[..i].to_vec(),
            split: None,
        }
    }

    /// Multiset union with `{d^(k)}`.
    pub fn with_gap(&self, d: u64, k: usize) -> GapSet {
        let mut entries = self.entries.clone();
        entries.push((d, k));
        GapSet::new(entries).expect("extending a valid gap set")
    }

    /// Canonical command-line form, `d:k,d:k,...`.
    pub fn to_cli_string(&self) -> String {
        self.entries
            .iter()
            .map(|(d, k)| format!("{d}:{k}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses `d:k,...` keeping the entries as written (no merging).
    pub fn parse_entries(s: &str) -> Result<Vec<(u64, usize)>, GapSetError> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|tok| {
                let bad = || GapSetError::Parse(tok.to_string());
                match tok.split_once(':') {
                    Some((d, k)) => Ok((
                        d.trim().parse().map_err(|_| bad())?,
                        k.trim().parse().map_err(|_| bad())?,
                    )),
                    None => Ok((tok.parse().map_err(|_| bad())?, 1)),
                }
            })
            .collect()
    }
}

impl FromStr for GapSet {
    type Err = GapSetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GapSet::new(GapSet::parse_entries(s)?)
    }
}

impl fmt::Display for GapSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (d, k)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{d}^({k})")?;
        }
        f.write_str("}")
    }
}

impl TryFrom<Vec<(u64, usize)>> for GapSet {
    type Error = GapSetError;

    fn try_from(v: Vec<(u64, usize)>) -> Result<Self, Self::Error> {
        GapSet::new(v)
    }
}

impl From<GapSet> for Vec<(u64, usize)> {
    fn from(g: GapSet) -> Self {
        g.entries
    }
}
