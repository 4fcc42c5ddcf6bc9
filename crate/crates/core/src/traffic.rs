//! All-to-all demand matrices in units of chunks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n x n` nonnegative chunk counts with a zero diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(try_from = "RawTraffic")]
pub struct TrafficMatrix {
    n: usize,
    entries: Vec<Vec<u64>>,
}

/// Unvalidated matrix as it appears on disk. Signed so negative entries
/// can be reported instead of failing to parse.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawTraffic {
    pub n: usize,
    pub entries: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum TrafficIssue {
    SizeMismatch { expected: usize, row: Option<usize>, found: usize },
    NonzeroDiagonal { node: usize, value: i64 },
    Negative { src: usize, dst: usize, value: i64 },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationReport {
    pub valid: bool,
    pub empty_demand: bool,
    pub issues: Vec<TrafficIssue>,
}

impl std::fmt::Display for TrafficIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrafficIssue::SizeMismatch { expected, row: None, found } => {
                write!(f, "size mismatch: expected {expected} rows, found {found}")
            }
            TrafficIssue::SizeMismatch { expected, row: Some(r), found } => {
                write!(f, "size mismatch: row {r} has {found} entries, expected {expected}")
            }
            TrafficIssue::NonzeroDiagonal { node, value } => {
                write!(f, "nonzero diagonal at ({node},{node}) = {value}")
            }
            TrafficIssue::Negative { src, dst, value } => {
                write!(f, "negative entry at ({src},{dst}) = {value}")
            }
        }
    }
}

/// Report-style validation of a raw matrix.
pub fn validate_traffic(raw: &RawTraffic) -> ValidationReport {
    let mut issues = Vec::new();
    if raw.entries.len() != raw.n {
        issues.push(TrafficIssue::SizeMismatch { expected: raw.n, row: None, found: raw.entries.len() });
    }
    let mut total: i64 = 0;
    for (i, row) in raw.entries.iter().enumerate() {
        if row.len() != raw.n {
            issues.push(TrafficIssue::SizeMismatch { expected: raw.n, row: Some(i), found: row.len() });
        }
        for (j, &v) in row.iter().enumerate() {
            if v < 0 {
                issues.push(TrafficIssue::Negative { src: i, dst: j, value: v });
            } else if i == j && v != 0 {
                issues.push(TrafficIssue::NonzeroDiagonal { node: i, value: v });
            } else {
                total = total.saturating_add(v);
            }
        }
    }
    ValidationReport { valid: issues.is_empty(), empty_demand: issues.is_empty() && total == 0, issues }
}

impl TryFrom<RawTraffic> for TrafficMatrix {
    type Error = Error;

    fn try_from(raw: RawTraffic) -> Result<Self> {
        let report = validate_traffic(&raw);
        if let Some(issue) = report.issues.first() {
            return Err(Error::InvalidTraffic(issue.to_string()));
        }
        let entries = raw
            .entries
            .into_iter()
            .map(|row| row.into_iter().map(|v| v as u64).collect())
            .collect();
        Ok(TrafficMatrix { n: raw.n, entries })
    }
}

impl TrafficMatrix {
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTraffic(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            if row[i] != 0 {
                return Err(Error::InvalidTraffic(format!("nonzero diagonal at ({i},{i})")));
            }
        }
        Ok(TrafficMatrix { n, entries: rows })
    }

    /// Canonical all-to-all: every off-diagonal entry is `chunks`.
    pub fn uniform(n: usize, chunks: u64) -> Self {
        let entries = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0 } else { chunks }).collect())
            .collect();
        TrafficMatrix { n, entries }
    }

    pub fn zeros(n: usize) -> Self {
        TrafficMatrix { n, entries: vec![vec![0; n]; n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, src: usize, dst: usize) -> u64 {
        self.entries[src][dst]
    }

    pub fn set(&mut self, src: usize, dst: usize, chunks: u64) -> Result<()> {
        if src == dst && chunks != 0 {
            return Err(Error::InvalidTraffic(format!("nonzero diagonal at ({src},{src})")));
        }
        self.entries[src][dst] = chunks;
        Ok(())
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.entries
    }

    pub fn total_chunks(&self) -> u64 {
        self.entries.iter().flatten().sum()
    }

    pub fn max_entry(&self) -> u64 {
        self.entries.iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.total_chunks() == 0
    }

    /// True when every off-diagonal entry holds the same positive value.
    pub fn is_uniform(&self) -> bool {
        let mut value = None;
        for (i, row) in self.entries.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if i == j {
                    continue;
                }
                match value {
                    None => value = Some(v),
                    Some(x) if x != v => return false,
                    _ => {}
                }
            }
        }
        value.is_none_or(|v| v > 0)
    }

    /// Nonzero `(src, dst, chunks)` triples in row-major order.
    pub fn flows(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().filter(|(_, &v)| v > 0).map(move |(j, &v)| (i, j, v)))
    }

    /// `A'[u][v] = A[perm[u]][perm[v]]`.
    pub fn conjugated(&self, perm: &[usize]) -> TrafficMatrix {
        let entries = (0..self.n)
            .map(|u| (0..self.n).map(|v| self.entries[perm[u]][perm[v]]).collect())
            .collect();
        TrafficMatrix { n: self.n, entries }
    }

    pub fn to_raw(&self) -> RawTraffic {
        RawTraffic {
            n: self.n,
            entries: self.entries.iter().map(|r| r.iter().map(|&v| v as i64).collect()).collect(),
        }
    }
}

impl Serialize for TrafficMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: usize,
            entries: &'a [Vec<u64>],
        }
        Repr { n: self.n, entries: &self.entries }.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(rows: Vec<Vec<i64>>) -> RawTraffic {
        RawTraffic { n: rows.len(), entries: rows }
    }

    #[test]
    fn canonical_all_to_all_is_valid() {
        let report = validate_traffic(&TrafficMatrix::uniform(8, 1).to_raw());
        assert!(report.valid);
        assert!(!report.empty_demand);
    }

    #[test]
    fn nonzero_diagonal_is_reported() {
        let mut rows = TrafficMatrix::uniform(8, 1).to_raw().entries;
        rows[0][0] = 1;
        let report = validate_traffic(&raw(rows));
        assert!(!report.valid);
        assert_eq!(report.issues, vec![TrafficIssue::NonzeroDiagonal { node: 0, value: 1 }]);
        assert!(report.issues[0].to_string().contains("nonzero diagonal"));
    }

    #[test]
    fn all_zero_matrix_is_valid_but_empty() {
        let report = validate_traffic(&TrafficMatrix::zeros(8).to_raw());
        assert!(report.valid);
        assert!(report.empty_demand);
    }

    #[test]
    fn negative_and_ragged_rows_are_reported() {
        let report = validate_traffic(&raw(vec![vec![0, -2], vec![1]]));
        assert_eq!(report.issues.len(), 2);
    }

    #[test]
    fn json_rejects_fractional_and_invalid() {
        assert!(serde_json::from_str::<TrafficMatrix>(r#"{"n":2,"entries":[[0,1.5],[1,0]]}"#).is_err());
        assert!(serde_json::from_str::<TrafficMatrix>(r#"{"n":2,"entries":[[1,1],[1,0]]}"#).is_err());
        let a: TrafficMatrix = serde_json::from_str(r#"{"n":2,"entries":[[0,3],[1,0]]}"#).unwrap();
        assert_eq!(a.get(0, 1), 3);
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"{"n":2,"entries":[[0,3],[1,0]]}"#);
    }

    #[test]
    fn conjugation_moves_demand() {
        let mut a = TrafficMatrix::uniform(4, 1);
        a.set(0, 1, 9).unwrap();
        let b = a.conjugated(&[2, 0, 1, 3]);
        // b[1][2] = a[0][1]
        assert_eq!(b.get(1, 2), 9);
        assert_eq!(b.total_chunks(), a.total_chunks());
    }
}
