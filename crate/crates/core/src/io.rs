//! File formats: the JSON schema shared by `mubs` and `verify`, and the
//! plain-text square format used by `mate`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmub::{verify_mub, Basis, MubCertification, MubSet};
use crate::squares::Square;

pub const SCHEMA_VERSION: u32 = 1;

/// Serialized basis family: complex entries as [re, im] pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MubsFile {
    pub schema_version: u32,
    pub d: usize,
    /// bases[m][j] is vector j of basis m as [re, im] pairs.
    pub bases: Vec<Vec<Vec<[f64; 2]>>>,
    pub certification: MubCertification,
}

impl MubsFile {
    pub fn from_mubs(mubs: &MubSet) -> MubsFile {
        MubsFile {
            schema_version: SCHEMA_VERSION,
            d: mubs.d(),
            bases: mubs
                .bases()
                .iter()
                .map(|b| {
                    b.vectors()
                        .iter()
                        .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                        .collect()
                })
                .collect(),
            certification: mubs.certification(),
        }
    }

    /// Rebuilds the family and re-certifies it at the given tolerance.
    pub fn into_mubs(self, tol: f64) -> Result<MubSet> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        let bases = self
            .bases
            .into_iter()
            .map(|vectors| {
                if vectors.len() != self.d || vectors.iter().any(|v| v.len() != self.d) {
                    return Err(Error::DimensionMismatch(format!(
                        "each basis needs {0}×{0} entries",
                        self.d
                    )));
                }
                Basis::new(
                    vectors
                        .into_iter()
                        .map(|v| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let _ = verify_mub(&bases, tol)?;
        MubSet::certify(bases, tol)
    }
}

/// Square file: first line the order d, then d lines of d whitespace
/// separated symbols.
pub fn parse_square(text: &str) -> Result<Square> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let d: usize = lines
        .next()
        .ok_or_else(|| Error::InvalidSquare("empty square file".into()))?
        .trim()
        .parse()
        .map_err(|e| Error::InvalidSquare(format!("bad order line: {e}")))?;
    let mut rows = Vec::with_capacity(d);
    for _ in 0..d {
        let line = lines
            .next()
            .ok_or_else(|| Error::InvalidSquare(format!("expected {d} rows")))?;
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u8>()
                    .map_err(|e| Error::InvalidSquare(format!("bad entry {tok:?}: {e}")))
            })
            .collect::<Result<Vec<u8>>>()?;
        rows.push(row);
    }
    Square::from_rows(rows)
}

pub fn format_square(square: &Square) -> String {
    let mut out = format!("{}\n", square.order());
    for row in square.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmub::mubs_for;

    #[test]
    fn mubs_round_trip_through_json() {
        let mubs = mubs_for(3).unwrap();
        let file = MubsFile::from_mubs(&mubs);
        let text = serde_json::to_string(&file).unwrap();
        let back: MubsFile = serde_json::from_str(&text).unwrap();
        let recert = back.into_mubs(1e-10).unwrap();
        assert!(recert.is_certified());
        assert_eq!(recert.len(), 4);
    }

    #[test]
    fn square_file_round_trip() {
        let sq = Square::from_rows(vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
        let text = format_square(&sq);
        let back = parse_square(&text).unwrap();
        assert_eq!(back, sq);
    }

    #[test]
    fn malformed_square_files_rejected() {
        assert!(parse_square("").is_err());
        assert!(parse_square("2\n0 1\n").is_err());
        assert!(parse_square("2\n0 1\n9 0\n").is_err());
    }
}
