//! JSON documents for curves, pencils and rational maps. Every number is a
//! string in the exact literal grammar (`"3"`, `"-1/2"`, `"2+1/3i"`).

use std::fmt;

use serde::{Deserialize, Serialize};
use twistor_core::acm_curve::LinearMatrix;
use twistor_core::exact_algebra::{ExactMatrix, GaussianRational};
use twistor_core::pencil::Pencil;
use twistor_core::rational_curve::RationalCurveMap;

/// Why a document could not be turned into an object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DocumentError {
    /// Malformed JSON or number literal (exit code 2).
    Parse(String),
    /// Well-formed but not a valid object, e.g. wrong shapes (exit code 3).
    Invalid(String),
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocumentError::Parse(m) => write!(f, "parse error: {m}"),
            DocumentError::Invalid(m) => write!(f, "invalid input: {m}"),
        }
    }
}

pub type Literals = Vec<Vec<String>>;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

impl Metadata {
    fn is_empty(&self) -> bool {
        self.seed.is_none() && self.labels.is_empty()
    }
}

/// A linear matrix `A1·x1 + A2·x2 + A3·x3 + A4·x4` of size `(r+1) × r`.
/// `A3` and `A4` may be omitted when only the pencil is of interest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDocument {
    pub r: usize,
    #[serde(rename = "A1")]
    pub a1: Literals,
    #[serde(rename = "A2")]
    pub a2: Literals,
    #[serde(rename = "A3", default, skip_serializing_if = "Option::is_none")]
    pub a3: Option<Literals>,
    #[serde(rename = "A4", default, skip_serializing_if = "Option::is_none")]
    pub a4: Option<Literals>,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
}

pub fn literals(m: &ExactMatrix) -> Literals {
    (0..m.rows()).map(|i| m.row(i).iter().map(ToString::to_string).collect()).collect()
}

pub fn parse_literal(s: &str) -> Result<GaussianRational, DocumentError> {
    s.parse().map_err(|e| DocumentError::Parse(format!("{e}")))
}

fn parse_matrix(name: &str, m: &Literals, shape: (usize, usize)) -> Result<ExactMatrix, DocumentError> {
    let rows = m
        .iter()
        .map(|row| row.iter().map(|s| parse_literal(s)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    if rows.len() != shape.0 || rows.iter().any(|row| row.len() != shape.1) {
        let cols: Vec<usize> = rows.iter().map(Vec::len).collect();
        return Err(DocumentError::Invalid(format!(
            "{name} must be {}x{}, found {} rows with lengths {cols:?}",
            shape.0,
            shape.1,
            rows.len()
        )));
    }
    Ok(ExactMatrix::from_rows(rows))
}

impl CurveDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize") + "\n"
    }

    pub fn from_matrix(m: &LinearMatrix, metadata: Metadata) -> Self {
        Self {
            r: m.r(),
            a1: literals(m.a(0)),
            a2: literals(m.a(1)),
            a3: Some(literals(m.a(2))),
            a4: Some(literals(m.a(3))),
            metadata,
        }
    }

    fn shape(&self) -> Result<(usize, usize), DocumentError> {
        if self.r == 0 {
            return Err(DocumentError::Invalid("r must be positive".into()));
        }
        Ok((self.r + 1, self.r))
    }

    pub fn pencil(&self) -> Result<Pencil, DocumentError> {
        let shape = self.shape()?;
        Pencil::new(parse_matrix("A1", &self.a1, shape)?, parse_matrix("A2", &self.a2, shape)?)
            .map_err(|e| DocumentError::Invalid(e.to_string()))
    }

    pub fn linear_matrix(&self) -> Result<LinearMatrix, DocumentError> {
        let shape = self.shape()?;
        let missing = |n: &str| DocumentError::Invalid(format!("{n} is required for a curve"));
        let a3 = self.a3.as_ref().ok_or_else(|| missing("A3"))?;
        let a4 = self.a4.as_ref().ok_or_else(|| missing("A4"))?;
        LinearMatrix::new([
            parse_matrix("A1", &self.a1, shape)?,
            parse_matrix("A2", &self.a2, shape)?,
            parse_matrix("A3", a3, shape)?,
            parse_matrix("A4", a4, shape)?,
        ])
        .map_err(|e| DocumentError::Invalid(e.to_string()))
    }
}

/// A map `ℙ¹ → ℙ³` of degree `d`; each component lists its `d+1`
/// coefficients of `s^d, s^{d−1}t, …, t^d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalMapDocument {
    pub d: u32,
    pub components: [Vec<String>; 4],
}

impl RationalMapDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Parse(e.to_string()))
    }

    pub fn from_map(f: &RationalCurveMap) -> Self {
        Self {
            d: f.degree(),
            components: f.coefficients().map(|c| c.iter().map(ToString::to_string).collect()),
        }
    }

    pub fn map(&self) -> Result<RationalCurveMap, DocumentError> {
        let mut comps: [Vec<GaussianRational>; 4] = Default::default();
        for (slot, c) in comps.iter_mut().zip(&self.components) {
            *slot = c.iter().map(|s| parse_literal(s)).collect::<Result<_, _>>()?;
        }
        RationalCurveMap::from_coefficients(self.d, &comps).map_err(|e| DocumentError::Invalid(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use twistor_core::reality::make_sigma_invariant_pencil;

    #[test]
    fn curve_round_trip() {
        for r in 1..=3 {
            let m = make_sigma_invariant_pencil(r, 4).unwrap();
            let doc = CurveDocument::from_matrix(&m, Metadata { seed: Some(4), labels: vec!["x".into()] });
            let back = CurveDocument::from_json(&doc.to_json()).unwrap();
            assert_eq!(back, doc);
            assert_eq!(back.linear_matrix().unwrap(), m);
        }
    }

    #[test]
    fn literal_grammar_and_errors() {
        let text = r#"{"r":1,"A1":[["1"],["0"]],"A2":[["0"],["1"]],"A3":[["−1/2"],["2+1/3i"]],"A4":[["-2-1/3i"],["−1/2"]]}"#;
        let m = CurveDocument::from_json(text).unwrap().linear_matrix().unwrap();
        assert_eq!(m.a(2)[(1, 0)], "2+1/3i".parse().unwrap());
        let bad = text.replace("2+1/3i", "2+i/3");
        assert!(matches!(CurveDocument::from_json(&bad).unwrap().linear_matrix(), Err(DocumentError::Parse(_))));
        let short = r#"{"r":2,"A1":[["1"],["0"]],"A2":[["0"],["1"]]}"#;
        assert!(matches!(CurveDocument::from_json(short).unwrap().pencil(), Err(DocumentError::Invalid(_))));
        assert!(matches!(CurveDocument::from_json("{"), Err(DocumentError::Parse(_))));
        let pencil_only = r#"{"r":1,"A1":[["1"],["0"]],"A2":[["0"],["1"]]}"#;
        let doc = CurveDocument::from_json(pencil_only).unwrap();
        assert!(doc.pencil().is_ok());
        assert!(matches!(doc.linear_matrix(), Err(DocumentError::Invalid(_))));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig { cases: 24, ..Default::default() })]

        #[test]
        fn serialize_then_parse_is_identity(seed in proptest::prelude::any::<u64>(), r in 1usize..=3) {
            let m = make_sigma_invariant_pencil(r, seed).unwrap();
            let doc = CurveDocument::from_matrix(&m, Metadata { seed: Some(seed), labels: vec![] });
            let back = CurveDocument::from_json(&doc.to_json()).unwrap();
            proptest::prop_assert_eq!(&back, &doc);
            proptest::prop_assert_eq!(back.linear_matrix().unwrap(), m);
        }
    }

    #[test]
    fn rational_round_trip() {
        let f = RationalCurveMap::rational_normal(3);
        let doc = RationalMapDocument::from_map(&f);
        let text = serde_json::to_string(&doc).unwrap();
        assert_eq!(RationalMapDocument::from_json(&text).unwrap().map().unwrap(), f);
    }
}
