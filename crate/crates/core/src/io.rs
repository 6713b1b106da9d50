//! On-disk formats.
//!
//! Operators travel as JSON documents carrying a `format_version` field. A matrix is a
//! row-major nested array whose entries are always `[re, im]` pairs. Numbers are written
//! in shortest round-trip form, so save/load is exact. Stochastic matrices are plain CSV
//! grids with one row per output outcome and one column per input outcome.
//!
//! ```json
//! {"format_version": "1", "dim": 2,
//!  "elements": [[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]],
//!  "labels": ["0", "1"]}
//! ```

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discrimination::Ensemble;
use crate::error::{Error, Result};
use crate::operator::HermitianOperator;
use crate::povm::Povm;
use crate::stochastic::StochasticMatrix;
use crate::tolerance::Tolerances;

pub const FORMAT_VERSION: &str = "1";

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmDocument {
    pub format_version: String,
    pub dim: usize,
    pub elements: Vec<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    pub format_version: String,
    pub dim: usize,
    pub rho: MatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleEntry {
    pub prior: f64,
    pub rho: MatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleDocument {
    pub format_version: String,
    pub dim: usize,
    pub states: Vec<EnsembleEntry>,
}

fn check_version(v: &str) -> Result<()> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(Error::UnsupportedVersion(v.to_string()))
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &[u8]) -> Result<T> {
    serde_json::from_slice(text).map_err(|e| Error::Parse(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn matrix_to_doc(op: &HermitianOperator) -> MatrixDoc {
    let d = op.dim();
    (0..d)
        .map(|i| (0..d).map(|j| { let z = op.get(i, j); [z.re, z.im] }).collect())
        .collect()
}

/// Converts a document matrix, reporting the offending field on shape errors.
pub fn matrix_from_doc(doc: &MatrixDoc, dim: usize, field: &str, tol: &Tolerances) -> Result<HermitianOperator> {
    if doc.len() != dim {
        return Err(Error::Parse(format!("{field}: expected {dim} rows, found {}", doc.len())));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for (i, row) in doc.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Parse(format!(
                "{field}[{i}]: expected {dim} entries, found {}",
                row.len()
            )));
        }
        entries.extend(row.iter().map(|[re, im]| Complex64::new(*re, *im)));
    }
    HermitianOperator::from_entries(dim, entries, tol.herm).map_err(|e| match e {
        Error::NonHermitian { .. } | Error::NonFinite(_) => Error::Parse(format!("{field}: {e}")),
        other => other,
    })
}

impl PovmDocument {
    /// Structural parse only: JSON shape and version.
    pub fn parse(text: &[u8]) -> Result<Self> {
        let doc: PovmDocument = parse_json(text)?;
        check_version(&doc.format_version)?;
        if doc.dim == 0 {
            return Err(Error::Parse("dim: must be at least 1".into()));
        }
        if let Some(labels) = &doc.labels {
            if labels.len() != doc.elements.len() {
                return Err(Error::Parse(format!(
                    "labels: {} labels for {} elements",
                    labels.len(),
                    doc.elements.len()
                )));
            }
        }
        Ok(doc)
    }

    pub fn operators(&self, tol: &Tolerances) -> Result<Vec<HermitianOperator>> {
        self.elements
            .iter()
            .enumerate()
            .map(|(k, m)| matrix_from_doc(m, self.dim, &format!("elements[{k}]"), tol))
            .collect()
    }

    /// Builds and validates the POVM.
    pub fn to_povm(&self, tol: &Tolerances) -> Result<Povm> {
        Povm::new(self.operators(tol)?, tol)
    }

    pub fn from_povm(povm: &Povm, labels: Option<Vec<String>>) -> Self {
        PovmDocument {
            format_version: FORMAT_VERSION.to_string(),
            dim: povm.dim(),
            elements: povm.elements().iter().map(matrix_to_doc).collect(),
            labels,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

impl StateDocument {
    pub fn parse(text: &[u8]) -> Result<Self> {
        let doc: StateDocument = parse_json(text)?;
        check_version(&doc.format_version)?;
        if doc.dim == 0 {
            return Err(Error::Parse("dim: must be at least 1".into()));
        }
        Ok(doc)
    }

    pub fn to_state(&self, tol: &Tolerances) -> Result<HermitianOperator> {
        let rho = matrix_from_doc(&self.rho, self.dim, "rho", tol)?;
        crate::discrimination::validate_state(&rho, tol)?;
        Ok(rho)
    }

    pub fn from_state(rho: &HermitianOperator) -> Self {
        StateDocument {
            format_version: FORMAT_VERSION.to_string(),
            dim: rho.dim(),
            rho: matrix_to_doc(rho),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

impl EnsembleDocument {
    pub fn parse(text: &[u8]) -> Result<Self> {
        let doc: EnsembleDocument = parse_json(text)?;
        check_version(&doc.format_version)?;
        if doc.dim == 0 {
            return Err(Error::Parse("dim: must be at least 1".into()));
        }
        if doc.states.is_empty() {
            return Err(Error::Parse("states: at least one state required".into()));
        }
        Ok(doc)
    }

    pub fn to_ensemble(&self, tol: &Tolerances) -> Result<Ensemble> {
        let priors = self.states.iter().map(|s| s.prior).collect();
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(k, s)| matrix_from_doc(&s.rho, self.dim, &format!("states[{k}].rho"), tol))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(priors, states, tol)
    }

    pub fn from_ensemble(ens: &Ensemble) -> Self {
        EnsembleDocument {
            format_version: FORMAT_VERSION.to_string(),
            dim: ens.dim(),
            states: ens
                .priors()
                .iter()
                .zip(ens.states())
                .map(|(q, rho)| EnsembleEntry {
                    prior: *q,
                    rho: matrix_to_doc(rho),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Parses a CSV grid of reals (rows = output outcomes, columns = input outcomes).
pub fn parse_csv_grid(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(col, field)| {
                let field = field.trim();
                field.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                    Error::Parse(format!("line {} field {}: {:?} is not a finite number", line_no + 1, col + 1, field))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            let first: &Vec<f64> = first;
            if first.len() != row.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} fields, found {}",
                    line_no + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("no rows".into()));
    }
    Ok(rows)
}

pub fn parse_stochastic_csv(text: &str, tol: &Tolerances) -> Result<StochasticMatrix> {
    StochasticMatrix::from_rows(&parse_csv_grid(text)?, tol.stoch)
}

/// Writes the grid with shortest round-trip numbers.
pub fn format_stochastic_csv(m: &StochasticMatrix) -> String {
    m.to_string()
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_povm(path: &Path, tol: &Tolerances) -> Result<Povm> {
    PovmDocument::parse(&read(path)?)?.to_povm(tol)
}

pub fn save_povm(povm: &Povm, path: &Path) -> Result<()> {
    write(path, &PovmDocument::from_povm(povm, None).to_json())
}

pub fn load_state(path: &Path, tol: &Tolerances) -> Result<HermitianOperator> {
    StateDocument::parse(&read(path)?)?.to_state(tol)
}

pub fn save_state(rho: &HermitianOperator, path: &Path) -> Result<()> {
    write(path, &StateDocument::from_state(rho).to_json())
}

pub fn load_ensemble(path: &Path, tol: &Tolerances) -> Result<Ensemble> {
    EnsembleDocument::parse(&read(path)?)?.to_ensemble(tol)
}

pub fn save_ensemble(ens: &Ensemble, path: &Path) -> Result<()> {
    write(path, &EnsembleDocument::from_ensemble(ens).to_json())
}

pub fn load_stochastic(path: &Path, tol: &Tolerances) -> Result<StochasticMatrix> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes).map_err(|_| Error::Parse("file is not UTF-8".into()))?;
    parse_stochastic_csv(&text, tol)
}

pub fn save_stochastic(m: &StochasticMatrix, path: &Path) -> Result<()> {
    write(path, &format_stochastic_csv(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randgen::{random_povm, RngSeed};
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn z_basis_round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z.json");
        let z = Povm::computational_basis(2);
        save_povm(&z, &path).unwrap();
        assert_eq!(load_povm(&path, &tol()).unwrap(), z);
    }

    #[test]
    fn non_psd_element_names_index() {
        let doc = r#"{"format_version":"1","dim":2,"elements":[
            [[[1.1,0],[0,0]],[[0,0],[1,0]]],
            [[[-0.1,0],[0,0]],[[0,0],[0,0]]]]}"#;
        let err = PovmDocument::parse(doc.as_bytes()).unwrap().to_povm(&tol()).unwrap_err();
        assert!(matches!(err, Error::NotPsd { index: 1, .. }), "{err}");
    }

    #[test]
    fn truncated_document_is_parse_error() {
        let full = PovmDocument::from_povm(&Povm::computational_basis(2), None).to_json();
        let err = PovmDocument::parse(&full.as_bytes()[..full.len() / 2]).unwrap_err();
        match err {
            Error::Parse(msg) => assert!(msg.contains("line"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_version_rejected() {
        let doc = r#"{"format_version":"2","dim":1,"elements":[[[[1,0]]]]}"#;
        assert!(matches!(PovmDocument::parse(doc.as_bytes()), Err(Error::UnsupportedVersion(_))));
    }

    #[test]
    fn shape_errors_name_field() {
        let doc = r#"{"format_version":"1","dim":2,"elements":[[[[1,0],[0,0]],[[0,0]]]]}"#;
        let err = PovmDocument::parse(doc.as_bytes()).unwrap().to_povm(&tol()).unwrap_err();
        assert!(err.to_string().contains("elements[0][1]"), "{err}");
    }

    #[test]
    fn imaginary_parts_always_written() {
        let text = PovmDocument::from_povm(&Povm::trivial(1), None).to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["elements"][0][0][0], serde_json::json!([1.0, 0.0]));
    }

    #[test]
    fn csv_grid_parsing() {
        let m = parse_stochastic_csv("0.3,1\n0.7,0\n", &tol()).unwrap();
        assert_eq!(m.to_rows(), vec![vec![0.3, 1.0], vec![0.7, 0.0]]);
        assert_eq!(parse_stochastic_csv(&format_stochastic_csv(&m), &tol()).unwrap(), m);
        assert!(matches!(parse_csv_grid("1,2\n3\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_csv_grid("1,x\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_csv_grid(""), Err(Error::Parse(_))));
        assert!(parse_stochastic_csv("0.5\n0.4\n", &tol()).is_err());
    }

    #[test]
    fn ensemble_and_state_round_trip() {
        let ens = crate::randgen::random_ensemble(3, 2, false, RngSeed(7));
        let back = EnsembleDocument::parse(EnsembleDocument::from_ensemble(&ens).to_json().as_bytes())
            .unwrap()
            .to_ensemble(&tol())
            .unwrap();
        assert_eq!(back, ens);
        let rho = crate::randgen::random_state(2, true, RngSeed(1));
        let back = StateDocument::parse(StateDocument::from_state(&rho).to_json().as_bytes())
            .unwrap()
            .to_state(&tol())
            .unwrap();
        assert_eq!(back, rho);
    }

    proptest! {
        #[test]
        fn povm_documents_round_trip_exactly(seed in any::<u64>(), d in 1usize..4, n in 1usize..5) {
            let p = random_povm(d, n, RngSeed(seed)).unwrap();
            let text = PovmDocument::from_povm(&p, None).to_json();
            let back = PovmDocument::parse(text.as_bytes()).unwrap().to_povm(&Tolerances::default()).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
