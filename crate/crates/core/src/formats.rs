//! On-disk JSON schemas shared by the library and the CLI.
//!
//! Conventions, normative across every format:
//! - finite-field vectors use the interleaved coordinate order
//!   (x_1, z_1, …, x_n, z_n);
//! - complex matrices are nested row-major arrays of [re, im] pairs;
//! - distribution tables key probabilities by comma-joined labels.
//!
//! Loaders validate structure and normalization and report the offending
//! field.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::channels::{ErrorDistribution, KrausChannel};
use crate::error::{Error, Result};
use crate::fflin::{FSubspace, FVector};
use crate::scalar::CMat;
use crate::weyl::Dims;

/// Subspace literal: `{"d": 2, "n": 2, "basis": [[0,1,0,1]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubspaceFile {
    pub d: u8,
    pub n: usize,
    pub basis: Vec<Vec<u8>>,
}

impl SubspaceFile {
    pub fn to_subspace(&self) -> Result<FSubspace> {
        let rows = self
            .basis
            .iter()
            .enumerate()
            .map(|(i, coords)| {
                if coords.len() != 2 * self.n {
                    return Err(Error::Format(format!(
                        "basis row {i} has {} coordinates, expected {}",
                        coords.len(),
                        2 * self.n
                    )));
                }
                FVector::new(self.d, coords.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        FSubspace::span(self.d, 2 * self.n, &rows)
    }

    pub fn from_subspace(l: &FSubspace) -> Self {
        Self {
            d: l.modulus(),
            n: l.ambient_digits(),
            basis: l.basis().iter().map(|v| v.coords().to_vec()).collect(),
        }
    }
}

/// One complex matrix as nested row-major [re, im] pairs.
pub type MatrixData = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_data(m: &CMat<f64>) -> MatrixData {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

pub fn matrix_from_data(data: &MatrixData) -> Result<CMat<f64>> {
    let rows = data.len();
    if rows == 0 {
        return Err(Error::Format("matrix has no rows".into()));
    }
    let cols = data[0].len();
    for (i, row) in data.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Format(format!(
                "matrix row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
    }
    Ok(CMat::<f64>::from_fn(rows, cols, |r, c| {
        nalgebra::Complex::new(data[r][c][0], data[r][c][1])
    }))
}

/// Channel file: `{"d": 2, "n": 1, "kraus": [[[[re,im], …], …], …]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelFile {
    pub d: u8,
    pub n: usize,
    pub kraus: Vec<MatrixData>,
}

impl ChannelFile {
    pub fn to_channel(&self) -> Result<KrausChannel<f64>> {
        let dims = Dims::new(self.d, self.n)?;
        let kraus = self
            .kraus
            .iter()
            .map(matrix_from_data)
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::new(dims, kraus)
    }

    pub fn from_channel(ch: &KrausChannel<f64>) -> Self {
        Self {
            d: ch.dims.d(),
            n: ch.dims.n(),
            kraus: ch.kraus.iter().map(matrix_to_data).collect(),
        }
    }
}

/// Distribution file:
/// `{"d": 2, "m": 1, "probs": {"0,0": 0.9, "1,0": 0.1}}`.
/// Missing labels are zero; loaders check normalization to 1e-12.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistributionFile {
    pub d: u8,
    pub m: usize,
    pub probs: BTreeMap<String, f64>,
}

impl DistributionFile {
    pub fn to_distribution(&self) -> Result<ErrorDistribution<f64>> {
        let len = usize::from(self.d).pow(2 * self.m as u32);
        let mut weights = vec![0.0f64; len];
        for (label, &p) in &self.probs {
            let v = FVector::parse_label(self.d, label)?;
            if v.len() != 2 * self.m {
                return Err(Error::Format(format!(
                    "label {label:?} has {} coordinates, expected {}",
                    v.len(),
                    2 * self.m
                )));
            }
            weights[v.index()] += p;
        }
        ErrorDistribution::new(self.d, self.m, weights)
    }

    pub fn from_distribution(p: &ErrorDistribution<f64>) -> Self {
        let probs = p
            .iter()
            .filter(|(_, w)| *w != 0.0)
            .map(|(v, w)| (v.label(), w))
            .collect();
        Self {
            d: p.modulus(),
            m: p.digits(),
            probs,
        }
    }
}

/// Serialized code bundle: the subspace, frame, transversal, and optionally
/// the dense barred basis (omitted by `--no-vectors`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeBundleFile {
    pub d: u8,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub subspace_basis: Vec<Vec<u8>>,
    pub frame_g: Vec<Vec<u8>>,
    pub frame_h: Vec<Vec<u8>>,
    /// Transversal representatives in syndrome-label order.
    pub transversal: Vec<Vec<u8>>,
    /// Amplitudes of the d^n barred basis vectors, label order, each of
    /// length d^n; `None` when vectors were omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<[f64; 2]>>>,
}

impl CodeBundleFile {
    pub fn from_code(
        code: &crate::codes::SymplecticCodeFamily<f64>,
        seed: u64,
        include_vectors: bool,
    ) -> Self {
        Self {
            d: code.dims().d(),
            n: code.n(),
            k: code.k(),
            seed,
            subspace_basis: code
                .subspace()
                .basis()
                .iter()
                .map(|v| v.coords().to_vec())
                .collect(),
            frame_g: code
                .frame()
                .g()
                .iter()
                .map(|v| v.coords().to_vec())
                .collect(),
            frame_h: code
                .frame()
                .h()
                .iter()
                .map(|v| v.coords().to_vec())
                .collect(),
            transversal: code
                .transversal()
                .iter()
                .map(|v| v.coords().to_vec())
                .collect(),
            vectors: include_vectors.then(|| {
                code.basis_vectors()
                    .iter()
                    .map(|v| v.amps.iter().map(|z| [z.re, z.im]).collect())
                    .collect()
            }),
        }
    }

    /// Rebuild the code family: the construction is re-run from the stored
    /// seed, and the stored transversal is re-applied.
    pub fn to_code(&self) -> Result<crate::codes::SymplecticCodeFamily<f64>> {
        let rows = self
            .subspace_basis
            .iter()
            .map(|coords| FVector::new(self.d, coords.clone()))
            .collect::<Result<Vec<_>>>()?;
        let l = FSubspace::span(self.d, 2 * self.n, &rows)?;
        let mut code = crate::codes::build_code::<f64>(&l, self.seed)?;
        let reps = self
            .transversal
            .iter()
            .map(|coords| FVector::new(self.d, coords.clone()))
            .collect::<Result<Vec<_>>>()?;
        code.set_transversal(reps)?;
        Ok(code)
    }
}

/// Fidelity report rows as written by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FidelityReportFile {
    pub simulated: f64,
    pub formula: f64,
    pub discrepancy: f64,
    pub per_syndrome: BTreeMap<String, f64>,
    pub per_component: BTreeMap<String, f64>,
}

impl FidelityReportFile {
    pub fn from_report(r: &crate::fidelity::FidelityReport<f64>) -> Self {
        Self {
            simulated: r.simulated,
            formula: r.formula,
            discrepancy: r.discrepancy,
            per_syndrome: r.per_syndrome.clone(),
            per_component: r.per_component.clone(),
        }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")
        .map_err(|e| Error::Format(format!("cannot write {}: {e}", path.display())))
}
