//! JSON file formats shared between the library and the CLI.
//!
//! Complex scalars serialize as two-element arrays `[re, im]`; matrices as
//! row-major nested arrays. State files carry either a density matrix
//! (`{"dim": d, "rho": [[...]]}`) or a pure state (`{"dim": d, "psi":
//! [...]}`); channel files carry either Kraus operators (`{"dim": d,
//! "kraus": [...], "tp": true}`) or a Schur matrix (`{"dim": d, "schur":
//! [[...]]}`). Basis indices are 0-based in all files.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channels::{Completeness, KrausChannel, SchurMap};
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, Scalar, ToleranceConfig};
use crate::states::{DensityMatrix, PureState};
use crate::transforms::{PlanChannel, TransformPlan};

type JsonComplex = [f64; 2];
type JsonMatrix = Vec<Vec<JsonComplex>>;

fn complex_to_json(z: Scalar) -> JsonComplex {
    [z.re, z.im]
}

fn matrix_to_rows(m: &ComplexMatrix) -> JsonMatrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| complex_to_json(m.get(i, j))).collect())
        .collect()
}

fn matrix_from_rows(rows: &JsonMatrix) -> Result<ComplexMatrix> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    let ncols = rows[0].len();
    let mut entries = Vec::with_capacity(nrows * ncols);
    for row in rows {
        if row.len() != ncols {
            return Err(Error::Parse("ragged matrix rows".into()));
        }
        for &[re, im] in row {
            entries.push(Scalar::new(re, im));
        }
    }
    ComplexMatrix::new(nrows, ncols, entries)
}

#[derive(Serialize, Deserialize)]
struct StateFileRaw {
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<JsonMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi: Option<Vec<JsonComplex>>,
}

/// A state loaded from disk, in whichever form the file used.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Density(DensityMatrix),
    Pure(PureState),
}

impl LoadedState {
    /// The state as a density matrix regardless of the stored form.
    pub fn density(&self) -> DensityMatrix {
        match self {
            LoadedState::Density(rho) => rho.clone(),
            LoadedState::Pure(psi) => psi.density(),
        }
    }

    /// The pure-state vector, recovering it from a rank-one density matrix
    /// when necessary.
    pub fn pure_state(&self, tol: &ToleranceConfig) -> Result<PureState> {
        match self {
            LoadedState::Pure(psi) => Ok(psi.clone()),
            LoadedState::Density(rho) => rho.as_pure(tol).ok_or_else(|| {
                Error::InvalidState(
                    "a pure state is required but the file holds a mixed density matrix".into(),
                )
            }),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            LoadedState::Density(rho) => rho.dim(),
            LoadedState::Pure(psi) => psi.dim(),
        }
    }
}

pub fn parse_state(text: &str, tol: &ToleranceConfig) -> Result<LoadedState> {
    let raw: StateFileRaw =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("state file: {e}")))?;
    match (raw.rho, raw.psi) {
        (Some(rows), None) => {
            let m = matrix_from_rows(&rows)?;
            if m.rows() != raw.dim {
                return Err(Error::Parse(format!(
                    "dim field {} does not match matrix size {}",
                    raw.dim,
                    m.rows()
                )));
            }
            Ok(LoadedState::Density(DensityMatrix::new(m, tol)?))
        }
        (None, Some(amps)) => {
            if amps.len() != raw.dim {
                return Err(Error::Parse(format!(
                    "dim field {} does not match amplitude count {}",
                    raw.dim,
                    amps.len()
                )));
            }
            let v: Vec<Scalar> = amps.iter().map(|&[re, im]| Scalar::new(re, im)).collect();
            Ok(LoadedState::Pure(PureState::new(v, tol)?))
        }
        _ => Err(Error::Parse(
            "state file must contain exactly one of 'rho' or 'psi'".into(),
        )),
    }
}

pub fn load_state(path: &std::path::Path, tol: &ToleranceConfig) -> Result<LoadedState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_state(&text, tol)
}

pub fn density_to_json(rho: &DensityMatrix) -> Value {
    json!({ "dim": rho.dim(), "rho": matrix_to_rows(rho.mat()) })
}

pub fn pure_to_json(psi: &PureState) -> Value {
    let amps: Vec<JsonComplex> = psi.amplitudes().iter().map(|&z| complex_to_json(z)).collect();
    json!({ "dim": psi.dim(), "psi": amps })
}

#[derive(Serialize, Deserialize)]
struct ChannelFileRaw {
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    kraus: Option<Vec<JsonMatrix>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tp: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    schur: Option<JsonMatrix>,
}

/// A channel loaded from disk, in whichever representation the file used.
#[derive(Debug, Clone)]
pub enum LoadedChannel {
    Kraus(KrausChannel),
    Schur(SchurMap),
}

impl LoadedChannel {
    /// The channel in Kraus form regardless of the stored representation.
    pub fn kraus(&self, tol: &ToleranceConfig) -> Result<KrausChannel> {
        match self {
            LoadedChannel::Kraus(c) => Ok(c.clone()),
            LoadedChannel::Schur(s) => s.to_kraus(tol),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            LoadedChannel::Kraus(c) => c.dim(),
            LoadedChannel::Schur(s) => s.dim(),
        }
    }
}

pub fn parse_channel(text: &str, tol: &ToleranceConfig) -> Result<LoadedChannel> {
    let raw: ChannelFileRaw =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("channel file: {e}")))?;
    match (raw.kraus, raw.schur) {
        (Some(kraus_rows), None) => {
            let kraus: Vec<ComplexMatrix> = kraus_rows
                .iter()
                .map(matrix_from_rows)
                .collect::<Result<_>>()?;
            if kraus.iter().any(|k| k.rows() != raw.dim) {
                return Err(Error::Parse(
                    "Kraus operator size does not match the dim field".into(),
                ));
            }
            let channel = KrausChannel::new(kraus, tol)?;
            if let Some(tp) = raw.tp {
                let actual = channel.completeness() == Completeness::TracePreserving;
                if tp != actual {
                    return Err(Error::Parse(format!(
                        "tp flag says {tp} but the Kraus set is {}",
                        if actual {
                            "trace preserving"
                        } else {
                            "trace non-increasing"
                        }
                    )));
                }
            }
            Ok(LoadedChannel::Kraus(channel))
        }
        (None, Some(rows)) => {
            let m = matrix_from_rows(&rows)?;
            if m.rows() != raw.dim {
                return Err(Error::Parse(
                    "Schur matrix size does not match the dim field".into(),
                ));
            }
            Ok(LoadedChannel::Schur(SchurMap::new(m, tol)?))
        }
        _ => Err(Error::Parse(
            "channel file must contain exactly one of 'kraus' or 'schur'".into(),
        )),
    }
}

pub fn load_channel(path: &std::path::Path, tol: &ToleranceConfig) -> Result<LoadedChannel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_channel(&text, tol)
}

pub fn kraus_channel_to_json(c: &KrausChannel) -> Value {
    let kraus: Vec<JsonMatrix> = c.kraus().iter().map(matrix_to_rows).collect();
    json!({
        "dim": c.dim(),
        "kraus": kraus,
        "tp": c.is_trace_preserving(),
    })
}

pub fn schur_map_to_json(s: &SchurMap) -> Value {
    json!({ "dim": s.dim(), "schur": matrix_to_rows(s.matrix()) })
}

/// Serializes a transform plan, embedding the constructed channel in its
/// native representation.
pub fn plan_to_json(plan: &TransformPlan) -> Value {
    let channel = plan.channel.as_ref().map(|ch| match ch {
        PlanChannel::Kraus(c) => kraus_channel_to_json(c),
        PlanChannel::Schur(s) => schur_map_to_json(s),
    });
    json!({
        "verdict": plan.verdict,
        "probability": plan.probability,
        "channel": channel,
        "certificate": plan.certificate,
    })
}
