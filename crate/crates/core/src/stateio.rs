//! JSON state files.
//!
//! ```json
//! {"dims": [2, 2], "kind": "density", "data": [[0.25, 0.0], [0.0, 0.0], ...]}
//! ```
//!
//! `data` holds `[re, im]` pairs: the amplitudes of a pure state, or the
//! row-major entries of a density matrix. Files that violate a state
//! invariant are rejected with a message naming the field and the invariant.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BipartiteDims, ComplexMatrix, C64};
use crate::states::{DensityMatrix, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Density,
}

impl StateKind {
    fn name(self) -> &'static str {
        match self {
            StateKind::Pure => "pure",
            StateKind::Density => "density",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: [usize; 2],
    pub kind: StateKind,
    pub data: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LoadedState {
    Pure(PureState),
    Density(DensityMatrix),
}

impl LoadedState {
    pub fn dims(&self) -> BipartiteDims {
        match self {
            LoadedState::Pure(p) => p.dims(),
            LoadedState::Density(r) => r.dims(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            LoadedState::Pure(p) => p.density(),
            LoadedState::Density(r) => r.clone(),
        }
    }
}

impl StateFile {
    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            dims: psi.dims().into(),
            kind: StateKind::Pure,
            data: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        Self {
            dims: rho.dims().into(),
            kind: StateKind::Density,
            data: rho.matrix().as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn validate(&self) -> Result<LoadedState> {
        let dims =
            BipartiteDims::new(self.dims[0], self.dims[1]).map_err(|e| Error::Format(format!("field 'dims': {e}")))?;
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Format("field 'data': entries must be finite".into()));
        }
        let values: Vec<C64> = self.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        let n = dims.total();
        let expected = match self.kind {
            StateKind::Pure => n,
            StateKind::Density => n * n,
        };
        if values.len() != expected {
            return Err(Error::Format(format!(
                "field 'data': a {} state on {dims} needs {expected} entries, found {}",
                self.kind.name(),
                values.len()
            )));
        }
        match self.kind {
            StateKind::Pure => PureState::new(dims, values)
                .map(LoadedState::Pure)
                .map_err(|e| Error::Format(format!("field 'data': {e}"))),
            StateKind::Density => {
                let m = ComplexMatrix::from_vec(n, n, values)?;
                DensityMatrix::new(dims, m)
                    .map(LoadedState::Density)
                    .map_err(|e| Error::Format(format!("field 'data': {e}")))
            }
        }
    }
}

pub fn parse_state(json: &str) -> Result<LoadedState> {
    let file: StateFile = serde_json::from_str(json).map_err(|e| Error::Format(e.to_string()))?;
    file.validate()
}

pub fn read_state(path: &Path) -> Result<LoadedState> {
    let text = fs::read_to_string(path)?;
    parse_state(&text)
}

pub fn write_state(path: &Path, file: &StateFile) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(file)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::werner_state;

    #[test]
    fn pure_and_density_round_trip() {
        let bell = PureState::maximally_entangled(2).unwrap();
        let json = serde_json::to_string(&StateFile::from_pure(&bell)).unwrap();
        assert_eq!(parse_state(&json).unwrap(), LoadedState::Pure(bell));

        let w = werner_state(0.8).unwrap();
        let json = serde_json::to_string(&StateFile::from_density(&w)).unwrap();
        assert_eq!(parse_state(&json).unwrap().density(), w);
    }

    #[test]
    fn diagnostics_name_field_and_invariant() {
        let err = parse_state(r#"{"dims":[1,2],"kind":"pure","data":[[1,0],[0,0]]}"#).unwrap_err();
        assert!(err.to_string().contains("'dims'"), "{err}");

        let err = parse_state(r#"{"dims":[2,2],"kind":"pure","data":[[1,0],[1,0],[0,0],[0,0]]}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("'data'") && msg.contains("unit norm"), "{msg}");

        let err = parse_state(r#"{"dims":[2,2],"kind":"pure","data":[[1,0]]}"#).unwrap_err();
        assert!(err.to_string().contains("needs 4 entries"), "{err}");

        let mut entries = vec![[0.0, 0.0]; 16];
        for i in 0..4 {
            entries[i * 5] = [0.5, 0.0];
        }
        let file = StateFile {
            dims: [2, 2],
            kind: StateKind::Density,
            data: entries,
        };
        let err = file.validate().unwrap_err();
        assert!(err.to_string().contains("unit trace"), "{err}");

        let err = parse_state(r#"{"dims":[2,2],"kind":"mixed","data":[]}"#).unwrap_err();
        assert!(matches!(err, Error::Format(_)));
    }
}
