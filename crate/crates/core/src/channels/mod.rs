//! Density matrices, Kraus channels and the unitary-invertibility criterion.

mod random;
mod theorem;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use random::{
    random_density, random_nonproportional_pair, random_pure_state, random_unitary,
    split_unitary,
};
pub use theorem::{
    analyze_channel, extract_unitary, invert_channel, mixture_to_pure_probe,
    proportionality_test, ChannelReport, MixtureProbe, Proportionality, Verdict,
    NONZERO_THRESHOLD, UNITARY_TOL,
};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const MAX_DIM: usize = 64;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const COMPLETENESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid Kraus set: {0}")]
    InvalidKraus(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("channel is not invertible: {0}")]
    NotInvertible(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: CMatrix) -> Result<Self, ChannelError> {
        let d = entries.nrows();
        if d == 0 || entries.ncols() != d {
            return Err(ChannelError::InvalidDensity(format!(
                "expected a non-empty square matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(ChannelError::InvalidDensity("non-finite entry".into()));
        }
        let herm = max_abs(&(&entries - entries.adjoint()));
        if herm > HERMITIAN_TOL {
            return Err(ChannelError::InvalidDensity(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = entries.trace();
        if (tr - c(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(ChannelError::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let rho = Self { entries };
        let low = rho.min_eigenvalue();
        if low < -PSD_TOL {
            return Err(ChannelError::InvalidDensity(format!(
                "negative eigenvalue {low:e}"
            )));
        }
        Ok(rho)
    }

    /// Wraps a matrix produced by a trusted operation, symmetrizing away
    /// roundoff in the anti-Hermitian part.
    pub(crate) fn from_trusted(entries: CMatrix) -> Self {
        let sym = (&entries + entries.adjoint()) * c(0.5, 0.0);
        Self { entries: sym }
    }

    pub fn pure(psi: &CVector) -> Result<Self, ChannelError> {
        let n = psi.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(ChannelError::InvalidDensity("zero state vector".into()));
        }
        let v = psi / c(n, 0.0);
        Ok(Self::from_trusted(&v * v.adjoint()))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(CMatrix::identity(dim, dim) * c(1.0 / dim as f64, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `p ρ1 + (1 - p) ρ2`.
    pub fn mix(&self, other: &Self, p: f64) -> Result<Self, ChannelError> {
        if self.dim() != other.dim() {
            return Err(ChannelError::DimensionMismatch(format!(
                "{} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Self::from_trusted(
            &self.entries * c(p, 0.0) + &other.entries * c(1.0 - p, 0.0),
        ))
    }

    pub fn max_distance(&self, other: &Self) -> f64 {
        max_abs(&(&self.entries - &other.entries))
    }
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.entries.iter().map(|z| z.norm_sqr()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<CMatrix>,
}

impl KrausSet {
    /// Validates shapes, the dimension cap and `Σ V†V = 1`.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self, ChannelError> {
        let Some(first) = ops.first() else {
            return Err(ChannelError::InvalidKraus("no operators".into()));
        };
        let d = first.nrows();
        if d == 0 || d > MAX_DIM {
            return Err(ChannelError::InvalidKraus(format!(
                "dimension {d} outside 1..={MAX_DIM}"
            )));
        }
        for (j, v) in ops.iter().enumerate() {
            if v.nrows() != d || v.ncols() != d {
                return Err(ChannelError::InvalidKraus(format!(
                    "operator {j} is {}x{}, expected {d}x{d}",
                    v.nrows(),
                    v.ncols()
                )));
            }
            if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(ChannelError::InvalidKraus(format!("operator {j} has a non-finite entry")));
            }
        }
        let set = Self { ops };
        let dev = set.completeness_deviation();
        if dev > COMPLETENESS_TOL {
            return Err(ChannelError::InvalidKraus(format!(
                "completeness deviation {dev:e} exceeds {COMPLETENESS_TOL:e}"
            )));
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// `max |Σ V†V - 1|`.
    pub fn completeness_deviation(&self) -> f64 {
        let d = self.ops[0].nrows();
        let mut s = CMatrix::zeros(d, d);
        for v in &self.ops {
            s += v.adjoint() * v;
        }
        max_abs(&(s - CMatrix::identity(d, d)))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            ops: vec![CMatrix::identity(dim, dim)],
        }
    }

    /// Conjugation by a unitary.
    pub fn unitary(u: CMatrix) -> Result<Self, ChannelError> {
        Self::new(vec![u])
    }

    /// Qubit Pauli channel `{½1, ½σx, ½σy, ½σz}` mapping every state to 1/2.
    pub fn depolarizing_qubit() -> Self {
        let [i, x, y, z] = paulis();
        Self {
            ops: vec![i * c(0.5, 0.0), x * c(0.5, 0.0), y * c(0.5, 0.0), z * c(0.5, 0.0)],
        }
    }

    /// `{√(1-p) 1, √p σz}`.
    pub fn dephasing_qubit(p: f64) -> Result<Self, ChannelError> {
        let [i, _, _, z] = paulis();
        Self::new(vec![i * c((1.0 - p).sqrt(), 0.0), z * c(p.sqrt(), 0.0)])
    }

    /// `{diag(1, √(1-γ)), √γ |0⟩⟨1|}`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self, ChannelError> {
        let k0 = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - gamma).sqrt(), 0.0)],
        );
        let k1 = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(gamma.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        );
        Self::new(vec![k0, k1])
    }

    /// `ρ ↦ Tr(ρ) |0⟩⟨0|` via `{|0⟩⟨0|, |0⟩⟨1|}`.
    pub fn reset_qubit() -> Self {
        let k0 = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let k1 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        Self { ops: vec![k0, k1] }
    }
}

pub(crate) fn paulis() -> [CMatrix; 4] {
    let z0 = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    [
        CMatrix::identity(2, 2),
        CMatrix::from_row_slice(2, 2, &[z0, one, one, z0]),
        CMatrix::from_row_slice(2, 2, &[z0, c(0.0, -1.0), c(0.0, 1.0), z0]),
        CMatrix::from_row_slice(2, 2, &[one, z0, z0, -one]),
    ]
}

/// `Σ V ρ V†`.
pub fn apply_channel(k: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix, ChannelError> {
    if k.dim() != rho.dim() {
        return Err(ChannelError::DimensionMismatch(format!(
            "channel acts on dimension {}, state has {}",
            k.dim(),
            rho.dim()
        )));
    }
    Ok(DensityMatrix::from_trusted(apply_raw(k, rho.entries())))
}

/// Channel action on an arbitrary operator.
pub fn apply_raw(k: &KrausSet, x: &CMatrix) -> CMatrix {
    let d = k.dim();
    let mut out = CMatrix::zeros(d, d);
    for v in &k.ops {
        out += v * x * v.adjoint();
    }
    out
}

// JSON: {"dim": d, "ops": [[[[re, im], ...], ...], ...]} with rows outermost.

type JsonMatrix = Vec<Vec<[f64; 2]>>;

fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn matrix_from_json(rows: &JsonMatrix, dim: usize, what: &str) -> Result<CMatrix, String> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(format!("{what} is not {dim}x{dim}"));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

#[derive(Serialize, Deserialize)]
struct KrausJson {
    dim: usize,
    ops: Vec<JsonMatrix>,
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    dim: usize,
    entries: JsonMatrix,
}

impl Serialize for KrausSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        KrausJson {
            dim: self.dim(),
            ops: self.ops.iter().map(matrix_to_json).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KrausSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = KrausJson::deserialize(d)?;
        let ops = raw
            .ops
            .iter()
            .enumerate()
            .map(|(j, m)| matrix_from_json(m, raw.dim, &format!("operator {j}")))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        KrausSet::new(ops).map_err(serde::de::Error::custom)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DensityJson {
            dim: self.dim(),
            entries: matrix_to_json(&self.entries),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = DensityJson::deserialize(d)?;
        let m = matrix_from_json(&raw.entries, raw.dim, "entries").map_err(serde::de::Error::custom)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}
