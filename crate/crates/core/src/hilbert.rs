//! Basis bookkeeping and the dense linear-algebra types shared by every
//! other module.
//!
//! The product basis is `|n⟩_cav ⊗ |j1⟩ ⊗ |j2⟩` with the cavity label
//! slowest and the second atom fastest:
//!
//! ```text
//! index = ((n · L) + j1) · L + j2        (two atoms, L = atom_levels)
//! index = n · L + j1                     (one atom)
//! ```
//!
//! Nothing outside this module computes an index by hand.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Round-off clamp for norms and populations.
pub(crate) const ROUNDOFF_CLAMP: f64 = 1e-12;

/// Shape of the truncated Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertDims {
    n_max: usize,
    atom_levels: usize,
    n_atoms: usize,
}

impl HilbertDims {
    pub fn new(n_max: usize, atom_levels: usize, n_atoms: usize) -> Result<Self> {
        if !(2..=4).contains(&atom_levels) {
            return Err(Error::Domain(format!(
                "atom_levels must be 2, 3 or 4, got {atom_levels}"
            )));
        }
        if !(1..=2).contains(&n_atoms) {
            return Err(Error::Domain(format!(
                "n_atoms must be 1 or 2, got {n_atoms}"
            )));
        }
        Ok(Self {
            n_max,
            atom_levels,
            n_atoms,
        })
    }

    /// Two atoms sharing one cavity mode truncated at `n_max` photons.
    pub fn cavity_pair(n_max: usize, atom_levels: usize) -> Result<Self> {
        Self::new(n_max, atom_levels, 2)
    }

    /// Atoms without a cavity (single Fock slot `n = 0`).
    pub fn atoms_only(atom_levels: usize, n_atoms: usize) -> Result<Self> {
        Self::new(0, atom_levels, n_atoms)
    }

    /// The 2×2 space of a single qubit.
    pub fn qubit() -> Self {
        Self {
            n_max: 0,
            atom_levels: 2,
            n_atoms: 1,
        }
    }

    /// Two qubits, no cavity: the 4-dim space of the Bell analysis.
    pub fn qubit_pair() -> Self {
        Self {
            n_max: 0,
            atom_levels: 2,
            n_atoms: 2,
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn atom_levels(&self) -> usize {
        self.atom_levels
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn with_n_max(&self, n_max: usize) -> Self {
        Self { n_max, ..*self }
    }

    /// Same cavity truncation and atom count with a different level count.
    pub fn with_atom_levels(&self, atom_levels: usize) -> Result<Self> {
        Self::new(self.n_max, atom_levels, self.n_atoms)
    }

    fn atom_block(&self) -> usize {
        self.atom_levels.pow(self.n_atoms as u32)
    }

    pub fn dim(&self) -> usize {
        (self.n_max + 1) * self.atom_block()
    }

    pub fn index(&self, n: usize, j1: usize, j2: usize) -> Result<usize> {
        let l = self.atom_levels;
        if n > self.n_max {
            return Err(Error::Domain(format!(
                "photon number {n} exceeds n_max {}",
                self.n_max
            )));
        }
        if j1 >= l {
            return Err(Error::Domain(format!(
                "atom-1 level {j1} out of range 0..{l}"
            )));
        }
        match self.n_atoms {
            1 if j2 != 0 => Err(Error::Domain(format!(
                "single-atom space has no atom-2 label (got {j2})"
            ))),
            1 => Ok(n * l + j1),
            _ if j2 >= l => Err(Error::Domain(format!(
                "atom-2 level {j2} out of range 0..{l}"
            ))),
            _ => Ok((n * l + j1) * l + j2),
        }
    }

    pub fn labels(&self, index: usize) -> Result<(usize, usize, usize)> {
        if index >= self.dim() {
            return Err(Error::Domain(format!(
                "index {index} out of range 0..{}",
                self.dim()
            )));
        }
        let l = self.atom_levels;
        Ok(match self.n_atoms {
            1 => (index / l, index % l, 0),
            _ => (index / (l * l), (index / l) % l, index % l),
        })
    }

    /// Iterate `(index, (n, j1, j2))` in basis order.
    pub fn iter_labels(&self) -> impl Iterator<Item = (usize, (usize, usize, usize))> + '_ {
        (0..self.dim()).map(move |i| (i, self.labels(i).expect("index in range")))
    }

    fn check_same(&self, other: &HilbertDims) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

pub fn basis_index(n: usize, j1: usize, j2: usize, dims: &HilbertDims) -> Result<usize> {
    dims.index(n, j1, j2)
}

pub fn basis_labels(index: usize, dims: &HilbertDims) -> Result<(usize, usize, usize)> {
    dims.labels(index)
}

/// A (possibly unnormalized) state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: HilbertDims,
    amps: Array1<C64>,
}

impl StateVector {
    pub fn new(dims: HilbertDims, amps: Array1<C64>) -> Result<Self> {
        if amps.len() != dims.dim() {
            return Err(Error::DimensionMismatch {
                expected: dims.dim(),
                found: amps.len(),
            });
        }
        Ok(Self { dims, amps })
    }

    pub fn zeros(dims: HilbertDims) -> Self {
        Self {
            dims,
            amps: Array1::zeros(dims.dim()),
        }
    }

    pub fn basis(dims: HilbertDims, n: usize, j1: usize, j2: usize) -> Result<Self> {
        let mut out = Self::zeros(dims);
        out.amps[dims.index(n, j1, j2)?] = C64::new(1.0, 0.0);
        Ok(out)
    }

    /// Build from `(label, amplitude)` pairs; unlisted amplitudes are zero.
    pub fn from_labels(dims: HilbertDims, terms: &[((usize, usize, usize), C64)]) -> Result<Self> {
        let mut out = Self::zeros(dims);
        for &((n, j1, j2), a) in terms {
            out.amps[dims.index(n, j1, j2)?] += a;
        }
        Ok(out)
    }

    pub fn dims(&self) -> HilbertDims {
        self.dims
    }

    pub fn amps(&self) -> &Array1<C64> {
        &self.amps
    }

    pub fn into_amps(self) -> Array1<C64> {
        self.amps
    }

    pub fn amplitude(&self, n: usize, j1: usize, j2: usize) -> Result<C64> {
        Ok(self.amps[self.dims.index(n, j1, j2)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize state with squared norm {n2}"
            )));
        }
        let scale = 1.0 / n2.sqrt();
        Ok(Self {
            dims: self.dims,
            amps: self.amps.mapv(|a| a * scale),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.dims.check_same(&other.dims)?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            dims: self.dims,
            amps: self.amps.mapv(|a| a * factor),
        }
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.dims.check_same(&other.dims)?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn is_finite(&self) -> bool {
        self.amps
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Copy amplitudes whose labels exist in `dims`; others are dropped
    /// (projection) or zero (embedding). Atom counts must agree.
    pub fn project_onto(&self, dims: HilbertDims) -> Result<Self> {
        if dims.n_atoms() != self.dims.n_atoms() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.n_atoms(),
                found: dims.n_atoms(),
            });
        }
        let mut out = Self::zeros(dims);
        for (i, (n, j1, j2)) in self.dims.iter_labels() {
            if let Ok(k) = dims.index(n, j1, j2) {
                out.amps[k] = self.amps[i];
            }
        }
        Ok(out)
    }
}

/// Dense complex operator on a [`HilbertDims`] space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dims: HilbertDims,
    entries: Array2<C64>,
}

impl OperatorMatrix {
    pub fn new(dims: HilbertDims, entries: Array2<C64>) -> Result<Self> {
        let d = dims.dim();
        if entries.dim() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: entries.nrows(),
            });
        }
        Ok(Self { dims, entries })
    }

    pub fn zeros(dims: HilbertDims) -> Self {
        let d = dims.dim();
        Self {
            dims,
            entries: Array2::zeros((d, d)),
        }
    }

    pub fn identity(dims: HilbertDims) -> Self {
        Self {
            dims,
            entries: Array2::eye(dims.dim()),
        }
    }

    /// Cavity annihilation operator `b`, truncated at `n_max`.
    pub fn annihilation(dims: HilbertDims) -> Self {
        let mut out = Self::zeros(dims);
        for (col, (n, j1, j2)) in dims.iter_labels() {
            if n > 0 {
                let row = dims.index(n - 1, j1, j2).expect("lower Fock state exists");
                out.entries[[row, col]] = C64::new((n as f64).sqrt(), 0.0);
            }
        }
        out
    }

    /// Photon number `b†b`.
    pub fn number(dims: HilbertDims) -> Self {
        let mut out = Self::zeros(dims);
        for (i, (n, _, _)) in dims.iter_labels() {
            out.entries[[i, i]] = C64::new(n as f64, 0.0);
        }
        out
    }

    /// Atomic transition `|j⟩⟨k|` acting on `atom` (0 or 1), identity elsewhere.
    pub fn transition(dims: HilbertDims, atom: usize, j: usize, k: usize) -> Result<Self> {
        let l = dims.atom_levels();
        if atom >= dims.n_atoms() {
            return Err(Error::Domain(format!(
                "atom {atom} out of range for {} atom(s)",
                dims.n_atoms()
            )));
        }
        if j >= l || k >= l {
            return Err(Error::Domain(format!(
                "transition |{j}><{k}| out of range for {l} levels"
            )));
        }
        let mut out = Self::zeros(dims);
        for (col, (n, j1, j2)) in dims.iter_labels() {
            let (from, other) = if atom == 0 { (j1, j2) } else { (j2, j1) };
            if from != k {
                continue;
            }
            let row = if atom == 0 {
                dims.index(n, j, other)?
            } else {
                dims.index(n, other, j)?
            };
            out.entries[[row, col]] = C64::new(1.0, 0.0);
        }
        Ok(out)
    }

    /// Embed a single-atom operator (on `atoms_only(L, 1)`) as acting on
    /// `atom` inside `dims`, identity on the cavity and the other atom.
    pub fn lift_single_atom(op: &OperatorMatrix, atom: usize, dims: HilbertDims) -> Result<Self> {
        let l = dims.atom_levels();
        if op.dims.n_atoms() != 1 || op.dims.n_max() != 0 || op.dims.atom_levels() != l {
            return Err(Error::DimensionMismatch {
                expected: l,
                found: op.dims.dim(),
            });
        }
        let mut out = Self::zeros(dims);
        for j in 0..l {
            for k in 0..l {
                let c = op.entries[[j, k]];
                if c != C64::new(0.0, 0.0) {
                    out = out + Self::transition(dims, atom, j, k)? * c;
                }
            }
        }
        Ok(out)
    }

    /// Tensor product `self ⊗ other` of two single-atom operators.
    pub fn kron_atoms(&self, other: &OperatorMatrix) -> Result<Self> {
        let dims = HilbertDims::atoms_only(self.dims.atom_levels(), 2)?;
        Self::lift_single_atom(self, 0, dims)?.matmul(&Self::lift_single_atom(other, 1, dims)?)
    }

    pub fn dims(&self) -> HilbertDims {
        self.dims
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<C64> {
        self.entries
    }

    /// `⟨bra|self|ket⟩` for basis labels.
    pub fn element(&self, bra: (usize, usize, usize), ket: (usize, usize, usize)) -> Result<C64> {
        let r = self.dims.index(bra.0, bra.1, bra.2)?;
        let c = self.dims.index(ket.0, ket.1, ket.2)?;
        Ok(self.entries[[r, c]])
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.dims.check_same(&psi.dims)?;
        Ok(StateVector {
            dims: self.dims,
            amps: self.entries.dot(&psi.amps),
        })
    }

    pub fn matmul(&self, other: &OperatorMatrix) -> Result<Self> {
        self.dims.check_same(&other.dims)?;
        Ok(Self {
            dims: self.dims,
            entries: self.entries.dot(&other.entries),
        })
    }

    pub fn dagger(&self) -> Self {
        Self {
            dims: self.dims,
            entries: self.entries.t().mapv(|z| z.conj()),
        }
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (self.clone() + self.dagger()) * 0.5
    }

    /// `(A − A†)/(2i)`, itself Hermitian.
    pub fn anti_hermitian_part(&self) -> Self {
        (self.clone() - self.dagger()) * C64::new(0.0, -0.5)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> Result<f64> {
        self.dims.check_same(&other.dims)?;
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Hermitian within `rel_tol` relative to the largest entry.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        self.max_abs_diff(&self.dagger())
            .map(|d| d <= rel_tol * scale)
            .unwrap_or(false)
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }

    pub fn trace(&self) -> C64 {
        self.entries.diag().sum()
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        let d = self.dims.dim();
        DMatrix::from_fn(d, d, |i, j| self.entries[[i, j]])
    }
}

impl Add for OperatorMatrix {
    type Output = OperatorMatrix;

    /// Panics if the operand spaces differ.
    fn add(self, rhs: OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dims, rhs.dims, "operator dimension mismatch");
        OperatorMatrix {
            dims: self.dims,
            entries: self.entries + rhs.entries,
        }
    }
}

impl Sub for OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dims, rhs.dims, "operator dimension mismatch");
        OperatorMatrix {
            dims: self.dims,
            entries: self.entries - rhs.entries,
        }
    }
}

impl Mul<C64> for OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: C64) -> OperatorMatrix {
        OperatorMatrix {
            dims: self.dims,
            entries: self.entries.mapv(|z| z * rhs),
        }
    }
}

impl Mul<f64> for OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: f64) -> OperatorMatrix {
        OperatorMatrix {
            dims: self.dims,
            entries: self.entries.mapv(|z| z * rhs),
        }
    }
}

/// Density operator; used as the master-equation reference.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: HilbertDims,
    entries: Array2<C64>,
}

impl DensityMatrix {
    pub fn new(dims: HilbertDims, entries: Array2<C64>) -> Result<Self> {
        let d = dims.dim();
        if entries.dim() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: entries.nrows(),
            });
        }
        Ok(Self { dims, entries })
    }

    /// `|ψ⟩⟨ψ|` for the normalized `psi`.
    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let psi = psi.normalized()?;
        let d = psi.dims.dim();
        let entries = Array2::from_shape_fn((d, d), |(i, j)| psi.amps[i] * psi.amps[j].conj());
        Ok(Self {
            dims: psi.dims,
            entries,
        })
    }

    pub fn dims(&self) -> HilbertDims {
        self.dims
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        self.entries.diag().sum()
    }

    /// Diagonal populations; round-off negatives above `-1e-12` clamp to zero.
    pub fn populations(&self) -> Vec<f64> {
        self.entries
            .diag()
            .iter()
            .map(|z| {
                if z.re < 0.0 && z.re > -ROUNDOFF_CLAMP {
                    0.0
                } else {
                    z.re
                }
            })
            .collect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dims.dim();
        (0..d).all(|i| {
            (0..d).all(|j| (self.entries[[i, j]] - self.entries[[j, i]].conj()).norm() <= tol)
        })
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dims.dim();
        let m = DMatrix::from_fn(d, d, |i, j| {
            (self.entries[[i, j]] + self.entries[[j, i]].conj()) * 0.5
        });
        m.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `Tr(ρ A)`.
    pub fn expectation(&self, op: &OperatorMatrix) -> Result<C64> {
        self.dims.check_same(&op.dims)?;
        Ok(self.entries.dot(&op.entries).diag().sum())
    }
}
