//! Truncated qubit ⊗ phonon ⊗ photon Hilbert space.
//!
//! Basis states `|i,m,n⟩` are laid out row-major with the qubit level
//! outermost, then the phonon number `m`, then the photon number `n`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Tolerance on `‖ψ‖ = 1` for a [`StateVector`].
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance on `H = H†` for a [`HermitianOperator`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Max-abs reconstruction error accepted for `V diag(λ) V†`.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Default ceiling on the coherent-state truncation deficit.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-9;

/// Internal level of the ion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Qubit {
    G,
    E,
}

impl Qubit {
    pub fn index(self) -> usize {
        match self {
            Qubit::G => 0,
            Qubit::E => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Qubit::G
        } else {
            Qubit::E
        }
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Qubit::G => f.write_str("g"),
            Qubit::E => f.write_str("e"),
        }
    }
}

/// Formats a basis state as `|i,m,n⟩`.
pub fn ket_label(i: Qubit, m: usize, n: usize) -> String {
    format!("|{i},{m},{n}⟩")
}

/// Truncation bounds of the product basis: `m < phonon_cutoff`, `n < photon_cutoff`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceDims {
    phonon_cutoff: usize,
    photon_cutoff: usize,
}

impl SpaceDims {
    pub fn new(phonon_cutoff: usize, photon_cutoff: usize) -> Result<Self> {
        if phonon_cutoff == 0 || photon_cutoff == 0 {
            return Err(Error::InvalidConfig(format!(
                "cutoffs must be >= 1 (got phonon {phonon_cutoff}, photon {photon_cutoff})"
            )));
        }
        Ok(Self {
            phonon_cutoff,
            photon_cutoff,
        })
    }

    pub fn phonon_cutoff(&self) -> usize {
        self.phonon_cutoff
    }

    pub fn photon_cutoff(&self) -> usize {
        self.photon_cutoff
    }

    /// `2 × phonon_cutoff × photon_cutoff`.
    pub fn total(&self) -> usize {
        2 * self.phonon_cutoff * self.photon_cutoff
    }

    /// Subsystem dimensions `(2, phonon_cutoff, photon_cutoff)`.
    pub fn shape(&self) -> [usize; 3] {
        [2, self.phonon_cutoff, self.photon_cutoff]
    }

    pub fn index(&self, i: Qubit, m: usize, n: usize) -> Result<usize> {
        if m >= self.phonon_cutoff {
            return Err(Error::OutOfRange {
                coordinate: "m",
                value: m,
                bound: self.phonon_cutoff,
            });
        }
        if n >= self.photon_cutoff {
            return Err(Error::OutOfRange {
                coordinate: "n",
                value: n,
                bound: self.photon_cutoff,
            });
        }
        Ok(self.index_unchecked(i, m, n))
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, i: Qubit, m: usize, n: usize) -> usize {
        (i.index() * self.phonon_cutoff + m) * self.photon_cutoff + n
    }

    /// Inverse of [`SpaceDims::index`].
    pub fn unindex(&self, idx: usize) -> (Qubit, usize, usize) {
        let n = idx % self.photon_cutoff;
        let rest = idx / self.photon_cutoff;
        let m = rest % self.phonon_cutoff;
        (Qubit::from_index(rest / self.phonon_cutoff), m, n)
    }

    pub fn contains(&self, m: usize, n: usize) -> bool {
        m < self.phonon_cutoff && n < self.photon_cutoff
    }
}

/// Flat index of `|i,m,n⟩`.
pub fn basis_index(dims: SpaceDims, i: Qubit, m: usize, n: usize) -> Result<usize> {
    dims.index(i, m, n)
}

/// Normalized pure state over the truncated product basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: SpaceDims,
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized to within [`NORM_TOL`].
    pub fn new(dims: SpaceDims, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::Precondition(format!(
                "expected {} amplitudes, got {}",
                dims.total(),
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Precondition(format!(
                "state norm {norm} deviates from 1"
            )));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(dims: SpaceDims, amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Precondition("cannot normalize a zero vector".into()));
        }
        Self::new(dims, amplitudes / C64::from(norm))
    }

    /// A single basis state `|i,m,n⟩`.
    pub fn basis(dims: SpaceDims, i: Qubit, m: usize, n: usize) -> Result<Self> {
        let mut amps = DVector::from_element(dims.total(), ZERO);
        amps[dims.index(i, m, n)?] = ONE;
        Ok(Self {
            dims,
            amplitudes: amps,
        })
    }

    /// Skips the norm check; used for evolved states where unitarity is
    /// reported separately as a norm error.
    pub(crate) fn from_raw(dims: SpaceDims, amplitudes: DVector<C64>) -> Self {
        Self { dims, amplitudes }
    }

    pub fn dims(&self) -> SpaceDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: Qubit, m: usize, n: usize) -> Result<C64> {
        Ok(self.amplitudes[self.dims.index(i, m, n)?])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

#[derive(Clone, Debug)]
pub struct Eigensystem {
    /// Ascending.
    pub values: DVector<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: DMatrix<C64>,
}

/// Dense complex Hermitian matrix with an optional cached eigensystem.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    matrix: DMatrix<C64>,
    eigen: Option<Eigensystem>,
}

impl HermitianOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Precondition(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self {
            matrix,
            eigen: None,
        })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigensystem(&self) -> Option<&Eigensystem> {
        self.eigen.as_ref()
    }

    /// Diagonalizes the matrix and caches the result.
    pub fn with_eigensystem(mut self) -> Result<Self> {
        let eig = hermitian_eigen(&self.matrix);
        let recon = reconstruct(&eig);
        let err = max_abs(&(&recon - &self.matrix));
        if err > RECONSTRUCTION_TOL {
            return Err(Error::Precondition(format!(
                "eigendecomposition reconstruction error {err:e}"
            )));
        }
        self.eigen = Some(eig);
        Ok(self)
    }

    /// Eigenvalues in ascending order, computed on demand if not cached.
    pub fn eigenvalues(&self) -> DVector<f64> {
        match &self.eigen {
            Some(e) => e.values.clone(),
            None => hermitian_eigenvalues(&self.matrix),
        }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }
}

pub(crate) fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc: f64, z| acc.max(z.norm()))
}

fn reconstruct(e: &Eigensystem) -> DMatrix<C64> {
    let scaled = DMatrix::from_fn(e.vectors.nrows(), e.vectors.ncols(), |r, c| {
        e.vectors[(r, c)] * e.values[c]
    });
    scaled * e.vectors.adjoint()
}

/// Full eigendecomposition with eigenvalues sorted ascending.
pub(crate) fn hermitian_eigen(m: &DMatrix<C64>) -> Eigensystem {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(order.len(), order.iter().map(|&k| eig.eigenvalues[k]));
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    Eigensystem { values, vectors }
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> DVector<f64> {
    let mut vals: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    DVector::from_vec(vals)
}

/// Ladder and Pauli operators embedded in the full product space.
#[derive(Clone, Debug)]
pub struct LadderOps {
    /// Phonon annihilator `â`.
    pub a: DMatrix<C64>,
    /// Photon annihilator `b̂`.
    pub b: DMatrix<C64>,
    /// `σ₊ = |e⟩⟨g|`.
    pub sigma_plus: DMatrix<C64>,
    /// `σ₋ = |g⟩⟨e|`.
    pub sigma_minus: DMatrix<C64>,
}

fn annihilator(cutoff: usize) -> DMatrix<C64> {
    DMatrix::from_fn(cutoff, cutoff, |r, c| {
        if c == r + 1 {
            C64::from((c as f64).sqrt())
        } else {
            ZERO
        }
    })
}

pub fn ladder_matrices(dims: SpaceDims) -> LadderOps {
    let id2 = DMatrix::<C64>::identity(2, 2);
    let id_m = DMatrix::<C64>::identity(dims.phonon_cutoff, dims.phonon_cutoff);
    let id_n = DMatrix::<C64>::identity(dims.photon_cutoff, dims.photon_cutoff);
    let mut sp = DMatrix::from_element(2, 2, ZERO);
    sp[(1, 0)] = ONE;
    let sm = sp.transpose();

    let a = id2
        .kronecker(&annihilator(dims.phonon_cutoff))
        .kronecker(&id_n);
    let b = id2
        .kronecker(&id_m)
        .kronecker(&annihilator(dims.photon_cutoff));
    let sigma_plus = sp.kronecker(&id_m).kronecker(&id_n);
    let sigma_minus = sm.kronecker(&id_m).kronecker(&id_n);
    LadderOps {
        a,
        b,
        sigma_plus,
        sigma_minus,
    }
}

/// Diagonal element `⟨m|Ô_k|m⟩` of
/// `Ô_k = e^{−η²/2} Σ_p (iη)^{2p} â†^p â^p / (p!(p+k)!)`.
///
/// `â†^p â^p |m⟩ = m!/(m−p)! |m⟩`, so the sum terminates at `p = m`.
pub fn ok_diagonal(k: usize, eta: f64, m: usize) -> f64 {
    let x = -eta * eta;
    let mut sum = 0.0;
    // term_p = C(m,p) x^p / (p+k)!
    let mut binom_pow = 1.0;
    let mut inv_fact = 1.0 / factorial(k);
    for p in 0..=m {
        if p > 0 {
            binom_pow *= (m - p + 1) as f64 / p as f64 * x;
            inv_fact /= (p + k) as f64;
        }
        sum += binom_pow * inv_fact;
    }
    (-eta * eta / 2.0).exp() * sum
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

/// `Ô_k` evaluated at Lamb-Dicke parameter `eta`, as a (diagonal) operator on
/// the full product space. Acts on the phonon factor only.
pub fn ok_matrix(dims: SpaceDims, k: usize, eta: f64) -> DMatrix<C64> {
    let diag: Vec<f64> = (0..dims.phonon_cutoff)
        .map(|m| ok_diagonal(k, eta, m))
        .collect();
    DMatrix::from_fn(dims.total(), dims.total(), |r, c| {
        if r == c {
            let (_, m, _) = dims.unindex(r);
            C64::from(diag[m])
        } else {
            ZERO
        }
    })
}

#[derive(Clone, Debug)]
pub struct CoherentAmplitudes {
    pub amplitudes: Vec<C64>,
    /// `1 − Σ|amp|²`, evaluated as the discarded tail of the series.
    pub deficit: f64,
}

/// Fock amplitudes `e^{−|β|²/2} β^m / √(m!)` of the coherent state `|β⟩` for
/// `m < cutoff`.
pub fn coherent_amplitudes(beta: C64, cutoff: usize, tolerance: f64) -> Result<CoherentAmplitudes> {
    if cutoff == 0 {
        return Err(Error::InvalidConfig("coherent cutoff must be >= 1".into()));
    }
    let mean = beta.norm_sqr();
    let mut amp = C64::from((-mean / 2.0).exp());
    let mut amplitudes = Vec::with_capacity(cutoff);
    for m in 0..cutoff {
        if m > 0 {
            amp = amp * beta / (m as f64).sqrt();
        }
        amplitudes.push(amp);
    }

    // Summing the tail avoids cancellation in 1 − Σ|amp|².
    let mut deficit = 0.0;
    let mut m = cutoff;
    let mut weight = amp.norm_sqr();
    loop {
        weight *= mean / m as f64;
        deficit += weight;
        m += 1;
        if weight == 0.0 || (m as f64 > mean && weight <= deficit * 1e-17) {
            break;
        }
    }

    if deficit > tolerance {
        return Err(Error::TruncationInsufficient { deficit, tolerance });
    }
    Ok(CoherentAmplitudes {
        amplitudes,
        deficit,
    })
}
