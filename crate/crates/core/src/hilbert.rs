//! Fock-space bookkeeping for `N` three-level atoms coupled to two bosonic
//! modes, plus dense Hermitian time evolution.
//!
//! The Hamiltonian conserves `N1 = k + #e1` and `N2 = l + #e2` separately, so
//! the joint space splits into invariant [`Sector`]s labelled by `(N1, N2)`.
//! Every sector is enumerated exhaustively: all `3^n` atom configurations are
//! walked in lexicographic order (`G < E1 < E2`) and the photon numbers are
//! forced by the two charges.

use std::collections::HashMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerance on norm preservation under unitary evolution.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Internal level of one atom.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    G,
    E1,
    E2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::G, Level::E1, Level::E2];

    fn symbol(self) -> char {
        match self {
            Level::G => 'g',
            Level::E1 => '1',
            Level::E2 => '2',
        }
    }
}

/// Levels of every atom, in atom order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomConfig(Vec<Level>);

impl AtomConfig {
    pub fn new(levels: Vec<Level>) -> Self {
        Self(levels)
    }

    /// `m` atoms in `E1` followed by `n_atoms - m` atoms in `E2`.
    pub fn excited(n_atoms: usize, m: usize) -> Self {
        assert!(m <= n_atoms, "more E1 atoms than atoms");
        let mut levels = vec![Level::E1; m];
        levels.resize(n_atoms, Level::E2);
        Self(levels)
    }

    pub fn levels(&self) -> &[Level] {
        &self.0
    }

    pub fn n_atoms(&self) -> usize {
        self.0.len()
    }

    pub fn count(&self, level: Level) -> usize {
        self.0.iter().filter(|&&l| l == level).count()
    }

    pub fn n_e1(&self) -> usize {
        self.count(Level::E1)
    }

    pub fn n_e2(&self) -> usize {
        self.count(Level::E2)
    }

    /// Copy with atom `atom` moved to `level`.
    pub fn with_level(&self, atom: usize, level: Level) -> Self {
        let mut levels = self.0.clone();
        levels[atom] = level;
        Self(levels)
    }
}

impl fmt::Display for AtomConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|l| write!(f, "{}", l.symbol()))
    }
}

/// Joint basis element: atom levels plus photon numbers `k` (mode 1) and `l`
/// (mode 2).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockBasisState {
    pub atoms: AtomConfig,
    pub k: usize,
    pub l: usize,
}

impl FockBasisState {
    pub fn new(atoms: AtomConfig, k: usize, l: usize) -> Self {
        Self { atoms, k, l }
    }

    pub fn charge1(&self) -> usize {
        self.k + self.atoms.n_e1()
    }

    pub fn charge2(&self) -> usize {
        self.l + self.atoms.n_e2()
    }

    pub fn photons(&self) -> (usize, usize) {
        (self.k, self.l)
    }
}

impl fmt::Display for FockBasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}; {}, {}>", self.atoms, self.k, self.l)
    }
}

/// Invariant subspace with fixed `(N1, N2)`.
#[derive(Clone, Debug)]
pub struct Sector {
    n_atoms: usize,
    n1: usize,
    n2: usize,
    basis: Vec<FockBasisState>,
    index: HashMap<FockBasisState, usize>,
}

impl Sector {
    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Conserved charges `(N1, N2)`.
    pub fn charges(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn basis(&self) -> &[FockBasisState] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, state: &FockBasisState) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// Unit vector on `state`, if it belongs to this sector.
    pub fn basis_vector(&self, state: &FockBasisState) -> Option<StateVector> {
        self.index_of(state).map(|i| {
            let mut amps = DVector::zeros(self.dim());
            amps[i] = C64::new(1.0, 0.0);
            StateVector::new(amps)
        })
    }
}

/// All sectors are enumerated from the same lexicographic walk.
fn for_each_config(n_atoms: usize, mut f: impl FnMut(&[Level])) {
    let mut digits = vec![0usize; n_atoms];
    let mut levels = vec![Level::G; n_atoms];
    loop {
        f(&levels);
        // odometer increment, last atom fastest
        let mut pos = n_atoms;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < 3 {
                levels[pos] = Level::ALL[digits[pos]];
                break;
            }
            digits[pos] = 0;
            levels[pos] = Level::G;
        }
    }
}

/// Complete basis of the `(N1, N2)` sector for `n_atoms` atoms.
pub fn enumerate_sector(n_atoms: usize, n1: usize, n2: usize) -> Sector {
    let mut basis = Vec::new();
    for_each_config(n_atoms, |levels| {
        let n_e1 = levels.iter().filter(|&&l| l == Level::E1).count();
        let n_e2 = levels.iter().filter(|&&l| l == Level::E2).count();
        if n_e1 <= n1 && n_e2 <= n2 {
            basis.push(FockBasisState::new(
                AtomConfig::new(levels.to_vec()),
                n1 - n_e1,
                n2 - n_e2,
            ));
        }
    });
    let index = basis
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Sector {
        n_atoms,
        n1,
        n2,
        basis,
        index,
    }
}

/// Signed-integer entry point used by the CLI and bindings.
pub fn enumerate_sector_checked(n_atoms: i64, n1: i64, n2: i64) -> Result<Sector> {
    let conv = |name: &str, v: i64| {
        usize::try_from(v)
            .map_err(|_| Error::Domain(format!("{name} must be non-negative, got {v}")))
    };
    Ok(enumerate_sector(
        conv("n_atoms", n_atoms)?,
        conv("N1", n1)?,
        conv("N2", n2)?,
    ))
}

/// Complex amplitudes over some ordered basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: DVector<C64>,
}

impl StateVector {
    pub fn new(amps: DVector<C64>) -> Self {
        Self { amps }
    }

    pub fn from_vec(amps: Vec<C64>) -> Self {
        Self::new(DVector::from_vec(amps))
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.amps.iter().map(|a| a.norm_sqr())
    }
}

/// Dense Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    entries: DMatrix<C64>,
}

impl HermitianOperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    /// Accepts `m` only if it equals its conjugate transpose exactly.
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m != m.adjoint() {
            return Err(Error::Domain("matrix is not Hermitian".into()));
        }
        Ok(Self { entries: m })
    }

    /// Adds `value` at `(i, j)` and its conjugate at `(j, i)`.
    pub fn add_coupling(&mut self, i: usize, j: usize, value: C64) {
        if i == j {
            self.entries[(i, i)] += C64::new(value.re, 0.0);
        } else {
            self.entries[(i, j)] += value;
            self.entries[(j, i)] += value.conj();
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }
}

/// Eigendecomposition `H = V diag(λ) V†`, reusable for any number of times.
#[derive(Clone, Debug)]
pub struct Propagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

const EIGEN_EPS: f64 = f64::EPSILON;
const EIGEN_MAX_ITER: usize = 0; // unlimited

impl Propagator {
    pub fn new(h: &HermitianOperator) -> Result<Self> {
        if h.dim() == 0 {
            return Ok(Self {
                eigenvalues: DVector::zeros(0),
                eigenvectors: DMatrix::zeros(0, 0),
            });
        }
        // A real symmetric matrix has real eigenvectors; the real solver is
        // several times faster than the complex one.
        if h.is_real() {
            let real = h.entries.map(|z| z.re);
            let eig = nalgebra::SymmetricEigen::try_new(real, EIGEN_EPS, EIGEN_MAX_ITER)
                .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
            Ok(Self {
                eigenvalues: eig.eigenvalues,
                eigenvectors: eig.eigenvectors.map(|x| C64::new(x, 0.0)),
            })
        } else {
            let eig =
                nalgebra::SymmetricEigen::try_new(h.entries.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
                    .ok_or_else(|| {
                        Error::Numerical("Hermitian eigensolver did not converge".into())
                    })?;
            Ok(Self {
                eigenvalues: eig.eigenvalues,
                eigenvectors: eig.eigenvectors,
            })
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Coordinates of `psi` in the eigenbasis.
    pub fn to_eigenbasis(&self, psi: &StateVector) -> Result<DVector<C64>> {
        self.check_dim(psi.dim())?;
        Ok(self.eigenvectors.ad_mul(&psi.amps))
    }

    /// `exp(-i H t)` applied to a state already expressed by
    /// [`to_eigenbasis`](Self::to_eigenbasis).
    pub fn evolve_eigen(&self, coeffs: &DVector<C64>, t: f64) -> StateVector {
        let phased = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(self.eigenvalues.iter())
                .map(|(c, &e)| c * C64::from_polar(1.0, -e * t)),
        );
        StateVector::new(&self.eigenvectors * phased)
    }

    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        let coeffs = self.to_eigenbasis(psi)?;
        Ok(self.evolve_eigen(&coeffs, t))
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

/// `exp(-i H t) psi` via a one-off eigendecomposition.
pub fn evolve_unitary(h: &HermitianOperator, t: f64, psi: &StateVector) -> Result<StateVector> {
    if h.dim() != psi.dim() {
        return Err(Error::Dimension {
            expected: h.dim(),
            found: psi.dim(),
        });
    }
    if t == 0.0 {
        return Ok(psi.clone());
    }
    Propagator::new(h)?.evolve(psi, t)
}
