//! Cloning by stimulated parametric down-conversion.
//!
//! Four modes: polarization `V`/`H` times spatial direction 1/2. The
//! interaction `γ(a†V1 a†H2 − a†H1 a†V2) + h.c.` creates photons in pairs, so
//! starting from `N` photons in `V1` only states `(k+N, l, l, k)` (ordered
//! `V1, H1, V2, H2`) are ever populated. With `Γ = tanh γt` the evolved state
//! is known in closed form; [`pdc_evolve_numeric`] reproduces it by direct
//! exponentiation on a truncated basis.
//!
//! Conditioned on `M` photons in mode 1, the mode-1 photons are optimal
//! `N -> M` clones and the `M - N` photons in mode 2 are outputs of the
//! universal NOT.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64 as C64;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hilbert::{evolve_unitary, HermitianOperator, StateVector};

/// Largest truncation the auto rule may pick.
pub const MAX_CUTOFF: usize = 4000;
/// Relative tail term at which the auto cutoff stops.
pub const TAIL_TERM_TOL: f64 = 1e-14;
/// Largest probability allowed on the truncation boundary after numeric
/// evolution.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Occupations of `V1, H1, V2, H2`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PdcBasisState {
    pub v1: usize,
    pub h1: usize,
    pub v2: usize,
    pub h2: usize,
}

impl PdcBasisState {
    pub fn new(v1: usize, h1: usize, v2: usize, h2: usize) -> Self {
        Self { v1, h1, v2, h2 }
    }

    /// Basis state reached after `k` `(V1, H2)` pairs and `l` `(H1, V2)` pairs.
    pub fn from_pairs(n_input: usize, k: usize, l: usize) -> Self {
        Self::new(k + n_input, l, l, k)
    }

    pub fn mode1(&self) -> usize {
        self.v1 + self.h1
    }

    pub fn mode2(&self) -> usize {
        self.v2 + self.h2
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PdcParameters {
    pub n_input: usize,
    /// `Γ = tanh γt`
    pub gamma: f64,
    pub cutoff: usize,
}

impl PdcParameters {
    pub fn new(n_input: usize, gamma: f64, cutoff: usize) -> Result<Self> {
        check_gamma(gamma)?;
        if cutoff < 1 {
            return Err(Error::Domain("cutoff must be at least 1".into()));
        }
        Ok(Self {
            n_input,
            gamma,
            cutoff,
        })
    }

    pub fn with_auto_cutoff(n_input: usize, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Self::new(n_input, gamma, auto_cutoff(n_input, gamma)?)
    }

    pub fn from_gamma_t(n_input: usize, gamma_t: f64) -> Result<Self> {
        Self::with_auto_cutoff(n_input, gamma_from_time(gamma_t)?)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::Domain(format!(
            "Gamma must lie in [0, 1), got {gamma}"
        )));
    }
    Ok(())
}

/// `Γ = tanh γt`
pub fn gamma_from_time(gamma_t: f64) -> Result<f64> {
    if !(gamma_t.is_finite() && gamma_t >= 0.0) {
        return Err(Error::Domain(format!(
            "gamma_t must be finite and >= 0, got {gamma_t}"
        )));
    }
    let g = gamma_t.tanh();
    check_gamma(g)?;
    Ok(g)
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

/// Smallest index at which the normalized series term
/// `Γ^{2j} C(j+n, n) (1-Γ²)^{n+1}` drops below [`TAIL_TERM_TOL`].
fn series_cutoff(n: usize, gamma: f64) -> Result<usize> {
    if gamma == 0.0 {
        return Ok(1);
    }
    let ln_g2 = (gamma * gamma).ln();
    let ln_norm = (n as f64 + 1.0) * (-gamma * gamma).ln_1p();
    let ln_tol = TAIL_TERM_TOL.ln();
    (0..=MAX_CUTOFF)
        .find(|&j| j as f64 * ln_g2 + ln_binomial(j + n, n) + ln_norm < ln_tol)
        .map(|j| j.max(1))
        .ok_or_else(|| {
            Error::Domain(format!(
                "Gamma = {gamma} needs a cutoff beyond {MAX_CUTOFF}"
            ))
        })
}

/// Truncation for both pair series; the larger of the `k` and `l` rules.
pub fn auto_cutoff(n_input: usize, gamma: f64) -> Result<usize> {
    check_gamma(gamma)?;
    Ok(series_cutoff(n_input, gamma)?.max(series_cutoff(0, gamma)?))
}

/// `K = (1 - Γ²)^{(N+2)/2}`
pub fn normalization(n_input: usize, gamma: f64) -> f64 {
    (1.0 - gamma * gamma).powf((n_input as f64 + 2.0) / 2.0)
}

/// Amplitudes over `{(k+N, l, l, k) : k, l <= cutoff}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PdcState {
    n_input: usize,
    cutoff: usize,
    /// `k`-major
    amps: Vec<C64>,
    normalization: Option<f64>,
}

impl PdcState {
    fn from_fn(
        n_input: usize,
        cutoff: usize,
        normalization: Option<f64>,
        f: impl Fn(usize, usize) -> C64,
    ) -> Self {
        let side = cutoff + 1;
        let amps = (0..side * side).map(|i| f(i / side, i % side)).collect();
        Self {
            n_input,
            cutoff,
            amps,
            normalization,
        }
    }

    pub fn n_input(&self) -> usize {
        self.n_input
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// The `K` used by the closed form, absent for numerically evolved states.
    pub fn normalization(&self) -> Option<f64> {
        self.normalization
    }

    /// Amplitude after `k` `(V1,H2)` and `l` `(H1,V2)` pairs.
    pub fn pair_amplitude(&self, k: usize, l: usize) -> C64 {
        if k > self.cutoff || l > self.cutoff {
            return C64::zero();
        }
        self.amps[k * (self.cutoff + 1) + l]
    }

    /// Amplitude on an arbitrary basis state; zero off the populated family.
    pub fn amplitude(&self, s: &PdcBasisState) -> C64 {
        match s.v1.checked_sub(self.n_input) {
            Some(k) if k == s.h2 && s.h1 == s.v2 => self.pair_amplitude(k, s.h1),
            _ => C64::zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (PdcBasisState, C64)> + '_ {
        let side = self.cutoff + 1;
        self.amps.iter().enumerate().map(move |(i, &a)| {
            (
                PdcBasisState::from_pairs(self.n_input, i / side, i % side),
                a,
            )
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm_deficit(&self) -> f64 {
        1.0 - self.norm_sqr()
    }

    /// `<self|other>`; both must describe the same input photon number.
    pub fn overlap(&self, other: &PdcState) -> Result<C64> {
        if self.n_input != other.n_input {
            return Err(Error::Domain(format!(
                "states for N = {} and N = {} live in different spaces",
                self.n_input, other.n_input
            )));
        }
        let c = self.cutoff.min(other.cutoff);
        let mut acc = C64::zero();
        for k in 0..=c {
            for l in 0..=c {
                acc += self.pair_amplitude(k, l).conj() * other.pair_amplitude(k, l);
            }
        }
        Ok(acc)
    }

    /// Largest probability on states with `k` or `l` at the cutoff.
    pub fn boundary_probability(&self) -> f64 {
        let c = self.cutoff;
        (0..=c)
            .flat_map(|j| [self.pair_amplitude(c, j), self.pair_amplitude(j, c)])
            .map(|a| a.norm_sqr())
            .fold(0.0, f64::max)
    }
}

/// Closed-form evolved state
/// `K Σ_k Σ_l (−iΓ)^k √C(k+N, N) (iΓ)^l |k+N, l, l, k>`.
pub fn pdc_final_state_analytic(params: &PdcParameters) -> Result<PdcState> {
    check_gamma(params.gamma)?;
    let n = params.n_input;
    let g = params.gamma;
    let k_norm = normalization(n, g);
    let minus_i = C64::new(0.0, -1.0);
    let plus_i = C64::new(0.0, 1.0);
    Ok(PdcState::from_fn(n, params.cutoff, Some(k_norm), |k, l| {
        let mag = k_norm * g.powi((k + l) as i32) * ln_binomial(k + n, n).exp().sqrt();
        minus_i.powu(k as u32) * plus_i.powu(l as u32) * mag
    }))
}

/// One pair chain `|j + n>_a |j>_b`, `j = 0..=cutoff`, under
/// `sign (a† b† + a b)`; the only non-zero elements connect `j` and `j+1`
/// with `sqrt(j+n+1) sqrt(j+1)`.
pub fn pair_chain_hamiltonian(n: usize, cutoff: usize, sign: f64) -> HermitianOperator {
    let mut h = HermitianOperator::zeros(cutoff + 1);
    for j in 0..cutoff {
        let elem = sign * ((j + n + 1) as f64).sqrt() * ((j + 1) as f64).sqrt();
        h.add_coupling(j + 1, j, C64::new(elem, 0.0));
    }
    h
}

/// Evolves a pair chain from `|n>_a |0>_b`; no truncation check.
pub fn evolve_pair_chain(n: usize, sign: f64, gamma_t: f64, cutoff: usize) -> Result<StateVector> {
    let mut start = vec![C64::zero(); cutoff + 1];
    start[0] = C64::new(1.0, 0.0);
    evolve_unitary(
        &pair_chain_hamiltonian(n, cutoff, sign),
        gamma_t,
        &StateVector::from_vec(start),
    )
}

/// The full four-mode Hamiltonian `a†V1 a†H2 − a†H1 a†V2 + h.c.` on the
/// truncated product basis, indexed `k * (cutoff + 1) + l`.
pub fn pdc_hamiltonian(n_input: usize, cutoff: usize) -> HermitianOperator {
    let side = cutoff + 1;
    let mut h = HermitianOperator::zeros(side * side);
    for k in 0..=cutoff {
        for l in 0..=cutoff {
            let s = PdcBasisState::from_pairs(n_input, k, l);
            let from = k * side + l;
            // a†V1 a†H2
            if k < cutoff {
                let elem = ((s.v1 + 1) as f64).sqrt() * ((s.h2 + 1) as f64).sqrt();
                h.add_coupling((k + 1) * side + l, from, C64::new(elem, 0.0));
            }
            // −a†H1 a†V2
            if l < cutoff {
                let elem = -((s.h1 + 1) as f64).sqrt() * ((s.v2 + 1) as f64).sqrt();
                h.add_coupling(k * side + l + 1, from, C64::new(elem, 0.0));
            }
        }
    }
    h
}

/// Direct exponentiation of the pair Hamiltonian on the truncated basis.
///
/// The `(V1, H2)` and `(H1, V2)` parts commute and act on separate modes, so
/// `exp(−iHt)` is the tensor product of the two chain propagators; each chain
/// is exponentiated by eigendecomposition.
pub fn pdc_evolve_numeric(n_input: usize, gamma_t: f64, cutoff: usize) -> Result<PdcState> {
    if !(gamma_t.is_finite() && gamma_t >= 0.0) {
        return Err(Error::Domain(format!(
            "gamma_t must be finite and >= 0, got {gamma_t}"
        )));
    }
    if cutoff < 1 {
        return Err(Error::Domain("cutoff must be at least 1".into()));
    }
    let chain_a = evolve_pair_chain(n_input, 1.0, gamma_t, cutoff)?;
    let chain_b = evolve_pair_chain(0, -1.0, gamma_t, cutoff)?;
    let (a, b) = (chain_a.amplitudes(), chain_b.amplitudes());
    let state = PdcState::from_fn(n_input, cutoff, None, |k, l| a[k] * b[l]);
    let leak = state.boundary_probability();
    if leak > BOUNDARY_TOL {
        return Err(Error::CutoffTooSmall { cutoff, leak });
    }
    Ok(state)
}

/// Component of a PDC state with exactly `M` photons in spatial mode 1.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedMComponent {
    pub n_input: usize,
    pub m: usize,
    /// Unnormalized amplitudes ordered by `l`, the number of `H1` photons.
    pub terms: Vec<(PdcBasisState, C64)>,
}

impl FixedMComponent {
    /// Probability of finding `M` photons in mode 1.
    pub fn weight(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Vec<(PdcBasisState, C64)>> {
        let w = self.weight();
        if w <= 0.0 {
            return Err(Error::Numerical(format!(
                "component with M = {} has zero weight",
                self.m
            )));
        }
        let s = w.sqrt();
        Ok(self.terms.iter().map(|&(b, a)| (b, a / s)).collect())
    }

    fn frequency(&self, count: impl Fn(&PdcBasisState) -> usize, photons: usize) -> Result<f64> {
        let w = self.weight();
        if w <= 0.0 {
            return Err(Error::Numerical(format!(
                "component with M = {} has zero weight",
                self.m
            )));
        }
        let right: f64 = self
            .terms
            .iter()
            .map(|(b, a)| a.norm_sqr() * count(b) as f64)
            .sum();
        Ok(right / (photons as f64 * w))
    }

    /// Relative frequency of `V` photons among the `M` clones.
    pub fn clone_fidelity(&self) -> Result<f64> {
        self.frequency(|b| b.v1, self.m)
    }

    /// Relative frequency of `H` photons among the `M − N` anti-clones.
    pub fn anticlone_fidelity(&self) -> Result<f64> {
        if self.m <= self.n_input {
            return Err(Error::NoAntiClones {
                n: self.n_input as u64,
                m: self.m as u64,
            });
        }
        self.frequency(|b| b.h2, self.m - self.n_input)
    }
}

pub fn project_fixed_m(state: &PdcState, m: usize) -> Result<FixedMComponent> {
    let n = state.n_input();
    let pairs = m.checked_sub(n).ok_or(Error::EmptyComponent {
        n: n as u64,
        m: m as u64,
    })?;
    if pairs > state.cutoff() {
        return Err(Error::Domain(format!(
            "M - N = {pairs} exceeds the state's cutoff {}",
            state.cutoff()
        )));
    }
    let terms = (0..=pairs)
        .map(|l| {
            let b = PdcBasisState::from_pairs(n, pairs - l, l);
            (b, state.amplitude(&b))
        })
        .collect();
    Ok(FixedMComponent {
        n_input: n,
        m,
        terms,
    })
}

/// Unnormalized fixed-`M` component in its real form,
/// `Σ_l (−1)^l √C(M−l, N) |M−l, l, l, M−N−l>`.
pub fn fixed_m_component_real(n: usize, m: usize) -> Result<Vec<(PdcBasisState, f64)>> {
    let pairs = m.checked_sub(n).ok_or(Error::EmptyComponent {
        n: n as u64,
        m: m as u64,
    })?;
    Ok((0..=pairs)
        .map(|l| {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            let b = PdcBasisState::from_pairs(n, pairs - l, l);
            (b, sign * ln_binomial(m - l, n).exp().sqrt())
        })
        .collect())
}

/// Per-`M` probability weights for `M = N ..= m_max`.
pub fn m_weights(state: &PdcState, m_max: usize) -> Result<Vec<(usize, f64)>> {
    (state.n_input()..=m_max)
        .map(|m| Ok((m, project_fixed_m(state, m)?.weight())))
        .collect()
}

fn big_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        BigUint::zero()
    } else {
        binomial(BigUint::from(n), BigUint::from(k))
    }
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact clone fidelity of the fixed-`M` component,
/// `Σ_l C(M−l, N)(M−l) / (M Σ_l C(M−l, N))`, cross-checked against
/// `(NM + N + M) / (M(N + 2))`.
pub fn clone_fidelity_pdc(n: u64, m: u64) -> Result<BigRational> {
    if n < 1 || m < n {
        return Err(Error::Domain(format!(
            "clone fidelity needs M >= N >= 1, got N={n}, M={m}"
        )));
    }
    let mut num = BigUint::zero();
    let mut den = BigUint::zero();
    for l in 0..=m - n {
        let c = big_binomial(m - l, n);
        num += &c * (m - l);
        den += c;
    }
    // Σ_{k=N}^{M} C(k, N) = C(M+1, N+1)
    if den != big_binomial(m + 1, n + 1) {
        return Err(Error::Numerical(format!(
            "binomial column sum fails for N={n}, M={m}"
        )));
    }
    let summed = ratio(num, den * m);
    let closed = crate::metrics::optimal_fidelity(n, m)?;
    if summed != closed {
        return Err(Error::Numerical(format!(
            "summed fidelity {summed} differs from closed form {closed} for N={n}, M={m}"
        )));
    }
    Ok(summed)
}

/// Exact fidelity of the anti-clones in mode 2,
/// `Σ_l C(M−l, N)(M−N−l) / ((M−N) Σ_l C(M−l, N))`.
pub fn anticlone_fidelity_pdc(n: u64, m: u64) -> Result<BigRational> {
    if n < 1 {
        return Err(Error::Domain("anti-clone fidelity needs N >= 1".into()));
    }
    if m <= n {
        return Err(Error::NoAntiClones { n, m });
    }
    let pairs = m - n;
    let mut num = BigUint::zero();
    let mut den = BigUint::zero();
    for l in 0..=pairs {
        let c = big_binomial(m - l, n);
        num += &c * (pairs - l);
        den += c;
    }
    Ok(ratio(num, den * pairs))
}

/// `(N + 1) / (N + 2)`
pub fn optimal_unot_fidelity(n: u64) -> BigRational {
    BigRational::new(BigInt::from(n + 1), BigInt::from(n + 2))
}
