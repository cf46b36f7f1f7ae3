//! Polarization rotations and the universality checks built on them.
//!
//! A rotation maps `a†1 -> a a†1 + b a†2` and `a†2 -> −b̄ a†1 + ā a†2`. On
//! `n` photons it acts through the `(n+1)`-dimensional matrix returned by
//! [`fock_rotation_matrix`]. Both cloners commute with a common rotation of
//! photons and excited levels and start from rotation-invariant media, so
//! rotating the input and measuring along the rotated polarization must
//! reproduce the canonical statistics.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::atoms::{
    simulate_distributions, AtomsSimConfig, FidelityCurve, PhotonCountDistribution,
    PreparedEnsemble, PropagatorCache, SectorBlocks,
};
use crate::error::{Error, Result};
use crate::hilbert::{enumerate_sector, AtomConfig, FockBasisState, StateVector};
use crate::pdc::{auto_cutoff, evolve_pair_chain, gamma_from_time, PdcBasisState, BOUNDARY_TOL};

/// Allowed deviation from `|a|² + |b|² = 1`.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Seed used for the reproducible random rotations of the verification suite.
pub const DEFAULT_SEED: u64 = 0x5eed_c10e;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Su2Rotation {
    a: C64,
    b: C64,
}

impl Su2Rotation {
    pub fn new(a: C64, b: C64) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > UNITARITY_TOL || norm.is_nan() {
            return Err(Error::Domain(format!(
                "|a|^2 + |b|^2 = {norm}, not a unitary rotation"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn identity() -> Self {
        Self {
            a: C64::new(1.0, 0.0),
            b: C64::zero(),
        }
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> C64 {
        self.b
    }

    /// Columns are the images of `a†1` and `a†2`.
    pub fn matrix(&self) -> [[C64; 2]; 2] {
        [[self.a, -self.b.conj()], [self.b, self.a.conj()]]
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let (u, v) = (self.matrix(), other.matrix());
        Self {
            a: u[0][0] * v[0][0] + u[0][1] * v[1][0],
            b: u[1][0] * v[0][0] + u[1][1] * v[1][0],
        }
    }

    /// Haar-random rotation: `|a|²` uniform on `[0, 1]`, independent phases.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u: f64 = rng.random();
        let phi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        let chi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        let a = C64::from_polar(u.sqrt(), phi);
        let b = C64::from_polar((1.0 - u).sqrt(), chi);
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        Self { a: a / n, b: b / n }
    }

    pub fn seeded(seed: u64, count: usize) -> Vec<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| Self::random(&mut rng)).collect()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Action of `rot` on the `n`-photon space, indexed by the mode-1 photon
/// number: column `k` holds `U|k, n−k>` in the `|p, n−p>` basis.
pub fn fock_rotation_matrix(rot: &Su2Rotation, n: usize) -> DMatrix<C64> {
    let (a, b) = (rot.a, rot.b);
    let (c, d) = (-rot.b.conj(), rot.a.conj());
    DMatrix::from_fn(n + 1, n + 1, |p, k| {
        let l = n - k;
        let mut acc = C64::zero();
        // i creations of a†1 from the k rotated mode-1 photons, j from the l
        for i in 0..=k.min(p) {
            let j = p - i;
            if j > l {
                continue;
            }
            acc += a.powu(i as u32)
                * b.powu((k - i) as u32)
                * c.powu(j as u32)
                * d.powu((l - j) as u32)
                * (binomial(k, i) * binomial(l, j));
        }
        acc * (factorial(p) * factorial(n - p) / (factorial(k) * factorial(l))).sqrt()
    })
}

/// Photon amplitudes of an atoms-plus-field state, keyed by basis state.
pub type SparseState = BTreeMap<FockBasisState, C64>;

pub fn to_sparse(blocks: &SectorBlocks) -> SparseState {
    let mut out = SparseState::new();
    for (sector, state) in &blocks.0 {
        for (b, &amp) in sector.basis().iter().zip(state.amplitudes().iter()) {
            *out.entry(b.clone()).or_insert(C64::zero()) += amp;
        }
    }
    out
}

/// Applies `rot` to the two field modes, leaving the atoms untouched.
pub fn rotate_photons(state: &SparseState, rot: &Su2Rotation) -> SparseState {
    let mut groups: BTreeMap<(AtomConfig, usize), Vec<C64>> = BTreeMap::new();
    for (b, &amp) in state {
        let n = b.k + b.l;
        groups
            .entry((b.atoms.clone(), n))
            .or_insert_with(|| vec![C64::zero(); n + 1])[b.k] += amp;
    }
    let mut cache: BTreeMap<usize, DMatrix<C64>> = BTreeMap::new();
    let mut out = SparseState::new();
    for ((atoms, n), amps) in groups {
        let d = cache
            .entry(n)
            .or_insert_with(|| fock_rotation_matrix(rot, n));
        let rotated = &*d * nalgebra::DVector::from_vec(amps);
        for (p, &amp) in rotated.iter().enumerate() {
            if amp != C64::zero() {
                out.insert(FockBasisState::new(atoms.clone(), p, n - p), amp);
            }
        }
    }
    out
}

type SectorKey = (usize, usize, usize);

/// Regroups a sparse state into sector blocks.
pub fn to_blocks(state: &SparseState) -> SectorBlocks {
    let mut by_sector: BTreeMap<SectorKey, Vec<(&FockBasisState, C64)>> = BTreeMap::new();
    for (b, &amp) in state {
        by_sector
            .entry((b.atoms.n_atoms(), b.charge1(), b.charge2()))
            .or_default()
            .push((b, amp));
    }
    SectorBlocks(
        by_sector
            .into_iter()
            .map(|((n, n1, n2), entries)| {
                let sector = std::sync::Arc::new(enumerate_sector(n, n1, n2));
                let mut amps = vec![C64::zero(); sector.dim()];
                for (b, amp) in entries {
                    amps[sector.index_of(b).expect("charges select the sector")] = amp;
                }
                (sector, StateVector::from_vec(amps))
            })
            .collect(),
    )
}

/// The atomic ensemble with the incoming photon `a a†1|0> + b a†2|0>`.
///
/// Member `m` has `m` atoms in `e1`; its two photon components sit in
/// sectors `(m+1, N−m)` and `(m, N−m+1)`.
pub fn rotate_initial_photon(
    rot: &Su2Rotation,
    n_atoms: usize,
) -> Result<Vec<(f64, SectorBlocks)>> {
    let canonical = crate::atoms::initial_ensemble(n_atoms)?;
    canonical
        .iter()
        .enumerate()
        .map(|(m, member)| {
            let atoms = AtomConfig::excited(n_atoms, m);
            let mut state = SparseState::new();
            state.insert(FockBasisState::new(atoms, 1, 0), C64::new(1.0, 0.0));
            let rotated: SparseState = rotate_photons(&state, rot)
                .into_iter()
                .filter(|(_, a)| *a != C64::zero())
                .collect();
            Ok((member.weight, to_blocks(&rotated)))
        })
        .collect()
}

/// `p(k, l)` with `k` counted along the rotated input polarization.
pub fn rotated_distribution(
    members: &[(f64, SectorBlocks)],
    rot: &Su2Rotation,
) -> Result<PhotonCountDistribution> {
    let back = rot.inverse();
    let mut p = PhotonCountDistribution::default();
    for (w, blocks) in members {
        for (b, amp) in rotate_photons(&to_sparse(blocks), &back) {
            p.add(b.photons(), w * amp.norm_sqr());
        }
    }
    p.check_normalized()?;
    Ok(p)
}

/// Time series for the rotated input, measured along the rotated polarization.
pub fn simulate_rotated(rot: &Su2Rotation, config: &AtomsSimConfig) -> Result<FidelityCurve> {
    let members = rotate_initial_photon(rot, config.n_atoms)?;
    let mut cache = PropagatorCache::new();
    let prepared = PreparedEnsemble::new(&members, &mut cache)?;
    let dists = config
        .time_grid()
        .into_iter()
        .map(|t| Ok((t, rotated_distribution(&prepared.states_at(t), rot)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FidelityCurve::from_distributions(
        dists.iter().map(|(t, p)| (*t, p)),
    ))
}

/// Largest deviation of each column between a rotated and a canonical run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct UniversalityReport {
    pub f_clones: f64,
    pub f_opt: f64,
    pub f_rand: f64,
    pub n_all: f64,
    pub n_right: f64,
    /// Largest deviation over the individual `p(k, l)`.
    pub distribution: f64,
}

impl UniversalityReport {
    pub fn max_fidelity_deviation(&self) -> f64 {
        self.f_clones.max(self.f_opt).max(self.f_rand)
    }

    pub fn max_deviation(&self) -> f64 {
        self.max_fidelity_deviation()
            .max(self.n_all)
            .max(self.n_right)
            .max(self.distribution)
    }
}

fn opt_dev(a: Option<f64>, b: Option<f64>) -> f64 {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    }
}

fn dist_dev(p: &PhotonCountDistribution, q: &PhotonCountDistribution) -> f64 {
    p.iter()
        .chain(q.iter())
        .map(|((k, l), _)| (p.get(k, l) - q.get(k, l)).abs())
        .fold(0.0, f64::max)
}

/// Runs the canonical and the rotated cloner over the same grid and compares.
pub fn universality_check(
    rot: &Su2Rotation,
    config: &AtomsSimConfig,
) -> Result<UniversalityReport> {
    let canonical = simulate_distributions(config)?;
    let members = rotate_initial_photon(rot, config.n_atoms)?;
    let mut cache = PropagatorCache::new();
    let prepared = PreparedEnsemble::new(&members, &mut cache)?;
    let mut report = UniversalityReport::default();
    let mut rotated = Vec::with_capacity(canonical.len());
    for (t, p_can) in &canonical {
        let p_rot = rotated_distribution(&prepared.states_at(*t), rot)?;
        report.distribution = report.distribution.max(dist_dev(p_can, &p_rot));
        rotated.push((*t, p_rot));
    }
    let can_curve = FidelityCurve::from_distributions(canonical.iter().map(|(t, p)| (*t, p)));
    let rot_curve = FidelityCurve::from_distributions(rotated.iter().map(|(t, p)| (*t, p)));
    for (c, r) in can_curve.rows.iter().zip(&rot_curve.rows) {
        report.f_clones = report.f_clones.max(opt_dev(c.f_clones, r.f_clones));
        report.f_opt = report.f_opt.max(opt_dev(c.f_opt, r.f_opt));
        report.f_rand = report.f_rand.max(opt_dev(c.f_rand, r.f_rand));
        report.n_all = report.n_all.max((c.n_all - r.n_all).abs());
        report.n_right = report.n_right.max((c.n_right - r.n_right).abs());
    }
    Ok(report)
}

/// Four-mode PDC amplitudes keyed by `(V1, H1, V2, H2)`.
pub type PdcSparseState = BTreeMap<PdcBasisState, C64>;

/// Applies `rot` to the `(V, H)` polarization of both spatial modes.
pub fn rotate_pdc_polarization(state: &PdcSparseState, rot: &Su2Rotation) -> PdcSparseState {
    let mut cache: BTreeMap<usize, DMatrix<C64>> = BTreeMap::new();
    let mut rotate_mode = |state: &PdcSparseState, mode1: bool| {
        let mut groups: BTreeMap<(usize, usize, usize), Vec<C64>> = BTreeMap::new();
        for (s, &amp) in state {
            let (v, h, ov, oh) = if mode1 {
                (s.v1, s.h1, s.v2, s.h2)
            } else {
                (s.v2, s.h2, s.v1, s.h1)
            };
            let n = v + h;
            groups
                .entry((ov, oh, n))
                .or_insert_with(|| vec![C64::zero(); n + 1])[v] += amp;
        }
        let mut out = PdcSparseState::new();
        for ((ov, oh, n), amps) in groups {
            let d = cache
                .entry(n)
                .or_insert_with(|| fock_rotation_matrix(rot, n));
            let rotated = &*d * nalgebra::DVector::from_vec(amps);
            for (v, &amp) in rotated.iter().enumerate() {
                let s = if mode1 {
                    PdcBasisState::new(v, n - v, ov, oh)
                } else {
                    PdcBasisState::new(ov, oh, v, n - v)
                };
                out.insert(s, amp);
            }
        }
        out
    };
    let once = rotate_mode(state, true);
    rotate_mode(&once, false)
}

/// Evolves `N` photons polarized along `a V + b H` in mode 1.
///
/// Each `|v>_V1 |h>_H1` component of the input evolves as the product of a
/// `(V1, H2)` chain seeded with `v` photons and an `(H1, V2)` chain seeded with
/// `h`, which is exact because the two halves of the Hamiltonian commute.
pub fn pdc_evolve_rotated(
    rot: &Su2Rotation,
    n_input: usize,
    gamma_t: f64,
) -> Result<PdcSparseState> {
    let cutoff = auto_cutoff(n_input, gamma_from_time(gamma_t)?)?;
    let input = fock_rotation_matrix(rot, n_input);
    let mut out = PdcSparseState::new();
    for v in 0..=n_input {
        let c = input[(v, n_input)];
        if c == C64::zero() {
            continue;
        }
        let h = n_input - v;
        let chain_a = evolve_pair_chain(v, 1.0, gamma_t, cutoff)?;
        let chain_b = evolve_pair_chain(h, -1.0, gamma_t, cutoff)?;
        for chain in [&chain_a, &chain_b] {
            let leak = chain.amplitudes()[cutoff].norm_sqr();
            if leak > BOUNDARY_TOL {
                return Err(Error::CutoffTooSmall { cutoff, leak });
            }
        }
        for (k, &x) in chain_a.amplitudes().iter().enumerate() {
            for (l, &y) in chain_b.amplitudes().iter().enumerate() {
                *out.entry(PdcBasisState::new(v + k, h + l, l, k))
                    .or_insert(C64::zero()) += c * x * y;
            }
        }
    }
    Ok(out)
}

/// Clone and anti-clone fidelities of the fixed-`M` component for a rotated
/// input, measured along the rotated polarization.
pub fn pdc_rotated_fidelities(
    rot: &Su2Rotation,
    n_input: usize,
    m: usize,
    gamma_t: f64,
) -> Result<(f64, Option<f64>)> {
    if m < n_input {
        return Err(Error::EmptyComponent {
            n: n_input as u64,
            m: m as u64,
        });
    }
    let state =
        rotate_pdc_polarization(&pdc_evolve_rotated(rot, n_input, gamma_t)?, &rot.inverse());
    let (mut weight, mut right, mut flipped) = (0.0, 0.0, 0.0);
    for (s, amp) in state.iter().filter(|(s, _)| s.mode1() == m) {
        let p = amp.norm_sqr();
        weight += p;
        right += p * s.v1 as f64;
        flipped += p * s.h2 as f64;
    }
    if weight <= 0.0 {
        return Err(Error::Numerical(format!(
            "component with M = {m} has zero weight"
        )));
    }
    let clone = right / (m as f64 * weight);
    let anti = (m > n_input).then(|| flipped / ((m - n_input) as f64 * weight));
    Ok((clone, anti))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::initial_ensemble;
    use crate::pdc::{anticlone_fidelity_pdc, clone_fidelity_pdc};
    use num_traits::ToPrimitive;

    fn rot(a: (f64, f64), b: (f64, f64)) -> Su2Rotation {
        Su2Rotation::new(C64::new(a.0, a.1), C64::new(b.0, b.1)).unwrap()
    }

    #[test]
    fn rejects_non_unitary() {
        assert!(Su2Rotation::new(C64::new(1.0, 0.0), C64::new(0.1, 0.0)).is_err());
    }

    #[test]
    fn fock_matrices_are_unitary() {
        for r in Su2Rotation::seeded(7, 4) {
            for n in 0..=7 {
                let d = fock_rotation_matrix(&r, n);
                let err = (d.adjoint() * &d - DMatrix::identity(n + 1, n + 1)).norm();
                assert!(err < 1e-12, "n={n} err={err}");
            }
        }
    }

    #[test]
    fn fock_matrices_compose() {
        let rs = Su2Rotation::seeded(11, 2);
        for n in 0..=5 {
            let lhs = fock_rotation_matrix(&rs[0].compose(&rs[1]), n);
            let rhs = fock_rotation_matrix(&rs[0], n) * fock_rotation_matrix(&rs[1], n);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_gives_canonical_ensemble() {
        let rotated = rotate_initial_photon(&Su2Rotation::identity(), 3).unwrap();
        let canonical = initial_ensemble(3).unwrap();
        for ((w, blocks), member) in rotated.iter().zip(&canonical) {
            assert_eq!(*w, member.weight);
            assert_eq!(blocks.0.len(), 1);
            assert_eq!(blocks.0[0].0.charges(), member.sector.charges());
            assert_eq!(blocks.0[0].1, member.state);
        }
    }

    #[test]
    fn rotation_then_inverse_is_canonical() {
        for r in Su2Rotation::seeded(3, 5) {
            for (m, (_, blocks)) in rotate_initial_photon(&r, 3).unwrap().iter().enumerate() {
                let back = rotate_photons(&to_sparse(blocks), &r.inverse());
                for (b, amp) in back {
                    let expected = if b == FockBasisState::new(AtomConfig::excited(3, m), 1, 0) {
                        1.0
                    } else {
                        0.0
                    };
                    assert!((amp - C64::new(expected, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mode_two_input_swaps_counts() {
        let flip = rot((0.0, 0.0), (1.0, 0.0));
        let config = AtomsSimConfig::new(2, 1.0, 4).unwrap();
        let members = rotate_initial_photon(&flip, 2).unwrap();
        let mut cache = PropagatorCache::new();
        let prepared = PreparedEnsemble::new(&members, &mut cache).unwrap();
        for (t, p_can) in simulate_distributions(&config).unwrap() {
            // raw counts in the unrotated modes
            let mut raw = PhotonCountDistribution::default();
            for (w, blocks) in prepared.states_at(t) {
                for (sector, state) in &blocks.0 {
                    raw.accumulate(w, sector, state);
                }
            }
            let swapped = p_can.swapped();
            for ((k, l), w) in raw.iter() {
                assert!((w - swapped.get(k, l)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn equal_superposition_is_universal() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let config = AtomsSimConfig::new(2, 2.0, 20).unwrap();
        let report = universality_check(&rot((s, 0.0), (s, 0.0)), &config).unwrap();
        assert!(report.f_clones < 1e-9, "{report:?}");
        assert!(report.max_deviation() < 1e-9, "{report:?}");
    }

    #[test]
    fn identity_deviation_is_zero() {
        let config = AtomsSimConfig::new(2, 1.0, 10).unwrap();
        let report = universality_check(&Su2Rotation::identity(), &config).unwrap();
        assert_eq!(report.max_deviation(), 0.0);
    }

    #[test]
    fn pdc_rotation_invariance() {
        for r in Su2Rotation::seeded(DEFAULT_SEED, 3) {
            for n in 1..=2usize {
                for m in n..=n + 2 {
                    let (clone, anti) = pdc_rotated_fidelities(&r, n, m, 0.4).unwrap();
                    let exact = clone_fidelity_pdc(n as u64, m as u64)
                        .unwrap()
                        .to_f64()
                        .unwrap();
                    assert!(
                        (clone - exact).abs() < 1e-12,
                        "N={n} M={m}: {clone} vs {exact}"
                    );
                    if let Some(anti) = anti {
                        let exact = anticlone_fidelity_pdc(n as u64, m as u64)
                            .unwrap()
                            .to_f64()
                            .unwrap();
                        assert!((anti - exact).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
