//! Fidelity functionals over a photon-count distribution `p(k, l)`.
//!
//! All three averages are taken over events with at least two photons, i.e.
//! with `p'(k, l) = p(k, l) / (1 - p(1,0) - p(0,1))`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::atoms::PhotonCountDistribution;
use crate::error::{Error, Result};

/// Below this the multi-photon weight is treated as absent.
pub const DENOMINATOR_GUARD: f64 = 1e-12;

/// `1 - p(1,0) - p(0,1)`
pub fn renorm_denominator(p: &PhotonCountDistribution) -> f64 {
    1.0 - p.get(1, 0) - p.get(0, 1)
}

fn checked_denominator(p: &PhotonCountDistribution) -> Result<f64> {
    let d = renorm_denominator(p);
    if d <= DENOMINATOR_GUARD {
        Err(Error::UndefinedMetric { denominator: d })
    } else {
        Ok(d)
    }
}

/// Weighted mean of `g(k, l)` over the multi-photon events.
fn multi_photon_average(
    p: &PhotonCountDistribution,
    g: impl Fn(usize, usize) -> f64,
) -> Result<f64> {
    let d = checked_denominator(p)?;
    let sum: f64 = p
        .iter()
        .filter(|&((k, l), _)| k + l >= 2)
        .map(|((k, l), w)| w * g(k, l))
        .sum();
    Ok(sum / d)
}

/// Average relative frequency of right-polarized photons.
pub fn f_clones(p: &PhotonCountDistribution) -> Result<f64> {
    multi_photon_average(p, |k, l| k as f64 / (k + l) as f64)
}

/// Optimal `1 -> n` cloner fidelity `(2n+1)/(3n)` averaged over `p'(n)`.
pub fn f_opt(p: &PhotonCountDistribution) -> Result<f64> {
    multi_photon_average(p, |k, l| {
        let n = (k + l) as f64;
        (2.0 * n + 1.0) / (3.0 * n)
    })
}

/// Random-emission fidelity `(n+1)/(2n)` averaged over `p'(n)`.
pub fn f_rand(p: &PhotonCountDistribution) -> Result<f64> {
    multi_photon_average(p, |k, l| {
        let n = (k + l) as f64;
        (n + 1.0) / (2.0 * n)
    })
}

/// `(N_all, N_right)` over the whole distribution, without renormalization.
pub fn mean_photon_numbers(p: &PhotonCountDistribution) -> (f64, f64) {
    p.iter().fold((0.0, 0.0), |(all, right), ((k, l), w)| {
        (all + w * (k + l) as f64, right + w * k as f64)
    })
}

/// Optimal `N -> M` universal cloning fidelity `(NM + N + M) / (M (N + 2))`.
pub fn optimal_fidelity(n: u64, m: u64) -> Result<BigRational> {
    if n < 1 || m < n {
        return Err(Error::Domain(format!(
            "optimal fidelity needs M >= N >= 1, got N={n}, M={m}"
        )));
    }
    let (n, m) = (BigInt::from(n), BigInt::from(m));
    Ok(BigRational::new(&n * &m + &n + &m, &m * (&n + 2)))
}

/// All five metrics at one time point. Fidelities are `None` when there are
/// no multi-photon events.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricReport {
    pub f_clones: Option<f64>,
    pub f_opt: Option<f64>,
    pub f_rand: Option<f64>,
    pub n_all: f64,
    pub n_right: f64,
    pub renorm_denominator: f64,
}

impl MetricReport {
    pub fn from_distribution(p: &PhotonCountDistribution) -> Self {
        let (n_all, n_right) = mean_photon_numbers(p);
        Self {
            f_clones: f_clones(p).ok(),
            f_opt: f_opt(p).ok(),
            f_rand: f_rand(p).ok(),
            n_all,
            n_right,
            renorm_denominator: renorm_denominator(p),
        }
    }
}
