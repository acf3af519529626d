//! Analytic output-field noise spectral density in the rotating-wave
//! approximation.
//!
//! The output quadrature `U_φ = (a_out e^{−iφ} + a_out† e^{iφ})/√2` is
//! normalized so that vacuum noise is ½. The total density splits into three
//! non-negative contributions, one per bath (cavity, magnon, mechanics).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::scalar::Real;
use crate::susceptibility::chi_set;

/// Vacuum (shot-noise) level of the symmetrized quadrature spectrum.
pub const VACUUM_NSD: f64 = 0.5;

/// One point of the output noise spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsdPoint<T> {
    pub omega: T,
    /// Quadrature angle reduced to [0, π).
    pub phi: T,
    pub s_a: T,
    pub s_m: T,
    pub s_b: T,
    pub s_total: T,
    /// −10 log10(s_total / ½); positive means squeezed below vacuum.
    pub squeezing_db: T,
}

impl<T: Real> NsdPoint<T> {
    pub fn new(omega: T, phi: T, s_a: T, s_m: T, s_b: T) -> Self {
        let s_total = s_a + s_m + s_b;
        Self {
            omega,
            phi,
            s_a,
            s_m,
            s_b,
            s_total,
            squeezing_db: db_unchecked(s_total),
        }
    }
}

/// Frequency-resolved spectrum together with the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpectrum<T> {
    pub params: SystemParams<T>,
    pub points: Vec<NsdPoint<T>>,
    /// Index of the grid point with the smallest total noise.
    pub argmin: usize,
}

impl<T: Real> NoiseSpectrum<T> {
    pub fn best(&self) -> &NsdPoint<T> {
        &self.points[self.argmin]
    }
}

/// Reduces a quadrature angle into [0, π); the spectrum has period π in φ.
pub fn reduce_phi<T: Real>(phi: T) -> T {
    let pi = T::pi();
    let r = phi - (phi / pi).floor() * pi;
    if r >= pi {
        r - pi
    } else {
        r
    }
}

fn db_unchecked<T: Real>(s: T) -> T {
    -T::lit(10.0) * (s / T::lit(VACUUM_NSD)).log10()
}

/// Degree of squeezing in dB relative to the vacuum level.
pub fn squeezing_db<T: Real>(s_total: T) -> Result<T> {
    if !(s_total > T::zero()) || !s_total.is_finite_value() {
        return Err(Error::Domain(format!(
            "noise density must be positive and finite, got {:e}",
            s_total.to_f64_lossy()
        )));
    }
    Ok(db_unchecked(s_total))
}

/// Per-bath decomposition of the output quadrature spectrum at `omega`.
pub fn nsd_components<T: Real>(params: &SystemParams<T>, omega: T, phi: T) -> NsdPoint<T> {
    let phi = reduce_phi(phi);
    let chi = chi_set(params, omega);
    let th = params.thermal();
    let half = T::lit(0.5);

    let reflect = chi.chi_a_eff * params.kappa_a - T::one();
    let s_a = reflect.norm_sqr() * (th.n_a + half);

    let via_magnon = (chi.chi_a_eff * chi.chi_mb * params.g).norm_sqr();
    let s_m = params.kappa_a * params.kappa_m * via_magnon * (th.n_m + half);

    let (gm, gp) = (params.g_minus, params.g_plus);
    let two = T::lit(2.0);
    let drive_mix = gm * gm + gp * gp + two * gm * gp * (two * phi).cos();
    let s_b = params.kappa_a
        * params.gamma_b
        * via_magnon
        * chi.chi_b.norm_sqr()
        * drive_mix
        * (th.n_b + half);

    NsdPoint::new(omega, phi, s_a, s_m, s_b)
}

/// Closed form of the spectrum at ω = 0 and φ = π/2.
pub fn nsd_zero_freq<T: Real>(params: &SystemParams<T>) -> NsdPoint<T> {
    let th = params.thermal();
    let half = T::lit(0.5);
    let (ka, km, gb, g) = (params.kappa_a, params.kappa_m, params.gamma_b, params.g);
    let g2 = g * g;
    let four = T::lit(4.0);
    let xi = (four * params.g_tilde_sq() * ka + four * g2 * gb + ka * gb * km).recip();

    let reflect = T::one() - T::lit(8.0) * g2 * gb * xi;
    let s_a = reflect * reflect * (th.n_a + half);
    let s_m = T::lit(16.0) * ka * km * g2 * gb * gb * xi * xi * (th.n_m + half);
    let dg = params.g_minus - params.g_plus;
    let s_b = T::lit(64.0) * ka * gb * g2 * xi * xi * dg * dg * (th.n_b + half);
    NsdPoint::new(T::zero(), T::frac_pi_2(), s_a, s_m, s_b)
}

/// Evaluates [`nsd_components`] over a strictly increasing grid.
pub fn spectrum<T: Real>(
    params: &SystemParams<T>,
    omega_grid: &[T],
    phi: T,
) -> Result<NoiseSpectrum<T>> {
    check_grid(omega_grid)?;
    let points: Vec<NsdPoint<T>> = omega_grid
        .par_iter()
        .map(|&w| nsd_components(params, w, phi))
        .collect();
    let argmin = argmin_by_total(&points);
    Ok(NoiseSpectrum {
        params: *params,
        points,
        argmin,
    })
}

pub(crate) fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.iter().any(|w| !w.is_finite_value()) {
        return Err(Error::Domain(
            "frequency grid contains non-finite values".into(),
        ));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(
            "frequency grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

pub(crate) fn argmin_by_total<T: Real>(points: &[NsdPoint<T>]) -> usize {
    points
        .iter()
        .enumerate()
        .fold((0, None::<T>), |(best_i, best), (i, p)| match best {
            Some(b) if !(p.s_total < b) => (best_i, Some(b)),
            _ => (i, Some(p.s_total)),
        })
        .0
}

/// Uniform grid of `n` points on [lo, hi].
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::lit((n - 1) as f64);
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        lo + step * T::lit(i as f64)
                    }
                })
                .collect()
        }
    }
}
