//! Natural, composite and effective susceptibilities of the three modes in
//! the rotating frame.

use crate::params::SystemParams;
use crate::scalar::{cplx, Complex, Real};

/// χ[ω] = (κ/2 − iω)⁻¹.
#[inline]
pub fn natural_chi<T: Real>(kappa: T, omega: T) -> Complex<T> {
    cplx(kappa / T::lit(2.0), -omega).inv()
}

/// Every susceptibility entering the rotating-wave solution at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSet<T> {
    pub chi_a: Complex<T>,
    pub chi_b: Complex<T>,
    pub chi_m: Complex<T>,
    /// (χ_m⁻¹ + G̃² χ_b)⁻¹: magnon dressed by the mechanics.
    pub chi_mb: Complex<T>,
    /// (χ_m⁻¹ + g² χ_a)⁻¹: magnon dressed by the cavity.
    pub chi_ma: Complex<T>,
    pub chi_a_eff: Complex<T>,
    pub chi_b_eff: Complex<T>,
    pub chi_m_eff: Complex<T>,
    /// G̃² = G−² − G+², kept signed so the G+ > G− region can be probed.
    pub g_tilde_sq: T,
    pub omega: T,
}

impl<T: Real> ChiSet<T> {
    /// G̃ when it is real, `None` for a blue-dominated drive.
    pub fn g_tilde(&self) -> Option<T> {
        (self.g_tilde_sq >= T::zero()).then(|| self.g_tilde_sq.sqrt())
    }
}

pub fn chi_set<T: Real>(params: &SystemParams<T>, omega: T) -> ChiSet<T> {
    let chi_a = natural_chi(params.kappa_a, omega);
    let chi_b = natural_chi(params.gamma_b, omega);
    let chi_m = natural_chi(params.kappa_m, omega);
    let g2 = params.g * params.g;
    let gt2 = params.g_tilde_sq();

    let inv_m = chi_m.inv();
    let chi_mb = (inv_m + chi_b * gt2).inv();
    let chi_ma = (inv_m + chi_a * g2).inv();
    ChiSet {
        chi_a,
        chi_b,
        chi_m,
        chi_mb,
        chi_ma,
        chi_a_eff: (chi_a.inv() + chi_mb * g2).inv(),
        chi_b_eff: (chi_b.inv() + chi_ma * gt2).inv(),
        chi_m_eff: (inv_m + chi_a * g2 + chi_b * gt2).inv(),
        g_tilde_sq: gt2,
        omega,
    }
}
