//! Classical mean-field layer: drive Rabi frequencies to magnon amplitudes
//! and effective magnomechanical couplings, and back.

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::scalar::{cplx, Complex, Real};

/// Which mechanical sideband a drive tone sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sideband {
    /// ω+ = ω_m + ω_b (blue, two-mode squeezing).
    Plus,
    /// ω− = ω_m − ω_b (red, beam splitter).
    Minus,
}

impl Sideband {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Sideband::Plus => T::one(),
            Sideband::Minus => -T::one(),
        }
    }
}

impl std::str::FromStr for Sideband {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" | "blue" => Ok(Sideband::Plus),
            "minus" | "-" | "red" => Ok(Sideband::Minus),
            other => Err(Error::Domain(format!("unknown sideband {other:?}"))),
        }
    }
}

/// Two-tone drive description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec<T> {
    pub omega_plus: T,
    pub omega_minus: T,
    pub rabi_plus: Complex<T>,
    pub rabi_minus: Complex<T>,
    pub g0: T,
}

impl<T: Real> DriveSpec<T> {
    /// Places both tones exactly on the sidebands ω_m ± ω_b.
    pub fn on_sidebands(
        params: &SystemParams<T>,
        rabi_plus: Complex<T>,
        rabi_minus: Complex<T>,
        g0: T,
    ) -> Result<Self> {
        let spec = Self {
            omega_plus: params.omega_m + params.omega_b,
            omega_minus: params.omega_m - params.omega_b,
            rabi_plus,
            rabi_minus,
            g0,
        };
        spec.check(params)?;
        Ok(spec)
    }

    pub fn tone(&self, sideband: Sideband) -> T {
        match sideband {
            Sideband::Plus => self.omega_plus,
            Sideband::Minus => self.omega_minus,
        }
    }

    pub fn rabi(&self, sideband: Sideband) -> Complex<T> {
        match sideband {
            Sideband::Plus => self.rabi_plus,
            Sideband::Minus => self.rabi_minus,
        }
    }

    /// Checks that the tones straddle ω_m at ±ω_b and that G_0 > 0.
    pub fn check(&self, params: &SystemParams<T>) -> Result<()> {
        if !(self.g0 > T::zero()) {
            return Err(Error::Domain("bare coupling g0 must be positive".into()));
        }
        let tol = T::lit(1e3) * T::EPSILON * params.omega_m;
        let two = T::lit(2.0);
        let split = self.omega_plus - self.omega_minus - two * params.omega_b;
        let centre = (self.omega_plus + self.omega_minus) / two - params.omega_m;
        if split.abs() > tol || centre.abs() > tol {
            return Err(Error::Domain(
                "drive tones must sit at omega_m +/- omega_b".into(),
            ));
        }
        Ok(())
    }
}

/// Denominator of the mean-amplitude relation for a tone at `omega_drive`:
/// `ω − ω_m + iκ_m/2 − g²/(ω − ω_a + iκ_a/2)`.
pub fn response_denominator<T: Real>(params: &SystemParams<T>, omega_drive: T) -> Complex<T> {
    let half = T::lit(0.5);
    let magnon = cplx(omega_drive - params.omega_m, half * params.kappa_m);
    let cavity = cplx(omega_drive - params.omega_a, half * params.kappa_a);
    magnon - cavity.inv() * (params.g * params.g)
}

/// Mean magnon amplitude m± driven by the tone on `sideband`.
pub fn mean_amplitude<T: Real>(
    params: &SystemParams<T>,
    drive: &DriveSpec<T>,
    sideband: Sideband,
) -> Result<Complex<T>> {
    drive.check(params)?;
    let denom = response_denominator(params, drive.tone(sideband));
    Ok(drive.rabi(sideband) / denom)
}

/// Rabi frequency Ω± producing a real, non-negative effective coupling
/// `G_0 · m± = g_target` with the tone exactly on its sideband.
pub fn calibrate_rabi<T: Real>(
    params: &SystemParams<T>,
    g_target: T,
    g0: T,
    sideband: Sideband,
) -> Result<Complex<T>> {
    if !(g_target >= T::zero()) || !g_target.is_finite_value() {
        return Err(Error::Domain(format!(
            "target coupling must be non-negative, got {:e}",
            g_target.to_f64_lossy()
        )));
    }
    if !(g0 > T::zero()) {
        return Err(Error::Domain("bare coupling g0 must be positive".into()));
    }
    let tone = params.omega_m + sideband.sign::<T>() * params.omega_b;
    Ok(response_denominator(params, tone) * (g_target / g0))
}

/// Magnitude and phase (radians) of a complex Rabi frequency.
pub fn polar<T: Real>(z: Complex<T>) -> (T, T) {
    (z.norm_sqr().sqrt(), z.im.atan2(z.re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::RawParams;

    fn baseline() -> SystemParams<f64> {
        RawParams::baseline().validate().unwrap()
    }

    #[test]
    fn uncoupled_plus_amplitude() {
        let mut raw = RawParams::<f64>::baseline();
        raw.g = 0.0;
        let p = raw.validate().unwrap();
        let rabi = cplx(2.0e7, -3.0e6);
        let d = DriveSpec::on_sidebands(&p, rabi, cplx(0.0, 0.0), 1.0).unwrap();
        let m = mean_amplitude(&p, &d, Sideband::Plus).unwrap();
        let expected = rabi / cplx(p.omega_b, 0.5 * p.kappa_m);
        assert!((m - expected).norm() <= 1e-12 * expected.norm());
    }

    #[test]
    fn zero_drive_zero_amplitude() {
        let p = baseline();
        let d = DriveSpec::on_sidebands(&p, cplx(0.0, 0.0), cplx(0.0, 0.0), 1.0).unwrap();
        assert_eq!(
            mean_amplitude(&p, &d, Sideband::Minus).unwrap(),
            cplx(0.0, 0.0)
        );
        assert_eq!(
            mean_amplitude(&p, &d, Sideband::Plus).unwrap(),
            cplx(0.0, 0.0)
        );
    }

    #[test]
    fn baseline_minus_amplitude_matches_hand_evaluation() {
        // Direct evaluation with the resonance condition substituted by hand:
        // ω− − ω_m = −ω_b, ω− − ω_a = −ω_b.
        let p = baseline();
        let omega = 1.0e9;
        let d = DriveSpec::on_sidebands(&p, cplx(0.0, 0.0), cplx(omega, 0.0), 1.0).unwrap();
        let m = mean_amplitude(&p, &d, Sideband::Minus).unwrap();

        let wb = p.omega_b;
        let (ka, km, g) = (p.kappa_a, p.kappa_m, p.g);
        // 1/(−ω_b + iκ_a/2) = (−ω_b − iκ_a/2)/(ω_b² + κ_a²/4)
        let den_c = wb * wb + ka * ka / 4.0;
        let back_re = g * g * (-wb) / den_c;
        let back_im = g * g * (-ka / 2.0) / den_c;
        let d_re = -wb - back_re;
        let d_im = km / 2.0 - back_im;
        let mod2 = d_re * d_re + d_im * d_im;
        let expected = cplx(omega * d_re / mod2, -omega * d_im / mod2);
        assert!(
            (m - expected).norm() <= 1e-13 * expected.norm(),
            "{m} vs {expected}"
        );
    }

    #[test]
    fn zero_target_needs_no_drive() {
        let p = baseline();
        assert_eq!(
            calibrate_rabi(&p, 0.0, 10.0, Sideband::Minus).unwrap(),
            cplx(0.0, 0.0)
        );
    }

    #[test]
    fn uncoupled_minus_calibration_closed_form() {
        let mut raw = RawParams::<f64>::baseline();
        raw.g = 0.0;
        let p = raw.validate().unwrap();
        let (g_t, g0) = (p.g_minus, 7.0);
        let rabi = calibrate_rabi(&p, g_t, g0, Sideband::Minus).unwrap();
        let expected = cplx(-p.omega_b, 0.5 * p.kappa_m) * (g_t / g0);
        assert!((rabi - expected).norm() <= 1e-12 * expected.norm());
    }

    #[test]
    fn negative_target_is_rejected() {
        let p = baseline();
        assert!(matches!(
            calibrate_rabi(&p, -1.0, 10.0, Sideband::Plus),
            Err(Error::Domain(_))
        ));
        assert!(calibrate_rabi(&p, 1.0, 0.0, Sideband::Plus).is_err());
    }

    #[test]
    fn misplaced_tones_are_rejected() {
        let p = baseline();
        let mut d = DriveSpec::on_sidebands(&p, cplx(1.0, 0.0), cplx(1.0, 0.0), 1.0).unwrap();
        d.omega_plus += 1e3;
        assert!(mean_amplitude(&p, &d, Sideband::Plus).is_err());
    }

    #[test]
    fn sideband_parsing() {
        assert_eq!("minus".parse::<Sideband>().unwrap(), Sideband::Minus);
        assert_eq!("plus".parse::<Sideband>().unwrap(), Sideband::Plus);
        assert!("up".parse::<Sideband>().is_err());
    }
}
