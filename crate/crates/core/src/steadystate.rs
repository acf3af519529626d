//! Stationary Gaussian state of the linearized three-mode system in
//! quadrature space.
//!
//! Quadratures are ordered `(δX_a, δY_a, δX_b, δY_b, δX_m, δY_m)` with
//! `X = (O + O†)/√2` and `Y = (O − O†)/(i√2)`, so the vacuum variance is ½.

use nalgebra::{DMatrix, DVector, SMatrix};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::scalar::Real;

pub type Mat6<T> = SMatrix<T, 6, 6>;

/// Abscissa above `−MARGINAL_FRACTION · κ_m` counts as marginally stable.
pub const MARGINAL_FRACTION: f64 = 1e-6;

/// Relative Lyapunov residual below which a solve counts as accurate.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// The three bosonic modes, in quadrature-vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Cavity,
    Mechanics,
    Magnon,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Cavity, Mode::Mechanics, Mode::Magnon];

    pub fn index(self) -> usize {
        match self {
            Mode::Cavity => 0,
            Mode::Mechanics => 1,
            Mode::Magnon => 2,
        }
    }

    /// One-letter tag used in table columns.
    pub fn tag(self) -> &'static str {
        match self {
            Mode::Cavity => "a",
            Mode::Mechanics => "b",
            Mode::Magnon => "m",
        }
    }
}

/// Drift and diffusion matrices of the quadrature Langevin equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureModel<T: Real> {
    pub a_prime: Mat6<T>,
    pub d_prime: Mat6<T>,
}

pub fn quadrature_model<T: Real>(params: &SystemParams<T>) -> QuadratureModel<T> {
    let half = T::lit(0.5);
    let (ka, kb, km) = (params.kappa_a, params.gamma_b, params.kappa_m);
    let g = params.g;
    let diff = params.g_minus - params.g_plus;
    let sum = params.g_minus + params.g_plus;

    let mut a = Mat6::<T>::zeros();
    a[(0, 0)] = -half * ka;
    a[(1, 1)] = -half * ka;
    a[(2, 2)] = -half * kb;
    a[(3, 3)] = -half * kb;
    a[(4, 4)] = -half * km;
    a[(5, 5)] = -half * km;
    a[(0, 5)] = g;
    a[(1, 4)] = -g;
    a[(2, 5)] = diff;
    a[(3, 4)] = -sum;
    a[(4, 1)] = g;
    a[(4, 3)] = diff;
    a[(5, 0)] = -g;
    a[(5, 2)] = -sum;

    let th = params.thermal();
    let mut d = Mat6::<T>::zeros();
    for (k, rate) in [
        ka * (th.n_a + half),
        kb * (th.n_b + half),
        km * (th.n_m + half),
    ]
    .into_iter()
    .enumerate()
    {
        d[(2 * k, 2 * k)] = rate;
        d[(2 * k + 1, 2 * k + 1)] = rate;
    }
    QuadratureModel {
        a_prime: a,
        d_prime: d,
    }
}

/// Outcome of the eigenvalue test on the drift matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability<T> {
    pub stable: bool,
    /// Largest real part over the spectrum of A′.
    pub abscissa: T,
    /// Stable but within `MARGINAL_FRACTION · κ_m` of the boundary.
    pub marginal: bool,
}

pub fn spectral_abscissa<T: Real>(m: &Mat6<T>) -> T {
    m.complex_eigenvalues().iter().map(|z| z.re).fold(
        T::min_value().unwrap_or_else(|| -T::one() / T::EPSILON),
        |acc, x| acc.max(x),
    )
}

pub fn is_stable<T: Real>(params: &SystemParams<T>) -> Stability<T> {
    let abscissa = spectral_abscissa(&quadrature_model(params).a_prime);
    let stable = abscissa < T::zero();
    Stability {
        stable,
        abscissa,
        marginal: stable && abscissa > -T::lit(MARGINAL_FRACTION) * params.kappa_m,
    }
}

/// Steady-state covariance and its diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceState<T: Real> {
    pub v: Mat6<T>,
    pub var_x: [T; 3],
    pub var_y: [T; 3],
    pub stable: bool,
    pub marginal: bool,
    /// ‖A′V + VA′ᵀ + D′‖_F / ‖D′‖_F.
    pub residual: T,
}

impl<T: Real> CovarianceState<T> {
    /// False when the solve residual exceeds [`RESIDUAL_TOL`].
    pub fn accurate(&self) -> bool {
        self.residual < T::lit(RESIDUAL_TOL)
    }
}

/// Relative residual of a candidate solution of `A V + V Aᵀ = −D`.
pub fn lyapunov_residual<T: Real>(a: &Mat6<T>, d: &Mat6<T>, v: &Mat6<T>) -> T {
    (a * v + v * a.transpose() + d).norm() / d.norm()
}

/// Solves `A V + V Aᵀ = −D` through the 36×36 Kronecker-sum system.
pub fn lyapunov_kronecker<T: Real>(a: &Mat6<T>, d: &Mat6<T>) -> Result<Mat6<T>> {
    let n = 6;
    let ad = DMatrix::from_column_slice(n, n, a.as_slice());
    let eye = DMatrix::<T>::identity(n, n);
    // Column-major vec: vec(AV) = (I ⊗ A) vec V, vec(VAᵀ) = (A ⊗ I) vec V.
    let k = eye.kronecker(&ad) + ad.kronecker(&eye);
    let rhs = DVector::from_iterator(n * n, d.iter().map(|&x| -x));
    let x = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Kronecker-sum Lyapunov system".into()))?;
    let v = Mat6::from_column_slice(x.as_slice());
    Ok((v + v.transpose()) * T::lit(0.5))
}

/// Independent Lyapunov solver: Cayley transform to the discrete equation
/// followed by squared Smith iteration.
pub fn lyapunov_smith<T: Real>(a: &Mat6<T>, d: &Mat6<T>) -> Result<Mat6<T>> {
    let eig = a.complex_eigenvalues();
    let slowest = eig
        .iter()
        .map(|z| -z.re)
        .fold(T::max_value().unwrap_or(T::one() / T::EPSILON), |acc, x| {
            acc.min(x)
        });
    if !(slowest > T::zero()) {
        return Err(Error::Unstable {
            abscissa: (-slowest).to_f64_lossy(),
        });
    }
    let fastest = eig
        .iter()
        .map(|z| z.norm_sqr().sqrt())
        .fold(T::zero(), |acc, x| acc.max(x));
    let q = (slowest * fastest).sqrt();

    let eye = Mat6::<T>::identity();
    let resolvent = (eye * q - a)
        .try_inverse()
        .ok_or_else(|| Error::Singular("Cayley resolvent".into()))?;
    let mut ak = resolvent * (eye * q + a);
    let mut x = resolvent * d * resolvent.transpose() * (T::lit(2.0) * q);

    for _ in 0..128 {
        let step = ak * x * ak.transpose();
        x += step;
        if step.norm() <= T::EPSILON * x.norm() {
            return Ok((x + x.transpose()) * T::lit(0.5));
        }
        ak = ak * ak;
    }
    Err(Error::Singular("Smith iteration did not converge".into()))
}

fn diagonal_pairs<T: Real>(v: &Mat6<T>) -> ([T; 3], [T; 3]) {
    let mut var_x = [T::zero(); 3];
    let mut var_y = [T::zero(); 3];
    for k in 0..3 {
        var_x[k] = v[(2 * k, 2 * k)];
        var_y[k] = v[(2 * k + 1, 2 * k + 1)];
    }
    (var_x, var_y)
}

/// Stationary covariance matrix. Fails when A′ has an eigenvalue with
/// non-negative real part.
pub fn steady_covariance<T: Real>(params: &SystemParams<T>) -> Result<CovarianceState<T>> {
    let stability = is_stable(params);
    if !stability.stable {
        return Err(Error::Unstable {
            abscissa: stability.abscissa.to_f64_lossy(),
        });
    }
    let model = quadrature_model(params);
    let v = lyapunov_kronecker(&model.a_prime, &model.d_prime)?;
    let (var_x, var_y) = diagonal_pairs(&v);
    Ok(CovarianceState {
        v,
        var_x,
        var_y,
        stable: true,
        marginal: stability.marginal,
        residual: lyapunov_residual(&model.a_prime, &model.d_prime, &v),
    })
}

/// Variances of one mode and the squeezing of its quieter quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeVariance<T> {
    pub mode: Mode,
    pub var_x: T,
    pub var_y: T,
    /// −10 log10(min(var_x, var_y)/½); negative means noisier than vacuum.
    pub squeezing_db: T,
}

pub fn quadrature_variances<T: Real>(state: &CovarianceState<T>) -> [ModeVariance<T>; 3] {
    Mode::ALL.map(|mode| {
        let k = mode.index();
        let (x, y) = (state.var_x[k], state.var_y[k]);
        ModeVariance {
            mode,
            var_x: x,
            var_y: y,
            squeezing_db: variance_db(x.min(y)),
        }
    })
}

/// −10 log10(var/½).
pub fn variance_db<T: Real>(var: T) -> T {
    -T::lit(10.0) * (var / T::lit(0.5)).log10()
}

/// Symplectic eigenvalues of a two-mode-per-block covariance matrix,
/// ascending. A physical state has all of them ≥ ½.
pub fn symplectic_eigenvalues<T: Real>(v: &Mat6<T>) -> [T; 3] {
    let mut omega = Mat6::<T>::zeros();
    for k in 0..3 {
        omega[(2 * k, 2 * k + 1)] = T::one();
        omega[(2 * k + 1, 2 * k)] = -T::one();
    }
    let mut nu: Vec<T> = (omega * v)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.im.abs())
        .collect();
    nu.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    [nu[0], nu[2], nu[4]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::RawParams;

    fn params(edit: impl FnOnce(&mut RawParams<f64>)) -> SystemParams<f64> {
        let mut raw = RawParams::baseline();
        edit(&mut raw);
        raw.validate().unwrap()
    }

    #[test]
    fn drift_entries() {
        let p = params(|r| r.g_plus = 0.4 * r.g_minus);
        let a = quadrature_model(&p).a_prime;
        assert_eq!(a[(3, 4)], -(p.g_minus + p.g_plus));
        assert_eq!(a[(2, 5)], p.g_minus - p.g_plus);
        assert_eq!(a[(0, 5)], p.g);
        assert_eq!(a[(1, 4)], -p.g);
        assert_eq!(a[(4, 1)], p.g);
        assert_eq!(a[(5, 0)], -p.g);

        let red = quadrature_model(&params(|r| r.g_plus = 0.0)).a_prime;
        assert_eq!(red[(2, 5)], -red[(3, 4)]);
        let equal = quadrature_model(&params(|r| r.g_plus = r.g_minus)).a_prime;
        assert_eq!(equal[(2, 5)], 0.0);
        assert_eq!(equal[(4, 3)], 0.0);
    }

    /// Langevin equations written out mode by mode, mapped to quadratures:
    /// ȧ = −κ_a/2 a − i g m, ḃ = −γ_b/2 b − i(G− m + G+ m†),
    /// ṁ = −κ_m/2 m − i g a − i(G− b + G+ b†).
    #[test]
    fn drift_regenerates_mode_equations() {
        let p = params(|r| {
            r.g = 0.37e6;
            r.g_minus = 1.3e6;
            r.g_plus = 0.8e6;
        });
        let a_prime = quadrature_model(&p).a_prime;
        let (g, gm, gp) = (p.g, p.g_minus, p.g_plus);
        let u = [0.3, -1.1, 0.7, 0.25, -0.6, 0.9];
        // Complex amplitudes from quadratures: O = (X + iY)/√2.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let amp = |k: usize| crate::scalar::cplx(u[2 * k] * s, u[2 * k + 1] * s);
        let (ca, cb, cm) = (amp(0), amp(1), amp(2));
        let i = crate::scalar::cplx(0.0, 1.0);
        let da = -ca * (p.kappa_a / 2.0) - i * cm * g;
        let db = -cb * (p.gamma_b / 2.0) - i * (cm * gm + cm.conj() * gp);
        let dm = -cm * (p.kappa_m / 2.0) - i * ca * g - i * (cb * gm + cb.conj() * gp);
        let expected = [da, db, dm]
            .iter()
            .flat_map(|z| [z.re / s, z.im / s])
            .collect::<Vec<_>>();
        let got = a_prime * nalgebra::Vector6::from_column_slice(&u);
        for k in 0..6 {
            assert!(
                (got[k] - expected[k]).abs() < 1e-6,
                "row {k}: {} vs {}",
                got[k],
                expected[k]
            );
        }
    }

    #[test]
    fn diffusion_diagonal() {
        let p = params(|r| r.temperature = 0.5);
        let m = quadrature_model(&p);
        let th = p.thermal();
        assert_eq!(m.d_prime[(2, 2)], p.gamma_b * (th.n_b + 0.5));
        assert_eq!(m.d_prime[(5, 5)], p.kappa_m * (th.n_m + 0.5));
        assert_eq!(m.d_prime[(0, 1)], 0.0);
    }

    #[test]
    fn stability_classification() {
        assert!(is_stable(&params(|r| r.g_plus = 0.5 * r.g_minus)).stable);
        let blue = params(|r| r.g_plus = 1.2 * r.g_minus);
        let st = is_stable(&blue);
        assert!(!st.stable && st.abscissa > 0.0);
        assert!(matches!(
            steady_covariance(&blue),
            Err(Error::Unstable { .. })
        ));

        let free = params(|r| {
            r.g = 0.0;
            r.g_minus = 0.0;
            r.g_plus = 0.0;
        });
        let st = is_stable(&free);
        let expected = -free.kappa_a.min(free.gamma_b).min(free.kappa_m) / 2.0;
        assert!((st.abscissa - expected).abs() <= 1e-9 * expected.abs());
    }

    #[test]
    fn uncoupled_modes_are_thermal() {
        let p = params(|r| {
            r.g = 0.0;
            r.g_minus = 0.0;
            r.temperature = 0.01;
        });
        let state = steady_covariance(&p).unwrap();
        let th = p.thermal();
        let expected = [th.n_a + 0.5, th.n_b + 0.5, th.n_m + 0.5];
        for (k, e) in expected.iter().enumerate() {
            assert!((state.var_x[k] - e).abs() < 1e-12 * e);
            assert!((state.var_y[k] - e).abs() < 1e-12 * e);
        }
        let modes = quadrature_variances(&state);
        assert!(modes[0].squeezing_db.abs() < 1e-9);
        // N_b = 6.457 → variance 6.957 → −10 log10(13.914) = −11.435 dB
        assert!((modes[1].var_x - 6.957).abs() < 1e-3);
        assert!(
            (modes[1].squeezing_db + 11.435).abs() < 2e-3,
            "{}",
            modes[1].squeezing_db
        );
    }

    #[test]
    fn solvers_agree_at_baseline() {
        let p = params(|r| r.g_plus = 0.99 * r.g_minus);
        let m = quadrature_model(&p);
        let a = lyapunov_kronecker(&m.a_prime, &m.d_prime).unwrap();
        let b = lyapunov_smith(&m.a_prime, &m.d_prime).unwrap();
        assert!((a - b).norm() <= 1e-8 * a.norm());
        assert!(lyapunov_residual(&m.a_prime, &m.d_prime, &a) < RESIDUAL_TOL);
    }

    #[test]
    fn mechanics_squeezes_near_balance() {
        let p = params(|r| r.g_plus = 0.9 * r.g_minus);
        let state = steady_covariance(&p).unwrap();
        assert!(state.accurate());
        assert!(state.var_x[1] < 0.5, "{}", state.var_x[1]);
        let nu = symplectic_eigenvalues(&state.v);
        assert!(nu[0] >= 0.5 - 1e-9, "{nu:?}");
    }

    #[test]
    fn vacuum_symplectic_spectrum() {
        let v = Mat6::<f64>::identity() * 0.5;
        for nu in symplectic_eigenvalues(&v) {
            assert!((nu - 0.5).abs() < 1e-14);
        }
    }
}
