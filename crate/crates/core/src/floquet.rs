//! Linear response beyond the rotating-wave approximation.
//!
//! In the frame rotating at ω_0 (cavity, magnon) and ω_b (mechanics) the
//! linearized fluctuations obey `u̇ = A(t) u + n(t)` with
//! `A(t) = A_0 + A_1 e^{2iω_b t} + A_{−1} e^{−2iω_b t}` in the basis
//! `(δa, δa†, δb, δb†, δm, δm†)`. Fourier transforming couples `u[ω]` to
//! `u[ω ± 2ω_b]`; keeping sidebands `s = −L..L` gives a block-tridiagonal
//! system in which block row `s` reads
//!
//! ```text
//! −iω u_s = (A_0 + 2isω_b) u_s + A_1 u_{s+1} + A_{−1} u_{s−1} + n_s,
//! u_s = u[ω + 2sω_b].
//! ```
//!
//! Blocks are stored with `s` decreasing down the matrix, so `A_1` lands
//! below the diagonal and `A_{−1}` above it. The printed layout of this
//! matrix in the literature has a malformed `A_-1` entry; the layout here is
//! pinned to the transform of `A(t)` and checked in the tests below.

use nalgebra::{DMatrix, SMatrix};

use crate::blocktri::{solve_dense, Block, BlockTridiagonal, BLOCK};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rwa::{reduce_phi, NsdPoint};
use crate::scalar::{cplx, phasor, Complex, Real};

/// Default relative tolerance for [`converge`].
pub const DEFAULT_REL_TOL: f64 = 1e-3;
/// Default largest truncation tried by [`converge`].
pub const DEFAULT_L_MAX: usize = 6;

/// Fourier components of the time-periodic drift matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicBlocks<T: Real> {
    pub a0: Block<T>,
    /// Coefficient of e^{2iω_b t}.
    pub a1: Block<T>,
    /// Coefficient of e^{−2iω_b t}.
    pub a_minus1: Block<T>,
}

impl<T: Real> HarmonicBlocks<T> {
    /// A(t) rebuilt from its harmonics.
    pub fn at_time(&self, t: T, omega_b: T) -> Block<T> {
        let rot = phasor(T::lit(2.0) * omega_b * t);
        self.a0 + self.a1 * rot + self.a_minus1 * rot.conj()
    }
}

/// Swaps every operator with its adjoint, (δO, δO†) ↔ (δO†, δO), on both
/// rows and columns.
pub fn conjugation_swap<T: Real>(m: &Block<T>) -> Block<T> {
    let partner = |k: usize| k ^ 1;
    Block::from_fn(|r, c| m[(partner(r), partner(c))])
}

pub fn harmonic_blocks<T: Real>(params: &SystemParams<T>) -> HarmonicBlocks<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let re = |x: T| cplx(x, T::zero());
    let im = |x: T| cplx(T::zero(), x);
    let half = T::lit(0.5);
    let (g, gm, gp) = (params.g, params.g_minus, params.g_plus);

    let mut a0 = Block::from_element(zero);
    a0[(0, 0)] = re(-half * params.kappa_a);
    a0[(1, 1)] = re(-half * params.kappa_a);
    a0[(2, 2)] = re(-half * params.gamma_b);
    a0[(3, 3)] = re(-half * params.gamma_b);
    a0[(4, 4)] = re(-half * params.kappa_m);
    a0[(5, 5)] = re(-half * params.kappa_m);
    // cavity–magnon beam splitter
    a0[(0, 4)] = im(-g);
    a0[(1, 5)] = im(g);
    a0[(4, 0)] = im(-g);
    a0[(5, 1)] = im(g);
    // magnomechanics, co-rotating parts
    a0[(2, 4)] = im(-gm);
    a0[(2, 5)] = im(-gp);
    a0[(3, 4)] = im(gp);
    a0[(3, 5)] = im(gm);
    a0[(4, 2)] = im(-gm);
    a0[(4, 3)] = im(-gp);
    a0[(5, 2)] = im(gp);
    a0[(5, 3)] = im(gm);

    let mut a1 = Block::from_element(zero);
    a1[(2, 4)] = im(-gp);
    a1[(2, 5)] = im(-gm);
    a1[(4, 3)] = im(-gm);
    a1[(5, 3)] = im(gp);

    let mut a_minus1 = Block::from_element(zero);
    a_minus1[(3, 4)] = im(gm);
    a_minus1[(3, 5)] = im(gp);
    a_minus1[(4, 2)] = im(-gp);
    a_minus1[(5, 2)] = im(gm);

    HarmonicBlocks { a0, a1, a_minus1 }
}

/// Truncated frequency-space generator at one probe frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetSystem<T: Real> {
    pub truncation_l: usize,
    pub probe_omega: T,
    /// Generator `M` of `−iω U = M U + N`, sidebands `s = l+1` (first block)
    /// down to `−(l+1)` (last block).
    pub generator: BlockTridiagonal<T>,
}

impl<T: Real> FloquetSystem<T> {
    /// Number of sidebands on each side of the carrier.
    pub fn reach(&self) -> usize {
        self.generator.n_blocks() / 2
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    /// Block index of sideband `s`.
    pub fn index_of(&self, s: isize) -> usize {
        (self.reach() as isize - s) as usize
    }

    pub fn block_matrix(&self) -> DMatrix<Complex<T>> {
        self.generator.to_dense()
    }

    /// `−iω I − M`, the matrix actually inverted.
    pub fn system_matrix(&self) -> BlockTridiagonal<T> {
        shifted(&self.generator, self.probe_omega)
    }
}

fn shifted<T: Real>(generator: &BlockTridiagonal<T>, probe_omega: T) -> BlockTridiagonal<T> {
    let shift = cplx(T::zero(), -probe_omega);
    generator.map_blocks(|r, c, b| {
        if r == c {
            Block::from_diagonal_element(shift) - b
        } else {
            -b
        }
    })
}

fn assemble_reach<T: Real>(params: &SystemParams<T>, reach: usize) -> BlockTridiagonal<T> {
    let h = harmonic_blocks(params);
    let n = 2 * reach + 1;
    let diag = (0..n)
        .map(|i| {
            let s = reach as isize - i as isize;
            let shift = cplx(T::zero(), T::lit(2.0 * s as f64) * params.omega_b);
            h.a0 + Block::from_diagonal_element(shift)
        })
        .collect();
    BlockTridiagonal {
        diag,
        upper: vec![h.a_minus1; n - 1],
        lower: vec![h.a1; n - 1],
    }
}

/// Builds the system with sidebands `s = −(l+1)..=(l+1)`.
pub fn assemble<T: Real>(
    params: &SystemParams<T>,
    probe_omega: T,
    truncation_l: usize,
) -> FloquetSystem<T> {
    FloquetSystem {
        truncation_l,
        probe_omega,
        generator: assemble_reach(params, truncation_l + 1),
    }
}

/// How the truncated system is inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMethod {
    #[default]
    BlockElimination,
    Dense,
}

/// Rows of `(−iωI − M)⁻¹` that produce δa[ω] and δa†[ω] (the transform of
/// δa†(t) at +ω) from the stacked inputs `n[ω + 2sω_b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityResponse<T: Real> {
    pub reach: usize,
    pub a_row: Vec<Complex<T>>,
    pub a_dag_row: Vec<Complex<T>>,
}

fn cavity_response<T: Real>(
    generator: &BlockTridiagonal<T>,
    probe_omega: T,
    method: SolveMethod,
) -> Result<CavityResponse<T>> {
    let reach = generator.n_blocks() / 2;
    let system = shifted(generator, probe_omega);
    let n = system.n_blocks();
    let dim = system.dim();
    let one = cplx(T::one(), T::zero());

    // Rows of K⁻¹ are columns of K⁻ᵀ.
    let cols: Vec<Complex<T>> = match method {
        SolveMethod::BlockElimination => {
            let mut rhs = vec![SMatrix::<Complex<T>, BLOCK, 2>::zeros(); n];
            rhs[reach][(0, 0)] = one;
            rhs[reach][(1, 1)] = one;
            let x = system.transpose().solve(&rhs)?;
            let mut flat = Vec::with_capacity(2 * dim);
            for c in 0..2 {
                for slab in &x {
                    flat.extend(slab.column(c).iter().copied());
                }
            }
            flat
        }
        SolveMethod::Dense => {
            let mut rhs = DMatrix::zeros(dim, 2);
            rhs[(BLOCK * reach, 0)] = one;
            rhs[(BLOCK * reach + 1, 1)] = one;
            let x = solve_dense(system.to_dense().transpose(), rhs)?;
            x.iter().copied().collect()
        }
    };
    let (a_row, a_dag_row) = cols.split_at(dim);
    Ok(CavityResponse {
        reach,
        a_row: a_row.to_vec(),
        a_dag_row: a_dag_row.to_vec(),
    })
}

/// Rows mapping the stacked inputs to δa[ω] and δa†[ω] for the system with
/// sidebands `−(l+1)..=(l+1)`.
pub fn response_rows<T: Real>(
    params: &SystemParams<T>,
    probe_omega: T,
    truncation_l: usize,
    method: SolveMethod,
) -> Result<CavityResponse<T>> {
    let sys = assemble(params, probe_omega, truncation_l);
    cavity_response(&sys.generator, probe_omega, method)
}

/// Output spectrum plus the imaginary part left over by the contraction,
/// which vanishes for an exact solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetNsd<T> {
    pub point: NsdPoint<T>,
    pub imag_residue: T,
    pub reach: usize,
}

/// Noise coefficient vector of the output quadrature U_φ[ω]: entry
/// `6·i + k` multiplies the k-th input operator at frequency `ω + 2sω_b`
/// (`s = reach − i`), inputs ordered (a_in, a_in†, b_in, b_in†, m_in, m_in†).
fn quadrature_coefficients<T: Real>(
    params: &SystemParams<T>,
    resp: &CavityResponse<T>,
    phi: T,
) -> Vec<Complex<T>> {
    let sqrt_ka = params.kappa_a.sqrt();
    let rates = [
        params.kappa_a,
        params.kappa_a,
        params.gamma_b,
        params.gamma_b,
        params.kappa_m,
        params.kappa_m,
    ]
    .map(|r| r.sqrt());
    let carrier = BLOCK * resp.reach;
    let rot_minus = phasor(-phi);
    let rot_plus = phasor(phi);
    let norm = T::lit(std::f64::consts::FRAC_1_SQRT_2);

    (0..resp.a_row.len())
        .map(|j| {
            let scale = rates[j % BLOCK] * sqrt_ka;
            let mut out_a = resp.a_row[j] * scale;
            let mut out_a_dag = resp.a_dag_row[j] * scale;
            // input-output: a_out = √κ_a δa − a_in
            if j == carrier {
                out_a -= T::one();
            }
            if j == carrier + 1 {
                out_a_dag -= T::one();
            }
            (rot_minus * out_a + rot_plus * out_a_dag) * norm
        })
        .collect()
}

fn contract<T: Real>(
    params: &SystemParams<T>,
    omega: T,
    phi: T,
    plus: &CavityResponse<T>,
    minus: &CavityResponse<T>,
) -> FloquetNsd<T> {
    let cp = quadrature_coefficients(params, plus, phi);
    let cm = quadrature_coefficients(params, minus, phi);
    let th = params.thermal();
    let half = T::lit(0.5);
    let weights = [th.n_a, th.n_b, th.n_m].map(|n| n + n + T::one());
    let n_blocks = 2 * plus.reach + 1;

    // sideband s of U[ω] pairs with sideband −s of U[−ω]
    let mut channel = [Complex::new(T::zero(), T::zero()); 3];
    for i in 0..n_blocks {
        let j = n_blocks - 1 - i;
        for (mode, acc) in channel.iter_mut().enumerate() {
            let k = 2 * mode;
            let pair = cp[BLOCK * i + k] * cm[BLOCK * j + k + 1]
                + cp[BLOCK * i + k + 1] * cm[BLOCK * j + k];
            *acc += pair * (half * weights[mode]);
        }
    }
    let [ca, cb, cmag] = channel;
    let total = ca + cb + cmag;
    FloquetNsd {
        point: NsdPoint::new(omega, phi, ca.re, cmag.re, cb.re),
        imag_residue: total.im.abs(),
        reach: plus.reach,
    }
}

fn nsd_with_reach<T: Real>(
    params: &SystemParams<T>,
    omega: T,
    phi: T,
    reach: usize,
    method: SolveMethod,
) -> Result<FloquetNsd<T>> {
    let phi = reduce_phi(phi);
    let plus = cavity_response(&assemble_reach(params, reach), omega, method)?;
    let minus = cavity_response(&assemble_reach(params, reach), -omega, method)?;
    Ok(contract(params, omega, phi, &plus, &minus))
}

/// Output spectrum at `omega` with the generator truncated at `l`, keeping
/// the imaginary residue of the contraction.
pub fn floquet_nsd_detailed<T: Real>(
    params: &SystemParams<T>,
    omega: T,
    phi: T,
    truncation_l: usize,
    method: SolveMethod,
) -> Result<FloquetNsd<T>> {
    nsd_with_reach(params, omega, phi, truncation_l + 1, method)
}

/// Output quadrature spectrum including the counter-rotating terms.
pub fn floquet_nsd<T: Real>(
    params: &SystemParams<T>,
    omega: T,
    phi: T,
    truncation_l: usize,
) -> Result<NsdPoint<T>> {
    floquet_nsd_detailed(
        params,
        omega,
        phi,
        truncation_l,
        SolveMethod::BlockElimination,
    )
    .map(|r| r.point)
}

/// Outcome of [`converge`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Converged<T> {
    pub point: NsdPoint<T>,
    pub l_used: usize,
    pub converged: bool,
}

/// Raises the truncation until successive totals agree to `rel_tol`.
///
/// The reference for `l = 0` is the carrier-only system (no sidebands),
/// which reproduces the rotating-wave result.
pub fn converge<T: Real>(
    params: &SystemParams<T>,
    omega: T,
    phi: T,
    rel_tol: T,
    l_max: usize,
) -> Result<Converged<T>> {
    if !(rel_tol > T::zero()) {
        return Err(Error::Domain("rel_tol must be positive".into()));
    }
    if l_max < 1 {
        return Err(Error::Domain("l_max must be at least 1".into()));
    }
    let method = SolveMethod::BlockElimination;
    let mut prev = nsd_with_reach(params, omega, phi, 0, method)?.point;
    let mut last = prev;
    for l in 0..=l_max {
        let cur = nsd_with_reach(params, omega, phi, l + 1, method)?.point;
        if (cur.s_total - prev.s_total).abs() <= rel_tol * cur.s_total.abs() {
            return Ok(Converged {
                point: cur,
                l_used: l,
                converged: true,
            });
        }
        prev = cur;
        last = cur;
    }
    Ok(Converged {
        point: last,
        l_used: l_max,
        converged: false,
    })
}
