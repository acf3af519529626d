//! Figure-reproduction workflows built on the shipped configs.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::floquet::floquet_nsd;
use crate::params::{load_config, ParamField, SystemParams};
use crate::rwa::{linspace, nsd_components};
use crate::steadystate::steady_covariance;
use crate::sweep::{optimize_gplus, sweep, Axis, AxisTarget, Objective, SweepSpec};
use crate::table::{hz, Cell, Table};

pub const BASELINE_CONFIG: &str = include_str!("../configs/baseline.json");
pub const FIG2C_CONFIG: &str = include_str!("../configs/fig2c.json");
pub const FIG3_SWEEP_CONFIG: &str = include_str!("../configs/sweep_fig3.json");

/// Bath temperatures (K) of the ratio scans.
pub const FIG2_TEMPERATURES: [f64; 5] = [0.01, 0.1, 1.0, 2.0, 4.0];
pub const FIGA_TEMPERATURES: [f64; 3] = [0.01, 0.1, 1.0];
/// g = G− in units of ω_b for the three counter-rotating panels.
pub const FIG5_COUPLINGS: [f64; 3] = [0.05, 0.1, 0.5];

const PHI_Y: f64 = std::f64::consts::FRAC_PI_2;

/// Paper baseline with γ_b/2π = 100 Hz.
pub fn baseline() -> SystemParams<f64> {
    load_config(BASELINE_CONFIG).expect("shipped baseline config is valid")
}

/// Baseline with γ_b/2π = 10 kHz.
pub fn fig2c_params() -> SystemParams<f64> {
    load_config(FIG2C_CONFIG).expect("shipped fig2c config is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig2b,
    Fig2c,
    Fig3,
    Fig4,
    Fig5a,
    Fig5b,
    Fig5c,
    FigA,
}

impl Figure {
    pub const ALL: [Figure; 8] = [
        Figure::Fig2b,
        Figure::Fig2c,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5a,
        Figure::Fig5b,
        Figure::Fig5c,
        Figure::FigA,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2b => "fig2b",
            Figure::Fig2c => "fig2c",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5a => "fig5a",
            Figure::Fig5b => "fig5b",
            Figure::Fig5c => "fig5c",
            Figure::FigA => "figA",
        }
    }

    pub fn reproduce(self) -> Result<Vec<Table>> {
        match self {
            Figure::Fig2b => ratio_scan("fig2b", &baseline()),
            Figure::Fig2c => ratio_scan("fig2c", &fig2c_params()),
            Figure::Fig3 => fig3().map(|t| vec![t]),
            Figure::Fig4 => fig4().map(|t| vec![t]),
            Figure::Fig5a => fig5("fig5a", FIG5_COUPLINGS[0]),
            Figure::Fig5b => fig5("fig5b", FIG5_COUPLINGS[1]),
            Figure::Fig5c => fig5("fig5c", FIG5_COUPLINGS[2]),
            Figure::FigA => fig_a(),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Spec(format!("unknown figure {s:?}")))
    }
}

/// Ratios `1 − 10^x` for x from 0 down to `min_exponent`, ascending.
pub fn ratio_grid(min_exponent: f64, n: usize) -> Vec<f64> {
    linspace(0.0, min_exponent, n)
        .into_iter()
        .map(|x| 1.0 - 10f64.powf(x))
        .collect()
}

fn with_ratio(p: &SystemParams<f64>, ratio: f64) -> Result<SystemParams<f64>> {
    p.with_g_plus(ratio * p.g_minus)
}

/// Output squeezing versus G+/G− for each temperature, plus the optima.
pub fn ratio_scan(name: &str, base: &SystemParams<f64>) -> Result<Vec<Table>> {
    let ratios = ratio_grid(-6.0, 241);
    let mut scan = Table::new(
        name,
        *base,
        &["temperature_k", "g_plus_ratio", "nsd", "squeezing_db"],
    );
    let mut optima = Table::new(
        format!("{name}_optima"),
        *base,
        &[
            "temperature_k",
            "g_plus_ratio_opt",
            "g_plus_opt_hz",
            "nsd",
            "squeezing_db",
        ],
    );
    for t in FIG2_TEMPERATURES {
        let p = base.with(ParamField::Temperature, t)?;
        let rows: Vec<Vec<Cell>> = ratios
            .par_iter()
            .map(|&r| {
                let s = nsd_components(&with_ratio(&p, r)?, 0.0, PHI_Y).s_total;
                Ok(vec![
                    t.into(),
                    r.into(),
                    s.into(),
                    Objective::to_db(s).into(),
                ])
            })
            .collect::<Result<_>>()?;
        rows.into_iter().for_each(|r| scan.push(r));

        let opt = optimize_gplus(&p, Objective::RwaNsd, 0.0, PHI_Y)?;
        optima.push(vec![
            t.into(),
            opt.ratio_opt.into(),
            hz(opt.g_plus_opt).into(),
            opt.value.into(),
            opt.squeezing_db().into(),
        ]);
    }
    Ok(vec![scan, optima])
}

/// Runs a sweep and tabulates it with unit-suffixed axis columns.
pub fn sweep_table(name: &str, spec: &SweepSpec<f64>) -> Result<Table> {
    let mut columns: Vec<String> = spec
        .axes
        .iter()
        .map(|a| match a.target {
            AxisTarget::Field(f) if f.is_rate() => format!("{}_hz", f.name()),
            AxisTarget::Field(f) => format!("{}_k", f.name()),
            AxisTarget::GPlusRatio => "g_plus_ratio".into(),
        })
        .collect();
    columns.extend(
        [
            "value",
            "squeezing_db",
            "g_plus_opt_hz",
            "g_plus_ratio_opt",
            "error",
        ]
        .map(String::from),
    );
    let refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(name, spec.base, &refs);
    for row in sweep(spec)? {
        let mut cells: Vec<Cell> = row
            .coords
            .iter()
            .zip(&spec.axes)
            .map(|(&v, a)| match a.target {
                AxisTarget::Field(f) if f.is_rate() => hz(v).into(),
                _ => v.into(),
            })
            .collect();
        cells.extend([
            row.value.into(),
            row.squeezing_db.into(),
            row.g_plus_opt.map(hz).into(),
            row.ratio_opt.into(),
            row.error.into(),
        ]);
        table.push(cells);
    }
    Ok(table)
}

/// Squeezing over the (G−, g) plane with G+ optimized per point.
pub fn fig3() -> Result<Table> {
    let spec = crate::sweep::parse_sweep(FIG3_SWEEP_CONFIG)?;
    sweep_table("fig3", &spec)
}

/// Squeezing over (κ_a, γ_b) with G+ optimized per point.
pub fn fig4() -> Result<Table> {
    let tau = std::f64::consts::TAU;
    let kappa = linspace(0.25e6, 5e6, 20)
        .into_iter()
        .map(|v| tau * v)
        .collect();
    let gamma = linspace(1.0, 7.0, 25)
        .into_iter()
        .map(|e| tau * 10f64.powf(e))
        .collect();
    let mut spec = SweepSpec::new(
        fig2c_params(),
        vec![
            Axis::new(AxisTarget::Field(ParamField::KappaA), kappa)?,
            Axis::new(AxisTarget::Field(ParamField::GammaB), gamma)?,
        ],
        Objective::RwaNsd,
    )?;
    spec.optimize_g_plus = true;
    sweep_table("fig4", &spec)
}

/// Parameters of a counter-rotating panel: g = G− = `coupling`·ω_b.
pub fn fig5_params(coupling: f64) -> Result<SystemParams<f64>> {
    let base = fig2c_params();
    let c = coupling * base.omega_b;
    base.with(ParamField::G, c)?.with(ParamField::GMinus, c)
}

/// Rotating-wave and Floquet spectra (l = 1, 2) at ω = 0 versus G+/G−.
pub fn fig5(name: &str, coupling: f64) -> Result<Vec<Table>> {
    let base = fig5_params(coupling)?;
    let cols = [
        "g_plus_ratio",
        "nsd_rwa",
        "nsd_floquet_l1",
        "nsd_floquet_l2",
        "squeezing_db_rwa",
        "squeezing_db_floquet_l1",
    ];
    let row = |r: f64| -> Result<Vec<Cell>> {
        let p = with_ratio(&base, r)?;
        let rwa = nsd_components(&p, 0.0, PHI_Y).s_total;
        let l1 = floquet_nsd(&p, 0.0, PHI_Y, 1)?.s_total;
        let l2 = floquet_nsd(&p, 0.0, PHI_Y, 2)?.s_total;
        Ok(vec![
            r.into(),
            rwa.into(),
            l1.into(),
            l2.into(),
            Objective::to_db(rwa).into(),
            Objective::to_db(l1).into(),
        ])
    };

    let mut scan = Table::new(name, base, &cols);
    let rows: Vec<Vec<Cell>> = ratio_grid(-5.0, 101)
        .par_iter()
        .map(|&r| row(r))
        .collect::<Result<_>>()?;
    rows.into_iter().for_each(|r| scan.push(r));

    let opt = optimize_gplus(&base, Objective::RwaNsd, 0.0, PHI_Y)?;
    let mut at_opt = Table::new(format!("{name}_rwa_optimum"), base, &cols);
    at_opt.push(row(opt.ratio_opt)?);
    Ok(vec![scan, at_opt])
}

/// Stationary mechanical ⟨δX_b²⟩ and cavity ⟨δY_a²⟩ versus G+/G−, plus
/// the optimal ratios for each and for the output field.
pub fn fig_a() -> Result<Vec<Table>> {
    let base = baseline();
    let ratios = ratio_grid(-6.0, 241);
    let mut mech = Table::new(
        "figA_a",
        base,
        &["temperature_k", "g_plus_ratio", "var_x_b", "squeezing_db"],
    );
    let mut cav = Table::new(
        "figA_b",
        base,
        &["temperature_k", "g_plus_ratio", "var_y_a", "squeezing_db"],
    );
    let mut optima = Table::new(
        "figA_optima",
        base,
        &[
            "temperature_k",
            "g_plus_ratio_opt_mech",
            "squeezing_db_mech",
            "g_plus_ratio_opt_cavity",
            "var_y_a_opt",
            "g_plus_ratio_opt_output",
            "squeezing_db_output",
        ],
    );
    for t in FIGA_TEMPERATURES {
        let p = base.with(ParamField::Temperature, t)?;
        let rows: Vec<(f64, f64, f64)> = ratios
            .par_iter()
            .map(|&r| {
                let s = steady_covariance(&with_ratio(&p, r)?)?;
                Ok((r, s.var_x[1], s.var_y[0]))
            })
            .collect::<Result<_>>()?;
        for (r, vx, vy) in rows {
            mech.push(vec![
                t.into(),
                r.into(),
                vx.into(),
                Objective::to_db(vx).into(),
            ]);
            cav.push(vec![
                t.into(),
                r.into(),
                vy.into(),
                Objective::to_db(vy).into(),
            ]);
        }
        let m = optimize_gplus(&p, Objective::MechVariance, 0.0, PHI_Y)?;
        let c = optimize_gplus(&p, Objective::CavityVariance, 0.0, PHI_Y)?;
        let o = optimize_gplus(&p, Objective::RwaNsd, 0.0, PHI_Y)?;
        optima.push(vec![
            t.into(),
            m.ratio_opt.into(),
            m.squeezing_db().into(),
            c.ratio_opt.into(),
            c.value.into(),
            o.ratio_opt.into(),
            o.squeezing_db().into(),
        ]);
    }
    Ok(vec![mech, cav, optima])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_configs_match_builtin_baseline() {
        let p = baseline();
        let b = SystemParams::default();
        for f in ParamField::ALL {
            assert!((p.get(f) - b.get(f)).abs() <= 1e-15 * b.get(f).abs(), "{f}");
        }
        assert_eq!(fig2c_params().gamma_b, std::f64::consts::TAU * 1e4);
    }

    #[test]
    fn figure_names_parse() {
        for f in Figure::ALL {
            assert_eq!(f.name().parse::<Figure>().unwrap(), f);
        }
        assert!("fig6".parse::<Figure>().is_err());
    }

    #[test]
    fn ratio_grid_is_ascending_and_below_one() {
        let g = ratio_grid(-6.0, 7);
        assert_eq!(g[0], 0.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!((g[6] - (1.0 - 1e-6)).abs() < 1e-15);
    }

    #[test]
    fn fig3_grid_contains_weak_coupling_row() {
        let spec = crate::sweep::parse_sweep(FIG3_SWEEP_CONFIG).unwrap();
        assert_eq!(spec.n_points(), 10_000);
        let target = std::f64::consts::TAU * 0.1e6;
        assert!(spec.axes[0]
            .values
            .iter()
            .any(|v| (v - target).abs() < 1e-6 * target));
    }

    #[test]
    fn fig5_params_set_couplings() {
        let p = fig5_params(0.1).unwrap();
        assert_eq!(p.g, 0.1 * p.omega_b);
        assert_eq!(p.g_minus, p.g);
        assert!(!fig5_params(0.5).unwrap().rwa_valid());
    }
}
