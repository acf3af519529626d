use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;

use anyhow::{Context, Result};
use magnomech::drive::{calibrate_rabi, polar, Sideband};
use magnomech::figures::{self, sweep_table, Figure};
use magnomech::floquet::{floquet_nsd_detailed, SolveMethod};
use magnomech::params::load_config;
use magnomech::rwa::{linspace, nsd_components, spectrum};
use magnomech::steadystate::{quadrature_variances, steady_covariance, Mode};
use magnomech::sweep::{
    optimize_gplus, parse_axis, parse_sweep, sensitivity, AxisTarget, Objective,
};
use magnomech::table::hz;
use magnomech::{Cell, SystemParams, Table};
use rayon::prelude::*;

use crate::args::{Command, Common, FigureArg, GPlusChoice, Grid, SidebandArg};
use crate::output::{emit, extension, render, write_atomic};

/// Bad input detected by the front end itself.
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn flag(b: bool) -> Cell {
    Cell::Num(if b { 1.0 } else { 0.0 })
}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

/// True when the failure stems from user input rather than computation.
pub fn is_validation(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.is::<Invalid>()
            || e.downcast_ref::<magnomech::Error>()
                .is_some_and(|m| m.is_validation())
    })
}

fn read_params(common: &Common) -> Result<SystemParams<f64>> {
    match &common.config {
        None => Ok(figures::baseline()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Ok(load_config(&text).with_context(|| format!("in {}", path.display()))?)
        }
    }
}

fn apply_g_plus(
    params: SystemParams<f64>,
    choice: &GPlusChoice,
    phi: f64,
) -> Result<SystemParams<f64>> {
    if let Some(r) = choice.g_plus_ratio {
        if !(0.0..=1.0).contains(&r) {
            return Err(invalid(format!(
                "--g-plus-ratio must lie in [0, 1], got {r}"
            )));
        }
        return Ok(params.with_g_plus(r * params.g_minus)?);
    }
    if choice.optimize_g_plus {
        let opt = optimize_gplus(&params, Objective::RwaNsd, 0.0, phi)?;
        return Ok(params.with_g_plus(opt.g_plus_opt)?);
    }
    Ok(params)
}

fn omega_grid(grid: &Grid) -> Result<Vec<f64>> {
    let finite = grid.omega_min_hz.is_finite() && grid.omega_max_hz.is_finite();
    let ordered = grid.points == 1 || grid.omega_max_hz > grid.omega_min_hz;
    if grid.points == 0 || !finite || !ordered {
        return Err(invalid(
            "frequency grid needs points >= 1 and omega-max-hz > omega-min-hz",
        ));
    }
    Ok(linspace(
        TAU * grid.omega_min_hz,
        TAU * grid.omega_max_hz,
        grid.points,
    ))
}

const SPECTRUM_COLUMNS: [&str; 6] = [
    "omega_over_2pi_hz",
    "s_a",
    "s_m",
    "s_b",
    "s_total",
    "squeezing_db",
];

fn spectrum_table(common: &Common, grid: &Grid, g_plus: &GPlusChoice) -> Result<Table> {
    let params = apply_g_plus(read_params(common)?, g_plus, grid.phi)?;
    let spec = spectrum(&params, &omega_grid(grid)?, grid.phi)?;
    let mut table = Table::new("spectrum", params, &SPECTRUM_COLUMNS);
    for p in &spec.points {
        table.push(vec![
            hz(p.omega).into(),
            p.s_a.into(),
            p.s_m.into(),
            p.s_b.into(),
            p.s_total.into(),
            p.squeezing_db.into(),
        ]);
    }
    Ok(table)
}

fn floquet_table(
    common: &Common,
    grid: &Grid,
    g_plus: &GPlusChoice,
    l: usize,
    compare: bool,
) -> Result<Table> {
    let params = apply_g_plus(read_params(common)?, g_plus, grid.phi)?;
    let omegas = omega_grid(grid)?;
    let mut columns = SPECTRUM_COLUMNS.to_vec();
    columns.push("imag_residue");
    if compare {
        columns.extend(["s_total_rwa", "squeezing_db_rwa"]);
    }
    let rows: Vec<Vec<Cell>> = omegas
        .par_iter()
        .map(|&w| -> Result<Vec<Cell>> {
            let r = floquet_nsd_detailed(&params, w, grid.phi, l, SolveMethod::BlockElimination)?;
            let p = r.point;
            let mut row: Vec<Cell> = vec![
                hz(w).into(),
                p.s_a.into(),
                p.s_m.into(),
                p.s_b.into(),
                p.s_total.into(),
                p.squeezing_db.into(),
                r.imag_residue.into(),
            ];
            if compare {
                let rwa = nsd_components(&params, w, grid.phi);
                row.extend([rwa.s_total.into(), rwa.squeezing_db.into()]);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(format!("floquet_l{l}"), params, &columns);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

struct AxisFlags<'a> {
    key: &'a str,
    lo: f64,
    hi: f64,
    n: usize,
    log: bool,
}

fn steadystate_table(
    common: &Common,
    g_plus: &GPlusChoice,
    axis: Option<AxisFlags>,
) -> Result<Table> {
    let params = apply_g_plus(read_params(common)?, g_plus, std::f64::consts::FRAC_PI_2)?;
    let mut columns: Vec<String> = Vec::new();
    let points: Vec<(Option<f64>, Result<SystemParams<f64>>)> = match &axis {
        None => vec![(None, Ok(params))],
        Some(a) => {
            let entry = serde_json::json!({
                "key": a.key, "lo": a.lo, "hi": a.hi, "n": a.n,
                "scale": if a.log { "log" } else { "linear" },
            });
            let parsed = parse_axis(&entry)?;
            columns.push(a.key.to_string());
            let unit = if a.key.ends_with("_hz") { TAU } else { 1.0 };
            parsed
                .values
                .iter()
                .map(|&v| {
                    let p = match parsed.target {
                        AxisTarget::Field(f) => params.with(f, v),
                        AxisTarget::GPlusRatio => params.with_g_plus(v * params.g_minus),
                    };
                    (Some(v / unit), p.map_err(anyhow::Error::from))
                })
                .collect()
        }
    };
    for m in Mode::ALL {
        let t = m.tag();
        columns.extend([
            format!("var_x_{t}"),
            format!("var_y_{t}"),
            format!("squeezing_db_{t}"),
        ]);
    }
    columns.extend(["stable", "marginal", "residual", "error"].map(String::from));
    let refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new("steadystate", params, &refs);

    let rows: Vec<Vec<Cell>> = points
        .into_par_iter()
        .map(|(coord, p)| {
            let mut row: Vec<Cell> = coord.map(Cell::from).into_iter().collect();
            match p.and_then(|p| Ok(steady_covariance(&p)?)) {
                Ok(state) => {
                    for v in quadrature_variances(&state) {
                        row.extend([v.var_x.into(), v.var_y.into(), v.squeezing_db.into()]);
                    }
                    row.extend([
                        Cell::Num(1.0),
                        flag(state.marginal),
                        state.residual.into(),
                        Cell::Empty,
                    ]);
                }
                Err(e) => {
                    row.extend((0..9).map(|_| Cell::Empty));
                    row.extend([
                        Cell::Num(0.0),
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Text(format!("{e:#}")),
                    ]);
                }
            }
            row
        })
        .collect();
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn optimize_table(
    common: &Common,
    objective: &str,
    omega_hz: f64,
    phi: f64,
    delta: Option<f64>,
) -> Result<Table> {
    let params = read_params(common)?;
    let objective: Objective = objective.parse()?;
    let omega = TAU * omega_hz;
    let mut columns = vec![
        "objective",
        "g_plus_opt_hz",
        "g_plus_ratio_opt",
        "value",
        "squeezing_db",
        "iterations",
    ];
    let mut row: Vec<Cell>;
    match delta {
        None => {
            let o = optimize_gplus(&params, objective, omega, phi)?;
            row = vec![
                objective.name().into(),
                hz(o.g_plus_opt).into(),
                o.ratio_opt.into(),
                o.value.into(),
                o.squeezing_db().into(),
                (o.iterations as f64).into(),
            ];
        }
        Some(d) => {
            let s = sensitivity(&params, objective, omega, phi, d)?;
            let o = s.optimum;
            columns.extend([
                "delta_ratio",
                "squeezing_db_low",
                "squeezing_db_high",
                "loss_db",
                "crosses_boundary",
            ]);
            row = vec![
                objective.name().into(),
                hz(o.g_plus_opt).into(),
                o.ratio_opt.into(),
                o.value.into(),
                o.squeezing_db().into(),
                (o.iterations as f64).into(),
            ];
            row.extend([
                d.into(),
                s.db_low.into(),
                s.db_high.into(),
                s.loss_db.into(),
                flag(s.crosses_boundary),
            ]);
        }
    }
    let mut table = Table::new("optimize", params, &columns);
    table.push(row);
    Ok(table)
}

fn calibrate_table(
    common: &Common,
    g_target_hz: f64,
    g0_hz: f64,
    sideband: SidebandArg,
) -> Result<Table> {
    let params = read_params(common)?;
    let side = match sideband {
        SidebandArg::Plus => Sideband::Plus,
        SidebandArg::Minus => Sideband::Minus,
    };
    let rabi = calibrate_rabi(&params, TAU * g_target_hz, TAU * g0_hz, side)?;
    let (mag, phase) = polar(rabi);
    let tone = params.omega_m + side.sign::<f64>() * params.omega_b;
    let mut table = Table::new(
        "calibrate",
        params,
        &[
            "sideband",
            "tone_hz",
            "g_target_hz",
            "g0_hz",
            "rabi_re_hz",
            "rabi_im_hz",
            "rabi_magnitude_hz",
            "rabi_phase_rad",
        ],
    );
    let name = match side {
        Sideband::Plus => "plus",
        Sideband::Minus => "minus",
    };
    table.push(vec![
        name.to_string().into(),
        hz(tone).into(),
        g_target_hz.into(),
        g0_hz.into(),
        hz(rabi.re).into(),
        hz(rabi.im).into(),
        hz(mag).into(),
        phase.into(),
    ]);
    Ok(table)
}

fn sweep_from_config(common: &Common) -> Result<Table> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| invalid("sweep needs --config with an axes section"))?;
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = parse_sweep(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(sweep_table("sweep", &spec)?)
}

fn figure_of(arg: FigureArg) -> Figure {
    match arg {
        FigureArg::Fig2b => Figure::Fig2b,
        FigureArg::Fig2c => Figure::Fig2c,
        FigureArg::Fig3 => Figure::Fig3,
        FigureArg::Fig4 => Figure::Fig4,
        FigureArg::Fig5a => Figure::Fig5a,
        FigureArg::Fig5b => Figure::Fig5b,
        FigureArg::Fig5c => Figure::Fig5c,
        FigureArg::FigA => Figure::FigA,
    }
}

fn reproduce(figure: FigureArg, dir: &Path, format: crate::args::Format) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for table in figure_of(figure).reproduce()? {
        let path = dir.join(format!("{}.{}", table.name, extension(format)));
        write_atomic(&path, &render(&table, format)?)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Spectrum {
            common,
            grid,
            g_plus,
        } => {
            let t = spectrum_table(&common, &grid, &g_plus)?;
            emit(&t, common.format, common.output.as_deref())
        }
        Command::Floquet {
            common,
            grid,
            g_plus,
            l,
            compare_rwa,
        } => {
            let t = floquet_table(&common, &grid, &g_plus, l, compare_rwa)?;
            emit(&t, common.format, common.output.as_deref())
        }
        Command::Steadystate {
            common,
            g_plus,
            axis,
            lo,
            hi,
            n,
            log,
        } => {
            let flags = match (axis.as_deref(), lo, hi) {
                (Some(key), Some(lo), Some(hi)) => Some(AxisFlags {
                    key,
                    lo,
                    hi,
                    n,
                    log,
                }),
                _ => None,
            };
            let t = steadystate_table(&common, &g_plus, flags)?;
            emit(&t, common.format, common.output.as_deref())
        }
        Command::Optimize {
            common,
            objective,
            omega_hz,
            phi,
            delta_ratio,
        } => {
            let t = optimize_table(&common, &objective, omega_hz, phi, delta_ratio)?;
            emit(&t, common.format, common.output.as_deref())
        }
        Command::Sweep { common } => {
            let t = sweep_from_config(&common)?;
            emit(&t, common.format, common.output.as_deref())
        }
        Command::Calibrate {
            common,
            g_target_hz,
            g0_hz,
            sideband,
        } => {
            let t = calibrate_table(&common, g_target_hz, g0_hz, sideband)?;
            emit(&t, common.format, common.output.as_deref())
        }
        Command::Reproduce {
            figure,
            output_dir,
            format,
        } => reproduce(figure, &output_dir, format),
    }
}
