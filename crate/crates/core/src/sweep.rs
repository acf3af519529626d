//! Optimization of the blue-sideband coupling G+ and parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::floquet::floquet_nsd;
use crate::params::{parse_key, raw_from_json, ParamField, SystemParams};
use crate::rwa::{linspace, nsd_components, VACUUM_NSD};
use crate::scalar::Real;
use crate::steadystate::steady_covariance;

/// Default stability guard: the search stays in G+ ≤ G−·(1 − ε).
pub const DEFAULT_EPSILON: f64 = 1e-9;
/// Points of the coarse search grid.
pub const COARSE_POINTS: usize = 1000;
/// Golden-section stops once the bracket in `ln(1 − G+/G−)` is this narrow.
pub const REFINE_WIDTH: f64 = 1e-6;

/// Quantity minimized or tabulated by sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Output quadrature spectrum in the rotating-wave approximation.
    RwaNsd,
    /// Output quadrature spectrum with counter-rotating terms, truncated at `l`.
    FloquetNsd { truncation_l: usize },
    /// Stationary ⟨δX_b²⟩.
    MechVariance,
    /// Stationary ⟨δY_a²⟩.
    CavityVariance,
}

impl Objective {
    pub fn evaluate<T: Real>(&self, params: &SystemParams<T>, omega: T, phi: T) -> Result<T> {
        match *self {
            Objective::RwaNsd => Ok(nsd_components(params, omega, phi).s_total),
            Objective::FloquetNsd { truncation_l } => {
                floquet_nsd(params, omega, phi, truncation_l).map(|p| p.s_total)
            }
            Objective::MechVariance => steady_covariance(params).map(|s| s.var_x[1]),
            Objective::CavityVariance => steady_covariance(params).map(|s| s.var_y[0]),
        }
    }

    /// Every objective is a variance-like quantity with vacuum level ½.
    pub fn to_db<T: Real>(value: T) -> T {
        -T::lit(10.0) * (value / T::lit(VACUUM_NSD)).log10()
    }

    pub fn name(&self) -> String {
        match self {
            Objective::RwaNsd => "rwa-nsd".into(),
            Objective::FloquetNsd { truncation_l } => format!("floquet-nsd:{truncation_l}"),
            Objective::MechVariance => "mech-variance".into(),
            Objective::CavityVariance => "cavity-variance".into(),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;

    /// Accepts `rwa-nsd`, `floquet-nsd` (l = 1), `floquet-nsd:<l>`,
    /// `mech-variance` and `cavity-variance`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rwa-nsd" => Ok(Objective::RwaNsd),
            "floquet-nsd" => Ok(Objective::FloquetNsd { truncation_l: 1 }),
            "mech-variance" => Ok(Objective::MechVariance),
            "cavity-variance" => Ok(Objective::CavityVariance),
            other => other
                .strip_prefix("floquet-nsd:")
                .and_then(|l| l.parse().ok())
                .map(|truncation_l| Objective::FloquetNsd { truncation_l })
                .ok_or_else(|| Error::Spec(format!("unknown objective {other:?}"))),
        }
    }
}

/// Result of [`optimize_gplus`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum<T> {
    pub g_plus_opt: T,
    pub ratio_opt: T,
    pub value: T,
    /// Objective evaluations spent, coarse grid included.
    pub iterations: usize,
}

impl<T: Real> Optimum<T> {
    pub fn squeezing_db(&self) -> T {
        Objective::to_db(self.value)
    }
}

/// Search settings for [`optimize_gplus_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub epsilon: f64,
    pub coarse_points: usize,
    pub refine_width: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            coarse_points: COARSE_POINTS,
            refine_width: REFINE_WIDTH,
        }
    }
}

fn ratio_of<T: Real>(u: T) -> T {
    T::one() - u.exp()
}

fn eval_at<T: Real>(
    params: &SystemParams<T>,
    objective: Objective,
    omega: T,
    phi: T,
    ratio: T,
) -> Result<T> {
    let g_plus = ratio * params.g_minus;
    params
        .with_g_plus(g_plus)
        .and_then(|p| objective.evaluate(&p, omega, phi))
        .and_then(|v| {
            if v.is_finite_value() {
                Ok(v)
            } else {
                Err(Error::Domain("objective is not finite".into()))
            }
        })
        .map_err(|e| Error::Objective {
            g_plus: g_plus.to_f64_lossy(),
            source: Box::new(e),
        })
}

/// Minimizes `objective` over G+ ∈ [0, G−(1 − ε)] with the default search.
pub fn optimize_gplus<T: Real>(
    params: &SystemParams<T>,
    objective: Objective,
    omega: T,
    phi: T,
) -> Result<Optimum<T>> {
    optimize_gplus_with(params, objective, omega, phi, SearchOptions::default())
}

/// Coarse scan uniform in `u = ln(1 − G+/G−)` over [ln ε, 0], which
/// resolves optima lying exponentially close to G+ = G−, followed by
/// golden-section refinement around the best grid point.
pub fn optimize_gplus_with<T: Real>(
    params: &SystemParams<T>,
    objective: Objective,
    omega: T,
    phi: T,
    opts: SearchOptions,
) -> Result<Optimum<T>> {
    if !(params.g_minus > T::zero()) {
        return Err(Error::Domain("optimizing G+ needs G- > 0".into()));
    }
    if !(opts.epsilon > 0.0 && opts.epsilon < 1.0) || opts.coarse_points < 3 {
        return Err(Error::Domain(
            "search needs 0 < epsilon < 1 and at least 3 grid points".into(),
        ));
    }
    let grid = linspace(T::lit(opts.epsilon.ln()), T::zero(), opts.coarse_points);
    let values: Vec<T> = grid
        .par_iter()
        .map(|&u| eval_at(params, objective, omega, phi, ratio_of(u)))
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    let mut iterations = values.len();
    let (mut best_u, mut best_v) = (grid[best], values[best]);

    let n = grid.len();
    let (mut lo, mut hi) = (grid[best.saturating_sub(1)], grid[(best + 1).min(n - 1)]);
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let f = |u: T| eval_at(params, objective, omega, phi, ratio_of(u));
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    iterations += 2;
    // Narrower brackets are not representable in single precision.
    let width = T::lit(opts.refine_width).max(T::lit(4.0) * T::EPSILON * lo.abs().max(hi.abs()));
    while hi - lo > width {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
        iterations += 1;
    }
    for (u, v) in [(x1, f1), (x2, f2)] {
        if v < best_v {
            best_u = u;
            best_v = v;
        }
    }

    let ratio = ratio_of(best_u);
    Ok(Optimum {
        g_plus_opt: ratio * params.g_minus,
        ratio_opt: ratio,
        value: best_v,
        iterations,
    })
}

/// Squeezing lost when the optimal ratio is missed by a relative error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity<T> {
    pub optimum: Optimum<T>,
    pub db_low: T,
    pub db_high: T,
    /// Worst-case degradation in dB, never negative.
    pub loss_db: T,
    /// The perturbed ratio ≥ 1 leaves the stable region; its value comes
    /// from the analytic formula evaluated past the boundary.
    pub crosses_boundary: bool,
}

/// Optimizes G+, then evaluates the objective at `ratio_opt·(1 ± delta_ratio)`.
pub fn sensitivity<T: Real>(
    params: &SystemParams<T>,
    objective: Objective,
    omega: T,
    phi: T,
    delta_ratio: T,
) -> Result<Sensitivity<T>> {
    if !(delta_ratio >= T::zero()) {
        return Err(Error::Domain("delta_ratio must be non-negative".into()));
    }
    let optimum = optimize_gplus(params, objective, omega, phi)?;
    let best_db = optimum.squeezing_db();
    let low = optimum.ratio_opt * (T::one() - delta_ratio);
    let high = optimum.ratio_opt * (T::one() + delta_ratio);
    let db_low = Objective::to_db(eval_at(params, objective, omega, phi, low)?);
    let db_high = Objective::to_db(eval_at(params, objective, omega, phi, high)?);
    let loss = (best_db - db_low.min(db_high)).max(T::zero());
    Ok(Sensitivity {
        optimum,
        db_low,
        db_high,
        loss_db: loss,
        crosses_boundary: high >= T::one(),
    })
}

/// What a sweep axis varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisTarget {
    Field(ParamField),
    /// G+ set to `value · G−`, applied after every other axis.
    GPlusRatio,
}

/// One sweep axis; values are in internal units (rad/s, K, or a bare ratio).
#[derive(Debug, Clone, PartialEq)]
pub struct Axis<T> {
    pub target: AxisTarget,
    pub values: Vec<T>,
}

impl<T: Real> Axis<T> {
    pub fn new(target: AxisTarget, values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if values.iter().any(|v| !v.is_finite_value()) {
            return Err(Error::Spec("axis values must be finite".into()));
        }
        Ok(Self { target, values })
    }

    pub fn name(&self) -> &'static str {
        match self.target {
            AxisTarget::Field(f) => f.name(),
            AxisTarget::GPlusRatio => "g_plus_ratio",
        }
    }
}

/// Declarative description of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec<T: Real> {
    pub base: SystemParams<T>,
    pub axes: Vec<Axis<T>>,
    pub objective: Objective,
    pub omega: T,
    pub phi: T,
    pub optimize_g_plus: bool,
}

impl<T: Real> SweepSpec<T> {
    pub fn new(base: SystemParams<T>, axes: Vec<Axis<T>>, objective: Objective) -> Result<Self> {
        let spec = Self {
            base,
            axes,
            objective,
            omega: T::zero(),
            phi: T::frac_pi_2(),
            optimize_g_plus: false,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Spec(format!(
                "expected 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        let optimized_axis = self.axes.iter().any(|a| {
            matches!(
                a.target,
                AxisTarget::GPlusRatio | AxisTarget::Field(ParamField::GPlus)
            )
        });
        if self.optimize_g_plus && optimized_axis {
            return Err(Error::Spec("cannot sweep G+ while optimizing it".into()));
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Axis values of point `k`, first axis varying slowest.
    pub fn coords(&self, k: usize) -> Vec<T> {
        let mut rest = k;
        let mut out = vec![T::zero(); self.axes.len()];
        for (i, axis) in self.axes.iter().enumerate().rev() {
            let n = axis.values.len();
            out[i] = axis.values[rest % n];
            rest /= n;
        }
        out
    }

    fn point_params(&self, coords: &[T]) -> Result<SystemParams<T>> {
        let mut raw = *self.base.raw();
        let mut ratio = None;
        for (axis, &v) in self.axes.iter().zip(coords) {
            match axis.target {
                AxisTarget::Field(f) => raw.set(f, v),
                AxisTarget::GPlusRatio => ratio = Some(v),
            }
        }
        if let Some(r) = ratio {
            raw.g_plus = r * raw.g_minus;
        }
        raw.validate()
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub coords: Vec<T>,
    pub value: Option<T>,
    pub squeezing_db: Option<T>,
    pub g_plus_opt: Option<T>,
    pub ratio_opt: Option<T>,
    pub error: Option<String>,
}

fn evaluate_point<T: Real>(spec: &SweepSpec<T>, coords: Vec<T>) -> SweepRow<T> {
    let outcome = spec.point_params(&coords).and_then(|p| {
        if spec.optimize_g_plus {
            optimize_gplus(&p, spec.objective, spec.omega, spec.phi)
                .map(|o| (o.value, Some(o.g_plus_opt), Some(o.ratio_opt)))
        } else {
            spec.objective
                .evaluate(&p, spec.omega, spec.phi)
                .map(|v| (v, None, None))
        }
    });
    match outcome {
        Ok((value, g_plus_opt, ratio_opt)) => SweepRow {
            coords,
            value: Some(value),
            squeezing_db: Some(Objective::to_db(value)),
            g_plus_opt,
            ratio_opt,
            error: None,
        },
        Err(e) => SweepRow {
            coords,
            value: None,
            squeezing_db: None,
            g_plus_opt: None,
            ratio_opt: None,
            error: Some(e.to_string()),
        },
    }
}

/// Evaluates the spec over its grid in parallel. Rows come back in grid
/// order; failures are recorded in the row instead of aborting.
pub fn sweep<T: Real>(spec: &SweepSpec<T>) -> Result<Vec<SweepRow<T>>> {
    spec.check()?;
    Ok((0..spec.n_points())
        .into_par_iter()
        .map(|k| evaluate_point(spec, spec.coords(k)))
        .collect())
}

fn number(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::Spec(format!("{what} must be a number, got {v}")))
}

fn axis_target(key: &str) -> Result<(AxisTarget, f64)> {
    match key {
        "g_plus_ratio" => Ok((AxisTarget::GPlusRatio, 1.0)),
        "omega_0_hz" => Ok((AxisTarget::Field(ParamField::Omega0), std::f64::consts::TAU)),
        "omega_0_rad_s" => Ok((AxisTarget::Field(ParamField::Omega0), 1.0)),
        _ => match parse_key(key)? {
            Some((field, scale)) => Ok((AxisTarget::Field(field), scale)),
            None => Err(Error::UnknownKey(key.to_string())),
        },
    }
}

/// Reads one entry of the `axes` array.
///
/// `{"key": "g_minus_hz", "values": [...]}` lists values explicitly;
/// `{"key": ..., "lo": .., "hi": .., "n": .., "scale": "log"}` builds a
/// linear (default) or logarithmic grid.
pub fn parse_axis(entry: &Value) -> Result<Axis<f64>> {
    let obj = entry
        .as_object()
        .ok_or_else(|| Error::Spec("each axis must be an object".into()))?;
    let key = obj
        .get("key")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Spec("axis needs a string \"key\"".into()))?;
    let (target, scale) = axis_target(key)?;

    let values = if let Some(list) = obj.get("values") {
        list.as_array()
            .ok_or_else(|| Error::Spec("\"values\" must be an array".into()))?
            .iter()
            .map(|v| number(v, "axis value"))
            .collect::<Result<Vec<_>>>()?
    } else {
        let get = |k: &str| {
            obj.get(k)
                .ok_or_else(|| Error::Spec(format!("axis {key} needs \"values\" or lo/hi/n")))
                .and_then(|v| number(v, k))
        };
        let (lo, hi, n) = (get("lo")?, get("hi")?, get("n")?);
        if n < 1.0 || n.fract() != 0.0 {
            return Err(Error::Spec(format!(
                "axis {key}: n must be a positive integer"
            )));
        }
        match obj.get("scale").and_then(Value::as_str).unwrap_or("linear") {
            "linear" => linspace(lo, hi, n as usize),
            "log" => {
                if !(lo > 0.0 && hi > 0.0) {
                    return Err(Error::Spec(format!(
                        "axis {key}: log scale needs lo, hi > 0"
                    )));
                }
                linspace(lo.log10(), hi.log10(), n as usize)
                    .into_iter()
                    .map(|e| 10f64.powf(e))
                    .collect()
            }
            other => return Err(Error::Spec(format!("axis {key}: unknown scale {other:?}"))),
        }
    };
    Axis::new(target, values.into_iter().map(|v| v * scale).collect())
}

/// Builds a sweep from a config document: parameter keys plus `axes` and
/// the optional `objective`, `omega_hz`, `phi`, `optimize_g_plus` and
/// `truncation_l` entries.
pub fn parse_sweep(text: &str) -> Result<SweepSpec<f64>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let Value::Object(map) = doc else {
        return Err(Error::Parse("sweep config must be a JSON object".into()));
    };
    sweep_from_json(&map)
}

pub fn sweep_from_json(map: &Map<String, Value>) -> Result<SweepSpec<f64>> {
    let base = raw_from_json(map)?.validate()?;
    let axes = map
        .get("axes")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Spec("sweep config needs an \"axes\" array".into()))?
        .iter()
        .map(parse_axis)
        .collect::<Result<Vec<_>>>()?;

    let mut objective = match map.get("objective") {
        None => Objective::RwaNsd,
        Some(v) => v
            .as_str()
            .ok_or_else(|| Error::Spec("\"objective\" must be a string".into()))?
            .parse()?,
    };
    if let Some(l) = map.get("truncation_l") {
        let l = number(l, "truncation_l")?;
        match &mut objective {
            Objective::FloquetNsd { truncation_l } if l >= 0.0 && l.fract() == 0.0 => {
                *truncation_l = l as usize
            }
            Objective::FloquetNsd { .. } => {
                return Err(Error::Spec(
                    "truncation_l must be a non-negative integer".into(),
                ))
            }
            _ => {
                return Err(Error::Spec(
                    "truncation_l only applies to floquet-nsd".into(),
                ))
            }
        }
    }

    let mut spec = SweepSpec {
        base,
        axes,
        objective,
        omega: 0.0,
        phi: std::f64::consts::FRAC_PI_2,
        optimize_g_plus: false,
    };
    if let Some(w) = map.get("omega_hz") {
        spec.omega = number(w, "omega_hz")? * std::f64::consts::TAU;
    }
    if let Some(phi) = map.get("phi") {
        spec.phi = number(phi, "phi")?;
    }
    if let Some(flag) = map.get("optimize_g_plus") {
        spec.optimize_g_plus = flag
            .as_bool()
            .ok_or_else(|| Error::Spec("optimize_g_plus must be a boolean".into()))?;
    }
    spec.check()?;
    Ok(spec)
}
