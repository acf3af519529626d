//! Physical parameter set, validation, thermal occupations and the JSON
//! config format.
//!
//! Everything inside the crate is expressed in angular units (rad/s). Config
//! documents carry a unit tag on every key: `_hz` for ordinary frequencies
//! (multiplied by 2π on load), `_rad_s` for angular values taken verbatim and
//! `_k` for the bath temperature.

use std::fmt;
use std::ops::Deref;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Planck constant, J·s (CODATA 2018, exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / std::f64::consts::TAU;
/// ħ/k_B in K·s. Evaluating the Bose exponent through this ratio keeps every
/// intermediate inside the `f32` range.
pub const HBAR_OVER_KB: f64 = HBAR / BOLTZMANN;

/// Largest coupling or decay rate, as a fraction of ω_b, for which the
/// rotating-wave treatment is flagged as trustworthy.
pub const RWA_RATIO: f64 = 0.1;

/// Relative tolerance on the resonance condition ω_a = ω_m.
const RESONANCE_TOL: f64 = 1e-9;

/// Bose–Einstein occupation `1 / (exp(ħω/k_BT) - 1)`.
///
/// Returns exactly zero at `T = 0`.
pub fn thermal_occupation<T: Real>(omega: T, temperature: T) -> Result<T> {
    if !(omega > T::zero()) || !omega.is_finite_value() {
        return Err(Error::Domain(format!(
            "thermal occupation needs a positive finite frequency, got {:e}",
            omega.to_f64_lossy()
        )));
    }
    if temperature < T::zero() || !temperature.is_finite_value() {
        return Err(Error::Domain(format!(
            "temperature must be finite and non-negative, got {:e}",
            temperature.to_f64_lossy()
        )));
    }
    if temperature == T::zero() {
        return Ok(T::zero());
    }
    let x = T::lit(HBAR_OVER_KB) * omega / temperature;
    Ok(T::one() / x.exp_m1())
}

/// Mean thermal excitation numbers of the three bath modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalOccupations<T> {
    pub n_a: T,
    pub n_m: T,
    pub n_b: T,
}

/// Unvalidated parameter record. All rates and frequencies in rad/s,
/// temperature in kelvin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawParams<T> {
    pub omega_a: T,
    pub omega_m: T,
    pub omega_b: T,
    pub kappa_a: T,
    pub kappa_m: T,
    pub gamma_b: T,
    pub g: T,
    pub g_minus: T,
    pub g_plus: T,
    pub temperature: T,
}

impl<T: Real> RawParams<T> {
    /// Builds a record from ordinary frequencies (Hz) and a temperature in K.
    #[allow(clippy::too_many_arguments)]
    pub fn from_hz(
        omega_a_hz: f64,
        omega_m_hz: f64,
        omega_b_hz: f64,
        kappa_a_hz: f64,
        kappa_m_hz: f64,
        gamma_b_hz: f64,
        g_hz: f64,
        g_minus_hz: f64,
        g_plus_hz: f64,
        temperature_k: f64,
    ) -> Self {
        let w = |hz: f64| T::lit(hz * std::f64::consts::TAU);
        Self {
            omega_a: w(omega_a_hz),
            omega_m: w(omega_m_hz),
            omega_b: w(omega_b_hz),
            kappa_a: w(kappa_a_hz),
            kappa_m: w(kappa_m_hz),
            gamma_b: w(gamma_b_hz),
            g: w(g_hz),
            g_minus: w(g_minus_hz),
            g_plus: w(g_plus_hz),
            temperature: T::lit(temperature_k),
        }
    }

    /// The experimentally motivated baseline: ω_a/2π = ω_m/2π = 10 GHz,
    /// ω_b/2π = 30 MHz, κ_a/2π = κ_m/2π = 1 MHz, γ_b/2π = 100 Hz,
    /// g/2π = G−/2π = 3 MHz, G+ = 0, T = 10 mK.
    pub fn baseline() -> Self {
        Self::from_hz(10e9, 10e9, 30e6, 1e6, 1e6, 100.0, 3e6, 3e6, 0.0, 0.01)
    }

    pub fn get(&self, field: ParamField) -> T {
        match field {
            ParamField::Omega0 | ParamField::OmegaA => self.omega_a,
            ParamField::OmegaM => self.omega_m,
            ParamField::OmegaB => self.omega_b,
            ParamField::KappaA => self.kappa_a,
            ParamField::KappaM => self.kappa_m,
            ParamField::GammaB => self.gamma_b,
            ParamField::G => self.g,
            ParamField::GMinus => self.g_minus,
            ParamField::GPlus => self.g_plus,
            ParamField::Temperature => self.temperature,
        }
    }

    pub fn set(&mut self, field: ParamField, value: T) {
        match field {
            ParamField::Omega0 => {
                self.omega_a = value;
                self.omega_m = value;
            }
            ParamField::OmegaA => self.omega_a = value,
            ParamField::OmegaM => self.omega_m = value,
            ParamField::OmegaB => self.omega_b = value,
            ParamField::KappaA => self.kappa_a = value,
            ParamField::KappaM => self.kappa_m = value,
            ParamField::GammaB => self.gamma_b = value,
            ParamField::G => self.g = value,
            ParamField::GMinus => self.g_minus = value,
            ParamField::GPlus => self.g_plus = value,
            ParamField::Temperature => self.temperature = value,
        }
    }

    /// Converts every field to another scalar type.
    pub fn cast<U: Real>(&self) -> RawParams<U> {
        let c = |x: T| U::lit(x.to_f64_lossy());
        RawParams {
            omega_a: c(self.omega_a),
            omega_m: c(self.omega_m),
            omega_b: c(self.omega_b),
            kappa_a: c(self.kappa_a),
            kappa_m: c(self.kappa_m),
            gamma_b: c(self.gamma_b),
            g: c(self.g),
            g_minus: c(self.g_minus),
            g_plus: c(self.g_plus),
            temperature: c(self.temperature),
        }
    }

    /// Checks every invariant and returns the validated set, or every
    /// violation found.
    pub fn validate(self) -> Result<SystemParams<T>> {
        SystemParams::new(self)
    }
}

/// Names of the scalar fields of [`RawParams`], used by sweep axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamField {
    /// Sets ω_a and ω_m together, preserving resonance.
    Omega0,
    OmegaA,
    OmegaM,
    OmegaB,
    KappaA,
    KappaM,
    GammaB,
    G,
    GMinus,
    GPlus,
    Temperature,
}

impl ParamField {
    pub const ALL: [ParamField; 11] = [
        ParamField::Omega0,
        ParamField::OmegaA,
        ParamField::OmegaM,
        ParamField::OmegaB,
        ParamField::KappaA,
        ParamField::KappaM,
        ParamField::GammaB,
        ParamField::G,
        ParamField::GMinus,
        ParamField::GPlus,
        ParamField::Temperature,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamField::Omega0 => "omega_0",
            ParamField::OmegaA => "omega_a",
            ParamField::OmegaM => "omega_m",
            ParamField::OmegaB => "omega_b",
            ParamField::KappaA => "kappa_a",
            ParamField::KappaM => "kappa_m",
            ParamField::GammaB => "gamma_b",
            ParamField::G => "g",
            ParamField::GMinus => "g_minus",
            ParamField::GPlus => "g_plus",
            ParamField::Temperature => "temperature",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Whether the field is a frequency/rate (as opposed to a temperature).
    pub fn is_rate(self) -> bool {
        !matches!(self, ParamField::Temperature)
    }
}

impl fmt::Display for ParamField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated parameter set with its derived flags and cached thermal
/// occupations. Dereferences to the underlying [`RawParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    raw: RawParams<T>,
    thermal: ThermalOccupations<T>,
    rwa_valid: bool,
    drive_hierarchy_ok: bool,
}

impl<T: Real> SystemParams<T> {
    pub fn new(raw: RawParams<T>) -> Result<Self> {
        let mut errors = Vec::new();
        let fields = [
            ("omega_a", raw.omega_a, true),
            ("omega_m", raw.omega_m, true),
            ("omega_b", raw.omega_b, true),
            ("kappa_a", raw.kappa_a, true),
            ("kappa_m", raw.kappa_m, true),
            ("gamma_b", raw.gamma_b, true),
            ("g", raw.g, false),
            ("g_minus", raw.g_minus, false),
            ("g_plus", raw.g_plus, false),
            ("temperature", raw.temperature, false),
        ];
        for (name, value, strict) in fields {
            let v = value.to_f64_lossy();
            if !value.is_finite_value() {
                errors.push(format!("{name} is not finite ({v})"));
            } else if strict && !(value > T::zero()) {
                errors.push(format!("{name} must be positive (got {v:e})"));
            } else if value < T::zero() {
                errors.push(format!("{name} must be non-negative (got {v:e})"));
            }
        }
        if errors.is_empty() {
            let (a, m) = (raw.omega_a.to_f64_lossy(), raw.omega_m.to_f64_lossy());
            if (a - m).abs() > RESONANCE_TOL * a.abs().max(m.abs()) {
                errors.push(format!(
                    "resonance condition omega_a = omega_m violated ({a:e} vs {m:e} rad/s)"
                ));
            }
        }
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }

        let thermal = ThermalOccupations {
            n_a: thermal_occupation(raw.omega_a, raw.temperature)?,
            n_m: thermal_occupation(raw.omega_m, raw.temperature)?,
            n_b: thermal_occupation(raw.omega_b, raw.temperature)?,
        };
        let fastest = [raw.kappa_a, raw.kappa_m, raw.g, raw.g_minus, raw.g_plus]
            .into_iter()
            .fold(T::zero(), |acc, x| acc.max(x));
        Ok(Self {
            raw,
            thermal,
            rwa_valid: fastest <= T::lit(RWA_RATIO * (1.0 + RESONANCE_TOL)) * raw.omega_b,
            drive_hierarchy_ok: raw.g_minus > raw.g_plus,
        })
    }

    pub fn raw(&self) -> &RawParams<T> {
        &self.raw
    }

    pub fn thermal(&self) -> ThermalOccupations<T> {
        self.thermal
    }

    /// max(κ_a, κ_m, g, G−, G+) < ω_b/10.
    pub fn rwa_valid(&self) -> bool {
        self.rwa_valid
    }

    /// G− > G+.
    pub fn drive_hierarchy_ok(&self) -> bool {
        self.drive_hierarchy_ok
    }

    /// Signed G̃² = G−² − G+².
    pub fn g_tilde_sq(&self) -> T {
        self.raw.g_minus * self.raw.g_minus - self.raw.g_plus * self.raw.g_plus
    }

    /// Returns a revalidated copy with one field replaced.
    pub fn with(&self, field: ParamField, value: T) -> Result<Self> {
        let mut raw = self.raw;
        raw.set(field, value);
        Self::new(raw)
    }

    pub fn with_g_plus(&self, g_plus: T) -> Result<Self> {
        self.with(ParamField::GPlus, g_plus)
    }

    pub fn cast<U: Real>(&self) -> Result<SystemParams<U>> {
        SystemParams::new(self.raw.cast())
    }
}

impl<T> Deref for SystemParams<T> {
    type Target = RawParams<T>;

    fn deref(&self) -> &RawParams<T> {
        &self.raw
    }
}

impl Default for SystemParams<f64> {
    fn default() -> Self {
        RawParams::baseline()
            .validate()
            .expect("baseline parameters are valid")
    }
}

/// Config keys that belong to sweep specifications and are skipped by
/// [`load_config`].
pub const RESERVED_KEYS: [&str; 8] = [
    "axes",
    "objective",
    "phi",
    "omega_hz",
    "optimize_g_plus",
    "truncation_l",
    "name",
    "description",
];

/// Frequency-like keys, longest first so `g_minus` wins over `g`.
const FREQ_KEYS: [(&str, ParamField); 9] = [
    ("omega_a", ParamField::OmegaA),
    ("omega_m", ParamField::OmegaM),
    ("omega_b", ParamField::OmegaB),
    ("kappa_a", ParamField::KappaA),
    ("kappa_m", ParamField::KappaM),
    ("gamma_b", ParamField::GammaB),
    ("g_minus", ParamField::GMinus),
    ("g_plus", ParamField::GPlus),
    ("g", ParamField::G),
];

/// Unit style used when writing a config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitStyle {
    /// `_hz` keys holding ω/2π; human friendly, not bit-exact on reload.
    Hz,
    /// `_rad_s` keys holding ω verbatim; reloads bit-for-bit.
    Angular,
}

/// Maps a config key to its field and the factor converting to internal units.
pub fn parse_key(key: &str) -> Result<Option<(ParamField, f64)>> {
    if let Some(tag) = key.strip_prefix("temperature_") {
        return match tag {
            "k" => Ok(Some((ParamField::Temperature, 1.0))),
            _ => Err(Error::UnknownUnit(key.to_string())),
        };
    }
    for (base, field) in FREQ_KEYS {
        if let Some(rest) = key.strip_prefix(base).and_then(|r| r.strip_prefix('_')) {
            match rest {
                "hz" => return Ok(Some((field, std::f64::consts::TAU))),
                "rad_s" => return Ok(Some((field, 1.0))),
                // `g_minus_hz` must not be read as base `g` with tag `minus_hz`
                _ if base == "g" && (rest.starts_with("minus") || rest.starts_with("plus")) => {
                    continue
                }
                _ => return Err(Error::UnknownUnit(key.to_string())),
            }
        }
    }
    Ok(None)
}

/// Reads [`RawParams`] from a parsed JSON object.
pub fn raw_from_json(doc: &Map<String, Value>) -> Result<RawParams<f64>> {
    let mut slots: [Option<f64>; 10] = [None; 10];
    let index = |f: ParamField| -> usize {
        match f {
            ParamField::OmegaA => 0,
            ParamField::OmegaM => 1,
            ParamField::OmegaB => 2,
            ParamField::KappaA => 3,
            ParamField::KappaM => 4,
            ParamField::GammaB => 5,
            ParamField::G => 6,
            ParamField::GMinus => 7,
            ParamField::GPlus => 8,
            ParamField::Temperature => 9,
            ParamField::Omega0 => unreachable!("omega_0 is not a config key"),
        }
    };
    for (key, value) in doc {
        if RESERVED_KEYS.contains(&key.as_str()) {
            continue;
        }
        let Some((field, scale)) = parse_key(key)? else {
            return Err(Error::UnknownKey(key.clone()));
        };
        let number = value
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("key {key} must be a number, got {value}")))?;
        let slot = &mut slots[index(field)];
        if slot.is_some() {
            return Err(Error::Parse(format!(
                "{} given more than once",
                field.name()
            )));
        }
        *slot = Some(number * scale);
    }

    let order = [
        ParamField::OmegaA,
        ParamField::OmegaM,
        ParamField::OmegaB,
        ParamField::KappaA,
        ParamField::KappaM,
        ParamField::GammaB,
        ParamField::G,
        ParamField::GMinus,
        ParamField::GPlus,
        ParamField::Temperature,
    ];
    let mut raw = RawParams::<f64>::baseline();
    for field in order {
        let value = slots[index(field)].ok_or_else(|| Error::MissingKey(field.name().into()))?;
        raw.set(field, value);
    }
    Ok(raw)
}

/// Parses and validates a JSON config document.
pub fn load_config(text: &str) -> Result<SystemParams<f64>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let Value::Object(map) = doc else {
        return Err(Error::Parse("config must be a JSON object".into()));
    };
    raw_from_json(&map)?.validate()
}

/// Serializes the parameters as a config object.
pub fn config_json<T: Real>(params: &RawParams<T>, style: UnitStyle) -> Map<String, Value> {
    let mut map = Map::new();
    for (base, field) in FREQ_KEYS {
        let w = params.get(field).to_f64_lossy();
        let (key, value) = match style {
            UnitStyle::Hz => (format!("{base}_hz"), w / std::f64::consts::TAU),
            UnitStyle::Angular => (format!("{base}_rad_s"), w),
        };
        map.insert(key, Value::from(value));
    }
    map.insert(
        "temperature_k".into(),
        Value::from(params.temperature.to_f64_lossy()),
    );
    map
}

/// Writes a config document that [`load_config`] accepts.
pub fn emit_config<T: Real>(params: &RawParams<T>, style: UnitStyle) -> String {
    serde_json::to_string_pretty(&Value::Object(config_json(params, style)))
        .expect("a map of numbers always serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn zero_temperature_is_exactly_zero() {
        assert_eq!(thermal_occupation(TAU * 30e6, 0.0).unwrap(), 0.0);
        assert_eq!(thermal_occupation(1.0f32, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn mechanical_occupation_at_10_mk() {
        // exponent ħω/k_BT ≈ 0.14398
        let x = HBAR_OVER_KB * TAU * 30e6 / 0.01;
        assert!((x - 0.14398).abs() < 1e-5, "{x}");
        let n = thermal_occupation(TAU * 30e6, 0.01).unwrap();
        assert!((n - 6.457).abs() < 1e-3, "{n}");
    }

    #[test]
    fn microwave_occupation_is_negligible() {
        let n = thermal_occupation(TAU * 10e9, 0.01).unwrap();
        assert!(n > 0.0 && n < 1e-20, "{n}");
    }

    #[test]
    fn occupation_rejects_bad_inputs() {
        assert!(matches!(
            thermal_occupation(0.0, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            thermal_occupation(-1.0, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            thermal_occupation(1.0, -1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn baseline_is_valid_and_rwa() {
        let p = RawParams::<f64>::baseline().validate().unwrap();
        assert!(p.rwa_valid());
        assert!(p.drive_hierarchy_ok());
        let th = p.thermal();
        assert!(th.n_a < 1e-15 && th.n_m < 1e-15 && th.n_b > 6.0);
    }

    #[test]
    fn strong_coupling_flags_rwa() {
        let mut raw = RawParams::<f64>::baseline();
        raw.g = 0.5 * raw.omega_b;
        raw.g_minus = 0.5 * raw.omega_b;
        let p = raw.validate().unwrap();
        assert!(!p.rwa_valid());
    }

    #[test]
    fn blue_dominated_drive_is_flagged_not_rejected() {
        let mut raw = RawParams::<f64>::baseline();
        raw.g_plus = 1.1 * raw.g_minus;
        let p = raw.validate().unwrap();
        assert!(!p.drive_hierarchy_ok());
    }

    #[test]
    fn validation_collects_every_violation() {
        let mut raw = RawParams::<f64>::baseline();
        raw.kappa_a = -1.0;
        raw.gamma_b = f64::NAN;
        raw.g_plus = -2.0;
        let Err(Error::Validation(errs)) = raw.validate() else {
            panic!("expected validation failure");
        };
        assert_eq!(errs.len(), 3, "{errs:?}");
    }

    #[test]
    fn resonance_is_enforced() {
        let mut raw = RawParams::<f64>::baseline();
        raw.omega_m *= 1.001;
        assert!(matches!(raw.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn hz_keys_are_converted() {
        let text = emit_config(&RawParams::<f64>::baseline(), UnitStyle::Hz);
        let p = load_config(&text).unwrap();
        assert!((p.omega_b - TAU * 30e6).abs() < 1e-6);
    }

    #[test]
    fn missing_key_is_named() {
        let mut map = config_json(&RawParams::<f64>::baseline(), UnitStyle::Hz);
        map.remove("g_plus_hz");
        let err = load_config(&Value::Object(map).to_string()).unwrap_err();
        assert_eq!(err.to_string(), "missing key g_plus");
    }

    #[test]
    fn unknown_unit_tag() {
        let mut map = config_json(&RawParams::<f64>::baseline(), UnitStyle::Hz);
        let v = map.remove("omega_b_hz").unwrap();
        map.insert("omega_b_mhz".into(), v);
        assert!(matches!(
            load_config(&Value::Object(map).to_string()),
            Err(Error::UnknownUnit(k)) if k == "omega_b_mhz"
        ));
    }

    #[test]
    fn garbage_is_a_parse_error() {
        assert!(matches!(load_config("{not json"), Err(Error::Parse(_))));
        assert!(matches!(load_config("[1, 2]"), Err(Error::Parse(_))));
    }

    #[test]
    fn reserved_sections_are_ignored() {
        let mut map = config_json(&RawParams::<f64>::baseline(), UnitStyle::Hz);
        map.insert("axes".into(), serde_json::json!([{"param": "g_hz"}]));
        assert!(load_config(&Value::Object(map).to_string()).is_ok());
    }

    #[test]
    fn field_names_round_trip() {
        for f in ParamField::ALL {
            assert_eq!(ParamField::from_name(f.name()), Some(f));
        }
    }
}
