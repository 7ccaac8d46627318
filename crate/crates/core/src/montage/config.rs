//! Montage coefficients and thresholds, plus partial overrides layered on top
//! of the defaults.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intensity::{parse_micro, Coefficient, DecimalError, Intensity, MICRO};
use crate::relations::CausationClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BetaTable {
    pub enabling: Coefficient,
    pub preventing: Coefficient,
    pub triggering: Coefficient,
}

impl BetaTable {
    pub fn get(&self, class: CausationClass) -> Coefficient {
        match class {
            CausationClass::Enabling => self.enabling,
            CausationClass::Preventing => self.preventing,
            CausationClass::Triggering => self.triggering,
        }
    }
}

impl Default for BetaTable {
    fn default() -> Self {
        BetaTable {
            enabling: Coefficient::from_micro(250_000),
            preventing: Coefficient::from_micro(-500_000),
            triggering: Coefficient::from_micro(500_000),
        }
    }
}

/// All values are provisional and meant to be tuned per scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MontageConfig {
    /// Resemblance strengthening coefficient.
    pub alpha: Coefficient,
    /// Causal-act coefficient per causation class.
    pub beta: BetaTable,
    /// Opposition attenuation coefficient.
    pub gamma: Coefficient,
    /// Contiguity coefficient; zero keeps contiguity out of intensity changes.
    pub contiguity: Coefficient,
    pub rounds: u32,
    /// Scope-of-effect threshold on the absolute cumulative delta.
    pub tau: Intensity,
    pub i_max: Intensity,
    /// Crossing gate: contradictions are resolved only at or above this intensity.
    pub rho: Intensity,
    /// Resemblance overlap threshold in `[0, 1]`.
    pub sigma: Coefficient,
    pub resolve: bool,
}

impl Default for MontageConfig {
    fn default() -> Self {
        MontageConfig {
            alpha: Coefficient::from_micro(500_000),
            beta: BetaTable::default(),
            gamma: Coefficient::from_micro(250_000),
            contiguity: Coefficient::ZERO,
            rounds: 1,
            tau: Intensity::EPSILON,
            i_max: Intensity::from_units(10),
            rho: Intensity::ZERO,
            sigma: Coefficient::from_micro(500_000),
            resolve: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("`{0}` must not be negative")]
    Negative(&'static str),
    #[error("`rounds` must be at least 1")]
    ZeroRounds,
    #[error("`sigma` must lie in [0, 1]")]
    SigmaRange,
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
}

impl MontageConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, c) in [("alpha", self.alpha), ("gamma", self.gamma)] {
            if c.is_negative() {
                return Err(ConfigError::Negative(name));
            }
        }
        if self.rounds == 0 {
            return Err(ConfigError::ZeroRounds);
        }
        if self.sigma.is_negative() || self.sigma.micro() > MICRO {
            return Err(ConfigError::SigmaRange);
        }
        Ok(())
    }

    /// Every montage coefficient set to zero; thresholds keep their defaults.
    pub fn zero_coefficients() -> Self {
        MontageConfig {
            alpha: Coefficient::ZERO,
            beta: BetaTable {
                enabling: Coefficient::ZERO,
                preventing: Coefficient::ZERO,
                triggering: Coefficient::ZERO,
            },
            gamma: Coefficient::ZERO,
            contiguity: Coefficient::ZERO,
            ..Self::default()
        }
    }
}

/// Config keys accepted in scenario `config` blocks, config files and (with
/// `_` spelled `-`) command-line flags. Sorted; this is the canonical order.
pub const CONFIG_KEYS: [&str; 12] = [
    "alpha",
    "beta_enabling",
    "beta_preventing",
    "beta_triggering",
    "contiguity",
    "gamma",
    "i_max",
    "resolve",
    "rho",
    "rounds",
    "sigma",
    "tau",
];

/// A partial [`MontageConfig`]. Later layers win when merged.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ConfigOverrides {
    pub alpha: Option<Coefficient>,
    pub beta_enabling: Option<Coefficient>,
    pub beta_preventing: Option<Coefficient>,
    pub beta_triggering: Option<Coefficient>,
    pub contiguity: Option<Coefficient>,
    pub gamma: Option<Coefficient>,
    pub i_max: Option<Intensity>,
    pub resolve: Option<bool>,
    pub rho: Option<Intensity>,
    pub rounds: Option<u32>,
    pub sigma: Option<Coefficient>,
    pub tau: Option<Intensity>,
}

/// Value of one config entry, formatted as it appears in scenario text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigValue {
    Coefficient(Coefficient),
    Intensity(Intensity),
    Count(u32),
    Flag(bool),
}

impl fmt::Display for ConfigValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigValue::Coefficient(c) => write!(f, "{c}"),
            ConfigValue::Intensity(i) => write!(f, "{i}"),
            ConfigValue::Count(n) => write!(f, "{n}"),
            ConfigValue::Flag(b) => f.write_str(if *b { "1" } else { "0" }),
        }
    }
}

impl ConfigOverrides {
    pub fn is_empty(&self) -> bool {
        self.entries().is_empty()
    }

    /// Sets one key from its textual value. Accepts the `_` spelling only.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let invalid = |reason: String| ConfigError::InvalidValue {
            key: key.to_owned(),
            value: value.to_owned(),
            reason,
        };
        let decimal = |v: &str| parse_micro(v).map_err(|e: DecimalError| invalid(e.to_string()));
        let coefficient = |v: &str| decimal(v).map(Coefficient::from_micro);
        let intensity = |v: &str| {
            let micro = decimal(v)?;
            u64::try_from(micro)
                .map(Intensity::from_micro)
                .map_err(|_| invalid("must not be negative".into()))
        };
        match key {
            "alpha" => self.alpha = Some(coefficient(value)?),
            "beta_enabling" => self.beta_enabling = Some(coefficient(value)?),
            "beta_preventing" => self.beta_preventing = Some(coefficient(value)?),
            "beta_triggering" => self.beta_triggering = Some(coefficient(value)?),
            "contiguity" => self.contiguity = Some(coefficient(value)?),
            "gamma" => self.gamma = Some(coefficient(value)?),
            "sigma" => self.sigma = Some(coefficient(value)?),
            "i_max" => self.i_max = Some(intensity(value)?),
            "rho" => self.rho = Some(intensity(value)?),
            "tau" => self.tau = Some(intensity(value)?),
            "rounds" => {
                let micro = decimal(value)?;
                if micro % MICRO != 0 || micro <= 0 {
                    return Err(invalid("expected a positive whole number".into()));
                }
                let n =
                    u32::try_from(micro / MICRO).map_err(|_| invalid("too many rounds".into()))?;
                self.rounds = Some(n);
            }
            "resolve" => {
                self.resolve = Some(match decimal(value)? {
                    0 => false,
                    MICRO => true,
                    _ => return Err(invalid("expected 0 or 1".into())),
                })
            }
            _ => return Err(ConfigError::UnknownKey(key.to_owned())),
        }
        Ok(())
    }

    /// Set entries in canonical key order.
    pub fn entries(&self) -> Vec<(&'static str, ConfigValue)> {
        use ConfigValue as V;
        let mut out = Vec::new();
        let mut push = |key: &'static str, value: Option<ConfigValue>| {
            if let Some(v) = value {
                out.push((key, v));
            }
        };
        push("alpha", self.alpha.map(V::Coefficient));
        push("beta_enabling", self.beta_enabling.map(V::Coefficient));
        push("beta_preventing", self.beta_preventing.map(V::Coefficient));
        push("beta_triggering", self.beta_triggering.map(V::Coefficient));
        push("contiguity", self.contiguity.map(V::Coefficient));
        push("gamma", self.gamma.map(V::Coefficient));
        push("i_max", self.i_max.map(V::Intensity));
        push("resolve", self.resolve.map(V::Flag));
        push("rho", self.rho.map(V::Intensity));
        push("rounds", self.rounds.map(V::Count));
        push("sigma", self.sigma.map(V::Coefficient));
        push("tau", self.tau.map(V::Intensity));
        out
    }

    /// Layers `higher` over `self`.
    pub fn merged_with(&self, higher: &ConfigOverrides) -> ConfigOverrides {
        macro_rules! pick {
            ($($f:ident),*) => {
                ConfigOverrides { $($f: higher.$f.or(self.$f)),* }
            };
        }
        pick!(
            alpha,
            beta_enabling,
            beta_preventing,
            beta_triggering,
            contiguity,
            gamma,
            i_max,
            resolve,
            rho,
            rounds,
            sigma,
            tau
        )
    }

    pub fn apply_to(&self, cfg: &mut MontageConfig) {
        macro_rules! set {
            ($($src:ident => $($dst:ident).+),*) => {
                $(if let Some(v) = self.$src { cfg.$($dst).+ = v; })*
            };
        }
        set!(
            alpha => alpha,
            beta_enabling => beta.enabling,
            beta_preventing => beta.preventing,
            beta_triggering => beta.triggering,
            contiguity => contiguity,
            gamma => gamma,
            i_max => i_max,
            resolve => resolve,
            rho => rho,
            rounds => rounds,
            sigma => sigma,
            tau => tau
        );
    }

    pub fn resolve_config(&self) -> MontageConfig {
        let mut cfg = MontageConfig::default();
        self.apply_to(&mut cfg);
        cfg
    }

    /// Parses `key = value` lines; `#` starts a comment. Used for config files.
    pub fn parse_key_values(text: &str) -> Result<ConfigOverrides, (usize, ConfigError)> {
        let mut out = ConfigOverrides::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err((
                    n + 1,
                    ConfigError::InvalidValue {
                        key: line.to_owned(),
                        value: String::new(),
                        reason: "expected `key = value`".into(),
                    },
                ));
            };
            out.set(key.trim(), value.trim()).map_err(|e| (n + 1, e))?;
        }
        Ok(out)
    }
}

impl fmt::Display for ConfigOverrides {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (key, value) in self.entries() {
            writeln!(f, "{key} = {value}")?;
        }
        Ok(())
    }
}
