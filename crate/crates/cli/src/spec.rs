//! Sweep specifications and their flat `key = value` text form.
//!
//! Every family has a full set of defaults, so a config file only needs the
//! keys it changes. Keys:
//!
//! | key            | meaning                                             |
//! |----------------|-----------------------------------------------------|
//! | `name`         | label written to the `sweep_name` column            |
//! | `family`       | `pure_gaussian`, `squeezed_thermal`, `leakage`, `pcs`, `ecs`, `two_photon` |
//! | `start`, `stop`, `step` | inclusive range of the swept variable      |
//! | `kappa`        | thermal parameter in `(0, 1]`                       |
//! | `transmittance`| leakage transmittance in `[0, 1]`                   |
//! | `v_rule`       | `minus_u` (`v = -u`) or `zero` (`v = 0`)            |
//! | `q`            | pair-coherent photon-number difference             |
//! | `angles`       | `θ1,θ2,θ1′,θ2′` in radians, or `optimize`           |
//! | `density`      | grid points per angle when optimizing               |
//! | `backend`      | `gaussian`, `fock` or `auto`                        |
//! | `cutoff`       | per-mode Fock cutoff                                |
//!
//! The swept variable is fixed by the family: `u` for the Gaussian families,
//! `Re ζ` for `pcs`, `Re α` for `ecs`, and the state label (1 or 2) for
//! `two_photon`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use cvbell_core::bell::BellAngles;
use cvbell_core::fock::{MAX_CUTOFF, MAX_FOCK_SQUEEZE};
use cvbell_core::symplectic::MAX_SQUEEZE;

use crate::error::{CliError, Result};

/// Upper bound on the number of points in one sweep.
pub const MAX_POINTS: usize = 100_000;

macro_rules! keyword_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl FromStr for $name {
            type Err = CliError;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(CliError::spec(format!(
                        "unknown {} {s:?}; expected one of {}",
                        stringify!($name).to_lowercase(),
                        [$($text),+].join(", ")
                    ))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

keyword_enum!(Family {
    PureGaussian => "pure_gaussian",
    SqueezedThermal => "squeezed_thermal",
    Leakage => "leakage",
    Pcs => "pcs",
    Ecs => "ecs",
    TwoPhoton => "two_photon",
});

keyword_enum!(Backend {
    Gaussian => "gaussian",
    Fock => "fock",
    Auto => "auto",
});

keyword_enum!(VRule {
    MinusU => "minus_u",
    Zero => "zero",
});

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleChoice {
    Fixed(BellAngles),
    Optimize,
}

impl FromStr for AngleChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "optimize" {
            return Ok(AngleChoice::Optimize);
        }
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| parse_f64("angles", p))
            .collect::<Result<_>>()?;
        let [a, b, c, d] = parts[..] else {
            return Err(CliError::spec(format!(
                "angles needs four comma-separated values or \"optimize\", got {s:?}"
            )));
        };
        BellAngles::new(a, b, c, d)
            .map(AngleChoice::Fixed)
            .map_err(|e| CliError::spec(e.to_string()))
    }
}

impl fmt::Display for AngleChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngleChoice::Optimize => f.write_str("optimize"),
            AngleChoice::Fixed(a) => {
                let [x, y, z, w] = a.as_array();
                write!(f, "{x},{y},{z},{w}")
            }
        }
    }
}

/// One curve: a family, the range of its swept variable and everything held
/// fixed along it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub family: Family,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub kappa: f64,
    pub transmittance: f64,
    pub v_rule: VRule,
    pub q: usize,
    pub angles: AngleChoice,
    pub density: usize,
    pub backend: Backend,
    pub cutoff: usize,
}

/// Reference angles for the Gaussian families.
pub const GAUSSIAN_ANGLES: [f64; 4] = [1.32, 0.93, 3.66, 3.32];
/// Reference angles for entangled coherent states.
pub const ECS_ANGLES: [f64; 4] = [2.67, 5.59, 1.88, 3.24];

fn fixed(a: [f64; 4]) -> AngleChoice {
    AngleChoice::Fixed(BellAngles::new(a[0], a[1], a[2], a[3]).expect("finite angles"))
}

impl SweepSpec {
    /// The defaults for a family; each matches its preset.
    pub fn defaults(family: Family) -> Self {
        let base = SweepSpec {
            name: family.as_str().to_string(),
            family,
            start: 0.0,
            stop: 1.2,
            step: 0.01,
            kappa: 1.0,
            transmittance: 1.0,
            v_rule: VRule::MinusU,
            q: 0,
            angles: fixed(GAUSSIAN_ANGLES),
            density: 12,
            backend: Backend::Auto,
            cutoff: 40,
        };
        match family {
            Family::PureGaussian | Family::Leakage => base,
            Family::SqueezedThermal => SweepSpec { kappa: 0.8, ..base },
            Family::Pcs => SweepSpec {
                stop: 2.0,
                step: 0.1,
                angles: AngleChoice::Optimize,
                cutoff: 20,
                ..base
            },
            Family::Ecs => SweepSpec {
                start: 0.05,
                stop: 2.0,
                step: 0.05,
                angles: fixed(ECS_ANGLES),
                cutoff: 30,
                ..base
            },
            Family::TwoPhoton => SweepSpec {
                start: 1.0,
                stop: 2.0,
                step: 1.0,
                angles: AngleChoice::Optimize,
                cutoff: 2,
                ..base
            },
        }
    }

    /// Builds a spec from `key = value` pairs. `family` is required; the
    /// remaining keys override the family defaults in order.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let pairs: Vec<(&str, &str)> = pairs.into_iter().collect();
        let family = pairs
            .iter()
            .rev()
            .find(|(k, _)| *k == "family")
            .ok_or_else(|| CliError::spec("missing key \"family\""))?
            .1
            .parse()?;
        let mut spec = SweepSpec::defaults(family);
        for (k, v) in pairs {
            spec.set(k, v)?;
        }
        Ok(spec)
    }

    /// Overrides one key. Changing `family` is only allowed to the same
    /// value, since the defaults would no longer apply.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "name" => {
                if value.is_empty() || value.contains(['\n', '\r']) {
                    return Err(CliError::spec("name must be a nonempty single line"));
                }
                self.name = value.to_string();
            }
            "family" => {
                let f: Family = value.parse()?;
                if f != self.family {
                    return Err(CliError::spec(format!(
                        "family is {} and cannot be changed to {f}",
                        self.family
                    )));
                }
            }
            "start" => self.start = parse_f64(key, value)?,
            "stop" => self.stop = parse_f64(key, value)?,
            "step" => self.step = parse_f64(key, value)?,
            "kappa" => self.kappa = parse_f64(key, value)?,
            "transmittance" => self.transmittance = parse_f64(key, value)?,
            "v_rule" => self.v_rule = value.parse()?,
            "q" => self.q = parse_usize(key, value)?,
            "angles" => self.angles = value.parse()?,
            "density" => self.density = parse_usize(key, value)?,
            "backend" => self.backend = value.parse()?,
            "cutoff" => self.cutoff = parse_usize(key, value)?,
            other => return Err(CliError::spec(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key=value` overrides as given on the command line.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<()> {
        for o in overrides {
            let (k, v) = split_pair(o)?;
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Every key with its current value, for echoing into output metadata.
    pub fn to_pairs(&self) -> BTreeMap<&'static str, String> {
        BTreeMap::from([
            ("name", self.name.clone()),
            ("family", self.family.to_string()),
            ("start", self.start.to_string()),
            ("stop", self.stop.to_string()),
            ("step", self.step.to_string()),
            ("kappa", self.kappa.to_string()),
            ("transmittance", self.transmittance.to_string()),
            ("v_rule", self.v_rule.to_string()),
            ("q", self.q.to_string()),
            ("angles", self.angles.to_string()),
            ("density", self.density.to_string()),
            ("backend", self.backend.to_string()),
            ("cutoff", self.cutoff.to_string()),
        ])
    }

    /// The backend actually used for this family.
    pub fn resolved_backend(&self) -> Backend {
        match (self.backend, self.family) {
            (Backend::Auto, Family::PureGaussian | Family::SqueezedThermal | Family::Leakage) => {
                Backend::Gaussian
            }
            (Backend::Auto, _) => Backend::Fock,
            (b, _) => b,
        }
    }

    /// The swept values in order. The range is inclusive; the endpoint is
    /// kept when it lies within a relative 1e-9 of a step.
    pub fn values(&self) -> Result<Vec<f64>> {
        let (a, b, h) = (self.start, self.stop, self.step);
        if !(h > 0.0) || !h.is_finite() {
            return Err(CliError::spec(format!("step must be positive, got {h}")));
        }
        if !(a <= b) {
            return Err(CliError::spec(format!("empty range [{a}, {b}]")));
        }
        let span = (b - a) / h;
        if span >= MAX_POINTS as f64 {
            return Err(CliError::spec(format!(
                "range has more than {MAX_POINTS} points"
            )));
        }
        let n = (span + 1e-9).floor() as usize;
        // rounding to 12 digits keeps labels like 0.3 free of 0.30000000000000004
        Ok((0..=n)
            .map(|k| ((a + k as f64 * h) * 1e12).round() / 1e12)
            .collect())
    }

    /// Checks ranges and the family/backend pairing.
    pub fn validate(&self) -> Result<()> {
        let values = self.values()?;
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return Err(CliError::spec(format!("kappa must be in (0, 1], got {}", self.kappa)));
        }
        if !(0.0..=1.0).contains(&self.transmittance) {
            return Err(CliError::spec(format!(
                "transmittance must be in [0, 1], got {}",
                self.transmittance
            )));
        }
        if self.density < 4 {
            return Err(CliError::spec(format!("density must be at least 4, got {}", self.density)));
        }
        if self.cutoff == 0 || self.cutoff > MAX_CUTOFF {
            return Err(CliError::spec(format!(
                "cutoff must be in 1..={MAX_CUTOFF}, got {}",
                self.cutoff
            )));
        }
        let backend = self.resolved_backend();
        let reject = |why: &str| Err(CliError::spec(format!("{} with backend {backend}: {why}", self.family)));
        let extremum = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        match self.family {
            Family::PureGaussian | Family::SqueezedThermal | Family::Leakage => {
                if extremum > MAX_SQUEEZE {
                    return Err(CliError::spec(format!("|u| must not exceed {MAX_SQUEEZE}")));
                }
                if backend == Backend::Fock {
                    if self.family != Family::PureGaussian {
                        return reject("mixed Gaussian states are only evaluated in phase space");
                    }
                    if extremum > MAX_FOCK_SQUEEZE {
                        return reject(&format!("|u| must not exceed {MAX_FOCK_SQUEEZE}"));
                    }
                }
            }
            Family::Pcs | Family::Ecs | Family::TwoPhoton => {
                if backend == Backend::Gaussian {
                    return reject("the state is not Gaussian");
                }
            }
        }
        match self.family {
            Family::Pcs if self.q > self.cutoff => {
                Err(CliError::spec(format!("q = {} exceeds cutoff {}", self.q, self.cutoff)))
            }
            Family::Ecs if values.contains(&0.0) => {
                Err(CliError::spec("ecs needs Re α != 0 at every point"))
            }
            Family::TwoPhoton if values.iter().any(|v| *v != 1.0 && *v != 2.0) => {
                Err(CliError::spec("two_photon sweeps the state label, which must be 1 or 2"))
            }
            Family::TwoPhoton if self.cutoff < 2 => {
                Err(CliError::spec("two_photon needs cutoff >= 2"))
            }
            _ => Ok(()),
        }
    }
}

/// Parses flat `key = value` text. Blank lines and lines starting with `#`
/// are skipped.
pub fn parse_config(text: &str) -> Result<SweepSpec> {
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::spec(format!("line {}: expected key = value", n + 1)))?;
        pairs.push((k.trim(), v.trim()));
    }
    SweepSpec::from_pairs(pairs)
}

pub fn split_pair(s: &str) -> Result<(&str, &str)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| CliError::spec(format!("expected key=value, got {s:?}")))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| CliError::spec(format!("{key}: {v:?} is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::spec(format!("{key} must be finite")));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| CliError::spec(format!("{key}: {v:?} is not a nonnegative integer")))
}
