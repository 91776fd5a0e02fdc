//! Built-in presets. Each preset is a list of curves.

use crate::error::{CliError, Result};
use crate::spec::{Family, SweepSpec, VRule};

pub const PRESETS: &[&str] = &[
    "fig-pure",
    "fig-thermal",
    "fig-leakage",
    "fig-pcs",
    "fig-ecs",
    "two-photon",
];

fn curve(name: &str, family: Family, edit: impl FnOnce(&mut SweepSpec)) -> SweepSpec {
    let mut s = SweepSpec::defaults(family);
    s.name = name.to_string();
    edit(&mut s);
    s
}

pub fn preset(name: &str) -> Result<Vec<SweepSpec>> {
    let specs = match name {
        "fig-pure" => vec![
            curve("fig-pure/v=-u", Family::PureGaussian, |_| {}),
            curve("fig-pure/v=0", Family::PureGaussian, |s| s.v_rule = VRule::Zero),
        ],
        "fig-thermal" => [1.0, 0.8, 0.7]
            .iter()
            .map(|&k| curve(&format!("fig-thermal/kappa={k}"), Family::SqueezedThermal, |s| s.kappa = k))
            .collect(),
        "fig-leakage" => [1.0, 0.8, 0.6]
            .iter()
            .map(|&t| curve(&format!("fig-leakage/T={t}"), Family::Leakage, |s| s.transmittance = t))
            .collect(),
        "fig-pcs" => vec![curve("fig-pcs/q=0", Family::Pcs, |_| {})],
        "fig-ecs" => vec![curve("fig-ecs", Family::Ecs, |_| {})],
        "two-photon" => vec![curve("two-photon", Family::TwoPhoton, |_| {})],
        other => {
            return Err(CliError::spec(format!(
                "unknown preset {other:?}; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(specs)
}
