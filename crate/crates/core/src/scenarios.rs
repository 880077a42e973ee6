//! Named presets for the channel table, the single-capsule snapshots and the
//! three-emitter shockwave.

use serde::Serialize;

use crate::channel::ChannelScenario;
use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::qic::{AxisSpec, GridSpec};
use crate::smearing::{Dimension, RadialSmearing};

pub const PRESET_NAMES: [&str; 3] = ["table1", "single", "shockwave"];

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioPreset {
    pub name: String,
    pub dimension: Dimension,
    /// Generators used for mode construction (for `table1`: sender first).
    pub generators: Vec<Generator>,
    pub channel: Option<ChannelScenario>,
    pub default_times: Vec<f64>,
    pub default_grid: GridSpec,
}

/// Published capacities (bits) of the `table1` preset in the subset order
/// `B1, B2, B3, B1B2, B2B3, B1B3, B1B2B3`.
pub const TABLE1_REFERENCE_3D: [f64; 7] = [0.0, 3.39083e-5, 0.0, 3.45126e-5, 3.73605e-5, 0.0, 3.79689e-5];
pub const TABLE1_REFERENCE_2D: [f64; 7] = [0.00167331, 0.00872886, 0.0, 0.0102214, 0.0140338, 0.00167926, 0.0154962];

pub fn table1_reference(d: Dimension) -> [f64; 7] {
    match d {
        Dimension::Two => TABLE1_REFERENCE_2D,
        Dimension::Three => TABLE1_REFERENCE_3D,
    }
}

fn origin(d: Dimension) -> Vec<f64> {
    vec![0.0; d.get()]
}

fn plane_grid(d: Dimension, x: AxisSpec, y: AxisSpec) -> GridSpec {
    let mut axes = vec![x, y];
    if d == Dimension::Three {
        axes.push(AxisSpec::Fixed(0.0));
    }
    GridSpec { axes }
}

pub fn table1_scenario(d: Dimension) -> ChannelScenario {
    let build = || -> Result<ChannelScenario> {
        let alice = Generator::new(RadialSmearing::hard_shell(0.0, 1.0, origin(d))?, 0.0, 1.0)?;
        let bobs = [(0.0, 0.9), (1.1, 2.9), (3.1, 4.0)]
            .iter()
            .map(|&(a, b)| Generator::new(RadialSmearing::hard_shell(a, b, origin(d))?, 2.0, 0.2))
            .collect::<Result<Vec<_>>>()?;
        ChannelScenario::new(alice, bobs)
    };
    build().expect("table1 preset is valid")
}

pub fn single_qic_scenario(d: Dimension) -> Vec<Generator> {
    let s = RadialSmearing::gaussian(0.2, origin(d)).expect("valid smearing");
    vec![Generator::new(s, 0.0, 1.0).expect("valid generator")]
}

pub fn shockwave_scenario(d: Dimension) -> Vec<Generator> {
    (1..=3)
        .map(|i| {
            let mut x = origin(d);
            x[0] = 5.0 + 1.5 * i as f64;
            Generator::new(RadialSmearing::gaussian(0.2, x).expect("valid smearing"), i as f64, 1.0)
                .expect("valid generator")
        })
        .collect()
}

pub fn preset(name: &str, d: Dimension) -> Result<ScenarioPreset> {
    let p = match name {
        "table1" => {
            let sc = table1_scenario(d);
            let mut generators = vec![sc.alice.clone()];
            generators.extend(sc.bobs.iter().cloned());
            ScenarioPreset {
                name: name.into(),
                dimension: d,
                generators,
                channel: Some(sc),
                default_times: vec![2.0],
                default_grid: plane_grid(
                    d,
                    AxisSpec::Range { min: -6.0, max: 6.0, step: 0.05 },
                    AxisSpec::Range { min: -6.0, max: 6.0, step: 0.05 },
                ),
            }
        }
        "single" => ScenarioPreset {
            name: name.into(),
            dimension: d,
            generators: single_qic_scenario(d),
            channel: None,
            default_times: vec![0.0, 2.0, 4.0],
            default_grid: plane_grid(
                d,
                AxisSpec::Range { min: -6.0, max: 6.0, step: 0.05 },
                AxisSpec::Range { min: -6.0, max: 6.0, step: 0.05 },
            ),
        },
        "shockwave" => ScenarioPreset {
            name: name.into(),
            dimension: d,
            generators: shockwave_scenario(d),
            channel: None,
            default_times: vec![8.0],
            default_grid: plane_grid(
                d,
                AxisSpec::Range { min: 0.0, max: 16.0, step: 0.1 },
                AxisSpec::Range { min: -8.0, max: 8.0, step: 0.1 },
            ),
        },
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}' (available: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(p)
}
