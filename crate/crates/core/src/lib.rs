//! Quantum information capsules seeded in a massless scalar field by
//! instantaneously coupled Unruh-DeWitt detectors, and the classical channel
//! capacities between a sender and an array of receivers.

// NaN must fail range checks, hence `!(x > 0.0)`; reference constants keep
// every digit they were computed with.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod asymptotic;
pub mod channel;
pub mod error;
pub mod field_kernel;
pub mod generator;
pub mod qic;
pub mod quadrature;
pub mod scenarios;
pub mod smearing;
pub mod special;
pub mod validation;

pub use error::{Error, Result};
pub use field_kernel::{
    mode_function, mode_function_dt, mode_function_pair, pairing, pairing_matrix, KernelOptions, KernelValue,
    ModeFunctionSample, PairingMatrix,
};
pub use generator::Generator;
pub use smearing::{ft_oracle, radial_ft, spatial_eval, Channel, Dimension, RadialSmearing, SmearingKind};
pub use channel::{
    capacity, capacity_table, capacity_table_from, joint_distribution, joint_distribution_from, marginalize,
    mutual_information, CapacityResult, ChannelPairings, ChannelScenario, DetectorSubset, GeometryClass, LogBase,
    OutcomeDistribution, SubsetCapacity,
};
pub use qic::{
    build_qic, build_qic_from_pairing, weighting_grid, weighting_grid_all, AxisSpec, ExtendedGram, FieldGrid, GridSpec,
    QicModeSet,
};
pub use validation::{orthogonal_probe, run_validation, CheckOutcome, ValidationReport};
pub use scenarios::{
    preset, shockwave_scenario, single_qic_scenario, table1_reference, table1_scenario, ScenarioPreset, PRESET_NAMES,
};
