use serde::Serialize;

use crate::error::{Error, Result};
use crate::smearing::{Dimension, RadialSmearing};

/// One instantaneous detector coupling: the smeared field operator `O_i`
/// switched on by `delta(t - t_i)` with strength `lambda_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Generator {
    pub smearing: RadialSmearing,
    pub time: f64,
    pub coupling: f64,
    /// Detector energy gap; carried along, no result depends on it.
    pub gap: f64,
}

impl Generator {
    pub fn new(smearing: RadialSmearing, time: f64, coupling: f64) -> Result<Self> {
        if !time.is_finite() || !coupling.is_finite() {
            return Err(Error::Config("coupling time and strength must be finite".into()));
        }
        Ok(Self { smearing, time, coupling, gap: 1.0 })
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.gap = gap;
        self
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn dimension(&self) -> Dimension {
        self.smearing.dimension()
    }
}
