//! Radially symmetric detector smearings and their Fourier transforms,
//! `v(k) = int d^dx v(x) exp(i k.x) = rho(|k|) exp(i k.x0)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotic::WaveSeries;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::special::bessel_j1_over_x;

/// Spatial dimension of the field theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dimension {
    Two,
    Three,
}

impl Dimension {
    pub fn get(self) -> usize {
        match self {
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }
}

impl TryFrom<u8> for Dimension {
    type Error = Error;
    fn try_from(d: u8) -> Result<Self> {
        match d {
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            _ => Err(Error::Config(format!("dimension must be 2 or 3, got {d}"))),
        }
    }
}

impl From<Dimension> for u8 {
    fn from(d: Dimension) -> u8 {
        d.get() as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmearingKind {
    Gaussian { sigma: f64 },
    HardShell { r_inner: f64, r_outer: f64 },
}

/// Which conjugate variable the detector couples to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    #[default]
    Field,
    Momentum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSmearing {
    kind: SmearingKind,
    center: Vec<f64>,
    dimension: Dimension,
    channel: Channel,
}

impl RadialSmearing {
    pub fn new(kind: SmearingKind, center: Vec<f64>, channel: Channel) -> Result<Self> {
        let dimension = Dimension::try_from(center.len() as u8)
            .map_err(|_| Error::Config(format!("center must have 2 or 3 coordinates, got {}", center.len())))?;
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("center must be finite".into()));
        }
        match kind {
            SmearingKind::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                return Err(Error::Config(format!("gaussian width must be positive, got {sigma}")))
            }
            SmearingKind::HardShell { r_inner, r_outer }
                if !(r_inner >= 0.0 && r_inner < r_outer && r_outer.is_finite()) =>
            {
                return Err(Error::Config(format!(
                    "hard shell needs 0 <= r_inner < r_outer, got ({r_inner}, {r_outer})"
                )))
            }
            _ => {}
        }
        Ok(Self { kind, center, dimension, channel })
    }

    pub fn gaussian(sigma: f64, center: Vec<f64>) -> Result<Self> {
        Self::new(SmearingKind::Gaussian { sigma }, center, Channel::Field)
    }

    pub fn hard_shell(r_inner: f64, r_outer: f64, center: Vec<f64>) -> Result<Self> {
        Self::new(SmearingKind::HardShell { r_inner, r_outer }, center, Channel::Field)
    }

    pub fn kind(&self) -> SmearingKind {
        self.kind
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    /// Outer radius of the support, `None` for a Gaussian.
    pub fn support_radius(&self) -> Option<f64> {
        match self.kind {
            SmearingKind::Gaussian { .. } => None,
            SmearingKind::HardShell { r_outer, .. } => Some(r_outer),
        }
    }

    /// Radius beyond which the profile is negligible (8 sigma for Gaussians).
    pub fn effective_radius(&self) -> f64 {
        match self.kind {
            SmearingKind::Gaussian { sigma } => 8.0 * sigma,
            SmearingKind::HardShell { r_outer, .. } => r_outer,
        }
    }

    pub fn require_field(&self) -> Result<()> {
        match self.channel {
            Channel::Field => Ok(()),
            Channel::Momentum => Err(Error::UnsupportedChannel(
                "momentum-coupled smearings are not supported by the quadrature engine".into(),
            )),
        }
    }

    /// Same profile moved to a new center.
    pub fn recentered(&self, center: Vec<f64>) -> Result<Self> {
        Self::new(self.kind, center, self.channel)
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// The smearing function at a spatial point.
pub fn spatial_eval(s: &RadialSmearing, x: &[f64]) -> Result<f64> {
    if x.len() != s.center.len() {
        return Err(Error::Config(format!(
            "point has {} coordinates, smearing lives in {} dimensions",
            x.len(),
            s.center.len()
        )));
    }
    let r = distance(x, &s.center);
    Ok(match s.kind {
        SmearingKind::Gaussian { sigma } => (-r * r / (2.0 * sigma * sigma)).exp(),
        SmearingKind::HardShell { r_inner, r_outer } => {
            if r_inner < r && r < r_outer {
                1.0
            } else {
                0.0
            }
        }
    })
}

/// Fourier transform of the solid ball of radius `r` in three dimensions.
pub(crate) fn ball_ft(k: f64, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let a = k * r;
    if a < 1.0 {
        // 4 pi r^3 sum_{n>=1} (-1)^{n+1} 2n a^{2n-2} / (2n+1)!
        let a2 = a * a;
        let mut fact = 6.0; // (2n+1)!
        let mut power = 1.0; // a^{2n-2}
        let mut sum = 0.0;
        for n in 1..=12 {
            let nf = n as f64;
            if n > 1 {
                fact *= (2.0 * nf) * (2.0 * nf + 1.0);
                power *= a2;
            }
            let term = 2.0 * nf * power / fact;
            sum += if n % 2 == 1 { term } else { -term };
        }
        4.0 * PI * r * r * r * sum
    } else {
        let (s, c) = a.sin_cos();
        4.0 * PI * (s - a * c) / (k * k * k)
    }
}

/// Fourier transform of the disk of radius `r` in two dimensions.
pub(crate) fn disk_ft(k: f64, r: f64) -> f64 {
    2.0 * PI * r * r * bessel_j1_over_x(k * r)
}

/// Real radial factor `rho(k)` of the Fourier transform.
pub fn radial_ft(s: &RadialSmearing, k: f64) -> Result<f64> {
    s.require_field()?;
    if !(k >= 0.0) {
        return Err(Error::Config(format!("wavenumber must be non-negative, got {k}")));
    }
    let d = s.dimension.get() as i32;
    Ok(match (s.kind, s.dimension) {
        (SmearingKind::Gaussian { sigma }, _) => {
            (2.0 * PI * sigma * sigma).powf(0.5 * d as f64) * (-0.5 * sigma * sigma * k * k).exp()
        }
        (SmearingKind::HardShell { r_inner, r_outer }, Dimension::Three) => {
            ball_ft(k, r_outer) - ball_ft(k, r_inner)
        }
        (SmearingKind::HardShell { r_inner, r_outer }, Dimension::Two) => {
            disk_ft(k, r_outer) - if r_inner > 0.0 { disk_ft(k, r_inner) } else { 0.0 }
        }
    })
}

/// Large-k expansion of `radial_ft` for hard shells. Gaussians decay faster
/// than any power and return `None`.
pub fn ft_asymptotics(s: &RadialSmearing, hankel_terms: usize) -> Result<Option<WaveSeries>> {
    s.require_field()?;
    let SmearingKind::HardShell { r_inner, r_outer } = s.kind else {
        return Ok(None);
    };
    let one = |r: f64| -> WaveSeries {
        if r == 0.0 {
            return WaveSeries::default();
        }
        match s.dimension {
            // 4 pi (sin kr - kr cos kr) / k^3
            Dimension::Three => WaveSeries::sine(r, 3.0)
                .minus(&WaveSeries::cosine(r, 2.0).scale(Complex64::new(r, 0.0)))
                .scale(Complex64::new(4.0 * PI, 0.0)),
            // 2 pi r J1(kr) / k
            Dimension::Two => WaveSeries::bessel_j(1.0, r, hankel_terms)
                .shift_power(1.0)
                .scale(Complex64::new(2.0 * PI * r, 0.0)),
        }
    };
    Ok(Some(one(r_outer).minus(&one(r_inner))))
}

/// Direct spatial quadrature of `int d^dx v(x) exp(i k.x)` in polar or
/// spherical coordinates with the polar axis along `k`. Test oracle only.
pub fn ft_oracle(s: &RadialSmearing, k_vec: &[f64]) -> Result<Complex64> {
    if k_vec.len() != s.center.len() {
        return Err(Error::Config("wavevector dimension mismatch".into()));
    }
    let k = k_vec.iter().map(|x| x * x).sum::<f64>().sqrt();
    let phase = Complex64::from_polar(1.0, k_vec.iter().zip(&s.center).map(|(a, b)| a * b).sum());
    let (r_lo, r_hi) = match s.kind {
        SmearingKind::Gaussian { sigma } => (0.0, sigma * (2.0f64 * 42.0).sqrt()),
        SmearingKind::HardShell { r_inner, r_outer } => (r_inner, r_outer),
    };
    let profile = |r: f64| match s.kind {
        SmearingKind::Gaussian { sigma } => (-r * r / (2.0 * sigma * sigma)).exp(),
        SmearingKind::HardShell { .. } => 1.0,
    };
    let inner_opts = QuadOptions { rel_tol: 1e-13, abs_tol: 1e-300, max_intervals: 20_000 };
    let outer_opts = QuadOptions { rel_tol: 1e-12, abs_tol: 1e-300, max_intervals: 20_000 };
    let d = s.dimension;
    let angular = |r: f64| -> Result<Complex64> {
        let kr = k * r;
        let panels = (kr / PI).ceil() as usize + 1;
        let est = match d {
            Dimension::Three => integrate(
                |th: f64| [th.sin() * Complex64::from_polar(1.0, kr * th.cos())],
                0.0,
                PI,
                panels,
                &inner_opts,
            )?,
            Dimension::Two => integrate(
                |th: f64| [Complex64::from_polar(1.0, kr * th.cos())],
                0.0,
                2.0 * PI,
                2 * panels,
                &inner_opts,
            )?,
        };
        let azimuth = if d == Dimension::Three { 2.0 * PI } else { 1.0 };
        Ok(est.value[0] * azimuth)
    };
    let failure = std::cell::Cell::new(None);
    let radial_power = (d.get() - 1) as i32;
    let panels = (k * (r_hi - r_lo) / PI).ceil() as usize + 4;
    let est = integrate(
        |r: f64| match angular(r) {
            Ok(a) => [a * profile(r) * r.powi(radial_power)],
            Err(e) => {
                failure.set(Some(e));
                [Complex64::new(0.0, 0.0)]
            }
        },
        r_lo,
        r_hi,
        panels,
        &outer_opts,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(est.value[0] * phase)
}
