//! Radial frequency profiles: the original Simoncelli wavelet, its
//! Meyer-windowed modification, and the lowpass/highpass complements that
//! close a finite set of dyadic scales into an exact partition of unity.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SpectrumField};
use crate::window::{MeyerWindow, WindowSpec};

/// A function of the frequency radius `|omega|`.
pub trait RadialProfile: Sync {
    fn eval(&self, r: f64) -> f64;
}

impl<F> RadialProfile for F
where
    F: Fn(f64) -> f64 + Sync,
{
    fn eval(&self, r: f64) -> f64 {
        self(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    SimoncelliOriginal,
    SimoncelliModified,
    Lowpass,
    Highpass,
}

/// `cos(pi/2 log2(2 w / pi))` on `(pi/4, pi]`, zero elsewhere.
pub fn simoncelli_original(w: f64) -> f64 {
    if w > PI / 4.0 && w <= PI {
        (FRAC_PI_2 * (2.0 * w / PI).log2()).cos()
    } else {
        0.0
    }
}

/// `theta(z) cos(pi/2 z)` at `z = log2(2^(1+eps) w / pi)`. Supported on
/// `(pi 2^(-2-2 eps), pi)`.
pub fn simoncelli_modified(w: f64, window: &MeyerWindow) -> f64 {
    let eps = window.transition();
    // the log2 round trip can land a hair inside the support at either edge
    if w <= PI * 2f64.powf(-2.0 - 2.0 * eps) || w >= PI {
        return 0.0;
    }
    let z = (2f64.powf(1.0 + eps) * w / PI).log2();
    let t = window.theta(z);
    if t == 0.0 {
        return 0.0;
    }
    t * (FRAC_PI_2 * z).cos()
}

/// A dyadic wavelet profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveletProfile {
    Original,
    Modified(MeyerWindow),
}

impl WaveletProfile {
    pub fn modified(spec: WindowSpec) -> Self {
        WaveletProfile::Modified(MeyerWindow::new(spec))
    }

    pub fn kind(&self) -> ProfileKind {
        match self {
            WaveletProfile::Original => ProfileKind::SimoncelliOriginal,
            WaveletProfile::Modified(_) => ProfileKind::SimoncelliModified,
        }
    }

    pub fn window(&self) -> Option<WindowSpec> {
        match self {
            WaveletProfile::Original => None,
            WaveletProfile::Modified(w) => Some(w.spec()),
        }
    }

    /// Open lower and closed upper support edge `(r_lo, r_hi]`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            WaveletProfile::Original => (PI / 4.0, PI),
            WaveletProfile::Modified(w) => (PI * 2f64.powf(-2.0 - 2.0 * w.transition()), PI),
        }
    }
}

impl RadialProfile for WaveletProfile {
    fn eval(&self, r: f64) -> f64 {
        match self {
            WaveletProfile::Original => simoncelli_original(r),
            WaveletProfile::Modified(w) => simoncelli_modified(r, w),
        }
    }
}

impl fmt::Display for WaveletProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WaveletProfile::Original => f.write_str("original"),
            WaveletProfile::Modified(w) => write!(
                f,
                "modified(n={}, eps={})",
                w.spec().smoothness,
                w.transition()
            ),
        }
    }
}

/// Serializable description of a wavelet profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Original,
    Modified(WindowSpec),
}

impl ProfileSpec {
    pub fn wavelet(&self) -> WaveletProfile {
        match self {
            ProfileSpec::Original => WaveletProfile::Original,
            ProfileSpec::Modified(w) => WaveletProfile::modified(*w),
        }
    }
}

impl From<WaveletProfile> for ProfileSpec {
    fn from(p: WaveletProfile) -> Self {
        match p {
            WaveletProfile::Original => ProfileSpec::Original,
            WaveletProfile::Modified(w) => ProfileSpec::Modified(w.spec()),
        }
    }
}

/// `sum_{k=k_lo}^{k_hi} profile(2^k w)^2`.
pub fn truncated_scale_sum(profile: &dyn RadialProfile, w: f64, k_lo: i32, k_hi: i32) -> f64 {
    (k_lo..=k_hi)
        .map(|k| profile.eval(2f64.powi(k) * w).powi(2))
        .sum()
}

/// Smallest range of `k` such that every `2^k w` landing in `(r_lo, r_hi]` is included.
pub fn covering_scales(support: (f64, f64), w: f64) -> (i32, i32) {
    let (lo, hi) = support;
    let k_lo = (lo / w).log2().floor() as i32;
    let k_hi = (hi / w).log2().ceil() as i32;
    (k_lo, k_hi)
}

/// Channel of a discrete frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Lowpass,
    Wavelet(usize),
    Highpass,
}

/// `{L, psi_0, ..., psi_{J-1}, H}` with `psi_k(w) = profile(2^k w)` and
/// complements chosen so that `L^2 + sum psi_k^2 + H^2 = 1` at every radius.
///
/// Energy the scales leave uncovered above `split` (twice the profile's lower
/// support edge, where the next finer dilation would start) goes to `H`;
/// everything still missing below it goes to `L`. Radii beyond the profile
/// support, such as grid corners in `d >= 2`, are entirely highpass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelProfiles {
    wavelet: WaveletProfile,
    scales: usize,
    split: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelValues {
    pub lowpass: f64,
    pub highpass: f64,
}

impl ChannelProfiles {
    pub fn new(wavelet: WaveletProfile, scales: usize) -> Result<Self> {
        if scales == 0 {
            return Err(Error::Config("at least one scale is required".into()));
        }
        Ok(Self {
            wavelet,
            scales,
            split: 2.0 * wavelet.support().0,
        })
    }

    pub fn wavelet(&self) -> &WaveletProfile {
        &self.wavelet
    }

    pub fn scales(&self) -> usize {
        self.scales
    }

    pub fn channels(&self) -> Vec<Channel> {
        std::iter::once(Channel::Lowpass)
            .chain((0..self.scales).map(Channel::Wavelet))
            .chain(std::iter::once(Channel::Highpass))
            .collect()
    }

    pub fn scale(&self, k: usize, r: f64) -> f64 {
        self.wavelet.eval(2f64.powi(k as i32) * r)
    }

    /// Wavelet values at each scale, in scale order.
    pub fn scale_values(&self, r: f64) -> Vec<f64> {
        (0..self.scales).map(|k| self.scale(k, r)).collect()
    }

    pub fn complements(&self, r: f64, scale_values: &[f64]) -> ChannelValues {
        let covered: f64 = scale_values.iter().map(|v| v * v).sum();
        let highpass = if r > self.split {
            (1.0 - covered).clamp(0.0, 1.0).sqrt()
        } else {
            0.0
        };
        let lowpass = (1.0 - covered - highpass * highpass).clamp(0.0, 1.0).sqrt();
        ChannelValues { lowpass, highpass }
    }

    pub fn eval(&self, channel: Channel, r: f64) -> f64 {
        match channel {
            Channel::Wavelet(k) => self.scale(k, r),
            Channel::Lowpass => self.complements(r, &self.scale_values(r)).lowpass,
            Channel::Highpass => self.complements(r, &self.scale_values(r)).highpass,
        }
    }

    /// `L^2 + sum psi_k^2 + H^2` at radius `r`.
    pub fn total_energy(&self, r: f64) -> f64 {
        let values = self.scale_values(r);
        let c = self.complements(r, &values);
        c.lowpass * c.lowpass + values.iter().map(|v| v * v).sum::<f64>() + c.highpass * c.highpass
    }

    pub fn evaluator(&self, channel: Channel) -> ChannelProfile<'_> {
        ChannelProfile {
            profiles: self,
            channel,
        }
    }

    /// The radial evaluators `{L, psi_0, ..., psi_{J-1}, H}`.
    pub fn evaluators(&self) -> Vec<ChannelProfile<'_>> {
        self.channels()
            .into_iter()
            .map(|c| self.evaluator(c))
            .collect()
    }
}

pub fn build_channel_profiles(wavelet: WaveletProfile, scales: usize) -> Result<ChannelProfiles> {
    ChannelProfiles::new(wavelet, scales)
}

#[derive(Debug, Clone, Copy)]
pub struct ChannelProfile<'a> {
    profiles: &'a ChannelProfiles,
    channel: Channel,
}

impl ChannelProfile<'_> {
    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn kind(&self) -> ProfileKind {
        match self.channel {
            Channel::Lowpass => ProfileKind::Lowpass,
            Channel::Highpass => ProfileKind::Highpass,
            Channel::Wavelet(_) => self.profiles.wavelet.kind(),
        }
    }
}

impl RadialProfile for ChannelProfile<'_> {
    fn eval(&self, r: f64) -> f64 {
        self.profiles.eval(self.channel, r)
    }
}

/// Real spectrum with bin value `profile(|omega|)`.
pub fn sample_radial(profile: &dyn RadialProfile, grid: &GridSpec) -> SpectrumField {
    let values = grid
        .frequency_radii()
        .into_iter()
        .map(|r| Complex64::new(profile.eval(r), 0.0))
        .collect();
    SpectrumField::new(*grid, values).expect("one value per bin")
}

/// `omega,value` table on `samples` equispaced radii in `[0, r_max]`.
pub fn write_profile_csv(
    profile: &dyn RadialProfile,
    r_max: f64,
    samples: usize,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("omega,value\n");
    let last = samples.max(2) - 1;
    for i in 0..=last {
        let r = r_max * i as f64 / last as f64;
        out.push_str(&format!("{r:.17e},{:.17e}\n", profile.eval(r)));
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| Error::io(path, e))
}
