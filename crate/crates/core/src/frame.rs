//! Undecimated steerable frame: a lowpass and highpass residual plus, for
//! every dyadic scale `k`, one channel per multi-index `alpha` of the chosen
//! Riesz order, filtered by `m_alpha(omega) psi_k(|omega|)`.
//!
//! The radial channels satisfy `L^2 + H^2 + sum_k psi_k^2 = 1` on every bin
//! and the Riesz symbols of one order satisfy `sum_alpha |m_alpha|^2 = 1`, so
//! synthesis with the conjugate filters inverts analysis exactly.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, SpectrumField};
use crate::io;
use crate::profiles::{ChannelProfiles, ProfileSpec};
use crate::riesz::{MultiIndex, RieszMultiplier};
use crate::spectral;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub scales: usize,
    pub riesz_order: usize,
    pub profile: ProfileSpec,
    pub grid: GridSpec,
}

impl FrameSpec {
    pub fn new(
        grid: GridSpec,
        profile: ProfileSpec,
        scales: usize,
        riesz_order: usize,
    ) -> Result<Self> {
        let spec = Self {
            scales,
            riesz_order,
            profile,
            grid,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scales == 0 {
            return Err(Error::Config("at least one scale is required".into()));
        }
        if self.riesz_order > crate::riesz::MAX_ORDER {
            return Err(Error::Config(format!(
                "Riesz order {} exceeds {}",
                self.riesz_order,
                crate::riesz::MAX_ORDER
            )));
        }
        if self.grid.spacing() > 1.0 {
            return Err(Error::Config(format!(
                "spacing {} puts the band edge pi beyond the Nyquist frequency",
                self.grid.spacing()
            )));
        }
        let (lo, _) = self.profile.wavelet().support();
        let coarsest = lo * 2f64.powi(-(self.scales as i32 - 1));
        let first_bin =
            2.0 * std::f64::consts::PI / (self.grid.size() as f64 * self.grid.spacing());
        if coarsest < first_bin {
            return Err(Error::Config(format!(
                "{} scales push the coarsest band edge {coarsest:.4} below the first frequency bin {first_bin:.4}",
                self.scales
            )));
        }
        Ok(())
    }

    pub fn alphas(&self) -> Vec<MultiIndex> {
        MultiIndex::of_order(self.grid.dim(), self.riesz_order)
    }

    /// `2 + J * C(n + d - 1, d - 1)`.
    pub fn channel_count(&self) -> usize {
        2 + self.scales * self.alphas().len()
    }

    pub fn channel_profiles(&self) -> ChannelProfiles {
        ChannelProfiles::new(self.profile.wavelet(), self.scales).expect("validated scales")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelId {
    Lowpass,
    Highpass,
    Band { scale: usize, alpha: MultiIndex },
}

impl ChannelId {
    /// File stem for the channel, prefixed by `tag`.
    pub fn file_stem(&self, tag: &str) -> String {
        match self {
            ChannelId::Lowpass => format!("{tag}_lowpass"),
            ChannelId::Highpass => format!("{tag}_highpass"),
            ChannelId::Band { scale, alpha } => format!("{tag}_scale{scale}_alpha{}", alpha.tag()),
        }
    }
}

/// Per-bin filter tables for a frame.
struct FilterBank {
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
    scales: Vec<Vec<f64>>,
    riesz: Vec<(MultiIndex, Vec<Complex64>)>,
}

impl FilterBank {
    fn new(spec: &FrameSpec) -> Result<Self> {
        let profiles = spec.channel_profiles();
        let radii = spec.grid.frequency_radii();
        let mut lowpass = Vec::with_capacity(radii.len());
        let mut highpass = Vec::with_capacity(radii.len());
        let mut scales = vec![Vec::with_capacity(radii.len()); spec.scales];
        for &r in &radii {
            let values = profiles.scale_values(r);
            let c = profiles.complements(r, &values);
            lowpass.push(c.lowpass);
            highpass.push(c.highpass);
            for (table, v) in scales.iter_mut().zip(values) {
                table.push(v);
            }
        }
        let riesz = spec
            .alphas()
            .into_iter()
            .map(|alpha| {
                let m = RieszMultiplier::any_order(alpha.clone());
                spectral::multiplier_table(&spec.grid, &m).map(|t| (alpha, t))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            lowpass,
            highpass,
            scales,
            riesz,
        })
    }

    fn ids(&self) -> Vec<ChannelId> {
        let mut ids = vec![ChannelId::Lowpass, ChannelId::Highpass];
        for scale in 0..self.scales.len() {
            for (alpha, _) in &self.riesz {
                ids.push(ChannelId::Band {
                    scale,
                    alpha: alpha.clone(),
                });
            }
        }
        ids
    }

    fn filter(&self, id: &ChannelId) -> Vec<Complex64> {
        match id {
            ChannelId::Lowpass => self
                .lowpass
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
            ChannelId::Highpass => self
                .highpass
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
            ChannelId::Band { scale, alpha } => {
                let (_, table) = self
                    .riesz
                    .iter()
                    .find(|(a, _)| a == alpha)
                    .expect("alpha belongs to the frame");
                self.scales[*scale]
                    .iter()
                    .zip(table)
                    .map(|(&psi, m)| m * psi)
                    .collect()
            }
        }
    }
}

/// Spectrum of the analysis filter for one channel.
pub fn channel_filter(spec: &FrameSpec, id: &ChannelId) -> Result<SpectrumField> {
    spec.validate()?;
    let bank = FilterBank::new(spec)?;
    if !bank.ids().contains(id) {
        return Err(Error::Argument(format!(
            "{id:?} is not a channel of this frame"
        )));
    }
    SpectrumField::new(spec.grid, bank.filter(id))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub scale: usize,
    pub alpha: MultiIndex,
    pub field: ScalarField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameChannels {
    pub spec: FrameSpec,
    pub lowpass: ScalarField,
    pub highpass: ScalarField,
    /// Scale-major, colexicographic in `alpha` within a scale.
    pub bands: Vec<Band>,
}

impl FrameChannels {
    pub fn len(&self) -> usize {
        2 + self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All channels in canonical order, with their ids.
    pub fn iter(&self) -> impl Iterator<Item = (ChannelId, &ScalarField)> {
        [
            (ChannelId::Lowpass, &self.lowpass),
            (ChannelId::Highpass, &self.highpass),
        ]
        .into_iter()
        .chain(self.bands.iter().map(|b| {
            (
                ChannelId::Band {
                    scale: b.scale,
                    alpha: b.alpha.clone(),
                },
                &b.field,
            )
        }))
    }

    pub fn energy(&self) -> f64 {
        self.iter().map(|(_, f)| f.energy()).sum()
    }

    pub fn zeros(spec: FrameSpec) -> Result<Self> {
        spec.validate()?;
        let zero = ScalarField::zeros(spec.grid);
        let bands = (0..spec.scales)
            .flat_map(|scale| {
                let zero = zero.clone();
                spec.alphas().into_iter().map(move |alpha| Band {
                    scale,
                    alpha,
                    field: zero.clone(),
                })
            })
            .collect();
        Ok(Self {
            spec,
            lowpass: zero.clone(),
            highpass: zero,
            bands,
        })
    }

    fn check_consistent(&self) -> Result<()> {
        self.spec.validate()?;
        if self.len() != self.spec.channel_count() {
            return Err(Error::Shape(format!(
                "{} channels for a frame with {}",
                self.len(),
                self.spec.channel_count()
            )));
        }
        let expected: Vec<ChannelId> = FilterBank::new(&self.spec)?.ids();
        for ((id, field), want) in self.iter().zip(expected) {
            if id != want {
                return Err(Error::Shape(format!(
                    "channel {id:?} where {want:?} was expected"
                )));
            }
            self.spec.grid.ensure_same(field.grid())?;
        }
        Ok(())
    }

    /// Writes every channel as a field file plus a `<tag>_frame.json` manifest.
    pub fn write(&self, dir: impl AsRef<Path>, tag: &str) -> Result<()> {
        let dir = dir.as_ref();
        for (id, field) in self.iter() {
            io::write_scalar(field, dir.join(id.file_stem(tag)))?;
        }
        let manifest = dir.join(format!("{tag}_frame.json"));
        let json = serde_json::to_string_pretty(&self.spec).expect("spec serializes");
        std::fs::write(&manifest, json + "\n").map_err(|e| Error::io(&manifest, e))
    }

    pub fn read(dir: impl AsRef<Path>, tag: &str) -> Result<Self> {
        let dir = dir.as_ref();
        let manifest = dir.join(format!("{tag}_frame.json"));
        let text = std::fs::read_to_string(&manifest).map_err(|e| Error::io(&manifest, e))?;
        let spec: FrameSpec = serde_json::from_str(&text).map_err(|e| Error::MalformedHeader {
            path: manifest.clone(),
            reason: e.to_string(),
        })?;
        spec.validate()?;
        let load = |id: &ChannelId| io::read_scalar(dir.join(id.file_stem(tag)));
        let lowpass = load(&ChannelId::Lowpass)?;
        let highpass = load(&ChannelId::Highpass)?;
        let mut bands = Vec::new();
        for scale in 0..spec.scales {
            for alpha in spec.alphas() {
                let field = load(&ChannelId::Band {
                    scale,
                    alpha: alpha.clone(),
                })?;
                bands.push(Band {
                    scale,
                    alpha,
                    field,
                });
            }
        }
        let ch = Self {
            spec,
            lowpass,
            highpass,
            bands,
        };
        ch.check_consistent()?;
        Ok(ch)
    }
}

pub fn analyze(field: &ScalarField, spec: &FrameSpec) -> Result<FrameChannels> {
    spec.validate()?;
    spec.grid.ensure_same(field.grid())?;
    let bank = FilterBank::new(spec)?;
    let input = spectral::forward(field);
    let ids = bank.ids();
    let outputs: Vec<ScalarField> = ids
        .par_iter()
        .map(|id| spectral::apply_table(&input, &bank.filter(id)).map(|s| spectral::inverse(&s)))
        .collect::<Result<_>>()?;
    let mut outputs = outputs.into_iter();
    let lowpass = outputs.next().expect("lowpass");
    let highpass = outputs.next().expect("highpass");
    let bands = ids[2..]
        .iter()
        .zip(outputs)
        .map(|(id, field)| match id {
            ChannelId::Band { scale, alpha } => Band {
                scale: *scale,
                alpha: alpha.clone(),
                field,
            },
            _ => unreachable!("bands follow the two residual channels"),
        })
        .collect();
    Ok(FrameChannels {
        spec: *spec,
        lowpass,
        highpass,
        bands,
    })
}

/// Adjoint of [`analyze`]. Channel spectra are accumulated in canonical order.
pub fn synthesize(channels: &FrameChannels) -> Result<ScalarField> {
    channels.check_consistent()?;
    let spec = &channels.spec;
    let bank = FilterBank::new(spec)?;
    let fields: Vec<(ChannelId, &ScalarField)> = channels.iter().collect();
    let contributions: Vec<SpectrumField> = fields
        .par_iter()
        .map(|(id, field)| {
            let conj: Vec<Complex64> = bank.filter(id).into_iter().map(|m| m.conj()).collect();
            spectral::apply_table(&spectral::forward(field), &conj)
        })
        .collect::<Result<_>>()?;
    let mut acc = SpectrumField::zeros(spec.grid);
    for c in &contributions {
        for (a, v) in acc.values_mut().iter_mut().zip(c.values()) {
            *a += v;
        }
    }
    Ok(spectral::inverse(&acc))
}

/// Per-bin `L^2 + H^2 + sum_k psi_k^2 - 1`, laid out in frequency-bin order.
pub fn tightness_map(spec: &FrameSpec) -> Result<ScalarField> {
    spec.validate()?;
    let profiles = spec.channel_profiles();
    let values = spec
        .grid
        .frequency_radii()
        .into_iter()
        .map(|r| profiles.total_energy(r) - 1.0)
        .collect();
    ScalarField::new(spec.grid, values)
}
