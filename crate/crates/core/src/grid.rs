//! Uniform isotropic sampling grids and the real/complex field containers
//! that live on them.
//!
//! Spatial samples are stored row-major with index `i` on each axis mapped to
//! the coordinate `(i - N/2) * dx`, so the origin sits at the grid center.
//! Spectra use the standard DFT bin layout: bin `k < N/2` is the frequency
//! `2 pi k / (N dx)`, bins `k >= N/2` wrap to negative frequencies. The
//! Nyquist bin `N/2` maps to `-pi / dx`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_SIZE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    size: usize,
    spacing: f64,
}

impl GridSpec {
    pub fn new(dim: usize, size: usize, spacing: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Config(format!(
                "dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if size < MIN_SIZE || !size.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid size must be a power of two >= {MIN_SIZE}, got {size}"
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Config(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        Ok(Self { dim, size, spacing })
    }

    /// Unit spacing grid, the normalization under which the wavelet band edge is the Nyquist radius.
    pub fn unit(dim: usize, size: usize) -> Result<Self> {
        Self::new(dim, size, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Total number of samples, `N^d`.
    pub fn len(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.size; self.dim]
    }

    /// Half-width of the spatial domain, `N dx / 2`.
    pub fn half_extent(&self) -> f64 {
        self.size as f64 * self.spacing / 2.0
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.spacing
    }

    /// Frequency of a single axis bin.
    pub fn freq_1d(&self, k: usize) -> f64 {
        let n = self.size as i64;
        let k = k as i64;
        let signed = if k < n / 2 { k } else { k - n };
        2.0 * PI * signed as f64 / (self.size as f64 * self.spacing)
    }

    /// Spatial coordinate of a single axis sample.
    pub fn coord_1d(&self, i: usize) -> f64 {
        (i as f64 - (self.size / 2) as f64) * self.spacing
    }

    /// Signed angular frequency of a bin.
    pub fn freq_coord(&self, index: &[usize]) -> Result<Vec<f64>> {
        self.check_index(index)?;
        Ok(index.iter().map(|&k| self.freq_1d(k)).collect())
    }

    pub fn spatial_coord(&self, index: &[usize]) -> Result<Vec<f64>> {
        self.check_index(index)?;
        Ok(index.iter().map(|&i| self.coord_1d(i)).collect())
    }

    /// Whether any component of the bin is the Nyquist bin `N/2`.
    pub fn touches_nyquist(&self, index: &[usize]) -> bool {
        index.contains(&(self.size / 2))
    }

    pub fn flat_index(&self, index: &[usize]) -> Result<usize> {
        self.check_index(index)?;
        Ok(index.iter().fold(0, |acc, &k| acc * self.size + k))
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut index = vec![0; self.dim];
        for slot in index.iter_mut().rev() {
            *slot = flat % self.size;
            flat /= self.size;
        }
        index
    }

    /// Visits every sample in storage order with its multi-index.
    pub fn for_each_index(&self, mut f: impl FnMut(usize, &[usize])) {
        let mut index = vec![0usize; self.dim];
        for flat in 0..self.len() {
            f(flat, &index);
            for slot in index.iter_mut().rev() {
                *slot += 1;
                if *slot < self.size {
                    break;
                }
                *slot = 0;
            }
        }
    }

    /// Frequency vectors of every bin in storage order, flattened `len * dim`.
    pub fn frequencies(&self) -> Vec<f64> {
        let axis: Vec<f64> = (0..self.size).map(|k| self.freq_1d(k)).collect();
        let mut out = Vec::with_capacity(self.len() * self.dim);
        self.for_each_index(|_, idx| out.extend(idx.iter().map(|&k| axis[k])));
        out
    }

    /// Radius `|omega|` of every bin in storage order.
    pub fn frequency_radii(&self) -> Vec<f64> {
        let axis: Vec<f64> = (0..self.size).map(|k| self.freq_1d(k)).collect();
        let mut out = Vec::with_capacity(self.len());
        self.for_each_index(|_, idx| {
            out.push(idx.iter().map(|&k| axis[k] * axis[k]).sum::<f64>().sqrt())
        });
        out
    }

    /// Radius `|x|` of every spatial sample in storage order.
    pub fn spatial_radii(&self) -> Vec<f64> {
        let axis: Vec<f64> = (0..self.size).map(|i| self.coord_1d(i)).collect();
        let mut out = Vec::with_capacity(self.len());
        self.for_each_index(|_, idx| {
            out.push(idx.iter().map(|&i| axis[i] * axis[i]).sum::<f64>().sqrt())
        });
        out
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::Shape(format!(
                "grid {self:?} does not match {other:?}"
            )));
        }
        Ok(())
    }

    fn check_index(&self, index: &[usize]) -> Result<()> {
        if index.len() != self.dim || index.iter().any(|&k| k >= self.size) {
            return Err(Error::Range {
                index: index.to_vec(),
                size: self.size,
            });
        }
        Ok(())
    }
}

/// Real samples of a function on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!(
                "non-finite sample at {:?}",
                grid.multi_index(pos)
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Samples `f` at every spatial coordinate.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let axis: Vec<f64> = (0..grid.size()).map(|i| grid.coord_1d(i)).collect();
        let mut values = Vec::with_capacity(grid.len());
        let mut x = vec![0.0; grid.dim()];
        grid.for_each_index(|_, idx| {
            for (slot, &i) in x.iter_mut().zip(idx) {
                *slot = axis[i];
            }
            values.push(f(&x));
        });
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at the origin sample.
    pub fn at_origin(&self) -> f64 {
        let center = vec![self.grid.size() / 2; self.grid.dim()];
        self.values[self.grid.flat_index(&center).expect("center is in range")]
    }

    /// Sum of squares, the discrete energy.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn inner(&self, other: &ScalarField) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// `|self - other| / |other|` in the discrete L2 norm.
    pub fn relative_l2_error(&self, reference: &ScalarField) -> Result<f64> {
        self.grid.ensure_same(&reference.grid)?;
        let diff: f64 = self
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok((diff / reference.energy()).sqrt())
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &ScalarField, b: f64) -> Result<ScalarField> {
        self.grid.ensure_same(&other.grid)?;
        Ok(ScalarField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }
}

/// Complex DFT coefficients indexed by frequency bin.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SpectrumField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "expected {} bins, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Index of the bin holding `-omega` for the bin at `flat`.
    pub fn mirror_flat(&self, flat: usize) -> usize {
        let n = self.grid.size();
        let idx = self.grid.multi_index(flat);
        idx.iter().fold(0, |acc, &k| acc * n + (n - k) % n)
    }

    /// Largest `|X(k) - conj(X(-k))|` relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let defect = (0..self.values.len())
            .map(|flat| (self.values[flat] - self.values[self.mirror_flat(flat)].conj()).norm())
            .fold(0.0, f64::max);
        defect / scale
    }

    /// Whether the spectrum is that of a real field, within `1e-12` relative.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= 1e-12
    }
}

/// One row of a radial shell table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub r_lo: f64,
    pub r_hi: f64,
    pub r_center: f64,
    pub max_abs: f64,
}

/// Supremum of `|f|` over concentric shells `[k w, (k+1) w)` covering `[0, N dx / 2)`.
/// Shells without samples are omitted.
pub fn shell_max(field: &ScalarField, shell_width: f64) -> Result<Vec<Shell>> {
    let grid = field.grid();
    if !(shell_width >= grid.spacing()) {
        return Err(Error::Argument(format!(
            "shell width {shell_width} is below the sample spacing {}",
            grid.spacing()
        )));
    }
    let r_max = grid.half_extent();
    let count = (r_max / shell_width).ceil() as usize;
    let mut maxima: Vec<Option<f64>> = vec![None; count];
    for (r, v) in grid.spatial_radii().into_iter().zip(field.values()) {
        if r >= r_max {
            continue;
        }
        let k = ((r / shell_width).floor() as usize).min(count - 1);
        let slot = &mut maxima[k];
        *slot = Some(slot.map_or(v.abs(), |m| m.max(v.abs())));
    }
    Ok(maxima
        .into_iter()
        .enumerate()
        .filter_map(|(k, m)| {
            m.map(|max_abs| {
                let r_lo = k as f64 * shell_width;
                let r_hi = (r_lo + shell_width).min(r_max);
                Shell {
                    r_lo,
                    r_hi,
                    r_center: 0.5 * (r_lo + r_hi),
                    max_abs,
                }
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn freq_coord_dft_layout() {
        let g = GridSpec::unit(1, 16).unwrap();
        assert_eq!(g.freq_coord(&[0]).unwrap(), vec![0.0]);
        assert_eq!(g.freq_coord(&[8]).unwrap(), vec![-PI]);
        assert!((g.freq_coord(&[1]).unwrap()[0] - PI / 8.0).abs() < 1e-15);
        assert!(matches!(g.freq_coord(&[16]), Err(Error::Range { .. })));
        assert!(matches!(g.freq_coord(&[1, 2]), Err(Error::Range { .. })));
    }

    #[test]
    fn nyquist_is_exactly_negative_edge() {
        for dx in [1.0, 0.5, 0.3, 2.0] {
            let g = GridSpec::new(1, 64, dx).unwrap();
            assert_eq!(g.freq_1d(32), -g.nyquist());
        }
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(0, 16, 1.0).is_err());
        assert!(GridSpec::new(4, 16, 1.0).is_err());
        assert!(GridSpec::new(2, 24, 1.0).is_err());
        assert!(GridSpec::new(2, 8, 1.0).is_err());
        assert!(GridSpec::new(2, 16, 0.0).is_err());
        assert!(GridSpec::new(2, 16, f64::NAN).is_err());
    }

    #[test]
    fn fields_reject_non_finite() {
        let g = GridSpec::unit(1, 16).unwrap();
        let mut v = vec![0.0; 16];
        v[3] = f64::INFINITY;
        assert!(ScalarField::new(g, v).is_err());
        assert!(ScalarField::new(g, vec![0.0; 15]).is_err());
    }

    #[test]
    fn shell_max_constant_field() {
        let g = GridSpec::unit(2, 32).unwrap();
        let f = ScalarField::from_fn(g, |_| 1.0).unwrap();
        let shells = shell_max(&f, 1.5).unwrap();
        assert!(!shells.is_empty());
        assert!(shells.iter().all(|s| s.max_abs == 1.0));
    }

    #[test]
    fn shell_max_delta() {
        let g = GridSpec::unit(2, 32).unwrap();
        let f = ScalarField::from_fn(g, |x| {
            if x.iter().all(|&c| c == 0.0) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let shells = shell_max(&f, 1.0).unwrap();
        assert_eq!(shells[0].max_abs, 1.0);
        assert!(shells[1..].iter().all(|s| s.max_abs == 0.0));
    }

    #[test]
    fn shell_max_power_law_1d() {
        let g = GridSpec::unit(1, 1024).unwrap();
        let f = ScalarField::from_fn(g, |x| (1.0 + x[0].abs()).powi(-3)).unwrap();
        let shells = shell_max(&f, 1.0).unwrap();
        assert_eq!(shells.len(), 512);
        for s in &shells {
            let oracle = (1.0 + s.r_lo).powi(-3);
            assert!((s.max_abs - oracle).abs() < 1e-12, "{s:?}");
        }
    }

    #[test]
    fn shell_width_precondition() {
        let g = GridSpec::new(1, 16, 2.0).unwrap();
        assert!(shell_max(&ScalarField::zeros(g), 1.0).is_err());
    }

    #[test]
    fn hermitian_check() {
        let g = GridSpec::unit(1, 16).unwrap();
        let mut s = SpectrumField::zeros(g);
        s.values_mut()[1] = Complex64::new(1.0, 2.0);
        s.values_mut()[15] = Complex64::new(1.0, -2.0);
        assert!(s.is_hermitian());
        s.values_mut()[15] = Complex64::new(1.0, 2.0);
        assert!(!s.is_hermitian());
    }

    proptest! {
        #[test]
        fn freq_coord_is_odd_off_dc_and_nyquist(log_n in 4u32..10, raw in 1usize..1024, dx in 0.1f64..3.0) {
            let n = 1usize << log_n;
            let k = 1 + raw % (n - 1);
            prop_assume!(k != n / 2);
            let g = GridSpec::new(1, n, dx).unwrap();
            prop_assert_eq!(g.freq_1d(k), -g.freq_1d(n - k));
            let w = g.freq_1d(k);
            prop_assert!(w >= -g.nyquist() && w < g.nyquist());
        }

        #[test]
        fn shell_max_monotone_for_decreasing_radial(p in 0.5f64..4.0, width in 1.0f64..5.0) {
            let g = GridSpec::unit(2, 32).unwrap();
            let f = ScalarField::from_fn(g, |x| (1.0 + x.iter().map(|c| c * c).sum::<f64>().sqrt()).powf(-p)).unwrap();
            let shells = shell_max(&f, width).unwrap();
            for pair in shells.windows(2) {
                prop_assert!(pair[1].max_abs <= pair[0].max_abs);
            }
        }

        #[test]
        fn flat_and_multi_index_agree(flat in 0usize..4096) {
            let g = GridSpec::unit(3, 16).unwrap();
            let idx = g.multi_index(flat);
            prop_assert_eq!(g.flat_index(&idx).unwrap(), flat);
        }
    }
}
