//! Unitary multidimensional DFT and pointwise Fourier multipliers.
//!
//! `forward` treats the spatial sample at the grid center as the origin, so
//! the spectrum of a real field that is even about the origin is real.
//! Both directions scale by `N^{-d/2}`, which makes the transform unitary:
//! `sum |f|^2 == sum |F|^2`.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, SpectrumField};

/// A Fourier multiplier `omega -> m(omega)`.
pub trait Multiplier: Sync {
    fn eval(&self, omega: &[f64]) -> Complex64;

    /// Value at a concrete grid bin. Multipliers that need the bin layout
    /// (for example to treat the Nyquist bin specially) override this.
    fn eval_bin(&self, _grid: &GridSpec, _index: &[usize], omega: &[f64]) -> Complex64 {
        self.eval(omega)
    }
}

impl<F> Multiplier for F
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    fn eval(&self, omega: &[f64]) -> Complex64 {
        self(omega)
    }
}

/// Constant multiplier.
#[derive(Debug, Clone, Copy)]
pub struct Constant(pub Complex64);

impl Multiplier for Constant {
    fn eval(&self, _omega: &[f64]) -> Complex64 {
        self.0
    }
}

/// Spectral partial derivative `j omega_axis` (0-based axis).
#[derive(Debug, Clone, Copy)]
pub struct Derivative {
    pub axis: usize,
}

impl Multiplier for Derivative {
    fn eval(&self, omega: &[f64]) -> Complex64 {
        Complex64::new(0.0, omega[self.axis])
    }
}

fn transform_in_place(grid: &GridSpec, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.size();
    let d = grid.dim();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft(n, direction);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        let outer = grid.len() / (n * stride);
        for o in 0..outer {
            for s in 0..stride {
                let base = o * n * stride + s;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
    let scale = 1.0 / (grid.len() as f64).sqrt();
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Cyclic shift by `N/2` on every axis. It is its own inverse for even `N`.
fn half_shift<T: Copy>(grid: &GridSpec, data: &[T]) -> Vec<T> {
    let n = grid.size();
    let half = n / 2;
    let mut out = data.to_vec();
    grid.for_each_index(|flat, idx| {
        let target = idx.iter().fold(0, |acc, &k| acc * n + (k + half) % n);
        out[target] = data[flat];
    });
    out
}

pub fn forward(field: &ScalarField) -> SpectrumField {
    let grid = *field.grid();
    let mut data: Vec<Complex64> = half_shift(&grid, field.values())
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    transform_in_place(&grid, &mut data, FftDirection::Forward);
    SpectrumField::new(grid, data).expect("length preserved")
}

/// Forward transform of complex spatial samples laid out like a [`ScalarField`].
pub fn forward_complex(grid: &GridSpec, values: &[Complex64]) -> Result<SpectrumField> {
    if values.len() != grid.len() {
        return Err(Error::Shape(format!(
            "expected {} samples, got {}",
            grid.len(),
            values.len()
        )));
    }
    let mut data = half_shift(grid, values);
    transform_in_place(grid, &mut data, FftDirection::Forward);
    SpectrumField::new(*grid, data)
}

/// Full complex inverse transform, in spatial storage order.
pub fn inverse_complex(spec: &SpectrumField) -> Vec<Complex64> {
    let grid = *spec.grid();
    let mut data = spec.values().to_vec();
    transform_in_place(&grid, &mut data, FftDirection::Inverse);
    half_shift(&grid, &data)
}

/// Real part of the inverse transform.
pub fn inverse(spec: &SpectrumField) -> ScalarField {
    let values = inverse_complex(spec).into_iter().map(|v| v.re).collect();
    ScalarField::new(*spec.grid(), values).expect("inverse of finite spectrum is finite")
}

/// Inverse transform together with the largest imaginary part relative to
/// the largest real part.
pub fn inverse_with_residue(spec: &SpectrumField) -> (ScalarField, f64) {
    let full = inverse_complex(spec);
    let max_re = full.iter().map(|v| v.re.abs()).fold(0.0, f64::max);
    let max_im = full.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    let residue = if max_re > 0.0 {
        max_im / max_re
    } else {
        max_im
    };
    let values = full.into_iter().map(|v| v.re).collect();
    (
        ScalarField::new(*spec.grid(), values).expect("inverse of finite spectrum is finite"),
        residue,
    )
}

/// Evaluates `m` at every bin of `grid`, in storage order.
pub fn multiplier_table(grid: &GridSpec, m: &dyn Multiplier) -> Result<Vec<Complex64>> {
    let axis: Vec<f64> = (0..grid.size()).map(|k| grid.freq_1d(k)).collect();
    let mut omega = vec![0.0; grid.dim()];
    let mut table = Vec::with_capacity(grid.len());
    let mut bad: Option<(Vec<usize>, Vec<f64>)> = None;
    grid.for_each_index(|_, idx| {
        for (slot, &k) in omega.iter_mut().zip(idx) {
            *slot = axis[k];
        }
        let v = m.eval_bin(grid, idx, &omega);
        if bad.is_none() && !(v.re.is_finite() && v.im.is_finite()) {
            bad = Some((idx.to_vec(), omega.clone()));
        }
        table.push(v);
    });
    match bad {
        Some((bin, omega)) => Err(Error::NonFinite { bin, omega }),
        None => Ok(table),
    }
}

pub fn apply_multiplier(spec: &SpectrumField, m: &dyn Multiplier) -> Result<SpectrumField> {
    let table = multiplier_table(spec.grid(), m)?;
    apply_table(spec, &table)
}

/// Bin-wise product with a precomputed multiplier table.
pub fn apply_table(spec: &SpectrumField, table: &[Complex64]) -> Result<SpectrumField> {
    if table.len() != spec.values().len() {
        return Err(Error::Shape(format!(
            "multiplier table has {} bins, spectrum has {}",
            table.len(),
            spec.values().len()
        )));
    }
    let values = spec
        .values()
        .iter()
        .zip(table)
        .map(|(v, m)| v * m)
        .collect();
    SpectrumField::new(*spec.grid(), values)
}

/// `inverse(m * forward(f))`.
pub fn filter(field: &ScalarField, m: &dyn Multiplier) -> Result<ScalarField> {
    Ok(inverse(&apply_multiplier(&forward(field), m)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: GridSpec, seed: u64) -> ScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ScalarField::new(
            grid,
            (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn round_trip_2d() {
        let g = GridSpec::unit(2, 128).unwrap();
        let f = random_field(g, 1);
        let back = inverse(&forward(&f));
        assert!(back.relative_l2_error(&f).unwrap() < 1e-12);
    }

    #[test]
    fn round_trip_3d() {
        let g = GridSpec::unit(3, 16).unwrap();
        let f = random_field(g, 2);
        assert!(inverse(&forward(&f)).relative_l2_error(&f).unwrap() < 1e-12);
    }

    #[test]
    fn parseval() {
        let g = GridSpec::unit(2, 64).unwrap();
        let f = random_field(g, 5);
        let s = forward(&f);
        assert!((f.energy() - s.energy()).abs() / f.energy() < 1e-12);
    }

    #[test]
    fn even_field_has_real_spectrum() {
        let g = GridSpec::unit(1, 64).unwrap();
        let f =
            ScalarField::from_fn(g, |x| (-x[0] * x[0] / 20.0).exp() * (1.0 + x[0].abs())).unwrap();
        let s = forward(&f);
        assert!(s.values().iter().all(|v| v.im.abs() < 1e-12));
        assert!(s.is_hermitian());
    }

    #[test]
    fn dc_bin_is_scaled_sum() {
        let g = GridSpec::unit(1, 16).unwrap();
        let f = ScalarField::from_fn(g, |_| 1.0).unwrap();
        let s = forward(&f);
        assert!((s.values()[0].re - 4.0).abs() < 1e-14);
    }

    #[test]
    fn identity_and_zero_multipliers() {
        let g = GridSpec::unit(2, 32).unwrap();
        let s = forward(&random_field(g, 7));
        let same = apply_multiplier(&s, &Constant(Complex64::new(1.0, 0.0))).unwrap();
        assert_eq!(same, s);
        let zero = apply_multiplier(&s, &Constant(Complex64::new(0.0, 0.0))).unwrap();
        assert!(zero.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn non_finite_multiplier_reports_bin() {
        let g = GridSpec::unit(1, 16).unwrap();
        let s = forward(&random_field(g, 8));
        let m = |w: &[f64]| Complex64::new(1.0 / w[0], 0.0);
        match apply_multiplier(&s, &m) {
            Err(Error::NonFinite { bin, omega }) => {
                assert_eq!(bin, vec![0]);
                assert_eq!(omega, vec![0.0]);
            }
            other => panic!("expected numeric error, got {other:?}"),
        }
    }

    #[test]
    fn derivative_of_gaussian() {
        // x in [-32, 32) with spacing 1/8: the Gaussian is resolved well inside the band
        let g = GridSpec::new(1, 512, 0.125).unwrap();
        let f = ScalarField::from_fn(g, |x| (-x[0] * x[0] / 2.0).exp()).unwrap();
        let df = filter(&f, &Derivative { axis: 0 }).unwrap();
        let oracle = ScalarField::from_fn(g, |x| -x[0] * (-x[0] * x[0] / 2.0).exp()).unwrap();
        for i in 128..384 {
            assert!(
                (df.values()[i] - oracle.values()[i]).abs() < 1e-8,
                "sample {i}"
            );
        }
    }

    #[test]
    fn hermitian_multiplier_keeps_fields_real() {
        let g = GridSpec::unit(2, 32).unwrap();
        let s = forward(&random_field(g, 9));
        // real even symbol
        let m = |w: &[f64]| Complex64::new((-(w[0] * w[0] + w[1] * w[1])).exp(), 0.0);
        let (_, residue) = inverse_with_residue(&apply_multiplier(&s, &m).unwrap());
        assert!(residue < 1e-11);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0, seed in 0u64..1000) {
            let g = GridSpec::unit(2, 16).unwrap();
            let f = random_field(g, seed);
            let h = random_field(g, seed + 1);
            let m = |w: &[f64]| Complex64::new(w[0].cos(), w[1].sin());
            let lhs = filter(&f.combine(a, &h, b).unwrap(), &m).unwrap();
            let rhs = filter(&f, &m).unwrap().combine(a, &filter(&h, &m).unwrap(), b).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
        }

        #[test]
        fn composition(seed in 0u64..1000) {
            let g = GridSpec::unit(1, 64).unwrap();
            let s = forward(&random_field(g, seed));
            let m1 = |w: &[f64]| Complex64::new(w[0].cos(), w[0]);
            let m2 = |w: &[f64]| Complex64::new(1.0, -w[0].sin());
            let m12 = |w: &[f64]| m1(w) * m2(w);
            let seq = apply_multiplier(&apply_multiplier(&s, &m1).unwrap(), &m2).unwrap();
            let fused = apply_multiplier(&s, &m12).unwrap();
            let diff = seq.values().iter().zip(fused.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prop_assert!(diff < 1e-12);
        }
    }
}
