//! Seeded test fields.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::grid::{GridSpec, ScalarField};
use crate::spectral;

/// White Gaussian noise, reproducible from `seed`.
pub fn random_field(grid: GridSpec, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    ScalarField::new(grid, values).expect("normal samples are finite")
}

/// White noise with the DC bin and every Nyquist-touching bin removed, so
/// every Riesz multiplier is well defined on its support.
pub fn bandlimited_random_field(grid: GridSpec, seed: u64) -> ScalarField {
    let mut spec = spectral::forward(&random_field(grid, seed));
    for flat in 0..grid.len() {
        let idx = grid.multi_index(flat);
        if flat == 0 || grid.touches_nyquist(&idx) {
            spec.values_mut()[flat] = Complex64::new(0.0, 0.0);
        }
    }
    spectral::inverse(&spec)
}

/// `exp(-|x|^2 / (2 sigma^2))`.
pub fn gaussian(grid: GridSpec, sigma: f64) -> ScalarField {
    ScalarField::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        (-r2 / (2.0 * sigma * sigma)).exp()
    })
    .expect("gaussian is finite")
}

/// Single unit sample at the origin.
pub fn delta(grid: GridSpec) -> ScalarField {
    let mut values = vec![0.0; grid.len()];
    let center = vec![grid.size() / 2; grid.dim()];
    values[grid.flat_index(&center).expect("center in range")] = 1.0;
    ScalarField::new(grid, values).expect("finite")
}
