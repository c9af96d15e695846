//! Numerical checks on sampled wavelets: power-law decay fits on shell
//! maxima, moment tables, spectral flatness at the origin, the Poisson
//! kernel oracle and ordering verdicts between decay fits.
//!
//! Fields produced by an inverse DFT are periodic, so spatial tails wrap
//! around. Decay fits are therefore restricted to radii of at most a quarter
//! of the grid extent, and every fit carries a note saying so.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{shell_max, GridSpec, ScalarField, Shell, SpectrumField};
use crate::riesz::MultiIndex;

/// Shell maxima below this are treated as underflow and skipped by fits.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// Largest supported total moment degree.
pub const MAX_MOMENT_DEGREE: usize = 8;

/// Number of standard errors separating a claim from its threshold before a
/// verdict is anything other than inconclusive.
pub const VERDICT_Z: f64 = 2.0;

const PERIODIZATION_NOTE: &str = "field is periodic on the grid; the exponent only describes \
                                  decay inside fit_range";

/// Least-squares power law `log max|f| ~ exponent * log r + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub intercept: f64,
    pub fit_range: (f64, f64),
    /// RMS of the regression residuals in log space.
    pub residual: f64,
    pub slope_stderr: f64,
    pub shells_used: usize,
    pub caveat: String,
}

/// `[8 dx, N dx / 8]`.
pub fn default_fit_range(grid: &GridSpec) -> (f64, f64) {
    (
        8.0 * grid.spacing(),
        grid.size() as f64 * grid.spacing() / 8.0,
    )
}

fn check_fit_range(grid: &GridSpec, (lo, hi): (f64, f64)) -> Result<()> {
    let limit = grid.size() as f64 * grid.spacing() / 4.0;
    if !(lo > 0.0 && lo < hi && hi <= limit) {
        return Err(Error::Argument(format!(
            "fit range [{lo}, {hi}] must satisfy 0 < r_min < r_max <= {limit}"
        )));
    }
    Ok(())
}

/// Shells that intersect `fit_range` and lie above the underflow floor.
pub fn decay_shells(
    field: &ScalarField,
    shell_width: f64,
    fit_range: (f64, f64),
) -> Result<Vec<Shell>> {
    check_fit_range(field.grid(), fit_range)?;
    let (lo, hi) = fit_range;
    Ok(shell_max(field, shell_width)?
        .into_iter()
        .filter(|s| s.r_hi > lo && s.r_lo < hi && s.max_abs >= UNDERFLOW_FLOOR)
        .collect())
}

pub fn decay_fit(field: &ScalarField, shell_width: f64, fit_range: (f64, f64)) -> Result<DecayFit> {
    let shells = decay_shells(field, shell_width, fit_range)?;
    if shells.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} usable shells in [{}, {}], need at least 4",
            shells.len(),
            fit_range.0,
            fit_range.1
        )));
    }
    let xs: Vec<f64> = shells.iter().map(|s| s.r_center.ln()).collect();
    let ys: Vec<f64> = shells.iter().map(|s| s.max_abs.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();

    // A flat profile reports exactly zero rather than rounding noise.
    let flat = ys.iter().all(|&y| y == ys[0]);
    let (exponent, intercept) = if flat {
        (0.0, ys[0])
    } else {
        (sxy / sxx, my - sxy / sxx * mx)
    };
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - exponent * x - intercept).powi(2))
        .sum();
    Ok(DecayFit {
        exponent,
        intercept,
        fit_range,
        residual: (ssr / n).sqrt(),
        slope_stderr: (ssr / (n - 2.0) / sxx).sqrt(),
        shells_used: shells.len(),
        caveat: PERIODIZATION_NOTE.to_string(),
    })
}

/// One row of a decay table as written to CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub r: f64,
    pub max_abs: f64,
    pub log_r: f64,
    pub log_max: f64,
}

pub fn decay_table(
    field: &ScalarField,
    shell_width: f64,
    fit_range: (f64, f64),
) -> Result<Vec<DecayRow>> {
    Ok(decay_shells(field, shell_width, fit_range)?
        .into_iter()
        .map(|s| DecayRow {
            r: s.r_center,
            max_abs: s.max_abs,
            log_r: s.r_center.ln(),
            log_max: s.max_abs.ln(),
        })
        .collect())
}

/// CSV with columns `r,max_abs,log_r,log_max`.
pub fn write_decay_csv(rows: &[DecayRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("r,max_abs,log_r,log_max\n");
    for row in rows {
        out.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{:.17e}\n",
            row.r, row.max_abs, row.log_r, row.log_max
        ));
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| Error::io(path, e))
}

/// Riemann sum `sum x^beta f(x) dx^d` together with the sum of absolute
/// terms, which is the scale the cancellation is measured against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub beta: MultiIndex,
    pub value: f64,
    pub abs_scale: f64,
    /// `|value| / abs_scale`, or 0 when the integrand vanishes identically.
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub beta_max: usize,
    /// Samples with every `|x_i|` above this radius were excluded.
    pub radius: Option<f64>,
    pub l1_norm: f64,
    pub rows: Vec<MomentRow>,
}

impl MomentTable {
    pub fn get(&self, beta: &MultiIndex) -> Option<&MomentRow> {
        self.rows.iter().find(|r| &r.beta == beta)
    }

    pub fn max_relative(&self) -> f64 {
        self.rows.iter().map(|r| r.relative).fold(0.0, f64::max)
    }
}

/// All moments with `|beta| <= beta_max` over the whole grid.
pub fn moments(field: &ScalarField, beta_max: usize) -> Result<MomentTable> {
    moment_table(field, beta_max, None)
}

/// Moments restricted to the box `max_i |x_i| <= radius`.
pub fn moments_within(field: &ScalarField, beta_max: usize, radius: f64) -> Result<MomentTable> {
    if !(radius > 0.0) {
        return Err(Error::Argument(format!(
            "moment radius {radius} must be positive"
        )));
    }
    moment_table(field, beta_max, Some(radius))
}

fn moment_table(field: &ScalarField, beta_max: usize, radius: Option<f64>) -> Result<MomentTable> {
    if beta_max > MAX_MOMENT_DEGREE {
        return Err(Error::Argument(format!(
            "moment degree {beta_max} exceeds {MAX_MOMENT_DEGREE}"
        )));
    }
    let grid = *field.grid();
    let d = grid.dim();
    let cell = grid.spacing().powi(d as i32);
    let betas: Vec<MultiIndex> = (0..=beta_max)
        .flat_map(|k| MultiIndex::of_order(d, k))
        .collect();
    let mut value = vec![0.0; betas.len()];
    let mut abs_scale = vec![0.0; betas.len()];
    let mut l1 = 0.0;
    // powers[i][p] = x_i^p for the current sample
    let mut powers = vec![[0.0f64; MAX_MOMENT_DEGREE + 1]; d];
    let values = field.values();
    grid.for_each_index(|flat, idx| {
        let f = values[flat];
        for (axis, &i) in idx.iter().enumerate() {
            let x = grid.coord_1d(i);
            if let Some(r) = radius {
                if x.abs() > r {
                    return;
                }
            }
            let p = &mut powers[axis];
            p[0] = 1.0;
            for k in 1..=beta_max {
                p[k] = p[k - 1] * x;
            }
        }
        l1 += f.abs() * cell;
        for (j, beta) in betas.iter().enumerate() {
            let mono: f64 = beta
                .components()
                .iter()
                .enumerate()
                .map(|(axis, &b)| powers[axis][b])
                .product();
            let term = mono * f * cell;
            value[j] += term;
            abs_scale[j] += term.abs();
        }
    });
    let rows = betas
        .into_iter()
        .zip(value.into_iter().zip(abs_scale))
        .map(|(beta, (value, abs_scale))| MomentRow {
            beta,
            value,
            abs_scale,
            relative: if abs_scale > 0.0 {
                value.abs() / abs_scale
            } else {
                0.0
            },
        })
        .collect();
    Ok(MomentTable {
        beta_max,
        radius,
        l1_norm: l1,
        rows,
    })
}

/// Largest `|spectrum|` over bins with `|omega| <= radius`.
pub fn spectrum_flatness_near_zero(spec: &SpectrumField, radius: f64) -> Result<f64> {
    if !(radius < PI / 4.0) {
        return Err(Error::Argument(format!(
            "radius {radius} must be below pi/4"
        )));
    }
    let mut best: Option<f64> = None;
    for (r, v) in spec.grid().frequency_radii().into_iter().zip(spec.values()) {
        if r <= radius {
            best = Some(best.unwrap_or(0.0).max(v.norm()));
        }
    }
    best.ok_or_else(|| Error::InsufficientData(format!("no frequency bins within radius {radius}")))
}

/// `s / (2 pi (s^2 + |x|^2)^{3/2})`.
pub fn poisson_kernel(x: &[f64], s: f64) -> f64 {
    let r2: f64 = x.iter().map(|c| c * c).sum();
    s / (2.0 * PI * (s * s + r2).powf(1.5))
}

/// Sampled Poisson kernel with the shapes `x_i / (s^2 + |x|^2)^{3/2}` of its
/// Riesz components. The shapes carry no constant; it is fitted with
/// [`calibrate`].
#[derive(Debug, Clone)]
pub struct PoissonOracle {
    pub s: f64,
    pub kernel: ScalarField,
    pub riesz_shapes: Vec<ScalarField>,
}

pub fn poisson_oracle(grid: GridSpec, s: f64) -> Result<PoissonOracle> {
    if grid.dim() != 2 {
        return Err(Error::Argument(format!(
            "the Poisson oracle is two-dimensional, grid has dimension {}",
            grid.dim()
        )));
    }
    if !(s >= 4.0 * grid.spacing()) {
        return Err(Error::Argument(format!(
            "scale s = {s} is below four sample spacings ({})",
            4.0 * grid.spacing()
        )));
    }
    let kernel = ScalarField::from_fn(grid, |x| poisson_kernel(x, s))?;
    let riesz_shapes = (0..2)
        .map(|axis| {
            ScalarField::from_fn(grid, |x| {
                let r2: f64 = x.iter().map(|c| c * c).sum();
                x[axis] / (s * s + r2).powf(1.5)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PoissonOracle {
        s,
        kernel,
        riesz_shapes,
    })
}

/// Flat indices with every `|x_i| < half_width`.
pub fn central_box(grid: &GridSpec, half_width: f64) -> Vec<usize> {
    let mut out = Vec::new();
    grid.for_each_index(|flat, idx| {
        if idx.iter().all(|&i| grid.coord_1d(i).abs() < half_width) {
            out.push(flat);
        }
    });
    out
}

/// Least-squares `c` minimizing `|numerical - c * shape|` over `region`.
pub fn calibrate(numerical: &ScalarField, shape: &ScalarField, region: &[usize]) -> Result<f64> {
    numerical.grid().ensure_same(shape.grid())?;
    let (a, b) = (numerical.values(), shape.values());
    let num: f64 = region.iter().map(|&i| a[i] * b[i]).sum();
    let den: f64 = region.iter().map(|&i| b[i] * b[i]).sum();
    if den == 0.0 {
        return Err(Error::InsufficientData(
            "shape vanishes on the region".into(),
        ));
    }
    Ok(num / den)
}

/// `rms(numerical - c * shape) / rms(numerical)` over `region`.
pub fn relative_rms(
    numerical: &ScalarField,
    shape: &ScalarField,
    c: f64,
    region: &[usize],
) -> Result<f64> {
    numerical.grid().ensure_same(shape.grid())?;
    let (a, b) = (numerical.values(), shape.values());
    let err: f64 = region.iter().map(|&i| (a[i] - c * b[i]).powi(2)).sum();
    let norm: f64 = region.iter().map(|&i| a[i] * a[i]).sum();
    if norm == 0.0 {
        return Err(Error::InsufficientData(
            "numerical field vanishes on the region".into(),
        ));
    }
    Ok((err / norm).sqrt())
}

/// Numerical `R_axis p` against the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub axis: usize,
    pub s: f64,
    pub constant: f64,
    pub half_width: f64,
    pub samples: usize,
    pub relative_rms: f64,
}

/// Compares over the central box `|x_i| < N dx / 8`, a quarter of the grid
/// span per axis, using `constant` or a fresh least-squares fit when `None`.
pub fn compare_poisson(
    oracle: &PoissonOracle,
    axis: usize,
    numerical: &ScalarField,
    constant: Option<f64>,
) -> Result<OracleComparison> {
    let shape = oracle.riesz_shapes.get(axis).ok_or_else(|| {
        Error::Argument(format!("axis {axis} out of range for the Poisson oracle"))
    })?;
    let grid = *shape.grid();
    let half_width = grid.size() as f64 * grid.spacing() / 8.0;
    let region = central_box(&grid, half_width);
    let constant = match constant {
        Some(c) => c,
        None => calibrate(numerical, shape, &region)?,
    };
    Ok(OracleComparison {
        axis,
        s: oracle.s,
        constant,
        half_width,
        samples: region.len(),
        relative_rms: relative_rms(numerical, shape, constant, &region)?,
    })
}

/// A decay fit with a display label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub label: String,
    pub fit: DecayFit,
}

/// Ordering requirement between two labelled fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    /// `exponent(faster) <= exponent(slower) - margin`.
    Faster {
        faster: String,
        slower: String,
        margin: f64,
    },
    /// `|exponent(a) - exponent(b)| <= tol`.
    Within { a: String, b: String, tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
    Tie,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Tie => "tie",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimOutcome {
    pub claim: Claim,
    pub verdict: Verdict,
    /// Signed distance from the threshold; positive means the claim holds.
    pub slack: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayComparison {
    /// Labels and exponents, fastest decay first.
    pub ranking: Vec<(String, f64)>,
    pub outcomes: Vec<ClaimOutcome>,
    pub summary: String,
}

impl DecayComparison {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.verdict == Verdict::Holds)
    }
}

fn judge(slack: f64, stderr: f64) -> Verdict {
    if slack >= VERDICT_Z * stderr {
        Verdict::Holds
    } else if slack <= -VERDICT_Z * stderr {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    }
}

pub fn decay_comparison(fits: &[NamedFit], claims: &[Claim]) -> Result<DecayComparison> {
    if let Some(first) = fits.first() {
        if let Some(other) = fits.iter().find(|f| f.fit.fit_range != first.fit.fit_range) {
            return Err(Error::Argument(format!(
                "fit '{}' uses range {:?}, expected {:?}",
                other.label, other.fit.fit_range, first.fit.fit_range
            )));
        }
    }
    let lookup = |label: &str| {
        fits.iter()
            .find(|f| f.label == label)
            .map(|f| &f.fit)
            .ok_or_else(|| Error::Argument(format!("no decay fit labelled '{label}'")))
    };
    let mut outcomes = Vec::with_capacity(claims.len());
    for claim in claims {
        let outcome = match claim {
            Claim::Faster {
                faster,
                slower,
                margin,
            } => {
                let (f, s) = (lookup(faster)?, lookup(slower)?);
                let stderr = f.slope_stderr.hypot(s.slope_stderr);
                let slack = s.exponent - margin - f.exponent;
                let verdict = if f.exponent == s.exponent {
                    Verdict::Tie
                } else {
                    judge(slack, stderr)
                };
                ClaimOutcome {
                    claim: claim.clone(),
                    verdict,
                    slack,
                    stderr,
                }
            }
            Claim::Within { a, b, tol } => {
                let (fa, fb) = (lookup(a)?, lookup(b)?);
                let stderr = fa.slope_stderr.hypot(fb.slope_stderr);
                let slack = tol - (fa.exponent - fb.exponent).abs();
                ClaimOutcome {
                    claim: claim.clone(),
                    verdict: judge(slack, stderr),
                    slack,
                    stderr,
                }
            }
        };
        outcomes.push(outcome);
    }
    let mut ranking: Vec<(String, f64)> = fits
        .iter()
        .map(|f| (f.label.clone(), f.fit.exponent))
        .collect();
    ranking.sort_by(|a, b| a.1.total_cmp(&b.1));
    let summary = outcomes
        .iter()
        .map(|o| match (&o.claim, o.verdict) {
            (Claim::Faster { faster, slower, .. }, Verdict::Holds) => {
                format!("{faster} faster than {slower}")
            }
            (Claim::Within { a, b, tol }, Verdict::Holds) => format!("{a} within {tol} of {b}"),
            (_, Verdict::Tie) => "tie".to_string(),
            (Claim::Faster { faster, slower, .. }, v) => {
                format!("{faster} faster than {slower}: {v}")
            }
            (Claim::Within { a, b, tol }, v) => format!("{a} within {tol} of {b}: {v}"),
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok(DecayComparison {
        ranking,
        outcomes,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{sample_radial, WaveletProfile};
    use crate::riesz::riesz_component;
    use crate::spectral;
    use crate::synth;
    use crate::window::{Smoothness, WindowSpec};
    use proptest::prelude::*;

    fn line(n: usize) -> GridSpec {
        GridSpec::unit(1, n).unwrap()
    }

    #[test]
    fn power_law_exponent() {
        let f = ScalarField::from_fn(line(4096), |x| (1.0 + x[0].abs()).powi(-3)).unwrap();
        let fit = decay_fit(&f, 1.0, default_fit_range(f.grid())).unwrap();
        assert!((-3.2..=-2.8).contains(&fit.exponent), "{fit:?}");
        assert!(fit.residual.is_finite());
        assert!(fit.caveat.contains("periodic"));
    }

    #[test]
    fn gaussian_is_superpolynomial() {
        let f = synth::gaussian(line(4096), 2.0);
        let fit = decay_fit(&f, 1.0, (4.0, 64.0)).unwrap();
        assert!(fit.exponent < -10.0, "{fit:?}");
    }

    #[test]
    fn underflowed_shells_are_skipped() {
        // exp(-x^2/2) underflows past |x| ~ 38, leaving too few shells
        let f = synth::gaussian(line(4096), 1.0);
        let shells = decay_shells(&f, 1.0, (4.0, 512.0)).unwrap();
        assert!(shells.iter().all(|s| s.max_abs >= UNDERFLOW_FLOOR));
        assert!(shells.len() < 40);
    }

    #[test]
    fn constant_field_is_flat() {
        let f = ScalarField::from_fn(line(256), |_| 2.5).unwrap();
        let fit = decay_fit(&f, 1.0, default_fit_range(f.grid())).unwrap();
        assert_eq!(fit.exponent, 0.0);
        assert!(fit.residual < 1e-15);
    }

    #[test]
    fn fit_preconditions() {
        let f = synth::gaussian(line(256), 4.0);
        assert!(matches!(
            decay_fit(&f, 1.0, (0.0, 32.0)),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            decay_fit(&f, 1.0, (8.0, 65.0)),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            decay_fit(&f, 1.0, (8.0, 10.0)),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            decay_fit(&f, 0.5, (8.0, 32.0)),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn decay_csv_columns() {
        let f = ScalarField::from_fn(line(256), |x| (1.0 + x[0].abs()).powi(-2)).unwrap();
        let rows = decay_table(&f, 1.0, (8.0, 32.0)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("decay.csv");
        write_decay_csv(&rows, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("r,max_abs,log_r,log_max"));
        assert_eq!(lines.count(), rows.len());
        for row in &rows {
            assert!((row.log_max - row.max_abs.ln()).abs() < 1e-15);
        }
    }

    #[test]
    fn odd_field_has_zero_mass() {
        let f = ScalarField::from_fn(line(256), |x| x[0] * (-x[0] * x[0] / 50.0).exp()).unwrap();
        let t = moments(&f, 2).unwrap();
        assert!(t.rows[0].value.abs() < 1e-14);
    }

    #[test]
    fn gaussian_derivative_moments() {
        // psi(t) = d/dt exp(-t^2/2); its first moment is -sqrt(2 pi)
        let g = GridSpec::new(1, 1024, 1.0 / 32.0).unwrap();
        let f = ScalarField::from_fn(g, |x| -x[0] * (-x[0] * x[0] / 2.0).exp()).unwrap();
        let t = moments(&f, 1).unwrap();
        assert!(t.rows[0].value.abs() < 1e-12);
        assert!((t.rows[1].value + (2.0 * PI).sqrt()).abs() < 1e-6);
        assert_eq!(t.rows[1].beta, MultiIndex::new(vec![1]).unwrap());
    }

    #[test]
    fn moment_rows_follow_degree_then_colex() {
        let g = GridSpec::unit(2, 16).unwrap();
        let t = moments(&synth::gaussian(g, 2.0), 2).unwrap();
        let tags: Vec<String> = t.rows.iter().map(|r| r.beta.tag()).collect();
        assert_eq!(tags, ["0-0", "1-0", "0-1", "2-0", "1-1", "0-2"]);
        assert!(moments(&synth::gaussian(g, 2.0), 9).is_err());
    }

    #[test]
    fn restricted_moments_skip_outer_samples() {
        let g = GridSpec::unit(1, 64).unwrap();
        let f = ScalarField::from_fn(g, |x| if x[0].abs() > 10.0 { 1.0 } else { 0.0 }).unwrap();
        let t = moments_within(&f, 0, 10.0).unwrap();
        assert_eq!(t.rows[0].value, 0.0);
        assert_eq!(t.rows[0].relative, 0.0);
        assert!(moments_within(&f, 0, 0.0).is_err());
    }

    #[test]
    fn modified_spectrum_is_flat_at_origin() {
        let spec = WindowSpec::new(Smoothness::Finite(3), 0.125).unwrap();
        let g = GridSpec::unit(2, 64).unwrap();
        let s = sample_radial(&WaveletProfile::modified(spec), &g);
        let radius = PI * 2f64.powf(-2.0 - 0.25) / 2.0;
        assert_eq!(spectrum_flatness_near_zero(&s, radius).unwrap(), 0.0);

        let gauss = spectral::forward(&synth::gaussian(g, 2.0));
        assert!(spectrum_flatness_near_zero(&gauss, PI / 8.0).unwrap() > 0.0);
        assert_eq!(
            spectrum_flatness_near_zero(&SpectrumField::zeros(g), 0.1).unwrap(),
            0.0
        );
        assert!(spectrum_flatness_near_zero(&s, PI / 4.0).is_err());
        assert!(matches!(
            spectrum_flatness_near_zero(&s, -1.0),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn poisson_closed_forms() {
        assert!((poisson_kernel(&[0.0, 0.0], 1.0) - 1.0 / (2.0 * PI)).abs() < 1e-16);
        let g = GridSpec::unit(2, 64).unwrap();
        let o = poisson_oracle(g, 4.0).unwrap();
        // R_2 p is odd in x_2, so it vanishes on the x_1 axis
        let mid = g.size() / 2;
        for i in 0..g.size() {
            let flat = g.flat_index(&[i, mid]).unwrap();
            assert_eq!(o.riesz_shapes[1].values()[flat], 0.0);
        }
        assert!(poisson_oracle(g, 3.9).is_err());
        assert!(poisson_oracle(GridSpec::unit(1, 64).unwrap(), 4.0).is_err());
    }

    #[test]
    fn poisson_calibration_recovers_constant() {
        let g = GridSpec::unit(2, 256).unwrap();
        let o = poisson_oracle(g, 4.0).unwrap();
        let numerical = riesz_component(&o.kernel, 0).unwrap();
        let cmp = compare_poisson(&o, 0, &numerical, None).unwrap();
        assert!((cmp.constant - 1.0 / (2.0 * PI)).abs() < 1e-3, "{cmp:?}");
        assert!(cmp.relative_rms < 1e-2, "{cmp:?}");
        assert_eq!(cmp.samples, 63 * 63);
    }

    fn fit(label: &str, exponent: f64, stderr: f64) -> NamedFit {
        NamedFit {
            label: label.into(),
            fit: DecayFit {
                exponent,
                intercept: 0.0,
                fit_range: (8.0, 64.0),
                residual: 0.0,
                slope_stderr: stderr,
                shells_used: 10,
                caveat: String::new(),
            },
        }
    }

    fn faster(a: &str, b: &str, margin: f64) -> Claim {
        Claim::Faster {
            faster: a.into(),
            slower: b.into(),
            margin,
        }
    }

    #[test]
    fn comparison_verdicts() {
        let fits = [
            fit("a", -2.0, 0.01),
            fit("b", -4.0, 0.01),
            fit("c", -2.5, 0.5),
        ];
        let c = decay_comparison(&fits, &[faster("b", "a", 1.0)]).unwrap();
        assert_eq!(c.outcomes[0].verdict, Verdict::Holds);
        assert!(c.passed());
        assert_eq!(c.summary, "b faster than a");
        assert_eq!(c.ranking[0].0, "b");

        let c = decay_comparison(&fits, &[faster("a", "b", 0.0)]).unwrap();
        assert_eq!(c.outcomes[0].verdict, Verdict::Fails);
        let c = decay_comparison(&fits, &[faster("c", "a", 0.0)]).unwrap();
        assert_eq!(c.outcomes[0].verdict, Verdict::Inconclusive);
        assert!(!c.passed());

        let within = Claim::Within {
            a: "a".into(),
            b: "c".into(),
            tol: 2.5,
        };
        let c = decay_comparison(&fits, &[within]).unwrap();
        assert_eq!(c.outcomes[0].verdict, Verdict::Holds);
        assert!(decay_comparison(&fits, &[faster("a", "zz", 0.0)]).is_err());
    }

    #[test]
    fn identical_fields_tie() {
        let f = ScalarField::from_fn(line(1024), |x| (1.0 + x[0].abs()).powi(-2)).unwrap();
        let r = default_fit_range(f.grid());
        let fits = [
            NamedFit {
                label: "x".into(),
                fit: decay_fit(&f, 1.0, r).unwrap(),
            },
            NamedFit {
                label: "y".into(),
                fit: decay_fit(&f, 1.0, r).unwrap(),
            },
        ];
        let c = decay_comparison(&fits, &[faster("x", "y", 0.0)]).unwrap();
        assert_eq!(c.outcomes[0].verdict, Verdict::Tie);
        assert_eq!(c.summary, "tie");
    }

    #[test]
    fn mismatched_fit_ranges_are_rejected() {
        let mut b = fit("b", -3.0, 0.1);
        b.fit.fit_range = (4.0, 64.0);
        assert!(decay_comparison(&[fit("a", -2.0, 0.1), b], &[]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn exponent_ignores_amplitude(c in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0], p in 1.0f64..5.0) {
            let f = ScalarField::from_fn(line(1024), |x| (1.0 + x[0].abs()).powf(-p)).unwrap();
            let r = default_fit_range(f.grid());
            let a = decay_fit(&f, 1.0, r).unwrap();
            let b = decay_fit(&f.scaled(c), 1.0, r).unwrap();
            prop_assert!((a.exponent - b.exponent).abs() < 1e-9);
            prop_assert!((b.intercept - a.intercept - c.abs().ln()).abs() < 1e-9);
        }

        #[test]
        fn moments_are_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, seed in 0u64..1000) {
            let g = GridSpec::new(1, 64, 0.25).unwrap();
            let f = synth::random_field(g, seed);
            let h = synth::gaussian(g, 1.5);
            let lhs = moments(&f.combine(a, &h, b).unwrap(), 4).unwrap();
            let (mf, mh) = (moments(&f, 4).unwrap(), moments(&h, 4).unwrap());
            for ((l, x), y) in lhs.rows.iter().zip(&mf.rows).zip(&mh.rows) {
                let expect = a * x.value + b * y.value;
                prop_assert!((l.value - expect).abs() <= 1e-12 * (1.0 + x.abs_scale + y.abs_scale));
            }
        }
    }
}
