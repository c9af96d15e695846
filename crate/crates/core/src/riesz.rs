//! Riesz transforms as Fourier multipliers.
//!
//! Component `i` has the symbol `-j omega_i / |omega|`; the order-`|a|`
//! transform indexed by the multi-index `a` has the fused symbol
//! `sqrt(|a|!/a!) (-j)^|a| omega^a / |omega|^|a|`. Every symbol is zero at DC
//! and on bins touching the Nyquist frequency on any axis.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, SpectrumField};
use crate::spectral::{self, Multiplier};

pub const MAX_ORDER: usize = 20;

fn ln_factorials() -> [f64; MAX_ORDER + 1] {
    let mut table = [0.0; MAX_ORDER + 1];
    for k in 2..=MAX_ORDER {
        table[k] = table[k - 1] + (k as f64).ln();
    }
    table
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(components: Vec<usize>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Argument(
                "multi-index needs at least one component".into(),
            ));
        }
        let order: usize = components.iter().sum();
        if order > MAX_ORDER {
            return Err(Error::Argument(format!(
                "multi-index order {order} exceeds {MAX_ORDER}"
            )));
        }
        Ok(Self(components))
    }

    /// `e_axis` in `dim` dimensions, 0-based axis.
    pub fn unit(dim: usize, axis: usize) -> Result<Self> {
        if axis >= dim {
            return Err(Error::Argument(format!(
                "axis {} out of 1..={dim}",
                axis + 1
            )));
        }
        let mut c = vec![0; dim];
        c[axis] = 1;
        Self::new(c)
    }

    pub fn components(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    /// `sqrt(|a|! / a!)`.
    pub fn normalization(&self) -> f64 {
        let lf = ln_factorials();
        let log = lf[self.order()] - self.0.iter().map(|&a| lf[a]).sum::<f64>();
        (0.5 * log).exp()
    }

    /// All multi-indices of order `order` in `dim` dimensions, colexicographic.
    pub fn of_order(dim: usize, order: usize) -> Vec<MultiIndex> {
        fn fill(
            prefix: &mut Vec<usize>,
            remaining: usize,
            slots: usize,
            out: &mut Vec<Vec<usize>>,
        ) {
            if slots == 1 {
                prefix.push(remaining);
                out.push(prefix.clone());
                prefix.pop();
                return;
            }
            for a in 0..=remaining {
                prefix.push(a);
                fill(prefix, remaining - a, slots - 1, out);
                prefix.pop();
            }
        }
        let mut all = Vec::new();
        fill(&mut Vec::new(), order, dim, &mut all);
        all.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        all.into_iter().map(MultiIndex).collect()
    }

    /// `a1-a2-...` as used in channel file names.
    pub fn tag(&self) -> String {
        self.0
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let components = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Argument(format!("malformed multi-index {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(components)
    }
}

/// `(-j)^k`.
fn minus_j_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// `-j omega_i / |omega|` with 0-based `axis`; zero at `omega = 0`.
pub fn riesz_multiplier(axis: usize, omega: &[f64]) -> Complex64 {
    let r = omega.iter().map(|w| w * w).sum::<f64>().sqrt();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, -omega[axis] / r)
}

/// Symbol of the higher-order transform; zero at `omega = 0`.
pub fn higher_multiplier(alpha: &MultiIndex, omega: &[f64]) -> Complex64 {
    let r = omega.iter().map(|w| w * w).sum::<f64>().sqrt();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let monomial: f64 = alpha
        .components()
        .iter()
        .zip(omega)
        .map(|(&a, &w)| (w / r).powi(a as i32))
        .product();
    minus_j_pow(alpha.order()) * (alpha.normalization() * monomial)
}

/// Grid-aware Riesz symbol for [`spectral::apply_multiplier`].
#[derive(Debug, Clone)]
pub struct RieszMultiplier {
    alpha: MultiIndex,
}

impl RieszMultiplier {
    pub fn component(dim: usize, axis: usize) -> Result<Self> {
        Ok(Self {
            alpha: MultiIndex::unit(dim, axis)?,
        })
    }

    pub fn higher(alpha: MultiIndex) -> Result<Self> {
        if alpha.order() == 0 {
            return Err(Error::Argument(
                "Riesz transform order must be at least 1".into(),
            ));
        }
        Ok(Self { alpha })
    }

    /// Order-0 identity is allowed here; frames use it for `n = 0`.
    pub(crate) fn any_order(alpha: MultiIndex) -> Self {
        Self { alpha }
    }

    pub fn alpha(&self) -> &MultiIndex {
        &self.alpha
    }
}

impl Multiplier for RieszMultiplier {
    fn eval(&self, omega: &[f64]) -> Complex64 {
        if self.alpha.order() == 0 {
            return Complex64::new(1.0, 0.0);
        }
        higher_multiplier(&self.alpha, omega)
    }

    fn eval_bin(&self, grid: &GridSpec, index: &[usize], omega: &[f64]) -> Complex64 {
        if self.alpha.order() == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if grid.touches_nyquist(index) {
            return Complex64::new(0.0, 0.0);
        }
        self.eval(omega)
    }
}

fn check_dim(field: &ScalarField, alpha: &MultiIndex) -> Result<()> {
    if alpha.dim() != field.grid().dim() {
        return Err(Error::Argument(format!(
            "multi-index {alpha} has {} components for a {}-dimensional field",
            alpha.dim(),
            field.grid().dim()
        )));
    }
    Ok(())
}

/// `R_i f` for the 0-based `axis`.
pub fn riesz_component(field: &ScalarField, axis: usize) -> Result<ScalarField> {
    let m = RieszMultiplier::component(field.grid().dim(), axis)?;
    spectral::filter(field, &m)
}

/// `R^alpha f` as a single fused multiplier.
pub fn riesz_higher(field: &ScalarField, alpha: &MultiIndex) -> Result<ScalarField> {
    check_dim(field, alpha)?;
    let m = RieszMultiplier::higher(alpha.clone())?;
    spectral::filter(field, &m)
}

/// All `R^alpha f` with `|alpha| = order`, colexicographic. Computed in parallel.
pub fn riesz_channels(field: &ScalarField, order: usize) -> Result<Vec<(MultiIndex, ScalarField)>> {
    use rayon::prelude::*;
    let spec = spectral::forward(field);
    MultiIndex::of_order(field.grid().dim(), order)
        .into_par_iter()
        .map(|alpha| {
            let m = RieszMultiplier::higher(alpha.clone())?;
            let out = spectral::inverse(&spectral::apply_multiplier(&spec, &m)?);
            Ok((alpha, out))
        })
        .collect()
}

/// `-sum_i R_i c_i`.
pub fn riesz_invert(components: &[ScalarField]) -> Result<ScalarField> {
    let first = components
        .first()
        .ok_or_else(|| Error::Argument("no components given".into()))?;
    let grid = *first.grid();
    if components.len() != grid.dim() {
        return Err(Error::Shape(format!(
            "expected {} components, got {}",
            grid.dim(),
            components.len()
        )));
    }
    let mut acc = SpectrumField::zeros(grid);
    for (axis, c) in components.iter().enumerate() {
        grid.ensure_same(c.grid())?;
        let m = RieszMultiplier::component(grid.dim(), axis)?;
        let filtered = spectral::apply_multiplier(&spectral::forward(c), &m)?;
        for (a, v) in acc.values_mut().iter_mut().zip(filtered.values()) {
            *a -= v;
        }
    }
    Ok(spectral::inverse(&acc))
}
