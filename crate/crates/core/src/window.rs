//! Meyer windows `theta(w) = cos(H(w))` with
//! `H(w) = G((w + 1)/eps) - pi/2 + G((w - 1)/eps)`.
//!
//! `G` is a smooth step from `0` at `x <= -1` to `pi/2` at `x >= 1` with
//! `G(x) + G(-x) = pi/2`, which gives `theta(x)^2 + theta(x - 2)^2 = 1` on
//! `[0, 2]`. Finite smoothness windows use the closed-form integrals of the
//! bumps `C (1 - x^2)^n`, the infinite one uses the `exp(-1/x^2)` ratio.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TRANSITION: f64 = 0.125;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Smoothness {
    /// `C^n` window, `n` in `{3, 4, 5}`.
    Finite(u8),
    Infinite,
}

impl Smoothness {
    pub const ALL: [Smoothness; 4] = [
        Smoothness::Finite(3),
        Smoothness::Finite(4),
        Smoothness::Finite(5),
        Smoothness::Infinite,
    ];

    pub fn finite(n: u8) -> Result<Self> {
        match n {
            3..=5 => Ok(Smoothness::Finite(n)),
            _ => Err(Error::Config(format!(
                "unsupported window smoothness {n}; expected 3, 4, 5 or inf"
            ))),
        }
    }
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Smoothness::Finite(n) => write!(f, "{n}"),
            Smoothness::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Smoothness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinite" => Ok(Smoothness::Infinite),
            other => {
                let n: u8 = other
                    .parse()
                    .map_err(|_| Error::Config(format!("invalid window smoothness {s:?}")))?;
                Smoothness::finite(n)
            }
        }
    }
}

impl From<Smoothness> for String {
    fn from(s: Smoothness) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for Smoothness {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub smoothness: Smoothness,
    pub transition: f64,
}

impl WindowSpec {
    pub fn new(smoothness: Smoothness, transition: f64) -> Result<Self> {
        if !(transition > 0.0 && transition < 1.0) {
            return Err(Error::Config(format!(
                "window transition must lie in (0, 1), got {transition}"
            )));
        }
        Ok(Self {
            smoothness,
            transition,
        })
    }
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            smoothness: Smoothness::Finite(3),
            transition: DEFAULT_TRANSITION,
        }
    }
}

// Table coefficients: G_n(x) = scale * (sum c_k x^k + offset), odd powers only.
const G3: (f64, [f64; 4], f64) = (
    35.0 * PI / 64.0,
    [1.0, -1.0, 3.0 / 5.0, -1.0 / 7.0],
    16.0 / 35.0,
);
const G4: (f64, [f64; 5], f64) = (
    315.0 * PI / 512.0,
    [1.0, -4.0 / 3.0, 6.0 / 5.0, -4.0 / 7.0, 1.0 / 9.0],
    128.0 / 315.0,
);
const G5: (f64, [f64; 6], f64) = (
    693.0 * PI / 1024.0,
    [1.0, -5.0 / 3.0, 2.0, -10.0 / 7.0, 5.0 / 9.0, -1.0 / 11.0],
    256.0 / 693.0,
);

/// Odd polynomial `sum c_k x^(2k+1)` by Horner in `x^2`.
fn odd_poly(coeffs: &[f64], x: f64) -> f64 {
    let x2 = x * x;
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x2 + c) * x
}

fn smooth_step_exponent(w: f64) -> f64 {
    if w > 0.0 {
        (-1.0 / (w * w)).exp()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeyerWindow {
    spec: WindowSpec,
}

impl MeyerWindow {
    pub fn new(spec: WindowSpec) -> Self {
        Self { spec }
    }

    pub fn spec(&self) -> WindowSpec {
        self.spec
    }

    pub fn transition(&self) -> f64 {
        self.spec.transition
    }

    /// The step `G`.
    pub fn g(&self, x: f64) -> f64 {
        eval_g(self.spec.smoothness, x)
    }

    pub fn h(&self, w: f64) -> f64 {
        let eps = self.spec.transition;
        self.g((w + 1.0) / eps) - FRAC_PI_2 + self.g((w - 1.0) / eps)
    }

    pub fn theta(&self, w: f64) -> f64 {
        let eps = self.spec.transition;
        let a = w.abs();
        if a <= 1.0 - eps {
            1.0
        } else if a >= 1.0 + eps {
            0.0
        } else {
            self.h(w).cos().clamp(0.0, 1.0)
        }
    }
}

pub fn eval_g(smoothness: Smoothness, x: f64) -> f64 {
    if x <= -1.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return FRAC_PI_2;
    }
    match smoothness {
        Smoothness::Finite(3) => G3.0 * (odd_poly(&G3.1, x) + G3.2),
        Smoothness::Finite(4) => G4.0 * (odd_poly(&G4.1, x) + G4.2),
        Smoothness::Finite(5) => G5.0 * (odd_poly(&G5.1, x) + G5.2),
        Smoothness::Finite(n) => unreachable!("smoothness {n} rejected at construction"),
        Smoothness::Infinite => {
            let up = smooth_step_exponent(x + 1.0);
            let down = smooth_step_exponent(1.0 - x);
            FRAC_PI_2 * up / (up + down)
        }
    }
}

pub fn eval_h(spec: WindowSpec, w: f64) -> f64 {
    MeyerWindow::new(spec).h(w)
}

pub fn eval_theta(spec: WindowSpec, w: f64) -> f64 {
    MeyerWindow::new(spec).theta(w)
}
