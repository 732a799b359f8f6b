//! Arc-length sequences `l_1 ≥ l_2 ≥ …` in (0, 1).
//!
//! Parametric families are capped: `l_k = min(cap, raw_k)`. Raw values such
//! as `c / k` can exceed 1 for small `k`; the cap only changes finitely many
//! terms, so it affects neither the divergence of `Σ l_k²` nor the covering
//! criterion `Σ n⁻² exp(l_1 + … + l_n)`.
//!
//! "Decreasing" is taken in the nonstrict sense throughout; constant
//! sequences are valid.

use crate::error::{Error, Result};

/// Shape of the raw (uncapped) terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `c`
    Constant,
    /// `c / k`
    Harmonic,
    /// `c / sqrt(k)`
    InverseSqrt,
    /// `c * k^(-alpha)`
    PowerDecay { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum LengthSequence {
    Capped { family: Family, c: f64, cap: f64 },
    Explicit(Vec<f64>),
}

impl LengthSequence {
    pub fn constant(c: f64) -> Self {
        Self::Capped {
            family: Family::Constant,
            c,
            cap: 0.99,
        }
    }

    pub fn harmonic(c: f64, cap: f64) -> Self {
        Self::Capped {
            family: Family::Harmonic,
            c,
            cap,
        }
    }

    pub fn inverse_sqrt(c: f64, cap: f64) -> Self {
        Self::Capped {
            family: Family::InverseSqrt,
            c,
            cap,
        }
    }

    pub fn power_decay(c: f64, alpha: f64, cap: f64) -> Self {
        Self::Capped {
            family: Family::PowerDecay { alpha },
            c,
            cap,
        }
    }

    pub fn explicit(values: Vec<f64>) -> Self {
        Self::Explicit(values)
    }

    /// Checks the family parameters (not the generated values).
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Capped { family, c, cap } => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::domain("c", format!("scale must be positive, got {c}")));
                }
                if !(cap > 0.0 && cap < 1.0) {
                    return Err(Error::domain("cap", format!("cap must lie in (0, 1), got {cap}")));
                }
                if let Family::PowerDecay { alpha } = family {
                    if !(alpha >= 0.0 && alpha.is_finite()) {
                        return Err(Error::domain(
                            "alpha",
                            format!("exponent must be nonnegative, got {alpha}"),
                        ));
                    }
                }
                Ok(())
            }
            Self::Explicit(_) => Ok(()),
        }
    }

    /// The `k`-th term (1-based) of a parametric family, capped.
    fn capped_term(family: Family, c: f64, cap: f64, k: usize) -> f64 {
        let kf = k as f64;
        let raw = match family {
            Family::Constant => c,
            Family::Harmonic => c / kf,
            Family::InverseSqrt => c / kf.sqrt(),
            Family::PowerDecay { alpha } => c * kf.powf(-alpha),
        };
        raw.min(cap)
    }

    /// First `n` terms.
    pub fn generate(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::domain("n", "at least one term must be requested"));
        }
        self.validate()?;
        let values = match self {
            &Self::Capped { family, c, cap } => (1..=n)
                .map(|k| Self::capped_term(family, c, cap, k))
                .collect(),
            Self::Explicit(values) => {
                if values.len() < n {
                    return Err(Error::Length {
                        requested: n,
                        available: values.len(),
                    });
                }
                values[..n].to_vec()
            }
        };
        validate_lengths(&values)?;
        Ok(values)
    }

    /// First arc length `l_1`.
    pub fn first(&self) -> Result<f64> {
        Ok(self.generate(1)?[0])
    }
}

/// Checks that every value lies in (0, 1) and that the list is nonincreasing.
pub fn validate_lengths(lengths: &[f64]) -> Result<()> {
    if let Some((k, &l)) = lengths
        .iter()
        .enumerate()
        .find(|(_, &l)| !(l > 0.0 && l < 1.0))
    {
        return Err(Error::Validation(format!(
            "length l_{} = {l} lies outside (0, 1)",
            k + 1
        )));
    }
    if let Some(k) = lengths.windows(2).position(|w| w[1] > w[0]) {
        return Err(Error::Validation(format!(
            "lengths must be nonincreasing, but l_{} = {} < l_{} = {}",
            k + 1,
            lengths[k],
            k + 2,
            lengths[k + 1]
        )));
    }
    Ok(())
}

/// Admissible integration window `(0, 1 - l_1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonWindow {
    pub eps: f64,
    pub upper: f64,
    /// `eps < 1/2`: the growth coefficient `(1 - 2eps) / (2eps)` is positive.
    pub bound_path_ok: bool,
}

impl EpsilonWindow {
    pub fn from_first_length(l1: f64, eps: f64) -> Result<Self> {
        let upper = 1.0 - l1;
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::domain("eps", format!("eps = {eps} must be > 0")));
        }
        if eps >= upper {
            return Err(Error::domain(
                "eps",
                format!("eps = {eps} must be < 1 - l_1 = {upper}"),
            ));
        }
        Ok(Self {
            eps,
            upper,
            bound_path_ok: eps < 0.5,
        })
    }
}

pub fn epsilon_window(seq: &LengthSequence, eps: f64) -> Result<EpsilonWindow> {
    EpsilonWindow::from_first_length(seq.first()?, eps)
}

/// Number of leading terms with `l_k >= eps`, i.e. the smallest `m` with
/// `l_k < eps` for every `k > m`.
pub fn threshold_index_of(lengths: &[f64], eps: f64) -> usize {
    lengths.partition_point(|&l| l >= eps)
}

pub fn threshold_index(seq: &LengthSequence, eps: f64, n: usize) -> Result<usize> {
    let lengths = seq.generate(n)?;
    EpsilonWindow::from_first_length(lengths[0], eps)?;
    Ok(threshold_index_of(&lengths, eps))
}
