use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::field::{ComplexField, Space};
use super::grid::Grid3;
use crate::error::{Error, Result};

type Symbol = dyn Fn([f64; 3]) -> Complex64 + Send + Sync;

/// Fourier multiplier: a symbol evaluated on the frequency lattice.
#[derive(Clone)]
pub struct Multiplier {
    symbol: Arc<Symbol>,
    label: String,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multiplier").field("label", &self.label).finish()
    }
}

impl Multiplier {
    pub fn new(
        label: impl Into<String>,
        symbol: impl Fn([f64; 3]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            symbol: Arc::new(symbol),
            label: label.into(),
        }
    }

    /// Symbol depending on `|xi|^2` only.
    pub fn radial(
        label: impl Into<String>,
        symbol: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(label, move |xi: [f64; 3]| {
            symbol(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2])
        })
    }

    pub fn real_radial(
        label: impl Into<String>,
        symbol: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::radial(label, move |k2| Complex64::new(symbol(k2), 0.0))
    }

    pub fn identity() -> Self {
        Self::new("identity", |_| Complex64::new(1.0, 0.0))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, xi: [f64; 3]) -> Complex64 {
        (self.symbol)(xi)
    }

    /// Pointwise product of two symbols.
    pub fn compose(&self, other: &Multiplier) -> Multiplier {
        let (a, b) = (Arc::clone(&self.symbol), Arc::clone(&other.symbol));
        Multiplier {
            symbol: Arc::new(move |xi| a(xi) * b(xi)),
            label: format!("{}*{}", self.label, other.label),
        }
    }

    /// Symbol values on the lattice of `grid`, in frequency storage order.
    pub fn sample(&self, grid: &Grid3) -> Result<Vec<Complex64>> {
        (0..grid.len())
            .map(|i| {
                let xi = grid.frequency(i);
                let v = self.eval(xi);
                if v.re.is_finite() && v.im.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFiniteSymbol {
                        label: self.label.clone(),
                        xi,
                    })
                }
            })
            .collect()
    }
}

/// Applies `m` in frequency space; the result keeps the input representation.
pub fn apply_multiplier(f: &ComplexField, m: &Multiplier) -> Result<ComplexField> {
    let symbol = m.sample(f.grid())?;
    let mut spec = f.to_frequency();
    spec.values_mut()
        .iter_mut()
        .zip(&symbol)
        .for_each(|(v, s)| *v *= s);
    Ok(match f.space() {
        Space::Physical => spec.to_physical(),
        Space::Frequency => spec,
    })
}
