use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;

use super::fft::Fft3;
use super::grid::Grid3;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Physical,
    Frequency,
}

impl Space {
    fn name(self) -> &'static str {
        match self {
            Space::Physical => "physical",
            Space::Frequency => "frequency",
        }
    }
}

/// Complex samples on a [`Grid3`], stored x-slowest, in either representation.
///
/// The discrete L2 norm is `sqrt(h^3 sum |v|^2)` in both representations;
/// the unitary transform makes the two agree.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid3,
    values: Vec<Complex64>,
    space: Space,
}

impl ComplexField {
    pub fn zeros(grid: Grid3) -> Self {
        Self {
            grid,
            values: vec![Complex64::default(); grid.len()],
            space: Space::Physical,
        }
    }

    pub fn from_values(grid: Grid3, values: Vec<Complex64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values, space })
    }

    /// Samples `f(x)` at every physical grid point.
    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self {
            grid,
            values,
            space: Space::Physical,
        }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
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

    pub fn expect_space(&self, space: Space) -> Result<()> {
        if self.space == space {
            Ok(())
        } else {
            Err(Error::Representation {
                expected: space.name(),
                found: self.space.name(),
            })
        }
    }

    pub fn same_grid(&self, other: &ComplexField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Copy in physical representation.
    pub fn to_physical(&self) -> ComplexField {
        match self.space {
            Space::Physical => self.clone(),
            Space::Frequency => {
                let mut out = self.clone();
                Fft3::new(self.grid.n()).inverse(&mut out.values);
                out.space = Space::Physical;
                out
            }
        }
    }

    /// Copy in frequency representation.
    pub fn to_frequency(&self) -> ComplexField {
        match self.space {
            Space::Frequency => self.clone(),
            Space::Physical => {
                let mut out = self.clone();
                Fft3::new(self.grid.n()).forward(&mut out.values);
                out.space = Space::Frequency;
                out
            }
        }
    }

    /// Discrete L2 norm.
    pub fn norm(&self) -> f64 {
        (self.grid.cell_volume() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn scale(&self, c: Complex64) -> ComplexField {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    pub fn scale_real(&self, c: f64) -> ComplexField {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `self - other`; both operands must share grid and representation.
    pub fn sub(&self, other: &ComplexField) -> Result<ComplexField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &ComplexField) -> Result<ComplexField> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(
        &self,
        other: &ComplexField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexField> {
        self.same_grid(other)?;
        other.expect_space(self.space)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(ComplexField {
            grid: self.grid,
            values,
            space: self.space,
        })
    }

    /// L2 distance, converting representations as needed.
    pub fn distance(&self, other: &ComplexField) -> Result<f64> {
        self.same_grid(other)?;
        let b = match (self.space, other.space) {
            (a, b) if a == b => other.clone(),
            (Space::Physical, _) => other.to_physical(),
            (Space::Frequency, _) => other.to_frequency(),
        };
        Ok(self.sub(&b)?.norm())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// True when every sample has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.space == Space::Physical && self.values.iter().all(|v| v.im == 0.0)
    }

    /// Approximation of the continuum unitary transform
    /// `(2pi)^{-3/2} int e^{-i x.xi} f(x) dx` at lattice point `idx`.
    pub fn continuum_spectrum_at(&self, idx: usize) -> Result<Complex64> {
        self.expect_space(Space::Frequency)?;
        let g = &self.grid;
        let [i, j, k] = g.split(idx);
        let parity = g.wave_index(i) + g.wave_index(j) + g.wave_index(k);
        let sign = if parity.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let scale = (2.0 * PI).powf(-1.5) * g.cell_volume() * (g.len() as f64).sqrt();
        Ok(self.values[idx] * (sign * scale))
    }

    /// Fraction of the discrete mass at distance greater than `radius` from the origin.
    pub fn tail_mass_fraction(&self, radius: f64) -> f64 {
        let phys = self.to_physical();
        let g = phys.grid;
        let mut total = 0.0;
        let mut outside = 0.0;
        for (i, v) in phys.values.iter().enumerate() {
            let p = g.position(i);
            let m = v.norm_sqr();
            total += m;
            if (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() > radius {
                outside += m;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            outside / total
        }
    }
}

/// Unitary forward transform; input must be physical.
pub fn fft_forward(f: &ComplexField) -> Result<ComplexField> {
    f.expect_space(Space::Physical)?;
    Ok(f.to_frequency())
}

/// Unitary inverse transform; input must be in frequency representation.
pub fn fft_inverse(f: &ComplexField) -> Result<ComplexField> {
    f.expect_space(Space::Frequency)?;
    Ok(f.to_physical())
}

/// Shift by `z`: `(tau_z f)(x) = f(x - z)`, via the phase `e^{-i z.xi}`.
pub fn translate(f: &ComplexField, z: [f64; 3]) -> ComplexField {
    let g = *f.grid();
    let mut spec = f.to_frequency();
    for (i, v) in spec.values.iter_mut().enumerate() {
        let xi = g.frequency(i);
        let phase = -(z[0] * xi[0] + z[1] * xi[1] + z[2] * xi[2]);
        *v *= Complex64::from_polar(1.0, phase);
    }
    match f.space() {
        Space::Physical => spec.to_physical(),
        Space::Frequency => spec,
    }
}

pub const DUMP_MAGIC: &[u8; 8] = b"HRTFLD01";

/// Writes the binary field dump: magic, `n` (u64 LE), `L` (f64 LE), then
/// `n^3` physical samples as (re, im) f64 LE pairs, x-index slowest.
pub fn write_field_dump<W: Write>(f: &ComplexField, mut out: W) -> Result<()> {
    let phys = f.to_physical();
    out.write_all(DUMP_MAGIC)?;
    out.write_all(&(phys.grid.n() as u64).to_le_bytes())?;
    out.write_all(&phys.grid.box_length().to_le_bytes())?;
    let mut buf = Vec::with_capacity(phys.values.len() * 16);
    for v in &phys.values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_field_dump<R: Read>(mut input: R) -> Result<ComplexField> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(Error::InvalidArgument("not a field dump (bad magic)".into()));
    }
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let box_length = f64::from_le_bytes(word);
    let grid = Grid3::new(n, box_length)?;
    let mut raw = vec![0u8; grid.len() * 16];
    input.read_exact(&mut raw)?;
    let values = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    ComplexField::from_values(grid, values, Space::Physical)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: Grid3) -> ComplexField {
        ComplexField::from_fn(grid, |x| {
            Complex64::new((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp(), 0.0)
        })
    }

    #[test]
    fn constant_field_has_only_dc() {
        let g = Grid3::new(8, 4.0).unwrap();
        let f = ComplexField::from_fn(g, |_| Complex64::new(1.0, 0.0));
        let spec = fft_forward(&f).unwrap();
        assert!((spec.values()[0].re - (g.len() as f64).sqrt()).abs() < 1e-12);
        assert!(spec.values()[1..].iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn wrong_representation_is_rejected() {
        let g = Grid3::new(8, 4.0).unwrap();
        let f = ComplexField::zeros(g);
        assert!(matches!(
            fft_inverse(&f),
            Err(Error::Representation { .. })
        ));
        let spec = fft_forward(&f).unwrap();
        assert!(fft_forward(&spec).is_err());
    }

    #[test]
    fn translate_zero_is_identity() {
        let g = Grid3::new(16, 10.0).unwrap();
        let f = gaussian(g);
        let t = translate(&f, [0.0; 3]);
        assert!(f.distance(&t).unwrap() < 1e-13);
    }

    #[test]
    fn dump_roundtrip() {
        let g = Grid3::new(8, 3.0).unwrap();
        let f = ComplexField::from_fn(g, |x| Complex64::new(x[0], x[1] * x[2]));
        let mut buf = Vec::new();
        write_field_dump(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 24 + 16 * g.len());
        assert_eq!(&buf[..8], DUMP_MAGIC);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 8);
        let back = read_field_dump(buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }
}
