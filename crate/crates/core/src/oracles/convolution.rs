//! Direct-sum periodic convolution with the Yukawa kernel.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{ComplexField, Space};
use crate::yukawa::YukawaParams;

/// Largest grid accepted by the `O(n^6)` sum.
pub const MAX_BRUTE_N: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityRule {
    /// Kernel at the origin evaluated at half the spacing.
    Cap,
    /// Origin weight and the six nearest-neighbour weights chosen so the
    /// discrete kernel has the exact zeroth and second moments
    /// `4 pi Q / mu^2` and `24 pi Q / mu^4`.
    MomentCorrected,
}

/// Discrete kernel on minimum-image displacements `(di, dj, dk)`, indexed by
/// `(di mod n, dj mod n, dk mod n)`.
fn kernel_table(n: usize, h: f64, kernel: YukawaParams, rule: SingularityRule) -> Vec<f64> {
    let signed = |d: usize| if d <= n / 2 { d as f64 } else { d as f64 - n as f64 };
    let mut table = vec![0.0; n * n * n];
    let mut m0 = 0.0;
    let mut m2 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (x, y, z) = (signed(a) * h, signed(b) * h, signed(c) * h);
                let r = (x * x + y * y + z * z).sqrt();
                let v = if r == 0.0 {
                    let r = 0.5 * h;
                    kernel.q * (-kernel.mu * r).exp() / r
                } else {
                    kernel.q * (-kernel.mu * r).exp() / r
                };
                table[(a * n + b) * n + c] = v;
                if r > 0.0 {
                    m0 += v;
                    m2 += r * r * v;
                }
            }
        }
    }
    if rule == SingularityRule::MomentCorrected && kernel.q != 0.0 {
        let h3 = h * h * h;
        let mu2 = kernel.mu * kernel.mu;
        let want0 = 4.0 * PI * kernel.q / mu2 / h3;
        let want2 = 24.0 * PI * kernel.q / (mu2 * mu2) / h3;
        let c = (want2 - m2) / (6.0 * h * h);
        for (a, b, cc) in [(1, 0, 0), (n - 1, 0, 0), (0, 1, 0), (0, n - 1, 0), (0, 0, 1), (0, 0, n - 1)] {
            table[(a * n + b) * n + cc] += c;
        }
        table[0] = want0 - m0 - 6.0 * c;
    }
    table
}

/// `h^3 sum_y K(x - y) f(y)` over the periodic lattice.
pub fn brute_convolution(f: &ComplexField, kernel: YukawaParams, rule: SingularityRule) -> Result<ComplexField> {
    kernel.validate()?;
    let g = *f.grid();
    let n = g.n();
    if n > MAX_BRUTE_N {
        return Err(Error::Guard(format!(
            "brute-force convolution is limited to n <= {MAX_BRUTE_N}, got {n}"
        )));
    }
    let phys = f.to_physical();
    let vals = phys.values();
    let h = g.spacing();
    let table = kernel_table(n, h, kernel, rule);
    let h3 = g.cell_volume();
    let mut out = vec![Complex64::default(); g.len()];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = Complex64::default();
                for a in 0..n {
                    let da = (i + n - a) % n;
                    for b in 0..n {
                        let db = (j + n - b) % n;
                        let row = (da * n + db) * n;
                        let src = (a * n + b) * n;
                        for c in 0..n {
                            let dc = (k + n - c) % n;
                            s += vals[src + c] * table[row + dc];
                        }
                    }
                }
                out[(i * n + j) * n + k] = s * h3;
            }
        }
    }
    ComplexField::from_values(g, out, Space::Physical)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid3;

    #[test]
    fn point_mass_gives_kernel() {
        let g = Grid3::new(8, 8.0).unwrap();
        let centre = g.index([4, 4, 4]);
        let mut v = vec![Complex64::default(); g.len()];
        v[centre] = Complex64::new(1.0 / g.cell_volume(), 0.0);
        let f = ComplexField::from_values(g, v, Space::Physical).unwrap();
        let k = YukawaParams::new(1.0, 1.0).unwrap();
        let out = brute_convolution(&f, k, SingularityRule::Cap).unwrap();
        let at = out.values()[g.index([4, 4, 6])].re;
        assert!((at - (-2f64).exp() / 2.0).abs() < 1e-14);
        assert!((out.values()[centre].re - 2.0 * (-0.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn zero_kernel_and_guard() {
        let g = Grid3::new(8, 8.0).unwrap();
        let f = ComplexField::from_fn(g, |_| Complex64::new(1.0, 0.0));
        let z = brute_convolution(&f, YukawaParams::new(0.0, 1.0).unwrap(), SingularityRule::MomentCorrected).unwrap();
        assert_eq!(z.max_abs(), 0.0);
        let big = ComplexField::zeros(Grid3::new(18, 8.0).unwrap());
        assert!(brute_convolution(&big, YukawaParams::new(1.0, 1.0).unwrap(), SingularityRule::Cap).is_err());
    }
}
