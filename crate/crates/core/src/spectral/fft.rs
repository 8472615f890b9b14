use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Reusable 3D transform for one cube size, with its own scratch buffers.
///
/// The `*_raw` methods are unnormalized; `forward`/`inverse` apply the
/// unitary `n^{-3/2}` factor so Parseval holds without weights.
pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    plane: Vec<Complex64>,
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            n,
            forward,
            inverse,
            scratch: vec![Complex64::default(); scratch_len],
            plane: vec![Complex64::default(); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn forward_raw(&mut self, data: &mut [Complex64]) {
        let plan = Arc::clone(&self.forward);
        self.run(data, plan.as_ref());
    }

    pub fn inverse_raw(&mut self, data: &mut [Complex64]) {
        let plan = Arc::clone(&self.inverse);
        self.run(data, plan.as_ref());
    }

    pub fn forward(&mut self, data: &mut [Complex64]) {
        self.forward_raw(data);
        self.normalize(data);
    }

    pub fn inverse(&mut self, data: &mut [Complex64]) {
        self.inverse_raw(data);
        self.normalize(data);
    }

    fn normalize(&self, data: &mut [Complex64]) {
        let s = (self.n as f64).powf(-1.5);
        data.iter_mut().for_each(|v| *v *= s);
    }

    fn run(&mut self, data: &mut [Complex64], plan: &dyn Fft<f64>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "buffer does not match transform size");
        // z lines are contiguous
        plan.process_with_scratch(data, &mut self.scratch);

        // y lines: transpose each x-slab so y becomes contiguous
        for slab in data.chunks_exact_mut(n * n) {
            transpose(slab, &mut self.plane, n);
            plan.process_with_scratch(&mut self.plane, &mut self.scratch);
            transpose(&self.plane, slab, n);
        }

        // x lines: gather the (x, z) plane for each y
        for y in 0..n {
            for x in 0..n {
                for z in 0..n {
                    self.plane[z * n + x] = data[(x * n + y) * n + z];
                }
            }
            plan.process_with_scratch(&mut self.plane, &mut self.scratch);
            for x in 0..n {
                for z in 0..n {
                    data[(x * n + y) * n + z] = self.plane[z * n + x];
                }
            }
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in 0..n {
            dst[j * n + i] = src[i * n + j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_dft() {
        let n = 8;
        let data: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        Fft3::new(n).forward_raw(&mut fast);

        let w = -2.0 * std::f64::consts::PI / n as f64;
        for &(a, b, c) in &[(0usize, 0usize, 0usize), (1, 2, 3), (7, 0, 5), (4, 4, 4)] {
            let mut acc = Complex64::default();
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let phase = w * ((a * x + b * y + c * z) as f64);
                        acc += data[(x * n + y) * n + z] * Complex64::from_polar(1.0, phase);
                    }
                }
            }
            let got = fast[(a * n + b) * n + c];
            assert!((got - acc).norm() < 1e-10, "{got} vs {acc}");
        }
    }
}
