//! FFT workspace on the doubled torus.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::TorusGrid;

const BLOCK: usize = 32;

/// Reusable FFT plans and buffers for one doubled-torus grid.
///
/// Spectra are held transposed, `spec[k1 * n2 + k2]`, which saves one
/// transpose per forward/inverse pair.
pub struct SpectralWorkspace {
    n1: usize,
    n2: usize,
    fft1: Arc<dyn Fft<f64>>,
    ifft1: Arc<dyn Fft<f64>>,
    fft2: Arc<dyn Fft<f64>>,
    ifft2: Arc<dyn Fft<f64>>,
    /// Wavenumbers for second derivatives.
    k1: Vec<f64>,
    k2: Vec<f64>,
    /// Wavenumbers for first derivatives, Nyquist zeroed.
    d1: Vec<f64>,
    d2: Vec<f64>,
    phys: Vec<Complex64>,
    spec: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

fn wavenumbers(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut k = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for m in 0..n {
        let s = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
        k.push(PI * s);
        d.push(if m == n / 2 { 0.0 } else { PI * s });
    }
    (k, d)
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for rb in (0..rows).step_by(BLOCK) {
        for cb in (0..cols).step_by(BLOCK) {
            for r in rb..(rb + BLOCK).min(rows) {
                for c in cb..(cb + BLOCK).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

impl SpectralWorkspace {
    pub fn new(grid: &TorusGrid) -> Self {
        let (n1, n2) = (grid.n1(), grid.n2());
        let mut planner = FftPlanner::new();
        let fft1 = planner.plan_fft_forward(n1);
        let ifft1 = planner.plan_fft_inverse(n1);
        let fft2 = planner.plan_fft_forward(n2);
        let ifft2 = planner.plan_fft_inverse(n2);
        let scratch_len = [&fft1, &ifft1, &fft2, &ifft2]
            .iter()
            .map(|f| f.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        let (k1, d1) = wavenumbers(n1);
        let (k2, d2) = wavenumbers(n2);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            n1,
            n2,
            fft1,
            ifft1,
            fft2,
            ifft2,
            k1,
            k2,
            d1,
            d2,
            phys: vec![zero; n1 * n2],
            spec: vec![zero; n1 * n2],
            scratch: vec![zero; scratch_len],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn matches(&self, grid: &TorusGrid) -> bool {
        grid.n1() == self.n1 && grid.n2() == self.n2
    }

    fn forward_loaded(&mut self) {
        self.fft1.process_with_scratch(&mut self.phys, &mut self.scratch);
        transpose(&self.phys, &mut self.spec, self.n2, self.n1);
        self.fft2.process_with_scratch(&mut self.spec, &mut self.scratch);
    }

    /// Transforms real grid values into `spec`.
    fn forward_real(&mut self, values: &[f64]) {
        for (p, v) in self.phys.iter_mut().zip(values) {
            *p = Complex64::new(*v, 0.0);
        }
        self.forward_loaded();
    }

    fn forward_pair(&mut self, re: &[f64], im: &[f64]) {
        for ((p, a), b) in self.phys.iter_mut().zip(re).zip(im) {
            *p = Complex64::new(*a, *b);
        }
        self.forward_loaded();
    }

    /// Inverse of `spec` into `phys`, normalized.
    fn inverse(&mut self) {
        self.ifft2.process_with_scratch(&mut self.spec, &mut self.scratch);
        transpose(&self.spec, &mut self.phys, self.n1, self.n2);
        self.ifft1.process_with_scratch(&mut self.phys, &mut self.scratch);
        let s = 1.0 / (self.n1 * self.n2) as f64;
        for p in self.phys.iter_mut() {
            *p *= s;
        }
    }

    fn apply(&mut self, f: impl Fn(usize, usize, Complex64) -> Complex64) {
        let n2 = self.n2;
        for a in 0..self.n1 {
            let row = &mut self.spec[a * n2..(a + 1) * n2];
            for (b, z) in row.iter_mut().enumerate() {
                *z = f(a, b, *z);
            }
        }
    }

    fn read_re(&self, out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.phys) {
            *o = p.re;
        }
    }

    fn read_pair(&self, re: &mut [f64], im: &mut [f64]) {
        for ((a, b), p) in re.iter_mut().zip(im.iter_mut()).zip(&self.phys) {
            *a = p.re;
            *b = p.im;
        }
    }


    /// Solves `Laplace psi = omega` with zero-mean `psi`.
    pub fn poisson(&mut self, omega: &[f64], psi: &mut [f64]) {
        self.forward_real(omega);
        let (k1, k2) = (self.k1.clone(), self.k2.clone());
        self.apply(|a, b, z| {
            let kk = k1[a] * k1[a] + k2[b] * k2[b];
            if kk == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                -z / kk
            }
        });
        self.inverse();
        self.read_re(psi);
    }

    /// Velocity `(d2 psi, -d1 psi)` of `Laplace psi = omega`.
    pub fn velocity(&mut self, omega: &[f64], u1: &mut [f64], u2: &mut [f64]) {
        self.forward_real(omega);
        let (k1, k2, d1, d2) = (&self.k1, &self.k2, &self.d1, &self.d2);
        let n2 = self.n2;
        for a in 0..self.n1 {
            let row = &mut self.spec[a * n2..(a + 1) * n2];
            for (b, z) in row.iter_mut().enumerate() {
                let kk = k1[a] * k1[a] + k2[b] * k2[b];
                if kk == 0.0 {
                    *z = Complex64::new(0.0, 0.0);
                    continue;
                }
                let psi = -*z / kk;
                // u1 + i u2 with u1 = i d2 psi and u2 = -i d1 psi
                let w1 = Complex64::new(0.0, d2[b]) * psi;
                let w2 = Complex64::new(0.0, -d1[a]) * psi;
                *z = w1 + Complex64::new(0.0, 1.0) * w2;
            }
        }
        self.inverse();
        self.read_pair(u1, u2);
    }

    /// Spectral first derivative along axis 1 or 2.
    pub fn derivative(&mut self, f: &[f64], axis: usize, out: &mut [f64]) {
        self.forward_real(f);
        let (d1, d2) = (self.d1.clone(), self.d2.clone());
        self.apply(|a, b, z| {
            let k = if axis == 1 { d1[a] } else { d2[b] };
            Complex64::new(0.0, k) * z
        });
        self.inverse();
        self.read_re(out);
    }

    /// Spectral Laplacian.
    pub fn laplacian(&mut self, f: &[f64], out: &mut [f64]) {
        self.forward_real(f);
        let (k1, k2) = (self.k1.clone(), self.k2.clone());
        self.apply(|a, b, z| -(k1[a] * k1[a] + k2[b] * k2[b]) * z);
        self.inverse();
        self.read_re(out);
    }

    /// Spectral `d1 u1 + d2 u2`.
    pub fn divergence(&mut self, u1: &[f64], u2: &[f64], out: &mut [f64]) {
        self.combined_first_order(u1, u2, out, |k1, k2, a, b| (k1 * a) + (k2 * b));
    }

    /// Spectral `d2 u1 - d1 u2`.
    pub fn curl(&mut self, u1: &[f64], u2: &[f64], out: &mut [f64]) {
        self.combined_first_order(u1, u2, out, |k1, k2, a, b| (k2 * a) - (k1 * b));
    }

    fn combined_first_order(
        &mut self,
        u1: &[f64],
        u2: &[f64],
        out: &mut [f64],
        op: impl Fn(f64, f64, Complex64, Complex64) -> Complex64,
    ) {
        self.forward_pair(u1, u2);
        let (n1, n2) = (self.n1, self.n2);
        let z = self.spec.clone();
        for a in 0..n1 {
            let na = (n1 - a) % n1;
            for b in 0..n2 {
                let nb = (n2 - b) % n2;
                let zk = z[a * n2 + b];
                let zm = z[na * n2 + nb].conj();
                let a1 = 0.5 * (zk + zm);
                let a2 = Complex64::new(0.0, -0.5) * (zk - zm);
                let r = op(self.d1[a], self.d2[b], a1, a2);
                self.spec[a * n2 + b] = Complex64::new(0.0, 1.0) * r;
            }
        }
        self.inverse();
        self.read_re(out);
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n1: usize, n2: usize) -> TorusGrid {
        TorusGrid::doubled(n1, n2).unwrap()
    }

    fn sample(g: &TorusGrid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut v = Vec::new();
        for j in 0..g.rows() {
            for i in 0..g.n1() {
                v.push(f(g.x1(i), g.x2(j)));
            }
        }
        v
    }

    #[test]
    fn derivative_of_trig_mode_is_exact() {
        let g = grid(32, 16);
        let f = sample(&g, |x, y| (3.0 * PI * x).sin() * (2.0 * PI * y).cos());
        let mut ws = SpectralWorkspace::new(&g);
        let mut d = vec![0.0; g.len()];
        ws.derivative(&f, 1, &mut d);
        let expect = sample(&g, |x, y| 3.0 * PI * (3.0 * PI * x).cos() * (2.0 * PI * y).cos());
        let err = d.iter().zip(&expect).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn laplacian_inverts_poisson() {
        let g = grid(16, 32);
        let w = sample(&g, |x, y| (PI * x).sin() * (PI * y).sin() + (2.0 * PI * (x - y)).cos());
        let mut ws = SpectralWorkspace::new(&g);
        let mut psi = vec![0.0; g.len()];
        let mut back = vec![0.0; g.len()];
        ws.poisson(&w, &mut psi);
        ws.laplacian(&psi, &mut back);
        let err = w.iter().zip(&back).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn curl_of_velocity_recovers_vorticity() {
        let g = grid(32, 32);
        let w = sample(&g, |x, y| (PI * x).sin() * (3.0 * PI * y).sin());
        let mut ws = SpectralWorkspace::new(&g);
        let (mut u1, mut u2, mut c) = (vec![0.0; g.len()], vec![0.0; g.len()], vec![0.0; g.len()]);
        ws.velocity(&w, &mut u1, &mut u2);
        ws.curl(&u1, &u2, &mut c);
        let err = w.iter().zip(&c).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12, "{err}");
        ws.divergence(&u1, &u2, &mut c);
        assert!(c.iter().all(|v| v.abs() < 1e-13));
    }
}
