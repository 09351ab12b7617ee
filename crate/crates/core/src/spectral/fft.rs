//! Real-data n-dimensional FFT over the grid's row-major layout.
//!
//! Grid samples are real, so only the half spectrum `m_last in 0..=N/2` is
//! transformed along the leading axes; the last axis goes through a
//! real/complex transform. Strided axes are gathered a few columns at a time
//! into contiguous lines. Lines that are identically zero are skipped, which
//! matters for the band-limited pieces produced by the dyadic projections.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftDirection, FftPlanner};

const BATCH: usize = 16;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

type PlanKey = (usize, bool);

type Cache<K, T> = Lazy<Mutex<HashMap<K, Arc<T>>>>;

static PLANS: Cache<PlanKey, dyn Fft<f64>> = Lazy::new(|| Mutex::new(HashMap::new()));
static R2C: Cache<usize, dyn RealToComplex<f64>> = Lazy::new(|| Mutex::new(HashMap::new()));
static C2R: Cache<usize, dyn ComplexToReal<f64>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut plans = PLANS.lock().expect("fft plan cache poisoned");
    plans
        .entry((len, inverse))
        .or_insert_with(|| {
            let dir = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
            FftPlanner::new().plan_fft(len, dir)
        })
        .clone()
}

fn plan_r2c(len: usize) -> Arc<dyn RealToComplex<f64>> {
    let mut plans = R2C.lock().expect("fft plan cache poisoned");
    plans
        .entry(len)
        .or_insert_with(|| RealFftPlanner::new().plan_fft_forward(len))
        .clone()
}

fn plan_c2r(len: usize) -> Arc<dyn ComplexToReal<f64>> {
    let mut plans = C2R.lock().expect("fft plan cache poisoned");
    plans
        .entry(len)
        .or_insert_with(|| RealFftPlanner::new().plan_fft_inverse(len))
        .clone()
}

#[inline]
fn is_zero_line(line: &[Complex64]) -> bool {
    line.iter().all(|c| c.re == 0.0 && c.im == 0.0)
}

/// Complex transforms of every length-`len` line along the axis with the
/// given `stride`; `data` is a whole number of `len * stride` blocks.
fn axis_pass(data: &mut [Complex64], len: usize, stride: usize, fft: &dyn Fft<f64>, scratch: &mut [Complex64]) {
    if stride == 1 {
        for line in data.chunks_exact_mut(len) {
            if !is_zero_line(line) {
                fft.process_with_scratch(line, scratch);
            }
        }
        return;
    }
    let mut buf = vec![ZERO; BATCH * len];
    for chunk in data.chunks_exact_mut(len * stride) {
        // chunk is laid out [len][stride]
        for i0 in (0..stride).step_by(BATCH) {
            let batch = BATCH.min(stride - i0);
            for m in 0..len {
                let row = &chunk[m * stride + i0..m * stride + i0 + batch];
                for (b, &v) in row.iter().enumerate() {
                    buf[b * len + m] = v;
                }
            }
            let mut touched = false;
            for line in buf[..batch * len].chunks_exact_mut(len) {
                if !is_zero_line(line) {
                    fft.process_with_scratch(line, scratch);
                    touched = true;
                }
            }
            if !touched {
                continue;
            }
            for m in 0..len {
                let row = &mut chunk[m * stride + i0..m * stride + i0 + batch];
                for (b, v) in row.iter_mut().enumerate() {
                    *v = buf[b * len + m];
                }
            }
        }
    }
}

/// Complex passes over the leading `dim - 1` axes of a half-spectrum array
/// of shape `[size; dim - 1] x half`. With a `cut`, modes beyond it are
/// zeroed after each pass so later passes skip their lines.
fn leading_passes(data: &mut [Complex64], dim: usize, size: usize, half: usize, inverse: bool, cut: Option<usize>) {
    if dim < 2 {
        return;
    }
    let fft = plan(size, inverse);
    let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
    for axis in (0..dim - 1).rev() {
        let stride = half * size.pow((dim - 2 - axis) as u32);
        axis_pass(data, size, stride, fft.as_ref(), &mut scratch);
        if let Some(cut) = cut {
            for (k, block) in data.chunks_exact_mut(stride).enumerate() {
                let i = k % size;
                if i.min(size - i) > cut || 2 * i == size {
                    block.fill(ZERO);
                }
            }
        }
    }
}

/// Flat index of `-m` for every leading-axes index.
fn negated_outer(dim: usize, size: usize) -> Vec<usize> {
    let outer = size.pow(dim as u32 - 1);
    (0..outer)
        .map(|o| {
            let mut rest = o;
            let mut out = 0;
            let mut scale = 1;
            for _ in 0..dim - 1 {
                let i = rest % size;
                rest /= size;
                out += ((size - i) % size) * scale;
                scale *= size;
            }
            out
        })
        .collect()
}

/// Unnormalized inverse transform `sum_k c_k exp(i k x)` of one `size^dim`
/// block, keeping the real part.
pub(crate) fn inverse_real(coeffs: &[Complex64], dim: usize, size: usize) -> Vec<f64> {
    let half = size / 2 + 1;
    let outer = size.pow(dim as u32 - 1);
    debug_assert_eq!(coeffs.len(), outer * size);
    let neg = negated_outer(dim, size);
    let mut h = vec![ZERO; outer * half];
    for o in 0..outer {
        let src = &coeffs[o * size..(o + 1) * size];
        let mirror = &coeffs[neg[o] * size..(neg[o] + 1) * size];
        let dst = &mut h[o * half..(o + 1) * half];
        for (m, d) in dst.iter_mut().enumerate() {
            let a = src[m];
            let b = mirror[(size - m) % size].conj();
            if a != ZERO || b != ZERO {
                *d = (a + b) * 0.5;
            }
        }
    }
    inverse_half(h, dim, size)
}

/// `inverse_real` of `coeffs` masked by the sparse symbol `entries`, without
/// forming the masked spectrum. `None` when every masked mode vanishes.
pub(crate) fn inverse_real_masked(coeffs: &[Complex64], entries: &[(u32, f64)], dim: usize, size: usize) -> Option<Vec<f64>> {
    let half = size / 2 + 1;
    let outer = size.pow(dim as u32 - 1);
    debug_assert_eq!(coeffs.len(), outer * size);
    let neg = negated_outer(dim, size);
    let mut h = vec![ZERO; outer * half];
    let mut any = false;
    for &(idx, val) in entries {
        let idx = idx as usize;
        let a = coeffs[idx] * val;
        if a == ZERO {
            continue;
        }
        any = true;
        let (o, m) = (idx / size, idx % size);
        if m < half {
            h[o * half + m] += a * 0.5;
        }
        let mm = (size - m) % size;
        if mm < half {
            h[neg[o] * half + mm] += a.conj() * 0.5;
        }
    }
    any.then(|| inverse_half(h, dim, size))
}

/// Leading passes and the last-axis complex-to-real transform of a half
/// spectrum.
fn inverse_half(mut h: Vec<Complex64>, dim: usize, size: usize) -> Vec<f64> {
    let half = size / 2 + 1;
    let outer = size.pow(dim as u32 - 1);
    leading_passes(&mut h, dim, size, half, true, None);
    let c2r = plan_c2r(size);
    let mut scratch = vec![ZERO; c2r.get_scratch_len()];
    let mut out = vec![0.0; outer * size];
    for (line, dst) in h.chunks_exact_mut(half).zip(out.chunks_exact_mut(size)) {
        if is_zero_line(line) {
            continue;
        }
        line[0].im = 0.0;
        line[half - 1].im = 0.0;
        c2r.process_with_scratch(line, dst, &mut scratch)
            .expect("buffer sizes match the plan");
    }
    out
}

/// Unnormalized forward transform `sum_x f(x) exp(-i k x)` of one real
/// `size^dim` block, returned as the full spectrum.
pub(crate) fn forward_real(samples: &[f64], dim: usize, size: usize) -> Vec<Complex64> {
    forward_real_cut(samples, dim, size, None)
}

/// Forward transform keeping only modes with every `|m_i| <= cut`.
pub(crate) fn forward_real_cut(samples: &[f64], dim: usize, size: usize, cut: Option<usize>) -> Vec<Complex64> {
    let half = size / 2 + 1;
    let outer = size.pow(dim as u32 - 1);
    debug_assert_eq!(samples.len(), outer * size);
    let r2c = plan_r2c(size);
    let mut scratch = vec![ZERO; r2c.get_scratch_len()];
    let mut input = vec![0.0; size];
    let mut h = vec![ZERO; outer * half];
    for (line, dst) in samples.chunks_exact(size).zip(h.chunks_exact_mut(half)) {
        if line.iter().all(|&v| v == 0.0) {
            continue;
        }
        input.copy_from_slice(line);
        r2c.process_with_scratch(&mut input, dst, &mut scratch)
            .expect("buffer sizes match the plan");
        if let Some(cut) = cut {
            dst[(cut + 1).min(half)..].fill(ZERO);
        }
    }
    leading_passes(&mut h, dim, size, half, false, cut);
    let neg = negated_outer(dim, size);
    let mut out = vec![ZERO; outer * size];
    for o in 0..outer {
        let dst = &mut out[o * size..(o + 1) * size];
        dst[..half].copy_from_slice(&h[o * half..(o + 1) * half]);
        let mirror = &h[neg[o] * half..(neg[o] + 1) * half];
        for m in half..size {
            dst[m] = mirror[size - m].conj();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decode(mut idx: usize, dim: usize, size: usize) -> Vec<usize> {
        let mut out = vec![0usize; dim];
        for a in (0..dim).rev() {
            out[a] = idx % size;
            idx /= size;
        }
        out
    }

    fn naive(data: &[Complex64], dim: usize, size: usize, sign: f64) -> Vec<Complex64> {
        let total = size.pow(dim as u32);
        (0..total)
            .map(|k| {
                let kk = decode(k, dim, size);
                let mut acc = ZERO;
                for (x, &v) in data.iter().enumerate() {
                    let xx = decode(x, dim, size);
                    let phase: usize = kk.iter().zip(&xx).map(|(a, b)| a * b).sum();
                    let ang = sign * 2.0 * std::f64::consts::PI * (phase % size) as f64 / size as f64;
                    acc += v * Complex64::from_polar(1.0, ang);
                }
                acc
            })
            .collect()
    }

    #[test]
    fn forward_matches_naive_dft() {
        for (dim, size) in [(2usize, 8usize), (3, 4)] {
            let total = size.pow(dim as u32);
            let samples: Vec<f64> = (0..total).map(|i| (i as f64 * 0.37).sin() + 0.1 * i as f64).collect();
            let complex: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let expected = naive(&complex, dim, size, -1.0);
            let got = forward_real(&samples, dim, size);
            for (a, b) in got.iter().zip(&expected) {
                assert!((a - b).norm() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn inverse_keeps_real_part() {
        for (dim, size) in [(2usize, 8usize), (3, 4)] {
            let total = size.pow(dim as u32);
            // deliberately not Hermitian
            let coeffs: Vec<Complex64> = (0..total)
                .map(|i| Complex64::new((i as f64 * 1.3).cos(), (i as f64 * 0.7).sin()))
                .collect();
            let expected = naive(&coeffs, dim, size, 1.0);
            let got = inverse_real(&coeffs, dim, size);
            for (a, b) in got.iter().zip(&expected) {
                assert!((a - b.re).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn truncated_forward_matches_masked_full() {
        let (dim, size, cut) = (3usize, 12usize, 4usize);
        let total = size.pow(dim as u32);
        let samples: Vec<f64> = (0..total).map(|i| (i as f64 * 0.91).sin() + (i as f64 * 0.013).cos()).collect();
        let full = forward_real(&samples, dim, size);
        let cutf = forward_real_cut(&samples, dim, size, Some(cut));
        for (k, (a, b)) in full.iter().zip(&cutf).enumerate() {
            let keep = decode(k, dim, size).iter().all(|&i| i.min(size - i) <= cut && 2 * i != size);
            let want = if keep { *a } else { ZERO };
            assert!((want - b).norm() < 1e-11, "{k}: {want} vs {b}");
        }
    }

    #[test]
    fn sparse_spectrum_round_trip() {
        let (dim, size) = (3usize, 8usize);
        let mut coeffs = vec![ZERO; size.pow(3)];
        coeffs[9] = Complex64::new(1.0, 2.0);
        coeffs[63] = Complex64::new(1.0, -2.0);
        let samples = inverse_real(&coeffs, dim, size);
        let back = forward_real(&samples, dim, size);
        let scale = 1.0 / size.pow(3) as f64;
        for (a, b) in back.iter().zip(&coeffs) {
            assert!((a * scale - b).norm() < 1e-14);
        }
    }
}
