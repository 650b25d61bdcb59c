//! Discrete Fourier transforms of arbitrary length.
//!
//! Powers of two go through an iterative radix-2 Cooley–Tukey pass; every
//! other length is reduced to a power-of-two circular convolution with
//! Bluestein's chirp. Transforms are unnormalized.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `X_k = Σ_j x_j e^{-2πijk/n}`
    Forward,
    /// `x_j = Σ_k X_k e^{+2πijk/n}` (no 1/n factor)
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

/// In-place DFT of any length.
pub fn transform(buf: &mut [Complex64], dir: Direction) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(buf, dir);
    } else {
        bluestein(buf, dir);
    }
}

/// `e^{sign·2πik/n}` for k in 0..count, each evaluated directly to avoid
/// accumulated rotation error.
fn twiddles(n: usize, count: usize, sign: f64) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            let (s, c) = (2.0 * PI * k as f64 / n as f64).sin_cos();
            Complex64::new(c, sign * s)
        })
        .collect()
}

fn radix2(buf: &mut [Complex64], dir: Direction) {
    let n = buf.len();
    let levels = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - levels);
        if j > i {
            buf.swap(i, j);
        }
    }
    let table = twiddles(n, n / 2, dir.sign());
    let mut size = 2;
    while size <= n {
        let half = size / 2;
        let step = n / size;
        for start in (0..n).step_by(size) {
            for k in 0..half {
                let w = table[k * step];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        size *= 2;
    }
}

fn bluestein(buf: &mut [Complex64], dir: Direction) {
    let n = buf.len();
    let m = (2 * n - 1).next_power_of_two();
    let sign = dir.sign();
    // chirp_k = e^{sign·πik²/n}; k² is reduced mod 2n so the angle stays small.
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let kk = ((k as u128 * k as u128) % (2 * n as u128)) as f64;
            let (s, c) = (PI * kk / n as f64).sin_cos();
            Complex64::new(c, sign * s)
        })
        .collect();
    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        a[k] = buf[k] * chirp[k];
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        b[k] = chirp[k].conj();
        b[m - k] = chirp[k].conj();
    }
    radix2(&mut a, Direction::Forward);
    radix2(&mut b, Direction::Forward);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    radix2(&mut a, Direction::Inverse);
    let scale = 1.0 / m as f64;
    for k in 0..n {
        buf[k] = a[k] * chirp[k] * scale;
    }
}

/// Linear convolution of `x` and `y`, keeping the first `keep` entries.
pub fn convolve(x: &[Complex64], y: &[Complex64], keep: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    if x.is_empty() || y.is_empty() || keep == 0 {
        return vec![zero; keep];
    }
    let x = &x[..x.len().min(keep)];
    let y = &y[..y.len().min(keep)];
    let full = x.len() + y.len() - 1;
    let size = full.next_power_of_two();
    let mut a = vec![zero; size];
    let mut b = vec![zero; size];
    a[..x.len()].copy_from_slice(x);
    b[..y.len()].copy_from_slice(y);
    radix2_or_trivial(&mut a, Direction::Forward);
    radix2_or_trivial(&mut b, Direction::Forward);
    for (p, q) in a.iter_mut().zip(&b) {
        *p *= *q;
    }
    radix2_or_trivial(&mut a, Direction::Inverse);
    let scale = 1.0 / size as f64;
    let mut out: Vec<Complex64> = a.into_iter().take(full.min(keep)).map(|v| v * scale).collect();
    out.resize(keep, zero);
    out
}

fn radix2_or_trivial(buf: &mut [Complex64], dir: Direction) {
    if buf.len() > 1 {
        radix2(buf, dir);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex64], dir: Direction) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, v)| {
                    let ang = dir.sign() * 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    acc + v * Complex64::new(ang.cos(), ang.sin())
                })
            })
            .collect()
    }

    fn sample(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64 * 1.3).cos() - 0.2))
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_mixed_lengths() {
        for &n in &[1usize, 2, 3, 5, 8, 12, 17, 64, 100] {
            let x = sample(n);
            for dir in [Direction::Forward, Direction::Inverse] {
                let mut fast = x.clone();
                transform(&mut fast, dir);
                let slow = naive_dft(&x, dir);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).norm() < 1e-11 * n as f64, "n = {n}");
                }
            }
        }
    }

    #[test]
    fn convolve_matches_direct() {
        let x = sample(13);
        let y = sample(7);
        let got = convolve(&x, &y, 25);
        for k in 0..25 {
            let mut want = Complex64::new(0.0, 0.0);
            for i in 0..x.len() {
                if k >= i && k - i < y.len() {
                    want += x[i] * y[k - i];
                }
            }
            assert!((got[k] - want).norm() < 1e-13);
        }
    }
}
