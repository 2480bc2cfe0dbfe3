//! Radix-2 FFT carried out in double-double arithmetic.
//!
//! The public transforms round their output to `f64` exactly once, so the
//! only error left in a transformed field is the final rounding of each
//! sample. Twiddles are built from two short tables of directly evaluated
//! roots, which keeps them accurate to a few units of 2^-106.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::dd::{cis_turns, CDd, Dd};

/// Sign of the exponent in `exp(±2πi·jk/n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    Negative,
    Positive,
}

/// Table of `exp(-2πi k/n)` for `k < n/2`.
fn twiddles(n: usize) -> Vec<CDd> {
    let half = n / 2;
    if half == 0 {
        return Vec::new();
    }
    let bits = half.trailing_zeros();
    let fine_len = 1usize << bits.div_ceil(2);
    let coarse_len = half.div_ceil(fine_len);
    let root = |k: usize| {
        let (c, s) = cis_turns(k as f64 / n as f64);
        CDd::new(c, -s)
    };
    let fine: Vec<CDd> = (0..fine_len).map(root).collect();
    let coarse: Vec<CDd> = (0..coarse_len).map(|a| root(a * fine_len)).collect();
    (0..half)
        .map(|k| {
            let (a, b) = (k / fine_len, k % fine_len);
            if b == 0 {
                coarse[a]
            } else {
                coarse[a] * fine[b]
            }
        })
        .collect()
}

fn bit_reverse(x: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (usize::BITS - bits)
    }
}

/// Element type a butterfly pass can work on.
trait Lane: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn conj(self) -> Self;
}

impl Lane for CDd {
    #[inline(always)]
    fn conj(self) -> Self {
        CDd::conj(self)
    }
}

impl Lane for Complex64 {
    #[inline(always)]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
}

fn run<T: Lane>(buf: &mut [T], tw: &[T], dir: Direction) {
    let n = buf.len();
    let mut stage = Vec::with_capacity(n / 2);
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        stage.clear();
        stage.extend((0..half).map(|j| match dir {
            Direction::Negative => tw[j * stride],
            Direction::Positive => tw[j * stride].conj(),
        }));
        for block in buf.chunks_exact_mut(len) {
            let (lower, upper) = block.split_at_mut(half);
            for ((u, v), w) in lower.iter_mut().zip(upper.iter_mut()).zip(&stage) {
                let a = *u;
                let b = *v * *w;
                *u = a + b;
                *v = a - b;
            }
        }
        len *= 2;
    }
}

/// Centered discrete Fourier transform.
///
/// Input sample `k` sits at coordinate `k - n/2`, and so does output sample
/// `j`. Computes `out[j] = scale · Σ_k in[k] · exp(±2πi (j-n/2)(k-n/2)/n)`
/// with the sum in double-double. The input may carry a low-order part; the
/// output is returned as its nearest doubles plus their rounding remainders.
pub(crate) fn centered_dft(
    input: &[Complex64],
    input_lo: Option<&[Complex64]>,
    dir: Direction,
    scale: f64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = input.len();
    debug_assert!(n.is_power_of_two());
    let mut buf = vec![CDd::default(); n];
    for (k, z) in input.iter().enumerate() {
        let lo = input_lo.map_or(Complex64::default(), |l| l[k]);
        buf[scatter_index(k, n)] = CDd::new(Dd::from_pair(z.re, lo.re), Dd::from_pair(z.im, lo.im));
    }
    run(&mut buf, &twiddles(n), dir);
    let shift = n / 2;
    let mut hi = Vec::with_capacity(n);
    let mut lo = Vec::with_capacity(n);
    for j in 0..n {
        let z = buf[(j + shift) % n];
        let (rh, rl) = z.re.mul_f64(scale).split_f64();
        let (ih, il) = z.im.mul_f64(scale).split_f64();
        hi.push(Complex64::new(rh, ih));
        lo.push(Complex64::new(rl, il));
    }
    (hi, lo)
}

/// Same transform as [`centered_dft`] in plain `f64` arithmetic (still with
/// accurate twiddles). Used for internal correlations where ~1e-15 relative
/// error is irrelevant.
pub(crate) fn centered_dft_fast(input: &[Complex64], dir: Direction, scale: f64) -> Vec<Complex64> {
    let n = input.len();
    debug_assert!(n.is_power_of_two());
    let mut buf = vec![Complex64::default(); n];
    for (k, z) in input.iter().enumerate() {
        buf[scatter_index(k, n)] = *z;
    }
    let tw: Vec<Complex64> = twiddles(n)
        .into_iter()
        .map(|w| Complex64::new(w.re.to_f64(), w.im.to_f64()))
        .collect();
    run(&mut buf, &tw, dir);
    let shift = n / 2;
    (0..n).map(|j| buf[(j + shift) % n] * scale).collect()
}

/// Position of centered sample `k` in the bit-reversed work buffer: rotate so
/// the zero coordinate lands at index 0, then bit-reverse.
#[inline]
fn scatter_index(k: usize, n: usize) -> usize {
    let bits = n.trailing_zeros();
    bit_reverse((k + n / 2) % n, bits)
}

/// Accurate sum of `f64` values (double-double accumulator).
pub(crate) fn accurate_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values
        .into_iter()
        .fold(Dd::ZERO, |acc, x| acc + Dd::from_f64(x))
        .to_f64()
}
