//! Type-I discrete sine transform on top of a complex FFT.
//!
//! `S_k = Σ_{j=1}^{n−1} x_j sin(πjk/n)` for `k = 1..n−1`. The input is
//! extended to an odd sequence of length `2n`, whose FFT is `−2i·S`. Two real
//! inputs are packed into the real and imaginary parts of one buffer, so a
//! pair costs a single FFT.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

/// Planned DST-I for a fixed `n`. The plan is immutable; every call allocates
/// its own buffers, so one instance can be shared across threads.
#[derive(Clone)]
pub struct SineTransform<T: Real> {
    n: usize,
    fft: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for SineTransform<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SineTransform").field("n", &self.n).finish()
    }
}

impl<T: Real> SineTransform<T> {
    /// Plans the transform for inputs of length `n − 1`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "DST-I needs n >= 2");
        let fft = FftPlanner::new().plan_fft_forward(2 * n);
        Self { n, fft }
    }

    /// Input/output length `n − 1`.
    pub fn len(&self) -> usize {
        self.n - 1
    }

    pub fn is_empty(&self) -> bool {
        self.n <= 1
    }

    fn run(&self, a: &[T], b: Option<&[T]>) -> Vec<Complex<T>> {
        let m = self.len();
        assert_eq!(a.len(), m, "DST-I input length");
        let mut buf = vec![Complex::new(T::zero(), T::zero()); 2 * self.n];
        match b {
            Some(b) => {
                assert_eq!(b.len(), m, "DST-I input length");
                for j in 1..self.n {
                    let z = Complex::new(a[j - 1], b[j - 1]);
                    buf[j] = z;
                    buf[2 * self.n - j] = -z;
                }
            }
            None => {
                for j in 1..self.n {
                    let z = Complex::new(a[j - 1], T::zero());
                    buf[j] = z;
                    buf[2 * self.n - j] = -z;
                }
            }
        }
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); self.fft.get_inplace_scratch_len()];
        self.fft.process_with_scratch(&mut buf, &mut scratch);
        buf
    }

    /// DST-I of one real sequence.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let spec = self.run(x, None);
        let half = T::half();
        (1..self.n).map(|k| -spec[k].im * half).collect()
    }

    /// DST-I of two real sequences with one complex FFT.
    pub fn apply_pair(&self, a: &[T], b: &[T]) -> (Vec<T>, Vec<T>) {
        let spec = self.run(a, Some(b));
        let half = T::half();
        let sa = (1..self.n).map(|k| -spec[k].im * half).collect();
        let sb = (1..self.n).map(|k| spec[k].re * half).collect();
        (sa, sb)
    }
}
