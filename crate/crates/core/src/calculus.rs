//! Littlewood-Paley calculus for the exterior Dirichlet Laplacian.
//!
//! All projections act diagonally on the distorted Fourier side. The cutoff
//! `φ` equals 1 on `[0, 1]` and vanishes on `[2, ∞)`; its dyadic rescalings are
//!
//! ```text
//! φ_N(λ) = φ(λ/N)
//! ψ_N(λ) = φ(λ/N) − φ(2λ/N)          supported in [N/2, 2N]
//! ψ̃_N(λ) = φ(λ/(2N)) − φ(4λ/N)        supported in [N/4, 4N], 1 on [N/2, 2N]
//! ```

use crate::error::{Error, Result};
use crate::grid::{lq_norm_values, RadialField, RadialGrid};
use crate::scalar::Real;
use crate::transform::DistortedFourier;

/// The bump `φ(λ) = χ(2−λ) / (χ(2−λ) + χ(λ−1))` with `χ(x) = e^{−1/x}` for
/// `x > 0` and `0` otherwise.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SmoothCutoff;

impl SmoothCutoff {
    fn chi<T: Real>(x: T) -> T {
        if x > T::zero() {
            (-x.recip()).exp()
        } else {
            T::zero()
        }
    }

    /// `φ(λ)`; exactly 1 for `λ ≤ 1` and exactly 0 for `λ ≥ 2`.
    pub fn phi<T: Real>(&self, lambda: T) -> T {
        if lambda <= T::one() {
            return T::one();
        }
        if lambda >= T::two() {
            return T::zero();
        }
        let a = Self::chi(T::two() - lambda);
        let b = Self::chi(lambda - T::one());
        a / (a + b)
    }

    /// `φ_N(λ) = φ(λ/N)`.
    pub fn phi_n<T: Real>(&self, lambda: T, n: T) -> T {
        self.phi(lambda / n)
    }

    /// `ψ_N(λ) = φ(λ/N) − φ(2λ/N)`.
    pub fn psi<T: Real>(&self, lambda: T, n: T) -> T {
        self.phi(lambda / n) - self.phi(T::two() * lambda / n)
    }

    /// `ψ̃_N = ψ_{N/2} + ψ_N + ψ_{2N} = φ(λ/(2N)) − φ(4λ/N)`.
    pub fn psi_tilde<T: Real>(&self, lambda: T, n: T) -> T {
        self.phi(lambda / (T::two() * n)) - self.phi(T::lit(4.0) * lambda / n)
    }

    /// Symbol of a block at frequency `λ`.
    pub fn symbol<T: Real>(&self, block: DyadicBlock, lambda: T) -> T {
        let n = block.frequency::<T>();
        match block.kind {
            BlockKind::Leq => self.phi_n(lambda, n),
            BlockKind::At => self.psi(lambda, n),
            BlockKind::Tilde => self.psi_tilde(lambda, n),
            BlockKind::Gt => T::one() - self.phi_n(lambda, n),
        }
    }
}

/// Which projection a [`DyadicBlock`] stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    /// `P_{≤N}`, symbol `φ_N`.
    Leq,
    /// `P_N`, symbol `ψ_N`.
    At,
    /// `P̃_N`, symbol `ψ̃_N`.
    Tilde,
    /// `P_{>N}`, symbol `1 − φ_N`.
    Gt,
}

/// Dyadic projection at `N = 2^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicBlock {
    pub exponent: i32,
    pub kind: BlockKind,
}

impl DyadicBlock {
    pub fn new(exponent: i32, kind: BlockKind) -> Self {
        Self { exponent, kind }
    }

    pub fn at(exponent: i32) -> Self {
        Self::new(exponent, BlockKind::At)
    }

    pub fn frequency<T: Real>(&self) -> T {
        T::two().powi(self.exponent)
    }

    /// Frequency band the symbol varies on, which must be resolvable.
    fn band<T: Real>(&self) -> (T, T) {
        let n = self.frequency::<T>();
        match self.kind {
            BlockKind::At => (n / T::two(), T::two() * n),
            BlockKind::Tilde => (n / T::lit(4.0), T::lit(4.0) * n),
            BlockKind::Leq | BlockKind::Gt => (n, T::two() * n),
        }
    }

    /// Fails unless the block's band lies in [`resolvable_window`].
    pub fn check<T: Real>(&self, grid: &RadialGrid<T>) -> Result<()> {
        let (lo, hi) = resolvable_window(grid);
        let (a, b) = self.band::<T>();
        if a >= lo && b <= hi {
            Ok(())
        } else {
            Err(Error::Unresolvable { exponent: self.exponent, low: lo.as_f64(), high: hi.as_f64() })
        }
    }
}

/// `[2λ_1, λ_max/2] = [2π/L, πn/(2L)]`.
pub fn resolvable_window<T: Real>(grid: &RadialGrid<T>) -> (T, T) {
    let unit = T::PI() / grid.length();
    (T::two() * unit, unit * T::from_index(grid.intervals()) / T::two())
}

/// Exponents `k` for which `P_{2^k}` is resolvable, lowest to highest.
pub fn resolvable_exponents<T: Real>(grid: &RadialGrid<T>) -> Vec<i32> {
    let (lo, hi) = resolvable_window(grid);
    let start = (lo.log2().ceil().as_f64() as i32) + 1;
    let end = (hi.log2().floor().as_f64() as i32) - 1;
    (start..=end).filter(|&k| DyadicBlock::at(k).check(grid).is_ok()).collect()
}

/// Frequencies `[2^a, 2^b]` on which `Σ_k ψ_{2^k}` over the resolvable
/// exponents `a..=b` telescopes to exactly 1.
pub fn partition_window<T: Real>(grid: &RadialGrid<T>) -> Option<(T, T)> {
    let ks = resolvable_exponents(grid);
    Some((T::two().powi(*ks.first()?), T::two().powi(*ks.last()?)))
}

pub(crate) fn project_with<T: Real>(
    engine: &DistortedFourier<T>,
    f: &RadialField<T>,
    block: DyadicBlock,
) -> Result<RadialField<T>> {
    block.check(engine.grid())?;
    engine.apply_symbol(f, |l| SmoothCutoff.symbol(block, l))
}

/// Littlewood-Paley projection of `f`.
pub fn lp_project<T: Real>(f: &RadialField<T>, block: DyadicBlock) -> Result<RadialField<T>> {
    project_with(&DistortedFourier::new(*f.grid()), f, block)
}

/// `‖f‖_{Ḣ^s}` through the spectral weight `λ^s`; `|s| ≤ 2`.
pub fn sobolev_norm<T: Real>(f: &RadialField<T>, s: T) -> Result<T> {
    if !(s.abs() <= T::two()) {
        return Err(Error::InvalidArgument(format!("regularity must satisfy |s| <= 2, got {s}")));
    }
    Ok(crate::transform::forward(f).sobolev_norm(s))
}

fn check_exponent<T: Real>(name: &str, p: T) -> Result<()> {
    if p.is_nan() || p < T::one() {
        Err(Error::InvalidArgument(format!("{name} must lie in [1, ∞], got {p}")))
    } else {
        Ok(())
    }
}

/// All resolvable blocks `(N, P_N f)` from one forward transform.
fn blocks<T: Real>(engine: &DistortedFourier<T>, f: &RadialField<T>) -> Result<Vec<(T, Vec<T>)>> {
    let spectrum = engine.forward_values(f.values());
    let lambdas = engine.frequencies();
    resolvable_exponents(engine.grid())
        .into_iter()
        .map(|k| {
            let n = T::two().powi(k);
            let coeffs: Vec<T> = spectrum.iter().zip(lambdas).map(|(&c, &l)| c * SmoothCutoff.psi(l, n)).collect();
            Ok((n, engine.inverse_values(&coeffs)))
        })
        .collect()
}

/// `(Σ_N N^{s·r} ‖P_N f‖_q^r)^{1/r}` over resolvable `N`; `r = ∞` takes the sup.
pub fn besov_norm<T: Real>(f: &RadialField<T>, s: T, q: T, r_idx: T) -> Result<T> {
    check_exponent("q", q)?;
    check_exponent("r", r_idx)?;
    let engine = DistortedFourier::new(*f.grid());
    let mut terms = Vec::new();
    for (n, values) in blocks(&engine, f)? {
        terms.push(n.powf(s) * lq_norm_values(f.grid(), &values, q)?);
    }
    if r_idx.is_infinite() {
        return Ok(terms.into_iter().fold(T::zero(), T::max));
    }
    let max = terms.iter().fold(T::zero(), |m, &v| m.max(v));
    if max.is_zero() {
        return Ok(T::zero());
    }
    let sum: T = terms.iter().map(|&v| (v / max).powf(r_idx)).sum();
    Ok(max * sum.powf(r_idx.recip()))
}

/// `‖P_N f‖_q / (N^{3(1/p−1/q)} ‖f‖_p)` with `N = 2^exponent`.
pub fn bernstein_ratio<T: Real>(f: &RadialField<T>, exponent: i32, p: T, q: T) -> Result<T> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if p > q {
        return Err(Error::InvalidArgument(format!("need p <= q, got p = {p}, q = {q}")));
    }
    let denom_norm = lq_norm_values(f.grid(), f.values(), p)?;
    if denom_norm.is_zero() {
        return Err(Error::Degenerate("Bernstein ratio of the zero field".into()));
    }
    let block = DyadicBlock::at(exponent);
    let projected = lp_project(f, block)?;
    let gain = T::lit(3.0) * (p.recip() - q.recip());
    let n = block.frequency::<T>();
    Ok(lq_norm_values(f.grid(), projected.values(), q)? / (n.powf(gain) * denom_norm))
}

/// `‖(Σ_N N^{2s}|P_N f|²)^{1/2}‖_p / ‖(−Δ)^{s/2} f‖_p`, `1 < p < ∞`.
pub fn square_function_ratio<T: Real>(f: &RadialField<T>, s: T, p: T) -> Result<T> {
    if !(p > T::one() && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 1 < p < ∞, got {p}")));
    }
    let engine = DistortedFourier::new(*f.grid());
    let fractional = engine.apply_symbol(f, |l| l.powf(s))?;
    let denom = lq_norm_values(f.grid(), fractional.values(), p)?;
    if denom.is_zero() {
        return Err(Error::Degenerate("square function ratio of the zero field".into()));
    }
    let mut square = vec![T::zero(); f.len()];
    for (n, values) in blocks(&engine, f)? {
        let w = n.powf(T::two() * s);
        for (acc, v) in square.iter_mut().zip(values) {
            *acc = *acc + w * v * v;
        }
    }
    let square: Vec<T> = square.into_iter().map(|v| v.sqrt()).collect();
    Ok(lq_norm_values(f.grid(), &square, p)? / denom)
}
