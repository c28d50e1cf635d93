//! Matrix-free statevector kernels for the layered evolution
//! `U_d(beta) U_p` with `U_p = exp(-i dt H_p)` (diagonal) and
//! `U_d(beta) = exp(-i dt beta sum_i X_i)`, plus exact expectation values of
//! `H_p`, `A = <i[H_d, H_p]>` and `B = <[H_d, [H_d, H_p]]>`.
//!
//! Qubit `i` is bit `i` of the amplitude index, matching [`crate::ising`].
//!
//! Kernels split work into fixed blocks of [`BLOCK`] amplitudes. Reductions
//! sum per-block partials in block order, so results are bitwise identical for
//! any thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::ising::{GroundInfo, MAX_QUBITS};

const BLOCK: usize = 1 << 12;
/// Registers smaller than this run single-threaded.
const PAR_MIN_DIM: usize = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("{0} qubits is outside the supported range 1..={MAX_QUBITS}")]
    BadQubitCount(usize),
    #[error("dimension mismatch: state has {state} amplitudes, operand has {operand}")]
    DimensionMismatch { state: usize, operand: usize },
    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("amplitude vector has zero norm")]
    ZeroNorm,
    #[error("basis index {index} out of range for {n_qubits} qubits")]
    BasisOutOfRange { index: usize, n_qubits: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Expectation values measured on one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerObservables {
    /// `<i[H_d, H_p]>`
    pub a_val: f64,
    /// `<[H_d, [H_d, H_p]]>`
    pub b_val: f64,
    /// `<H_p>`
    pub e_p: f64,
}

fn check_qubits(n: usize) -> Result<(), StateError> {
    if n == 0 || n > MAX_QUBITS {
        Err(StateError::BadQubitCount(n))
    } else {
        Ok(())
    }
}

/// Deterministic blocked reduction over `0..len`.
fn block_sum<T, F>(len: usize, f: F) -> T
where
    T: Send + Copy + std::iter::Sum<T> + Default,
    F: Fn(std::ops::Range<usize>) -> T + Sync,
{
    let n_blocks = len.div_ceil(BLOCK);
    let range = |k: usize| k * BLOCK..((k + 1) * BLOCK).min(len);
    let partials: Vec<T> = if len >= PAR_MIN_DIM {
        (0..n_blocks).into_par_iter().map(|k| f(range(k))).collect()
    } else {
        (0..n_blocks).map(|k| f(range(k))).collect()
    };
    partials.into_iter().sum()
}

fn for_each_block<F>(out: &mut [Complex64], f: F)
where
    F: Fn(usize, &mut [Complex64]) + Sync,
{
    if out.len() >= PAR_MIN_DIM {
        out.par_chunks_mut(BLOCK)
            .enumerate()
            .for_each(|(k, s)| f(k * BLOCK, s));
    } else {
        out.chunks_mut(BLOCK)
            .enumerate()
            .for_each(|(k, s)| f(k * BLOCK, s));
    }
}

/// `(H_d v)[b] = sum_i v[b ^ (1 << i)]`.
pub fn apply_hd_to(n_qubits: usize, input: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); input.len()];
    for_each_block(&mut out, |base, slice| {
        for (k, o) in slice.iter_mut().enumerate() {
            let b = base + k;
            let mut acc = Complex64::default();
            for i in 0..n_qubits {
                acc += input[b ^ (1 << i)];
            }
            *o = acc;
        }
    });
    out
}

impl Statevector {
    /// `|+>^n`: every amplitude equal to `2^(-n/2)`.
    pub fn uniform(n_qubits: usize) -> Result<Self, StateError> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = (dim as f64).sqrt().recip();
        Ok(Self {
            n_qubits,
            amps: vec![Complex64::new(a, 0.0); dim],
        })
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, StateError> {
        check_qubits(n_qubits)?;
        if index >= 1 << n_qubits {
            return Err(StateError::BasisOutOfRange { index, n_qubits });
        }
        let mut amps = vec![Complex64::default(); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps arbitrary amplitudes, rescaling them to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self, StateError> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(StateError::NotPowerOfTwo(len));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubits(n_qubits)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(StateError::ZeroNorm);
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        let amps = &self.amps;
        block_sum(self.dim(), |r| amps[r].iter().map(|a| a.norm_sqr()).sum())
    }

    fn check_dim(&self, operand: usize) -> Result<(), StateError> {
        if operand != self.dim() {
            Err(StateError::DimensionMismatch {
                state: self.dim(),
                operand,
            })
        } else {
            Ok(())
        }
    }

    /// In place: `amp[b] *= exp(-i dt E_b)`.
    pub fn apply_problem_phase(&mut self, energies: &[f64], dt: f64) -> Result<(), StateError> {
        self.check_dim(energies.len())?;
        for_each_block(&mut self.amps, |base, slice| {
            for (a, &e) in slice.iter_mut().zip(&energies[base..]) {
                let (s, c) = (-dt * e).sin_cos();
                *a *= Complex64::new(c, s);
            }
        });
        Ok(())
    }

    /// In place: `exp(-i theta X)` on every qubit, i.e. `exp(-i theta H_d)`.
    pub fn apply_driver(&mut self, theta: f64) {
        if theta == 0.0 {
            return;
        }
        let (s, c) = theta.sin_cos();
        let mix = |lo: &mut Complex64, hi: &mut Complex64| {
            let (a0, a1) = (*lo, *hi);
            // -i s a = (s a.im, -s a.re)
            *lo = Complex64::new(c * a0.re + s * a1.im, c * a0.im - s * a1.re);
            *hi = Complex64::new(c * a1.re + s * a0.im, c * a1.im - s * a0.re);
        };
        let parallel = self.dim() >= PAR_MIN_DIM;
        for q in 0..self.n_qubits {
            let stride = 1usize << q;
            let pass = |chunk: &mut [Complex64]| {
                for pair in chunk.chunks_exact_mut(2 * stride) {
                    let (lo, hi) = pair.split_at_mut(stride);
                    lo.iter_mut()
                        .zip(hi.iter_mut())
                        .for_each(|(l, h)| mix(l, h));
                }
            };
            if !parallel {
                pass(&mut self.amps);
            } else if 2 * stride <= BLOCK {
                self.amps.par_chunks_mut(BLOCK).for_each(pass);
            } else {
                for pair in self.amps.chunks_exact_mut(2 * stride) {
                    let (lo, hi) = pair.split_at_mut(stride);
                    lo.par_iter_mut()
                        .zip(hi.par_iter_mut())
                        .with_min_len(BLOCK)
                        .for_each(|(l, h)| mix(l, h));
                }
            }
        }
    }

    /// `H_d |psi>` (unnormalized).
    pub fn apply_hd(&self) -> Vec<Complex64> {
        apply_hd_to(self.n_qubits, &self.amps)
    }

    /// `<psi|H_p|psi>`.
    pub fn expval_hp(&self, energies: &[f64]) -> Result<f64, StateError> {
        self.check_dim(energies.len())?;
        let amps = &self.amps;
        Ok(block_sum(self.dim(), |r| {
            amps[r.clone()]
                .iter()
                .zip(&energies[r])
                .map(|(a, e)| e * a.norm_sqr())
                .sum()
        }))
    }

    /// `<i[H_d, H_p]> = -2 Im <H_d psi | H_p psi>`.
    pub fn expval_a(&self, energies: &[f64]) -> Result<f64, StateError> {
        self.check_dim(energies.len())?;
        let hd = self.apply_hd();
        Ok(self.a_from(&hd, energies))
    }

    fn a_from(&self, hd: &[Complex64], energies: &[f64]) -> f64 {
        let amps = &self.amps;
        let im: f64 = block_sum(self.dim(), |r| {
            r.map(|b| (hd[b].conj() * amps[b]).im * energies[b]).sum()
        });
        -2.0 * im
    }

    /// `<[H_d, [H_d, H_p]]> = 2 Re <H_d^2 psi | H_p psi> - 2 <H_d psi| H_p |H_d psi>`.
    pub fn expval_b(&self, energies: &[f64]) -> Result<f64, StateError> {
        self.check_dim(energies.len())?;
        let hd = self.apply_hd();
        Ok(self.b_from(&hd, energies))
    }

    fn b_from(&self, hd: &[Complex64], energies: &[f64]) -> f64 {
        let (n, amps) = (self.n_qubits, &self.amps);
        block_sum(self.dim(), |r| {
            r.map(|b| {
                // (H_d^2 psi)[b] = sum_i (H_d psi)[b ^ (1 << i)], formed on the fly.
                let mut hd2 = Complex64::default();
                for i in 0..n {
                    hd2 += hd[b ^ (1 << i)];
                }
                let hp_psi = amps[b] * energies[b];
                2.0 * (hd2.conj() * hp_psi).re - 2.0 * energies[b] * hd[b].norm_sqr()
            })
            .sum()
        })
    }

    /// `A`, `B` and `E_p` sharing one `H_d psi` pass.
    pub fn observables(&self, energies: &[f64]) -> Result<LayerObservables, StateError> {
        self.check_dim(energies.len())?;
        let hd = self.apply_hd();
        Ok(LayerObservables {
            a_val: self.a_from(&hd, energies),
            b_val: self.b_from(&hd, energies),
            e_p: self.expval_hp(energies)?,
        })
    }

    /// Probability mass on the optimal basis states.
    pub fn success_probability(&self, ground: &GroundInfo) -> Result<f64, StateError> {
        if let Some(&bad) = ground.optimal_states.iter().find(|&&b| b >= self.dim()) {
            return Err(StateError::DimensionMismatch {
                state: self.dim(),
                operand: bad + 1,
            });
        }
        let p: f64 = ground
            .optimal_states
            .iter()
            .map(|&b| self.amps[b].norm_sqr())
            .sum();
        Ok(p.min(1.0))
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= factor);
    }
}
