//! Dense reference operators for small registers.
//!
//! These build full `2^n x 2^n` matrices from Kronecker products of Pauli
//! matrices and exponentiate them with scaling-and-squaring, sharing no code
//! with the matrix-free kernels they are used to check. Intended for n <= 6.

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim));
        Self {
            dim,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * m.dim + i] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    pub fn kron(&self, other: &Self) -> Self {
        let dim = self.dim * other.dim;
        let mut out = Self::zeros(dim);
        for (r1, c1) in (0..self.dim).flat_map(|r| (0..self.dim).map(move |c| (r, c))) {
            let a = self.get(r1, c1);
            for (r2, c2) in (0..other.dim).flat_map(|r| (0..other.dim).map(move |c| (r, c))) {
                out.data[(r1 * other.dim + r2) * dim + c1 * other.dim + c2] = a * other.get(r2, c2);
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    out.data[r * d + c] += a * other.data[k * d + c];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-ONE))
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    fn max_abs_row_sum(&self) -> f64 {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Matrix exponential: Taylor series on `A / 2^s` with `||A / 2^s|| <= 1/2`,
    /// then `s` squarings.
    pub fn expm(&self) -> Self {
        let norm = self.max_abs_row_sum();
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as i32
        } else {
            0
        };
        let a = self.scaled(Complex64::new(0.5f64.powi(squarings), 0.0));
        let mut sum = Self::identity(self.dim);
        let mut term = Self::identity(self.dim);
        for k in 1..=30 {
            term = term.matmul(&a).scaled(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        for _ in 0..squarings {
            sum = sum.matmul(&sum);
        }
        sum
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    /// `<v|M|v>`, not assumed real.
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        v.iter().zip(self.apply(v)).map(|(a, b)| a.conj() * b).sum()
    }
}

pub fn pauli_x() -> DenseMatrix {
    DenseMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
}

pub fn pauli_z() -> DenseMatrix {
    DenseMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]])
}

/// Single-qubit operator `op` on `qubit` of an `n`-qubit register; qubit `i` is
/// bit `i` of the basis index, so the leftmost Kronecker factor is qubit `n-1`.
pub fn on_qubit(op: &DenseMatrix, qubit: usize, n: usize) -> DenseMatrix {
    (0..n).rev().fold(DenseMatrix::identity(1), |acc, q| {
        if q == qubit {
            acc.kron(op)
        } else {
            acc.kron(&DenseMatrix::identity(2))
        }
    })
}

/// `sum_i X_i`.
pub fn driver(n: usize) -> DenseMatrix {
    (0..n).fold(DenseMatrix::zeros(1 << n), |acc, i| {
        acc.add(&on_qubit(&pauli_x(), i, n))
    })
}

/// Builds `sum J_ij Z_i Z_j + sum h_i Z_i + c0` from Pauli products.
pub fn ising_hamiltonian(model: &crate::ising::IsingModel) -> DenseMatrix {
    let n = model.n_qubits();
    let mut h = DenseMatrix::identity(1 << n).scaled(Complex64::new(model.constant(), 0.0));
    for c in model.couplings() {
        let zz = on_qubit(&pauli_z(), c.i, n).matmul(&on_qubit(&pauli_z(), c.j, n));
        h = h.add(&zz.scaled(Complex64::new(c.value, 0.0)));
    }
    for (i, &f) in model.fields().iter().enumerate() {
        h = h.add(&on_qubit(&pauli_z(), i, n).scaled(Complex64::new(f, 0.0)));
    }
    h
}

/// `(<i[H_d, H_p]>, <[H_d, [H_d, H_p]]>)` from explicit dense commutators.
pub fn dense_commutator_expectations(
    psi: &[Complex64],
    energies: &[f64],
) -> (Complex64, Complex64) {
    let n = psi.len().trailing_zeros() as usize;
    let hd = driver(n);
    let hp = DenseMatrix::diagonal(energies);
    let c1 = hd.commutator(&hp);
    let c2 = hd.commutator(&c1);
    let a = c1.scaled(Complex64::new(0.0, 1.0)).expectation(psi);
    (a, c2.expectation(psi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_pauli_x_rotation() {
        // exp(-i t X) = cos t I - i sin t X
        let t = 2.7;
        let u = pauli_x().scaled(Complex64::new(0.0, -t)).expm();
        assert!((u.get(0, 0) - Complex64::new(t.cos(), 0.0)).norm() < 1e-14);
        assert!((u.get(0, 1) - Complex64::new(0.0, -t.sin())).norm() < 1e-14);
    }

    #[test]
    fn qubit_ordering() {
        // Z on qubit 0 flips sign on odd basis indices.
        let z0 = on_qubit(&pauli_z(), 0, 3);
        for b in 0..8 {
            let want = if b & 1 == 0 { 1.0 } else { -1.0 };
            assert_eq!(z0.get(b, b), Complex64::new(want, 0.0));
        }
        let x2 = on_qubit(&pauli_x(), 2, 3);
        assert_eq!(x2.get(0b100, 0b000), ONE);
    }
}
