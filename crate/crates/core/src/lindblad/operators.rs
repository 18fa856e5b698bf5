//! Sparse Hilbert-space operators on the oscillator ⊗ transmon product.

use num_complex::Complex64;

use crate::params::{DriveSpec, OscillatorParams, TransmonParams};

/// Sparse matrix as (row, col, value) entries; duplicates are allowed.
#[derive(Debug, Clone, Default)]
pub(crate) struct SparseOp {
    pub dim: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOp {
    pub fn new(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn push(&mut self, r: usize, c: usize, v: Complex64) {
        if v != Complex64::new(0.0, 0.0) {
            self.entries.push((r, c, v));
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn adjoint(&self) -> SparseOp {
        SparseOp {
            dim: self.dim,
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect(),
        }
    }

    /// Product self · other, with duplicates merged.
    pub fn mul(&self, other: &SparseOp) -> SparseOp {
        let mut by_row: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); other.dim];
        for &(r, c, v) in &other.entries {
            by_row[r].push((c, v));
        }
        let mut acc = std::collections::BTreeMap::new();
        for &(r, k, v) in &self.entries {
            for &(c, w) in &by_row[k] {
                *acc.entry((r, c)).or_insert(Complex64::new(0.0, 0.0)) += v * w;
            }
        }
        let mut out = SparseOp::new(self.dim);
        for ((r, c), v) in acc {
            out.push(r, c, v);
        }
        out
    }

    pub fn scaled(mut self, s: Complex64) -> SparseOp {
        for e in &mut self.entries {
            e.2 *= s;
        }
        self
    }

    pub fn extend(&mut self, other: &SparseOp) {
        self.entries.extend_from_slice(&other.entries);
    }
}

/// Dimensions of the truncated product space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Space {
    pub n_fock: usize,
    pub levels: usize,
}

impl Space {
    pub fn dim(&self) -> usize {
        self.n_fock * self.levels
    }

    pub fn idx(&self, n: usize, k: usize) -> usize {
        n * self.levels + k
    }

    /// Oscillator lowering operator a ⊗ 1.
    pub fn a(&self) -> SparseOp {
        let mut op = SparseOp::new(self.dim());
        for n in 1..self.n_fock {
            for k in 0..self.levels {
                op.push(self.idx(n - 1, k), self.idx(n, k), Complex64::new((n as f64).sqrt(), 0.0));
            }
        }
        op
    }

    /// Transmon ladder b = Σ √k |k−1⟩⟨k|.
    pub fn b(&self) -> SparseOp {
        let mut op = SparseOp::new(self.dim());
        for n in 0..self.n_fock {
            for k in 1..self.levels {
                op.push(self.idx(n, k - 1), self.idx(n, k), Complex64::new((k as f64).sqrt(), 0.0));
            }
        }
        op
    }

    /// Transmon level number b†b.
    pub fn level_number(&self) -> SparseOp {
        let mut op = SparseOp::new(self.dim());
        for n in 0..self.n_fock {
            for k in 1..self.levels {
                op.push(self.idx(n, k), self.idx(n, k), Complex64::new(k as f64, 0.0));
            }
        }
        op
    }

    /// |e⟩⟨g| on the transmon, identity on the oscillator.
    pub fn sigma_plus(&self) -> SparseOp {
        let mut op = SparseOp::new(self.dim());
        if self.levels > 1 {
            for n in 0..self.n_fock {
                op.push(self.idx(n, 1), self.idx(n, 0), Complex64::new(1.0, 0.0));
            }
        }
        op
    }

    /// Rotating-frame Hamiltonian in MHz.
    pub fn hamiltonian(
        &self,
        p: &OscillatorParams,
        q: Option<&TransmonParams>,
        drive: Option<&DriveSpec>,
    ) -> SparseOp {
        let mut h = SparseOp::new(self.dim());
        let c = |x: f64| Complex64::new(x, 0.0);
        for n in 0..self.n_fock {
            for k in 0..self.levels {
                let i = self.idx(n, k);
                let mut e = p.delta_a * n as f64;
                if let Some(q) = q {
                    let kf = k as f64;
                    e += q.delta_q * kf + 0.5 * q.chi_q * kf * (kf - 1.0);
                }
                h.push(i, i, c(e));
                if n >= 2 {
                    let v = -0.5 * p.lam * ((n * (n - 1)) as f64).sqrt();
                    let j = self.idx(n - 2, k);
                    h.push(j, i, c(v));
                    h.push(i, j, c(v));
                }
                // g√(k+1)(a σ_{k+1,k} + h.c.)
                if let Some(q) = q {
                    if n >= 1 && k + 1 < self.levels {
                        let v = q.g * (((k + 1) * n) as f64).sqrt();
                        let j = self.idx(n - 1, k + 1);
                        h.push(j, i, c(v));
                        h.push(i, j, c(v));
                    }
                }
            }
        }
        if let Some(d) = drive {
            let eps = drive_amplitude(p, d);
            let a = self.a();
            h.extend(&a.clone().scaled(0.5 * eps));
            h.extend(&a.adjoint().scaled(0.5 * eps.conj()));
        }
        h
    }

    /// Collapse operators √κ a, √γ_1 b and √(2γ_φ) b†b.
    ///
    /// On the qubit manifold √(2γ_φ) b†b generates the same dissipator as
    /// √(γ_φ/2) σ_z (they differ by a multiple of the identity).
    pub fn collapse_ops(&self, p: &OscillatorParams, q: Option<&TransmonParams>) -> Vec<SparseOp> {
        let mut ops = vec![self.a().scaled(Complex64::new(p.kappa.sqrt(), 0.0))];
        if let Some(q) = q {
            if q.gamma_1 > 0.0 {
                ops.push(self.b().scaled(Complex64::new(q.gamma_1.sqrt(), 0.0)));
            }
            if q.gamma_phi > 0.0 {
                ops.push(self.level_number().scaled(Complex64::new((2.0 * q.gamma_phi).sqrt(), 0.0)));
            }
        }
        ops
    }
}

/// Complex drive amplitude ε_d = κ√n̄_d e^{i(θ − π/4)}.
pub(crate) fn drive_amplitude(p: &OscillatorParams, d: &DriveSpec) -> Complex64 {
    Complex64::from_polar(p.kappa * d.n_d.sqrt(), d.theta - std::f64::consts::FRAC_PI_4)
}
