use faer::sparse::{SparseColMat, Triplet};
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operators::{SparseOp, Space};
use super::{estimated_occupation, suggested_n_fock, LindbladConfig, DEFAULT_TAIL_TOL};
use crate::error::{Error, Result};
use crate::params::{DriveSpec, OscillatorParams, TransmonParams};

/// Compressed-sparse-column superoperator with merged duplicates.
#[derive(Debug, Clone)]
pub struct SparseSuperOp {
    pub dim: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseSuperOp {
    fn from_entries(dim: usize, mut entries: Vec<(usize, usize, Complex64)>) -> Self {
        entries.sort_unstable_by_key(|&(r, c, _)| (c, r));
        let mut col_ptr = vec![0usize; dim + 1];
        let mut row_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("merged entry exists") += v;
            } else {
                row_idx.push(r);
                values.push(v);
                col_ptr[c + 1] += 1;
                last = Some((r, c));
            }
        }
        for c in 0..dim {
            col_ptr[c + 1] += col_ptr[c];
        }
        Self {
            dim,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// y = L x
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        for (c, &xc) in x.iter().enumerate() {
            if xc == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                y[self.row_idx[k]] += self.values[k] * xc;
            }
        }
        y
    }

    /// Entries as triplets, optionally replacing one row and adding a diagonal shift.
    pub(crate) fn to_faer(
        &self,
        shift: Complex64,
        replace_row: Option<(usize, &[(usize, Complex64)])>,
    ) -> Result<SparseColMat<usize, Complex64>> {
        let skip = replace_row.map(|(r, _)| r);
        let mut t = Vec::with_capacity(self.nnz() + self.dim);
        for c in 0..self.dim {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                let r = self.row_idx[k];
                if Some(r) != skip {
                    t.push(Triplet::new(r, c, self.values[k]));
                }
            }
            if shift != Complex64::new(0.0, 0.0) && Some(c) != skip {
                t.push(Triplet::new(c, c, -shift));
            }
        }
        if let Some((r, row)) = replace_row {
            for &(c, v) in row {
                t.push(Triplet::new(r, c, v));
            }
        }
        SparseColMat::try_new_from_triplets(self.dim, self.dim, &t)
            .map_err(|e| Error::UnstableDynamics(format!("sparse assembly failed: {e:?}")))
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for c in 0..self.dim {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                m[(self.row_idx[k], c)] += self.values[k];
            }
        }
        m
    }
}

/// Lindblad generator together with the model it was built from.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub matrix: SparseSuperOp,
    pub osc: OscillatorParams,
    pub transmon: Option<TransmonParams>,
    pub drive: Option<DriveSpec>,
    pub cfg: LindbladConfig,
}

impl Liouvillian {
    /// Hilbert-space dimension N·m.
    pub fn hilbert_dim(&self) -> usize {
        self.space().dim()
    }

    pub(crate) fn space(&self) -> Space {
        Space {
            n_fock: self.cfg.n_fock,
            levels: self.cfg.n_transmon,
        }
    }

    /// Applies the generator to a density matrix.
    pub fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let d = self.hilbert_dim();
        let y = self.matrix.apply(rho.as_slice());
        DMatrix::from_column_slice(d, d, &y)
    }

    /// Same model with a different Fock cutoff.
    pub fn rebuild(&self, n_fock: usize) -> Result<Liouvillian> {
        let cfg = LindbladConfig { n_fock, ..self.cfg };
        build_liouvillian(&self.osc, self.transmon.as_ref(), self.drive.as_ref(), &cfg)
    }
}

/// Assembles L = 1⊗K + K̄⊗1 + Σ c̄⊗c with K = −iH − ½Σc†c.
pub fn build_liouvillian(
    p: &OscillatorParams,
    q: Option<&TransmonParams>,
    drive: Option<&DriveSpec>,
    cfg: &LindbladConfig,
) -> Result<Liouvillian> {
    cfg.validate()?;
    p.require_stable()?;
    let q = if cfg.n_transmon > 1 {
        let q = q.ok_or_else(|| Error::invalid("transmon", "n_transmon > 1 needs transmon parameters"))?;
        q.validate()?;
        Some(q)
    } else {
        None
    };
    if let Some(d) = drive {
        d.validate()?;
        if d.detuning_d != 0.0 {
            return Err(Error::invalid(
                "detuning_d",
                "only drives at the frame frequency (detuning_d = 0) give a static generator",
            ));
        }
    }
    let occupation = estimated_occupation(p, drive);
    if occupation > cfg.n_fock as f64 / 4.0 {
        return Err(Error::TruncationTooSmall {
            n_fock: cfg.n_fock,
            occupation,
            suggested: suggested_n_fock(p, drive, DEFAULT_TAIL_TOL),
        });
    }

    let space = Space {
        n_fock: cfg.n_fock,
        levels: cfg.n_transmon,
    };
    let d = space.dim();
    let h = space.hamiltonian(p, q, drive);
    let cs = space.collapse_ops(p, q);

    let mut k = h.scaled(Complex64::new(0.0, -1.0));
    for c in &cs {
        k.extend(&c.adjoint().mul(c).scaled(Complex64::new(-0.5, 0.0)));
    }

    let mut entries = Vec::new();
    // 1 ⊗ K
    for j in 0..d {
        for &(r, c, v) in &k.entries {
            entries.push((r + j * d, c + j * d, v));
        }
    }
    // K̄ ⊗ 1
    for &(r, c, v) in &k.entries {
        for i in 0..d {
            entries.push((i + r * d, i + c * d, v.conj()));
        }
    }
    // c̄ ⊗ c
    for c in &cs {
        push_jump(&mut entries, c, d);
    }
    Ok(Liouvillian {
        matrix: SparseSuperOp::from_entries(d * d, entries),
        osc: *p,
        transmon: q.copied(),
        drive: drive.copied(),
        cfg: *cfg,
    })
}

fn push_jump(entries: &mut Vec<(usize, usize, Complex64)>, c: &SparseOp, d: usize) {
    for &(j, l, u) in &c.entries {
        for &(i, k, v) in &c.entries {
            entries.push((i + j * d, k + l * d, u.conj() * v));
        }
    }
}
