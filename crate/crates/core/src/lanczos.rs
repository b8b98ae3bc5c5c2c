//! Block Lanczos for the lowest eigenpairs of a real symmetric operator.
//!
//! Every new block is orthogonalized against the whole stored basis twice
//! (classical Gram-Schmidt with one reorthogonalization pass), so no ghost
//! copies appear. The projected matrix is formed from explicit products
//! `Qᵀ H Q`, which makes thick restarts exact: on restart the basis is
//! replaced by the lowest Ritz vectors and the projected matrix by their
//! Ritz values, and the already orthogonalized next block carries on.
//!
//! A block of `b` vectors finds eigenvalues of multiplicity up to `b`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sparse::CsrMatrix;

/// Symmetric linear map applied through matrix-vector products.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymmetricOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y)
    }
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let out = self * DVector::from_column_slice(x);
        y.copy_from_slice(out.as_slice());
    }
}

#[derive(Clone, Debug)]
pub struct LanczosConfig {
    pub num_states: usize,
    pub block_size: usize,
    /// Largest basis kept before a thick restart.
    pub max_basis: usize,
    /// Residual norm bound `‖H v − θ v‖` for every requested pair.
    pub tolerance: f64,
    /// Block steps allowed.
    pub max_iterations: usize,
    pub seed: u64,
}

impl LanczosConfig {
    pub fn new(num_states: usize, tolerance: f64, max_iterations: usize) -> Self {
        let block_size = num_states + 2;
        Self {
            num_states,
            block_size,
            max_basis: (12 * block_size).max(60),
            tolerance,
            max_iterations,
            seed: 0x5eed_1a9c_2b0f_77e1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LanczosOutcome {
    pub values: Vec<f64>,
    /// `dim × num_states`, orthonormal columns.
    pub vectors: DMatrix<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

struct Basis {
    q: DMatrix<f64>,
    hq: DMatrix<f64>,
    t: DMatrix<f64>,
    len: usize,
}

impl Basis {
    fn q(&self) -> nalgebra::DMatrixView<'_, f64> {
        self.q.columns(0, self.len)
    }

    /// Removes the components of `w` along the stored basis, twice.
    fn project_out(&self, w: &mut DMatrix<f64>) {
        if self.len == 0 {
            return;
        }
        for _ in 0..2 {
            let c = self.q().tr_mul(w);
            w.gemm(-1.0, &self.q(), &c, 1.0);
        }
    }

    /// Appends orthonormal `v` (⟂ basis) and its image `hv`.
    fn push(&mut self, v: &DMatrix<f64>, hv: &DMatrix<f64>) {
        let b = v.ncols();
        let start = self.len;
        self.q.columns_mut(start, b).copy_from(v);
        self.hq.columns_mut(start, b).copy_from(hv);
        self.len += b;
        let col = self.q().tr_mul(hv);
        for j in 0..b {
            for i in 0..start {
                self.t[(i, start + j)] = col[(i, j)];
                self.t[(start + j, i)] = col[(i, j)];
            }
        }
        // the new diagonal block is symmetrized
        for a in 0..b {
            for c in a..b {
                let s = 0.5 * (col[(start + a, c)] + col[(start + c, a)]);
                self.t[(start + a, start + c)] = s;
                self.t[(start + c, start + a)] = s;
            }
        }
    }

    /// Ritz values ascending and the matching coefficient columns.
    fn ritz(&self) -> (Vec<f64>, DMatrix<f64>) {
        let t = self.t.view((0, 0), (self.len, self.len)).into_owned();
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..self.len).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let coeffs = DMatrix::from_fn(self.len, self.len, |r, c| eig.eigenvectors[(r, order[c])]);
        (values, coeffs)
    }
}

/// Gram-Schmidt on the columns of `w` (already ⟂ basis). Columns that
/// collapse are replaced by random directions; returns the surviving
/// orthonormal columns, possibly fewer than requested when the space is
/// exhausted.
fn orthonormalize_block(basis: &Basis, w: DMatrix<f64>, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let n = w.nrows();
    let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(w.ncols());
    for j in 0..w.ncols() {
        let mut candidate = w.column(j).into_owned();
        let mut fresh = false;
        for attempt in 0..3 {
            let reference = candidate.norm();
            for _ in 0..2 {
                for a in &accepted {
                    let c = a.dot(&candidate);
                    candidate.axpy(-c, a, 1.0);
                }
                if fresh {
                    let mut m = DMatrix::from_column_slice(n, 1, candidate.as_slice());
                    basis.project_out(&mut m);
                    candidate = m.column(0).into_owned();
                }
            }
            let norm = candidate.norm();
            if norm > 1e-8 * reference.max(f64::MIN_POSITIVE) && norm > 1e-300 {
                candidate /= norm;
                accepted.push(candidate.clone());
                break;
            }
            if attempt == 2 {
                break;
            }
            candidate = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
            let mut m = DMatrix::from_column_slice(n, 1, candidate.as_slice());
            basis.project_out(&mut m);
            candidate = m.column(0).into_owned();
            fresh = true;
        }
    }
    let mut out = DMatrix::zeros(n, accepted.len());
    for (j, a) in accepted.iter().enumerate() {
        out.set_column(j, a);
    }
    out
}

fn apply_block<H: SymmetricOperator + ?Sized>(op: &H, v: &DMatrix<f64>) -> DMatrix<f64> {
    let mut hv = DMatrix::zeros(v.nrows(), v.ncols());
    for j in 0..v.ncols() {
        let (x, y) = (v.column(j), &mut hv.column_mut(j));
        op.apply(x.as_slice(), y.as_mut_slice());
    }
    hv
}

fn residual_norms<H: SymmetricOperator + ?Sized>(
    op: &H,
    values: &[f64],
    vectors: &DMatrix<f64>,
) -> Vec<f64> {
    let hv = apply_block(op, vectors);
    values
        .iter()
        .enumerate()
        .map(|(j, &e)| (hv.column(j) - vectors.column(j) * e).norm())
        .collect()
}

/// Lowest `config.num_states` eigenpairs of `op`.
///
/// Returns the best pairs found with `converged == false` when the
/// iteration budget runs out.
pub fn lowest_eigenpairs<H: SymmetricOperator + ?Sized>(
    op: &H,
    config: &LanczosConfig,
) -> LanczosOutcome {
    let n = op.dim();
    let k = config.num_states;
    assert!(
        k >= 1 && k <= n,
        "requested {k} eigenpairs of a {n}-dimensional operator"
    );
    let b = config.block_size.max(k).min(n);
    let max_basis = config.max_basis.max(2 * b + k).min(n);
    let keep = (k + b).min(max_basis.saturating_sub(b)).max(k);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut basis = Basis {
        q: DMatrix::zeros(n, max_basis),
        hq: DMatrix::zeros(n, max_basis),
        t: DMatrix::zeros(max_basis, max_basis),
        len: 0,
    };

    let start = DMatrix::from_fn(n, b, |_, _| rng.random::<f64>() - 0.5);
    let mut block = orthonormalize_block(&basis, start, &mut rng);

    let mut best: Option<(Vec<f64>, DMatrix<f64>, Vec<f64>)> = None;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        if block.ncols() == 0 {
            break;
        }
        iterations += 1;
        let hv = apply_block(op, &block);
        basis.push(&block, &hv);

        let (values, coeffs) = basis.ritz();
        let m = basis.len;
        let wanted = coeffs.columns(0, k.min(m));
        if m >= k {
            let y = basis.q() * wanted;
            let hy = basis.hq.columns(0, m) * wanted;
            let est: Vec<f64> = (0..k)
                .map(|j| (hy.column(j) - y.column(j) * values[j]).norm())
                .collect();
            if est.iter().all(|&r| r <= config.tolerance) || m == n {
                let residuals = residual_norms(op, &values[..k], &y);
                if residuals.iter().all(|&r| r <= config.tolerance) || m == n {
                    let converged = residuals.iter().all(|&r| r <= config.tolerance);
                    return LanczosOutcome {
                        values: values[..k].to_vec(),
                        vectors: y,
                        residuals,
                        iterations,
                        converged,
                    };
                }
            }
            let worst = est.iter().cloned().fold(0.0, f64::max);
            if best
                .as_ref()
                .is_none_or(|(_, _, r)| worst < r.iter().cloned().fold(0.0, f64::max))
            {
                best = Some((values[..k].to_vec(), y, est));
            }
        }

        let mut next = hv;
        basis.project_out(&mut next);
        let next = orthonormalize_block(&basis, next, &mut rng);

        if basis.len + next.ncols() > max_basis {
            // thick restart onto the lowest Ritz vectors
            let c = coeffs.columns(0, keep).into_owned();
            let q_new = basis.q() * &c;
            let hq_new = basis.hq.columns(0, m) * &c;
            basis.q.columns_mut(0, keep).copy_from(&q_new);
            basis.hq.columns_mut(0, keep).copy_from(&hq_new);
            basis.t.fill(0.0);
            let projected = q_new.tr_mul(&hq_new);
            for i in 0..keep {
                for j in 0..keep {
                    basis.t[(i, j)] = 0.5 * (projected[(i, j)] + projected[(j, i)]);
                }
            }
            basis.len = keep;
        }
        block = next;
    }

    let (values, vectors, _) = best.unwrap_or_else(|| {
        let (values, coeffs) = basis.ritz();
        let m = basis.len.min(k);
        let y = basis.q() * coeffs.columns(0, m);
        (values[..m].to_vec(), y, Vec::new())
    });
    let residuals = residual_norms(op, &values, &vectors);
    LanczosOutcome {
        converged: values.len() == k && residuals.iter().all(|&r| r <= config.tolerance),
        values,
        vectors,
        residuals,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_with_rotation(diag: &[f64]) -> DMatrix<f64> {
        // conjugate a diagonal matrix by a Householder reflector so the
        // spectrum is known but the matrix is dense
        let n = diag.len();
        let u = DVector::from_fn(n, |i, _| ((i * 37 % 11) as f64 - 5.0) + 0.5).normalize();
        let h = DMatrix::identity(n, n) - &u * u.transpose() * 2.0;
        &h * DMatrix::from_diagonal(&DVector::from_column_slice(diag)) * &h
    }

    #[test]
    fn finds_lowest_of_known_spectrum() {
        let diag: Vec<f64> = (0..120).map(|i| (i as f64).sqrt() * 3.0 - 1.0).collect();
        let a = diag_with_rotation(&diag);
        let out = lowest_eigenpairs(&a, &LanczosConfig::new(5, 1e-9, 500));
        assert!(out.converged);
        for (got, want) in out.values.iter().zip(&diag) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn resolves_degenerate_multiplets() {
        let mut diag = vec![0.0, 0.0, 0.0, 1.0, 1.0];
        diag.extend((0..80).map(|i| 2.0 + i as f64 * 0.25));
        let a = diag_with_rotation(&diag);
        let out = lowest_eigenpairs(&a, &LanczosConfig::new(5, 1e-10, 500));
        assert!(out.converged);
        for (got, want) in out.values.iter().zip(&diag) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        let gram = out.vectors.tr_mul(&out.vectors);
        assert!((gram - DMatrix::identity(5, 5)).amax() < 1e-10);
    }

    #[test]
    fn restarts_on_small_basis() {
        let diag: Vec<f64> = (0..300)
            .map(|i| i as f64 * 0.01 + (i % 7) as f64 * 1e-3)
            .collect();
        let a = diag_with_rotation(&diag);
        let mut config = LanczosConfig::new(3, 1e-8, 2000);
        config.max_basis = 20;
        let out = lowest_eigenpairs(&a, &config);
        assert!(out.converged, "residuals {:?}", out.residuals);
        let mut sorted = diag.clone();
        sorted.sort_by(f64::total_cmp);
        for (got, want) in out.values.iter().zip(&sorted) {
            assert!((got - want).abs() < 1e-8);
        }
    }

    #[test]
    fn reports_non_convergence() {
        let diag: Vec<f64> = (0..400).map(|i| i as f64).collect();
        let a = diag_with_rotation(&diag);
        let out = lowest_eigenpairs(&a, &LanczosConfig::new(2, 1e-12, 2));
        assert!(!out.converged);
        assert_eq!(out.iterations, 2);
        assert_eq!(out.residuals.len(), 2);
    }

    #[test]
    fn whole_space_is_exact() {
        let a = diag_with_rotation(&[3.0, 1.0, 2.0, 0.5]);
        let out = lowest_eigenpairs(&a, &LanczosConfig::new(4, 1e-10, 10));
        assert!(out.converged);
        assert!((out.values[0] - 0.5).abs() < 1e-12);
        assert!((out.values[3] - 3.0).abs() < 1e-12);
    }
}
