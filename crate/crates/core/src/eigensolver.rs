//! Lowest eigenpairs of an assembled vibronic Hamiltonian.
//!
//! Small problems go through a dense symmetric decomposition; larger ones
//! through block Lanczos with full reorthogonalization on the sparse
//! matrix. Both paths report explicit residuals `‖H v − E v‖`.

use std::ops::Range;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonian::{assemble_with_cutoff, PjtParams, VibronicHamiltonian};
use crate::lanczos::{lowest_eigenpairs, LanczosConfig};

/// Largest dimension handled by the dense path under [`Method::Auto`].
pub const DENSE_CROSSOVER: usize = 2000;

/// Default residual bound in meV.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Energies closer than this (meV) are treated as one degenerate level.
pub const DEGENERACY_TOLERANCE: f64 = 1e-6;

pub const DEFAULT_MAX_ITERATIONS: usize = 2000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    Dense,
    Iterative,
    #[default]
    Auto,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveRequest {
    pub num_states: usize,
    pub method: Method,
    /// Residual norm bound in meV.
    pub tolerance: f64,
    /// Block Lanczos steps allowed on the iterative path.
    pub max_iterations: usize,
}

impl SolveRequest {
    pub fn new(num_states: usize) -> Self {
        Self {
            num_states,
            method: Method::Auto,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.num_states == 0 || self.num_states > dim {
            return Err(Error::InvalidInput(format!(
                "requested {} states from a Hamiltonian of dimension {dim}",
                self.num_states
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput(
                "max_iterations must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct EigenResult {
    /// Ascending energies in meV.
    pub energies: Vec<f64>,
    /// Column `i` is the normalized eigenvector of `energies[i]`.
    pub vectors: DMatrix<f64>,
    /// `‖H v − E v‖` per pair, meV.
    pub residuals: Vec<f64>,
    /// Block Lanczos steps; zero for the dense path.
    pub iterations_used: usize,
    /// The path that produced the result.
    pub method: Method,
}

impl EigenResult {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.vectors.column(i).into_owned()
    }

    /// Index ranges of degenerate levels: consecutive energies whose
    /// neighbours differ by less than `tolerance`.
    pub fn multiplets(&self, tolerance: f64) -> Vec<Range<usize>> {
        group_levels(&self.energies, tolerance)
    }
}

pub(crate) fn group_levels(energies: &[f64], tolerance: f64) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=energies.len() {
        if i == energies.len() || energies[i] - energies[i - 1] >= tolerance {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Flips each column so that its largest-magnitude entry is positive.
fn fix_signs(vectors: &mut DMatrix<f64>) {
    for mut col in vectors.column_iter_mut() {
        let pivot = col.iamax();
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
    }
}

fn residuals(h: &VibronicHamiltonian, energies: &[f64], vectors: &DMatrix<f64>) -> Vec<f64> {
    energies
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let v = vectors.column(i).into_owned();
            (h.matrix().matvec(&v) - v * e).norm()
        })
        .collect()
}

fn solve_dense(h: &VibronicHamiltonian, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(h.matrix().to_dense());
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order.truncate(k);
    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(h.dim(), k, |r, c| eig.eigenvectors[(r, order[c])]);
    (energies, vectors)
}

/// The `req.num_states` lowest eigenpairs of `h`.
///
/// Fails with [`Error::NotConverged`] when any returned pair misses the
/// residual tolerance; partial results are never returned silently.
pub fn solve(h: &VibronicHamiltonian, req: &SolveRequest) -> Result<EigenResult> {
    req.validate(h.dim())?;
    let k = req.num_states;
    let method = match req.method {
        Method::Auto if h.dim() <= DENSE_CROSSOVER => Method::Dense,
        Method::Auto => Method::Iterative,
        m => m,
    };

    let (energies, mut vectors, iterations_used) = match method {
        Method::Dense => {
            let (e, v) = solve_dense(h, k);
            (e, v, 0)
        }
        _ => {
            let config = LanczosConfig::new(k, req.tolerance, req.max_iterations);
            let out = lowest_eigenpairs(h.matrix(), &config);
            if !out.converged {
                let worst = out.residuals.iter().cloned().fold(0.0, f64::max);
                return Err(Error::NotConverged {
                    iterations: out.iterations,
                    tolerance: req.tolerance,
                    worst,
                    residuals: out.residuals,
                });
            }
            (out.values, out.vectors, out.iterations)
        }
    };
    fix_signs(&mut vectors);
    let residuals = residuals(h, &energies, &vectors);
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if worst > req.tolerance {
        return Err(Error::NotConverged {
            iterations: iterations_used,
            tolerance: req.tolerance,
            worst,
            residuals,
        });
    }
    Ok(EigenResult {
        energies,
        vectors,
        residuals,
        iterations_used,
        method,
    })
}

/// Assembles at `cutoff` and solves.
pub fn solve_params(params: &PjtParams, cutoff: u32, req: &SolveRequest) -> Result<EigenResult> {
    let h = assemble_with_cutoff(params, cutoff)?;
    solve(&h, req)
}

#[derive(Debug)]
pub struct ConvergenceRow {
    pub cutoff: u32,
    /// Lowest energies at this cutoff, or the solver failure.
    pub energies: Result<Vec<f64>>,
}

#[derive(Debug)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Ground-energy change (meV) below which two successive cutoffs count as converged.
    pub threshold: f64,
}

impl ConvergenceTable {
    /// First cutoff whose ground energy differs from the previous cutoff's
    /// by less than the threshold.
    pub fn converged_at(&self) -> Option<u32> {
        self.rows
            .windows(2)
            .find_map(|w| match (&w[0].energies, &w[1].energies) {
                (Ok(a), Ok(b)) if (a[0] - b[0]).abs() < self.threshold => Some(w[1].cutoff),
                _ => None,
            })
    }

    /// Ground energies of the successful rows never increase with cutoff.
    pub fn is_monotone(&self) -> bool {
        let ground: Vec<f64> = self
            .rows
            .iter()
            .filter_map(|r| r.energies.as_ref().ok().map(|e| e[0]))
            .collect();
        ground.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Solves at every cutoff (in parallel, results kept in input order).
pub fn converge_cutoff(
    params: &PjtParams,
    req: &SolveRequest,
    cutoffs: &[u32],
    threshold: f64,
) -> Result<ConvergenceTable> {
    if cutoffs.len() < 2 {
        return Err(Error::InvalidInput(
            "a convergence study needs at least two cutoffs".into(),
        ));
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!(
            "cutoffs must be strictly ascending, got {cutoffs:?}"
        )));
    }
    params.validate()?;
    let rows = cutoffs
        .par_iter()
        .map(|&cutoff| ConvergenceRow {
            cutoff,
            energies: solve_params(params, cutoff, req).map(|r| r.energies),
        })
        .collect();
    Ok(ConvergenceTable { rows, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockBasis;
    use crate::hamiltonian::assemble;
    use crate::presets::Defect;

    #[test]
    fn decoupled_ground_state_is_zero_point() {
        let p = PjtParams::new(75.9, 0.0, 0.0, 0.0, 0.0).unwrap();
        let r = solve_params(&p, 15, &SolveRequest::new(1)).unwrap();
        assert!((r.energies[0] - 75.9).abs() < 1e-10);
        let r = solve_params(&p, 15, &SolveRequest::new(4)).unwrap();
        assert_eq!(r.multiplets(DEGENERACY_TOLERANCE), vec![0..4]);
    }

    #[test]
    fn siv_has_ground_singlet_then_doublet() {
        let r = solve_params(&Defect::SiV.params(), 15, &SolveRequest::new(3)).unwrap();
        let delta = r.energies[1] - r.energies[0];
        assert!((delta - 6.7).abs() < 0.2, "delta = {delta}");
        assert!((r.energies[2] - r.energies[1]).abs() < DEGENERACY_TOLERANCE);
        // variational bound from the decoupled ground state
        let siv = Defect::SiV.params();
        assert!(r.energies[0] < -siv.lambda_corr + siv.hbar_omega);
    }

    #[test]
    fn iterative_matches_dense() {
        let h = assemble(&Defect::SiV.params(), FockBasis::new(15)).unwrap();
        let dense = solve(&h, &SolveRequest::new(10).with_method(Method::Dense)).unwrap();
        let iter = solve(&h, &SolveRequest::new(10).with_method(Method::Iterative)).unwrap();
        assert_eq!(iter.method, Method::Iterative);
        for (a, b) in dense.energies.iter().zip(&iter.energies) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        let gram = iter.vectors.tr_mul(&iter.vectors);
        assert!((gram - DMatrix::identity(10, 10)).amax() < 1e-10);
    }

    #[test]
    fn invalid_requests() {
        let h = assemble(&Defect::SiV.params(), FockBasis::new(1)).unwrap();
        assert!(solve(&h, &SolveRequest::new(0)).is_err());
        assert!(solve(&h, &SolveRequest::new(13)).is_err());
        assert!(solve(&h, &SolveRequest::new(1).with_tolerance(0.0)).is_err());
        assert!(solve(&h, &SolveRequest::new(1).with_max_iterations(0)).is_err());
    }

    #[test]
    fn non_convergence_is_an_error() {
        let h = assemble(&Defect::SiV.params(), FockBasis::new(15)).unwrap();
        let req = SolveRequest::new(3)
            .with_method(Method::Iterative)
            .with_max_iterations(1);
        match solve(&h, &req) {
            Err(Error::NotConverged { residuals, .. }) => assert_eq!(residuals.len(), 3),
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn repeated_solves_are_identical() {
        let h = assemble(&Defect::GeV.params(), FockBasis::new(10)).unwrap();
        for method in [Method::Dense, Method::Iterative] {
            let req = SolveRequest::new(4).with_method(method);
            let a = solve(&h, &req).unwrap();
            let b = solve(&h, &req).unwrap();
            assert_eq!(a.energies, b.energies);
            assert_eq!(a.vectors, b.vectors);
        }
    }

    #[test]
    fn convergence_table() {
        let siv = Defect::SiV.params();
        let t = converge_cutoff(&siv, &SolveRequest::new(1), &[0, 5, 10, 15], 1e-3).unwrap();
        assert!(t.is_monotone());
        let g: Vec<f64> = t
            .rows
            .iter()
            .map(|r| r.energies.as_ref().unwrap()[0])
            .collect();
        assert!(g[1] < g[0]);
        assert!(converge_cutoff(&siv, &SolveRequest::new(1), &[5], 1e-3).is_err());
        assert!(converge_cutoff(&siv, &SolveRequest::new(1), &[5, 5], 1e-3).is_err());
    }

    #[test]
    fn level_grouping() {
        assert_eq!(
            group_levels(&[0.0, 1.0, 1.0 + 1e-9, 2.0], 1e-6),
            vec![0..1, 1..3, 3..4]
        );
        assert_eq!(group_levels(&[], 1e-6), Vec::<Range<usize>>::new());
    }
}
