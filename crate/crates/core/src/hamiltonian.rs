//! Linear product Jahn-Teller Hamiltonian over the four triplet determinants.
//!
//! Electronic determinants are ordered
//! `|e_uy e_gy⟩, |e_ux e_gy⟩, |e_uy e_gx⟩, |e_ux e_gx⟩`. Each orbital pair
//! couples to the E_g vibration as an independent `e ⊗ E` system: the u
//! hole with strength `F_u`, the g hole with `F_g`. The full matrix acts on
//! `electronic ⊗ Fock` with the electronic index varying slowest, so the
//! coefficient of determinant `e` and phonon state `p` sits at
//! `e * D_ph + p`.
//!
//! All energies are in meV, configuration coordinates are dimensionless.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};

use crate::error::{Error, Result};
use crate::fock::{FockBasis, Mode};
use crate::sparse::CsrMatrix;

/// Parameters of one defect.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PjtParams {
    /// Effective E_g phonon quantum ħω_E.
    pub hbar_omega: f64,
    /// Correlation splitting Λ placing ³A₁ᵤ at +Λ and ³A₂ᵤ at −Λ.
    pub lambda_corr: f64,
    /// Correlation shift Ξ placing the ³Eᵤ pair at −Ξ.
    pub xi_corr: f64,
    /// Vibronic coupling of the e_g hole.
    pub f_g: f64,
    /// Vibronic coupling of the e_u hole.
    pub f_u: f64,
}

impl PjtParams {
    pub fn new(
        hbar_omega: f64,
        lambda_corr: f64,
        xi_corr: f64,
        f_g: f64,
        f_u: f64,
    ) -> Result<Self> {
        let p = Self {
            hbar_omega,
            lambda_corr,
            xi_corr,
            f_g,
            f_u,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, value: f64, strict: bool| -> Result<()> {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
            if strict && value <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be positive",
                });
            }
            if value < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be nonnegative",
                });
            }
            Ok(())
        };
        check("hbar_omega", self.hbar_omega, true)?;
        check("lambda_corr", self.lambda_corr, false)?;
        check("xi_corr", self.xi_corr, false)?;
        check("f_g", self.f_g, false)?;
        check("f_u", self.f_u, false)?;
        Ok(())
    }

    /// Same parameters with both vibronic couplings switched off.
    pub fn without_coupling(&self) -> Self {
        Self {
            f_g: 0.0,
            f_u: 0.0,
            ..*self
        }
    }

    /// Same parameters with Λ = Ξ = 0.
    pub fn without_correlation(&self) -> Self {
        Self {
            lambda_corr: 0.0,
            xi_corr: 0.0,
            ..*self
        }
    }

    /// Radius `(F_g + F_u) / ħω_E` of the trough of the lowest uncorrelated sheet.
    pub fn trough_radius(&self) -> f64 {
        (self.f_g + self.f_u) / self.hbar_omega
    }
}

/// Triplet symmetry components of the two-hole states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    A2u,
    A1u,
    Eux,
    Euy,
}

impl Symmetry {
    /// Order used for character weights and the rows of [`symmetry_transform`].
    pub const ALL: [Symmetry; 4] = [Symmetry::A2u, Symmetry::A1u, Symmetry::Eux, Symmetry::Euy];
}

/// Labels of the determinant basis, in matrix order.
pub const DETERMINANTS: [&str; 4] = ["|e_uy e_gy>", "|e_ux e_gy>", "|e_uy e_gx>", "|e_ux e_gx>"];

/// Orthogonal matrix whose rows express `|³A₂ᵤ⟩, |³A₁ᵤ⟩, |³E_ux⟩, |³E_uy⟩`
/// in determinant coefficients. Applied to a determinant-basis vector it
/// yields symmetry-basis amplitudes.
pub fn symmetry_transform() -> Matrix4<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Matrix4::new(
        s, 0.0, 0.0, s, // A2u = (ux gx + uy gy) / √2
        0.0, s, -s, 0.0, // A1u = (ux gy − uy gx) / √2
        -s, 0.0, 0.0, s, // Eux = (ux gx − uy gy) / √2
        0.0, s, s, 0.0, // Euy = (ux gy + uy gx) / √2
    )
}

/// Static correlation operator `Λ(|A₁ᵤ⟩⟨A₁ᵤ| − |A₂ᵤ⟩⟨A₂ᵤ|) − Ξ(|E_ux⟩⟨E_ux| + |E_uy⟩⟨E_uy|)`
/// in the determinant basis.
pub fn w_matrix(params: &PjtParams) -> Matrix4<f64> {
    let lambda = Matrix4::new(
        -1.0, 0.0, 0.0, -1.0, //
        0.0, 1.0, -1.0, 0.0, //
        0.0, -1.0, 1.0, 0.0, //
        -1.0, 0.0, 0.0, -1.0,
    );
    let xi = Matrix4::new(
        1.0, 0.0, 0.0, -1.0, //
        0.0, 1.0, 1.0, 0.0, //
        0.0, 1.0, 1.0, 0.0, //
        -1.0, 0.0, 0.0, 1.0,
    );
    lambda * (params.lambda_corr / 2.0) - xi * (params.xi_corr / 2.0)
}

/// Electronic matrix multiplying the position operator of `mode`.
pub fn pjt_coupling_block(params: &PjtParams, mode: Mode) -> Matrix4<f64> {
    let (fg, fu) = (params.f_g, params.f_u);
    match mode {
        Mode::X => Matrix4::from_diagonal(&Vector4::new(fu + fg, -(fu - fg), fu - fg, -(fu + fg))),
        Mode::Y => Matrix4::new(
            0.0, fu, fg, 0.0, //
            fu, 0.0, 0.0, fg, //
            fg, 0.0, 0.0, fu, //
            0.0, fg, fu, 0.0,
        ),
    }
}

/// Real antisymmetric electronic generator `½(iσ_y ⊗ 1 + 1 ⊗ iσ_y)` acting on
/// the two orbital pseudo-spins. Together with the phonon rotation generator
/// it forms the conserved vibronic angular momentum (see
/// [`VibronicHamiltonian::angular_momentum_generator`]).
pub fn electronic_rotation_generator() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.5, 0.5, 0.0, //
        -0.5, 0.0, 0.0, 0.5, //
        -0.5, 0.0, 0.0, 0.5, //
        0.0, -0.5, -0.5, 0.0,
    )
}

/// Diagonal of `σ_z ⊗ σ_z` on the determinants: +1 on `|yy⟩, |xx⟩`, −1 on the others.
pub const ELECTRONIC_Y_REFLECTION: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

/// Assembled vibronic Hamiltonian.
#[derive(Clone, Debug)]
pub struct VibronicHamiltonian {
    basis: FockBasis,
    params: PjtParams,
    matrix: CsrMatrix,
}

fn push_kron(triplets: &mut Vec<(usize, usize, f64)>, elec: &Matrix4<f64>, phonon: &CsrMatrix) {
    let d = phonon.nrows();
    for a in 0..4 {
        for b in 0..4 {
            let w = elec[(a, b)];
            if w == 0.0 {
                continue;
            }
            for (r, c, v) in phonon.triplets() {
                triplets.push((a * d + r, b * d + c, w * v));
            }
        }
    }
}

/// `ħω_E (I₄ ⊗ N̂) + B_X ⊗ X̂ + B_Y ⊗ Ŷ + Ŵ ⊗ I`.
pub fn assemble(params: &PjtParams, basis: FockBasis) -> Result<VibronicHamiltonian> {
    params.validate()?;
    let d = basis.len();
    let dim = d.checked_mul(4).ok_or(Error::DimensionOverflow {
        cutoff: basis.cutoff(),
    })?;

    let x = basis.position_operator(Mode::X);
    let y = basis.position_operator(Mode::Y);
    let number = basis.number_operator();
    let identity = CsrMatrix::diagonal(&vec![1.0; d]);

    let mut triplets = Vec::with_capacity(4 * number.nnz() + 8 * x.nnz() + 8 * y.nnz() + 8 * d);
    push_kron(
        &mut triplets,
        &(Matrix4::identity() * params.hbar_omega),
        &number,
    );
    push_kron(&mut triplets, &pjt_coupling_block(params, Mode::X), &x);
    push_kron(&mut triplets, &pjt_coupling_block(params, Mode::Y), &y);
    push_kron(&mut triplets, &w_matrix(params), &identity);

    let matrix = CsrMatrix::from_triplets(dim, dim, triplets);
    Ok(VibronicHamiltonian {
        basis,
        params: *params,
        matrix,
    })
}

/// Builds the basis for `cutoff` and assembles, rejecting cutoffs whose
/// dimension would overflow.
pub fn assemble_with_cutoff(params: &PjtParams, cutoff: u32) -> Result<VibronicHamiltonian> {
    FockBasis::dimension_for(cutoff)
        .and_then(|d| d.checked_mul(4))
        .ok_or(Error::DimensionOverflow { cutoff })?;
    assemble(params, FockBasis::new(cutoff))
}

impl VibronicHamiltonian {
    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn params(&self) -> &PjtParams {
        &self.params
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Real antisymmetric `K` with `[K, H] = 0`; the vibronic angular
    /// momentum is `J = iK` and `⟨J²⟩ = ‖K v‖²` for a real vector `v`.
    pub fn angular_momentum_generator(&self) -> CsrMatrix {
        let d = self.basis.len();
        let mut triplets = Vec::new();
        push_kron(
            &mut triplets,
            &Matrix4::identity(),
            &self.basis.rotation_generator(),
        );
        push_kron(
            &mut triplets,
            &(-electronic_rotation_generator()),
            &CsrMatrix::diagonal(&vec![1.0; d]),
        );
        CsrMatrix::from_triplets(4 * d, 4 * d, triplets)
    }

    /// Diagonal of the reflection `Y → −Y` combined with `σ_z ⊗ σ_z`, which
    /// commutes with `H` and is +1 on `|³A₂ᵤ⟩ ⊗ |0,0⟩`.
    pub fn reflection_parity(&self) -> Vec<f64> {
        let phonon = self.basis.y_reflection_signs();
        ELECTRONIC_Y_REFLECTION
            .iter()
            .flat_map(|e| phonon.iter().map(move |p| e * p))
            .collect()
    }
}

/// Classical adiabatic energies at a frozen distortion `(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ApesPoint {
    pub x: f64,
    pub y: f64,
    /// Sheet energies in meV, ascending.
    pub energies: [f64; 4],
    /// Column `i` is the determinant-basis eigenvector of sheet `i`.
    pub vectors: Matrix4<f64>,
}

/// Sorted eigenpairs of a symmetric 4×4 matrix. Each eigenvector is signed
/// so that its largest-magnitude component is positive.
pub(crate) fn eigen4(m: Matrix4<f64>) -> ([f64; 4], Matrix4<f64>) {
    let diagonal = (0..4).all(|i| (0..4).all(|j| i == j || m[(i, j)] == 0.0));
    let eig = if diagonal {
        SymmetricEigen {
            eigenvalues: m.diagonal(),
            eigenvectors: Matrix4::identity(),
        }
    } else {
        SymmetricEigen::new(m)
    };
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut energies = [0.0; 4];
    let mut vectors = Matrix4::zeros();
    for (slot, &k) in order.iter().enumerate() {
        energies[slot] = eig.eigenvalues[k];
        let mut v = eig.eigenvectors.column(k).into_owned();
        let pivot = v.iamax();
        if v[pivot] < 0.0 {
            v = -v;
        }
        vectors.set_column(slot, &v);
    }
    (energies, vectors)
}

/// Eigenvalues of `ħω_E (x² + y²)/2 · I₄ + x B_X + y B_Y + Ŵ`.
///
/// The 4×4 matrix is diagonalized in the symmetry-adapted basis, where `Ŵ`
/// is exactly `diag(−Λ, Λ, −Ξ, −Ξ)`, so the origin reproduces the
/// correlation levels without rounding. Returned vectors are in the
/// determinant basis.
pub fn classical_apes(params: &PjtParams, x: f64, y: f64) -> Result<ApesPoint> {
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::InvalidInput(format!(
            "configuration coordinate ({x}, {y}) is not finite"
        )));
    }
    let sum = params.f_g + params.f_u;
    let diff = params.f_g - params.f_u;
    let elastic = params.hbar_omega * (x * x + y * y) / 2.0;
    let (l, xi) = (params.lambda_corr, params.xi_corr);
    #[rustfmt::skip]
    let m = Matrix4::new(
        elastic - l, 0.0,         -sum * x,     sum * y,
        0.0,         elastic + l, diff * y,     diff * x,
        -sum * x,    diff * y,    elastic - xi, 0.0,
        sum * y,     diff * x,    0.0,          elastic - xi,
    );
    let (energies, sym_vectors) = eigen4(m);
    let mut vectors = symmetry_transform().transpose() * sym_vectors;
    for mut v in vectors.column_iter_mut() {
        if v[v.iamax()] < 0.0 {
            v.neg_mut();
        }
    }
    Ok(ApesPoint {
        x,
        y,
        energies,
        vectors,
    })
}

/// Jahn-Teller energies of the constructive and destructive channels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JahnTellerEnergies {
    /// `(F_g + F_u)² / 2ħω_E`.
    pub e_jt1: f64,
    /// `(F_g − F_u)² / 2ħω_E`.
    pub e_jt2: f64,
}

pub fn ejt_from_couplings(params: &PjtParams) -> JahnTellerEnergies {
    let two_w = 2.0 * params.hbar_omega;
    JahnTellerEnergies {
        e_jt1: (params.f_g + params.f_u).powi(2) / two_w,
        e_jt2: (params.f_g - params.f_u).powi(2) / two_w,
    }
}

/// Which coupling is taken as the larger one when inverting the
/// Jahn-Teller energies; only `|F_u − F_g|` is fixed by them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CouplingOrder {
    #[default]
    UDominant,
    GDominant,
}

/// Inverse of [`ejt_from_couplings`]: returns `(F_g, F_u)`.
pub fn couplings_from_ejt(
    e_jt1: f64,
    e_jt2: f64,
    hbar_omega: f64,
    order: CouplingOrder,
) -> Result<(f64, f64)> {
    for (name, v) in [("e_jt1", e_jt1), ("e_jt2", e_jt2)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidParameter {
                name,
                value: v,
                reason: "must be finite and nonnegative",
            });
        }
    }
    if !hbar_omega.is_finite() || hbar_omega <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "hbar_omega",
            value: hbar_omega,
            reason: "must be positive",
        });
    }
    if e_jt2 > e_jt1 {
        return Err(Error::InvalidInput(format!(
            "e_jt2 = {e_jt2} exceeds e_jt1 = {e_jt1}; the sum channel must dominate"
        )));
    }
    let sum = (2.0 * hbar_omega * e_jt1).sqrt();
    let diff = (2.0 * hbar_omega * e_jt2).sqrt();
    let (small, large) = ((sum - diff) / 2.0, (sum + diff) / 2.0);
    Ok(match order {
        CouplingOrder::UDominant => (small, large),
        CouplingOrder::GDominant => (large, small),
    })
}
