//! Observables of vibronic eigenstates: electronic character, distortion,
//! symmetry labels, and the A₂ᵤ–Eᵤ gap δ.
//!
//! Vibronic levels are labelled by their conserved quantum numbers rather
//! than by electronic character. In the strong-coupling regime every low
//! level is close to half A₂ᵤ and half Eᵤ, so a weight threshold cannot tell
//! the dark singlet from the optically active doublet. The linear
//! Hamiltonian commutes with the vibronic angular momentum `J` and with a
//! reflection `P` (`Y → −Y` together with `σ_z ⊗ σ_z`):
//!
//! * `|J| ≢ 0 (mod 3)` → Ẽᵤ doublet,
//! * `J = 0`, `P = +1` → Ã₂ᵤ; `J = 0`, `P = −1` → Ã₁ᵤ,
//! * `|J| = 3, 6, …` → degenerate Ã₁ᵤ ⊕ Ã₂ᵤ pair, reported as mixed.

use std::fmt;
use std::ops::Range;

use nalgebra::{DMatrix, DVector, DVectorView};

use crate::eigensolver::{group_levels, solve, SolveRequest, DEGENERACY_TOLERANCE};
use crate::error::{Error, Result};
use crate::fock::{FockBasis, Mode};
use crate::hamiltonian::{
    assemble_with_cutoff, classical_apes, symmetry_transform, ApesPoint, PjtParams,
    VibronicHamiltonian,
};

/// Allowed deviation of `‖v‖²` from one for inputs to the observables.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;

/// Weight in the two highest Fock shells above which `⟨X² + Y²⟩` is
/// considered contaminated by the truncation.
pub const TRUNCATION_WARNING_WEIGHT: f64 = 0.01;

/// Squared amplitudes of the four triplet components.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CharacterWeights {
    pub a2u: f64,
    pub a1u: f64,
    pub eux: f64,
    pub euy: f64,
}

impl CharacterWeights {
    /// Pooled Eᵤ weight.
    pub fn eu(&self) -> f64 {
        self.eux + self.euy
    }

    pub fn sum(&self) -> f64 {
        self.a2u + self.a1u + self.eux + self.euy
    }

    /// The component holding more than half the weight (Eᵤ pooled), if any.
    pub fn dominant(&self) -> Option<VibronicLabel> {
        if self.a2u > 0.5 {
            Some(VibronicLabel::A2u)
        } else if self.a1u > 0.5 {
            Some(VibronicLabel::A1u)
        } else if self.eu() > 0.5 {
            Some(VibronicLabel::Eu)
        } else {
            None
        }
    }

    fn scaled(self, s: f64) -> Self {
        Self {
            a2u: self.a2u * s,
            a1u: self.a1u * s,
            eux: self.eux * s,
            euy: self.euy * s,
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            a2u: self.a2u + o.a2u,
            a1u: self.a1u + o.a1u,
            eux: self.eux + o.eux,
            euy: self.euy + o.euy,
        }
    }

    fn from_amplitudes(a: [f64; 4]) -> Self {
        Self {
            a2u: a[0] * a[0],
            a1u: a[1] * a[1],
            eux: a[2] * a[2],
            euy: a[3] * a[3],
        }
    }
}

fn check_vector(v: &DVectorView<'_, f64>, basis: &FockBasis) -> Result<()> {
    if v.len() != 4 * basis.len() {
        return Err(Error::InvalidInput(format!(
            "state vector has length {}, expected {}",
            v.len(),
            4 * basis.len()
        )));
    }
    let norm2 = v.norm_squared();
    if (norm2 - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::InvalidInput(format!(
            "state vector is not normalized (|v|^2 = {norm2})"
        )));
    }
    Ok(())
}

fn character_unchecked(v: &DVectorView<'_, f64>, d: usize) -> CharacterWeights {
    let u = symmetry_transform();
    let mut w = CharacterWeights::default();
    for p in 0..d {
        let det = nalgebra::Vector4::new(v[p], v[d + p], v[2 * d + p], v[3 * d + p]);
        let sym = u * det;
        w = w.add(CharacterWeights::from_amplitudes([
            sym[0], sym[1], sym[2], sym[3],
        ]));
    }
    w
}

/// Weight of each triplet symmetry component in a normalized vibronic vector.
pub fn electronic_character(
    vector: DVectorView<'_, f64>,
    basis: &FockBasis,
) -> Result<CharacterWeights> {
    check_vector(&vector, basis)?;
    Ok(character_unchecked(&vector, basis.len()))
}

/// Character averaged over the span of orthonormal `vectors` (trace over
/// the subspace divided by its dimension), independent of the basis chosen
/// inside a degenerate level.
pub fn subspace_character(vectors: &DMatrix<f64>, basis: &FockBasis) -> Result<CharacterWeights> {
    let n = vectors.ncols();
    let mut total = CharacterWeights::default();
    for c in vectors.column_iter() {
        total = total.add(electronic_character(c.as_view(), basis)?);
    }
    Ok(total.scaled(1.0 / n as f64))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Distortion {
    /// `√⟨X̂² + Ŷ²⟩`, dimensionless.
    pub r: f64,
    /// Probability in the two highest Fock shells.
    pub top_shell_weight: f64,
}

impl Distortion {
    pub fn truncation_warning(&self) -> bool {
        self.top_shell_weight > TRUNCATION_WARNING_WEIGHT
    }
}

struct PositionOps {
    x: crate::sparse::CsrMatrix,
    y: crate::sparse::CsrMatrix,
}

impl PositionOps {
    fn new(basis: &FockBasis) -> Self {
        Self {
            x: basis.position_operator(Mode::X),
            y: basis.position_operator(Mode::Y),
        }
    }

    /// `⟨v| X̂² + Ŷ² |v⟩ = ‖X̂ v‖² + ‖Ŷ v‖²` summed over electronic blocks.
    fn radius_squared(&self, v: &DVectorView<'_, f64>, d: usize) -> f64 {
        let mut out = vec![0.0; d];
        let mut total = 0.0;
        for e in 0..4 {
            let block = &v.as_slice()[e * d..(e + 1) * d];
            for op in [&self.x, &self.y] {
                op.matvec_into(block, &mut out);
                total += out.iter().map(|a| a * a).sum::<f64>();
            }
        }
        total
    }
}

fn top_shell_weight(v: &DVectorView<'_, f64>, basis: &FockBasis) -> f64 {
    let d = basis.len();
    let lowest_top = basis.cutoff().saturating_sub(1);
    (0..4 * d)
        .filter(|i| basis.state(i % d).total() >= lowest_top)
        .map(|i| v[i] * v[i])
        .sum()
}

/// RMS distortion `√⟨X̂² + Ŷ²⟩` of a normalized vibronic vector.
pub fn distortion_expectation(
    vector: DVectorView<'_, f64>,
    basis: &FockBasis,
) -> Result<Distortion> {
    check_vector(&vector, basis)?;
    let ops = PositionOps::new(basis);
    Ok(Distortion {
        r: ops.radius_squared(&vector, basis.len()).sqrt(),
        top_shell_weight: top_shell_weight(&vector, basis),
    })
}

/// Distortion with `⟨X̂² + Ŷ²⟩` averaged over the span of `vectors`.
pub fn subspace_distortion(vectors: &DMatrix<f64>, basis: &FockBasis) -> Result<Distortion> {
    let ops = PositionOps::new(basis);
    let n = vectors.ncols() as f64;
    let (mut r2, mut top) = (0.0, 0.0);
    for c in vectors.column_iter() {
        let v = c.as_view();
        check_vector(&v, basis)?;
        r2 += ops.radius_squared(&v, basis.len());
        top += top_shell_weight(&v, basis);
    }
    Ok(Distortion {
        r: (r2 / n).sqrt(),
        top_shell_weight: top / n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VibronicLabel {
    A2u,
    A1u,
    Eu,
    Mixed,
}

impl VibronicLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            VibronicLabel::A2u => "A2u",
            VibronicLabel::A1u => "A1u",
            VibronicLabel::Eu => "Eu",
            VibronicLabel::Mixed => "mixed",
        }
    }
}

impl fmt::Display for VibronicLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Deviation from an exact quantum number tolerated when classifying.
const QUANTUM_NUMBER_TOLERANCE: f64 = 1e-4;

/// Conserved quantities of one degenerate level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelSymmetry {
    /// `|J|` when every vector of the level shares it.
    pub j_abs: Option<u32>,
    /// Eigenvalue of `P` when the level has a definite one.
    pub parity: Option<i8>,
    pub label: VibronicLabel,
}

struct SymmetryOps {
    generator: crate::sparse::CsrMatrix,
    parity: Vec<f64>,
}

impl SymmetryOps {
    fn new(h: &VibronicHamiltonian) -> Self {
        Self {
            generator: h.angular_momentum_generator(),
            parity: h.reflection_parity(),
        }
    }

    fn classify(&self, level: &DMatrix<f64>) -> LevelSymmetry {
        let n = level.ncols();
        let mut kv = DMatrix::zeros(level.nrows(), n);
        for j in 0..n {
            let x = level.column(j);
            self.generator
                .matvec_into(x.as_slice(), kv.column_mut(j).as_mut_slice());
        }
        // J² restricted to the level; sharp levels give j² · I
        let j2 = kv.tr_mul(&kv);
        let mean = j2.trace() / n as f64;
        let j = mean.max(0.0).sqrt();
        let j_round = j.round();
        let sharp_j = (j2.clone() - DMatrix::identity(n, n) * (j_round * j_round)).amax()
            < QUANTUM_NUMBER_TOLERANCE * (1.0 + j_round * j_round);
        let j_abs = sharp_j.then_some(j_round as u32);

        let mut pv = level.clone();
        for mut col in pv.column_iter_mut() {
            for (a, p) in col.iter_mut().zip(&self.parity) {
                *a *= p;
            }
        }
        let pm = level.tr_mul(&pv);
        let parity = [1i8, -1].into_iter().find(|&s| {
            (pm.clone() - DMatrix::identity(n, n) * s as f64).amax() < QUANTUM_NUMBER_TOLERANCE
        });

        let label = match (j_abs, parity) {
            (Some(j), _) if j % 3 != 0 => VibronicLabel::Eu,
            (Some(0), Some(1)) => VibronicLabel::A2u,
            (Some(0), Some(-1)) => VibronicLabel::A1u,
            _ => VibronicLabel::Mixed,
        };
        LevelSymmetry {
            j_abs,
            parity,
            label,
        }
    }
}

/// One reported vibronic eigenstate.
#[derive(Clone, Debug, PartialEq)]
pub struct VibronicState {
    pub index: usize,
    /// meV, including the oscillator zero-point energy.
    pub energy: f64,
    /// Averaged over the state's degenerate level.
    pub character: CharacterWeights,
    /// `√⟨X̂² + Ŷ²⟩` averaged over the state's degenerate level.
    pub distortion_r: f64,
    pub truncation_warning: bool,
    pub label: VibronicLabel,
    pub j_abs: Option<u32>,
    /// Number of states in the level this state belongs to.
    pub degeneracy: usize,
    /// Index of the level among the reported levels.
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    pub params: PjtParams,
    pub cutoff: u32,
    pub states: Vec<VibronicState>,
    /// `E(lowest Ẽᵤ) − E(ground)` when the ground level is a nondegenerate
    /// Ã₂ᵤ and an Ẽᵤ level is among the solved states.
    pub delta: Option<f64>,
    /// Largest residual of the underlying eigenpairs, meV.
    pub max_residual: f64,
}

impl SpectrumReport {
    /// Reported states grouped into degenerate levels.
    pub fn levels(&self) -> Vec<Range<usize>> {
        let energies: Vec<f64> = self.states.iter().map(|s| s.energy).collect();
        group_levels(&energies, DEGENERACY_TOLERANCE)
    }

    pub fn ground(&self) -> &VibronicState {
        &self.states[0]
    }

    /// First state of the lowest Ẽᵤ level.
    pub fn lowest_eu(&self) -> Option<&VibronicState> {
        self.states.iter().find(|s| s.label == VibronicLabel::Eu)
    }

    /// δ, or an explanation of why the ordering claim fails for these parameters.
    pub fn delta_or_error(&self) -> Result<f64> {
        let ground = self.ground();
        if ground.label != VibronicLabel::A2u || ground.degeneracy != 1 {
            return Err(Error::UnexpectedGroundState {
                found: format!("{} (degeneracy {})", ground.label, ground.degeneracy),
            });
        }
        self.lowest_eu()
            .map(|s| s.energy - ground.energy)
            .ok_or(Error::NoDoublet {
                searched: self.states.len(),
            })
    }
}

fn solve_complete_levels(
    h: &VibronicHamiltonian,
    req: &SolveRequest,
) -> Result<crate::eigensolver::EigenResult> {
    let dim = h.dim();
    let want = req.num_states;
    let mut n = (want + 2).min(dim);
    loop {
        let r = solve(
            h,
            &SolveRequest {
                num_states: n,
                ..req.clone()
            },
        )?;
        let levels = r.multiplets(DEGENERACY_TOLERANCE);
        let last_needed = levels
            .iter()
            .find(|l| l.contains(&(want - 1)))
            .expect("state in a level");
        if last_needed.end < n || n == dim {
            return Ok(r);
        }
        n = (n + 4).min(dim);
    }
}

/// Solves and labels the `req.num_states` lowest states at `cutoff`.
///
/// More states than requested are solved when needed so that every
/// reported state's degenerate level is complete.
pub fn spectrum_report_with(
    params: &PjtParams,
    cutoff: u32,
    req: &SolveRequest,
) -> Result<SpectrumReport> {
    let h = assemble_with_cutoff(params, cutoff)?;
    if req.num_states == 0 || req.num_states > h.dim() {
        return Err(Error::InvalidInput(format!(
            "requested {} states from a Hamiltonian of dimension {}",
            req.num_states,
            h.dim()
        )));
    }
    let result = solve_complete_levels(&h, req)?;
    let sym = SymmetryOps::new(&h);
    let basis = h.basis();

    let mut states = Vec::with_capacity(req.num_states);
    for (level_idx, level) in result
        .multiplets(DEGENERACY_TOLERANCE)
        .into_iter()
        .enumerate()
    {
        if level.start >= req.num_states {
            break;
        }
        let vectors = result
            .vectors
            .columns(level.start, level.len())
            .into_owned();
        let character = subspace_character(&vectors, basis)?;
        let distortion = subspace_distortion(&vectors, basis)?;
        let symmetry = sym.classify(&vectors);
        for i in level.clone().take_while(|&i| i < req.num_states) {
            states.push(VibronicState {
                index: i,
                energy: result.energies[i],
                character,
                distortion_r: distortion.r,
                truncation_warning: distortion.truncation_warning(),
                label: symmetry.label,
                j_abs: symmetry.j_abs,
                degeneracy: level.len(),
                level: level_idx,
            });
        }
    }

    // δ may need levels beyond the requested ones
    let all_labels = {
        let mut v = Vec::new();
        for level in result.multiplets(DEGENERACY_TOLERANCE) {
            let vectors = result
                .vectors
                .columns(level.start, level.len())
                .into_owned();
            v.push((level.clone(), sym.classify(&vectors).label));
        }
        v
    };
    let delta = match all_labels.first() {
        Some((l, VibronicLabel::A2u)) if l.len() == 1 => all_labels
            .iter()
            .find(|(_, label)| *label == VibronicLabel::Eu)
            .map(|(l, _)| result.energies[l.start] - result.energies[0]),
        _ => None,
    };

    Ok(SpectrumReport {
        params: *params,
        cutoff,
        states,
        delta,
        max_residual: result.residuals.iter().cloned().fold(0.0, f64::max),
    })
}

pub fn spectrum_report(
    params: &PjtParams,
    cutoff: u32,
    num_states: usize,
) -> Result<SpectrumReport> {
    spectrum_report_with(params, cutoff, &SolveRequest::new(num_states))
}

/// Levels searched when looking for the Ẽᵤ doublet.
const DELTA_SEARCH_STATES: usize = 6;

/// δ = E(Ẽᵤ) − E(Ã₂ᵤ) at `cutoff`. Fails when the ground level is not a
/// nondegenerate Ã₂ᵤ.
pub fn delta_splitting(params: &PjtParams, cutoff: u32) -> Result<f64> {
    delta_splitting_with(params, cutoff, &SolveRequest::new(DELTA_SEARCH_STATES))
}

pub fn delta_splitting_with(params: &PjtParams, cutoff: u32, req: &SolveRequest) -> Result<f64> {
    let dim = 4 * FockBasis::dimension_for(cutoff).ok_or(Error::DimensionOverflow { cutoff })?;
    let req = SolveRequest {
        num_states: req.num_states.max(3).min(dim),
        ..req.clone()
    };
    spectrum_report_with(params, cutoff, &req)?.delta_or_error()
}

/// Classical sheet energies and their electronic characters at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct ApesScanPoint {
    pub point: ApesPoint,
    /// Character of each sheet, ascending in energy.
    pub characters: [CharacterWeights; 4],
}

/// Classical APES along `x` at fixed `y`.
pub fn apes_scan(params: &PjtParams, x_values: &[f64], y: f64) -> Result<Vec<ApesScanPoint>> {
    params.validate()?;
    if let Some(bad) = x_values
        .iter()
        .chain(std::iter::once(&y))
        .find(|v| !v.is_finite())
    {
        return Err(Error::InvalidInput(format!(
            "scan coordinate {bad} is not finite"
        )));
    }
    let u = symmetry_transform();
    x_values
        .iter()
        .map(|&x| {
            let point = classical_apes(params, x, y)?;
            let mut characters = [CharacterWeights::default(); 4];
            for (s, c) in characters.iter_mut().enumerate() {
                let amp = u * point.vectors.column(s);
                *c = CharacterWeights::from_amplitudes([amp[0], amp[1], amp[2], amp[3]]);
            }
            Ok(ApesScanPoint { point, characters })
        })
        .collect()
}

/// `|sym⟩ ⊗ |0,0⟩` for one of the four triplet components.
pub fn vacuum_state(symmetry: crate::hamiltonian::Symmetry, basis: &FockBasis) -> DVector<f64> {
    let row = crate::hamiltonian::Symmetry::ALL
        .iter()
        .position(|s| *s == symmetry)
        .unwrap();
    let u = symmetry_transform();
    let d = basis.len();
    let mut v = DVector::zeros(4 * d);
    for e in 0..4 {
        v[e * d] = u[(row, e)];
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Symmetry;
    use crate::presets::Defect;

    #[test]
    fn pure_vacuum_characters() {
        let basis = FockBasis::new(3);
        let v = vacuum_state(Symmetry::A2u, &basis);
        let w = electronic_character(v.as_view(), &basis).unwrap();
        assert!((w.a2u - 1.0).abs() < 1e-15 && w.a1u.abs() < 1e-15 && w.eu().abs() < 1e-15);
        let w =
            electronic_character(vacuum_state(Symmetry::Euy, &basis).as_view(), &basis).unwrap();
        assert!((w.euy - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_vectors() {
        let basis = FockBasis::new(2);
        let v = vacuum_state(Symmetry::A1u, &basis) * 2.0;
        assert!(electronic_character(v.as_view(), &basis).is_err());
        assert!(distortion_expectation(v.as_view(), &basis).is_err());
        let short = DVector::from_element(3, 1.0 / 3f64.sqrt());
        assert!(electronic_character(short.as_view(), &basis).is_err());
    }

    #[test]
    fn vacuum_distortion_is_one() {
        for cutoff in [1, 4, 15] {
            let basis = FockBasis::new(cutoff);
            let d = distortion_expectation(vacuum_state(Symmetry::Eux, &basis).as_view(), &basis)
                .unwrap();
            assert!((d.r - 1.0).abs() < 1e-14);
        }
        // only the vacuum fits at cutoff 0, so X|0,0⟩ is truncated away
        let basis = FockBasis::new(0);
        let d =
            distortion_expectation(vacuum_state(Symmetry::A2u, &basis).as_view(), &basis).unwrap();
        assert_eq!(d.r, 0.0);
        assert!(d.truncation_warning());
    }

    #[test]
    fn dominant_rule() {
        let w = CharacterWeights {
            a2u: 0.3,
            a1u: 0.0,
            eux: 0.35,
            euy: 0.35,
        };
        assert_eq!(w.dominant(), Some(VibronicLabel::Eu));
        let w = CharacterWeights {
            a2u: 0.5,
            a1u: 0.0,
            eux: 0.25,
            euy: 0.25,
        };
        assert_eq!(w.dominant(), None);
    }

    #[test]
    fn siv_spectrum_labels() {
        let r = spectrum_report(&Defect::SiV.params(), 15, 8).unwrap();
        assert_eq!(r.states.len(), 8);
        let labels: Vec<VibronicLabel> = r.states.iter().map(|s| s.label).collect();
        assert_eq!(
            &labels[..3],
            &[VibronicLabel::A2u, VibronicLabel::Eu, VibronicLabel::Eu]
        );
        assert_eq!(r.states[0].j_abs, Some(0));
        assert_eq!(r.states[1].j_abs, Some(1));
        assert_eq!(r.states[1].degeneracy, 2);
        // |J| = 2 is again an E level, |J| = 3 an accidental A1u + A2u pair
        assert_eq!(labels[3], VibronicLabel::Eu);
        assert_eq!(r.states[5].j_abs, Some(3));
        assert_eq!(labels[5], VibronicLabel::Mixed);
        for s in &r.states {
            assert!((s.character.sum() - 1.0).abs() < 1e-10);
        }
        let delta = r.delta.unwrap();
        assert!((delta - 6.7).abs() < 0.7, "delta = {delta}");
        assert_eq!(r.states[1].distortion_r, r.states[2].distortion_r);
    }

    #[test]
    fn ground_distortion_near_classical_trough() {
        let siv = Defect::SiV.params();
        let rho = siv.trough_radius();
        assert!((rho - 2.6087).abs() < 1e-4);
        let r = spectrum_report(&siv, 15, 1).unwrap();
        let ground = &r.states[0];
        // RMS displacement from an independent dense prototype: 2.7218
        assert!((ground.distortion_r - 2.7218).abs() < 1e-3);
        assert!((ground.distortion_r - rho).abs() < 0.25 * rho);
        assert!(!ground.truncation_warning);
    }

    #[test]
    fn delta_for_other_presets() {
        for (d, want, tol) in [(Defect::GeV, 7.6, 0.8), (Defect::PbV, 10.8, 1.1)] {
            let delta = delta_splitting(&d.params(), 15).unwrap();
            assert!((delta - want).abs() < tol, "{d}: {delta}");
        }
    }

    #[test]
    fn zero_coupling_levels_follow_w() {
        let p = Defect::SiV.params().without_coupling();
        let r = spectrum_report(&p, 4, 3).unwrap();
        assert_eq!(r.states[0].label, VibronicLabel::A2u);
        assert!((r.states[0].energy - (-78.3 + 75.9)).abs() < 1e-9);
        assert_eq!(r.states[1].label, VibronicLabel::Eu);
        assert!((r.states[1].energy - r.states[0].energy - 33.3).abs() < 1e-9);
        assert!((r.states[1].character.eu() - 1.0).abs() < 1e-12);
        assert!((r.delta.unwrap() - 33.3).abs() < 1e-9);

        // the A1u vacuum level sits 2Λ above the ground state
        let full = spectrum_report(&p, 1, 12).unwrap();
        let a1u = full.states.iter().find(|s| s.character.a1u > 0.99).unwrap();
        assert!((a1u.energy - full.states[0].energy - 156.6).abs() < 1e-9);
        assert_eq!(a1u.label, VibronicLabel::A1u);
    }

    #[test]
    fn delta_fails_for_reversed_ordering() {
        // with Ξ > Λ the E_u level lies lowest in the correlation-only limit
        let p = PjtParams::new(75.0, 10.0, 60.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            delta_splitting(&p, 3),
            Err(Error::UnexpectedGroundState { .. })
        ));
    }

    #[test]
    fn apes_scan_at_origin() {
        let siv = Defect::SiV.params();
        let scan = apes_scan(&siv, &[0.0], 0.0).unwrap();
        let p = &scan[0];
        let want = [-78.3, -45.0, -45.0, 78.3];
        for (a, b) in p.point.energies.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((p.characters[0].a2u - 1.0).abs() < 1e-12);
        assert!((p.characters[1].eu() - 1.0).abs() < 1e-12);
        assert!((p.characters[2].eu() - 1.0).abs() < 1e-12);
        assert!((p.characters[3].a1u - 1.0).abs() < 1e-12);
        assert!(apes_scan(&siv, &[f64::NAN], 0.0).is_err());
    }
}
