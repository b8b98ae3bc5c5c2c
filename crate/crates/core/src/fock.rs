//! Truncated two-mode harmonic oscillator basis `|n, m⟩` with `n + m ≤ N`.
//!
//! States are ordered by shell (total quanta `n + m`) and, inside a shell,
//! by ascending `m`. The index of `|n, m⟩` is therefore
//! `k (k + 1) / 2 + m` with `k = n + m`.

use crate::sparse::CsrMatrix;

/// One of the two components of the doubly degenerate vibration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    X,
    Y,
}

/// Occupation numbers of a single basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState {
    /// Quanta in mode X.
    pub n: u32,
    /// Quanta in mode Y.
    pub m: u32,
}

impl FockState {
    pub fn total(self) -> u32 {
        self.n + self.m
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockBasis {
    cutoff: u32,
    states: Vec<FockState>,
}

fn shell_offset(k: usize) -> Option<usize> {
    let next = k.checked_add(1)?;
    if k.is_multiple_of(2) {
        (k / 2).checked_mul(next)
    } else {
        k.checked_mul(next / 2)
    }
}

impl FockBasis {
    /// Number of states `(N + 1)(N + 2) / 2` for cutoff `N`, or `None` if it
    /// does not fit in `usize`.
    pub fn dimension_for(cutoff: u32) -> Option<usize> {
        shell_offset(usize::try_from(cutoff).ok()?.checked_add(1)?)
    }

    /// Enumerates every `|n, m⟩` with `n + m ≤ cutoff`.
    pub fn new(cutoff: u32) -> Self {
        let dim = Self::dimension_for(cutoff).expect("Fock basis dimension overflows usize");
        let mut states = Vec::with_capacity(dim);
        for k in 0..=cutoff {
            for m in 0..=k {
                states.push(FockState { n: k - m, m });
            }
        }
        Self { cutoff, states }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> FockState {
        self.states[index]
    }

    /// Position of `|n, m⟩`, or `None` above the cutoff.
    pub fn index(&self, n: u32, m: u32) -> Option<usize> {
        let k = n.checked_add(m)?;
        if k > self.cutoff {
            return None;
        }
        Some(shell_offset(k as usize)? + m as usize)
    }

    /// Dimensionless position operator `(a† + a) / √2` for one mode.
    ///
    /// Elements that would raise a state past the cutoff are dropped, which
    /// keeps the truncated operator exactly symmetric.
    pub fn position_operator(&self, mode: Mode) -> CsrMatrix {
        let mut triplets = Vec::with_capacity(2 * self.len());
        for (i, s) in self.states.iter().enumerate() {
            let (raised, q) = match mode {
                Mode::X => (self.index(s.n + 1, s.m), s.n),
                Mode::Y => (self.index(s.n, s.m + 1), s.m),
            };
            if let Some(j) = raised {
                let v = ((q as f64 + 1.0) / 2.0).sqrt();
                triplets.push((j, i, v));
                triplets.push((i, j, v));
            }
        }
        CsrMatrix::from_triplets(self.len(), self.len(), triplets)
    }

    /// Diagonal `n + m + 1`: total quanta plus the zero-point of both modes.
    pub fn number_operator(&self) -> CsrMatrix {
        let diag: Vec<f64> = self.states.iter().map(|s| (s.total() + 1) as f64).collect();
        CsrMatrix::diagonal(&diag)
    }

    /// Real antisymmetric generator `a_X a_Y† − a_X† a_Y` of rotations in the
    /// (X, Y) plane. The vibrational angular momentum is `i` times this
    /// matrix. It never leaves a shell, so truncation does not affect it.
    pub fn rotation_generator(&self) -> CsrMatrix {
        let mut triplets = Vec::with_capacity(2 * self.len());
        for (i, s) in self.states.iter().enumerate() {
            if s.n >= 1 {
                let j = self.index(s.n - 1, s.m + 1).expect("same shell");
                triplets.push((j, i, ((s.n * (s.m + 1)) as f64).sqrt()));
            }
            if s.m >= 1 {
                let j = self.index(s.n + 1, s.m - 1).expect("same shell");
                triplets.push((j, i, -(((s.n + 1) * s.m) as f64).sqrt()));
            }
        }
        CsrMatrix::from_triplets(self.len(), self.len(), triplets)
    }

    /// `(−1)^m` for every state: the reflection `Y → −Y`.
    pub fn y_reflection_signs(&self) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| if s.m % 2 == 0 { 1.0 } else { -1.0 })
            .collect()
    }
}
