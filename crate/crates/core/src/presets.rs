//! Computed parameter sets of the four neutral group-IV vacancy centers.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::hamiltonian::PjtParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Defect {
    SiV,
    GeV,
    SnV,
    PbV,
}

/// One defect's Hamiltonian parameters plus the published reference
/// values the model should reproduce.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefectPreset {
    pub defect: Defect,
    pub params: PjtParams,
    /// A₂ᵤ–Eᵤ vibronic gap δ in meV.
    pub reference_delta: f64,
    /// Tabulated Jahn-Teller energies (meV), listed independently of the
    /// couplings and rounded separately from them.
    pub reference_e_jt1: f64,
    pub reference_e_jt2: f64,
}

impl Defect {
    pub const ALL: [Defect; 4] = [Defect::SiV, Defect::GeV, Defect::SnV, Defect::PbV];

    pub fn name(self) -> &'static str {
        match self {
            Defect::SiV => "SiV",
            Defect::GeV => "GeV",
            Defect::SnV => "SnV",
            Defect::PbV => "PbV",
        }
    }

    pub fn preset(self) -> DefectPreset {
        // (ħω_E, Λ, Ξ, F_g, F_u, δ, E_JT1, E_JT2)
        let (w, l, x, fg, fu, delta, e1, e2) = match self {
            Defect::SiV => (75.9, 78.3, 45.0, 95.0, 103.0, 6.7, 258.0, 0.47),
            Defect::GeV => (78.2, 88.6, 40.0, 83.0, 112.0, 7.6, 242.0, 5.18),
            Defect::SnV => (81.3, 99.5, 42.0, 67.0, 120.0, 9.3, 217.0, 17.2),
            Defect::PbV => (81.4, 119.0, 36.0, 52.0, 125.0, 10.8, 194.0, 33.4),
        };
        DefectPreset {
            defect: self,
            params: PjtParams {
                hbar_omega: w,
                lambda_corr: l,
                xi_corr: x,
                f_g: fg,
                f_u: fu,
            },
            reference_delta: delta,
            reference_e_jt1: e1,
            reference_e_jt2: e2,
        }
    }

    pub fn params(self) -> PjtParams {
        self.preset().params
    }

    pub fn reference_delta(self) -> f64 {
        self.preset().reference_delta
    }
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Defect {
    type Err = Error;

    /// Case-insensitive lookup; unknown names list the available presets.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Defect::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let names: Vec<&str> = Defect::ALL.iter().map(|d| d.name()).collect();
                Error::InvalidInput(format!(
                    "unknown preset '{s}'; available presets: {}",
                    names.join(", ")
                ))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        let siv = Defect::SiV.preset();
        assert_eq!(
            siv.params,
            PjtParams::new(75.9, 78.3, 45.0, 95.0, 103.0).unwrap()
        );
        assert_eq!(siv.reference_delta, 6.7);
        assert_eq!(
            Defect::GeV.params(),
            PjtParams::new(78.2, 88.6, 40.0, 83.0, 112.0).unwrap()
        );
        assert_eq!(
            Defect::SnV.params(),
            PjtParams::new(81.3, 99.5, 42.0, 67.0, 120.0).unwrap()
        );
        assert_eq!(
            Defect::PbV.params(),
            PjtParams::new(81.4, 119.0, 36.0, 52.0, 125.0).unwrap()
        );
        let deltas: Vec<f64> = Defect::ALL.iter().map(|d| d.reference_delta()).collect();
        assert_eq!(deltas, vec![6.7, 7.6, 9.3, 10.8]);
        for d in Defect::ALL {
            d.params().validate().unwrap();
        }
    }

    #[test]
    fn name_lookup() {
        for d in Defect::ALL {
            assert_eq!(d.name().parse::<Defect>().unwrap(), d);
        }
        assert_eq!("pbv".parse::<Defect>().unwrap(), Defect::PbV);
        let err = "CV".parse::<Defect>().unwrap_err().to_string();
        assert!(err.contains("SiV, GeV, SnV, PbV"), "{err}");
    }
}
