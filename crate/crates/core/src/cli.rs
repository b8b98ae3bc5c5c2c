//! `spectrum`, `apes` and `converge` commands writing CSV.
//!
//! Every table starts with `#` provenance lines followed by a header row.
//! Numbers are written with Rust's locale-independent formatting, so the
//! output is byte-identical across runs and machines.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::analysis::{apes_scan, spectrum_report_with, SpectrumReport};
use crate::eigensolver::{SolveRequest, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::hamiltonian::PjtParams;
use crate::params::parse_params;
use crate::presets::Defect;

pub const DEFAULT_CUTOFF: u32 = 15;
pub const DEFAULT_STATES: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum ParamSource {
    Preset(Defect),
    File(PathBuf),
}

impl ParamSource {
    pub fn load(&self) -> Result<PjtParams> {
        match self {
            ParamSource::Preset(d) => Ok(d.params()),
            ParamSource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::InvalidInput(format!(
                        "cannot read parameter file {}: {e}",
                        path.display()
                    ))
                })?;
                Ok(parse_params(&text)?)
            }
        }
    }

    fn describe(&self) -> String {
        match self {
            ParamSource::Preset(d) => format!("preset {d}"),
            ParamSource::File(p) => format!("params file {}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub source: ParamSource,
    pub cutoff: u32,
    pub num_states: usize,
    /// Residual bound, meV.
    pub tolerance: f64,
}

impl RunConfig {
    pub fn new(source: ParamSource) -> Self {
        Self {
            source,
            cutoff: DEFAULT_CUTOFF,
            num_states: DEFAULT_STATES,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    fn request(&self) -> SolveRequest {
        SolveRequest::new(self.num_states).with_tolerance(self.tolerance)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRange {
    pub xmin: f64,
    pub xmax: f64,
    pub points: usize,
    pub y: f64,
}

impl Default for ScanRange {
    fn default() -> Self {
        Self {
            xmin: -4.0,
            xmax: 4.0,
            points: 81,
            y: 0.0,
        }
    }
}

impl ScanRange {
    fn validate(&self) -> Result<()> {
        if !(self.xmin.is_finite() && self.xmax.is_finite() && self.y.is_finite()) {
            return Err(Error::InvalidInput("scan range must be finite".into()));
        }
        if self.xmin >= self.xmax {
            return Err(Error::InvalidInput(format!(
                "scan range needs xmin < xmax, got [{}, {}]",
                self.xmin, self.xmax
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidInput(format!(
                "scan needs at least 2 points, got {}",
                self.points
            )));
        }
        Ok(())
    }

    /// Evenly spaced grid including both end points.
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.xmin + (self.xmax - self.xmin) * i as f64 / last)
            .collect()
    }
}

fn provenance(
    out: &mut dyn Write,
    command: &str,
    source: &ParamSource,
    params: &PjtParams,
) -> Result<()> {
    writeln!(out, "# xv-pjt {} {command}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# source: {}", source.describe())?;
    writeln!(
        out,
        "# params: hbar_omega_mev={} lambda_mev={} xi_mev={} f_g_mev={} f_u_mev={}",
        params.hbar_omega, params.lambda_corr, params.xi_corr, params.f_g, params.f_u
    )?;
    Ok(())
}

fn require_spectrum_cutoff(cutoff: u32) -> Result<()> {
    if cutoff < 1 {
        return Err(Error::InvalidInput(
            "spectrum commands need cutoff >= 1".into(),
        ));
    }
    Ok(())
}

/// Writes the labelled low-lying spectrum followed by a `delta_mev=` footer.
pub fn cmd_spectrum(
    config: &RunConfig,
    out: &mut dyn Write,
    diag: &mut dyn Write,
) -> Result<SpectrumReport> {
    require_spectrum_cutoff(config.cutoff)?;
    let params = config.source.load()?;
    let report = spectrum_report_with(&params, config.cutoff, &config.request())?;

    provenance(out, "spectrum", &config.source, &params)?;
    writeln!(out, "# cutoff: {}", config.cutoff)?;
    writeln!(
        out,
        "index,energy_mev,label,w_a2u,w_a1u,w_eu,r_dimensionless"
    )?;
    for s in &report.states {
        writeln!(
            out,
            "{},{:.6},{},{:.6},{:.6},{:.6},{:.6}",
            s.index,
            s.energy,
            s.label,
            s.character.a2u,
            s.character.a1u,
            s.character.eu(),
            s.distortion_r
        )?;
        if s.truncation_warning {
            writeln!(
                diag,
                "warning: state {} has more than 1% weight in the top two Fock shells; increase --cutoff",
                s.index
            )?;
        }
    }
    match report.delta_or_error() {
        Ok(delta) => writeln!(out, "delta_mev={delta:.6}")?,
        Err(e) => {
            writeln!(out, "delta_mev=NA")?;
            writeln!(diag, "note: delta undefined: {e}")?;
        }
    }
    Ok(report)
}

/// Writes the classical sheets along `x` at fixed `y`.
pub fn cmd_apes(source: &ParamSource, range: &ScanRange, out: &mut dyn Write) -> Result<()> {
    range.validate()?;
    let params = source.load()?;
    let scan = apes_scan(&params, &range.grid(), range.y)?;

    provenance(out, "apes", source, &params)?;
    writeln!(out, "# y: {}", range.y)?;
    writeln!(out, "x,e0,e1,e2,e3,w_a2u,w_a1u,w_eu")?;
    for p in &scan {
        let e = p.point.energies;
        let c = p.characters[0];
        writeln!(
            out,
            "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            p.point.x,
            e[0],
            e[1],
            e[2],
            e[3],
            c.a2u,
            c.a1u,
            c.eu()
        )?;
    }
    Ok(())
}

/// Writes one row per cutoff. Failing cutoffs are reported on `diag` and
/// as comment lines; the remaining cutoffs still run. Returns whether every
/// cutoff succeeded.
pub fn cmd_converge(
    config: &RunConfig,
    cutoffs: &[u32],
    threshold: f64,
    out: &mut dyn Write,
    diag: &mut dyn Write,
) -> Result<bool> {
    if cutoffs.len() < 2 {
        return Err(Error::InvalidInput(
            "--cutoffs needs at least two values".into(),
        ));
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!(
            "--cutoffs must be strictly ascending, got {cutoffs:?}"
        )));
    }
    for &c in cutoffs {
        require_spectrum_cutoff(c)?;
    }
    let params = config.source.load()?;
    let req = config.request();
    let reports: Vec<Result<SpectrumReport>> = cutoffs
        .par_iter()
        .map(|&c| spectrum_report_with(&params, c, &req))
        .collect();

    provenance(out, "converge", &config.source, &params)?;
    let energy_cols: Vec<String> = (0..config.num_states).map(|i| format!("e{i}")).collect();
    writeln!(out, "cutoff,{},delta_mev", energy_cols.join(","))?;

    let mut all_ok = true;
    let mut previous_ground: Option<f64> = None;
    let mut converged_at = None;
    for (&cutoff, report) in cutoffs.iter().zip(&reports) {
        match report {
            Ok(r) => {
                let energies: Vec<String> = r
                    .states
                    .iter()
                    .map(|s| format!("{:.6}", s.energy))
                    .collect();
                let delta = r
                    .delta
                    .map(|d| format!("{d:.6}"))
                    .unwrap_or_else(|| "NA".to_string());
                writeln!(out, "{cutoff},{},{delta}", energies.join(","))?;
                let ground = r.ground().energy;
                if converged_at.is_none()
                    && previous_ground.is_some_and(|g| (g - ground).abs() < threshold)
                {
                    converged_at = Some(cutoff);
                }
                previous_ground = Some(ground);
            }
            Err(e) => {
                all_ok = false;
                writeln!(out, "# cutoff {cutoff} failed: {e}")?;
                writeln!(diag, "error: cutoff {cutoff}: {e}")?;
            }
        }
    }
    match converged_at {
        Some(c) => writeln!(
            out,
            "# ground energy converged within {threshold} meV at cutoff {c}"
        )?,
        None => writeln!(out, "# ground energy not converged within {threshold} meV")?,
    }
    Ok(all_ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_end_points_and_symmetry() {
        let g = ScanRange::default().grid();
        assert_eq!(g.len(), 81);
        assert_eq!(g[0], -4.0);
        assert_eq!(g[40], 0.0);
        assert_eq!(g[80], 4.0);
        for i in 0..81 {
            assert!((g[i] + g[80 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_ranges() {
        let mut r = ScanRange {
            points: 1,
            ..ScanRange::default()
        };
        assert!(r.validate().is_err());
        r = ScanRange {
            xmin: 1.0,
            xmax: 1.0,
            ..ScanRange::default()
        };
        assert!(r.validate().is_err());
        r = ScanRange {
            xmax: f64::INFINITY,
            ..ScanRange::default()
        };
        assert!(r.validate().is_err());
    }

    #[test]
    fn spectrum_csv_layout() {
        let mut config = RunConfig::new(ParamSource::Preset(Defect::SiV));
        config.num_states = 3;
        let (mut out, mut diag) = (Vec::new(), Vec::new());
        cmd_spectrum(&config, &mut out, &mut diag).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(
            lines[0],
            "index,energy_mev,label,w_a2u,w_a1u,w_eu,r_dimensionless"
        );
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,") && lines[1].contains(",A2u,"));
        assert!(lines[4].starts_with("delta_mev="));
        assert!(text.contains("# source: preset SiV"));
        assert!(text.contains("# cutoff: 15"));
    }

    #[test]
    fn converge_reports_failures_and_continues() {
        let mut config = RunConfig::new(ParamSource::Preset(Defect::SiV));
        config.num_states = 5;
        // cutoff 1 has only 12 states but 5 fit; cutoff 2 is fine too
        let (mut out, mut diag) = (Vec::new(), Vec::new());
        let ok = cmd_converge(&config, &[1, 2, 3], 1e-3, &mut out, &mut diag).unwrap();
        assert!(ok);

        config.num_states = 13;
        let (mut out, mut diag) = (Vec::new(), Vec::new());
        let ok = cmd_converge(&config, &[1, 2], 1e-3, &mut out, &mut diag).unwrap();
        assert!(!ok);
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("# cutoff 1 failed"));
        assert!(text.lines().any(|l| l.starts_with("2,")));
        assert!(!diag.is_empty());
    }
}
