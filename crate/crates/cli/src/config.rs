//! Run configuration: TOML file plus command-line overrides.

use crate::CliError;
use mzm_cnot::kitaev::BasisMap;
use mzm_cnot::matrix::C64;
use mzm_cnot::noise::{ErrorUnitary, NoiseSpec, Placement};
use mzm_cnot::resilience::{default_p_grid, ErrorFrame};
use mzm_cnot::tomography::Shots;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    Tomography,
    Bell,
    Resilience,
    FitP,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Tomography => "tomography",
            Command::Bell => "bell",
            Command::Resilience => "resilience",
            Command::FitP => "fit-p",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `shots = 100000` or `shots = "exact"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotsSetting(pub Shots);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ShotsRepr {
    Count(u64),
    Word(String),
}

impl Serialize for ShotsSetting {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Shots::Finite(n) => ShotsRepr::Count(n),
            Shots::Exact => ShotsRepr::Word("exact".into()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ShotsSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let shots = match ShotsRepr::deserialize(d)? {
            ShotsRepr::Count(n) => n.to_string().parse(),
            ShotsRepr::Word(w) => w.parse(),
        };
        shots.map(ShotsSetting).map_err(serde::de::Error::custom)
    }
}

/// Frame the tomography measures in, relative to the chain basis.
///
/// `basis_map = "hadamard"` (the spin frame), `"identity"`, or a table
/// `{ permutation = [...], phases = [...] }` with phases in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisMapSetting {
    Named(String),
    Table { permutation: Vec<usize>, #[serde(default)] phases: Vec<f64> },
}

impl Default for BasisMapSetting {
    fn default() -> Self {
        BasisMapSetting::Named("hadamard".into())
    }
}

impl BasisMapSetting {
    pub fn resolve(&self) -> Result<BasisMap, CliError> {
        match self {
            BasisMapSetting::Named(name) => match name.as_str() {
                "hadamard" => Ok(BasisMap::hadamard(3)),
                "identity" => Ok(BasisMap::identity(3)),
                other => Err(CliError::Config(format!("unknown basis map {other:?}"))),
            },
            BasisMapSetting::Table { permutation, phases } => {
                if permutation.len() != 8 {
                    return Err(CliError::Config("basis map permutation must have 8 entries".into()));
                }
                let phases: Vec<C64> = if phases.is_empty() {
                    vec![C64::ONE; permutation.len()]
                } else {
                    phases.iter().map(|&t| C64::from_polar(1.0, t)).collect()
                };
                BasisMap::from_permutation(permutation, &phases).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResilienceSettings {
    pub n_samples: usize,
    /// Explicit grid; when empty, `0, p_step, ..., p_max`.
    pub p_grid: Vec<f64>,
    pub p_max: f64,
    pub p_step: f64,
    pub frame: ErrorFrame,
    /// Sweep placement and frame and keep the pair closest to `target_threshold`.
    pub calibrate: bool,
    pub target_threshold: f64,
}

impl Default for ResilienceSettings {
    fn default() -> Self {
        Self {
            n_samples: 2000,
            p_grid: Vec::new(),
            p_max: 0.15,
            p_step: 0.005,
            frame: ErrorFrame::default(),
            calibrate: true,
            target_threshold: 0.065,
        }
    }
}

impl ResilienceSettings {
    pub fn grid(&self) -> Vec<f64> {
        if !self.p_grid.is_empty() {
            return self.p_grid.clone();
        }
        if self.p_max == 0.15 && self.p_step == 0.005 {
            return default_p_grid();
        }
        let steps = (self.p_max / self.p_step + 1e-9).floor() as usize;
        (0..=steps).map(|k| k as f64 * self.p_step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub shots: ShotsSetting,
    pub seed: u64,
    /// Local error model for the resilience study; `noise.p` also sets the
    /// correlated dephasing strength of the tomography commands.
    pub noise: NoiseSpec,
    pub output_dir: PathBuf,
    pub basis_map: BasisMapSetting,
    pub resilience: ResilienceSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Verify,
            shots: ShotsSetting(Shots::Finite(100_000)),
            seed: 2024,
            noise: NoiseSpec { error_unitary: ErrorUnitary::Z, p: 0.012, placement: Placement::PerGateParticipants },
            output_dir: PathBuf::from("out"),
            basis_map: BasisMapSetting::default(),
            resilience: ResilienceSettings::default(),
        }
    }
}

/// Values given on the command line; each one replaces the file value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub shots: Option<String>,
    pub p: Option<f64>,
    pub placement: Option<String>,
    pub out: Option<PathBuf>,
    pub samples: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// An explicit placement switches off calibration.
    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(s) = &o.shots {
            self.shots = ShotsSetting(s.parse().map_err(|e| CliError::Config(format!("--shots: {e}")))?);
        }
        if let Some(p) = o.p {
            self.noise.p = p;
        }
        if let Some(name) = &o.placement {
            self.noise.placement = name.parse().map_err(|e| CliError::Config(format!("--placement: {e}")))?;
            self.resilience.calibrate = false;
        }
        if let Some(out) = &o.out {
            self.output_dir = out.clone();
        }
        if let Some(n) = o.samples {
            self.resilience.n_samples = n;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(0.0..=1.0).contains(&self.noise.p) {
            return Err(CliError::Config(format!("p = {} is outside [0, 1]", self.noise.p)));
        }
        if self.shots.0 == Shots::Finite(0) {
            return Err(CliError::Config("shots must be at least 1".into()));
        }
        let r = &self.resilience;
        if r.n_samples == 0 {
            return Err(CliError::Config("resilience.n_samples must be at least 1".into()));
        }
        if r.p_grid.is_empty() && !(r.p_step > 0.0 && r.p_max >= 0.0 && r.p_max <= 1.0) {
            return Err(CliError::Config("resilience grid needs 0 < p_step and 0 <= p_max <= 1".into()));
        }
        let grid = r.grid();
        if grid.windows(2).any(|w| w[0] >= w[1]) || grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(CliError::Config("resilience.p_grid must be ascending inside [0, 1]".into()));
        }
        self.basis_map.resolve()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn full_file() {
        let cfg = RunConfig::from_toml(
            r#"
            command = "fit-p"
            shots = "exact"
            seed = 5
            output_dir = "runs/a"
            basis_map = { permutation = [7, 6, 5, 4, 3, 2, 1, 0] }
            [noise]
            unitary = "x"
            p = 0.05
            placement = "per_time_step"
            [resilience]
            n_samples = 10
            p_grid = [0.0, 0.1]
            frame = "chain"
            calibrate = false
            "#,
        )
        .unwrap();
        assert_eq!(cfg.command, Command::FitP);
        assert_eq!(cfg.shots.0, Shots::Exact);
        assert_eq!(cfg.noise.error_unitary, ErrorUnitary::X);
        assert_eq!(cfg.noise.placement, Placement::PerTimeStep);
        assert_eq!(cfg.resilience.grid(), vec![0.0, 0.1]);
        assert!(cfg.basis_map.resolve().unwrap().is_parity_mixing());
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_toml("shots = 0").is_err());
        assert!(RunConfig::from_toml("colour = 1").is_err());
        let mut cfg = RunConfig::default();
        cfg.noise.p = 1.5;
        assert!(cfg.validate().is_err());
        cfg = RunConfig { basis_map: BasisMapSetting::Named("fourier".into()), ..RunConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn overrides_win() {
        let mut cfg = RunConfig::default();
        let o = Overrides {
            seed: Some(3),
            shots: Some("exact".into()),
            p: Some(0.2),
            placement: Some("once-per-qubit-end".into()),
            out: Some("x".into()),
            samples: Some(7),
        };
        cfg.apply(&o).unwrap();
        assert_eq!((cfg.seed, cfg.shots.0, cfg.noise.p), (3, Shots::Exact, 0.2));
        assert_eq!(cfg.noise.placement, Placement::OncePerQubitEnd);
        assert!(!cfg.resilience.calibrate);
        assert_eq!(cfg.resilience.n_samples, 7);
        assert!(cfg.apply(&Overrides { shots: Some("lots".into()), ..Overrides::default() }).is_err());
    }

    #[test]
    fn default_grid_is_canonical() {
        assert_eq!(ResilienceSettings::default().grid(), default_p_grid());
    }
}
