//! Experiment configuration: scenario catalogue, per-scenario defaults, and
//! the key=value config-file / CLI-override loader.

use crate::channel::Target;
use crate::waveform::{FmParams, OfdmConfig};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

/// Named experiment scenarios, one per reproduced figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    BerFlat,
    BerDoublyDispersive,
    BerSingleTapMobility,
    RmseSweep,
    RdmExport,
    MainlobeVsM,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::BerFlat,
        Scenario::BerDoublyDispersive,
        Scenario::BerSingleTapMobility,
        Scenario::RmseSweep,
        Scenario::RdmExport,
        Scenario::MainlobeVsM,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::BerFlat => "ber_flat",
            Scenario::BerDoublyDispersive => "ber_doubly_dispersive",
            Scenario::BerSingleTapMobility => "ber_single_tap_mobility",
            Scenario::RmseSweep => "rmse_sweep",
            Scenario::RdmExport => "rdm_export",
            Scenario::MainlobeVsM => "mainlobe_vs_m",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario '{s}'")))
    }
}

/// The three waveforms under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveformKind {
    FmOfdm,
    CeOfdm,
    CpOfdm,
}

impl WaveformKind {
    pub fn name(self) -> &'static str {
        match self {
            WaveformKind::FmOfdm => "fm_ofdm",
            WaveformKind::CeOfdm => "ce_ofdm",
            WaveformKind::CpOfdm => "cp_ofdm",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fm_ofdm" => Ok(WaveformKind::FmOfdm),
            "ce_ofdm" => Ok(WaveformKind::CeOfdm),
            "cp_ofdm" => Ok(WaveformKind::CpOfdm),
            other => Err(Error::Config(format!("unknown waveform '{other}'"))),
        }
    }
}

/// Full experiment description. Built from per-scenario defaults, then
/// overridden by config-file entries and CLI flags (in that order).
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub waveforms: Vec<WaveformKind>,
    pub snr_grid: Vec<f64>,
    pub n_fft: usize,
    pub n_cp: usize,
    /// Number of active data tones (1..=active_tones).
    pub active_tones: usize,
    pub qam_order: usize,
    pub sample_rate: f64,
    pub carrier: f64,
    /// Modulation indices; the first entry is used everywhere except
    /// mainlobe_vs_m, which sweeps the whole list.
    pub mod_indices: Vec<f64>,
    /// Bandwidth shaping factor eta in the Carson-like occupancy formula.
    pub eta: f64,
    /// Mobile speed in m/s for the fading scenarios.
    pub speed: f64,
    /// Point targets for the sensing scenarios.
    pub targets: Vec<Target>,
    /// Slow-time symbols U integrated per sensing trial.
    pub n_symbols: usize,
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; 0 means use all cores.
    pub workers: usize,
    pub out_dir: PathBuf,
    /// Sub-bin parabolic peak interpolation for range estimates. Off by
    /// default so RMSE floors include grid quantization.
    pub refine: bool,
}

impl ExperimentConfig {
    /// Defaults for the given scenario (Table-1-style numerology).
    pub fn for_scenario(scenario: Scenario) -> Self {
        let mut cfg = Self {
            scenario,
            waveforms: vec![WaveformKind::FmOfdm, WaveformKind::CeOfdm, WaveformKind::CpOfdm],
            snr_grid: vec![10.0, 20.0, 30.0],
            n_fft: 512,
            n_cp: 64,
            active_tones: 128,
            qam_order: 4,
            sample_rate: 15.36e6,
            carrier: 2.4e9,
            mod_indices: vec![0.6 / TAU],
            eta: 1.5,
            speed: 100.0 / 3.6,
            targets: vec![Target {
                range: 300.0,
                velocity: 12.0,
                reflectivity: Complex64::new(1.0, 0.0),
            }],
            n_symbols: 64,
            trials: 400,
            seed: 1,
            workers: 0,
            out_dir: PathBuf::from("out"),
            refine: false,
        };
        match scenario {
            Scenario::BerFlat => {
                cfg.speed = 0.0;
            }
            Scenario::BerDoublyDispersive | Scenario::BerSingleTapMobility => {
                // mmWave carrier so 100 km/h produces a Doppler spread that
                // is a meaningful fraction of the subcarrier spacing
                cfg.carrier = 77e9;
            }
            Scenario::RmseSweep => {
                cfg.carrier = 77e9;
                cfg.waveforms = vec![WaveformKind::FmOfdm, WaveformKind::CpOfdm];
                cfg.snr_grid = vec![-10.0, 0.0, 10.0, 20.0];
                cfg.trials = 50;
            }
            Scenario::RdmExport => {
                cfg.carrier = 77e9;
                cfg.waveforms = vec![WaveformKind::FmOfdm];
                cfg.mod_indices = vec![0.9 / TAU];
                cfg.snr_grid = vec![10.0, -30.0];
                cfg.trials = 1;
            }
            Scenario::MainlobeVsM => {
                cfg.carrier = 77e9;
                cfg.waveforms = vec![WaveformKind::FmOfdm];
                cfg.mod_indices = vec![0.3 / TAU, 0.6 / TAU, 0.9 / TAU];
                cfg.snr_grid = vec![30.0];
                cfg.targets = vec![Target {
                    range: 150.0,
                    velocity: 0.0,
                    reflectivity: Complex64::new(1.0, 0.0),
                }];
                cfg.n_symbols = 8;
                cfg.trials = 50;
            }
        }
        cfg
    }

    /// Apply one key=value entry. Keys mirror the CLI flags one-to-one.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "scenario" => self.scenario = Scenario::parse(value)?,
            "waveforms" => {
                self.waveforms =
                    value.split(',').map(|w| WaveformKind::parse(w.trim())).collect::<Result<_>>()?
            }
            "snr" => self.snr_grid = parse_f64_list(key, value)?,
            "n_fft" => self.n_fft = parse_num(key, value)?,
            "n_cp" => self.n_cp = parse_num(key, value)?,
            "active_tones" => self.active_tones = parse_num(key, value)?,
            "qam" => self.qam_order = parse_num(key, value)?,
            "sample_rate" => self.sample_rate = parse_num(key, value)?,
            "carrier" => self.carrier = parse_num(key, value)?,
            "mod_index" => self.mod_indices = parse_f64_list(key, value)?,
            "eta" => self.eta = parse_num(key, value)?,
            "speed" => self.speed = parse_num(key, value)?,
            "targets" => self.targets = parse_targets(value)?,
            "u" => self.n_symbols = parse_num(key, value)?,
            "trials" => self.trials = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "workers" => self.workers = parse_num(key, value)?,
            "out" => self.out_dir = PathBuf::from(value),
            "refine" => {
                self.refine = match value.trim() {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    other => {
                        return Err(Error::Config(format!(
                            "invalid value '{other}' for key 'refine' (expected true/false)"
                        )))
                    }
                }
            }
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.snr_grid.is_empty() {
            return Err(Error::Config("snr grid must be nonempty".into()));
        }
        if self.waveforms.is_empty() {
            return Err(Error::Config("waveform list must be nonempty".into()));
        }
        if self.mod_indices.is_empty() {
            return Err(Error::Config("mod_index list must be nonempty".into()));
        }
        if self.n_symbols == 0 {
            return Err(Error::Config("u (slow-time symbols) must be >= 1".into()));
        }
        if !(self.carrier > 0.0) || !(self.sample_rate > 0.0) {
            return Err(Error::Config("carrier and sample_rate must be positive".into()));
        }
        self.ofdm()?;
        self.fm(self.mod_indices[0])?;
        Ok(())
    }

    /// OFDM numerology derived from this configuration.
    pub fn ofdm(&self) -> Result<OfdmConfig> {
        OfdmConfig::with_cutoff(
            self.n_fft,
            self.n_cp,
            self.sample_rate,
            self.active_tones,
            self.qam_order,
        )
    }

    /// FM parameters for modulation index `m` with f_delta = F_s.
    pub fn fm(&self, m: f64) -> Result<FmParams> {
        FmParams::new(m, self.sample_rate)
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for key '{key}'")))
}

fn parse_f64_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| parse_num(key, v)).collect()
}

/// Targets are `range,velocity` pairs (meters, m/s) separated by `;`, all
/// with unit reflectivity.
fn parse_targets(value: &str) -> Result<Vec<Target>> {
    value
        .split(';')
        .map(|pair| {
            let fields: Vec<&str> = pair.split(',').collect();
            if fields.len() != 2 {
                return Err(Error::Config(format!(
                    "target '{pair}' must be 'range,velocity'"
                )));
            }
            Ok(Target {
                range: parse_num("targets", fields[0])?,
                velocity: parse_num("targets", fields[1])?,
                reflectivity: Complex64::new(1.0, 0.0),
            })
        })
        .collect()
}

/// Read a key=value config file: one entry per line, `#` starts a comment,
/// blank lines ignored.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected key=value, got '{line}'", lineno + 1))
        })?;
        entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

/// Resolve a full configuration from an optional config file plus ordered
/// overrides. The scenario key selects the defaults; overrides win over file
/// entries.
pub fn load(config_path: Option<&Path>, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let file_entries = match config_path {
        Some(p) => read_config_file(p)?,
        None => Vec::new(),
    };
    let scenario_str = overrides
        .iter()
        .rev()
        .find(|(k, _)| k == "scenario")
        .or_else(|| file_entries.iter().rev().find(|(k, _)| k == "scenario"))
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::Config("scenario is required".into()))?;
    let mut cfg = ExperimentConfig::for_scenario(Scenario::parse(scenario_str)?);
    for (key, value) in file_entries.iter().chain(overrides) {
        cfg.apply(key, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names_round_trip() {
        for sc in Scenario::ALL {
            assert_eq!(Scenario::parse(sc.name()).unwrap(), sc);
        }
        assert!(Scenario::parse("nope").is_err());
    }

    #[test]
    fn defaults_are_valid_for_every_scenario() {
        for sc in Scenario::ALL {
            ExperimentConfig::for_scenario(sc).validate().unwrap();
        }
    }

    #[test]
    fn apply_overrides_fields() {
        let mut cfg = ExperimentConfig::for_scenario(Scenario::BerFlat);
        cfg.apply("snr", "0, 10 ,20").unwrap();
        cfg.apply("waveforms", "fm_ofdm,cp_ofdm").unwrap();
        cfg.apply("trials", "7").unwrap();
        cfg.apply("targets", "120,3.5;44,-2").unwrap();
        assert_eq!(cfg.snr_grid, vec![0.0, 10.0, 20.0]);
        assert_eq!(cfg.waveforms, vec![WaveformKind::FmOfdm, WaveformKind::CpOfdm]);
        assert_eq!(cfg.trials, 7);
        assert_eq!(cfg.targets.len(), 2);
        assert_eq!(cfg.targets[1].velocity, -2.0);
        assert!(cfg.apply("bogus", "1").is_err());
        assert!(cfg.apply("trials", "x").is_err());
    }

    #[test]
    fn load_merges_file_and_overrides() {
        let dir = std::env::temp_dir().join("isac_cfg_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg.txt");
        std::fs::write(
            &path,
            "# comment\nscenario = ber_flat\ntrials = 9\nseed = 5 # inline comment\n",
        )
        .unwrap();
        let cfg = load(Some(&path), &[("trials".into(), "11".into())]).unwrap();
        assert_eq!(cfg.scenario, Scenario::BerFlat);
        assert_eq!(cfg.trials, 11); // override wins
        assert_eq!(cfg.seed, 5);
    }

    #[test]
    fn load_without_scenario_fails() {
        assert!(matches!(load(None, &[]), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_config_values_rejected() {
        let mut cfg = ExperimentConfig::for_scenario(Scenario::BerFlat);
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::for_scenario(Scenario::BerFlat);
        cfg.n_cp = 512;
        assert!(cfg.validate().is_err());
    }
}
