//! Experiment harness: scenario configuration, seeded Monte Carlo
//! orchestration, and CSV/PGM artifact export.
//!
//! The six named scenarios cover the evaluated behaviors: `ber_flat`
//! (Rayleigh + AWGN link comparison), `ber_doubly_dispersive` (five-tap
//! time-varying multipath), `ber_single_tap_mobility` (pure time
//! selectivity), `rmse_sweep` (range/velocity accuracy vs the CP-OFDM
//! baseline), `rdm_export` (range-Doppler rasters), and `mainlobe_vs_m`
//! (range resolution vs modulation index).

mod config;
mod export;
mod link;
mod run;
mod sensing;

pub use config::{load, read_config_file, ExperimentConfig, Scenario, WaveformKind};
pub use export::{
    csv_text, export_csv, export_rdm, RdmScale, SweepResult, SweepRow, CSV_HEADER, RDM_DB_FLOOR,
};
pub use run::{csv_path, run_experiment};
