//! Artifact export: the sweep CSV and range-Doppler PGM rasters with axis
//! sidecars. All writers are byte-deterministic for identical inputs.

use crate::metrics::SweepPoint;
use crate::radar::RangeDopplerMap;
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// One aggregated (scenario, waveform, SNR) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scenario: &'static str,
    pub waveform: &'static str,
    pub snr_db: f64,
    pub point: SweepPoint,
}

/// Full result of one experiment run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

pub const CSV_HEADER: &str =
    "scenario,waveform,snr_db,ber,rmse_range_m,rmse_velocity_mps,trials,ci95";

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => "NaN".to_string(),
    }
}

/// Render the sweep as CSV text (LF line endings, UTF-8, `NaN` for metrics
/// a scenario does not produce).
pub fn csv_text(result: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.scenario,
            row.waveform,
            row.snr_db,
            row.point.ber,
            fmt_opt(row.point.rmse_range),
            fmt_opt(row.point.rmse_velocity),
            row.point.trials,
            row.point.ci95,
        );
    }
    out
}

/// Write the sweep CSV to disk.
pub fn export_csv(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, csv_text(result))?;
    Ok(())
}

/// Pixel mapping for the RDM raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdmScale {
    /// Min-max normalized magnitudes.
    Linear,
    /// 20 log10(v / max), floored at -60 dB.
    Db,
}

/// dB floor for [`RdmScale::Db`].
pub const RDM_DB_FLOOR: f64 = -60.0;

fn rdm_pixels(map: &RangeDopplerMap, scale: RdmScale) -> Vec<u8> {
    let max = map.grid.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = map.grid.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    map.grid
        .iter()
        .flatten()
        .map(|&v| match scale {
            RdmScale::Linear => {
                if max > min {
                    ((v - min) / (max - min) * 255.0).round() as u8
                } else {
                    128
                }
            }
            RdmScale::Db => {
                if max <= 0.0 {
                    return 0;
                }
                let db = if v > 0.0 { 20.0 * (v / max).log10() } else { RDM_DB_FLOOR };
                let t = ((db - RDM_DB_FLOOR) / -RDM_DB_FLOOR).clamp(0.0, 1.0);
                (t * 255.0).round() as u8
            }
        })
        .collect()
}

/// Export a range-Doppler map as a binary PGM (P5) raster plus a text
/// sidecar (`<path>.txt`) describing the axes. Rows are range bins, columns
/// Doppler bins.
pub fn export_rdm(map: &RangeDopplerMap, path: &Path, scale: RdmScale) -> Result<()> {
    if map.grid.is_empty() || map.grid[0].is_empty() {
        return Err(Error::EmptyInput);
    }
    let rows = map.grid.len();
    let cols = map.grid[0].len();
    let mut bytes = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    bytes.extend(rdm_pixels(map, scale));
    std::fs::write(path, bytes)?;

    let mut sidecar = String::new();
    let _ = writeln!(sidecar, "rows_range_bins {rows}");
    let _ = writeln!(sidecar, "cols_doppler_bins {cols}");
    let _ = writeln!(sidecar, "range_min_m {}", map.range_axis[0]);
    let _ = writeln!(sidecar, "range_max_m {}", map.range_axis[rows - 1]);
    let _ = writeln!(sidecar, "velocity_min_mps {}", map.velocity_axis[0]);
    let _ = writeln!(sidecar, "velocity_max_mps {}", map.velocity_axis[cols - 1]);
    let _ = writeln!(
        sidecar,
        "scale {}",
        match scale {
            RdmScale::Linear => "linear",
            RdmScale::Db => "db",
        }
    );
    if scale == RdmScale::Db {
        let _ = writeln!(sidecar, "floor_db {RDM_DB_FLOOR}");
    }
    let mut sidecar_path = path.as_os_str().to_owned();
    sidecar_path.push(".txt");
    std::fs::write(sidecar_path, sidecar)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(ber: f64) -> SweepPoint {
        SweepPoint {
            ber,
            ci95: 0.001,
            low_confidence: false,
            rmse_range: None,
            rmse_velocity: Some(2.5),
            trials: 10,
        }
    }

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("isac_export_test");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let text = csv_text(&SweepResult::default());
        assert_eq!(text, format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn three_points_give_four_lines() {
        let rows = [10.0, 20.0, 30.0]
            .iter()
            .map(|&snr| SweepRow {
                scenario: "ber_flat",
                waveform: "fm_ofdm",
                snr_db: snr,
                point: point(0.01),
            })
            .collect();
        let text = csv_text(&SweepResult { rows });
        let lines: Vec<&str> = text.trim_end().split('\n').collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "ber_flat,fm_ofdm,10,0.01,NaN,2.5,10,0.001");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn csv_reexport_is_byte_identical() {
        let result = SweepResult {
            rows: vec![SweepRow {
                scenario: "rmse_sweep",
                waveform: "cp_ofdm",
                snr_db: -10.0,
                point: point(f64::NAN),
            }],
        };
        let (a, b) = (tmp("a.csv"), tmp("b.csv"));
        export_csv(&result, &a).unwrap();
        export_csv(&result, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    fn small_map(grid: Vec<Vec<f64>>) -> RangeDopplerMap {
        let rows = grid.len();
        let cols = grid[0].len();
        RangeDopplerMap {
            grid,
            range_axis: (0..rows).map(|r| r as f64 * 9.7).collect(),
            velocity_axis: (0..cols).map(|c| c as f64 - 2.0).collect(),
        }
    }

    #[test]
    fn constant_grid_is_uniform_midgray() {
        let map = small_map(vec![vec![3.0; 4]; 3]);
        let path = tmp("const.pgm");
        export_rdm(&map, &path, RdmScale::Linear).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let header = b"P5\n4 3\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert!(bytes[header.len()..].iter().all(|&b| b == 128));
        assert_eq!(bytes.len(), header.len() + 12);
        let sidecar = std::fs::read_to_string(tmp("const.pgm.txt")).unwrap();
        assert!(sidecar.contains("rows_range_bins 3"));
        assert!(sidecar.contains("scale linear"));
    }

    #[test]
    fn single_peak_is_single_bright_pixel() {
        let mut grid = vec![vec![0.0; 4]; 4];
        grid[1][2] = 5.0;
        let map = small_map(grid);
        let path = tmp("peak.pgm");
        export_rdm(&map, &path, RdmScale::Linear).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let pixels = &bytes[b"P5\n4 4\n255\n".len()..];
        assert_eq!(pixels[1 * 4 + 2], 255);
        assert_eq!(pixels.iter().filter(|&&b| b == 255).count(), 1);
        assert!(pixels.iter().filter(|&&b| b != 255).all(|&b| b == 0));
    }

    #[test]
    fn db_scale_floors_at_minus_60() {
        // ratios: 1 (0 dB), 1e-2 (-40 dB), 1e-4 (-80 dB, floored)
        let map = small_map(vec![vec![1.0, 1e-2, 1e-4, 0.0]]);
        let path = tmp("db.pgm");
        export_rdm(&map, &path, RdmScale::Db).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let pixels = &bytes[b"P5\n4 1\n255\n".len()..];
        assert_eq!(pixels[0], 255);
        assert_eq!(pixels[1], ((-40.0f64 + 60.0) / 60.0 * 255.0).round() as u8);
        assert_eq!(pixels[2], 0);
        assert_eq!(pixels[3], 0);
        let sidecar = std::fs::read_to_string(tmp("db.pgm.txt")).unwrap();
        assert!(sidecar.contains("floor_db -60"));
    }

    #[test]
    fn rdm_reexport_is_byte_identical() {
        let map = small_map(vec![vec![0.1, 0.9], vec![0.4, 0.2]]);
        let (a, b) = (tmp("r1.pgm"), tmp("r2.pgm"));
        export_rdm(&map, &a, RdmScale::Db).unwrap();
        export_rdm(&map, &b, RdmScale::Db).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}
