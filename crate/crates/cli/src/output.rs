//! Report serialization: JSON, the comparison CSV, and gnuplot-ready data
//! files with their regression summary.
//!
//! Numbers print through Rust's shortest-roundtrip float formatting and JSON
//! reloads are bit-exact (`float_roundtrip`), so identical runs produce
//! byte-identical files.

use std::io::Write;
use std::path::Path;

use hamsim_core::pipeline::ComparisonTable;
use hamsim_core::stats::linear_fit;
use hamsim_core::{Error, Result};

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::ParseError(format!("serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub const COMPARISON_CSV_HEADER: &str = "delta,eps_budget,ja_degree,arcsin_degree,walk_apps,\
trotter_r,trotter_expm_count,measured_error_qsvt,measured_error_trotter,subnormalization,wall_time_s";

pub fn comparison_csv(table: &ComparisonTable) -> String {
    let mut out = String::from(COMPARISON_CSV_HEADER);
    out.push('\n');
    for r in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.delta,
            r.eps_budget,
            r.ja_degree,
            r.arcsin_degree,
            r.walk_apps,
            r.trotter_r,
            r.trotter_expm_count,
            r.measured_error_qsvt,
            r.measured_error_trotter,
            r.subnormalization,
            r.wall_time_s,
        ));
    }
    out
}

/// Write `<stem>_qsvt.dat` and `<stem>_trotter.dat` (columns: `log10(1/delta)`
/// and the method's cost) plus `<stem>.fit` with the regression lines.
pub fn emit_plot_data(table: &ComparisonTable, stem: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::EmptyList);
    }
    let x: Vec<f64> = table.rows.iter().map(|r| (1.0 / r.delta).log10()).collect();

    let qsvt_path = stem.with_file_name(format!(
        "{}_qsvt.dat",
        stem.file_name().unwrap_or_default().to_string_lossy()
    ));
    let trotter_path = stem.with_file_name(format!(
        "{}_trotter.dat",
        stem.file_name().unwrap_or_default().to_string_lossy()
    ));
    let fit_path = stem.with_file_name(format!(
        "{}.fit",
        stem.file_name().unwrap_or_default().to_string_lossy()
    ));

    let mut qsvt = String::new();
    let mut trotter = String::new();
    for (r, &xi) in table.rows.iter().zip(&x) {
        qsvt.push_str(&format!("{} {}\n", xi, r.walk_apps));
        trotter.push_str(&format!("{} {}\n", xi, r.trotter_expm_count));
    }
    std::fs::write(&qsvt_path, qsvt)?;
    std::fs::write(&trotter_path, trotter)?;

    // Slopes recomputed here against ln(1/delta) match the table's fits.
    let mut fit_text = String::new();
    if table.rows.len() >= 2 && !table.degenerate_baseline {
        let ln_inv: Vec<f64> = table.rows.iter().map(|r| (1.0 / r.delta).ln()).collect();
        let ln_trot: Vec<f64> =
            table.rows.iter().map(|r| (r.trotter_expm_count as f64).ln()).collect();
        let ln_qsvt: Vec<f64> = table.rows.iter().map(|r| (r.walk_apps as f64).ln()).collect();
        let n_qsvt: Vec<f64> = table.rows.iter().map(|r| r.walk_apps as f64).collect();
        for (name, fit) in [
            ("trotter_cost_exponent", linear_fit(&ln_inv, &ln_trot)),
            ("qsvt_cost_power", linear_fit(&ln_inv, &ln_qsvt)),
            ("qsvt_log_linear", linear_fit(&ln_inv, &n_qsvt)),
        ] {
            fit_text.push_str(&format!(
                "{name} slope {} intercept {} r_squared {}\n",
                fit.slope, fit.intercept, fit.r_squared
            ));
        }
    } else {
        fit_text.push_str("degenerate_baseline true\n");
    }
    let mut f = std::fs::File::create(&fit_path)?;
    f.write_all(fit_text.as_bytes())?;
    Ok(())
}
