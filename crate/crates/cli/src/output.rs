use anyhow::{Context, Result};
use std::io::Write;
use std::path::Path;
use stirap_core::TimeSeries64;

/// Fixed 17-significant-digit scientific form, the round-trip-exact f64
/// width. All CSV numbers use it so identical configs give byte-identical
/// files.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const TIMESERIES_HEADER: &str =
    "t,rho00,rho11,rho22,re01,im01,re12,im12,re02,im02,pop_plus,pop_zero,pop_minus";

/// Write a sampled trajectory with the fixed column layout and `\n` line
/// endings.
pub fn write_timeseries_csv(path: &Path, series: &TimeSeries64) -> Result<()> {
    let mut buf = String::with_capacity(series.len() * 16 * 24);
    buf.push_str(TIMESERIES_HEADER);
    buf.push('\n');
    for i in 0..series.len() {
        let t = series.times[i];
        let p = series.bare_pops[i];
        let c = series.bare_cohs[i];
        let a = series.adiabatic_pops[i];
        let row = [
            t, p[0], p[1], p[2], c[0].re, c[0].im, c[1].re, c[1].im, c[2].re, c[2].im, a[0],
            a[1], a[2],
        ];
        let mut first = true;
        for v in row {
            if !first {
                buf.push(',');
            }
            buf.push_str(&fmt_f64(v));
            first = false;
        }
        buf.push('\n');
    }
    write_atomically(path, buf.as_bytes())
}

/// Long-format finals table: one `(axis_value, observable, value)` row per
/// selected observable per run.
pub fn write_finals_csv(path: &Path, rows: &[(f64, &str, f64)]) -> Result<()> {
    let mut buf = String::from("axis_value,observable,value\n");
    for (x, name, v) in rows {
        buf.push_str(&fmt_f64(*x));
        buf.push(',');
        buf.push_str(name);
        buf.push(',');
        buf.push_str(&fmt_f64(*v));
        buf.push('\n');
    }
    write_atomically(path, buf.as_bytes())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).context("serializing JSON")?;
    write_atomically(path, text.as_bytes())
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut f = std::fs::File::create(path)
        .with_context(|| format!("creating {}", path.display()))?;
    f.write_all(bytes)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
