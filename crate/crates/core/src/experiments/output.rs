use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use super::ExperimentConfig;
use crate::lindblad;
use crate::system;

/// Result grid: axis columns first, then observables.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// CSV text with every value in shortest round-trip scientific notation.
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn write_csv(path: &Path, table: &Table) -> io::Result<()> {
    std::fs::write(path, table.to_csv())
}

/// `out.csv` ↦ `out.meta`.
pub fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta")
}

pub(super) fn write_meta(path: &Path, config: &ExperimentConfig, table: &Table, threads: Option<usize>) -> io::Result<()> {
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("software", format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")));
    kv("experiment", config.experiment.name().into());
    kv("created_unix", stamp.to_string());
    kv("rows", table.rows.len().to_string());
    kv("columns", table.columns.join(","));
    kv("threads", threads.map_or("auto".into(), |t| t.to_string()));
    kv("max_hilbert_dim", system::max_hilbert_dim().to_string());
    kv("kernel_rel_tol", format!("{:e}", lindblad::KERNEL_REL_TOL));
    kv("max_mode_condition", format!("{:e}", lindblad::MAX_MODE_CONDITION));
    kv("limit_residual", format!("{:e}", lindblad::LIMIT_RESIDUAL));
    kv("g2_window", format!("{:e}", crate::perturbative::G2_WINDOW));
    let first = config.axes.len();
    for (k, name) in table.columns.iter().enumerate().skip(first) {
        let undefined = table.rows.iter().filter(|r| r[k].is_nan()).count();
        kv(&format!("undefined.{name}"), undefined.to_string());
    }
    for flag in ["persistent", "stationary"] {
        if let Some(col) = table.column(flag) {
            kv(&format!("flag.{flag}"), format!("{} of {}", col.iter().filter(|&&x| x == 1.0).count(), col.len()));
        }
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(s.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_keeps_full_precision() {
        let t = Table { columns: vec!["a".into(), "b".into()], rows: vec![vec![0.1 + 0.2, f64::NAN]] };
        let csv = t.to_csv();
        assert_eq!(csv, "a,b\n3.0000000000000004e-1,NaN\n");
        let back: f64 = csv.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert_eq!(back, 0.1 + 0.2);
        assert_eq!(meta_path(Path::new("out/x.csv")), PathBuf::from("out/x.meta"));
    }
}
