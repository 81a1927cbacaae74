//! Output-directory plumbing shared by every subcommand.
//!
//! All files land under one directory (created on demand). CSV files
//! start with a comment line carrying the config hash and the numeric
//! settings of the run, so any result file identifies the system and
//! tolerances that produced it.

use crate::fail::Failure;
use quasihopf::ode::StepControl;
use quasihopf::report::{fmt_sig, CsvTable, SvgPlot};
use std::fs;
use std::path::{Path, PathBuf};

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(path: &Path) -> Result<OutDir, Failure> {
        fs::create_dir_all(path)
            .map_err(|e| Failure::runtime(format!("cannot create {}: {e}", path.display())))?;
        Ok(OutDir { root: path.to_path_buf() })
    }

    pub fn write_csv(&self, name: &str, table: &CsvTable) -> Result<PathBuf, Failure> {
        self.write_raw(name, &table.render())
    }

    pub fn write_svg(&self, name: &str, plot: &SvgPlot) -> Result<PathBuf, Failure> {
        self.write_raw(name, &plot.render())
    }

    fn write_raw(&self, name: &str, text: &str) -> Result<PathBuf, Failure> {
        let path = self.root.join(name);
        fs::write(&path, text)
            .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        Ok(path)
    }
}

/// Comment line for CSV outputs: config identity, solver tolerances,
/// then per-command key=value settings.
pub fn meta_line(config: &str, hash: u64, ctl: StepControl, extra: &[(&str, String)]) -> String {
    let mut line = format!(
        "config={config} hash={hash:016x} atol={} rtol={}",
        fmt_sig(ctl.atol, 3),
        fmt_sig(ctl.rtol, 3)
    );
    for (key, value) in extra {
        line.push_str(&format!(" {key}={value}"));
    }
    line
}
