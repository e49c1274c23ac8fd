use std::path::{Path, PathBuf};

use clap::Args;
use grm_core::export::sha256_file;
use grm_core::{Error, Execution, PageRankConfig, ReduceConfig, Result};
use serde::Serialize;

/// Numerical and runtime options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Damping factor.
    #[arg(long, default_value_t = grm_core::DEFAULT_ALPHA)]
    pub alpha: f64,

    /// L1 tolerance of the PageRank power iteration.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,

    /// Residual tolerance of the complement eigenvector iterations.
    #[arg(long, default_value_t = 1e-12)]
    pub eigen_tol: f64,

    /// Truncation tolerance of the hidden-path series.
    #[arg(long, default_value_t = 1e-12)]
    pub series_tol: f64,

    /// Iteration cap for every iterative method.
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,

    /// Fix every reduction order so repeated runs are bit-identical.
    #[arg(long)]
    pub deterministic: bool,

    /// Worker threads (0 = all cores).
    #[arg(long, env = "GRM_THREADS")]
    pub threads: Option<usize>,
}

impl Common {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("--alpha {} not in (0,1)", self.alpha)));
        }
        for (flag, v) in [
            ("--tol", self.tol),
            ("--eigen-tol", self.eigen_tol),
            ("--series-tol", self.series_tol),
        ] {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidArgument(format!("{flag} must be positive")));
            }
        }
        Ok(())
    }

    pub fn execution(&self) -> Execution {
        Execution {
            parallel: true,
            deterministic: self.deterministic,
        }
    }

    pub fn pagerank(&self) -> PageRankConfig {
        PageRankConfig {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    pub fn reduce(&self) -> ReduceConfig {
        ReduceConfig {
            eigen_tol: self.eigen_tol,
            eigen_max_iter: self.max_iter,
            series_tol: self.series_tol,
            series_max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub pagerank_tol: f64,
    pub eigen_tol: f64,
    pub series_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

/// Everything needed to re-run a command; written into every `meta.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub alpha: f64,
    pub tolerances: Tolerances,
    pub max_iter: usize,
    pub delta: Option<f64>,
    pub top_k: Option<usize>,
    pub deterministic: bool,
    pub threads: Option<usize>,
    pub inputs: Vec<InputFile>,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(command: &str, common: &Common, out: &Path) -> Self {
        RunConfig {
            command: command.to_string(),
            alpha: common.alpha,
            tolerances: Tolerances {
                pagerank_tol: common.tol,
                eigen_tol: common.eigen_tol,
                series_tol: common.series_tol,
            },
            max_iter: common.max_iter,
            delta: None,
            top_k: None,
            deterministic: common.deterministic,
            threads: common.threads,
            inputs: Vec::new(),
            out: out.to_path_buf(),
        }
    }

    /// Records `path` with its checksum and returns the checksum.
    pub fn input(&mut self, path: &Path) -> Result<String> {
        let sha256 = sha256_file(path)?;
        self.inputs.push(InputFile {
            path: path.to_path_buf(),
            sha256: sha256.clone(),
        });
        Ok(sha256)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data serializes")
    }
}
