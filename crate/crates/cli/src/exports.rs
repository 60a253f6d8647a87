//! Thin file exports over the library: assembled matrices, Berezin fields and
//! Carleson reports.

use std::path::PathBuf;

use bergman_core::berezin::BerezinField;
use bergman_core::carleson::{carleson_classify, ClassifyOptions};
use bergman_core::toeplitz::{assemble_toeplitz, norm_report, to_json_envelope, ToeplitzRequest};
use bergman_core::{MeasureSpec, TruncatedOperator};
use serde_json::{json, Value};

use crate::{write_output, HarnessError, RunConfig};

/// Writes `toeplitz.csv` and `toeplitz.json`; returns the summary.
pub fn assemble(cfg: &RunConfig, mu: &MeasureSpec) -> Result<(Value, Vec<PathBuf>), HarnessError> {
    let req = ToeplitzRequest::new(mu.clone(), cfg.k, cfg.n_trunc).with_quadrature(cfg.quadrature()?);
    let t = assemble_toeplitz(&req)?;
    let report = norm_report(&req)?;
    let csv = write_output(&cfg.out_dir, "toeplitz.csv", &t.to_csv())?;
    let envelope = to_json_envelope(&t, cfg.k, mu);
    let js = write_output(&cfg.out_dir, "toeplitz.json", &pretty(&envelope))?;
    let summary = json!({
        "command": "assemble",
        "N": cfg.n_trunc,
        "k": cfg.k,
        "measure": mu.descriptor(),
        "norm": report,
        "files": [csv.display().to_string(), js.display().to_string()],
    });
    Ok((summary, vec![csv, js]))
}

/// What the Berezin field is taken of.
#[derive(Debug, Clone)]
pub enum FieldSource {
    Measure(MeasureSpec),
    /// The projection `E_k`.
    Projection(usize),
}

/// Writes `berezin_field.csv` on the configured grid.
pub fn berezin_field(cfg: &RunConfig, src: &FieldSource, n: usize) -> Result<(Value, Vec<PathBuf>), HarnessError> {
    let points = cfg.grid()?.points();
    let (field, what) = match src {
        FieldSource::Measure(mu) => (BerezinField::of_measure(mu, n, &points)?, mu.descriptor()),
        FieldSource::Projection(k) => {
            if *k + 1 >= cfg.n_trunc {
                return Err(HarnessError::Config(format!("E_{k} needs --n-trunc > {}", k + 1)));
            }
            let q = TruncatedOperator::projection(*k, cfg.n_trunc);
            (BerezinField::of_operator(&q, n, &points)?, json!({ "operator": format!("E_{k}") }))
        }
    };
    let csv = write_output(&cfg.out_dir, "berezin_field.csv", &field.to_csv())?;
    let summary = json!({
        "command": "berezin-field",
        "n": n,
        "source": what,
        "points": points.len(),
        "sup": field.sup(),
        "files": [csv.display().to_string()],
    });
    Ok((summary, vec![csv]))
}

/// Writes `carleson_report.json`.
pub fn carleson_report(cfg: &RunConfig, mu: &MeasureSpec) -> Result<(Value, Vec<PathBuf>), HarnessError> {
    let opts = ClassifyOptions { grid: cfg.grid()?, k_max: cfg.k, n_trunc: cfg.n_trunc };
    let report = carleson_classify(mu, &opts)?.to_json();
    let path = write_output(&cfg.out_dir, "carleson_report.json", &pretty(&report))?;
    Ok((report, vec![path]))
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
