use std::fs;
use std::path::{Path, PathBuf};

use branchpoint::deformation::PerturbParams;
use branchpoint::knot::{BraidDiagram, KnotCurve};
use branchpoint::{CPoly, WeierstrassData};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Input schema: derivative coefficients, lowest degree first, as `[re, im]` pairs.
#[derive(Debug, Deserialize, Serialize)]
pub struct InputFile {
    pub fprime: [Vec<Complex64>; 4],
    #[serde(default = "default_conf_tol")]
    pub conf_tol: f64,
}

fn default_conf_tol() -> f64 {
    1e-12
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load_input(path: &Path) -> Result<WeierstrassData<f64>, CliError> {
    let file: InputFile = serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let fprime = file.fprime.map(CPoly::new);
    Ok(WeierstrassData::load(fprime, file.conf_tol)?)
}

pub fn load_params(path: &Path) -> Result<PerturbParams<f64>, CliError> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn to_json<S: Serialize>(value: &S) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// One row per sample: `theta, x1, x2, x3, x4, z_re, z_im`.
pub fn knot_csv(k: &KnotCurve<f64>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["theta", "x1", "x2", "x3", "x4", "z_re", "z_im"])
        .map_err(io)?;
    for l in &k.loops {
        for ((q, z), th) in l.points.iter().zip(&l.preimages).zip(&l.theta) {
            let row = [*th, q[0], q[1], q[2], q[3], z.re, z.im].map(|x| x.to_string());
            w.write_record(&row).map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Braid as a crossing list, without the sampled strand positions.
#[derive(Serialize)]
pub struct BraidJson<'a> {
    pub strands: usize,
    pub samples_per_strand: usize,
    pub crossings: &'a [branchpoint::knot::Crossing<f64>],
}

pub fn braid_json(b: &BraidDiagram<f64>) -> String {
    to_json(&BraidJson {
        strands: b.strand_count(),
        samples_per_strand: b.strands.first().map_or(0, Vec::len),
        crossings: &b.crossings,
    })
}
