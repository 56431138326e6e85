//! File formats: graph JSON, device JSON, atomic writes.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encoding::DeviceParams;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::{ComplexMatrix, C64};

pub const FORMAT_VERSION: u32 = 1;

/// Write via a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn check_version(found: u32, what: &str) -> Result<()> {
    if found != FORMAT_VERSION {
        return Err(Error::Config(format!("{what}: unsupported format_version {found}")));
    }
    Ok(())
}

/// `{"format_version", "n", "entries": [[i, j, re, im], ...]}`, upper triangle.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub format_version: u32,
    pub n: usize,
    pub entries: Vec<(usize, usize, f64, f64)>,
}

impl GraphFile {
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.n();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i..n {
                let w = g.weight(i, j);
                if w.re != 0.0 || w.im != 0.0 {
                    entries.push((i, j, w.re, w.im));
                }
            }
        }
        Self { format_version: FORMAT_VERSION, n, entries }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        check_version(self.format_version, "graph")?;
        let n = self.n;
        let mut adj = ComplexMatrix::zeros(n, n);
        let mut seen = std::collections::HashSet::new();
        for &(i, j, re, im) in &self.entries {
            if i > j || j >= n {
                return Err(Error::Config(format!(
                    "graph entry ({i}, {j}) must satisfy i <= j < n = {n}"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::Config(format!("graph entry ({i}, {j}) listed twice")));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::NonFinite);
            }
            adj[(i, j)] = C64::new(re, im);
            adj[(j, i)] = C64::new(re, im);
        }
        Graph::new(adj)
    }
}

pub fn save_graph(g: &Graph, path: &Path) -> Result<()> {
    write_json(path, &GraphFile::from_graph(g))
}

pub fn load_graph(path: &Path) -> Result<Graph> {
    read_json::<GraphFile>(path)?.to_graph()
}

/// Device parameters; the interferometer as separate real/imaginary rows.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DeviceFile {
    pub format_version: u32,
    pub modes: usize,
    pub scale: f64,
    pub squeezing: Vec<f64>,
    pub interferometer_re: Vec<Vec<f64>>,
    pub interferometer_im: Vec<Vec<f64>>,
}

impl DeviceFile {
    pub fn from_params(d: &DeviceParams) -> Self {
        let m = d.modes();
        let u = &d.interferometer;
        Self {
            format_version: FORMAT_VERSION,
            modes: m,
            scale: d.scale,
            squeezing: d.squeezing.clone(),
            interferometer_re: (0..m).map(|i| (0..m).map(|j| u[(i, j)].re).collect()).collect(),
            interferometer_im: (0..m).map(|i| (0..m).map(|j| u[(i, j)].im).collect()).collect(),
        }
    }

    pub fn to_params(&self) -> Result<DeviceParams> {
        check_version(self.format_version, "device")?;
        let m = self.modes;
        let rows_ok = |rows: &Vec<Vec<f64>>| rows.len() == m && rows.iter().all(|r| r.len() == m);
        if self.squeezing.len() != m || !rows_ok(&self.interferometer_re) || !rows_ok(&self.interferometer_im) {
            return Err(Error::Config(format!("device: arrays do not match modes = {m}")));
        }
        let data = (0..m * m)
            .map(|k| C64::new(self.interferometer_re[k / m][k % m], self.interferometer_im[k / m][k % m]))
            .collect();
        Ok(DeviceParams {
            squeezing: self.squeezing.clone(),
            interferometer: ComplexMatrix::new(m, m, data)?,
            scale: self.scale,
        })
    }
}

pub fn save_device(d: &DeviceParams, path: &Path) -> Result<()> {
    write_json(path, &DeviceFile::from_params(d))
}

pub fn load_device(path: &Path) -> Result<DeviceParams> {
    read_json::<DeviceFile>(path)?.to_params()
}
