use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::sim::{Formulation, State};
use crate::symbol::{FluidParams, PressureLaw};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"NSCSNAP1";

/// Writes one snapshot: a fixed header (grid, time, parameters) followed by
/// the raw complex coefficients in `(a, u1, u2, u3)` order, little-endian
/// 64-bit floats, C index order.
pub fn write_snapshot(
    path: &Path,
    t: f64,
    state: &State,
    params: &FluidParams,
) -> Result<()> {
    let gamma = match params.pressure {
        PressureLaw::Gamma { gamma } => gamma,
        PressureLaw::Custom { .. } => {
            return Err(Error::InvalidParameter(
                "snapshot files support only gamma-law pressure".into(),
            ))
        }
    };
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(state.grid().n() as u32).to_le_bytes())?;
    w.write_all(&state.grid().length().to_le_bytes())?;
    w.write_all(&t.to_le_bytes())?;
    for v in [params.mu, params.mu_prime, params.omega, params.eps, gamma] {
        w.write_all(&v.to_le_bytes())?;
    }
    let formulation = match state.formulation {
        Formulation::Velocity => 0u8,
        Formulation::Momentum => 1u8,
    };
    w.write_all(&[formulation])?;
    let stacked = state.stacked();
    for c in 0..4 {
        for v in stacked.comp(c).iter() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

/// Reads a snapshot back; returns `(t, state, params)`.
pub fn read_snapshot(path: &Path) -> Result<(f64, State, FluidParams)> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::MalformedSnapshot("bad magic".into()));
    }
    let mut nbuf = [0u8; 4];
    r.read_exact(&mut nbuf)?;
    let n = u32::from_le_bytes(nbuf) as usize;
    let length = read_f64(&mut r)?;
    let t = read_f64(&mut r)?;
    let mu = read_f64(&mut r)?;
    let mu_prime = read_f64(&mut r)?;
    let omega = read_f64(&mut r)?;
    let eps = read_f64(&mut r)?;
    let gamma = read_f64(&mut r)?;
    let params = FluidParams::new(mu, omega, eps, PressureLaw::gamma_law(gamma)?)?;
    if (params.mu_prime - mu_prime).abs() > 1e-12 {
        return Err(Error::MalformedSnapshot(
            "stored mu' violates the rescaling convention".into(),
        ));
    }
    let mut fbuf = [0u8; 1];
    r.read_exact(&mut fbuf)?;
    let formulation = match fbuf[0] {
        0 => Formulation::Velocity,
        1 => Formulation::Momentum,
        other => {
            return Err(Error::MalformedSnapshot(format!(
                "unknown formulation tag {other}"
            )))
        }
    };
    let grid = TorusGrid::new(n, length)?;
    let mut stacked = SpectralField::zeros(grid, 4);
    for c in 0..4 {
        let mut comp = stacked.comp_mut(c);
        for v in comp.iter_mut() {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            *v = Complex64::new(re, im);
        }
    }
    Ok((t, State::from_stacked(&stacked, formulation)?, params))
}

/// Run manifest: metadata plus the list of snapshot files, serialized as
/// structured text (JSON).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub n: usize,
    pub box_length: f64,
    pub mu: f64,
    pub omega: f64,
    pub eps: f64,
    pub gamma: f64,
    pub dt: f64,
    pub scheme_order: usize,
    pub config_hash: Option<String>,
    pub snapshots: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub t: f64,
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::MalformedSnapshot(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::MalformedSnapshot(e.to_string()))
    }
}
