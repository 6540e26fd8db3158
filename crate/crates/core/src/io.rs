//! Snapshot binary format and CSV writers.
//!
//! Snapshots are self-describing: a fixed header (magic "EVPKV1", grid
//! size M, mode order N, time, variant flags, parameter block) followed
//! by 5 M^2 little-endian f64 physical samples in the order u1, u2, s11,
//! s12, s22, each row-major. Reading back what was written is bitwise
//! exact.

use crate::config::Config;
use crate::diagnostics::DiagnosticsRecord;
use crate::dynamics::State;
use crate::spectral::{SymTensorField, TorusGrid, VectorField};
use crate::{Error, Result};
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 6] = b"EVPKV1";
const PARAM_COUNT: usize = 14;

/// Header of a snapshot file.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotHeader {
    pub m: u32,
    pub n: u32,
    pub t: f64,
    pub advection: bool,
    pub voigt_biharmonic: bool,
    /// P, E, c_a, c_w, rho_a, rho_w, phi, theta, Omega, g, alpha, beta,
    /// delta, epsilon.
    pub params: [f64; PARAM_COUNT],
}

/// In-memory form of a snapshot file: header plus the five physical
/// sample planes.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub fields: [Vec<f64>; 5],
}

impl Snapshot {
    pub fn from_state(state: &State, config: &Config) -> Result<Self> {
        let grid = state.u.grid();
        let p = &config.physical;
        let r = &config.reg;
        let [u1, u2] = state.u.to_physical()?;
        let [s11, s12, s22] = state.sigma.to_physical()?;
        Ok(Self {
            header: SnapshotHeader {
                m: grid.points() as u32,
                n: grid.modes() as u32,
                t: state.t,
                advection: config.variant.advection,
                voigt_biharmonic: config.variant.voigt_biharmonic,
                params: [
                    p.p, p.e, p.c_a, p.c_w, p.rho_a, p.rho_w, p.phi, p.theta, p.omega_rot,
                    p.g, r.alpha, r.beta, r.delta, r.epsilon,
                ],
            },
            fields: [u1, u2, s11, s12, s22],
        })
    }

    pub fn to_state(&self) -> Result<State> {
        let grid = TorusGrid::new(self.header.n as usize, self.header.m as usize)?;
        let u = VectorField::from_physical(grid, &[self.fields[0].clone(), self.fields[1].clone()])?;
        let sigma = SymTensorField::from_physical(
            grid,
            &[
                self.fields[2].clone(),
                self.fields[3].clone(),
                self.fields[4].clone(),
            ],
        )?;
        Ok(State {
            u,
            sigma,
            t: self.header.t,
        })
    }
}

pub fn write_snapshot(path: impl AsRef<Path>, snap: &Snapshot) -> Result<()> {
    let m2 = (snap.header.m as usize) * (snap.header.m as usize);
    for f in &snap.fields {
        if f.len() != m2 {
            return Err(Error::Snapshot(format!(
                "field plane has {} samples, expected {m2}",
                f.len()
            )));
        }
    }
    let mut buf = Vec::with_capacity(6 + 8 + 8 + 2 + 8 * PARAM_COUNT + 8 * 5 * m2);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&snap.header.m.to_le_bytes());
    buf.extend_from_slice(&snap.header.n.to_le_bytes());
    buf.extend_from_slice(&snap.header.t.to_le_bytes());
    buf.push(snap.header.advection as u8);
    buf.push(snap.header.voigt_biharmonic as u8);
    for v in &snap.header.params {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for plane in &snap.fields {
        for v in plane {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut pos = 0usize;
    let take = |pos: &mut usize, len: usize| -> Result<&[u8]> {
        if *pos + len > bytes.len() {
            return Err(Error::Snapshot("truncated snapshot file".into()));
        }
        let s = &bytes[*pos..*pos + len];
        *pos += len;
        Ok(s)
    };
    if take(&mut pos, 6)? != MAGIC {
        return Err(Error::Snapshot("bad magic, not a snapshot file".into()));
    }
    let m = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap());
    let n = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap());
    let t = f64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());
    let advection = take(&mut pos, 1)?[0] != 0;
    let voigt_biharmonic = take(&mut pos, 1)?[0] != 0;
    let mut params = [0.0; PARAM_COUNT];
    for v in &mut params {
        *v = f64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());
    }
    let m2 = m as usize * m as usize;
    let mut fields: [Vec<f64>; 5] = std::array::from_fn(|_| Vec::with_capacity(m2));
    for plane in &mut fields {
        for _ in 0..m2 {
            plane.push(f64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap()));
        }
    }
    if pos != bytes.len() {
        return Err(Error::Snapshot(format!(
            "{} trailing bytes after payload",
            bytes.len() - pos
        )));
    }
    Ok(Snapshot {
        header: SnapshotHeader {
            m,
            n,
            t,
            advection,
            voigt_biharmonic,
            params,
        },
        fields,
    })
}

/// Write the diagnostics series as CSV with the documented column order.
pub fn write_diagnostics_csv(path: impl AsRef<Path>, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut out = String::new();
    out.push_str(DiagnosticsRecord::CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
