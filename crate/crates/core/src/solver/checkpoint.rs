use std::io::{Read, Write};

use super::{Grid, SpectralState};
use crate::error::{Error, Result};
use crate::kernel::{PhysicalParams, C64};

pub const CHECKPOINT_MAGIC: &[u8; 5] = b"AMHD1";

/// A state together with the parameters it was evolved under.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub state: SpectralState,
    pub params: PhysicalParams,
}

/// Layout, all little-endian: magic, `n1 n2 n3` as u64, `L1 L2 L3 μ η time`
/// as f64, then `u₁ u₂ u₃ b₁ b₂ b₃` in storage order as interleaved
/// `re, im` f64 pairs.
pub fn write_checkpoint<W: Write>(mut w: W, s: &SpectralState, params: &PhysicalParams) -> Result<()> {
    w.write_all(CHECKPOINT_MAGIC)?;
    for n in s.grid.n {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    for x in s.grid.lengths.iter().chain(&[params.mu, params.eta, s.time]) {
        w.write_all(&x.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(16 * s.grid.len());
    for c in s.components() {
        buf.clear();
        for z in c {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Checkpoint> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let mut n = [0usize; 3];
    for v in &mut n {
        *v = usize::try_from(read_u64(&mut r)?).map_err(|_| Error::Format("grid size overflows".into()))?;
    }
    let mut lengths = [0.0; 3];
    for v in &mut lengths {
        *v = read_f64(&mut r)?;
    }
    let grid = Grid::new(n, lengths).map_err(|e| Error::Format(e.to_string()))?;
    let params = PhysicalParams::new(read_f64(&mut r)?, read_f64(&mut r)?)
        .map_err(|e| Error::Format(e.to_string()))?;
    let mut state = SpectralState::zeros(grid);
    state.time = read_f64(&mut r)?;
    let mut buf = vec![0u8; 16 * grid.len()];
    for c in state.components_mut() {
        r.read_exact(&mut buf)?;
        for (z, chunk) in c.iter_mut().zip(buf.chunks_exact(16)) {
            let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
            let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
            *z = C64::new(re, im);
        }
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes after coefficient arrays".into()));
    }
    Ok(Checkpoint { state, params })
}
