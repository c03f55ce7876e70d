//! Binary parameter files.
//!
//! Layout, all little-endian: magic `MBRL`, version `u32`, `input_dim`,
//! `action_dim`, hidden layer count and widths as `u32`; then `f64` tensors
//! in declaration order (policy layers as weight then bias, value layers
//! likewise), the log-std vector, and finally the normalizer count, mean
//! and variance.

use std::io::{Read, Write};
use std::path::Path;

use super::{MlpSpec, PolicyParams, RunningNorm, Weights};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"MBRL";
pub const FORMAT_VERSION: u32 = 1;

fn put_u32(out: &mut Vec<u8>, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Format(format!("dimension {v} exceeds u32")))?;
    out.extend_from_slice(&v.to_le_bytes());
    Ok(())
}

fn put_f64s(out: &mut Vec<u8>, values: &[f64]) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn write_params<W: Write>(params: &PolicyParams, mut writer: W) -> Result<()> {
    let spec = &params.spec;
    let mut out = Vec::with_capacity(16 + 8 * params.weights.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    put_u32(&mut out, spec.input_dim)?;
    put_u32(&mut out, spec.action_dim)?;
    put_u32(&mut out, spec.hidden.len())?;
    for &h in &spec.hidden {
        put_u32(&mut out, h)?;
    }
    for t in params.weights.tensors() {
        put_f64s(&mut out, t);
    }
    out.extend_from_slice(&params.obs_norm.count.to_le_bytes());
    put_f64s(&mut out, &params.obs_norm.mean);
    put_f64s(&mut out, &params.obs_norm.var);
    writer
        .write_all(&out)
        .map_err(|e| Error::Format(format!("write failed: {e}")))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Format(format!("truncated at byte {}", self.pos)))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn dim(&mut self) -> Result<usize> {
        let v = self.u32()? as usize;
        if v == 0 || v > 1 << 20 {
            return Err(Error::Format(format!("implausible dimension {v}")));
        }
        Ok(v)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn fill(&mut self, dst: &mut [f64]) -> Result<()> {
        for v in dst {
            *v = self.f64()?;
        }
        Ok(())
    }
}

pub fn read_params<R: Read>(mut reader: R) -> Result<PolicyParams> {
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| Error::Format(format!("read failed: {e}")))?;
    let mut cur = Cursor { bytes: &bytes, pos: 0 };
    if cur.take(4)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = cur.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let input_dim = cur.dim()?;
    let action_dim = cur.dim()?;
    let layers = cur.u32()? as usize;
    if layers > 64 {
        return Err(Error::Format(format!("implausible hidden layer count {layers}")));
    }
    let hidden = (0..layers).map(|_| cur.dim()).collect::<Result<Vec<_>>>()?;
    let spec = MlpSpec {
        input_dim,
        hidden,
        action_dim,
    };
    let mut weights = Weights::zeros(&spec);
    for t in weights.tensors_mut() {
        cur.fill(t)?;
    }
    let mut obs_norm = RunningNorm::new(input_dim);
    obs_norm.count = cur.f64()?;
    cur.fill(&mut obs_norm.mean)?;
    cur.fill(&mut obs_norm.var)?;
    if cur.pos != bytes.len() {
        return Err(Error::Format(format!(
            "{} trailing bytes",
            bytes.len() - cur.pos
        )));
    }
    Ok(PolicyParams {
        spec,
        weights,
        obs_norm,
    })
}

pub fn save_params(params: &PolicyParams, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_params(params, std::io::BufWriter::new(file))
}

pub fn load_params(path: impl AsRef<Path>) -> Result<PolicyParams> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_params(std::io::BufReader::new(file))
}
