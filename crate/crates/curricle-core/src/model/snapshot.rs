use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::config::ModelConfig;
use super::error::ModelError;
use super::params::{param_layout, ModelParams};
use crate::numerics::Tensor;

/// Magic bytes opening every parameter snapshot.
pub const SNAPSHOT_MAGIC: &[u8] = b"CURRICLE-SNAP-1\n";

/// Encodes parameters to the snapshot wire format: the magic, the eight
/// config fields as decimal ASCII lines (vocab_size, embed_dim,
/// num_layers, num_heads, ffn_dim, max_len, num_classes, seed), then for
/// every tensor in canonical order a name line, a space-separated shape
/// line, and the raw little-endian 64-bit values.
///
/// Decoding an encoded snapshot is bit-exact.
pub fn encode_snapshot(params: &ModelParams) -> Vec<u8> {
    let config = params.config();
    let mut out = Vec::new();
    out.extend_from_slice(SNAPSHOT_MAGIC);
    for field in [
        config.vocab_size as u64,
        config.embed_dim as u64,
        config.num_layers as u64,
        config.num_heads as u64,
        config.ffn_dim as u64,
        config.max_len as u64,
        config.num_classes as u64,
        config.seed,
    ] {
        out.extend_from_slice(field.to_string().as_bytes());
        out.push(b'\n');
    }
    for (name, tensor) in params.named() {
        out.extend_from_slice(name.as_bytes());
        out.push(b'\n');
        let dims: Vec<String> = tensor.shape().iter().map(|d| d.to_string()).collect();
        out.extend_from_slice(dims.join(" ").as_bytes());
        out.push(b'\n');
        for v in tensor.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn line(&mut self, what: &str) -> Result<&'a str, ModelError> {
        let rest = &self.bytes[self.pos..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| corrupt(format!("truncated while reading {what}")))?;
        let line = core::str::from_utf8(&rest[..end])
            .map_err(|_| corrupt(format!("non-utf8 text while reading {what}")))?;
        self.pos += end + 1;
        Ok(line)
    }

    fn number(&mut self, what: &str) -> Result<u64, ModelError> {
        let line = self.line(what)?;
        line.parse()
            .map_err(|_| corrupt(format!("bad decimal {line:?} for {what}")))
    }

    fn floats(&mut self, count: usize, what: &str) -> Result<Vec<f64>, ModelError> {
        let need = count * 8;
        if self.bytes.len() - self.pos < need {
            return Err(corrupt(format!("truncated tensor data for {what}")));
        }
        let mut data = Vec::with_capacity(count);
        for i in 0..count {
            let start = self.pos + i * 8;
            let mut raw = [0u8; 8];
            raw.copy_from_slice(&self.bytes[start..start + 8]);
            data.push(f64::from_le_bytes(raw));
        }
        self.pos += need;
        Ok(data)
    }

    fn done(&self) -> bool {
        self.pos == self.bytes.len()
    }
}

fn corrupt(reason: String) -> ModelError {
    ModelError::SnapshotCorrupt { reason }
}

/// Decodes a snapshot, reconstructing its config from the header.
pub fn decode_snapshot(bytes: &[u8]) -> Result<ModelParams, ModelError> {
    if bytes.len() < SNAPSHOT_MAGIC.len() || &bytes[..SNAPSHOT_MAGIC.len()] != SNAPSHOT_MAGIC {
        return Err(corrupt("missing snapshot magic".to_string()));
    }
    let mut reader = Reader {
        bytes,
        pos: SNAPSHOT_MAGIC.len(),
    };
    let config = ModelConfig {
        vocab_size: reader.number("vocab_size")? as usize,
        embed_dim: reader.number("embed_dim")? as usize,
        num_layers: reader.number("num_layers")? as usize,
        num_heads: reader.number("num_heads")? as usize,
        ffn_dim: reader.number("ffn_dim")? as usize,
        max_len: reader.number("max_len")? as usize,
        num_classes: reader.number("num_classes")? as usize,
        seed: reader.number("seed")?,
    };
    config
        .validate()
        .map_err(|e| corrupt(format!("header does not describe a valid config: {e}")))?;

    let (specs, _) = param_layout(&config);
    let mut tensors = Vec::with_capacity(specs.len());
    for spec in &specs {
        let name = reader.line("tensor name")?;
        if name != spec.name {
            return Err(corrupt(format!(
                "expected tensor {:?}, found {:?}",
                spec.name, name
            )));
        }
        let shape_line = reader.line("tensor shape")?;
        let dims: Result<Vec<usize>, _> = shape_line.split(' ').map(str::parse).collect();
        let dims = dims.map_err(|_| corrupt(format!("bad shape line {shape_line:?}")))?;
        if dims != spec.shape {
            return Err(corrupt(format!(
                "tensor {} has shape {:?}, expected {:?}",
                spec.name, dims, spec.shape
            )));
        }
        let numel: usize = dims.iter().product();
        let data = reader.floats(numel, &spec.name)?;
        let tensor = Tensor::new(dims, data)
            .map_err(|e| corrupt(format!("tensor {}: {e}", spec.name)))?;
        tensors.push(tensor);
    }
    if !reader.done() {
        return Err(corrupt("trailing bytes after last tensor".to_string()));
    }
    ModelParams::from_tensors(config, tensors)
}

/// Decodes a snapshot and additionally requires its header to match
/// `expect` exactly.
pub fn decode_snapshot_expecting(
    bytes: &[u8],
    expect: &ModelConfig,
) -> Result<ModelParams, ModelError> {
    let params = decode_snapshot(bytes)?;
    if params.config() != expect {
        return Err(ModelError::SnapshotConfigMismatch {
            reason: format!(
                "snapshot was written for {:?}, expected {:?}",
                params.config(),
                expect
            ),
        });
    }
    Ok(params)
}
