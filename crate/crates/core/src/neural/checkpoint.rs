//! Binary model checkpoints.
//!
//! Layout: the magic bytes `EIN1`, a little-endian `u32` header length, a
//! UTF-8 JSON header, then every tensor as little-endian `f32` in header
//! order. Offsets and lengths in the header count `f32` values from the
//! start of the payload.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::EinConfig;
use super::model::{EinModel, Vocabulary};
use super::params::{EinParams, TENSOR_NAMES};
use super::tensor::Matrix;
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"EIN1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub name: String,
    pub shape: [usize; 2],
    pub offset: usize,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub config: EinConfig,
    pub classes: Vec<String>,
    pub vocabulary: Vocabulary,
    pub emotion_dim: usize,
    pub tensors: Vec<TensorEntry>,
}

/// Serialises `model`. Parameters are rounded to `f32`.
pub fn write_checkpoint(model: &EinModel, mut w: impl Write) -> Result<()> {
    let mut tensors = Vec::new();
    let mut offset = 0;
    for (name, m) in model.params().tensors() {
        tensors.push(TensorEntry {
            name: name.to_string(),
            shape: [m.rows(), m.cols()],
            offset,
            len: m.len(),
        });
        offset += m.len();
    }
    let header = Header {
        config: model.config().clone(),
        classes: model.classes().to_vec(),
        vocabulary: model.vocabulary().clone(),
        emotion_dim: model.emotion_dim(),
        tensors,
    };
    let json = serde_json::to_vec(&header)?;
    let len =
        u32::try_from(json.len()).map_err(|_| Error::Data("checkpoint header too large".into()))?;
    let mut buf = Vec::with_capacity(8 + json.len() + 4 * offset);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&len.to_le_bytes());
    buf.extend_from_slice(&json);
    for (_, m) in model.params().tensors() {
        for &v in m.as_slice() {
            buf.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    w.write_all(&buf)
        .map_err(|e| Error::io("<checkpoint>", e))?;
    Ok(())
}

pub fn read_checkpoint(mut r: impl Read) -> Result<EinModel> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)
        .map_err(|e| Error::io("<checkpoint>", e))?;
    let corrupt = |m: &str| Error::Data(format!("invalid checkpoint: {m}"));
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(corrupt("missing EIN1 magic"));
    }
    let header_len = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let header_end = 8usize
        .checked_add(header_len)
        .filter(|&e| e <= bytes.len())
        .ok_or_else(|| corrupt("truncated header"))?;
    let header: Header = serde_json::from_slice(&bytes[8..header_end])?;
    let payload = &bytes[header_end..];
    if payload.len() % 4 != 0 {
        return Err(corrupt("payload is not a whole number of f32 values"));
    }
    let values: Vec<f32> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();

    if header.tensors.len() != TENSOR_NAMES.len() {
        return Err(corrupt("wrong number of tensors"));
    }
    let mut mats = Vec::with_capacity(TENSOR_NAMES.len());
    for (entry, expected) in header.tensors.iter().zip(TENSOR_NAMES) {
        if entry.name != expected {
            return Err(corrupt(&format!(
                "expected tensor {expected}, found {}",
                entry.name
            )));
        }
        let [rows, cols] = entry.shape;
        let end = entry
            .offset
            .checked_add(entry.len)
            .filter(|&e| e <= values.len());
        if rows * cols != entry.len || end.is_none() {
            return Err(corrupt(&format!("tensor {} is out of bounds", entry.name)));
        }
        let data = values[entry.offset..entry.offset + entry.len]
            .iter()
            .map(|&v| v as f64)
            .collect();
        mats.push(Matrix::from_vec(rows, cols, data));
    }
    let mut it = mats.into_iter();
    let mut next = || it.next().unwrap();
    let params = EinParams {
        embedding: next(),
        lstm_wx: next(),
        lstm_wh: next(),
        lstm_b: next(),
        attn_w: next(),
        attn_b: next(),
        dense_a_w: next(),
        dense_a_b: next(),
        dense_b_w: next(),
        dense_b_b: next(),
        out_w: next(),
        out_b: next(),
    };
    EinModel::from_parts(
        header.config,
        header.classes,
        header.vocabulary,
        header.emotion_dim,
        params,
    )
}

pub fn save_checkpoint(model: &EinModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_checkpoint(model, &mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<EinModel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> EinModel {
        let cfg = EinConfig {
            embedding_dim: 3,
            lstm_units: 2,
            dense_a_units: 2,
            dense_b_units: 3,
            seed: 9,
            ..EinConfig::default()
        };
        let vocab = Vocabulary::from_words(vec!["x".into(), "y".into()]);
        EinModel::new(
            cfg,
            &["a".to_string(), "b".to_string(), "c".to_string()],
            vocab,
            5,
            None,
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact_against_the_quantized_model() {
        let m = model();
        let mut buf = Vec::new();
        write_checkpoint(&m, &mut buf).unwrap();
        assert_eq!(&buf[..4], MAGIC);
        let back = read_checkpoint(&buf[..]).unwrap();
        let q = m.quantized();
        assert_eq!(back, q);
        let emo = [0.1, 0.2, 0.0, 0.0, 0.3];
        let a = q.predict_proba(&[1, 2, 0], &emo).unwrap();
        let b = back.predict_proba(&[1, 2, 0], &emo).unwrap();
        assert_eq!(
            a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_checkpoint(&b"NOPE...."[..]).is_err());
        let mut buf = Vec::new();
        write_checkpoint(&model(), &mut buf).unwrap();
        buf.truncate(buf.len() - 4);
        assert!(read_checkpoint(&buf[..]).is_err());
    }
}
