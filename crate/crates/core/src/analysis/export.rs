use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::corpus::Corpus;
use crate::features::EmotionFeaturizer;
use crate::lexicon::Lexicon;
use crate::neural::EinModel;
use crate::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    Error::Data(format!("CSV: {e}"))
}

/// One row per document: `id,label,d0..d{b-1}` holding the last hidden
/// dense activations at `f32` precision.
pub fn write_penultimate(
    model: &EinModel,
    corpus: &Corpus,
    lexicons: &[Lexicon],
    writer: impl Write,
) -> Result<()> {
    let featurizer = EmotionFeaturizer::new(lexicons);
    let width = model.config().dense_b_units;
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["id".to_string(), "label".to_string()];
    header.extend((0..width).map(|i| format!("d{i}")));
    w.write_record(&header).map_err(csv_err)?;
    for doc in &corpus.documents {
        let ids = model.encode_tokens(&doc.tokens);
        let v = model.penultimate(&ids, &featurizer.values(&doc.tokens))?;
        let mut row = vec![doc.id.clone(), doc.label.clone()];
        row.extend(v.iter().map(|&x| (x as f32).to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<penultimate>", e))
}

pub fn export_penultimate(
    model: &EinModel,
    corpus: &Corpus,
    lexicons: &[Lexicon],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_penultimate(model, corpus, lexicons, file).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Rows of an `id,label,values...` CSV as written by [`write_penultimate`].
pub type EmbeddingRows = Vec<(String, String, Vec<f64>)>;

pub fn read_embedding_csv(reader: impl Read) -> Result<EmbeddingRows> {
    let mut r = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let bad = |m: String| Error::Record {
            record: i + 1,
            message: m,
        };
        if rec.len() < 2 {
            return Err(bad("expected id and label columns".into()));
        }
        let values = rec
            .iter()
            .skip(2)
            .map(|s| s.parse::<f64>().map_err(|e| bad(format!("'{s}': {e}"))))
            .collect::<Result<Vec<_>>>()?;
        out.push((rec[0].to_string(), rec[1].to_string(), values));
    }
    Ok(out)
}

/// `id,label,x,y` rows for a 2-d projection.
pub fn write_projection_csv(
    ids: &[String],
    labels: &[String],
    coords: &[Vec<f64>],
    writer: impl Write,
) -> Result<()> {
    if ids.len() != labels.len() || ids.len() != coords.len() {
        return Err(Error::Validation(
            "ids, labels and coordinates differ in length".into(),
        ));
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["id", "label", "x", "y"]).map_err(csv_err)?;
    for ((id, label), c) in ids.iter().zip(labels).zip(coords) {
        let x = c.first().copied().unwrap_or(0.0);
        let y = c.get(1).copied().unwrap_or(0.0);
        w.write_record([id.as_str(), label.as_str(), &x.to_string(), &y.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<projection>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Source};
    use crate::neural::{EinConfig, Vocabulary};

    #[test]
    fn penultimate_round_trip() {
        let cfg = EinConfig {
            embedding_dim: 3,
            lstm_units: 2,
            dense_a_units: 0,
            dense_b_units: 4,
            ..EinConfig::default()
        };
        let docs = vec![
            Document::new("d1", "quick brown fox", "a", Source::Other),
            Document::new("d2", "lazy dog", "b", Source::Other),
        ];
        let corpus = Corpus::new(docs);
        let vocab = Vocabulary::build(&corpus, true, None);
        let model = EinModel::new(cfg, &corpus.label_list(), vocab, 0, None).unwrap();
        let mut buf = Vec::new();
        write_penultimate(&model, &corpus, &[], &mut buf).unwrap();
        let rows = read_embedding_csv(&buf[..]).unwrap();
        assert_eq!(rows.len(), 2);
        for ((id, label, v), doc) in rows.iter().zip(&corpus.documents) {
            assert_eq!((id, label), (&doc.id, &doc.label));
            assert_eq!(v.len(), 4);
            let exact = model
                .penultimate(&model.encode_tokens(&doc.tokens), &[])
                .unwrap();
            for (a, b) in v.iter().zip(&exact) {
                assert_eq!(*a as f32, *b as f32);
            }
        }
    }

    #[test]
    fn projection_csv() {
        let mut buf = Vec::new();
        write_projection_csv(&["1".into()], &["x".into()], &[vec![0.5, -1.0]], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "id,label,x,y\n1,x,0.5,-1\n"
        );
    }
}
