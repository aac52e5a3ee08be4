use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use crate::corpus::Document;
use crate::{Error, Result};

/// Word vectors of a shared dimension, plus a designated OOV vector (zeros
/// unless set).
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f64>,
    oov: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(dimension: usize) -> Self {
        EmbeddingTable {
            dimension,
            words: Vec::new(),
            index: HashMap::new(),
            vectors: Vec::new(),
            oov: vec![0.0; dimension],
        }
    }

    /// Adds or replaces the vector of `word`.
    pub fn insert(&mut self, word: &str, vector: &[f64]) -> Result<()> {
        if vector.len() != self.dimension {
            return Err(Error::Validation(format!(
                "vector for '{word}' has dimension {}, table has {}",
                vector.len(),
                self.dimension
            )));
        }
        match self.index.get(word) {
            Some(&i) => {
                self.vectors[i * self.dimension..(i + 1) * self.dimension].copy_from_slice(vector)
            }
            None => {
                self.index.insert(word.to_string(), self.words.len());
                self.words.push(word.to_string());
                self.vectors.extend_from_slice(vector);
            }
        }
        Ok(())
    }

    pub fn set_oov(&mut self, vector: &[f64]) -> Result<()> {
        if vector.len() != self.dimension {
            return Err(Error::Validation(
                "OOV vector has the wrong dimension".into(),
            ));
        }
        self.oov = vector.to_vec();
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&i| &self.vectors[i * self.dimension..(i + 1) * self.dimension])
    }

    pub fn oov(&self) -> &[f64] {
        &self.oov
    }

    /// Parses the text format: a `<vocab_size> <dimension>` header, then one
    /// `word v1 .. vd` line per entry.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: origin.to_string(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| err(1, "missing header".into()))?;
        let mut fields = header.split_whitespace();
        let (vocab, dim) = match (fields.next(), fields.next(), fields.next()) {
            (Some(v), Some(d), None) => (
                v.parse::<usize>()
                    .map_err(|e| err(1, format!("bad vocab size: {e}")))?,
                d.parse::<usize>()
                    .map_err(|e| err(1, format!("bad dimension: {e}")))?,
            ),
            _ => return Err(err(1, "header must be '<vocab_size> <dimension>'".into())),
        };
        if dim == 0 {
            return Err(err(1, "dimension must be at least 1".into()));
        }
        let mut table = EmbeddingTable::new(dim);
        let mut row = Vec::with_capacity(dim);
        for (i, line) in lines {
            let mut parts = line.split_whitespace();
            let word = parts.next().expect("non-blank line has a field");
            row.clear();
            for p in parts {
                row.push(
                    p.parse::<f64>()
                        .map_err(|e| err(i + 1, format!("bad number '{p}': {e}")))?,
                );
            }
            if row.len() != dim {
                return Err(err(
                    i + 1,
                    format!("expected {dim} values, found {}", row.len()),
                ));
            }
            table.insert(word, &row)?;
        }
        if table.len() != vocab {
            return Err(err(
                1,
                format!("header declares {vocab} words, found {}", table.len()),
            ));
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn write(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.len(), self.dimension)?;
        for (i, word) in self.words.iter().enumerate() {
            write!(w, "{word}")?;
            for v in &self.vectors[i * self.dimension..(i + 1) * self.dimension] {
                write!(w, " {v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Fraction of tokens covered by the table.
    pub fn coverage<'a>(&self, tokens: impl IntoIterator<Item = &'a String>) -> f64 {
        let (mut hit, mut total) = (0usize, 0usize);
        for t in tokens {
            total += 1;
            hit += self.index.contains_key(t.as_str()) as usize;
        }
        if total == 0 {
            0.0
        } else {
            hit as f64 / total as f64
        }
    }
}

/// Mean of the document's token vectors. With `skip_oov` unknown tokens are
/// ignored; otherwise they contribute the table's OOV vector. No contributing
/// token gives the zero vector.
pub fn avg_embedding(doc: &Document, table: &EmbeddingTable, skip_oov: bool) -> Vec<f64> {
    let mut sum = vec![0.0; table.dimension()];
    let mut count = 0usize;
    for t in &doc.tokens {
        let v = match table.get(t) {
            Some(v) => v,
            None if skip_oov => continue,
            None => table.oov(),
        };
        for (s, x) in sum.iter_mut().zip(v) {
            *s += x;
        }
        count += 1;
    }
    if count > 0 {
        for s in &mut sum {
            *s /= count as f64;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Source;

    fn table() -> EmbeddingTable {
        EmbeddingTable::parse("2 2\nw1 1 0\nw2 0 1\n", "t").unwrap()
    }

    fn doc(text: &str) -> Document {
        Document::new("d", text, "x", Source::Other)
    }

    #[test]
    fn mean_of_vectors() {
        assert_eq!(avg_embedding(&doc("w1 w2"), &table(), true), vec![0.5, 0.5]);
        let v = avg_embedding(&doc("w1 w1 w2"), &table(), true);
        assert!((v[0] - 2.0 / 3.0).abs() < 1e-15 && (v[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn oov_handling() {
        assert_eq!(avg_embedding(&doc("zz yy"), &table(), true), vec![0.0, 0.0]);
        let mut t = table();
        t.set_oov(&[0.0, 3.0]).unwrap();
        assert_eq!(avg_embedding(&doc("w1 zz"), &t, false), vec![0.5, 1.5]);
        assert_eq!(avg_embedding(&doc("w1 zz"), &t, true), vec![1.0, 0.0]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            EmbeddingTable::parse("2 2\nw1 1 0\n", "t"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            EmbeddingTable::parse("1 2\nw1 1 0 4\n", "t"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(EmbeddingTable::parse("1 2\nw1 1 x\n", "t").is_err());
    }

    #[test]
    fn write_round_trip() {
        let t = table();
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        assert_eq!(
            EmbeddingTable::parse(std::str::from_utf8(&buf).unwrap(), "t").unwrap(),
            t
        );
    }
}
