use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Corpus, Document, Source};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            other => Err(Error::Config(format!(
                "unknown corpus format '{other}' (expected jsonl or csv)"
            ))),
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct Record {
    id: String,
    text: String,
    label: String,
    source: String,
}

impl Record {
    fn into_document(self, index: usize) -> Result<Document> {
        let source = Source::from_str(&self.source).map_err(|e| Error::Record {
            record: index,
            message: e.to_string(),
        })?;
        Ok(Document::new(self.id, self.text, self.label, source))
    }

    fn from_document(d: &Document) -> Self {
        Record {
            id: d.id.clone(),
            text: d.text.clone(),
            label: d.label.clone(),
            source: d.source.as_str().to_string(),
        }
    }
}

pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Corpus> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    match format {
        CorpusFormat::Jsonl => read_jsonl(BufReader::new(file)),
        CorpusFormat::Csv => read_csv(file),
    }
}

/// Reads one JSON object per non-blank line. Record numbers in errors are
/// 1-based and count non-blank lines only.
pub fn read_jsonl(reader: impl BufRead) -> Result<Corpus> {
    let mut documents = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io("<jsonl>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let index = documents.len() + 1;
        let record: Record = serde_json::from_str(&line).map_err(|e| Error::Record {
            record: index,
            message: e.to_string(),
        })?;
        documents.push(record.into_document(index)?);
    }
    Ok(Corpus::new(documents))
}

/// Reads RFC-4180 CSV with the header `id,text,label,source`.
pub fn read_csv(reader: impl Read) -> Result<Corpus> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut documents = Vec::new();
    for (i, row) in rdr.deserialize::<Record>().enumerate() {
        let record = row.map_err(|e| Error::Record {
            record: i + 1,
            message: e.to_string(),
        })?;
        documents.push(record.into_document(i + 1)?);
    }
    Ok(Corpus::new(documents))
}

pub fn write_jsonl(corpus: &Corpus, mut writer: impl Write) -> Result<()> {
    for d in &corpus.documents {
        serde_json::to_writer(&mut writer, &Record::from_document(d))?;
        writer
            .write_all(b"\n")
            .map_err(|e| Error::io("<jsonl>", e))?;
    }
    Ok(())
}

pub fn write_csv(corpus: &Corpus, writer: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for d in &corpus.documents {
        wtr.serialize(Record::from_document(d))
            .map_err(|e| Error::Data(format!("csv write failed: {e}")))?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
