//! Input loading, artifact bookkeeping and the run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use ein_core::corpus::{load_corpus, preprocess, PreprocessReport};
use ein_core::lexicon::{load_lexicon_with_mapping, EmotionMapping};
use ein_core::{Corpus, EmbeddingTable, Lexicon, LexiconSchema, Result, WordList};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{io_error, Stage, StageError, StageResult};

/// Everything an experiment reads from disk, after preprocessing.
#[derive(Clone, Debug)]
pub struct Inputs {
    pub raw_corpus: Corpus,
    pub corpus: Corpus,
    pub preprocess: Option<PreprocessReport>,
    pub lexicons: Vec<Lexicon>,
    pub embeddings: Option<EmbeddingTable>,
    pub word_lists: Vec<WordList>,
}

impl Inputs {
    pub fn load(config: &ExperimentConfig) -> Result<Self> {
        let raw_corpus = load_corpus(&config.corpus, config.corpus_format)?;
        let (corpus, report) = if config.preprocess.enabled {
            let (c, r) = preprocess(
                &raw_corpus,
                config.preprocess.resolve(raw_corpus.provenance),
            )?;
            (c, Some(r))
        } else {
            (raw_corpus.clone(), None)
        };
        let mapping = match &config.lexicon_mapping {
            Some(p) => EmotionMapping::load(p)?,
            None => EmotionMapping::default(),
        };
        let lexicons = config
            .lexicons
            .iter()
            .map(|(name, p)| load_lexicon_with_mapping(p, &LexiconSchema::builtin(*name), &mapping))
            .collect::<Result<Vec<_>>>()?;
        let embeddings = config
            .embeddings
            .as_ref()
            .map(EmbeddingTable::load)
            .transpose()?;
        let word_lists = config
            .word_lists
            .iter()
            .map(|(name, p)| WordList::load(name.clone(), p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Inputs {
            raw_corpus,
            corpus,
            preprocess: report,
            lexicons,
            embeddings,
            word_lists,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Artifact {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: Stage,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub stage: Stage,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Complete,
    Incomplete,
}

/// Record of one command invocation. Written next to its artifacts as
/// `manifest-<command>.json`; the only file carrying timings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub format: &'static str,
    pub version: u32,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub status: Status,
    pub failure: Option<Failure>,
    pub stages: Vec<StageTiming>,
    pub artifacts: Vec<Artifact>,
}

/// Output directory writer that hashes everything it writes.
#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    written: Vec<Artifact>,
}

impl Artifacts {
    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| io_error(&path, e))?;
        self.record(name, bytes);
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Registers a file some other writer has already put in place.
    pub fn adopt(&mut self, name: &str) -> Result<()> {
        let path = self.dir.join(name);
        let bytes = std::fs::read(&path).map_err(|e| io_error(&path, e))?;
        self.record(name, &bytes);
        Ok(())
    }

    fn record(&mut self, name: &str, bytes: &[u8]) {
        self.written.retain(|a| a.path != name);
        self.written.push(Artifact {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
        });
    }
}

/// One command invocation: times stages, and on failure writes a manifest
/// marked incomplete before handing the error back.
pub struct Run {
    pub artifacts: Artifacts,
    manifest: Manifest,
}

impl Run {
    pub fn start(command: &str, config: &ExperimentConfig) -> StageResult<Self> {
        std::fs::create_dir_all(&config.out)
            .map_err(|e| StageError::new(Stage::Write, io_error(&config.out, e)))?;
        Ok(Run {
            artifacts: Artifacts {
                dir: config.out.clone(),
                written: Vec::new(),
            },
            manifest: Manifest {
                format: "ein-manifest",
                version: 1,
                command: command.to_string(),
                config_hash: config.hash.clone(),
                seed: config.seed,
                status: Status::Incomplete,
                failure: None,
                stages: Vec::new(),
                artifacts: Vec::new(),
            },
        })
    }

    pub fn stage<T>(
        &mut self,
        stage: Stage,
        f: impl FnOnce(&mut Artifacts) -> Result<T>,
    ) -> StageResult<T> {
        let t = Instant::now();
        let out = f(&mut self.artifacts);
        self.manifest.stages.push(StageTiming {
            stage,
            seconds: t.elapsed().as_secs_f64(),
        });
        out.map_err(|e| {
            self.manifest.failure = Some(Failure {
                stage,
                message: e.to_string(),
            });
            // Best effort: the original error matters more than this one.
            let _ = self.write_manifest();
            StageError::new(stage, e)
        })
    }

    pub fn finish(mut self) -> StageResult<Manifest> {
        self.manifest.status = Status::Complete;
        self.write_manifest()
            .map_err(|e| StageError::new(Stage::Write, e))?;
        Ok(self.manifest)
    }

    fn write_manifest(&mut self) -> Result<()> {
        self.manifest.artifacts = self.artifacts.written.clone();
        self.manifest.artifacts.sort_by(|a, b| a.path.cmp(&b.path));
        let name = format!("manifest-{}.json", self.manifest.command);
        let path = self.artifacts.dir.join(&name);
        let text = serde_json::to_string_pretty(&self.manifest)? + "\n";
        std::fs::write(&path, text).map_err(|e| io_error(&path, e))
    }
}
