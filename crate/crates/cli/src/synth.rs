//! Writes a self-contained demo dataset: synthetic corpora, lexicons,
//! embeddings, word lists and ready-to-run configs.

use std::path::{Path, PathBuf};

use ein_core::corpus::write_jsonl;
use ein_core::synthetic::{
    clickbait_corpus, content_embeddings, emotion_corpus, toy_lexicons, toy_word_lists,
    word_rate_corpus, EmotionCorpusSpec,
};
use ein_core::Result;

use crate::error::io_error;

pub const EMBEDDING_DIM: usize = 16;

const LEXICON_KEYS: &str = "\
lexicon.emosenticnet = lexicons/emosenticnet.tsv
lexicon.emolex = lexicons/emolex.tsv
lexicon.sentisense = lexicons/sentisense.tsv
lexicon.liwc = lexicons/liwc.tsv
lexicon.empath = lexicons/empath.tsv
";

const NETWORK_KEYS: &str = "\
embeddings = embeddings.txt
ein.embedding_dim = 16
ein.lstm_units = 16
ein.dense_b_units = 16
ein.batch_size = 32
ein.optimizer = adam
ein.learning_rate = 0.005
ein.drop_c = 0.2
ein.max_epochs = 40
ein.early_stop_patience = 4
";

fn configs() -> Vec<(&'static str, String)> {
    let head = |model: &str, out: &str| {
        format!("# Synthetic five-class news corpus.\nseed = 42\ncorpus = news.jsonl\nmodel = {model}\nout = out/{out}\n")
    };
    vec![
        (
            "ein.conf",
            format!("{}{LEXICON_KEYS}{NETWORK_KEYS}ein.drop_d = 0.1\nein.dense_a_units = 16\n", head("ein", "ein")),
        ),
        ("lstm.conf", format!("{}{LEXICON_KEYS}{NETWORK_KEYS}ein.drop_d = 0.1\n", head("lstm", "lstm"))),
        (
            "forest.conf",
            format!("{}{LEXICON_KEYS}features = emotion\nforest.n_trees = 100\n", head("random_forest", "forest")),
        ),
        (
            "svm-bow.conf",
            format!("{}features = bow\nbow.min_df = 2\nsvm.c = 0.1\n", head("linear_svm", "svm-bow")),
        ),
        ("majority.conf", head("majority", "majority")),
        ("random.conf", head("random", "random")),
        (
            "analysis.conf",
            format!(
                "{}{LEXICON_KEYS}wordlist.assertives = wordlists/assertives.txt\n\
                 wordlist.hedges = wordlists/hedges.txt\ncompare.corpus = tweets.jsonl\n\
                 analysis.real_label = real_news\nanalysis.top_n = 3\n",
                head("random_forest", "analysis")
            ),
        ),
        (
            "clickbait.conf",
            format!(
                "# Binary headline corpus: sigmoid output, clickbait is the positive class.\n\
                 seed = 42\ncorpus = clickbait.jsonl\nmodel = ein\nout = out/clickbait\n\
                 preprocess.min_tokens = 1\n{LEXICON_KEYS}{NETWORK_KEYS}ein.dense_a_units = 8\n\
                 ein.drop_d = 0.2\nein.output_mode = sigmoid_binary\nein.positive_label = clickbait\n"
            ),
        ),
    ]
}

/// Writes the bundle into `dir` and returns the written paths.
pub fn write_demo_bundle(dir: &Path, docs_per_class: usize, seed: u64) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| io_error(&path, e))?;
        written.push(path);
        Ok(())
    };
    let jsonl = |c: &ein_core::Corpus| -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_jsonl(c, &mut buf)?;
        Ok(buf)
    };

    let spec = EmotionCorpusSpec {
        docs_per_class,
        content_rate: 0.3,
        seed,
        ..EmotionCorpusSpec::default()
    };
    put("news.jsonl", &jsonl(&emotion_corpus(&spec))?)?;
    put(
        "clickbait.jsonl",
        &jsonl(&clickbait_corpus(3 * docs_per_class, seed))?,
    )?;
    let lists = toy_word_lists();
    put(
        "tweets.jsonl",
        &jsonl(&word_rate_corpus(
            "real_news",
            &lists[0],
            0.003,
            docs_per_class,
            seed,
        ))?,
    )?;
    for list in &lists {
        let mut text = format!("# {}\n", list.name);
        for w in &list.words {
            text.push_str(w);
            text.push('\n');
        }
        put(&format!("wordlists/{}.txt", list.name), text.as_bytes())?;
    }
    for lex in toy_lexicons() {
        let name = lex.schema().name.as_str().to_ascii_lowercase();
        put(&format!("lexicons/{name}.tsv"), lex.to_tsv().as_bytes())?;
    }
    let mut emb = Vec::new();
    content_embeddings(EMBEDDING_DIM, seed)
        .write(&mut emb)
        .map_err(|e| io_error(&dir.join("embeddings.txt"), e))?;
    put("embeddings.txt", &emb)?;
    for (name, text) in configs() {
        put(name, text.as_bytes())?;
    }
    Ok(written)
}
