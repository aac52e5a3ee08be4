//! Emotion lexicons.
//!
//! Five lexicon schemas are supported, each naming a fixed, ordered subset of
//! a closed registry of 17 canonical emotions:
//!
//! | schema       | dim | emotions                                                   |
//! |--------------|-----|------------------------------------------------------------|
//! | EmoSenticNet | 6   | anger disgust fear joy sadness surprise                    |
//! | EmoLex       | 8   | anger anticipation disgust fear joy sadness surprise trust |
//! | SentiSense   | 14  | joy fear surprise anger disgust love anticipation hope despair sadness calmness like hate ambiguous |
//! | LIWC         | 4   | sadness anger pos_emo neg_emo                              |
//! | Empath       | 6   | love joy surprise anger sadness fear                       |
//!
//! The per-schema inventories are a reconstruction from the dimension counts
//! and a few known category names, not the lexicons' own category lists.
//! Native category names are translated to canonical labels through an
//! [`EmotionMapping`], which ships with sensible aliases (e.g. LIWC's
//! "positive emotion" → `pos_emo`) and can be overridden from a file.
//!
//! Lexicon files are UTF-8 text:
//!
//! ```text
//! #schema: EmoLex
//! # comments are allowed
//! happy	joy
//! happy	trust
//! ```

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::tokenize;
use crate::{Error, Result};

/// One of the 17 canonical emotions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmotionLabel {
    Joy,
    Sadness,
    Anger,
    Fear,
    Disgust,
    Surprise,
    Anticipation,
    Trust,
    Love,
    Hope,
    Calmness,
    Despair,
    Hate,
    Like,
    PosEmo,
    NegEmo,
    Ambiguous,
}

impl EmotionLabel {
    pub const ALL: [EmotionLabel; 17] = [
        EmotionLabel::Joy,
        EmotionLabel::Sadness,
        EmotionLabel::Anger,
        EmotionLabel::Fear,
        EmotionLabel::Disgust,
        EmotionLabel::Surprise,
        EmotionLabel::Anticipation,
        EmotionLabel::Trust,
        EmotionLabel::Love,
        EmotionLabel::Hope,
        EmotionLabel::Calmness,
        EmotionLabel::Despair,
        EmotionLabel::Hate,
        EmotionLabel::Like,
        EmotionLabel::PosEmo,
        EmotionLabel::NegEmo,
        EmotionLabel::Ambiguous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EmotionLabel::Joy => "joy",
            EmotionLabel::Sadness => "sadness",
            EmotionLabel::Anger => "anger",
            EmotionLabel::Fear => "fear",
            EmotionLabel::Disgust => "disgust",
            EmotionLabel::Surprise => "surprise",
            EmotionLabel::Anticipation => "anticipation",
            EmotionLabel::Trust => "trust",
            EmotionLabel::Love => "love",
            EmotionLabel::Hope => "hope",
            EmotionLabel::Calmness => "calmness",
            EmotionLabel::Despair => "despair",
            EmotionLabel::Hate => "hate",
            EmotionLabel::Like => "like",
            EmotionLabel::PosEmo => "pos_emo",
            EmotionLabel::NegEmo => "neg_emo",
            EmotionLabel::Ambiguous => "ambiguous",
        }
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EmotionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EmotionLabel::ALL
            .iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown emotion label '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemaName {
    EmoSenticNet,
    EmoLex,
    SentiSense,
    #[serde(rename = "LIWC")]
    Liwc,
    Empath,
}

impl SchemaName {
    pub const ALL: [SchemaName; 5] = [
        SchemaName::EmoSenticNet,
        SchemaName::EmoLex,
        SchemaName::SentiSense,
        SchemaName::Liwc,
        SchemaName::Empath,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemaName::EmoSenticNet => "EmoSenticNet",
            SchemaName::EmoLex => "EmoLex",
            SchemaName::SentiSense => "SentiSense",
            SchemaName::Liwc => "LIWC",
            SchemaName::Empath => "Empath",
        }
    }

    /// Canonical emotions of the schema, in coordinate order.
    pub fn emotions(self) -> &'static [EmotionLabel] {
        use EmotionLabel::*;
        match self {
            SchemaName::EmoSenticNet => &[Anger, Disgust, Fear, Joy, Sadness, Surprise],
            SchemaName::EmoLex => &[
                Anger,
                Anticipation,
                Disgust,
                Fear,
                Joy,
                Sadness,
                Surprise,
                Trust,
            ],
            SchemaName::SentiSense => &[
                Joy,
                Fear,
                Surprise,
                Anger,
                Disgust,
                Love,
                Anticipation,
                Hope,
                Despair,
                Sadness,
                Calmness,
                Like,
                Hate,
                Ambiguous,
            ],
            SchemaName::Liwc => &[Sadness, Anger, PosEmo, NegEmo],
            SchemaName::Empath => &[Love, Joy, Surprise, Anger, Sadness, Fear],
        }
    }
}

impl fmt::Display for SchemaName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemaName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemaName::ALL
            .iter()
            .copied()
            .find(|n| n.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Validation(format!("unknown lexicon schema '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconSchema {
    pub name: SchemaName,
    pub emotions: Vec<EmotionLabel>,
}

impl LexiconSchema {
    pub fn builtin(name: SchemaName) -> Self {
        LexiconSchema {
            name,
            emotions: name.emotions().to_vec(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.emotions.len()
    }

    pub fn contains(&self, emotion: EmotionLabel) -> bool {
        self.emotions.contains(&emotion)
    }
}

/// The five schemas in their stable order: EmoSenticNet, EmoLex, SentiSense,
/// LIWC, Empath.
pub fn builtin_schemas() -> Vec<LexiconSchema> {
    SchemaName::ALL
        .iter()
        .map(|&n| LexiconSchema::builtin(n))
        .collect()
}

/// Translation from native lexicon category names to canonical labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmotionMapping {
    names: HashMap<String, EmotionLabel>,
}

impl Default for EmotionMapping {
    fn default() -> Self {
        let mut names: HashMap<String, EmotionLabel> = EmotionLabel::ALL
            .iter()
            .map(|e| (e.name().to_string(), *e))
            .collect();
        for (alias, label) in [
            ("positive emotion", EmotionLabel::PosEmo),
            ("positive_emotion", EmotionLabel::PosEmo),
            ("posemo", EmotionLabel::PosEmo),
            ("negative emotion", EmotionLabel::NegEmo),
            ("negative_emotion", EmotionLabel::NegEmo),
            ("negemo", EmotionLabel::NegEmo),
            ("sad", EmotionLabel::Sadness),
        ] {
            names.insert(alias.to_string(), label);
        }
        EmotionMapping { names }
    }
}

impl EmotionMapping {
    pub fn resolve(&self, native: &str) -> Option<EmotionLabel> {
        self.names.get(&native.trim().to_lowercase()).copied()
    }

    pub fn insert(&mut self, native: &str, label: EmotionLabel) {
        self.names.insert(native.trim().to_lowercase(), label);
    }

    /// Reads `native<TAB>canonical` overrides on top of the defaults.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut mapping = EmotionMapping::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (native, canonical) = line.split_once('\t').ok_or_else(|| Error::Parse {
                path: path.display().to_string(),
                line: i + 1,
                message: "expected 'native<TAB>canonical'".into(),
            })?;
            mapping.insert(native, canonical.trim().parse()?);
        }
        Ok(mapping)
    }
}

/// A word → emotion-set resource validated against a schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lexicon {
    schema: LexiconSchema,
    entries: HashMap<String, Vec<EmotionLabel>>,
}

impl Lexicon {
    pub fn new(schema: LexiconSchema) -> Self {
        Lexicon {
            schema,
            entries: HashMap::new(),
        }
    }

    /// Builds a lexicon from in-memory `(word, emotion)` pairs, applying the
    /// same validation as the file loader.
    pub fn from_entries<'a, I>(schema: LexiconSchema, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, EmotionLabel)>,
    {
        let mut lexicon = Lexicon::new(schema);
        for (word, emotion) in entries {
            let word = validate_word(word).map_err(Error::Validation)?;
            lexicon.insert(word, emotion)?;
        }
        Ok(lexicon)
    }

    fn insert(&mut self, word: String, emotion: EmotionLabel) -> Result<()> {
        if !self.schema.contains(emotion) {
            return Err(Error::Validation(format!(
                "emotion '{emotion}' is not part of the {} schema",
                self.schema.name
            )));
        }
        let set = self.entries.entry(word).or_default();
        if let Err(pos) = set.binary_search(&emotion) {
            set.insert(pos, emotion);
        }
        Ok(())
    }

    pub fn parse(
        text: &str,
        schema: &LexiconSchema,
        mapping: &EmotionMapping,
        origin: &str,
    ) -> Result<Self> {
        let mut lexicon = Lexicon::new(schema.clone());
        let mut header_seen = false;
        let parse_err = |line: usize, message: String| Error::Parse {
            path: origin.to_string(),
            line,
            message,
        };
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(name) = comment.trim_start().strip_prefix("schema:") {
                    let declared: SchemaName = name.trim().parse().map_err(|_| {
                        parse_err(lineno, format!("unknown schema '{}'", name.trim()))
                    })?;
                    if declared != schema.name {
                        return Err(Error::Validation(format!(
                            "{origin}: file declares schema {declared} but {} was requested",
                            schema.name
                        )));
                    }
                    header_seen = true;
                }
                continue;
            }
            if !header_seen {
                return Err(parse_err(lineno, "entry before '#schema:' header".into()));
            }
            let mut fields = line.split('\t');
            let (word, emotion) = match (fields.next(), fields.next(), fields.next()) {
                (Some(w), Some(e), None) if !w.trim().is_empty() && !e.trim().is_empty() => (w, e),
                _ => return Err(parse_err(lineno, "expected 'word<TAB>emotion'".into())),
            };
            let word = validate_word(word).map_err(|m| parse_err(lineno, m))?;
            let label = mapping.resolve(emotion).ok_or_else(|| {
                Error::Validation(format!(
                    "{origin}:{lineno}: emotion '{}' is not in the emotion registry",
                    emotion.trim()
                ))
            })?;
            if !schema.contains(label) {
                return Err(Error::Validation(format!(
                    "{origin}:{lineno}: emotion '{}' is not part of the {} schema",
                    emotion.trim(),
                    schema.name
                )));
            }
            lexicon.insert(word, label)?;
        }
        Ok(lexicon)
    }

    pub fn schema(&self) -> &LexiconSchema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Emotions attached to `token` (case-insensitive); empty when unknown.
    pub fn lookup(&self, token: &str) -> &[EmotionLabel] {
        let key: Cow<'_, str> = if token.chars().any(char::is_uppercase) {
            Cow::Owned(token.to_lowercase())
        } else {
            Cow::Borrowed(token)
        };
        self.entries
            .get(key.as_ref())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn lookup_set(&self, token: &str) -> BTreeSet<EmotionLabel> {
        self.lookup(token).iter().copied().collect()
    }

    /// Sorted view of all entries, mainly for serialization and diffs.
    pub fn entries(&self) -> BTreeMap<&str, &[EmotionLabel]> {
        self.entries
            .iter()
            .map(|(w, e)| (w.as_str(), e.as_slice()))
            .collect()
    }

    /// Serializes to the lexicon file format (sorted, deterministic).
    pub fn to_tsv(&self) -> String {
        let mut out = format!("#schema: {}\n", self.schema.name);
        for (word, emotions) in self.entries() {
            for e in emotions {
                out.push_str(word);
                out.push('\t');
                out.push_str(e.name());
                out.push('\n');
            }
        }
        out
    }
}

fn validate_word(word: &str) -> std::result::Result<String, String> {
    let lowered = word.trim().to_lowercase();
    if lowered.is_empty() {
        return Err("empty word".into());
    }
    if lowered.chars().any(char::is_whitespace) {
        return Err(format!(
            "multi-word entry '{}' is not supported",
            word.trim()
        ));
    }
    let tokens = tokenize(&lowered);
    if tokens.len() != 1 || tokens[0] != lowered {
        return Err(format!("entry '{}' is not a single token", word.trim()));
    }
    Ok(lowered)
}

pub fn load_lexicon(path: impl AsRef<Path>, schema: &LexiconSchema) -> Result<Lexicon> {
    load_lexicon_with_mapping(path, schema, &EmotionMapping::default())
}

pub fn load_lexicon_with_mapping(
    path: impl AsRef<Path>,
    schema: &LexiconSchema,
    mapping: &EmotionMapping,
) -> Result<Lexicon> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Lexicon::parse(&text, schema, mapping, &path.display().to_string())
}

/// Number of coordinates a lexicon contributes; depends only on its schema.
pub fn lexicon_dimension(lexicon: &Lexicon) -> usize {
    lexicon.schema.dimension()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema(name: SchemaName) -> LexiconSchema {
        LexiconSchema::builtin(name)
    }

    fn parse(text: &str, name: SchemaName) -> Result<Lexicon> {
        Lexicon::parse(text, &schema(name), &EmotionMapping::default(), "test")
    }

    #[test]
    fn builtin_schema_dimensions() {
        let schemas = builtin_schemas();
        let names: Vec<_> = schemas.iter().map(|s| s.name).collect();
        assert_eq!(names, SchemaName::ALL);
        let dims: Vec<_> = schemas.iter().map(LexiconSchema::dimension).collect();
        assert_eq!(dims, vec![6, 8, 14, 4, 6]);
        assert_eq!(dims.iter().sum::<usize>(), 38);
    }

    #[test]
    fn schemas_cover_the_registry_exactly() {
        let mut seen = BTreeSet::new();
        for s in builtin_schemas() {
            let unique: BTreeSet<_> = s.emotions.iter().collect();
            assert_eq!(
                unique.len(),
                s.dimension(),
                "duplicate emotion in {}",
                s.name
            );
            seen.extend(s.emotions);
        }
        assert_eq!(seen.len(), 17);
    }

    #[test]
    fn emotion_names_round_trip() {
        for e in EmotionLabel::ALL {
            assert_eq!(e.name().parse::<EmotionLabel>().unwrap(), e);
        }
        assert!("bliss".parse::<EmotionLabel>().is_err());
    }

    #[test]
    fn multi_emotion_word() {
        let lex = parse(
            "#schema: EmoLex\nhappy\tjoy\nhappy\ttrust\nhappy\tjoy\n",
            SchemaName::EmoLex,
        )
        .unwrap();
        assert_eq!(
            lex.lookup_set("happy"),
            BTreeSet::from([EmotionLabel::Joy, EmotionLabel::Trust])
        );
        assert_eq!(lex.len(), 1);
    }

    #[test]
    fn emotion_outside_schema_is_rejected() {
        let err = parse("#schema: LIWC\nhappy\tdespair\n", SchemaName::Liwc).unwrap_err();
        match err {
            Error::Validation(msg) => assert!(msg.contains("despair"), "{msg}"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_file_gives_empty_lexicon() {
        let lex = parse("", SchemaName::EmoLex).unwrap();
        assert!(lex.is_empty());
        assert_eq!(lexicon_dimension(&lex), 8);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse("#schema: EmoLex\n# ok\nhappy joy\n", SchemaName::EmoLex).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_or_wrong_header() {
        assert!(matches!(
            parse("happy\tjoy\n", SchemaName::EmoLex),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse("#schema: Empath\nhappy\tjoy\n", SchemaName::EmoLex),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn multi_word_entries_are_rejected() {
        assert!(parse("#schema: EmoLex\nice cream\tjoy\n", SchemaName::EmoLex).is_err());
        assert!(parse("#schema: EmoLex\nwell-being\tjoy\n", SchemaName::EmoLex).is_err());
    }

    #[test]
    fn liwc_native_names_map_to_registry() {
        let lex = parse(
            "#schema: LIWC\ngreat\tpositive emotion\nawful\tnegemo\n",
            SchemaName::Liwc,
        )
        .unwrap();
        assert_eq!(lex.lookup("great"), &[EmotionLabel::PosEmo]);
        assert_eq!(lex.lookup("awful"), &[EmotionLabel::NegEmo]);
    }

    #[test]
    fn lookup_is_case_insensitive() {
        let lex = Lexicon::from_entries(
            schema(SchemaName::EmoLex),
            [("war", EmotionLabel::Fear), ("win", EmotionLabel::Joy)],
        )
        .unwrap();
        assert_eq!(lex.lookup("war"), &[EmotionLabel::Fear]);
        assert_eq!(lex.lookup("WaR"), lex.lookup("war"));
        assert!(lex.lookup("zzzunknown").is_empty());
    }

    #[test]
    fn dimension_ignores_entries() {
        let mut entries = Vec::new();
        let words: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
        for w in &words {
            entries.push((w.as_str(), EmotionLabel::Hope));
        }
        let lex = Lexicon::from_entries(schema(SchemaName::SentiSense), entries).unwrap();
        assert_eq!(lex.len(), 10);
        assert_eq!(lexicon_dimension(&lex), 14);
    }

    #[test]
    fn tsv_round_trip_and_idempotent_load() {
        let lex = Lexicon::from_entries(
            schema(SchemaName::EmoLex),
            [
                ("war", EmotionLabel::Fear),
                ("war", EmotionLabel::Anger),
                ("win", EmotionLabel::Joy),
            ],
        )
        .unwrap();
        let text = lex.to_tsv();
        let a = parse(&text, SchemaName::EmoLex).unwrap();
        let b = parse(&text, SchemaName::EmoLex).unwrap();
        assert_eq!(a, lex);
        assert_eq!(a, b);
    }

    #[test]
    fn mapping_overrides() {
        let mut m = EmotionMapping::default();
        m.insert("Cheer", EmotionLabel::Joy);
        let lex = Lexicon::parse(
            "#schema: Empath\nyay\tcheer\n",
            &schema(SchemaName::Empath),
            &m,
            "t",
        )
        .unwrap();
        assert_eq!(lex.lookup("yay"), &[EmotionLabel::Joy]);
    }
}
