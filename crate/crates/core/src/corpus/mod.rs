//! Parallel original/simplified corpus: units, pairs and loading.
//!
//! The corpus file is JSON:
//!
//! ```json
//! { "articles": [ { "article_id": "a1", "paragraphs": [
//!     { "paragraph_id": "p1",
//!       "original":   ["First sentence.", "Second one."],
//!       "simplified": ["First sentence.", "Second.", "Third."],
//!       "alignment":  [[0, 0], [1, 1], [1, 2]] } ] } ] }
//! ```
//!
//! Unit ids are `article/paragraph/level` for passages and
//! `article/paragraph/level/sentence` for sentences. When the alignment joins
//! several sentences on one side, that side becomes a group unit whose id ends
//! in the `+`-joined sentence indices (`a1/p1/simplified/1+2`).

pub mod stats;
pub mod tokenize;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use tokenize::{count_syllables, detokenize, split_sentences, tokenize, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Sentence,
    Passage,
}

impl Granularity {
    pub const ALL: [Granularity; 2] = [Granularity::Sentence, Granularity::Passage];

    pub fn as_str(self) -> &'static str {
        match self {
            Granularity::Sentence => "sentence",
            Granularity::Passage => "passage",
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sentence" | "sentences" => Ok(Granularity::Sentence),
            "passage" | "passages" | "paragraph" => Ok(Granularity::Passage),
            other => Err(Error::Config(format!("unknown granularity `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Original,
    Simplified,
}

impl Level {
    pub const ALL: [Level; 2] = [Level::Original, Level::Simplified];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Original => "original",
            Level::Simplified => "simplified",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "original" | "orig" | "advanced" | "adv" => Ok(Level::Original),
            "simplified" | "simp" | "elementary" | "ele" => Ok(Level::Simplified),
            other => Err(Error::Config(format!("unknown level `{other}`"))),
        }
    }
}

/// A sentence, a group of aligned sentences, or a passage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextUnit {
    pub unit_id: String,
    pub granularity: Granularity,
    pub level: Level,
    pub article_id: String,
    pub paragraph_id: String,
    pub text: String,
    pub tokens: Vec<Token>,
    pub sentence_count: usize,
    /// Passage this unit belongs to; `None` for passages themselves.
    pub parent: Option<String>,
    /// Word-index ranges inside the parent passage (the whole passage for
    /// passage units).
    pub word_ranges: Vec<Range<usize>>,
}

impl TextUnit {
    pub fn words(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| t.is_word)
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }

    pub fn letter_count(&self) -> usize {
        self.words().map(|t| t.letters).sum()
    }

    pub fn syllable_count(&self) -> usize {
        self.words().map(|t| t.syllables).sum()
    }

    /// Id of the passage whose word sequence `word_ranges` indexes into.
    pub fn passage_id(&self) -> &str {
        self.parent.as_deref().unwrap_or(&self.unit_id)
    }

    /// Passage word indices covered by this unit, in order.
    pub fn passage_word_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.word_ranges.iter().flat_map(|r| r.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelPair {
    pub pair_id: String,
    pub original: String,
    pub simplified: String,
    pub granularity: Granularity,
}

#[derive(Debug, Clone, Deserialize)]
struct CorpusFile {
    articles: Vec<ArticleFile>,
}

#[derive(Debug, Clone, Deserialize)]
struct ArticleFile {
    article_id: String,
    paragraphs: Vec<ParagraphFile>,
}

#[derive(Debug, Clone, Deserialize)]
struct ParagraphFile {
    #[serde(default)]
    paragraph_id: Option<String>,
    original: Vec<String>,
    simplified: Vec<String>,
    #[serde(default)]
    alignment: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    units: Vec<TextUnit>,
    index: HashMap<String, usize>,
    pairs: Vec<ParallelPair>,
}

impl Corpus {
    pub fn load(path: impl AsRef<Path>) -> Result<Corpus> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Corpus::from_json(&raw)
    }

    pub fn from_json(raw: &str) -> Result<Corpus> {
        let file: CorpusFile =
            serde_json::from_str(raw).map_err(|e| Error::MalformedCorpus(e.to_string()))?;
        let mut builder = Builder::default();
        for article in &file.articles {
            for (pi, paragraph) in article.paragraphs.iter().enumerate() {
                builder.add_paragraph(&article.article_id, pi, paragraph)?;
            }
        }
        if builder.corpus.units.is_empty() {
            return Err(Error::NoUnits);
        }
        Ok(builder.corpus)
    }

    pub fn units(&self) -> &[TextUnit] {
        &self.units
    }

    pub fn unit(&self, unit_id: &str) -> Option<&TextUnit> {
        self.index.get(unit_id).map(|&i| &self.units[i])
    }

    pub fn require_unit(&self, unit_id: &str) -> Result<&TextUnit> {
        self.unit(unit_id)
            .ok_or_else(|| Error::UnknownUnit(unit_id.to_string()))
    }

    pub fn pairs(&self) -> &[ParallelPair] {
        &self.pairs
    }

    pub fn pairs_at(&self, granularity: Granularity) -> impl Iterator<Item = &ParallelPair> {
        self.pairs.iter().filter(move |p| p.granularity == granularity)
    }

    pub fn passages(&self, level: Level) -> impl Iterator<Item = &TextUnit> {
        self.units
            .iter()
            .filter(move |u| u.granularity == Granularity::Passage && u.level == level)
    }

    /// Plain (non-group) sentence units of a level.
    pub fn sentences(&self, level: Level) -> impl Iterator<Item = &TextUnit> {
        self.units.iter().filter(move |u| {
            u.granularity == Granularity::Sentence && u.level == level && u.sentence_count == 1
        })
    }

    /// Units taking part in at least one pair of the given granularity.
    pub fn paired_units(&self, granularity: Granularity) -> Vec<&TextUnit> {
        let ids: BTreeSet<&str> = self
            .pairs_at(granularity)
            .flat_map(|p| [p.original.as_str(), p.simplified.as_str()])
            .collect();
        self.units
            .iter()
            .filter(|u| ids.contains(u.unit_id.as_str()))
            .collect()
    }

    fn push(&mut self, unit: TextUnit) -> Result<()> {
        if self.index.contains_key(&unit.unit_id) {
            return Err(Error::DuplicateUnit(unit.unit_id));
        }
        self.index.insert(unit.unit_id.clone(), self.units.len());
        self.units.push(unit);
        Ok(())
    }
}

#[derive(Default)]
struct Builder {
    corpus: Corpus,
    pair_ids: BTreeSet<String>,
}

struct SentenceInfo {
    text: String,
    tokens: Vec<Token>,
    range: Range<usize>,
}

impl Builder {
    fn add_paragraph(&mut self, article_id: &str, index: usize, p: &ParagraphFile) -> Result<()> {
        let paragraph_id = p.paragraph_id.clone().unwrap_or_else(|| index.to_string());
        let key = format!("{article_id}/{paragraph_id}");

        let mut sentences: BTreeMap<Level, Vec<SentenceInfo>> = BTreeMap::new();
        for level in Level::ALL {
            let texts = match level {
                Level::Original => &p.original,
                Level::Simplified => &p.simplified,
            };
            if texts.is_empty() {
                return Err(Error::MalformedCorpus(format!("{key}: no {level} sentences")));
            }
            let passage_id = format!("{key}/{level}");
            let mut infos = Vec::with_capacity(texts.len());
            let mut offset = 0;
            for text in texts {
                let tokens = tokenize(text);
                let words = tokens.iter().filter(|t| t.is_word).count();
                if words == 0 {
                    return Err(Error::MalformedCorpus(format!(
                        "{passage_id}: sentence without words: {text:?}"
                    )));
                }
                infos.push(SentenceInfo {
                    text: text.clone(),
                    tokens,
                    range: offset..offset + words,
                });
                offset += words;
            }

            let passage = TextUnit {
                unit_id: passage_id.clone(),
                granularity: Granularity::Passage,
                level,
                article_id: article_id.to_string(),
                paragraph_id: paragraph_id.clone(),
                text: texts.join(" "),
                tokens: infos.iter().flat_map(|s| s.tokens.iter().cloned()).collect(),
                sentence_count: infos.len(),
                parent: None,
                word_ranges: std::iter::once(0..offset).collect(),
            };
            self.corpus.push(passage)?;
            for (si, info) in infos.iter().enumerate() {
                self.corpus.push(TextUnit {
                    unit_id: format!("{passage_id}/{si}"),
                    granularity: Granularity::Sentence,
                    level,
                    article_id: article_id.to_string(),
                    paragraph_id: paragraph_id.clone(),
                    text: info.text.clone(),
                    tokens: info.tokens.clone(),
                    sentence_count: 1,
                    parent: Some(passage_id.clone()),
                    word_ranges: vec![info.range.clone()],
                })?;
            }
            sentences.insert(level, infos);
        }

        self.add_pair(ParallelPair {
            pair_id: key.clone(),
            original: format!("{key}/original"),
            simplified: format!("{key}/simplified"),
            granularity: Granularity::Passage,
        })?;

        let n_orig = p.original.len();
        let n_simp = p.simplified.len();
        for &(o, s) in &p.alignment {
            if o >= n_orig || s >= n_simp {
                return Err(Error::DanglingAlignment {
                    paragraph: key.clone(),
                    detail: format!("({o}, {s}) outside {n_orig} original / {n_simp} simplified sentences"),
                });
            }
        }

        for (gi, (orig, simp)) in alignment_groups(&p.alignment).into_iter().enumerate() {
            let original = self.group_unit(
                &key,
                article_id,
                &paragraph_id,
                Level::Original,
                &orig,
                &sentences,
            )?;
            let simplified = self.group_unit(
                &key,
                article_id,
                &paragraph_id,
                Level::Simplified,
                &simp,
                &sentences,
            )?;
            self.add_pair(ParallelPair {
                pair_id: format!("{key}/s{gi}"),
                original,
                simplified,
                granularity: Granularity::Sentence,
            })?;
        }
        Ok(())
    }

    /// Returns the unit id for a set of sentences, creating a group unit when
    /// the set has more than one member.
    fn group_unit(
        &mut self,
        key: &str,
        article_id: &str,
        paragraph_id: &str,
        level: Level,
        members: &[usize],
        sentences: &BTreeMap<Level, Vec<SentenceInfo>>,
    ) -> Result<String> {
        let passage_id = format!("{key}/{level}");
        if let [single] = members {
            return Ok(format!("{passage_id}/{single}"));
        }
        let suffix = members.iter().map(usize::to_string).collect::<Vec<_>>().join("+");
        let unit_id = format!("{passage_id}/{suffix}");
        if self.corpus.unit(&unit_id).is_some() {
            return Ok(unit_id);
        }
        let infos: Vec<&SentenceInfo> = members.iter().map(|&i| &sentences[&level][i]).collect();
        self.corpus.push(TextUnit {
            unit_id: unit_id.clone(),
            granularity: Granularity::Sentence,
            level,
            article_id: article_id.to_string(),
            paragraph_id: paragraph_id.to_string(),
            text: infos
                .iter()
                .map(|s| s.text.as_str())
                .collect::<Vec<_>>()
                .join(" "),
            tokens: infos.iter().flat_map(|s| s.tokens.iter().cloned()).collect(),
            sentence_count: infos.len(),
            parent: Some(passage_id),
            word_ranges: infos.iter().map(|s| s.range.clone()).collect(),
        })?;
        Ok(unit_id)
    }

    fn add_pair(&mut self, pair: ParallelPair) -> Result<()> {
        if !self.pair_ids.insert(pair.pair_id.clone()) {
            return Err(Error::DuplicateUnit(pair.pair_id));
        }
        self.corpus.pairs.push(pair);
        Ok(())
    }
}

/// Connected components of the bipartite alignment graph, ordered by their
/// smallest original index. Each component lists its sorted original and
/// simplified sentence indices.
fn alignment_groups(alignment: &[(usize, usize)]) -> Vec<(Vec<usize>, Vec<usize>)> {
    // union-find over nodes: originals as (0, i), simplified as (1, j)
    let mut nodes: Vec<(u8, usize)> = alignment.iter().flat_map(|&(o, s)| [(0, o), (1, s)]).collect();
    nodes.sort_unstable();
    nodes.dedup();
    let id = |n: (u8, usize)| nodes.binary_search(&n).expect("node present");
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(o, s) in alignment {
        let a = find(&mut parent, id((0, o)));
        let b = find(&mut parent, id((1, s)));
        if a != b {
            parent[a] = b;
        }
    }
    let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, &(side, idx)) in nodes.iter().enumerate() {
        let root = find(&mut parent, i);
        let entry = groups.entry(root).or_default();
        if side == 0 {
            entry.0.push(idx);
        } else {
            entry.1.push(idx);
        }
    }
    let mut out: Vec<_> = groups.into_values().collect();
    for (o, s) in &mut out {
        o.sort_unstable();
        s.sort_unstable();
    }
    out.sort_by_key(|(o, s)| (o.first().copied(), s.first().copied()));
    out
}
