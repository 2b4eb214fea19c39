//! Whitespace tokenization, syllable counting and free-text sentence splitting.
//!
//! A token is one whitespace-delimited chunk. Punctuation stays attached to the
//! surface form (`"sat."`), but letter and syllable counts only ever look at
//! the alphanumeric core, and chunks without any alphanumeric character are
//! kept as non-word tokens so word indices line up with external per-word
//! files that use the same whitespace rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Alphanumeric characters in the surface; punctuation never counts.
    pub letters: usize,
    pub syllables: usize,
    pub is_word: bool,
}

impl Token {
    pub fn new(surface: &str) -> Self {
        let letters = surface.chars().filter(|c| c.is_alphanumeric()).count();
        let is_word = letters > 0;
        let syllables = if is_word {
            count_syllables(surface).unwrap_or(1)
        } else {
            0
        };
        Token {
            surface: surface.to_string(),
            letters,
            syllables,
            is_word,
        }
    }

    /// Surface with leading and trailing punctuation removed.
    pub fn bare(&self) -> &str {
        strip_punct(&self.surface)
    }
}

pub(crate) fn strip_punct(s: &str) -> &str {
    s.trim_matches(|c: char| !c.is_alphanumeric())
}

pub fn tokenize(text: &str) -> Vec<Token> {
    text.split_whitespace().map(Token::new).collect()
}

/// Joins token surfaces with single spaces.
pub fn detokenize(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

fn segment_syllables(segment: &str) -> usize {
    let chars: Vec<char> = segment
        .chars()
        .filter(|c| c.is_alphabetic())
        .flat_map(char::to_lowercase)
        .collect();
    let mut groups = 0;
    let mut in_group = false;
    for &c in &chars {
        let v = is_vowel(c);
        if v && !in_group {
            groups += 1;
        }
        in_group = v;
    }
    // A lone final "e" after a consonant is silent, unless it is the only group.
    let n = chars.len();
    if groups > 1 && n >= 2 && chars[n - 1] == 'e' && !is_vowel(chars[n - 2]) {
        groups -= 1;
    }
    groups
}

/// Vowel-group syllable estimate.
///
/// Counts maximal runs of `a e i o u y`, drops a silent word-final `e`, and
/// applies the rule to each hyphen-separated part of a compound separately.
/// The result is at least 1.
pub fn count_syllables(word: &str) -> Result<usize> {
    if !word.chars().any(char::is_alphabetic) {
        return Err(Error::NoLetters(word.to_string()));
    }
    let total: usize = strip_punct(word)
        .split(['-', '\u{2010}', '\u{2011}'])
        .map(segment_syllables)
        .sum();
    Ok(total.max(1))
}

const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "e.g", "i.e", "u.s", "u.k", "inc", "ltd",
    "co", "corp", "mt", "gen", "gov", "no", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
    "oct", "nov", "dec", "approx", "dept", "est", "fig",
];

const CLOSERS: &[char] = &['"', '\'', ')', ']', '\u{201d}', '\u{2019}'];
const OPENERS: &[char] = &['"', '\'', '(', '[', '\u{201c}', '\u{2018}'];

fn ends_sentence(chunk: &str) -> bool {
    let core = chunk.trim_end_matches(CLOSERS);
    let Some(last) = core.chars().last() else {
        return false;
    };
    if last == '!' || last == '?' {
        return true;
    }
    if last != '.' {
        return false;
    }
    let word = core
        .trim_end_matches('.')
        .trim_start_matches(OPENERS)
        .to_lowercase();
    if word.chars().count() == 1 && word.chars().all(char::is_alphabetic) {
        return false; // initial
    }
    !ABBREVIATIONS.contains(&word.as_str())
}

fn starts_sentence(chunk: &str) -> bool {
    chunk
        .trim_start_matches(OPENERS)
        .chars()
        .next()
        .is_some_and(|c| c.is_uppercase() || c.is_numeric())
}

/// Splits free text on `.`, `!` or `?` followed by whitespace and a capital.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chunks: Vec<&str> = text.split_whitespace().collect();
    let mut sentences = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for (i, chunk) in chunks.iter().enumerate() {
        current.push(chunk);
        let boundary = match chunks.get(i + 1) {
            Some(next) => ends_sentence(chunk) && starts_sentence(next),
            None => true,
        };
        if boundary {
            sentences.push(current.join(" "));
            current.clear();
        }
    }
    sentences
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_keeps_terminal_period_on_word() {
        let toks = tokenize("The cat sat.");
        assert_eq!(toks.len(), 3);
        assert!(toks.iter().all(|t| t.is_word));
        assert_eq!(toks[1].letters, 3);
        assert_eq!(toks[2].surface, "sat.");
        assert_eq!(toks[2].letters, 3);
        assert_eq!(toks[2].bare(), "sat");
    }

    #[test]
    fn tokenize_empty() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \n\t").is_empty());
    }

    #[test]
    fn hyphenated_compound() {
        let toks = tokenize("co-operate");
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].letters, 9);
        assert_eq!(toks[0].syllables, 4);
    }

    #[test]
    fn punctuation_only_chunk_is_not_a_word() {
        let toks = tokenize("well \u{2014} maybe");
        assert_eq!(toks.len(), 3);
        assert!(!toks[1].is_word);
        assert_eq!(toks[1].letters, 0);
        assert_eq!(toks[1].syllables, 0);
    }

    #[test]
    fn syllable_examples() {
        assert_eq!(count_syllables("cat").unwrap(), 1);
        assert_eq!(count_syllables("readability").unwrap(), 5);
        assert_eq!(count_syllables("the").unwrap(), 1);
        assert_eq!(count_syllables("make").unwrap(), 1);
        assert_eq!(count_syllables("agree").unwrap(), 2);
        assert_eq!(count_syllables("don't").unwrap(), 1);
        assert_eq!(count_syllables("University").unwrap(), 5);
        assert_eq!(count_syllables("rhythm").unwrap(), 1);
    }

    #[test]
    fn syllables_require_a_letter() {
        assert!(matches!(count_syllables("..."), Err(Error::NoLetters(_))));
        assert!(count_syllables("1990").is_err());
        // but a numeric token is still a word with one syllable
        let t = Token::new("1990");
        assert!(t.is_word);
        assert_eq!(t.syllables, 1);
        assert_eq!(t.letters, 4);
    }

    #[test]
    fn sentence_split_basic() {
        let s = split_sentences("The cat sat. It was happy! Was it? Yes.");
        assert_eq!(s, vec!["The cat sat.", "It was happy!", "Was it?", "Yes."]);
    }

    #[test]
    fn sentence_split_abbreviations_and_initials() {
        let s = split_sentences("Mr. Smith met Dr. Jones in the U.S. today. J. K. Rowling wrote it.");
        assert_eq!(
            s,
            vec![
                "Mr. Smith met Dr. Jones in the U.S. today.",
                "J. K. Rowling wrote it."
            ]
        );
    }

    #[test]
    fn sentence_split_lowercase_continuation() {
        let s = split_sentences("It cost 3.5 million. then it rose.");
        assert_eq!(s.len(), 1);
        let s = split_sentences("He said \"Stop.\" Then he left.");
        assert_eq!(s, vec!["He said \"Stop.\"", "Then he left."]);
    }
}
