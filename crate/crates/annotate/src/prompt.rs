//! Prompt variants and their templates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Placeholder replaced by the unit text.
pub const TEXT_SLOT: &str = "{text}";

const SCORE: &str = "Read the text below. \n\nThen, indicate the readability of the text, on a scale from 1 (very easy to read and understand) to 100 (very difficult to read and understand). \n\nPlease answer with a single number in the range 1 to 100.\n\n{text}";

const SCORE_CRITERIA: &str = "Read the text below. \n\nThen, indicate the readability of the text, on a scale from 1 (very easy to read and understand) to 100 (very difficult to read and understand). \n\nTo determine your score, consider factors such as the complexity of sentence structure, the complexity of discourse structure, the vocabulary used, and the overall clarity of the text.\n\nPlease answer with a single number in the range 1 to 100.\n\n{text}";

const GRADE: &str = "Read the text below. \n\nThen, indicate the readability level of the text by specifying the school grade level (1\u{2013}12) for which the text would be most appropriate.\n\nPlease answer with a single number in the range 1 to 12.\n\n{text}";

const GRADE_CRITERIA: &str = "Read the text below. \n\nThen, indicate the readability level of the text by specifying the school grade level (1\u{2013}12) for which the text would be most appropriate.\n\nTo determine your score, consider factors such as the complexity of sentence structure, the complexity of discourse structure, the vocabulary used, and the overall clarity of the text.\n\nPlease answer with a single number in the range 1 to 12.\n\n{text}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Score,
    ScoreCriteria,
    Grade,
    #[default]
    GradeCriteria,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Score,
        Variant::ScoreCriteria,
        Variant::Grade,
        Variant::GradeCriteria,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Score => "score",
            Variant::ScoreCriteria => "score_criteria",
            Variant::Grade => "grade",
            Variant::GradeCriteria => "grade_criteria",
        }
    }

    /// Inclusive bounds of a valid answer.
    pub fn output_range(self) -> (i64, i64) {
        match self {
            Variant::Score | Variant::ScoreCriteria => (1, 100),
            Variant::Grade | Variant::GradeCriteria => (1, 12),
        }
    }

    fn builtin_template(self) -> &'static str {
        match self {
            Variant::Score => SCORE,
            Variant::ScoreCriteria => SCORE_CRITERIA,
            Variant::Grade => GRADE,
            Variant::GradeCriteria => GRADE_CRITERIA,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown prompt variant `{s}`")))
    }
}

/// A validated template with exactly one text slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PromptSpec {
    pub variant: Variant,
    template: String,
    pub output_range: (i64, i64),
}

impl PromptSpec {
    pub fn new(variant: Variant, template: impl Into<String>) -> Result<Self> {
        let template = template.into();
        let slots = template.matches(TEXT_SLOT).count();
        if slots != 1 {
            return Err(Error::Config(format!(
                "template for `{variant}` must contain exactly one {TEXT_SLOT} slot, found {slots}"
            )));
        }
        Ok(PromptSpec {
            variant,
            template,
            output_range: variant.output_range(),
        })
    }

    pub fn builtin(variant: Variant) -> Self {
        PromptSpec::new(variant, variant.builtin_template()).expect("built-in templates have one slot")
    }

    pub fn template(&self) -> &str {
        &self.template
    }

    pub fn render(&self, text: &str) -> Result<String> {
        if text.trim().is_empty() {
            return Err(Error::EmptyText);
        }
        Ok(self.template.replacen(TEXT_SLOT, text, 1))
    }

    /// Instruction appended to the prompt after an unreadable answer.
    pub fn repair_instruction(&self) -> String {
        let (lo, hi) = self.output_range;
        format!(
            "\n\nYour previous answer could not be read. Reply with only a single number in the range {lo} to {hi}."
        )
    }
}

pub fn render_prompt(variant: Variant, text: &str) -> Result<String> {
    PromptSpec::builtin(variant).render(text)
}
