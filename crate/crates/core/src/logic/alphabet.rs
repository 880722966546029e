use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of the fresh coloring proposition added by relativization.
/// It is reserved: a [`Partition`] may not declare it.
pub const COLOR_PROP: &str = "p";

/// Upper bound on the number of propositions in one alphabet.
pub const MAX_APS: usize = 24;

/// A letter: the set of propositions that hold, as a bitset over an
/// [`Alphabet`] (bit `i` set iff `aps[i]` is present).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Letter(pub u32);

impl Letter {
    pub const EMPTY: Letter = Letter(0);

    pub fn has(self, bit: usize) -> bool {
        self.0 >> bit & 1 == 1
    }

    pub fn with(self, bit: usize, value: bool) -> Letter {
        if value {
            Letter(self.0 | 1 << bit)
        } else {
            Letter(self.0 & !(1 << bit))
        }
    }
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Ordered list of atomic propositions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    aps: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(aps: impl IntoIterator<Item = S>) -> Result<Self> {
        let aps: Vec<String> = aps.into_iter().map(Into::into).collect();
        if aps.len() > MAX_APS {
            return Err(Error::Alphabet(format!(
                "{} propositions, at most {MAX_APS} supported",
                aps.len()
            )));
        }
        for (i, a) in aps.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::Alphabet("empty proposition name".into()));
            }
            if aps[..i].contains(a) {
                return Err(Error::Alphabet(format!("duplicate proposition `{a}`")));
            }
        }
        Ok(Alphabet { aps })
    }

    pub fn aps(&self) -> &[String] {
        &self.aps
    }

    pub fn len(&self) -> usize {
        self.aps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aps.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.aps.iter().position(|a| a == name)
    }

    /// Number of letters, `2^|aps|`.
    pub fn letter_count(&self) -> u32 {
        1 << self.aps.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.letter_count()).map(Letter)
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.0 < self.letter_count()
    }

    /// Builds a letter from proposition names; unknown names are an error.
    pub fn letter<S: AsRef<str>>(&self, props: impl IntoIterator<Item = S>) -> Result<Letter> {
        let mut l = Letter::EMPTY;
        for p in props {
            let p = p.as_ref();
            let i = self
                .index_of(p)
                .ok_or_else(|| Error::Alphabet(format!("unknown proposition `{p}`")))?;
            l = l.with(i, true);
        }
        Ok(l)
    }

    pub fn names(&self, letter: Letter) -> Vec<&str> {
        (0..self.aps.len())
            .filter(|&i| letter.has(i))
            .map(|i| self.aps[i].as_str())
            .collect()
    }

    /// `{a,b}` rendering used by the lasso syntax.
    pub fn render(&self, letter: Letter) -> String {
        format!("{{{}}}", self.names(letter).join(","))
    }

    /// This alphabet extended by the coloring proposition as last entry.
    pub fn with_color(&self) -> Result<Alphabet> {
        if self.index_of(COLOR_PROP).is_some() {
            return Err(Error::Alphabet(format!(
                "`{COLOR_PROP}` is reserved for the coloring"
            )));
        }
        Alphabet::new(self.aps.iter().cloned().chain([COLOR_PROP.to_string()]))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.aps.join(", "))
    }
}

/// Split of the propositions into those controlled by Player I (inputs)
/// and by Player O (outputs).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    inputs: Vec<String>,
    outputs: Vec<String>,
}

impl Partition {
    pub fn new<S: Into<String>>(
        inputs: impl IntoIterator<Item = S>,
        outputs: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let inputs: Vec<String> = inputs.into_iter().map(Into::into).collect();
        let outputs: Vec<String> = outputs.into_iter().map(Into::into).collect();
        for name in inputs.iter().chain(&outputs) {
            if !is_identifier(name) {
                return Err(Error::Alphabet(format!("`{name}` is not an identifier")));
            }
            if name == COLOR_PROP {
                return Err(Error::Alphabet(format!(
                    "`{COLOR_PROP}` is reserved for the coloring"
                )));
            }
            if super::parser::is_keyword(name) {
                return Err(Error::Alphabet(format!("`{name}` is an operator keyword")));
            }
        }
        if let Some(shared) = inputs.iter().find(|i| outputs.contains(i)) {
            return Err(Error::Alphabet(format!(
                "`{shared}` is declared both as input and output"
            )));
        }
        // duplicates and size limits
        Alphabet::new(inputs.iter().chain(&outputs).cloned())?;
        Ok(Partition { inputs, outputs })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    /// Inputs followed by outputs.
    pub fn alphabet(&self) -> Alphabet {
        Alphabet {
            aps: self.inputs.iter().chain(&self.outputs).cloned().collect(),
        }
    }

    /// Inputs, outputs, then the coloring proposition.
    pub fn colored_alphabet(&self) -> Alphabet {
        Alphabet {
            aps: self
                .inputs
                .iter()
                .chain(&self.outputs)
                .cloned()
                .chain([COLOR_PROP.to_string()])
                .collect(),
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.inputs.iter().chain(&self.outputs).any(|a| a == name)
    }
}
