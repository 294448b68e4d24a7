//! Pattern specifications and the TOML pattern-config format.
//!
//! A config names a set of content classes and an ordered list of patterns:
//!
//! ```toml
//! [content_classes.default]
//! pattern = "[\\p{L}\\p{N}][\\p{L}\\p{N} ()'.,*/-]*"
//! max_chars = 60
//! max_words = 10
//! require_letter = true
//!
//! [[patterns]]
//! id = "P1a"
//! prefix = "line_start"
//! content = "default"
//! terminator = "colon_newline"
//! level = "title"
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Denylist, PatternError};
use crate::docmodel::Level;

/// What must precede the heading content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrefixClass {
    /// A single newline.
    LineStart,
    /// Two consecutive newlines.
    BlankLine,
    /// The beginning of the document.
    DocStart,
}

/// What must follow the heading content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TerminatorClass {
    /// A colon ending the line (or the document).
    ColonNewline,
    /// A colon followed by more text on the same line.
    ColonInline,
}

impl PrefixClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PrefixClass::LineStart => "line_start",
            PrefixClass::BlankLine => "blank_line",
            PrefixClass::DocStart => "doc_start",
        }
    }
}

impl FromStr for PrefixClass {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "line_start" => Ok(PrefixClass::LineStart),
            "blank_line" => Ok(PrefixClass::BlankLine),
            "doc_start" => Ok(PrefixClass::DocStart),
            _ => Err(()),
        }
    }
}

impl TerminatorClass {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminatorClass::ColonNewline => "colon_newline",
            TerminatorClass::ColonInline => "colon_inline",
        }
    }

    /// Headings alone on their line are titles; headings followed by text
    /// on the same line are subtitles.
    pub fn default_level(self) -> Level {
        match self {
            TerminatorClass::ColonNewline => Level::Title,
            TerminatorClass::ColonInline => Level::Subtitle,
        }
    }
}

impl FromStr for TerminatorClass {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "colon_newline" => Ok(TerminatorClass::ColonNewline),
            "colon_inline" => Ok(TerminatorClass::ColonInline),
            _ => Err(()),
        }
    }
}

impl fmt::Display for PrefixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for TerminatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A named definition of what counts as heading text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContentClass {
    /// Regex fragment matched at the content start; implicitly anchored.
    pub pattern: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_chars: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_words: Option<usize>,
    #[serde(default)]
    pub require_letter: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSpec {
    pub id: String,
    pub prefix: PrefixClass,
    pub content: String,
    pub terminator: TerminatorClass,
    pub level: Level,
}

impl PatternSpec {
    pub fn new(
        id: impl Into<String>,
        prefix: PrefixClass,
        content: impl Into<String>,
        terminator: TerminatorClass,
    ) -> Self {
        Self {
            id: id.into(),
            prefix,
            content: content.into(),
            terminator,
            level: terminator.default_level(),
        }
    }
}

/// Ordered pattern specs (earlier wins ties), their content classes and the
/// false-positive denylist.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PatternSet {
    pub specs: Vec<PatternSpec>,
    pub content_classes: BTreeMap<String, ContentClass>,
    pub denylist: Denylist,
}

const TITLE_CHARS: &str = r"\p{L}\p{N} ()'.,*/-";

impl PatternSet {
    /// The built-in twelve-pattern catalog.
    ///
    /// P1a–P1c are the newline / blank-line / document-start variants of a
    /// heading alone on its line. P2 covers numbered headings ("2. Plan:"),
    /// P3 all-caps headings and P4 inline headings followed by text, each
    /// in the same three prefix variants.
    pub fn builtin() -> Self {
        let mut content_classes = BTreeMap::new();
        content_classes.insert(
            "default".to_string(),
            ContentClass {
                pattern: format!(r"[\p{{L}}\p{{N}}][{TITLE_CHARS}]*"),
                max_chars: Some(60),
                max_words: Some(10),
                require_letter: true,
            },
        );
        content_classes.insert(
            "numbered".to_string(),
            ContentClass {
                pattern: format!(r"\p{{N}}{{1,2}}\.[ \t]*[\p{{L}}\p{{N}}][{TITLE_CHARS}]*"),
                max_chars: Some(64),
                max_words: Some(11),
                require_letter: true,
            },
        );
        content_classes.insert(
            "all_caps".to_string(),
            ContentClass {
                pattern: r"[\p{Lu}\p{N}][\p{Lu}\p{N} ()'.,*/&-]*".to_string(),
                max_chars: Some(60),
                max_words: Some(10),
                require_letter: true,
            },
        );

        use PrefixClass::*;
        use TerminatorClass::*;
        let families = [
            ("P1", "default", ColonNewline),
            ("P2", "numbered", ColonNewline),
            ("P3", "all_caps", ColonNewline),
            ("P4", "default", ColonInline),
        ];
        let mut specs = Vec::with_capacity(12);
        for (family, class, terminator) in families {
            for (suffix, prefix) in [("a", LineStart), ("b", BlankLine), ("c", DocStart)] {
                specs.push(PatternSpec::new(
                    format!("{family}{suffix}"),
                    prefix,
                    class,
                    terminator,
                ));
            }
        }
        Self {
            specs,
            content_classes,
            denylist: Denylist::new(),
        }
    }

    pub fn with_denylist(mut self, denylist: Denylist) -> Self {
        self.denylist = denylist;
        self
    }

    /// Parses a TOML pattern config. Enum fields are validated here so that
    /// errors can name the offending spec.
    pub fn from_toml(source: &str) -> Result<Self, PatternError> {
        let raw: RawConfig = toml::from_str(source).map_err(|e| PatternError::Syntax(e.to_string()))?;
        let mut specs = Vec::with_capacity(raw.patterns.len());
        for spec in raw.patterns {
            let bad = |field: &'static str, value: &str| PatternError::UnknownValue {
                spec_id: spec.id.clone(),
                field,
                value: value.to_string(),
            };
            let prefix = spec.prefix.parse().map_err(|_| bad("prefix", &spec.prefix))?;
            let terminator: TerminatorClass = spec
                .terminator
                .parse()
                .map_err(|_| bad("terminator", &spec.terminator))?;
            let level = match spec.level.as_deref() {
                None => terminator.default_level(),
                Some(l) => l.parse().map_err(|_| bad("level", l))?,
            };
            specs.push(PatternSpec {
                id: spec.id,
                prefix,
                content: spec.content,
                terminator,
                level,
            });
        }
        Ok(Self {
            specs,
            content_classes: raw.content_classes,
            denylist: raw.denylist.iter().collect(),
        })
    }

    pub fn to_toml(&self) -> String {
        let raw = RawConfig {
            denylist: self.denylist.iter().map(str::to_string).collect(),
            content_classes: self.content_classes.clone(),
            patterns: self
                .specs
                .iter()
                .map(|s| RawSpec {
                    id: s.id.clone(),
                    prefix: s.prefix.as_str().to_string(),
                    content: s.content.clone(),
                    terminator: s.terminator.as_str().to_string(),
                    level: Some(s.level.as_str().to_string()),
                })
                .collect(),
        };
        toml::to_string_pretty(&raw).expect("pattern config always serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    denylist: Vec<String>,
    #[serde(default)]
    content_classes: BTreeMap<String, ContentClass>,
    #[serde(default)]
    patterns: Vec<RawSpec>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    id: String,
    prefix: String,
    content: String,
    terminator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    level: Option<String>,
}
