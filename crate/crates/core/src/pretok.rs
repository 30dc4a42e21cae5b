//! Word splitting applied before counting and segmentation.

use std::fmt;
use std::str::FromStr;

use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pretokenize {
    /// Split on Unicode whitespace only.
    Whitespace,
    /// Split on whitespace, then emit every punctuation character as its own token.
    #[default]
    WhitespacePunct,
}

impl Pretokenize {
    pub fn tokens(self, line: &str) -> Vec<&str> {
        let mut out = Vec::new();
        for word in line.split_whitespace() {
            match self {
                Pretokenize::Whitespace => out.push(word),
                Pretokenize::WhitespacePunct => split_punct(word, &mut out),
            }
        }
        out
    }
}

fn split_punct<'a>(word: &'a str, out: &mut Vec<&'a str>) {
    let mut start = 0;
    for (i, c) in word.char_indices() {
        if is_punctuation(c) {
            if start < i {
                out.push(&word[start..i]);
            }
            let end = i + c.len_utf8();
            out.push(&word[i..end]);
            start = end;
        }
    }
    if start < word.len() {
        out.push(&word[start..]);
    }
}

pub fn is_punctuation(c: char) -> bool {
    c.general_category_group() == GeneralCategoryGroup::Punctuation
}

impl FromStr for Pretokenize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ws" | "whitespace" => Ok(Pretokenize::Whitespace),
            "ws+punct" | "whitespace+punct" => Ok(Pretokenize::WhitespacePunct),
            other => Err(format!("unknown pretokenize mode {other:?}")),
        }
    }
}

impl fmt::Display for Pretokenize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pretokenize::Whitespace => "ws",
            Pretokenize::WhitespacePunct => "ws+punct",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitespace_only() {
        assert_eq!(
            Pretokenize::Whitespace.tokens("  a.  b\tc "),
            ["a.", "b", "c"]
        );
    }

    #[test]
    fn punctuation_is_split_per_character() {
        let t = Pretokenize::WhitespacePunct;
        assert_eq!(t.tokens("a."), ["a", "."]);
        assert_eq!(
            t.tokens("l'homme, (oui)..."),
            ["l", "'", "homme", ",", "(", "oui", ")", ".", ".", "."]
        );
        assert_eq!(t.tokens("«ça»"), ["«", "ça", "»"]);
        assert_eq!(t.tokens("x+1"), ["x+1"]);
    }
}
