use std::collections::HashMap;
use std::fmt;

use super::PresentationError;

/// Ordered set of symbol names. Symbol `i` is the `i`-th name given at construction.
#[derive(Clone)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
    single_char: bool,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self, PresentationError> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(PresentationError::EmptyAlphabet);
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() {
                return Err(PresentationError::EmptySymbolName);
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(PresentationError::DuplicateSymbol(s.clone()));
            }
        }
        let single_char = symbols.iter().all(|s| s.chars().count() == 1);
        Ok(Alphabet {
            symbols,
            index,
            single_char,
        })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn name(&self, symbol: usize) -> &str {
        &self.symbols[symbol]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Symbols are written back to back when every name is a single character,
    /// otherwise joined with `.`.
    pub fn format_word(&self, word: &Word) -> String {
        let sep = if self.single_char { "" } else { "." };
        word.symbols()
            .iter()
            .map(|&s| self.symbols[s].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, PresentationError> {
        if text.is_empty() {
            return Ok(Word::empty());
        }
        let lookup = |name: &str| {
            self.index_of(name)
                .ok_or_else(|| PresentationError::UnknownSymbol(name.to_string()))
        };
        let symbols = if self.single_char {
            text.chars()
                .map(|c| lookup(c.encode_utf8(&mut [0; 4])))
                .collect::<Result<Vec<_>, _>>()?
        } else {
            text.split('.').map(lookup).collect::<Result<Vec<_>, _>>()?
        };
        Ok(Word(symbols))
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Alphabet").field(&self.symbols).finish()
    }
}

/// A finite word as a sequence of alphabet indices. Ordered lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(symbols: Vec<usize>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn prepend(&self, symbol: usize) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(symbol);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn append(&self, symbol: usize) -> Word {
        let mut v = self.0.clone();
        v.push(symbol);
        Word(v)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len.min(self.0.len())].to_vec())
    }

    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        self.0.strip_prefix(prefix.symbols()).map(|rest| Word(rest.to_vec()))
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_duplicates() {
        assert!(matches!(
            Alphabet::new(Vec::<String>::new()),
            Err(PresentationError::EmptyAlphabet)
        ));
        assert!(matches!(
            Alphabet::new(["a", "b", "a"]),
            Err(PresentationError::DuplicateSymbol(s)) if s == "a"
        ));
    }

    #[test]
    fn word_formatting_depends_on_symbol_width() {
        let short = Alphabet::new(["0", "1"]).unwrap();
        let w = Word::new(vec![0, 1, 1]);
        assert_eq!(short.format_word(&w), "011");
        assert_eq!(short.parse_word("011").unwrap(), w);

        let long = Alphabet::new(["ab", "c"]).unwrap();
        assert_eq!(long.format_word(&w), "ab.c.c");
        assert_eq!(long.parse_word("ab.c.c").unwrap(), w);
        assert_eq!(long.parse_word("").unwrap(), Word::empty());
        assert!(long.parse_word("ab.x").is_err());
    }
}
