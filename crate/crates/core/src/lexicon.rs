//! Closed-class word dictionary and the dictionary-driven tokenizer.
//!
//! The tokenizer scans left to right. At every word it tries the longest
//! lexicon phrase first (up to [`Lexicon::max_phrase_len`] words, compared
//! case-insensitively); anything left over is an open-class `UNKNOWN` word.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// The lexicon shipped with the crate.
pub const DEFAULT_LEXICON: &str = include_str!("../data/default.lexicon");

/// Token classes produced by the lexer. `A`..`J` are closed classes whose
/// members come only from a [`Lexicon`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenClass {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    Unknown,
    Ws,
    Punct,
    Newline,
    EndOfInput,
}

impl TokenClass {
    pub const ALL: [TokenClass; 15] = [
        TokenClass::A,
        TokenClass::B,
        TokenClass::C,
        TokenClass::D,
        TokenClass::E,
        TokenClass::F,
        TokenClass::G,
        TokenClass::H,
        TokenClass::I,
        TokenClass::J,
        TokenClass::Unknown,
        TokenClass::Ws,
        TokenClass::Punct,
        TokenClass::Newline,
        TokenClass::EndOfInput,
    ];

    pub const CLOSED: [TokenClass; 10] = [
        TokenClass::A,
        TokenClass::B,
        TokenClass::C,
        TokenClass::D,
        TokenClass::E,
        TokenClass::F,
        TokenClass::G,
        TokenClass::H,
        TokenClass::I,
        TokenClass::J,
    ];

    pub fn is_closed(self) -> bool {
        (self as u8) <= (TokenClass::J as u8)
    }

    /// Subject pronoun classes.
    pub fn is_pronoun(self) -> bool {
        matches!(self, TokenClass::A | TokenClass::B | TokenClass::C)
    }

    /// Whitespace-like classes that never reach the parser.
    pub fn is_layout(self) -> bool {
        matches!(
            self,
            TokenClass::Ws | TokenClass::Newline | TokenClass::EndOfInput
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TokenClass::A => "A",
            TokenClass::B => "B",
            TokenClass::C => "C",
            TokenClass::D => "D",
            TokenClass::E => "E",
            TokenClass::F => "F",
            TokenClass::G => "G",
            TokenClass::H => "H",
            TokenClass::I => "I",
            TokenClass::J => "J",
            TokenClass::Unknown => "UNKNOWN",
            TokenClass::Ws => "WS",
            TokenClass::Punct => "PUNCT",
            TokenClass::Newline => "NEWLINE",
            TokenClass::EndOfInput => "END_OF_INPUT",
        }
    }
}

impl fmt::Display for TokenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown token class `{0}`")]
pub struct UnknownClass(pub String);

impl FromStr for TokenClass {
    type Err = UnknownClass;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TokenClass::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownClass(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("line {line}: expected `<lexeme><TAB><class>`")]
    MissingTab { line: usize },
    #[error("line {line}: empty lexeme")]
    EmptyLexeme { line: usize },
    #[error("line {line}: lexeme `{lexeme}` contains characters outside words")]
    InvalidLexeme { line: usize, lexeme: String },
    #[error("line {line}: `{tag}` is not a lexicon class (expected A..J)")]
    UnknownClass { line: usize, tag: String },
    #[error("line {line}: duplicate lexeme `{lexeme}` (first defined on line {first_line})")]
    Duplicate {
        line: usize,
        first_line: usize,
        lexeme: String,
    },
}

/// Characters that make up a word: letters, digits, hyphens and underscores.
pub fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '-' || c == '_'
}

pub fn is_punct_char(c: char) -> bool {
    matches!(c, '.' | ',' | '?' | '!' | ';' | ':')
}

/// Splits text into lowercased words using the tokenizer's word rule.
pub fn words(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !is_word_char(c))
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: HashMap<String, TokenClass>,
    // Source order of entries, used by `dump`.
    order: Vec<String>,
    max_phrase_len: usize,
}

impl Lexicon {
    /// Parses a lexicon file: one `<lexeme><TAB><class>` entry per line,
    /// `#` comments and blank lines ignored.
    pub fn load(source: &str) -> Result<Self, LexiconError> {
        let mut lexicon = Lexicon::default();
        let mut first_seen: HashMap<String, usize> = HashMap::new();
        for (idx, raw) in source.lines().enumerate() {
            let line = idx + 1;
            let raw = raw.strip_suffix('\r').unwrap_or(raw);
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let (lexeme, tag) = raw
                .rsplit_once('\t')
                .ok_or(LexiconError::MissingTab { line })?;
            let parts: Vec<&str> = lexeme.split_whitespace().collect();
            if parts.is_empty() {
                return Err(LexiconError::EmptyLexeme { line });
            }
            if parts.iter().any(|p| !p.chars().all(is_word_char)) {
                return Err(LexiconError::InvalidLexeme {
                    line,
                    lexeme: lexeme.trim().to_string(),
                });
            }
            let tag = tag.trim();
            let class = match tag.parse::<TokenClass>() {
                Ok(c) if c.is_closed() => c,
                _ => {
                    return Err(LexiconError::UnknownClass {
                        line,
                        tag: tag.to_string(),
                    })
                }
            };
            let key = parts.join(" ").to_lowercase();
            if let Some(&first_line) = first_seen.get(&key) {
                return Err(LexiconError::Duplicate {
                    line,
                    first_line,
                    lexeme: key,
                });
            }
            first_seen.insert(key.clone(), line);
            lexicon.insert_unchecked(key, class, parts.len());
        }
        Ok(lexicon)
    }

    pub fn default_lexicon() -> Self {
        Self::load(DEFAULT_LEXICON).expect("embedded lexicon is valid")
    }

    fn insert_unchecked(&mut self, key: String, class: TokenClass, word_count: usize) {
        self.max_phrase_len = self.max_phrase_len.max(word_count);
        self.order.push(key.clone());
        self.entries.insert(key, class);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of words in the longest entry.
    pub fn max_phrase_len(&self) -> usize {
        self.max_phrase_len
    }

    pub fn class_of(&self, normalized: &str) -> Option<TokenClass> {
        self.entries.get(normalized).copied()
    }

    /// Entries in file order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, TokenClass)> {
        self.order
            .iter()
            .map(move |k| (k.as_str(), self.entries[k]))
    }

    /// Renders the lexicon back into the file format.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (lexeme, class) in self.entries() {
            out.push_str(lexeme);
            out.push('\t');
            out.push_str(class.as_str());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub lexeme: String,
    pub normalized: String,
    pub class: TokenClass,
    /// Byte range `start..end` within the source line.
    pub span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    pub source: String,
}

impl TokenStream {
    /// Tokens the parser sees: everything except whitespace and the end marker.
    pub fn significant(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| !t.class.is_layout())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PieceKind {
    Word,
    Space,
    Newline,
    Punct,
    Other,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    kind: PieceKind,
    start: usize,
    end: usize,
}

fn kind_of(c: char) -> PieceKind {
    if is_word_char(c) {
        PieceKind::Word
    } else if c == '\n' || c == '\r' {
        PieceKind::Newline
    } else if c.is_whitespace() {
        PieceKind::Space
    } else if is_punct_char(c) {
        PieceKind::Punct
    } else {
        PieceKind::Other
    }
}

// Words and whitespace are maximal runs; punctuation is one piece per char;
// other symbols are single-char pieces that become separators.
fn pieces(line: &str) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::new();
    for (i, c) in line.char_indices() {
        let kind = kind_of(c);
        let end = i + c.len_utf8();
        match out.last_mut() {
            Some(last)
                if last.kind == kind
                    && matches!(kind, PieceKind::Word | PieceKind::Space | PieceKind::Newline) =>
            {
                last.end = end;
            }
            _ => out.push(Piece {
                kind,
                start: i,
                end,
            }),
        }
    }
    out
}

/// Tokenizes one statement line against `lex`. Never fails: words missing
/// from the lexicon become `UNKNOWN` tokens, and characters that are neither
/// words, whitespace nor punctuation are left as inter-token separators.
pub fn tokenize(line: &str, lex: &Lexicon) -> TokenStream {
    let pieces = pieces(line);
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < pieces.len() {
        let piece = pieces[i];
        match piece.kind {
            PieceKind::Word => {
                let (class, last) = longest_match(line, &pieces, i, lex);
                let end = pieces[last].end;
                let lexeme = &line[piece.start..end];
                let normalized = match class {
                    TokenClass::Unknown => lexeme.to_lowercase(),
                    _ => pieces[i..=last]
                        .iter()
                        .filter(|p| p.kind == PieceKind::Word)
                        .map(|p| line[p.start..p.end].to_lowercase())
                        .collect::<Vec<_>>()
                        .join(" "),
                };
                tokens.push(Token {
                    lexeme: lexeme.to_string(),
                    normalized,
                    class,
                    span: (piece.start, end),
                });
                i = last + 1;
                continue;
            }
            PieceKind::Space | PieceKind::Newline | PieceKind::Punct => {
                let class = match piece.kind {
                    PieceKind::Space => TokenClass::Ws,
                    PieceKind::Newline => TokenClass::Newline,
                    _ => TokenClass::Punct,
                };
                let text = &line[piece.start..piece.end];
                tokens.push(Token {
                    lexeme: text.to_string(),
                    normalized: text.to_string(),
                    class,
                    span: (piece.start, piece.end),
                });
            }
            PieceKind::Other => {}
        }
        i += 1;
    }
    tokens.push(Token {
        lexeme: String::new(),
        normalized: String::new(),
        class: TokenClass::EndOfInput,
        span: (line.len(), line.len()),
    });
    TokenStream {
        tokens,
        source: line.to_string(),
    }
}

// Returns the class and the index of the last piece of the longest lexicon
// phrase starting at word piece `first`. Phrase words may be separated only
// by plain whitespace.
fn longest_match(line: &str, pieces: &[Piece], first: usize, lex: &Lexicon) -> (TokenClass, usize) {
    let mut word_ends = vec![first];
    let mut j = first;
    while word_ends.len() < lex.max_phrase_len() {
        match (pieces.get(j + 1), pieces.get(j + 2)) {
            (Some(sp), Some(w)) if sp.kind == PieceKind::Space && w.kind == PieceKind::Word => {
                j += 2;
                word_ends.push(j);
            }
            _ => break,
        }
    }
    for &last in word_ends.iter().rev() {
        let key = pieces[first..=last]
            .iter()
            .filter(|p| p.kind == PieceKind::Word)
            .map(|p| line[p.start..p.end].to_lowercase())
            .collect::<Vec<_>>()
            .join(" ");
        if let Some(class) = lex.class_of(&key) {
            return (class, last);
        }
    }
    (TokenClass::Unknown, first)
}

/// Rebuilds the source line from token spans and the separator text between
/// them.
pub fn detokenize(ts: &TokenStream) -> String {
    let mut out = String::with_capacity(ts.source.len());
    let mut cursor = 0;
    for token in &ts.tokens {
        let (start, end) = token.span;
        out.push_str(&ts.source[cursor..start]);
        out.push_str(&ts.source[start..end]);
        cursor = end;
    }
    out.push_str(&ts.source[cursor..]);
    out
}
