//! Transition-graph grammar and the LL statement parser.
//!
//! A statement is accepted when its class sequence, bracketed by `START`
//! and `END`, is a path through the [`TransitionGraph`]. The parser makes a
//! single left-to-right pass over the classes (the language is regular, so
//! one token of lookahead is enough) and fills a [`StatementAst`] and a
//! [`SymbolTable`] as it goes.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::lexicon::{Token, TokenClass, TokenStream};

/// The transition graph shipped with the crate.
pub const DEFAULT_GRAMMAR: &str = include_str!("../data/default.grammar");

/// Pragma line that allows pronoun -> J edges in a grammar file.
pub const OVERRIDE_JK_PRAGMA: &str = "!override-jk";

/// Productions of the statement grammar, written out as EBNF. Acceptance is
/// decided by the transition graph; this listing documents the language the
/// default graph admits.
pub const PRODUCTIONS: [(&str, &str); 11] = [
    ("query", "statement , END_OF_INPUT"),
    ("statement", "clause | bare_keyword"),
    ("clause", "simple_clause | continuous_clause | imperative_clause"),
    ("simple_clause", "[ subject ] , verb_simple , keyword_phrase"),
    ("continuous_clause", "[ subject ] , F | G | H , verb_continuous , keyword_phrase"),
    ("imperative_clause", "J , keyword_phrase"),
    ("subject", "A | B | C"),
    ("verb_simple", "D | E"),
    ("verb_continuous", "I"),
    ("keyword_phrase", "UNKNOWN , { UNKNOWN }"),
    ("bare_keyword", "keyword_phrase"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeClass {
    Start,
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
    K,
    End,
}

impl NodeClass {
    pub const ALL: [NodeClass; 13] = [
        NodeClass::Start,
        NodeClass::A,
        NodeClass::B,
        NodeClass::C,
        NodeClass::D,
        NodeClass::E,
        NodeClass::F,
        NodeClass::G,
        NodeClass::H,
        NodeClass::I,
        NodeClass::J,
        NodeClass::K,
        NodeClass::End,
    ];

    /// The statement classes that can appear inside a sentence.
    pub const INTERIOR: [NodeClass; 11] = [
        NodeClass::A,
        NodeClass::B,
        NodeClass::C,
        NodeClass::D,
        NodeClass::E,
        NodeClass::F,
        NodeClass::G,
        NodeClass::H,
        NodeClass::I,
        NodeClass::J,
        NodeClass::K,
    ];

    pub fn is_pronoun(self) -> bool {
        matches!(self, NodeClass::A | NodeClass::B | NodeClass::C)
    }

    /// Statement class of a token. Open-class words read as `K`; layout and
    /// punctuation have no statement class.
    pub fn of_token(class: TokenClass) -> Option<NodeClass> {
        Some(match class {
            TokenClass::A => NodeClass::A,
            TokenClass::B => NodeClass::B,
            TokenClass::C => NodeClass::C,
            TokenClass::D => NodeClass::D,
            TokenClass::E => NodeClass::E,
            TokenClass::F => NodeClass::F,
            TokenClass::G => NodeClass::G,
            TokenClass::H => NodeClass::H,
            TokenClass::I => NodeClass::I,
            TokenClass::J => NodeClass::J,
            TokenClass::Unknown => NodeClass::K,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeClass::Start => "START",
            NodeClass::A => "A",
            NodeClass::B => "B",
            NodeClass::C => "C",
            NodeClass::D => "D",
            NodeClass::E => "E",
            NodeClass::F => "F",
            NodeClass::G => "G",
            NodeClass::H => "H",
            NodeClass::I => "I",
            NodeClass::J => "J",
            NodeClass::K => "K",
            NodeClass::End => "END",
        }
    }
}

impl fmt::Display for NodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeClass::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: expected `<FROM> -> <TO>`")]
    Syntax { line: usize },
    #[error("line {line}: unknown node `{tag}`")]
    UnknownNode { line: usize, tag: String },
    #[error("line {line}: no edge may enter START")]
    EdgeIntoStart { line: usize },
    #[error("line {line}: no edge may leave END")]
    EdgeFromEnd { line: usize },
    #[error("line {line}: pronoun_before_imperative: edge {from} -> J is forbidden without {OVERRIDE_JK_PRAGMA}")]
    PronounBeforeImperative { line: usize, from: NodeClass },
    #[error("END is unreachable from START")]
    EndUnreachable,
    #[error("a path from START to END avoids K")]
    KeywordBypass,
    #[error("node {0} is reachable but has no outgoing edge")]
    DeadEnd(NodeClass),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionGraph {
    edges: BTreeSet<(NodeClass, NodeClass)>,
    override_jk: bool,
}

impl TransitionGraph {
    pub fn load(source: &str) -> Result<Self, GraphError> {
        Self::load_with(source, false)
    }

    /// Loads a grammar file. `override_jk` has the same effect as the
    /// `!override-jk` pragma.
    pub fn load_with(source: &str, override_jk: bool) -> Result<Self, GraphError> {
        let mut override_jk = override_jk;
        let mut lines = Vec::new();
        for (idx, raw) in source.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == OVERRIDE_JK_PRAGMA {
                override_jk = true;
                continue;
            }
            lines.push((idx + 1, line));
        }

        let mut edges = BTreeSet::new();
        for (line, text) in lines {
            let (from, to) = text.split_once("->").ok_or(GraphError::Syntax { line })?;
            let node = |tag: &str| {
                tag.trim().parse::<NodeClass>().map_err(|tag| GraphError::UnknownNode {
                    line,
                    tag: tag.trim().to_string(),
                })
            };
            let (from, to) = (node(from)?, node(to)?);
            if to == NodeClass::Start {
                return Err(GraphError::EdgeIntoStart { line });
            }
            if from == NodeClass::End {
                return Err(GraphError::EdgeFromEnd { line });
            }
            if from.is_pronoun() && to == NodeClass::J && !override_jk {
                return Err(GraphError::PronounBeforeImperative { line, from });
            }
            edges.insert((from, to));
        }

        let graph = TransitionGraph { edges, override_jk };
        graph.validate()?;
        Ok(graph)
    }

    pub fn default_graph() -> Self {
        Self::load(DEFAULT_GRAMMAR).expect("embedded grammar is valid")
    }

    fn validate(&self) -> Result<(), GraphError> {
        let reachable = self.reachable_from(NodeClass::Start, None);
        if !reachable.contains(&NodeClass::End) {
            return Err(GraphError::EndUnreachable);
        }
        if self
            .reachable_from(NodeClass::Start, Some(NodeClass::K))
            .contains(&NodeClass::End)
        {
            return Err(GraphError::KeywordBypass);
        }
        if let Some(&node) = reachable
            .iter()
            .find(|&&n| n != NodeClass::End && self.successors(n).is_empty())
        {
            return Err(GraphError::DeadEnd(node));
        }
        Ok(())
    }

    fn reachable_from(&self, origin: NodeClass, avoid: Option<NodeClass>) -> BTreeSet<NodeClass> {
        let mut seen = BTreeSet::from([origin]);
        let mut queue = VecDeque::from([origin]);
        while let Some(node) = queue.pop_front() {
            for next in self.successors(node) {
                if Some(next) != avoid && seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        seen
    }

    pub fn has_edge(&self, from: NodeClass, to: NodeClass) -> bool {
        self.edges.contains(&(from, to))
    }

    pub fn successors(&self, from: NodeClass) -> BTreeSet<NodeClass> {
        self.edges
            .range((from, NodeClass::Start)..=(from, NodeClass::End))
            .map(|&(_, to)| to)
            .collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeClass, NodeClass)> + '_ {
        self.edges.iter().copied()
    }

    pub fn override_jk(&self) -> bool {
        self.override_jk
    }

    /// Renders the graph in the grammar file format.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        if self.override_jk {
            out.push_str(OVERRIDE_JK_PRAGMA);
            out.push('\n');
        }
        for (from, to) in self.edges() {
            out.push_str(&format!("{from} -> {to}\n"));
        }
        out
    }
}

/// Every START -> END path with at most `max_len` interior nodes, as class
/// sequences without the START/END brackets.
pub fn enumerate_patterns(g: &TransitionGraph, max_len: usize) -> BTreeSet<Vec<NodeClass>> {
    fn walk(
        g: &TransitionGraph,
        node: NodeClass,
        max_len: usize,
        prefix: &mut Vec<NodeClass>,
        out: &mut BTreeSet<Vec<NodeClass>>,
    ) {
        for next in g.successors(node) {
            if next == NodeClass::End {
                if !prefix.is_empty() {
                    out.insert(prefix.clone());
                }
            } else if prefix.len() < max_len {
                prefix.push(next);
                walk(g, next, max_len, prefix, out);
                prefix.pop();
            }
        }
    }

    let mut out = BTreeSet::new();
    if max_len > 0 {
        walk(g, NodeClass::Start, max_len, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClauseKind {
    Simple,
    Continuous,
    Imperative,
    Bare,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatementAst {
    pub subject: Option<Token>,
    pub auxiliary: Option<Token>,
    pub verb: Option<Token>,
    /// Closed-class tokens in the order they were consumed.
    pub closed: Vec<Token>,
    pub keyword_phrase: Vec<Token>,
    pub clause_kind: ClauseKind,
}

impl StatementAst {
    /// The accepted class path without START/END, one K per keyword word.
    pub fn path(&self) -> Vec<NodeClass> {
        self.closed
            .iter()
            .filter_map(|t| NodeClass::of_token(t.class))
            .chain(self.keyword_phrase.iter().map(|_| NodeClass::K))
            .collect()
    }

    /// Keyword words, lowercased.
    pub fn keywords(&self) -> impl Iterator<Item = &str> {
        self.keyword_phrase.iter().map(|t| t.normalized.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Disposition {
    Consumed,
    PromotedToK,
    DiscardedNoise,
    DiscardedPunct,
}

impl Disposition {
    pub fn as_str(self) -> &'static str {
        match self {
            Disposition::Consumed => "consumed",
            Disposition::PromotedToK => "promoted_to_K",
            Disposition::DiscardedNoise => "discarded_noise",
            Disposition::DiscardedPunct => "discarded_punct",
        }
    }
}

impl fmt::Display for Disposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolRow {
    pub lexeme: String,
    pub class: TokenClass,
    pub span: (usize, usize),
    pub disposition: Disposition,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    pub rows: Vec<SymbolRow>,
}

impl SymbolTable {
    pub fn with(&self, disposition: Disposition) -> impl Iterator<Item = &SymbolRow> {
        self.rows.iter().filter(move |r| r.disposition == disposition)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    EmptyStatement,
    MissingKeyword,
    IllegalTransition,
    PronounBeforeImperative,
}

impl ParseErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseErrorKind::EmptyStatement => "empty_statement",
            ParseErrorKind::MissingKeyword => "missing_keyword",
            ParseErrorKind::IllegalTransition => "illegal_transition",
            ParseErrorKind::PronounBeforeImperative => "pronoun_before_imperative",
        }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub at: (usize, usize),
    pub expected: BTreeSet<NodeClass>,
    pub found: NodeClass,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let expected: Vec<&str> = self.expected.iter().map(|c| c.as_str()).collect();
        write!(
            f,
            "{} at {}..{}: found {}, expected {{{}}}",
            self.kind,
            self.at.0,
            self.at.1,
            self.found,
            expected.join(", ")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parse {
    pub ast: StatementAst,
    pub symbols: SymbolTable,
}

/// Parses one token stream.
///
/// Punctuation is set aside, out-of-lexicon words in front of the first
/// closed-class word are discarded as noise, and the trailing run of
/// out-of-lexicon words becomes the keyword phrase. What remains must walk
/// the graph from START to END.
pub fn parse(ts: &TokenStream, g: &TransitionGraph) -> Result<Parse, ParseError> {
    let end_span = (ts.source.len(), ts.source.len());
    let significant: Vec<&Token> = ts.significant().collect();
    let content: Vec<usize> = significant
        .iter()
        .enumerate()
        .filter(|(_, t)| t.class != TokenClass::Punct)
        .map(|(i, _)| i)
        .collect();

    if content.is_empty() {
        return Err(ParseError {
            kind: ParseErrorKind::EmptyStatement,
            at: (0, ts.source.len()),
            expected: g.successors(NodeClass::Start),
            found: NodeClass::End,
        });
    }

    let class_at = |i: usize| significant[content[i]].class;
    let first_closed = (0..content.len()).find(|&i| class_at(i).is_closed());
    let noise_len = first_closed.unwrap_or(0);
    let run_start = (noise_len..content.len())
        .rev()
        .take_while(|&i| class_at(i) == TokenClass::Unknown)
        .last()
        .unwrap_or(content.len());
    let core = noise_len..run_start;

    // Reported ahead of any other error so every pronoun-J succession is
    // named for what it is, wherever it occurs.
    for i in core.clone().skip(1) {
        let prev = NodeClass::of_token(class_at(i - 1)).expect("content token");
        if prev.is_pronoun() && class_at(i) == TokenClass::J && !g.has_edge(prev, NodeClass::J) {
            return Err(ParseError {
                kind: ParseErrorKind::PronounBeforeImperative,
                at: significant[content[i]].span,
                expected: g.successors(prev),
                found: NodeClass::J,
            });
        }
    }

    let mut state = NodeClass::Start;
    for i in core.clone().chain(run_start..content.len()) {
        let token = significant[content[i]];
        let next = NodeClass::of_token(token.class).expect("content token");
        if !g.has_edge(state, next) {
            return Err(ParseError {
                kind: ParseErrorKind::IllegalTransition,
                at: token.span,
                expected: g.successors(state),
                found: next,
            });
        }
        state = next;
    }
    if run_start == content.len() {
        return Err(ParseError {
            kind: ParseErrorKind::MissingKeyword,
            at: end_span,
            expected: g.successors(state),
            found: NodeClass::End,
        });
    }
    if !g.has_edge(state, NodeClass::End) {
        return Err(ParseError {
            kind: ParseErrorKind::IllegalTransition,
            at: end_span,
            expected: g.successors(state),
            found: NodeClass::End,
        });
    }

    let mut rows: Vec<SymbolRow> = significant
        .iter()
        .map(|t| SymbolRow {
            lexeme: t.lexeme.clone(),
            class: t.class,
            span: t.span,
            disposition: Disposition::DiscardedPunct,
        })
        .collect();
    for (i, &idx) in content.iter().enumerate() {
        rows[idx].disposition = if i < noise_len {
            Disposition::DiscardedNoise
        } else if i < run_start {
            Disposition::Consumed
        } else {
            Disposition::PromotedToK
        };
    }

    let closed: Vec<Token> = core.map(|i| significant[content[i]].clone()).collect();
    let keyword_phrase: Vec<Token> = (run_start..content.len())
        .map(|i| significant[content[i]].clone())
        .collect();
    let first_of = |pred: fn(TokenClass) -> bool| closed.iter().find(|t| pred(t.class)).cloned();
    let subject = first_of(TokenClass::is_pronoun);
    let auxiliary = first_of(|c| matches!(c, TokenClass::F | TokenClass::G | TokenClass::H));
    let verb = first_of(|c| {
        matches!(
            c,
            TokenClass::D | TokenClass::E | TokenClass::I | TokenClass::J
        )
    });
    let clause_kind = match (&subject, &auxiliary, verb.as_ref().map(|v| v.class)) {
        (None, None, None) => ClauseKind::Bare,
        (_, _, Some(TokenClass::I)) => ClauseKind::Continuous,
        (None, _, Some(TokenClass::J)) => ClauseKind::Imperative,
        _ => ClauseKind::Simple,
    };

    Ok(Parse {
        ast: StatementAst {
            subject,
            auxiliary,
            verb,
            closed,
            keyword_phrase,
            clause_kind,
        },
        symbols: SymbolTable { rows },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tense {
    PresentSimple,
    PresentContinuous,
    Imperative,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Person {
    First,
    Third,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Number {
    Singular,
    Plural,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Agreement {
    pub tense: Tense,
    pub person: Person,
    pub number: Number,
}

// Plural subjects (class B) that are third person; the rest are first.
const THIRD_PERSON_PLURAL: &[&str] = &["they"];

pub fn agreement_of(ast: &StatementAst) -> Agreement {
    let tense = match ast.verb.as_ref().map(|v| v.class) {
        Some(TokenClass::I) => Tense::PresentContinuous,
        Some(TokenClass::D | TokenClass::E) => Tense::PresentSimple,
        Some(TokenClass::J) => Tense::Imperative,
        _ => Tense::None,
    };
    let (person, number) = match &ast.subject {
        Some(t) if t.class == TokenClass::A => (Person::First, Number::Singular),
        Some(t) if t.class == TokenClass::B => {
            if THIRD_PERSON_PLURAL.contains(&t.normalized.as_str()) {
                (Person::Third, Number::Plural)
            } else {
                (Person::First, Number::Plural)
            }
        }
        Some(t) if t.class == TokenClass::C => (Person::Third, Number::Singular),
        _ => (Person::None, Number::None),
    };
    Agreement {
        tense,
        person,
        number,
    }
}
