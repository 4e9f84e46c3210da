//! Turns result sets back into text in the user's own sentence frame.

use std::io::{self, Write};

use crate::grammar::{Agreement, StatementAst};
use crate::store::{Matched, ResultSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseFrame {
    pub echo: String,
    pub agreement: Agreement,
    pub results: ResultSet,
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Normalized restatement of an accepted statement: the subject
/// capitalized, other closed-class words and the keyword lowercased, single
/// spaces, no punctuation or noise.
pub fn echo(ast: &StatementAst) -> String {
    ast.closed
        .iter()
        .map(|t| {
            if t.class.is_pronoun() {
                capitalize(&t.normalized)
            } else {
                t.normalized.clone()
            }
        })
        .chain(ast.keyword_phrase.iter().map(|t| t.normalized.to_lowercase()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Statement order for presentation: statements with results first, the
/// original order kept within each group.
pub fn prioritize(sets: &[ResultSet]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by_key(|&i| sets[i].is_empty());
    order
}

pub fn reconstruct(frame: &ResponseFrame) -> String {
    let items = &frame.results.items;
    let mut out = format!("Query: {}\n", frame.echo);
    if frame.results.matched == Matched::Or && !items.is_empty() {
        out.push_str(&format!("Results ({}, partial match):\n", items.len()));
    } else {
        out.push_str(&format!("Results ({}):\n", items.len()));
    }
    if items.is_empty() {
        out.push_str("- no matching products\n");
    }
    for item in items {
        out.push_str(&format!("- [{}] {} \u{2014} {}\n", item.id, item.name, item.category));
    }
    out
}

/// Writes responses separated by one blank line.
pub fn present<W: Write>(texts: &[String], sink: &mut W) -> io::Result<()> {
    for (i, text) in texts.iter().enumerate() {
        if i > 0 {
            sink.write_all(b"\n")?;
        }
        sink.write_all(text.as_bytes())?;
    }
    sink.flush()
}
