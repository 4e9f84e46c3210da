//! Subject-predicate-object model built from accepted statements.

use std::collections::BTreeSet;

use crate::grammar::{Agreement, StatementAst};
use crate::lexicon::TokenClass;

/// Subject placeholder for statements without a pronoun.
pub const NO_SUBJECT: &str = "-";
/// Predicate for statements without a verb.
pub const UNKNOWN_PREDICATE: &str = "unknown";

// Third person singular verbs and their base forms.
const BASE_FORMS: &[(&str, &str)] = &[
    ("needs", "need"),
    ("wants", "want"),
    ("looks for", "look for"),
    ("searches for", "search for"),
];

/// Maps a verb phrase to its lemma. Forms outside the table are already
/// canonical.
pub fn canonical_predicate(verb: &str) -> &str {
    BASE_FORMS
        .iter()
        .find(|(form, _)| *form == verb)
        .map_or(verb, |(_, base)| base)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: String,
}

impl Triple {
    pub fn object_words(&self) -> impl Iterator<Item = &str> {
        self.object.split(' ')
    }
}

/// An accepted statement ready for modelling.
#[derive(Debug, Clone)]
pub struct AcceptedStatement {
    pub source: String,
    pub ast: StatementAst,
    pub agreement: Agreement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelStatement {
    pub id: usize,
    pub triple: Triple,
    pub agreement: Agreement,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationLink {
    pub from_id: usize,
    pub to_id: usize,
    pub shared_terms: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SemanticModel {
    pub statements: Vec<ModelStatement>,
    pub relations: Vec<RelationLink>,
}

impl SemanticModel {
    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn relations_of(&self, id: usize) -> impl Iterator<Item = &RelationLink> {
        self.relations
            .iter()
            .filter(move |r| r.from_id == id || r.to_id == id)
    }
}

pub fn triple_of(ast: &StatementAst) -> Triple {
    let subject = ast
        .subject
        .as_ref()
        .map_or_else(|| NO_SUBJECT.to_string(), |t| t.normalized.clone());
    let predicate = match &ast.verb {
        Some(v) if v.class == TokenClass::J => v.normalized.clone(),
        Some(v) => canonical_predicate(&v.normalized).to_string(),
        None => UNKNOWN_PREDICATE.to_string(),
    };
    let object = ast
        .keyword_phrase
        .iter()
        .map(|t| t.normalized.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ");
    Triple {
        subject,
        predicate,
        object,
    }
}

/// One triple per statement, ids from 1 in input order. Noise and
/// punctuation never reach the triple: only the subject, verb and keyword
/// tokens of the AST are read.
pub fn build_model(statements: &[AcceptedStatement]) -> SemanticModel {
    SemanticModel {
        statements: statements
            .iter()
            .enumerate()
            .map(|(i, s)| ModelStatement {
                id: i + 1,
                triple: triple_of(&s.ast),
                agreement: s.agreement,
                source: s.source.clone(),
            })
            .collect(),
        relations: Vec::new(),
    }
}

/// Links every pair of statements whose objects share a word.
pub fn resolve(mut model: SemanticModel) -> SemanticModel {
    let word_sets: Vec<BTreeSet<&str>> = model
        .statements
        .iter()
        .map(|s| s.triple.object_words().collect())
        .collect();
    let mut relations = Vec::new();
    for (i, a) in word_sets.iter().enumerate() {
        for (j, b) in word_sets.iter().enumerate().skip(i + 1) {
            let shared: BTreeSet<String> = a.intersection(b).map(|w| w.to_string()).collect();
            if !shared.is_empty() {
                relations.push(RelationLink {
                    from_id: model.statements[i].id,
                    to_id: model.statements[j].id,
                    shared_terms: shared,
                });
            }
        }
    }
    model.relations = relations;
    model
}

/// Tab-separated triple listing: statements first, then relation lines.
pub fn export_triples(model: &SemanticModel) -> String {
    let mut out = String::new();
    for s in &model.statements {
        let t = &s.triple;
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            s.id, t.subject, t.predicate, t.object
        ));
    }
    for r in &model.relations {
        let terms: Vec<&str> = r.shared_terms.iter().map(String::as_str).collect();
        out.push_str(&format!(
            "{}\trelated_to\t{}\t{}\n",
            r.from_id,
            r.to_id,
            terms.join(",")
        ));
    }
    out
}
