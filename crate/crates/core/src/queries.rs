//! Structured queries and their SQL rendering.

use crate::semantics::SemanticModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MatchMode {
    /// All terms first; any term when the conjunctive pass finds nothing.
    #[default]
    ConjunctiveThenFallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructuredQuery {
    pub statement_id: usize,
    /// Lowercased, first-occurrence deduplicated.
    pub terms: Vec<String>,
    pub mode: MatchMode,
    /// Canonical predicate of the source statement. Does not affect matching.
    pub predicate: String,
}

impl StructuredQuery {
    pub fn new(statement_id: usize, words: impl IntoIterator<Item = impl AsRef<str>>, predicate: &str) -> Self {
        let mut terms: Vec<String> = Vec::new();
        for w in words {
            let w = w.as_ref().to_lowercase();
            if !w.is_empty() && !terms.contains(&w) {
                terms.push(w);
            }
        }
        StructuredQuery {
            statement_id,
            terms,
            mode: MatchMode::ConjunctiveThenFallback,
            predicate: predicate.to_string(),
        }
    }
}

pub fn generate_query(model: &SemanticModel) -> Vec<StructuredQuery> {
    model
        .statements
        .iter()
        .map(|s| StructuredQuery::new(s.id, s.triple.object_words(), &s.triple.predicate))
        .collect()
}

fn quote_like(term: &str) -> String {
    format!("'%{}%'", term.replace('\'', "''"))
}

/// Renders the query as a single SQL statement over the `products` table.
pub fn render_sql(q: &StructuredQuery) -> String {
    let predicates: Vec<String> = q
        .terms
        .iter()
        .map(|t| format!("keywords LIKE {}", quote_like(t)))
        .collect();
    format!(
        "SELECT id, name, category FROM products WHERE {} ORDER BY id;",
        predicates.join(" AND ")
    )
}
