//! Controlled-natural-language search over a product catalog.
//!
//! A search request such as `She is looking for bolt M8` goes through:
//!
//! 1. [`lexicon`]: dictionary tokenizer, closed word classes `A`..`J`.
//! 2. [`grammar`]: LL walk over a transition graph of statement classes.
//! 3. [`semantics`]: one (subject, predicate, object) triple per statement,
//!    plus links between statements that share object words.
//! 4. [`queries`]: structured keyword queries and their SQL text.
//! 5. [`store`]: an inverted keyword index over the catalog that executes
//!    the queries.
//! 6. [`responder`]: answers rendered in the user's sentence frame.
//!
//! [`pipeline::Engine`] runs all of them in order.

pub mod grammar;
pub mod lexicon;
pub mod pipeline;
pub mod queries;
pub mod responder;
pub mod semantics;
pub mod store;

pub use grammar::{
    agreement_of, enumerate_patterns, parse, Agreement, ClauseKind, NodeClass, Parse, ParseError,
    ParseErrorKind, StatementAst, SymbolTable, TransitionGraph,
};
pub use lexicon::{detokenize, tokenize, Lexicon, Token, TokenClass, TokenStream};
pub use pipeline::{BatchRun, Engine, OutputFormat};
pub use queries::{generate_query, render_sql, StructuredQuery};
pub use responder::{prioritize, reconstruct, ResponseFrame};
pub use semantics::{build_model, export_triples, resolve, SemanticModel, Triple};
pub use store::{execute, ingest_catalog, update_index, Catalog, InvertedIndex, Matched, ProductStore, ResultSet};
