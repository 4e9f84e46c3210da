//! End-to-end statement processing: tokenize, parse, model, query, execute
//! and render.

use std::fmt;
use std::str::FromStr;

use crate::grammar::{agreement_of, parse, NodeClass, Parse, ParseError, TransitionGraph};
use crate::lexicon::{tokenize, Lexicon, TokenStream};
use crate::queries::{generate_query, render_sql, StructuredQuery};
use crate::responder::{echo, present, prioritize, reconstruct, ResponseFrame};
use crate::semantics::{build_model, export_triples, resolve, AcceptedStatement, SemanticModel};
use crate::store::{LogEntry, ProductStore, ResultSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Sql,
    Triples,
    Tsv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "sql" => Ok(OutputFormat::Sql),
            "triples" => Ok(OutputFormat::Triples),
            "tsv" => Ok(OutputFormat::Tsv),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Text => "text",
            OutputFormat::Sql => "sql",
            OutputFormat::Triples => "triples",
            OutputFormat::Tsv => "tsv",
        })
    }
}

/// Statements of a batch file with their 1-based line numbers. Blank lines
/// and `#` comments are skipped.
pub fn read_statements(text: &str) -> Vec<(usize, String)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(n, l)| (n, l.to_string()))
        .collect()
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Accepted(Box<Parse>),
    Rejected(ParseError),
}

#[derive(Debug, Clone)]
pub struct StatementRun {
    pub line_no: usize,
    pub tokens: TokenStream,
    pub outcome: Outcome,
    /// Model id when the statement was accepted.
    pub statement_id: Option<usize>,
}

/// Everything produced for one batch of statements.
#[derive(Debug, Clone)]
pub struct BatchRun {
    pub statements: Vec<StatementRun>,
    pub model: SemanticModel,
    pub queries: Vec<StructuredQuery>,
    pub results: Vec<ResultSet>,
    pub frames: Vec<ResponseFrame>,
}

impl BatchRun {
    pub fn errors(&self) -> impl Iterator<Item = (usize, &ParseError)> {
        self.statements.iter().filter_map(|s| match &s.outcome {
            Outcome::Rejected(e) => Some((s.line_no, e)),
            Outcome::Accepted(_) => None,
        })
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn log_entries(&self) -> Vec<LogEntry> {
        self.results
            .iter()
            .map(|rs| {
                let id = rs.query.statement_id;
                let links = self
                    .model
                    .relations_of(id)
                    .map(|r| (r.from_id, r.to_id))
                    .collect();
                LogEntry::new(rs, links)
            })
            .collect()
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => {
                let texts: Vec<String> = prioritize(&self.results)
                    .into_iter()
                    .map(|i| reconstruct(&self.frames[i]))
                    .collect();
                let mut out = Vec::new();
                present(&texts, &mut out).expect("writing to memory");
                String::from_utf8(out).expect("responses are UTF-8")
            }
            OutputFormat::Sql => self
                .queries
                .iter()
                .map(|q| format!("-- statement {}\n{}\n", q.statement_id, render_sql(q)))
                .collect(),
            OutputFormat::Triples => export_triples(&self.model),
            OutputFormat::Tsv => {
                let mut out = String::new();
                for rs in &self.results {
                    for item in &rs.items {
                        out.push_str(&format!(
                            "{}\t{}\t{}\t{}\t{}\n",
                            rs.query.statement_id, item.id, item.name, item.score, item.matched
                        ));
                    }
                }
                out
            }
        }
    }

    /// Token table, class path, triple and SQL of each statement.
    pub fn explain(&self) -> String {
        let mut out = String::new();
        for s in &self.statements {
            out.push_str(&format!("statement (line {}): {}\n", s.line_no, s.tokens.source));
            out.push_str("tokens:\n");
            match &s.outcome {
                Outcome::Accepted(p) => {
                    for row in &p.symbols.rows {
                        out.push_str(&format!("  {}\t{}\t{}\n", row.lexeme, row.class, row.disposition));
                    }
                    let path: Vec<&str> = std::iter::once(NodeClass::Start)
                        .chain(p.ast.path())
                        .chain(std::iter::once(NodeClass::End))
                        .map(NodeClass::as_str)
                        .collect();
                    out.push_str(&format!("path: {}\n", path.join(" ")));
                    let id = s.statement_id.expect("accepted statements have ids");
                    let t = &self.model.statements[id - 1].triple;
                    out.push_str(&format!("triple: {}\t{}\t{}\n", t.subject, t.predicate, t.object));
                    out.push_str(&format!("sql: {}\n", render_sql(&self.queries[id - 1])));
                }
                Outcome::Rejected(e) => {
                    for t in s.tokens.significant() {
                        out.push_str(&format!("  {}\t{}\t-\n", t.lexeme, t.class));
                    }
                    out.push_str(&format!("error: {e}\n"));
                }
            }
        }
        out
    }
}

/// Lexicon, grammar and catalog bundled for statement processing.
#[derive(Debug, Clone)]
pub struct Engine {
    pub lexicon: Lexicon,
    pub graph: TransitionGraph,
    pub store: ProductStore,
}

impl Engine {
    pub fn new(lexicon: Lexicon, graph: TransitionGraph, store: ProductStore) -> Self {
        Engine {
            lexicon,
            graph,
            store,
        }
    }

    /// Default lexicon and grammar over the given store.
    pub fn with_store(store: ProductStore) -> Self {
        Engine::new(Lexicon::default_lexicon(), TransitionGraph::default_graph(), store)
    }

    pub fn analyze(&self, line: &str) -> (TokenStream, Result<Parse, ParseError>) {
        let tokens = tokenize(line, &self.lexicon);
        let parsed = parse(&tokens, &self.graph);
        (tokens, parsed)
    }

    /// Runs `statements` (line number, text) as one batch. Rejected
    /// statements get no model id; accepted ones are numbered from 1.
    pub fn run(&self, statements: &[(usize, String)]) -> BatchRun {
        let mut runs = Vec::with_capacity(statements.len());
        let mut accepted = Vec::new();
        for (line_no, text) in statements {
            let (tokens, parsed) = self.analyze(text);
            let (outcome, statement_id) = match parsed {
                Ok(p) => {
                    accepted.push(AcceptedStatement {
                        source: text.clone(),
                        agreement: agreement_of(&p.ast),
                        ast: p.ast.clone(),
                    });
                    (Outcome::Accepted(Box::new(p)), Some(accepted.len()))
                }
                Err(e) => (Outcome::Rejected(e), None),
            };
            runs.push(StatementRun {
                line_no: *line_no,
                tokens,
                outcome,
                statement_id,
            });
        }

        let model = resolve(build_model(&accepted));
        let queries = generate_query(&model);
        let results: Vec<ResultSet> = queries.iter().map(|q| self.store.execute(q)).collect();
        let frames = accepted
            .iter()
            .zip(&results)
            .map(|(s, rs)| ResponseFrame {
                echo: echo(&s.ast),
                agreement: s.agreement,
                results: rs.clone(),
            })
            .collect();
        BatchRun {
            statements: runs,
            model,
            queries,
            results,
            frames,
        }
    }

    pub fn run_text(&self, batch: &str) -> BatchRun {
        self.run(&read_statements(batch))
    }
}
