use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use cnlsearch::OutputFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Sql,
    Triples,
    Tsv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Sql => OutputFormat::Sql,
            Format::Triples => OutputFormat::Triples,
            Format::Tsv => OutputFormat::Tsv,
        }
    }
}

/// Natural-language product search. Reads statements from a batch file, or
/// interactively when no batch file is given.
#[derive(Debug, Clone, Parser)]
#[command(name = "cnlsearch", version, about)]
pub struct Config {
    /// Product catalog CSV (id,name,category,description,attributes)
    #[arg(long = "catalog", value_name = "PATH")]
    pub catalog_path: Option<PathBuf>,

    /// Lexicon file; the embedded default is used when absent
    #[arg(long = "lexicon", value_name = "PATH")]
    pub lexicon_path: Option<PathBuf>,

    /// Grammar (transition graph) file; the embedded default is used when absent
    #[arg(long = "grammar", value_name = "PATH")]
    pub grammar_path: Option<PathBuf>,

    /// Batch file with one statement per line
    #[arg(long = "batch", value_name = "PATH")]
    pub batch_path: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,

    /// Also write the triple listing to this file
    #[arg(long = "export-triples", value_name = "PATH")]
    pub export_triples_path: Option<PathBuf>,

    /// Append executed queries to this TSV log
    #[arg(long = "log", value_name = "PATH")]
    pub log_path: Option<PathBuf>,

    /// Write the inverted index postings to this file
    #[arg(long = "save-index", value_name = "PATH")]
    pub save_index_path: Option<PathBuf>,

    /// Print tokens, class path, triple and SQL for each statement
    #[arg(long)]
    pub explain: bool,

    /// Print the embedded default lexicon and exit
    #[arg(long)]
    pub dump_lexicon: bool,

    /// Print the embedded default grammar and exit
    #[arg(long)]
    pub dump_grammar: bool,

    /// Allow pronoun -> J edges in a custom grammar
    #[arg(long)]
    pub override_jk: bool,
}
