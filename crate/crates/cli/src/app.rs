use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use cnlsearch::grammar::DEFAULT_GRAMMAR;
use cnlsearch::lexicon::DEFAULT_LEXICON;
use cnlsearch::pipeline::{read_statements, BatchRun};
use cnlsearch::store::append_log;
use cnlsearch::{Engine, Lexicon, OutputFormat, ProductStore, TransitionGraph};

use crate::config::Config;

pub const PROMPT: &str = "isoas> ";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Failure = 1,
    ParseErrors = 2,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

fn read(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {what} {}", path.display()))
}

fn write(path: &Path, what: &str, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {what} {}", path.display()))
}

/// Loads the catalog, lexicon and grammar named by `cfg`.
pub fn build_engine(cfg: &Config) -> Result<Engine> {
    let Some(catalog_path) = &cfg.catalog_path else {
        bail!("--catalog <PATH> is required");
    };
    let store = ProductStore::ingest(&read(catalog_path, "catalog")?)
        .with_context(|| format!("invalid catalog {}", catalog_path.display()))?;
    let lexicon = match &cfg.lexicon_path {
        Some(p) => Lexicon::load(&read(p, "lexicon")?)
            .with_context(|| format!("invalid lexicon {}", p.display()))?,
        None => Lexicon::default_lexicon(),
    };
    let graph = match &cfg.grammar_path {
        Some(p) => TransitionGraph::load_with(&read(p, "grammar")?, cfg.override_jk)
            .with_context(|| format!("invalid grammar {}", p.display()))?,
        None => TransitionGraph::default_graph(),
    };
    Ok(Engine::new(lexicon, graph, store))
}

fn report_errors(run: &BatchRun, err: &mut impl Write) -> Result<()> {
    for (line, e) in run.errors() {
        writeln!(err, "line {line}: {e}")?;
    }
    Ok(())
}

fn emit(cfg: &Config, run: &BatchRun, out: &mut impl Write) -> Result<()> {
    if cfg.explain {
        out.write_all(run.explain().as_bytes())?;
    }
    out.write_all(run.render(OutputFormat::from(cfg.format)).as_bytes())?;
    Ok(())
}

fn write_artifacts(cfg: &Config, engine: &Engine, run: &BatchRun) -> Result<()> {
    if let Some(p) = &cfg.export_triples_path {
        write(p, "triples", &run.render(OutputFormat::Triples))?;
    }
    if let Some(p) = &cfg.log_path {
        append_log(p, &run.log_entries())?;
    }
    if let Some(p) = &cfg.save_index_path {
        write(p, "index", &engine.store.index.dump())?;
    }
    Ok(())
}

/// Handles `--dump-lexicon` / `--dump-grammar`. Returns false when neither
/// was requested.
pub fn dump_defaults(cfg: &Config, out: &mut impl Write) -> Result<bool> {
    if cfg.dump_lexicon {
        out.write_all(DEFAULT_LEXICON.as_bytes())?;
    }
    if cfg.dump_grammar {
        out.write_all(DEFAULT_GRAMMAR.as_bytes())?;
    }
    Ok(cfg.dump_lexicon || cfg.dump_grammar)
}

pub fn run_batch(cfg: &Config, engine: &Engine, out: &mut impl Write, err: &mut impl Write) -> Result<Status> {
    let Some(batch_path) = &cfg.batch_path else {
        bail!("--batch <PATH> is required in batch mode");
    };
    let text = read(batch_path, "batch file")?;
    let run = engine.run(&read_statements(&text));
    emit(cfg, &run, out)?;
    report_errors(&run, err)?;
    write_artifacts(cfg, engine, &run)?;
    out.flush()?;
    Ok(if run.has_errors() {
        Status::ParseErrors
    } else {
        Status::Success
    })
}

/// Reads statements from `input` until `:quit` or end of input. Each line
/// is processed as its own one-statement batch.
pub fn run_repl(
    cfg: &Config,
    engine: &Engine,
    input: &mut impl BufRead,
    out: &mut impl Write,
    err: &mut impl Write,
) -> Result<Status> {
    let mut session = Vec::new();
    let mut line_no = 0;
    loop {
        out.write_all(PROMPT.as_bytes())?;
        out.flush()?;
        let mut buf = String::new();
        if input.read_line(&mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = buf.trim_end_matches(['\n', '\r']);
        if line.trim() == ":quit" {
            break;
        }
        if line.trim().is_empty() {
            continue;
        }
        let statement = vec![(line_no, line.to_string())];
        let run = engine.run(&statement);
        emit(cfg, &run, out)?;
        report_errors(&run, err)?;
        if let Some(p) = &cfg.log_path {
            append_log(p, &run.log_entries())?;
        }
        session.extend(statement);
    }
    let run = engine.run(&session);
    let cfg = Config {
        log_path: None,
        ..cfg.clone()
    };
    write_artifacts(&cfg, engine, &run)?;
    out.flush()?;
    Ok(Status::Success)
}

/// Dispatches on `cfg`: dumps, batch mode, or the interactive loop.
pub fn run(cfg: &Config, input: &mut impl BufRead, out: &mut impl Write, err: &mut impl Write) -> Result<Status> {
    if dump_defaults(cfg, out)? {
        return Ok(Status::Success);
    }
    let engine = build_engine(cfg)?;
    if cfg.batch_path.is_some() {
        run_batch(cfg, &engine, out, err)
    } else {
        run_repl(cfg, &engine, input, out, err)
    }
}
