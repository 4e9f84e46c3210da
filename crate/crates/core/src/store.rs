//! Embedded product catalog, its inverted keyword index and query execution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::lexicon::words;
use crate::queries::StructuredQuery;

/// The sample catalog shipped with the crate.
pub const SAMPLE_CATALOG: &str = include_str!("../data/sample_catalog.csv");

pub const CATALOG_HEADER: [&str; 5] = ["id", "name", "category", "description", "attributes"];

pub type RecordId = u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductRecord {
    pub id: RecordId,
    pub name: String,
    pub category: String,
    pub description: String,
    pub attributes: Vec<(String, String)>,
}

impl ProductRecord {
    /// Index terms of the record: words of the name, category, description
    /// and attribute values.
    pub fn terms(&self) -> BTreeSet<String> {
        [&self.name, &self.category, &self.description]
            .into_iter()
            .chain(self.attributes.iter().map(|(_, v)| v))
            .flat_map(|field| words(field))
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog line {line}: {source}")]
    Csv { line: u64, source: csv::Error },
    #[error("catalog header must be `{}`", CATALOG_HEADER.join(","))]
    BadHeader,
    #[error("catalog line {line}: expected 5 columns, found {found}")]
    ColumnCount { line: u64, found: usize },
    #[error("catalog line {line}: id `{value}` is not a positive integer")]
    BadId { line: u64, value: String },
    #[error("catalog line {line}: record {id} has an empty name")]
    EmptyName { line: u64, id: RecordId },
    #[error("catalog line {line}: attribute `{text}` is not `key=value`")]
    BadAttribute { line: u64, text: String },
    #[error("duplicate record id {id}")]
    DuplicateId { id: RecordId },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Catalog {
    records: BTreeMap<RecordId, ProductRecord>,
}

impl Catalog {
    pub fn get(&self, id: RecordId) -> Option<&ProductRecord> {
        self.records.get(&id)
    }

    pub fn contains(&self, id: RecordId) -> bool {
        self.records.contains_key(&id)
    }

    /// Records in id order.
    pub fn records(&self) -> impl Iterator<Item = &ProductRecord> {
        self.records.values()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InvertedIndex {
    postings: BTreeMap<String, Vec<RecordId>>,
}

impl InvertedIndex {
    pub fn build(catalog: &Catalog) -> Self {
        let mut index = InvertedIndex::default();
        for record in catalog.records() {
            index.add(record);
        }
        index
    }

    fn add(&mut self, record: &ProductRecord) {
        for term in record.terms() {
            let list = self.postings.entry(term).or_default();
            if let Err(pos) = list.binary_search(&record.id) {
                list.insert(pos, record.id);
            }
        }
    }

    pub fn postings(&self, term: &str) -> &[RecordId] {
        self.postings.get(term).map_or(&[], Vec::as_slice)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &[RecordId])> {
        self.postings.iter().map(|(t, ids)| (t.as_str(), ids.as_slice()))
    }

    /// Ids of records with an index term containing `term`.
    pub fn matching(&self, term: &str) -> BTreeSet<RecordId> {
        self.postings
            .iter()
            .filter(|(t, _)| t.contains(term))
            .flat_map(|(_, ids)| ids.iter().copied())
            .collect()
    }

    /// Checks the index against `catalog`: sorted, duplicate-free posting
    /// lists that cover exactly the catalog's record terms.
    pub fn check(&self, catalog: &Catalog) -> Result<(), String> {
        for (term, ids) in &self.postings {
            if ids.is_empty() || ids.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("posting list for `{term}` is not strictly ascending"));
            }
            if let Some(id) = ids.iter().find(|id| !catalog.contains(**id)) {
                return Err(format!("`{term}` posts unknown record {id}"));
            }
        }
        if *self != InvertedIndex::build(catalog) {
            return Err("index does not match the catalog's terms".into());
        }
        Ok(())
    }

    /// `term<TAB>id,id,...` lines in term order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (term, ids) in self.terms() {
            out.push_str(term);
            out.push('\t');
            out.push_str(&join(ids, ","));
            out.push('\n');
        }
        out
    }
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn parse_attributes(field: &str, line: u64) -> Result<Vec<(String, String)>, CatalogError> {
    if field.trim().is_empty() {
        return Ok(Vec::new());
    }
    field
        .split('|')
        .map(|pair| {
            pair.split_once('=')
                .filter(|(k, _)| !k.trim().is_empty())
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CatalogError::BadAttribute {
                    line,
                    text: pair.to_string(),
                })
        })
        .collect()
}

/// Reads a catalog CSV and builds its index.
pub fn ingest_catalog(source: &str) -> Result<(Catalog, InvertedIndex), CatalogError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source.as_bytes());
    let header = reader
        .headers()
        .map_err(|source| CatalogError::Csv { line: 1, source })?;
    if header.iter().map(str::trim).ne(CATALOG_HEADER) {
        return Err(CatalogError::BadHeader);
    }

    let mut catalog = Catalog::default();
    for row in reader.records() {
        let row = row.map_err(|source| CatalogError::Csv {
            line: source.position().map_or(0, |p| p.line()),
            source,
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != CATALOG_HEADER.len() {
            return Err(CatalogError::ColumnCount {
                line,
                found: row.len(),
            });
        }
        let id = row[0]
            .trim()
            .parse::<RecordId>()
            .ok()
            .filter(|&id| id > 0)
            .ok_or_else(|| CatalogError::BadId {
                line,
                value: row[0].to_string(),
            })?;
        let name = row[1].trim().to_string();
        if name.is_empty() {
            return Err(CatalogError::EmptyName { line, id });
        }
        if catalog.contains(id) {
            return Err(CatalogError::DuplicateId { id });
        }
        let record = ProductRecord {
            id,
            name,
            category: row[2].trim().to_string(),
            description: row[3].trim().to_string(),
            attributes: parse_attributes(&row[4], line)?,
        };
        catalog.records.insert(id, record);
    }
    let index = InvertedIndex::build(&catalog);
    Ok((catalog, index))
}

/// Appends `new_records` to the catalog and index. Nothing changes if any
/// id is already taken.
pub fn update_index(
    catalog: &mut Catalog,
    index: &mut InvertedIndex,
    new_records: Vec<ProductRecord>,
) -> Result<(), CatalogError> {
    let mut fresh = BTreeSet::new();
    for r in &new_records {
        if catalog.contains(r.id) || !fresh.insert(r.id) {
            return Err(CatalogError::DuplicateId { id: r.id });
        }
    }
    for record in new_records {
        index.add(&record);
        catalog.records.insert(record.id, record);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Matched {
    And,
    Or,
}

impl Matched {
    pub fn as_str(self) -> &'static str {
        match self {
            Matched::And => "AND",
            Matched::Or => "OR",
        }
    }
}

impl fmt::Display for Matched {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultItem {
    pub id: RecordId,
    pub name: String,
    pub category: String,
    /// Number of query terms the record matches.
    pub score: usize,
    pub matched: Matched,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultSet {
    pub query: StructuredQuery,
    pub matched: Matched,
    pub items: Vec<ResultItem>,
}

impl ResultSet {
    pub fn ids(&self) -> Vec<RecordId> {
        self.items.iter().map(|i| i.id).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Runs `q` against the index. A term matches a record when it is a
/// substring of one of the record's index terms. Records matching every
/// term are returned if there are any; otherwise records matching at least
/// one term, best score first.
pub fn execute(q: &StructuredQuery, catalog: &Catalog, index: &InvertedIndex) -> ResultSet {
    let per_term: Vec<BTreeSet<RecordId>> = q.terms.iter().map(|t| index.matching(t)).collect();

    let item = |id: RecordId, score: usize, matched: Matched| {
        let r = catalog.get(id).expect("posted id exists in catalog");
        ResultItem {
            id,
            name: r.name.clone(),
            category: r.category.clone(),
            score,
            matched,
        }
    };

    let mut all = per_term.first().cloned().unwrap_or_default();
    for set in per_term.iter().skip(1) {
        all.retain(|id| set.contains(id));
    }
    if !all.is_empty() {
        return ResultSet {
            query: q.clone(),
            matched: Matched::And,
            items: all
                .into_iter()
                .map(|id| item(id, q.terms.len(), Matched::And))
                .collect(),
        };
    }

    let mut scores: BTreeMap<RecordId, usize> = BTreeMap::new();
    for set in &per_term {
        for &id in set {
            *scores.entry(id).or_default() += 1;
        }
    }
    let mut ranked: Vec<(RecordId, usize)> = scores.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ResultSet {
        query: q.clone(),
        matched: Matched::Or,
        items: ranked
            .into_iter()
            .map(|(id, score)| item(id, score, Matched::Or))
            .collect(),
    }
}

/// Catalog plus index, the unit the pipeline queries.
#[derive(Debug, Clone, Default)]
pub struct ProductStore {
    pub catalog: Catalog,
    pub index: InvertedIndex,
}

impl ProductStore {
    pub fn ingest(source: &str) -> Result<Self, CatalogError> {
        let (catalog, index) = ingest_catalog(source)?;
        Ok(ProductStore { catalog, index })
    }

    pub fn sample() -> Self {
        Self::ingest(SAMPLE_CATALOG).expect("sample catalog is valid")
    }

    pub fn execute(&self, q: &StructuredQuery) -> ResultSet {
        execute(q, &self.catalog, &self.index)
    }

    pub fn update(&mut self, new_records: Vec<ProductRecord>) -> Result<(), CatalogError> {
        update_index(&mut self.catalog, &mut self.index, new_records)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub statement_id: usize,
    pub terms: Vec<String>,
    pub matched: Matched,
    pub result_ids: Vec<RecordId>,
    /// Relation links touching the statement, as (from, to) ids.
    pub relations: Vec<(usize, usize)>,
}

impl LogEntry {
    pub fn new(results: &ResultSet, relations: Vec<(usize, usize)>) -> Self {
        LogEntry {
            statement_id: results.query.statement_id,
            terms: results.query.terms.clone(),
            matched: results.matched,
            result_ids: results.ids(),
            relations,
        }
    }

    /// The log line for this entry, without the trailing newline.
    pub fn format(&self, timestamp: &str) -> String {
        let relations: Vec<String> = self
            .relations
            .iter()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect();
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            timestamp,
            self.statement_id,
            self.terms.join(","),
            self.matched,
            join(&self.result_ids, ","),
            relations.join(";")
        )
    }
}

#[derive(Debug, Error)]
#[error("cannot append to query log {}: {source}", path.display())]
pub struct LogError {
    pub path: PathBuf,
    pub source: std::io::Error,
}

/// Appends one line per entry to the query log, stamped with the current
/// UTC time.
pub fn append_log(path: &Path, entries: &[LogEntry]) -> Result<(), LogError> {
    let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let wrap = |source| LogError {
        path: path.to_path_buf(),
        source,
    };
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(wrap)?;
    let mut buf = String::new();
    for e in entries {
        buf.push_str(&e.format(&timestamp));
        buf.push('\n');
    }
    file.write_all(buf.as_bytes()).map_err(wrap)
}
