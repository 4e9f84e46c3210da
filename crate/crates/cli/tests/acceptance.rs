//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cnlsearch::grammar::{enumerate_patterns, NodeClass, ParseErrorKind};
use cnlsearch::pipeline::{read_statements, Outcome};
use cnlsearch::queries::StructuredQuery;
use cnlsearch::responder::echo;
use cnlsearch::store::{Matched, ProductStore, SAMPLE_CATALOG};
use cnlsearch::{detokenize, parse, tokenize, Engine, Lexicon, TokenClass, TransitionGraph};

const SEED: u64 = 0x1505_2010;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// One fixed word per statement class.
fn realize(class: NodeClass) -> &'static str {
    match class {
        NodeClass::A => "I",
        NodeClass::B => "we",
        NodeClass::C => "she",
        NodeClass::D => "need",
        NodeClass::E => "needs",
        NodeClass::F => "am",
        NodeClass::G => "are",
        NodeClass::H => "is",
        NodeClass::I => "looking for",
        NodeClass::J => "find",
        NodeClass::K => "bolt",
        NodeClass::Start | NodeClass::End => unreachable!(),
    }
}

fn sequences(max_len: usize) -> Vec<Vec<NodeClass>> {
    let mut all = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * 11);
        for seq in &frontier {
            for c in NodeClass::INTERIOR {
                let mut s: Vec<NodeClass> = seq.clone();
                s.push(c);
                next.push(s);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

/// Leading keyword-class words in front of a closed-class word are noise.
fn without_noise(seq: &[NodeClass]) -> &[NodeClass] {
    match seq.iter().position(|&c| c != NodeClass::K) {
        Some(first_closed) => &seq[first_closed..],
        None => seq,
    }
}

/// Direct edge-by-edge walk from START to END.
fn walks(edges: &BTreeSet<(NodeClass, NodeClass)>, seq: &[NodeClass]) -> bool {
    if seq.is_empty() {
        return false;
    }
    let mut state = NodeClass::Start;
    for &c in seq {
        if !edges.contains(&(state, c)) {
            return false;
        }
        state = c;
    }
    edges.contains(&(state, NodeClass::End))
}

fn ac1_grammar_oracle() -> Verdict {
    let started = Instant::now();
    let lex = Lexicon::default_lexicon();
    let g = TransitionGraph::default_graph();
    let patterns = enumerate_patterns(&g, 5);
    let edges: BTreeSet<_> = g.edges().collect();
    let mut checked = 0usize;
    let mut discrepancies = Vec::new();
    for seq in sequences(5) {
        let line: Vec<&str> = seq.iter().map(|&c| realize(c)).collect();
        let line = line.join(" ");
        let ts = tokenize(&line, &lex);
        assert_eq!(ts.significant().count(), seq.len(), "realization of {seq:?} merged tokens");
        let accepted = parse(&ts, &g).is_ok();
        let core = without_noise(&seq);
        let by_patterns = patterns.contains(core);
        let by_walk = walks(&edges, core);
        if accepted != by_patterns || by_patterns != by_walk {
            discrepancies.push(seq.clone());
        }
        checked += 1;
    }
    let elapsed = started.elapsed();
    verdict(
        discrepancies.is_empty() && checked == 177_156 && elapsed < Duration::from_secs(10),
        format!(
            "{checked} sequences (k <= 5), {} discrepancies, {:.2} s (limit 10 s){}",
            discrepancies.len(),
            elapsed.as_secs_f64(),
            discrepancies.first().map_or(String::new(), |d| format!(", first {d:?}"))
        ),
    )
}

fn ac2_required_patterns() -> Verdict {
    use NodeClass::*;
    let lex = Lexicon::default_lexicon();
    let g = TransitionGraph::default_graph();
    let required = [
        vec![A, D, K],
        vec![B, D, K],
        vec![C, E, K],
        vec![A, F, I, K],
        vec![B, G, I, K],
        vec![C, H, I, K],
        vec![D, K],
        vec![E, K],
        vec![I, K],
        vec![J, K],
        vec![K],
    ];
    let line_of = |seq: &[NodeClass]| seq.iter().map(|&c| realize(c)).collect::<Vec<_>>().join(" ");
    let mut failures = Vec::new();
    for seq in &required {
        if parse(&tokenize(&line_of(seq), &lex), &g).is_err() {
            failures.push(format!("{seq:?} rejected"));
        }
    }
    let mut pronoun_j = 0usize;
    for seq in sequences(5) {
        let adjacent = seq.windows(2).any(|w| w[0].is_pronoun() && w[1] == J);
        if !adjacent {
            continue;
        }
        pronoun_j += 1;
        match parse(&tokenize(&line_of(&seq), &lex), &g) {
            Err(e) if e.kind == ParseErrorKind::PronounBeforeImperative => {}
            other => failures.push(format!("{seq:?}: {:?}", other.map(|_| "accepted").map_err(|e| e.kind))),
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{} required patterns accepted, {pronoun_j} pronoun-J sequences checked, {} failures{}",
            required.len(),
            failures.len(),
            failures.first().map_or(String::new(), |f| format!(", first {f}"))
        ),
    )
}

fn random_catalog(rng: &mut ChaCha8Rng) -> String {
    const WORDS: &[&str] = &[
        "Bolt", "M8", "M8x20", "hex", "washer", "pump", "Seal", "kit", "valve", "ball", "gate", "DN25",
        "brass", "steel", "o-ring", "nbr", "flange", "sleeve", "spring", "40mm", "zinc",
    ];
    let n = rng.gen_range(0..=100);
    let mut ids: Vec<u64> = (1..=300).collect();
    ids.shuffle(rng);
    let phrase = |rng: &mut ChaCha8Rng, lo: usize, hi: usize| {
        let k = rng.gen_range(lo..=hi);
        (0..k).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
    };
    let mut csv = String::from("id,name,category,description,attributes\n");
    for &id in ids.iter().take(n) {
        let name = phrase(rng, 1, 3);
        let category = phrase(rng, 1, 1);
        let description = phrase(rng, 0, 5);
        let attrs: Vec<String> = (0..rng.gen_range(0..3))
            .map(|i| format!("a{i}={}", phrase(rng, 1, 2)))
            .collect();
        csv.push_str(&format!("{id},{name},{category},\"{description}\",{}\n", attrs.join("|")));
    }
    csv
}

struct ScanRecord {
    id: u64,
    words: Vec<String>,
}

/// Re-reads the generated CSV by hand (no quoted commas are generated) and
/// scores every record by linear scan.
fn linear_scan(csv: &str, terms: &[String]) -> (Matched, Vec<(u64, usize)>) {
    let records: Vec<ScanRecord> = csv
        .lines()
        .skip(1)
        .map(|line| {
            let cols: Vec<&str> = line.splitn(5, ',').collect();
            let mut text = format!("{} {} {}", cols[1], cols[2], cols[3].trim_matches('"'));
            for pair in cols[4].split('|').filter(|p| !p.is_empty()) {
                text.push(' ');
                text.push_str(pair.split_once('=').unwrap().1);
            }
            let words = text
                .split(|c: char| !(c.is_alphanumeric() || c == '-' || c == '_'))
                .filter(|w| !w.is_empty())
                .map(|w| w.to_lowercase())
                .collect();
            ScanRecord {
                id: cols[0].parse().unwrap(),
                words,
            }
        })
        .collect();
    let mut scored: Vec<(u64, usize)> = records
        .iter()
        .map(|r| (r.id, terms.iter().filter(|t| r.words.iter().any(|w| w.contains(t.as_str()))).count()))
        .filter(|&(_, s)| s > 0)
        .collect();
    let all: Vec<(u64, usize)> = {
        let mut v: Vec<_> = scored.iter().copied().filter(|&(_, s)| s == terms.len()).collect();
        v.sort();
        v
    };
    if !all.is_empty() {
        return (Matched::And, all);
    }
    scored.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    (Matched::Or, scored)
}

fn ac3_retrieval_oracle() -> Verdict {
    const TERMS: &[&str] = &["bolt", "m8", "seal", "valve", "o-r", "dn", "steel", "x20", "titanium", "s", "zz"];
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut mismatches = 0usize;
    let mut hits = 0usize;
    for _ in 0..200 {
        let csv = random_catalog(&mut rng);
        let store = ProductStore::ingest(&csv).expect("generated catalog is valid");
        let terms: Vec<&str> = (0..rng.gen_range(1..=4)).map(|_| *TERMS.choose(&mut rng).unwrap()).collect();
        let q = StructuredQuery::new(1, terms, "need");
        let rs = store.execute(&q);
        let got: Vec<(u64, usize)> = rs.items.iter().map(|i| (i.id, i.score)).collect();
        let (matched, expected) = linear_scan(&csv, &q.terms);
        if rs.matched != matched || got != expected || rs.items.iter().any(|i| i.matched != rs.matched) {
            mismatches += 1;
        }
        hits += got.len();
    }
    let elapsed = started.elapsed();
    verdict(
        mismatches == 0 && elapsed < Duration::from_secs(5),
        format!(
            "200 trials, {hits} result rows, {mismatches} mismatches, {:.2} s (limit 5 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn ac4_round_trip() -> Verdict {
    let lex = Lexicon::default_lexicon();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let phrases: Vec<&str> = lex.entries().map(|(l, _)| l).collect();
    let mut failures = 0usize;
    for i in 0..1000 {
        let len = rng.gen_range(0..=80);
        let mut line = String::with_capacity(len);
        while line.len() < len {
            // mix raw printable ASCII with lexicon phrases so multi-word
            // matches are exercised too
            if i % 2 == 0 && rng.gen_bool(0.2) {
                line.push_str(phrases.choose(&mut rng).unwrap());
            } else {
                line.push(char::from(rng.gen_range(0x20u8..=0x7e)));
            }
        }
        if detokenize(&tokenize(&line, &lex)) != line {
            failures += 1;
        }
    }
    verdict(failures == 0, format!("1000 fuzz lines, {failures} mismatches"))
}

fn ac5_golden_outputs() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_cnlsearch");
    let dir = golden_dir();
    let catalog = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/sample_catalog.csv");
    let batch = dir.join("batch.txt");
    let statements = read_statements(&fs::read_to_string(&batch).unwrap()).len();
    let mut failures = Vec::new();
    for format in ["text", "sql", "triples", "tsv"] {
        let out = Command::new(bin)
            .arg("--catalog")
            .arg(&catalog)
            .arg("--batch")
            .arg(&batch)
            .args(["--format", format])
            .output()
            .expect("run cnlsearch");
        let expected = fs::read(dir.join(format!("expected.{format}"))).unwrap();
        if out.stdout != expected {
            failures.push(format!("{format} stdout differs"));
        }
        let expected_err = fs::read(dir.join("expected.stderr")).unwrap();
        if out.stderr != expected_err {
            failures.push(format!("{format} stderr differs"));
        }
        if out.status.code() != Some(2) {
            failures.push(format!("{format} exit {:?}, expected 2", out.status.code()));
        }
    }
    verdict(
        failures.is_empty() && statements == 10,
        format!("{statements}-statement batch, 4 formats, failures: {failures:?}"),
    )
}

fn ac6_mandatory_keyword() -> Verdict {
    let lex = Lexicon::default_lexicon();
    let g = TransitionGraph::default_graph();
    let patterns = enumerate_patterns(&g, 6);
    let mut by_class: BTreeMap<TokenClass, Vec<&str>> = BTreeMap::new();
    for (lexeme, class) in lex.entries() {
        by_class.entry(class).or_default().push(lexeme);
    }
    let open_words = ["bolt", "M8", "pump", "seal-kit", "DN25", "o_ring", "x"];
    let seps = [" ", "  ", "\t", ", ", " ; ", "!", " ?"];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let (mut accepted, mut empty_keyword, mut wrongly_rejected, mut wrongly_accepted) = (0, 0, 0, 0);
    for _ in 0..10_000 {
        let len = rng.gen_range(0..=7);
        let mut line = String::new();
        for _ in 0..len {
            let word: String = if rng.gen_bool(0.45) {
                open_words.choose(&mut rng).unwrap().to_string()
            } else {
                let class = *TokenClass::CLOSED.choose(&mut rng).unwrap();
                let w = by_class[&class].choose(&mut rng).unwrap();
                if rng.gen_bool(0.3) { w.to_uppercase() } else { w.to_string() }
            };
            line.push_str(&word);
            line.push_str(seps.choose(&mut rng).unwrap());
        }
        let ts = tokenize(&line, &lex);
        let classes: Vec<NodeClass> = ts
            .significant()
            .filter_map(|t| NodeClass::of_token(t.class))
            .collect();
        // independent expectation: noise stripped, closed prefix, then a
        // non-empty keyword run, and prefix + K is a graph pattern
        let core = without_noise(&classes);
        let run = core.iter().rev().take_while(|&&c| c == NodeClass::K).count();
        let prefix = &core[..core.len() - run];
        let valid = run > 0 && !prefix.contains(&NodeClass::K) && {
            let mut p = prefix.to_vec();
            p.push(NodeClass::K);
            patterns.contains(&p)
        };
        match parse(&ts, &g) {
            Ok(p) => {
                accepted += 1;
                if p.ast.keyword_phrase.is_empty() {
                    empty_keyword += 1;
                }
                if !valid {
                    wrongly_accepted += 1;
                }
            }
            Err(_) if valid => wrongly_rejected += 1,
            Err(_) => {}
        }
    }
    verdict(
        empty_keyword == 0 && wrongly_rejected == 0 && wrongly_accepted == 0,
        format!(
            "10000 streams, {accepted} accepted, {empty_keyword} empty keyword phrases, \
             {wrongly_rejected} valid streams rejected, {wrongly_accepted} invalid streams accepted"
        ),
    )
}

fn ac7_echo_grammatical() -> Verdict {
    let engine = Engine::with_store(ProductStore::ingest(SAMPLE_CATALOG).unwrap());
    let batch = fs::read_to_string(golden_dir().join("batch.txt")).unwrap();
    let run = engine.run_text(&batch);
    let mut checked = 0;
    let mut failures = Vec::new();
    for s in &run.statements {
        let Outcome::Accepted(p) = &s.outcome else { continue };
        checked += 1;
        let text = echo(&p.ast);
        match parse(&tokenize(&text, &engine.lexicon), &engine.graph) {
            Ok(again) => {
                let same_path = again.ast.path() == p.ast.path();
                let kw = |a: &cnlsearch::StatementAst| a.keywords().map(str::to_lowercase).collect::<Vec<_>>();
                if !same_path || kw(&again.ast) != kw(&p.ast) {
                    failures.push(text);
                }
            }
            Err(_) => failures.push(text),
        }
    }
    verdict(
        failures.is_empty() && checked > 0,
        format!("{checked} accepted statements, echo failures: {failures:?}"),
    )
}

fn main() -> ExitCode {
    let suite_started = Instant::now();
    let criteria: [Criterion; 7] = [
        ("AC1 grammar-oracle equivalence", ac1_grammar_oracle),
        ("AC2 required-pattern conformance", ac2_required_patterns),
        ("AC3 retrieval-oracle equivalence", ac3_retrieval_oracle),
        ("AC4 tokenizer round-trip", ac4_round_trip),
        ("AC5 golden outputs", ac5_golden_outputs),
        ("AC6 mandatory keyword", ac6_mandatory_keyword),
        ("AC7 echo grammaticality", ac7_echo_grammatical),
    ];
    let mut all_passed = true;
    for (name, check) in criteria {
        let v = check();
        all_passed &= v.passed;
        println!("[{}] {name}: {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
    }
    let elapsed = suite_started.elapsed();
    let fast = elapsed < Duration::from_secs(60);
    all_passed &= fast;
    println!(
        "[{}] AC8 end-to-end runtime: acceptance suite {:.2} s (limit 60 s)",
        if fast { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
