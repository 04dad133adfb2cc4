//! Batch front end: towers, embeddings, verification, composition-series
//! embeddings, co-Hopfian verdicts, the universal sequence and the
//! catalog.
//!
//! Exit codes: 0 success (or decided verdict), 1 error (including a
//! failed verification), 2 undecided verdict.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use iwreath::cohopf::{
    catalog, cohopfian_verdict, greedy_map_for_spec, universal_sequence, SequenceSpec,
    SequenceSpecJson,
};
use iwreath::embed::{
    embedding_from_json, embedding_to_json, embedding_to_string, ia_into_pa, insert_middle,
    pembed_wreath, perm_iso_wreath, self_embed, subsequence_embed, term_witness, EmbeddingJson,
    EmbeddingReport, PEmbedding,
};
use iwreath::error::{Error, Result};
use iwreath::groupspec::parse_group_spec;
use iwreath::kaloujnine::{choose_transversals, embed_via_series, validate_series};
use iwreath::wreath::{tower, Tower, WreathKind, DEFAULT_MATERIALIZATION_CAP};
use iwreath::{Perm, PermGroup};

#[derive(Parser)]
#[command(name = "iwreath", version, about = "iterated wreath product toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Write the main output to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Materialization cap for flattening and domain enumeration
    #[arg(long, global = true, default_value_t = DEFAULT_MATERIALIZATION_CAP)]
    cap: usize,

    /// Seed for sampled verification (printed in every report)
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Build an iterated wreath product and print the level table
    Tower {
        /// `ia` (imprimitive) or `pa` (product action)
        kind: String,
        /// Comma-separated term specs, innermost first; repeated
        /// cyclically when shorter than the level
        terms: String,
        #[arg(long)]
        level: usize,
        /// Also flatten the top level to explicit permutations
        #[arg(long)]
        flatten: bool,
    },
    /// Run one of the embedding constructions and verify it
    Embed {
        #[command(subcommand)]
        which: EmbedCmd,
    },
    /// Re-verify a serialized embedding
    Verify { file: PathBuf },
    /// Embed a group with a chosen composition series into the factor tower
    Kaloujnine {
        /// Series file: { "group": spec, "chain": [[cycles, ..], .., []] }
        #[arg(long)]
        series: PathBuf,
    },
    /// Co-Hopfian verdict for a sequence spec file
    Cohopf { spec: PathBuf },
    /// The block sequence over a list of representatives
    UniversalSeq {
        /// Comma-separated representative names
        #[arg(long)]
        reps: String,
        #[arg(long)]
        length: usize,
    },
    /// List the minimal-simple catalog
    Catalog,
}

#[derive(Subcommand)]
enum EmbedCmd {
    /// Lift a degree-r>=2 embedding file through the wreath construction
    Prop34 {
        /// Bottom group spec
        #[arg(long)]
        s: String,
        /// Input embedding (JSON)
        #[arg(long)]
        embedding: PathBuf,
        /// Assert the input degree
        #[arg(long)]
        r: Option<u64>,
    },
    /// Embed the imprimitive tower into the product-action tower
    Cor35 {
        /// Terms S_0,..,S_n (comma separated)
        #[arg(long)]
        seq: String,
        #[arg(long)]
        level: usize,
    },
    /// Lift two subgroup witnesses through the product action
    Lem41 {
        #[arg(long)]
        h1: String,
        #[arg(long)]
        g1: String,
        #[arg(long)]
        h2: String,
        #[arg(long)]
        g2: String,
    },
    /// Insert a middle term, identifying the top groups
    Lem42 {
        #[arg(long)]
        h: String,
        #[arg(long)]
        k: String,
        #[arg(long)]
        g: String,
    },
    /// Embed the tower over a subsequence into the full tower
    Prop43 {
        /// Terms S_1,..,S_L (comma separated)
        #[arg(long)]
        seq: String,
        /// Strictly increasing 1-based indices (comma separated)
        #[arg(long)]
        m: String,
    },
    /// Finite-level self-embedding of a sequence spec
    #[command(name = "thmC")]
    ThmC {
        /// Sequence spec file (JSON)
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        level: usize,
        /// Index map (comma separated); greedy when omitted
        #[arg(long)]
        m: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Tower {
            kind,
            terms,
            level,
            flatten,
        } => cmd_tower(cli, kind, terms, *level, *flatten),
        Command::Embed { which } => cmd_embed(cli, which),
        Command::Verify { file } => cmd_verify(cli, file),
        Command::Kaloujnine { series } => cmd_kaloujnine(cli, series),
        Command::Cohopf { spec } => cmd_cohopf(cli, spec),
        Command::UniversalSeq { reps, length } => cmd_universal(cli, reps, *length),
        Command::Catalog => cmd_catalog(cli),
    }
}

fn emit(cli: &Cli, text: String) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            if let Err(e) = writeln!(out, "{text}") {
                if e.kind() == std::io::ErrorKind::BrokenPipe {
                    std::process::exit(0);
                }
                return Err(e.into());
            }
        }
    }
    Ok(())
}

fn parse_terms(list: &str) -> Result<Vec<PermGroup>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_group_spec(s.trim()))
        .collect()
}

fn parse_indices(list: &str) -> Result<Vec<usize>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad index `{s}`")))
        })
        .collect()
}

/// Exact decimal up to 10^4 digits, factored form beyond.
fn format_big(x: &BigUint) -> String {
    let digits = x.to_string();
    if digits.len() <= 10_000 {
        return digits;
    }
    let mut rest = x.clone();
    let mut parts: Vec<String> = Vec::new();
    let mut p = 2u32;
    while p <= 10_000 && rest > BigUint::from(1u32) {
        let bp = BigUint::from(p);
        let mut e = 0u32;
        while (&rest % &bp) == BigUint::from(0u32) {
            rest /= &bp;
            e += 1;
        }
        if e == 1 {
            parts.push(p.to_string());
        } else if e > 1 {
            parts.push(format!("{p}^{e}"));
        }
        p += 1;
    }
    if rest > BigUint::from(1u32) {
        parts.push(format!("(a {}-digit factor)", rest.to_string().len()));
    }
    parts.join(" * ")
}

#[derive(Serialize)]
struct TowerLevelReport {
    level: usize,
    degree: String,
    order: String,
    transitive: bool,
}

#[derive(Serialize)]
struct TowerReport {
    kind: String,
    level: usize,
    degree: String,
    order: String,
    transitive: bool,
    levels: Vec<TowerLevelReport>,
}

fn cmd_tower(cli: &Cli, kind: &str, terms: &str, level: usize, flatten: bool) -> Result<ExitCode> {
    let kind = WreathKind::parse(kind)?;
    let base = parse_terms(terms)?;
    if base.is_empty() || level == 0 {
        return Err(Error::InvalidArgument(
            "need at least one term and a positive level".into(),
        ));
    }
    // repeat the list cyclically up to the requested level
    let seq: Vec<PermGroup> = (0..level).map(|i| base[i % base.len()].clone()).collect();
    let mut levels = Vec::with_capacity(level);
    let mut top: Option<Tower> = None;
    for n in 1..=level {
        let t = tower(kind, &seq, n)?;
        levels.push(TowerLevelReport {
            level: n,
            degree: t.degree().to_string(),
            order: t.order().to_string(),
            transitive: t.is_transitive(),
        });
        if n == level {
            top = Some(t);
        }
    }
    let top = top.expect("level >= 1");
    if flatten {
        let flat = top.flatten(cli.cap)?;
        levels.last_mut().expect("non-empty").transitive = flat.is_transitive();
    }
    let report = TowerReport {
        kind: kind.short().to_string(),
        level,
        degree: top.degree().to_string(),
        order: top.order().to_string(),
        transitive: top.is_transitive(),
        levels,
    };
    if cli.json {
        emit(cli, serde_json::to_string_pretty(&report)?)?;
    } else {
        let mut text = format!("{} tower, {} level(s)\n", report.kind, report.level);
        for l in &report.levels {
            text.push_str(&format!(
                "  level {}: degree {}, order {}, transitive {}\n",
                l.level,
                format_big(&l.degree.parse::<BigUint>().unwrap()),
                format_big(&l.order.parse::<BigUint>().unwrap()),
                l.transitive
            ));
        }
        if flatten {
            text.push_str("  flattened: ok\n");
        }
        emit(cli, text)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_and_report(
    cli: &Cli,
    e: &PEmbedding,
    extra: Vec<String>,
) -> Result<(EmbeddingReport, ExitCode)> {
    let report = match cli.seed {
        Some(seed) => e.verify_seeded(seed)?,
        None => e.verify()?,
    };
    let passed = report.passed();
    if cli.json {
        let json = embedding_to_json(e, Some(report.clone()))?;
        emit(cli, embedding_to_string(&json))?;
    } else {
        let mut text = String::new();
        for line in &extra {
            text.push_str(line);
            text.push('\n');
        }
        text.push_str(&format!(
            "source: degree {}, order {}\n",
            e.source.degree(),
            format_big(&e.source.order())
        ));
        text.push_str(&format!(
            "target: degree {}, order {}\n",
            format_big(&e.target.degree()),
            format_big(&e.target.order())
        ));
        text.push_str(&format!("degree r = {}\n", e.degree));
        text.push_str(&report.to_string());
        emit(cli, text)?;
    }
    Ok((
        report,
        if passed {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        },
    ))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn cmd_embed(cli: &Cli, which: &EmbedCmd) -> Result<ExitCode> {
    match which {
        EmbedCmd::Prop34 { s, embedding, r } => {
            let s = parse_group_spec(s)?;
            let json: EmbeddingJson = read_json(embedding)?;
            let input = embedding_from_json(&json)?;
            if let Some(r) = r {
                if input.degree != *r {
                    return Err(Error::InvalidArgument(format!(
                        "input embedding has degree {}, asserted {r}",
                        input.degree
                    )));
                }
            }
            let input_report = input.verify()?;
            if !input_report.passed() {
                return Err(Error::InvalidArgument(
                    "input embedding fails verification".into(),
                ));
            }
            let e = pembed_wreath(&input, &s)?;
            let (_, code) = verify_and_report(cli, &e, vec!["wreath lift".into()])?;
            Ok(code)
        }
        EmbedCmd::Cor35 { seq, level } => {
            let terms = parse_terms(seq)?;
            let out = ia_into_pa(&terms, *level)?;
            let mut extra = vec![format!("tower embedding at level {level}")];
            for c in &out.compatibility {
                extra.push(format!(
                    "projection compatibility at level {}: {} ({} elements)",
                    c.level,
                    if c.ok { "ok" } else { "FAIL" },
                    c.checked_elements
                ));
                if !c.ok {
                    return Err(Error::InvalidArgument(
                        "projection compatibility failed".into(),
                    ));
                }
            }
            let (_, code) = verify_and_report(cli, out.top(), extra)?;
            Ok(code)
        }
        EmbedCmd::Lem41 { h1, g1, h2, g2 } => {
            let h1 = parse_group_spec(h1)?;
            let g1 = parse_group_spec(g1)?;
            let h2 = parse_group_spec(h2)?;
            let g2 = parse_group_spec(g2)?;
            let w1 = term_witness(&[h1.clone(), g1.clone()], 1, 2)?;
            let w2 = term_witness(&[h2.clone(), g2.clone()], 1, 2)?;
            let e = perm_iso_wreath(&w1, &w2)?;
            let (_, code) = verify_and_report(cli, &e, vec!["witness lift".into()])?;
            Ok(code)
        }
        EmbedCmd::Lem42 { h, k, g } => {
            let h = parse_group_spec(h)?;
            let k = parse_group_spec(k)?;
            let g = parse_group_spec(g)?;
            let e = insert_middle(&h, &k, &Tower::Leaf(g))?;
            let (_, code) = verify_and_report(cli, &e, vec!["middle insertion".into()])?;
            Ok(code)
        }
        EmbedCmd::Prop43 { seq, m } => {
            let terms = parse_terms(seq)?;
            let m = parse_indices(m)?;
            let e = subsequence_embed(&terms, &m, m.len())?;
            let (_, code) = verify_and_report(cli, &e, vec!["subsequence embedding".into()])?;
            Ok(code)
        }
        EmbedCmd::ThmC { spec, level, m } => {
            let json: SequenceSpecJson = read_json(spec)?;
            let spec = SequenceSpec::resolve(&json)?;
            let m = match m {
                Some(list) => parse_indices(list)?,
                None => greedy_map_for_spec(&spec, *level)?,
            };
            let top = *m
                .last()
                .ok_or_else(|| Error::InvalidArgument("the index map must be non-empty".into()))?;
            let terms = spec.realized_terms(top)?;
            let se = self_embed(&terms, *level, &m, None)?;
            let extra = vec![
                format!("self-embedding at level {level} with m = {m:?}"),
                format!(
                    "image order {}, target order {}, proper: {}, index {}",
                    format_big(&se.source_order),
                    format_big(&se.target_order),
                    se.proper,
                    format_big(&se.index)
                ),
            ];
            let (_, code) = verify_and_report(cli, &se.embedding, extra)?;
            Ok(code)
        }
    }
}

fn cmd_verify(cli: &Cli, file: &Path) -> Result<ExitCode> {
    let json: EmbeddingJson = read_json(file)?;
    let e = embedding_from_json(&json)?;
    let (_, code) = verify_and_report(cli, &e, vec![format!("re-verifying {}", file.display())])?;
    Ok(code)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GroupRef {
    Spec(String),
    Explicit {
        degree: usize,
        generators: Vec<String>,
    },
}

#[derive(Deserialize)]
struct SeriesFile {
    group: GroupRef,
    chain: Vec<Vec<String>>,
}

fn cmd_kaloujnine(cli: &Cli, series: &Path) -> Result<ExitCode> {
    let file: SeriesFile = read_json(series)?;
    let group = match &file.group {
        GroupRef::Spec(s) => parse_group_spec(s)?,
        GroupRef::Explicit { degree, generators } => {
            let gens = generators
                .iter()
                .map(|s| Perm::parse(s, *degree))
                .collect::<Result<Vec<_>>>()?;
            PermGroup::from_generators(iwreath::Domain::plain(*degree), gens)?
        }
    };
    let chain = file
        .chain
        .iter()
        .map(|gens| {
            gens.iter()
                .map(|s| Perm::parse(s, group.degree()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let s = validate_series(&group, &chain)?;
    let table = choose_transversals(&s)?;
    let e = embed_via_series(&s, &table)?;
    let mut extra = vec![format!(
        "composition series of length {}, factor orders {:?}",
        s.len(),
        s.factors()
            .iter()
            .map(|f| f.order_usize().unwrap_or(0))
            .collect::<Vec<_>>()
    )];
    for (n, level) in table.levels().iter().enumerate() {
        extra.push(format!(
            "  level {}: {} cosets, transversal [{}]",
            n + 1,
            level.coset_count(),
            level
                .reps()
                .iter()
                .map(|p| p.to_cycle_string())
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    let (_, code) = verify_and_report(cli, &e, extra)?;
    Ok(code)
}

fn cmd_cohopf(cli: &Cli, spec: &Path) -> Result<ExitCode> {
    let json: SequenceSpecJson = read_json(spec)?;
    let spec = SequenceSpec::resolve(&json)?;
    let verdict = cohopfian_verdict(&spec)?;
    if cli.json {
        emit(cli, serde_json::to_string_pretty(&verdict)?)?;
    } else {
        let mut text = format!(
            "outcome: {}\n",
            match verdict.outcome {
                iwreath::cohopf::Outcome::NonCoHopfian => "non-co-hopfian",
                iwreath::cohopf::Outcome::CoHopfian => "co-hopfian",
                iwreath::cohopf::Outcome::Unknown => "unknown",
            }
        );
        if let Some(t) = &verdict.theorem {
            text.push_str(&format!("justified by statement {t}\n"));
        }
        if let Some(n0) = verdict.witnesses.n0 {
            text.push_str(&format!("n0 = {n0}\n"));
        }
        for (j, k) in &verdict.witnesses.m {
            text.push_str(&format!("  m({j}) = {k}\n"));
        }
        if let Some(term) = &verdict.witnesses.offending_term {
            text.push_str(&format!("offending term: {term}\n"));
        }
        for note in &verdict.notes {
            text.push_str(&format!("note: {note}\n"));
        }
        emit(cli, text)?;
    }
    Ok(if verdict.decided() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_universal(cli: &Cli, reps: &str, length: usize) -> Result<ExitCode> {
    let reps: Vec<String> = reps
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().to_string())
        .collect();
    let seq = universal_sequence(&reps, length)?;
    if cli.json {
        emit(cli, serde_json::to_string_pretty(&seq)?)?;
    } else {
        emit(cli, seq.join(", "))?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CatalogRow {
    name: String,
    family: String,
    order: u64,
    degree: u64,
    realized: bool,
}

fn cmd_catalog(cli: &Cli) -> Result<ExitCode> {
    let rows: Vec<CatalogRow> = catalog()
        .iter()
        .map(|e| CatalogRow {
            name: e.name.to_string(),
            family: e.family.label().to_string(),
            order: e.order,
            degree: e.degree,
            realized: e.realized,
        })
        .collect();
    if cli.json {
        emit(cli, serde_json::to_string_pretty(&rows)?)?;
    } else {
        let mut text = String::from("name      family      order   degree  realized\n");
        for r in &rows {
            text.push_str(&format!(
                "{:<9} {:<11} {:<7} {:<7} {}\n",
                r.name, r.family, r.order, r.degree, r.realized
            ));
        }
        emit(cli, text)?;
    }
    Ok(ExitCode::SUCCESS)
}
