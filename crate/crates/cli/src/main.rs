use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use ternega::designs::{extremal_design_strength, verify_t_design};
use ternega::infoset::{codewords_up_to_weight, min_weight};
use ternega::records::import_plain_rows;
use ternega::report::{load_summaries, render_report, RunSummary};
use ternega::search::{
    classify_survivors, merge_shards, run_shard, Partition, ShardOutput, ShardRun, RESTRICTED_56_PREFIXES,
};
use ternega::{
    are_equivalent_exact, classify_length, classify_up_to_equivalence, read_records, support_design, write_records,
    ClassificationResult, CodeRecord, Error, SearchOptions, SearchSpec, Source,
};

/// Searches at or above this length need `--long-running`.
const LONG_SEARCH_LENGTH: usize = 40;
/// Minimum-weight work on records at or above this length needs `--long-running`.
const LONG_RECORD_LENGTH: usize = 64;

#[derive(Parser)]
#[command(name = "ternega", version, about = "Ternary self-dual four-negacirculant codes")]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute every property stored in a record file.
    Verify {
        file: PathBuf,
        #[arg(long)]
        long_running: bool,
    },
    /// Search one length and classify the survivors.
    Search(SearchArgs),
    /// Minimum weight and number of minimum-weight codewords of each record.
    Minweight {
        file: PathBuf,
        /// 1-based record number; all records when absent.
        #[arg(long)]
        record: Option<usize>,
        #[arg(long)]
        long_running: bool,
    },
    /// Classify the codes of one or more record files up to equivalence.
    Equivalent {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Support design of the minimum-weight codewords of one record.
    Design {
        file: PathBuf,
        /// 1-based record number.
        #[arg(long, default_value_t = 1)]
        record: usize,
        /// Design strength to check; defaults to the strength guaranteed for
        /// extremal codes of that length.
        #[arg(long)]
        t: Option<usize>,
        /// Write the blocks here, one per line.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        long_running: bool,
    },
    /// Table of class counts from the run summaries in a directory.
    Report {
        #[arg(default_value = "results")]
        dir: PathBuf,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    partitions: usize,
    #[arg(long, default_value_t = 0)]
    partition_index: usize,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Allowed leading trits of r_A, comma separated, e.g. `00000,00001`.
    #[arg(long)]
    prefix: Option<String>,
    /// Use the five leading patterns of the partial length-56 search.
    #[arg(long, conflicts_with = "prefix")]
    restricted: bool,
    #[arg(long)]
    target_weight: Option<usize>,
    #[arg(long)]
    long_running: bool,
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    /// Merge these shard files and classify instead of searching.
    #[arg(long, num_args = 1..)]
    merge: Vec<PathBuf>,
}

/// Failures with their exit status.
enum Failure {
    Mismatch(String),
    Usage(String),
    Guard(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let text = format!("{e:#}");
        match e.downcast_ref::<Error>() {
            Some(Error::Budget(_)) => Failure::Guard(text),
            _ => Failure::Usage(text),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::Verify { file, long_running } => verify(&file, long_running),
        Command::Search(args) => search(&args),
        Command::Minweight { file, record, long_running } => minweight(&file, record, long_running),
        Command::Equivalent { files } => equivalent(&files),
        Command::Design { file, record, t, out, long_running } => {
            design(&file, record, t, out.as_deref(), long_running)
        }
        Command::Report { dir } => report(&dir),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(m)) => {
            eprintln!("mismatch: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Guard(m)) => {
            eprintln!("refused: {m}");
            ExitCode::from(3)
        }
    }
}

/// Records from JSON lines, or from plain rows when the first meaningful
/// line does not start with `{`.
fn load(path: &Path) -> anyhow::Result<Vec<CodeRecord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'));
    let records = if first.is_none_or(|l| l.starts_with('{')) {
        read_records(BufReader::new(text.as_bytes()))
    } else {
        import_plain_rows(&text).map(|pairs| pairs.iter().map(plain_record).collect())
    };
    records.with_context(|| path.display().to_string())
}

/// Imported rows carry no verified properties yet.
fn plain_record(p: &ternega::NegaPair) -> CodeRecord {
    CodeRecord {
        n: p.length(),
        ra: p.ra.to_trits(),
        rb: p.rb.to_trits(),
        self_dual: p.is_self_dual(),
        min_weight: 0,
        min_weight_count: None,
        class_id: None,
        source: Source::ExternalList,
    }
}

fn guard_length(records: &[&CodeRecord], long_running: bool) -> Outcome {
    match records.iter().map(|r| r.n).max() {
        Some(n) if n >= LONG_RECORD_LENGTH && !long_running => Err(Failure::Guard(format!(
            "records of length {n} take hours; pass --long-running to proceed"
        ))),
        _ => Ok(()),
    }
}

fn select(records: &[CodeRecord], record: usize) -> Result<&CodeRecord, Failure> {
    record
        .checked_sub(1)
        .and_then(|i| records.get(i))
        .ok_or_else(|| Failure::Usage(format!("record {record} not found; the file holds {}", records.len())))
}

fn verify(file: &Path, long_running: bool) -> Outcome {
    let records = load(file)?;
    guard_length(&records.iter().collect::<Vec<_>>(), long_running)?;
    for (i, r) in records.iter().enumerate() {
        if let Some(problem) = r.check()? {
            return Err(Failure::Mismatch(format!("record {} ({}): {problem}", i + 1, r.pair()?)));
        }
        println!("record {}: n={} d={} ok", i + 1, r.n, r.min_weight);
    }
    println!("{} records verified", records.len());
    Ok(())
}

fn parse_prefixes(text: &str) -> anyhow::Result<Vec<Vec<u8>>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .chars()
                .map(|c| c.to_digit(3).map(|d| d as u8).ok_or_else(|| anyhow!("bad trit {c:?} in prefix {p:?}")))
                .collect()
        })
        .collect()
}

fn search(args: &SearchArgs) -> Outcome {
    if args.n >= LONG_SEARCH_LENGTH && !args.long_running {
        return Err(Failure::Guard(format!(
            "a search at length {} takes days; pass --long-running to proceed",
            args.n
        )));
    }
    let mut spec = SearchSpec::new(args.n)?;
    if let Some(w) = args.target_weight {
        spec = spec.with_target(w);
    }
    if args.restricted {
        spec = spec.with_prefixes(RESTRICTED_56_PREFIXES.iter().map(|p| p.to_vec()).collect())?;
    } else if let Some(text) = &args.prefix {
        spec = spec.with_prefixes(parse_prefixes(text)?)?;
    }
    fs::create_dir_all(&args.out_dir).with_context(|| args.out_dir.display().to_string())?;

    if !args.merge.is_empty() {
        let shards = args
            .merge
            .iter()
            .map(|p| {
                let bytes = fs::read(p).with_context(|| p.display().to_string())?;
                serde_json::from_slice::<ShardOutput>(&bytes).with_context(|| p.display().to_string())
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        let merged = merge_shards(shards)?;
        if merged.spec != spec {
            return Err(Failure::Usage("shards were written for a different search".into()));
        }
        return finish(&classify_survivors(&merged)?, &args.out_dir);
    }

    let opts = SearchOptions { checkpoint: args.checkpoint.clone(), stop_after_ranks: None };
    if args.partitions > 1 {
        let spec = spec.with_partition(Partition::new(args.partition_index, args.partitions)?);
        let ShardRun::Complete(out) = run_shard(&spec, &opts)? else {
            unreachable!("shards run to completion without a stop request");
        };
        let path = args.out_dir.join(format!("{}.shard-{}-of-{}.json", args.n, args.partition_index, args.partitions));
        fs::write(&path, serde_json::to_vec(&out).map_err(anyhow::Error::from)?)
            .with_context(|| path.display().to_string())?;
        eprintln!("{} survivors written to {}", out.survivors.len(), path.display());
        return Ok(());
    }
    let result = classify_length(&spec, &opts)?.expect("runs without a stop request complete");
    finish(&result, &args.out_dir)
}

/// Writes the representatives and run summary, then prints the class count.
fn finish(result: &ClassificationResult, out_dir: &Path) -> Outcome {
    let records: Vec<CodeRecord> = result
        .representatives
        .iter()
        .enumerate()
        .map(|(i, r)| CodeRecord {
            n: result.n,
            ra: r.pair.ra.to_trits(),
            rb: r.pair.rb.to_trits(),
            self_dual: true,
            min_weight: r.min_weight,
            min_weight_count: None,
            class_id: Some(i + 1),
            source: Source::Search,
        })
        .collect();
    let path = out_dir.join(format!("{}.classes.jsonl", result.n));
    let file = fs::File::create(&path).with_context(|| path.display().to_string())?;
    let mut w = BufWriter::new(file);
    write_records(&mut w, &records)?;
    w.flush().map_err(anyhow::Error::from)?;
    RunSummary::from_result(result, true).save(out_dir)?;
    eprintln!(
        "n={}: {} survivors, {} classes; representatives in {}",
        result.n,
        result.survivor_count,
        result.class_count,
        path.display()
    );
    println!("{}", result.class_count);
    Ok(())
}

fn minweight(file: &Path, record: Option<usize>, long_running: bool) -> Outcome {
    let records = load(file)?;
    let chosen: Vec<(usize, &CodeRecord)> = match record {
        Some(k) => vec![(k, select(&records, k)?)],
        None => records.iter().enumerate().map(|(i, r)| (i + 1, r)).collect(),
    };
    guard_length(&chosen.iter().map(|(_, r)| *r).collect::<Vec<_>>(), long_running)?;
    for (k, r) in chosen {
        let code = r.pair()?.code();
        let d = min_weight(&code);
        let count = 2 * codewords_up_to_weight(&code, d).len();
        println!("record {k}: n={} d={d} count={count}", r.n);
    }
    Ok(())
}

fn equivalent(files: &[PathBuf]) -> Outcome {
    let mut records = Vec::new();
    for f in files {
        records.extend(load(f)?);
    }
    let codes: Vec<_> = records.iter().map(|r| Ok(r.pair()?.code())).collect::<Result<_, Error>>()?;
    if codes.len() == 2 {
        return match are_equivalent_exact(&codes[0], &codes[1])? {
            Some(map) => {
                println!("equivalent");
                println!("perm {:?}", map.perm());
                println!("scale {}", map.scale());
                Ok(())
            }
            None => {
                println!("inequivalent");
                Ok(())
            }
        };
    }
    let classes = classify_up_to_equivalence(&codes)?;
    for (i, c) in classes.iter().enumerate() {
        let members: Vec<String> = c.members.iter().map(|m| (m + 1).to_string()).collect();
        println!("class {}: records {}", i + 1, members.join(" "));
    }
    println!("{} classes", classes.len());
    Ok(())
}

fn design(file: &Path, record: usize, t: Option<usize>, out: Option<&Path>, long_running: bool) -> Outcome {
    let records = load(file)?;
    let r = select(&records, record)?;
    guard_length(&[r], long_running)?;
    let pair = r.pair()?;
    if !pair.is_self_dual() {
        return Err(Failure::Usage(format!(
            "record {record} is not self-dual; designs from minimum-weight supports are only guaranteed for self-dual codes"
        )));
    }
    let t = match t {
        Some(t) => t,
        None => extremal_design_strength(r.n)?,
    };
    let d = support_design(&pair.code())?;
    let lambda = match verify_t_design(&d, t) {
        Ok(l) => l,
        Err(e @ Error::NotADesign { .. }) => return Err(Failure::Mismatch(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = out {
        fs::write(path, d.to_block_lines()).with_context(|| path.display().to_string())?;
    }
    println!("{t}-({},{},{lambda}), b={}", d.v(), d.block_size(), d.num_blocks());
    Ok(())
}

fn report(dir: &Path) -> Outcome {
    print!("{}", render_report(&load_summaries(dir)?));
    Ok(())
}
