mod input;
mod verify;

use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use jbt::builder::StreamBuilder;
use jbt::jiggly::NodeKind;
use jbt::oracle::{delta, dk_table};
use jbt::{Index, Symbol};
use serde_json::json;

#[derive(Parser)]
#[command(name = "jbt", version, about = "Streaming jiggly block tree index")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy)]
struct Mode {
    /// Read whitespace-separated integer tokens instead of raw bytes.
    #[arg(long, conflicts_with = "bytes")]
    tokens: bool,
    /// Read raw bytes (the default).
    #[arg(long)]
    bytes: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an index in one streaming pass.
    Build {
        /// Text file; stdin if omitted or `-`.
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        /// Sorted dictionaries instead of hashing, for bit-reproducible files.
        #[arg(long)]
        deterministic: bool,
        #[command(flatten)]
        mode: Mode,
        /// Print a JSON record of build statistics.
        #[arg(long)]
        stats_json: bool,
        /// Include the exact string complexity in the statistics.
        #[arg(long, requires = "stats_json")]
        delta: bool,
    },
    /// Report occurrences of a pattern.
    Search {
        index: PathBuf,
        pattern: Option<String>,
        /// Read the pattern from a file.
        #[arg(long, conflicts_with_all = ["pattern", "batch"])]
        pattern_file: Option<PathBuf>,
        /// One pattern per line; one result line per pattern.
        #[arg(long, conflicts_with = "pattern")]
        batch: Option<PathBuf>,
        #[command(flatten)]
        mode: Mode,
        #[arg(long)]
        count_only: bool,
        #[arg(long)]
        json: bool,
        /// Worker threads for batches.
        #[arg(long, default_value_t = 4)]
        threads: usize,
    },
    /// Summarize an index file.
    Stats {
        index: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check an index against its text.
    Verify {
        index: PathBuf,
        text: PathBuf,
        #[command(flatten)]
        mode: Mode,
        /// Largest n for the suites that rebuild the hierarchy.
        #[arg(long, default_value_t = 1 << 18)]
        offline_limit: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exact string complexity and the d_k table.
    Delta {
        text: PathBuf,
        #[command(flatten)]
        mode: Mode,
        #[arg(long, default_value_t = 1 << 14)]
        max_n: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Build { input, output, deterministic, mode, stats_json, delta } => {
            build(input.as_deref(), &output, deterministic, mode.tokens, stats_json, delta)
        }
        Cmd::Search { index, pattern, pattern_file, batch, mode, count_only, json, threads } => {
            search(&index, pattern, pattern_file, batch, mode.tokens, count_only, json, threads)
        }
        Cmd::Stats { index, json } => stats(&index, json),
        Cmd::Verify { index, text, mode, offline_limit, samples, seed } => {
            verify(&index, &text, mode.tokens, offline_limit, samples, seed)
        }
        Cmd::Delta { text, mode, max_n } => delta_cmd(&text, mode.tokens, max_n),
    };
    match r {
        Ok(code) => code,
        Err(e) => {
            eprintln!("jbt: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load(path: &Path) -> Result<Index, String> {
    Index::load_file(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn build(
    input: Option<&Path>,
    output: &Path,
    det: bool,
    tokens: bool,
    stats_json: bool,
    want_delta: bool,
) -> Result<ExitCode, String> {
    let start = Instant::now();
    let mut b = StreamBuilder::new(det);
    let mut kept: Vec<Symbol> = Vec::new();
    if tokens {
        let s = input::symbols(&input::read_all(input)?, true)?;
        b.feed_all(s.iter().copied());
        kept = s;
    } else {
        let mut reader: Box<dyn Read> = match input {
            Some(p) if p != Path::new("-") => {
                Box::new(std::fs::File::open(p).map_err(|e| format!("{}: {e}", p.display()))?)
            }
            _ => Box::new(std::io::stdin()),
        };
        let mut buf = vec![0u8; 1 << 16];
        loop {
            let k = reader.read(&mut buf).map_err(|e| e.to_string())?;
            if k == 0 {
                break;
            }
            b.feed_all(buf[..k].iter().map(|&c| c as Symbol));
            if want_delta {
                kept.extend(buf[..k].iter().map(|&c| c as Symbol));
            }
        }
    }
    let (j, st) = b.finish_tree().map_err(|e| e.to_string())?;
    let index = Index::from_jiggly(j, det);
    index.save_file(output).map_err(|e| format!("{}: {e}", output.display()))?;
    let secs = start.elapsed().as_secs_f64();
    if stats_json {
        let mut rec = json!({
            "n": st.letters,
            "nodes": index.size(),
            "pairs": index.pair_count(),
            "blocks_per_level": st.blocks,
            "max_queue_per_level": st.max_queue,
            "ids_minted": st.ids_minted,
            "deterministic": det,
            "seconds": secs,
        });
        if want_delta {
            rec["delta"] = if kept.len() <= 1 << 14 { json!(delta(&kept).to_string()) } else { json!(null) };
        }
        println!("{rec}");
    }
    Ok(ExitCode::SUCCESS)
}

fn patterns(
    pattern: Option<String>,
    file: Option<PathBuf>,
    batch: Option<PathBuf>,
    tokens: bool,
) -> Result<Vec<Vec<Symbol>>, String> {
    if let Some(p) = batch {
        let data = input::read_all(Some(&p))?;
        return data
            .split(|&c| c == b'\n')
            .filter(|l| !l.is_empty())
            .map(|l| input::symbols(l.strip_suffix(b"\r").unwrap_or(l), tokens))
            .collect();
    }
    let data = match (pattern, file) {
        (Some(p), _) => p.into_bytes(),
        (None, Some(f)) => input::read_all(Some(&f))?,
        (None, None) => return Err("no pattern given".into()),
    };
    Ok(vec![input::symbols(&data, tokens)?])
}

#[allow(clippy::too_many_arguments)]
fn search(
    index: &Path,
    pattern: Option<String>,
    file: Option<PathBuf>,
    batch: Option<PathBuf>,
    tokens: bool,
    count_only: bool,
    json: bool,
    threads: usize,
) -> Result<ExitCode, String> {
    let is_batch = batch.is_some();
    let idx = load(index)?;
    let pats = patterns(pattern, file, batch, tokens)?;
    if pats.iter().any(|p| p.is_empty()) {
        return Err("empty pattern".into());
    }
    let chunk = pats.len().div_ceil(threads.max(1)).max(1);
    let results: Vec<Vec<usize>> = std::thread::scope(|sc| {
        let handles: Vec<_> = pats
            .chunks(chunk)
            .map(|c| sc.spawn(|| c.iter().map(|t| idx.search(t).expect("nonempty pattern")).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("search thread")).collect()
    });
    let mut out = BufWriter::new(std::io::stdout().lock());
    let w = |e: std::io::Error| e.to_string();
    if json {
        let v = if count_only { json!(results.iter().map(Vec::len).collect::<Vec<_>>()) } else { json!(results) };
        let v = if is_batch { v } else { v[0].clone() };
        writeln!(out, "{v}").map_err(w)?;
    } else if is_batch {
        for r in &results {
            if count_only {
                writeln!(out, "{}", r.len()).map_err(w)?;
            } else {
                let line: Vec<String> = r.iter().map(usize::to_string).collect();
                writeln!(out, "{}", line.join(" ")).map_err(w)?;
            }
        }
    } else if count_only {
        writeln!(out, "{}", results[0].len()).map_err(w)?;
    } else {
        for p in &results[0] {
            writeln!(out, "{p}").map_err(w)?;
        }
    }
    out.flush().map_err(w)?;
    Ok(ExitCode::SUCCESS)
}

fn stats(index: &Path, as_json: bool) -> Result<ExitCode, String> {
    let idx = load(index)?;
    let count = |k: NodeKind| idx.j.nodes.iter().filter(|v| v.kind == k).count();
    let rec = json!({
        "n": idx.n(),
        "nodes": idx.size(),
        "pairs": idx.pair_count(),
        "top_level": idx.j.top_level,
        "deterministic": idx.deterministic,
        "letters": count(NodeKind::Letter),
        "runs": count(NodeKind::Run),
        "groups": count(NodeKind::Group),
        "copy_leaves": count(NodeKind::CopyLeaf),
        "intermediates": count(NodeKind::Intermediate),
    });
    if as_json {
        println!("{rec}");
    } else {
        for (k, v) in rec.as_object().expect("object") {
            println!("{k}\t{v}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(
    index: &Path,
    text: &Path,
    tokens: bool,
    limit: usize,
    samples: usize,
    seed: u64,
) -> Result<ExitCode, String> {
    let idx = match Index::load_file(index) {
        Ok(i) => i,
        Err(e) => {
            println!("FAIL load: {e}");
            return Ok(ExitCode::FAILURE);
        }
    };
    println!("PASS load");
    let s = input::symbols(&input::read_all(Some(text))?, tokens)?;
    let mut ok = true;
    for suite in verify::run(&idx, &s, limit, samples, seed) {
        match suite.outcome {
            verify::Outcome::Pass => println!("PASS {}", suite.name),
            verify::Outcome::Skipped(why) => println!("SKIP {}: {why}", suite.name),
            verify::Outcome::Fail(why) => {
                ok = false;
                println!("FAIL {}: {why}", suite.name);
            }
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn delta_cmd(text: &Path, tokens: bool, max_n: usize) -> Result<ExitCode, String> {
    let s = input::symbols(&input::read_all(Some(text))?, tokens)?;
    if s.is_empty() {
        return Err("empty text".into());
    }
    if s.len() > max_n {
        return Err(format!(
            "n = {} exceeds the oracle bound {max_n}; pass --max-n to raise it (quadratic time and memory)",
            s.len()
        ));
    }
    let mut out = BufWriter::new(std::io::stdout().lock());
    let w = |e: std::io::Error| e.to_string();
    writeln!(out, "delta,{}", delta(&s)).map_err(w)?;
    writeln!(out, "k,d_k").map_err(w)?;
    for (k, d) in dk_table(&s).iter().enumerate() {
        writeln!(out, "{},{d}", k + 1).map_err(w)?;
    }
    out.flush().map_err(w)?;
    Ok(ExitCode::SUCCESS)
}
