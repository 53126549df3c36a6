mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use ucca_convert::alt::{convert_alt_with_warnings, AltMode, MajorityMapping, MappingCounts};
use ucca_convert::conllulex::Sentence;
use ucca_convert::eval::{confusion, report, report_to_tsv, score};
use ucca_convert::rule;
use ucca_convert::ucca::{bracket_string, serialize_xml_many, validate, UccaPassage};
use ucca_convert::LexiconSet;

const LEXICON_ENV: &str = "UCCA_CONVERT_LEXICONS";

#[derive(Debug, Parser)]
#[command(
    name = "ucca-convert",
    version,
    about = "Convert UD + STREUSLE annotations to UCCA and score the results"
)]
struct Cli {
    /// Worker threads for per-sentence work.
    #[arg(long, short = 'j', default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..), global = true)]
    jobs: u16,
    /// Reject malformed input and fail (exit 2) on invalid output passages.
    #[arg(long, global = true)]
    strict: bool,
    /// Lexicon directory; defaults to the lists compiled into the tool.
    #[arg(long = "lex", env = LEXICON_ENV, global = true)]
    lexicons: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Xml,
    Json,
    Bracket,
    Tsv,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    /// CoNLL-U-Lex input documents.
    #[arg(long = "in", required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// Output file for one input, or directory for several.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Xml)]
    format: Format,
}

#[derive(Debug, Args)]
struct PairArgs {
    /// Gold passages: an XML/JSON file or a directory of them.
    #[arg(long)]
    gold: PathBuf,
    /// Predicted passages, same layout.
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rule-based conversion.
    Convert(ConvertArgs),
    /// Alternative conversion with a majority mapping.
    ConvertAlt {
        #[command(flatten)]
        io: ConvertArgs,
        /// Mapping table from `train-mapping`; without it every relation falls back.
        #[arg(long)]
        mapping: Option<PathBuf>,
        /// Use the mapping only, without lexical overrides.
        #[arg(long)]
        syntax_only: bool,
    },
    /// Learn a relation-to-category mapping from aligned corpora.
    TrainMapping {
        /// CoNLL-U-Lex training documents.
        #[arg(long = "in", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        /// Gold passages aligned by id.
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Labeled and unlabeled F1 for primary and remote edges.
    Evaluate {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
        /// Mapping whose hash goes into the manifest.
        #[arg(long)]
        mapping: Option<PathBuf>,
    },
    /// Predicted-by-gold unit category counts.
    Confusion {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Per-sentence matched, missed and spurious edges.
    Report {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
    /// Tool version and hashes of the lexicons and mapping in use.
    Manifest {
        #[arg(long)]
        mapping: Option<PathBuf>,
    },
}

/// Output passages failed validation under `--strict`.
#[derive(Debug, Error)]
#[error("{count} passage(s) failed validation, first: {first}")]
struct ValidationFailed {
    count: usize,
    first: String,
}

struct Setup {
    lex: LexiconSet,
    lex_source: String,
    strict: bool,
    pool: rayon::ThreadPool,
}

fn load_lexicons(dir: Option<&Path>) -> Result<(LexiconSet, String)> {
    match dir {
        None => Ok((LexiconSet::builtin(), "builtin".into())),
        Some(d) => {
            if !d.is_dir() {
                bail!("lexicon directory {} does not exist", d.display());
            }
            let (lex, warnings) = LexiconSet::load(d)?;
            for w in warnings {
                log::warn!("{w}");
            }
            Ok((lex, d.display().to_string()))
        }
    }
}

fn load_mapping(path: &Path) -> Result<MajorityMapping> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    MajorityMapping::from_tsv(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn manifest(ctx: &Setup, mapping: Option<&MajorityMapping>) -> serde_json::Value {
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "lexicons": {
            "source": ctx.lex_source,
            "fingerprint": ctx.lex.fingerprint(),
            "files": ctx.lex.hashes,
        },
        "mapping": mapping.map(|m| m.fingerprint()),
    })
}

fn render(passages: &[UccaPassage], format: Format) -> Result<String> {
    Ok(match format {
        Format::Xml => serialize_xml_many(passages),
        Format::Json => {
            let canon: Vec<UccaPassage> = passages.iter().map(|p| p.canonicalize()).collect();
            serde_json::to_string_pretty(&canon)? + "\n"
        }
        Format::Bracket => passages
            .iter()
            .map(|p| format!("{}\t{}\n", p.passage_id, bracket_string(p)))
            .collect(),
        Format::Tsv => bail!("tsv is not a passage format; use xml, json or bracket"),
    })
}

fn output_path(args: &ConvertArgs, input: &Path) -> PathBuf {
    if args.inputs.len() == 1 && !args.out.is_dir() {
        return args.out.clone();
    }
    let ext = match args.format {
        Format::Xml => "xml",
        Format::Json => "json",
        _ => "txt",
    };
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    args.out.join(format!("{stem}.{ext}"))
}

/// Converts every input document in parallel, preserving sentence order.
fn convert_documents<F>(ctx: &Setup, args: &ConvertArgs, f: F) -> Result<()>
where
    F: Fn(&Sentence) -> Result<(UccaPassage, Vec<String>)> + Sync,
{
    if args.format == Format::Tsv {
        bail!("tsv is not a passage format; use xml, json or bracket");
    }
    for input in &args.inputs {
        let sentences = io::read_conllulex(input, ctx.strict)?;
        let results: Vec<Result<(UccaPassage, Vec<String>)>> =
            ctx.pool.install(|| sentences.par_iter().map(&f).collect());
        let mut passages = Vec::with_capacity(results.len());
        let mut invalid = Vec::new();
        for (s, r) in sentences.iter().zip(results) {
            match r {
                Ok((p, warnings)) => {
                    for w in warnings {
                        log::debug!("{w}");
                    }
                    let v = validate(&p);
                    if !v.is_empty() {
                        log::warn!("{}: invalid output: {}", s.sent_id, v[0]);
                        invalid.push(format!("{}: {}", s.sent_id, v[0]));
                    }
                    passages.push(p);
                }
                Err(e) if ctx.strict => return Err(e.context(format!("sentence {}", s.sent_id))),
                Err(e) => log::warn!("{}: skipped: {e:#}", s.sent_id),
            }
        }
        if ctx.strict && !invalid.is_empty() {
            return Err(ValidationFailed {
                count: invalid.len(),
                first: invalid[0].clone(),
            }
            .into());
        }
        let path = output_path(args, input);
        io::write_atomic(&path, &render(&passages, args.format)?)?;
        log::info!("{}: {} passages", path.display(), passages.len());
    }
    Ok(())
}

fn read_pair(ctx: &Setup, pair: &PairArgs) -> Result<(Vec<UccaPassage>, Vec<UccaPassage>)> {
    let gold = io::read_passages(&pair.gold)?;
    let pred = io::read_passages(&pair.pred)?;
    if ctx.strict {
        for p in gold.iter().chain(&pred) {
            let v = validate(p);
            if !v.is_empty() {
                return Err(ValidationFailed {
                    count: 1,
                    first: format!("{}: {}", p.passage_id, v[0]),
                }
                .into());
            }
        }
    }
    Ok((gold, pred))
}

fn run(cli: Cli) -> Result<()> {
    let (lex, lex_source) = load_lexicons(cli.lexicons.as_deref())?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs as usize).build()?;
    let ctx = Setup {
        lex,
        lex_source,
        strict: cli.strict,
        pool,
    };
    match &cli.command {
        Command::Convert(args) => convert_documents(&ctx, args, |s| {
            let (p, notes) = rule::convert_with_notes(s, &ctx.lex)?;
            Ok((p, notes))
        }),
        Command::ConvertAlt {
            io: args,
            mapping,
            syntax_only,
        } => {
            let m = match mapping {
                Some(p) => load_mapping(p)?,
                None => MajorityMapping::default(),
            };
            let mode = if *syntax_only {
                AltMode::SyntaxOnly
            } else {
                AltMode::Full
            };
            convert_documents(&ctx, args, |s| Ok(convert_alt_with_warnings(s, &m, &ctx.lex, mode)))
        }
        Command::TrainMapping { inputs, gold, out } => {
            let mut sentences = Vec::new();
            for i in inputs {
                sentences.extend(io::read_conllulex(i, ctx.strict)?);
            }
            let gold = io::read_passages(gold)?;
            let by_id: std::collections::HashMap<&str, &UccaPassage> =
                gold.iter().map(|p| (p.passage_id.as_str(), p)).collect();
            let pairs: Vec<(&Sentence, &UccaPassage)> = sentences
                .iter()
                .filter_map(|s| match by_id.get(s.sent_id.as_str()) {
                    Some(p) => Some((s, *p)),
                    None => {
                        log::warn!("{}: no gold passage", s.sent_id);
                        None
                    }
                })
                .collect();
            if pairs.is_empty() {
                bail!("no training sentence has a gold passage with the same id");
            }
            let counts = ctx.pool.install(|| {
                pairs
                    .par_iter()
                    .map(|(s, p)| {
                        let mut c = MappingCounts::default();
                        if let Err(w) = c.observe(s, p) {
                            log::warn!("{w}");
                        }
                        c
                    })
                    .reduce(MappingCounts::default, MappingCounts::merge)
            });
            let m = counts.finish();
            io::write_atomic(out, &m.to_tsv())?;
            log::info!("{} relations from {} sentences", m.table.len(), pairs.len());
            Ok(())
        }
        Command::Evaluate { pair, format, mapping } => {
            let (gold, pred) = read_pair(&ctx, pair)?;
            let labeled = score(&gold, &pred, true)?;
            let unlabeled = score(&gold, &pred, false)?;
            let m = mapping.as_deref().map(load_mapping).transpose()?;
            let text = match format {
                Format::Json => {
                    let v = json!({
                        "labeled": labeled,
                        "unlabeled": unlabeled,
                        "passages": gold.len(),
                        "manifest": manifest(&ctx, m.as_ref()),
                    });
                    serde_json::to_string_pretty(&v)? + "\n"
                }
                Format::Tsv => {
                    let mut t = labeled.to_tsv();
                    t.push_str(
                        unlabeled
                            .to_tsv()
                            .lines()
                            .skip(1)
                            .collect::<Vec<_>>()
                            .join("\n")
                            .as_str(),
                    );
                    t.push('\n');
                    t
                }
                other => bail!("evaluate writes tsv or json, not {other:?}"),
            };
            eprintln!(
                "primary F1 {:.1}\nremote F1 {:.1}",
                100.0 * labeled.primary.f1,
                100.0 * labeled.remote.f1
            );
            io::emit(pair.out.as_deref(), &text)
        }
        Command::Confusion { pair } => {
            let (gold, pred) = read_pair(&ctx, pair)?;
            io::emit(pair.out.as_deref(), &confusion(&gold, &pred)?.to_tsv())
        }
        Command::Report { pair, format } => {
            let (gold, pred) = read_pair(&ctx, pair)?;
            let rows = report(&gold, &pred)?;
            let text = match format {
                Format::Tsv => report_to_tsv(&rows),
                Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
                other => bail!("report writes tsv or json, not {other:?}"),
            };
            io::emit(pair.out.as_deref(), &text)
        }
        Command::Manifest { mapping } => {
            let m = mapping.as_deref().map(load_mapping).transpose()?;
            io::emit(
                None,
                &(serde_json::to_string_pretty(&manifest(&ctx, m.as_ref()))? + "\n"),
            )
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ValidationFailed>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
