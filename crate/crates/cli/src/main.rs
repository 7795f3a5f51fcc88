//! `segcomb` command-line tool.
//!
//! Exit status: 0 success, 1 usage error, 2 data error, 3 external tool error.
//! Diagnostics go to stderr; data goes to files or stdout.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use segcomb::bpe::{learn_bpe, BpeConfig, BpeMode, MergeTable};
use segcomb::chrf::{corpus_chrf, ChrfConfig, Whitespace};
use segcomb::combine::{stats, CombinedCorpus};
use segcomb::corpus::{
    read_corpus, read_segmented, read_text_lines, write_segmented, Line, SchemeId, SegmentedLine,
};
use segcomb::segment::{
    char_segment, external_segment, longest_match_segment, maximal_match_segment, word_segment,
    ExternalCommand, Granularity, TrieDictionary,
};
use segcomb::Error;

#[derive(Parser, Debug)]
#[command(
    name = "segcomb",
    version,
    about = "Multi-segmentation corpus augmentation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Learn a BPE merge table from raw text
    LearnBpe {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        merges: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Line)]
        mode: ModeArg,
        #[arg(long, default_value_t = 2)]
        min_freq: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Segment raw text with a merge table
    ApplyBpe {
        #[arg(long)]
        merges: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Segment raw text with a non-BPE strategy
    Segment {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, value_enum, default_value_t = GranularityArg::Codepoint)]
        granularity: GranularityArg,
        /// Word list for longest/maximal matching
        #[arg(long)]
        dict: Option<PathBuf>,
        /// External segmenter command line
        #[arg(long)]
        cmd: Option<String>,
        /// Scheme name for the external segmenter
        #[arg(long)]
        name: Option<String>,
        /// Lowercase tokens (word method)
        #[arg(long)]
        lowercase: bool,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Pair a source file with several target segmentations
    Combine {
        #[arg(long)]
        source: PathBuf,
        #[arg(long = "target", required = true)]
        targets: Vec<PathBuf>,
        #[arg(long)]
        out_source: PathBuf,
        #[arg(long)]
        out_target: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Score hypotheses against references with the character n-gram F-score
    Chrf {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long, default_value_t = 3.0)]
        beta: f64,
        #[arg(long, default_value_t = 6)]
        order: usize,
        #[arg(long, value_enum, default_value_t = WhitespaceArg::Strip)]
        whitespace: WhitespaceArg,
        /// Write per-segment scores as TSV
        #[arg(long)]
        segments: Option<PathBuf>,
    },
    /// Print token statistics of a segmented file
    Stats {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Line,
    Word,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Char,
    Longest,
    Maximal,
    External,
    Word,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GranularityArg {
    Codepoint,
    Grapheme,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WhitespaceArg {
    Strip,
    Keep,
}

fn open_input(path: &Path) -> Result<Box<dyn Read>, Error> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdin().lock()));
    }
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    Ok(Box::new(file))
}

fn create_output(path: &Path) -> Result<Box<dyn Write>, Error> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdout().lock()));
    }
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    Ok(Box::new(file))
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn in_file<T>(path: &Path, result: Result<T, Error>) -> Result<T, Error> {
    result.map_err(|e| match e {
        Error::Data(m) => Error::Data(format!("{}: {m}", path.display())),
        Error::Io { source, .. } => io_error(path, source),
        other => other,
    })
}

fn read_lines(path: &Path) -> Result<Vec<Line>, Error> {
    in_file(path, read_corpus(open_input(path)?))
}

fn label_of(path: &Path) -> SchemeId {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "stdin".to_string());
    SchemeId::from_label(&stem)
}

fn read_segmented_file(path: &Path) -> Result<Vec<SegmentedLine>, Error> {
    in_file(path, read_segmented(open_input(path)?, &label_of(path)))
}

fn write_lines(lines: &[SegmentedLine], path: &Path) -> Result<(), Error> {
    write_segmented(lines, create_output(path)?).map_err(|e| io_error(path, e))
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::LearnBpe {
            input,
            merges,
            mode,
            min_freq,
            output,
        } => {
            let mode = match mode {
                ModeArg::Line => BpeMode::Line,
                ModeArg::Word => BpeMode::Word,
            };
            let config = BpeConfig::new(merges).mode(mode).min_frequency(min_freq);
            // validate arguments before touching the input
            if merges == 0 || min_freq < 2 {
                learn_bpe(&[], &config)?;
            }
            let corpus = read_lines(&input)?;
            let table = learn_bpe(&corpus, &config)?;
            if table.n_performed() < merges {
                eprintln!(
                    "segcomb: stopped after {} of {merges} merges (no pair with frequency >= {min_freq})",
                    table.n_performed()
                );
            }
            table
                .write(create_output(&output)?)
                .map_err(|e| io_error(&output, e))
        }
        Command::ApplyBpe {
            merges,
            input,
            output,
        } => {
            let table = in_file(&merges, MergeTable::read(open_input(&merges)?))?;
            let corpus = read_lines(&input)?;
            let segmented: Vec<_> = corpus.iter().map(|l| table.apply(l)).collect();
            write_lines(&segmented, &output)
        }
        Command::Segment {
            method,
            granularity,
            dict,
            cmd,
            name,
            lowercase,
            input,
            output,
        } => {
            let load_dict = || -> Result<TrieDictionary, Error> {
                let path = dict.as_deref().ok_or_else(|| {
                    Error::Usage("--dict is required for dictionary matching".into())
                })?;
                TrieDictionary::load(path)
            };
            let segmented: Vec<SegmentedLine> = match method {
                Method::Char => {
                    let granularity = match granularity {
                        GranularityArg::Codepoint => Granularity::Codepoint,
                        GranularityArg::Grapheme => Granularity::Grapheme,
                    };
                    read_lines(&input)?
                        .iter()
                        .map(|l| char_segment(l, granularity))
                        .collect()
                }
                Method::Longest => {
                    let dict = load_dict()?;
                    read_lines(&input)?
                        .iter()
                        .map(|l| longest_match_segment(l, &dict))
                        .collect()
                }
                Method::Maximal => {
                    let dict = load_dict()?;
                    read_lines(&input)?
                        .iter()
                        .map(|l| maximal_match_segment(l, &dict))
                        .collect()
                }
                Method::Word => read_lines(&input)?
                    .iter()
                    .map(|l| word_segment(l, lowercase))
                    .collect(),
                Method::External => {
                    let cmd = cmd.ok_or_else(|| {
                        Error::Usage("--cmd is required for --method external".into())
                    })?;
                    let mut command = ExternalCommand::parse(&cmd)?;
                    if let Some(name) = name {
                        command = command.with_name(name);
                    }
                    external_segment(&read_lines(&input)?, &command)?
                }
            };
            write_lines(&segmented, &output)
        }
        Command::Combine {
            source,
            targets,
            out_source,
            out_target,
            manifest,
        } => {
            let source_lines = read_segmented_file(&source)?;
            let mut combined = CombinedCorpus::new(source_lines);
            for path in &targets {
                let lines = read_segmented_file(path)?;
                in_file(path, combined.append(label_of(path), &lines))?;
            }
            write_segmented(combined.pairs().sources(), create_output(&out_source)?)
                .map_err(|e| io_error(&out_source, e))?;
            write_segmented(combined.pairs().targets(), create_output(&out_target)?)
                .map_err(|e| io_error(&out_target, e))?;
            if let Some(path) = manifest {
                combined
                    .write_manifest(create_output(&path)?)
                    .map_err(|e| io_error(&path, e))?;
            }
            Ok(())
        }
        Command::Chrf {
            hyp,
            reference,
            beta,
            order,
            whitespace,
            segments,
        } => {
            let config = ChrfConfig {
                beta,
                max_order: order,
                whitespace: match whitespace {
                    WhitespaceArg::Strip => Whitespace::Strip,
                    WhitespaceArg::Keep => Whitespace::Keep,
                },
            };
            config.validate()?;
            let hyps = in_file(&hyp, read_text_lines(open_input(&hyp)?))?;
            let refs = in_file(&reference, read_text_lines(open_input(&reference)?))?;
            let report = corpus_chrf(&hyps, &refs, &config)?;
            if let Some(path) = segments {
                create_output(&path)?
                    .write_all(report.segments_tsv().as_bytes())
                    .map_err(|e| io_error(&path, e))?;
            }
            println!("{}", report.summary());
            Ok(())
        }
        Command::Stats { input } => {
            let lines = read_segmented_file(&input)?;
            print!("{}", stats(&lines));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("segcomb: {e}");
            let code = match &e {
                Error::Usage(_) => 1,
                Error::Data(_) | Error::Io { .. } => 2,
                Error::External { stderr, .. } => {
                    if !stderr.trim().is_empty() {
                        eprintln!("{}", stderr.trim_end());
                    }
                    3
                }
            };
            ExitCode::from(code)
        }
    }
}
