mod commands;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use failure::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "msrq",
    version,
    about = "Answer multi-sentence recommendation questions over an entity store"
)]
struct Cli {
    /// Pipeline configuration (TOML). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a CRF on fully labeled questions.
    TrainCrf(TrainArgs),
    /// Train a CRF and estimate constraint penalties.
    TrainCcm(TrainArgs),
    /// Semi-supervised training over labeled and partially labeled questions.
    TrainCodl(CodlArgs),
    /// Label questions with a trained model.
    Label(LabelArgs),
    /// Parse RQL queries, one per line, into canonical text and JSON.
    ParseRql(IoArgs),
    /// Turn labeled questions into RQL.
    Assemble(AssembleArgs),
    /// Build a binary entity index from an entities JSONL file.
    IndexBuild(IoArgs),
    /// Full pipeline: labels, operators, RQL, retrieval.
    Answer(AnswerArgs),
    /// Keyword-query baseline.
    BaselineWebqa(WebqaArgs),
    /// Segment precision, recall and F1 of predicted labels.
    EvalLabels(EvalLabelsArgs),
    /// Acc@3, MRR and recall of answer files.
    EvalQa(EvalQaArgs),
}

#[derive(Args, Debug)]
struct IoArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Questions with gold labels.
    #[arg(long = "in")]
    input: PathBuf,
    /// Where to write the model.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CodlArgs {
    #[command(flatten)]
    train: TrainArgs,
    /// Questions to label partially.
    #[arg(long)]
    partial: PathBuf,
    /// Two crowd annotations per question; agreements become known labels.
    #[arg(long)]
    crowd: Option<PathBuf>,
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args, Debug)]
struct LabelArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct AssembleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Label file; the questions' gold labels are used when omitted.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct AnswerArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    index: Option<PathBuf>,
    /// Label the questions with this model.
    #[arg(long, conflicts_with_all = ["labels", "rql"])]
    model: Option<PathBuf>,
    /// Precomputed labels.
    #[arg(long, conflicts_with = "rql")]
    labels: Option<PathBuf>,
    /// Precomputed queries as written by `assemble`.
    #[arg(long)]
    rql: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct WebqaArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    index: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    /// JSONL of `{"id", "words"}` replacing the automatic keywords.
    #[arg(long)]
    manual_words: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Trainer {
    Crf,
    Ccm,
    Codl,
}

#[derive(Args, Debug)]
struct EvalLabelsArgs {
    /// Questions with gold labels.
    #[arg(long = "in")]
    input: PathBuf,
    /// Predicted labels to score.
    #[arg(long, required_unless_present = "leave_one_out", conflicts_with = "leave_one_out")]
    pred: Option<PathBuf>,
    /// Train on all but one question, label that one, for every question.
    #[arg(long)]
    leave_one_out: bool,
    #[arg(long, value_enum, default_value = "ccm")]
    trainer: Trainer,
    /// Partially labeled questions for the codl trainer.
    #[arg(long)]
    partial: Option<PathBuf>,
    #[arg(long)]
    crowd: Option<PathBuf>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Also write the report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalQaArgs {
    /// Answer files; each becomes one table row named after the file.
    #[arg(long = "in", required = true)]
    input: Vec<PathBuf>,
    #[arg(long)]
    gold: PathBuf,
    /// JSON object mapping entity names to ids.
    #[arg(long)]
    aliases: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let name = commands::name(&cli.command);
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json(name));
            ExitCode::FAILURE
        }
    }
}
