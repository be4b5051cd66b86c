//! Command line front end: dataset ingestion, synthetic data generation,
//! training, scoring, evaluation, and report emission.
//!
//! Exit codes: 0 success, 2 usage error, 3 unreadable or malformed input,
//! 4 runtime failure (bad configuration, degenerate data, training failure).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use entrograph::model::atomic_write;
use entrograph::{
    centrality_profile, generate_synthetic, load_dataset, load_model, membership_degree,
    run_experiment, save_model, score_sample, train, write_dataset_csv, Dataset64, Error, Format,
    Generator, Measure, NeighborTable, SyntheticSpec, TrainedModel64, TrainerConfig64,
};

type Result<T> = std::result::Result<T, Error>;

#[derive(Parser)]
#[command(name = "entrograph", version, about = "One-class classification with entropic graph regions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write it as JSON.
    Train(TrainArgs),
    /// Score a dataset against a trained model.
    Score(ScoreArgs),
    /// Run the repeated split evaluation and report AUC statistics.
    Eval(EvalArgs),
    /// Generate a labeled synthetic dataset.
    Synth(SynthArgs),
    /// Emit per-component centrality diagnostics for a trained model.
    Report(ReportArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Input dataset file.
    #[arg(long)]
    input: PathBuf,
    /// Input format.
    #[arg(long, default_value = "csv", value_parser = Format::from_str)]
    format: Format,
    /// Label column of a csv file, by header name or 0-based index.
    #[arg(long)]
    label_col: Option<String>,
}

impl InputArgs {
    fn load(&self) -> Result<Dataset64> {
        load_dataset(&self.input, self.format, self.label_col.as_deref())
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Train on this label only; default is the whole file.
    #[arg(long)]
    nominal: Option<String>,
    /// Objective threshold that stops the search.
    #[arg(long, default_value_t = 0.05)]
    tau: f64,
    /// Percentile of centrality deficits used as acceptance threshold.
    #[arg(long, default_value_t = 50.0)]
    percentile: f64,
    /// Entropy order in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the model.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    /// Trained model file.
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// Where to write the scores csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Label of the class to treat as nominal.
    #[arg(long)]
    nominal: String,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the report csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_parser = Generator::from_str)]
    generator: Generator,
    /// Number of samples.
    #[arg(long)]
    n: usize,
    /// Dimension; defaults to the generator's natural one.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the dataset csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Trained model file.
    #[arg(long)]
    model: PathBuf,
    /// Directory for the report csv files.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => run_train(args),
        Command::Score(args) => run_score(args),
        Command::Eval(args) => run_eval(args),
        Command::Synth(args) => run_synth(args),
        Command::Report(args) => run_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run_train(args: TrainArgs) -> Result<()> {
    let mut dataset = args.input.load()?;
    if let Some(nominal) = &args.nominal {
        let idx: Vec<usize> = (0..dataset.len())
            .filter(|&i| dataset.samples[i].label.as_deref() == Some(nominal))
            .collect();
        if idx.is_empty() {
            return Err(Error::BadDataset(format!(
                "no samples carry the label '{nominal}'"
            )));
        }
        let name = format!("{}[{nominal}]", dataset.name);
        dataset = dataset.subset(name, &idx)?;
    }
    let config = TrainerConfig64 {
        tau: args.tau,
        percentile_l: args.percentile,
        alpha: args.alpha,
        seed: args.seed,
        ..TrainerConfig64::default()
    };
    let measure = Measure::for_kind(&dataset.kind);
    let model = train(&dataset, measure, &config)?;
    save_model(&model, &args.out)?;
    println!(
        "trained on {} samples: {} region(s), k = {}, eta = {:.4} -> {}",
        dataset.len(),
        model.component_count(),
        model.k_star,
        model.final_eta,
        args.out.display()
    );
    Ok(())
}

fn run_score(args: ScoreArgs) -> Result<()> {
    let model: TrainedModel64 = load_model(&args.model)?;
    let dataset = args.input.load()?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "sample_index".to_string(),
        "membership".to_string(),
        "accepted".to_string(),
        "component".to_string(),
    ];
    header.extend((0..model.component_count()).map(|i| format!("mu_{i}")));
    writer.write_record(&header).map_err(|e| csv_err(&args.out, e))?;
    let mut accepted = 0usize;
    for (i, sample) in dataset.samples.iter().enumerate() {
        let decision = score_sample(&model, sample)?;
        accepted += usize::from(decision.accepted);
        let mut record = vec![
            i.to_string(),
            format!("{:?}", decision.membership),
            u8::from(decision.accepted).to_string(),
            decision.component.to_string(),
        ];
        record.extend(decision.per_component.iter().map(|mu| format!("{mu:?}")));
        writer.write_record(&record).map_err(|e| csv_err(&args.out, e))?;
    }
    write_csv(writer, &args.out)?;
    println!(
        "scored {} samples: {accepted} accepted -> {}",
        dataset.len(),
        args.out.display()
    );
    Ok(())
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let dataset = args.input.load()?;
    let config = TrainerConfig64 {
        seed: args.seed,
        ..TrainerConfig64::default()
    };
    let report = run_experiment(&dataset, &args.nominal, 0.5, args.repeats, &config)?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut put = |k: String, v: String| -> Result<()> {
        writer.write_record([k, v]).map_err(|e| csv_err(&args.out, e))
    };
    put("key".into(), "value".into())?;
    put("protocol".into(), report.protocol.clone())?;
    put("n_nominal_test".into(), report.n_nominal_test.to_string())?;
    put("n_outlier_test".into(), report.n_outlier_test.to_string())?;
    put("mean_auc".into(), format!("{:?}", report.mean))?;
    put("std_dev_auc".into(), format!("{:?}", report.std_dev))?;
    for (i, auc) in report.aucs.iter().enumerate() {
        put(format!("auc_{i}"), format!("{auc:?}"))?;
    }
    write_csv(writer, &args.out)?;
    println!(
        "mean AUC {:.4} (std dev {:.4}) over {} repeat(s) -> {}",
        report.mean,
        report.std_dev,
        report.aucs.len(),
        args.out.display()
    );
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let dim = args.dim.unwrap_or_else(|| args.generator.default_dim());
    let spec = SyntheticSpec::new(args.generator, args.n, dim, args.seed)?;
    let dataset: Dataset64 = generate_synthetic(&spec)?;
    write_dataset_csv(&dataset, &args.out)?;
    println!(
        "generated {} ({} samples, dim {dim}) -> {}",
        args.generator,
        dataset.len(),
        args.out.display()
    );
    Ok(())
}

fn run_report(args: ReportArgs) -> Result<()> {
    let model: TrainedModel64 = load_model(&args.model)?;
    std::fs::create_dir_all(&args.out).map_err(|source| Error::Io {
        path: args.out.clone(),
        source,
    })?;
    let graph = NeighborTable::new(&model.embedded_train).graph_for_k(model.k_star)?;

    let mut summary = csv::Writer::from_writer(Vec::new());
    let summary_path = args.out.join("summary.csv");
    summary
        .write_record(["component", "size", "chi_star", "threshold"])
        .map_err(|e| csv_err(&summary_path, e))?;
    for (i, comp) in model.partition.components.iter().enumerate() {
        let sub = graph.induced_subgraph(comp);
        let profile = centrality_profile(&sub, model.percentile_l)?;
        summary
            .write_record([
                i.to_string(),
                comp.len().to_string(),
                format!("{:?}", profile.chi_star),
                format!("{:?}", profile.threshold),
            ])
            .map_err(|e| csv_err(&summary_path, e))?;

        let path = args.out.join(format!("component_{i}.csv"));
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["vertex", "closeness", "difference", "membership"])
            .map_err(|e| csv_err(&path, e))?;
        for (j, &vertex) in comp.iter().enumerate() {
            let diff = profile.differences[j];
            writer
                .write_record([
                    vertex.to_string(),
                    format!("{:?}", profile.closeness[j]),
                    format!("{diff:?}"),
                    format!("{:?}", membership_degree(diff, model.thresholds[i])),
                ])
                .map_err(|e| csv_err(&path, e))?;
        }
        write_csv(writer, &path)?;
    }
    write_csv(summary, &summary_path)?;

    let edges_path = args.out.join("graph_edges.csv");
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["u", "v", "w"])
        .map_err(|e| csv_err(&edges_path, e))?;
    for &(u, v, w) in &graph.edges {
        writer
            .write_record([u.to_string(), v.to_string(), format!("{:.16e}", w)])
            .map_err(|e| csv_err(&edges_path, e))?;
    }
    write_csv(writer, &edges_path)?;

    println!(
        "wrote {} component profile(s) to {}",
        model.component_count(),
        args.out.display()
    );
    Ok(())
}

fn csv_err(path: &Path, err: csv::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(err),
    }
}

fn write_csv(writer: csv::Writer<Vec<u8>>, path: &Path) -> Result<()> {
    let bytes = writer.into_inner().map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    })?;
    atomic_write(path, &bytes)
}
