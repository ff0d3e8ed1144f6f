//! The `empathy-gate` command line.
//!
//! Every command writes its artifacts under `--out` together with
//! `resolved_config.json`, the fully resolved invocation. `rerun` replays
//! such a file.
//!
//! Exit codes: 0 on success, 1 on data or task errors (including validation
//! violations), 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::corpus::{
    count_ties, fleiss_kappa, generate_synthetic, load_corpus, validate_corpus, violations_csv,
    Category, Corpus, LabelMatrix, SyntheticSpec, Task, ANNOTATORS,
};
use crate::io::write_atomic;
use crate::models::{EnsembleConfig, ForestConfig, LogRegConfig, VoteMode};
use crate::pipeline::{
    category_subset, crossval_task, emit_report, evaluate_task, load_bundle, save_bundle,
    train_task, FeatureSetMask, GroupBy, ItemInput, PipelineError, ReportFormat, ReportRow,
    ReportTable, ResourcePaths, Resources,
};
use crate::{Error, Result, VERSION};

pub const SEED_ENV: &str = "EMPATHY_GATE_SEED";
pub const DEFAULT_SEED: u64 = 42;
pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.json";
pub const BUNDLE_FILE: &str = "bundle.json";
pub const DEFAULT_ES_MASKS: &str = "BF;BF+LF+SA+SF+LD+PF;FP+GFS+HSV;all";
pub const DEFAULT_ER_MASKS: &str = "BF;BF+LF;BF+LF+SA+SF+LD+PF";

#[derive(Debug, Parser)]
#[command(
    name = "empathy-gate",
    version,
    about = "Empathy-seeker and empathetic-response classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Corpus utilities.
    Corpus {
        #[command(subcommand)]
        action: CorpusCommand,
    },
    /// Train a bundle on a whole corpus.
    Train(TrainArgs),
    /// Score a bundle on a labeled corpus.
    Eval(EvalArgs),
    /// Score unlabeled items with a bundle.
    Predict(PredictArgs),
    /// Stratified k-fold cross-validation of one feature mask.
    Crossval(CrossvalArgs),
    /// Cross-validate several masks into one table.
    Report(ReportArgs),
    /// Replay a resolved_config.json.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusCommand {
    /// Check schema and label invariants; exits 1 on any violation.
    Validate(ValidateArgs),
    /// Generate a synthetic corpus with images and face sidecars.
    Synth(SynthArgs),
    /// Fleiss' kappa per label dimension.
    Agreement(AgreementArgs),
}

#[derive(Debug, Clone, PartialEq, Default, Args, Serialize, Deserialize)]
pub struct ResourceArgs {
    /// Sentiment lexicon TSV [default: bundled]
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Psycholinguistic category dictionary [default: bundled]
    #[arg(long)]
    pub liwc: Option<PathBuf>,
    /// Imagery word list [default: bundled]
    #[arg(long)]
    pub imagery: Option<PathBuf>,
    /// Speech-act training TSV [default: bundled]
    #[arg(long)]
    pub speech_acts: Option<PathBuf>,
    /// Directory of face sidecars [default: next to each image]
    #[arg(long)]
    pub faces_dir: Option<PathBuf>,
}

impl ResourceArgs {
    fn paths(&self) -> ResourcePaths {
        ResourcePaths {
            lexicon: self.lexicon.clone(),
            dictionary: self.liwc.clone(),
            imagery: self.imagery.clone(),
            speech_acts: self.speech_acts.clone(),
            faces_dir: self.faces_dir.clone(),
        }
    }

    fn load(&self, seed: u64) -> Result<Resources> {
        Ok(Resources::load(&self.paths(), seed)?)
    }

    fn absolutize(&mut self) -> Result<()> {
        for p in [
            &mut self.lexicon,
            &mut self.liwc,
            &mut self.imagery,
            &mut self.speech_acts,
            &mut self.faces_dir,
        ]
        .into_iter()
        .flatten()
        {
            *p = absolute(p)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    /// Combine LR and RF by hard vote instead of the weighted average
    #[arg(long)]
    pub hard_vote: bool,
    /// Random-forest size
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    /// Random-forest depth limit; 0 grows until leaves are pure
    #[arg(long, default_value_t = 16)]
    pub max_depth: usize,
    /// Logistic-regression L2 penalty
    #[arg(long, default_value_t = 0.01)]
    pub l2: f64,
}

impl ModelArgs {
    fn config(&self) -> EnsembleConfig {
        EnsembleConfig {
            lr: LogRegConfig {
                l2_lambda: self.l2,
                ..LogRegConfig::default()
            },
            rf: ForestConfig {
                n_trees: self.trees,
                max_depth: (self.max_depth > 0).then_some(self.max_depth),
                ..ForestConfig::default()
            },
            vote: if self.hard_vote {
                VoteMode::Hard
            } else {
                VoteMode::Soft
            },
            ..EnsembleConfig::default()
        }
    }

    fn check(&self) -> Result<()> {
        if self.trees == 0 {
            return Err(Error::Usage("--trees must be at least 1".into()));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(Error::Usage(
                "--l2 must be a finite non-negative number".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    pub n_pos: usize,
    #[arg(long, default_value_t = 500)]
    pub n_neg: usize,
    /// Proportions of MH, VA, TS among positives
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.33, 0.28, 0.39])]
    pub mix: Vec<f64>,
    /// Signal strength in [0, 1]; 0 makes labels independent of content
    #[arg(long, default_value_t = 1.0)]
    pub strength: f64,
    /// Write an image and face sidecar per post
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub images: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct AgreementArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value = "ES")]
    pub task: Task,
    /// Feature families, e.g. BF,LF,SA [default: all for ES, verbal for ER]
    #[arg(long)]
    pub mask: Option<FeatureSetMask>,
    /// Train on one positive category plus the negatives
    #[arg(long)]
    pub category: Option<Category>,
    #[command(flatten)]
    pub resources: ResourceArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "csv")]
    pub format: ReportFormat,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub bundle: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub group_by: Option<GroupBy>,
    #[command(flatten)]
    pub resources: ResourceArgs,
    #[arg(long, default_value = "csv")]
    pub format: ReportFormat,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub bundle: PathBuf,
    /// Score every item of this corpus
    #[arg(long, required_unless_present = "text", conflicts_with = "text")]
    pub corpus: Option<PathBuf>,
    /// Score a literal text; repeatable
    #[arg(long)]
    pub text: Vec<String>,
    #[command(flatten)]
    pub resources: ResourceArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CrossvalArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value = "ES")]
    pub task: Task,
    /// Feature families [default: all for ES, verbal for ER]
    #[arg(long)]
    pub mask: Option<FeatureSetMask>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Rows per group of pooled out-of-fold predictions instead of per fold
    #[arg(long)]
    pub group_by: Option<GroupBy>,
    /// Also cross-validate one model per positive category
    #[arg(long)]
    pub per_category: bool,
    #[command(flatten)]
    pub resources: ResourceArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "csv")]
    pub format: ReportFormat,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReportArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value = "ES")]
    pub task: Task,
    /// `;`-separated masks, one row each
    #[arg(long)]
    pub masks: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long)]
    pub group_by: Option<GroupBy>,
    #[command(flatten)]
    pub resources: ResourceArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "csv")]
    pub format: ReportFormat,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RerunArgs {
    /// A resolved_config.json written by an earlier run
    pub config: PathBuf,
    /// Write to this directory instead of the recorded one
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Contents of `resolved_config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub tool_version: String,
    pub command: Command,
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error: 2 for usage errors, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_)
        | Error::Pipeline(PipelineError::VisualForResponses | PipelineError::InvalidMask(_)) => 2,
        _ => 1,
    }
}

fn resolve_seed(seed: &mut Option<u64>) -> Result<()> {
    if seed.is_none() {
        *seed = Some(match std::env::var(SEED_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                Error::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))
            })?,
            Err(_) => DEFAULT_SEED,
        });
    }
    Ok(())
}

fn absolute(p: &Path) -> Result<PathBuf> {
    std::path::absolute(p).map_err(|e| Error::io(p, e))
}

fn abs_in_place(p: &mut PathBuf) -> Result<()> {
    *p = absolute(p)?;
    Ok(())
}

fn default_mask(task: Task) -> FeatureSetMask {
    match task {
        Task::ES => FeatureSetMask::all(),
        Task::ER => FeatureSetMask::verbal(),
    }
}

fn parse_masks(s: &str) -> Result<Vec<FeatureSetMask>> {
    s.split(';')
        .map(str::trim)
        .filter(|m| !m.is_empty())
        .map(|m| m.parse::<FeatureSetMask>().map_err(Error::from))
        .collect::<Result<Vec<_>>>()
        .and_then(|v| {
            if v.is_empty() {
                Err(Error::Usage("--masks lists no mask".into()))
            } else {
                Ok(v)
            }
        })
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Usage(format!("--k must be at least 2, got {k}")));
    }
    Ok(())
}

impl Command {
    /// Fills defaults that depend on the environment (seed, masks) and makes
    /// paths absolute, then checks argument combinations.
    pub fn resolve(mut self) -> Result<Self> {
        match &mut self {
            Command::Corpus { action } => match action {
                CorpusCommand::Validate(a) => {
                    abs_in_place(&mut a.corpus)?;
                    abs_in_place(&mut a.out)?;
                }
                CorpusCommand::Agreement(a) => {
                    abs_in_place(&mut a.corpus)?;
                    abs_in_place(&mut a.out)?;
                }
                CorpusCommand::Synth(a) => {
                    resolve_seed(&mut a.seed)?;
                    abs_in_place(&mut a.out)?;
                    a.spec()?
                        .validate()
                        .map_err(|e| Error::Usage(e.to_string()))?;
                }
            },
            Command::Train(a) => {
                resolve_seed(&mut a.seed)?;
                let mask = a.mask.get_or_insert_with(|| default_mask(a.task));
                mask.check_task(a.task)?;
                a.model.check()?;
                abs_in_place(&mut a.corpus)?;
                abs_in_place(&mut a.out)?;
                a.resources.absolutize()?;
            }
            Command::Eval(a) => {
                abs_in_place(&mut a.bundle)?;
                abs_in_place(&mut a.corpus)?;
                abs_in_place(&mut a.out)?;
                a.resources.absolutize()?;
            }
            Command::Predict(a) => {
                abs_in_place(&mut a.bundle)?;
                if let Some(c) = &mut a.corpus {
                    abs_in_place(c)?;
                }
                abs_in_place(&mut a.out)?;
                a.resources.absolutize()?;
            }
            Command::Crossval(a) => {
                resolve_seed(&mut a.seed)?;
                let mask = a.mask.get_or_insert_with(|| default_mask(a.task));
                mask.check_task(a.task)?;
                check_k(a.k)?;
                a.model.check()?;
                abs_in_place(&mut a.corpus)?;
                abs_in_place(&mut a.out)?;
                a.resources.absolutize()?;
            }
            Command::Report(a) => {
                resolve_seed(&mut a.seed)?;
                let masks = a.masks.get_or_insert_with(|| {
                    match a.task {
                        Task::ES => DEFAULT_ES_MASKS,
                        Task::ER => DEFAULT_ER_MASKS,
                    }
                    .to_string()
                });
                for m in parse_masks(masks)? {
                    m.check_task(a.task)?;
                }
                check_k(a.k)?;
                a.model.check()?;
                abs_in_place(&mut a.corpus)?;
                abs_in_place(&mut a.out)?;
                a.resources.absolutize()?;
            }
            Command::Rerun(a) => {
                abs_in_place(&mut a.config)?;
                if let Some(o) = &mut a.out {
                    abs_in_place(o)?;
                }
            }
        }
        Ok(self)
    }

    fn out_dir(&self) -> Option<&Path> {
        Some(match self {
            Command::Corpus { action } => match action {
                CorpusCommand::Validate(a) => &a.out,
                CorpusCommand::Synth(a) => &a.out,
                CorpusCommand::Agreement(a) => &a.out,
            },
            Command::Train(a) => &a.out,
            Command::Eval(a) => &a.out,
            Command::Predict(a) => &a.out,
            Command::Crossval(a) => &a.out,
            Command::Report(a) => &a.out,
            Command::Rerun(_) => return None,
        })
    }

    fn set_out(&mut self, out: PathBuf) {
        match self {
            Command::Corpus { action } => match action {
                CorpusCommand::Validate(a) => a.out = out,
                CorpusCommand::Synth(a) => a.out = out,
                CorpusCommand::Agreement(a) => a.out = out,
            },
            Command::Train(a) => a.out = out,
            Command::Eval(a) => a.out = out,
            Command::Predict(a) => a.out = out,
            Command::Crossval(a) => a.out = out,
            Command::Report(a) => a.out = out,
            Command::Rerun(a) => a.out = Some(out),
        }
    }
}

/// Resolves and runs one command; returns the exit code for runs that
/// complete but report data problems.
pub fn execute(cmd: Command) -> Result<i32> {
    let cmd = cmd.resolve()?;
    if let Command::Rerun(r) = &cmd {
        return rerun(r);
    }
    let out = cmd.out_dir().expect("not a rerun").to_path_buf();
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let resolved = ResolvedConfig {
        tool_version: VERSION.to_string(),
        command: cmd.clone(),
    };
    let mut json = serde_json::to_string_pretty(&resolved).expect("config serializes");
    json.push('\n');
    write_file(&out, RESOLVED_CONFIG_FILE, json.as_bytes())?;
    match cmd {
        Command::Corpus { action } => match action {
            CorpusCommand::Validate(a) => cmd_validate(&a),
            CorpusCommand::Synth(a) => cmd_synth(&a),
            CorpusCommand::Agreement(a) => cmd_agreement(&a),
        },
        Command::Train(a) => cmd_train(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Crossval(a) => cmd_crossval(&a),
        Command::Report(a) => cmd_report(&a),
        Command::Rerun(_) => unreachable!(),
    }
}

fn rerun(r: &RerunArgs) -> Result<i32> {
    let text = fs::read_to_string(&r.config).map_err(|e| Error::io(&r.config, e))?;
    let cfg: ResolvedConfig = serde_json::from_str(&text).map_err(|e| {
        Error::Usage(format!(
            "{}: not a resolved config: {e}",
            r.config.display()
        ))
    })?;
    let mut cmd = cfg.command;
    if matches!(cmd, Command::Rerun(_)) {
        return Err(Error::Usage(
            "a resolved config never records a rerun".into(),
        ));
    }
    if let Some(out) = &r.out {
        cmd.set_out(out.clone());
    }
    execute(cmd)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    write_atomic(&path, bytes).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn report_name(format: ReportFormat) -> &'static str {
    match format {
        ReportFormat::Csv => "report.csv",
        ReportFormat::Text => "report.txt",
    }
}

fn write_report(dir: &Path, table: &ReportTable, format: ReportFormat) -> Result<()> {
    let bytes = emit_report(table, format);
    write_file(dir, report_name(format), &bytes)?;
    print!(
        "{}",
        String::from_utf8_lossy(&emit_report(table, ReportFormat::Text))
    );
    Ok(())
}

fn cmd_validate(a: &ValidateArgs) -> Result<i32> {
    let corpus = load_corpus(&a.corpus)?;
    let violations = validate_corpus(&corpus);
    write_file(
        &a.out,
        "violations.csv",
        violations_csv(&violations).as_bytes(),
    )?;
    if violations.is_empty() {
        println!(
            "{}: {} posts, no violations",
            a.corpus.display(),
            corpus.len()
        );
        Ok(0)
    } else {
        for v in &violations {
            eprintln!("{}: {}: {}", v.post_id, v.rule.as_str(), v.detail);
        }
        eprintln!("{} violation(s)", violations.len());
        Ok(1)
    }
}

impl SynthArgs {
    fn spec(&self) -> Result<SyntheticSpec> {
        let mix: [f64; 3] = self
            .mix
            .clone()
            .try_into()
            .map_err(|_| Error::Usage("--mix takes three proportions".into()))?;
        Ok(SyntheticSpec {
            n_positive: self.n_pos,
            n_negative: self.n_neg,
            category_mix: mix,
            signal_strength: self.strength,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            with_images: self.images,
        })
    }
}

fn cmd_synth(a: &SynthArgs) -> Result<i32> {
    let synth = generate_synthetic(&a.spec()?)?;
    let path = synth.write_to_dir(&a.out)?;
    let counts: Vec<String> = [Category::MH, Category::VA, Category::TS, Category::NEG]
        .into_iter()
        .map(|c| {
            let n = synth
                .corpus
                .posts
                .iter()
                .filter(|p| p.category == c)
                .count();
            format!("{c} {n}")
        })
        .collect();
    println!("wrote {} ({})", path.display(), counts.join(", "));
    Ok(0)
}

fn kappa_row<T: Ord + Clone>(name: &str, rows: Vec<Vec<T>>, labels: &[T]) -> Vec<String> {
    let n = rows.len();
    let m = LabelMatrix::from_labels(&rows, Some(labels));
    let (kappa, ties) = match &m {
        Ok(m) => (
            fleiss_kappa(m).map_or_else(
                |e| {
                    eprintln!("{name}: {e}");
                    "NA".to_string()
                },
                |k| format!("{k:.6}"),
            ),
            count_ties(m).to_string(),
        ),
        Err(e) => {
            eprintln!("{name}: {e}");
            ("NA".to_string(), "NA".to_string())
        }
    };
    vec![
        name.to_string(),
        n.to_string(),
        ANNOTATORS.to_string(),
        kappa,
        ties,
    ]
}

fn cmd_agreement(a: &AgreementArgs) -> Result<i32> {
    use crate::corpus::{PostLabel, ResponseLabel};
    let corpus = load_corpus(&a.corpus)?;
    let posts: Vec<Vec<PostLabel>> = corpus
        .posts
        .iter()
        .filter(|p| p.annotator_labels.len() == ANNOTATORS)
        .map(|p| p.annotator_labels.clone())
        .collect();
    let responses: Vec<Vec<ResponseLabel>> = corpus
        .posts
        .iter()
        .flat_map(|p| &p.responses)
        .filter(|r| r.annotator_labels.len() == ANNOTATORS)
        .map(|r| r.annotator_labels.clone())
        .collect();
    let rows = [
        vec!["dimension", "items", "raters", "kappa", "ties"]
            .into_iter()
            .map(String::from)
            .collect(),
        kappa_row("ES/NES", posts, &[PostLabel::ES, PostLabel::NES]),
        kappa_row(
            "ER/NER",
            responses,
            &[ResponseLabel::ER, ResponseLabel::NER],
        ),
    ];
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    for r in &rows {
        w.write_record(r).expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory flush");
    write_file(&a.out, "agreement.csv", &bytes)?;
    print!("{}", String::from_utf8_lossy(&bytes));
    Ok(0)
}

fn load_task_corpus(path: &Path, category: Option<Category>) -> Result<Corpus> {
    let corpus = load_corpus(path)?;
    Ok(match category {
        Some(c) => category_subset(&corpus, c),
        None => corpus,
    })
}

fn cmd_train(a: &TrainArgs) -> Result<i32> {
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let mask = a.mask.clone().unwrap_or_else(|| default_mask(a.task));
    let corpus = load_task_corpus(&a.corpus, a.category)?;
    let res = a.resources.load(seed)?;
    let bundle = train_task(&corpus, a.task, &mask, &a.model.config(), &res, seed)?;
    let path = a.out.join(BUNDLE_FILE);
    save_bundle(&bundle, &path)?;
    let fit = evaluate_task(&bundle, &corpus, None, &res)?;
    let mut table = fit.table();
    table.rows[0].name = "training".into();
    write_report(&a.out, &table, a.format)?;
    println!(
        "wrote {} ({} task, mask {mask}, width {}, weights {:.1}/{:.1})",
        path.display(),
        a.task,
        bundle.feature_space.width(),
        bundle.ensemble.w1,
        bundle.ensemble.w2
    );
    Ok(0)
}

fn cmd_eval(a: &EvalArgs) -> Result<i32> {
    let res = a.resources.load(DEFAULT_SEED)?;
    let (bundle, _warnings) = load_bundle(&a.bundle, Some(&res))?;
    let corpus = load_corpus(&a.corpus)?;
    let report = evaluate_task(&bundle, &corpus, a.group_by, &res)?;
    write_report(&a.out, &report.table(), a.format)?;
    Ok(0)
}

fn cmd_predict(a: &PredictArgs) -> Result<i32> {
    let res = a.resources.load(DEFAULT_SEED)?;
    let (bundle, _warnings) = load_bundle(&a.bundle, Some(&res))?;
    let inputs: Vec<ItemInput> = match &a.corpus {
        Some(path) => {
            let corpus = load_corpus(path)?;
            corpus
                .task_items(bundle.task)
                .iter()
                .map(|it| ItemInput::from_task_item(&corpus, it))
                .collect()
        }
        None => a
            .text
            .iter()
            .enumerate()
            .map(|(i, t)| ItemInput::new(format!("text{}", i + 1), t.clone(), None))
            .collect(),
    };
    let preds = bundle.predict_inputs(inputs, &res)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(["key", "p_lr", "p_rf", "probability", "label"])
        .expect("in-memory write");
    for p in &preds {
        w.write_record([
            p.key.clone(),
            format!("{:.6}", p.p_lr),
            format!("{:.6}", p.p_rf),
            format!("{:.6}", p.probability),
            p.label.clone(),
        ])
        .expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory flush");
    write_file(&a.out, "predictions.csv", &bytes)?;
    print!("{}", String::from_utf8_lossy(&bytes));
    Ok(0)
}

fn cmd_crossval(a: &CrossvalArgs) -> Result<i32> {
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let mask = a.mask.clone().unwrap_or_else(|| default_mask(a.task));
    let cfg = a.model.config();
    let corpus = load_corpus(&a.corpus)?;
    let res = a.resources.load(seed)?;
    let group_by = if a.per_category {
        Some(GroupBy::Category)
    } else {
        a.group_by
    };
    let outcome = crossval_task(&corpus, a.task, &mask, &cfg, &res, a.k, seed, group_by)?;
    let mut rows: Vec<ReportRow> = match group_by {
        Some(_) => outcome.pooled.table().rows,
        None => {
            let mut r: Vec<ReportRow> = outcome
                .cv
                .folds
                .iter()
                .map(|f| ReportRow::new(format!("fold{}", f.fold + 1), &f.lr, &f.rf, &f.ensemble))
                .collect();
            r.push(ReportRow::new(
                "mean",
                &outcome.cv.mean_lr,
                &outcome.cv.mean_rf,
                &outcome.cv.mean_ensemble,
            ));
            r
        }
    };
    let mut details = vec![serde_json::to_value(&outcome).expect("serializes")];
    if a.per_category {
        for c in [Category::MH, Category::TS, Category::VA] {
            let sub = category_subset(&corpus, c);
            if !sub.posts.iter().any(|p| p.category == c) {
                continue;
            }
            let o = crossval_task(&sub, a.task, &mask, &cfg, &res, a.k, seed, None)?;
            let g = &o.pooled.overall;
            rows.push(ReportRow::new(
                format!("{c} (per-category)"),
                &g.lr,
                &g.rf,
                &g.ensemble,
            ));
            details.push(serde_json::to_value(&o).expect("serializes"));
        }
    }
    let mut json = serde_json::to_string_pretty(&details).expect("serializes");
    json.push('\n');
    write_file(&a.out, "crossval.json", json.as_bytes())?;
    write_report(&a.out, &ReportTable { rows }, a.format)?;
    Ok(0)
}

fn cmd_report(a: &ReportArgs) -> Result<i32> {
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let masks = parse_masks(a.masks.as_deref().unwrap_or(DEFAULT_ES_MASKS))?;
    let cfg = a.model.config();
    let corpus = load_corpus(&a.corpus)?;
    let res = a.resources.load(seed)?;
    let mut rows = Vec::new();
    for mask in &masks {
        let o = crossval_task(&corpus, a.task, mask, &cfg, &res, a.k, seed, a.group_by)?;
        if a.group_by.is_some() {
            for g in &o.pooled.groups {
                rows.push(ReportRow::new(
                    format!("{mask} {}", g.name),
                    &g.lr,
                    &g.rf,
                    &g.ensemble,
                ));
            }
        } else {
            rows.push(ReportRow::new(
                mask.to_string(),
                &o.cv.mean_lr,
                &o.cv.mean_rf,
                &o.cv.mean_ensemble,
            ));
        }
    }
    write_report(&a.out, &ReportTable { rows }, a.format)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Command, clap::Error> {
        Cli::try_parse_from(std::iter::once("empathy-gate").chain(args.iter().copied()))
            .map(|c| c.command)
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_train_flags() {
        let c = parse(&[
            "train",
            "--corpus",
            "c.jsonl",
            "--task",
            "ER",
            "--mask",
            "BF,LF",
            "--hard-vote",
            "--seed",
            "3",
        ])
        .unwrap();
        let Command::Train(a) = c else { panic!() };
        assert_eq!(a.task, Task::ER);
        assert_eq!(a.mask.unwrap().to_string(), "BF+LF");
        assert!(a.model.hard_vote);
        assert_eq!(a.seed, Some(3));
    }

    #[test]
    fn bad_mask_is_a_usage_error() {
        let e = parse(&["train", "--corpus", "c", "--mask", "BF,XX"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn visual_mask_for_er_is_rejected_before_io() {
        let c = parse(&[
            "train",
            "--corpus",
            "missing.jsonl",
            "--task",
            "ER",
            "--mask",
            "FP,BF",
        ])
        .unwrap();
        let e = c.resolve().unwrap_err();
        assert_eq!(exit_code(&e), 2);
        assert_eq!(e.to_string(), "visual features invalid for ER");
    }

    #[test]
    fn explicit_seed_wins_and_is_recorded() {
        let c = parse(&["corpus", "synth", "--seed", "9", "--out", "x"]).unwrap();
        let c = c.resolve().unwrap();
        let Command::Corpus {
            action: CorpusCommand::Synth(a),
        } = &c
        else {
            panic!()
        };
        assert_eq!(a.seed, Some(9));
        assert!(a.out.is_absolute());
        let json = serde_json::to_string(&ResolvedConfig {
            tool_version: VERSION.into(),
            command: c.clone(),
        })
        .unwrap();
        let back: ResolvedConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.command, c);
    }

    #[test]
    fn resolved_report_records_masks() {
        let c = parse(&["report", "--corpus", "c", "--task", "ER"])
            .unwrap()
            .resolve()
            .unwrap();
        let Command::Report(a) = c else { panic!() };
        assert_eq!(a.masks.as_deref(), Some(DEFAULT_ER_MASKS));
        assert!(a.seed.is_some());
    }

    #[test]
    fn report_rejects_visual_masks_for_er() {
        let c = parse(&[
            "report", "--corpus", "c", "--task", "ER", "--masks", "BF;HSV",
        ])
        .unwrap();
        assert_eq!(exit_code(&c.resolve().unwrap_err()), 2);
    }

    #[test]
    fn predict_needs_an_input() {
        assert!(parse(&["predict", "--bundle", "b"]).is_err());
        assert!(parse(&["predict", "--bundle", "b", "--text", "hi"]).is_ok());
    }
}
