use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "hullscope", version, about = "Convex-hull extrapolation geometry and over-parameterization certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hull membership of each query point, with separating certificates.
    HullCheck(HullCheckArgs),
    /// Euclidean projection of each query point onto the training hull.
    Project(ProjectArgs),
    /// Fraction of test points outside the training hull.
    ExtrapReport(ExtrapArgs),
    /// Least-squares polynomial separator of labels 0 and 1.
    FitPoly(FitPolyArgs),
    /// Smallest polynomial degree that separates labels 0 and 1.
    MinDegree(MinDegreeArgs),
    /// RMS cost of forcing a deviation at an anchor, by degree.
    Lemma1Gap(Lemma1Args),
    /// Family of higher-degree extensions that agree inside the hull.
    Lemma3Demo(Lemma3Args),
    /// Sampled epsilon-equality of two stored surfaces.
    EpsEqual(EpsEqualArgs),
    /// Nearest decision-boundary distance of each query point.
    BoundaryDist(BoundaryArgs),
    /// Boundary distances of clean versus perturbed points.
    Closeness(ClosenessArgs),
    /// Empirical Lipschitz constant of a trained network's feature map.
    Lipschitz(LipschitzArgs),
    /// Train a feed-forward classifier.
    Train(TrainArgs),
    /// Over-, perfectly or under-parameterized verdict for an architecture.
    Regime(RegimeArgs),
    /// Test accuracy split by training-hull membership.
    Decompose(DecomposeArgs),
    /// Write a synthetic dataset.
    GenData(GenDataArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::HullCheck(_) => "hull-check",
            Command::Project(_) => "project",
            Command::ExtrapReport(_) => "extrap-report",
            Command::FitPoly(_) => "fit-poly",
            Command::MinDegree(_) => "min-degree",
            Command::Lemma1Gap(_) => "lemma1-gap",
            Command::Lemma3Demo(_) => "lemma3-demo",
            Command::EpsEqual(_) => "eps-equal",
            Command::BoundaryDist(_) => "boundary-dist",
            Command::Closeness(_) => "closeness",
            Command::Lipschitz(_) => "lipschitz",
            Command::Train(_) => "train",
            Command::Regime(_) => "regime",
            Command::Decompose(_) => "decompose",
            Command::GenData(_) => "gen-data",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON report path (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LabelArg {
    /// Label column: a header name for CSV, a column index for HSM1.
    #[arg(long = "label-col")]
    pub label_col: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HullCheckArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub query: PathBuf,
    #[serde(flatten)]
    #[command(flatten)]
    pub label: LabelArg,
    #[arg(long = "dist-tol", default_value_t = 1e-6)]
    pub dist_tol: f64,
    /// SVG path for a 2-D render.
    #[arg(long)]
    pub render: Option<PathBuf>,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProjectArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub query: PathBuf,
    #[serde(flatten)]
    #[command(flatten)]
    pub label: LabelArg,
    /// Frank-Wolfe gap tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtrapArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[serde(flatten)]
    #[command(flatten)]
    pub label: LabelArg,
    #[arg(long = "dist-tol", default_value_t = 1e-6)]
    pub dist_tol: f64,
    #[arg(long)]
    pub render: Option<PathBuf>,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitPolyArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[serde(flatten)]
    #[command(flatten)]
    pub label: LabelArg,
    #[arg(long, default_value_t = 2)]
    pub degree: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub ridge: f64,
    #[arg(long)]
    pub render: Option<PathBuf>,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MinDegreeArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[serde(flatten)]
    #[command(flatten)]
    pub label: LabelArg,
    /// Largest degree tried.
    #[arg(long, default_value_t = 10)]
    pub degree: usize,
    #[arg(long)]
    pub render: Option<PathBuf>,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Lemma1Args {
    /// Largest degree of the gap curve.
    #[arg(long, default_value_t = 10)]
    pub degree: usize,
    /// Required deviation at the anchor.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Anchor position on the line.
    #[arg(long, default_value_t = 1.0)]
    pub anchor: f64,
    /// Inside samples: this many grid points on [-0.5, 0.5].
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Lemma3Args {
    /// Labelled 2-class data; the bundled blob pair when omitted.
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[serde(flatten)]
    #[command(flatten)]
    pub label: LabelArg,
    /// Degree of the base separator.
    #[arg(long, default_value_t = 2)]
    pub degree: usize,
    #[arg(long = "degree-up", default_value_t = 6)]
    pub degree_up: usize,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    /// Deviation required at each corner of the domain box.
    #[arg(long, default_value_t = 1.0)]
    pub target: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub render: Option<PathBuf>,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Box,
    Hull,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EpsEqualArgs {
    /// JSON surface file.
    #[arg(long)]
    pub f: PathBuf,
    /// JSON surface file.
    #[arg(long)]
    pub g: PathBuf,
    #[arg(long, value_enum, default_value_t = RegionKind::Box)]
    pub region: RegionKind,
    /// Points whose hull is the region (required for `--region hull`).
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[serde(flatten)]
    #[command(flatten)]
    pub label: LabelArg,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProbeArgs {
    /// Random directions per point.
    #[arg(long, default_value_t = 1000)]
    pub directions: usize,
    /// Ray length limit (domain diameter when omitted).
    #[arg(long = "max-radius")]
    pub max_radius: Option<f64>,
    /// Bisection tolerance (1e-6 of the radius when omitted).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Skip the pattern-search polish of the best direction.
    #[arg(long = "no-refine")]
    pub no_refine: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundaryArgs {
    /// Labelled data used to fit the polynomial classifier.
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub query: PathBuf,
    #[serde(flatten)]
    #[command(flatten)]
    pub label: LabelArg,
    /// Separator degree (smallest separating degree up to 10 when omitted).
    #[arg(long)]
    pub degree: Option<usize>,
    #[serde(flatten)]
    #[command(flatten)]
    pub probe: ProbeArgs,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClosenessArgs {
    #[arg(long)]
    pub train: PathBuf,
    /// Clean points.
    #[arg(long)]
    pub test: PathBuf,
    /// Perturbed counterparts of the clean points, row for row.
    #[arg(long)]
    pub query: PathBuf,
    #[serde(flatten)]
    #[command(flatten)]
    pub label: LabelArg,
    #[arg(long)]
    pub degree: Option<usize>,
    #[serde(flatten)]
    #[command(flatten)]
    pub probe: ProbeArgs,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NetArgs {
    /// Hidden layer widths, comma separated; `none` (or empty) for a linear model.
    #[arg(long, default_value = "10")]
    pub hidden: String,
    #[arg(long, default_value = "tanh")]
    pub activation: String,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 3000)]
    pub epochs: usize,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    #[arg(long = "learning-rate", default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 0.9)]
    pub momentum: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LipschitzArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[serde(flatten)]
    #[command(flatten)]
    pub label: LabelArg,
    #[serde(flatten)]
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(long, default_value_t = 2000)]
    pub pairs: usize,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[serde(flatten)]
    #[command(flatten)]
    pub label: LabelArg,
    #[serde(flatten)]
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(long)]
    pub render: Option<PathBuf>,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RegimeArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[serde(flatten)]
    #[command(flatten)]
    pub label: LabelArg,
    #[serde(flatten)]
    #[command(flatten)]
    pub net: NetArgs,
    /// Elimination candidates per group.
    #[arg(long, default_value_t = 8)]
    pub budget: usize,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[serde(flatten)]
    #[command(flatten)]
    pub label: LabelArg,
    #[serde(flatten)]
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(long = "dist-tol", default_value_t = 1e-6)]
    pub dist_tol: f64,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DataKind {
    Blobs,
    Xor,
    Diagonal,
    Gaussian,
    Uniform,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenDataArgs {
    #[arg(long, value_enum)]
    pub kind: DataKind,
    /// Points per class (blobs, diagonal), per quadrant (xor) or in total.
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Noise standard deviation (blob spread for `blobs`).
    #[arg(long, default_value_t = 0.5)]
    pub noise: f64,
    /// Dataset path; `.hsm` writes HSM1 (features only), anything else CSV.
    #[arg(long = "data-out")]
    pub data_out: PathBuf,
    #[arg(long)]
    pub render: Option<PathBuf>,
    #[serde(flatten)]
    #[command(flatten)]
    pub common: Common,
}
