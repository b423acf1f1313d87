//! Command-line front end: segment / edges / fcm / phantom / eval.
//!
//! Exit codes: 0 success, 1 usage or parameter validation, 2 input/format
//! error, 3 pipeline error (e.g. empty brain mask).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lesionseg::edge::{self, EdgeParams};
use lesionseg::error::Error;
use lesionseg::eval::{self, PhantomSpec};
use lesionseg::fcm::{fcm_modified, FcmParams, InitMethod};
use lesionseg::image::{normalize_intensities, BinaryMask, Image2D};
use lesionseg::io::{load_image, load_mask, save_image, save_mask};
use lesionseg::pipeline::{overlay, segment_lesions, EdgeGate, PipelineConfig};

#[derive(Parser)]
#[command(
    name = "lesionseg",
    version,
    about = "MS-lesion segmentation for 2-D brain MR slices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write masks, maps, and report.json.
    Segment(SegmentArgs),
    /// Run a single edge detector and write the edge mask.
    Edges(EdgesArgs),
    /// Run modified FCM and write membership maps and centroids.
    Fcm(FcmArgs),
    /// Generate a synthetic phantom with ground truth.
    Phantom(PhantomArgs),
    /// Compare a predicted mask against ground truth.
    Eval(EvalArgs),
}

#[derive(Args)]
struct SegmentArgs {
    /// Input image (PGM P2/P5 or 8-bit grayscale PNG).
    #[arg(long)]
    input: PathBuf,
    /// External brain mask; replaces the computed one.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Pipeline configuration JSON; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
    /// Ground-truth lesion mask; adds metrics to report.json.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[command(flatten)]
    fcm: FcmFlags,
    #[command(flatten)]
    edge: EdgeFlags,
    /// Brain-mask intensity threshold in [0,1].
    #[arg(long)]
    brain_threshold: Option<f64>,
    #[arg(long, value_enum)]
    edge_gate: Option<EdgeGateArg>,
    /// Fraction of a component boundary that must lie on edges.
    #[arg(long)]
    overlap_ratio: Option<f64>,
    /// Drop lesion components smaller than this many pixels.
    #[arg(long)]
    min_lesion_px: Option<usize>,
}

#[derive(Args)]
struct FcmFlags {
    /// Number of clusters (c >= 2).
    #[arg(long)]
    clusters: Option<usize>,
    /// Fuzziness exponent (m > 1).
    #[arg(long)]
    m: Option<f64>,
    /// Neighborhood regularizer weight.
    #[arg(long)]
    alpha: Option<f64>,
    /// Bias-field regularizer weight.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    init: Option<InitArg>,
}

impl FcmFlags {
    fn apply(&self, p: &mut FcmParams) {
        if let Some(c) = self.clusters {
            p.c = c;
        }
        if let Some(m) = self.m {
            p.m = m;
        }
        if let Some(a) = self.alpha {
            p.alpha = a;
        }
        if let Some(b) = self.beta {
            p.beta = b;
        }
        if let Some(n) = self.max_iter {
            p.max_iter = n;
        }
        if let Some(t) = self.tol {
            p.tol = t;
        }
        if let Some(s) = self.seed {
            p.seed = s;
        }
        if let Some(i) = self.init {
            p.init = i.into();
        }
    }
}

#[derive(Args)]
struct EdgeFlags {
    /// Gaussian sigma for smoothing / LoG.
    #[arg(long)]
    sigma: Option<f64>,
    /// Hysteresis low threshold (fraction of max magnitude).
    #[arg(long)]
    low: Option<f64>,
    /// Hysteresis high threshold (fraction of max magnitude).
    #[arg(long)]
    high: Option<f64>,
    /// Minimum LoG response swing for a zero crossing.
    #[arg(long)]
    zc_threshold: Option<f64>,
    /// Kernel radius (size = 2r+1).
    #[arg(long)]
    kernel_radius: Option<usize>,
}

impl EdgeFlags {
    fn apply(&self, p: &mut EdgeParams) {
        if let Some(s) = self.sigma {
            p.sigma = s;
        }
        if let Some(l) = self.low {
            p.low = l;
        }
        if let Some(h) = self.high {
            p.high = h;
        }
        if let Some(z) = self.zc_threshold {
            p.zc_threshold = z;
        }
        if let Some(r) = self.kernel_radius {
            p.kernel_radius = r;
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Quantile,
    RandomPixels,
}

impl From<InitArg> for InitMethod {
    fn from(v: InitArg) -> Self {
        match v {
            InitArg::Quantile => InitMethod::Quantile,
            InitArg::RandomPixels => InitMethod::RandomPixels,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EdgeGateArg {
    Off,
    BoundaryOverlap,
}

impl From<EdgeGateArg> for EdgeGate {
    fn from(v: EdgeGateArg) -> Self {
        match v {
            EdgeGateArg::Off => EdgeGate::Off,
            EdgeGateArg::BoundaryOverlap => EdgeGate::BoundaryOverlap,
        }
    }
}

#[derive(Args)]
struct EdgesArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    #[command(flatten)]
    edge: EdgeFlags,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Canny,
    Sobel,
    Prewitt,
    MarrHildreth,
}

#[derive(Args)]
struct FcmArgs {
    #[arg(long)]
    input: PathBuf,
    /// Restrict clustering to this mask (default: all pixels).
    #[arg(long)]
    mask: Option<PathBuf>,
    #[command(flatten)]
    fcm: FcmFlags,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct PhantomArgs {
    /// Phantom spec JSON; omitted = built-in default phantom.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Also report edge_f1 at this pixel tolerance.
    #[arg(long, default_value_t = 1)]
    tol_px: usize,
}

#[derive(serde::Serialize)]
struct Metrics {
    dice: f64,
    jaccard: f64,
    sensitivity: f64,
    specificity: f64,
}

#[derive(serde::Serialize)]
struct RunReport {
    input: String,
    config: PipelineConfig,
    centroids: Vec<f64>,
    iterations: usize,
    final_objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<Metrics>,
    outputs: Vec<String>,
    wall_ms: u128,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidParameter(_) => 1,
        Error::FileNotFound(_)
        | Error::Io(_)
        | Error::UnsupportedFormat(_)
        | Error::Malformed(_)
        | Error::DimensionMismatch { .. } => 2,
        Error::EmptyMask | Error::MaskTooSmall { .. } | Error::DegenerateCluster(_) => 3,
    }
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(&err))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    // clap handles usage errors with exit code 1 via try_parse
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Segment(args) => cmd_segment(args),
        Command::Edges(args) => cmd_edges(args),
        Command::Fcm(args) => cmd_fcm(args),
        Command::Phantom(args) => cmd_phantom(args),
        Command::Eval(args) => cmd_eval(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn cmd_segment(args: SegmentArgs) -> Result<(), Error> {
    let started = Instant::now();
    let mut config: PipelineConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => PipelineConfig::standard(),
    };
    args.fcm.apply(&mut config.fcm);
    args.edge.apply(&mut config.edge);
    if let Some(t) = args.brain_threshold {
        config.brain.threshold = t;
    }
    if let Some(g) = args.edge_gate {
        config.edge_gate = g.into();
    }
    if let Some(r) = args.overlap_ratio {
        config.overlap_ratio = r;
    }
    if let Some(px) = args.min_lesion_px {
        config.min_lesion_px = px;
    }
    config.validate()?;

    let image = load_image(&args.input)?;
    let external_mask = args.mask.as_deref().map(load_mask).transpose()?;
    let truth = args.truth.as_deref().map(load_mask).transpose()?;

    let result = segment_lesions(&image, &config, external_mask.as_ref())?;

    std::fs::create_dir_all(&args.out_dir)?;
    let out = |name: &str| args.out_dir.join(name);
    save_mask(&result.lesion_mask, &out("lesion_mask.pgm"))?;
    save_mask(&result.edge_map, &out("edges.pgm"))?;
    // labels spread evenly over 0..255 (0 = outside brain)
    let c = config.fcm.c as f64;
    let label_img = Image2D::new(
        image.width(),
        image.height(),
        result.label_map.iter().map(|&l| l as f64 / c).collect(),
    )?;
    save_image(&label_img, &out("labels.pgm"))?;
    save_image(&normalize_intensities(&result.bias_field), &out("bias.pgm"))?;
    let normalized = normalize_intensities(&image);
    save_image(&overlay(&normalized, &result.lesion_mask)?, &out("overlay.pgm"))?;

    let metrics = match &truth {
        Some(t) => Some(Metrics {
            dice: eval::dice(&result.lesion_mask, t)?,
            jaccard: eval::jaccard(&result.lesion_mask, t)?,
            sensitivity: eval::sensitivity(&result.lesion_mask, t)?,
            specificity: eval::specificity(&result.lesion_mask, t)?,
        }),
        None => None,
    };
    let outputs: Vec<String> =
        ["lesion_mask.pgm", "edges.pgm", "labels.pgm", "bias.pgm", "overlay.pgm", "report.json"]
            .iter()
            .map(|n| out(n).display().to_string())
            .collect();
    let report = RunReport {
        input: args.input.display().to_string(),
        config: result.config_echo.clone(),
        centroids: result.centroids.clone(),
        iterations: result.iterations,
        final_objective: result.final_objective,
        metrics,
        outputs,
        wall_ms: started.elapsed().as_millis(),
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Malformed(format!("report serialization: {e}")))?;
    std::fs::write(out("report.json"), json + "\n")?;
    Ok(())
}

fn cmd_edges(args: EdgesArgs) -> Result<(), Error> {
    let mut params = EdgeParams::default();
    args.edge.apply(&mut params);
    params.validate()?;
    let image = load_image(&args.input)?;
    let mask: BinaryMask = match args.method {
        Method::Canny => edge::canny(&image, &params)?,
        Method::MarrHildreth => edge::marr_hildreth(&image, &params)?,
        Method::Sobel => edge::threshold_magnitude(&edge::sobel(&image), params.high),
        Method::Prewitt => edge::threshold_magnitude(&edge::prewitt(&image), params.high),
    };
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    save_mask(&mask, &args.out)
}

fn cmd_fcm(args: FcmArgs) -> Result<(), Error> {
    let mut params = FcmParams::default();
    args.fcm.apply(&mut params);
    params.validate()?;
    let image = load_image(&args.input)?;
    let mask = match &args.mask {
        Some(p) => load_mask(p)?,
        None => BinaryMask::ones(image.width(), image.height())?,
    };
    let normalized = normalize_intensities(&image);
    let state = fcm_modified(&normalized, &mask, &params)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let (w, h) = (image.width(), image.height());
    let active: Vec<usize> = (0..w * h).filter(|&j| mask.values()[j] == 1).collect();
    let n = active.len();
    for i in 0..params.c {
        let mut buf = vec![0.0f64; w * h];
        for (j, &grid) in active.iter().enumerate() {
            buf[grid] = state.u[i * n + j];
        }
        let img = Image2D::new(w, h, buf)?;
        save_image(&img, &args.out_dir.join(format!("membership_{i}.pgm")))?;
    }
    let mut bias = vec![0.0f64; w * h];
    for (j, &grid) in active.iter().enumerate() {
        bias[grid] = state.gamma[j];
    }
    save_image(
        &normalize_intensities(&Image2D::new(w, h, bias)?),
        &args.out_dir.join("bias.pgm"),
    )?;
    let summary = serde_json::json!({
        "centroids": state.v,
        "iterations": state.iterations_run,
        "final_objective": state.j_history.last(),
        "params": params,
    });
    std::fs::write(
        args.out_dir.join("centroids.json"),
        serde_json::to_string_pretty(&summary).unwrap() + "\n",
    )?;
    Ok(())
}

fn cmd_phantom(args: PhantomArgs) -> Result<(), Error> {
    let spec: PhantomSpec = match &args.spec {
        Some(p) => read_json(p)?,
        None => PhantomSpec::default(),
    };
    let (image, truth, bias) = eval::make_phantom(&spec)?;
    std::fs::create_dir_all(&args.out_dir)?;
    save_image(&image, &args.out_dir.join("image.pgm"))?;
    save_mask(&truth, &args.out_dir.join("truth.pgm"))?;
    save_image(&normalize_intensities(&bias), &args.out_dir.join("bias.pgm"))?;
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), Error> {
    let pred = load_mask(&args.pred)?;
    let truth = load_mask(&args.truth)?;
    let out = serde_json::json!({
        "dice": eval::dice(&pred, &truth)?,
        "jaccard": eval::jaccard(&pred, &truth)?,
        "sensitivity": eval::sensitivity(&pred, &truth)?,
        "specificity": eval::specificity(&pred, &truth)?,
        "edge_f1": eval::edge_f1(&pred, &truth, args.tol_px)?,
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}
