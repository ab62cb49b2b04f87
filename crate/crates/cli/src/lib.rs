//! Command-line driver: argument parsing, dispatch, and CSV/JSON/SVG output.

pub mod svg;

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ergodic_core::dynamics::T0Policy;
use ergodic_core::entanglement::{purity_from_gram, purity_report, ProtocolConfig, DEFAULT_MEMORY_CAP};
use ergodic_core::experiments::{
    capacity_comparison, profile_seed, ramp_scan, realization_spectrum, run_purity_sweep, spectrum_seed,
    write_capacity_csv, ProfileParams, SweepResult, SweepSpec,
};
use ergodic_core::io::{read_charge_set, read_profile_csv, read_profile_json, read_spectrum_csv, write_json, write_spectrum_csv, GramJson, SpectrumJson};
use ergodic_core::multicharge::multicharge_gram_with;
use ergodic_core::spectra::{heisenberg_time, spacing_ratio_statistic, Ensemble, Spectrum};
use ergodic_core::states::{flat_state, haar_random_state, ProfileTag, StateProfile};
use ergodic_core::transfer::{bhatia_davis_check, transfer_diagnostics, TransferDiagnostics};
use ergodic_core::{Error, ExecPolicy, Result};

use svg::{emit_svg, Marker, PlotOptions, Series};

/// Directory used for output files when `--output` is not given.
pub const OUT_DIR_ENV: &str = "ERGODIC_EPR_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "ergodic", version, about = "Entanglement generation through ergodic dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file. Defaults to stdout, or to a file in $ERGODIC_EPR_OUT_DIR.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample or load a spectrum and report its statistics.
    Spectrum(SpectrumArgs),
    /// Purity of A by all three routes.
    Purity(PurityArgs),
    /// Ensemble-averaged purity over a grid read from a JSON config.
    Sweep(SweepArgs),
    /// Gram-eigenvalue transfer diagnostics.
    Transfer(PurityArgs),
    /// Ensemble-averaged spectral form factor with a linear ramp fit.
    Ramp(RampArgs),
    /// Minimal d_B for operator transfer at a given error.
    Capacity(CapacityArgs),
    /// Purity for a coupling through several conserved charges.
    Multicharge(MultichargeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    #[arg(long, default_value = "gue")]
    pub ensemble: String,
    #[arg(long = "d-b", default_value_t = 256)]
    pub d_b: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Load energies from a CSV (index,energy) or JSON file instead.
    #[arg(long)]
    pub spectrum_file: Option<PathBuf>,
    /// Use the raw sampled energies instead of the unfolded ones.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub source: SourceArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PurityArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value = "flat")]
    pub profile: String,
    /// Load amplitudes from a CSV (index,re,im) or JSON file instead.
    #[arg(long)]
    pub profile_file: Option<PathBuf>,
    #[arg(long = "d-a", default_value_t = 8)]
    pub d_a: usize,
    /// A number, or auto-exact, ramp-window, ramp-onset.
    #[arg(long, default_value = "ramp-window")]
    pub t0: String,
    #[arg(long)]
    pub e0: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Higher purities to report.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub alphas: Vec<u32>,
    /// Largest d_A * d_B for the brute-force route.
    #[arg(long, default_value_t = DEFAULT_MEMORY_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RampArgs {
    #[arg(long, default_value = "gue")]
    pub ensemble: String,
    #[arg(long = "d-b", default_value_t = 256)]
    pub d_b: usize,
    #[arg(long, default_value_t = 50)]
    pub n_real: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid end in units of the Heisenberg time.
    #[arg(long, default_value_t = 5.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Fit window start in units of the Heisenberg time.
    #[arg(long, default_value_t = 0.1)]
    pub fit_start: f64,
    #[arg(long, default_value_t = 0.5)]
    pub fit_end: f64,
    /// Logarithmic axes in SVG output.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CapacityArgs {
    #[arg(long = "d-a", value_delimiter = ',', default_value = "16")]
    pub d_a: Vec<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = ergodic_core::transfer::TYPICAL_KAPPA)]
    pub kappa: f64,
}

#[derive(Debug, Clone, Args)]
pub struct MultichargeArgs {
    /// JSON file with "qA" (d_A x K) and "QB" (d_B x K) tables.
    #[arg(long)]
    pub charges: PathBuf,
    #[arg(long, default_value = "flat")]
    pub profile: String,
    #[arg(long)]
    pub profile_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub t0: f64,
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit(_) => 3,
        Error::InvariantViolation(_) => 4,
        Error::Io(_) | Error::Linalg(_) => 1,
        _ => 2,
    }
}

/// Machine-readable error line for stderr.
pub fn error_json(e: &Error) -> String {
    serde_json::json!({ "error": e.kind(), "message": e.to_string(), "exit_code": exit_code(e) }).to_string()
}

fn policy(threads: Option<usize>) -> ExecPolicy {
    match threads {
        Some(1) => ExecPolicy::Sequential,
        _ => ExecPolicy::default(),
    }
}

/// Configures the worker pool. Must run before any parallel work.
pub fn configure_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Configuration("--threads must be at least 1".into()));
        }
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Configuration(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn load_spectrum(src: &SourceArgs) -> Result<Spectrum> {
    if let Some(path) = &src.spectrum_file {
        let s = if is_json(path) {
            let j: SpectrumJson = serde_json::from_reader(open(path)?)?;
            j.into_spectrum()?
        } else {
            read_spectrum_csv(open(path)?)?
        };
        return Ok(s);
    }
    let ensemble: Ensemble = src.ensemble.parse()?;
    let seed = spectrum_seed(src.seed, ensemble, src.d_b, 0);
    if src.raw {
        // realization_spectrum unfolds; rebuild the raw draw with the same seed
        return match ensemble {
            Ensemble::Gue => ergodic_core::spectra::sample_gue_spectrum(src.d_b, seed),
            Ensemble::Poisson => ergodic_core::spectra::sample_poisson_spectrum(src.d_b, 1.0, seed),
            Ensemble::PicketFence => ergodic_core::spectra::picket_fence_spectrum(src.d_b, 1.0),
            Ensemble::Custom => Err(Error::Configuration("custom spectra need --spectrum-file".into())),
        };
    }
    realization_spectrum(ensemble, src.d_b, seed)
}

fn load_profile(args: &PurityArgs, s: &Spectrum) -> Result<StateProfile> {
    if let Some(path) = &args.profile_file {
        return if is_json(path) { read_profile_json(open(path)?) } else { read_profile_csv(open(path)?) };
    }
    let tag: ProfileTag = args.profile.parse()?;
    let params = ProfileParams { gaussian_center: args.e0, gaussian_sigma: args.sigma, gibbs_beta: args.beta };
    params.build(tag, s, profile_seed(args.source.seed, s.ensemble(), s.dim(), 0))
}

/// Where the primary artifact goes.
enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    fn resolve(output: &Option<PathBuf>, name: &str, format: Format) -> Result<Self> {
        if let Some(p) = output {
            return Ok(Sink::File(p.clone()));
        }
        match std::env::var_os(OUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => {
                let dir = PathBuf::from(dir);
                std::fs::create_dir_all(&dir)?;
                Ok(Sink::File(dir.join(format!("{name}.{}", format.ext()))))
            }
            _ => Ok(Sink::Stdout),
        }
    }

    fn write(&self, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        match self {
            Sink::Stdout => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                f(&mut lock)?;
                lock.flush()?;
            }
            Sink::File(path) => {
                let mut w = BufWriter::new(File::create(path)?);
                f(&mut w)?;
                w.flush()?;
            }
        }
        Ok(())
    }

    /// The summary goes to stderr when stdout carries the artifact.
    fn summary(&self, line: &str) {
        match self {
            Sink::Stdout => eprintln!("{line}"),
            Sink::File(path) => println!("{line} -> {}", path.display()),
        }
    }
}

fn json_to(value: &impl Serialize) -> impl FnOnce(&mut dyn Write) -> Result<()> + '_ {
    move |w| write_json(value, w)
}

fn svg_to(svg: String) -> impl FnOnce(&mut dyn Write) -> Result<()> {
    move |w| Ok(w.write_all(svg.as_bytes())?)
}

pub fn run(cli: &Cli) -> Result<()> {
    let policy = policy(cli.threads);
    match &cli.command {
        Command::Spectrum(a) => spectrum(cli, a),
        Command::Purity(a) => purity(cli, a),
        Command::Sweep(a) => sweep(cli, a, policy),
        Command::Transfer(a) => transfer(cli, a),
        Command::Ramp(a) => ramp(cli, a, policy),
        Command::Capacity(a) => capacity(cli, a),
        Command::Multicharge(a) => multicharge(cli, a, policy),
    }
}

#[derive(Serialize)]
struct SpectrumSummary<'a> {
    #[serde(flatten)]
    spectrum: &'a SpectrumJson,
    heisenberg_time: f64,
    spacing_ratio: Option<f64>,
}

fn spectrum(cli: &Cli, a: &SpectrumArgs) -> Result<()> {
    let s = load_spectrum(&a.source)?;
    let format = cli.format.unwrap_or(Format::Csv);
    let sink = Sink::resolve(&cli.output, "spectrum", format)?;
    let t_h = heisenberg_time(&s)?;
    let ratio = (s.dim() >= 3).then(|| spacing_ratio_statistic(&s)).transpose()?;
    match format {
        Format::Csv => sink.write(|w| write_spectrum_csv(&s, w))?,
        Format::Json => {
            let j = SpectrumJson::from(&s);
            sink.write(json_to(&SpectrumSummary { spectrum: &j, heisenberg_time: t_h, spacing_ratio: ratio }))?
        }
        Format::Svg => {
            let stair: Vec<(f64, f64)> = s.energies().iter().enumerate().map(|(i, &e)| (e, i as f64)).collect();
            let opts = PlotOptions {
                title: format!("{} spectrum, d_B = {}", s.ensemble(), s.dim()),
                x_label: "E".into(),
                y_label: "level index".into(),
                ..Default::default()
            };
            sink.write(svg_to(emit_svg(&[Series::new("staircase", stair)], &opts)?))?
        }
    }
    sink.summary(&format!(
        "spectrum {} d_B={} t_H={t_h} spacing_ratio={}",
        s.ensemble(),
        s.dim(),
        ratio.map_or("n/a".to_string(), |r| r.to_string())
    ));
    Ok(())
}

fn protocol_inputs(a: &PurityArgs) -> Result<(Spectrum, StateProfile, f64)> {
    let s = load_spectrum(&a.source)?;
    let phi = load_profile(a, &s)?;
    let t0 = a.t0.parse::<T0Policy>()?.resolve(&s, a.d_a)?;
    Ok((s, phi, t0))
}

fn purity(cli: &Cli, a: &PurityArgs) -> Result<()> {
    let (s, phi, t0) = protocol_inputs(a)?;
    let cfg = ProtocolConfig::new(a.d_a, t0, &s, &phi)?;
    let report = purity_report(&cfg, &a.alphas, a.cap)?;
    report.check_routes()?;
    let format = cli.format.unwrap_or(Format::Json);
    let sink = Sink::resolve(&cli.output, "purity", format)?;
    match format {
        Format::Json => sink.write(json_to(&report))?,
        Format::Csv => sink.write(|w| {
            writeln!(w, "d_A,d_B,t0,purity_formula,purity_direct,purity_gram,eta2,max_discrepancy")?;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                report.d_a,
                report.d_b,
                report.t0,
                report.purity_formula,
                report.purity_direct,
                report.purity_gram,
                report.eta2,
                report.max_discrepancy
            )?;
            Ok(())
        })?,
        Format::Svg => {
            let times: Vec<f64> = (0..a.d_a).map(|tau| tau as f64 * t0).collect();
            let series = ergodic_core::dynamics::return_series(&s, &phi, &times, ExecPolicy::Sequential)?;
            let pts = series.times.iter().copied().zip(series.probabilities.iter().copied()).collect();
            let opts = PlotOptions {
                title: format!("return probability at multiples of t0, purity {:.6}", report.purity_formula),
                x_label: "t".into(),
                y_label: "p(t)".into(),
                ..Default::default()
            };
            sink.write(svg_to(emit_svg(&[Series::new("p(t)", pts)], &opts)?))?
        }
    }
    sink.summary(&format!(
        "purity {} (d_A={} d_B={} t0={} eta2={} discrepancy={:e})",
        report.purity_formula, report.d_a, report.d_b, t0, report.eta2, report.max_discrepancy
    ));
    Ok(())
}

fn sweep(cli: &Cli, a: &SweepArgs, policy: ExecPolicy) -> Result<()> {
    let mut spec: SweepSpec = serde_json::from_reader(open(&a.config)?)?;
    if cli.threads == Some(1) {
        spec.policy = policy;
    }
    let result = run_purity_sweep(&spec)?;
    let format = cli.format.unwrap_or(Format::Csv);
    let sink = Sink::resolve(&cli.output, "sweep", format)?;
    match format {
        Format::Csv => sink.write(|w| result.write_csv(w))?,
        Format::Json => sink.write(json_to(&result))?,
        Format::Svg => sink.write(svg_to(sweep_svg(&result)?))?,
    }
    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    sink.summary(&format!("sweep {} rows, {failed} failed", result.rows.len()));
    Ok(())
}

fn sweep_svg(result: &SweepResult) -> Result<String> {
    let mut groups: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in result.rows.iter().filter(|r| r.error.is_none()) {
        let label = format!("{}/{} d_A={}", r.ensemble, r.profile, r.d_a);
        match groups.iter_mut().find(|g| g.0 == label) {
            Some(g) => g.1.push((r.d_b as f64, r.mean_purity - 1.0 / r.d_a as f64)),
            None => groups.push((label, vec![(r.d_b as f64, r.mean_purity - 1.0 / r.d_a as f64)])),
        }
    }
    let series: Vec<Series> = groups.into_iter().map(|(l, p)| Series::new(l, p)).collect();
    let opts = PlotOptions {
        title: "excess purity".into(),
        x_label: "d_B".into(),
        y_label: "purity - 1/d_A".into(),
        log_x: true,
        log_y: true,
        markers: Vec::new(),
    };
    emit_svg(&series, &opts)
}

#[derive(Serialize)]
struct TransferOutput {
    #[serde(rename = "d_A")]
    d_a: usize,
    #[serde(rename = "d_B")]
    d_b: usize,
    t0: f64,
    purity: f64,
    diagnostics: TransferDiagnostics,
    bhatia_davis_holds: bool,
    bhatia_davis_slack: f64,
}

fn transfer(cli: &Cli, a: &PurityArgs) -> Result<()> {
    let (s, phi, t0) = protocol_inputs(a)?;
    let g = ProtocolConfig::new(a.d_a, t0, &s, &phi)?.gram()?;
    let diag = transfer_diagnostics(&g)?;
    let (holds, slack) = bhatia_davis_check(&diag);
    if !holds {
        return Err(Error::InvariantViolation(format!("Bhatia-Davis bound violated by {slack:e}")));
    }
    let out = TransferOutput {
        d_a: a.d_a,
        d_b: s.dim(),
        t0,
        purity: purity_from_gram(&g),
        diagnostics: diag,
        bhatia_davis_holds: holds,
        bhatia_davis_slack: slack,
    };
    let format = cli.format.unwrap_or(Format::Json);
    let sink = Sink::resolve(&cli.output, "transfer", format)?;
    match format {
        Format::Json => sink.write(json_to(&out))?,
        Format::Csv => sink.write(|w| {
            writeln!(w, "k,r_k")?;
            for (k, r) in out.diagnostics.gram_eigenvalues.iter().enumerate() {
                writeln!(w, "{k},{r}")?;
            }
            Ok(())
        })?,
        Format::Svg => {
            let pts = out.diagnostics.gram_eigenvalues.iter().enumerate().map(|(k, &r)| (k as f64, r)).collect();
            let opts = PlotOptions {
                title: "Gram eigenvalues".into(),
                x_label: "k".into(),
                y_label: "r_k".into(),
                ..Default::default()
            };
            sink.write(svg_to(emit_svg(&[Series::new("r_k", pts)], &opts)?))?
        }
    }
    sink.summary(&format!(
        "transfer worst_case_error={} eta2={} bd_product={}",
        out.diagnostics.worst_case_error, out.diagnostics.eta2, out.diagnostics.bd_product
    ));
    Ok(())
}

#[derive(Serialize)]
struct RampOutput<'a> {
    scan: &'a ergodic_core::experiments::RampScan,
    fit_start: f64,
    fit_end: f64,
    slope: f64,
    intercept: f64,
    /// `slope * 2 pi d_B`; one for an ideal ramp on unfolded spectra.
    slope_ratio: f64,
}

fn ramp(cli: &Cli, a: &RampArgs, policy: ExecPolicy) -> Result<()> {
    let ensemble: Ensemble = a.ensemble.parse()?;
    if a.points < 2 || !(a.t_max > 0.0) {
        return Err(Error::InvalidWindow("need --points >= 2 and --t-max > 0".into()));
    }
    // unfolded spectra have t_H = 2 pi
    let t_h = 2.0 * PI;
    let grid: Vec<f64> = (0..a.points).map(|i| a.t_max * t_h * i as f64 / (a.points - 1) as f64).collect();
    let scan = ramp_scan(ensemble, a.d_b, &grid, a.n_real, a.seed, policy)?;
    let (start, end) = (a.fit_start * scan.t_h, a.fit_end * scan.t_h);
    let (slope, intercept) = scan.fit(start, end)?;
    let out = RampOutput { scan: &scan, fit_start: start, fit_end: end, slope, intercept, slope_ratio: slope * 2.0 * PI * a.d_b as f64 };
    let format = cli.format.unwrap_or(Format::Csv);
    let sink = Sink::resolve(&cli.output, "ramp", format)?;
    match format {
        Format::Csv => sink.write(|w| {
            writeln!(w, "t,mean_K,sem_K")?;
            for ((t, k), e) in scan.times.iter().zip(&scan.mean_k).zip(&scan.sem_k) {
                writeln!(w, "{t},{k},{e}")?;
            }
            Ok(())
        })?,
        Format::Json => sink.write(json_to(&out))?,
        Format::Svg => {
            let pts = scan.times.iter().copied().zip(scan.mean_k.iter().copied()).collect();
            let opts = PlotOptions {
                title: format!("{} form factor, d_B = {}, {} realizations", ensemble, a.d_b, scan.n_real),
                x_label: "t".into(),
                y_label: "K(t)".into(),
                log_x: a.log,
                log_y: a.log,
                markers: vec![Marker { label: "t_H".into(), x: scan.t_h }],
            };
            sink.write(svg_to(emit_svg(&[Series::new("K(t)", pts)], &opts)?))?
        }
    }
    sink.summary(&format!("ramp slope={slope} slope*2pi*d_B={} t_H={}", out.slope_ratio, scan.t_h));
    Ok(())
}

fn capacity(cli: &Cli, a: &CapacityArgs) -> Result<()> {
    let rows = capacity_comparison(&a.d_a, a.epsilon, a.gamma, a.kappa)?;
    let format = cli.format.unwrap_or(Format::Csv);
    let sink = Sink::resolve(&cli.output, "capacity", format)?;
    match format {
        Format::Csv => sink.write(|w| write_capacity_csv(&rows, w))?,
        Format::Json => sink.write(json_to(&rows))?,
        Format::Svg => {
            let mut series: Vec<Series> = Vec::new();
            for r in &rows {
                let label = r.case.as_str();
                match series.iter_mut().find(|s| s.label == label) {
                    Some(s) => s.points.push((r.d_a as f64, r.min_db)),
                    None => series.push(Series::new(label, vec![(r.d_a as f64, r.min_db)])),
                }
            }
            let opts = PlotOptions {
                title: format!("minimal d_B at epsilon = {}", a.epsilon),
                x_label: "d_A".into(),
                y_label: "min d_B".into(),
                log_x: true,
                log_y: true,
                markers: Vec::new(),
            };
            sink.write(svg_to(emit_svg(&series, &opts)?))?
        }
    }
    sink.summary(&format!("capacity {} rows", rows.len()));
    Ok(())
}

#[derive(Serialize)]
struct MultichargeOutput {
    #[serde(rename = "d_A")]
    d_a: usize,
    #[serde(rename = "d_B")]
    d_b: usize,
    num_charges: usize,
    t0: f64,
    purity: f64,
    eta2: f64,
    gram: GramJson,
}

fn multicharge(cli: &Cli, a: &MultichargeArgs, policy: ExecPolicy) -> Result<()> {
    let charges = read_charge_set(open(&a.charges)?)?;
    let phi = match &a.profile_file {
        Some(p) if is_json(p) => read_profile_json(open(p)?)?,
        Some(p) => read_profile_csv(open(p)?)?,
        None => match a.profile.parse::<ProfileTag>()? {
            ProfileTag::Flat => flat_state(charges.d_b())?,
            ProfileTag::HaarRandom => haar_random_state(charges.d_b(), a.seed)?,
            other => return Err(Error::Configuration(format!("profile `{other}` needs --profile-file here"))),
        },
    };
    let g = multicharge_gram_with(&charges, &phi, a.t0, policy)?;
    let out = MultichargeOutput {
        d_a: charges.d_a(),
        d_b: charges.d_b(),
        num_charges: charges.num_charges(),
        t0: a.t0,
        purity: purity_from_gram(&g),
        eta2: ergodic_core::entanglement::eta2(&g),
        gram: GramJson::from_gram(&g, false),
    };
    let format = cli.format.unwrap_or(Format::Json);
    let sink = Sink::resolve(&cli.output, "multicharge", format)?;
    match format {
        Format::Json => sink.write(json_to(&out))?,
        Format::Csv => sink.write(|w| ergodic_core::io::write_gram_csv(&g, w))?,
        Format::Svg => return Err(Error::Configuration("multicharge has no SVG output".into())),
    }
    sink.summary(&format!("multicharge purity {} eta2 {}", out.purity, out.eta2));
    Ok(())
}
