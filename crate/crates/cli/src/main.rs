use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use qchaos::fock::QContext;
use qchaos::moments::QGaussianSpec;
use qchaos::random::{random_mirror, random_symmetric, seeded};
use qchaos::tensor::{read_kernel, set_element_cap, write_kernel};
use qchaos_cli::{
    make_orthsum_family, print_oracle, run_convergence_sweep, run_identity_suite, sweep_svg, ExperimentConfig,
    Family, HarnessError, Normalization, Status, Tolerances,
};

#[derive(Parser)]
#[command(name = "qchaos", version, about = "q-Wigner chaos identity suites, convergence sweeps and moment oracles")]
struct Cli {
    /// Maximum number of coefficients in any single kernel.
    #[arg(long, global = true)]
    cap_elements: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every algebraic identity and hypothesis check on random instances.
    Identities(IdentityArgs),
    /// Sweep k = 1..k_max for a kernel family and compare with the limit law.
    Sweep(SweepArgs),
    /// Print moments of a mixed Q-Gaussian.
    Oracle(OracleArgs),
    /// Generate, inspect or convert kernel files.
    #[command(subcommand)]
    Kernel(KernelCommand),
}

#[derive(Args)]
struct IdentityArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    q: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance for algebraic identities; other tolerances scale with it.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Random instances per check.
    #[arg(long, default_value_t = 50)]
    instances: usize,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    q: f64,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Family::Orthsum)]
    family: Family,
    #[arg(long, default_value_t = 32)]
    kmax: usize,
    #[arg(long, default_value_t = 6)]
    moments_up_to: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Convergence ratio: final gap must be below this fraction of the initial gap.
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_x: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_y: f64,
    #[arg(long)]
    allow_same_parity: bool,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
    #[arg(long)]
    out_svg: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    q: f64,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma_x: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_y: f64,
    /// Use a single q-Gaussian with Q = [q] and v = [sigma_x].
    #[arg(long)]
    single: bool,
    /// Read a `{"d", "Q", "v"}` JSON spec instead.
    #[arg(long, conflicts_with = "single")]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    r_max: usize,
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelFamily {
    Orthsum,
    RandomSymmetric,
    RandomMirror,
}

#[derive(Subcommand)]
enum KernelCommand {
    /// Write a kernel; `.json` paths get JSON, anything else the binary format.
    Generate {
        #[arg(long, value_enum, default_value_t = KernelFamily::Orthsum)]
        family: KernelFamily,
        /// Degree of the kernel.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Number of orthsum terms.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = Normalization::Plain)]
        normalize: Normalization,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print degree, dimension, norms and symmetry class.
    Inspect {
        path: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        q: f64,
    },
    /// Re-encode a kernel file in the format implied by the output extension.
    Convert { input: PathBuf, output: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(cap) = cli.cap_elements {
        set_element_cap(cap);
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            let config = err
                .downcast_ref::<HarnessError>()
                .map_or(err.downcast_ref::<std::io::Error>().is_some(), HarnessError::is_config_or_size);
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn create(path: &PathBuf) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn run(command: Command) -> anyhow::Result<bool> {
    match command {
        Command::Identities(a) => identities(a),
        Command::Sweep(a) => sweep(a),
        Command::Oracle(a) => oracle(a),
        Command::Kernel(k) => kernel(k),
    }
}

fn identities(a: IdentityArgs) -> anyhow::Result<bool> {
    let cfg = ExperimentConfig {
        q: a.q,
        seed: a.seed,
        instances: a.instances,
        tolerances: Tolerances { identity: a.tol, ..Tolerances::default() },
        ..ExperimentConfig::default()
    };
    cfg.validate()?;
    let report = run_identity_suite(&cfg)?;
    warn_all(&report.warnings);
    println!("{:<34} {:<8} {:<11} {:<17} {:>10} {:>10}", "check", "module", "tag", "status", "residual", "tolerance");
    for c in &report.checks {
        let tag = serde_json::to_value(c.tag)?;
        let status = serde_json::to_value(c.status)?;
        println!(
            "{:<34} {:<8} {:<11} {:<17} {:>10.3e} {:>10.3e}",
            c.name,
            c.module,
            tag.as_str().unwrap_or_default(),
            status.as_str().unwrap_or_default(),
            c.max_residual,
            c.tolerance
        );
        if let (Some(d), true) = (&c.detail, c.status != Status::Pass) {
            println!("    {d}");
        }
    }
    println!("{}", if report.passed { "all checks passed" } else { "some checks FAILED" });
    if let Some(path) = &a.out_json {
        serde_json::to_writer_pretty(create(path)?, &report)?;
    }
    Ok(report.passed)
}

fn sweep(a: SweepArgs) -> anyhow::Result<bool> {
    let cfg = ExperimentConfig {
        q: a.q,
        m: a.m,
        n: a.n,
        family: a.family,
        k_max: a.kmax,
        moments_up_to: a.moments_up_to,
        seed: a.seed,
        sigma_x: a.sigma_x,
        sigma_y: a.sigma_y,
        tolerances: Tolerances { convergence: a.tol, ..Tolerances::default() },
        allow_same_parity: a.allow_same_parity,
        ..ExperimentConfig::default()
    };
    let report = run_convergence_sweep(&cfg)?;
    warn_all(&report.warnings);
    println!("# {}", report.header.reduction);
    println!("# {}", report.header.rate_note);
    println!("# {}", report.header.oracle);
    println!("{:>4} {:>14} {:>14} {:>14} {:>14}", "k", "tau4", "target", "gap", "decomp resid");
    for r in &report.rows {
        println!(
            "{:>4} {:>14.8} {:>14.8} {:>14.6e} {:>14.3e}",
            r.k, r.tau4, r.target, r.residual, r.decomposition_residual
        );
    }
    let fmt = |s: &Option<f64>| s.map_or("n/a".to_string(), |s| format!("{s:.4}"));
    println!("gap slope: {}", fmt(&report.fits.gap_slope));
    for (name, slopes) in [("f", &report.fits.contraction_slopes_f), ("g", &report.fits.contraction_slopes_g)] {
        for (p, s) in slopes.iter().enumerate() {
            println!("slope of |{name} ⌢{} {name}|²: {}", p + 1, fmt(s));
        }
    }
    println!("observed constant max k·|gap|: {:.6}", report.fits.observed_gap_constant);
    println!("observed constant max k·rel moment gap: {:.6}", report.fits.observed_moment_constant);
    let c = &report.convergence;
    println!(
        "{}: final gap {:.6e}, initial gap {:.6e}, threshold {:.6e}",
        c.flag, c.final_gap, c.initial_gap, c.threshold
    );
    if let Some(path) = &a.out_csv {
        report.write_csv(create(path)?)?;
    }
    if let Some(path) = &a.out_json {
        serde_json::to_writer_pretty(create(path)?, &report)?;
    }
    if let Some(path) = &a.out_svg {
        std::fs::write(path, sweep_svg(&report)).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if let Some(e) = &report.cap_error {
        return Err(HarnessError::Config(format!(
            "{e}; largest feasible k = {}",
            report.largest_feasible_k.unwrap_or(0)
        ))
        .into());
    }
    Ok(report.passed())
}

fn oracle(a: OracleArgs) -> anyhow::Result<bool> {
    let spec = if let Some(path) = &a.spec {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let raw: QGaussianSpec = serde_json::from_str(&text).map_err(HarnessError::from)?;
        QGaussianSpec::new(raw.q_matrix().to_vec(), raw.v().to_vec()).map_err(HarnessError::from)?
    } else if a.single {
        QGaussianSpec::single(a.q, a.sigma_x).map_err(HarnessError::from)?
    } else {
        QGaussianSpec::double_chaos_limit(a.q, a.m, a.n, a.sigma_x, a.sigma_y).map_err(HarnessError::from)?
    };
    let table = print_oracle(&spec, a.r_max)?;
    print!("{}", table.to_text());
    if let Some(path) = &a.out_csv {
        std::fs::write(path, table.to_csv()).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(true)
}

fn kernel(cmd: KernelCommand) -> anyhow::Result<bool> {
    match cmd {
        KernelCommand::Generate { family, m, k, dim, normalize, sigma, q, seed, out } => {
            let ctx = QContext::new(q).map_err(HarnessError::from)?;
            let mut rng = seeded(seed);
            let f = match family {
                KernelFamily::Orthsum => make_orthsum_family(&ctx, m, k, dim, normalize, sigma)?,
                KernelFamily::RandomSymmetric => random_symmetric(&mut rng, dim, m).map_err(HarnessError::from)?,
                KernelFamily::RandomMirror => random_mirror(&mut rng, dim, m).map_err(HarnessError::from)?,
            };
            write_kernel(&out, &f).map_err(HarnessError::from)?;
            println!("wrote degree-{m} kernel in dimension {dim} to {}", out.display());
        }
        KernelCommand::Inspect { path, q } => {
            let f = read_kernel(&path).map_err(HarnessError::from)?;
            let ctx = QContext::new(q).map_err(HarnessError::from)?;
            println!("degree: {}", f.degree());
            println!("dim: {}", f.dim());
            println!("norm: {}", f.norm());
            println!("q-norm (q = {q}): {}", ctx.q_norm(&f).map_err(HarnessError::from)?);
            println!("symmetry: {}", serde_json::to_value(f.symmetry_class(1e-12))?.as_str().unwrap_or_default());
            println!("real: {}", f.is_real());
        }
        KernelCommand::Convert { input, output } => {
            let f = read_kernel(&input).map_err(HarnessError::from)?;
            write_kernel(&output, &f).map_err(HarnessError::from)?;
            println!("converted {} -> {}", input.display(), output.display());
        }
    }
    Ok(true)
}
