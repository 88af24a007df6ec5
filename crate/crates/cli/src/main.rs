use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cyclotome_cli::{run, Format, JobSpec};

#[derive(Parser)]
#[command(name = "cyclotome", version, about = "Exact cyclic homology workbench over prime fields")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// builtin:NAME, builtin:NAME/F_q, or an algebra JSON file
    #[arg(long, global = true)]
    algebra: Option<String>,
    #[arg(long, global = true)]
    p: Option<usize>,
    /// Number of degrees (or levels) to report
    #[arg(long, global = true)]
    nmax: Option<usize>,
    /// Homological degree from which u is certified iso
    #[arg(long, global = true)]
    bound: Option<usize>,
    #[arg(long, global = true)]
    weight_cap: Option<usize>,
    /// Number of degrees past --bound checked for stabilization
    #[arg(long, global = true)]
    window: Option<usize>,
    #[arg(long, global = true)]
    nvars: Option<usize>,
    /// Dimension of V for `qf free`
    #[arg(long, global = true)]
    dim_v: Option<usize>,
    /// Candidate limit for `qf search`
    #[arg(long, global = true)]
    max_candidates: Option<u64>,
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[arg(long, global = true, env = "CYCLOTOME_CACHE")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also write the report here
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Add wall-clock time to the report (makes output non-reproducible)
    #[arg(long, global = true)]
    timings: bool,
    /// Print the job spec as JSON instead of running it
    #[arg(long, global = true)]
    dump_spec: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate an algebra, or list the builtins without --algebra
    CheckAlgebra,
    /// Hochschild homology with coefficients in the twisted diagonal bimodule
    Hh,
    Hc,
    /// Periodic cyclic homology with a certified stabilization window
    Hp,
    /// Tate homology of Z/p on the levels of the p-cyclic object
    Tate,
    Identities,
    /// Inspect, compose or enumerate morphisms of Lambda_p
    Lambda { args: Vec<String> },
    /// Quasi-Frobenius maps: validate (default), `free`, or `search`
    Qf { action: Option<String> },
    /// Cartier isomorphism certificate; `verify` recomputes it from scratch
    Cartier { action: Option<String> },
    /// Weight-sliced de Rham cohomology of a polynomial ring
    Derham,
    Degeneration,
    /// Re-check a stored certificate
    Verify { file: PathBuf },
    /// Run a JobSpec JSON file
    Run { file: PathBuf },
}

fn spec_of(cli: Cli) -> Result<JobSpec, String> {
    let (command, args) = match cli.command {
        Cmd::CheckAlgebra => ("check-algebra", vec![]),
        Cmd::Hh => ("hh", vec![]),
        Cmd::Hc => ("hc", vec![]),
        Cmd::Hp => ("hp", vec![]),
        Cmd::Tate => ("tate", vec![]),
        Cmd::Identities => ("identities", vec![]),
        Cmd::Lambda { args } => ("lambda", args),
        Cmd::Qf { action } => ("qf", action.into_iter().collect()),
        Cmd::Cartier { action } => ("cartier", action.into_iter().collect()),
        Cmd::Derham => ("derham", vec![]),
        Cmd::Degeneration => ("degeneration", vec![]),
        Cmd::Verify { file } => ("verify", vec![file.display().to_string()]),
        Cmd::Run { file } => {
            let text = std::fs::read_to_string(&file).map_err(|e| format!("cannot read {}: {e}", file.display()))?;
            return serde_json::from_str(&text).map_err(|e| format!("{} is not a job spec: {e}", file.display()));
        }
    };
    Ok(JobSpec {
        command: command.to_string(),
        args,
        algebra: cli.algebra,
        p: cli.p,
        n_max: cli.nmax,
        bound: cli.bound,
        weight_cap: cli.weight_cap,
        window: cli.window,
        nvars: cli.nvars,
        dim_v: cli.dim_v,
        max_candidates: cli.max_candidates,
        output: cli.output,
        cache_dir: cli.cache_dir,
        format: cli.format,
        deterministic: !cli.timings,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    cyclotome::exec::init_threads(cli.jobs);
    let dump = cli.dump_spec;
    let spec = match spec_of(cli) {
        Ok(s) => s,
        Err(m) => {
            eprintln!("error: {m}");
            return ExitCode::from(1);
        }
    };
    if dump {
        println!("{}", serde_json::to_string_pretty(&spec).expect("serializable"));
        return ExitCode::SUCCESS;
    }
    let out = run(&spec);
    if let Some(r) = &out.report {
        print!("{r}");
    }
    if let Some(m) = &out.message {
        eprintln!("error: {m}");
    }
    ExitCode::from(out.code as u8)
}
