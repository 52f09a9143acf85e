use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ordspec::ensemble::{compare_up_to, run_ensemble, EnsembleStats, REPORTED_MOMENTS};
use ordspec::exactnum::{rational_to_decimal, Rational, RationalRepr};
use ordspec::fixtures::FixtureCorpus;
use ordspec::ordstat::{family_moment_check, spectrum_family, SpectrumFamily};
use ordspec::steppoly::StepPolyDensity;
use ordspec::SystemDims;
use serde_json::{json, Value};

const MAX_DIM: usize = 8;
const DECIMALS: usize = 17;

#[derive(Parser)]
#[command(
    name = "ordspec",
    version,
    about = "Ordered eigenvalue densities of random bipartite pure states"
)]
struct Cli {
    /// Worker threads; ORDSPEC_THREADS takes precedence when set.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive exact densities; writes p_k JSON and sampled-curve CSV files.
    Derive {
        #[command(flatten)]
        sel: Selection,
        /// Curve points per unit length.
        #[arg(long, default_value_t = 1000)]
        resolution: usize,
        /// Output directory.
        #[arg(long, default_value = ".")]
        output: PathBuf,
    },
    /// Exact moments of the ordered eigenvalues.
    Moments {
        #[command(flatten)]
        sel: Selection,
        /// Single moment order; overrides --qmax.
        #[arg(long)]
        q: Option<u32>,
        #[arg(long, default_value_t = 4)]
        qmax: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output file (stdout if omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Mean, variance, skewness and excess kurtosis.
    Descriptors {
        #[command(flatten)]
        sel: Selection,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sample random states; writes stats JSON and per-k histogram CSV files.
    Montecarlo {
        #[command(flatten)]
        dims: DimArgs,
        #[command(flatten)]
        mc: McArgs,
        /// Output directory.
        #[arg(long, default_value = ".")]
        output: PathBuf,
    },
    /// Monte Carlo moments against exact ones; exit 0 iff all agree within tolerance.
    Compare {
        #[command(flatten)]
        dims: DimArgs,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = REPORTED_MOMENTS)]
        qmax: usize,
        /// Report JSON file (stdout if omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Re-derive every published fixture and compare exactly.
    FixturesCheck {
        /// Fixture corpus JSON to check instead of the embedded one.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Write the embedded corpus as JSON to this file and exit.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Export a density or ensemble as JSON or CSV, from --input or freshly derived.
    Export {
        /// Density JSON or ensemble stats JSON to re-export.
        #[arg(long, conflicts_with_all = ["m", "n", "k"])]
        input: Option<PathBuf>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = 1000)]
        resolution: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct DimArgs {
    #[arg(long)]
    m: usize,
    /// Defaults to m.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Clone, Copy)]
struct Selection {
    #[command(flatten)]
    dims: DimArgs,
    /// Single order statistic (1 = smallest); all if omitted.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args, Clone, Copy)]
struct McArgs {
    #[arg(long, default_value_t = 100_100)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    bins: usize,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

fn validate_dims(m: usize, n: usize) -> Result<SystemDims> {
    if n > MAX_DIM {
        bail!("n = {n} exceeds the supported maximum {MAX_DIM}");
    }
    Ok(SystemDims::new(m, n)?)
}

impl DimArgs {
    fn resolve(&self) -> Result<SystemDims> {
        validate_dims(self.m, self.n.unwrap_or(self.m))
    }
}

impl Selection {
    fn resolve(&self) -> Result<(SystemDims, Vec<usize>)> {
        let dims = self.dims.resolve()?;
        let ks = match self.k {
            Some(k) => {
                dims.check_order(k)?;
                vec![k]
            }
            None => (1..=dims.m()).collect(),
        };
        Ok((dims, ks))
    }
}

fn exact(r: &Rational) -> Value {
    json!({ "exact": RationalRepr::from(r), "decimal": rational_to_decimal(r, DECIMALS) })
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn family(dims: SystemDims) -> Result<SpectrumFamily> {
    Ok(spectrum_family(dims)?)
}

fn tag(dims: SystemDims) -> String {
    format!("m{}_n{}", dims.m(), dims.n())
}

fn cmd_derive(sel: Selection, resolution: usize, output: &Path) -> Result<ExitCode> {
    let (dims, ks) = sel.resolve()?;
    let fam = family(dims)?;
    fs::create_dir_all(output).with_context(|| format!("creating {}", output.display()))?;
    for k in ks {
        let d = fam.density(k);
        let stem = format!("density_{}_k{k}", tag(dims));
        write_file(&output.join(format!("{stem}.json")), &d.to_json()?)?;
        write_file(
            &output.join(format!("{stem}.csv")),
            &d.curve_csv(resolution),
        )?;
        println!(
            "k={k} normalization={} mean={}",
            rational_to_decimal(&d.normalize_check(), DECIMALS),
            rational_to_decimal(&d.moment(1), DECIMALS)
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_moments(
    sel: Selection,
    q: Option<u32>,
    qmax: u32,
    format: Format,
    output: Option<&Path>,
) -> Result<ExitCode> {
    let (dims, ks) = sel.resolve()?;
    let fam = family(dims)?;
    let qs: Vec<u32> = match q {
        Some(q) => vec![q],
        None => (1..=qmax).collect(),
    };
    let text = match format {
        Format::Csv => {
            let mut out = String::from("k,q,num,den,decimal\n");
            for &k in &ks {
                for &q in &qs {
                    let v = fam.density(k).moment(q);
                    out.push_str(&format!(
                        "{k},{q},{},{},{}\n",
                        v.numer(),
                        v.denom(),
                        rational_to_decimal(&v, DECIMALS)
                    ));
                }
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = ks
                .iter()
                .flat_map(|&k| {
                    let d = fam.density(k);
                    qs.iter()
                        .map(move |&q| json!({ "k": k, "q": q, "moment": exact(&d.moment(q)) }))
                })
                .collect();
            let trace = family_moment_check(&fam, qs.iter().copied().max().unwrap_or(0))?;
            let mut out = serde_json::to_string_pretty(&json!({
                "m": dims.m(),
                "n": dims.n(),
                "moments": rows,
                "trace_identity": trace,
            }))?;
            out.push('\n');
            out
        }
    };
    emit(output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_descriptors(sel: Selection, format: Format, output: Option<&Path>) -> Result<ExitCode> {
    let (dims, ks) = sel.resolve()?;
    let fam = family(dims)?;
    let text = match format {
        Format::Csv => {
            let mut out = String::from("k,quantity,num,den,decimal\n");
            for &k in &ks {
                let ds = fam.density(k).descriptors()?;
                for (name, v) in [
                    ("mean", &ds.mean),
                    ("variance", &ds.variance),
                    ("skewness", &ds.skewness),
                    ("excess_kurtosis", &ds.excess_kurtosis),
                ] {
                    out.push_str(&format!(
                        "{k},{name},{},{},{}\n",
                        v.numer(),
                        v.denom(),
                        rational_to_decimal(v, DECIMALS)
                    ));
                }
            }
            out
        }
        Format::Json => {
            let rows = ks
                .iter()
                .map(|&k| {
                    let ds = fam.density(k).descriptors()?;
                    Ok(json!({
                        "k": k,
                        "mean": exact(&ds.mean),
                        "variance": exact(&ds.variance),
                        "skewness": exact(&ds.skewness),
                        "excess_kurtosis": exact(&ds.excess_kurtosis),
                    }))
                })
                .collect::<Result<Vec<Value>>>()?;
            let mut out = serde_json::to_string_pretty(&json!({
                "m": dims.m(),
                "n": dims.n(),
                "descriptors": rows,
            }))?;
            out.push('\n');
            out
        }
    };
    emit(output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_montecarlo(dims: DimArgs, mc: McArgs, output: &Path) -> Result<ExitCode> {
    let dims = dims.resolve()?;
    let stats = run_ensemble(dims, mc.samples, mc.seed, mc.bins)?;
    fs::create_dir_all(output).with_context(|| format!("creating {}", output.display()))?;
    let stem = format!("ensemble_{}_seed{}", tag(dims), mc.seed);
    write_file(&output.join(format!("{stem}.json")), &stats.to_json()?)?;
    for k in 1..=dims.m() {
        write_file(
            &output.join(format!("histogram_{}_k{k}.csv", tag(dims))),
            &stats.histogram_csv_for(k),
        )?;
    }
    println!(
        "samples={} accepted={} discarded={} sum_check_max={:e}",
        stats.sample_count, stats.accepted, stats.discarded, stats.sum_check_max
    );
    for k in 1..=dims.m() {
        println!(
            "k={k} mean={:.6} stderr={:.1e}",
            stats.moment(k, 1),
            stats.standard_error(k, 1)
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(
    dims: DimArgs,
    mc: McArgs,
    tol: f64,
    qmax: usize,
    output: Option<&Path>,
) -> Result<ExitCode> {
    let dims = dims.resolve()?;
    let fam = family(dims)?;
    let stats = run_ensemble(dims, mc.samples, mc.seed, mc.bins)?;
    let report = compare_up_to(&stats, &fam, tol, qmax)?;
    let mut text = report.to_json()?;
    text.push('\n');
    emit(output, &text)?;
    let (k, q, diff) = report.worst;
    if report.pass {
        eprintln!("pass: worst |difference| {diff:.3e} at k={k}, q={q} (tolerance {tol:e})");
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("fail: worst |difference| {diff:.3e} at k={k}, q={q} (tolerance {tol:e})");
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_fixtures_check(corpus: Option<&Path>, dump: Option<&Path>) -> Result<ExitCode> {
    if let Some(path) = dump {
        write_file(path, &FixtureCorpus::embedded().to_json()?)?;
        return Ok(ExitCode::SUCCESS);
    }
    let corpus = match corpus {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            FixtureCorpus::from_json(&text)?
        }
        None => FixtureCorpus::embedded(),
    };
    for (m, n) in corpus.dims() {
        validate_dims(m, n)?;
    }
    let report = corpus.check()?;
    let failures: Vec<_> = report.failures().collect();
    if failures.is_empty() {
        println!("all {} fixtures reproduced exactly", report.outcomes.len());
        return Ok(ExitCode::SUCCESS);
    }
    for f in &failures {
        eprintln!("FAIL {}: {}", f.id, f.detail.as_deref().unwrap_or(""));
    }
    eprintln!(
        "{} of {} fixtures failed",
        failures.len(),
        report.outcomes.len()
    );
    Ok(ExitCode::FAILURE)
}

fn reexport(text: &str, format: Format, resolution: usize) -> Result<String> {
    let value: Value = serde_json::from_str(text)?;
    if value.get("terms").is_some() {
        let d = StepPolyDensity::from_json(text)?;
        validate_dims(d.m(), d.n())?;
        return Ok(match format {
            Format::Json => d.to_json()?,
            Format::Csv => d.curve_csv(resolution),
        });
    }
    if value.get("histograms").is_some() {
        let stats = EnsembleStats::from_json(text)?;
        return Ok(match format {
            Format::Json => stats.to_json()?,
            Format::Csv => stats.histogram_csv(),
        });
    }
    bail!("input is neither a density nor ensemble statistics")
}

fn cmd_export(
    input: Option<&Path>,
    (m, n, k): (Option<usize>, Option<usize>, Option<usize>),
    format: Format,
    resolution: usize,
    output: Option<&Path>,
) -> Result<ExitCode> {
    let text = match input {
        Some(p) => {
            let src = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            reexport(&src, format, resolution)?
        }
        None => {
            let (Some(m), Some(k)) = (m, k) else {
                bail!("export needs --input, or --m and --k");
            };
            let dims = validate_dims(m, n.unwrap_or(m))?;
            dims.check_order(k)?;
            let fam = family(dims)?;
            let d = fam.density(k);
            match format {
                Format::Json => d.to_json()?,
                Format::Csv => d.curve_csv(resolution),
            }
        }
    };
    emit(output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let from_env = match std::env::var("ORDSPEC_THREADS") {
        Ok(v) if !v.trim().is_empty() => Some(
            v.trim()
                .parse::<usize>()
                .with_context(|| format!("ORDSPEC_THREADS={v:?} is not a thread count"))?,
        ),
        _ => None,
    };
    if let Some(n) = from_env.or(flag) {
        if n == 0 {
            bail!("thread count must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Derive {
            sel,
            resolution,
            output,
        } => cmd_derive(sel, resolution, &output),
        Command::Moments {
            sel,
            q,
            qmax,
            format,
            output,
        } => cmd_moments(sel, q, qmax, format, output.as_deref()),
        Command::Descriptors {
            sel,
            format,
            output,
        } => cmd_descriptors(sel, format, output.as_deref()),
        Command::Montecarlo { dims, mc, output } => cmd_montecarlo(dims, mc, &output),
        Command::Compare {
            dims,
            mc,
            tol,
            qmax,
            output,
        } => cmd_compare(dims, mc, tol, qmax, output.as_deref()),
        Command::FixturesCheck { corpus, dump } => {
            cmd_fixtures_check(corpus.as_deref(), dump.as_deref())
        }
        Command::Export {
            input,
            m,
            n,
            k,
            format,
            resolution,
            output,
        } => cmd_export(
            input.as_deref(),
            (m, n, k),
            format,
            resolution,
            output.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
