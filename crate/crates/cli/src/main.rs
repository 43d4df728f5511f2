//! Command-line front end: build a space from a one-line spec, run angle
//! queries, ball checks and globalization audits, and emit certificates and
//! traces for scripting.
//!
//! Exit codes: 0 = comparison holds / nothing bad, 3 = a violation was
//! certified, 2 = input or regime error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use toposcope::comparison::{default_badness_tol, default_probe, local_check, Triangle};
use toposcope::globalize::{globalization_audit, AuditBudgets, AuditVerdict, VerdictReport};
use toposcope::{Curvature, GeomError, Space, Vertex};

#[derive(Parser)]
#[command(
    name = "toposcope",
    version,
    about = "Comparison-geometry audits on geodesic spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Space spec: graph:<path> | plane | sphere:R=<num>[,mesh=<level>] |
    /// hyperbolic | cone:angle=<num>[,res=<num>]
    #[arg(long)]
    space: String,
    /// Curvature lower bound to compare against.
    #[arg(long, allow_hyphen_values = true)]
    k: f64,
    /// Badness tolerance; defaults to 5h on discrete backends, 1e-6 on
    /// analytic ones.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for all sampled procedures; fixed seed, fixed output.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Measure the angle at Q of triangle (P, Q, R) and compare it against
    /// the model angle; exit 3 when it is bad.
    Angle {
        #[command(flatten)]
        common: CommonArgs,
        /// Probe scale; defaults per backend.
        #[arg(long)]
        probe: Option<f64>,
        /// Vertex point specs (graph id or chart coordinates).
        p: String,
        q: String,
        r: String,
    },
    /// Run the globalization audit from a seed triangle; writes the verdict
    /// JSON and the descent-trace CSV.
    Audit {
        #[command(flatten)]
        common: CommonArgs,
        /// Sampling budget for ball checks.
        #[arg(long, default_value_t = 220)]
        budget: usize,
        /// Maximum number of descent steps.
        #[arg(long, default_value_t = 16)]
        steps: usize,
        /// Base path for outputs: writes <out>.verdict.json and
        /// <out>.trace.csv atomically.
        #[arg(long)]
        out: Option<PathBuf>,
        p: String,
        q: String,
        r: String,
    },
    /// Sample triangles inside a ball and report the worst badness found.
    Check {
        #[command(flatten)]
        common: CommonArgs,
        /// Ball center point spec.
        #[arg(long)]
        center: String,
        /// Ball radius; must exceed twice the backend resolution.
        #[arg(long)]
        radius: f64,
        /// Number of triangles to sample.
        #[arg(long, default_value_t = 220)]
        budget: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, GeomError> {
    match cli.command {
        Command::Angle {
            common,
            probe,
            p,
            q,
            r,
        } => cmd_angle(common, probe, &p, &q, &r),
        Command::Audit {
            common,
            budget,
            steps,
            out,
            p,
            q,
            r,
        } => cmd_audit(common, budget, steps, out, &p, &q, &r),
        Command::Check {
            common,
            center,
            radius,
            budget,
        } => cmd_check(common, &center, radius, budget),
    }
}

fn setup(common: &CommonArgs) -> Result<(Space, Curvature, f64), GeomError> {
    let space = Space::parse_spec(&common.space)?;
    let k = Curvature::new(common.k)?;
    let tol = common.tol.unwrap_or_else(|| default_badness_tol(&space));
    Ok((space, k, tol))
}

fn cmd_angle(
    common: CommonArgs,
    probe: Option<f64>,
    p: &str,
    q: &str,
    r: &str,
) -> Result<ExitCode, GeomError> {
    let (space, k, tol) = setup(&common)?;
    let p = space.parse_point(p)?;
    let q = space.parse_point(q)?;
    let r = space.parse_point(r)?;
    let tri = Triangle::from_vertices(&space, p, q, r)?;
    let sides = tri.sides()?;
    // measurement at the requested probe, badness decision at the default
    let (gq_p, gq_r) = tri.geodesics_at(Vertex::Q);
    let probe = probe.unwrap_or_else(|| default_probe(&space, gq_p.total, gq_r.total));
    let est = toposcope::comparison::measure_angle(&space, k, q, &gq_p, &gq_r, probe)?;
    let comparison = toposcope::comparison_angle(k, &sides, Vertex::Q)?;
    let deficit = comparison - est.value;
    println!("space      : {}", space.descriptor().params);
    println!("vertex     : {}", space.label(q));
    println!(
        "sides      : |pq|={} |qr|={} |pr|={}",
        sides.c, sides.a, sides.b
    );
    println!("probe      : {}", est.probe);
    println!("measured   : {}", est.value);
    println!("comparison : {comparison}");
    println!("deficit    : {deficit}");
    if deficit > tol {
        println!("verdict    : BAD (deficit exceeds tol {tol})");
        Ok(ExitCode::from(3))
    } else {
        println!("verdict    : not bad at tol {tol}");
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_audit(
    common: CommonArgs,
    budget: usize,
    steps: usize,
    out: Option<PathBuf>,
    p: &str,
    q: &str,
    r: &str,
) -> Result<ExitCode, GeomError> {
    let (space, k, tol) = setup(&common)?;
    let p = space.parse_point(p)?;
    let q = space.parse_point(q)?;
    let r = space.parse_point(r)?;
    let tri = Triangle::from_vertices(&space, p, q, r)?;
    let mut budgets = AuditBudgets::new(common.seed);
    budgets.local_check_budget = budget;
    budgets.max_steps = steps;
    budgets.tol = Some(tol);
    let outcome = globalization_audit(&space, k, &tri, &budgets)?;
    let report = VerdictReport::from_outcome(&space, k, &outcome);
    let json = serde_json::to_string_pretty(&report).expect("verdict serializes");
    println!("{json}");
    if let Some(base) = out {
        let verdict_path = with_suffix(&base, ".verdict.json");
        let trace_path = with_suffix(&base, ".trace.csv");
        write_atomic(&verdict_path, format!("{json}\n").as_bytes())?;
        write_atomic(&trace_path, trace_csv(&space, &outcome).as_bytes())?;
        eprintln!(
            "wrote {} and {}",
            verdict_path.display(),
            trace_path.display()
        );
    }
    match outcome.verdict {
        AuditVerdict::Holds => Ok(ExitCode::SUCCESS),
        AuditVerdict::Violated => Ok(ExitCode::from(3)),
    }
}

fn cmd_check(
    common: CommonArgs,
    center: &str,
    radius: f64,
    budget: usize,
) -> Result<ExitCode, GeomError> {
    let (space, k, tol) = setup(&common)?;
    let o = space.parse_point(center)?;
    let report = local_check(&space, k, o, radius, budget, tol, common.seed)?;
    println!("center    : {}", space.label(o));
    println!("radius    : {radius}");
    println!("triangles : {}", report.checked);
    match &report.worst {
        None => {
            println!("verdict   : good (no bad angle at tol {tol})");
            Ok(ExitCode::SUCCESS)
        }
        Some(cert) => {
            println!("verdict   : defect found");
            println!(
                "worst     : deficit {} at vertex {}",
                cert.deficit,
                space.label(cert.vertex_point())
            );
            println!(
                "triangle  : {} / {} / {}",
                space.label(cert.p),
                space.label(cert.q),
                space.label(cert.r)
            );
            println!(
                "measured  : {}  comparison: {}",
                cert.measured.value, cert.comparison
            );
            Ok(ExitCode::from(3))
        }
    }
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

/// Write through a temp file in the same directory, then rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), GeomError> {
    let io_err = |e: std::io::Error| {
        GeomError::MalformedInput(format!("cannot write {}: {e}", path.display()))
    };
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    if !dir.as_os_str().is_empty() {
        std::fs::create_dir_all(dir).map_err(io_err)?;
    }
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name()
            .map(|n| n.to_string_lossy().to_string())
            .unwrap_or_default(),
        std::process::id()
    ));
    {
        let mut f = std::fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(bytes).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    std::fs::rename(&tmp, path).map_err(io_err)
}

/// RFC-4180-style quoting for fields that need it.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn trace_csv(space: &Space, outcome: &toposcope::globalize::AuditOutcome) -> String {
    let mut out = String::from("i,o_id,delta_i,dist_p_oi,witness_deficit\n");
    for (i, e) in outcome.trace.entries.iter().enumerate() {
        let delta = e.delta.map(|d| d.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{i},{},{delta},{},{}\n",
            csv_field(&space.label(e.point)),
            e.dist_p,
            e.witness_deficit
        ));
    }
    if let Some(t) = &outcome.trace.terminal {
        out.push_str(&format!(
            "{},{},,{},{}\n",
            outcome.trace.entries.len(),
            csv_field(&space.label(t.point)),
            t.dist_p,
            t.worst_deficit
        ));
    }
    out
}
