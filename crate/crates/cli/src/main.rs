use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hypercurv::cli::{
    graph_report, lrh_report, output_path, run_audit, run_identities, write_csv, write_curvature_csv,
    write_json, AuditConfig, AuditFamily, IdentityConfig,
};
use hypercurv::grw::{GraphSpec, Orientation};
use hypercurv::maxprin::Scenario;

/// Curvature identities, hypersurface reports and maximum-principle checks.
#[derive(Debug, Parser)]
#[command(name = "hypercurv", version)]
struct Cli {
    /// Directory for JSON and CSV output.
    #[arg(long, global = true, env = "HYPERCURV_OUT", default_value = "hypercurv-out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Randomized identity suites.
    Identities {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        matrices: usize,
        #[arg(long, default_value_t = 10_000)]
        spectra: usize,
        /// Flip the sign of one closed form (harness self-test).
        #[arg(long)]
        inject_fault: bool,
    },
    /// Curvature report for a graph file.
    Report { graph: PathBuf },
    /// Check tr(P_r Hess h) against its closed form on a graph file.
    LrhVerify {
        graph: PathBuf,
        #[arg(long)]
        r: usize,
        /// Relative tolerance on the largest residual.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Maximizing sequences for a scenario file.
    Maxprin { scenario: PathBuf },
    /// Hypothesis audit over a preset family.
    Audit {
        family: AuditFamily,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
        #[arg(long)]
        orientation: Option<Orientation>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 24)]
        nodes: usize,
    },
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "input".into())
}

fn run(cli: Cli) -> hypercurv::Result<bool> {
    let out = cli.out;
    match cli.command {
        Command::Identities {
            seed,
            matrices,
            spectra,
            inject_fault,
        } => {
            let cfg = IdentityConfig {
                seed,
                matrices,
                spectra,
                inject_fault,
            };
            let rep = run_identities(&cfg)?;
            write_json(&output_path(&out, "identities.json"), &rep)?;
            for s in &rep.suites {
                let status = if s.passed { "PASS" } else { "FAIL" };
                println!("{status} {} cases={} worst={:e}", s.name, s.cases, s.worst);
            }
            Ok(rep.passed)
        }
        Command::Report { graph } => {
            let spec = GraphSpec::load(&graph)?;
            let rep = graph_report(&spec)?;
            let name = stem(&graph);
            write_json(&output_path(&out, &format!("{name}.report.json")), &rep)?;
            write_curvature_csv(&output_path(&out, &format!("{name}.curvature.csv")), &rep.rows)?;
            println!("nodes={} elliptic={}", rep.nodes, rep.elliptic.elliptic_nodes.len());
            Ok(rep.max_gauss_residual.is_none_or(|r| r <= 1e-8))
        }
        Command::LrhVerify { graph, r, tol } => {
            let spec = GraphSpec::load(&graph)?;
            let rep = lrh_report(&spec, r, tol)?;
            write_json(&output_path(&out, &format!("{}.lrh{r}.json", stem(&graph))), &rep)?;
            println!("r={r} max_residual={:e} relative={:e}", rep.max_residual, rep.relative);
            Ok(rep.passed)
        }
        Command::Maxprin { scenario } => {
            let sc = Scenario::load(&scenario)?;
            let rep = sc.run()?;
            let name = stem(&scenario);
            write_json(&output_path(&out, &format!("{name}.maxprin.json")), &rep)?;
            write_json(&output_path(&out, &format!("{name}.records.json")), &rep.above.records)?;
            println!(
                "resolved={} unresolved={} corollary={}",
                rep.above.records.len(),
                rep.above.unresolved.len(),
                rep.above_verdict.holds
            );
            Ok(rep.passed())
        }
        Command::Audit {
            family,
            r,
            t0,
            beta,
            c1,
            c2,
            orientation,
            seed,
            samples,
            nodes,
        } => {
            let cfg = AuditConfig {
                r,
                t0,
                beta,
                c1,
                c2,
                orientation,
                seed,
                samples,
                nodes,
                ..AuditConfig::new(family)
            };
            let rep = run_audit(&cfg)?;
            let name = format!("audit_{family}_r{r}");
            write_json(&output_path(&out, &format!("{name}.json")), &rep)?;
            write_csv(&output_path(&out, &format!("{name}.csv")), &rep.verdicts)?;
            println!(
                "samples={} rejected={} audited_nodes={} key_failures={} scalar_mismatches={}",
                rep.verdicts.len(),
                rep.rejected,
                rep.audited_nodes,
                rep.key_failures,
                rep.scalar_mismatches
            );
            Ok(rep.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ (hypercurv::Error::Config(_) | hypercurv::Error::Json(_) | hypercurv::Error::Io(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
