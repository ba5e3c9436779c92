use clap::{Parser, Subcommand, ValueEnum};
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use vem::experiments::{
    emit_plot_data, ratio_ladder, run_single, run_study, summarize, testcase, CaseId, StudyConfig, STATUS_OK,
};
use vem::mesh::{read_mesh, write_mesh, MeshFamily, MeshFamilySpec, DEFAULT_LLOYD_ITERS, DEFAULT_SEED};
use vem::vemlocal::EnlargementPolicy;
use vem::{MethodKind, VemError};

const EXIT_INPUT: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "vem", version, about = "Standard and stabilization-free virtual element solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyChoice {
    Cartesian,
    Voronoi,
    Both,
}

impl FamilyChoice {
    fn families(self) -> Vec<MeshFamily> {
        match self {
            FamilyChoice::Cartesian => vec![MeshFamily::Cartesian],
            FamilyChoice::Voronoi => vec![MeshFamily::Voronoi],
            FamilyChoice::Both => vec![MeshFamily::Cartesian, MeshFamily::Voronoi],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyChoice {
    Minimal,
    FirstFullRank,
}

impl From<PolicyChoice> for EnlargementPolicy {
    fn from(p: PolicyChoice) -> Self {
        match p {
            PolicyChoice::Minimal => EnlargementPolicy::Minimal,
            PolicyChoice::FirstFullRank => EnlargementPolicy::FirstFullRank,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a mesh of the unit square.
    Mesh {
        #[arg(long)]
        family: MeshFamily,
        /// Cells per side (cartesian) or number of cells (voronoi).
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_LLOYD_ITERS)]
        lloyd_iters: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve one test case on a mesh file and write the solution and diagnostics as JSON.
    Solve {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        method: MethodKind,
        #[arg(long)]
        order: usize,
        /// tc1, tc2 or patch:<k>
        #[arg(long)]
        case: CaseId,
        #[arg(long, value_enum, default_value_t = PolicyChoice::FirstFullRank)]
        enlargement: PolicyChoice,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run a convergence study and write CSV files plus a JSON summary.
    Study {
        #[arg(long)]
        case: CaseId,
        /// Comma-separated orders; defaults to the case's standard pair.
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',', default_value = "vem,e2vem")]
        methods: Vec<MethodKind>,
        #[arg(long, value_enum, default_value_t = FamilyChoice::Both)]
        family: FamilyChoice,
        /// Number of refinement levels; defaults to the family's standard ladder.
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_LLOYD_ITERS)]
        lloyd_iters: usize,
        #[arg(long, value_enum, default_value_t = PolicyChoice::FirstFullRank)]
        enlargement: PolicyChoice,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print the ladder-averaged ||A^S||_inf / ||A^Pi||_inf of the standard method.
    Ratio {
        #[arg(long)]
        case: CaseId,
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value_t = FamilyChoice::Both)]
        family: FamilyChoice,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_LLOYD_ITERS)]
        lloyd_iters: usize,
    },
}

fn check_order(k: usize) -> vem::Result<()> {
    if (1..=3).contains(&k) {
        Ok(())
    } else {
        Err(VemError::InvalidInput(format!("order must be 1, 2 or 3, got {k}")))
    }
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map(|x| format!("{x:.prec$e}")).unwrap_or_else(|| "-".into())
}

/// Returns the number of failed study rows.
fn run(command: Command) -> vem::Result<usize> {
    match command {
        Command::Mesh { family, n, seed, lloyd_iters, output } => {
            let spec = match family {
                MeshFamily::Cartesian => MeshFamilySpec::cartesian(n),
                MeshFamily::Voronoi => MeshFamilySpec::voronoi(n, seed, lloyd_iters),
            };
            let mesh = spec.generate()?;
            let mut out = BufWriter::new(fs::File::create(&output)?);
            write_mesh(&mesh, &mut out)?;
            out.flush()?;
            eprintln!("{} cells, {} vertices, h_max = {:.6}", mesh.num_cells(), mesh.num_vertices(), mesh.h_max());
            Ok(0)
        }
        Command::Solve { mesh, method, order, case, enlargement, output } => {
            check_order(order)?;
            let mesh = read_mesh(BufReader::new(fs::File::open(&mesh)?))?;
            let run = run_single(&mesh, &testcase(case), method, order, enlargement.into())?;
            let mut out = BufWriter::new(fs::File::create(&output)?);
            serde_json::to_writer_pretty(&mut out, &run)?;
            writeln!(out)?;
            out.flush()?;
            println!(
                "{case} {method} k={order}: {} dofs, e_star = {:.6e}, solver {:?}, residual {:.2e}",
                run.n_dofs, run.e_star, run.report.solver, run.report.residual
            );
            Ok(0)
        }
        Command::Study { case, orders, methods, family, levels, seed, lloyd_iters, enlargement, output } => {
            let mut config = StudyConfig::new(case);
            if let Some(orders) = orders {
                config.orders = orders;
            }
            config.methods = methods;
            config.families = family.families();
            config.levels = levels;
            config.seed = seed;
            config.lloyd_iters = lloyd_iters;
            config.policy = enlargement.into();
            let result = run_study(&config)?;
            println!("family     method k level   h_max      dofs      e_star      alpha      ratio");
            for r in &result.rows {
                println!(
                    "{:<10} {:<6} {} {:>5} {:.4e} {:>9} {:>11} {:>10} {:>10}{}",
                    r.family.as_str(),
                    r.method.as_str(),
                    r.order,
                    r.level,
                    r.h_max,
                    r.n_dofs,
                    fmt_opt(r.e_star, 4),
                    r.alpha.map(|a| format!("{a:.3}")).unwrap_or_else(|| "-".into()),
                    r.ratio.map(|a| format!("{a:.3}")).unwrap_or_else(|| "-".into()),
                    if r.status == STATUS_OK { String::new() } else { format!("  [{}]", r.status) }
                );
            }
            for s in summarize(&result).ratios {
                if let Some(avg) = s.average {
                    println!("average ratio {} k={}: {avg:.4}", s.family, s.order);
                }
            }
            for path in emit_plot_data(&result, &output)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(result.rows.iter().filter(|r| r.status != STATUS_OK).count())
        }
        Command::Ratio { case, order, family, levels, seed, lloyd_iters } => {
            check_order(order)?;
            let mut config = StudyConfig::new(case);
            config.orders = vec![order];
            config.levels = levels;
            config.seed = seed;
            config.lloyd_iters = lloyd_iters;
            for fam in family.families() {
                let ladder = ratio_ladder(&config, fam, order)?;
                let avg = ladder.iter().map(|(_, r)| r).sum::<f64>() / ladder.len() as f64;
                println!("{case} {fam} k={order}: {avg:.4}");
                for (h, r) in ladder {
                    eprintln!("  h_max {h:.4e}  ratio {r:.4}");
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failed) => {
            eprintln!("error: {failed} study row(s) failed to solve; see the status column of results.csv");
            ExitCode::from(EXIT_SOLVER)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_solver_failure() { EXIT_SOLVER } else { EXIT_INPUT })
        }
    }
}
