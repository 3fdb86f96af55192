//! Command-line surface: build groups and bundles, apply products, run
//! verification suites, and export reports and structure-constant tables.
//!
//! Exit codes: 0 all checks pass, 1 any check fails, 2 usage or I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qg::bundle::{self, BundleDocument, QGBundle};
use qg::group::{self, FiniteGroup};
use qg::lie::{self, ProductKind};
use qg::linalg::{CMatrix, MatrixDocument, Tolerance};
use qg::lp;
use qg::multipliers::{self, ModuleSide};
use qg::report::VerifyReport;
use qg::suite::{self, Suite, SuiteConfig};

#[derive(Parser)]
#[command(name = "qg", version, about = "Finite quantum group verification laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or validate group tables
    Group {
        #[command(subcommand)]
        action: GroupAction,
    },
    /// Build or validate fundamental-unitary bundles
    Bundle {
        #[command(subcommand)]
        action: BundleAction,
    },
    /// Apply one of the four products to two matrices
    Product(ProductArgs),
    /// Mixed-product checks and structure-constant tables
    Lie {
        #[command(subcommand)]
        action: LieAction,
    },
    /// Multiplier superoperators and the module-map dimension experiment
    Multipliers {
        #[command(subcommand)]
        action: MultipliersAction,
    },
    /// Exponent-indexed fundamental maps and products
    Lp(LpArgs),
    /// Consolidated verification suites
    Suite {
        #[command(subcommand)]
        action: SuiteAction,
    },
}

#[derive(Subcommand)]
enum GroupAction {
    /// Build a standard group and write its table as JSON
    Build {
        /// Group name: Zn, Dn, Sn, Q8, or products like Z2xZ2
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse a group file and re-check the group axioms
    Validate {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum BundleAction {
    /// Build the bundle of a group (or of its dual) and write it as JSON
    Build {
        /// Group file path or builtin name
        #[arg(long)]
        group: String,
        /// Build the dual bundle instead
        #[arg(long)]
        dual: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-verify all structural identities of a serialized bundle
    Validate {
        #[arg(long)]
        bundle: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
}

#[derive(Args)]
struct ProductArgs {
    /// Group file path or builtin name
    #[arg(long)]
    group: String,
    #[arg(long)]
    op: OpKind,
    /// Left factor, as a matrix JSON file
    #[arg(long)]
    left: PathBuf,
    /// Right factor, as a matrix JSON file
    #[arg(long)]
    right: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpKind {
    Star,
    Bullet,
    Ostar,
    OstarPlus,
}

impl OpKind {
    fn kind(self) -> ProductKind {
        match self {
            OpKind::Star => ProductKind::Star,
            OpKind::Bullet => ProductKind::Bullet,
            OpKind::Ostar => ProductKind::Ostar,
            OpKind::OstarPlus => ProductKind::OstarPlus,
        }
    }
}

#[derive(Subcommand)]
enum LieAction {
    /// Associativity, dual relation, sharpness, and admission checks
    Verify {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the two-sided identity element of the mixed product
    Identity {
        #[arg(long)]
        group: String,
    },
    /// Export structure constants as JSON (and optionally CSV)
    Table {
        #[arg(long)]
        group: String,
        #[arg(long)]
        product: OpKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MultipliersAction {
    /// Measure the module-map space dimension and compare to the multiplier span
    Dim {
        #[arg(long)]
        group: String,
        #[arg(long)]
        side: SideArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Args)]
struct LpArgs {
    /// Group file path or builtin name
    #[arg(long)]
    group: String,
    /// Exponent in (1, ∞)
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Subcommand)]
enum SuiteAction {
    /// Run a named suite and write the report
    Run {
        /// pentagon, products, lie, multipliers, lp, or all
        #[arg(long)]
        suite: String,
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct TolArgs {
    #[arg(long, default_value_t = 1e-10)]
    tol_abs: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol_rel: f64,
}

impl TolArgs {
    fn tolerance(&self) -> Tolerance {
        Tolerance { absolute: self.tol_abs, relative: self.tol_rel }
    }
}

/// Loads a group from a file path, or builds a builtin by name when the
/// argument is not an existing file.
fn load_group(spec: &str) -> Result<FiniteGroup> {
    if Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
        Ok(group::parse_group(&text)?)
    } else {
        group::named_group(spec)
            .map_err(|e| anyhow!("{spec:?} is neither a file nor a builtin group name: {e}"))
    }
}

fn load_bundle(spec: &str, dual: bool) -> Result<QGBundle> {
    let b = bundle::build_commutative(&load_group(spec)?)?;
    if dual {
        Ok(bundle::build_dual(&b)?)
    } else {
        Ok(b)
    }
}

fn load_matrix(path: &Path) -> Result<CMatrix> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let doc: MatrixDocument = serde_json::from_str(&text)?;
    Ok(doc.to_matrix()?)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Prints the report table and optionally persists the JSON; returns the
/// exit code dictated by the pass/fail outcome.
fn finish_report(report: &VerifyReport, out: Option<&Path>) -> Result<u8> {
    print!("{}", report.render_table());
    if let Some(path) = out {
        write_json(path, report)?;
    }
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Group { action } => match action {
            GroupAction::Build { name, out } => {
                let g = group::named_group(&name)?;
                write_json(&out, &g.to_document())?;
                println!("wrote {} (order {})", out.display(), g.order);
                Ok(0)
            }
            GroupAction::Validate { file } => {
                let text = std::fs::read_to_string(&file)
                    .with_context(|| format!("reading {}", file.display()))?;
                match group::parse_group(&text) {
                    Ok(g) => {
                        println!("valid group {} of order {}", g.name, g.order);
                        Ok(0)
                    }
                    Err(e) => {
                        println!("invalid group table: {e}");
                        Ok(1)
                    }
                }
            }
        },
        Command::Bundle { action } => match action {
            BundleAction::Build { group, dual, out } => {
                let b = load_bundle(&group, dual)?;
                write_json(&out, &BundleDocument::from_bundle(&b))?;
                println!("wrote {} (dimension {})", out.display(), b.d);
                Ok(0)
            }
            BundleAction::Validate { bundle: path, tol } => {
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let doc: BundleDocument = serde_json::from_str(&text)?;
                let b = doc.to_bundle()?;
                let report = bundle::validate_qg(&b, tol.tolerance());
                finish_report(&report, None)
            }
        },
        Command::Product(args) => {
            let b = load_bundle(&args.group, false)?;
            let left = load_matrix(&args.left)?;
            let right = load_matrix(&args.right)?;
            let result = match args.op.kind() {
                ProductKind::Star => qg::conv::star(&b, &left, &right)?,
                ProductKind::Bullet => qg::conv::bullet(&b, &left, &right)?,
                ProductKind::Ostar => lie::ostar(&b, &left, &right)?,
                ProductKind::OstarPlus => lie::ostar_plus(&b, &left, &right)?,
            };
            write_json(&args.out, &MatrixDocument::from_matrix(&result))?;
            println!("wrote {}", args.out.display());
            Ok(0)
        }
        Command::Lie { action } => match action {
            LieAction::Verify { group, seed, samples, tol, out } => {
                let g = load_group(&group)?;
                let config = SuiteConfig { seed, tol: tol.tolerance(), samples };
                let report = suite::run_suite(&g, Suite::Lie, &config)?;
                finish_report(&report, out.as_deref())
            }
            LieAction::Identity { group } => {
                let b = load_bundle(&group, false)?;
                match lie::identity_element(&b) {
                    Ok(e) => {
                        println!(
                            "two-sided identity verified over the trace-zero basis; trace {:.3e}",
                            e.trace().norm()
                        );
                        Ok(0)
                    }
                    Err(e) => {
                        println!("identity check failed: {e}");
                        Ok(1)
                    }
                }
            }
            LieAction::Table { group, product, out, csv } => {
                let g = load_group(&group)?;
                let table = suite::emit_structure_constants(&g, product.kind())?;
                write_json(&out, &table)?;
                println!("wrote {} ({} basis elements)", out.display(), table.basis_labels.len());
                if let Some(csv_path) = csv {
                    std::fs::write(&csv_path, suite::structure_constants_csv(&table))
                        .with_context(|| format!("writing {}", csv_path.display()))?;
                    println!("wrote {}", csv_path.display());
                }
                Ok(0)
            }
        },
        Command::Multipliers { action } => match action {
            MultipliersAction::Dim { group, side, out } => {
                let b = load_bundle(&group, false)?;
                let side = match side {
                    SideArg::Left => ModuleSide::Left,
                    SideArg::Right => ModuleSide::Right,
                };
                let dim = multipliers::module_map_space_dim(&b, side)?;
                println!(
                    "measured module-map dimension {} (multiplier span {}), rank gap {:.3e}",
                    dim.dim, dim.predicted_dim, dim.gap
                );
                println!(
                    "residuals: span {:.3e}, containment {:.3e}, closed form {:.3e}",
                    dim.predicted_max_residual, dim.containment_residual, dim.closed_form_residual
                );
                if let Some(path) = out {
                    let doc = serde_json::json!({
                        "schema_version": qg::report::SCHEMA_VERSION,
                        "group": b.provenance.label(),
                        "side": match side { ModuleSide::Left => "left", ModuleSide::Right => "right" },
                        "dimension": dim.dim,
                        "predicted_dimension": dim.predicted_dim,
                        "gap": dim.gap,
                        "residual_profile": dim.residuals,
                        "predicted_max_residual": dim.predicted_max_residual,
                        "containment_residual": dim.containment_residual,
                        "closed_form_residual": dim.closed_form_residual,
                    });
                    write_json(&path, &doc)?;
                    println!("wrote {}", path.display());
                }
                Ok(0)
            }
        },
        Command::Lp(args) => {
            let g = load_group(&args.group)?;
            let pair = lp::build_lp_pair(&g, args.p)?;
            let mut report =
                VerifyReport::new(format!("lp-p{}", args.p), g.name.clone(), args.seed);
            report.push(
                "commutation",
                "the two fundamental maps satisfy the pentagonal commutation relation",
                lp::commutation_residual(&pair),
                1e-12,
            );
            report.push(
                "adjoint-duality",
                "the adjoint of each map is the inverse of its conjugate-exponent partner",
                lp::adjoint_duality_residual(&g, args.p)?,
                1e-12,
            );
            report.push_bool(
                "mixed-product-admitted",
                "the exponent-indexed pair passes the interchange and transfer conditions",
                lp::mixed_product_p(&pair, lie::MixedSign::Minus, args.samples.clamp(1, 32), 1e-9, args.seed)
                    .is_ok(),
            );
            finish_report(&report, None)
        }
        Command::Suite { action } => match action {
            SuiteAction::Run { suite: name, group, seed, samples, tol, out } => {
                let g = load_group(&group)?;
                let config = SuiteConfig { seed, tol: tol.tolerance(), samples };
                let report = suite::run_suite(&g, Suite::parse(&name)?, &config)?;
                finish_report(&report, out.as_deref())
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
