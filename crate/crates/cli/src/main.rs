//! Command-line surface for the exact R-matrix / Hilbert-scheme algebra
//! library: every computation is exposed as a subcommand with JSON, LaTeX
//! and plain-text emitters, plus the acceptance runner `verify-all`.

use clap::{Parser, Subcommand, ValueEnum};
use instanton_core::fock::{operator_matrix, BosonExpr};
use instanton_core::instanton::{
    check_contour_identities, contour_field_power, contour_scaling, product_experiment, r1_expr,
    r2_expr, recover_chern, ProductOptions,
};
use instanton_core::jack::{jack_basis_cached, t_eigenvalue_factors};
use instanton_core::partition::Partition;
use instanton_core::rmat::{
    fundamental_r, fundamental_r_at, fusion_r, latex_rat, r_from_stabs, stab_restriction,
    stab_tpn, wedge_r, ybe_check, Chamber, TensorOp,
};
use instanton_core::verify::{run_all, run_check, text_report, VerifyConfig, CHECK_NAMES};
use instanton_core::{Mat, Rat};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "instanton",
    about = "Exact computations for rational R-matrices, Jack polynomials and tautological classes",
    version
)]
struct Cli {
    /// Output format for expressions and matrices.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Jack-basis cache directory (defaults to $INSTANTON_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads for parallel work (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Subcommand)]
enum Command {
    /// Fixed-point (Jack) basis vectors at a degree.
    Jack {
        #[arg(long)]
        degree: u32,
    },
    /// The equivariant first Chern class operator and its degree matrix.
    Lehn {
        #[arg(long, default_value_t = 4)]
        degree: u32,
    },
    /// The rank operator recovered from the T(u) series.
    Rank {
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
    },
    /// The first Chern class recovered from the T(u) series.
    Chern {
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
    },
    /// T(u) eigenvalue of a fixed point.
    TEigen {
        /// Partition as comma-separated parts, e.g. "2,1" ("" for empty).
        #[arg(long)]
        partition: String,
    },
    /// H_n matrix on a degree block.
    HCoeff {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        degree: u32,
    },
    /// Full recovery pipeline for a target operator.
    Recover {
        #[arg(long, value_parser = ["rank", "c1"])]
        target: String,
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
    },
    /// Fundamental gl(N) R-matrix.
    RmatrixFundamental {
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Wedge R-matrix in the stable closed form.
    RmatrixWedge {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
    },
    /// Fusion product and its restriction to the wedge pair.
    Fusion {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long, default_value_t = 4096)]
        budget: u64,
    },
    /// Stable envelope of a T*P^n fixed point, or the restriction matrix.
    Stab {
        #[arg(long)]
        n: usize,
        /// Fixed point index (0-based); omit for the full restriction matrix.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_parser = ["fundamental", "opposite"], default_value = "fundamental")]
        chamber: String,
        /// Also compute R = Stab_opp^-1 Stab_fund.
        #[arg(long, default_value_t = false)]
        rmatrix: bool,
    },
    /// Yang-Baxter check with symbolic spectral parameters.
    Ybe {
        #[arg(long, value_parser = ["fundamental", "wedge"], default_value = "fundamental")]
        rep: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        n1: usize,
        #[arg(long, default_value_t = 1)]
        n2: usize,
    },
    /// Doubled operators R_1, R_2 and their vacuum-block checks.
    Double {
        #[arg(long, value_parser = ["r1", "r2"], default_value = "r1")]
        target: String,
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
    },
    /// Contour-field forms of the log R(u) coefficients.
    Contour {
        #[arg(long, default_value_t = 3)]
        max_degree: u32,
    },
    /// Experimental truncated product over walls.
    ProductCheck {
        #[arg(long, default_value_t = 2)]
        max_degree: u32,
        #[arg(long, default_value_t = 3)]
        walls: i64,
        #[arg(long, default_value_t = true)]
        normalize: bool,
    },
    /// Run the full acceptance suite.
    VerifyAll {
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
        #[arg(long, default_value_t = 3)]
        walls: i64,
        /// Run a single named check instead of all of them.
        #[arg(long)]
        check: Option<String>,
    },
}

fn parse_partition(src: &str) -> Result<Partition, String> {
    let src = src.trim();
    if src.is_empty() || src == "0" || src == "[]" {
        return Ok(Partition::empty());
    }
    let parts: Result<Vec<u32>, _> = src
        .trim_matches(|c| c == '[' || c == ']')
        .split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect();
    let mut parts = parts.map_err(|e| format!("bad partition: {}", e))?;
    parts.sort_unstable_by(|a, b| b.cmp(a));
    if parts.iter().any(|&p| p == 0) {
        return Err("partition parts must be positive".into());
    }
    Ok(Partition::new(parts))
}

fn print_rat(f: &Rat, format: Format) {
    match format {
        Format::Text => println!("{}", f),
        Format::Json => println!("{}", serde_json::to_string(f).unwrap()),
        Format::Latex => println!("{}", latex_rat(f)),
    }
}

fn print_matrix(m: &Mat, format: Format) {
    match format {
        Format::Text => println!("{:?}", m),
        Format::Json => {
            let rows: Vec<Vec<String>> = (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].to_string()).collect())
                .collect();
            println!("{}", serde_json::to_string(&rows).unwrap());
        }
        Format::Latex => {
            let mut s = String::from("\\begin{pmatrix}\n");
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    if j > 0 {
                        s.push_str(" & ");
                    }
                    s.push_str(&latex_rat(&m[(i, j)]));
                }
                s.push_str(" \\\\\n");
            }
            s.push_str("\\end{pmatrix}");
            println!("{}", s);
        }
    }
}

fn print_tensor(op: &TensorOp, format: Format) {
    match format {
        Format::Text => {
            println!("spaces: {:?} <- {:?}", op.spaces_out(), op.spaces_in());
            for (i, j, c) in op.entries() {
                println!("  [{} <- {}] = {}", i, j, c);
            }
        }
        Format::Json => println!("{}", serde_json::to_string(op).unwrap()),
        Format::Latex => println!("{}", op.to_latex()),
    }
}

fn print_expr(e: &BosonExpr, max_part: u32, format: Format) {
    match format {
        Format::Text => {
            for ((cr, an), c) in e.instantiate(max_part) {
                let mut word = String::new();
                for p in cr.parts() {
                    word.push_str(&format!("a[-{}] ", p));
                }
                for p in an.parts() {
                    word.push_str(&format!("a[{}] ", p));
                }
                if word.is_empty() {
                    word = "1".into();
                }
                println!("({}) * {}", c, word.trim_end());
            }
        }
        Format::Json => println!("{}", serde_json::to_string(e).unwrap()),
        Format::Latex => println!("{}", e.to_latex(max_part)),
    }
}

/// Factored display of a T(u) eigenvalue, e.g.
/// `u(u+t2)/((u+t1+t2)(u+t1+2t2))`.
fn factored_t_eigenvalue(lambda: &Partition) -> String {
    let (num, den) = t_eigenvalue_factors(lambda);
    let factor = |a: i64, b: i64| -> String {
        let mut s = String::from("u");
        for (coef, name) in [(a, "t1"), (b, "t2")] {
            match coef {
                0 => {}
                1 => s.push_str(&format!("+{}", name)),
                c => s.push_str(&format!("+{}{}", c, name)),
            }
        }
        if s == "u" {
            s
        } else {
            format!("({})", s)
        }
    };
    if num.is_empty() {
        return "1".to_string();
    }
    let nstr: String = num.iter().map(|&(a, b)| factor(a, b)).collect();
    let dstr: String = den.iter().map(|&(a, b)| factor(a, b)).collect();
    format!("{}/({})", nstr, dstr)
}

fn run(cli: Cli) -> Result<u8, String> {
    let cache_dir = cli
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("INSTANTON_CACHE_DIR").map(PathBuf::from));
    let format = cli.format;
    match cli.command {
        Command::Jack { degree } => {
            if degree > 10 {
                return Err("degree out of budget (max 10)".into());
            }
            let basis =
                jack_basis_cached(degree, cache_dir.as_deref()).map_err(|e| e.to_string())?;
            for lam in basis.partitions.clone() {
                let v = basis.fixed_point(&lam);
                match format {
                    Format::Json => {
                        let terms: Vec<(String, String)> = v
                            .terms()
                            .map(|(p, c)| (format!("{}", p), c.to_string()))
                            .collect();
                        println!(
                            "{}",
                            serde_json::json!({"partition": lam.parts(), "coefficients": terms})
                        );
                    }
                    _ => println!("j{} = {:?}", lam, v),
                }
            }
        }
        Command::Lehn { degree } => {
            if degree > 8 {
                return Err("degree out of budget (max 8)".into());
            }
            let e = instanton_core::fock::lehn_expr();
            print_expr(&e, degree.max(2), format);
            let (m, _) = operator_matrix(&e, degree).map_err(|e| e.to_string())?;
            print_matrix(&m, format);
        }
        Command::Rank { max_degree } => {
            if max_degree > 7 {
                return Err("max-degree out of budget (max 7)".into());
            }
            let rec = recover_chern(max_degree.max(4)).map_err(|e| e.to_string())?;
            print_expr(&rec.rank, max_degree.max(4), format);
        }
        Command::Chern { max_degree } => {
            if max_degree > 7 {
                return Err("max-degree out of budget (max 7)".into());
            }
            let rec = recover_chern(max_degree.max(4)).map_err(|e| e.to_string())?;
            print_expr(&rec.c1, max_degree.max(4), format);
        }
        Command::TEigen { partition } => {
            let lam = parse_partition(&partition)?;
            match format {
                Format::Text => println!("{}", factored_t_eigenvalue(&lam)),
                _ => print_rat(&instanton_core::jack::t_eigenvalue(&lam), format),
            }
        }
        Command::HCoeff { order, degree } => {
            if degree > 7 || order > 6 {
                return Err("order/degree out of budget".into());
            }
            let basis =
                jack_basis_cached(degree, cache_dir.as_deref()).map_err(|e| e.to_string())?;
            let m =
                instanton_core::instanton::h_matrix(order, &basis).map_err(|e| e.to_string())?;
            print_matrix(&m, format);
        }
        Command::Recover { target, max_degree } => {
            if max_degree > 7 {
                return Err("max-degree out of budget (max 7)".into());
            }
            let rec = recover_chern(max_degree.max(4)).map_err(|e| e.to_string())?;
            let e = if target == "rank" { rec.rank } else { rec.c1 };
            print_expr(&e, max_degree.max(4), format);
            for f in rec.findings {
                eprintln!("finding: {}", f);
            }
        }
        Command::RmatrixFundamental { n } => {
            if !(2..=6).contains(&n) {
                return Err("N out of budget (2..=6)".into());
            }
            print_tensor(&fundamental_r(n), format);
        }
        Command::RmatrixWedge { n, n1, n2 } => {
            if n > 6 || n1 > n || n2 > n {
                return Err("wedge parameters out of budget".into());
            }
            print_tensor(&wedge_r(n, n1, n2), format);
        }
        Command::Fusion { n, n1, n2, budget } => {
            if budget > 16384 {
                return Err("budget too large (max 16384)".into());
            }
            let f = fusion_r(n, n1, n2, budget).map_err(|e| e.to_string())?;
            println!("factors (slot_a, slot_b, shift): {:?}", f.factors);
            println!("wedge invariant: {}", f.wedge_invariant);
            println!(
                "normalization: scalar {}, spectral offset {} hbar",
                f.scalar, f.shift
            );
            print_tensor(&f.normalized, format);
            let matches = f.normalized == wedge_r(n, n1, n2);
            println!("matches the closed form: {}", matches);
            if !matches {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
        Command::Stab { n, k, chamber, rmatrix } => {
            if n > 5 {
                return Err("n out of budget (max 5: u1..u6)".into());
            }
            let ch = if chamber == "fundamental" {
                Chamber::Fundamental
            } else {
                Chamber::Opposite
            };
            match k {
                Some(k) => {
                    if k > n {
                        return Err("fixed point index out of range".into());
                    }
                    let p = stab_tpn(n, k, ch);
                    match format {
                        Format::Json => {
                            println!("{}", serde_json::to_string(&Rat::from_poly(p)).unwrap())
                        }
                        _ => println!("{}", p),
                    }
                }
                None => {
                    let m = stab_restriction(n, ch).map_err(|e| e.to_string())?;
                    print_matrix(&m, format);
                }
            }
            if rmatrix {
                let r = r_from_stabs(n).map_err(|e| e.to_string())?;
                print_matrix(&r, format);
            }
        }
        Command::Ybe { rep, n, n1, n2 } => {
            if n > 4 {
                return Err("N out of budget (max 4)".into());
            }
            let (ok, residual) = if rep == "fundamental" {
                ybe_check(&|z| fundamental_r_at(n, z), n)
            } else {
                let d1 = instanton_core::rmat::WedgeSubspace::new(n, n1).dim();
                let d2 = instanton_core::rmat::WedgeSubspace::new(n, n2).dim();
                if d1 != d2 {
                    return Err("wedge YBE here requires equal wedge dimensions".into());
                }
                let res = instanton_core::rmat::ybe_residual(
                    [d1, d1, d1],
                    &|z| instanton_core::rmat::wedge_r_at(n, n1, n2, z),
                    &|z| instanton_core::rmat::wedge_r_at(n, n1, n2, z),
                    &|z| instanton_core::rmat::wedge_r_at(n, n1, n2, z),
                );
                (res.is_zero(), res)
            };
            println!(
                "ybe: {} (residual entries: {})",
                if ok { "ok" } else { "violated" },
                residual.num_entries()
            );
            if !ok {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
        Command::Double { target, max_degree } => {
            if max_degree > 5 {
                return Err("max-degree out of budget (max 5)".into());
            }
            let e = if target == "r1" { r1_expr() } else { r2_expr() };
            print_expr(&e.base, max_degree.max(2), format);
            let h = if target == "r1" {
                instanton_core::instanton::h1_expr()
            } else {
                instanton_core::instanton::h2_expr()
            };
            let mut ok = true;
            for d in 0..=max_degree {
                let (hm, _) = operator_matrix(&h, d).map_err(|e| e.to_string())?;
                ok &= e.vacuum_block(d) == hm;
            }
            println!("vacuum block equals the undoubled operator: {}", ok);
            if !ok {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
        Command::Contour { max_degree } => {
            if max_degree > 5 {
                return Err("max-degree out of budget (max 5)".into());
            }
            let s = contour_scaling();
            println!(
                "field scaling: a[-n] = ({}) a-[-n], a[n] = a-[n]",
                s.creation_scale
            );
            println!(
                "printed scaling: a[-n] = ({}) a-[-n]",
                s.printed_creation_scale
            );
            println!("contour(A^2):");
            print_expr(&contour_field_power(2).base, 4, format);
            println!("contour(A^3):");
            print_expr(&contour_field_power(3).base, 4, format);
            let check = check_contour_identities(max_degree);
            println!("R1 = ({}) contour(A^2): {}", s.kappa2, check.r1_identity);
            println!(
                "R2 = ({}) contour(A^3) + R1^2/2: {}",
                s.kappa3, check.r2_identity
            );
            println!(
                "printed constants ({}, {}) fail: {}",
                s.printed_kappa2, s.printed_kappa3, check.printed_constants_fail
            );
            if !check.r1_identity || !check.r2_identity {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
        Command::ProductCheck { max_degree, walls, normalize } => {
            if max_degree > 3 || walls > 5 {
                return Err("product parameters out of budget".into());
            }
            let report = product_experiment(
                max_degree,
                walls,
                ProductOptions {
                    descending: true,
                    normalize_vacuum: normalize,
                },
            )
            .map_err(|e| e.to_string())?;
            println!("stabilized: {}", report.stabilized);
            println!("vacuum entry: {}", report.vacuum_entry);
            println!("u^-1 matches doubled H1: {}", report.matches_r1);
            println!("u^-2 matches doubled H2: {}", report.matches_r2);
            for n in &report.notes {
                println!("finding: {}", n);
            }
        }
        Command::VerifyAll { max_degree, walls, check } => {
            if max_degree > 7 || walls > 5 {
                return Err("verify-all parameters out of budget".into());
            }
            let cfg = VerifyConfig {
                max_degree,
                cache_dir,
                product_walls: walls,
            };
            let results = match check {
                Some(name) => {
                    let r = run_check(&name, &cfg).ok_or_else(|| {
                        format!("unknown check '{}'; known: {:?}", name, CHECK_NAMES)
                    })?;
                    vec![r]
                }
                None => run_all(&cfg),
            };
            match format {
                Format::Json => {
                    let report = serde_json::json!({
                        "version": env!("CARGO_PKG_VERSION"),
                        "config": {
                            "max_degree": cfg.max_degree,
                            "product_walls": cfg.product_walls,
                        },
                        "results": results.iter().map(|r| serde_json::json!({
                            "check": r.name,
                            "status": r.status,
                            "residual": r.residual,
                            "findings": r.findings,
                            "runtime_ms": r.runtime_ms,
                        })).collect::<Vec<_>>(),
                    });
                    println!("{}", serde_json::to_string_pretty(&report).unwrap());
                }
                _ => print!("{}", text_report(&results)),
            }
            if results.iter().any(|r| !r.passed()) {
                let first = results.iter().find(|r| !r.passed()).unwrap();
                eprintln!("failed: {} ({})", first.name, first.residual);
                return Ok(EXIT_CHECK_FAILED);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    match run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("usage error: {}", msg);
            ExitCode::from(EXIT_USAGE)
        }
    }
}
