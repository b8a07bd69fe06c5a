//! Command-line front end: generate, factor, verify, and benchmark
//! skew-symmetric LTL^T factorizations.
//!
//! Exit codes: 0 success, 2 usage error, 3 zero pivot, 4 I/O or parse
//! error, 5 verification residual above threshold.

use clap::{Parser, Subcommand, ValueEnum};
use skewfactor::*;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "skewfactor",
    version,
    about = "LTL^T factorization of dense skew-symmetric matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    #[value(name = "unb-right")]
    UnbRight,
    #[value(name = "unb-left")]
    UnbLeft,
    #[value(name = "unb-wimmer")]
    UnbWimmer,
    #[value(name = "blk-right")]
    BlkRight,
    #[value(name = "blk-left")]
    BlkLeft,
    #[value(name = "blk-2b")]
    Blk2b,
    #[value(name = "blk-wimmer")]
    BlkWimmer,
    #[value(name = "piv-unb-right")]
    PivUnbRight,
    #[value(name = "piv-unb-left")]
    PivUnbLeft,
    #[value(name = "piv-blk-right")]
    PivBlkRight,
}

impl From<Algo> for Variant {
    fn from(a: Algo) -> Variant {
        match a {
            Algo::UnbRight => Variant::UnbRight,
            Algo::UnbLeft => Variant::UnbLeft,
            Algo::UnbWimmer => Variant::UnbWimmer,
            Algo::BlkRight => Variant::BlkRight,
            Algo::BlkLeft => Variant::BlkLeft,
            Algo::Blk2b => Variant::Blk2b,
            Algo::BlkWimmer => Variant::BlkWimmer,
            Algo::PivUnbRight => Variant::PivUnbRight,
            Algo::PivUnbLeft => Variant::PivUnbLeft,
            Algo::PivBlkRight => Variant::PivBlkRight,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WModeArg {
    During,
    After,
}

#[derive(Clone, Copy, ValueEnum)]
enum UpdateModeArg {
    Sandwiched,
    #[value(name = "wimmer-w")]
    WimmerW,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random skew-symmetric matrix in Matrix Market form.
    Gen {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Factor a matrix and write the factors.
    Factor {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        algo: Algo,
        /// Block size for the blocked drivers.
        #[arg(long, default_value_t = 64)]
        block: usize,
        /// W accumulation mode of blk-wimmer.
        #[arg(long = "w-mode", value_enum, default_value = "after")]
        w_mode: WModeArg,
        /// Trailing-update mode of piv-blk-right.
        #[arg(long = "update-mode", value_enum, default_value = "sandwiched")]
        update_mode: UpdateModeArg,
        #[arg(long = "out-l")]
        out_l: PathBuf,
        #[arg(long = "out-t")]
        out_t: PathBuf,
        #[arg(long = "out-p")]
        out_p: Option<PathBuf>,
    },
    /// Recompute the residual and structural audit of stored factors.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        l: PathBuf,
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        p: Option<PathBuf>,
    },
    /// Time repeated factorizations and write a CSV.
    Bench {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long, default_value_t = 64)]
        block: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        reps: usize,
        #[arg(long)]
        csv: PathBuf,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ZeroPivot { .. } | Error::ZeroLeadingColumn => 3,
        _ => 4,
    }
}

fn run(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Gen { m, seed, out } => {
            let x = random_skew(m, seed);
            mm::write_matrix_market(&x, &out)?;
            Ok(0)
        }
        Command::Factor {
            input,
            algo,
            block,
            w_mode,
            update_mode,
            out_l,
            out_t,
            out_p,
        } => {
            let x = mm::read_matrix_market(&input)?;
            let cfg = BlockConfig::new(block.max(1)).with_w_mode(match w_mode {
                WModeArg::During => WMode::DuringPanel,
                WModeArg::After => WMode::AfterPanel,
            });
            let um = match update_mode {
                UpdateModeArg::Sandwiched => UpdateMode::Sandwiched,
                UpdateModeArg::WimmerW => UpdateMode::WimmerW,
            };
            let f = factor(&x, algo.into(), &cfg, um)?;
            mm::write_l(&f.l, &out_l)?;
            mm::write_t(&f.t, &out_t)?;
            if let (Some(path), Some(p)) = (out_p, &f.p) {
                mm::write_pivots(p, &path)?;
            }
            Ok(0)
        }
        Command::Verify { input, l, t, p } => {
            let x = mm::read_matrix_market(&input)?;
            let m = x.order();
            let lf = mm::read_l(&l)?;
            let tf = mm::read_t(&t)?;
            if lf.order() != m || tf.order() != m {
                return Err(Error::DimensionMismatch(
                    "factor orders do not match the matrix",
                ));
            }
            let pf = match p {
                Some(path) => Some(mm::read_pivots(&path, m)?),
                None => None,
            };
            let pivoted = pf.is_some();
            let fact = Factorization {
                l: lf,
                t: tf,
                p: pf,
                flops: 0,
                variant: if pivoted {
                    Variant::PivUnbRight
                } else {
                    Variant::UnbRight
                },
                first_col_mode: FirstColMode::CanonicalE0,
                trailing_write_passes: 0,
            };
            let r = residual(&x, &fact);
            let audit = audit_structure(&fact);
            let report = serde_json::json!({
                "residual": r,
                "unit_diag": audit.unit_diag,
                "tridiagonal": audit.tridiagonal,
                "bounded_l": audit.bounded_l,
                "pivots_valid": audit.pivots_valid,
            });
            println!("{report}");
            let thresh = 100.0 * m as f64 * f64::EPSILON;
            if r > thresh || !audit.all_pass() {
                Ok(5)
            } else {
                Ok(0)
            }
        }
        Command::Bench {
            m,
            algo,
            block,
            seed,
            reps,
            csv,
        } => {
            let x = random_skew(m, seed);
            let cfg = BlockConfig::new(block.max(1));
            let variant: Variant = algo.into();
            let workers: usize = std::env::var("SKEWFACTOR_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
                .unwrap_or(1)
                .max(1);
            let mut rows: Vec<(usize, f64, u64)> = Vec::with_capacity(reps);
            std::thread::scope(|scope| {
                let mut handles = Vec::new();
                for w in 0..workers {
                    let xref = &x;
                    let cfgref = &cfg;
                    handles.push(scope.spawn(move || {
                        let mut local = Vec::new();
                        let mut rep = w;
                        while rep < reps {
                            let copy = xref.clone();
                            let t0 = Instant::now();
                            let f = factor(&copy, variant, cfgref, UpdateMode::Sandwiched)
                                .expect("benchmark factorization failed");
                            let secs = t0.elapsed().as_secs_f64();
                            local.push((rep, secs, f.flops));
                            rep += workers;
                        }
                        local
                    }));
                }
                for h in handles {
                    rows.extend(h.join().expect("bench worker panicked"));
                }
            });
            rows.sort_by_key(|r| r.0);
            let mut out = String::from("rep,m,algo,block,seconds,flops,flops_per_m3\n");
            let m3 = (m as f64).powi(3);
            for (rep, secs, flops) in rows {
                out.push_str(&format!(
                    "{rep},{m},{},{},{secs},{flops},{}\n",
                    variant.as_str(),
                    block,
                    flops as f64 / m3
                ));
            }
            std::fs::write(&csv, out).map_err(Error::from)?;
            Ok(0)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}
