mod cache;
mod commands;
mod output;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0, global = true)]
    pub workers: usize,
    /// Write records here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Census cache directory (overrides HCFL_CACHE_DIR).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Largest Jacobian order to enumerate.
    #[arg(long, default_value_t = hcfl_core::jacobian::DEFAULT_GROUP_CAP, global = true)]
    pub group_cap: u64,
    /// Largest finite field to construct.
    #[arg(long, default_value_t = hcfl_core::field::DEFAULT_FIELD_CAP, global = true)]
    pub field_cap: u64,
    /// Group law: riemann-roch or cantor.
    #[arg(long, default_value = "riemann-roch", global = true)]
    pub law: String,
    /// L-series method: divisor-sum or euler-product.
    #[arg(long, default_value = "divisor-sum", global = true)]
    pub method: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Zeta numerator of C over F_{q^n}.
    Zeta {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Counts of effective divisors per class and degree.
    Census {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Defaults to 2g - 2.
        #[arg(long)]
        max_degree: Option<u32>,
    },
    /// L-functions of characters of J_C(F_{q^n}).
    Lfun {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, conflicts_with = "character")]
        all_chars: bool,
        /// Exponents of one character, comma separated.
        #[arg(long, value_delimiter = ',')]
        character: Option<Vec<u64>>,
        /// Also emit the product over the whole character table.
        #[arg(long)]
        product: bool,
    },
    /// Recover the classes of the rational points from L-data.
    Recover {
        #[arg(long, required_unless_present = "bundle")]
        curve: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Recover from a bundle file alone.
        #[arg(long, conflicts_with = "curve")]
        bundle: Option<PathBuf>,
        /// Write the bundle built from the curve.
        #[arg(long)]
        bundle_out: Option<PathBuf>,
        /// Keep only the coefficients of t^0 and t^1.
        #[arg(long)]
        degree_one_only: bool,
    },
    /// Compare L-data of two curves under supplied isomorphisms ψ_n.
    CrossCheck {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        other: PathBuf,
        /// Map file with D1, D1' and generator images per level.
        #[arg(long, required_unless_present = "all_maps")]
        map: Option<PathBuf>,
        /// Try every compatible family of isomorphisms (default D1 on both curves).
        #[arg(long, conflicts_with = "map")]
        all_maps: bool,
        #[arg(long, default_value_t = 2)]
        n_max: u32,
    },
    /// Frobenius twist by p^m and the induced class maps.
    Twist {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 2)]
        n_max: u32,
        #[arg(long)]
        curve_out: Option<PathBuf>,
        #[arg(long)]
        map_out: Option<PathBuf>,
        /// Run the comparison on the result.
        #[arg(long)]
        check: bool,
    },
    /// Genus-2 curves over F_3 with forced L-data at n = 1.
    SearchExample {
        /// Write one curve file per survivor into this directory.
        #[arg(long)]
        curves_dir: Option<PathBuf>,
    },
    /// Whether two genus-2 models are isomorphic over the base field.
    Isom {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
    /// Change of variable between levels and the splitting of places.
    ArtinCheck {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Defaults to 2g + 2.
        #[arg(long)]
        trunc: Option<u32>,
        /// Largest place degree for the splitting law.
        #[arg(long, default_value_t = 6)]
        split_degree: u32,
    },
}

/// Class groups, L-functions and point recovery for hyperelliptic curves over finite fields.
#[derive(Parser, Debug)]
#[command(name = "hcfl", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(i) => i,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli.common, cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code_of(&e))
        }
    }
}
