//! Flags and subcommands.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "holosup", version, about = "Cusp form numerics and sup-norm bound verifiers")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by every subcommand. Each one overrides the matching
/// key of the configuration file.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Configuration file (flat TOML with dotted keys).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads; overrides HOLOSUP_WORKERS and the `workers` key.
    #[arg(long, global = true, env = "HOLOSUP_WORKERS")]
    pub workers: Option<usize>,
    /// Subgroup: full, gamma0:N, gamma1:N or gamma:N.
    #[arg(long, global = true)]
    pub group: Option<String>,
    /// Multiplier system: trivial:k=K, eta:r=R, theta or custom:k=..,s=..,u=...
    #[arg(long, global = true)]
    pub multiplier: Option<String>,
    /// Weight of the trivial system used when no multiplier is given.
    #[arg(long, global = true)]
    pub weight: Option<f64>,
    /// Largest modulus summed in Kloosterman-type series.
    #[arg(long, global = true)]
    pub c_max: Option<i64>,
    #[arg(long, global = true)]
    pub kernel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub quad_tol: Option<f64>,
    #[arg(long, global = true)]
    pub basis_tol: Option<f64>,
    /// Grid points per unit length.
    #[arg(long, global = true)]
    pub grid_density: Option<usize>,
    /// Weights to scan, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub k_list: Option<Vec<u32>>,
    /// Fourier coefficients kept per form.
    #[arg(long, global = true)]
    pub coeffs: Option<usize>,
    #[arg(long, global = true)]
    pub refinements: Option<usize>,
    /// Sample size of the lemma checks.
    #[arg(long, global = true)]
    pub lemma_count: Option<usize>,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Write scan rows as CSV here.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

impl GlobalArgs {
    /// The flag values as a configuration layer.
    pub fn as_config(&self) -> RunConfig {
        RunConfig {
            group: self.group.clone(),
            multiplier: self.multiplier.clone(),
            weight: self.weight,
            c_max: self.c_max,
            kernel_tol: self.kernel_tol,
            quad_tol: self.quad_tol,
            basis_tol: self.basis_tol,
            grid_density: self.grid_density,
            k_list: self.k_list.clone(),
            coeffs: self.coeffs,
            refinements: self.refinements,
            lemma_count: self.lemma_count,
            json: self.json.clone(),
            csv: self.csv.clone(),
            workers: self.workers,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bessel functions of real order.
    #[command(subcommand)]
    Bessel(BesselCmd),
    /// Generalized Kloosterman sum S_tau(r, m; c).
    Kloosterman {
        /// Scaling matrix a,b,c,d (default identity).
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long)]
        c: i64,
    },
    /// Fourier coefficient r of the Poincare series of index m.
    PoincareCoeff {
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
    },
    /// Sum of |a_j(m)|^2 over an orthonormal basis at the cusp tau^{-1} inf.
    CoeffSquareSum {
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
    },
    /// Bergman kernel evaluations.
    #[command(subcommand)]
    Bergman(BergmanCmd),
    /// Cusp form construction and norms.
    #[command(subcommand)]
    Forms(FormsCmd),
    /// Scaling scans in the weight.
    #[command(subcommand)]
    Scan(ScanCmd),
    /// Explicit inequality checks.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Verification suites.
    #[command(subcommand)]
    Suite(SuiteCmd),
}

#[derive(Debug, Subcommand)]
pub enum BesselCmd {
    /// Evaluate one of J, Y, I, K.
    Eval {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        order: f64,
        #[arg(long)]
        x: f64,
    },
    /// Certify the regime bounds of J on a grid of orders.
    Certify {
        /// Orders, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        rho: Vec<f64>,
        /// Samples per regime and order.
        #[arg(long)]
        points: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BergmanCmd {
    /// sum_j |(f_j|tau)(z)|^2 from the kernel.
    Diag {
        /// Point x,y in the upper half-plane.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
    },
    /// Reproducing identity for a form at w.
    Reproduce {
        #[arg(long)]
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum FormsCmd {
    /// Print a form record, or an orthonormal basis with --basis.
    Build {
        /// delta, eta:p=P, etapow:r=R or monomial:a=A,b=B,c=C.
        #[arg(long, required_unless_present = "basis")]
        form: Option<String>,
        /// Orthonormal basis of S_k(SL2(Z)) for the configured weight.
        #[arg(long, conflicts_with = "form")]
        basis: bool,
    },
    /// Petersson norm of a form given by descriptor or record file.
    Norm {
        #[arg(long, required_unless_present = "form_file")]
        form: Option<String>,
        #[arg(long, conflicts_with = "form")]
        form_file: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScanCmd {
    /// Sup of the basis sum against k^{3/2} on the full modular group.
    Theorem3,
    /// Pointwise sup-norm bounds for one form.
    Theorem12 {
        #[arg(long)]
        form: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum CheckCmd {
    /// Bounds for the sums S(alpha, beta, eta) and the exponential decay lemma.
    Lemmas,
    /// Four-region envelope of the coefficient square sums.
    Regions,
}

#[derive(Debug, Subcommand)]
pub enum SuiteCmd {
    /// Every verification suite, summarized.
    All,
}
