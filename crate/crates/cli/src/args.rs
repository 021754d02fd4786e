use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use foliakit::numeric::NumericConfig;

#[derive(Parser, Debug)]
#[command(name = "foliakit", version, about = "Pull-back foliations on projective space: build, verify, deform")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Residual tolerance for Newton solves.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub rank_tol: Option<f64>,
    #[arg(long, global = true)]
    pub hyperbolic_tol: Option<f64>,
    #[arg(long, global = true)]
    pub nilpotency_tol: Option<f64>,
    #[arg(long, global = true)]
    pub vanishing_tol: Option<f64>,
    #[arg(long, global = true)]
    pub dedup_radius: Option<f64>,
    /// Multistart Newton starts per expected solution.
    #[arg(long, global = true)]
    pub starts: Option<usize>,
    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
}

impl Global {
    pub fn config(&self) -> NumericConfig {
        let mut c = NumericConfig { seed: self.seed, ..NumericConfig::default() };
        if let Some(v) = self.tol {
            c.residual_tol = v;
        }
        if let Some(v) = self.rank_tol {
            c.rank_tol = v;
        }
        if let Some(v) = self.hyperbolic_tol {
            c.hyperbolic_tol = v;
        }
        if let Some(v) = self.nilpotency_tol {
            c.nilpotency_tol = v;
        }
        if let Some(v) = self.vanishing_tol {
            c.vanishing_tol = v;
        }
        if let Some(v) = self.dedup_radius {
            c.dedup_radius = v;
        }
        if let Some(v) = self.starts {
            c.starts_per_expected = v;
        }
        c
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Construct a field, form, map or pull-back.
    #[command(subcommand)]
    Build(Build),
    /// Run a verification pipeline and emit an audit report.
    #[command(subcommand)]
    Verify(Verify),
    /// Continue the indeterminacy points of a pull-back under a perturbation.
    Deform(DeformArgs),
    /// Graded spaces of fields, kernel test and resonances for a weight vector.
    Sigma(SigmaArgs),
    /// Solve for singular or indeterminacy points.
    #[command(subcommand)]
    Solve(Solve),
}

#[derive(Subcommand, Debug)]
pub enum Build {
    /// The cyclic field with component i equal to x_{i+1}^d.
    Jouanolou {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
    },
    /// The (n-2)-form of the one-dimensional foliation of a field.
    Omega {
        #[arg(long)]
        field: PathBuf,
    },
    /// The pull-back of a one-dimensional foliation by a rational map.
    Pullback {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        fol: PathBuf,
    },
    /// A built-in rational map family.
    Map {
        /// F_i = z_i^nu - c_i z_n^nu.
        #[arg(long, conflicts_with = "linear_projection")]
        diagonal_difference: bool,
        /// (z_0 : ... : z_{n-1}).
        #[arg(long)]
        linear_projection: bool,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        nu: u32,
        /// Comma-separated rationals c_i; all ones when omitted.
        #[arg(long, value_delimiter = ',')]
        coefficients: Option<Vec<String>>,
    },
}

#[derive(Subcommand, Debug)]
pub enum Verify {
    /// Radial contraction, homogeneity, decomposability, integrability, degree.
    Foliation {
        #[arg(long)]
        input: PathBuf,
    },
    /// Coprimality, indeterminacy count and transversality.
    GenericMap {
        #[arg(long)]
        map: PathBuf,
    },
    /// The generic-map checks plus: no singularity of the target foliation is a critical value.
    GenericPair {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        fol: PathBuf,
    },
    /// Local structure at indeterminacy points, along fibers and at the target singularities.
    StabilityHypotheses {
        #[arg(long)]
        input: PathBuf,
        /// Degree bound for the invariant hypersurface scan.
        #[arg(long, default_value_t = 1)]
        p4_degree: u32,
        /// Points sampled on the fiber over a singularity of the target foliation.
        #[arg(long, default_value_t = 10)]
        fiber_points: usize,
    },
}

#[derive(Args, Debug)]
pub struct DeformArgs {
    /// Pull-back bundle with provenance.
    #[arg(long)]
    pub foliation: PathBuf,
    /// A rational map g (for f + t g) or a vector field H (for X + t H).
    #[arg(long)]
    pub perturb: PathBuf,
    /// Either start:stop:step or a comma-separated list; empty for no steps.
    #[arg(long, default_value = "0:0.05:0.01")]
    pub t_grid: String,
}

#[derive(Args, Debug)]
pub struct SigmaArgs {
    /// Comma-separated positive weights.
    #[arg(long, value_delimiter = ',', required = true)]
    pub weights: Vec<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub level: Option<i64>,
    /// A field whose kernel test to run; its level is read off when --level is absent.
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Bound on the monomial degree for non-uniform weights.
    #[arg(long, default_value_t = 8)]
    pub degree_cap: usize,
}

#[derive(Subcommand, Debug)]
pub enum Solve {
    /// Singular points of a one-dimensional foliation, classified.
    Singularities {
        #[arg(long)]
        fol: PathBuf,
    },
    /// Indeterminacy points of a rational map with transversality data.
    Indeterminacy {
        #[arg(long)]
        map: PathBuf,
    },
}
