use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wignerkit::grassmann::CliqueKind;
use wignerkit::tolerance::Tolerance;

/// Geometry of rays and subspaces of C^n: principal angles, Grassmann graph
/// checks, reconstruction of orthogonality preserving maps, and two-valued
/// measure search. Every command writes a JSON report.
#[derive(Clone, Debug, Parser)]
#[command(name = "wignerkit", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Relative singular-value cutoff for numerical rank.
    #[arg(long, global = true, default_value_t = Tolerance::default().eps_rank)]
    pub tol_rank: f64,

    /// Threshold for orthogonality and commutator tests.
    #[arg(long, global = true, default_value_t = Tolerance::default().eps_orth)]
    pub tol_orth: f64,

    /// Projection distance below which rays and subspaces are equal.
    #[arg(long, global = true, default_value_t = Tolerance::default().eps_eq)]
    pub tol_eq: f64,

    /// Principal angles at or below this many radians count as zero.
    #[arg(long, global = true, default_value_t = Tolerance::default().eps_angle)]
    pub tol_angle: f64,

    #[arg(long, global = true, env = "WIGNERKIT_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Probe subspaces per star in `descend`.
    #[arg(long, global = true, default_value_t = wignerkit::reconstruct::DEFAULT_PROBES)]
    pub probes: usize,

    /// Sample count for randomized checks; each command has its own default.
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn tolerance(&self) -> Tolerance {
        Tolerance {
            eps_rank: self.tol_rank,
            eps_orth: self.tol_orth,
            eps_eq: self.tol_eq,
            eps_angle: self.tol_angle,
            ..Tolerance::default()
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct SubspacePair {
    /// Matrix file whose columns span X.
    #[arg(long)]
    pub x: PathBuf,
    /// Matrix file whose columns span Y.
    #[arg(long)]
    pub y: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Star,
    Top,
}

impl From<KindArg> for CliqueKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Star => CliqueKind::Star,
            KindArg::Top => CliqueKind::Top,
        }
    }
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Principal angles between X and Y.
    Angles(SubspacePair),
    /// Grassmann graph distance, intersection and sum dimensions.
    Distance(SubspacePair),
    /// A shortest adjacent path from X to Y.
    Geodesic(SubspacePair),
    /// Compatibility, adjacency and orthogonality of X and Y.
    Compat(SubspacePair),
    /// Maximal compatible subset of the star or top around an anchor.
    Clique {
        #[arg(long)]
        anchor: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
    /// Whether a tabulated ray map preserves orthogonality.
    CheckOp {
        #[arg(long)]
        table: PathBuf,
    },
    /// Lineation and non-degeneracy of a tabulated ray map.
    CheckLineation {
        #[arg(long)]
        table: PathBuf,
        /// Line file; lines through three or more tabulated rays are used when absent.
        #[arg(long)]
        lines: Option<PathBuf>,
    },
    /// Recover the isometry behind a tabulated ray map.
    Reconstruct {
        #[arg(long)]
        table: PathBuf,
    },
    /// Descend a Grassmann map given by its generator down to rays and reconstruct it.
    Descend {
        #[arg(long)]
        generator: PathBuf,
    },
    /// Search for a two-valued measure on a ray hypergraph.
    KsSearch {
        #[arg(long)]
        rays: PathBuf,
    },
    /// Run the full property battery.
    VerifySuite {
        /// Comma-separated `NxK` shapes with 2 <= k and 2k < n.
        #[arg(long, default_value = "5x2,7x3")]
        dims: String,
        /// Corrupt the reconstruction fixture; exactly that anchor should fail.
        #[arg(long)]
        inject_fault: bool,
    },
}

impl Command {
    pub fn verb(&self) -> &'static str {
        match self {
            Command::Angles(_) => "angles",
            Command::Distance(_) => "distance",
            Command::Geodesic(_) => "geodesic",
            Command::Compat(_) => "compat",
            Command::Clique { .. } => "clique",
            Command::CheckOp { .. } => "check-op",
            Command::CheckLineation { .. } => "check-lineation",
            Command::Reconstruct { .. } => "reconstruct",
            Command::Descend { .. } => "descend",
            Command::KsSearch { .. } => "ks-search",
            Command::VerifySuite { .. } => "verify-suite",
        }
    }
}
