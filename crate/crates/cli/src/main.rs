//! `jetg`: run jet, groupoid, algebroid, flow and linear-operator
//! computations on JSON artifacts, and the randomized verification suites.

mod commands;
mod io;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "jetg", version, about = "Jet groupoids, Lie algebroids and their flows")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// RK4 step size.
    #[arg(long, global = true, env = "JETG_STEP")]
    pub step: Option<f64>,
    /// Tolerance for group-law defects.
    #[arg(long, global = true, env = "JETG_TOL")]
    pub tol: Option<f64>,
    /// Jet order (taylor) or projection order (project).
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Number of objects for generated groupoids.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Truncated jets and the jet groupoid.
    #[command(subcommand)]
    Jet(JetCmd),
    /// Finite groupoids, subgroupoids and quotients.
    #[command(subcommand)]
    Groupoid(GroupoidCmd),
    /// Brackets of algebroid sections.
    #[command(subcommand)]
    Algebroid(AlgebroidCmd),
    /// Flows and exponentials.
    #[command(subcommand)]
    Flow(FlowCmd),
    /// First-order linear differential operators.
    #[command(subcommand)]
    Linop(LinopCmd),
    /// Randomized property suites.
    Verify {
        /// One of jets, quotients, brackets, group-law, bch, projection,
        /// linear, closed-form, group-jets, all.
        suite: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum JetCmd {
    /// k-jet of a polynomial map (a vector field document) at a point.
    Taylor {
        map: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Composite `outer ∘ inner`.
    Compose { outer: String, inner: String },
    /// Inverse jet.
    Invert { jet: String },
    /// Projection to order `--k`.
    Project { jet: String },
}

#[derive(Subcommand, Debug)]
pub enum GroupoidCmd {
    /// Report every axiom violation.
    Check { table: String },
    /// Coset blocks of a wide subgroupoid.
    Cosets { table: String, sigma: String },
    /// Normality test with a witness.
    Normal { table: String, sigma: String },
    /// Quotient by a normal subgroupoid.
    Quotient { table: String, sigma: String },
    /// Components, transitivity and isotropy.
    Components { table: String },
    /// The trivial groupoid `M × H × M` with `|M| = --dim`.
    Trivial {
        #[arg(long, value_parser = ["z4", "klein", "s3", "d4"])]
        group: String,
    },
    /// The pair groupoid on `--dim` objects.
    Pair,
}

#[derive(Subcommand, Debug)]
pub enum AlgebroidCmd {
    /// Bracket of two sections of the same kind.
    Bracket { a: String, b: String },
    /// Anchor of a section.
    Anchor { a: String },
    /// `ad Ξ (Σ)` for trivial sections.
    Ad { xi: String, sigma: String },
    /// Lie derivative of a group-jet section along a jet section.
    LieDerivative { xi: String, lambda: String },
}

#[derive(Subcommand, Debug)]
pub enum FlowCmd {
    /// Flow of a vector field.
    Field {
        theta: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// `Exp tΞ(x)` for a trivial or jet section.
    Exp {
        xi: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Samples of `Exp sΞ(x)` for `s` from 0 to `t`.
    Path {
        xi: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, default_value_t = 11)]
        samples: usize,
        #[arg(long)]
        csv: bool,
    },
    /// `|Exp(t+u)Ξ − Exp tΞ·Exp uΞ|`.
    GroupLaw {
        xi: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
    },
    /// Campbell-Hausdorff defects and log-log slopes.
    Bch {
        a: String,
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum LinopCmd {
    /// `δ(s)`.
    Apply { op: String, section: String },
    /// `[δ, δ′]`.
    Commutator { a: String, b: String },
    /// Pullback of `s` along `Exp tΞ` at a point.
    Flow {
        op: String,
        section: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// The algebroid section of an operator.
    Section { op: String },
    /// The operator of an algebroid section.
    Operator { section: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jetg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
