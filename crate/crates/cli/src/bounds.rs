//! The `bounds` subcommand: thin wrappers over `mcb_core::bounds`.

use clap::Subcommand;
use mcb_core::bounds::{self as b, DmcBoundInputs};

use crate::parse_count;

#[derive(Subcommand, Debug)]
pub enum BoundsCmd {
    /// Learning length for a static game.
    T0Static {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Learning length when players may come and go over `T` rounds.
    T0Dynamic {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long = "T", value_parser = parse_count)]
        horizon: u64,
    },
    /// Exploration rounds for a correct player count with confidence delta.
    T0Estimation {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: f64,
    },
    /// Epoch length for `x` enter or leave events.
    T1 {
        #[arg(long = "T", value_parser = parse_count)]
        horizon: u64,
        #[arg(long, value_parser = parse_count)]
        t0: u64,
        #[arg(long)]
        tf: f64,
        #[arg(long, value_parser = parse_count)]
        x: u64,
    },
    /// Static MC regret bound.
    McRegret {
        #[arg(long, value_parser = parse_count)]
        t0: u64,
        #[arg(long, value_parser = parse_count)]
        n: u64,
    },
    /// DMC regret bound, term by term.
    DmcRegret {
        #[arg(long = "T", value_parser = parse_count)]
        horizon: u64,
        #[arg(long, value_parser = parse_count)]
        t1: u64,
        #[arg(long, value_parser = parse_count)]
        t0: u64,
        #[arg(long)]
        tf: f64,
        /// Largest number of simultaneous players.
        #[arg(long, value_parser = parse_count)]
        nm: u64,
        #[arg(long, value_parser = parse_count, default_value = "0")]
        entered: u64,
        #[arg(long, value_parser = parse_count, default_value = "0")]
        left: u64,
    },
    /// MEGA and DMC regret exponents under churn every `T^lambda` rounds.
    Exponents {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 2.0 / 3.0)]
        beta: f64,
    },
    /// Chance a player collides when `n` players pick uniformly among `k`
    /// arms, or the player count matching a collision rate `p`.
    CollisionProb {
        #[arg(long)]
        k: usize,
        #[arg(long, required_unless_present = "p", conflicts_with = "p")]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Expected Musical Chairs fixing time and regret for `n` players.
    Fixing {
        #[arg(long)]
        n: f64,
    },
    /// Range of `f` for the two-player MEGA failure scenario.
    FBand {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        k: usize,
        #[arg(long = "T", value_parser = parse_count)]
        horizon: u64,
    },
}

fn terms(t: b::T0Terms) {
    println!("observations {:.2}", t.observations);
    println!("ranking {:.2}", t.ranking);
    println!("estimation {:.2}", t.estimation);
    println!("T0 {}", t.rounds());
}

pub fn print(cmd: BoundsCmd) -> anyhow::Result<()> {
    match cmd {
        BoundsCmd::T0Static { k, eps, delta } => terms(b::t0_static_terms(k, eps, delta)?),
        BoundsCmd::T0Dynamic { k, eps, delta, horizon } => terms(b::t0_dynamic_terms(k, eps, delta, horizon)?),
        BoundsCmd::T0Estimation { k, delta } => println!("T0 {}", b::t0_estimation(k, delta)?),
        BoundsCmd::T1 { horizon, t0, tf, x } => println!("T1 {}", b::t1_optimal(horizon, t0, tf, x)?),
        BoundsCmd::McRegret { t0, n } => println!("regret {:.4}", b::mc_regret_bound(t0, n)),
        BoundsCmd::DmcRegret { horizon, t1, t0, tf, nm, entered, left } => {
            let inputs = DmcBoundInputs { horizon, t1, t0, tf, max_players: nm, entered, left };
            let t = b::dmc_regret_terms(&inputs)?;
            println!("learning_fixing {:.4}", t.learning_fixing);
            println!("entering {:.4}", t.entering);
            println!("leaving {:.4}", t.leaving);
            println!("regret {:.4}", t.total());
        }
        BoundsCmd::Exponents { lambda, beta } => {
            let (mega, dmc) = b::scenario_exponents(lambda, beta);
            println!("mega {mega:.4}");
            println!("dmc {dmc:.4}");
        }
        BoundsCmd::CollisionProb { k, n, p } => {
            anyhow::ensure!(k >= 2, "need at least 2 arms, got {k}");
            match (n, p) {
                (Some(n), _) => {
                    anyhow::ensure!(n >= 1, "need at least 1 player");
                    println!("p {:.6}", b::collision_probability(k, n));
                }
                (None, Some(p)) => {
                    anyhow::ensure!((0.0..1.0).contains(&p), "p must lie in [0, 1), got {p}");
                    println!("n {:.4}", b::invert_collision_probability(k, p));
                }
                (None, None) => unreachable!("clap requires one of --n and --p"),
            }
        }
        BoundsCmd::Fixing { n } => {
            println!("fixing_time {:.4}", b::fixing_time_bound(n));
            println!("regret {:.4}", b::musical_chairs_regret_bound(n));
        }
        BoundsCmd::FBand { c, d, k, horizon } => {
            anyhow::ensure!(k >= 2, "need at least 2 arms, got {k}");
            let (lo, hi) = b::mega_failure_f_band(c, d, k, horizon);
            println!("low {lo:.6}");
            println!("high {hi:.6}");
        }
    }
    Ok(())
}
