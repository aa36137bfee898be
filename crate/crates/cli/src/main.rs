//! `aljabar`: verify the color arithmetic, simulate bot tournaments, replay
//! game logs and host live games.
//!
//! Exit status: 0 on success, 1 when a check or a log fails, 2 on bad
//! usage (including invalid game parameters).

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use aljabar_core::palette::AdditionTable;
use aljabar_core::rules::{read_log, replay, replay_partial, ConfigError, GameConfig, STANDARD_COPIES};
use aljabar_core::sim::{write_games_csv, write_summary_csv, Tournament};
use aljabar_core::verify::{run_all, Fault};
use aljabar_core::{Game, GroupParams, Palette};
use aljabar_service::{bind, router, serve, Defaults, ServiceConfig, SessionManager};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "aljabar", version, about = "Al-Jabar color arithmetic, bots and game server")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the addition table, identities, group axioms, setup formulas
    /// and Fano lines.
    Verify {
        /// Corrupt the generated data first, to exercise the failure path.
        #[arg(long, value_enum, hide = true)]
        fault: Option<FaultArg>,
    },
    /// Play a seeded bot tournament and print per-game and summary CSV.
    Simulate {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 100)]
        games: usize,
        /// Seed of the first game; game i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// One policy per seat, comma separated (random, greedy). Defaults
        /// to random in every seat.
        #[arg(long, value_delimiter = ',')]
        policies: Vec<String>,
        /// Write every game's JSON-lines log here.
        #[arg(long)]
        log_dir: Option<PathBuf>,
    },
    /// Replay a game log and print the final hands and the winners.
    Replay {
        file: PathBuf,
        /// Accept a log that stops before the game ends.
        #[arg(long)]
        partial: bool,
    },
    /// Host live games over HTTP and WebSocket.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        /// Session logs go here, one JSON-lines file per session.
        #[arg(long, default_value = "sessions")]
        log_dir: PathBuf,
        /// Defaults for sessions created without explicit parameters.
        #[command(flatten)]
        game: GameArgs,
        /// Seconds a disconnected player's turn waits before the greedy
        /// bot moves for them; 0 waits forever.
        #[arg(long, default_value_t = 60)]
        bot_timeout: u64,
        /// Serve the web client from this directory.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct GameArgs {
    /// Modulus of each color coordinate.
    #[arg(long, default_value_t = 2)]
    m: u32,
    /// Number of coordinates (primary colors).
    #[arg(long, default_value_t = 3)]
    n: u32,
    /// Copies of each non-black color in the bag.
    #[arg(long = "A", visible_alias = "copies", default_value_t = STANDARD_COPIES)]
    copies: u32,
    #[arg(long, default_value_t = 2)]
    players: usize,
}

impl GameArgs {
    fn config(&self, seed: u64) -> Result<GameConfig, ConfigError> {
        GameConfig::new(GroupParams::new(self.m, self.n)?, self.players, self.copies, seed)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    TableCell,
}

/// A failure with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

fn failed(message: impl ToString) -> Failure {
    Failure { code: 1, message: message.to_string() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { fault } => verify(fault),
        Command::Simulate { game, games, seed, policies, log_dir } => simulate(game, games, seed, policies, log_dir),
        Command::Replay { file, partial } => replay_file(&file, partial),
        Command::Serve { listen, log_dir, game, bot_timeout, static_dir } => {
            serve_games(listen, log_dir, game, bot_timeout, static_dir)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, message }) => {
            if !message.is_empty() {
                eprintln!("error: {message}");
            }
            ExitCode::from(code)
        }
    }
}

fn print_table(out: &mut impl Write) -> io::Result<()> {
    let palette = Palette::standard(GroupParams::STANDARD);
    let table = AdditionTable::<u8>::new(&palette);
    let codes: Vec<String> = table.colors.iter().map(|c| palette.code(c)).collect();
    writeln!(out, "+ | {}", codes.join(" "))?;
    for (code, row) in codes.iter().zip(&table.cells) {
        let cells: Vec<String> = row.iter().map(|c| palette.code(c)).collect();
        writeln!(out, "{code} | {}", cells.join(" "))?;
    }
    writeln!(out)
}

fn verify(fault: Option<FaultArg>) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    print_table(&mut out).map_err(failed)?;
    let report = run_all(fault.map(|FaultArg::TableCell| Fault::TableCell));
    writeln!(out, "{report}").map_err(failed)?;
    if report.passed() {
        Ok(())
    } else {
        Err(failed("verification failed"))
    }
}

fn simulate(
    game: GameArgs,
    games: usize,
    seed: u64,
    mut policies: Vec<String>,
    log_dir: Option<PathBuf>,
) -> Result<(), Failure> {
    let config = game.config(seed).map_err(|e| usage(format!("invalid game parameters: {e}")))?;
    if policies.is_empty() {
        policies = vec!["random".to_string(); game.players];
    }
    let tournament = Tournament::new(config, policies, games, seed).map_err(usage)?;
    let results = tournament.run::<u16>(log_dir.as_deref()).map_err(failed)?;
    let summary = tournament.summarize(&results);
    let mut out = io::stdout().lock();
    write_games_csv(&results, &mut out).map_err(failed)?;
    writeln!(out).map_err(failed)?;
    write_summary_csv(&summary, &mut out).map_err(failed)?;
    eprintln!(
        "{} games, turns min {} mean {:.1} max {}, {} cancellations, {} forced draws",
        summary.games, summary.min_turns, summary.mean_turns, summary.max_turns, summary.cancellations, summary.forced_draws
    );
    Ok(())
}

fn replay_file(path: &PathBuf, partial: bool) -> Result<(), Failure> {
    let file = File::open(path).map_err(|e| failed(format!("{}: {e}", path.display())))?;
    let events = read_log(BufReader::new(file)).map_err(|e| failed(format!("{}: {e}", path.display())))?;
    let state: Game = if partial { replay_partial(&events) } else { replay(&events) }
        .map_err(|e| failed(format!("{}: {e}", path.display())))?;
    print_result(&state).map_err(failed)
}

fn print_result(state: &Game) -> io::Result<()> {
    let mut out = io::stdout().lock();
    let c = state.config().summary();
    writeln!(out, "game: m={} n={} A={} players={} seed={}", c.m, c.n, c.copies, c.players, c.seed)?;
    writeln!(out, "turns: {} rounds: {}", state.turns_played(), state.round())?;
    if let Some(t) = state.final_trigger() {
        writeln!(out, "final round: player {} ({:?}) in round {} after {} turns", t.player, t.cause, t.round, t.after_turns)?;
    }
    let palette = state.config().palette();
    for (player, hand) in state.hands().iter().enumerate() {
        writeln!(out, "player {player}: {} pieces [{}]", hand.len(), palette.codes(hand).join(" "))?;
    }
    match state.winners() {
        Ok(winners) => {
            let list: Vec<String> = winners.iter().map(usize::to_string).collect();
            writeln!(out, "winner: player {}", list.join(", player "))
        }
        Err(_) => writeln!(out, "unfinished: player {} to act", state.to_act()),
    }
}

fn serve_games(
    listen: SocketAddr,
    log_dir: PathBuf,
    game: GameArgs,
    bot_timeout: u64,
    static_dir: Option<PathBuf>,
) -> Result<(), Failure> {
    game.config(0).map_err(|e| usage(format!("invalid game parameters: {e}")))?;
    if let Some(dir) = &static_dir {
        if !dir.is_dir() {
            return Err(usage(format!("static directory {} does not exist", dir.display())));
        }
    }
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(io::stderr)
        .init();
    let config = ServiceConfig {
        defaults: Defaults { m: game.m, n: game.n, copies: game.copies, players: game.players },
        log_dir: Some(log_dir),
        fallback_after: (bot_timeout > 0).then(|| Duration::from_secs(bot_timeout)),
        ..Default::default()
    };
    let runtime = tokio::runtime::Runtime::new().map_err(failed)?;
    runtime.block_on(async move {
        let listener = bind(listen).await.map_err(failed)?;
        let addr = listener.local_addr().map_err(failed)?;
        eprintln!("listening on http://{addr}");
        serve(listener, router(SessionManager::new(config), static_dir)).await.map_err(failed)
    })
}
