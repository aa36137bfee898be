use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupError, GroupParams, Residue};
use crate::multiset::Multiset;
use crate::palette::Palette;

/// Copies of each color in the standard game's bag.
pub const STANDARD_COPIES: u32 = 10;
/// Player limits for the standard eight-color game.
pub const STANDARD_PLAYERS: std::ops::RangeInclusive<usize> = 2..=4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("at least 2 players are required, got {0}")]
    TooFewPlayers(usize),
    #[error("the standard game is played by 2 to 4 players, got {0}")]
    TooManyPlayers(usize),
    #[error("copies per color A={copies} is below m x players = {required}")]
    TooFewCopies { copies: u32, required: u64 },
    #[error("pool of {pool} pieces cannot deal {needed} (hands plus the Center piece)")]
    PoolTooSmall { pool: u64, needed: u64 },
    #[error("group {0} does not fit the engine's residue type")]
    ResidueTooSmall(GroupParams),
}

/// Parameters of one game. All derived counts come from here.
#[derive(Clone, Debug)]
pub struct GameConfig {
    params: GroupParams,
    players: usize,
    copies: u32,
    seed: u64,
    palette: Palette,
}

impl PartialEq for GameConfig {
    fn eq(&self, other: &Self) -> bool {
        self.summary() == other.summary()
    }
}

impl Eq for GameConfig {}

/// Plain-data view of a config, as written to logs and records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub m: u32,
    pub n: u32,
    pub copies: u32,
    pub players: usize,
    pub seed: u64,
}

impl GameConfig {
    pub fn new(params: GroupParams, players: usize, copies: u32, seed: u64) -> Result<Self, ConfigError> {
        if players < 2 {
            return Err(ConfigError::TooFewPlayers(players));
        }
        if params == GroupParams::STANDARD && !STANDARD_PLAYERS.contains(&players) {
            return Err(ConfigError::TooManyPlayers(players));
        }
        let required = params.m() as u64 * players as u64;
        if (copies as u64) < required {
            return Err(ConfigError::TooFewCopies { copies, required });
        }
        let config = GameConfig { params, players, copies, seed, palette: Palette::standard(params) };
        let needed = config.deal_size().saturating_mul(players as u64).saturating_add(1);
        if needed > config.pool_total() {
            return Err(ConfigError::PoolTooSmall { pool: config.pool_total(), needed });
        }
        Ok(config)
    }

    /// The eight-color game with ten copies of each color.
    pub fn standard(players: usize, seed: u64) -> Result<Self, ConfigError> {
        Self::new(GroupParams::STANDARD, players, STANDARD_COPIES, seed)
    }

    pub fn from_summary(s: ConfigSummary) -> Result<Self, ConfigError> {
        Self::new(GroupParams::new(s.m, s.n)?, s.players, s.copies, s.seed)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        GameConfig { seed, ..self.clone() }
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn copies(&self) -> u32 {
        self.copies
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    pub fn summary(&self) -> ConfigSummary {
        ConfigSummary {
            m: self.params.m(),
            n: self.params.n() as u32,
            copies: self.copies,
            players: self.players,
            seed: self.seed,
        }
    }

    /// Pieces dealt to each player, `m^(n+1) - m - 1`.
    pub fn deal_size(&self) -> u64 {
        deal_size(self.params)
    }

    /// `A` copies of each of the `m^n - 1` non-identity colors.
    pub fn pool_spec(&self) -> PoolSpec {
        PoolSpec { per_color: self.copies, colors: self.params.order() - 1 }
    }

    pub fn pool_total(&self) -> u64 {
        self.pool_spec().total()
    }

    pub(crate) fn check_residue<R: Residue>(&self) -> Result<(), ConfigError> {
        if self.params.fits::<R>() {
            Ok(())
        } else {
            Err(ConfigError::ResidueTooSmall(self.params))
        }
    }
}

pub fn deal_size(params: GroupParams) -> u64 {
    let m = params.m() as u64;
    m * params.order() - m - 1
}

/// Composition of the starting bag. Black/clear pieces are unlimited and
/// never pooled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PoolSpec {
    pub per_color: u32,
    pub colors: u64,
}

impl PoolSpec {
    pub fn total(&self) -> u64 {
        self.per_color as u64 * self.colors
    }

    pub fn to_multiset<R: Residue>(&self, params: GroupParams) -> Multiset<R> {
        let mut bag = Multiset::new();
        for c in params.elements::<R>().filter(|c| !c.is_identity()) {
            bag.insert_n(c, self.per_color as usize);
        }
        bag
    }
}
