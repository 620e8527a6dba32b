//! Benchmark games, payoffs as printed in the original tables.

use gaspp_core::{ClassTag, Game, NormalFormGame, Tensor};

use crate::error::{HarnessError, Result};

pub const NAMES: [&str; 7] = [
    "prisoners_dilemma",
    "chicken",
    "battle_of_sexes",
    "rock_paper_scissors",
    "shapleys_game",
    "two_by_three",
    "three_player_matching_pennies",
];

#[derive(Debug, Clone, PartialEq)]
pub enum BenchmarkGame {
    Bimatrix(Game),
    Tensor(Tensor),
}

impl BenchmarkGame {
    pub fn num_players(&self) -> usize {
        match self {
            BenchmarkGame::Bimatrix(g) => g.num_players(),
            BenchmarkGame::Tensor(t) => t.num_players(),
        }
    }

    pub fn num_actions(&self, player: usize) -> usize {
        match self {
            BenchmarkGame::Bimatrix(g) => g.num_actions(player),
            BenchmarkGame::Tensor(t) => t.num_actions(player),
        }
    }

    pub fn reward_ranges(&self) -> Vec<f64> {
        (0..self.num_players())
            .map(|p| match self {
                BenchmarkGame::Bimatrix(g) => g.reward_range(p),
                BenchmarkGame::Tensor(t) => t.reward_range(p),
            })
            .collect()
    }

    pub fn as_bimatrix(&self) -> Option<&Game> {
        match self {
            BenchmarkGame::Bimatrix(g) => Some(g),
            BenchmarkGame::Tensor(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkEntry {
    pub name: &'static str,
    pub game: BenchmarkGame,
    /// `None` for games with more than two players.
    pub expected_class: Option<Vec<ClassTag<f64>>>,
    pub expected_outcome: &'static str,
}

fn matrix(rows: &[&[f64]]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| r.to_vec()).collect()
}

fn two_player(r: &[&[f64]], c: &[&[f64]]) -> BenchmarkGame {
    BenchmarkGame::Bimatrix(Game::new(&matrix(r), &matrix(c)).expect("registry payoffs are valid"))
}

/// Three-player matching pennies with two actions each: players 0 and 1
/// want to match the next player, player 2 wants to differ from player 0.
pub fn three_player_matching_pennies() -> Tensor {
    Tensor::from_fn(vec![2, 2, 2], |p, a| {
        let same = a[p] == a[(p + 1) % 3];
        if same == (p != 2) {
            1.0
        } else {
            -1.0
        }
    })
    .expect("registry payoffs are valid")
}

pub fn entry(name: &str) -> Result<BenchmarkEntry> {
    use ClassTag::*;
    let (name, game, expected_class, expected_outcome) = match name {
        "prisoners_dilemma" => (
            NAMES[0],
            two_player(&[&[-1.0, -3.0], &[0.0, -2.0]], &[&[-1.0, 0.0], &[-3.0, -2.0]]),
            Some(vec![Psd, TwoByNAntiparallel { delta: 1.0 }, TwoByTwo]),
            "converges to the single equilibrium (Betray, Betray)",
        ),
        "chicken" => (
            NAMES[1],
            two_player(&[&[-2.0, 1.0], &[-1.0, -1.0]], &[&[-2.0, -1.0], &[1.0, -1.0]]),
            Some(vec![TwoByTwo]),
            "converges to a pure equilibrium",
        ),
        "battle_of_sexes" => (
            NAMES[2],
            two_player(&[&[3.0, 1.0], &[0.0, 2.0]], &[&[2.0, 1.0], &[0.0, 3.0]]),
            Some(vec![TwoByTwo]),
            "converges to a pure equilibrium",
        ),
        "rock_paper_scissors" => (
            NAMES[3],
            two_player(
                &[&[0.0, -1.0, 1.0], &[1.0, 0.0, -1.0], &[-1.0, 1.0, 0.0]],
                &[&[0.0, 1.0, -1.0], &[-1.0, 0.0, 1.0], &[1.0, -1.0, 0.0]],
            ),
            Some(vec![Psd]),
            "converges to the uniform equilibrium",
        ),
        "shapleys_game" => (
            NAMES[4],
            two_player(
                &[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]],
                &[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]],
            ),
            Some(vec![General]),
            "GA-SPP and IGA-PP converge to the uniform equilibrium, GIGA-WoLF cycles",
        ),
        "two_by_three" => (
            NAMES[5],
            two_player(
                &[&[3.0, 0.0, 1.0], &[2.0, 1.0, -1.0]],
                &[&[3.0, 5.0, -2.0], &[2.0, 1.0, 0.0]],
            ),
            Some(vec![General]),
            "GA-SPP converges to the equilibrium, IGA-PP may stop elsewhere",
        ),
        "three_player_matching_pennies" => (
            NAMES[6],
            BenchmarkGame::Tensor(three_player_matching_pennies()),
            None,
            "GA-SPP does not converge",
        ),
        other => return Err(HarnessError::UnknownGame(other.to_string())),
    };
    Ok(BenchmarkEntry {
        name,
        game,
        expected_class,
        expected_outcome,
    })
}

pub fn all() -> Vec<BenchmarkEntry> {
    NAMES
        .iter()
        .map(|n| entry(n).expect("every listed name resolves"))
        .collect()
}
