#![allow(dead_code)]

use gaspp_core::{Game, Strategy as Mixed};
use proptest::prelude::*;

pub fn matrix(m: usize, n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..=1.0, n), m)
}

pub fn game(m: usize, n: usize) -> impl Strategy<Value = Game> {
    (matrix(m, n), matrix(m, n)).prop_map(|(r, c)| Game::new(&r, &c).unwrap())
}

pub fn zero_sum(m: usize, n: usize) -> impl Strategy<Value = Game> {
    matrix(m, n).prop_map(|r| Game::zero_sum(&r).unwrap())
}

/// Uniformly distributed point of the reduced simplex with `actions` actions.
pub fn point(actions: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-6f64..1.0, actions).prop_map(|w| {
        let e: Vec<f64> = w.iter().map(|x| -x.ln()).collect();
        let total: f64 = e.iter().sum();
        e[..e.len() - 1].iter().map(|x| x / total).collect()
    })
}

pub fn strategy(actions: usize) -> impl Strategy<Value = Mixed> {
    point(actions).prop_map(|x| Mixed::new(x).unwrap())
}

pub fn s(v: &[f64]) -> Mixed {
    Mixed::new(v.to_vec()).unwrap()
}

/// `0.9 / (delta_r + delta_c)`, inside every step-size condition.
pub fn conforming_step(game: &Game) -> f64 {
    let r = game.reward_ranges();
    0.9 / (r.delta_r + r.delta_c)
}
