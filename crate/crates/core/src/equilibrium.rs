//! Nash equilibrium checks: exploitability, the projected-gradient test and
//! a support-enumeration oracle for small bimatrix games.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, NormalFormGame};
use crate::geometry::{projected_gradient, ReducedStrategy};
use crate::scalar::{norm2, Scalar};

/// Largest number of actions per player accepted by [`enumerate_ne`].
pub const MAX_ENUMERATION_ACTIONS: usize = 5;

/// Largest gain any single player can get by deviating unilaterally.
///
/// Expected payoff is linear in a player's own strategy, so the best
/// deviation is always a pure action.
pub fn exploitability_profile<T: Scalar, G: NormalFormGame<T>>(game: &G, profile: &[Vec<T>]) -> T {
    (0..game.num_players())
        .map(|p| {
            let best = game
                .action_values(p, profile)
                .into_iter()
                .fold(T::neg_infinity(), T::max);
            best - game.payoff(p, profile)
        })
        .fold(T::zero(), T::max)
}

pub fn exploitability<T: Scalar>(
    game: &BimatrixGame<T>,
    alpha: &ReducedStrategy<T>,
    beta: &ReducedStrategy<T>,
) -> Result<T> {
    check_dims(game, alpha, beta)?;
    Ok(exploitability_profile(
        game,
        &[alpha.coords().to_vec(), beta.coords().to_vec()],
    ))
}

fn check_dims<T: Scalar>(game: &BimatrixGame<T>, alpha: &ReducedStrategy<T>, beta: &ReducedStrategy<T>) -> Result<()> {
    if alpha.dim() + 1 != game.rows() || beta.dim() + 1 != game.cols() {
        return Err(Error::InvalidInput(format!(
            "strategy dimensions ({}, {}) do not match a {}x{} game",
            alpha.dim(),
            beta.dim(),
            game.rows(),
            game.cols()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeCertificate<T> {
    pub alpha: ReducedStrategy<T>,
    pub beta: ReducedStrategy<T>,
    pub exploitability: T,
    /// Norms of the projected gradients of the row and column player.
    pub projected_gradient_norms: (T, T),
    pub passes: bool,
}

/// Certifies a joint strategy as an approximate equilibrium.
///
/// Passes when both projected-gradient norms are at most `tol` and the
/// exploitability is at most `tol * (delta_r + delta_c + 1)`.
pub fn projected_gradient_test<T: Scalar>(
    game: &BimatrixGame<T>,
    alpha: &ReducedStrategy<T>,
    beta: &ReducedStrategy<T>,
    tol: T,
) -> Result<NeCertificate<T>> {
    check_dims(game, alpha, beta)?;
    let profile = [alpha.coords().to_vec(), beta.coords().to_vec()];
    let pa = projected_gradient(alpha.coords(), &game.gradient(0, &profile));
    let pb = projected_gradient(beta.coords(), &game.gradient(1, &profile));
    let norms = (norm2(&pa), norm2(&pb));
    let exploit = exploitability_profile(game, &profile);
    let ranges = game.reward_ranges();
    let scale = ranges.delta_r + ranges.delta_c + T::one();
    Ok(NeCertificate {
        alpha: alpha.clone(),
        beta: beta.clone(),
        exploitability: exploit,
        projected_gradient_norms: norms,
        passes: norms.0 <= tol && norms.1 <= tol && exploit <= tol * scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashPoint<T> {
    pub alpha: ReducedStrategy<T>,
    pub beta: ReducedStrategy<T>,
    pub row_support: Vec<usize>,
    pub col_support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeEnumeration<T> {
    pub equilibria: Vec<NashPoint<T>>,
    /// Support pairs whose indifference system was singular and skipped.
    pub singular_supports: usize,
}

/// Largest number of pure profiles scanned by [`pure_equilibria`].
pub const MAX_PURE_PROFILES: usize = 1 << 16;

/// Pure-strategy equilibria of any game, as action indices per player, in
/// lexicographic order with player 0 most significant.
pub fn pure_equilibria<T: Scalar, G: NormalFormGame<T>>(game: &G, tol: T) -> Result<Vec<Vec<usize>>> {
    let actions: Vec<usize> = (0..game.num_players()).map(|p| game.num_actions(p)).collect();
    let total = actions
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .filter(|&t| t <= MAX_PURE_PROFILES)
        .ok_or_else(|| Error::UnsupportedShape(format!("more than {MAX_PURE_PROFILES} pure profiles")))?;
    let mut found = Vec::new();
    let mut index = vec![0usize; actions.len()];
    for _ in 0..total {
        let profile = index
            .iter()
            .zip(&actions)
            .map(|(&a, &n)| ReducedStrategy::<T>::pure(a, n).map(ReducedStrategy::into_inner))
            .collect::<Result<Vec<_>>>()?;
        if exploitability_profile(game, &profile) <= tol {
            found.push(index.clone());
        }
        for (slot, &n) in index.iter_mut().zip(&actions).rev() {
            *slot += 1;
            if *slot < n {
                break;
            }
            *slot = 0;
        }
    }
    Ok(found)
}

/// All equilibria found by support enumeration over equal-size support pairs.
///
/// For nondegenerate games this is the complete set. Singular indifference
/// systems (degenerate games with continua of equilibria) are skipped and
/// counted in `singular_supports`.
pub fn enumerate_ne<T: Scalar>(game: &BimatrixGame<T>) -> Result<NeEnumeration<T>> {
    let (m, n) = (game.rows(), game.cols());
    if m > MAX_ENUMERATION_ACTIONS || n > MAX_ENUMERATION_ACTIONS {
        return Err(Error::UnsupportedShape(format!(
            "support enumeration is limited to {MAX_ENUMERATION_ACTIONS} actions per player, got {m}x{n}"
        )));
    }
    let tol = T::lit(1e-9).max(T::epsilon() * T::lit(100.0));
    let r = game.row_matrix();
    let c_t: Vec<Vec<T>> = (0..n).map(|j| (0..m).map(|i| game.c(i, j)).collect()).collect();

    let mut out = NeEnumeration {
        equilibria: Vec::new(),
        singular_supports: 0,
    };
    for size in 1..=m.min(n) {
        for rows in subsets(m, size) {
            for cols in subsets(n, size) {
                // Column mix making every row in the support indifferent, and vice versa.
                let beta = indifference_mix(&r, &rows, &cols, n);
                let alpha = indifference_mix(&c_t, &cols, &rows, m);
                let (Some(beta), Some(alpha)) = (beta, alpha) else {
                    out.singular_supports += 1;
                    continue;
                };
                let (Some(alpha), Some(beta)) = (clean_mix(alpha, tol), clean_mix(beta, tol)) else {
                    continue;
                };
                if !best_responds(&r, &beta, &rows, tol) || !best_responds(&c_t, &alpha, &cols, tol) {
                    continue;
                }
                let alpha = ReducedStrategy::from_raw(alpha[..m - 1].to_vec());
                let beta = ReducedStrategy::from_raw(beta[..n - 1].to_vec());
                let duplicate = out.equilibria.iter().any(|e| {
                    close(e.alpha.coords(), alpha.coords(), tol) && close(e.beta.coords(), beta.coords(), tol)
                });
                if !duplicate {
                    out.equilibria.push(NashPoint {
                        alpha,
                        beta,
                        row_support: rows.clone(),
                        col_support: cols.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

fn close<T: Scalar>(a: &[T], b: &[T], tol: T) -> bool {
    a.iter().zip(b).all(|(&x, &y)| (x - y).abs() <= tol)
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|mask| mask.count_ones() as usize == size)
        .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Mix over `mixers` (columns of `payoff`) that equalises the payoff of every
/// action in `responders`. Returns a full-length vector, or `None` when the
/// system is singular.
fn indifference_mix<T: Scalar>(
    payoff: &[Vec<T>],
    responders: &[usize],
    mixers: &[usize],
    len: usize,
) -> Option<Vec<T>> {
    let k = mixers.len();
    // Unknowns: the k mixing weights and the common value v.
    let mut a: Vec<Vec<T>> = responders
        .iter()
        .map(|&i| {
            let mut row: Vec<T> = mixers.iter().map(|&j| payoff[i][j]).collect();
            row.push(-T::one());
            row.push(T::zero());
            row
        })
        .collect();
    let mut last = vec![T::one(); k];
    last.push(T::zero());
    last.push(T::one());
    a.push(last);

    let x = solve(a)?;
    let mut mix = vec![T::zero(); len];
    for (&j, &w) in mixers.iter().zip(&x[..k]) {
        mix[j] = w;
    }
    Some(mix)
}

/// Gaussian elimination with partial pivoting on an augmented square system.
fn solve<T: Scalar>(mut a: Vec<Vec<T>>) -> Option<Vec<T>> {
    let n = a.len();
    let scale = a
        .iter()
        .flat_map(|r| r[..n].iter())
        .fold(T::zero(), |acc, v| acc.max(v.abs()));
    let eps = T::lit(1e-12) * scale.max(T::one());
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() <= eps {
            return None;
        }
        a.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != T::zero() {
                for j in col..=n {
                    let v = a[col][j];
                    a[row][j] = a[row][j] - f * v;
                }
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s = (i + 1..n).fold(a[i][n], |acc, j| acc - a[i][j] * x[j]);
        x[i] = s / a[i][i];
    }
    Some(x)
}

fn clean_mix<T: Scalar>(mut mix: Vec<T>, tol: T) -> Option<Vec<T>> {
    if mix.iter().any(|&w| w < -tol) {
        return None;
    }
    for w in &mut mix {
        *w = w.max(T::zero());
    }
    let total: T = mix.iter().copied().sum();
    if total <= T::zero() {
        return None;
    }
    Some(mix.into_iter().map(|w| w / total).collect())
}

/// Every action in `support` earns the best payoff against `mix` within `tol`.
fn best_responds<T: Scalar>(payoff: &[Vec<T>], mix: &[T], support: &[usize], tol: T) -> bool {
    let values: Vec<T> = payoff
        .iter()
        .map(|row| row.iter().zip(mix).fold(T::zero(), |acc, (&p, &w)| acc + p * w))
        .collect();
    let best = values.iter().copied().fold(T::neg_infinity(), T::max);
    support.iter().all(|&i| values[i] >= best - tol)
}
