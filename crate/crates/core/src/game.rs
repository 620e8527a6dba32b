//! Normal-form games: the two-player bimatrix representation, an n-player
//! payoff tensor, expected payoffs, strategy gradients and the structural
//! classification used by the convergence results.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{full_strategy, ReducedStrategy};
use crate::scalar::{norm2, Scalar};

/// A finite game played with mixed strategies in reduced coordinates.
///
/// Everything the learners need follows from `action_values`: the expected
/// payoff of each pure action of one player against the others' current
/// mixed strategies. Profiles are slices of reduced strategies, one per
/// player; they are not required to be feasible, since the values are
/// multilinear and some learners evaluate at unprojected forecasts.
pub trait NormalFormGame<T: Scalar> {
    fn num_players(&self) -> usize;

    fn num_actions(&self, player: usize) -> usize;

    fn action_values(&self, player: usize, profile: &[Vec<T>]) -> Vec<T>;

    /// `max - min` over the player's payoff entries.
    fn reward_range(&self, player: usize) -> T;

    /// Expected payoff of `player` under `profile`.
    fn payoff(&self, player: usize, profile: &[Vec<T>]) -> T {
        let values = self.action_values(player, profile);
        full_strategy(&profile[player])
            .iter()
            .zip(&values)
            .fold(T::zero(), |acc, (&p, &v)| acc + p * v)
    }

    /// Gradient of the player's expected payoff in reduced coordinates:
    /// component `i` is the value of action `i` minus the value of the last action.
    fn gradient(&self, player: usize, profile: &[Vec<T>]) -> Vec<T> {
        let values = self.action_values(player, profile);
        let last = *values.last().expect("at least two actions");
        values[..values.len() - 1].iter().map(|&v| v - last).collect()
    }
}

fn matrix_from_rows<T: Scalar>(name: &str, rows: &[Vec<T>]) -> Result<(usize, usize, Vec<T>)> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if m < 2 || n < 2 {
        return Err(Error::InvalidInput(format!("{name} must be at least 2x2, got {m}x{n}")));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::InvalidInput(format!(
            "{name} row {i} has {} entries, expected {n}",
            rows[i].len()
        )));
    }
    let flat: Vec<T> = rows.iter().flatten().copied().collect();
    if flat.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("{name} has a non-finite entry")));
    }
    Ok((m, n, flat))
}

fn range_of<T: Scalar>(xs: &[T]) -> T {
    let (lo, hi) = xs.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    });
    hi - lo
}

/// Two-player game given by row payoffs `R` and column payoffs `C`, both `m x n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BimatrixRepr<T>", into = "BimatrixRepr<T>")]
#[serde(bound = "T: Scalar + Serialize + for<'a> Deserialize<'a>")]
pub struct BimatrixGame<T> {
    m: usize,
    n: usize,
    r: Vec<T>,
    c: Vec<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BimatrixRepr<T> {
    #[serde(rename = "R")]
    r: Vec<Vec<T>>,
    #[serde(rename = "C")]
    c: Vec<Vec<T>>,
}

impl<T: Scalar> TryFrom<BimatrixRepr<T>> for BimatrixGame<T> {
    type Error = Error;
    fn try_from(repr: BimatrixRepr<T>) -> Result<Self> {
        Self::new(&repr.r, &repr.c)
    }
}

impl<T: Scalar> From<BimatrixGame<T>> for BimatrixRepr<T> {
    fn from(g: BimatrixGame<T>) -> Self {
        BimatrixRepr {
            r: g.row_matrix(),
            c: g.col_matrix(),
        }
    }
}

impl<T: Scalar> BimatrixGame<T> {
    pub fn new(r: &[Vec<T>], c: &[Vec<T>]) -> Result<Self> {
        let (m, n, r) = matrix_from_rows("R", r)?;
        let (mc, nc, c) = matrix_from_rows("C", c)?;
        if (m, n) != (mc, nc) {
            return Err(Error::InvalidInput(format!("R is {m}x{n} but C is {mc}x{nc}")));
        }
        Ok(Self { m, n, r, c })
    }

    /// Zero-sum game with column payoffs `-R`.
    pub fn zero_sum(r: &[Vec<T>]) -> Result<Self> {
        let c: Vec<Vec<T>> = r.iter().map(|row| row.iter().map(|&v| -v).collect()).collect();
        Self::new(r, &c)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn r(&self, i: usize, j: usize) -> T {
        self.r[i * self.n + j]
    }

    pub fn c(&self, i: usize, j: usize) -> T {
        self.c[i * self.n + j]
    }

    pub fn row_matrix(&self) -> Vec<Vec<T>> {
        self.r.chunks(self.n).map(<[T]>::to_vec).collect()
    }

    pub fn col_matrix(&self) -> Vec<Vec<T>> {
        self.c.chunks(self.n).map(<[T]>::to_vec).collect()
    }

    fn check_dims(&self, alpha: &[T], beta: &[T]) -> Result<()> {
        if alpha.len() != self.m - 1 || beta.len() != self.n - 1 {
            return Err(Error::InvalidInput(format!(
                "strategy dimensions ({}, {}) do not match a {}x{} game",
                alpha.len(),
                beta.len(),
                self.m,
                self.n
            )));
        }
        Ok(())
    }

    /// Expected payoffs `(V_r, V_c)` at the joint strategy.
    pub fn payoffs(&self, alpha: &ReducedStrategy<T>, beta: &ReducedStrategy<T>) -> Result<(T, T)> {
        self.check_dims(alpha.coords(), beta.coords())?;
        let profile = [alpha.coords().to_vec(), beta.coords().to_vec()];
        Ok((self.payoff(0, &profile), self.payoff(1, &profile)))
    }

    /// Reduced gradients `(dV_r/d alpha, dV_c/d beta)`.
    pub fn gradients(&self, alpha: &ReducedStrategy<T>, beta: &ReducedStrategy<T>) -> Result<(Vec<T>, Vec<T>)> {
        self.check_dims(alpha.coords(), beta.coords())?;
        let profile = [alpha.coords().to_vec(), beta.coords().to_vec()];
        Ok((self.gradient(0, &profile), self.gradient(1, &profile)))
    }

    pub fn reward_ranges(&self) -> RewardRanges<T> {
        RewardRanges {
            delta_r: range_of(&self.r),
            delta_c: range_of(&self.c),
        }
    }

    pub fn is_zero_sum(&self) -> bool {
        self.r.iter().zip(&self.c).all(|(&a, &b)| a + b == T::zero())
    }

    /// Reduced bilinear coupling of `R + C`:
    /// `M_ij = S_ij - S_in - S_mj + S_mn` with `S = R + C`.
    ///
    /// The inequality defining positive semi-definite games reduces to
    /// `d_alpha^T M d_beta >= 0` over all strategy differences, which holds
    /// iff `M = 0`.
    pub fn sum_coupling(&self) -> Vec<Vec<T>> {
        let (m, n) = (self.m, self.n);
        let s = |i: usize, j: usize| self.r(i, j) + self.c(i, j);
        (0..m - 1)
            .map(|i| {
                (0..n - 1)
                    .map(|j| (s(i, j) - s(i, n - 1)) - (s(m - 1, j) - s(m - 1, n - 1)))
                    .collect()
            })
            .collect()
    }

    /// Parameters of the `2 x n` gradient form
    /// `dV_r/d alpha = beta . u_r + b_r`, `dV_c/d beta = alpha * u_c + b_c`.
    pub fn reduced_2xn(&self) -> Result<Reduced2xNParams<T>> {
        if self.m != 2 {
            return Err(Error::UnsupportedShape(format!(
                "reduced 2xn parameters need 2 rows, game has {}",
                self.m
            )));
        }
        let n = self.n;
        let b_r = self.r(0, n - 1) - self.r(1, n - 1);
        let dc = self.c(0, n - 1) - self.c(1, n - 1);
        let u_r = (0..n - 1).map(|j| self.r(0, j) - self.r(1, j) - b_r).collect();
        let u_c = (0..n - 1).map(|j| self.c(0, j) - self.c(1, j) - dc).collect();
        let b_c = (0..n - 1).map(|j| self.c(1, j) - self.c(1, n - 1)).collect();
        Ok(Reduced2xNParams { u_r, b_r, u_c, b_c })
    }

    /// Scalar parameters of a `2 x 2` game.
    pub fn reduced_2x2(&self) -> Result<Reduced2x2Params<T>> {
        if self.m != 2 || self.n != 2 {
            return Err(Error::UnsupportedShape(format!(
                "scalar reduced parameters need a 2x2 game, got {}x{}",
                self.m, self.n
            )));
        }
        let (r, c) = (|i, j| self.r(i, j), |i, j| self.c(i, j));
        Ok(Reduced2x2Params {
            u_r: r(0, 0) + r(1, 1) - r(0, 1) - r(1, 0),
            b_r: r(0, 1) - r(1, 1),
            u_c: c(0, 0) + c(1, 1) - c(0, 1) - c(1, 0),
            b_c: c(1, 0) - c(1, 1),
        })
    }

    /// Scalar form for `2 x 2` games, vector form for other `2 x n` games.
    pub fn reduced_params(&self) -> Result<ReducedParams<T>> {
        if self.m == 2 && self.n == 2 {
            self.reduced_2x2().map(ReducedParams::TwoByTwo)
        } else {
            self.reduced_2xn().map(ReducedParams::TwoByN)
        }
    }

    pub fn classify(&self) -> GameClass<T> {
        let mut tags = Vec::new();
        let ranges = self.reward_ranges();
        let scale = ranges.delta_r + ranges.delta_c;
        let psd_tol = T::lit(1e-9) * scale;
        if self.sum_coupling().iter().flatten().all(|v| v.abs() <= psd_tol) {
            tags.push(ClassTag::Psd);
        }
        if let Ok(params) = self.reduced_2xn() {
            if let Some(delta) = params.antiparallel_delta() {
                tags.push(ClassTag::TwoByNAntiparallel { delta });
            }
        }
        if self.m == 2 && self.n == 2 {
            tags.push(ClassTag::TwoByTwo);
        }
        if tags.is_empty() {
            tags.push(ClassTag::General);
        }
        GameClass { tags }
    }
}

impl<T: Scalar> NormalFormGame<T> for BimatrixGame<T> {
    fn num_players(&self) -> usize {
        2
    }

    fn num_actions(&self, player: usize) -> usize {
        match player {
            0 => self.m,
            1 => self.n,
            _ => panic!("bimatrix games have two players, got index {player}"),
        }
    }

    fn action_values(&self, player: usize, profile: &[Vec<T>]) -> Vec<T> {
        match player {
            0 => {
                let beta = full_strategy(&profile[1]);
                (0..self.m)
                    .map(|a| (0..self.n).fold(T::zero(), |acc, b| acc + self.r(a, b) * beta[b]))
                    .collect()
            }
            1 => {
                let alpha = full_strategy(&profile[0]);
                (0..self.n)
                    .map(|b| (0..self.m).fold(T::zero(), |acc, a| acc + self.c(a, b) * alpha[a]))
                    .collect()
            }
            _ => panic!("bimatrix games have two players, got index {player}"),
        }
    }

    fn reward_range(&self, player: usize) -> T {
        let ranges = self.reward_ranges();
        match player {
            0 => ranges.delta_r,
            _ => ranges.delta_c,
        }
    }
}

/// `delta_r = max(R) - min(R)` and `delta_c = max(C) - min(C)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardRanges<T> {
    pub delta_r: T,
    pub delta_c: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reduced2xNParams<T> {
    pub u_r: Vec<T>,
    pub b_r: T,
    pub u_c: Vec<T>,
    pub b_c: Vec<T>,
}

impl<T: Scalar> Reduced2xNParams<T> {
    /// `beta . u_r + b_r`
    pub fn row_gradient(&self, beta: &[T]) -> T {
        self.u_r.iter().zip(beta).fold(self.b_r, |acc, (&u, &b)| acc + u * b)
    }

    /// `alpha * u_c + b_c`
    pub fn col_gradient(&self, alpha: T) -> Vec<T> {
        self.u_c.iter().zip(&self.b_c).map(|(&u, &b)| alpha * u + b).collect()
    }

    /// The `delta > 0` with `u_r + delta * u_c = 0`, if one exists.
    ///
    /// The candidate comes from the first clearly nonzero entry of `u_c` and
    /// is then verified on every entry. When both vectors vanish any delta
    /// works and `1` is returned.
    pub fn antiparallel_delta(&self) -> Option<T> {
        let tol = T::lit(1e-9) * (norm2(&self.u_r) + norm2(&self.u_c));
        if norm2(&self.u_r) <= tol && norm2(&self.u_c) <= tol {
            return Some(T::one());
        }
        let i = self.u_c.iter().position(|u| u.abs() > tol)?;
        let delta = -self.u_r[i] / self.u_c[i];
        if delta <= T::zero() {
            return None;
        }
        let residual: Vec<T> = self.u_r.iter().zip(&self.u_c).map(|(&r, &c)| r + delta * c).collect();
        residual.iter().all(|v| v.abs() <= tol).then_some(delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reduced2x2Params<T> {
    pub u_r: T,
    pub b_r: T,
    pub u_c: T,
    pub b_c: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ReducedParams<T> {
    TwoByTwo(Reduced2x2Params<T>),
    TwoByN(Reduced2xNParams<T>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClassTag<T> {
    Psd,
    TwoByNAntiparallel { delta: T },
    TwoByTwo,
    General,
}

impl<T: Scalar> std::fmt::Display for ClassTag<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassTag::Psd => write!(f, "PSD"),
            ClassTag::TwoByNAntiparallel { delta } => write!(f, "TwoByNAntiparallel(delta={delta})"),
            ClassTag::TwoByTwo => write!(f, "TwoByTwo"),
            ClassTag::General => write!(f, "General"),
        }
    }
}

/// The set of structural classes a game belongs to. `General` appears
/// exactly when no other class applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameClass<T> {
    pub tags: Vec<ClassTag<T>>,
}

impl<T: Scalar> GameClass<T> {
    pub fn is_psd(&self) -> bool {
        self.tags.contains(&ClassTag::Psd)
    }

    pub fn antiparallel_delta(&self) -> Option<T> {
        self.tags.iter().find_map(|t| match t {
            ClassTag::TwoByNAntiparallel { delta } => Some(*delta),
            _ => None,
        })
    }

    pub fn is_two_by_two(&self) -> bool {
        self.tags.contains(&ClassTag::TwoByTwo)
    }

    pub fn is_general(&self) -> bool {
        self.tags.contains(&ClassTag::General)
    }
}

impl<T: Scalar> std::fmt::Display for GameClass<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.tags.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A game with any number of players, one payoff tensor per player.
///
/// Tensors are flattened row-major over joint actions with player 0 as the
/// most significant index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorGame<T> {
    actions: Vec<usize>,
    payoffs: Vec<Vec<T>>,
}

impl<T: Scalar> TensorGame<T> {
    pub fn new(actions: Vec<usize>, payoffs: Vec<Vec<T>>) -> Result<Self> {
        if actions.len() < 2 {
            return Err(Error::InvalidInput("a game needs at least two players".into()));
        }
        if let Some(p) = actions.iter().position(|&a| a < 2) {
            return Err(Error::InvalidInput(format!("player {p} needs at least 2 actions")));
        }
        if payoffs.len() != actions.len() {
            return Err(Error::InvalidInput(format!(
                "{} payoff tensors for {} players",
                payoffs.len(),
                actions.len()
            )));
        }
        let size: usize = actions.iter().product();
        for (p, tensor) in payoffs.iter().enumerate() {
            if tensor.len() != size {
                return Err(Error::InvalidInput(format!(
                    "payoff tensor of player {p} has {} entries, expected {size}",
                    tensor.len()
                )));
            }
            if tensor.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "payoff tensor of player {p} has a non-finite entry"
                )));
            }
        }
        Ok(Self { actions, payoffs })
    }

    /// Builds a tensor game by evaluating `payoff(player, joint_action)`.
    pub fn from_fn(actions: Vec<usize>, payoff: impl Fn(usize, &[usize]) -> T) -> Result<Self> {
        let size: usize = actions.iter().product();
        let payoffs = (0..actions.len())
            .map(|p| (0..size).map(|flat| payoff(p, &unravel(flat, &actions))).collect())
            .collect();
        Self::new(actions, payoffs)
    }

    pub fn from_bimatrix(game: &BimatrixGame<T>) -> Self {
        Self {
            actions: vec![game.rows(), game.cols()],
            payoffs: vec![game.r.clone(), game.c.clone()],
        }
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn payoff_tensor(&self, player: usize) -> &[T] {
        &self.payoffs[player]
    }
}

fn unravel(mut flat: usize, actions: &[usize]) -> Vec<usize> {
    let mut joint = vec![0; actions.len()];
    for (slot, &a) in joint.iter_mut().zip(actions).rev() {
        *slot = flat % a;
        flat /= a;
    }
    joint
}

impl<T: Scalar> NormalFormGame<T> for TensorGame<T> {
    fn num_players(&self) -> usize {
        self.actions.len()
    }

    fn num_actions(&self, player: usize) -> usize {
        self.actions[player]
    }

    fn action_values(&self, player: usize, profile: &[Vec<T>]) -> Vec<T> {
        let full: Vec<Vec<T>> = profile.iter().map(|s| full_strategy(s)).collect();
        let mut values = vec![T::zero(); self.actions[player]];
        for (flat, &u) in self.payoffs[player].iter().enumerate() {
            let joint = unravel(flat, &self.actions);
            let weight = joint
                .iter()
                .enumerate()
                .filter(|&(q, _)| q != player)
                .fold(T::one(), |w, (q, &a)| w * full[q][a]);
            values[joint[player]] = values[joint[player]] + u * weight;
        }
        values
    }

    fn reward_range(&self, player: usize) -> T {
        range_of(&self.payoffs[player])
    }
}
