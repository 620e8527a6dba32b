//! The reduced strategy polytope `{x : x_i >= 0, sum(x) <= 1}` and its
//! Euclidean projection operators.
//!
//! A mixed strategy over `m` actions is stored by its first `m - 1`
//! probabilities; the last one is implied. Projections are taken in these
//! reduced coordinates, which is a different metric from projecting the
//! full probability vector onto the standard simplex.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{seq_sum, Scalar};

/// The reduced simplex of a given dimension (number of actions minus one).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexSet {
    dim: usize,
}

impl SimplexSet {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("simplex dimension must be >= 1".into()));
        }
        Ok(Self { dim })
    }

    /// Reduced simplex for a player with `actions` pure actions.
    pub fn for_actions(actions: usize) -> Result<Self> {
        if actions < 2 {
            return Err(Error::InvalidInput(format!(
                "a player needs at least 2 actions, got {actions}"
            )));
        }
        Self::new(actions - 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Membership within the absolute feasibility tolerance.
    pub fn contains<T: Scalar>(&self, x: &[T]) -> bool {
        x.len() == self.dim && contains(x)
    }

    /// Euclidean projection onto the set.
    pub fn project<T: Scalar>(&self, x: &[T]) -> Result<ReducedStrategy<T>> {
        self.check_len(x.len())?;
        check_finite(x)?;
        Ok(ReducedStrategy { coords: project(x) })
    }

    /// Projection of `v` onto the tangent cone of the set at `x`.
    pub fn projected_gradient<T: Scalar>(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        self.check_len(x.len())?;
        self.check_len(v.len())?;
        check_finite(v)?;
        if !contains(x) {
            return Err(Error::InvalidInput(format!(
                "point {x:?} lies outside the reduced simplex"
            )));
        }
        Ok(projected_gradient(x, v))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::InvalidInput(format!(
                "expected a vector of length {}, got {len}",
                self.dim
            )));
        }
        Ok(())
    }
}

/// A point of the reduced simplex: the first `m - 1` action probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReducedStrategy<T> {
    coords: Vec<T>,
}

impl<T: Scalar> ReducedStrategy<T> {
    /// Wraps `coords`, rejecting points outside the simplex.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("empty strategy".into()));
        }
        check_finite(&coords)?;
        if !contains(&coords) {
            return Err(Error::InvalidInput(format!(
                "strategy {coords:?} lies outside the reduced simplex"
            )));
        }
        Ok(Self { coords })
    }

    /// Reduced form of a full probability vector (drops the last entry).
    pub fn from_full(full: &[T]) -> Result<Self> {
        if full.len() < 2 {
            return Err(Error::InvalidInput("a full strategy needs at least 2 entries".into()));
        }
        let total = seq_sum(full);
        if (total - T::one()).abs() > T::feasibility_tol() {
            return Err(Error::InvalidInput(format!(
                "full strategy {full:?} does not sum to one"
            )));
        }
        Self::new(full[..full.len() - 1].to_vec())
    }

    /// Uniform mixed strategy over `actions` pure actions.
    pub fn uniform(actions: usize) -> Result<Self> {
        let set = SimplexSet::for_actions(actions)?;
        let p = T::one() / T::from_usize(actions).expect("action count fits scalar");
        Ok(Self {
            coords: vec![p; set.dim()],
        })
    }

    /// Pure strategy playing `action` out of `actions`.
    pub fn pure(action: usize, actions: usize) -> Result<Self> {
        let set = SimplexSet::for_actions(actions)?;
        if action >= actions {
            return Err(Error::InvalidInput(format!(
                "action {action} out of range for {actions} actions"
            )));
        }
        let mut coords = vec![T::zero(); set.dim()];
        if action < set.dim() {
            coords[action] = T::one();
        }
        Ok(Self { coords })
    }

    pub(crate) fn from_raw(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The full probability vector, last entry `1 - sum(coords)`.
    pub fn to_full(&self) -> Vec<T> {
        full_strategy(&self.coords)
    }

    pub fn into_inner(self) -> Vec<T> {
        self.coords
    }
}

impl<T> AsRef<[T]> for ReducedStrategy<T> {
    fn as_ref(&self) -> &[T] {
        &self.coords
    }
}

/// Appends the dependent last probability. Works for any vector, feasible or not.
pub fn full_strategy<T: Scalar>(reduced: &[T]) -> Vec<T> {
    let mut full = Vec::with_capacity(reduced.len() + 1);
    full.extend_from_slice(reduced);
    full.push(T::one() - seq_sum(reduced));
    full
}

/// True iff `x` is in the reduced simplex within the feasibility tolerance.
pub fn contains<T: Scalar>(x: &[T]) -> bool {
    let tol = T::feasibility_tol();
    x.iter().all(|&v| v.is_finite() && v >= -tol) && seq_sum(x) <= T::one() + tol
}

fn exactly_feasible<T: Scalar>(x: &[T]) -> bool {
    x.iter().all(|&v| v >= T::zero()) && seq_sum(x) <= T::one()
}

fn check_finite<T: Scalar>(x: &[T]) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("non-finite entry in {x:?}")))
    }
}

/// Euclidean projection of a finite vector onto the reduced simplex.
///
/// Clamps to the nonnegative orthant; when that overshoots the sum
/// constraint the sum face is active and the sort-and-threshold projection
/// onto `{x >= 0, sum(x) = 1}` is used instead. Exactly feasible inputs are
/// returned unchanged, and outputs are always exactly feasible, so the map
/// is bitwise idempotent.
pub fn project<T: Scalar>(x: &[T]) -> Vec<T> {
    if exactly_feasible(x) {
        return x.to_vec();
    }
    let clamped: Vec<T> = x.iter().map(|&v| v.max(T::zero())).collect();
    if seq_sum(&clamped) <= T::one() {
        return clamped;
    }

    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    let mut cumulative = T::zero();
    let mut theta = T::zero();
    for (k, &v) in sorted.iter().enumerate() {
        cumulative = cumulative + v;
        let t = (cumulative - T::one()) / T::from_usize(k + 1).unwrap();
        if v > t {
            theta = t;
        } else {
            break;
        }
    }
    let mut out: Vec<T> = x.iter().map(|&v| (v - theta).max(T::zero())).collect();
    trim_to_unit_sum(&mut out);
    out
}

// Rounding can leave the thresholded sum a few ulps above one.
fn trim_to_unit_sum<T: Scalar>(out: &mut [T]) {
    for _ in 0..64 {
        let excess = seq_sum(out) - T::one();
        if excess <= T::zero() {
            return;
        }
        let (i, &largest) = out
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(Ordering::Equal))
            .expect("non-empty vector");
        out[i] = (largest - excess.max(largest * T::epsilon())).max(T::zero());
    }
}

/// Projection of `v` onto the tangent cone of the reduced simplex at `x`.
///
/// The cone is `{d : d_i >= 0 where x_i = 0; sum(d) <= 0 where sum(x) = 1}`,
/// with faces treated as active within the feasibility tolerance. This is the
/// limit of `(project(x + eps * v) - x) / eps` as `eps -> 0`.
pub fn projected_gradient<T: Scalar>(x: &[T], v: &[T]) -> Vec<T> {
    let tol = T::feasibility_tol();
    let at_zero: Vec<bool> = x.iter().map(|&xi| xi <= tol).collect();
    let clamp = |vi: T, active: bool| if active { vi.max(T::zero()) } else { vi };

    let sum_active = seq_sum(x) >= T::one() - tol;
    let clamped: Vec<T> = v.iter().zip(&at_zero).map(|(&vi, &a)| clamp(vi, a)).collect();
    if !sum_active || seq_sum(&clamped) <= T::zero() {
        return clamped;
    }

    // Sum face active: d_i = v_i - lambda on free coordinates and
    // max(v_i - lambda, 0) on coordinates pinned at zero, with lambda > 0
    // chosen so that sum(d) = 0.
    let free_sum = v
        .iter()
        .zip(&at_zero)
        .filter(|(_, &a)| !a)
        .fold(T::zero(), |acc, (&vi, _)| acc + vi);
    let free_count = at_zero.iter().filter(|&&a| !a).count();
    let mut pinned: Vec<T> = v.iter().zip(&at_zero).filter(|(_, &a)| a).map(|(&vi, _)| vi).collect();
    pinned.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));

    let mut lambda = T::zero();
    let mut total = free_sum;
    for k in 0..=pinned.len() {
        if k > 0 {
            total = total + pinned[k - 1];
        }
        let count = free_count + k;
        if count == 0 {
            continue;
        }
        let candidate = total / T::from_usize(count).unwrap();
        let included_ok = k == 0 || pinned[k - 1] > candidate;
        let excluded_ok = k == pinned.len() || pinned[k] <= candidate;
        if included_ok && excluded_ok {
            lambda = candidate;
            break;
        }
    }

    v.iter()
        .zip(&at_zero)
        .map(|(&vi, &a)| {
            let d = vi - lambda;
            if a {
                d.max(T::zero())
            } else {
                d
            }
        })
        .collect()
}
