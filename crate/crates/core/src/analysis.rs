//! Closed-form analysis of GA-SPP dynamics in `2 x 2` games.
//!
//! Away from the boundary one GA-SPP iteration is affine:
//! `(a, b)' - (a, b) = eta * U (a, b) + eta * offset` with
//! `U = [[g u_r u_c, u_r], [u_c, g u_r u_c]]`. The sign of `u_r u_c` splits
//! the games into three cases: singular `U`, complex eigenvalues with
//! negative real part, and real eigenvalues of opposite sign. In the last
//! case the eigen-coordinates `F` (expanding) and `G` (contracting) decide
//! which equilibrium attracts a starting point.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, Reduced2x2Params};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DynamicsCase {
    /// `u_r u_c = 0`.
    Case1Singular,
    /// `u_r u_c < 0`.
    Case2Imaginary,
    /// `u_r u_c > 0`.
    Case3Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dynamics2x2<T> {
    pub params: Reduced2x2Params<T>,
    pub gamma: T,
    pub u: [[T; 2]; 2],
    /// `g u_r u_c + sqrt(u_r u_c)` and `g u_r u_c - sqrt(u_r u_c)`.
    pub eigenvalues: [Complex<T>; 2],
    /// Zero of the unconstrained update, when `U` is invertible.
    pub center: Option<(T, T)>,
    pub case: DynamicsCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenCoords<T> {
    pub f: T,
    pub g: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Prediction<T> {
    /// Case 1: the strategies stop changing after finitely many steps.
    ConvergesFiniteSteps,
    /// Case 2: convergence to an equilibrium.
    ConvergesToNe,
    /// Case 3 starting on the stable line through the center.
    Center {
        alpha: T,
        beta: T,
    },
    /// Case 3 converging to a pure profile.
    Corner {
        alpha: T,
        beta: T,
    },
    Indeterminate,
}

impl<T: Scalar> std::fmt::Display for Prediction<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Prediction::ConvergesFiniteSteps => write!(f, "ConvergesFiniteSteps"),
            Prediction::ConvergesToNe => write!(f, "ConvergesToNE"),
            Prediction::Center { alpha, beta } => write!(f, "Center({alpha}, {beta})"),
            Prediction::Corner { alpha, beta } => write!(f, "Corner({alpha}, {beta})"),
            Prediction::Indeterminate => write!(f, "Indeterminate"),
        }
    }
}

/// Builds the linearised dynamics of a `2 x 2` game at prediction length `gamma`.
pub fn analyze<T: Scalar>(game: &BimatrixGame<T>, gamma: T) -> Result<Dynamics2x2<T>> {
    let params = game.reduced_2x2()?;
    if !(gamma.is_finite() && gamma > T::zero()) {
        return Err(Error::InvalidInput("gamma must be positive".into()));
    }
    Ok(from_params(params, gamma))
}

pub fn from_params<T: Scalar>(params: Reduced2x2Params<T>, gamma: T) -> Dynamics2x2<T> {
    let Reduced2x2Params { u_r, b_r, u_c, b_c } = params;
    let product = u_r * u_c;
    let diag = gamma * product;
    let u = [[diag, u_r], [u_c, diag]];

    let root = if product >= T::zero() {
        Complex::new(product.sqrt(), T::zero())
    } else {
        Complex::new(T::zero(), (-product).sqrt())
    };
    let base = Complex::new(diag, T::zero());
    let eigenvalues = [base + root, base - root];

    let case = if product == T::zero() {
        DynamicsCase::Case1Singular
    } else if product < T::zero() {
        DynamicsCase::Case2Imaginary
    } else {
        DynamicsCase::Case3Real
    };
    let det = diag * diag - product;
    let center = (product != T::zero() && det != T::zero()).then(|| (-b_c / u_c, -b_r / u_r));

    Dynamics2x2 {
        params,
        gamma,
        u,
        eigenvalues,
        center,
        case,
    }
}

impl<T: Scalar> Dynamics2x2<T> {
    /// Constant term of the unconstrained update,
    /// `(g u_r b_c + b_r, g u_c b_r + b_c)`.
    pub fn offset(&self) -> (T, T) {
        let Reduced2x2Params { u_r, b_r, u_c, b_c } = self.params;
        (self.gamma * u_r * b_c + b_r, self.gamma * u_c * b_r + b_c)
    }

    /// `(a, b)' - (a, b)` for one unclipped GA-SPP iteration with step `eta`.
    pub fn unconstrained_step(&self, eta: T, alpha: T, beta: T) -> (T, T) {
        let (o1, o2) = self.offset();
        (
            eta * (self.u[0][0] * alpha + self.u[0][1] * beta + o1),
            eta * (self.u[1][0] * alpha + self.u[1][1] * beta + o2),
        )
    }

    /// Eigen-coordinates of `(alpha, beta)` in Case 3.
    ///
    /// With `x = alpha - alpha_c` and `y = beta - beta_c`, `F = x + s k y`
    /// and `G = x - s k y` where `k = sqrt(u_r / u_c)` and `s` is the common
    /// sign of `u_r` and `u_c`. For `u_r, u_c < 0`, flipping the sign of `y`
    /// maps the dynamics onto the positive case, so `F` always follows the
    /// expanding eigenvalue and `G` the contracting one:
    /// `F' = (1 + eta l1) F`, `G' = (1 + eta l2) G`.
    pub fn eigencoords(&self, alpha: T, beta: T) -> Result<EigenCoords<T>> {
        let (Some((ac, bc)), DynamicsCase::Case3Real) = (self.center, self.case) else {
            return Err(Error::UnsupportedCase(format!(
                "eigen-coordinates need real eigenvalues and an invertible U, got {:?}",
                self.case
            )));
        };
        let (x, y) = (alpha - ac, beta - bc);
        let k = (self.params.u_r / self.params.u_c).sqrt() * self.sign();
        Ok(EigenCoords {
            f: x + k * y,
            g: x - k * y,
        })
    }

    fn sign(&self) -> T {
        if self.params.u_r < T::zero() {
            -T::one()
        } else {
            T::one()
        }
    }

    /// Qualitative outcome of GA-SPP from `(alpha, beta)`.
    ///
    /// Case 3 with the center inside the unit square follows the sign of
    /// `F` at the start. With a center coordinate outside `[0, 1]` one
    /// player has a dominant action, which fixes that player's limit and
    /// then the other player's best response.
    pub fn predict_outcome(&self, alpha: T, beta: T) -> Prediction<T> {
        match self.case {
            DynamicsCase::Case1Singular => Prediction::ConvergesFiniteSteps,
            DynamicsCase::Case2Imaginary => Prediction::ConvergesToNe,
            DynamicsCase::Case3Real => self.predict_real(alpha, beta),
        }
    }

    fn predict_real(&self, alpha: T, beta: T) -> Prediction<T> {
        let Some((ac, bc)) = self.center else {
            return Prediction::Indeterminate;
        };
        let (zero, one) = (T::zero(), T::one());
        let in_range = |v: T| v >= zero && v <= one;
        let corner = |up: bool| if up { one } else { zero };
        let Reduced2x2Params { u_r, u_c, .. } = self.params;

        if in_range(ac) && in_range(bc) {
            let Ok(EigenCoords { f, .. }) = self.eigencoords(alpha, beta) else {
                return Prediction::Indeterminate;
            };
            let positive = self.sign() > zero;
            return if f == zero {
                Prediction::Center { alpha: ac, beta: bc }
            } else if f > zero {
                Prediction::Corner {
                    alpha: one,
                    beta: corner(positive),
                }
            } else {
                Prediction::Corner {
                    alpha: zero,
                    beta: corner(!positive),
                }
            };
        }

        // dV_r/dalpha = u_r (beta - beta_c), dV_c/dbeta = u_c (alpha - alpha_c).
        let best = |slope: T, at: T, center: T| -> Option<T> {
            let g = slope * (at - center);
            if g > zero {
                Some(one)
            } else if g < zero {
                Some(zero)
            } else {
                None
            }
        };
        let limit = if !in_range(bc) {
            // Sign of u_r (beta - beta_c) is the same for every beta in [0, 1].
            best(u_r, T::lit(0.5), bc).and_then(|a| best(u_c, a, ac).map(|b| (a, b)))
        } else {
            best(u_c, T::lit(0.5), ac).and_then(|b| best(u_r, b, bc).map(|a| (a, b)))
        };
        match limit {
            Some((alpha, beta)) => Prediction::Corner { alpha, beta },
            None => Prediction::Indeterminate,
        }
    }
}
