//! Discrete exterior calculus on uniform rectilinear 2D grids.
//!
//! Differentiation acts on staggered cochains (vertex / edge / face values), so `d`
//! is pure incidence arithmetic. Pointwise operations (`⋆`, `∧`, `Q`, products with
//! scalar fields) act on components co-located at the vertices. Conversions between
//! the two layouts are [`DiscreteForm::to_colocated`] and [`DiscreteForm::to_staggered`].

mod form;
mod grid;
mod ops;

pub use form::{DiscreteForm, Layout};
pub use grid::Grid2;
pub use ops::{codiff, d, l2_inner, l2_norm, q_field, star, wedge};

use crate::error::Result;

/// The coefficient Γ of the integrability condition `dω = Γ∧ω`.
#[derive(Clone, Debug)]
pub enum FrobeniusCoefficient {
    /// Γ = dη.
    Exact(DiscreteForm),
    General(DiscreteForm),
}

impl FrobeniusCoefficient {
    /// Γ as a 1-form; exact coefficients are differentiated on demand.
    pub fn gamma(&self) -> Result<DiscreteForm> {
        match self {
            FrobeniusCoefficient::Exact(eta) => {
                eta.expect_degree(0, "exact Frobenius coefficient")?;
                d(eta)
            }
            FrobeniusCoefficient::General(g) => {
                g.expect_degree(1, "Frobenius coefficient")?;
                Ok(g.clone())
            }
        }
    }

    pub fn eta(&self) -> Option<&DiscreteForm> {
        match self {
            FrobeniusCoefficient::Exact(eta) => Some(eta),
            FrobeniusCoefficient::General(_) => None,
        }
    }
}
