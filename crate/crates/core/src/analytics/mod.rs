//! Closed-form results, quadrature, root finding and the Fokker–Planck solver.

pub mod closed_form;
pub mod fokker_planck;
pub mod quadrature;
pub mod roots;

pub use closed_form::*;
pub use fokker_planck::{fokker_planck_survival, FPGrid, SurvivalCurve};
pub use quadrature::{integrate, QuadResult, QuadratureSpec};
pub use roots::bisect;
