//! Numerical pluripotential theory: Vandermonde determinants, Fekete
//! configurations, transfinite diameter, capacity, extremal functions,
//! and plurisubharmonic weight transforms.

mod capacity;
mod extremal;
mod fekete;
mod vandermonde;
mod weight;
mod witness;

pub use capacity::{
    bernstein_constant, capacity, BernsteinReport, CapacityBudget, CapacityEstimate, LkrEntry,
};
pub use extremal::{
    extremal_lower, extremal_lower_projective, ghull_member, per_weight_bounds, ExtremalBudget,
    ExtremalEstimate, HullVerdict, WitnessMethod,
};
pub use fekete::{fekete_search, transfinite_diameter, FeketeBudget, FeketeConfig, TdiamReport};
pub use vandermonde::{log_abs_vandermonde, vandermonde};
pub use weight::{
    h_to_l, saddulaev_transform, Family, SaddulaevReport, WeightExpr, WeightFunction,
};
pub use witness::{poly_sup_on_region, PolySup};
