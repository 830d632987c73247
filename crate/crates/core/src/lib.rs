//! Exact jet-groupoid arithmetic, finite groupoids and their quotients,
//! Lie algebroid brackets, exponential flows and first-order linear
//! operator calculus.

mod basis;
pub mod algebroid;
pub mod dual;
pub mod finite_groupoid;
pub mod flows;
pub mod groups;
pub mod jet_groupoid;
pub mod json;
pub mod linalg;
pub mod linear_groupoid;
pub mod multijet;
pub mod poly;
pub mod random;
pub mod scalar;
pub mod verify;
