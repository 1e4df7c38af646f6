//! Finite abelian groups via Smith normal form, and ray class groups of F_q(x).

pub mod group;
pub mod matrix;
pub mod oracle;
pub mod ray;

pub use group::{subgroup_of_zn, FinAbGroup, ZnSubgroup};
pub use matrix::{smith_mod_n, smith_normal_form, HnfModN, IntMatrix, Smith};
pub use ray::{
    ray_class_group, ray_class_structural, RayClassData, StructuralRay, DEFAULT_BOUND, MAX_BOUND,
};
pub use oracle::{ray_oracle_check, RayOracleReport};
