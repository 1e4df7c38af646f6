//! The rational function field F_q(x).

pub mod func;
pub mod place;
pub mod poly;
pub mod selmer;
pub mod text;
pub mod weil;

pub use func::{
    coprime_shift, evaluate, principal_divisor, residue_mod_nth_powers,
    residue_mod_nth_powers_with, selmer_contains, support, NthPowerClass, RatFunc,
};
pub use place::{RatDivisor, RatPlace, ResidueField};
pub use poly::{factor, irreducibles_of_degree, Factorization, Poly};
pub use selmer::{selmer_basis, SelmerBasis};
pub use weil::{weil_check, WeilReport};
