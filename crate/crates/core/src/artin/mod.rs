//! Artin maps of Kummer-times-constant extensions of F_q(x), the h-function of the
//! Ate-style description, and the reciprocity / kernel / norm verification suites.

pub mod checks;
pub mod ext;
pub mod lemma_ext;

pub use ext::{format_extension, is_nth_power, order_mod_nth_powers, parse_extension, GaloisElem, KummerExt};
