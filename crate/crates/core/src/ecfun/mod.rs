//! Elliptic function fields over prime fields: curves, places, Miller functions, Tate pairing.

pub mod checks;
pub mod curve;
pub mod func;
pub mod tate;

pub use curve::{
    format_curve, format_point, parse_curve, parse_point, places_up_to_degree, Curve, CurveRef,
    ECDivisor, ECPlace, ECPoint,
};
pub use func::{
    ec_evaluate, function_with_divisor, line, miller_function, mu_log, nth_root_function, vertical,
    Factor, MillerFunc,
};
pub use tate::{embedding_degree, select_curve, tate_pairing, SelectedCurve, Tate, TateValue};
pub use checks::{ec_weil_check, tate_check, TateReport};
