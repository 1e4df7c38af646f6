//! The pairing tower over F_q(x): ev, ord, tau and its induced pairings, adjointness,
//! non-degeneracy and exactness harnesses.

pub mod adjoint;
pub mod ev;
pub mod harness;
pub mod kummer;
pub mod table;

pub use ev::{
    ev_ns, local_symbol, mu_n, ord_ns, places_up_to, tau_complement, tau_eval, tau_local, tau_ns,
    EvVector, MuValue, OrdVector, Side,
};
pub use table::{nondegeneracy_check, tau_bar_table, NondegeneracyReport, PairingTable};
pub use adjoint::{adjoint_samples, adjointness_check, AdjointInput, AdjointReport, AdjointSample};
pub use kummer::{kummer_coordinates, kummer_pairing, TnmContext};
pub use harness::{
    cardinality_identity, ev_surjectivity_witnesses, exactness_check, five_lemma_check, kernel_containment_check,
};
