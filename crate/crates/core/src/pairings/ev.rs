use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::ffield::{FieldElem, Gf, MuN};
use crate::ratfun::text::format_place;
use crate::ratfun::{
    coprime_shift, evaluate, irreducibles_of_degree, principal_divisor, residue_mod_nth_powers,
    selmer_contains, RatDivisor, RatFunc, RatPlace,
};

/// All places of degree <= b, finite ones in canonical order, infinity last.
pub fn places_up_to(k: &Gf, b: usize) -> Vec<RatPlace> {
    let mut out: Vec<RatPlace> = (1..=b)
        .flat_map(|d| irreducibles_of_degree(k, d))
        .map(RatPlace::Finite)
        .collect();
    if b >= 1 {
        out.push(RatPlace::Infinity);
    }
    out
}

/// mu_n inside F_q; a domain error when n does not divide q - 1.
pub fn mu_n(k: &Gf, n: u64) -> Result<MuN> {
    let q = k.order() as u64;
    if n == 0 || (q - 1) % n != 0 {
        return domain(format!("mu_{n} is not contained in GF({q})"));
    }
    MuN::new(k, n)
}

/// A mu_n value with its discrete log relative to the fixed generator of mu_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MuValue {
    #[serde(skip)]
    pub value: FieldElem,
    pub dlog: u64,
}

impl MuValue {
    pub fn of(mu: &MuN, value: FieldElem) -> Result<Self> {
        Ok(MuValue { value, dlog: mu.dlog(value)? })
    }

    pub fn is_one(&self) -> bool {
        self.dlog == 0
    }
}

/// phi_{n,p}(f_{n,p}) in mu_n, for ord_p f divisible by n.
pub fn local_symbol(f: &RatFunc, p: &RatPlace, n: u64) -> Result<FieldElem> {
    if f.ord(p) % n as i64 != 0 {
        return domain(format!(
            "ord of f at {} is not divisible by {n}",
            format_place(p)
        ));
    }
    residue_mod_nth_powers(f, p, n)?.power_residue_symbol()
}

/// ev_{n,S}(f) on the places of degree <= B outside S.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvVector {
    pub n: u64,
    pub bound: usize,
    pub places: Vec<RatPlace>,
    pub values: Vec<MuValue>,
}

impl EvVector {
    pub fn get(&self, p: &RatPlace) -> Option<MuValue> {
        self.places.iter().position(|q| q == p).map(|i| self.values[i])
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| v.is_one())
    }
}

pub fn ev_ns(f: &RatFunc, n: u64, s: &BTreeSet<RatPlace>, b: usize) -> Result<EvVector> {
    let k = f.field();
    let mu = mu_n(k, n)?;
    if !selmer_contains(f, n, s) {
        return domain(format!("function is not in F_{{{n},S}}"));
    }
    let places: Vec<RatPlace> = places_up_to(k, b).into_iter().filter(|p| !s.contains(p)).collect();
    let values = places
        .iter()
        .map(|p| MuValue::of(&mu, local_symbol(f, p, n)?))
        .collect::<Result<_>>()?;
    Ok(EvVector { n, bound: b, places, values })
}

/// ord_{n,S}(D): residues mod n at places outside S (nonzero entries only).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrdVector {
    pub n: u64,
    pub entries: BTreeMap<RatPlace, u64>,
}

impl OrdVector {
    pub fn get(&self, p: &RatPlace) -> u64 {
        self.entries.get(p).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// D in D_{n,S}(F): ord_p D divisible by n at every p in S.
pub fn check_dns(d: &RatDivisor, n: u64, s: &BTreeSet<RatPlace>) -> Result<()> {
    for p in s {
        let e = d.ord(p);
        if e % n as i64 != 0 {
            return domain(format!(
                "divisor has ord {e} at {}, not divisible by {n}",
                format_place(p)
            ));
        }
    }
    Ok(())
}

pub fn ord_ns(d: &RatDivisor, n: u64, s: &BTreeSet<RatPlace>, b: usize) -> Result<OrdVector> {
    check_dns(d, n, s)?;
    let entries = d
        .terms()
        .filter(|(p, _)| !s.contains(p) && p.degree() <= b)
        .map(|(p, e)| (p.clone(), e.rem_euclid(n as i64) as u64))
        .filter(|(_, e)| *e != 0)
        .collect();
    Ok(OrdVector { n, entries })
}

/// Which places a tau-type product runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// p outside S (tau_{n,S})
    Outside,
    /// p inside S (tau_{n,S-bar}, the complement of the complement)
    Inside,
}

fn in_side(side: Side, s: &BTreeSet<RatPlace>, p: &RatPlace) -> bool {
    match side {
        Side::Outside => !s.contains(p),
        Side::Inside => s.contains(p),
    }
}

/// Product over places on `side` of local symbols to the power ord_p D (place-by-place route).
pub fn tau_local(
    f: &RatFunc,
    d: &RatDivisor,
    n: u64,
    s: &BTreeSet<RatPlace>,
    side: Side,
) -> Result<MuValue> {
    let k = f.field();
    let mu = mu_n(k, n)?;
    check_memberships(f, d, n, s, side)?;
    let mut acc = k.one();
    for (p, e) in d.terms() {
        if !in_side(side, s, p) {
            continue;
        }
        let v = local_symbol(f, p, n)?;
        acc = k.mul(acc, k.pow_signed(v, e)?);
    }
    MuValue::of(&mu, acc)
}

fn check_memberships(
    f: &RatFunc,
    d: &RatDivisor,
    n: u64,
    s: &BTreeSet<RatPlace>,
    side: Side,
) -> Result<()> {
    // f must have ord divisible by n on `side`; D on the other side
    for (p, e) in principal_divisor(f).terms() {
        if in_side(side, s, p) && e % n as i64 != 0 {
            return domain(format!("function is not in the Selmer group at {}", format_place(p)));
        }
    }
    for (p, e) in d.terms() {
        if !in_side(side, s, p) && e % n as i64 != 0 {
            return domain(format!(
                "divisor has ord {e} at {}, not divisible by {n}",
                format_place(p)
            ));
        }
    }
    Ok(())
}

/// Evaluation route: drop the multiple-of-n part of D off `side`, shift f coprime to what is
/// left, then f'(D')^{(q-1)/n}.
pub fn tau_eval(
    f: &RatFunc,
    d: &RatDivisor,
    n: u64,
    s: &BTreeSet<RatPlace>,
    side: Side,
) -> Result<MuValue> {
    let k = f.field();
    let mu = mu_n(k, n)?;
    check_memberships(f, d, n, s, side)?;
    let d1 = RatDivisor::from_terms(
        d.terms().filter(|(p, _)| in_side(side, s, p)).map(|(p, e)| (p.clone(), e)),
    );
    let avoid: BTreeSet<RatPlace> = d1.support().cloned().collect();
    let f1 = coprime_shift(f, n, &avoid)?;
    let v = evaluate(&f1, &d1)?;
    let q = k.order() as u128;
    MuValue::of(&mu, k.pow(v, (q - 1) / n as u128))
}

/// tau_{n,S}(f, D), computed both ways and cross-checked.
pub fn tau_ns(f: &RatFunc, d: &RatDivisor, n: u64, s: &BTreeSet<RatPlace>) -> Result<MuValue> {
    let a = tau_local(f, d, n, s, Side::Outside)?;
    let b = tau_eval(f, d, n, s, Side::Outside)?;
    if a != b {
        return Err(Error::Domain(format!(
            "tau routes disagree: local {} vs evaluation {}",
            a.dlog, b.dlog
        )));
    }
    Ok(a)
}

/// tau_{n,S-bar}(g, D): product over p in S only.
pub fn tau_complement(g: &RatFunc, d: &RatDivisor, n: u64, s: &BTreeSet<RatPlace>) -> Result<MuValue> {
    let a = tau_local(g, d, n, s, Side::Inside)?;
    let b = tau_eval(g, d, n, s, Side::Inside)?;
    if a != b {
        return Err(Error::Domain(format!(
            "tau routes disagree: local {} vs evaluation {}",
            a.dlog, b.dlog
        )));
    }
    Ok(a)
}
