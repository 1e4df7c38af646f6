use std::collections::BTreeMap;

use crate::error::{domain, Result};
use crate::ffield::{FieldElem, Gf};
use crate::ratfun::poly::Poly;

/// A place of F_q(x): a monic irreducible polynomial or the infinite place.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RatPlace {
    Finite(Poly),
    Infinity,
}

impl RatPlace {
    /// Finite place of a monic irreducible polynomial (checked).
    pub fn finite(p: Poly) -> Result<Self> {
        if !p.is_monic() || !p.is_irreducible() {
            return domain(format!("{p:?} is not monic irreducible"));
        }
        Ok(RatPlace::Finite(p))
    }

    pub fn degree(&self) -> usize {
        match self {
            RatPlace::Finite(p) => p.degree(),
            RatPlace::Infinity => 1,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, RatPlace::Infinity)
    }

    pub fn poly(&self) -> Option<&Poly> {
        match self {
            RatPlace::Finite(p) => Some(p),
            RatPlace::Infinity => None,
        }
    }

    /// Residue field; for the infinite place it is F_q itself, modelled as F_q[x]/(x).
    pub fn residue_field(&self, field: &Gf) -> ResidueField {
        match self {
            RatPlace::Finite(p) => ResidueField::new(p.clone()),
            RatPlace::Infinity => ResidueField::new(Poly::x(field)),
        }
    }
}

/// The residue field F_q[x]/(pi).
#[derive(Clone, Debug)]
pub struct ResidueField {
    modulus: Poly,
}

impl ResidueField {
    pub fn new(modulus: Poly) -> Self {
        ResidueField { modulus }
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn field(&self) -> &Gf {
        self.modulus.field()
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree()
    }

    /// Cardinality q^deg.
    pub fn order(&self) -> u128 {
        (self.field().order() as u128).pow(self.degree() as u32)
    }

    pub fn reduce(&self, a: &Poly) -> Poly {
        a.rem(&self.modulus)
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a.mulmod(b, &self.modulus)
    }

    pub fn pow(&self, a: &Poly, e: u128) -> Poly {
        a.powmod(e, &self.modulus)
    }

    pub fn inv(&self, a: &Poly) -> Result<Poly> {
        match a.inv_mod(&self.modulus) {
            Some(b) => Ok(b),
            None => domain("zero has no inverse in the residue field"),
        }
    }

    /// Norm down to F_q: a^{(q^d - 1)/(q - 1)}.
    pub fn norm(&self, a: &Poly) -> FieldElem {
        let q = self.field().order() as u128;
        let e = (self.order() - 1) / (q - 1);
        let r = self.pow(a, e);
        debug_assert!(r.is_constant());
        r.coeff(0)
    }

    /// Whether `a` (nonzero) is an n-th power in the residue field.
    pub fn is_nth_power(&self, a: &Poly, n: u64) -> bool {
        let g = crate::ffield::gcd(n, (self.order() - 1) as u64) as u128;
        self.pow(a, (self.order() - 1) / g).is_one()
    }
}

/// Finite formal sum of places with nonzero integer multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatDivisor {
    terms: BTreeMap<RatPlace, i64>,
}

impl RatDivisor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_place(p: RatPlace, k: i64) -> Self {
        let mut d = Self::zero();
        d.add_term(p, k);
        d
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (RatPlace, i64)>) -> Self {
        let mut d = Self::zero();
        for (p, k) in terms {
            d.add_term(p, k);
        }
        d
    }

    pub fn add_term(&mut self, p: RatPlace, k: i64) {
        if k == 0 {
            return;
        }
        let e = self.terms.entry(p.clone()).or_insert(0);
        *e += k;
        if *e == 0 {
            self.terms.remove(&p);
        }
    }

    pub fn ord(&self, p: &RatPlace) -> i64 {
        self.terms.get(p).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&RatPlace, i64)> {
        self.terms.iter().map(|(p, &k)| (p, k))
    }

    pub fn support(&self) -> impl Iterator<Item = &RatPlace> {
        self.terms.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(p, &k)| k * p.degree() as i64).sum()
    }

    pub fn is_effective(&self) -> bool {
        self.terms.values().all(|&k| k > 0)
    }

    pub fn add(&self, o: &RatDivisor) -> RatDivisor {
        let mut d = self.clone();
        for (p, k) in o.terms() {
            d.add_term(p.clone(), k);
        }
        d
    }

    pub fn scale(&self, c: i64) -> RatDivisor {
        RatDivisor::from_terms(self.terms().map(|(p, k)| (p.clone(), k * c)))
    }

    pub fn neg(&self) -> RatDivisor {
        self.scale(-1)
    }

    pub fn sub(&self, o: &RatDivisor) -> RatDivisor {
        self.add(&o.neg())
    }

    pub fn contains(&self, p: &RatPlace) -> bool {
        self.terms.contains_key(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FiniteField;

    #[test]
    fn divisor_bookkeeping() {
        let k = FiniteField::prime(5).unwrap();
        let p = RatPlace::finite(Poly::from_ints(&k, &[-1, 1])).unwrap();
        let d = RatDivisor::from_terms([(p.clone(), 2), (RatPlace::Infinity, -1)]);
        assert_eq!(d.degree(), 1);
        let e = d.add(&RatDivisor::from_place(p.clone(), -2));
        assert_eq!(e.ord(&p), 0);
        assert!(!e.contains(&p));
        assert_eq!(e.degree(), -1);
    }

    #[test]
    fn rejects_reducible() {
        let k = FiniteField::prime(5).unwrap();
        assert!(RatPlace::finite(Poly::from_ints(&k, &[1, 0, 1])).is_err());
        let k3 = FiniteField::prime(3).unwrap();
        assert!(RatPlace::finite(Poly::from_ints(&k3, &[1, 0, 1])).is_ok());
    }

    #[test]
    fn residue_norm_of_i() {
        let k3 = FiniteField::prime(3).unwrap();
        let rf = RatPlace::finite(Poly::from_ints(&k3, &[1, 0, 1])).unwrap().residue_field(&k3);
        assert_eq!(rf.order(), 9);
        assert_eq!(rf.norm(&Poly::x(&k3)), FieldElem(1));
    }
}
