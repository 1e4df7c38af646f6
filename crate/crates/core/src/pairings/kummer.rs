use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::abgroup::{ray_class_group, RayClassData, DEFAULT_BOUND};
use crate::artin::checks::random_ray_function;
use crate::artin::{is_nth_power, GaloisElem, KummerExt};
use crate::error::{domain, Error, Result};
use crate::pairings::ev::{tau_ns, MuValue};
use crate::pairings::table::{coordinate_vectors, modulus_of, PairingTable};
use crate::ratfun::text::{format_divisor, format_func_body};
use crate::ratfun::{principal_divisor, RatDivisor, RatFunc, RatPlace};

/// Coordinates of f on the Kummer generators of `ext`, modulo n-th powers.
pub fn kummer_coordinates(ext: &KummerExt, f: &RatFunc) -> Result<Vec<u64>> {
    let orders: Vec<u64> = ext.orders.clone();
    for a in coordinate_vectors(&orders) {
        let mut prod = f.clone();
        for (g, &e) in ext.gens.iter().zip(&a) {
            prod = prod.div(&g.pow(e as i64));
        }
        if is_nth_power(&prod, ext.n)? {
            return Ok(a);
        }
    }
    domain(format!("{} is not in the span of the Kummer generators", format_func_body(f)))
}

/// kappa(f, g) = g(y)/y for y^n = f.
pub fn kummer_pairing(ext: &KummerExt, f: &RatFunc, g: &GaloisElem) -> Result<MuValue> {
    let a = kummer_coordinates(ext, f)?;
    let n = ext.n;
    let dlog = a.iter().zip(&g.zetas).map(|(x, z)| x * z % n).sum::<u64>() % n;
    Ok(MuValue { value: ext.mu().element(dlog), dlog })
}

/// t_{n,m}(f, c) = kappa(f, A(c)) for the maximal exponent-n Kummer extension unramified
/// outside m.
pub struct TnmContext {
    pub n: u64,
    pub modulus: RatDivisor,
    pub support: BTreeSet<RatPlace>,
    pub ext: KummerExt,
    pub ray: RayClassData,
}

impl TnmContext {
    pub fn new(k: &crate::ffield::Gf, n: u64, s: &BTreeSet<RatPlace>) -> Result<Self> {
        let m = modulus_of(s);
        let ext = KummerExt::maximal(k, n, &m)?;
        let ray = ray_class_group(k, &m, n, DEFAULT_BOUND)?;
        Ok(TnmContext { n, modulus: m, support: s.clone(), ext, ray })
    }

    fn kappa_artin(&self, f: &RatFunc, d: &RatDivisor) -> Result<MuValue> {
        kummer_pairing(&self.ext, f, &self.ext.artin_map(d)?)
    }

    /// The pairing on a ray class given by coordinates; asserts agreement with tau_{n,S} and
    /// independence of the representative (shifts by div(g), g = 1 mod m, and by nD).
    pub fn t_nm(&self, f: &RatFunc, c: &[u64]) -> Result<MuValue> {
        let d = self.ray.divisor_of(c);
        let v = self.kappa_artin(f, &d)?;
        let tau = tau_ns(f, &d, self.n, &self.support)?;
        if v != tau {
            return Err(Error::Domain(format!(
                "t_nm({}, {}) = {} but tau = {}",
                format_func_body(f),
                format_divisor(&d),
                v.dlog,
                tau.dlog
            )));
        }
        let k = f.field();
        let mut rng = ChaCha8Rng::seed_from_u64(c.iter().fold(17u64, |h, &x| h.wrapping_mul(31).wrapping_add(x)));
        let g = random_ray_function(k, &self.modulus, &mut rng);
        let mut shifted = d.add(&principal_divisor(&g));
        if !self.ray.invariants().is_empty() {
            shifted = shifted.add(&self.ray.basis_divisor(0).scale(self.n as i64));
        }
        if self.kappa_artin(f, &shifted)? != v {
            return Err(Error::Domain(format!(
                "t_nm is not well defined at {}: representative {} differs",
                format_divisor(&d),
                format_divisor(&shifted)
            )));
        }
        Ok(v)
    }

    /// t_{n,m} on Selmer basis classes against Cl_m/nCl_m.
    pub fn table(&self) -> Result<PairingTable> {
        let left = self.ext.orders.clone();
        let right = self.ray.invariants().to_vec();
        let elem = |a: &[u64]| {
            let k = &self.ext.field;
            self.ext.gens.iter().zip(a).fold(RatFunc::one(k), |acc, (g, &e)| acc.mul(&g.pow(e as i64)))
        };
        PairingTable::tabulate(
            self.n,
            &left,
            &right,
            |a| format_func_body(&elem(a)),
            |b| format_divisor(&self.ray.divisor_of(b)),
            |a, b| Ok(self.t_nm(&elem(a), b)?.dlog),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::{FieldElem, FiniteField};
    use crate::pairings::table::tau_bar_table;
    use crate::ratfun::text::parse_func;
    use crate::ratfun::Poly;

    fn setup() -> (crate::ffield::Gf, BTreeSet<RatPlace>) {
        let k = FiniteField::prime(5).unwrap();
        let s = [
            RatPlace::finite(Poly::from_ints(&k, &[0, 1])).unwrap(),
            RatPlace::finite(Poly::from_ints(&k, &[-1, 1])).unwrap(),
        ]
        .into();
        (k, s)
    }

    #[test]
    fn kummer_pairing_examples() {
        let (k, s) = setup();
        let ctx = TnmContext::new(&k, 4, &s).unwrap();
        let f1 = ctx.ext.gens[0].clone();
        assert!(kummer_pairing(&ctx.ext, &f1, &ctx.ext.identity()).unwrap().is_one());
        let mut g = ctx.ext.identity();
        let two = ctx.ext.mu().dlog(FieldElem(2)).unwrap();
        g.zetas[0] = two;
        assert_eq!(kummer_pairing(&ctx.ext, &f1, &g).unwrap().value, FieldElem(2));
        let x = parse_func("x over GF(5)").unwrap();
        assert!(kummer_pairing(&ctx.ext, &x, &g).is_err());
    }

    #[test]
    fn t_nm_examples() {
        let (k, s) = setup();
        let ctx = TnmContext::new(&k, 4, &s).unwrap();
        let f = parse_func("x/(x-1) over GF(5)").unwrap();
        let d = RatDivisor::from_place(RatPlace::finite(Poly::from_ints(&k, &[-2, 1])).unwrap(), 1);
        let c = ctx.ray.element(&d).unwrap();
        let v = ctx.t_nm(&f, &c).unwrap();
        assert_eq!(v.value, FieldElem(2));
        let zero = vec![0; c.len()];
        assert!(ctx.t_nm(&f, &zero).unwrap().is_one());
        assert!(ctx.t_nm(&RatFunc::one(&k), &c).unwrap().is_one());
        let t = ctx.table().unwrap();
        let tb = tau_bar_table(&k, 4, &s).unwrap();
        assert_eq!(t.entries.len(), 16);
        assert_eq!((&t.left, &t.right), (&tb.left, &tb.right));
        assert_eq!(t.entries, tb.entries);
    }
}
