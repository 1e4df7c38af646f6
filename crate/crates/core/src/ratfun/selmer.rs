use std::collections::BTreeSet;

use crate::abgroup::{smith_normal_form, subgroup_of_zn, FinAbGroup, IntMatrix, ZnSubgroup};
use crate::error::{domain, Error, Result};
use crate::ffield::{gcd, Gf};
use crate::ratfun::func::{principal_divisor, selmer_contains, RatFunc};
use crate::ratfun::place::RatPlace;
use crate::ratfun::poly::Poly;

/// Generators of F_{n,S}/(F^x)^n together with a coordinate map.
///
/// Coordinates of f = c * prod pi^{e_pi} * (n-th power) are
/// ((n/g) log c mod n, e_pi mod n for finite pi in S) inside (Z/n)^{1+s}, g = gcd(n, q-1).
#[derive(Clone, Debug)]
pub struct SelmerBasis {
    pub field: Gf,
    pub n: u64,
    pub places: BTreeSet<RatPlace>,
    /// Finite places of S in coordinate order.
    pub finite: Vec<Poly>,
    /// Independent generators and their orders.
    pub gens: Vec<(RatFunc, u64)>,
    sub: ZnSubgroup,
}

fn signed(v: i128, n: i128) -> i64 {
    let r = v.rem_euclid(n);
    (if 2 * r > n { r - n } else { r }) as i64
}

impl SelmerBasis {
    pub fn group(&self) -> FinAbGroup {
        self.sub.group()
    }

    pub fn order(&self) -> u128 {
        self.sub.order()
    }

    fn raw_coords(&self, f: &RatFunc) -> Result<Vec<i128>> {
        let k = &self.field;
        let n = self.n;
        let g = gcd(n, k.order() as u64 - 1);
        let c = k.div(f.num().lc(), f.den().lc())?;
        let mut v = vec![((n / g) * (k.log(c)? % g)) as i128];
        for pi in &self.finite {
            v.push(f.ord(&RatPlace::Finite(pi.clone())) as i128);
        }
        Ok(v)
    }

    /// Coordinates of a Selmer element with respect to `gens`.
    pub fn coords(&self, f: &RatFunc) -> Result<Vec<u64>> {
        if !selmer_contains(f, self.n, &self.places) {
            return domain(format!("{f:?} is not in the Selmer group"));
        }
        self.sub
            .coords(&self.raw_coords(f)?)
            .ok_or_else(|| Error::Domain("coordinates outside the Selmer subgroup".into()))
    }

    /// Product of generators with the given exponents.
    pub fn element(&self, exps: &[u64]) -> RatFunc {
        let mut f = RatFunc::one(&self.field);
        for ((g, _), &e) in self.gens.iter().zip(exps) {
            f = f.mul(&g.pow(e as i64));
        }
        f
    }

    /// Whether f lies in (F^x)^n, judged on coordinates.
    pub fn is_nth_power(&self, f: &RatFunc) -> Result<bool> {
        Ok(self.coords(f)?.iter().all(|&c| c == 0))
    }
}

/// Independent generators of F_{n,S}/(F^x)^n, found as the kernel mod n of the
/// degree relation (when infinity is outside S) via Smith normal form.
pub fn selmer_basis(k: &Gf, n: u64, s: &BTreeSet<RatPlace>) -> Result<SelmerBasis> {
    if n == 0 || n % k.characteristic() as u64 == 0 {
        return domain(format!("n = {n} is not coprime to q"));
    }
    let q = k.order() as u64;
    let g = gcd(n, q - 1);
    let nn = n as i128;
    let finite: Vec<Poly> = s.iter().filter_map(|p| p.poly().cloned()).collect();
    let dim = 1 + finite.len();
    let mut cands: Vec<Vec<i128>> = Vec::new();
    let mut c0 = vec![0i128; dim];
    c0[0] = (n / g) as i128;
    cands.push(c0);
    if !finite.is_empty() {
        if s.contains(&RatPlace::Infinity) {
            for i in 0..finite.len() {
                let mut v = vec![0i128; dim];
                v[i + 1] = 1;
                cands.push(v);
            }
        } else {
            // kernel of e -> sum e_i deg(pi_i) mod n
            let col: Vec<Vec<i128>> = finite.iter().map(|p| vec![p.degree() as i128]).collect();
            let a = IntMatrix::from_rows(1, &col);
            let smith = smith_normal_form(&a);
            let gp = smith.d.get(0, 0);
            let step = nn / gcd(n, gp as u64) as i128;
            for i in 0..finite.len() {
                let scale = if i == 0 { step } else { 1 };
                let mut v = vec![0i128; dim];
                for (j, x) in smith.u.row(i).iter().enumerate() {
                    v[j + 1] = (scale * x).rem_euclid(nn);
                }
                cands.push(v);
            }
        }
    }
    let sub = subgroup_of_zn(&cands, dim, n);
    let gen_f = k.generator();
    let mut gens = Vec::new();
    for (v, o) in &sub.gens {
        let c_exp = (v[0] / (n / g) as i128) as u128;
        let mut f = RatFunc::constant(k, k.pow(gen_f, c_exp))?;
        for (pi, &e) in finite.iter().zip(&v[1..]) {
            let f_pi = RatFunc::from_poly(pi.clone())?;
            f = f.mul(&f_pi.pow(signed(e, nn)));
        }
        debug_assert!(selmer_contains(&f, n, s));
        gens.push((f, *o));
    }
    let basis = SelmerBasis { field: k.clone(), n, places: s.clone(), finite, gens, sub };
    Ok(basis)
}

/// Exponent of f's divisor outside S, for diagnostics.
pub fn defect_outside(f: &RatFunc, n: u64, s: &BTreeSet<RatPlace>) -> Vec<(RatPlace, i64)> {
    principal_divisor(f)
        .terms()
        .filter(|(p, e)| !s.contains(p) && e % n as i64 != 0)
        .map(|(p, e)| (p.clone(), e))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::{ray_class_group, DEFAULT_BOUND};
    use crate::ffield::{FieldElem, FiniteField};
    use crate::ratfun::place::RatDivisor;
    use crate::ratfun::text::parse_func;

    fn place(k: &Gf, c: &[i64]) -> RatPlace {
        RatPlace::finite(Poly::from_ints(k, c)).unwrap()
    }

    #[test]
    fn selmer_examples() {
        let k = FiniteField::prime(5).unwrap();
        let b = selmer_basis(&k, 4, &BTreeSet::new()).unwrap();
        assert_eq!(b.gens.len(), 1);
        assert_eq!(b.gens[0].0, RatFunc::constant(&k, FieldElem(2)).unwrap());
        assert_eq!(b.group().invariants(), &[4]);

        let s: BTreeSet<_> = [place(&k, &[0, 1]), place(&k, &[-1, 1])].into();
        let b = selmer_basis(&k, 4, &s).unwrap();
        assert_eq!(b.group().invariants(), &[4, 4]);
        let xq = parse_func("x/(x-1) over GF(5)").unwrap();
        assert!(b.coords(&xq).unwrap().iter().any(|&c| c != 0));
        assert!(b.coords(&RatFunc::x(&k)).is_err());

        let k3 = FiniteField::prime(3).unwrap();
        let b = selmer_basis(&k3, 2, &BTreeSet::new()).unwrap();
        assert_eq!(b.order(), 2);
        assert_eq!(b.gens[0].0, RatFunc::constant(&k3, FieldElem(2)).unwrap());
        assert!(selmer_basis(&k, 5, &BTreeSet::new()).is_err());
    }

    #[test]
    fn coordinates_round_trip() {
        let k = FiniteField::prime(5).unwrap();
        let s: BTreeSet<_> = [place(&k, &[0, 1]), place(&k, &[-1, 1]), place(&k, &[2, 0, 1])].into();
        let b = selmer_basis(&k, 4, &s).unwrap();
        for e in b.group().elements() {
            let f = b.element(&e);
            assert_eq!(b.coords(&f).unwrap(), e);
            // multiplying by an n-th power does not move the class
            let h = parse_func("(x+2)/(x^2+x+1) over GF(5)").unwrap();
            assert_eq!(b.coords(&f.mul(&h.pow(4))).unwrap(), e);
        }
    }

    #[test]
    fn cardinality_matches_ray_class_group() {
        // n | q-1 so that mu_n lies in the constants
        for (q, n, places) in [
            (5u32, 4u64, vec![vec![0, 1], vec![-1, 1]]),
            (5, 2, vec![vec![0, 1], vec![2, 0, 1]]),
            (7, 3, vec![vec![0, 1], vec![1, 1], vec![3, 1]]),
            (5, 4, vec![]),
        ] {
            let k = FiniteField::prime(q).unwrap();
            let s: BTreeSet<_> = places.iter().map(|c| place(&k, c)).collect();
            let b = selmer_basis(&k, n, &s).unwrap();
            let m = RatDivisor::from_terms(s.iter().map(|p| (p.clone(), 1)));
            let r = ray_class_group(&k, &m, n, DEFAULT_BOUND).unwrap();
            assert_eq!(b.order(), r.order(), "q={q} n={n}");
            for (f, _) in &b.gens {
                assert!(defect_outside(f, n, &s).is_empty());
            }
        }
    }
}
