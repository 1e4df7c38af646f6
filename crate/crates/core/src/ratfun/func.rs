use std::collections::BTreeSet;

use crate::error::{domain, Error, Result};
use crate::ffield::{FieldElem, Gf};
use crate::ratfun::place::{RatDivisor, RatPlace, ResidueField};
use crate::ratfun::poly::{factor, irreducibles_of_degree, Poly};
use crate::ratfun::text::format_place;

/// Nonzero element of F_q(x) as a reduced fraction with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl std::fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::ratfun::text::format_func(self))
    }
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if num.is_zero() || den.is_zero() {
            return domain("rational function must be nonzero with nonzero denominator");
        }
        let g = num.gcd(&den);
        let mut num = num.div_exact(&g)?;
        let mut den = den.div_exact(&g)?;
        let c = num.field().inv(den.lc())?;
        num = num.scale(c);
        den = den.scale(c);
        Ok(RatFunc { num, den })
    }

    pub fn from_poly(p: Poly) -> Result<Self> {
        let one = Poly::one(p.field());
        Self::new(p, one)
    }

    pub fn constant(field: &Gf, c: FieldElem) -> Result<Self> {
        Self::from_poly(Poly::constant(field, c))
    }

    pub fn one(field: &Gf) -> Self {
        RatFunc { num: Poly::one(field), den: Poly::one(field) }
    }

    pub fn x(field: &Gf) -> Self {
        RatFunc { num: Poly::x(field), den: Poly::one(field) }
    }

    pub fn field(&self) -> &Gf {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero product")
    }

    pub fn inv(&self) -> RatFunc {
        RatFunc::new(self.den.clone(), self.num.clone()).expect("nonzero")
    }

    pub fn div(&self, o: &RatFunc) -> RatFunc {
        self.mul(&o.inv())
    }

    pub fn pow(&self, e: i64) -> RatFunc {
        let b = if e < 0 { self.inv() } else { self.clone() };
        let k = e.unsigned_abs();
        RatFunc { num: b.num.pow(k), den: b.den.pow(k) }
    }

    /// Apply a coefficient map to numerator and denominator.
    pub fn map_coeffs(&self, f: impl Fn(FieldElem) -> FieldElem + Copy) -> RatFunc {
        RatFunc::new(self.num.map_coeffs(f), self.den.map_coeffs(f)).expect("field automorphism")
    }

    /// Valuation at a place.
    pub fn ord(&self, p: &RatPlace) -> i64 {
        match p {
            RatPlace::Infinity => self.den.degree() as i64 - self.num.degree() as i64,
            RatPlace::Finite(pi) => multiplicity(&self.num, pi) - multiplicity(&self.den, pi),
        }
    }

    /// Residue of `f * t^{-ord_p f}` for the standard uniformizer t (pi, or 1/x at infinity).
    pub fn unit_residue(&self, p: &RatPlace) -> Poly {
        let k = self.field();
        match p {
            RatPlace::Infinity => {
                Poly::constant(k, k.div(self.num.lc(), self.den.lc()).expect("nonzero"))
            }
            RatPlace::Finite(pi) => {
                let a = strip(&self.num, pi);
                let b = strip(&self.den, pi);
                let rf = ResidueField::new(pi.clone());
                rf.mul(&a, &rf.inv(&b.rem(pi)).expect("coprime"))
            }
        }
    }

    /// Value in the residue field at a place where `f` is a unit.
    pub fn value_at(&self, p: &RatPlace) -> Result<Poly> {
        if self.ord(p) != 0 {
            return Err(Error::Precondition(format!(
                "function has a zero or pole at {}",
                format_place(p)
            )));
        }
        Ok(self.unit_residue(p))
    }

    /// Evaluate at a point of F_q (not at infinity).
    pub fn eval(&self, a: FieldElem) -> Result<FieldElem> {
        let k = self.field();
        k.div(self.num.eval(a), self.den.eval(a))
    }
}

fn multiplicity(a: &Poly, pi: &Poly) -> i64 {
    let mut a = a.clone();
    let mut k = 0;
    loop {
        let (q, r) = a.divrem(pi).expect("nonzero");
        if !r.is_zero() || a.is_zero() {
            return k;
        }
        a = q;
        k += 1;
    }
}

fn strip(a: &Poly, pi: &Poly) -> Poly {
    let mut a = a.clone();
    loop {
        let (q, r) = a.divrem(pi).expect("nonzero");
        if !r.is_zero() {
            return a;
        }
        a = q;
    }
}

/// Divisor of zeros minus poles, including the infinite place.
pub fn principal_divisor(f: &RatFunc) -> RatDivisor {
    let mut d = RatDivisor::zero();
    for (p, e) in factor(&f.num).factors {
        d.add_term(RatPlace::Finite(p), e as i64);
    }
    for (p, e) in factor(&f.den).factors {
        d.add_term(RatPlace::Finite(p), -(e as i64));
    }
    d.add_term(RatPlace::Infinity, f.ord(&RatPlace::Infinity));
    d
}

/// Support of a function (places of zeros and poles).
pub fn support(f: &RatFunc) -> BTreeSet<RatPlace> {
    principal_divisor(f).support().cloned().collect()
}

/// Class of a residue in F_p^x / (F_p^x)^n.
#[derive(Clone, Debug)]
pub struct NthPowerClass {
    pub residue: Poly,
    pub residue_field: ResidueField,
    pub n: u64,
}

impl NthPowerClass {
    /// Order of the quotient group, gcd(n, #F_p - 1).
    pub fn group_order(&self) -> u64 {
        crate::ffield::gcd(self.n, (self.residue_field.order() - 1) as u64)
    }

    /// Canonical image r^{(#F_p - 1)/g} in the g-th roots of unity of F_p.
    pub fn canonical(&self) -> Poly {
        let g = self.group_order() as u128;
        self.residue_field.pow(&self.residue, (self.residue_field.order() - 1) / g)
    }

    pub fn is_trivial(&self) -> bool {
        self.canonical().is_one()
    }

    /// Image in mu_n of F_q under Norm(r)^{(q-1)/n}; requires n | q-1.
    pub fn power_residue_symbol(&self) -> Result<FieldElem> {
        let k = self.residue_field.field();
        let q = k.order() as u64;
        if (q - 1) % self.n != 0 {
            return domain(format!("{} does not divide q-1 = {}", self.n, q - 1));
        }
        let nm = self.residue_field.norm(&self.residue);
        Ok(k.pow(nm, ((q - 1) / self.n) as u128))
    }
}

impl PartialEq for NthPowerClass {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.canonical() == o.canonical()
    }
}

fn check_coprime(field: &Gf, n: u64) -> Result<()> {
    if n == 0 || n % field.characteristic() as u64 == 0 {
        return domain(format!("n = {n} is not coprime to the characteristic"));
    }
    Ok(())
}

/// Residue f_{n,p}: class of (f g^{-n})_p when n | ord_p f, class of 1 otherwise.
pub fn residue_mod_nth_powers(f: &RatFunc, p: &RatPlace, n: u64) -> Result<NthPowerClass> {
    check_coprime(f.field(), n)?;
    let k = f.field();
    let rf = p.residue_field(k);
    let v = f.ord(p);
    let residue = if v % n as i64 == 0 { f.unit_residue(p) } else { Poly::one(k) };
    Ok(NthPowerClass { residue, residue_field: rf, n })
}

/// Same residue computed with an explicit auxiliary `g` of valuation ord_p(f)/n.
pub fn residue_mod_nth_powers_with(
    f: &RatFunc,
    p: &RatPlace,
    n: u64,
    g: &RatFunc,
) -> Result<NthPowerClass> {
    check_coprime(f.field(), n)?;
    let k = f.field();
    let rf = p.residue_field(k);
    let v = f.ord(p);
    if v % n as i64 != 0 {
        return Ok(NthPowerClass { residue: Poly::one(k), residue_field: rf, n });
    }
    if g.ord(p) * n as i64 != v {
        return domain("auxiliary function has the wrong valuation");
    }
    let u = f.mul(&g.pow(-(n as i64)));
    Ok(NthPowerClass { residue: u.value_at(p)?, residue_field: rf, n })
}

/// f(D) = prod Norm(f_p)^{ord_p D}; requires disjoint supports.
pub fn evaluate(f: &RatFunc, d: &RatDivisor) -> Result<FieldElem> {
    let k = f.field();
    let mut acc = k.one();
    for (p, e) in d.terms() {
        let r = f.value_at(p).map_err(|_| {
            Error::Precondition(format!(
                "supports overlap at {}",
                format_place(p)
            ))
        })?;
        let nm = p.residue_field(k).norm(&r);
        acc = k.mul(acc, k.pow_signed(nm, e)?);
    }
    Ok(acc)
}

/// Least monic irreducible of degree d not in `excluded`.
fn least_outside(field: &Gf, d: usize, excluded: &BTreeSet<RatPlace>) -> Option<Poly> {
    irreducibles_of_degree(field, d)
        .into_iter()
        .find(|p| !excluded.contains(&RatPlace::Finite(p.clone())))
}

/// h with ord_p h = 1 whose other zeros and poles lie outside `excluded`.
fn local_uniformizer(k: &Gf, p: &RatPlace, excluded: &BTreeSet<RatPlace>) -> Result<RatFunc> {
    let inf_free = !excluded.contains(&RatPlace::Infinity);
    // target: ord_p h = 1 and h = pi^a * B / A with deg A - deg B - a*deg(pi) balancing at infinity
    let (pi, d) = match p {
        RatPlace::Finite(pi) if inf_free => return RatFunc::from_poly(pi.clone()),
        RatPlace::Finite(pi) => (pi.clone(), pi.degree()),
        RatPlace::Infinity => (Poly::one(k), 1),
    };
    for e in d..d + 16 {
        let Some(a) = least_outside(k, e, excluded) else { continue };
        let b = if e == d {
            Poly::one(k)
        } else {
            let mut ex = excluded.clone();
            ex.insert(RatPlace::Finite(a.clone()));
            match least_outside(k, e - d, &ex) {
                Some(b) => b,
                None => continue,
            }
        };
        return RatFunc::new(pi.mul(&b), a);
    }
    domain("no auxiliary place found")
}

/// Multiply f by an n-th power so that it becomes a unit at every place of `avoid`.
pub fn coprime_shift(f: &RatFunc, n: u64, avoid: &BTreeSet<RatPlace>) -> Result<RatFunc> {
    let mut excluded: BTreeSet<RatPlace> = avoid.clone();
    excluded.extend(support(f));
    let mut out = f.clone();
    for p in avoid {
        let v = f.ord(p);
        if v == 0 {
            continue;
        }
        if v % n as i64 != 0 {
            return Err(Error::Precondition(format!(
                "ord at {} is {v}, not divisible by {n}",
                format_place(p)
            )));
        }
        let mut ex = excluded.clone();
        if !avoid.contains(&RatPlace::Infinity) {
            ex.remove(&RatPlace::Infinity);
        }
        let h = local_uniformizer(f.field(), p, &ex)?;
        out = out.mul(&h.pow(-v));
    }
    Ok(out)
}

/// True iff ord_p f is divisible by n at every place outside S.
pub fn selmer_contains(f: &RatFunc, n: u64, s: &BTreeSet<RatPlace>) -> bool {
    principal_divisor(f)
        .terms()
        .all(|(p, e)| s.contains(p) || e % n as i64 == 0)
}
