use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::ffield::{FieldElem, Gf};

/// Seed of the equal-degree splitter; factorizations are reproducible.
pub const FACTOR_SEED: u64 = 0x5eed_fac7;

/// Univariate polynomial over a finite field, lowest coefficient first.
#[derive(Clone)]
pub struct Poly {
    field: Gf,
    coeffs: Vec<FieldElem>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}
impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl Ord for Poly {
    /// Degree first, then coefficients from the constant term upwards.
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}
impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::ratfun::text::format_poly(self))
    }
}

impl Poly {
    pub fn new(field: &Gf, mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last() == Some(&FieldElem(0)) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    /// Coefficients as integers of the prime subfield, lowest first.
    pub fn from_ints(field: &Gf, c: &[i64]) -> Self {
        Self::new(field, c.iter().map(|&v| field.from_int(v)).collect())
    }

    pub fn zero(field: &Gf) -> Self {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Gf) -> Self {
        Self::constant(field, FieldElem(1))
    }

    pub fn constant(field: &Gf, c: FieldElem) -> Self {
        Self::new(field, vec![c])
    }

    pub fn x(field: &Gf) -> Self {
        Self::new(field, vec![FieldElem(0), FieldElem(1)])
    }

    /// `x - a`.
    pub fn linear(field: &Gf, a: FieldElem) -> Self {
        Self::new(field, vec![field.neg(a), FieldElem(1)])
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem(0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [FieldElem(1)]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; the zero polynomial has degree 0 here, check [`Poly::is_zero`].
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> FieldElem {
        self.coeffs.last().copied().unwrap_or(FieldElem(0))
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == FieldElem(1)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let k = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(k, (0..n).map(|i| k.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let k = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(k, (0..n).map(|i| k.sub(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn neg(&self) -> Poly {
        let k = &self.field;
        Poly::new(k, self.coeffs.iter().map(|&c| k.neg(c)).collect())
    }

    pub fn scale(&self, c: FieldElem) -> Poly {
        let k = &self.field;
        Poly::new(k, self.coeffs.iter().map(|&a| k.mul(a, c)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.field);
        }
        let k = &self.field;
        let mut out = vec![FieldElem(0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.0 == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(a, b));
            }
        }
        Poly::new(k, out)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut result = Poly::one(&self.field);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        result
    }

    /// Quotient and remainder; errors on division by zero.
    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        if d.is_zero() {
            return domain("polynomial division by zero");
        }
        let k = &self.field;
        let inv_lc = k.inv(d.lc())?;
        let mut r = self.coeffs.clone();
        let dd = d.coeffs.len() - 1;
        if r.len() <= dd {
            return Ok((Poly::zero(k), self.clone()));
        }
        let mut q = vec![FieldElem(0); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = k.mul(r[i + dd], inv_lc);
            q[i] = c;
            if c.0 != 0 {
                for (j, &dc) in d.coeffs.iter().enumerate() {
                    r[i + j] = k.sub(r[i + j], k.mul(c, dc));
                }
            }
        }
        r.truncate(dd);
        Ok((Poly::new(k, q), Poly::new(k, r)))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).expect("nonzero divisor").1
    }

    /// Exact division; errors if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(d)?;
        if !r.is_zero() {
            return domain("inexact polynomial division");
        }
        Ok(q)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.lc()).expect("nonzero lc"))
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*self + t*o = g` monic.
    pub fn xgcd(&self, o: &Poly) -> (Poly, Poly, Poly) {
        let k = &self.field;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(k), Poly::zero(k));
        let (mut t0, mut t1) = (Poly::zero(k), Poly::one(k));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("nonzero");
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let c = k.inv(r0.lc()).expect("nonzero");
        (r0.scale(c), s0.scale(c), t0.scale(c))
    }

    /// Inverse modulo `m`, if coprime.
    pub fn inv_mod(&self, m: &Poly) -> Option<Poly> {
        let (g, s, _) = self.rem(m).xgcd(m);
        if g.is_one() {
            Some(s.rem(m))
        } else {
            None
        }
    }

    pub fn mulmod(&self, o: &Poly, m: &Poly) -> Poly {
        self.mul(o).rem(m)
    }

    pub fn powmod(&self, mut e: u128, m: &Poly) -> Poly {
        let mut result = Poly::one(&self.field).rem(m);
        let mut b = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                result = result.mulmod(&b, m);
            }
            e >>= 1;
            if e > 0 {
                b = b.mulmod(&b, m);
            }
        }
        result
    }

    pub fn eval(&self, a: FieldElem) -> FieldElem {
        let k = &self.field;
        self.coeffs.iter().rev().fold(FieldElem(0), |acc, &c| k.add(k.mul(acc, a), c))
    }

    pub fn derivative(&self) -> Poly {
        let k = &self.field;
        Poly::new(
            k,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| k.mul(c, k.from_int(i as i64)))
                .collect(),
        )
    }

    /// Apply a map to every coefficient (e.g. a Frobenius twist).
    pub fn map_coeffs(&self, f: impl Fn(FieldElem) -> FieldElem) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|&c| f(c)).collect())
    }

    /// Reinterpret over another field with the same encodings (prime subfield embedding).
    pub fn lift_to(&self, field: &Gf) -> Poly {
        Poly::new(field, self.coeffs.clone())
    }

    /// All monic polynomials of exactly the given degree, in [`Ord`] order.
    pub fn monics_of_degree(field: &Gf, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = field.order() as u64;
        let count = q.pow(d as u32);
        (0..count).map(move |mut code| {
            let mut c = Vec::with_capacity(d + 1);
            for _ in 0..d {
                c.push(FieldElem((code % q) as u32));
                code /= q;
            }
            c.push(FieldElem(1));
            Poly::new(field, c)
        })
    }

    pub fn is_irreducible(&self) -> bool {
        if self.is_zero() || self.degree() == 0 {
            return false;
        }
        let f = factor(self);
        f.factors.len() == 1 && f.factors[0].1 == 1
    }
}

/// Factorization `lc * prod(p_i^{e_i})` with monic irreducible `p_i`, sorted.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub unit: FieldElem,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn expand(&self, field: &Gf) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(field, self.unit), |acc, (p, e)| acc.mul(&p.pow(*e as u64)))
    }
}

/// `x^(q^k) mod f` by repeated q-th powering.
fn frobenius_power_of_x(f: &Poly, k: usize) -> Poly {
    let q = f.field.order() as u128;
    let mut xp = Poly::x(&f.field).rem(f);
    for _ in 0..k {
        xp = xp.powmod(q, f);
    }
    xp
}

/// `p`-th root of a polynomial whose derivative vanishes.
fn pth_root(f: &Poly) -> Poly {
    let k = &f.field;
    let p = k.characteristic() as usize;
    // a^(1/p) = a^(q/p) on GF(q)
    let e = (k.order() / k.characteristic()) as u128;
    Poly::new(
        k,
        f.coeffs.iter().step_by(p).map(|&c| k.pow(c, e)).collect(),
    )
}

/// Squarefree decomposition of a monic polynomial: pairs (squarefree factor, multiplicity).
fn squarefree(f: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    if f.degree() == 0 {
        return out;
    }
    let p = f.field.characteristic();
    let d = f.derivative();
    if d.is_zero() {
        for (g, e) in squarefree(&pth_root(f)) {
            out.push((g, e * p));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.div_exact(&c).expect("gcd divides");
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_exact(&y).expect("gcd divides");
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w).expect("gcd divides");
    }
    if !c.is_one() {
        for (g, e) in squarefree(&pth_root(&c)) {
            out.push((g, e * p));
        }
    }
    out
}

/// Distinct-degree factorization of a squarefree monic polynomial.
fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = Poly::x(&f.field);
    let q = f.field.order() as u128;
    let mut xp = x.clone();
    let mut d = 0;
    while rest.degree() >= 2 * (d + 1) {
        d += 1;
        xp = xp.powmod(q, &rest);
        let g = rest.gcd(&xp.sub(&x));
        if !g.is_one() {
            rest = rest.div_exact(&g).expect("gcd divides");
            xp = xp.rem(&rest);
            out.push((g, d));
        }
    }
    if rest.degree() > 0 {
        let dr = rest.degree();
        out.push((rest, dr));
    }
    out
}

/// Cantor–Zassenhaus equal-degree splitting (odd characteristic).
fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
    if f.degree() == d {
        out.push(f.clone());
        return;
    }
    let k = &f.field;
    let q = k.order() as u128;
    let e = (q.pow(d as u32) - 1) / 2;
    loop {
        let a = Poly::new(
            k,
            (0..f.degree()).map(|_| FieldElem(rng.gen_range(0..k.order()))).collect(),
        );
        if a.degree() == 0 {
            continue;
        }
        let b = a.powmod(e, f).sub(&Poly::one(k));
        let g = f.gcd(&b);
        if g.degree() > 0 && g.degree() < f.degree() {
            let h = f.div_exact(&g).expect("gcd divides");
            equal_degree(&g, d, rng, out);
            equal_degree(&h, d, rng, out);
            return;
        }
    }
}

/// Same splitting in characteristic 2 via the absolute trace map.
fn equal_degree_char2(f: &Poly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
    if f.degree() == d {
        out.push(f.clone());
        return;
    }
    let k = &f.field;
    let m = k.degree() as usize * d;
    loop {
        let a = Poly::new(
            k,
            (0..f.degree()).map(|_| FieldElem(rng.gen_range(0..k.order()))).collect(),
        );
        let mut t = a.rem(f);
        let mut acc = t.clone();
        for _ in 1..m {
            t = t.mulmod(&t, f);
            acc = acc.add(&t);
        }
        let g = f.gcd(&acc);
        if g.degree() > 0 && g.degree() < f.degree() {
            let h = f.div_exact(&g).expect("gcd divides");
            equal_degree_char2(&g, d, rng, out);
            equal_degree_char2(&h, d, rng, out);
            return;
        }
    }
}

/// Full factorization into monic irreducibles; deterministic via [`FACTOR_SEED`].
pub fn factor(f: &Poly) -> Factorization {
    let k = f.field.clone();
    if f.is_zero() {
        return Factorization { unit: FieldElem(0), factors: Vec::new() };
    }
    let unit = f.lc();
    let m = f.monic();
    let mut rng = ChaCha8Rng::seed_from_u64(FACTOR_SEED ^ (m.degree() as u64));
    let mut factors: Vec<(Poly, u32)> = Vec::new();
    for (sf, mult) in squarefree(&m) {
        for (g, d) in distinct_degree(&sf) {
            let mut parts = Vec::new();
            if k.characteristic() == 2 {
                equal_degree_char2(&g, d, &mut rng, &mut parts);
            } else {
                equal_degree(&g, d, &mut rng, &mut parts);
            }
            for p in parts {
                factors.push((p, mult));
            }
        }
    }
    factors.sort();
    // merge duplicates (cannot happen for a correct squarefree split, kept for safety of callers)
    let mut merged: Vec<(Poly, u32)> = Vec::new();
    for (p, e) in factors {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    Factorization { unit, factors: merged }
}

/// Monic irreducible polynomials of degree `d`, in [`Ord`] order.
pub fn irreducibles_of_degree(field: &Gf, d: usize) -> Vec<Poly> {
    if d == 1 {
        return Poly::monics_of_degree(field, 1).collect();
    }
    let q = field.order() as u128;
    let x = Poly::x(field);
    Poly::monics_of_degree(field, d)
        .filter(|f| {
            if f.coeff(0).0 == 0 {
                return false;
            }
            // Rabin test
            let mut xp = x.clone();
            for _ in 0..d {
                xp = xp.powmod(q, f);
            }
            if xp != x.rem(f) {
                return false;
            }
            let mut n = d;
            let mut primes = Vec::new();
            let mut p = 2;
            while p * p <= n {
                if n % p == 0 {
                    primes.push(p);
                    while n % p == 0 {
                        n /= p;
                    }
                }
                p += 1;
            }
            if n > 1 {
                primes.push(n);
            }
            primes.iter().all(|&r| f.gcd(&frobenius_power_of_x(f, d / r).sub(&x)).is_one())
        })
        .collect()
}
