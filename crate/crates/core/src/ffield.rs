//! Finite fields `GF(p^r)` with table-driven multiplication.
//!
//! Elements are stored by their base-`p` digit encoding: the element
//! `c_0 + c_1 t + ... + c_{r-1} t^{r-1}` (with `t` a root of the defining
//! modulus) is the integer `c_0 + c_1 p + ... + c_{r-1} p^{r-1}`. The prime
//! subfield therefore occupies the encodings `0..p`, which makes the
//! embedding `GF(p) -> GF(p^r)` the identity on encodings.
//!
//! Fields are shared behind [`Gf`] (an `Arc`) and are immutable after
//! construction.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};

/// Largest field order the arithmetic layer will build tables for.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;
/// Largest order for which searches are done by plain enumeration.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 12;

/// Element of a finite field, identified by its digit encoding.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FieldElem(pub u32);

pub type Gf = Arc<FiniteField>;

pub struct FiniteField {
    p: u32,
    degree: u32,
    order: u32,
    /// Monic defining polynomial over `GF(p)`, low coefficient first.
    modulus: Vec<u32>,
    generator: FieldElem,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.order)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}
impl Eq for FiniteField {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomial helpers over GF(p), used only while searching for a modulus.
mod fp_poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut r: Vec<u32> = prod.into_iter().map(|v| v as u32).collect();
        rem_monic(&mut r, m, p);
        r
    }

    /// Remainder modulo a monic polynomial.
    pub fn rem_monic(r: &mut Vec<u32>, m: &[u32], p: u32) {
        let dm = m.len() - 1;
        trim(r);
        while r.len() > dm {
            let lead = *r.last().unwrap() as u64;
            let shift = r.len() - 1 - dm;
            for (i, &c) in m.iter().enumerate() {
                let v = (r[shift + i] as u64 + (p as u64 - lead) * c as u64) % p as u64;
                r[shift + i] = v as u32;
            }
            trim(r);
        }
    }

    pub fn powmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut result = vec![1u32];
        let mut b = base.to_vec();
        rem_monic(&mut b, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mulmod(&result, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        result
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut r: Vec<u32> = (0..n)
            .map(|i| {
                let x = *a.get(i).unwrap_or(&0);
                let y = *b.get(i).unwrap_or(&0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut r);
        r
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            // make b monic, then a mod b
            let inv = super::pow_mod_u64(*b.last().unwrap() as u64, p as u64 - 2, p as u64) as u32;
            let bm: Vec<u32> = b.iter().map(|&c| (c as u64 * inv as u64 % p as u64) as u32).collect();
            rem_monic(&mut a, &bm, p);
            let r = std::mem::take(&mut a);
            a = bm;
            b = r;
        }
        a
    }

    /// Rabin irreducibility test for a monic polynomial of degree r.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let r = m.len() as u64 - 1;
        if r == 1 {
            return true;
        }
        let x = vec![0u32, 1];
        let q = p as u64;
        // x^(p^r) == x mod m
        let mut xp = x.clone();
        for _ in 0..r {
            xp = powmod(&xp, q, m, p);
        }
        if sub(&xp, &x, p) != Vec::<u32>::new() {
            return false;
        }
        for d in super::prime_factors(r) {
            let mut xp = x.clone();
            for _ in 0..(r / d) {
                xp = powmod(&xp, q, m, p);
            }
            let g = gcd(m, &sub(&xp, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

pub(crate) fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

impl FiniteField {
    /// The prime field `GF(p)`.
    pub fn prime(p: u32) -> Result<Gf> {
        Self::new(p, 1)
    }

    /// `GF(p^r)` with the lexicographically least irreducible modulus.
    pub fn new(p: u32, r: u32) -> Result<Gf> {
        if !is_prime(p as u64) {
            return domain(format!("{p} is not prime"));
        }
        if r == 0 {
            return domain("extension degree must be positive");
        }
        let order = (p as u64).checked_pow(r).unwrap_or(u64::MAX);
        if order > MAX_FIELD_ORDER {
            return Err(Error::Size(format!("GF({p}^{r}) exceeds {MAX_FIELD_ORDER}")));
        }
        let modulus = Self::least_irreducible(p, r);
        Ok(Arc::new(Self::with_modulus(p, r, modulus)))
    }

    /// Order `p^r` as a convenience: `GF(q)` for a prime power `q`.
    pub fn of_order(q: u32) -> Result<Gf> {
        let mut p = 2u32;
        while (p as u64) * (p as u64) <= q as u64 && q % p != 0 {
            p += 1;
        }
        if q % p != 0 {
            p = q;
        }
        let mut r = 0;
        let mut m = q;
        while m % p == 0 {
            m /= p;
            r += 1;
        }
        if m != 1 || q < 2 {
            return domain(format!("{q} is not a prime power"));
        }
        Self::new(p, r)
    }

    fn least_irreducible(p: u32, r: u32) -> Vec<u32> {
        if r == 1 {
            return vec![0, 1];
        }
        let count = (p as u64).pow(r);
        for code in 0..count {
            let mut m = Vec::with_capacity(r as usize + 1);
            let mut c = code;
            for _ in 0..r {
                m.push((c % p as u64) as u32);
                c /= p as u64;
            }
            m.push(1);
            if m[0] != 0 && fp_poly::is_irreducible(&m, p) {
                return m;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    fn with_modulus(p: u32, r: u32, modulus: Vec<u32>) -> Self {
        let order = p.pow(r);
        let to_digits = |v: u32| -> Vec<u32> {
            let mut d = Vec::with_capacity(r as usize);
            let mut c = v;
            for _ in 0..r {
                d.push(c % p);
                c /= p;
            }
            fp_poly::trim(&mut d);
            d
        };
        let from_digits = |d: &[u32]| -> u32 { d.iter().rev().fold(0u32, |acc, &c| acc * p + c) };
        let group = order as u64 - 1;
        let factors = prime_factors(group);
        let mut generator = FieldElem(1);
        for cand in 1..order {
            let digits = to_digits(cand);
            let primitive = factors.iter().all(|&f| {
                let v = fp_poly::powmod(&digits, group / f, &modulus, p);
                v != vec![1]
            });
            if primitive || order == 2 {
                generator = FieldElem(cand);
                break;
            }
        }
        let mut exp = vec![0u32; group as usize];
        let mut log = vec![u32::MAX; order as usize];
        let gd = to_digits(generator.0);
        let mut cur = vec![1u32];
        for (k, slot) in exp.iter_mut().enumerate() {
            let v = from_digits(&cur);
            *slot = v;
            log[v as usize] = k as u32;
            cur = fp_poly::mulmod(&cur, &gd, &modulus, p);
        }
        FiniteField { p, degree: r, order, modulus, generator, exp, log }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Fixed primitive element (least encoding of multiplicative order `q - 1`).
    pub fn generator(&self) -> FieldElem {
        self.generator
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElem {
        FieldElem(v.rem_euclid(self.p as i64) as u32)
    }

    pub fn contains(&self, a: FieldElem) -> bool {
        a.0 < self.order
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.order).map(FieldElem)
    }

    pub fn digits(&self, a: FieldElem) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.degree as usize);
        let mut c = a.0;
        for _ in 0..self.degree {
            d.push(c % self.p);
            c /= self.p;
        }
        d
    }

    pub fn from_digits(&self, d: &[u32]) -> Result<FieldElem> {
        if d.len() > self.degree as usize || d.iter().any(|&c| c >= self.p) {
            return Err(Error::Parse(format!("digits {d:?} do not describe an element of {self:?}")));
        }
        Ok(FieldElem(d.iter().rev().fold(0u32, |acc, &c| acc * self.p + c)))
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.degree == 1 {
            return FieldElem((a.0 + b.0) % self.p);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        while x > 0 || y > 0 {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        FieldElem(out)
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.degree == 1 {
            return FieldElem((self.p - a.0) % self.p);
        }
        let (mut x, mut out, mut place) = (a.0, 0u32, 1u32);
        while x > 0 {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        FieldElem(out)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem(0);
        }
        let n = self.exp.len() as u64;
        let k = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % n;
        FieldElem(self.exp[k as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.0 == 0 {
            return domain("inverse of zero");
        }
        let n = self.exp.len() as u64;
        let k = (n - self.log[a.0 as usize] as u64) % n;
        Ok(FieldElem(self.exp[k as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, e: u128) -> FieldElem {
        if e == 0 {
            return FieldElem(1);
        }
        if a.0 == 0 {
            return FieldElem(0);
        }
        let n = self.exp.len() as u128;
        let k = (self.log[a.0 as usize] as u128 * (e % n)) % n;
        FieldElem(self.exp[k as usize])
    }

    /// `a^e` for a signed exponent; zero to a negative power is an error.
    pub fn pow_signed(&self, a: FieldElem, e: i64) -> Result<FieldElem> {
        if e >= 0 {
            Ok(self.pow(a, e as u128))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs() as u128))
        }
    }

    /// Discrete logarithm to the fixed generator.
    pub fn log(&self, a: FieldElem) -> Result<u64> {
        if a.0 == 0 {
            return domain("logarithm of zero");
        }
        Ok(self.log[a.0 as usize] as u64)
    }

    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.p as u128)
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: FieldElem) -> Result<u64> {
        let l = self.log(a)?;
        let n = self.order as u64 - 1;
        Ok(n / gcd(l, n))
    }

    /// Norm `a^{1 + s + ... + s^{k-1}}` to the subfield of order `s = p^{base.degree}`.
    ///
    /// The result is returned in the encoding of `base`.
    pub fn norm(&self, a: FieldElem, base: &FiniteField) -> Result<FieldElem> {
        let emb = Embedding::new(base, self)?;
        let s = base.order as u128;
        let e = (self.order as u128 - 1) / (s - 1);
        let v = self.pow(a, e);
        emb.preimage(v)
            .ok_or_else(|| Error::Domain("norm did not land in the subfield".into()))
    }

    /// Smallest `b` (by encoding) with `b^n = a`, if one exists.
    pub fn nth_root(&self, a: FieldElem, n: u64) -> Result<Option<FieldElem>> {
        if a.0 == 0 {
            return domain("n-th root of zero");
        }
        if n == 0 {
            return domain("n must be positive");
        }
        if (self.order as u64) <= EXHAUSTIVE_LIMIT {
            return Ok(self.elements().find(|&b| self.pow(b, n as u128) == a));
        }
        let group = self.order as u64 - 1;
        let g = gcd(n, group);
        let k = self.log(a)?;
        if k % g != 0 {
            return Ok(None);
        }
        // Solve n * l == k (mod group): l0 = (k/g) * (n/g)^{-1} mod (group/g).
        let m = group / g;
        let inv = mod_inverse((n / g) % m.max(1), m.max(1)).unwrap_or(0);
        let l0 = ((k / g) as u128 * inv as u128 % m.max(1) as u128) as u64;
        let best = (0..g)
            .map(|j| FieldElem(self.exp[((l0 + j * m) % group) as usize]))
            .min()
            .expect("at least one solution");
        Ok(Some(best))
    }
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Field embedding `small -> big` given by a root of the small modulus.
pub struct Embedding {
    images: Vec<FieldElem>,
    back: HashMap<FieldElem, FieldElem>,
}

impl Embedding {
    pub fn new(small: &FiniteField, big: &FiniteField) -> Result<Self> {
        if small.p != big.p || big.degree % small.degree != 0 {
            return domain(format!("{small:?} is not a subfield of {big:?}"));
        }
        let images: Vec<FieldElem> = if small.degree == 1 {
            small.elements().collect()
        } else if small == big {
            big.elements().collect()
        } else {
            let root = big
                .elements()
                .find(|&t| {
                    let mut acc = FieldElem(0);
                    for &c in small.modulus.iter().rev() {
                        acc = big.add(big.mul(acc, t), FieldElem(c));
                    }
                    acc.0 == 0
                })
                .expect("subfield modulus splits in the larger field");
            small
                .elements()
                .map(|e| {
                    let d = small.digits(e);
                    let mut acc = FieldElem(0);
                    for &c in d.iter().rev() {
                        acc = big.add(big.mul(acc, root), FieldElem(c));
                    }
                    acc
                })
                .collect()
        };
        let back = images.iter().enumerate().map(|(i, &v)| (v, FieldElem(i as u32))).collect();
        Ok(Embedding { images, back })
    }

    pub fn image(&self, a: FieldElem) -> FieldElem {
        self.images[a.0 as usize]
    }

    pub fn preimage(&self, a: FieldElem) -> Option<FieldElem> {
        self.back.get(&a).copied()
    }
}

/// The group of `n`-th roots of unity inside a field, with a fixed generator.
#[derive(Clone, Debug)]
pub struct MuN {
    field: Gf,
    n: u64,
    generator: FieldElem,
}

impl MuN {
    pub fn new(field: &Gf, n: u64) -> Result<Self> {
        let q = field.order() as u64;
        if n == 0 || (q - 1) % n != 0 {
            return domain(format!("mu_{n} is not contained in GF({q})"));
        }
        let generator = field.pow(field.generator(), ((q - 1) / n) as u128);
        Ok(MuN { field: field.clone(), n, generator })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn generator(&self) -> FieldElem {
        self.generator
    }

    pub fn contains(&self, z: FieldElem) -> bool {
        z.0 != 0 && self.field.pow(z, self.n as u128) == self.field.one()
    }

    pub fn element(&self, k: u64) -> FieldElem {
        self.field.pow(self.generator, (k % self.n) as u128)
    }

    /// `k` in `0..n` with `g_n^k = z`.
    pub fn dlog(&self, z: FieldElem) -> Result<u64> {
        if !self.contains(z) {
            return domain(format!("{z:?} is not an {}-th root of unity", self.n));
        }
        let k = &self.field;
        if self.n <= EXHAUSTIVE_LIMIT {
            let mut cur = k.one();
            for e in 0..self.n {
                if cur == z {
                    return Ok(e);
                }
                cur = k.mul(cur, self.generator);
            }
            unreachable!("z lies in mu_n");
        }
        // baby-step giant-step
        let m = (self.n as f64).sqrt().ceil() as u64;
        let mut table = HashMap::with_capacity(m as usize);
        let mut cur = k.one();
        for j in 0..m {
            table.entry(cur).or_insert(j);
            cur = k.mul(cur, self.generator);
        }
        let giant = k.inv(k.pow(self.generator, m as u128))?;
        let mut gamma = z;
        for i in 0..=m {
            if let Some(&j) = table.get(&gamma) {
                return Ok((i * m + j) % self.n);
            }
            gamma = k.mul(gamma, giant);
        }
        unreachable!("z lies in mu_n");
    }
}

/// Serialize an element as `GF(q):[d0,d1,...]`.
pub fn format_elem(field: &FiniteField, a: FieldElem) -> String {
    let d: Vec<String> = field.digits(a).iter().map(|c| c.to_string()).collect();
    format!("GF({}):[{}]", field.order(), d.join(","))
}

/// Parse the `GF(q):[d0,...]` form produced by [`format_elem`].
pub fn parse_elem(field: &FiniteField, s: &str) -> Result<FieldElem> {
    let s = s.trim();
    let prefix = format!("GF({}):[", field.order());
    let inner = s
        .strip_prefix(&prefix)
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected {prefix}...]: {s}")))?;
    let digits = inner
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<u32>().map_err(|e| Error::Parse(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    field.from_digits(&digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf9_modulus_and_generator() {
        let k = FiniteField::new(3, 2).unwrap();
        // x^2 + 1 is the least irreducible quadratic over GF(3)
        assert_eq!(k.modulus(), &[1, 0, 1]);
        assert_eq!(k.mult_order(k.generator()).unwrap(), 8);
    }

    #[test]
    fn norm_examples() {
        let f3 = FiniteField::prime(3).unwrap();
        let f9 = FiniteField::new(3, 2).unwrap();
        // t = i with i^2 = -1
        let i = FieldElem(3);
        assert_eq!(f9.mul(i, i), f9.from_int(-1));
        assert_eq!(f9.norm(i, &f3).unwrap(), FieldElem(1));
        assert_eq!(f9.norm(FieldElem(0), &f3).unwrap(), FieldElem(0));
        let f5 = FiniteField::prime(5).unwrap();
        assert_eq!(f5.norm(FieldElem(3), &f5).unwrap(), FieldElem(3));
        assert!(f9.norm(i, &f5).is_err());
    }

    #[test]
    fn norm_into_nonprime_subfield() {
        let f9 = FiniteField::new(3, 2).unwrap();
        let f81 = FiniteField::new(3, 4).unwrap();
        let emb = Embedding::new(&f9, &f81).unwrap();
        for a in f9.elements().skip(1) {
            // N(a) = a^2 for a in the subfield
            assert_eq!(f81.norm(emb.image(a), &f9).unwrap(), f9.mul(a, a));
        }
    }

    #[test]
    fn nth_root_examples() {
        let f5 = FiniteField::prime(5).unwrap();
        assert_eq!(f5.nth_root(FieldElem(1), 7).unwrap(), Some(FieldElem(1)));
        assert_eq!(f5.nth_root(FieldElem(4), 2).unwrap(), Some(FieldElem(2)));
        assert_eq!(f5.nth_root(FieldElem(2), 2).unwrap(), None);
        assert!(f5.nth_root(FieldElem(0), 2).is_err());
    }

    #[test]
    fn nth_root_large_field_matches_exhaustive() {
        let k = FiniteField::new(2, 13).unwrap();
        for v in [1u32, 2, 3, 77, 4000, 8191] {
            for n in [2u64, 3, 5, 7] {
                let a = FieldElem(v);
                let fast = k.nth_root(a, n).unwrap();
                let slow = k.elements().find(|&b| k.pow(b, n as u128) == a);
                assert_eq!(fast, slow, "v={v} n={n}");
            }
        }
    }

    #[test]
    fn mu_dlog_examples() {
        let f5 = FiniteField::prime(5).unwrap();
        let mu = MuN::new(&f5, 4).unwrap();
        assert_eq!(mu.generator(), FieldElem(2));
        assert_eq!(mu.dlog(FieldElem(1)).unwrap(), 0);
        assert_eq!(mu.dlog(FieldElem(4)).unwrap(), 2);
        assert_eq!(mu.dlog(FieldElem(3)).unwrap(), 3);
        let mu2 = MuN::new(&f5, 2).unwrap();
        assert!(mu2.dlog(FieldElem(2)).is_err());
    }

    #[test]
    fn element_text_round_trip() {
        let f9 = FiniteField::new(3, 2).unwrap();
        let s = format_elem(&f9, FieldElem(7));
        assert_eq!(s, "GF(9):[1,2]");
        assert_eq!(parse_elem(&f9, &s).unwrap(), FieldElem(7));
    }

    #[test]
    fn norm_is_surjective_and_multiplicative() {
        for (p, r) in [(3u32, 2u32), (5, 2), (2, 6), (7, 2), (3, 3)] {
            let big = FiniteField::new(p, r).unwrap();
            let base = FiniteField::prime(p).unwrap();
            let mut seen = std::collections::HashSet::new();
            for a in big.elements().skip(1) {
                let na = big.norm(a, &base).unwrap();
                let ninv = big.norm(big.inv(a).unwrap(), &base).unwrap();
                assert_eq!(base.mul(na, ninv), base.one());
                seen.insert(na);
            }
            assert_eq!(seen.len() as u32, p - 1);
        }
    }

    #[test]
    fn bsgs_dlog_matches_table() {
        let k = FiniteField::new(2, 14).unwrap();
        let n = k.order() as u64 - 1; // 16383 > 4096
        let mu = MuN::new(&k, n).unwrap();
        for e in [0u64, 1, 77, 5000, 16000] {
            assert_eq!(mu.dlog(mu.element(e)).unwrap(), e);
        }
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn field_axioms_gf49(a in 0u32..49, b in 0u32..49, c in 0u32..49) {
            let k = FiniteField::new(7, 2).unwrap();
            let (a, b, c) = (FieldElem(a), FieldElem(b), FieldElem(c));
            prop_assert_eq!(k.add(a, b), k.add(b, a));
            prop_assert_eq!(k.mul(k.mul(a, b), c), k.mul(a, k.mul(b, c)));
            prop_assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
            prop_assert_eq!(k.sub(k.add(a, b), b), a);
            if a.0 != 0 {
                prop_assert_eq!(k.mul(a, k.inv(a).unwrap()), k.one());
            }
        }

        #[test]
        fn nth_root_inverts_power(a in 1u32..125, n in 1u64..9) {
            let k = FiniteField::new(5, 3).unwrap();
            let a = FieldElem(a);
            let root = k.nth_root(a, n).unwrap();
            let g = gcd(n, 124);
            let expect_some = k.pow(a, (124 / g) as u128) == k.one();
            prop_assert_eq!(root.is_some(), expect_some);
            if let Some(b) = root {
                prop_assert_eq!(k.pow(b, n as u128), a);
            }
        }

        #[test]
        fn dlog_is_additive(x in 0u64..12, y in 0u64..12) {
            let k = FiniteField::prime(13).unwrap();
            let mu = MuN::new(&k, 12).unwrap();
            let z = mu.element(x);
            let w = mu.element(y);
            prop_assert_eq!(mu.dlog(k.mul(z, w)).unwrap(), (mu.dlog(z).unwrap() + mu.dlog(w).unwrap()) % 12);
        }
    }
}
