use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{domain, Error, Result};
use crate::ffield::{format_elem, FieldElem, FiniteField, Gf, MAX_FIELD_ORDER};

/// Point of y^2 = x^3 + ax + b over some F_{p^d}; coordinates in that field's encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ECPoint {
    Infinity,
    Affine(FieldElem, FieldElem),
}

impl ECPoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, ECPoint::Infinity)
    }

    pub fn x(&self) -> Option<FieldElem> {
        match self {
            ECPoint::Affine(x, _) => Some(*x),
            ECPoint::Infinity => None,
        }
    }
}

/// Elliptic curve in short Weierstrass form over a prime field of characteristic > 3.
pub struct Curve {
    field: Gf,
    a: FieldElem,
    b: FieldElem,
    order: u64,
    exts: Mutex<BTreeMap<u32, Gf>>,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_curve(self))
    }
}

/// Shared curve handle.
pub type CurveRef = Arc<Curve>;

impl Curve {
    pub fn new(p: u32, a: i64, b: i64) -> Result<CurveRef> {
        if p <= 3 {
            return domain("curves need characteristic > 3");
        }
        let k = FiniteField::prime(p)?;
        let (a, b) = (k.from_int(a), k.from_int(b));
        // 4a^3 + 27b^2 != 0
        let disc = k.add(
            k.mul(k.from_int(4), k.pow(a, 3)),
            k.mul(k.from_int(27), k.mul(b, b)),
        );
        if disc.0 == 0 {
            return domain("singular curve");
        }
        let mut c = Curve { field: k.clone(), a, b, order: 0, exts: Mutex::new(BTreeMap::new()) };
        c.order = c.count_points(&k);
        c.exts.lock().unwrap().insert(1, k);
        Ok(Arc::new(c))
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn p(&self) -> u32 {
        self.field.characteristic()
    }

    pub fn a(&self) -> FieldElem {
        self.a
    }

    pub fn b(&self) -> FieldElem {
        self.b
    }

    /// #E(F_p).
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Trace of Frobenius t = p + 1 - #E(F_p).
    pub fn trace(&self) -> i64 {
        self.p() as i64 + 1 - self.order as i64
    }

    /// #E(F_{p^r}) from the trace recurrence s_r = t s_{r-1} - p s_{r-2}.
    pub fn order_over(&self, r: u32) -> u128 {
        let p = self.p() as i128;
        let t = self.trace() as i128;
        let (mut s0, mut s1) = (2i128, t);
        for _ in 1..r {
            let s2 = t * s1 - p * s0;
            s0 = s1;
            s1 = s2;
        }
        (p.pow(r) + 1 - s1) as u128
    }

    /// The field F_{p^d}, cached.
    pub fn ext(&self, d: u32) -> Result<Gf> {
        let mut cache = self.exts.lock().unwrap();
        if let Some(k) = cache.get(&d) {
            return Ok(k.clone());
        }
        let order = (self.p() as u64).checked_pow(d).unwrap_or(u64::MAX);
        if order > MAX_FIELD_ORDER {
            return Err(Error::Size(format!("GF({}^{d}) exceeds the field size limit", self.p())));
        }
        let k = FiniteField::new(self.p(), d)?;
        cache.insert(d, k.clone());
        Ok(k)
    }

    fn rhs(&self, k: &FiniteField, x: FieldElem) -> FieldElem {
        k.add(k.add(k.pow(x, 3), k.mul(self.a, x)), self.b)
    }

    pub fn is_on_curve(&self, k: &FiniteField, pt: &ECPoint) -> bool {
        match *pt {
            ECPoint::Infinity => true,
            ECPoint::Affine(x, y) => k.mul(y, y) == self.rhs(k, x),
        }
    }

    /// Point count over k via the quadratic character.
    fn count_points(&self, k: &FiniteField) -> u64 {
        let mut n = 1u64;
        for x in k.elements() {
            let r = self.rhs(k, x);
            n += match sqrt(k, r) {
                None => 0,
                Some(y) if y.0 == 0 => 1,
                Some(_) => 2,
            };
        }
        n
    }

    /// All points of E(k), affine points sorted by (x, y), then O.
    pub fn points(&self, k: &FiniteField) -> Result<Vec<ECPoint>> {
        if k.order() as u64 > MAX_FIELD_ORDER {
            return Err(Error::Size("field too large to enumerate".into()));
        }
        let mut out = Vec::new();
        for x in k.elements() {
            let r = self.rhs(k, x);
            if let Some(y) = sqrt(k, r) {
                out.push(ECPoint::Affine(x, y));
                if y.0 != 0 {
                    out.push(ECPoint::Affine(x, k.neg(y)));
                }
            }
        }
        out.sort();
        out.push(ECPoint::Infinity);
        Ok(out)
    }

    /// Point with the given x, choosing the smaller y, if any.
    pub fn lift_x(&self, k: &FiniteField, x: FieldElem) -> Option<ECPoint> {
        let y = sqrt(k, self.rhs(k, x))?;
        let y2 = k.neg(y);
        Some(ECPoint::Affine(x, y.min(y2)))
    }

    pub fn neg(&self, k: &FiniteField, p: &ECPoint) -> ECPoint {
        match *p {
            ECPoint::Infinity => ECPoint::Infinity,
            ECPoint::Affine(x, y) => ECPoint::Affine(x, k.neg(y)),
        }
    }

    /// Slope of the chord/tangent through P and Q, or None when the line is vertical.
    pub fn slope(&self, k: &FiniteField, p: &ECPoint, q: &ECPoint) -> Option<FieldElem> {
        let (ECPoint::Affine(x1, y1), ECPoint::Affine(x2, y2)) = (*p, *q) else { return None };
        if x1 != x2 {
            return Some(k.div(k.sub(y2, y1), k.sub(x2, x1)).expect("distinct x"));
        }
        if y1 != y2 || y1.0 == 0 {
            return None;
        }
        let num = k.add(k.mul(k.from_int(3), k.mul(x1, x1)), self.a);
        Some(k.div(num, k.add(y1, y1)).expect("nonzero y"))
    }

    pub fn add(&self, k: &FiniteField, p: &ECPoint, q: &ECPoint) -> ECPoint {
        match (*p, *q) {
            (ECPoint::Infinity, _) => *q,
            (_, ECPoint::Infinity) => *p,
            (ECPoint::Affine(x1, y1), ECPoint::Affine(x2, _)) => match self.slope(k, p, q) {
                None => ECPoint::Infinity,
                Some(l) => {
                    let x3 = k.sub(k.sub(k.mul(l, l), x1), x2);
                    let y3 = k.sub(k.mul(l, k.sub(x1, x3)), y1);
                    ECPoint::Affine(x3, y3)
                }
            },
        }
    }

    pub fn mul(&self, k: &FiniteField, p: &ECPoint, e: i64) -> ECPoint {
        let mut base = if e < 0 { self.neg(k, p) } else { *p };
        let mut e = e.unsigned_abs();
        let mut acc = ECPoint::Infinity;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(k, &acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.add(k, &base, &base);
            }
        }
        acc
    }

    /// Order of a point of E(F_p^d) given a multiple of it.
    pub fn point_order(&self, k: &FiniteField, p: &ECPoint, multiple: u128) -> u128 {
        let mut m = multiple;
        for (l, _) in factor_u128(multiple) {
            while m % l == 0 && self.mul(k, p, (m / l) as i64).is_infinity() {
                m /= l;
            }
        }
        m
    }

    /// Frobenius x -> x^p on coordinates.
    pub fn frobenius(&self, k: &FiniteField, p: &ECPoint) -> ECPoint {
        match *p {
            ECPoint::Infinity => ECPoint::Infinity,
            ECPoint::Affine(x, y) => ECPoint::Affine(k.frobenius(x), k.frobenius(y)),
        }
    }
}

/// Square root via the log table (smaller root first), None for non-squares.
pub(crate) fn sqrt(k: &FiniteField, a: FieldElem) -> Option<FieldElem> {
    if a.0 == 0 {
        return Some(a);
    }
    let l = k.log(a).ok()?;
    if l % 2 == 1 {
        return None;
    }
    let r = k.pow(k.generator(), (l / 2) as u128);
    Some(r.min(k.neg(r)))
}

pub(crate) fn factor_u128(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// A closed point: the Frobenius orbit of `point`, which is the orbit's least member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ECPlace {
    pub degree: u32,
    pub point: ECPoint,
}

impl ECPlace {
    pub fn infinity() -> Self {
        ECPlace { degree: 1, point: ECPoint::Infinity }
    }

    /// Place of a rational point.
    pub fn rational(p: ECPoint) -> Self {
        ECPlace { degree: 1, point: p }
    }

    pub fn is_infinity(&self) -> bool {
        self.point.is_infinity()
    }

    /// Place through an arbitrary point of E(F_{p^d}) (d is the point's field degree).
    pub fn of_point(c: &Curve, d: u32, p: &ECPoint) -> Result<Self> {
        let k = c.ext(d)?;
        if !c.is_on_curve(&k, p) {
            return domain("point is not on the curve");
        }
        if p.is_infinity() {
            return Ok(Self::infinity());
        }
        let orbit = orbit(c, &k, p);
        let deg = orbit.len() as u32;
        let rep = *orbit.iter().min().unwrap();
        if deg == d {
            return Ok(ECPlace { degree: d, point: rep });
        }
        // re-encode in the subfield F_{p^deg}
        let small = c.ext(deg)?;
        let emb = crate::ffield::Embedding::new(&small, &k)?;
        let (ECPoint::Affine(x, y), _) = (rep, ()) else { unreachable!() };
        let x = emb.preimage(x).expect("orbit size bounds the field of definition");
        let y = emb.preimage(y).expect("orbit size bounds the field of definition");
        let pts = orbit_in(c, &small, &ECPoint::Affine(x, y));
        Ok(ECPlace { degree: deg, point: *pts.iter().min().unwrap() })
    }

    /// All points of the orbit, in the field F_{p^degree}.
    pub fn points(&self, c: &Curve) -> Result<Vec<ECPoint>> {
        let k = c.ext(self.degree)?;
        Ok(orbit_in(c, &k, &self.point))
    }
}

fn orbit_in(c: &Curve, k: &FiniteField, p: &ECPoint) -> Vec<ECPoint> {
    let mut out = vec![*p];
    let mut cur = c.frobenius(k, p);
    while cur != *p {
        out.push(cur);
        cur = c.frobenius(k, &cur);
    }
    out
}

fn orbit(c: &Curve, k: &FiniteField, p: &ECPoint) -> Vec<ECPoint> {
    orbit_in(c, k, p)
}

/// All places of degree <= d_max, grouped by degree, each orbit once.
pub fn places_up_to_degree(c: &Curve, d_max: u32) -> Result<Vec<ECPlace>> {
    let mut out = Vec::new();
    for d in 1..=d_max {
        let k = c.ext(d)?;
        for p in c.points(&k)? {
            if p.is_infinity() {
                if d == 1 {
                    out.push(ECPlace::infinity());
                }
                continue;
            }
            let orb = orbit(c, &k, &p);
            if orb.len() as u32 == d && orb.iter().min() == Some(&p) {
                out.push(ECPlace { degree: d, point: p });
            }
        }
    }
    Ok(out)
}

/// Divisor on the curve: places with nonzero multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ECDivisor {
    terms: BTreeMap<ECPlace, i64>,
}

impl ECDivisor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (ECPlace, i64)>) -> Self {
        let mut d = Self::zero();
        for (p, k) in terms {
            d.add_term(p, k);
        }
        d
    }

    /// Divisor of rational points.
    pub fn from_points(terms: impl IntoIterator<Item = (ECPoint, i64)>) -> Self {
        Self::from_terms(terms.into_iter().map(|(p, k)| (ECPlace::rational(p), k)))
    }

    pub fn add_term(&mut self, p: ECPlace, k: i64) {
        if k == 0 {
            return;
        }
        let e = self.terms.entry(p).or_insert(0);
        *e += k;
        if *e == 0 {
            self.terms.remove(&p);
        }
    }

    pub fn ord(&self, p: &ECPlace) -> i64 {
        self.terms.get(p).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ECPlace, i64)> {
        self.terms.iter().map(|(p, &k)| (p, k))
    }

    pub fn contains(&self, p: &ECPlace) -> bool {
        self.terms.contains_key(p)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(p, &k)| k * p.degree as i64).sum()
    }

    pub fn add(&self, o: &ECDivisor) -> ECDivisor {
        let mut d = self.clone();
        for (p, k) in o.terms() {
            d.add_term(*p, k);
        }
        d
    }

    pub fn scale(&self, c: i64) -> ECDivisor {
        ECDivisor::from_terms(self.terms().map(|(p, k)| (*p, k * c)))
    }

    pub fn sub(&self, o: &ECDivisor) -> ECDivisor {
        self.add(&o.scale(-1))
    }

    /// Sum of the points in E(F_p) when every place is rational.
    pub fn rational_sum(&self, c: &Curve) -> Result<ECPoint> {
        let k = c.field();
        let mut acc = ECPoint::Infinity;
        for (p, e) in self.terms() {
            if p.degree != 1 {
                return domain("divisor has non-rational places");
            }
            acc = c.add(k, &acc, &c.mul(k, &p.point, e));
        }
        Ok(acc)
    }
}

// ---- text ----

pub fn format_curve(c: &Curve) -> String {
    let k = c.field();
    let sgn = |v: FieldElem| -> i64 {
        let p = k.characteristic() as i64;
        let v = v.0 as i64;
        if 2 * v > p {
            v - p
        } else {
            v
        }
    };
    let term = |v: i64, var: &str| -> String {
        let sign = if v < 0 { "-" } else { "+" };
        match (v.unsigned_abs(), var) {
            (0, _) => String::new(),
            (m, "") => format!("{sign}{m}"),
            (1, x) => format!("{sign}{x}"),
            (m, x) => format!("{sign}{m}*{x}"),
        }
    };
    format!(
        "y^2=x^3{}{} over GF({})",
        term(sgn(c.a), "x"),
        term(sgn(c.b), ""),
        k.order()
    )
}

pub fn parse_curve(s: &str) -> Result<CurveRef> {
    let bad = || Error::Parse(format!("expected 'y^2=x^3+a*x+b over GF(p)', got {s:?}"));
    let (eq, field) = s.rsplit_once(" over ").ok_or_else(bad)?;
    let k = crate::ratfun::text::parse_field(field)?;
    if k.degree() != 1 {
        return Err(Error::Parse("curves are defined over prime fields".into()));
    }
    let rhs = eq.replace(' ', "");
    let rhs = rhs.strip_prefix("y^2=").ok_or_else(bad)?;
    let poly = crate::ratfun::text::parse_poly(&k, rhs)?;
    if poly.degree() != 3 || !poly.is_monic() || poly.coeff(2).0 != 0 {
        return Err(bad());
    }
    let p = k.characteristic() as i64;
    Curve::new(k.characteristic(), poly.coeff(1).0 as i64 % p, poly.coeff(0).0 as i64)
        .map_err(|e| Error::Parse(e.to_string()))
}

fn format_coord(k: &FiniteField, v: FieldElem) -> String {
    if v.0 < k.characteristic() {
        v.0.to_string()
    } else {
        let s = format_elem(k, v);
        s[s.find(':').unwrap() + 1..].to_string()
    }
}

/// "(x,y)@GF(p^r)" or "O".
pub fn format_point(k: &FiniteField, p: &ECPoint) -> String {
    match *p {
        ECPoint::Infinity => "O".into(),
        ECPoint::Affine(x, y) => {
            let field = match k.degree() {
                1 => format!("GF({})", k.characteristic()),
                r => format!("GF({}^{r})", k.characteristic()),
            };
            format!("({},{})@{field}", format_coord(k, x), format_coord(k, y))
        }
    }
}

/// Parse a point; returns the field degree r and the point.
pub fn parse_point(c: &Curve, s: &str) -> Result<(u32, ECPoint)> {
    let s = s.trim();
    if s == "O" {
        return Ok((1, ECPoint::Infinity));
    }
    let bad = || Error::Parse(format!("expected '(x,y)@GF(p^r)' or 'O', got {s:?}"));
    let (coords, field) = s.rsplit_once('@').ok_or_else(bad)?;
    let inner = field.strip_prefix("GF(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
    let (p, r) = inner.split_once('^').unwrap_or((inner, "1"));
    let p: u32 = p.parse().map_err(|_| bad())?;
    let r: u32 = r.parse().map_err(|_| bad())?;
    if p != c.p() {
        return Err(Error::Parse("point field characteristic differs from the curve".into()));
    }
    let k = c.ext(r)?;
    let body = coords.trim().strip_prefix('(').and_then(|b| b.strip_suffix(')')).ok_or_else(bad)?;
    // split at the comma outside brackets
    let mut depth = 0;
    let mut cut = None;
    for (i, ch) in body.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => cut = Some(i),
            _ => {}
        }
    }
    let cut = cut.ok_or_else(bad)?;
    let coord = |t: &str| -> Result<FieldElem> {
        let t = t.trim();
        if t.starts_with('[') {
            crate::ffield::parse_elem(&k, &format!("GF({}):{t}", k.order()))
        } else {
            let v: i64 = t.parse().map_err(|_| bad())?;
            Ok(k.from_int(v))
        }
    };
    let pt = ECPoint::Affine(coord(&body[..cut])?, coord(&body[cut + 1..])?);
    if !c.is_on_curve(&k, &pt) {
        return Err(Error::Parse(format!("{s} is not on the curve")));
    }
    Ok((r, pt))
}
