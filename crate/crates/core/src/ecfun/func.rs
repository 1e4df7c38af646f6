use std::collections::{BTreeMap, BTreeSet};

use crate::ecfun::curve::{Curve, ECDivisor, ECPlace, ECPoint};
use crate::error::{domain, Error, Result};
use crate::ffield::{FieldElem, FiniteField, MuN};

/// A line y - lambda x - nu or a vertical x - x0, with its zeros (rational points).
/// Every factor has leading coefficient 1 at O for the uniformizer x/y.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    Line { lambda: FieldElem, nu: FieldElem, zeros: [ECPoint; 3] },
    Vertical { x0: FieldElem, zeros: [ECPoint; 2] },
}

impl Factor {
    /// Pole order at O.
    pub fn pole_order(&self) -> i64 {
        match self {
            Factor::Line { .. } => 3,
            Factor::Vertical { .. } => 2,
        }
    }

    pub fn zeros(&self) -> &[ECPoint] {
        match self {
            Factor::Line { zeros, .. } => zeros,
            Factor::Vertical { zeros, .. } => zeros,
        }
    }

    /// Value at an affine point (coordinates in any extension of F_p).
    pub fn eval(&self, k: &FiniteField, r: &ECPoint) -> FieldElem {
        let ECPoint::Affine(x, y) = *r else { panic!("factor evaluated at O") };
        match self {
            Factor::Line { lambda, nu, .. } => k.sub(k.sub(y, k.mul(*lambda, x)), *nu),
            Factor::Vertical { x0, .. } => k.sub(x, *x0),
        }
    }
}

/// The vertical through P (affine, rational).
pub fn vertical(c: &Curve, p: &ECPoint) -> Factor {
    let k = c.field();
    let ECPoint::Affine(x, _) = *p else { panic!("vertical at O") };
    let mut zeros = [*p, c.neg(k, p)];
    zeros.sort();
    Factor::Vertical { x0: x, zeros }
}

/// Chord/tangent through P and Q (affine, rational, Q != -P).
pub fn line(c: &Curve, p: &ECPoint, q: &ECPoint) -> Factor {
    let k = c.field();
    let lambda = c.slope(k, p, q).expect("non-vertical line");
    let ECPoint::Affine(x1, y1) = *p else { unreachable!() };
    let nu = k.sub(y1, k.mul(lambda, x1));
    let mut zeros = [*p, *q, c.neg(k, &c.add(k, p, q))];
    zeros.sort();
    Factor::Line { lambda, nu, zeros }
}

/// Function on E as constant * prod factor^e, with the divisor it was declared to have.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MillerFunc {
    pub constant: FieldElem,
    pub factors: BTreeMap<Factor, i64>,
    pub declared: ECDivisor,
}

impl MillerFunc {
    pub fn constant(c: FieldElem) -> Self {
        MillerFunc { constant: c, factors: BTreeMap::new(), declared: ECDivisor::zero() }
    }

    pub fn one() -> Self {
        Self::constant(FieldElem(1))
    }

    pub fn from_factor(c: &Curve, f: Factor) -> Self {
        let mut m = Self::one();
        m.declared = factor_divisor(c, &f);
        m.factors.insert(f, 1);
        m
    }

    /// l_{P,Q} / v_{P+Q}: divisor (P) + (Q) - (P+Q) - (O); trivial if P or Q is O.
    pub fn chord_ratio(c: &Curve, p: &ECPoint, q: &ECPoint) -> Self {
        let k = c.field();
        if p.is_infinity() || q.is_infinity() {
            return Self::one();
        }
        let s = c.add(k, p, q);
        if s.is_infinity() {
            return Self::from_factor(c, vertical(c, p));
        }
        Self::from_factor(c, line(c, p, q)).div(c, &Self::from_factor(c, vertical(c, &s)))
    }

    pub fn mul(&self, c: &Curve, o: &MillerFunc) -> MillerFunc {
        let k = c.field();
        let mut factors = self.factors.clone();
        for (f, e) in &o.factors {
            let v = factors.entry(f.clone()).or_insert(0);
            *v += e;
            if *v == 0 {
                factors.remove(f);
            }
        }
        MillerFunc {
            constant: k.mul(self.constant, o.constant),
            factors,
            declared: self.declared.add(&o.declared),
        }
    }

    pub fn pow(&self, c: &Curve, e: i64) -> MillerFunc {
        let k = c.field();
        let mut factors = BTreeMap::new();
        if e != 0 {
            for (f, x) in &self.factors {
                factors.insert(f.clone(), x * e);
            }
        }
        MillerFunc {
            constant: k.pow_signed(self.constant, e).expect("nonzero constant"),
            factors,
            declared: self.declared.scale(e),
        }
    }

    pub fn inv(&self, c: &Curve) -> MillerFunc {
        self.pow(c, -1)
    }

    pub fn div(&self, c: &Curve, o: &MillerFunc) -> MillerFunc {
        self.mul(c, &o.inv(c))
    }

    pub fn scale(&self, c: &Curve, s: FieldElem) -> MillerFunc {
        let mut m = self.clone();
        m.constant = c.field().mul(m.constant, s);
        m
    }

    /// Divisor as the sum of factor divisors.
    pub fn divisor(&self, c: &Curve) -> ECDivisor {
        let mut d = ECDivisor::zero();
        for (f, e) in &self.factors {
            d = d.add(&factor_divisor(c, f).scale(*e));
        }
        d
    }

    /// Whether the factor-wise divisor equals the declared one.
    pub fn divisor_consistent(&self, c: &Curve) -> bool {
        self.divisor(c) == self.declared
    }

    /// Rational points where some factor vanishes (the evaluation-unsafe set), plus O.
    pub fn factor_support(&self) -> BTreeSet<ECPoint> {
        let mut s: BTreeSet<ECPoint> =
            self.factors.keys().flat_map(|f| f.zeros().iter().copied()).collect();
        s.insert(ECPoint::Infinity);
        s
    }

    /// Value at a point of E(K), K an extension of F_p.
    pub fn eval_point(&self, c: &Curve, k: &FiniteField, r: &ECPoint) -> Result<FieldElem> {
        if r.is_infinity() {
            if self.declared.ord(&ECPlace::infinity()) != 0 {
                return Err(Error::SupportOverlap("function has a zero or pole at O".into()));
            }
            return Ok(self.constant);
        }
        let mut acc = self.constant;
        for (f, &e) in &self.factors {
            let v = f.eval(k, r);
            if v.0 == 0 {
                return Err(Error::SupportOverlap(format!(
                    "a factor vanishes at {}",
                    crate::ecfun::curve::format_point(k, r)
                )));
            }
            acc = k.mul(acc, k.pow_signed(v, e)?);
        }
        let _ = c;
        Ok(acc)
    }

    /// prod f(R)^e over points of E(K).
    pub fn eval_points(&self, c: &Curve, k: &FiniteField, pts: &[(ECPoint, i64)]) -> Result<FieldElem> {
        let mut acc = k.one();
        for (r, e) in pts {
            let v = self.eval_point(c, k, r)?;
            acc = k.mul(acc, k.pow_signed(v, *e)?);
        }
        Ok(acc)
    }
}

fn factor_divisor(c: &Curve, f: &Factor) -> ECDivisor {
    let mut d = ECDivisor::from_points(f.zeros().iter().map(|p| (*p, 1)));
    d.add_term(ECPlace::infinity(), -f.pole_order());
    let _ = c;
    d
}

/// f_{n,P} with divisor n(P) - (nP) - (n-1)(O), by double-and-add.
pub fn miller_function(c: &Curve, n: u64, p: &ECPoint) -> Result<MillerFunc> {
    if n == 0 {
        return domain("n must be positive");
    }
    let k = c.field();
    if !c.is_on_curve(k, p) {
        return domain("point is not on the curve");
    }
    let mut f = MillerFunc::one();
    let mut t = *p;
    let bits = 64 - n.leading_zeros();
    for i in (0..bits - 1).rev() {
        f = f.pow(c, 2).mul(c, &MillerFunc::chord_ratio(c, &t, &t));
        t = c.add(k, &t, &t);
        if (n >> i) & 1 == 1 {
            f = f.mul(c, &MillerFunc::chord_ratio(c, &t, p));
            t = c.add(k, &t, p);
        }
    }
    let declared = ECDivisor::from_terms([
        (ECPlace::rational(*p), n as i64),
        (ECPlace::rational(t), -1),
        (ECPlace::infinity(), -(n as i64 - 1)),
    ]);
    debug_assert_eq!(f.declared, declared);
    f.declared = declared;
    Ok(f)
}

/// f(D) = prod Norm(f(P_v))^{ord_v D} over places v of D.
pub fn ec_evaluate(c: &Curve, f: &MillerFunc, d: &ECDivisor) -> Result<FieldElem> {
    let k = c.field();
    let mut acc = k.one();
    for (pl, e) in d.terms() {
        if f.declared.contains(pl) {
            return Err(Error::SupportOverlap("supports of function and divisor meet".into()));
        }
        let kd = c.ext(pl.degree)?;
        let v = f.eval_point(c, &kd, &pl.point)?;
        let nm = kd.norm(v, k)?;
        acc = k.mul(acc, k.pow_signed(nm, e)?);
    }
    Ok(acc)
}

/// A function with a given principal divisor supported on rational places.
pub fn function_with_divisor(c: &Curve, d: &ECDivisor) -> Result<MillerFunc> {
    let k = c.field();
    if d.degree() != 0 {
        return domain("divisor has nonzero degree");
    }
    if !d.rational_sum(c)?.is_infinity() {
        return domain("divisor is not principal: its points do not sum to O");
    }
    // D = sum e_i ((P_i) - (O)); each e((P) - (O)) = div f_{e,P} + ((eP) - (O))
    let mut h = MillerFunc::one();
    let mut acc = ECPoint::Infinity;
    for (pl, e) in d.terms() {
        if pl.is_infinity() {
            continue;
        }
        let p = pl.point;
        let m = miller_function(c, e.unsigned_abs(), &p)?;
        let ep = c.mul(k, &p, e.unsigned_abs() as i64);
        // (T) - (O) term for this summand
        let (g, t) = if e > 0 {
            (m, ep)
        } else {
            // -((T) - (O)) = ((-T) - (O)) - div v_T
            let mut g = m.inv(c);
            if !ep.is_infinity() {
                g = g.div(c, &MillerFunc::from_factor(c, vertical(c, &ep)));
            }
            (g, c.neg(k, &ep))
        };
        h = h.mul(c, &g);
        // (A) - (O) + (T) - (O) = (A+T) - (O) + div(l_{A,T}/v_{A+T})
        h = h.mul(c, &MillerFunc::chord_ratio(c, &acc, &t));
        acc = c.add(k, &acc, &t);
    }
    debug_assert!(acc.is_infinity());
    let h = MillerFunc { constant: h.constant, declared: h.divisor(c), factors: h.factors };
    if h.declared != *d {
        return Err(Error::Domain("internal: divisor synthesis mismatch".into()));
    }
    Ok(h)
}

/// All h with h^n = g, given div(g) = n D'.
pub fn nth_root_function(c: &Curve, g: &MillerFunc, n: u64) -> Result<Vec<MillerFunc>> {
    let k = c.field();
    let dg = g.divisor(c);
    let mut d1 = ECDivisor::zero();
    for (pl, e) in dg.terms() {
        if e % n as i64 != 0 {
            return domain(format!("divisor of g is not divisible by {n}"));
        }
        d1.add_term(*pl, e / n as i64);
    }
    let w = function_with_divisor(c, &d1)?;
    // g / w^n is the constant const(g) / const(w)^n
    let cn = k.div(g.constant, k.pow(w.constant, n as u128))?;
    let Some(root) = k.nth_root(cn, n)? else {
        let mut r = 2u32;
        let need = loop {
            match c.ext(r) {
                Ok(kr) if kr.nth_root(cn, n)?.is_some() => break Some(r),
                Ok(_) => r += 1,
                Err(_) => break None,
            }
        };
        return Err(Error::ExtensionDegree(match need {
            Some(r) => format!("n-th root of the constant needs GF({}^{r})", c.p()),
            None => "n-th root of the constant needs a larger field".into(),
        }));
    };
    let base = w.scale(c, root);
    let zetas: Vec<FieldElem> =
        k.elements().filter(|z| z.0 != 0 && k.pow(*z, n as u128) == k.one()).collect();
    Ok(zetas.into_iter().map(|z| base.scale(c, z)).collect())
}

/// The pairing value as a discrete log in mu_n of F_p.
pub fn mu_log(c: &Curve, z: FieldElem, n: u64) -> Result<u64> {
    MuN::new(c.field(), n)?.dlog(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecfun::curve::CurveRef;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn curve() -> CurveRef {
        Curve::new(101, 1, 3).unwrap()
    }

    #[test]
    fn miller_divisors() {
        let c = curve();
        let k = c.field();
        let pts = c.points(k).unwrap();
        let p = pts[5];
        let f1 = miller_function(&c, 1, &p).unwrap();
        assert!(f1.factors.is_empty());
        assert!(f1.declared.is_zero());
        let f2 = miller_function(&c, 2, &p).unwrap();
        assert!(f2.divisor_consistent(&c));
        let two_p = c.add(k, &p, &p);
        assert_eq!(
            f2.declared,
            ECDivisor::from_terms([
                (ECPlace::rational(p), 2),
                (ECPlace::rational(two_p), -1),
                (ECPlace::infinity(), -1)
            ])
        );
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let n = rng.gen_range(1..=50);
            let q = pts[rng.gen_range(0..pts.len() - 1)];
            let f = miller_function(&c, n, &q).unwrap();
            assert!(f.divisor_consistent(&c));
            assert_eq!(f.declared.degree(), 0);
        }
    }

    #[test]
    fn constant_at_degree_zero_divisor() {
        let c = curve();
        let k = c.field();
        let pts = c.points(k).unwrap();
        let d = ECDivisor::from_points([(pts[1], 1), (pts[7], -1)]);
        assert_eq!(ec_evaluate(&c, &MillerFunc::constant(FieldElem(17)), &d).unwrap(), k.one());
    }

    fn random_function(c: &Curve, rng: &mut ChaCha8Rng, pts: &[ECPoint]) -> MillerFunc {
        let k = c.field();
        let mut f = MillerFunc::constant(FieldElem(rng.gen_range(1..c.p())));
        for _ in 0..2 {
            let p = pts[rng.gen_range(0..pts.len() - 1)];
            let q = pts[rng.gen_range(0..pts.len() - 1)];
            if c.add(k, &p, &q).is_infinity() {
                continue;
            }
            let l = MillerFunc::from_factor(c, line(c, &p, &q));
            f = if rng.gen_bool(0.5) { f.mul(c, &l) } else { f.div(c, &l) };
        }
        f
    }

    #[test]
    fn weil_reciprocity_on_curve() {
        let c = curve();
        let k = c.field();
        let pts = c.points(k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut checked = 0;
        while checked < 100 {
            let f = random_function(&c, &mut rng, &pts);
            let g = random_function(&c, &mut rng, &pts);
            let sf = f.factor_support();
            let sg = g.factor_support();
            // disjoint supports away from O, and both must be units at O or share no O term
            if sf.iter().any(|p| !p.is_infinity() && sg.contains(p)) {
                continue;
            }
            let (df, dg) = (f.divisor(&c), g.divisor(&c));
            if df.contains(&ECPlace::infinity()) && dg.contains(&ECPlace::infinity()) {
                continue;
            }
            let (Ok(a), Ok(b)) = (ec_evaluate(&c, &f, &dg), ec_evaluate(&c, &g, &df)) else {
                continue;
            };
            assert_eq!(a, b);
            checked += 1;
        }
    }

    #[test]
    fn evaluation_at_higher_degree_places_is_multiplicative() {
        let c = Curve::new(13, 2, 5).unwrap();
        let k = c.field();
        let pts = c.points(k).unwrap();
        let places = crate::ecfun::curve::places_up_to_degree(&c, 2).unwrap();
        let deg2: Vec<ECPlace> = places.iter().filter(|p| p.degree == 2).copied().collect();
        let f = MillerFunc::from_factor(&c, line(&c, &pts[0], &pts[2]));
        let g = MillerFunc::from_factor(&c, vertical(&c, &pts[4]));
        let d = ECDivisor::from_terms([(deg2[0], 1), (deg2[1], -2)]);
        let e = ECDivisor::from_terms([(deg2[2], 1), (deg2[0], 1)]);
        let fg = f.mul(&c, &g);
        let (a, b, ab) = (
            ec_evaluate(&c, &f, &d).unwrap(),
            ec_evaluate(&c, &g, &d).unwrap(),
            ec_evaluate(&c, &fg, &d).unwrap(),
        );
        assert_eq!(k.mul(a, b), ab);
        let (x, y, xy) = (
            ec_evaluate(&c, &f, &d).unwrap(),
            ec_evaluate(&c, &f, &e).unwrap(),
            ec_evaluate(&c, &f, &d.add(&e)).unwrap(),
        );
        assert_eq!(k.mul(x, y), xy);
    }

    #[test]
    fn nth_roots_of_functions() {
        let c = curve();
        let k = c.field();
        let pts = c.points(k).unwrap();
        let n = 5u64; // 5 | 100
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = random_function(&c, &mut rng, &pts);
        let g = w.pow(&c, n as i64);
        let cands = nth_root_function(&c, &g, n).unwrap();
        assert_eq!(cands.len(), 5);
        // each candidate satisfies h^n = g on random points
        let mut tested = 0;
        for r in pts.iter().step_by(3) {
            let (Ok(gv), Ok(_)) = (g.eval_point(&c, k, r), w.eval_point(&c, k, r)) else { continue };
            for h in &cands {
                let Ok(hv) = h.eval_point(&c, k, r) else { continue };
                assert_eq!(k.pow(hv, n as u128), gv);
                tested += 1;
            }
        }
        assert!(tested > 20);
        // w itself is among the candidates up to evaluation
        let r = pts.iter().find(|r| w.eval_point(&c, k, r).is_ok() && cands[0].eval_point(&c, k, r).is_ok()).unwrap();
        let wv = w.eval_point(&c, k, r).unwrap();
        assert!(cands.iter().any(|h| h.eval_point(&c, k, r).unwrap() == wv));
        // a constant with no root in F_p
        let non_root = k.elements().find(|&a| a.0 != 0 && k.nth_root(a, n).unwrap().is_none()).unwrap();
        assert!(matches!(
            nth_root_function(&c, &MillerFunc::constant(non_root), n),
            Err(Error::ExtensionDegree(_))
        ));
        let cc = nth_root_function(&c, &MillerFunc::constant(k.from_int(32)), n).unwrap();
        assert!(cc.iter().any(|h| h.constant == k.from_int(2)));
    }
}
