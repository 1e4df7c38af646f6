use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ecfun::curve::{Curve, CurveRef, ECPoint};
use crate::ecfun::func::{miller_function, MillerFunc};
use crate::error::{domain, Error, Result};
use crate::ffield::{gcd, is_prime, mod_inverse, Embedding, FieldElem, FiniteField, Gf, MuN};

pub const MAX_EMBEDDING_DEGREE: u32 = 12;
const AUX_SEED: u64 = 0x7a7e;
const AUX_TRIES: usize = 4096;

/// Least k with n | p^k - 1.
pub fn embedding_degree(p: u32, n: u64) -> Result<u32> {
    if n == 0 || n % p as u64 == 0 {
        return domain(format!("n = {n} is not coprime to p = {p}"));
    }
    let mut acc = 1u128;
    for k in 1..=MAX_EMBEDDING_DEGREE {
        acc = acc * p as u128 % n as u128;
        if acc == 1 % n as u128 {
            return Ok(k);
        }
    }
    Err(Error::ExtensionDegree(format!(
        "mu_{n} needs an extension of GF({p}) of degree above {MAX_EMBEDDING_DEGREE}"
    )))
}

/// A Tate pairing value together with its discrete log in mu_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TateValue {
    pub field: Gf,
    pub value: FieldElem,
    pub dlog: u64,
}

/// Pairing context: curve, n, working field F_{p^k}.
#[derive(Clone, Debug)]
pub struct Tate {
    pub curve: CurveRef,
    pub n: u64,
    pub k: u32,
    pub field: Gf,
    mu: MuN,
}

impl Tate {
    pub fn new(curve: &CurveRef, n: u64) -> Result<Tate> {
        let k = embedding_degree(curve.p(), n)?;
        let field = curve.ext(k)?;
        let mu = MuN::new(&field, n)?;
        Ok(Tate { curve: curve.clone(), n, k, field, mu })
    }

    fn exponent(&self) -> u128 {
        (self.field.order() as u128 - 1) / self.n as u128
    }

    /// f(D) for D = (Q+R) - (R), in F_{p^k}.
    pub fn raw(&self, f: &MillerFunc, q: &ECPoint, r: &ECPoint) -> Result<FieldElem> {
        let (c, k) = (&self.curve, &self.field);
        let qr = c.add(k, q, r);
        f.eval_points(c, k, &[(qr, 1), (*r, -1)])
    }

    /// Deterministic auxiliary R over `k` with R, Q+R affine and off every factor zero.
    pub fn auxiliary_in(&self, k: &FiniteField, f: &MillerFunc, q: &ECPoint) -> Option<ECPoint> {
        let c = &self.curve;
        let mut rng = ChaCha8Rng::seed_from_u64(AUX_SEED);
        for _ in 0..AUX_TRIES {
            let x = FieldElem(rng.gen_range(0..k.order()));
            let Some(r) = c.lift_x(k, x) else { continue };
            let r = if rng.gen_bool(0.5) { c.neg(k, &r) } else { r };
            let qr = c.add(k, q, &r);
            if qr.is_infinity() {
                continue;
            }
            if f.eval_point(c, k, &r).is_ok() && f.eval_point(c, k, &qr).is_ok() {
                return Some(r);
            }
        }
        None
    }

    /// Auxiliary R over the working field.
    pub fn auxiliary(&self, f: &MillerFunc, q: &ECPoint) -> Result<ECPoint> {
        self.auxiliary_in(&self.field, f, q)
            .ok_or_else(|| Error::SupportOverlap("no auxiliary point avoids the Miller function".into()))
    }

    /// t(P, Q) = f_{n,P}((Q+R) - (R))^{(p^k-1)/n}; P rational of order dividing n,
    /// Q a point over F_{p^k} (rational points share their encoding).
    ///
    /// When no R over F_{p^k} avoids the Miller support (tiny curves), R is taken over
    /// F_{p^{kd}} with gcd(d, n) = 1: the Frobenius orbit of (Q+R) - (R) is equivalent to
    /// d((Q) - (O)), its value is the norm, and the log is divided by d.
    pub fn pair(&self, p: &ECPoint, q: &ECPoint) -> Result<TateValue> {
        let (c, k) = (&self.curve, &self.field);
        let base = c.field();
        if !c.is_on_curve(base, p) {
            return domain("P is not a rational point of the curve");
        }
        if !c.is_on_curve(k, q) {
            return domain("Q is not on the curve over the working field");
        }
        if !c.mul(base, p, self.n as i64).is_infinity() {
            return domain(format!("P is not {}-torsion", self.n));
        }
        if p.is_infinity() || q.is_infinity() {
            return Ok(self.wrap(k.one()));
        }
        let f = miller_function(c, self.n, p)?;
        if let Some(r) = self.auxiliary_in(k, &f, q) {
            let v = self.raw(&f, q, &r)?;
            return Ok(self.wrap(k.pow(v, self.exponent())));
        }
        for d in 2..=MAX_EMBEDDING_DEGREE {
            if gcd(d as u64, self.n) != 1 {
                continue;
            }
            let Ok(kd) = c.ext(self.k * d) else { break };
            let emb = Embedding::new(k, &kd)?;
            let ECPoint::Affine(x, y) = *q else { unreachable!() };
            let qd = ECPoint::Affine(emb.image(x), emb.image(y));
            let Some(r) = self.auxiliary_in(&kd, &f, &qd) else { continue };
            let qr = c.add(&kd, &qd, &r);
            let v = f.eval_points(c, &kd, &[(qr, 1), (r, -1)])?;
            let nv = kd.norm(v, k)?;
            let t = self.finalize(nv).dlog;
            let dinv = mod_inverse(d as u64, self.n).expect("d coprime to n");
            let dlog = (t as u128 * dinv as u128 % self.n as u128) as u64;
            return Ok(self.wrap(self.mu.element(dlog)));
        }
        Err(Error::SupportOverlap("no auxiliary point avoids the Miller function".into()))
    }

    /// Final exponentiation of an already evaluated value.
    pub fn finalize(&self, v: FieldElem) -> TateValue {
        self.wrap(self.field.pow(v, self.exponent()))
    }

    fn wrap(&self, value: FieldElem) -> TateValue {
        let dlog = self.mu.dlog(value).expect("final exponentiation lands in mu_n");
        TateValue { field: self.field.clone(), value, dlog }
    }

    pub fn mu(&self) -> &MuN {
        &self.mu
    }
}

/// Free function form of the pairing.
pub fn tate_pairing(c: &CurveRef, p: &ECPoint, q: &ECPoint, n: u64) -> Result<TateValue> {
    Tate::new(c, n)?.pair(p, q)
}

/// A curve with E(F_p)[n] cyclic of order n, n | p - 1 and a point of exact order n.
#[derive(Clone, Debug)]
pub struct SelectedCurve {
    pub curve: CurveRef,
    pub n: u64,
    /// Generator of E(F_p)[n].
    pub torsion: ECPoint,
    /// Point whose class generates E(F_p)/nE(F_p).
    pub cotorsion: ECPoint,
}

/// Scan primes p = 1 mod n (p > 3) and small a, b by point counting.
pub fn select_curve(n: u64, min_p: u32) -> Result<SelectedCurve> {
    if n < 2 {
        return domain("n must be at least 2");
    }
    let mut p = min_p.max(5);
    while (p as u64) < (1 << 16) {
        if is_prime(p as u64) && (p as u64 - 1) % n == 0 {
            for a in 0..p.min(12) as i64 {
                for b in 1..p.min(12) as i64 {
                    let Ok(c) = Curve::new(p, a, b) else { continue };
                    let ord = c.order();
                    if ord % n != 0 || ord % (n * n) == 0 {
                        continue;
                    }
                    if let Some(s) = desk_pairing_setup(&c, n)? {
                        return Ok(s);
                    }
                }
            }
        }
        p += 1;
    }
    Err(Error::Size(format!("no curve found for n = {n}")))
}

fn desk_pairing_setup(c: &CurveRef, n: u64) -> Result<Option<SelectedCurve>> {
    let k = c.field();
    let pts = c.points(k)?;
    let torsion: Vec<ECPoint> =
        pts.iter().filter(|p| c.mul(k, p, n as i64).is_infinity()).copied().collect();
    if torsion.len() as u64 != n {
        return Ok(None);
    }
    let Some(gen) = torsion.iter().find(|p| c.point_order(k, p, n as u128) == n as u128) else {
        return Ok(None);
    };
    let t = Tate::new(c, n)?;
    for q in &pts {
        if t.pair(gen, q)?.dlog != 0 && gcd(t.pair(gen, q)?.dlog, n) == 1 {
            return Ok(Some(SelectedCurve {
                curve: c.clone(),
                n,
                torsion: *gen,
                cotorsion: *q,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecfun::func::{ec_evaluate, line};

    #[test]
    fn embedding_degrees() {
        assert_eq!(embedding_degree(101, 5).unwrap(), 1);
        assert_eq!(embedding_degree(7, 4).unwrap(), 2);
        assert_eq!(embedding_degree(5, 3).unwrap(), 2);
        assert!(embedding_degree(5, 5).is_err());
    }

    #[test]
    fn trivial_arguments() {
        let s = select_curve(5, 5).unwrap();
        let t = Tate::new(&s.curve, 5).unwrap();
        let k = s.curve.field();
        assert_eq!(t.pair(&ECPoint::Infinity, &s.cotorsion).unwrap().value, k.one());
        assert_eq!(t.pair(&s.torsion, &ECPoint::Infinity).unwrap().value, k.one());
        let v = t.pair(&s.torsion, &s.cotorsion).unwrap();
        assert_eq!(k.pow(v.value, 5), k.one());
        // non-torsion P
        let pts = s.curve.points(k).unwrap();
        let bad = pts.iter().find(|p| !s.curve.mul(k, p, 5).is_infinity()).unwrap();
        assert!(matches!(t.pair(bad, &s.cotorsion), Err(Error::Domain(_))));
    }

    #[test]
    fn pairing_table_is_bilinear_and_nondegenerate() {
        for n in [3u64, 4, 5] {
            let s = select_curve(n, 5).unwrap();
            let c = &s.curve;
            let k = c.field();
            let t = Tate::new(c, n).unwrap();
            let base = t.pair(&s.torsion, &s.cotorsion).unwrap().dlog;
            for i in 0..n {
                let pi = c.mul(k, &s.torsion, i as i64);
                for j in 0..n {
                    let qj = c.mul(k, &s.cotorsion, j as i64);
                    let v = t.pair(&pi, &qj).unwrap().dlog;
                    assert_eq!(v, base * i * j % n, "n={n} i={i} j={j}");
                }
            }
            // well-defined on Q mod nE
            let pts = c.points(k).unwrap();
            for r in pts.iter().step_by(5).take(6) {
                let shifted = c.add(k, &s.cotorsion, &c.mul(k, r, n as i64));
                assert_eq!(t.pair(&s.torsion, &shifted).unwrap().dlog, base);
            }
        }
    }

    #[test]
    fn extension_field_pairing() {
        // n does not divide p - 1: the pairing lives in F_{p^k}
        let c = Curve::new(7, 0, 1).unwrap(); // 12 points
        let n = 4;
        let t = Tate::new(&c, n).unwrap();
        assert_eq!(t.k, 2);
        let k = c.field();
        let pts = c.points(k).unwrap();
        let p = pts.iter().find(|p| c.point_order(k, p, 12) == 4);
        if let Some(p) = p {
            for q in t.field.elements().filter_map(|x| c.lift_x(&t.field, x)).take(10) {
                let v = t.pair(p, &q).unwrap();
                assert_eq!(t.field.pow(v.value, 4), t.field.one());
            }
        }
    }

    #[test]
    fn invariant_under_principal_shift() {
        // r = l_1 / l_2 has div r supported away from O; f(D_Q + div r) must pair the same
        let s = select_curve(5, 5).unwrap();
        let c = &s.curve;
        let k = c.field();
        let t = Tate::new(c, 5).unwrap();
        let f = miller_function(c, 5, &s.torsion).unwrap();
        let r = t.auxiliary(&f, &s.cotorsion).unwrap();
        let v0 = t.raw(&f, &s.cotorsion, &r).unwrap();
        let base = t.finalize(v0).dlog;
        assert_ne!(base, 0);
        let pts = c.points(k).unwrap();
        let aff = &pts[..pts.len() - 1];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut done = 0;
        for _ in 0..2000 {
            let pick = |rng: &mut ChaCha8Rng| aff[rng.gen_range(0..aff.len())];
            let (a, b, a2, b2) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
            if c.add(k, &a, &b).is_infinity() || c.add(k, &a2, &b2).is_infinity() {
                continue;
            }
            let g = MillerFunc::from_factor(c, line(c, &a, &b))
                .div(c, &MillerFunc::from_factor(c, line(c, &a2, &b2)));
            let Ok(fg) = ec_evaluate(c, &f, &g.divisor(c)) else { continue };
            assert_eq!(t.finalize(k.mul(v0, fg)).dlog, base);
            done += 1;
            if done == 30 {
                break;
            }
        }
        assert_eq!(done, 30);
    }
}
