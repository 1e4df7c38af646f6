use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::ffield::{FieldElem, Gf, MuN};
use crate::pairings::mu_n;
use crate::ratfun::text::{format_field, format_func_body, format_place, parse_field, parse_func_body};
use crate::ratfun::{principal_divisor, residue_mod_nth_powers, RatDivisor, RatFunc, RatPlace};

/// E = F_{q^r}(x)(y_1, ..., y_k) over F = F_q(x) with y_i^n = f_i, mu_n inside F_q.
///
/// The Galois group is prod Z/o_i x Z/r where o_i is the order of f_i modulo n-th powers;
/// an element acts by y_i -> zeta_i y_i and by the j-th power of Frobenius on constants.
#[derive(Clone, Debug)]
pub struct KummerExt {
    pub field: Gf,
    pub n: u64,
    pub gens: Vec<RatFunc>,
    pub orders: Vec<u64>,
    pub r: u32,
    pub modulus: RatDivisor,
    mu: MuN,
}

/// Galois element: dlogs of zeta_i in mu_n (base: the fixed generator) and the Frobenius power.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GaloisElem {
    pub zetas: Vec<u64>,
    pub j: u64,
}

/// Whether f lies in (F^x)^n: all orders divisible by n and leading coefficient an n-th power.
pub fn is_nth_power(f: &RatFunc, n: u64) -> Result<bool> {
    let k = f.field();
    if principal_divisor(f).terms().any(|(_, e)| e % n as i64 != 0) {
        return Ok(false);
    }
    let c = k.div(f.num().lc(), f.den().lc())?;
    Ok(k.nth_root(c, n)?.is_some())
}

/// Order of f in F^x/(F^x)^n.
pub fn order_mod_nth_powers(f: &RatFunc, n: u64) -> Result<u64> {
    for o in (1..=n).filter(|o| n % o == 0) {
        if is_nth_power(&f.pow(o as i64), n)? {
            return Ok(o);
        }
    }
    Ok(n)
}

impl KummerExt {
    pub fn new(field: &Gf, n: u64, gens: Vec<RatFunc>, r: u32, modulus: RatDivisor) -> Result<Self> {
        let mu = mu_n(field, n)?;
        if r == 0 {
            return domain("constant extension degree must be positive");
        }
        for f in &gens {
            if f.field().order() != field.order() {
                return domain("Kummer generator over a different field");
            }
            for (p, e) in principal_divisor(f).terms() {
                if e % n as i64 != 0 && !modulus.contains(p) {
                    return domain(format!(
                        "y^{n} = {} ramifies at {} outside the modulus",
                        format_func_body(f),
                        format_place(p)
                    ));
                }
            }
        }
        let orders = gens.iter().map(|f| order_mod_nth_powers(f, n)).collect::<Result<_>>()?;
        Ok(KummerExt { field: field.clone(), n, gens, orders, r, modulus, mu })
    }

    /// Constant extension of degree r only.
    pub fn constant(field: &Gf, r: u32) -> Result<Self> {
        Self::new(field, 1, Vec::new(), r, RatDivisor::zero())
    }

    pub fn mu(&self) -> &MuN {
        &self.mu
    }

    /// Orders of the coordinates of a Galois element (Kummer part then constant part).
    pub fn coordinate_orders(&self) -> Vec<u64> {
        let mut o = self.orders.clone();
        o.push(self.r as u64);
        o
    }

    /// [E:F] = r * #<f_i> in F^x/(F^x)^n.
    pub fn degree(&self) -> Result<u128> {
        let mut trivial = 0u128;
        let mut total = 0u128;
        for a in crate::pairings::table::coordinate_vectors(&self.orders) {
            total += 1;
            let f = self.product(&a);
            if is_nth_power(&f, self.n)? {
                trivial += 1;
            }
        }
        Ok(self.r as u128 * total / trivial)
    }

    /// prod f_i^{a_i}.
    pub fn product(&self, a: &[u64]) -> RatFunc {
        let mut f = RatFunc::one(&self.field);
        for (g, &e) in self.gens.iter().zip(a) {
            f = f.mul(&g.pow(e as i64));
        }
        f
    }

    pub fn identity(&self) -> GaloisElem {
        GaloisElem { zetas: vec![0; self.gens.len()], j: 0 }
    }

    pub fn compose(&self, a: &GaloisElem, b: &GaloisElem) -> GaloisElem {
        GaloisElem {
            zetas: a.zetas.iter().zip(&b.zetas).map(|(x, y)| (x + y) % self.n).collect(),
            j: (a.j + b.j) % self.r as u64,
        }
    }

    pub fn power(&self, a: &GaloisElem, e: i64) -> GaloisElem {
        let n = self.n as i128;
        GaloisElem {
            zetas: a.zetas.iter().map(|&x| (x as i128 * e as i128).rem_euclid(n) as u64).collect(),
            j: (a.j as i128 * e as i128).rem_euclid(self.r as i128) as u64,
        }
    }

    pub fn is_identity(&self, a: &GaloisElem) -> bool {
        a.j == 0 && a.zetas.iter().all(|&z| z == 0)
    }

    /// sigma(y_i)/y_i as field elements.
    pub fn zeta_values(&self, a: &GaloisElem) -> Vec<FieldElem> {
        a.zetas.iter().map(|&z| self.mu.element(z)).collect()
    }

    fn check_unramified(&self, p: &RatPlace) -> Result<()> {
        if self.modulus.contains(p) {
            return Err(Error::Precondition(format!(
                "place {} lies in the modulus (possibly ramified)",
                format_place(p)
            )));
        }
        Ok(())
    }

    /// Frobenius at p via the power-residue symbol Norm(f_p)^{(q-1)/n}.
    pub fn frobenius_symbol(&self, p: &RatPlace) -> Result<GaloisElem> {
        self.check_unramified(p)?;
        let zetas = self
            .gens
            .iter()
            .map(|f| {
                let c = residue_mod_nth_powers(f, p, self.n)?;
                self.mu.dlog(c.power_residue_symbol()?)
            })
            .collect::<Result<_>>()?;
        Ok(GaloisElem { zetas, j: p.degree() as u64 % self.r as u64 })
    }

    /// Frobenius at p via y^{N(p)} = y * (f_p)^{(N(p)-1)/n} computed in the residue field.
    pub fn frobenius_residue(&self, p: &RatPlace) -> Result<GaloisElem> {
        self.check_unramified(p)?;
        let k = &self.field;
        let rf = p.residue_field(k);
        let exp = (rf.order() - 1) / self.n as u128;
        let zetas = self
            .gens
            .iter()
            .map(|f| {
                let u = f.unit_residue(p);
                let z = rf.pow(&u, exp);
                if !z.is_constant() {
                    return domain("residue power is not a constant");
                }
                self.mu.dlog(z.coeff(0))
            })
            .collect::<Result<_>>()?;
        Ok(GaloisElem { zetas, j: p.degree() as u64 % self.r as u64 })
    }

    /// Frobenius at an unramified place; both paths must agree.
    pub fn frobenius_at_place(&self, p: &RatPlace) -> Result<GaloisElem> {
        let a = self.frobenius_symbol(p)?;
        let b = self.frobenius_residue(p)?;
        if a != b {
            return Err(Error::Domain(format!(
                "Frobenius paths disagree at {}: {:?} vs {:?}",
                format_place(p),
                a,
                b
            )));
        }
        Ok(a)
    }

    /// prod_p Frob_p^{ord_p D}.
    pub fn artin_map(&self, d: &RatDivisor) -> Result<GaloisElem> {
        let mut acc = self.identity();
        for (p, e) in d.terms() {
            let fr = self.frobenius_symbol(p)?;
            acc = self.compose(&acc, &self.power(&fr, e));
        }
        Ok(acc)
    }

    /// Places of the modulus.
    pub fn modulus_support(&self) -> BTreeSet<RatPlace> {
        self.modulus.support().cloned().collect()
    }
}

/// "kummer: n=4, f=(x-2) ; const: r=2 ; over GF(5)(x)"; f may repeat, separated by commas.
pub fn parse_extension(s: &str, modulus: Option<&RatDivisor>) -> Result<KummerExt> {
    let bad = |m: &str| Error::Parse(format!("extension descriptor: {m}"));
    let (body, over) = s.rsplit_once("over").ok_or_else(|| bad("missing 'over GF(q)(x)'"))?;
    let over = over.trim();
    let field_s = over.strip_suffix("(x)").ok_or_else(|| bad("base must be GF(q)(x)"))?;
    let k = parse_field(field_s.trim())?;
    let mut n = 1u64;
    let mut gens_s: Vec<String> = Vec::new();
    let mut r = 1u32;
    for part in body.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (kind, rest) = part.split_once(':').ok_or_else(|| bad("expected 'kind: ...'"))?;
        match kind.trim() {
            "kummer" => {
                for kv in split_top(rest) {
                    let (key, val) = kv.split_once('=').ok_or_else(|| bad("expected key=value"))?;
                    match key.trim() {
                        "n" => n = val.trim().parse().map_err(|_| bad("bad n"))?,
                        "f" => gens_s.push(val.trim().to_string()),
                        other => return Err(bad(&format!("unknown key {other}"))),
                    }
                }
            }
            "const" => {
                let (key, val) = rest.split_once('=').ok_or_else(|| bad("expected r=..."))?;
                if key.trim() != "r" {
                    return Err(bad("expected r=..."));
                }
                r = val.trim().parse().map_err(|_| bad("bad r"))?;
            }
            other => return Err(bad(&format!("unknown part {other}"))),
        }
    }
    let gens = gens_s.iter().map(|g| parse_func_body(&k, g)).collect::<Result<Vec<_>>>()?;
    let m = match modulus {
        Some(m) => m.clone(),
        None => {
            // the places where some generator ramifies
            let mut m = RatDivisor::zero();
            for f in &gens {
                for (p, e) in principal_divisor(f).terms() {
                    if e % n as i64 != 0 && !m.contains(p) {
                        m.add_term(p.clone(), 1);
                    }
                }
            }
            m
        }
    };
    KummerExt::new(&k, n, gens, r, m)
}

fn split_top(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out
}

pub fn format_extension(e: &KummerExt) -> String {
    let mut parts = Vec::new();
    if !e.gens.is_empty() {
        let fs: Vec<String> = e.gens.iter().map(|f| format!("f={}", format_func_body(f))).collect();
        parts.push(format!("kummer: n={}, {}", e.n, fs.join(", ")));
    }
    if e.r > 1 {
        parts.push(format!("const: r={}", e.r));
    }
    format!("{} ; over {}(x)", parts.join(" ; "), format_field(&e.field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FiniteField;
    use crate::ratfun::text::parse_divisor;
    use crate::ratfun::Poly;

    fn pl(k: &Gf, c: &[i64]) -> RatPlace {
        RatPlace::finite(Poly::from_ints(k, c)).unwrap()
    }

    #[test]
    fn frobenius_examples() {
        let k = FiniteField::prime(5).unwrap();
        let c2 = KummerExt::constant(&k, 2).unwrap();
        // x^2 + 2 is irreducible over F_5
        let p = pl(&k, &[2, 0, 1]);
        assert!(c2.is_identity(&c2.frobenius_at_place(&p).unwrap()));
        assert_eq!(c2.frobenius_at_place(&pl(&k, &[1, 1])).unwrap().j, 1);

        let e = parse_extension("kummer: n=4, f=(x-2) ; over GF(5)(x)", None).unwrap();
        let fr = e.frobenius_at_place(&pl(&k, &[0, 1])).unwrap();
        assert_eq!(e.zeta_values(&fr), vec![FieldElem(3)]);
        assert!(matches!(e.frobenius_at_place(&pl(&k, &[-2, 1])), Err(Error::Precondition(_))));
        assert_eq!(e.degree().unwrap(), 4);
    }

    #[test]
    fn two_paths_agree_everywhere() {
        for q in [5u32, 9, 13] {
            let k = FiniteField::of_order(q).unwrap();
            let n = 4;
            let f = crate::ratfun::text::parse_func_body(&k, "x*(x-1)^3*(x+1)^2").unwrap();
            let e = KummerExt::new(&k, n, vec![f.clone()], 1, parse_divisor(&k, "[(x):1, (x-1):1, (x+1):1, inf:1]").unwrap()).unwrap();
            for p in crate::pairings::places_up_to(&k, 2) {
                if e.modulus.contains(&p) {
                    continue;
                }
                assert_eq!(e.frobenius_symbol(&p).unwrap(), e.frobenius_residue(&p).unwrap());
            }
        }
    }

    #[test]
    fn artin_map_homomorphism_and_constant_part() {
        let k = FiniteField::prime(5).unwrap();
        let e = parse_extension("kummer: n=4, f=x*(x-1)^3 ; const: r=3 ; over GF(5)(x)", None).unwrap();
        assert_eq!(e.r, 3);
        let d1 = parse_divisor(&k, "[(x-2):1, (x^2+2):-1]").unwrap();
        let d2 = parse_divisor(&k, "[(x-3):2, inf:4]").unwrap();
        let a = e.artin_map(&d1).unwrap();
        let b = e.artin_map(&d2).unwrap();
        assert_eq!(e.artin_map(&d1.add(&d2)).unwrap(), e.compose(&a, &b));
        assert_eq!(a.j, (d1.degree().rem_euclid(3)) as u64);
        assert!(e.is_identity(&e.artin_map(&RatDivisor::zero()).unwrap()));
        let err = e.artin_map(&parse_divisor(&k, "[(x):1]").unwrap()).unwrap_err();
        assert!(err.to_string().contains("(x)"));
    }

    #[test]
    fn descriptor_round_trip_and_errors() {
        let s = "kummer: n=4, f=x, f=x-1 ; const: r=2 ; over GF(5)(x)";
        let e = parse_extension(s, None).unwrap();
        assert_eq!(e.gens.len(), 2);
        let t = format_extension(&e);
        let e2 = parse_extension(&t, None).unwrap();
        assert_eq!(e2.gens, e.gens);
        assert_eq!(e2.r, 2);
        assert_eq!(e.degree().unwrap(), 32);
        assert!(parse_extension("kummer: n=3, f=x ; over GF(5)(x)", None).is_err());
        let k = FiniteField::prime(5).unwrap();
        let m = parse_divisor(&k, "[(x):1]").unwrap();
        assert!(parse_extension("kummer: n=4, f=x-1 ; over GF(5)(x)", Some(&m)).is_err());
        // dependent generators: degree counts the subgroup
        let e = parse_extension("kummer: n=4, f=x, f=x^2 ; over GF(5)(x)", None).unwrap();
        assert_eq!(e.degree().unwrap(), 4);
    }
}
