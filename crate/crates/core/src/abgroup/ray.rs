use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::abgroup::group::FinAbGroup;
use crate::abgroup::matrix::{smith_mod_n, HnfModN, IntMatrix};
use crate::error::{Error, Result};
use crate::ffield::{FieldElem, Gf};
use crate::ratfun::text::format_place;
use crate::ratfun::{factor, irreducibles_of_degree, Poly, RatDivisor, RatPlace};

pub const DEFAULT_BOUND: usize = 3;
pub const MAX_BOUND: usize = 6;
/// Upper limit on monic polynomials enumerated for one presentation.
const MONIC_BUDGET: u64 = 1 << 16;

/// Presentation of Cl_m(F)/n Cl_m(F) for F = F_q(x).
#[derive(Clone, Debug)]
pub struct RayClassData {
    pub field: Gf,
    pub modulus: RatDivisor,
    pub n: u64,
    pub bound: usize,
    /// All places of degree <= B coprime to m (with infinity when it is coprime).
    pub generators: Vec<RatPlace>,
    /// Generators that survive elimination; the coordinates of the relation lattice.
    pub free_generators: Vec<RatPlace>,
    /// Every generator written in free coordinates.
    expr: HashMap<RatPlace, Vec<i128>>,
    /// Reduced relation lattice (rows), including n Z^k.
    pub relations: IntMatrix,
    hnf: HnfModN,
    v: IntMatrix,
    v_inv: IntMatrix,
    /// Columns of xV carrying a nontrivial invariant, and that invariant.
    coords: Vec<(usize, u64)>,
    pub group: FinAbGroup,
    m_fin: Poly,
    e_inf: i64,
}

/// Product of pi^e over the finite part of m, and the multiplicity of infinity.
fn split_modulus(k: &Gf, m: &RatDivisor) -> (Poly, i64) {
    let mut p = Poly::one(k);
    for (pl, e) in m.terms() {
        if let RatPlace::Finite(pi) = pl {
            p = p.mul(&pi.pow(e as u64));
        }
    }
    (p, m.ord(&RatPlace::Infinity))
}

/// Class of a monic polynomial coprime to m under "a/b = 1 mod m up to constants".
fn class_key(a: &Poly, m_fin: &Poly, e_inf: i64) -> Vec<u32> {
    let k = a.field();
    let r = a.rem(m_fin);
    let mut key: Vec<u32>;
    if e_inf == 0 {
        // minimum over scalar multiples
        key = k
            .elements()
            .filter(|c| c.0 != 0)
            .map(|c| {
                let s = r.scale(c);
                (0..m_fin.degree()).map(|i| s.coeff(i).0).collect::<Vec<u32>>()
            })
            .min()
            .unwrap_or_default();
    } else {
        let d = a.degree();
        key = vec![d as u32];
        for i in 1..e_inf as usize {
            key.push(if i <= d { a.coeff(d - i).0 } else { 0 });
        }
        key.extend((0..m_fin.degree()).map(|i| r.coeff(i).0));
    }
    key
}

fn finite_divisor(p: &Poly) -> Vec<(RatPlace, i64)> {
    factor(p).factors.into_iter().map(|(f, e)| (RatPlace::Finite(f), e as i64)).collect()
}

fn check_inputs(k: &Gf, m: &RatDivisor, n: u64) -> Result<()> {
    if !m.is_effective() {
        return Err(Error::Precondition("modulus must be effective".into()));
    }
    if n == 0 || n % k.characteristic() as u64 == 0 {
        return Err(Error::Domain(format!("n = {n} is not coprime to q")));
    }
    Ok(())
}

impl RayClassData {
    /// Presentation at a fixed bound B, without the stabilization check.
    pub fn at_bound(k: &Gf, m: &RatDivisor, n: u64, b: usize) -> Result<Self> {
        check_inputs(k, m, n)?;
        let q = k.order() as u64;
        let total: u64 = (0..=b as u32).map(|d| q.pow(d)).sum();
        if total > MONIC_BUDGET {
            return Err(Error::Size(format!(
                "bound {b} needs {total} polynomials over GF({q})"
            )));
        }
        let (m_fin, e_inf) = split_modulus(k, m);
        let mut generators = Vec::new();
        for d in 1..=b {
            for p in irreducibles_of_degree(k, d) {
                let pl = RatPlace::Finite(p);
                if !m.contains(&pl) {
                    generators.push(pl);
                }
            }
        }
        if e_inf == 0 {
            generators.push(RatPlace::Infinity);
        }
        // Walk monics in order. An irreducible that is not the first member of its class
        // is eliminated through that relation; other non-first members give lattice rows.
        let mut free: Vec<RatPlace> = Vec::new();
        let mut expr: HashMap<RatPlace, Vec<i128>> = HashMap::new();
        let mut pending: Vec<(Vec<(RatPlace, i64)>, Vec<(RatPlace, i64)>, i64)> = Vec::new();
        let mut classes: BTreeMap<Vec<u32>, (usize, Vec<(RatPlace, i64)>)> = BTreeMap::new();
        if e_inf == 0 {
            free.push(RatPlace::Infinity);
        }
        let mut defs: Vec<(RatPlace, Vec<(RatPlace, i64)>, i64)> = Vec::new();
        for d in 0..=b {
            for a in Poly::monics_of_degree(k, d) {
                if !a.gcd(&m_fin).is_one() {
                    continue;
                }
                let key = class_key(&a, &m_fin, e_inf);
                let fa = finite_divisor(&a);
                let irreducible = fa.len() == 1 && fa[0].1 == 1;
                match classes.get(&key) {
                    None => {
                        if irreducible {
                            free.push(fa[0].0.clone());
                        }
                        classes.insert(key, (a.degree(), fa));
                    }
                    Some((d0, f0)) => {
                        // [a] = [a0] + (deg a - deg a0)[inf]
                        let shift = a.degree() as i64 - *d0 as i64;
                        if irreducible {
                            defs.push((fa[0].0.clone(), f0.clone(), shift));
                        } else {
                            pending.push((fa, f0.clone(), shift));
                        }
                    }
                }
            }
        }
        let nfree = free.len();
        for (i, p) in free.iter().enumerate() {
            let mut v = vec![0i128; nfree];
            v[i] = 1;
            expr.insert(p.clone(), v);
        }
        let inf_col = if e_inf == 0 { Some(0) } else { None };
        let combine = |expr: &HashMap<RatPlace, Vec<i128>>, f: &[(RatPlace, i64)], sign: i128, out: &mut Vec<i128>| {
            for (p, e) in f {
                for (o, x) in out.iter_mut().zip(&expr[p]) {
                    *o += sign * *e as i128 * x;
                }
            }
        };
        // definitions only refer to smaller monics, so they resolve in order
        for (p, f0, shift) in defs {
            let mut v = vec![0i128; nfree];
            combine(&expr, &f0, 1, &mut v);
            if let Some(c) = inf_col {
                v[c] += shift as i128;
            }
            let nn = n as i128;
            expr.insert(p, v.into_iter().map(|x| x.rem_euclid(nn)).collect());
        }
        let mut hnf = HnfModN::new(nfree, n);
        for (fa, f0, shift) in pending {
            let mut row = vec![0i128; nfree];
            combine(&expr, &fa, 1, &mut row);
            combine(&expr, &f0, -1, &mut row);
            if let Some(c) = inf_col {
                row[c] -= shift as i128;
            }
            hnf.insert(&row);
        }
        let relations = hnf.matrix();
        let (inv, v, v_inv) = smith_mod_n(&relations, n);
        let coords: Vec<(usize, u64)> =
            inv.iter().enumerate().filter(|(_, &d)| d > 1).map(|(i, &d)| (i, d)).collect();
        let group = FinAbGroup::from_cyclic_orders(&coords.iter().map(|c| c.1).collect::<Vec<_>>());
        debug_assert_eq!(group.invariants(), coords.iter().map(|c| c.1).collect::<Vec<_>>());
        Ok(RayClassData {
            field: k.clone(),
            modulus: m.clone(),
            n,
            bound: b,
            generators,
            free_generators: free,
            expr,
            relations,
            hnf,
            v,
            v_inv,
            coords,
            group,
            m_fin,
            e_inf,
        })
    }

    pub fn order(&self) -> u128 {
        self.group.order()
    }

    pub fn invariants(&self) -> &[u64] {
        self.group.invariants()
    }

    /// Exponent vector of a divisor in free-generator coordinates (coprime to m).
    pub fn exponent_vector(&self, d: &RatDivisor) -> Result<Vec<i128>> {
        let mut x = vec![0i128; self.free_generators.len()];
        for (p, e) in d.terms() {
            if self.modulus.contains(p) {
                return Err(Error::Precondition(format!(
                    "divisor is not coprime to the modulus at {}",
                    format_place(p)
                )));
            }
            match self.expr.get(p) {
                Some(v) => {
                    for (o, c) in x.iter_mut().zip(v) {
                        *o += e as i128 * c;
                    }
                }
                None => {
                    let pi = p.poly().expect("infinity is a generator when coprime");
                    for (pl, c) in self.express(pi)? {
                        for (o, y) in x.iter_mut().zip(&self.expr[&pl]) {
                            *o += (c * e) as i128 * y;
                        }
                    }
                }
            }
        }
        Ok(x)
    }

    /// Group element (coordinates mod the invariant factors) of a divisor coprime to m.
    pub fn element(&self, d: &RatDivisor) -> Result<Vec<u64>> {
        let x = self.exponent_vector(d)?;
        let y = self.v.apply_row(&x);
        Ok(self.coords.iter().map(|&(i, o)| y[i].rem_euclid(o as i128) as u64).collect())
    }

    pub fn is_trivial(&self, d: &RatDivisor) -> Result<bool> {
        Ok(self.element(d)?.iter().all(|&c| c == 0))
    }

    /// Whether an exponent vector lies in the relation lattice.
    pub fn is_relation(&self, x: &[i128]) -> bool {
        self.hnf.contains(x)
    }

    /// Divisor on generator places representing the i-th basis element of the group.
    pub fn basis_divisor(&self, i: usize) -> RatDivisor {
        let (col, _) = self.coords[i];
        let row = self.v_inv.row(col);
        let n = self.n as i128;
        RatDivisor::from_terms(
            self.free_generators
                .iter()
                .zip(row)
                .map(|(p, &c)| (p.clone(), c.rem_euclid(n) as i64)),
        )
    }

    /// A divisor mapping to a given element.
    pub fn divisor_of(&self, elem: &[u64]) -> RatDivisor {
        let mut d = RatDivisor::zero();
        for (i, &c) in elem.iter().enumerate() {
            d = d.add(&self.basis_divisor(i).scale(c as i64));
        }
        d
    }

    /// Rewrite a large-degree place as a combination of generator places in the same class:
    /// find monic s and b, both smooth, with pi*s/b = 1 mod m.
    fn express(&self, pi: &Poly) -> Result<Vec<(RatPlace, i64)>> {
        let k = &self.field;
        let b_max = self.bound;
        let smooth = |p: &Poly| -> Option<Vec<(RatPlace, i64)>> {
            let f = finite_divisor(p);
            if f.iter().all(|(pl, _)| self.expr.contains_key(pl)) {
                Some(f)
            } else {
                None
            }
        };
        let keep = self.e_inf.max(1) as usize;
        let dm = self.m_fin.degree();
        for sd in 0..=b_max {
            for s in Poly::monics_of_degree(k, sd) {
                if !s.gcd(&self.m_fin).is_one() {
                    continue;
                }
                let Some(fs) = smooth(&s) else { continue };
                let a = pi.mul(&s);
                let d = a.degree();
                if d < keep + dm {
                    continue;
                }
                let tdeg = d - keep - dm;
                let q = k.order() as u64;
                let limit = q.saturating_pow(tdeg as u32 + 1).min(1 << 14);
                for code in 1..limit {
                    let mut c = code;
                    let t = Poly::new(
                        k,
                        (0..=tdeg)
                            .map(|_| {
                                let v = (c % q) as u32;
                                c /= q;
                                FieldElem(v)
                            })
                            .collect(),
                    );
                    let b = a.add(&self.m_fin.mul(&t));
                    if let Some(fb) = smooth(&b) {
                        let mut out = fb;
                        out.extend(fs.iter().map(|(p, e)| (p.clone(), -e)));
                        return Ok(out);
                    }
                }
            }
        }
        Err(Error::InsufficientBound(format!(
            "cannot express ({:?}) on places of degree <= {b_max}",
            pi
        )))
    }
}

/// Cl_m(F)/n Cl_m(F), raising the bound until the presentation at B and B+1 agree.
pub fn ray_class_group(k: &Gf, m: &RatDivisor, n: u64, b: usize) -> Result<RayClassData> {
    if b == 0 {
        return Err(Error::Precondition("degree bound must be at least 1".into()));
    }
    let mut cur = RayClassData::at_bound(k, m, n, b)?;
    while cur.bound < MAX_BOUND {
        let next = match RayClassData::at_bound(k, m, n, cur.bound + 1) {
            Ok(x) => x,
            Err(Error::Size(msg)) => {
                return Err(Error::InsufficientBound(format!(
                    "stabilization check at bound {} exceeds size limits: {msg}",
                    cur.bound + 1
                )))
            }
            Err(e) => return Err(e),
        };
        if next.invariants() == cur.invariants() {
            return Ok(cur);
        }
        cur = next;
    }
    Err(Error::InsufficientBound(format!(
        "presentation did not stabilize up to bound {MAX_BOUND}"
    )))
}

/// Independent description Z/n + ((F_q[x]/m)^x / F_q^x) / n by unit enumeration.
#[derive(Clone, Debug)]
pub struct StructuralRay {
    pub field: Gf,
    pub n: u64,
    pub m_fin: Poly,
    pub group: FinAbGroup,
    /// Canonical representatives of the n-th powers in (F_q[x]/m)^x / F_q^x.
    nth_powers: BTreeSet<Vec<u32>>,
}

fn unit_key(k: &Gf, a: &Poly, m: &Poly) -> Vec<u32> {
    k.elements()
        .filter(|c| c.0 != 0)
        .map(|c| {
            let s = a.scale(c).rem(m);
            (0..m.degree()).map(|i| s.coeff(i).0).collect::<Vec<u32>>()
        })
        .min()
        .unwrap_or_default()
}

/// Structure of a finite abelian group given by its elements and a power map, from
/// the counts of l^i-torsion.
fn structure_from_torsion_counts(order: u64, count_killed_by: impl Fn(u64) -> u64) -> FinAbGroup {
    let mut orders = Vec::new();
    let mut rest = order;
    let mut l = 2;
    while rest > 1 {
        if rest % l == 0 {
            let mut a = 0u32;
            while rest % l == 0 {
                rest /= l;
                a += 1;
            }
            // r_i = number of cyclic factors of order >= l^i
            let mut prev = 1u64;
            let mut ranks = Vec::new();
            for i in 1..=a {
                let c = count_killed_by(l.pow(i));
                let ratio = c / prev;
                let mut r = 0;
                let mut t = ratio;
                while t > 1 {
                    t /= l;
                    r += 1;
                }
                ranks.push(r);
                prev = c;
            }
            for i in 0..ranks.len() {
                let next = ranks.get(i + 1).copied().unwrap_or(0);
                for _ in 0..(ranks[i] - next) {
                    orders.push(l.pow(i as u32 + 1));
                }
            }
        }
        l += 1;
    }
    FinAbGroup::from_cyclic_orders(&orders)
}

pub fn ray_class_structural(k: &Gf, m: &RatDivisor, n: u64) -> Result<StructuralRay> {
    check_inputs(k, m, n)?;
    if m.contains(&RatPlace::Infinity) {
        return Err(Error::OracleInapplicable("infinity in the support of the modulus".into()));
    }
    let (m_fin, _) = split_modulus(k, m);
    let q = k.order() as u64;
    let size = q.saturating_pow(m_fin.degree() as u32);
    if size > crate::ffield::EXHAUSTIVE_LIMIT * 16 {
        return Err(Error::Size(format!("unit group enumeration of size {size}")));
    }
    // units mod m, up to scalars
    let mut units: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
    for code in 0..size {
        let mut c = code;
        let a = Poly::new(
            k,
            (0..m_fin.degree())
                .map(|_| {
                    let v = (c % q) as u32;
                    c /= q;
                    FieldElem(v)
                })
                .collect(),
        );
        if a.is_zero() && !m_fin.is_one() || !a.gcd(&m_fin).is_one() && !m_fin.is_one() {
            continue;
        }
        let a = if m_fin.is_one() { Poly::one(k) } else { a };
        units.entry(unit_key(k, &a, &m_fin)).or_insert(a);
    }
    let h_order = units.len() as u64;
    let h = structure_from_torsion_counts(h_order, |e| {
        units
            .values()
            .filter(|a| unit_key(k, &a.powmod(e as u128, &m_fin), &m_fin) == unit_key(k, &Poly::one(k), &m_fin))
            .count() as u64
    });
    let nth_powers: BTreeSet<Vec<u32>> = units
        .values()
        .map(|a| unit_key(k, &a.powmod(n as u128, &m_fin), &m_fin))
        .collect();
    let mut orders: Vec<u64> = h.mod_n(n).invariants().to_vec();
    orders.push(n);
    let group = FinAbGroup::from_cyclic_orders(&orders);
    debug_assert_eq!(group.order() as u64, n * h_order / nth_powers.len() as u64);
    Ok(StructuralRay { field: k.clone(), n, m_fin, group, nth_powers })
}

impl StructuralRay {
    /// Image (deg D mod n, unit part) of a divisor coprime to m.
    pub fn image(&self, d: &RatDivisor) -> Result<(u64, Vec<u32>)> {
        let k = &self.field;
        let mut u = Poly::one(k);
        for (p, e) in d.terms() {
            if let RatPlace::Finite(pi) = p {
                if !pi.gcd(&self.m_fin).is_one() && !self.m_fin.is_one() {
                    return Err(Error::Precondition(format!(
                        "divisor is not coprime to the modulus at {}",
                        format_place(p)
                    )));
                }
                if self.m_fin.is_one() {
                    continue;
                }
                let base = if e >= 0 {
                    pi.rem(&self.m_fin)
                } else {
                    pi.inv_mod(&self.m_fin).expect("coprime")
                };
                u = u.mulmod(&base.powmod(e.unsigned_abs() as u128, &self.m_fin), &self.m_fin);
            }
        }
        let deg = d.degree().rem_euclid(self.n as i64) as u64;
        Ok((deg, unit_key(k, &u, &self.m_fin)))
    }

    /// Whether a divisor dies in Cl_m/n Cl_m.
    pub fn is_trivial(&self, d: &RatDivisor) -> Result<bool> {
        let (deg, key) = self.image(d)?;
        Ok(deg == 0 && self.nth_powers.contains(&key))
    }
}

/// Invariant factors of (Z/n)^k style groups, e.g. for comparisons.
pub fn cyclic_power(n: u64, k: usize) -> FinAbGroup {
    FinAbGroup::from_cyclic_orders(&vec![n; k])
}
