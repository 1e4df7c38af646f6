use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::abgroup::{ray_class_group, DEFAULT_BOUND};
use crate::artin::ext::{GaloisElem, KummerExt};
use crate::error::{domain, Result};
use crate::ffield::{Embedding, FieldElem, FiniteField, Gf};
use crate::pairings::places_up_to;
use crate::pairings::table::coordinate_vectors;
use crate::ratfun::text::{format_divisor, format_func_body, format_place};
use crate::ratfun::{factor, principal_divisor, selmer_basis, Poly, RatDivisor, RatFunc, RatPlace};

impl KummerExt {
    /// E = F((F_{n,m})^{1/n}) from an independent Selmer basis for S = supp(m).
    pub fn maximal(k: &Gf, n: u64, m: &RatDivisor) -> Result<KummerExt> {
        let s: BTreeSet<RatPlace> = m.support().cloned().collect();
        if n == 1 {
            return KummerExt::new(k, 1, Vec::new(), 1, m.clone());
        }
        let sel = selmer_basis(k, n, &s)?;
        KummerExt::new(k, n, sel.gens.iter().map(|g| g.0.clone()).collect(), 1, m.clone())
    }
}

/// Finite part m_fin as a polynomial and the multiplicity at infinity.
fn split_modulus(k: &Gf, m: &RatDivisor) -> (Poly, i64) {
    let mut mf = Poly::one(k);
    let mut e_inf = 0;
    for (p, e) in m.terms() {
        match p {
            RatPlace::Infinity => e_inf = e,
            RatPlace::Finite(pi) => mf = mf.mul(&pi.pow(e as u64)),
        }
    }
    (mf, e_inf)
}

fn random_poly(k: &Gf, rng: &mut ChaCha8Rng, deg: usize, monic: bool) -> Poly {
    let mut c: Vec<FieldElem> = (0..=deg).map(|_| FieldElem(rng.gen_range(0..k.order()))).collect();
    if monic {
        c[deg] = k.one();
    }
    Poly::new(k, c)
}

/// A random g = 1 mod m (at every place of m, including infinity), as a/b with
/// a = b + m_fin * t and deg(m_fin * t) <= deg b - ord_inf(m).
pub fn random_ray_function(k: &Gf, m: &RatDivisor, rng: &mut ChaCha8Rng) -> RatFunc {
    let (mf, e_inf) = split_modulus(k, m);
    loop {
        let extra = rng.gen_range(0..=3usize);
        let db = extra + e_inf as usize + mf.degree();
        let b = random_poly(k, rng, db, true);
        if !b.gcd(&mf).is_one() {
            continue;
        }
        let room = db as i64 - e_inf - mf.degree() as i64;
        let t = if e_inf == 0 {
            random_poly(k, rng, extra, false)
        } else if room < 0 {
            Poly::zero(k)
        } else {
            random_poly(k, rng, room as usize, false)
        };
        let a = b.add(&mf.mul(&t));
        if a.is_zero() {
            continue;
        }
        return RatFunc::new(a, b).expect("nonzero denominator");
    }
}

/// ord_p(g - 1) >= m(p) at every place of m.
pub fn is_one_mod(g: &RatFunc, m: &RatDivisor) -> bool {
    let diff = g.num().sub(g.den());
    if diff.is_zero() {
        return true;
    }
    let h = RatFunc::new(diff, g.den().clone()).expect("nonzero denominator");
    m.terms().all(|(p, e)| h.ord(p) >= e)
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulusSample {
    pub g: String,
    pub image: GaloisElem,
    pub identity: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulusReport {
    pub samples: Vec<ModulusSample>,
    pub failures: usize,
    pub negative_controls: Vec<ModulusSample>,
    pub negative_nonidentity: usize,
    /// Some generator is not a constant times an n-th power, so principal divisors can
    /// have non-trivial images and the controls must find one.
    pub controls_required: bool,
    pub pass: bool,
}

/// Artin map kills div(g) for g = 1 mod m; negative controls g = pi for places outside m.
pub fn modulus_check(ext: &KummerExt, samples: usize, seed: u64) -> Result<ModulusReport> {
    let k = &ext.field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let g = random_ray_function(k, &ext.modulus, &mut rng);
        let img = ext.artin_map(&principal_divisor(&g))?;
        out.push(ModulusSample { g: format_func_body(&g), identity: ext.is_identity(&img), image: img });
    }
    let failures = out.iter().filter(|s| !s.identity).count();
    // controls: functions with support off m that are not 1 mod m
    let mut controls = Vec::new();
    let (mf, e_inf) = split_modulus(k, &ext.modulus);
    let mut tries = 0;
    while controls.len() < samples.clamp(4, 20) && tries < 1000 {
        tries += 1;
        let db = rng.gen_range(1..=3usize);
        let b = random_poly(k, &mut rng, db, true);
        let da = if e_inf > 0 { db } else { rng.gen_range(0..=3usize) };
        let a = random_poly(k, &mut rng, da, true).scale(FieldElem(rng.gen_range(1..k.order())));
        if !a.gcd(&mf).is_one() || !b.gcd(&mf).is_one() {
            continue;
        }
        let g = RatFunc::new(a, b)?;
        if is_one_mod(&g, &ext.modulus) {
            continue;
        }
        let img = ext.artin_map(&principal_divisor(&g))?;
        controls.push(ModulusSample { g: format_func_body(&g), identity: ext.is_identity(&img), image: img });
    }
    let negative_nonidentity = controls.iter().filter(|s| !s.identity).count();
    let n = ext.n as i64;
    let controls_required =
        ext.gens.iter().any(|f| principal_divisor(f).terms().any(|(_, e)| e % n != 0));
    let pass = failures == 0 && (!controls_required || negative_nonidentity >= 1);
    Ok(ModulusReport {
        samples: out,
        failures,
        negative_controls: controls,
        negative_nonidentity,
        controls_required,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SurjectivityReport {
    pub witnesses: Vec<String>,
    pub generated: u128,
    pub degree: u128,
    pub pass: bool,
}

/// Greedy generating set of Gal(E|F) from images of places of degree <= b.
pub fn surjectivity_witness(ext: &KummerExt, b: usize) -> Result<SurjectivityReport> {
    let degree = ext.degree()?;
    let mut group: HashSet<GaloisElem> = [ext.identity()].into();
    let mut witnesses = Vec::new();
    if degree > 1 {
        'outer: for d in 1..=b {
            let places: Vec<RatPlace> = if d == 1 {
                places_up_to(&ext.field, 1)
            } else {
                crate::ratfun::irreducibles_of_degree(&ext.field, d).into_iter().map(RatPlace::Finite).collect()
            };
            for p in places {
                if ext.modulus.contains(&p) {
                    continue;
                }
                let img = ext.frobenius_at_place(&p)?;
                if group.contains(&img) {
                    continue;
                }
                witnesses.push(format_place(&p));
                // close under adding multiples of img
                let mut next = group.clone();
                let mut step = img.clone();
                while !ext.is_identity(&step) {
                    for g in &group {
                        next.insert(ext.compose(g, &step));
                    }
                    step = ext.compose(&step, &img);
                }
                group = next;
                if group.len() as u128 == degree {
                    break 'outer;
                }
            }
        }
    }
    let generated = group.len() as u128;
    Ok(SurjectivityReport { witnesses, generated, degree, pass: generated == degree })
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub n: u64,
    pub modulus: String,
    pub extension_degree: u128,
    pub class_group_quotient: u128,
    pub kernel_size: u128,
    pub image_size: u128,
    pub class_invariance_failures: usize,
    pub pass: bool,
}

/// ker A = nCl_m and [E:F] = #Cl_m/nCl_m for the maximal exponent-n Kummer extension.
pub fn max_kummer_kernel_check(k: &Gf, n: u64, m: &RatDivisor) -> Result<KernelReport> {
    let ext = KummerExt::maximal(k, n, m)?;
    let ray = ray_class_group(k, m, n, DEFAULT_BOUND)?;
    let elems = coordinate_vectors(ray.invariants());
    let mut kernel = 0u128;
    let mut images = HashSet::new();
    for e in &elems {
        let img = ext.artin_map(&ray.divisor_of(e))?;
        if ext.is_identity(&img) {
            kernel += 1;
        }
        images.insert(img);
    }
    // A must factor through classes: a divisor and its class representative agree
    let mut rng = ChaCha8Rng::seed_from_u64(0xc1a55);
    let mut class_invariance_failures = 0;
    let places: Vec<RatPlace> =
        places_up_to(k, 3).into_iter().filter(|p| !m.contains(p)).collect();
    for _ in 0..20 {
        let mut d = RatDivisor::zero();
        for _ in 0..3 {
            d.add_term(places[rng.gen_range(0..places.len())].clone(), rng.gen_range(-3..=3));
        }
        let rep = ray.divisor_of(&ray.element(&d)?);
        if ext.artin_map(&d)? != ext.artin_map(&rep)? {
            class_invariance_failures += 1;
        }
    }
    let degree = ext.degree()?;
    let quotient = ray.order();
    let pass = kernel == 1
        && images.len() as u128 == degree
        && degree == quotient
        && class_invariance_failures == 0;
    Ok(KernelReport {
        n,
        modulus: format_divisor(m),
        extension_degree: degree,
        class_group_quotient: quotient,
        kernel_size: kernel,
        image_size: images.len() as u128,
        class_invariance_failures,
        pass,
    })
}

/// The constant extension F' = F_{q^d}(x) with conorm and norm of divisors.
pub struct ConstantExtension {
    pub base: Gf,
    pub big: Gf,
    pub d: u32,
    pub(crate) emb: Embedding,
}

impl ConstantExtension {
    pub fn new(base: &Gf, d: u32) -> Result<Self> {
        let big = FiniteField::new(base.characteristic(), base.degree() * d)?;
        let emb = Embedding::new(base, &big)?;
        Ok(ConstantExtension { base: base.clone(), big, d, emb })
    }

    pub fn lift_poly(&self, p: &Poly) -> Poly {
        Poly::new(&self.big, p.coeffs().iter().map(|&c| self.emb.image(c)).collect())
    }

    pub fn lift_func(&self, f: &RatFunc) -> RatFunc {
        RatFunc::new(self.lift_poly(f.num()), self.lift_poly(f.den())).expect("nonzero")
    }

    /// Con(p): the places of F' above p (unramified, multiplicity one).
    pub fn conorm_place(&self, p: &RatPlace) -> Vec<RatPlace> {
        match p {
            RatPlace::Infinity => vec![RatPlace::Infinity],
            RatPlace::Finite(pi) => factor(&self.lift_poly(pi))
                .factors
                .into_iter()
                .map(|(f, _)| RatPlace::Finite(f))
                .collect(),
        }
    }

    pub fn conorm(&self, d: &RatDivisor) -> RatDivisor {
        let mut out = RatDivisor::zero();
        for (p, e) in d.terms() {
            for q in self.conorm_place(p) {
                out.add_term(q, e);
            }
        }
        out
    }

    /// The place of F below P and the residue degree f(P|p).
    pub fn below(&self, p: &RatPlace) -> Result<(RatPlace, u32)> {
        match p {
            RatPlace::Infinity => Ok((RatPlace::Infinity, self.d)),
            RatPlace::Finite(pi) => {
                // product of the distinct Frobenius conjugates of pi
                let frob = |f: &Poly| -> Poly {
                    let e = self.base.order() as u128;
                    Poly::new(&self.big, f.coeffs().iter().map(|&c| self.big.pow(c, e)).collect())
                };
                let mut prod = pi.clone();
                let mut cur = frob(pi);
                while cur != *pi {
                    prod = prod.mul(&cur);
                    cur = frob(&cur);
                }
                let coeffs = prod
                    .coeffs()
                    .iter()
                    .map(|&c| self.emb.preimage(c))
                    .collect::<Option<Vec<_>>>();
                let Some(coeffs) = coeffs else {
                    return domain("norm polynomial is not defined over the base");
                };
                let low = Poly::new(&self.base, coeffs);
                let f = self.d * pi.degree() as u32 / low.degree() as u32;
                Ok((RatPlace::Finite(low), f))
            }
        }
    }

    pub fn norm(&self, d: &RatDivisor) -> Result<RatDivisor> {
        let mut out = RatDivisor::zero();
        for (p, e) in d.terms() {
            let (low, f) = self.below(p)?;
            out.add_term(low, e * f as i64);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormSample {
    pub divisor: String,
    pub lhs: GaloisElem,
    pub rhs: GaloisElem,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub d: u32,
    pub samples: Vec<NormSample>,
    pub norm_in_kernel_failures: usize,
    pub norm_conorm_failures: usize,
    pub pass: bool,
}

/// A_{E|F}(N(D)) = A_{E'|F'}(D)|_E for random divisors D of F' = F_{q^d}(x), plus
/// N(D') in ker A_{F'|F} and N(Con(D)) = d D.
pub fn norm_compat_check(ext: &KummerExt, d: u32, samples: usize, seed: u64) -> Result<NormReport> {
    let ce = ConstantExtension::new(&ext.field, d)?;
    let big_ext = KummerExt::new(
        &ce.big,
        ext.n,
        ext.gens.iter().map(|f| ce.lift_func(f)).collect(),
        1,
        ce.conorm(&ext.modulus),
    )?;
    // dlogs on F' are taken against another generator of mu_n
    let scale = if ext.n > 1 {
        let z = ce.emb.preimage(big_ext.mu().generator());
        match z {
            Some(z) => ext.mu().dlog(z)?,
            None => return domain("mu_n of the extension is not defined over the base"),
        }
    } else {
        0
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let big_places: Vec<RatPlace> = places_up_to(&ce.big, 2)
        .into_iter()
        .filter(|p| !big_ext.modulus.contains(p))
        .collect();
    let small_places: Vec<RatPlace> =
        places_up_to(&ext.field, 2).into_iter().filter(|p| !ext.modulus.contains(p)).collect();
    let mut out = Vec::new();
    let mut in_kernel_failures = 0;
    let mut conorm_failures = 0;
    for _ in 0..samples {
        let mut dv = RatDivisor::zero();
        for _ in 0..rng.gen_range(1..4) {
            dv.add_term(big_places[rng.gen_range(0..big_places.len())].clone(), rng.gen_range(-3..=3));
        }
        let nd = ce.norm(&dv)?;
        let lhs = ext.artin_map(&nd)?;
        let up = big_ext.artin_map(&dv)?;
        // restrict to E: Kummer coordinates unchanged, constants act by phi^{d deg D'}
        let rhs = GaloisElem {
            zetas: up.zetas.iter().map(|z| z * scale % ext.n.max(1)).collect(),
            j: (d as i64 * dv.degree()).rem_euclid(ext.r as i64) as u64,
        };
        let ok = lhs == rhs;
        out.push(NormSample { divisor: format_divisor(&dv), lhs, rhs, ok });
        // F'|F constant of degree d: Artin map is deg mod d
        if nd.degree().rem_euclid(d as i64) != 0 {
            in_kernel_failures += 1;
        }
        let mut e = RatDivisor::zero();
        for _ in 0..rng.gen_range(1..3) {
            e.add_term(small_places[rng.gen_range(0..small_places.len())].clone(), rng.gen_range(-2..=2));
        }
        if ce.norm(&ce.conorm(&e))? != e.scale(d as i64) {
            conorm_failures += 1;
        }
    }
    let pass = out.iter().all(|s| s.ok) && in_kernel_failures == 0 && conorm_failures == 0;
    Ok(NormReport {
        d,
        samples: out,
        norm_in_kernel_failures: in_kernel_failures,
        norm_conorm_failures: conorm_failures,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::artin::parse_extension;
    use crate::ratfun::text::parse_divisor;

    fn k5() -> Gf {
        FiniteField::prime(5).unwrap()
    }

    #[test]
    fn ray_functions_are_one_mod_m() {
        let k = k5();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for ms in ["[(x):1, (x-1):1]", "[(x):2, inf:2]", "[inf:1]", "[]"] {
            let m = parse_divisor(&k, ms).unwrap();
            for _ in 0..30 {
                let g = random_ray_function(&k, &m, &mut rng);
                assert!(is_one_mod(&g, &m), "{ms} {g:?}");
            }
        }
    }

    #[test]
    fn reciprocity_examples() {
        let k = k5();
        let m = parse_divisor(&k, "[(x):1, (x-1):1]").unwrap();
        let ext = KummerExt::maximal(&k, 4, &m).unwrap();
        let r = modulus_check(&ext, 100, 7).unwrap();
        assert_eq!(r.failures, 0);
        assert!(r.negative_nonidentity >= 1, "{:?}", r.negative_controls);
        assert!(r.pass);
        let ext = parse_extension("kummer: n=4, f=x-2 ; over GF(5)(x)", Some(&parse_divisor(&k, "[(x-2):1, inf:1]").unwrap())).unwrap();
        assert!(modulus_check(&ext, 50, 8).unwrap().pass);
    }

    #[test]
    fn surjectivity_examples() {
        let k = k5();
        let triv = KummerExt::constant(&k, 1).unwrap();
        let r = surjectivity_witness(&triv, 3).unwrap();
        assert!(r.pass && r.witnesses.is_empty());
        let m = parse_divisor(&k, "[(x-2):1, inf:1]").unwrap();
        let e = parse_extension("kummer: n=4, f=x-2 ; over GF(5)(x)", Some(&m)).unwrap();
        let r = surjectivity_witness(&e, 3).unwrap();
        assert_eq!(r.witnesses, vec!["(x)"]);
        let c3 = KummerExt::constant(&k, 3).unwrap();
        let r = surjectivity_witness(&c3, 3).unwrap();
        assert_eq!((r.witnesses.len(), r.generated), (1, 3));
        let mx = KummerExt::maximal(&k, 4, &parse_divisor(&k, "[(x):1, (x-1):1]").unwrap()).unwrap();
        assert!(surjectivity_witness(&mx, 3).unwrap().pass);
    }

    #[test]
    fn kernel_examples() {
        let k = k5();
        let r = max_kummer_kernel_check(&k, 4, &parse_divisor(&k, "[(x):1, (x-1):1]").unwrap()).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.extension_degree, 16);
        let r = max_kummer_kernel_check(&k, 1, &RatDivisor::zero()).unwrap();
        assert!(r.pass && r.extension_degree == 1);
        let r = max_kummer_kernel_check(&k, 2, &RatDivisor::zero()).unwrap();
        assert!(r.pass && r.extension_degree == 2, "{r:?}");
    }

    #[test]
    fn norm_compatibility() {
        let k = k5();
        let m = parse_divisor(&k, "[(x):1, (x-1):1]").unwrap();
        let ext = KummerExt::maximal(&k, 4, &m).unwrap();
        let r = norm_compat_check(&ext, 2, 50, 3).unwrap();
        assert!(r.pass, "{:?}", r.samples.iter().find(|s| !s.ok));
        // trivial F' = F
        assert!(norm_compat_check(&ext, 1, 10, 3).unwrap().pass);
        let ce = ConstantExtension::new(&k, 2).unwrap();
        let p = RatPlace::finite(Poly::from_ints(&k, &[2, 0, 1])).unwrap();
        assert_eq!(ce.conorm_place(&p).len(), 2);
        let (low, f) = ce.below(&ce.conorm_place(&p)[0]).unwrap();
        assert_eq!((low, f), (p, 1));
    }
}
