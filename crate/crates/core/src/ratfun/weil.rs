use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::ffield::{FieldElem, Gf};
use crate::ratfun::func::{evaluate, principal_divisor, RatFunc};
use crate::ratfun::place::RatPlace;
use crate::ratfun::poly::irreducibles_of_degree;
use crate::ratfun::text::{format_field, format_func_body};

/// Outcome of f(div g) = g(div f) on sampled pairs with disjoint support.
#[derive(Clone, Debug, Serialize)]
pub struct WeilReport {
    pub setting: String,
    pub samples: usize,
    pub failures: Vec<String>,
    pub vacuous: bool,
    pub pass: bool,
}

impl WeilReport {
    pub fn new(setting: String, samples: usize, failures: Vec<String>) -> Self {
        let pass = failures.is_empty();
        WeilReport { setting, samples, failures, vacuous: samples == 0, pass }
    }
}

fn finite_places(k: &Gf, b: usize) -> Vec<RatPlace> {
    (1..=b)
        .flat_map(|d| irreducibles_of_degree(k, d))
        .map(RatPlace::Finite)
        .collect()
}

/// f arbitrary over places of degree <= 3; g built from the remaining places and balanced by
/// a rational place so that ord_inf g = 0.
fn disjoint_pair(k: &Gf, places: &[RatPlace], rng: &mut ChaCha8Rng) -> Option<(RatFunc, RatFunc)> {
    let pick = |rng: &mut ChaCha8Rng, avoid: &[usize]| loop {
        let i = rng.gen_range(0..places.len());
        if !avoid.contains(&i) {
            return i;
        }
    };
    let pf = |i: usize| RatFunc::from_poly(places[i].poly().expect("finite").clone()).expect("poly");
    let c = |rng: &mut ChaCha8Rng| RatFunc::constant(k, FieldElem(rng.gen_range(1..k.order()))).expect("nonzero");
    let mut used = Vec::new();
    let mut f = c(rng);
    for _ in 0..rng.gen_range(1..=3) {
        let i = pick(rng, &[]);
        used.push(i);
        f = f.mul(&pf(i).pow(rng.gen_range(-3i64..=3)));
    }
    let rational: Vec<usize> =
        (0..places.len()).filter(|&i| places[i].degree() == 1 && !used.contains(&i)).collect();
    let &r = rational.first()?;
    used.push(r);
    let mut g = c(rng);
    for _ in 0..rng.gen_range(1..=3) {
        let i = pick(rng, &used);
        let e = rng.gen_range(-3i64..=3);
        g = g.mul(&pf(i).pow(e)).div(&pf(r).pow(e * places[i].degree() as i64));
    }
    Some((f, g))
}

pub fn weil_check(k: &Gf, samples: usize, seed: u64) -> Result<WeilReport> {
    let places = finite_places(k, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut done = 0;
    while done < samples {
        let Some((f, g)) = disjoint_pair(k, &places, &mut rng) else { break };
        let (df, dg) = (principal_divisor(&f), principal_divisor(&g));
        if df.support().any(|p| dg.contains(p)) {
            continue;
        }
        let (a, b) = (evaluate(&f, &dg)?, evaluate(&g, &df)?);
        if a != b {
            failures.push(format!("f = {}, g = {}: {} != {}", format_func_body(&f), format_func_body(&g), a.0, b.0));
        }
        done += 1;
    }
    Ok(WeilReport::new(format!("{}(x)", format_field(k)), done, failures))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FiniteField;

    #[test]
    fn weil_small_fields() {
        for q in [5, 9, 13] {
            let k = FiniteField::of_order(q).unwrap();
            let r = weil_check(&k, 60, q as u64).unwrap();
            assert!(r.pass && r.samples == 60, "{r:?}");
        }
        let k = FiniteField::prime(5).unwrap();
        assert!(weil_check(&k, 0, 1).unwrap().vacuous);
    }
}
