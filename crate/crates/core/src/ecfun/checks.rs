use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ecfun::curve::{format_curve, format_point, Curve, ECPlace, ECPoint};
use crate::ecfun::func::{ec_evaluate, line, MillerFunc};
use crate::ecfun::tate::{SelectedCurve, Tate};
use crate::error::Result;
use crate::ffield::FieldElem;
use crate::ratfun::WeilReport;

fn random_curve_function(c: &Curve, rng: &mut ChaCha8Rng, pts: &[ECPoint]) -> MillerFunc {
    let k = c.field();
    let mut f = MillerFunc::constant(FieldElem(rng.gen_range(1..c.p())));
    for _ in 0..rng.gen_range(1..=3) {
        let p = pts[rng.gen_range(0..pts.len())];
        let q = pts[rng.gen_range(0..pts.len())];
        if c.add(k, &p, &q).is_infinity() {
            continue;
        }
        let l = MillerFunc::from_factor(c, line(c, &p, &q));
        f = if rng.gen_bool(0.5) { f.mul(c, &l) } else { f.div(c, &l) };
    }
    f
}

/// f(div g) = g(div f) for products of lines with disjoint supports (O allowed in at most one).
pub fn ec_weil_check(c: &Curve, samples: usize, seed: u64) -> Result<WeilReport> {
    let k = c.field();
    let pts: Vec<ECPoint> = c.points(k)?.into_iter().filter(|p| !p.is_infinity()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut done = 0;
    let mut attempts = 0;
    while done < samples && attempts < samples * 200 {
        attempts += 1;
        let f = random_curve_function(c, &mut rng, &pts);
        let g = random_curve_function(c, &mut rng, &pts);
        let sg = g.factor_support();
        if f.factor_support().iter().any(|p| !p.is_infinity() && sg.contains(p)) {
            continue;
        }
        let (df, dg) = (f.divisor(c), g.divisor(c));
        if df.contains(&ECPlace::infinity()) && dg.contains(&ECPlace::infinity()) {
            continue;
        }
        let (a, b) = (ec_evaluate(c, &f, &dg)?, ec_evaluate(c, &g, &df)?);
        if a != b {
            failures.push(format!("{df:?} / {dg:?}: {} != {}", a.0, b.0));
        }
        done += 1;
    }
    Ok(WeilReport::new(format_curve(c), done, failures))
}

#[derive(Clone, Debug, Serialize)]
pub struct TateReport {
    pub curve: String,
    pub n: u64,
    pub torsion: String,
    pub cotorsion: String,
    /// dlog of t(P, Q) for the chosen generators.
    pub base: u64,
    pub points_checked: usize,
    pub bilinearity_failures: usize,
    pub order_failures: usize,
    pub left_kernel: usize,
    pub right_kernel: usize,
    pub pass: bool,
}

/// Exhaustive bilinearity on E[n] x E/nE (every point of E(F_p) is paired, its class found
/// by brute force), t^n = 1, and kernels computed with a dlog oracle that enumerates powers.
pub fn tate_check(s: &SelectedCurve) -> Result<TateReport> {
    let c = &s.curve;
    let n = s.n;
    let k = c.field();
    let t = Tate::new(c, n)?;
    let pts = c.points(k)?;
    let n_e: BTreeSet<ECPoint> = pts.iter().map(|p| c.mul(k, p, n as i64)).collect();
    let class_of = |q: &ECPoint| -> u64 {
        (0..n)
            .find(|&j| n_e.contains(&c.add(k, q, &c.neg(k, &c.mul(k, &s.cotorsion, j as i64)))))
            .expect("E/nE is generated by the cotorsion point")
    };
    // oracle: z = w^e by enumeration, with w = t(P, Q0)
    let w = t.pair(&s.torsion, &s.cotorsion)?;
    let oracle = |z: FieldElem| -> Option<u64> { (0..n).find(|&e| t.field.pow(w.value, e as u128) == z) };
    let base = w.dlog;
    let mut bilinearity_failures = 0;
    let mut order_failures = 0;
    let mut table = vec![vec![0u64; n as usize]; n as usize];
    for i in 0..n {
        let pi = c.mul(k, &s.torsion, i as i64);
        for q in &pts {
            let v = t.pair(&pi, q)?;
            if t.field.pow(v.value, n as u128) != t.field.one() {
                order_failures += 1;
            }
            let j = class_of(q);
            match oracle(v.value) {
                Some(e) if e == i * j % n => table[i as usize][j as usize] = 1 + e,
                _ => bilinearity_failures += 1,
            }
        }
    }
    let left_kernel = (0..n as usize).filter(|&i| table[i].iter().all(|&v| v == 1)).count();
    let right_kernel = (0..n as usize).filter(|&j| table.iter().all(|row| row[j] == 1)).count();
    let pass = bilinearity_failures == 0 && order_failures == 0 && left_kernel == 1 && right_kernel == 1;
    Ok(TateReport {
        curve: format_curve(c),
        n,
        torsion: format_point(k, &s.torsion),
        cotorsion: format_point(k, &s.cotorsion),
        base,
        points_checked: pts.len(),
        bilinearity_failures,
        order_failures,
        left_kernel,
        right_kernel,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecfun::tate::select_curve;

    #[test]
    fn weil_on_curve() {
        let c = Curve::new(101, 1, 3).unwrap();
        let r = ec_weil_check(&c, 50, 4).unwrap();
        assert!(r.pass && r.samples == 50, "{r:?}");
    }

    #[test]
    fn tate_exhaustive() {
        for n in [3, 4, 5] {
            let s = select_curve(n, 5).unwrap();
            let r = tate_check(&s).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }
}
