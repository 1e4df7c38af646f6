use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::abgroup::{ray_class_group, FinAbGroup, DEFAULT_BOUND};
use crate::cli::{Check, Context, UsageError};
use crate::ecfun::{
    ec_evaluate, format_curve, format_point, miller_function, parse_point, select_curve,
    CurveRef, ECDivisor, ECPoint, Tate,
};
use crate::artin::lemma_ext::{curve_avoid, curve_h_candidates};
use crate::ffield::{format_elem, MuN};
use crate::pairings::{mu_n, tau_ns};
use crate::ratfun::text::{format_divisor, format_field, format_func_body, format_place, parse_divisor, parse_func_body};
use crate::ratfun::selmer_basis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComputeKind {
    PairTau,
    PairTate,
    PairAte,
    Classgroup,
    Selmer,
}

impl ComputeKind {
    pub fn name(&self) -> &'static str {
        match self {
            ComputeKind::PairTau => "pair-tau",
            ComputeKind::PairTate => "pair-tate",
            ComputeKind::PairAte => "pair-ate",
            ComputeKind::Classgroup => "classgroup",
            ComputeKind::Selmer => "selmer",
        }
    }
}

pub fn run(kind: ComputeKind, ctx: &Context) -> Result<(Value, Vec<Check>), UsageError> {
    let value = match kind {
        ComputeKind::Classgroup => classgroup(ctx)?,
        ComputeKind::Selmer => selmer(ctx)?,
        ComputeKind::PairTau => pair_tau(ctx)?,
        ComputeKind::PairTate => pair_tate(ctx)?,
        ComputeKind::PairAte => {
            let v = pair_ate(ctx)?;
            let agrees = v["tate_agrees"] == Value::Bool(true);
            let detail = json!({ "ate": v["pairing"], "tate": v["tate"] });
            return Ok((v, vec![Check::new("ate-equals-tate", "lem:ext", agrees, false, detail)]));
        }
    };
    Ok((value, Vec::new()))
}

fn classgroup(ctx: &Context) -> Result<Value, UsageError> {
    let n = ctx.cfg.n;
    let bound = DEFAULT_BOUND.max(ctx.cfg.degree_bound);
    let ray = ray_class_group(&ctx.k, &ctx.m, n, bound)?;
    let invariants = FinAbGroup::from_cyclic_orders(ray.invariants()).invariants().to_vec();
    let generators: Vec<String> =
        (0..ray.invariants().len()).map(|i| format_divisor(&ray.basis_divisor(i))).collect();
    Ok(json!({
        "object": "Cl_m/nCl_m",
        "field": format_field(&ctx.k),
        "modulus": format_divisor(&ctx.m),
        "n": n,
        "invariant_factors": invariants,
        "order": ray.order(),
        "generators": generators,
        "generator_orders": ray.invariants(),
        "generator_bound": ray.bound,
    }))
}

fn selmer(ctx: &Context) -> Result<Value, UsageError> {
    let sel = selmer_basis(&ctx.k, ctx.cfg.n, &ctx.s)?;
    let gens: Vec<Value> = sel
        .gens
        .iter()
        .map(|(g, o)| json!({ "function": format_func_body(g), "order": o }))
        .collect();
    Ok(json!({
        "object": "F_{n,S}/(F^x)^n",
        "field": format_field(&ctx.k),
        "s": ctx.s.iter().map(format_place).collect::<Vec<_>>(),
        "n": ctx.cfg.n,
        "invariant_factors": sel.group().invariants(),
        "order": sel.order(),
        "generators": gens,
    }))
}

fn required<'a>(v: &'a Option<String>, flag: &str, kind: &str) -> Result<&'a str, UsageError> {
    v.as_deref().ok_or_else(|| UsageError::new("usage", format!("{kind} needs --{flag}")))
}

fn mu_json(mu: &MuN, value: crate::ffield::FieldElem, dlog: u64) -> Value {
    json!({
        "value": format_elem(mu.field(), value),
        "dlog": dlog,
        "mu_generator": format_elem(mu.field(), mu.generator()),
    })
}

fn pair_tau(ctx: &Context) -> Result<Value, UsageError> {
    let f = parse_func_body(&ctx.k, required(&ctx.cfg.f, "f", "pair-tau")?)?;
    let d = parse_divisor(&ctx.k, required(&ctx.cfg.divisor, "divisor", "pair-tau")?)?;
    let mu = mu_n(&ctx.k, ctx.cfg.n)?;
    let v = tau_ns(&f, &d, ctx.cfg.n, &ctx.s)?;
    Ok(json!({
        "object": "tau_{n,S}(f, D)",
        "field": format_field(&ctx.k),
        "n": ctx.cfg.n,
        "s": ctx.s.iter().map(format_place).collect::<Vec<_>>(),
        "f": format_func_body(&f),
        "divisor": format_divisor(&d),
        "pairing": mu_json(&mu, v.value, v.dlog),
    }))
}

struct PairInput {
    curve: CurveRef,
    p: ECPoint,
    q: ECPoint,
}

/// Curve and points from the config; without a curve, the selected curve for n (p >= min_p)
/// and its generators.
fn pair_input(ctx: &Context, min_p: u32) -> Result<PairInput, UsageError> {
    let n = ctx.cfg.n;
    let (curve, p0, q0) = match &ctx.curve {
        Some(c) => (c.clone(), None, None),
        None => {
            let s = select_curve(n, min_p)?;
            (s.curve, Some(s.torsion), Some(s.cotorsion))
        }
    };
    let point = |s: &Option<String>, flag: &str| -> Result<Option<ECPoint>, UsageError> {
        match s {
            None => Ok(None),
            Some(s) => {
                let (r, pt) = parse_point(&curve, s)?;
                if r != 1 {
                    return Err(UsageError::new("validation", format!("--{flag} must be a rational point")));
                }
                Ok(Some(pt))
            }
        }
    };
    let k = curve.field();
    let p = match point(&ctx.cfg.p, "p")?.or(p0) {
        Some(p) => p,
        None => curve
            .points(k)?
            .into_iter()
            .find(|p| curve.point_order(k, p, n as u128) == n as u128)
            .ok_or_else(|| UsageError::new("validation", format!("no rational point of order {n}")))?,
    };
    if !curve.mul(k, &p, n as i64).is_infinity() {
        return Err(UsageError::new("validation", format!("P = {} is not n-torsion", format_point(k, &p))));
    }
    let q = match point(&ctx.cfg.q, "q")?.or(q0) {
        Some(q) => q,
        None => {
            let t = Tate::new(&curve, n)?;
            let pts = curve.points(k)?;
            let mut chosen = pts[0];
            for q in &pts {
                if t.pair(&p, q)?.dlog != 0 {
                    chosen = *q;
                    break;
                }
            }
            chosen
        }
    };
    Ok(PairInput { curve, p, q })
}

fn pair_tate(ctx: &Context) -> Result<Value, UsageError> {
    let inp = pair_input(ctx, 5)?;
    let (c, k) = (&inp.curve, inp.curve.field());
    let t = Tate::new(c, ctx.cfg.n)?;
    let v = t.pair(&inp.p, &inp.q)?;
    Ok(json!({
        "object": "t(P, Q)",
        "curve": format_curve(c),
        "n": ctx.cfg.n,
        "embedding_degree": t.k,
        "p": format_point(k, &inp.p),
        "q": format_point(k, &inp.q),
        "pairing": mu_json(t.mu(), v.value, v.dlog),
    }))
}

/// Every n-th root h of f^{p-1} (div f = n(P) - n(O)) evaluated at D_Q = (Q+R) - (R); the
/// candidate f^{(p-1)/n} must reproduce the Tate pairing.
fn pair_ate(ctx: &Context) -> Result<Value, UsageError> {
    let n = ctx.cfg.n;
    // tiny curves leave no auxiliary point off the support of the h-candidates
    let inp = pair_input(ctx, 13)?;
    let (c, k) = (&inp.curve, inp.curve.field());
    if (c.p() as u64 - 1) % n != 0 {
        return Err(UsageError::new("validation", format!("pair-ate needs n | p - 1, p = {}", c.p())));
    }
    let f = miller_function(c, n, &inp.p)?;
    let avoid = curve_avoid(c, n, &f)?;
    let pts = c.points(k)?;
    let r = pts
        .iter()
        .copied()
        .find(|r| {
            let qr = c.add(k, &inp.q, r);
            !r.is_infinity() && !qr.is_infinity() && !avoid.contains(r) && !avoid.contains(&qr)
        })
        .ok_or_else(|| UsageError::new("validation", "no auxiliary point avoids the h-candidates"))?;
    let dq = ECDivisor::from_points([(c.add(k, &inp.q, &r), 1), (r, -1)]);
    let candidates = curve_h_candidates(c, n, &f)?;
    let mu = MuN::new(k, n)?;
    let values: Vec<_> = candidates.iter().map(|h| ec_evaluate(c, h, &dq)).collect::<crate::Result<_>>()?;
    let canon = f.pow(c, ((c.p() as u64 - 1) / n) as i64);
    let canon_value = ec_evaluate(c, &canon, &dq)?;
    let canonical = values.iter().position(|v| *v == canon_value);
    let tate = Tate::new(c, n)?.pair(&inp.p, &inp.q)?;
    let agrees = tate.value == canon_value;
    let cands: Vec<Value> = values
        .iter()
        .map(|v| Ok(mu_json(&mu, *v, mu.dlog(*v)?)))
        .collect::<crate::Result<_>>()?;
    Ok(json!({
        "object": "h(D_Q)",
        "curve": format_curve(c),
        "n": n,
        "p": format_point(k, &inp.p),
        "q": format_point(k, &inp.q),
        "auxiliary": format_point(k, &r),
        "candidates": cands,
        "canonical_candidate": canonical,
        "pairing": mu_json(&mu, canon_value, mu.dlog(canon_value)?),
        "tate": mu_json(&mu, tate.value, mu.dlog(tate.value)?),
        "tate_agrees": agrees,
    }))
}
