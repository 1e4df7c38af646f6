use serde::Serialize;

use crate::abgroup::group::FinAbGroup;
use crate::abgroup::ray::{ray_class_group, ray_class_structural, DEFAULT_BOUND};
use crate::error::{Error, Result};
use crate::ffield::Gf;
use crate::ratfun::text::{format_divisor, format_field};
use crate::ratfun::RatDivisor;

#[derive(Clone, Debug, Serialize)]
pub struct RayOracleReport {
    pub field: String,
    pub n: u64,
    pub modulus: String,
    pub enumerated: Vec<u64>,
    /// None when the unit-group oracle does not apply (infinity in m).
    pub structural: Option<Vec<u64>>,
    pub doubled_modulus: String,
    /// None when q^{deg 2m} exceeds the enumeration budget.
    pub doubled: Option<Vec<u64>>,
    pub oracle_agrees: bool,
    pub support_only: Option<bool>,
    pub pass: bool,
}

/// Largest q^{deg 2m} for which the doubled modulus is enumerated.
pub const DOUBLING_BUDGET: u128 = 50_000;

fn canonical(orders: &[u64]) -> Vec<u64> {
    FinAbGroup::from_cyclic_orders(orders).invariants().to_vec()
}

/// Enumerated Cl_m/nCl_m against the unit-group description, and against the enumerated
/// group for 2m (same support).
pub fn ray_oracle_check(k: &Gf, m: &RatDivisor, n: u64) -> Result<RayOracleReport> {
    let enumerated = canonical(ray_class_group(k, m, n, DEFAULT_BOUND)?.invariants());
    let structural = match ray_class_structural(k, m, n) {
        Ok(s) => Some(s.group.invariants().to_vec()),
        Err(Error::OracleInapplicable(_)) => None,
        Err(e) => return Err(e),
    };
    let m2 = m.scale(2);
    let size = (k.order() as u128).checked_pow(m2.degree() as u32).unwrap_or(u128::MAX);
    let doubled = if size <= DOUBLING_BUDGET {
        Some(canonical(ray_class_group(k, &m2, n, DEFAULT_BOUND)?.invariants()))
    } else {
        None
    };
    let oracle_agrees = structural.as_ref().is_none_or(|s| *s == enumerated);
    let support_only = doubled.as_ref().map(|d| *d == enumerated);
    Ok(RayOracleReport {
        field: format_field(k),
        n,
        modulus: format_divisor(m),
        enumerated,
        structural,
        doubled_modulus: format_divisor(&m2),
        doubled,
        oracle_agrees,
        support_only,
        pass: oracle_agrees && support_only != Some(false),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FiniteField;
    use crate::ratfun::text::parse_divisor;

    #[test]
    fn flagship_and_infinity() {
        let k = FiniteField::prime(5).unwrap();
        let r = ray_oracle_check(&k, &parse_divisor(&k, "[(x):1, (x-1):1]").unwrap(), 4).unwrap();
        assert!(r.pass && r.support_only == Some(true), "{r:?}");
        assert_eq!(r.enumerated, vec![4, 4]);
        let r = ray_oracle_check(&k, &parse_divisor(&k, "[(x):1, inf:1]").unwrap(), 4).unwrap();
        assert!(r.pass && r.structural.is_none());
        let k = FiniteField::prime(13).unwrap();
        let r = ray_oracle_check(&k, &parse_divisor(&k, "[(x):1, (x-1):1, (x-2):1]").unwrap(), 3).unwrap();
        assert!(r.pass && r.doubled.is_none() && r.oracle_agrees);
    }
}
