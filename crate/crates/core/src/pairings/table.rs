use std::collections::BTreeSet;

use serde::Serialize;

use crate::abgroup::{ray_class_group, FinAbGroup, DEFAULT_BOUND};
use crate::error::{domain, Result};
use crate::ffield::Gf;
use crate::pairings::ev::{mu_n, tau_ns};
use crate::ratfun::text::{format_divisor, format_func_body};
use crate::ratfun::{selmer_basis, RatDivisor, RatPlace};

/// A mu_n-valued pairing of two finite abelian groups, cells as dlogs mod n.
///
/// `left` and `right` are cyclic orders of the generators on each side; rows and columns run
/// over coordinate vectors in lexicographic order.
#[derive(Clone, Debug, Serialize)]
pub struct PairingTable {
    pub n: u64,
    pub left: Vec<u64>,
    pub right: Vec<u64>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub entries: Vec<Vec<u64>>,
}

fn index_of(orders: &[u64], x: &[u64]) -> usize {
    let mut idx = 0usize;
    for (&o, &c) in orders.iter().zip(x) {
        idx = idx * o as usize + c as usize;
    }
    idx
}

/// All coordinate vectors of prod Z/o_i, lexicographic.
pub fn coordinate_vectors(orders: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &d in orders {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u64>| {
                (0..d).map(move |v| {
                    let mut e2 = e.clone();
                    e2.push(v);
                    e2
                })
            })
            .collect();
    }
    out
}

fn add_in(orders: &[u64], a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).zip(orders).map(|((x, y), d)| (x + y) % d).collect()
}

impl PairingTable {
    /// Builds and checks bilinearity in both arguments.
    pub fn new(
        n: u64,
        left: &[u64],
        right: &[u64],
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        entries: Vec<Vec<u64>>,
    ) -> Result<Self> {
        let t = PairingTable {
            n,
            left: left.to_vec(),
            right: right.to_vec(),
            row_labels,
            col_labels,
            entries,
        };
        if let Some((a, b)) = t.bilinearity_defect() {
            return domain(format!("table is not bilinear at {a:?}, {b:?}"));
        }
        Ok(t)
    }

    /// Fills every cell with `cell(row, col)` given group elements.
    pub fn tabulate(
        n: u64,
        left: &[u64],
        right: &[u64],
        row_label: impl Fn(&[u64]) -> String,
        col_label: impl Fn(&[u64]) -> String,
        cell: impl Fn(&[u64], &[u64]) -> Result<u64>,
    ) -> Result<Self> {
        let le = coordinate_vectors(left);
        let re = coordinate_vectors(right);
        let mut entries = Vec::with_capacity(le.len());
        for a in &le {
            entries.push(re.iter().map(|b| cell(a, b)).collect::<Result<Vec<_>>>()?);
        }
        Self::new(
            n,
            left,
            right,
            le.iter().map(|a| row_label(a)).collect(),
            re.iter().map(|b| col_label(b)).collect(),
            entries,
        )
    }

    pub fn left_group(&self) -> FinAbGroup {
        FinAbGroup::from_cyclic_orders(&self.left)
    }

    pub fn right_group(&self) -> FinAbGroup {
        FinAbGroup::from_cyclic_orders(&self.right)
    }

    pub fn get(&self, a: &[u64], b: &[u64]) -> u64 {
        self.entries[index_of(&self.left, a)][index_of(&self.right, b)]
    }

    /// First pair (x, x') or (y, y') where additivity fails, if any.
    fn bilinearity_defect(&self) -> Option<(Vec<u64>, Vec<u64>)> {
        let (l, r) = (&self.left, &self.right);
        let (le, re) = (coordinate_vectors(l), coordinate_vectors(r));
        let n = self.n;
        let lgens = unit_vectors(l.len());
        let rgens = unit_vectors(r.len());
        for a in &le {
            for g in &lgens {
                let ag = add_in(l, a, g);
                for b in &re {
                    if (self.get(a, b) + self.get(g, b)) % n != self.get(&ag, b) {
                        return Some((a.clone(), b.clone()));
                    }
                }
            }
        }
        for b in &re {
            for g in &rgens {
                let bg = add_in(r, b, g);
                for a in &le {
                    if (self.get(a, b) + self.get(a, g)) % n != self.get(a, &bg) {
                        return Some((a.clone(), b.clone()));
                    }
                }
            }
        }
        None
    }
}

fn unit_vectors(r: usize) -> Vec<Vec<u64>> {
    (0..r)
        .map(|i| {
            let mut v = vec![0; r];
            v[i] = 1;
            v
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct NondegeneracyReport {
    pub left_kernel: Vec<String>,
    pub right_kernel: Vec<String>,
    pub verdict: bool,
    /// Left kernel trivial and equal cardinalities imply a trivial right kernel.
    pub cardinality_criterion: bool,
}

/// Exhaustive kernels of both sides.
pub fn nondegeneracy_check(t: &PairingTable) -> NondegeneracyReport {
    let rows = t.entries.len();
    let cols = t.col_labels.len();
    let left_kernel: Vec<String> = (0..rows)
        .filter(|&i| t.entries[i].iter().all(|&v| v == 0))
        .map(|i| t.row_labels[i].clone())
        .collect();
    let right_kernel: Vec<String> = (0..cols)
        .filter(|&j| t.entries.iter().all(|row| row[j] == 0))
        .map(|j| t.col_labels[j].clone())
        .collect();
    let verdict = left_kernel.len() == 1 && right_kernel.len() == 1;
    let premise = left_kernel.len() == 1 && rows == cols;
    let cardinality_criterion = !premise || right_kernel.len() == 1;
    NondegeneracyReport { left_kernel, right_kernel, verdict, cardinality_criterion }
}

/// The modulus sum_{p in S} p.
pub fn modulus_of(s: &BTreeSet<RatPlace>) -> RatDivisor {
    RatDivisor::from_terms(s.iter().map(|p| (p.clone(), 1)))
}

/// tau-bar_{n,S}: Selmer classes against Cl_m/nCl_m, m = sum of the places of S.
pub fn tau_bar_table(k: &Gf, n: u64, s: &BTreeSet<RatPlace>) -> Result<PairingTable> {
    mu_n(k, n)?;
    if n == 1 {
        return PairingTable::new(1, &[], &[], vec!["1".into()], vec!["[]".into()], vec![vec![0]]);
    }
    let sel = selmer_basis(k, n, s)?;
    let ray = ray_class_group(k, &modulus_of(s), n, DEFAULT_BOUND)?;
    let left: Vec<u64> = sel.gens.iter().map(|g| g.1).collect();
    let right = ray.invariants().to_vec();
    PairingTable::tabulate(
        n,
        &left,
        &right,
        |a| format_func_body(&sel.element(a)),
        |b| format_divisor(&ray.divisor_of(b)),
        |a, b| Ok(tau_ns(&sel.element(a), &ray.divisor_of(b), n, s)?.dlog),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FiniteField;
    use crate::ratfun::Poly;

    #[test]
    fn constant_field_table() {
        let k = FiniteField::prime(5).unwrap();
        let t = tau_bar_table(&k, 4, &BTreeSet::new()).unwrap();
        assert_eq!(t.entries.len(), 4);
        assert_eq!(t.col_labels.len(), 4);
        // rows are powers of 2 (a generator of mu_4), columns degree classes
        let two_log = crate::ffield::MuN::new(&k, 4).unwrap().dlog(crate::ffield::FieldElem(2)).unwrap();
        for (a, row) in t.entries.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                assert_eq!(v, two_log * a as u64 * b as u64 % 4, "{} {}", t.row_labels[a], t.col_labels[b]);
            }
        }
        let r = nondegeneracy_check(&t);
        assert!(r.verdict && r.cardinality_criterion);
    }

    #[test]
    fn trivial_and_degenerate_tables() {
        let k = FiniteField::prime(5).unwrap();
        let t = tau_bar_table(&k, 1, &BTreeSet::new()).unwrap();
        assert_eq!(t.entries, vec![vec![0]]);
        assert!(nondegeneracy_check(&t).verdict);
        let g = [4u64];
        let ones = PairingTable::tabulate(4, &g, &g, |a| format!("{a:?}"), |b| format!("{b:?}"), |_, _| Ok(0)).unwrap();
        let r = nondegeneracy_check(&ones);
        assert_eq!((r.left_kernel.len(), r.right_kernel.len(), r.verdict), (4, 4, false));
        // duplicated rows: entry 2ab
        let dup = PairingTable::tabulate(4, &g, &g, |a| format!("{a:?}"), |b| format!("{b:?}"), |a, b| Ok(2 * a[0] * b[0] % 4)).unwrap();
        assert_eq!(dup.entries[1], dup.entries[3]);
        let r = nondegeneracy_check(&dup);
        assert_eq!(r.left_kernel, vec!["[0]", "[2]"]);
        assert!(!r.verdict);
        // not bilinear
        let g2 = [2u64];
        assert!(PairingTable::tabulate(2, &g2, &g2, |a| format!("{a:?}"), |b| format!("{b:?}"), |a, _| Ok(a[0] ^ 1)).is_err());
        assert!(tau_bar_table(&k, 3, &BTreeSet::new()).is_err());
    }

    #[test]
    fn two_place_table() {
        let k = FiniteField::prime(5).unwrap();
        let s: BTreeSet<_> = [
            RatPlace::finite(Poly::from_ints(&k, &[0, 1])).unwrap(),
            RatPlace::finite(Poly::from_ints(&k, &[-1, 1])).unwrap(),
        ]
        .into();
        let t = tau_bar_table(&k, 4, &s).unwrap();
        assert_eq!((t.entries.len(), t.col_labels.len()), (16, 16));
        let r = nondegeneracy_check(&t);
        assert!(r.verdict, "{r:?}");
    }
}
