use crate::abgroup::matrix::{smith_normal_form, HnfModN, IntMatrix};

/// Finite abelian group Z/d_1 + ... + Z/d_k (+ Z^r), d_1 | d_2 | ... and d_i > 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinAbGroup {
    invariants: Vec<u64>,
    free_rank: usize,
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        FinAbGroup { invariants: Vec::new(), free_rank: 0 }
    }

    /// Canonical form of a direct sum of cyclic groups of the given orders (0 means Z).
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let k = orders.len();
        let mut a = IntMatrix::zeros(k, k);
        for (i, &o) in orders.iter().enumerate() {
            a.set(i, i, o as i128);
        }
        let diag = smith_normal_form(&a).diagonal();
        let free_rank = diag.iter().filter(|&&d| d == 0).count();
        let invariants = diag.into_iter().filter(|&d| d > 1).map(|d| d as u64).collect();
        FinAbGroup { invariants, free_rank }
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// Order of the torsion part (the group order when the free rank is 0).
    pub fn order(&self) -> u128 {
        self.invariants.iter().map(|&d| d as u128).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty() && self.free_rank == 0
    }

    pub fn exponent(&self) -> u64 {
        self.invariants.last().copied().unwrap_or(1)
    }

    /// Quotient by n times the group.
    pub fn mod_n(&self, n: u64) -> FinAbGroup {
        let mut orders: Vec<u64> =
            self.invariants.iter().map(|&d| crate::ffield::gcd(d, n)).collect();
        orders.extend(std::iter::repeat(n).take(self.free_rank));
        FinAbGroup::from_cyclic_orders(&orders)
    }

    /// Reduce a coordinate vector into canonical range.
    pub fn normalize(&self, x: &[i128]) -> Vec<u64> {
        x.iter().zip(&self.invariants).map(|(&v, &d)| v.rem_euclid(d as i128) as u64).collect()
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).zip(&self.invariants).map(|((x, y), d)| (x + y) % d).collect()
    }

    /// All elements (torsion part), in lexicographic order of coordinates.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &d in &self.invariants {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for e in &out {
                for v in 0..d {
                    let mut e2 = e.clone();
                    e2.push(v);
                    next.push(e2);
                }
            }
            out = next;
        }
        out
    }
}

/// Subgroup of (Z/n)^s with an independent generating set.
#[derive(Clone, Debug)]
pub struct ZnSubgroup {
    pub n: u64,
    pub dim: usize,
    /// Independent generators (entries in [0, n)) with their orders (> 1).
    pub gens: Vec<(Vec<i128>, u64)>,
    /// Upper triangular basis of the lattice <gens> + n Z^s.
    basis: IntMatrix,
    v: IntMatrix,
    diag: Vec<(usize, u64)>,
}

impl ZnSubgroup {
    pub fn group(&self) -> FinAbGroup {
        FinAbGroup::from_cyclic_orders(&self.gens.iter().map(|g| g.1).collect::<Vec<_>>())
    }

    pub fn order(&self) -> u128 {
        self.gens.iter().map(|g| g.1 as u128).product()
    }

    /// Coordinates of x with respect to `gens`, or None if x is not in the subgroup.
    pub fn coords(&self, x: &[i128]) -> Option<Vec<u64>> {
        let nn = self.n as i128;
        let x: Vec<i128> = x.iter().map(|v| v.rem_euclid(nn)).collect();
        // y * basis = x
        let mut y = vec![0i128; self.dim];
        for j in 0..self.dim {
            let mut acc = x[j];
            for l in 0..j {
                acc -= y[l] * self.basis.get(l, j);
            }
            let p = self.basis.get(j, j);
            if acc % p != 0 {
                return None;
            }
            y[j] = acc / p;
        }
        let z = self.v.apply_row(&y);
        Some(self.diag.iter().map(|&(i, d)| z[i].rem_euclid(d as i128) as u64).collect())
    }

    pub fn contains(&self, x: &[i128]) -> bool {
        self.coords(x).is_some()
    }
}

/// Independent generators for the subgroup of (Z/n)^s generated by `gens`.
pub fn subgroup_of_zn(gens: &[Vec<i128>], s: usize, n: u64) -> ZnSubgroup {
    let nn = n as i128;
    let mut h = HnfModN::new(s, n);
    for g in gens {
        h.insert(g);
    }
    // full-rank basis M of L = <gens> + n Z^s
    let mut m = h.matrix();
    for j in 0..s {
        if m.get(j, j) == 0 {
            m.set(j, j, nn);
        }
    }
    // X = n M^{-1}, i.e. X M = n I, solved row by row (M upper triangular)
    let mut x = IntMatrix::zeros(s, s);
    for i in 0..s {
        for j in 0..s {
            let mut acc = if i == j { nn } else { 0 };
            for l in 0..j {
                acc -= x.get(i, l) * m.get(l, j);
            }
            debug_assert_eq!(acc % m.get(j, j), 0);
            x.set(i, j, acc / m.get(j, j));
        }
    }
    // L / nZ^s = Z^s / rowspace(X) in M-coordinates
    let smith = smith_normal_form(&x);
    let mut out = Vec::new();
    let mut diag = Vec::new();
    for (i, &d) in smith.diagonal().iter().enumerate() {
        if d > 1 {
            let coords = smith.v_inv.row(i).to_vec();
            let elem: Vec<i128> = m.apply_row(&coords).iter().map(|v| v.rem_euclid(nn)).collect();
            out.push((elem, d as u64));
            diag.push((i, d as u64));
        }
    }
    ZnSubgroup { n, dim: s, gens: out, basis: m, v: smith.v, diag }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        let g = FinAbGroup::from_cyclic_orders(&[2, 3]);
        assert_eq!(g.invariants(), &[6]);
        let g = FinAbGroup::from_cyclic_orders(&[4, 2, 1, 6]);
        assert_eq!(g.invariants(), &[2, 2, 12]);
        assert_eq!(g.order(), 48);
        assert_eq!(g.mod_n(4).invariants(), &[2, 2, 4]);
        assert_eq!(FinAbGroup::from_cyclic_orders(&[0]).mod_n(4).invariants(), &[4]);
        assert_eq!(g.elements().len(), 48);
    }

    #[test]
    fn subgroup_generators() {
        // <(2,0),(1,1)> in (Z/4)^2 has order 8
        let gens = vec![vec![2, 0], vec![1, 1]];
        let sub = subgroup_of_zn(&gens, 2, 4);
        assert_eq!(sub.order(), 8);
        assert_eq!(sub.coords(&[1, 1]).map(|c| c.len()), Some(2));
        assert!(sub.coords(&[0, 1]).is_none());
        for (i, (g, _)) in sub.gens.iter().enumerate() {
            let c = sub.coords(g).unwrap();
            assert!(c.iter().enumerate().all(|(j, &v)| v == (i == j) as u64));
        }
        // each generator has the claimed order
        for (g, o) in &sub.gens {
            let mut h = HnfModN::new(2, 4);
            h.insert(&gens[0]);
            h.insert(&gens[1]);
            assert!(h.contains(g));
            let mult: Vec<i128> = g.iter().map(|v| v * *o as i128).collect();
            assert!(mult.iter().all(|v| v % 4 == 0));
            let half: Vec<i128> = g.iter().map(|v| v * (*o as i128 / 2)).collect();
            assert!(half.iter().any(|v| v % 4 != 0));
        }
    }
}
