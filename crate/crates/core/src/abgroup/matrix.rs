use std::fmt;

/// Dense integer matrix, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<i128>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        write!(f, "{rows:?}")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Build from rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<i128>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows);
        let mut m = IntMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    m.data[i * o.cols + j] += a * o.get(k, j);
                }
            }
        }
        m
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, x: &[i128]) -> Vec<i128> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0; self.cols];
        for (i, &a) in x.iter().enumerate() {
            if a != 0 {
                for (j, o) in out.iter_mut().enumerate() {
                    *o += a * self.get(i, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    /// Determinant by fraction-free elimination (square matrices).
    pub fn determinant(&self) -> i128 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut sign = 1;
        let mut prev = 1i128;
        for k in 0..n {
            if a.get(k, k) == 0 {
                match (k + 1..n).find(|&i| a.get(i, k) != 0) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k);
        }
        sign * a.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: i128) {
        if c != 0 {
            for j in 0..self.cols {
                let v = self.get(src, j);
                self.data[dst * self.cols + j] += c * v;
            }
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: i128) {
        if c != 0 {
            for i in 0..self.rows {
                let v = self.get(i, src);
                self.data[i * self.cols + dst] += c * v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self.data[i * self.cols + j] = -self.data[i * self.cols + j];
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self.data[i * self.cols + j] = -self.data[i * self.cols + j];
        }
    }
}

/// `U * A * V = D` with the inverses of U and V tracked alongside.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Smith {
    /// Diagonal entries d_1 | d_2 | ... (length min(rows, cols)).
    pub fn diagonal(&self) -> Vec<i128> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i)).collect()
    }
}

/// Smith normal form with smallest-absolute-value pivoting.
pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    // Row op R_i += c R_t on D and U corresponds to C_t -= c C_i on U^{-1}.
    macro_rules! row_add {
        ($dst:expr, $src:expr, $c:expr) => {{
            d.add_row($dst, $src, $c);
            u.add_row($dst, $src, $c);
            u_inv.add_col($src, $dst, -$c);
        }};
    }
    macro_rules! col_add {
        ($dst:expr, $src:expr, $c:expr) => {{
            d.add_col($dst, $src, $c);
            v.add_col($dst, $src, $c);
            v_inv.add_row($src, $dst, -$c);
        }};
    }

    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = d.get(i, j);
                    if x != 0 && best.map_or(true, |(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let p = d.get(t, t);
            let mut clean = true;
            for i in t + 1..m {
                let q = d.get(i, t).div_euclid(p);
                row_add!(i, t, -q);
                if d.get(i, t) != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = d.get(t, j).div_euclid(p);
                col_add!(j, t, -q);
                if d.get(t, j) != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| d.get(i, j) % p != 0));
            match bad {
                Some(i) => row_add!(t, i, 1),
                None => break,
            }
        }
        if t < m && t < n && d.get(t, t) < 0 {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }
    Smith { u, d, v, u_inv, v_inv }
}

fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        return if a < 0 { (-a, -1, 0) } else { (a, 1, 0) };
    }
    let (g, s, t) = xgcd(b, a.rem_euclid(b));
    (g, t, s - a.div_euclid(b) * t)
}


/// Row-echelon basis of (rowspace + n Z^k) with entries reduced mod n.
/// Missing pivots stand for n e_j. Every stored pivot divides n.
#[derive(Clone, Debug)]
pub struct HnfModN {
    n: i128,
    k: usize,
    basis: Vec<Option<Vec<i128>>>,
}

impl HnfModN {
    pub fn new(k: usize, n: u64) -> Self {
        HnfModN { n: n as i128, k, basis: vec![None; k] }
    }

    pub fn insert(&mut self, v: &[i128]) {
        let n = self.n;
        let mut v: Vec<i128> = v.iter().map(|x| x.rem_euclid(n)).collect();
        for j in 0..self.k {
            if v[j] == 0 {
                continue;
            }
            match self.basis[j].take() {
                None => {
                    let (g, s, _) = xgcd(v[j], n);
                    let new: Vec<i128> = v.iter().map(|x| (s * x).rem_euclid(n)).collect();
                    let f = n / g;
                    v = v.iter().map(|x| (f * x).rem_euclid(n)).collect();
                    let mut new = new;
                    new[j] = g;
                    self.basis[j] = Some(new);
                }
                Some(b) => {
                    let (a, c) = (b[j], v[j]);
                    let (g, s, t) = xgcd(a, c);
                    let new: Vec<i128> =
                        b.iter().zip(&v).map(|(x, y)| (s * x + t * y).rem_euclid(n)).collect();
                    let (ag, cg) = (a / g, c / g);
                    v = b.iter().zip(&v).map(|(x, y)| (cg * x - ag * y).rem_euclid(n)).collect();
                    let mut new = new;
                    // g divides a which divides n, so reduction may have changed nothing here
                    new[j] = g;
                    self.basis[j] = Some(new);
                }
            }
        }
    }

    /// Square matrix of pivot rows (zero rows where the pivot is n).
    pub fn matrix(&self) -> IntMatrix {
        let rows: Vec<Vec<i128>> = self
            .basis
            .iter()
            .map(|r| r.clone().unwrap_or_else(|| vec![0; self.k]))
            .collect();
        IntMatrix::from_rows(self.k, &rows)
    }

    /// Whether v lies in the lattice (rowspace + n Z^k).
    pub fn contains(&self, v: &[i128]) -> bool {
        let n = self.n;
        let mut v: Vec<i128> = v.iter().map(|x| x.rem_euclid(n)).collect();
        for j in 0..self.k {
            if v[j] == 0 {
                continue;
            }
            let Some(b) = &self.basis[j] else { return false };
            if v[j] % b[j] != 0 {
                return false;
            }
            let q = v[j] / b[j];
            for (x, y) in v.iter_mut().zip(b) {
                *x = (*x - q * y).rem_euclid(n);
            }
        }
        true
    }
}

/// Column-only Smith reduction over Z/n of a square matrix whose row lattice contains n Z^k.
/// Returns (invariants gcd(d_i, n), V mod n, V^{-1} mod n): the quotient Z^k/L is
/// the sum of Z/inv_i, and x maps to (xV)_i mod inv_i.
pub fn smith_mod_n(a: &IntMatrix, n: u64) -> (Vec<u64>, IntMatrix, IntMatrix) {
    let nn = n as i128;
    let k = a.cols();
    let mut d = a.clone();
    let rows = d.rows();
    let mut v = IntMatrix::identity(k);
    let mut v_inv = IntMatrix::identity(k);
    let reduce = |m: &mut IntMatrix| {
        for x in m.data.iter_mut() {
            *x = x.rem_euclid(nn);
        }
    };
    reduce(&mut d);
    let mut diag = Vec::with_capacity(k);
    let mut t = 0;
    while t < k {
        if t >= rows {
            diag.push(0);
            t += 1;
            continue;
        }
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..k {
                    let x = d.get(i, j);
                    if x != 0 && best.map_or(true, |(bi, bj)| x < d.get(bi, bj)) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            d.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);
            let p = d.get(t, t);
            let mut clean = true;
            for i in t + 1..rows {
                let q = d.get(i, t) / p;
                d.add_row(i, t, -q);
                for j in 0..k {
                    let x = d.get(i, j).rem_euclid(nn);
                    d.set(i, j, x);
                }
                if d.get(i, t) != 0 {
                    clean = false;
                }
            }
            for j in t + 1..k {
                let q = d.get(t, j) / p;
                d.add_col(j, t, -q);
                v.add_col(j, t, -q);
                v_inv.add_row(t, j, q);
                for i in 0..rows {
                    let x = d.get(i, j).rem_euclid(nn);
                    d.set(i, j, x);
                }
                if d.get(t, j) != 0 {
                    clean = false;
                }
            }
            reduce(&mut v);
            reduce(&mut v_inv);
            if !clean {
                continue;
            }
            let g = crate::ffield::gcd(p as u64, n) as i128;
            let bad = (t + 1..rows).find(|&i| (t + 1..k).any(|j| d.get(i, j) % g != 0));
            match bad {
                Some(i) => {
                    d.add_row(t, i, 1);
                    reduce(&mut d);
                }
                None => break,
            }
        }
        diag.push(d.get(t, t));
        t += 1;
    }
    let inv = diag.iter().map(|&x| crate::ffield::gcd(x as u64, n)).collect();
    (inv, v, v_inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(a: &IntMatrix) -> Smith {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(a.rows()));
        assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(a.cols()));
        assert_eq!(s.u.determinant().abs(), 1);
        assert_eq!(s.v.determinant().abs(), 1);
        let diag = s.diagonal();
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert_eq!(s.d.get(i, j), 0);
                }
            }
        }
        for w in diag.windows(2) {
            assert!(w[0] >= 0);
            if w[0] == 0 {
                assert_eq!(w[1], 0);
            } else {
                assert_eq!(w[1] % w[0], 0);
            }
        }
        s
    }

    #[test]
    fn smith_examples() {
        assert_eq!(check(&IntMatrix::identity(3)).diagonal(), vec![1, 1, 1]);
        let a = IntMatrix::from_rows(2, &[vec![2, 0], vec![0, 3]]);
        assert_eq!(check(&a).diagonal(), vec![1, 6]);
        let b = IntMatrix::from_rows(2, &[vec![2, 4], vec![0, 4]]);
        assert_eq!(check(&b).diagonal(), vec![2, 4]);
    }

    #[test]
    fn hnf_mod_n_membership() {
        let mut h = HnfModN::new(2, 4);
        h.insert(&[2, 2]);
        assert!(h.contains(&[0, 0]));
        assert!(h.contains(&[2, 2]));
        assert!(!h.contains(&[1, 1]));
        assert!(!h.contains(&[0, 2]));
        let (inv, _, _) = smith_mod_n(&h.matrix(), 4);
        let mut nontrivial: Vec<u64> = inv.into_iter().filter(|&d| d > 1).collect();
        nontrivial.sort();
        assert_eq!(nontrivial, vec![2, 4]);
    }

    proptest! {
        #[test]
        fn smith_is_valid(rows in 1usize..5, cols in 1usize..5, seed in proptest::collection::vec(-20i128..20, 25)) {
            let data: Vec<Vec<i128>> = (0..rows).map(|i| seed[i * 5..i * 5 + cols].to_vec()).collect();
            check(&IntMatrix::from_rows(cols, &data));
        }

        #[test]
        fn modular_smith_matches_integer(rows in 1usize..5, seed in proptest::collection::vec(0i128..12, 16), n in prop::sample::select(vec![2u64, 4, 6, 12])) {
            let k = 4;
            let data: Vec<Vec<i128>> = (0..rows).map(|i| seed[i * 4..i * 4 + k].to_vec()).collect();
            let mut h = HnfModN::new(k, n);
            for r in &data { h.insert(r); }
            let (inv, v, v_inv) = smith_mod_n(&h.matrix(), n);
            // integer oracle: stack the rows with n*I
            let mut all = data.clone();
            for i in 0..k { let mut r = vec![0; k]; r[i] = n as i128; all.push(r); }
            let s = smith_normal_form(&IntMatrix::from_rows(k, &all));
            let mut a: Vec<u64> = inv.iter().copied().filter(|&d| d > 1).collect();
            let mut b: Vec<u64> = s.diagonal().iter().map(|&d| d as u64).filter(|&d| d > 1).collect();
            a.sort(); b.sort();
            prop_assert_eq!(a, b);
            // relations map to zero
            for r in &data {
                let img = v.apply_row(r);
                for (x, d) in img.iter().zip(&inv) {
                    prop_assert_eq!(x.rem_euclid(*d as i128), 0);
                }
            }
            // V * V^{-1} = I mod n
            let id = v.mul(&v_inv);
            for i in 0..k { for j in 0..k {
                prop_assert_eq!(id.get(i, j).rem_euclid(n as i128), (i == j) as i128);
            }}
        }
    }
}
