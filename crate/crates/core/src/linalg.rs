//! Exact linear algebra over Z/m.
//!
//! Systems are split along `m = ∏ p^e` and solved over each local ring
//! Z/p^e by incremental Howell-form elimination: a pivot with leading
//! entry `p^v` also contributes its annihilated multiple `p^(e-v)·row`,
//! which keeps back-substitution complete. Module structure (kernels,
//! quotients) goes through a dense Smith normal form with tracked column
//! transforms.

use std::collections::{BTreeMap, VecDeque};

use crate::modular::{add_mod, crt, factor, inv_mod, mul_mod, pow_u64, sub_mod, valuation};

/// Matrix over Z/m stored as sparse rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMatrix {
    cols: usize,
    modulus: u64,
    rows: Vec<Vec<(usize, u64)>>,
}

impl ModMatrix {
    pub fn new(cols: usize, modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        ModMatrix {
            cols,
            modulus,
            rows: Vec::new(),
        }
    }

    pub fn from_dense(rows: &[Vec<u64>], cols: usize, modulus: u64) -> Self {
        let mut m = Self::new(cols, modulus);
        for r in rows {
            m.push_row(r.iter().enumerate().map(|(j, &v)| (j, v as i64)));
        }
        m
    }

    pub fn identity(n: usize, modulus: u64) -> Self {
        let mut m = Self::new(n, modulus);
        for i in 0..n {
            m.push_row([(i, 1)]);
        }
        m
    }

    /// Appends a row given as `(column, value)` pairs; duplicate columns
    /// are summed and values reduced.
    pub fn push_row(&mut self, entries: impl IntoIterator<Item = (usize, i64)>) {
        let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
        for (j, v) in entries {
            assert!(j < self.cols, "column {j} out of range");
            let v = crate::modular::reduce(v, self.modulus);
            let e = acc.entry(j).or_insert(0);
            *e = add_mod(*e, v, self.modulus);
        }
        self.rows
            .push(acc.into_iter().filter(|&(_, v)| v != 0).collect());
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn row(&self, i: usize) -> &[(usize, u64)] {
        &self.rows[i]
    }

    pub fn mul_vec(&self, x: &[u64]) -> Vec<u64> {
        let m = self.modulus;
        self.rows
            .iter()
            .map(|r| r.iter().fold(0, |acc, &(j, v)| add_mod(acc, mul_mod(v, x[j], m), m)))
            .collect()
    }

    /// Row vector times matrix: `wA`.
    pub fn left_mul(&self, w: &[u64]) -> Vec<u64> {
        let m = self.modulus;
        let mut out = vec![0; self.cols];
        for (i, r) in self.rows.iter().enumerate() {
            if w[i] == 0 {
                continue;
            }
            for &(j, v) in r {
                out[j] = add_mod(out[j], mul_mod(w[i], v, m), m);
            }
        }
        out
    }

    fn reduced(&self, q: u64) -> Vec<Vec<u64>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![0; self.cols];
                for &(j, v) in r {
                    d[j] = v % q;
                }
                d
            })
            .collect()
    }
}

/// Outcome of [`solve_linear`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Solved(Vec<u64>),
    /// A row vector `w` with `wA = 0` and `w·b ≠ 0`.
    Inconsistent { certificate: Vec<u64> },
}

impl LinearSolution {
    pub fn solution(&self) -> Option<&[u64]> {
        match self {
            LinearSolution::Solved(x) => Some(x),
            LinearSolution::Inconsistent { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<u64>,
    rhs: u64,
    combo: Vec<(usize, u64)>,
}

impl Row {
    fn lead(&self) -> Option<usize> {
        self.coeffs.iter().position(|&v| v != 0)
    }

    fn scale(&mut self, f: u64, q: u64) {
        self.coeffs.iter_mut().for_each(|v| *v = mul_mod(*v, f, q));
        self.rhs = mul_mod(self.rhs, f, q);
        self.combo.iter_mut().for_each(|(_, v)| *v = mul_mod(*v, f, q));
        self.combo.retain(|&(_, v)| v != 0);
    }

    /// `self -= f · other`, starting at column `from`.
    fn sub_scaled(&mut self, other: &Row, f: u64, from: usize, q: u64, track: bool) {
        for j in from..self.coeffs.len() {
            if other.coeffs[j] != 0 {
                self.coeffs[j] = sub_mod(self.coeffs[j], mul_mod(f, other.coeffs[j], q), q);
            }
        }
        self.rhs = sub_mod(self.rhs, mul_mod(f, other.rhs, q), q);
        if track {
            let mut merged: BTreeMap<usize, u64> = self.combo.iter().copied().collect();
            for &(i, v) in &other.combo {
                let e = merged.entry(i).or_insert(0);
                *e = sub_mod(*e, mul_mod(f, v, q), q);
            }
            self.combo = merged.into_iter().filter(|&(_, v)| v != 0).collect();
        }
    }
}

/// Howell-style echelon form over Z/p^e.
struct LocalEchelon {
    p: u64,
    e: u32,
    q: u64,
    track: bool,
    pivots: BTreeMap<usize, Row>,
    inconsistent: Option<Row>,
}

impl LocalEchelon {
    fn new(p: u64, e: u32, track: bool) -> Self {
        LocalEchelon {
            p,
            e,
            q: pow_u64(p, e),
            track,
            pivots: BTreeMap::new(),
            inconsistent: None,
        }
    }

    /// Scales a row so its lead is exactly `p^v`; returns `v`.
    fn normalize(&self, row: &mut Row, lead: usize) -> u32 {
        let v = valuation(row.coeffs[lead], self.p, self.e);
        let unit = row.coeffs[lead] / pow_u64(self.p, v);
        let inv = inv_mod(unit, self.q).expect("unit part is invertible");
        row.scale(inv, self.q);
        v
    }

    fn insert(&mut self, row: Row) {
        let mut queue = VecDeque::from([row]);
        while let Some(mut row) = queue.pop_front() {
            loop {
                let Some(j) = row.lead() else {
                    if row.rhs != 0 && self.inconsistent.is_none() {
                        self.inconsistent = Some(row);
                    }
                    break;
                };
                let v = valuation(row.coeffs[j], self.p, self.e);
                match self.pivots.get_mut(&j) {
                    None => {
                        let v = self.normalize(&mut row, j);
                        if v > 0 {
                            let mut ann = row.clone();
                            ann.scale(pow_u64(self.p, self.e - v), self.q);
                            queue.push_back(ann);
                        }
                        self.pivots.insert(j, row);
                        break;
                    }
                    Some(piv) => {
                        let vp = valuation(piv.coeffs[j], self.p, self.e);
                        if v < vp {
                            std::mem::swap(piv, &mut row);
                            let mut fresh = piv.clone();
                            let nv = self.normalize(&mut fresh, j);
                            if nv > 0 {
                                let mut ann = fresh.clone();
                                ann.scale(pow_u64(self.p, self.e - nv), self.q);
                                queue.push_back(ann);
                            }
                            *self.pivots.get_mut(&j).unwrap() = fresh;
                        }
                        let piv = &self.pivots[&j];
                        let vp = valuation(piv.coeffs[j], self.p, self.e);
                        let f = row.coeffs[j] / pow_u64(self.p, vp);
                        row.sub_scaled(piv, f, j, self.q, self.track);
                        debug_assert_eq!(row.coeffs[j], 0);
                    }
                }
            }
        }
    }

    fn back_substitute(&self, cols: usize) -> Result<Vec<u64>, Row> {
        let q = self.q;
        let mut x = vec![0u64; cols];
        for (&j, row) in self.pivots.iter().rev() {
            let mut s = row.rhs;
            for k in j + 1..cols {
                if row.coeffs[k] != 0 {
                    s = sub_mod(s, mul_mod(row.coeffs[k], x[k], q), q);
                }
            }
            let pv = row.coeffs[j];
            if s % pv != 0 {
                let v = valuation(pv, self.p, self.e);
                let mut cert = row.clone();
                cert.scale(pow_u64(self.p, self.e - v), q);
                return Err(cert);
            }
            x[j] = s / pv;
        }
        Ok(x)
    }

    fn pivot_rows(&self) -> Vec<Vec<u64>> {
        self.pivots.values().map(|r| r.coeffs.clone()).collect()
    }
}

/// Solves `Ax = b` over Z/m, or returns a certificate of insolvability.
pub fn solve_linear(a: &ModMatrix, b: &[u64]) -> LinearSolution {
    assert_eq!(a.rows(), b.len(), "dimension mismatch");
    let m = a.modulus();
    if m == 1 {
        return LinearSolution::Solved(vec![0; a.cols()]);
    }
    let mut parts: Vec<Vec<(u64, u64)>> = vec![Vec::new(); a.cols()];
    for (p, e) in factor(m) {
        let q = pow_u64(p, e);
        let mut ech = LocalEchelon::new(p, e, true);
        for (i, coeffs) in a.reduced(q).into_iter().enumerate() {
            ech.insert(Row {
                coeffs,
                rhs: b[i] % q,
                combo: vec![(i, 1)],
            });
        }
        let outcome = match ech.inconsistent.clone() {
            Some(r) => Err(r),
            None => ech.back_substitute(a.cols()),
        };
        match outcome {
            Ok(x) => {
                for (j, v) in x.into_iter().enumerate() {
                    parts[j].push((v, q));
                }
            }
            Err(row) => {
                let lift = m / q;
                let mut w = vec![0u64; a.rows()];
                for (i, v) in row.combo {
                    w[i] = mul_mod(v, lift, m);
                }
                debug_assert!(a.left_mul(&w).iter().all(|&v| v == 0));
                return LinearSolution::Inconsistent { certificate: w };
            }
        }
    }
    let x: Vec<u64> = parts.iter().map(|pp| crt(pp).0).collect();
    let check = a.mul_vec(&x);
    assert!(
        check.iter().zip(b).all(|(u, v)| u == &(v % m)),
        "internal error: solver produced a non-solution"
    );
    LinearSolution::Solved(x)
}

/// Checks an insolvability certificate: `wA = 0` and `w·b ≠ 0`.
pub fn verify_certificate(a: &ModMatrix, b: &[u64], w: &[u64]) -> bool {
    let m = a.modulus();
    let wb = w
        .iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| add_mod(acc, mul_mod(x, y % m, m), m));
    a.left_mul(w).iter().all(|&v| v == 0) && wb != 0
}

/// Echelon rows of a homogeneous system over Z/p^e (same row space).
pub fn local_echelon_rows(a: &ModMatrix, p: u64, e: u32) -> Vec<Vec<u64>> {
    let q = pow_u64(p, e);
    let mut ech = LocalEchelon::new(p, e, false);
    for coeffs in a.reduced(q) {
        if coeffs.iter().any(|&v| v != 0) {
            ech.insert(Row {
                coeffs,
                rhs: 0,
                combo: Vec::new(),
            });
        }
    }
    ech.pivot_rows()
}

/// Incremental homogeneous echelon, for callers that stream rows.
pub struct StreamingEchelon {
    inner: LocalEchelon,
    cols: usize,
}

impl StreamingEchelon {
    pub fn new(cols: usize, p: u64, e: u32) -> Self {
        StreamingEchelon {
            inner: LocalEchelon::new(p, e, false),
            cols,
        }
    }

    pub fn push(&mut self, coeffs: Vec<u64>) {
        debug_assert_eq!(coeffs.len(), self.cols);
        let q = self.inner.q;
        let coeffs: Vec<u64> = coeffs.into_iter().map(|v| v % q).collect();
        if coeffs.iter().any(|&v| v != 0) {
            self.inner.insert(Row {
                coeffs,
                rhs: 0,
                combo: Vec::new(),
            });
        }
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.inner.pivot_rows()
    }
}

/// Smith normal form over Z/p^e with tracked column transforms.
///
/// For the input `A` (rows × n), returns valuations `v_i` of the diagonal
/// (`e` marks a zero diagonal entry) together with `W` and `W⁻¹` such that
/// `U·A·W` is diagonal for some untracked invertible `U`.
#[derive(Clone, Debug)]
pub struct LocalSnf {
    pub p: u64,
    pub e: u32,
    pub diag_valuations: Vec<u32>,
    pub w: Vec<Vec<u64>>,
    pub w_inv: Vec<Vec<u64>>,
}

pub fn local_snf(a: &[Vec<u64>], n: usize, p: u64, e: u32) -> LocalSnf {
    let q = pow_u64(p, e);
    let mut m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|&v| v % q).collect()).collect();
    let rows = m.len();
    let mut w: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as u64).collect()).collect();
    let mut w_inv = w.clone();
    let mut diag = vec![e; n];
    for k in 0..rows.min(n) {
        // Pivot of minimal valuation in the trailing block.
        let mut best: Option<(u32, usize, usize)> = None;
        for (r, row) in m.iter().enumerate().skip(k) {
            for (c, &val) in row.iter().enumerate().skip(k) {
                if val != 0 {
                    let v = valuation(val, p, e);
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let Some((v, r, c)) = best else { break };
        m.swap(k, r);
        if c != k {
            for row in m.iter_mut() {
                row.swap(k, c);
            }
            for row in w.iter_mut() {
                row.swap(k, c);
            }
            w_inv.swap(k, c);
        }
        let pv = pow_u64(p, v);
        let unit = m[k][k] / pv;
        let uinv = inv_mod(unit, q).expect("unit");
        // Scale column k by uinv (row k of W⁻¹ by unit).
        for row in m.iter_mut() {
            row[k] = mul_mod(row[k], uinv, q);
        }
        for row in w.iter_mut() {
            row[k] = mul_mod(row[k], uinv, q);
        }
        w_inv[k].iter_mut().for_each(|x| *x = mul_mod(*x, unit, q));
        debug_assert_eq!(m[k][k], pv);
        for i in k + 1..rows {
            if m[i][k] != 0 {
                let f = m[i][k] / pv;
                let (top, bottom) = m.split_at_mut(i);
                for (x, y) in bottom[0].iter_mut().zip(&top[k]) {
                    *x = sub_mod(*x, mul_mod(f, *y, q), q);
                }
            }
        }
        for j in k + 1..n {
            if m[k][j] != 0 {
                let f = m[k][j] / pv;
                // col_j -= f col_k; W⁻¹: row_k += f row_j.
                for row in m.iter_mut() {
                    row[j] = sub_mod(row[j], mul_mod(f, row[k], q), q);
                }
                for row in w.iter_mut() {
                    row[j] = sub_mod(row[j], mul_mod(f, row[k], q), q);
                }
                let rj = w_inv[j].clone();
                for (x, y) in w_inv[k].iter_mut().zip(&rj) {
                    *x = add_mod(*x, mul_mod(f, *y, q), q);
                }
            }
        }
        diag[k] = v;
    }
    LocalSnf {
        p,
        e,
        diag_valuations: diag,
        w,
        w_inv,
    }
}

/// Kernel of a homogeneous system over Z/p^e as a direct sum of cyclic
/// modules: generator `i` is `p^(e−w_i)·W[:, i]` of order `p^(w_i)`.
#[derive(Clone, Debug)]
pub struct LocalKernel {
    pub snf: LocalSnf,
    /// Exponent `w_i` of each kernel generator (0 means trivial).
    pub weights: Vec<u32>,
}

impl LocalKernel {
    pub fn compute(a: &ModMatrix, p: u64, e: u32) -> Self {
        Self::from_rows(&local_echelon_rows(a, p, e), a.cols(), p, e)
    }

    /// Kernel of the system whose rows (already echelonized or not) are given.
    pub fn from_rows(rows: &[Vec<u64>], cols: usize, p: u64, e: u32) -> Self {
        let snf = local_snf(rows, cols, p, e);
        let weights = snf.diag_valuations.clone();
        LocalKernel { snf, weights }
    }

    fn q(&self) -> u64 {
        pow_u64(self.snf.p, self.snf.e)
    }

    pub fn generator(&self, i: usize) -> Vec<u64> {
        let q = self.q();
        let s = pow_u64(self.snf.p, self.snf.e - self.weights[i]);
        self.snf.w.iter().map(|row| mul_mod(row[i], s, q)).collect()
    }

    /// Coordinates `z` of a kernel vector in terms of the generators.
    pub fn coords(&self, x: &[u64]) -> Option<Vec<u64>> {
        let q = self.q();
        let n = x.len();
        let mut z = Vec::with_capacity(n);
        for i in 0..n {
            let y = (0..n).fold(0, |acc, j| add_mod(acc, mul_mod(self.snf.w_inv[i][j], x[j], q), q));
            let s = pow_u64(self.snf.p, self.snf.e - self.weights[i]);
            if y % s != 0 {
                return None;
            }
            z.push(y / s % pow_u64(self.snf.p, self.weights[i]));
        }
        Some(z)
    }

    /// Cyclic decomposition of `ker / span(relations)`: returns ambient
    /// representative vectors with their order exponents (nontrivial only).
    pub fn quotient(&self, relations: &[Vec<u64>]) -> Option<Vec<(Vec<u64>, u32)>> {
        let (p, e) = (self.snf.p, self.snf.e);
        let q = self.q();
        let t = self.weights.len();
        let mut rel: Vec<Vec<u64>> = Vec::new();
        for r in relations {
            rel.push(self.coords(r)?);
        }
        for i in 0..t {
            if self.weights[i] < e {
                let mut row = vec![0; t];
                row[i] = pow_u64(p, self.weights[i]) % q;
                rel.push(row);
            }
        }
        let snf = local_snf(&rel, t, p, e);
        let mut out = Vec::new();
        for i in 0..t {
            let v = snf.diag_valuations[i];
            if v == 0 {
                continue;
            }
            // Generator in z-coordinates is row i of W⁻¹.
            let z = &snf.w_inv[i];
            let mut x = vec![0u64; self.snf.w.len()];
            for (j, &zj) in z.iter().enumerate() {
                if zj == 0 || self.weights[j] == 0 {
                    continue;
                }
                let g = self.generator(j);
                for (xk, gk) in x.iter_mut().zip(g) {
                    *xk = add_mod(*xk, mul_mod(zj, gk, q), q);
                }
            }
            out.push((x, v));
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_system() {
        let a = ModMatrix::identity(3, 7);
        assert_eq!(solve_linear(&a, &[1, 5, 6]), LinearSolution::Solved(vec![1, 5, 6]));
    }

    #[test]
    fn parity_obstruction_mod_four() {
        let a = ModMatrix::from_dense(&[vec![2]], 1, 4);
        match solve_linear(&a, &[1]) {
            LinearSolution::Inconsistent { certificate } => {
                assert!(verify_certificate(&a, &[1], &certificate));
            }
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn construct_then_solve_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for m in [6u64, 12, 8, 9, 30] {
            for _ in 0..20 {
                let (r, c) = (rng.gen_range(1..8), rng.gen_range(1..8));
                let rows: Vec<Vec<u64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(0..m)).collect()).collect();
                let a = ModMatrix::from_dense(&rows, c, m);
                let x0: Vec<u64> = (0..c).map(|_| rng.gen_range(0..m)).collect();
                let b = a.mul_vec(&x0);
                let x = solve_linear(&a, &b);
                assert_eq!(a.mul_vec(x.solution().expect("consistent")), b);
            }
        }
    }

    /// Brute force over all vectors for tiny systems.
    fn brute_solvable(a: &ModMatrix, b: &[u64]) -> bool {
        let m = a.modulus();
        let c = a.cols();
        let total = m.pow(c as u32);
        (0..total).any(|mut k| {
            let x: Vec<u64> = (0..c)
                .map(|_| {
                    let d = k % m;
                    k /= m;
                    d
                })
                .collect();
            a.mul_vec(&x) == b
        })
    }

    #[test]
    fn agrees_with_brute_force_and_crt() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in [6u64, 12, 4, 8] {
            for _ in 0..60 {
                let (r, c) = (rng.gen_range(1..4), rng.gen_range(1..4));
                let rows: Vec<Vec<u64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(0..m)).collect()).collect();
                let a = ModMatrix::from_dense(&rows, c, m);
                let b: Vec<u64> = (0..r).map(|_| rng.gen_range(0..m)).collect();
                let got = solve_linear(&a, &b);
                assert_eq!(got.solution().is_some(), brute_solvable(&a, &b));
                if let LinearSolution::Inconsistent { certificate } = &got {
                    assert!(verify_certificate(&a, &b, certificate));
                }
                // Solvable mod m iff solvable mod every prime-power factor.
                let local = factor(m).into_iter().all(|(p, e)| {
                    let q = pow_u64(p, e);
                    let aq = ModMatrix::from_dense(&rows, c, q);
                    let bq: Vec<u64> = b.iter().map(|v| v % q).collect();
                    solve_linear(&aq, &bq).solution().is_some()
                });
                assert_eq!(local, got.solution().is_some());
            }
        }
    }

    #[test]
    fn kernel_of_z4_relation() {
        // 2x = 0 over Z/4: kernel {0, 2} of order 2.
        let a = ModMatrix::from_dense(&[vec![2]], 1, 4);
        let k = LocalKernel::compute(&a, 2, 2);
        assert_eq!(k.weights, vec![1]);
        assert_eq!(k.generator(0), vec![2]);
        let q = k.quotient(&[]).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q[0].1, 1);
        // Quotienting by the generator kills it.
        assert!(k.quotient(&[vec![2]]).unwrap().is_empty());
    }

    #[test]
    fn quotient_structure_of_free_module() {
        // No equations on Z/9 ⊕ Z/9, relation (3, 0): quotient Z/3 ⊕ Z/9.
        let a = ModMatrix::new(2, 9);
        let k = LocalKernel::compute(&a, 3, 2);
        let mut orders: Vec<u32> = k.quotient(&[vec![3, 0]]).unwrap().iter().map(|x| x.1).collect();
        orders.sort();
        assert_eq!(orders, vec![1, 2]);
    }
}
