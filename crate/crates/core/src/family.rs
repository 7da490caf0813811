//! Structured backend for the semidirect family `(A × Â) ⋊ ⟨R, S⟩`.
//!
//! `A = F_p^n` with basis `x_1..x_n`, `T` the nilpotent Jordan block
//! (`T x_1 = 0`, `T x_i = x_{i-1}`), `R = 1 + T`, `S = 1 + T²`. Characters
//! of `A` are exponent vectors `u` with `⟨u, a⟩ = u·a ∈ Z/p`, and `R`, `S`
//! act on them diagonally: `⟨q(u), a⟩ = ⟨u, q⁻¹(a)⟩`.
//!
//! Elements are tuples `(a, u, i, j)` standing for `(a·u)·R^i S^j`, packed
//! into an index whose lexicographic order is the tuple order.

use crate::error::{Error, Result};
use crate::group::Elem;
use crate::modular::is_prime;

pub const MAX_RANK: usize = 8;

/// Square matrix over F_p, row-major, acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    pub n: usize,
    pub p: u32,
    pub data: Vec<u32>,
}

impl FpMatrix {
    pub fn identity(n: usize, p: u32) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1 % p;
        }
        FpMatrix { n, p, data }
    }

    pub fn zero(n: usize, p: u32) -> Self {
        FpMatrix {
            n,
            p,
            data: vec![0; n * n],
        }
    }

    /// The nilpotent Jordan block sending `x_i` to `x_{i-1}` and `x_1` to 0.
    pub fn jordan_shift(n: usize, p: u32) -> Self {
        let mut t = Self::zero(n, p);
        for i in 1..n {
            t.data[(i - 1) * n + i] = 1;
        }
        t
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.n + c]
    }

    pub fn add(&self, other: &Self) -> Self {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a + b) % self.p)
            .collect();
        FpMatrix { data, ..*self }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a + self.p - b) % self.p)
            .collect();
        FpMatrix { data, ..*self }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let p = self.p as u64;
        let mut data = vec![0u32; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k] as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = data[i * n + j] as u64 + a * other.data[k * n + j] as u64;
                    data[i * n + j] = (v % p) as u32;
                }
            }
        }
        FpMatrix { n, p: self.p, data }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.n, self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        FpMatrix { n, p: self.p, data }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n, self.p)
    }

    pub fn apply(&self, v: &[u32], out: &mut [u32]) {
        let n = self.n;
        let p = self.p as u64;
        for i in 0..n {
            let mut acc = 0u64;
            for j in 0..n {
                acc += self.data[i * n + j] as u64 * v[j] as u64;
            }
            out[i] = (acc % p) as u32;
        }
    }

    /// Rank over F_p by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let p = self.p as u64;
        let mut m: Vec<u64> = self.data.iter().map(|&x| x as u64).collect();
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| m[r * n + col] != 0) else {
                continue;
            };
            for c in 0..n {
                m.swap(piv * n + c, rank * n + c);
            }
            let inv = crate::modular::inv_mod(m[rank * n + col], p).expect("field");
            for r in 0..n {
                if r != rank && m[r * n + col] != 0 {
                    let f = m[r * n + col] * inv % p;
                    for c in 0..n {
                        m[r * n + c] = (m[r * n + c] + p * p - f * m[rank * n + c] % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Smallest `k ≥ 1` with `M^k = I`, searched up to `limit`.
    pub fn multiplicative_order(&self, limit: u64) -> Option<u64> {
        let mut acc = self.clone();
        for k in 1..=limit {
            if acc.is_identity() {
                return Some(k);
            }
            acc = acc.mul(self);
        }
        None
    }
}

/// Unpacked family element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyElem {
    pub a: Vec<u32>,
    pub u: Vec<u32>,
    pub i: u32,
    pub j: u32,
}

#[derive(Clone, Debug)]
pub struct FamilyGroup {
    pub p: u32,
    pub n: usize,
    /// `R^i S^j` on `A`, indexed by `i * p + j`.
    act_a: Vec<FpMatrix>,
    /// Diagonal action `((R^i S^j)⁻¹)ᵀ` on character exponents.
    act_dual: Vec<FpMatrix>,
    order: u64,
    pn: u64,
}

impl FamilyGroup {
    pub fn new(p: u32, n: usize) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::Parameter(format!("p = {p} is not prime")));
        }
        if n <= 2 || n > p as usize {
            return Err(Error::Parameter(format!(
                "family requires 2 < n ≤ p, got n = {n}, p = {p}"
            )));
        }
        if n > MAX_RANK {
            return Err(Error::Parameter(format!("rank n = {n} above supported {MAX_RANK}")));
        }
        let order = (p as u64)
            .checked_pow(2 * n as u32 + 2)
            .filter(|&o| o <= u32::MAX as u64 + 1)
            .ok_or_else(|| {
                Error::Parameter(format!("order p^(2n+2) for p = {p}, n = {n} exceeds element encoding"))
            })?;
        let (r, s) = Self::operators(p, n);
        let mut act_a = Vec::with_capacity((p * p) as usize);
        let mut act_dual = Vec::with_capacity((p * p) as usize);
        for i in 0..p {
            for j in 0..p {
                act_a.push(r.pow(i as u64).mul(&s.pow(j as u64)));
                let inv = r.pow((p - i) as u64).mul(&s.pow((p - j) as u64));
                act_dual.push(inv.transpose());
            }
        }
        Ok(FamilyGroup {
            p,
            n,
            act_a,
            act_dual,
            order,
            pn: (p as u64).pow(n as u32),
        })
    }

    /// The operators `R = 1 + T` and `S = 1 + T²`.
    pub fn operators(p: u32, n: usize) -> (FpMatrix, FpMatrix) {
        let t = FpMatrix::jordan_shift(n, p);
        let id = FpMatrix::identity(n, p);
        (id.add(&t), id.add(&t.mul(&t)))
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn action_on_a(&self, i: u32, j: u32) -> &FpMatrix {
        &self.act_a[(i * self.p + j) as usize]
    }

    pub fn action_on_dual(&self, i: u32, j: u32) -> &FpMatrix {
        &self.act_dual[(i * self.p + j) as usize]
    }

    fn pack_vec(&self, v: &[u32]) -> u64 {
        v.iter().fold(0u64, |acc, &d| acc * self.p as u64 + d as u64)
    }

    fn unpack_vec(&self, mut x: u64, out: &mut [u32]) {
        for k in (0..self.n).rev() {
            out[k] = (x % self.p as u64) as u32;
            x /= self.p as u64;
        }
    }

    pub fn encode(&self, e: &FamilyElem) -> Elem {
        let p = self.p as u64;
        let idx = ((self.pack_vec(&e.a) * self.pn + self.pack_vec(&e.u)) * p + e.i as u64) * p
            + e.j as u64;
        idx as Elem
    }

    pub fn decode(&self, x: Elem) -> FamilyElem {
        let (a, u, i, j) = self.split(x);
        FamilyElem {
            a: a[..self.n].to_vec(),
            u: u[..self.n].to_vec(),
            i,
            j,
        }
    }

    #[inline]
    fn split(&self, x: Elem) -> ([u32; MAX_RANK], [u32; MAX_RANK], u32, u32) {
        let p = self.p as u64;
        let mut x = x as u64;
        let j = (x % p) as u32;
        x /= p;
        let i = (x % p) as u32;
        x /= p;
        let mut a = [0u32; MAX_RANK];
        let mut u = [0u32; MAX_RANK];
        self.unpack_vec(x % self.pn, &mut u[..self.n]);
        self.unpack_vec(x / self.pn, &mut a[..self.n]);
        (a, u, i, j)
    }

    #[inline]
    fn join(&self, a: &[u32], u: &[u32], i: u32, j: u32) -> Elem {
        let p = self.p as u64;
        (((self.pack_vec(&a[..self.n]) * self.pn + self.pack_vec(&u[..self.n])) * p + i as u64) * p
            + j as u64) as Elem
    }

    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        let p = self.p;
        let (a1, u1, i1, j1) = self.split(x);
        let (a2, u2, i2, j2) = self.split(y);
        let mut ta = [0u32; MAX_RANK];
        let mut tu = [0u32; MAX_RANK];
        self.action_on_a(i1, j1).apply(&a2[..self.n], &mut ta[..self.n]);
        self.action_on_dual(i1, j1).apply(&u2[..self.n], &mut tu[..self.n]);
        for k in 0..self.n {
            ta[k] = (ta[k] + a1[k]) % p;
            tu[k] = (tu[k] + u1[k]) % p;
        }
        self.join(&ta, &tu, (i1 + i2) % p, (j1 + j2) % p)
    }

    pub fn inv(&self, x: Elem) -> Elem {
        let p = self.p;
        let (a, u, i, j) = self.split(x);
        let (ii, jj) = ((p - i) % p, (p - j) % p);
        let mut ta = [0u32; MAX_RANK];
        let mut tu = [0u32; MAX_RANK];
        self.action_on_a(ii, jj).apply(&a[..self.n], &mut ta[..self.n]);
        self.action_on_dual(ii, jj).apply(&u[..self.n], &mut tu[..self.n]);
        for k in 0..self.n {
            ta[k] = (p - ta[k]) % p;
            tu[k] = (p - tu[k]) % p;
        }
        self.join(&ta, &tu, ii, jj)
    }

    /// The family cocycle `c^{(r)}((h1,R^iS^j),(h2,R^kS^l)) = −u1·(R^iS^j a2) + r·j·k`.
    pub fn cocycle_value(&self, r: u32, x: Elem, y: Elem) -> u32 {
        let p = self.p as u64;
        let (_, u1, i1, j1) = self.split(x);
        let (a2, _, i2, _) = self.split(y);
        let mut ta = [0u32; MAX_RANK];
        self.action_on_a(i1, j1).apply(&a2[..self.n], &mut ta[..self.n]);
        let pairing: u64 = (0..self.n).map(|k| u1[k] as u64 * ta[k] as u64).sum::<u64>() % p;
        (((p - pairing) % p + r as u64 * j1 as u64 % p * i2 as u64) % p) as u32
    }

    /// Basis vector `x_k` of `A` (1-based), as a group element.
    pub fn x(&self, k: usize) -> Elem {
        let mut a = vec![0; self.n];
        a[k - 1] = 1;
        self.encode(&FamilyElem {
            a,
            u: vec![0; self.n],
            i: 0,
            j: 0,
        })
    }

    /// Dual basis character `χ_k` (sends `x_k` to ζ, others to 1).
    pub fn chi(&self, k: usize) -> Elem {
        let mut u = vec![0; self.n];
        u[k - 1] = 1;
        self.encode(&FamilyElem {
            a: vec![0; self.n],
            u,
            i: 0,
            j: 0,
        })
    }

    pub fn r_elem(&self) -> Elem {
        self.join(&[0; MAX_RANK], &[0; MAX_RANK], 1, 0)
    }

    pub fn s_elem(&self) -> Elem {
        self.join(&[0; MAX_RANK], &[0; MAX_RANK], 0, 1)
    }

    pub fn generators(&self) -> Vec<Elem> {
        let mut g: Vec<Elem> = (1..=self.n).map(|k| self.x(k)).collect();
        g.extend((1..=self.n).map(|k| self.chi(k)));
        g.push(self.r_elem());
        g.push(self.s_elem());
        g
    }

    /// Whether `x` lies in the normal subgroup `H = A × Â`.
    pub fn in_h(&self, x: Elem) -> bool {
        let (_, _, i, j) = self.split(x);
        i == 0 && j == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operators_have_order_p_and_commute() {
        for (p, n) in [(3, 3), (5, 3), (5, 5), (7, 4)] {
            let (r, s) = FamilyGroup::operators(p, n);
            assert_eq!(r.multiplicative_order(100), Some(p as u64));
            assert_eq!(s.multiplicative_order(100), Some(p as u64));
            assert_eq!(r.mul(&s), s.mul(&r));
        }
    }

    #[test]
    fn shift_matches_basis_action() {
        let t = FpMatrix::jordan_shift(3, 3);
        let mut out = [0u32; 3];
        t.apply(&[1, 0, 0], &mut out);
        assert_eq!(out, [0, 0, 0]);
        t.apply(&[0, 0, 1], &mut out);
        assert_eq!(out, [0, 1, 0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FamilyGroup::new(3, 2).is_err());
        assert!(FamilyGroup::new(3, 4).is_err());
        assert!(FamilyGroup::new(4, 3).is_err());
        assert!(FamilyGroup::new(3, 3).is_ok());
    }

    #[test]
    fn encoding_round_trips() {
        let g = FamilyGroup::new(3, 3).unwrap();
        for x in [0u32, 1, 17, 999, 6560] {
            assert_eq!(g.encode(&g.decode(x)), x);
        }
        assert_eq!(g.decode(0), FamilyElem { a: vec![0; 3], u: vec![0; 3], i: 0, j: 0 });
    }

    #[test]
    fn semidirect_law_on_samples() {
        // (h1, q1)(h2, q2) = (h1 · q1(h2), q1 q2) checked by hand-unpacking.
        let g = FamilyGroup::new(3, 3).unwrap();
        for (x, y) in [(5u32, 4000u32), (1234, 6000), (6560, 6560), (81, 9)] {
            let (ex, ey) = (g.decode(x), g.decode(y));
            let ma = g.action_on_a(ex.i, ex.j);
            let md = g.action_on_dual(ex.i, ex.j);
            let mut ta = [0u32; 3];
            let mut tu = [0u32; 3];
            ma.apply(&ey.a, &mut ta);
            md.apply(&ey.u, &mut tu);
            let expect = FamilyElem {
                a: (0..3).map(|k| (ex.a[k] + ta[k]) % 3).collect(),
                u: (0..3).map(|k| (ex.u[k] + tu[k]) % 3).collect(),
                i: (ex.i + ey.i) % 3,
                j: (ex.j + ey.j) % 3,
            };
            assert_eq!(g.decode(g.mul(x, y)), expect);
            assert_eq!(g.mul(x, g.inv(x)), 0);
        }
    }

    #[test]
    fn dual_action_preserves_pairing() {
        // ⟨q(u), q(a)⟩ = ⟨u, a⟩ for the diagonal action.
        let g = FamilyGroup::new(5, 4).unwrap();
        let a = [1u32, 2, 3, 4];
        let u = [4u32, 0, 2, 1];
        for i in 0..5 {
            for j in 0..5 {
                let mut qa = [0u32; 4];
                let mut qu = [0u32; 4];
                g.action_on_a(i, j).apply(&a, &mut qa);
                g.action_on_dual(i, j).apply(&u, &mut qu);
                let lhs: u32 = (0..4).map(|k| qa[k] * qu[k]).sum::<u32>() % 5;
                let rhs: u32 = (0..4).map(|k| a[k] * u[k]).sum::<u32>() % 5;
                assert_eq!(lhs, rhs);
            }
        }
    }
}
