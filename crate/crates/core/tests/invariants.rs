//! Property tests against small independent oracles.

use std::sync::Arc;

use isotropy_core::cocycle::{alternating_form, is_nondegenerate, isotropy_test, ScanMode, TwoCocycle};
use isotropy_core::cohomology::{h2_representatives, Coefficients};
use isotropy_core::group::{abelian_group, digits, subgroup_generated, SubgroupSet};
use isotropy_core::iyb::{cocycle_from_one_cocycle, roundtrip_residual, AbelianModule, OneCocycle};
use isotropy_core::search::guaranteed_tower_depth;
use isotropy_core::{FiniteGroup, Limits};
use proptest::prelude::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Determinant over F_p by cofactor expansion (matrices here are ≤ 3×3).
fn det_mod(m: &[Vec<i64>], p: i64) -> i64 {
    let n = m.len();
    if n == 1 {
        return m[0][0].rem_euclid(p);
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &v)| v).collect())
                .collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det_mod(&minor, p)
        })
        .sum::<i64>()
        .rem_euclid(p)
}

/// `c(x, y) = Σ b_ij x_i y_j` on an elementary abelian group.
fn bilinear(g: &Arc<FiniteGroup>, p: u32, n: usize, b: &[u32]) -> TwoCocycle {
    let radices = vec![p; n];
    let ord = g.order() as usize;
    let vals: Vec<i64> = (0..ord * ord)
        .map(|idx| {
            let x = digits((idx / ord) as u32, &radices);
            let y = digits((idx % ord) as u32, &radices);
            let mut s = 0u64;
            for i in 0..n {
                for j in 0..n {
                    s += (b[i * n + j] * x[i] * y[j]) as u64;
                }
            }
            (s % p as u64) as i64
        })
        .collect();
    TwoCocycle::from_table(g.clone(), p as u64, &vals).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Schur multiplier of Z_a × Z_b is Z_gcd(a,b); its m-torsion has order gcd(a, b, m).
    #[test]
    fn h2_of_two_cyclic_factors(a in 2u32..7, b in 2u32..7, m in 2u64..7) {
        let g = Arc::new(abelian_group(&[a, b]).unwrap());
        let basis = h2_representatives(g, m, Coefficients::RootsOfUnity, &Limits::default()).unwrap();
        prop_assert_eq!(basis.order(), gcd(gcd(a as u64, b as u64), m));
    }

    /// The form of a bilinear cocycle is `b − bᵀ`; nondegenerate iff that matrix is invertible.
    #[test]
    fn bilinear_nondegeneracy_matches_determinant(b in proptest::collection::vec(0u32..3, 4)) {
        let p = 3u32;
        let g = Arc::new(abelian_group(&[p, p]).unwrap());
        let c = bilinear(&g, p, 2, &b);
        c.validate(0).unwrap();
        let skew: Vec<Vec<i64>> = (0..2)
            .map(|i| (0..2).map(|j| b[i * 2 + j] as i64 - b[j * 2 + i] as i64).collect())
            .collect();
        let v = is_nondegenerate(&c, &Limits::default(), ScanMode::Exhaustive).unwrap();
        prop_assert_eq!(v.nondegenerate, det_mod(&skew, p as i64) != 0);
    }

    /// Coboundaries are isotropic on every subgroup, and their form vanishes.
    #[test]
    fn coboundaries_are_isotropic(f in proptest::collection::vec(0i64..5, 25), gen in 1u32..25) {
        let g = Arc::new(abelian_group(&[5, 5]).unwrap());
        let mut f = f;
        f[0] = 0;
        let c = TwoCocycle::coboundary(g.clone(), 5, &f).unwrap();
        c.validate(0).unwrap();
        for x in g.elements() {
            prop_assert_eq!(alternating_form(&c, x, gen), 0);
        }
        let whole = SubgroupSet::whole(&g, &Limits::default()).unwrap();
        let verdict = isotropy_test(&c, &whole, &Limits::default()).unwrap();
        prop_assert!(verdict.isotropic);
        prop_assert!(verdict.witness.unwrap().verify(&c));
    }

    /// Trivial-action 1-cocycles are homomorphisms `Q → Â`; bijective iff the matrix is
    /// invertible, and the round trip recovers them.
    #[test]
    fn iyb_bijective_iff_invertible(m in proptest::collection::vec(0u32..3, 4)) {
        let p = 3u32;
        let radices = vec![p; 2];
        let q = Arc::new(abelian_group(&radices).unwrap());
        let md = AbelianModule::trivial_action(radices.clone(), q.order() as usize);
        let vals: Vec<Vec<u32>> = q
            .elements()
            .map(|x| {
                let v = digits(x, &radices);
                (0..2).map(|i| (0..2).map(|j| m[i * 2 + j] * v[j]).sum::<u32>() % p).collect()
            })
            .collect();
        let pi = OneCocycle::new(q, md, vals.clone(), None).unwrap();
        let mat: Vec<Vec<i64>> = (0..2).map(|i| (0..2).map(|j| m[i * 2 + j] as i64).collect()).collect();
        prop_assert_eq!(pi.is_bijective(), det_mod(&mat, 3) != 0);
        let (sd, c) = cocycle_from_one_cocycle(&pi, &Limits::default()).unwrap();
        let v = is_nondegenerate(&c, &Limits::default(), ScanMode::ClassRepresentatives).unwrap();
        prop_assert_eq!(v.nondegenerate, pi.is_bijective());
        let rt = roundtrip_residual(&sd, &c, &Limits::default()).unwrap();
        prop_assert_eq!(rt.pi_recovered, vals);
    }

    /// Cyclic subgroups have the order of their generator.
    #[test]
    fn cyclic_subgroup_order(x in 0u32..36) {
        let g = abelian_group(&[4, 9]).unwrap();
        let h = subgroup_generated(&g, &[x], &Limits::default()).unwrap();
        prop_assert_eq!(h.order(), g.elem_order(x));
    }
}

#[test]
fn tower_depth_formula() {
    // Largest i with (i² + i − 2)/2 < m, by direct search.
    for m in 1..40u32 {
        let oracle = (0..20u32).filter(|&i| (i * i + i).saturating_sub(2) < 2 * m).max().unwrap();
        assert_eq!(guaranteed_tower_depth(m), oracle, "m = {m}");
    }
}
