//! Cross-module invariants, exercised with proptest where randomization buys
//! coverage and with exhaustive loops where the space is small enough.

use std::sync::OnceLock;

use num::{BigInt, BigRational, Zero};
use proptest::prelude::*;

use cloneplan::assignment::{Assignment, ShapeVector};
use cloneplan::moments::{g_table, variance_uniform, variance_via_yd};
use cloneplan::search::{enumerate_balanced, EnumerationBudget};
use cloneplan::shapes::{decompose, delta_variance, kernel_basis, proximal_shape, KernelVector};

const POOL: [(usize, usize, usize, usize); 5] =
    [(4, 2, 2, 4), (6, 2, 2, 6), (6, 3, 2, 4), (5, 3, 3, 5), (6, 3, 3, 6)];

fn enumerated(idx: usize) -> &'static (Vec<Assignment>, Vec<ShapeVector>) {
    static CACHE: OnceLock<Vec<(Vec<Assignment>, Vec<ShapeVector>)>> = OnceLock::new();
    &CACHE.get_or_init(|| {
        POOL.iter()
            .map(|&(n, k, r, c)| {
                let (all, stats) =
                    enumerate_balanced(n, k, r, c, &EnumerationBudget::default()).unwrap();
                assert!(stats.complete);
                let mut shapes: Vec<ShapeVector> =
                    all.iter().map(|a| a.shape_vector()).collect();
                shapes.sort();
                shapes.dedup();
                (all, shapes)
            })
            .collect()
    })[idx]
}

proptest! {
    /// Every assignment the enumerator produces satisfies both shape-vector
    /// constraint sums.
    #[test]
    fn shape_sums_hold_for_enumerated_assignments(
        pool_idx in 0..POOL.len(),
        pick in any::<prop::sample::Index>(),
    ) {
        let (all, _) = enumerated(pool_idx);
        let a = &all[pick.index(all.len())];
        let h = a.shape_vector();
        let total: u64 = h.counts().iter().sum();
        prop_assert_eq!(total, (a.n() * (a.n() - 1) / 2) as u64);
        let weighted: u64 = h.counts().iter().enumerate().map(|(m, &v)| m as u64 * v).sum();
        prop_assert_eq!(weighted, (a.c() * a.k() * (a.k() - 1) / 2) as u64);
    }

    /// decompose is a two-sided inverse of building a vector from basis
    /// coefficients.
    #[test]
    fn decompose_reconstructs_coefficients(
        r in 2usize..=8,
        raw in prop::collection::vec(-20i64..=20, 7),
    ) {
        let alpha = &raw[..r - 1];
        let basis = kernel_basis(r).unwrap();
        let mut entries = vec![0i64; r + 1];
        for (a, h) in alpha.iter().zip(&basis) {
            for (e, b) in entries.iter_mut().zip(h.entries()) {
                *e += a * b;
            }
        }
        let v = KernelVector::new(entries).unwrap();
        prop_assert_eq!(decompose(&v).unwrap(), alpha.to_vec());
    }

    /// The kernel-weighted g sum equals the exact variance difference between
    /// any two realizable shapes, at every subset size.
    #[test]
    fn delta_variance_matches_direct_difference(
        pool_idx in 0..POOL.len(),
        pick_a in any::<prop::sample::Index>(),
        pick_b in any::<prop::sample::Index>(),
        pick_x in any::<prop::sample::Index>(),
    ) {
        let (_, shapes) = enumerated(pool_idx);
        let h1 = &shapes[pick_a.index(shapes.len())];
        let h2 = &shapes[pick_b.index(shapes.len())];
        let c = h1.c();
        let x = pick_x.index(c + 1);
        let v = KernelVector::between(h2, h1).unwrap();
        let g = g_table(c, h1.r(), x).unwrap();
        let delta = delta_variance(&v, c, x, &g).unwrap();
        let direct = variance_uniform(h2, x).unwrap() - variance_uniform(h1, x).unwrap();
        prop_assert_eq!(delta, direct);
    }

    /// The pair-frequency route to the x=2 variance agrees with the direct
    /// formula on every realizable shape.
    #[test]
    fn yd_route_equals_direct_variance(
        pool_idx in 0..POOL.len(),
        pick in any::<prop::sample::Index>(),
    ) {
        let (_, shapes) = enumerated(pool_idx);
        let h = &shapes[pick.index(shapes.len())];
        prop_assert_eq!(variance_via_yd(h).unwrap(), variance_uniform(h, 2).unwrap());
    }

    /// Exact rational arithmetic: field laws hold bit-for-bit (no precision
    /// loss through any ordering of operations).
    #[test]
    fn rational_arithmetic_is_exact(
        a in (-1000i64..1000, 1i64..100),
        b in (-1000i64..1000, 1i64..100),
        c in (-1000i64..1000, 1i64..100),
    ) {
        let q = |(num, den): (i64, i64)| BigRational::new(BigInt::from(num), BigInt::from(den));
        let (a, b, c) = (q(a), q(b), q(c));
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        prop_assert_eq!(&a + &b, &b + &a);
        // round-trip through components
        let back = BigRational::new(a.numer().clone(), a.denom().clone());
        prop_assert_eq!(back, a);
    }

    /// Assignments survive the JSON round trip.
    #[test]
    fn assignment_json_round_trip(n in 2usize..=10, k in 1usize..=10) {
        let k = k.min(n);
        let a = Assignment::cyclic(n, k).unwrap();
        let back = Assignment::from_json(&a.to_json()).unwrap();
        prop_assert_eq!(a, back);
    }
}

/// Offsets from a realizable proximally compact shape to any other realizable
/// shape decompose with non-negative basis coefficients.
#[test]
fn offsets_from_proximal_shape_decompose_nonnegatively() {
    for &(n, k, r, c) in &POOL {
        if r < 2 {
            continue;
        }
        let proximal = proximal_shape(n, k, r, c).unwrap().unwrap();
        let (_, shapes) = enumerated(
            POOL.iter().position(|&i| i == (n, k, r, c)).unwrap(),
        );
        if !shapes.contains(&proximal) {
            continue;
        }
        for h in shapes {
            let v = KernelVector::between(h, &proximal).unwrap();
            let alpha = decompose(&v).unwrap();
            assert!(
                alpha.iter().all(|&a| a >= 0),
                "({n},{k},{r},{c}): offset {:?} from proximal has coefficients {alpha:?}",
                v.entries()
            );
        }
    }
}

/// Enumeration is deterministic: two runs produce the identical sequence.
#[test]
fn enumeration_is_deterministic() {
    let budget = EnumerationBudget::default();
    let (first, _) = enumerate_balanced(6, 3, 2, 4, &budget).unwrap();
    let (second, _) = enumerate_balanced(6, 3, 2, 4, &budget).unwrap();
    assert_eq!(first, second);
}

/// g tables stay non-negative on the overlaps a pair can actually have.
#[test]
fn g_nonnegative_on_valid_overlaps() {
    for c in 1..=8usize {
        for r in 1..=c {
            for x in 0..=c {
                let table = g_table(c, r, x).unwrap();
                for m in (2 * r).saturating_sub(c)..=r {
                    assert!(
                        !num::Signed::is_negative(table.value(m)),
                        "g({m},{x}) < 0 at c={c} r={r}"
                    );
                }
            }
        }
    }
}

/// Variance vanishes identically at the degenerate subset sizes.
#[test]
fn variance_zero_at_degenerate_x() {
    for pool_idx in 0..POOL.len() {
        let (_, shapes) = enumerated(pool_idx);
        for h in shapes {
            assert!(variance_uniform(h, 0).unwrap().is_zero());
            assert!(variance_uniform(h, 1).unwrap().is_zero());
            for x in (h.c() - h.r() + 1)..=h.c() {
                assert!(
                    variance_uniform(h, x).unwrap().is_zero(),
                    "x={x} shape {:?}",
                    h.counts()
                );
            }
        }
    }
}
