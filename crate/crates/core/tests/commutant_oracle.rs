mod support;

use galilean_core::commutant::commutant_basis;
use galilean_core::linalg::{commutator, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::oracle::{bundled_sets, exhaustive_commutant_dim, random_sets, rotated_spectrum};

#[test]
fn bundled_sets_agree_with_exhaustive_solve() {
    let expected = [9, 3, 1];
    for ((name, ops), want) in bundled_sets().into_iter().zip(expected) {
        let vectorized = commutant_basis(&ops).unwrap().len();
        let exhaustive = exhaustive_commutant_dim(&ops);
        assert_eq!(vectorized, exhaustive, "{name}");
        assert_eq!(vectorized, want, "{name}");
    }
}

#[test]
fn random_sets_agree_for_small_dims() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, ops) in random_sets(&mut rng, 6) {
        let vectorized = commutant_basis(&ops).unwrap().len();
        assert_eq!(vectorized, exhaustive_commutant_dim(&ops), "{name}");
    }
}

#[test]
fn degenerate_spectrum_gives_sum_of_squares() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let op = rotated_spectrum(&mut rng, &[0.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
    assert_eq!(commutant_basis(&[op.clone()]).unwrap().len(), 4 + 9 + 1);
    assert_eq!(exhaustive_commutant_dim(&[op]), 14);
}

#[test]
fn members_commute_and_are_orthonormal() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ops = vec![rotated_spectrum(&mut rng, &[1.0, 1.0, 2.0, 2.0, 3.0])];
    let basis = commutant_basis(&ops).unwrap();
    for (a, x) in basis.members().iter().enumerate() {
        assert!(x.is_hermitian());
        for c in &ops {
            let r = commutator(x, c).unwrap().frobenius_norm();
            assert!(r <= 1e-8 * x.frobenius_norm() * c.frobenius_norm(), "{r}");
        }
        for (b, y) in basis.members().iter().enumerate() {
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((x.trace_inner(y) - C64::new(want, 0.0)).norm() < 1e-10);
        }
    }
}
