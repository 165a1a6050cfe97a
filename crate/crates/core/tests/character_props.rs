use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use psigma::character::{Character, SignClass};
use psigma::freegroup::PureSymAut;

fn character(n: usize, lo: i64, hi: i64) -> impl Strategy<Value = Character> {
    prop::collection::vec(lo..=hi, n * (n - 1)).prop_map(move |vals| {
        let mut it = vals.into_iter();
        Character::from_integers(n, |_, _| it.next().unwrap())
    })
}

fn product(n: usize) -> impl Strategy<Value = PureSymAut> {
    prop::collection::vec((1..=n, 1..=n, any::<bool>()), 0..10).prop_map(move |steps| {
        let mut acc = PureSymAut::identity(n);
        for (i, j, inv) in steps.into_iter().filter(|s| s.0 != s.1) {
            let mut g = PureSymAut::elementary(i, j, n).unwrap();
            if inv {
                g = g.inverse().unwrap();
            }
            acc = acc.compose(&g).unwrap();
        }
        acc
    })
}

/// Exhaustive search over all sign vectors.
fn brute_generic(c: &Character) -> bool {
    let vals = c.off_diagonal();
    let k = vals.len();
    (1..3usize.pow(k as u32)).all(|mut code| {
        let mut s = BigRational::zero();
        for v in &vals {
            match code % 3 {
                1 => s += v,
                2 => s -= v,
                _ => {}
            }
            code /= 3;
        }
        !s.is_zero()
    })
}

fn scale(c: &Character, q: &BigRational) -> Character {
    Character::from_fn(c.rank(), |i, j| c.get(i, j) * q)
}

proptest! {
    #[test]
    fn genericity_matches_brute_force(c in character(3, -4, 4)) {
        prop_assert_eq!(c.is_generic().unwrap(), brute_generic(&c));
    }

    #[test]
    fn genericity_survives_antipode_and_scaling(c in character(3, -9, 9), num in 1i64..20, den in 1i64..20) {
        let q = BigRational::new(BigInt::from(num), BigInt::from(den));
        let g = c.is_generic().unwrap();
        prop_assert_eq!(c.antipode().is_generic().unwrap(), g);
        prop_assert_eq!(scale(&c, &q).is_generic().unwrap(), g);
    }

    #[test]
    fn antipode_swaps_sign_classes(c in character(3, -3, 3)) {
        prop_assume!(!c.is_trivial());
        let swapped = match c.classify().unwrap() {
            SignClass::Positive => SignClass::Negative,
            SignClass::Negative => SignClass::Positive,
            SignClass::Mixed => SignClass::Mixed,
        };
        prop_assert_eq!(c.antipode().classify().unwrap(), swapped);
        prop_assert_eq!(c.antipode().antipode(), c);
    }

    #[test]
    fn evaluation_is_a_homomorphism(c in character(3, -20, 20), a in product(3), b in product(3)) {
        let ab = a.compose(&b).unwrap();
        prop_assert_eq!(c.evaluate(&ab).unwrap(), c.evaluate(&a).unwrap() + c.evaluate(&b).unwrap());
        prop_assert_eq!(c.evaluate(&a.inverse().unwrap()).unwrap(), -c.evaluate(&a).unwrap());
        prop_assert_eq!(c.antipode().evaluate(&a).unwrap(), -c.evaluate(&a).unwrap());
    }

    #[test]
    fn random_generic_is_generic(n in 2usize..=6, seed in any::<u64>()) {
        let c = Character::random_generic(n, seed).unwrap();
        prop_assert_eq!(c.rank(), n);
        if n <= 4 {
            prop_assert!(c.is_generic().unwrap());
        }
        prop_assert!(c.column_generic());
    }

    #[test]
    fn json_round_trip(c in character(4, -50, 50), den in 1i64..9) {
        let c = scale(&c, &BigRational::new(BigInt::from(1), BigInt::from(den)));
        let text = serde_json::to_string(&c).unwrap();
        prop_assert_eq!(serde_json::from_str::<Character>(&text).unwrap(), c);
    }
}
