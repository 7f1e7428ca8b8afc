mod common;

use common::*;
use proptest::prelude::*;
use qfilter_core::pauli::count_up_to_weight;
use qfilter_core::{enumerate_paulis, Pauli, PauliString};

#[test]
fn text_form_matches_matrices() {
    assert!(close(&matrix(&p("X").multiply(&p("Z")).unwrap()), &(matrix(&p("X")) * matrix(&p("Z")))));
    assert_eq!(p("X").multiply(&p("Z")).unwrap().to_string(), "-iY");
    assert_eq!(p("Z").multiply(&p("X")).unwrap().to_string(), "+iY");
}

proptest! {
    #[test]
    fn product_matches_matrix_oracle(a in arb_pauli(3), b in arb_pauli(3)) {
        let ab = a.multiply(&b).unwrap();
        prop_assert!(close(&matrix(&ab), &(matrix(&a) * matrix(&b))));
    }

    #[test]
    fn commutation_matches_matrix_oracle(a in arb_pauli(3), b in arb_pauli(3)) {
        let (ma, mb) = (matrix(&a), matrix(&b));
        prop_assert_eq!(a.commutes(&b).unwrap(), close(&(&ma * &mb), &(&mb * &ma)));
    }

    #[test]
    fn associative(a in arb_pauli(70), b in arb_pauli(70), c in arb_pauli(70)) {
        let l = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let r = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn unsigned_squares_to_identity(a in arb_pauli(70)) {
        let u = a.unsigned();
        prop_assert!(u.multiply(&u).unwrap().is_identity());
        prop_assert!(a.multiply(&a).unwrap().is_identity_up_to_phase());
    }

    #[test]
    fn commutation_is_symmetric_and_sign_consistent(a in arb_pauli(70), b in arb_pauli(70)) {
        let ab = a.multiply(&b).unwrap();
        let ba = b.multiply(&a).unwrap();
        prop_assert_eq!(a.commutes(&b).unwrap(), b.commutes(&a).unwrap());
        if a.commutes(&b).unwrap() {
            prop_assert_eq!(ab, ba);
        } else {
            prop_assert_eq!(ab.unsigned(), ba.unsigned());
            prop_assert_eq!(ab.phase_exp(), (ba.phase_exp() + 2) % 4);
        }
    }

    #[test]
    fn text_round_trip(a in arb_pauli(9)) {
        let back: PauliString = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn weight_and_type_count(a in arb_pauli(70)) {
        let tc = a.type_count();
        prop_assert_eq!(tc.weight(), a.weight());
        let letters = a.letters();
        prop_assert_eq!(tc.y_count, letters.iter().filter(|l| **l == Pauli::Y).count());
    }

    #[test]
    fn embed_restrict_round_trip(a in arb_pauli(3)) {
        let e = a.embed(7, &[5, 1, 3]).unwrap();
        prop_assert_eq!(e.weight(), a.weight());
        prop_assert_eq!(e.restrict(&[5, 1, 3]), a.clone());
    }
}

#[test]
fn enumeration_counts_and_order() {
    for n in 1..=4 {
        for k in 0..=n {
            let all: Vec<_> = enumerate_paulis(n, Some(k)).unwrap().collect();
            assert_eq!(all.len() as u128, count_up_to_weight(n, k).unwrap());
            assert!(all.windows(2).all(|w| w[0] < w[1]));
            assert!(all.iter().all(|q| q.weight() <= k && q.is_identity_up_to_phase() == (q.weight() == 0)));
        }
    }
    // the wide path agrees with the packed one on the overlap
    let wide: Vec<_> = enumerate_paulis(12, Some(1)).unwrap().collect();
    assert_eq!(wide.len(), 1 + 3 * 12);
    assert!(wide.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn mismatched_sizes_are_errors() {
    assert!(p("XX").multiply(&p("X")).is_err());
    assert!(p("XX").commutes(&p("X")).is_err());
    assert!("XQ".parse::<PauliString>().is_err());
}
