use modeloids::efgames::{
    build_category_d, certificate_from, ef_equiv_derivative, ef_equiv_oracle, extract_certificate, verify_certificate,
    BackAndForthCertificate, Bounds,
};
use modeloids::random;
use modeloids::structfmt::{enumerate_partial_isos, parse_structures, print_structures, Structure};
use proptest::prelude::*;

fn pair(seed: u64, max_universe: usize) -> (Structure, Structure) {
    random::structure_pair(&mut random::rng(seed), &random::edge_and_constant(), max_universe)
}

#[test]
fn pure_set_law() {
    let bounds = Bounds::default();
    for p in 1..=3 {
        for q in 1..=3 {
            let (a, b) = (
                Structure::pure_set("A", p).unwrap(),
                Structure::pure_set("B", q).unwrap(),
            );
            let d = build_category_d(&a, &b, &bounds).unwrap();
            for (m, verdict) in d.verdicts(4).into_iter().enumerate() {
                let law = p == q || p.min(q) >= m;
                assert_eq!(ef_equiv_oracle(&a, &b, m, &bounds).unwrap(), law, "{p} {q} {m}");
                assert_eq!(verdict.equivalent, law, "{p} {q} {m}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn derivative_and_game_agree(seed in any::<u64>()) {
        let (a, b) = pair(seed, 3);
        let bounds = Bounds::default();
        let d = build_category_d(&a, &b, &bounds).unwrap();
        let verdicts = d.verdicts(3);
        for (m, verdict) in verdicts.iter().enumerate() {
            prop_assert_eq!(verdict.equivalent, ef_equiv_oracle(&a, &b, m, &bounds).unwrap(), "m = {}", m);
        }
        // Equivalence only gets harder with more rounds.
        for w in verdicts.windows(2) {
            prop_assert!(w[0].equivalent || !w[1].equivalent);
        }
    }

    #[test]
    fn equivalence_is_symmetric_and_reflexive(seed in any::<u64>()) {
        let (a, b) = pair(seed, 3);
        let bounds = Bounds::default();
        for m in 0..=2 {
            let forward = ef_equiv_derivative(&a, &b, m, &bounds).unwrap().equivalent;
            let backward = ef_equiv_derivative(&b, &a, m, &bounds).unwrap().equivalent;
            prop_assert_eq!(forward, backward);
            prop_assert!(ef_equiv_derivative(&a, &a.renamed("A2"), m, &bounds).unwrap().equivalent);
            prop_assert!(ef_equiv_oracle(&a, &a, m, &bounds).unwrap());
        }
    }

    #[test]
    fn certificates_are_sound(seed in any::<u64>()) {
        let (a, b) = pair(seed, 3);
        let bounds = Bounds::default();
        let d = build_category_d(&a, &b, &bounds).unwrap();
        let chain = d.derivative_chain(3);
        for m in 0..=3 {
            let prefix = modeloids::DerivativeChain {
                terms: chain.terms[..=m].to_vec(),
                stabilized_at: None,
            };
            let extracted = certificate_from(&d, &prefix);
            prop_assert_eq!(&extracted, &extract_certificate(&a, &b, m, &bounds).unwrap());
            match extracted {
                Some(cert) => {
                    prop_assert_eq!(verify_certificate(&a, &b, &cert), Ok(()));
                    prop_assert!(ef_equiv_oracle(&a, &b, m, &bounds).unwrap());
                }
                None => prop_assert!(!ef_equiv_oracle(&a, &b, m, &bounds).unwrap()),
            }
            // Offering every partial isomorphism at every level is accepted only when
            // the structures really are equivalent.
            let part = enumerate_partial_isos(&a, &b, 7).unwrap();
            let naive = BackAndForthCertificate { rounds: m, levels: vec![part; m + 1] };
            if verify_certificate(&a, &b, &naive).is_ok() {
                prop_assert!(ef_equiv_oracle(&a, &b, m, &bounds).unwrap());
            }
        }
    }

    #[test]
    fn structure_text_round_trip(seed in any::<u64>()) {
        let (a, b) = pair(seed, 4);
        let text = print_structures(a.vocabulary(), &[a.clone(), b.clone()]);
        let file = parse_structures(&text).unwrap();
        prop_assert_eq!(&file.structures, &vec![a, b]);
    }
}
