use proptest::prelude::*;
use swr_core::criteria::{compare, Criterion, Verdict};
use swr_core::gen::{self, trial_rng, Domain};
use swr_core::refuter::{check_certificate, refute, RefutationCertificate};

const UNORDERED: [Criterion; 6] = [
    Criterion::ParetoPreorder,
    Criterion::SumPreorder,
    Criterion::FiniteSumPreorder,
    Criterion::CountingPreorder,
    Criterion::SumPlusDifferences,
    Criterion::ConvergentDivergences,
];

fn domain() -> impl Strategy<Value = Domain> {
    prop_oneof![Just(Domain::Indicator), Just(Domain::FiniteValued), Just(Domain::Descriptor)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn swapping_the_pair_flips_the_verdict(seed in any::<u64>(), d in domain()) {
        let (w, v) = gen::pair(&mut trial_rng(seed, 0), d);
        for c in UNORDERED.into_iter().filter(|c| c.accepts(&w, &v)) {
            prop_assert_eq!(compare(c, &w, &v).unwrap().flip(), compare(c, &v, &w).unwrap(), "{}", c);
        }
    }

    #[test]
    fn extensions_keep_every_weak_sum_ranking(seed in any::<u64>(), d in domain()) {
        let (w, v) = gen::pair(&mut trial_rng(seed, 0), d);
        let pareto = compare(Criterion::ParetoPreorder, &w, &v).unwrap();
        let sp = compare(Criterion::SumPreorder, &w, &v).unwrap();
        if pareto.is_comparable() {
            prop_assert_eq!(pareto, sp);
        }
        for c in [Criterion::SumPlusDifferences, Criterion::ConvergentDivergences] {
            if c.accepts(&w, &v) {
                let got = compare(c, &w, &v).unwrap();
                prop_assert!(!sp.forward() || got.forward(), "{} drops w ≽ v", c);
                prop_assert!(!sp.backward() || got.backward(), "{} drops v ≽ w", c);
            }
        }
    }

    #[test]
    fn permutations_invert(seed in any::<u64>(), d in domain()) {
        let mut rng = trial_rng(seed, 0);
        let s = gen::sample(&mut rng, 1, d);
        let refined = gen::refine(&mut rng, &s.worlds, true);
        let pi = gen::cell_permutation(&mut rng, refined[0].population(), true);
        let moved = pi.apply(&refined[0]).unwrap();
        prop_assert_eq!(pi.inverse().apply(&moved).unwrap(), refined[0].clone());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn declined_rankings_have_checkable_certificates(seed in any::<u64>(), indicator in any::<bool>()) {
        let d = if indicator { Domain::Indicator } else { Domain::FiniteValued };
        let (w, v) = gen::pair(&mut trial_rng(seed, 0), d);
        let sp = compare(Criterion::SumPreorder, &w, &v).unwrap();
        let cert = refute(&w, &v);
        if matches!(sp, Verdict::StrictlyWorse | Verdict::Incomparable) {
            let cert = cert.unwrap();
            prop_assert!(check_certificate(&cert).is_ok());
            prop_assert!(cert.targets(&w, &v));
            prop_assert_eq!(RefutationCertificate::from_json(&cert.to_json()).unwrap(), cert);
        } else {
            prop_assert!(cert.is_err());
        }
    }
}
