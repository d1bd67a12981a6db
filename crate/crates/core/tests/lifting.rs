use fibercover::cover::*;
use fibercover::perm::Perm;
use fibercover::quotient::cases::{cut_data_from_action, template, CaseTag};
use fibercover::slope::Slope;
use fibercover::word::{TwistGen, TwistWord};
use proptest::prelude::*;

fn perm_strategy(d: usize) -> impl Strategy<Value = Perm> {
    Just((0..d).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Perm::from_images(v).unwrap())
}

fn slope_strategy() -> impl Strategy<Value = Slope> {
    (-12i64..=12, -12i64..=12).prop_filter_map("coprime", |(m, l)| Slope::new(m, l).ok())
}

/// Words whose `D_y` exponents are multiples of `n`.
fn word_strategy(n: i64) -> impl Strategy<Value = TwistWord> {
    prop::collection::vec((-3i64..=3, -2i64..=2), 1..4).prop_map(move |v| {
        TwistWord::new(
            v.into_iter()
                .flat_map(|(r, s)| [(TwistGen::X, r), (TwistGen::Y, s * n)]),
        )
    })
}

fn random_perm(rng: &mut impl rand::Rng, d: usize) -> Perm {
    use rand::seq::SliceRandom;
    let mut v: Vec<usize> = (0..d).collect();
    v.shuffle(rng);
    Perm::from_images(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn condition_iii_matches_surgery_lift(
        d in 1usize..=8,
        seed in any::<u64>(),
        case in prop::sample::select(vec![(CaseTag::C1, 4usize), (CaseTag::C2a, 5), (CaseTag::C3a, 6)]),
        s in slope_strategy(),
        r in -6i64..=6,
    ) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (_, sigma) = template(case.0, case.1).unwrap();
        let images = vec![random_perm(&mut rng, d), random_perm(&mut rng, d)];
        let c = cut_data_from_action(&sigma, &images).unwrap();
        let Ok(rep) = build_rep(&c) else { return Ok(()) };
        let word = TwistWord::new([(TwistGen::X, r), (TwistGen::Y, case.1 as i64)]);
        let tau = canonical_intertwiner(&c, &word).unwrap();
        prop_assert!(tau.intertwines(&rep, &rep.pullback(&word)));
        prop_assert_eq!(check_condition_iii(&c, r, s), surgery_lifts(&rep, &tau, s));
    }

    #[test]
    fn structured_i_ii_give_lifts(
        d in 1usize..=8,
        blocks in prop::collection::vec((any::<u64>(), 1usize..=3), 1..=3),
        shift in -3i64..=3,
        r in -3i64..=3,
    ) {
        // Rows built from blocks (c^e1, .., c^ek) with Σe = 0: I and II hold.
        use rand::{Rng, SeedableRng, seq::SliceRandom};
        let mut sigma = Vec::new();
        for (seed, k) in blocks {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut v: Vec<usize> = (0..d).collect();
            v.shuffle(&mut rng);
            let c = Perm::from_images(v).unwrap();
            let mut exps: Vec<i64> = (1..k).map(|_| rng.gen_range(-3..=3)).collect();
            exps.push(-exps.iter().sum::<i64>());
            sigma.extend(exps.into_iter().map(|e| c.pow(e)));
        }
        sigma.truncate(6);
        let n = sigma.len() as i64;
        let c = CutData::new(d, sigma).unwrap();
        let (ci, cii) = check_condition_i_ii(&c);
        let Ok(rep) = build_rep(&c) else { return Ok(()) };
        if ci && cii {
            let word = TwistWord::new([(TwistGen::X, r), (TwistGen::Y, n * shift), (TwistGen::X, 1)]);
            let taus = find_intertwiners_for_word(&rep, &word);
            prop_assert!(!taus.is_empty());
            prop_assert_eq!(taus.len(), deck_group(&rep).len());
        }
    }

    #[test]
    fn conditions_i_ii_give_lifts(
        sigma in (1usize..=6, 1usize..=5).prop_flat_map(|(n, d)| prop::collection::vec(perm_strategy(d), n)),
        words in prop::collection::vec(word_strategy(1), 1..3),
    ) {
        let n = sigma.len() as i64;
        let d = sigma[0].degree();
        let c = CutData::new(d, sigma).unwrap();
        let (ci, cii) = check_condition_i_ii(&c);
        let Ok(rep) = build_rep(&c) else { return Ok(()) };
        if ci && cii {
            for w in words {
                // Scale the D_y exponents to multiples of the row count.
                let word = TwistWord::new(w.blocks().iter().map(|&(g, e)| match g {
                    TwistGen::Y => (g, e * n),
                    TwistGen::X => (g, e),
                }));
                prop_assert!(!find_intertwiners_for_word(&rep, &word).is_empty(), "{}", word);
            }
        }
    }
}
