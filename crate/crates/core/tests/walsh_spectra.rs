use kasami_core::gf2n::{FieldCtx, FieldElement};
use kasami_core::quadform::{
    is_admissible_k, radical_by_definition, radical_map, rank_spectrum, spectrum_distribution,
    symplectic_rank, walsh_point, walsh_spectrum, QuadFormParams,
};
use kasami_core::theory::{predict, PredictionName};
use kasami_core::Tally;
use proptest::prelude::*;

fn admissible(n: u32) -> Vec<u32> {
    (1..n).filter(|&k| is_admissible_k(n, k)).collect()
}

#[test]
fn kernel_of_radical_map_is_the_radical() {
    let ctx = FieldCtx::new(4).unwrap();
    for k in admissible(4) {
        for b in ctx.elements() {
            for c in ctx.subfield_elements() {
                let p = QuadFormParams::new(&ctx, k, b, c).unwrap();
                let from_map: Vec<FieldElement> = ctx
                    .elements()
                    .filter(|&z| radical_map(&p, z).is_zero())
                    .collect();
                assert_eq!(from_map, radical_by_definition(&p), "b={b} c={c} k={k}");
            }
        }
    }
}

#[test]
fn every_spectrum_has_the_shape_its_rank_predicts() {
    for n in [4, 6] {
        let ctx = FieldCtx::new(n).unwrap();
        for k in admissible(n) {
            for b in ctx.elements() {
                for c in ctx.subfield_elements() {
                    if b.is_zero() && c.is_zero() {
                        continue;
                    }
                    let p = QuadFormParams::new(&ctx, k, b, c).unwrap();
                    let r = symplectic_rank(&p).unwrap();
                    assert!(r == n || r == n - 2 || b.is_zero(), "rank {r}");
                    let got = walsh_spectrum(&p).distribution().to_exact();
                    assert_eq!(got, rank_spectrum(n, r));
                }
            }
        }
    }
}

#[test]
fn aggregate_distribution_at_n8() {
    let ctx = FieldCtx::new(8).unwrap();
    let e: Vec<FieldElement> = ctx.elements().collect();
    let f = ctx.subfield_elements();
    for k in [1, 3] {
        let got = spectrum_distribution(&ctx, k, &e, &f, &e, 1).unwrap();
        assert_eq!(
            got,
            predict(PredictionName::WalshAll, 8, k).unwrap().histogram
        );
    }
}

#[test]
fn subfield_coefficients_outside_f_are_rejected() {
    let ctx = FieldCtx::new(6).unwrap();
    let not_in_f = ctx.alpha();
    assert!(spectrum_distribution(
        &ctx,
        2,
        &[FieldElement::ONE],
        &[not_in_f],
        &[FieldElement::ZERO],
        1
    )
    .is_err());
    assert!(QuadFormParams::new(&ctx, 2, FieldElement::ONE, not_in_f).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_agrees_with_direct_sum_and_parseval(
        n in prop::sample::select(vec![6u32, 8]),
        b in any::<u32>(),
        c in any::<u32>(),
        lambdas in prop::collection::vec(any::<u32>(), 4),
        pick in any::<prop::sample::Index>(),
    ) {
        let ctx = FieldCtx::new(n).unwrap();
        let ks = admissible(n);
        let k = ks[pick.index(ks.len())];
        let b = FieldElement(b % ctx.size() as u32);
        let sub = ctx.subfield_elements();
        let c = sub[c as usize % sub.len()];
        let p = QuadFormParams::new(&ctx, k, b, c).unwrap();
        let spec = walsh_spectrum(&p);
        for l in lambdas {
            let l = FieldElement(l % ctx.size() as u32);
            prop_assert_eq!(spec.at(l), walsh_point(&p, l));
        }
        prop_assert_eq!(spec.parseval_sum(), 1i128 << (2 * n));
        let values = Tally::of(spec.values.iter().copied());
        prop_assert!(values.len() <= 3);
    }
}
