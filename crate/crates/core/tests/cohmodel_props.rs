use hre_core::cohmodel::QuotientModel;
use hre_core::gf2poly::{Gf2Poly, Monomial};
use proptest::prelude::*;

/// All exponent vectors over `n` generators with weighted degree `degree`.
fn monomials_of_degree(n: usize, degree: u64) -> Vec<Monomial> {
    fn rec(i: usize, n: usize, left: u64, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if i == n {
            if left == 0 {
                out.push(Monomial::new(cur.clone()));
            }
            return;
        }
        let w = i as u64 + 1;
        for e in 0..=left / w {
            cur.push(e as u16);
            rec(i + 1, n, left - e * w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, degree, &mut Vec::new(), &mut out);
    out
}

#[test]
fn pure_power_detection_is_exact_for_small_models() {
    for d in 2..=4u64 {
        for k in [2u64, 4] {
            let model = QuotientModel::new(d, k).unwrap();
            let n = model.num_generators();
            for j in 0..d {
                let basis = monomials_of_degree(n, (k - 1) * j);
                let pure = model.top_generator_power(j);
                assert!(basis.contains(&pure));
                assert!(basis.len() <= 16, "basis too large for exhaustive search");
                for mask in 0u32..(1 << basis.len()) {
                    let p = Gf2Poly::from_monomials(
                        n,
                        basis
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask >> i & 1 == 1)
                            .map(|(_, m)| m.clone()),
                    );
                    assert_eq!(
                        model.detect_pure_power(&p, j).unwrap(),
                        p.contains(&pure),
                        "d={d} k={k} j={j} p={p}"
                    );
                }
            }
        }
    }
}

#[test]
fn only_the_pure_power_survives_in_top_degree() {
    for d in 2..=6u64 {
        for k in [2u64, 4, 8] {
            let model = QuotientModel::new(d, k).unwrap();
            let survivors: Vec<_> = monomials_of_degree(model.num_generators(), model.top_degree())
                .into_iter()
                .filter(|m| !model.vanishes(m).unwrap())
                .collect();
            assert_eq!(survivors, vec![model.top_generator_power(d - 1)]);
        }
    }
}

fn model_poly(n: usize) -> impl Strategy<Value = Gf2Poly> {
    prop::collection::vec(prop::collection::vec(0u16..5, n), 0..10)
        .prop_map(move |e| Gf2Poly::from_monomials(n, e.into_iter().map(Monomial::new)))
}

proptest! {
    #[test]
    fn reduction_is_linear_and_idempotent(d in 2u64..6, a in model_poly(3), b in model_poly(3)) {
        let model = QuotientModel::new(d, 4).unwrap();
        let ra = model.reduce(&a).unwrap();
        prop_assert_eq!(model.reduce(&ra).unwrap(), ra.clone());
        let rb = model.reduce(&b).unwrap();
        let sum = model.reduce(&a.add(&b).unwrap()).unwrap();
        prop_assert_eq!(sum, ra.add(&rb).unwrap());
    }
}
