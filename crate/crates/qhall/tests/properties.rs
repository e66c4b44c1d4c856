use num_bigint::BigInt;
use proptest::prelude::*;
use qhall::canonbasis::{canonical_basis, dual_canonical_basis, order_matrix, positive_offdiag};
use qhall::double::{parse_word, DoubleAlgebra, PbwElt};
use qhall::finrep::{ext_dim, hom_dim, CensusOptions};
use qhall::fp::Mat;
use qhall::hallgen::degrees_upto;
use qhall::iquant::{IExpr, IQuantumGroup};
use qhall::scalars::{interpolate_q, rat_frac, QPolynomial};
use qhall::triangle::{identity, transformed_bar, CorrectionRing, Direction, TriangularProblem};
use qhall::{DiagramInvolution, DynkinType, FqRep, HallAlgebra, KSClass, QuiverShape, Rational, RootDatum, ScalarHalf};
use std::sync::OnceLock;

fn scalar() -> impl Strategy<Value = ScalarHalf> {
    prop::collection::vec((-6i32..=6, -4i64..=4, 1i64..=3), 0..4)
        .prop_map(|ts| ScalarHalf::from_terms(ts.into_iter().map(|(e, n, d)| (e, rat_frac(n, d)))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_ring_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &ScalarHalf::one(), a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn scalar_bar_is_an_involutive_ring_map(a in scalar(), b in scalar()) {
        prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
        prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
        prop_assert_eq!(a.bar().bar(), a);
    }

    #[test]
    fn exact_division_inverts_multiplication(a in scalar(), b in scalar()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
    }

    #[test]
    fn interpolation_recovers_held_out_values(coeffs in prop::collection::vec(-9i64..=9, 1..=5)) {
        let poly = QPolynomial::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect());
        let cap = coeffs.len() - 1;
        let at = |p: u64| Rational::from_integer((p as i64).into());
        let samples: Vec<(Rational, Rational)> = [2u64, 3, 5, 7, 11, 13].iter().take(cap + 1).map(|&p| (at(p), poly.eval(&at(p)))).collect();
        let fit = interpolate_q(&samples, cap).unwrap();
        prop_assert_eq!(fit.eval(&at(23)), poly.eval(&at(23)));
    }

    #[test]
    fn reflections_are_involutions(x in prop::collection::vec(-5i64..=5, 4), i in 0usize..4) {
        let d = RootDatum::new(QuiverShape::default_of(DynkinType::D(4)).unwrap());
        prop_assert_eq!(d.reflect(i, &d.reflect(i, &x)), x.clone());
        // the form is W-invariant
        prop_assert_eq!(d.sym_form(&d.reflect(i, &x), &d.reflect(i, &x)), d.sym_form(&x, &x));
    }
}

#[test]
fn braid_orders_are_coxeter_orders() {
    let cases: Vec<(QuiverShape, Vec<usize>)> = vec![
        (QuiverShape::linear_a(3), vec![2, 1, 0]),
        (QuiverShape::linear_a(5), vec![4, 3, 2, 1, 0]),
        (QuiverShape::linear_a(4), vec![0, 1, 2, 3]),
        (QuiverShape::default_of(DynkinType::D(4)).unwrap(), vec![0, 1, 2, 3]),
        (QuiverShape::default_of(DynkinType::E(6)).unwrap(), (0..6).collect()),
    ];
    for (shape, perm) in cases {
        let d = RootDatum::new(shape.clone());
        let rho = DiagramInvolution::new(perm, &shape.cartan_matrix()).unwrap();
        let reps = rho.orbit_reps();
        for &i in &reps {
            for &j in &reps {
                if i != j {
                    assert!([2, 3, 4, 6].contains(&d.braid_order(&rho, i, j)), "{} {} {}", shape.type_tag(), i, j);
                }
            }
        }
    }
}

fn a2() -> &'static HallAlgebra {
    static H: OnceLock<HallAlgebra> = OnceLock::new();
    H.get_or_init(|| HallAlgebra::new(QuiverShape::linear_a(2)))
}

fn a3() -> &'static HallAlgebra {
    static H: OnceLock<HallAlgebra> = OnceLock::new();
    H.get_or_init(|| HallAlgebra::new(QuiverShape::new(3, vec![(0, 1), (2, 1)]).unwrap()))
}

fn small_classes(h: &HallAlgebra, top: &[i64]) -> Vec<KSClass> {
    degrees_upto(top).iter().flat_map(|d| h.classes(d).iter().cloned().collect::<Vec<_>>()).filter(|c| !c.is_zero()).collect()
}

/// Automorphisms by enumerating all block-diagonal matrices over `F_p`.
fn brute_aut(m: &FqRep) -> u64 {
    let p = m.p;
    let mut choices: Vec<Vec<Mat>> = Vec::new();
    for &d in &m.dims {
        let mut all = Vec::new();
        let n = d * d;
        for code in 0..p.pow(n as u32) {
            let mut g = Mat::zeros(d, d);
            let mut c = code;
            for k in 0..n {
                g.set(k / d.max(1), k % d.max(1), c % p);
                c /= p;
            }
            if d == 0 || g.inverse(p).is_some() {
                all.push(g);
            }
        }
        choices.push(all);
    }
    let mut count = 0;
    let mut idx = vec![0usize; choices.len()];
    'outer: loop {
        let g: Vec<&Mat> = idx.iter().zip(&choices).map(|(&k, c)| &c[k]).collect();
        if m.arrows.iter().zip(&m.maps).all(|(&(s, t), a)| g[t].mul(a, p) == a.mul(g[s], p)) {
            count += 1;
        }
        for k in 0..idx.len() {
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    count
}

#[test]
fn aut_orders_match_brute_force() {
    for h in [a2(), a3()] {
        let table = h.cat.table(2);
        for l in small_classes(h, &vec![2; h.rank()]) {
            if h.cat.total_dim(&l) > 4 {
                continue;
            }
            let m = table.module(&l);
            assert_eq!(h.cat.aut_order(&l, 2), BigInt::from(brute_aut(&m)), "{:?}", l.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn census_totals_and_representative_independence(i in 0usize..64, j in 0usize..64, p in prop::sample::select(vec![2u64, 3, 5])) {
        for h in [a2(), a3()] {
            let cs = small_classes(h, &vec![1; h.rank()]);
            let (x, z) = (&cs[i % cs.len()], &cs[j % cs.len()]);
            let plain = h.cat.ext_census(x, z, p, CensusOptions::default()).unwrap();
            let total: u64 = plain.counts.values().sum();
            prop_assert_eq!(total, p.pow(plain.ext_dim as u32));
            let shuffled = h.cat.ext_census(x, z, p, CensusOptions { perturb: Some((i * 64 + j) as u64), ..Default::default() }).unwrap();
            prop_assert_eq!(plain.counts, shuffled.counts);
        }
    }

    #[test]
    fn hom_minus_ext_is_the_euler_form(i in 0usize..64, j in 0usize..64) {
        for h in [a2(), a3()] {
            let cs = small_classes(h, &vec![2; h.rank()]);
            let (x, z) = (&cs[i % cs.len()], &cs[j % cs.len()]);
            let t = h.cat.table(3);
            let (m, n) = (t.module(x), t.module(z));
            let euler = h.cat.shape().euler_form(&m.dim_vector(), &n.dim_vector());
            prop_assert_eq!(hom_dim(&m, &n) as i64 - ext_dim(&m, &n) as i64, euler);
        }
    }

    #[test]
    fn hall_product_is_associative(i in 0usize..64, j in 0usize..64, k in 0usize..64) {
        let h = a2();
        let cs = small_classes(h, &[1, 1]);
        let (x, y, z) = (h.u(&cs[i % cs.len()]), h.u(&cs[j % cs.len()]), h.u(&cs[k % cs.len()]));
        let left = h.product(&h.product(&x, &y).unwrap(), &z).unwrap();
        let right = h.product(&x, &h.product(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn triangle_output_ignores_the_index_order(perm in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle()) {
        let h = a2();
        let d = [2, 2];
        let classes = h.classes(&d);
        let n = classes.len();
        prop_assume!(perm.len() >= n);
        let perm: Vec<usize> = perm.into_iter().filter(|&k| k < n).collect();
        let less = order_matrix(h, &classes);
        let bar = h.bar_matrix_dual(&d).unwrap();
        let base = TriangularProblem::new(less.clone(), bar.clone(), CorrectionRing::Negative, Direction::Upper).solve().unwrap();
        let pl: Vec<Vec<bool>> = perm.iter().map(|&a| perm.iter().map(|&b| less[a][b]).collect()).collect();
        let pb: Vec<Vec<ScalarHalf>> = perm.iter().map(|&a| perm.iter().map(|&b| bar[a][b].clone()).collect()).collect();
        let got = TriangularProblem::new(pl, pb, CorrectionRing::Negative, Direction::Upper).solve().unwrap();
        for (x, &a) in perm.iter().enumerate() {
            for (y, &b) in perm.iter().enumerate() {
                prop_assert_eq!(&got[x][y], &base[a][b]);
            }
        }
    }
}

#[test]
fn triangle_is_idempotent() {
    let h = a2();
    for d in degrees_upto(&[2, 2]) {
        let classes = h.classes(&d);
        let less = order_matrix(h, &classes);
        let bar = h.bar_matrix_dual(&d).unwrap();
        let p = TriangularProblem::new(less.clone(), bar.clone(), CorrectionRing::Negative, Direction::Upper).solve().unwrap();
        let own = transformed_bar(&p, &bar).expect("transition is invertible");
        assert_eq!(own, identity(classes.len()));
        let again = TriangularProblem::new(less, own, CorrectionRing::Negative, Direction::Upper).solve().unwrap();
        assert_eq!(again, identity(classes.len()));
    }
}

#[test]
fn canonical_positivity_on_computed_degrees() {
    for (h, top) in [(a2(), vec![3, 3]), (a3(), vec![1, 2, 1])] {
        for d in degrees_upto(&top) {
            let canon = canonical_basis(h, &d).unwrap();
            assert!(canon.is_positive(), "canonical {:?}", d);
            let dual = dual_canonical_basis(h, &d).unwrap();
            assert!(positive_offdiag(&dual.inverse_transition()), "dual {:?}", d);
            // the normalization depends on the degree only
            assert_eq!(canon.norm, dual.norm);
            for a in 0..dual.len() {
                let x = dual.member_u(h, a);
                let back = h.bar(&x.to_laurent().unwrap()).unwrap();
                assert_eq!(back, x.to_laurent().unwrap(), "dual member {} of {:?} not bar-invariant", a, d);
            }
        }
    }
}

fn double_a2() -> &'static DoubleAlgebra {
    static D: OnceLock<DoubleAlgebra> = OnceLock::new();
    D.get_or_init(|| DoubleAlgebra::new(QuiverShape::linear_a(2)))
}

fn word_strategy(rank: usize, len: usize) -> impl Strategy<Value = String> {
    let letters: Vec<String> = (1..=rank).flat_map(|i| [format!("E{}", i), format!("F{}", i), format!("K{}", i), format!("K'{}^-1", i)]).collect();
    prop::collection::vec(prop::sample::select(letters), 1..=len).prop_map(|w| w.join(" "))
}

fn nf(d: &DoubleAlgebra, w: &str) -> PbwElt {
    d.normal_form(&parse_word(w, d.rank()).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn double_bar_and_star_are_anti_automorphisms(x in word_strategy(2, 3), y in word_strategy(2, 3), c in scalar()) {
        let d = double_a2();
        let (a, b) = (nf(d, &x).scale(&c), nf(d, &y));
        let ab = d.mul(&a, &b).unwrap();
        prop_assert_eq!(d.bar(&ab).unwrap(), d.mul(&d.bar(&b).unwrap(), &d.bar(&a).unwrap()).unwrap());
        prop_assert_eq!(d.star(&ab).unwrap(), d.mul(&d.star(&b).unwrap(), &d.star(&a).unwrap()).unwrap());
        prop_assert_eq!(d.bar(&d.bar(&a).unwrap()).unwrap(), a.clone());
        prop_assert_eq!(d.star(&d.star(&a).unwrap()).unwrap(), a);
    }

    #[test]
    fn double_braid_commutes_with_bar(x in word_strategy(2, 4), i in 0usize..2, inverse in any::<bool>()) {
        let d = double_a2();
        let a = nf(d, &x);
        let t = d.braid(i, &a, inverse).unwrap();
        prop_assert_eq!(d.bar(&t).unwrap(), d.braid(i, &d.bar(&a).unwrap(), inverse).unwrap());
        prop_assert_eq!(d.braid(i, &t, !inverse).unwrap(), a);
    }

    #[test]
    fn ibraid_commutes_with_bar(word in prop::collection::vec((0usize..3, -1i64..=1), 1..=3)) {
        static D: OnceLock<DoubleAlgebra> = OnceLock::new();
        let shape = QuiverShape::new(3, vec![(0, 1), (2, 1)]).unwrap();
        let d = D.get_or_init(|| DoubleAlgebra::new(shape.clone()));
        let rho = DiagramInvolution::new(vec![2, 1, 0], &shape.cartan_matrix()).unwrap();
        let g = IQuantumGroup::new(d, rho).unwrap();
        let x = word.iter().fold(IExpr::one(), |acc, &(j, e)| acc.mul(&if e == 0 { IExpr::b(j) } else { IExpr::k(j, e) }));
        for i in g.orbit_reps() {
            prop_assert!(g.bar_commutes(i, &x).unwrap(), "T{} on {}", i + 1, x);
        }
    }
}
