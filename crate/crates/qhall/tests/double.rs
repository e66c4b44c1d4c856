use qhall::double::basis::{expand, DoubleBasis, DoubleBasisElt};
use qhall::double::{DoubleAlgebra, PbwElt};
use qhall::{QuiverShape, ScalarHalf};
use std::collections::BTreeSet;

fn v(k: i32) -> ScalarHalf {
    ScalarHalf::v_pow(k)
}

/// `C^{(m)}` from `C^{(m+1)} = C C^{(m)} - K K' C^{(m-1)}`.
fn c_powers(d: &DoubleAlgebra, top: usize) -> Vec<PbwElt> {
    let fe = d.mul(&d.f_gen(0), &d.e_gen(0)).unwrap();
    let c = fe.sub(&d.k_gen(0, 1).scale(&v(1))).sub(&d.kp_gen(0, 1).scale(&v(-1)));
    let kk = d.k_mono(&[1], &[1]);
    let mut out = vec![d.one(), c.clone()];
    while out.len() <= top {
        let n = out.len();
        let next = d.mul(&c, &out[n - 1]).unwrap().sub(&d.mul(&kk, &out[n - 2]).unwrap());
        out.push(next);
    }
    out
}

/// The closed sl2 family with `a_+, a_- >= 0`, cut at total Gamma-degree `total`.
fn closed_family(d: &DoubleAlgebra, total: i64) -> Vec<PbwElt> {
    let cs = c_powers(d, total as usize / 2 + 1);
    let mut out = Vec::new();
    for ap in 0..=total {
        for am in 0..=total {
            for m0 in 0..=total {
                for mp in 0..=total {
                    for mm in 0..=total {
                        if mp.min(mm) != 0 || 2 * (ap + am + m0) + mp + mm > total {
                            continue;
                        }
                        let f = d.pow(&d.f_gen(0), mm as u32).unwrap();
                        let e = d.pow(&d.e_gen(0), mp as u32).unwrap();
                        let k = d.k_mono(&[ap], &[am]);
                        let x = d.mul_all(&[&k, &f, &cs[m0 as usize], &e]).unwrap();
                        out.push(x.scale(&v(((ap - am) * (mm - mp)) as i32)));
                    }
                }
            }
        }
    }
    out
}

fn as_set(xs: impl IntoIterator<Item = PbwElt>) -> BTreeSet<String> {
    xs.into_iter().map(|x| format!("{:?}", x)).collect()
}

#[test]
fn sl2_window_matches_closed_family() {
    let d = DoubleAlgebra::new(QuiverShape::linear_a(1));
    let db = DoubleBasis::new(&d);
    let window = db.window(4).unwrap();
    let got = as_set(window.iter().map(|e| e.element.clone()));
    let want = as_set(closed_family(&d, 4));
    assert_eq!(window.len(), got.len());
    assert_eq!(got, want);
    for e in &window {
        assert_eq!(d.bar(&e.element).unwrap(), e.element);
    }
}

#[test]
fn f_bullet_e_is_casimir() {
    let d = DoubleAlgebra::new(QuiverShape::linear_a(1));
    let db = DoubleBasis::new(&d);
    let s2 = db.stage2(&(vec![1], vec![1])).unwrap();
    let c = &c_powers(&d, 1)[1];
    assert!(s2.iter().any(|(l, x)| l.nu == [0] && l.mu == [0] && l.minus.0 == [1] && x == c));
}

fn same_gamma<'a>(family: &'a [DoubleBasisElt], d: &DoubleAlgebra, x: &PbwElt) -> Vec<DoubleBasisElt> {
    let (m, _) = x.iter().next().unwrap();
    let g = d.gamma(m);
    family.iter().filter(|e| e.gamma == g).cloned().collect()
}

#[test]
fn braid_permutes_sl2_family() {
    let d = DoubleAlgebra::new(QuiverShape::linear_a(1));
    let db = DoubleBasis::new(&d);
    let window = db.window(4).unwrap();
    for e in window.iter().filter(|e| e.gamma.0[0] + e.gamma.1[0] <= 3) {
        for inverse in [false, true] {
            let y = d.braid(0, &e.element, inverse).unwrap();
            let hit = db.find_shifted(&y, &window).unwrap();
            assert!(hit.is_some(), "T^{}({}) not in family", if inverse { "-1" } else { "" }, d.pretty(&e.element));
        }
    }
}

#[test]
fn structure_constants_are_positive() {
    let d = DoubleAlgebra::new(QuiverShape::linear_a(1));
    let db = DoubleBasis::new(&d);
    let window = db.window(4).unwrap();
    let small: Vec<&DoubleBasisElt> = window.iter().filter(|e| e.gamma.0[0] + e.gamma.1[0] <= 2).collect();
    for x in &small {
        for y in &small {
            let p = d.mul(&x.element, &y.element).unwrap();
            if p.is_zero() {
                continue;
            }
            let fam = same_gamma(&window, &d, &p);
            let coeffs = expand(&p, &fam).expect("product expands over the family");
            for c in coeffs.values() {
                assert!(c.is_nonneg_integral() && c.is_v_laurent(), "coefficient {} in {} * {}", c, d.pretty(&x.element), d.pretty(&y.element));
            }
        }
    }
}

#[test]
fn star_preserves_sl2_family() {
    let d = DoubleAlgebra::new(QuiverShape::linear_a(1));
    let db = DoubleBasis::new(&d);
    let window = db.window(4).unwrap();
    let set = as_set(window.iter().map(|e| e.element.clone()));
    for e in &window {
        let s = d.star(&e.element).unwrap();
        assert!(set.contains(&format!("{:?}", s)), "star({}) left the family", d.pretty(&e.element));
    }
}
