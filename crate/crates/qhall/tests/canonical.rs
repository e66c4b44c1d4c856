use qhall::canonbasis::{
    canonical_basis, divided_power_monomial, dual_canonical_basis, fourier_match, pairing_duality_check, pairing_gram,
};
use qhall::hallgen::degrees_upto;
use qhall::{HallAlgebra, HallElt, QuiverShape, ScalarHalf};
use std::collections::BTreeSet;

fn sl3_description(h: &HallAlgebra, d: &[i64]) -> Vec<HallElt> {
    let mut out = Vec::new();
    // (a+b, b+c) = d
    for b in 0..=d[0].min(d[1]) {
        let a = d[0] - b;
        let c = d[1] - b;
        let w: Vec<(usize, u32)> = if c >= a {
            vec![(0, b as u32), (1, (b + c) as u32), (0, a as u32)]
        } else {
            vec![(1, c as u32), (0, (a + b) as u32), (1, b as u32)]
        };
        out.push(divided_power_monomial(h, &w).unwrap());
    }
    out
}

#[test]
fn sl3_two_family_description() {
    let h = HallAlgebra::new(QuiverShape::linear_a(2));
    for d in degrees_upto(&[3, 3]) {
        let fam = canonical_basis(&h, &d).unwrap();
        let got: BTreeSet<String> = (0..fam.len()).map(|a| format!("{:?}", fam.member(a))).collect();
        let want: BTreeSet<String> = sl3_description(&h, &d).iter().map(|x| format!("{:?}", x)).collect();
        assert_eq!(got, want, "degree {:?}", d);
    }
}

#[test]
fn pairing_a2() {
    let h = HallAlgebra::new(QuiverShape::linear_a(2));
    for d in degrees_upto(&[2, 2]) {
        pairing_duality_check(&h, &d).unwrap();
        let canon = canonical_basis(&h, &d).unwrap();
        let dual = dual_canonical_basis(&h, &d).unwrap();
        let raw = pairing_gram(&h, &canon, &dual, 0).unwrap();
        let total: i64 = d.iter().sum();
        for (i, row) in raw.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                let want = if i == j { ScalarHalf::u_pow(-total as i32) } else { ScalarHalf::zero() };
                assert_eq!(*g, want);
            }
        }
    }
}

#[test]
fn fourier_a2() {
    let h = HallAlgebra::new(QuiverShape::linear_a(2));
    let o = HallAlgebra::new(QuiverShape::linear_a(2).opposite());
    for d in degrees_upto(&[2, 2]) {
        let m = fourier_match(&h, &canonical_basis(&h, &d).unwrap(), &o, &canonical_basis(&o, &d).unwrap()).unwrap();
        assert_eq!(m.iter().collect::<BTreeSet<_>>().len(), m.len());
        let m = fourier_match(&h, &dual_canonical_basis(&h, &d).unwrap(), &o, &dual_canonical_basis(&o, &d).unwrap())
            .unwrap();
        assert_eq!(m.iter().collect::<BTreeSet<_>>().len(), m.len());
    }
}
