use qhall::double::DoubleAlgebra;
use qhall::iquant::{IExpr, IQuantumGroup};
use qhall::{DiagramInvolution, QuiverShape};

fn split(n: usize) -> (DoubleAlgebra, DiagramInvolution) {
    (DoubleAlgebra::new(QuiverShape::linear_a(n)), DiagramInvolution::identity(n))
}

fn a3_flip() -> (DoubleAlgebra, DiagramInvolution) {
    let q = QuiverShape::new(3, vec![(0, 1), (2, 1)]).unwrap();
    let rho = DiagramInvolution::new(vec![2, 1, 0], &q.cartan_matrix()).unwrap();
    (DoubleAlgebra::new(q), rho)
}

fn names(bad: &[(String, qhall::double::PbwElt)]) -> Vec<&String> {
    bad.iter().map(|b| &b.0).collect()
}

#[test]
fn relations_hold_split_a2() {
    let (d, rho) = split(2);
    let g = IQuantumGroup::new(&d, rho).unwrap();
    let bad = g.failing_relations().unwrap();
    assert!(bad.is_empty(), "{:?}", names(&bad));
}

#[test]
fn relations_hold_split_a3() {
    let (d, rho) = split(3);
    let g = IQuantumGroup::new(&d, rho).unwrap();
    let bad = g.failing_relations().unwrap();
    assert!(bad.is_empty(), "{:?}", names(&bad));
}

#[test]
fn relations_hold_a3_flip() {
    let (d, rho) = a3_flip();
    let g = IQuantumGroup::new(&d, rho).unwrap();
    let bad = g.failing_relations().unwrap();
    assert!(bad.is_empty(), "{:?}", names(&bad));
}

#[test]
fn a_wrong_relation_is_caught() {
    // B1 and B2 do not commute in split A2
    let (d, rho) = split(2);
    let g = IQuantumGroup::new(&d, rho).unwrap();
    let r = IExpr::b(0).mul(&IExpr::b(1)).sub(&IExpr::b(1).mul(&IExpr::b(0)));
    assert!(!g.eval(&r).unwrap().is_zero());
}

#[test]
fn braid_preserves_relations() {
    for (d, rho) in [split(2), a3_flip()] {
        let g = IQuantumGroup::new(&d, rho).unwrap();
        for i in g.orbit_reps() {
            let bad = g.braid_preserves_relations(i).unwrap();
            assert!(bad.is_empty(), "T{}: {:?}", i + 1, bad);
        }
    }
}

#[test]
fn braid_relation_split_a2() {
    let (d, rho) = split(2);
    let g = IQuantumGroup::new(&d, rho).unwrap();
    assert!(g.braid_relation_holds(0, 1).unwrap());
}

#[test]
fn braid_relation_a3_flip() {
    let (d, rho) = a3_flip();
    let g = IQuantumGroup::new(&d, rho).unwrap();
    assert!(g.braid_relation_holds(0, 1).unwrap());
}

#[test]
fn braid_commutes_with_bar() {
    for (d, rho) in [split(2), a3_flip()] {
        let g = IQuantumGroup::new(&d, rho).unwrap();
        let n = g.rank();
        let mut probes = Vec::new();
        for j in 0..n {
            probes.push(IExpr::b(j));
            probes.push(IExpr::k(j, 1));
            for k in 0..n {
                probes.push(IExpr::b(j).mul(&IExpr::b(k)));
            }
        }
        for i in g.orbit_reps() {
            for x in &probes {
                assert!(g.bar_commutes(i, x).unwrap(), "T{} on {}", i + 1, x);
            }
        }
    }
}

#[test]
fn bad_involution_rejected() {
    let q = QuiverShape::linear_a(2);
    let d = DoubleAlgebra::new(q);
    assert!(DiagramInvolution::new(vec![1, 0], &d.hall.cat.datum.cartan).map(|r| IQuantumGroup::new(&d, r).is_err()).unwrap_or(true));
}
