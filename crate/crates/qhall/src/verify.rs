//! Named end-to-end checks. Each compares two independent routes to the
//! same object (a pipeline against a closed form, or two prime sets against
//! each other) and reports a one-line summary.

use crate::canonbasis::{canonical_basis, divided_power_monomial, dual_canonical_basis, pairing_duality_check};
use crate::double::basis::{expand, DoubleBasis, DoubleBasisElt};
use crate::double::{DoubleAlgebra, PbwElt};
use crate::hallgen::degrees_upto;
use crate::ihall::{IHallElt, SplitRankOne};
use crate::iquant::{IExpr, IQuantumGroup};
use crate::nks::{irank1_inverse, irank1_l, rank1_ea_fb, rank1_l, NksQuiver, Twist};
use crate::scalars::{interpolate_q, QPolynomial};
use crate::triangle::unitriangular_inverse;
use crate::{DiagramInvolution, HallAlgebra, HallElt, KSClass, QuiverShape, Rational, ScalarHalf};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;

pub type Outcome = Result<String, String>;

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub title: &'static str,
    pub run: fn() -> Outcome,
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "serre", title: "quantum Serre relations on A1, A2, A3", run: serre },
        Criterion { id: 2, name: "canonical", title: "canonical basis of sl2 and sl3", run: canonical },
        Criterion { id: 3, name: "dual-canonical", title: "dual canonical basis of sl2", run: dual_canonical },
        Criterion { id: 4, name: "pairing", title: "pairing duality on A2 up to (3,3)", run: pairing },
        Criterion { id: 5, name: "interpolation", title: "interpolation over disjoint prime sets", run: interpolation },
        Criterion { id: 6, name: "double-basis", title: "double canonical basis of sl2", run: double_basis },
        Criterion { id: 7, name: "rank1", title: "E^a F^b expansion and positivity", run: rank1 },
        Criterion { id: 8, name: "coincidence", title: "L-family equals the double basis", run: coincidence },
        Criterion { id: 9, name: "braid", title: "braid group actions", run: braid },
        Criterion { id: 10, name: "ihall", title: "iHall pipeline for split A1", run: ihall },
        Criterion { id: 11, name: "iquant", title: "iquantum group relations via the embedding", run: iquant },
        Criterion { id: 12, name: "nks", title: "l-dominant ranges and generator dictionary", run: nks },
    ]
}

pub fn find(name: &str) -> Option<Criterion> {
    criteria().into_iter().find(|c| c.name == name || c.id.to_string() == name)
}

fn ok<T, E: Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn serre() -> Outcome {
    let mut n = 0;
    for rank in 1..=3 {
        let h = HallAlgebra::new(QuiverShape::linear_a(rank));
        for i in 0..rank {
            for j in 0..rank {
                if i == j {
                    continue;
                }
                let s = ok(h.serre_element(i, j))?;
                ensure(s.is_zero(), || format!("A{}: Serre({}, {}) = {:?}", rank, i + 1, j + 1, s))?;
                n += 1;
            }
        }
    }
    Ok(format!("{} Serre elements vanish", n))
}

/// Two-family description of the sl3 canonical basis in degree `d`.
pub fn sl3_monomials(h: &HallAlgebra, d: &[i64]) -> Result<Vec<HallElt>, String> {
    let mut out = Vec::new();
    for b in 0..=d[0].min(d[1]) {
        let a = d[0] - b;
        let c = d[1] - b;
        let w: Vec<(usize, u32)> = if c >= a {
            vec![(0, b as u32), (1, (b + c) as u32), (0, a as u32)]
        } else {
            vec![(1, c as u32), (0, (a + b) as u32), (1, b as u32)]
        };
        out.push(ok(divided_power_monomial(h, &w))?);
    }
    Ok(out)
}

fn canonical() -> Outcome {
    let h = HallAlgebra::new(QuiverShape::linear_a(1));
    for m in 1..=8 {
        let fam = ok(canonical_basis(&h, &[m]))?;
        let want = ok(divided_power_monomial(&h, &[(0, m as u32)]))?;
        ensure(fam.len() == 1 && fam.member(0) == want, || format!("sl2 degree {}", m))?;
    }
    let h = HallAlgebra::new(QuiverShape::linear_a(2));
    let mut degrees = 0;
    for d in degrees_upto(&[4, 4]) {
        let fam = ok(canonical_basis(&h, &d))?;
        let got: BTreeSet<String> = (0..fam.len()).map(|a| format!("{:?}", fam.member(a))).collect();
        let want: BTreeSet<String> = sl3_monomials(&h, &d)?.iter().map(|x| format!("{:?}", x)).collect();
        ensure(got == want, || format!("sl3 degree {:?}", d))?;
        degrees += 1;
    }
    Ok(format!("sl2 m <= 8, sl3 {} degrees up to (4,4)", degrees))
}

fn dual_canonical() -> Outcome {
    let h = HallAlgebra::new(QuiverShape::linear_a(1));
    for m in 1..=8i64 {
        let fam = ok(dual_canonical_basis(&h, &[m]))?;
        let l = h.simple(0).scale(m as u32);
        let want = HallElt::term(l.clone(), ScalarHalf::u_pow(-(m * m) as i32));
        ensure(ok(h.bar(&want))? == want, || format!("v^(-m^2/2) u_m not bar-invariant at m = {}", m))?;
        let got = ok(fam.member_u(&h, 0).to_laurent())?;
        ensure(got == want, || format!("m = {}: {:?}", m, got))?;
    }
    Ok("c_m = v^(-m^2/2) u_m for m <= 8".into())
}

fn pairing() -> Outcome {
    let h = HallAlgebra::new(QuiverShape::linear_a(2));
    let ds = degrees_upto(&[3, 3]);
    for d in &ds {
        ok(pairing_duality_check(&h, d))?;
    }
    Ok(format!("{} degrees", ds.len()))
}

type Counts = BTreeMap<KSClass, Rational>;

fn fit(h: &HallAlgebra, x: &KSClass, z: &KSClass, primes: &[u64], deg: usize) -> Result<BTreeMap<KSClass, QPolynomial>, String> {
    let samples: Vec<(u64, Counts)> = primes.iter().map(|&p| ok(h.census_counts(x, z, p)).map(|c| (p, c))).collect::<Result<_, _>>()?;
    let keys: BTreeSet<KSClass> = samples.iter().flat_map(|(_, c)| c.keys().cloned()).collect();
    let mut out = BTreeMap::new();
    for k in keys {
        let pts: Vec<(Rational, Rational)> =
            samples.iter().map(|(p, c)| (Rational::from_integer((*p as i64).into()), c.get(&k).cloned().unwrap_or_default())).collect();
        out.insert(k, ok(interpolate_q(&pts, deg))?);
    }
    Ok(out)
}

fn interpolation() -> Outcome {
    let low = [2, 3, 5, 7];
    let high = [11, 13, 17, 19];
    let held = 23u64;
    let mut pairs = 0;
    for (rank, top) in [(2, vec![2, 2]), (3, vec![1, 2, 1])] {
        let h = HallAlgebra::new(QuiverShape::linear_a(rank));
        let ds = degrees_upto(&top);
        for d1 in &ds {
            for d2 in &ds {
                if d1.iter().all(|&x| x == 0) || d2.iter().all(|&x| x == 0) || d1.iter().zip(d2).zip(&top).any(|((a, b), t)| a + b > *t) {
                    continue;
                }
                for x in h.classes(d1).iter() {
                    for z in h.classes(d2).iter() {
                        let ext = h.cat.ext_classes(x, z) as usize;
                        if ext == 0 || ext > 3 {
                            continue;
                        }
                        let a = fit(&h, x, z, &low, 3)?;
                        let b = fit(&h, x, z, &high, 3)?;
                        ensure(a == b, || format!("A{}: {:?} * {:?} differs between prime sets", rank, x.0, z.0))?;
                        let direct = ok(h.census_counts(x, z, held))?;
                        let q = Rational::from_integer((held as i64).into());
                        for (k, poly) in &a {
                            let want = direct.get(k).cloned().unwrap_or_default();
                            ensure(poly.eval(&q) == want, || format!("A{}: {:?} * {:?} at {}", rank, x.0, z.0, held))?;
                        }
                        ensure(direct.keys().all(|k| a.contains_key(k)), || format!("A{}: new middle term at {}", rank, held))?;
                        pairs += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{} class pairs agree on both prime sets and at q = {}", pairs, held))
}

/// `C^(m)` for `m <= top`, from `C^(m+1) = C C^(m) - K K' C^(m-1)`.
pub fn casimir_powers(d: &DoubleAlgebra, top: usize) -> Result<Vec<PbwElt>, String> {
    let fe = ok(d.mul(&d.f_gen(0), &d.e_gen(0)))?;
    let c = fe.sub(&d.k_gen(0, 1).scale(&ScalarHalf::v_pow(1))).sub(&d.kp_gen(0, 1).scale(&ScalarHalf::v_pow(-1)));
    let kk = d.k_mono(&[1], &[1]);
    let mut out = vec![d.one(), c.clone()];
    while out.len() <= top {
        let n = out.len();
        let next = ok(d.mul(&c, &out[n - 1]))?.sub(&ok(d.mul(&kk, &out[n - 2]))?);
        out.push(next);
    }
    Ok(out)
}

/// `v^{(a+ - a-)(m- - m+)} K^{a+} K'^{a-} F^{m-} C^{(m0)} E^{m+}` with
/// `min(m+, m-) = 0`, cut at total Gamma-degree `total`.
pub fn sl2_closed_family(d: &DoubleAlgebra, total: i64) -> Result<Vec<PbwElt>, String> {
    let cs = casimir_powers(d, total as usize / 2 + 1)?;
    let mut out = Vec::new();
    for ap in 0..=total {
        for am in 0..=total {
            for m0 in 0..=total {
                for mp in 0..=total {
                    for mm in 0..=total {
                        if mp.min(mm) != 0 || 2 * (ap + am + m0) + mp + mm > total {
                            continue;
                        }
                        let f = ok(d.pow(&d.f_gen(0), mm as u32))?;
                        let e = ok(d.pow(&d.e_gen(0), mp as u32))?;
                        let k = d.k_mono(&[ap], &[am]);
                        let x = ok(d.mul_all(&[&k, &f, &cs[m0 as usize], &e]))?;
                        out.push(x.scale(&ScalarHalf::v_pow(((ap - am) * (mm - mp)) as i32)));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn as_set<'a>(xs: impl IntoIterator<Item = &'a PbwElt>) -> BTreeSet<String> {
    xs.into_iter().map(|x| format!("{:?}", x)).collect()
}

fn sl2() -> DoubleAlgebra {
    DoubleAlgebra::new(QuiverShape::linear_a(1))
}

fn double_basis() -> Outcome {
    let d = sl2();
    let db = DoubleBasis::new(&d);
    let window = ok(db.window(4))?;
    let got = as_set(window.iter().map(|e| &e.element));
    ensure(got.len() == window.len(), || "window has repeated elements".into())?;
    ensure(got == as_set(&sl2_closed_family(&d, 4)?), || "window differs from the closed family".into())?;
    let c = &casimir_powers(&d, 1)?[1];
    let s2 = ok(db.stage2(&(vec![1], vec![1])))?;
    let fe = s2.iter().find(|(l, _)| l.nu == [0] && l.mu == [0] && l.minus.0 == [1] && l.plus.0 == [1]);
    ensure(fe.map(|(_, x)| x == c).unwrap_or(false), || "F . E is not C".into())?;
    Ok(format!("{} elements, F . E = C", window.len()))
}

fn stage2_family(db: &DoubleBasis, a: i64, b: i64) -> Result<Vec<DoubleBasisElt>, String> {
    let g = (vec![a], vec![b]);
    Ok(ok(db.stage2(&g))?.into_iter().map(|(label, element)| DoubleBasisElt { label, gamma: g.clone(), element }).collect())
}

fn rank1() -> Outcome {
    let d = sl2();
    let db = DoubleBasis::new(&d);
    for a in 0..=4i64 {
        for b in 0..=4i64 {
            let lhs = ok(d.mul(&ok(d.pow(&d.e_gen(0), a as u32))?, &ok(d.pow(&d.f_gen(0), b as u32))?))?;
            let mut rhs = PbwElt::zero();
            for ((v1, v2), c) in rank1_ea_fb(a, b) {
                rhs.add_scaled(&ok(rank1_l(&d, (v1, v2), (a, b)))?, &c);
            }
            ensure(lhs == rhs, || format!("E^{} F^{} expansion", a, b))?;
            let coeffs = expand(&lhs, &stage2_family(&db, a, b)?).ok_or_else(|| format!("E^{} F^{} not in span", a, b))?;
            ensure(coeffs.values().all(|c| c.is_nonneg_integral() && c.is_v_laurent()), || format!("E^{} F^{} not positive", a, b))?;
        }
    }
    Ok("a, b <= 4 straighten and expand positively".into())
}

fn coincidence() -> Outcome {
    let d = sl2();
    let db = DoubleBasis::new(&d);
    let window = ok(db.window(4))?;
    let got = as_set(window.iter().map(|e| &e.element));
    let mut want = Vec::new();
    for w1 in 0..=4 {
        for w2 in 0..=(4 - w1) {
            for v1 in 0..=w1.min(w2) {
                for v2 in 0..=(w1.min(w2) - v1) {
                    want.push(ok(rank1_l(&d, (v1, v2), (w1, w2)))?);
                }
            }
        }
    }
    ensure(got == as_set(&want), || "L-family and double basis differ".into())?;
    Ok(format!("{} elements coincide", got.len()))
}

fn iquant_cases() -> Result<Vec<(&'static str, DoubleAlgebra, DiagramInvolution)>, String> {
    let flip = ok(QuiverShape::new(3, vec![(0, 1), (2, 1)]))?;
    let rho = ok(DiagramInvolution::new(vec![2, 1, 0], &flip.cartan_matrix()))?;
    Ok(vec![
        ("split A2", DoubleAlgebra::new(QuiverShape::linear_a(2)), DiagramInvolution::identity(2)),
        ("split A3", DoubleAlgebra::new(QuiverShape::linear_a(3)), DiagramInvolution::identity(3)),
        ("A3 flip", DoubleAlgebra::new(flip), rho),
    ])
}

fn braid() -> Outcome {
    let d = sl2();
    let db = DoubleBasis::new(&d);
    let window = ok(db.window(4))?;
    let mut hits = 0;
    for e in window.iter().filter(|e| e.gamma.0[0] + e.gamma.1[0] <= 3) {
        for inverse in [false, true] {
            let y = ok(d.braid(0, &e.element, inverse))?;
            ensure(ok(db.find_shifted(&y, &window))?.is_some(), || format!("T1 image of {} left the family", d.pretty(&e.element)))?;
            ensure(ok(d.bar(&y))? == ok(d.braid(0, &ok(d.bar(&e.element))?, inverse))?, || "T1 does not commute with bar".into())?;
            hits += 1;
        }
    }
    let mut checked = Vec::new();
    for (name, d, rho) in iquant_cases()?.into_iter().filter(|c| c.0 != "split A2") {
        let g = ok(IQuantumGroup::new(&d, rho))?;
        let reps = g.orbit_reps();
        let n = g.rank();
        let mut probes = Vec::new();
        for j in 0..n {
            probes.push(IExpr::b(j));
            probes.push(IExpr::k(j, 1));
        }
        for &i in &reps {
            let bad = ok(g.braid_preserves_relations(i))?;
            ensure(bad.is_empty(), || format!("{}: T{} breaks {:?}", name, i + 1, bad))?;
            for &j in &reps {
                if i < j {
                    ensure(ok(g.braid_relation_holds(i, j))?, || format!("{}: braid relation T{} T{}", name, i + 1, j + 1))?;
                }
            }
            for x in &probes {
                ensure(ok(g.bar_commutes(i, x))?, || format!("{}: T{} and bar on {}", name, i + 1, x))?;
            }
        }
        checked.push(name);
    }
    Ok(format!("{} sl2 images in the family; {} preserved", hits, checked.join(", ")))
}

fn ihall() -> Outcome {
    let r = SplitRankOne::new();
    let v = ScalarHalf::v_pow;
    for p in [2, 3, 5, 7] {
        ensure(ok(r.class_product_at((0, 1), (1, 0), p))? == ok(r.class_product_at((1, 0), (0, 1), p))?, || format!("K and S do not commute at q = {}", p))?;
    }
    ensure(ok(r.class_product((0, 1), (1, 0)))? == ok(r.class_product((1, 0), (0, 1)))?, || "K and S do not commute generically".into())?;
    ensure(ok(r.mul(&r.k(1), &r.k(-1)))? == r.one(), || "K is not invertible".into())?;
    ensure(ok(r.bar(&r.u(1)))? == r.u(1).scale(&v(-1)), || "bar on B".into())?;
    let windows: Vec<_> = (0..=6u32).map(|m| ok(r.dual_window(m))).collect::<Result<_, _>>()?;
    for (m, w) in windows.iter().enumerate() {
        for k in 0..=(m / 2) as i64 {
            let x = w.position(k, m as u32 - 2 * k as u32).ok_or("missing index")?;
            let closed = ok(r.transport(&ok(irank1_l(k, m as i64))?))?;
            ensure(w.element(x) == closed, || format!("L({}, {})", k, m))?;
        }
        let inv = unitriangular_inverse(&w.coeffs).ok_or("transition not unitriangular")?;
        for (x, row) in inv.iter().enumerate() {
            for (y, c) in row.iter().enumerate() {
                let good = if x == y { c.is_one() } else { c.is_zero() || (c.in_neg_ring() && c.is_nonneg_integral()) };
                ensure(good, || format!("m = {}: transition entry {}", m, c))?;
            }
        }
    }
    for a in 0..=6i64 {
        for b in 0..=3i64 {
            let m = a + 2 * b;
            if m > 6 {
                continue;
            }
            let lhs = ok(r.transport(&BTreeMap::from([((a, b), 1)])))?;
            let mut rhs = IHallElt::zero();
            for ((k, _), c) in ok(irank1_inverse(a, b))? {
                let w = &windows[m as usize];
                rhs.add_scaled(&w.element(w.position(k, (m - 2 * k) as u32).ok_or("missing index")?), &ScalarHalf::from_int(c));
            }
            ensure(lhs == rhs, || format!("B^{} K^{} inverse expansion", a, b))?;
        }
    }
    Ok("relations at q = 2,3,5,7 and generically; L(k,m) for m <= 6; inverse expansion; positive transitions".into())
}

fn iquant() -> Outcome {
    let mut n = 0;
    for (name, d, rho) in iquant_cases()? {
        let g = ok(IQuantumGroup::new(&d, rho))?;
        let rels = g.relations();
        ensure(rels.iter().any(|(r, _)| r.starts_with("split Serre")), || format!("{}: no split Serre relation", name))?;
        let bad = ok(g.failing_relations())?;
        ensure(bad.is_empty(), || format!("{}: {:?}", name, bad.iter().map(|b| &b.0).collect::<Vec<_>>()))?;
        n += rels.len();
    }
    Ok(format!("{} relations straighten to zero", n))
}

fn nks() -> Outcome {
    let a1 = QuiverShape::linear_a(1);
    let iq = ok(NksQuiver::new(&a1, Twist::ShiftInvolution(DiagramInvolution::identity(1))))?;
    for m in 0..=8 {
        let got = ok(iq.enumerate_l_dominant(&[m], 100_000))?;
        let want: Vec<Vec<i64>> = (0..=m / 2).map(|k| vec![k]).collect();
        ensure(got == want, || format!("irank-1 w = {}", m))?;
    }
    let dq = ok(NksQuiver::new(&a1, Twist::ShiftSquared))?;
    for w1 in 0..=4 {
        for w2 in 0..=4 {
            let got: BTreeSet<Vec<i64>> = ok(dq.enumerate_l_dominant(&[w1, w2], 100_000))?.into_iter().collect();
            let n = w1.min(w2);
            let want: BTreeSet<Vec<i64>> = (0..=n).flat_map(|a| (0..=n - a).map(move |b| vec![a, b])).collect();
            ensure(got == want, || format!("diagonal w = ({}, {})", w1, w2))?;
        }
    }
    ensure(iq.generator_vectors(0) == (vec![1], vec![2]), || "K~ is not L(1, 2)".into())?;
    ensure(dq.generator_vectors(0) == (vec![1, 0], vec![1, 1]), || "K is not L((1,0),(1,1))".into())?;
    Ok("ranges and generator vectors match".into())
}

/// Run every criterion, in order.
pub fn run_all() -> Vec<(Criterion, Outcome)> {
    criteria()
        .into_iter()
        .map(|c| {
            let r = (c.run)();
            (c, r)
        })
        .collect()
}
