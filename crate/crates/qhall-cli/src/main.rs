mod report;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qhall::cache::CountCache;
use qhall::canonbasis::{canonical_basis, dual_canonical_basis};
use qhall::double::basis::DoubleBasis;
use qhall::double::{parse_word, DoubleAlgebra, PbwElt};
use qhall::iquant::{IExpr, IQuantumGroup};
use qhall::nks::{irank1_l, rank1_ea_fb, rank1_l, NksQuiver, Twist};
use qhall::verify;
use qhall::{parse_quiver_spec, HallAlgebra, IQuiver, KSClass, ScalarHalf};
use rayon::prelude::*;
use report::{Cell, Format, Report};
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "qhall", version, about = "Exact Hall algebras, quantum groups and their canonical bases")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for the on-disk counting cache.
    #[arg(long, global = true, env = "QHALL_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Write the result to this file instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Positive roots of a Dynkin quiver.
    Roots { quiver: String },
    /// Generic Hall algebra products.
    Hall {
        #[command(subcommand)]
        op: HallOp,
    },
    /// Canonical or dual canonical basis in one degree.
    Canon {
        quiver: String,
        /// Dimension vector, e.g. `1,1`.
        #[arg(long, value_delimiter = ',', required = true)]
        degree: Vec<i64>,
        #[arg(long)]
        dual: bool,
    },
    /// The Drinfeld double and its canonical basis.
    Tu {
        #[command(subcommand)]
        op: TuOp,
    },
    /// The iquantum group inside the double.
    Iqg {
        #[command(subcommand)]
        op: IqgOp,
    },
    /// iHall algebra of split A1.
    Ihall {
        #[command(subcommand)]
        op: IhallOp,
    },
    /// Graded quiver varieties: l-dominant pairs and generator vectors.
    Nks {
        #[command(subcommand)]
        op: NksOp,
    },
    /// Rank-one closed forms.
    Rank1 {
        #[command(subcommand)]
        op: Rank1Op,
    },
    /// Run acceptance checks by name, number or `all`.
    Verify {
        #[arg(default_value = "all")]
        target: String,
        /// List the available targets.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Subcommand)]
enum HallOp {
    /// `u_x u_y` on the isoclass basis.
    Mult {
        quiver: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Quantum Serre elements for every pair of vertices.
    Serre { quiver: String },
}

#[derive(Subcommand)]
enum TuOp {
    /// PBW normal form of a word such as `E1 F1 K1^-1`.
    Nf {
        quiver: String,
        #[arg(long)]
        word: String,
    },
    /// Product of two words.
    Mult {
        quiver: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Braid operator `T_i` (or its inverse) applied to a word.
    Braid {
        quiver: String,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        word: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Double canonical basis up to a total degree.
    DoubleBasis {
        quiver: String,
        #[arg(long)]
        window: i64,
    },
}

#[derive(Subcommand)]
enum IqgOp {
    /// Evaluate every defining relation in the double.
    Relations {
        quiver: String,
        #[arg(long)]
        rho: Option<String>,
    },
    /// Images of the generators under `T_i` and whether relations survive.
    Braid {
        quiver: String,
        #[arg(long)]
        rho: Option<String>,
        #[arg(long)]
        i: usize,
    },
}

#[derive(Subcommand)]
enum IhallOp {
    /// Generic product of two classes `S^a + K^b`, written `a,b`.
    Mult {
        quiver: String,
        #[arg(long)]
        rho: Option<String>,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Dual canonical basis on the window `2k + a = m`.
    DualBasis {
        quiver: String,
        #[arg(long)]
        rho: Option<String>,
        #[arg(long)]
        m: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TwistArg {
    /// Quotient by `Sigma^2` (the quantum group).
    Squared,
    /// Quotient by `Sigma rho` (the iquantum group).
    Ishift,
}

#[derive(Subcommand)]
enum NksOp {
    /// l-dominant `v` for a fixed `w`.
    Ldominant {
        quiver: String,
        #[arg(long, value_enum)]
        twist: TwistArg,
        #[arg(long)]
        rho: Option<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        w: Vec<i64>,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Generator vectors `(v^i, w^i)`.
    Generators {
        quiver: String,
        #[arg(long, value_enum)]
        twist: TwistArg,
        #[arg(long)]
        rho: Option<String>,
    },
}

#[derive(Subcommand)]
enum Rank1Op {
    /// `E^a F^b` over the `L`-family.
    EaFb {
        #[arg(long)]
        a: i64,
        #[arg(long)]
        b: i64,
    },
    /// `L(v, w)` in the sl2 double.
    L {
        #[arg(long, value_delimiter = ',', num_args = 2, required = true)]
        v: Vec<i64>,
        #[arg(long, value_delimiter = ',', num_args = 2, required = true)]
        w: Vec<i64>,
    },
    /// `L(k, m)` of the rank-one iquantum group in `B`, `K`.
    Il {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        m: i64,
    },
}

fn quiver(spec: &str, rho: &Option<String>) -> Result<IQuiver> {
    let full = match rho {
        Some(r) if spec.contains(';') => bail!("involution given twice in '{}'", spec),
        Some(r) => format!("{}; rho={}", spec, r),
        None => spec.to_string(),
    };
    parse_quiver_spec(&full).map_err(|e| anyhow!("{}", e))
}

fn split_quiver(spec: &str) -> Result<IQuiver> {
    let q = quiver(spec, &None)?;
    if !q.rho.is_identity() {
        bail!("'{}' carries an involution; this verb takes a plain quiver", spec);
    }
    Ok(q)
}

fn hall_algebra(q: &IQuiver, cache: &Option<CountCache>) -> HallAlgebra {
    let mut h = HallAlgebra::new(q.shape.clone());
    h.set_cache(cache.clone());
    h
}

fn element_rows(report: &mut Report, prefix: &[Cell], suffix: &[Cell], d: &DoubleAlgebra, x: &PbwElt) {
    let datum = &d.hall.cat.datum;
    for (m, c) in x.iter() {
        let mut row = prefix.to_vec();
        row.extend([
            Cell::from(m.f.format(datum)),
            Cell::from(m.e.format(datum)),
            Cell::from(m.k.clone()),
            Cell::from(m.kp.clone()),
            Cell::from(c.clone()),
        ]);
        row.extend_from_slice(suffix);
        report.push(row);
    }
}

const ELEMENT: [&str; 5] = ["lambdaMinus", "lambdaPlus", "mu", "nu", "coeff"];

fn element_report(title: String, d: &DoubleAlgebra, x: &PbwElt) -> Report {
    let mut r = Report::new(title, &ELEMENT);
    element_rows(&mut r, &[], &[], d, x);
    r
}

fn word(d: &DoubleAlgebra, w: &str) -> Result<PbwElt> {
    let letters = parse_word(w, d.rank())?;
    Ok(d.normal_form(&letters)?)
}

fn vertex(i: usize, n: usize) -> Result<usize> {
    if i == 0 || i > n {
        bail!("vertex {} out of range 1..={}", i, n);
    }
    Ok(i - 1)
}

fn a1_class(s: &str) -> Result<(u32, u32)> {
    let (a, b) = s.split_once(',').ok_or_else(|| anyhow!("expected 'a,b' for S^a + K^b, found '{}'", s))?;
    Ok((a.trim().parse().context("S multiplicity")?, b.trim().parse().context("K multiplicity")?))
}

fn require_split_a1(q: &IQuiver) -> Result<()> {
    if q.shape.num_vertices() != 1 || !q.rho.is_identity() {
        bail!("coverage: the generic iHall algebra is implemented for split A1 only");
    }
    Ok(())
}

fn nks_quiver(spec: &str, twist: TwistArg, rho: &Option<String>) -> Result<NksQuiver> {
    let q = quiver(spec, rho)?;
    let t = match twist {
        TwistArg::Squared => {
            if !q.rho.is_identity() {
                bail!("the squared shift takes no involution");
            }
            Twist::ShiftSquared
        }
        TwistArg::Ishift => Twist::ShiftInvolution(q.rho.clone()),
    };
    Ok(NksQuiver::new(&q.shape, t)?)
}

fn run(cli: &Cli) -> Result<(Report, bool)> {
    let cache = match &cli.cache_dir {
        Some(d) => Some(CountCache::new(d)?),
        None => None,
    };
    let report = match &cli.cmd {
        Cmd::Roots { quiver } => {
            let q = split_quiver(quiver)?;
            let datum = q.datum();
            let mut r = Report::new(format!("positive roots of {}", q.to_spec_string()), &["index", "root", "height"]);
            for (k, root) in datum.roots.iter().enumerate() {
                r.push(vec![Cell::from(k as i64 + 1), Cell::from(root.clone()), Cell::from(root.iter().sum::<i64>())]);
            }
            r
        }
        Cmd::Hall { op: HallOp::Mult { quiver, x, y } } => {
            let q = split_quiver(quiver)?;
            let h = hall_algebra(&q, &cache);
            let d = &h.cat.datum;
            let (lx, ly) = (KSClass::parse(x, d)?, KSClass::parse(y, d)?);
            let p = h.product(&h.u(&lx), &h.u(&ly))?;
            let mut r = Report::new(format!("u[{}] u[{}] in {}", lx.format(d), ly.format(d), q.to_spec_string()), &["class", "coeff"]);
            for (l, c) in p.iter() {
                r.push(vec![Cell::from(l.format(d)), Cell::from(c.clone())]);
            }
            r
        }
        Cmd::Hall { op: HallOp::Serre { quiver } } => {
            let q = split_quiver(quiver)?;
            let h = hall_algebra(&q, &cache);
            let n = h.rank();
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
            let out: Vec<_> = pairs.par_iter().map(|&(i, j)| h.serre_element(i, j).map(|s| (i, j, s))).collect::<Result<_, _>>()?;
            let mut r = Report::new(format!("Serre elements in {}", q.to_spec_string()), &["i", "j", "terms", "vanishes"]);
            for (i, j, s) in out {
                r.push(vec![Cell::from(i as i64 + 1), Cell::from(j as i64 + 1), Cell::from(s.len() as i64), Cell::from(s.is_zero().to_string())]);
            }
            r
        }
        Cmd::Canon { quiver, degree, dual } => {
            let q = split_quiver(quiver)?;
            let h = hall_algebra(&q, &cache);
            if degree.len() != h.rank() || degree.iter().any(|&x| x < 0) {
                bail!("degree must have {} nonnegative entries", h.rank());
            }
            let fam = if *dual { dual_canonical_basis(&h, degree)? } else { canonical_basis(&h, degree)? };
            let d = &h.cat.datum;
            let (kind, basis, source) =
                if *dual { ("dual canonical", "U", "bar-invariant, upper unitriangular over U") } else { ("canonical", "E", "psi-invariant, lower unitriangular over E") };
            let mut r = Report::new(format!("{} basis of {} in degree {:?}", kind, q.to_spec_string(), degree), &["member", "basis", "class", "coeff", "source"]);
            for a in 0..fam.len() {
                for (k, c) in fam.transition[a].iter().enumerate() {
                    if !c.is_zero() {
                        r.push(vec![
                            Cell::from(fam.classes[a].format(d)),
                            Cell::from(basis),
                            Cell::from(fam.classes[k].format(d)),
                            Cell::from(c.clone()),
                            Cell::from(source),
                        ]);
                    }
                }
            }
            r
        }
        Cmd::Tu { op } => {
            let (spec, title) = match op {
                TuOp::Nf { quiver, word } => (quiver, format!("normal form of {}", word)),
                TuOp::Mult { quiver, x, y } => (quiver, format!("({}) ({})", x, y)),
                TuOp::Braid { quiver, i, word, inverse } => (quiver, format!("T{}{}({})", i, if *inverse { "^-1" } else { "" }, word)),
                TuOp::DoubleBasis { quiver, window } => (quiver, format!("double canonical basis up to degree {}", window)),
            };
            let q = split_quiver(spec)?;
            let d = DoubleAlgebra::from_hall(Arc::new(hall_algebra(&q, &cache)));
            let title = format!("{} in {}", title, q.to_spec_string());
            match op {
                TuOp::Nf { word: w, .. } => element_report(title, &d, &word(&d, w)?),
                TuOp::Mult { x, y, .. } => element_report(title, &d, &d.mul(&word(&d, x)?, &word(&d, y)?)?),
                TuOp::Braid { i, word: w, inverse, .. } => element_report(title, &d, &d.braid(vertex(*i, d.rank())?, &word(&d, w)?, *inverse)?),
                TuOp::DoubleBasis { window, .. } => {
                    let db = DoubleBasis::new(&d);
                    let fam = db.window(*window)?;
                    let mut cols = vec!["index", "gamma"];
                    cols.extend(ELEMENT);
                    cols.push("source");
                    let mut r = Report::new(title, &cols);
                    for (n, e) in fam.iter().enumerate() {
                        let gamma = Cell::Json(serde_json::json!([e.gamma.0, e.gamma.1]));
                        element_rows(&mut r, &[Cell::from(n as i64), gamma], &[Cell::from("two-stage triangularization")], &d, &e.element);
                    }
                    r
                }
            }
        }
        Cmd::Iqg { op: IqgOp::Relations { quiver: spec, rho } } => {
            let q = quiver(spec, rho)?;
            let d = DoubleAlgebra::from_hall(Arc::new(hall_algebra(&q, &cache)));
            let g = IQuantumGroup::new(&d, q.rho.clone())?;
            let rels = g.relations();
            let evals: Vec<_> = rels.par_iter().map(|(name, x)| g.eval(x).map(|y| (name.clone(), y))).collect::<Result<_, _>>()?;
            let mut r = Report::new(format!("relations of the iquantum group of {}", q.to_spec_string()), &["relation", "holds"]);
            for (name, y) in evals {
                r.push(vec![Cell::from(name), Cell::from(y.is_zero().to_string())]);
            }
            r
        }
        Cmd::Iqg { op: IqgOp::Braid { quiver: spec, rho, i } } => {
            let q = quiver(spec, rho)?;
            let d = DoubleAlgebra::from_hall(Arc::new(hall_algebra(&q, &cache)));
            let g = IQuantumGroup::new(&d, q.rho.clone())?;
            let i = vertex(*i, g.rank())?;
            if !g.orbit_reps().contains(&i) {
                bail!("T{} is indexed by an orbit representative; use vertex {}", i + 1, q.rho.apply(i) + 1);
            }
            let broken = g.braid_preserves_relations(i)?;
            let mut r = Report::new(format!("T{} on the iquantum group of {}", i + 1, q.to_spec_string()), &["generator", "image", "relations preserved"]);
            for l in g.generators() {
                let img = g.braid_generator(i, l)?;
                r.push(vec![Cell::from(IExpr::letter(l).to_string()), Cell::from(img.to_string()), Cell::from(broken.is_empty().to_string())]);
            }
            r
        }
        Cmd::Ihall { op: IhallOp::Mult { quiver: spec, rho, x, y } } => {
            let q = quiver(spec, rho)?;
            require_split_a1(&q)?;
            let alg = qhall::ihall::SplitRankOne::new();
            let (cx, cy) = (a1_class(x)?, a1_class(y)?);
            let p = alg.class_product(cx, cy)?;
            let mut r = Report::new(format!("[S^{} + K^{}] * [S^{} + K^{}] in split A1", cx.0, cx.1, cy.0, cy.1), &["S", "K", "coeff"]);
            for (c, s) in p.iter() {
                r.push(vec![Cell::from(c.0 as i64), Cell::from(c.1 as i64), Cell::from(s.clone())]);
            }
            r
        }
        Cmd::Ihall { op: IhallOp::DualBasis { quiver: spec, rho, m } } => {
            let q = quiver(spec, rho)?;
            require_split_a1(&q)?;
            let alg = qhall::ihall::SplitRankOne::new();
            let w = alg.dual_window(*m)?;
            let mut r = Report::new(format!("dual canonical basis L(k, {}) of split A1 over K^k <> U_a", m), &["k", "a", "basis k", "basis a", "coeff", "source"]);
            for (x, row) in w.coeffs.iter().enumerate() {
                for (y, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        r.push(vec![
                            Cell::from(w.index[x].0),
                            Cell::from(w.index[x].1 as i64),
                            Cell::from(w.index[y].0),
                            Cell::from(w.index[y].1 as i64),
                            Cell::from(c.clone()),
                            Cell::from("bar-invariant triangularization"),
                        ]);
                    }
                }
            }
            r
        }
        Cmd::Nks { op: NksOp::Ldominant { quiver, twist, rho, w, cap } } => {
            let nq = nks_quiver(quiver, *twist, rho)?;
            let vs = nq.enumerate_l_dominant(w, *cap)?;
            let mut r = Report::new(format!("l-dominant v for w = {:?}", w), &["v", "weight"]);
            for v in vs {
                let wt = nq.weight(&v, w);
                r.push(vec![Cell::from(v), Cell::from(wt)]);
            }
            r
        }
        Cmd::Nks { op: NksOp::Generators { quiver: spec, twist, rho } } => {
            let q = quiver(spec, rho)?;
            let nq = nks_quiver(spec, *twist, rho)?;
            let reps: Vec<usize> = match twist {
                TwistArg::Squared => (0..q.shape.num_vertices()).collect(),
                TwistArg::Ishift => q.rho.orbit_reps(),
            };
            let mut r = Report::new("generator vectors", &["vertex", "v", "w"]);
            for i in reps {
                let (v, w) = nq.generator_vectors(i);
                r.push(vec![Cell::from(i as i64 + 1), Cell::from(v), Cell::from(w)]);
            }
            r
        }
        Cmd::Rank1 { op: Rank1Op::EaFb { a, b } } => {
            if *a < 0 || *b < 0 {
                bail!("exponents must be nonnegative");
            }
            let mut r = Report::new(format!("E^{} F^{} over L(v, ({}, {}))", a, b, a, b), &["v", "coeff"]);
            for ((v1, v2), c) in rank1_ea_fb(*a, *b) {
                r.push(vec![Cell::from(vec![v1, v2]), Cell::from(c)]);
            }
            r
        }
        Cmd::Rank1 { op: Rank1Op::L { v, w } } => {
            let d = DoubleAlgebra::from_hall(Arc::new(hall_algebra(&split_quiver("A1")?, &cache)));
            let x = rank1_l(&d, (v[0], v[1]), (w[0], w[1]))?;
            element_report(format!("L({:?}, {:?}) in the sl2 double", v, w), &d, &x)
        }
        Cmd::Rank1 { op: Rank1Op::Il { k, m } } => {
            let p = irank1_l(*k, *m)?;
            let mut r = Report::new(format!("L({}, {}) in B and K", k, m), &["B", "K", "coeff"]);
            for ((a, b), c) in p {
                r.push(vec![Cell::from(a), Cell::from(b), Cell::from(ScalarHalf::from_int(c))]);
            }
            r
        }
        Cmd::Verify { target, list } => {
            let all = verify::criteria();
            let chosen: Vec<verify::Criterion> = if *list || target == "all" {
                all
            } else {
                vec![verify::find(target).ok_or_else(|| anyhow!("unknown verify target '{}'; try --list", target))?]
            };
            let mut r = Report::new("acceptance checks", &["id", "name", "title", "status", "detail"]);
            if *list {
                for c in chosen {
                    r.push(vec![Cell::from(c.id as i64), Cell::from(c.name), Cell::from(c.title), Cell::from(""), Cell::from("")]);
                }
                return Ok((r, true));
            }
            let outcomes: Vec<verify::Outcome> = chosen.par_iter().map(|c| (c.run)()).collect();
            let mut passed = true;
            for (c, o) in chosen.iter().zip(outcomes) {
                let (status, detail) = match o {
                    Ok(d) => ("PASS", d),
                    Err(e) => {
                        passed = false;
                        ("FAIL", e)
                    }
                };
                r.push(vec![Cell::from(c.id as i64), Cell::from(c.name), Cell::from(c.title), Cell::from(status), Cell::from(detail)]);
            }
            return Ok((r, passed));
        }
    };
    Ok((report, true))
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be positive");
            std::process::exit(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool is configured once");
    }
    let result = run(&cli).and_then(|(r, ok)| Ok((r.render(cli.format)?, ok)));
    match result {
        Ok((text, ok)) => {
            let written = match &cli.out {
                Some(p) => std::fs::write(p, &text).with_context(|| format!("writing {}", p.display())),
                None => {
                    print!("{}", text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {:#}", e);
                std::process::exit(1);
            }
            if !ok {
                std::process::exit(1);
            }
        }
        Err(e) => {
            eprintln!("error: {:#}", e);
            std::process::exit(1);
        }
    }
}
