//! Acceptance criteria. Each criterion prints one PASS/FAIL line with its
//! measured values and runtime; the process fails if any criterion fails.

use std::time::{Duration, Instant};

use fq_core::constructions::*;
use fq_core::genericity::{bernshtein_bound, bernshtein_count_2d, is_generic, Verdict};
use fq_core::lattice::IntMat;
use fq_core::measures::*;
use fq_core::polyring::{LaurentMap, LaurentPoly};
use fq_core::polytope::{is_unfolded, mixed_volume, minkowski_sum, volume, LatticePolytope, Polytope};
use fq_core::rootfind::{winding_number, Rect, TrigPoly1};
use fq_core::scalar::Scalar;
use num_complex::Complex64 as C;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn nonzero(r: &mut ChaCha8Rng) -> i64 {
    let v = r.gen_range(1..=3);
    if r.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

fn squares() -> [LatticePolytope; 2] {
    let k = || LatticePolytope::from_exponents(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
    [k(), k()]
}

fn c1_mixed_volume() -> Outcome {
    let v = mixed_volume(&squares()).map_err(|e| e.to_string())?;
    check(v == BigRational::from_integer(2.into()), format!("V = {v}"))
}

fn c2_genericity() -> Outcome {
    let mut r = rng(2);
    let mut bad = 0;
    let mut non_generic = [0usize; 2];
    for _ in 0..200 {
        let [a, b, c, d, e, f]: [i64; 6] = std::array::from_fn(|_| nonzero(&mut r));
        // [a z1 + b z2 - e, c z1 + d z2 - f]
        let q = LaurentMap::new(vec![
            LaurentPoly::real(2, &[(&[1, 0], a as f64), (&[0, 1], b as f64), (&[0, 0], -e as f64)]).unwrap(),
            LaurentPoly::real(2, &[(&[1, 0], c as f64), (&[0, 1], d as f64), (&[0, 0], -f as f64)]).unwrap(),
        ])
        .unwrap();
        let oracle = a * d - b * c != 0 && d * e - b * f != 0 && -c * e + a * f != 0;
        let got = is_generic(&q).map_err(|e| e.to_string())?.verdict;
        non_generic[0] += !oracle as usize;
        if got != if oracle { Verdict::Generic } else { Verdict::NonGeneric } {
            bad += 1;
        }
    }
    let mut bad_sq = 0;
    for _ in 0..200 {
        let a: [i64; 4] = std::array::from_fn(|_| nonzero(&mut r));
        let b: [i64; 4] = std::array::from_fn(|_| nonzero(&mut r));
        // index order: 00, 10, 01, 11
        let poly = |c: &[i64; 4]| {
            LaurentPoly::real(2, &[(&[0, 0], c[0] as f64), (&[1, 0], c[1] as f64), (&[0, 1], c[2] as f64), (&[1, 1], c[3] as f64)]).unwrap()
        };
        let q = LaurentMap::new(vec![poly(&a), poly(&b)]).unwrap();
        let oracle = a[1] * b[3] - a[3] * b[1] != 0
            && a[2] * b[3] - a[3] * b[2] != 0
            && a[0] * b[2] - a[2] * b[0] != 0
            && a[0] * b[1] - a[1] * b[0] != 0;
        non_generic[1] += !oracle as usize;
        let got = is_generic(&q).map_err(|e| e.to_string())?.verdict;
        if got != if oracle { Verdict::Generic } else { Verdict::NonGeneric } {
            bad_sq += 1;
        }
    }
    check(
        bad == 0 && bad_sq == 0,
        format!("linear: {bad}/200 disagreements ({} non-generic); squares: {bad_sq}/200 ({} non-generic)", non_generic[0], non_generic[1]),
    )
}

fn random_poly(r: &mut ChaCha8Rng) -> LaurentPoly {
    loop {
        let k = r.gen_range(3..=5);
        let terms: Vec<(Vec<i64>, C)> = (0..k)
            .map(|_| (vec![r.gen_range(-1..=2), r.gen_range(-1..=2)], C::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0))))
            .collect();
        let p = LaurentPoly::from_terms(2, terms).unwrap();
        if p.num_terms() >= 3 {
            return p;
        }
    }
}

fn c3_bernshtein() -> Outcome {
    let mut r = rng(3);
    let mut rows = Vec::new();
    let mut ok = true;
    while rows.len() < 10 {
        let q = LaurentMap::new(vec![random_poly(&mut r), random_poly(&mut r)]).unwrap();
        let bound = bernshtein_bound(&q).map_err(|e| e.to_string())?;
        if bound == 0 || is_generic(&q).map_err(|e| e.to_string())?.verdict != Verdict::Generic {
            continue;
        }
        let count = bernshtein_count_2d(&q).map_err(|e| e.to_string())?;
        ok &= count == bound;
        rows.push(format!("{count}/{bound}"));
    }
    check(ok, format!("count/mixed volume: {}", rows.join(" ")))
}

fn comb(r: i64) -> DiscreteMeasure {
    let atoms = (-r..=r).map(|k| Atom { x: vec![k as f64], w: C::new(1.0, 0.0) }).collect();
    DiscreteMeasure::new(atoms, Window::cube(1, r as f64)).unwrap()
}

fn comb_spectrum(r: i64) -> SpectrumTable {
    let entries = (-r..=r)
        .map(|k| SpectrumEntry { label: Some(vec![k]), frequency: vec![k as f64], coefficient: C::new(1.0, 0.0) })
        .collect();
    SpectrumTable { entries, window: Window::cube(1, r as f64), normalization: "comb".into() }
}

fn c4_poisson() -> Outcome {
    let mu = comb(40);
    let z = comb_spectrum(40);
    let selfdual = TestFunction::Gaussian { center: vec![0.0], sigma: 1.0 };
    let rep = poisson_check(&mu, &z, &[selfdual], 1e-10).map_err(|e| e.to_string())?;
    let d0 = rep.checks[0].discrepancy;
    let mut worst: f64 = 0.0;
    for (m, y) in [(2.0, 0.25), (-0.5, 0.1), (3.0, -1.3)] {
        let mu2 = affine_transform(&mu, &[vec![m]], &[y]).map_err(|e| e.to_string())?;
        let z2 = dual_spectrum(&z, &[vec![m]], &[y]).map_err(|e| e.to_string())?;
        let s = m.abs().max(1.0 / m.abs()).sqrt();
        let tests = [
            TestFunction::Gaussian { center: vec![0.3], sigma: s },
            TestFunction::ModulatedGaussian { center: vec![-0.4], sigma: s, xi: vec![0.7] },
        ];
        let rep = poisson_check(&mu2, &z2, &tests, 1e-10).map_err(|e| e.to_string())?;
        worst = rep.checks.iter().map(|c| c.discrepancy).fold(worst, f64::max);
    }
    check(d0 < 1e-10 && worst < 1e-10, format!("comb {d0:.2e}, affine pairs {worst:.2e}"))
}

fn c5_kurasov_sarnak() -> Outcome {
    let rep = verify_example1(&Example1Spec::kurasov_sarnak(), 500.0).map_err(|e| e.to_string())?;
    let im = rep.contour_max_im.unwrap_or(f64::INFINITY);
    let gap = rep.contour_max_gap.unwrap_or(f64::INFINITY);
    let ok = im < 1e-8 && rep.density_gap < 0.01 && gap < 1e-8 && (rep.coefficient_zero - 1.6).norm() < 1e-6;
    check(
        ok,
        format!(
            "{} roots, max|Im| {im:.1e}, density {:.5} (gap {:.2}%), enumeration vs contour {gap:.1e}, F(0) = {:.12}",
            rep.roots,
            rep.density,
            100.0 * rep.density_gap,
            rep.coefficient_zero.re
        ),
    )
}

fn c6_vanishing() -> Outcome {
    let spec = Example1Spec::kurasov_sarnak();
    let mut worst: f64 = 0.0;
    for a in 1..=5 {
        for b in 1..=5 {
            for s in [-1, 1] {
                let v = fourier_coefficient(&spec, &[s * a, s * b]).map_err(|e| e.to_string())?;
                worst = worst.max(v.norm());
            }
        }
    }
    // the other reading, "all l_j >= -1", already fails at l = 0
    let at0 = fourier_coefficient(&spec, &[0, 0]).map_err(|e| e.to_string())?.norm();
    let mut counts = Vec::new();
    let mut ok = worst < 1e-8;
    for r in [1.0, 2.0, 5.0, 10.0] {
        let t = example1_spectrum(&spec, r, 1e-8).map_err(|e| e.to_string())?;
        let g = support_bound(&spec, r).map_err(|e| e.to_string())?;
        ok &= t.entries.len() as u64 <= g;
        counts.push(format!("r={r}: {}<={g}", t.entries.len()));
    }
    check(ok, format!("max |F| on 50 labels {worst:.1e}; |F(0)| = {at0:.3} so 'all >= -1' reading fails; {}", counts.join(", ")))
}

fn c7_diffraction() -> Outcome {
    let spec = Example1Spec::kurasov_sarnak();
    let roots = enumerate_roots_example1(&spec, 1e4).map_err(|e| e.to_string())?;
    let mu = roots.to_measure().map_err(|e| e.to_string())?;
    let labels: Vec<[i64; 2]> = (-2..=2).flat_map(|a| [-2, -1, 1, 2].map(|b| [a, b])).collect();
    let exact: Vec<C> = labels.iter().map(|l| fourier_coefficient(&spec, l)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let mut errs = Vec::new();
    for r in [1e2, 1e3, 1e4] {
        let mut e: f64 = 0.0;
        for (l, v) in labels.iter().zip(&exact) {
            let f = l[0] as f64 - 0.3 * l[1] as f64;
            let emp = empirical_fourier_bohr(&mu, &[f], r).map_err(|e| e.to_string())?;
            e = e.max((emp - v).norm());
        }
        errs.push((r, e));
    }
    let c_fit = errs.iter().map(|(r, e)| r * e).fold(0.0, f64::max);
    let monotone = errs.windows(2).all(|w| w[1].1 < w[0].1);
    let last = errs[2].1;
    check(
        c_fit <= 50.0 && last <= 5.0 / 1e4 && monotone,
        format!("max error {:.2e} / {:.2e} / {:.2e} at r = 1e2/1e3/1e4, fitted C = {c_fit:.2}", errs[0].1, errs[1].1, last),
    )
}

fn c8_cut_project() -> Outcome {
    let th = 2f64.sqrt().atan();
    let cp = CutProjectSpec::new(th, 3f64.sqrt() / 5.0).map_err(|e| e.to_string())?;
    let r = 1e4;
    let labels = [(1, 0), (0, 1), (1, 1), (-1, 0), (2, -1), (1, -2), (3, 1), (-2, 3), (0, -1), (4, -3)];
    let mut worst: f64 = 0.0;
    for (l1, l2) in labels {
        let e = cutproject_fb_empirical(&cp, 1, l1, l2, r).map_err(|e| e.to_string())?;
        let c = cutproject_fb_closed(&cp, 1, l1, l2).map_err(|e| e.to_string())?;
        worst = worst.max((e - c).norm());
    }
    let m1 = cutproject_fb_empirical(&cp, 1, 0, 0, r).map_err(|e| e.to_string())?;
    let m2 = cutproject_fb_empirical(&cp, 2, 0, 0, r).map_err(|e| e.to_string())?;
    let total = (m1 + m2).re;
    check(
        worst <= 10.0 / r && (total - th.sin()).abs() < 1e-3,
        format!("max error {worst:.2e} (bound {:.0e}); F(mu1+mu2)(0) = {total:.6} vs sin = {:.6}", 10.0 / r, th.sin()),
    )
}

fn c9_approximants() -> Outcome {
    // Q = z1 - z2^2, M = (1, -1/2): roots Z/2, so the spectrum is 2 on 2Z
    let q = LaurentMap::new(vec![LaurentPoly::real(2, &[(&[1, 0], 1.0), (&[0, 2], -1.0)]).unwrap()]).unwrap();
    let m = vec![vec![Scalar::int(1)], vec![Scalar::ratio(-1, 2)]];
    let t = spectrum_rational_approx(&q, &m, 10.0).map_err(|e| e.to_string())?;
    let mut oracle_err: f64 = 0.0;
    for e in &t.entries {
        let f = e.frequency[0];
        let want = if (f / 2.0 - (f / 2.0).round()).abs() < 1e-12 { 2.0 } else { 0.0 };
        oracle_err = oracle_err.max((e.coefficient - want).norm());
    }
    let base = Example1Spec::kurasov_sarnak();
    let labels = [[0i64, 0], [1, -1], [2, -1], [1, -2], [-1, 1]];
    let exact: Vec<C> = labels.iter().map(|l| fourier_coefficient(&base, l)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let mut table = Vec::new();
    let mut gaps = Vec::new();
    for (p, qd) in [(3i64, 11i64), (9, 31), (30, 101), (120, 401)] {
        let spec = Example1Spec::new(base.s.clone(), vec![Scalar::ratio(p, qd)], base.gamma.clone(), base.t.clone()).map_err(|e| e.to_string())?;
        let pk = build_example1(&spec).map_err(|e| e.to_string())?;
        let st = spectrum_rational_approx(pk.q(), &spec.m_matrix(), 3.0).map_err(|e| e.to_string())?;
        let mut gap: f64 = 0.0;
        for (l, v) in labels.iter().zip(&exact) {
            let j = l[0] * qd - p * l[1];
            let atom = st.entries.iter().find(|e| e.label.as_ref() == Some(&vec![j])).map(|e| e.coefficient).ok_or("missing atom")?;
            gap = gap.max((atom - v).norm());
        }
        gaps.push(gap);
        table.push(format!("{p}/{qd}: {gap:.2e}"));
    }
    let last = *gaps.last().unwrap();
    check(oracle_err < 1e-10 && last < 1e-2, format!("lattice oracle {oracle_err:.1e}; convergence {}", table.join(", ")))
}

fn c10_unfolded() -> Outcome {
    let (folded_ok, _) = is_unfolded(&squares()).map_err(|e| e.to_string())?;
    let mut r = rng(10);
    let mut unfolded = 0;
    for _ in 0..20 {
        let shift = |r: &mut ChaCha8Rng| {
            let pts: Vec<Vec<f64>> = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
                .iter()
                .map(|v| vec![v[0] + r.gen_range(-1e-3..1e-3), v[1] + r.gen_range(-1e-3..1e-3)])
                .collect();
            Polytope::new(&pts).unwrap()
        };
        let pair = [shift(&mut r), shift(&mut r)];
        if is_unfolded(&pair).map_err(|e| e.to_string())?.0 {
            unfolded += 1;
        }
    }
    check(!folded_ok && unfolded == 20, format!("squares folded: {}; perturbed unfolded {unfolded}/20", !folded_ok))
}

fn random_multiset(r: &mut ChaCha8Rng, k: usize) -> Multiset {
    Multiset::from_points((0..k).map(|_| vec![r.gen_range(0.0..10.0)]).collect())
}

fn random_lattice_poly(r: &mut ChaCha8Rng) -> LatticePolytope {
    loop {
        let k = r.gen_range(3..6);
        let pts: Vec<Vec<i64>> = (0..k).map(|_| vec![r.gen_range(-2..3), r.gen_range(-2..3)]).collect();
        let p = LatticePolytope::from_exponents(&pts).unwrap();
        if p.dim() == 2 {
            return p;
        }
    }
}

fn unimodular(r: &mut ChaCha8Rng) -> IntMat {
    let mut m = [[1i64, 0], [0, 1]];
    for _ in 0..4 {
        let k = r.gen_range(-2..=2);
        let (i, j) = if r.gen_bool(0.5) { (0, 1) } else { (1, 0) };
        for c in 0..2 {
            m[i][c] += k * m[j][c];
        }
        if r.gen_bool(0.3) {
            m.swap(0, 1);
        }
    }
    IntMat::from_rows(&[m[0].to_vec(), m[1].to_vec()]).unwrap()
}

fn c11_properties() -> Outcome {
    let mut r = rng(11);
    let mut fails = Vec::new();
    for _ in 0..50 {
        let k = r.gen_range(1..6);
        let (a, b, c) = (random_multiset(&mut r, k), random_multiset(&mut r, k), random_multiset(&mut r, k));
        let (ab, ba, bc, ac) = (multiset_distance(&a, &b), multiset_distance(&b, &a), multiset_distance(&b, &c), multiset_distance(&a, &c));
        if multiset_distance(&a, &a) != 0.0 || ab != ba || ac > ab + bc + 1e-12 || (a.points != b.points && ab <= 0.0) {
            fails.push("metric");
        }
    }
    for _ in 0..20 {
        let (p, q, s) = (random_lattice_poly(&mut r), random_lattice_poly(&mut r), random_lattice_poly(&mut r));
        let v = |x: &LatticePolytope, y: &LatticePolytope| mixed_volume(&[x.clone(), y.clone()]).unwrap();
        let pq = minkowski_sum(&p, &q).unwrap();
        let two = BigRational::from_integer(2.into());
        if v(&p, &q) != v(&q, &p) || v(&pq, &s) != v(&p, &s) + v(&q, &s) || v(&p, &p) != two * volume(&p).unwrap() {
            fails.push("mixed volume");
        }
    }
    let ks = TrigPoly1::from_trig_map(&build_example1(&Example1Spec::kurasov_sarnak()).unwrap()).unwrap();
    let h = ks.imag_band();
    for _ in 0..20 {
        let x0 = r.gen_range(-20.0..20.0) + 0.01234;
        let x1 = x0 + r.gen_range(1.0..6.0);
        let cut = x0 + (x1 - x0) * r.gen_range(0.2..0.8);
        let whole = winding_number(&ks, &Rect::new(x0, x1, -h, h).unwrap());
        let left = winding_number(&ks, &Rect::new(x0, cut, -h, h).unwrap());
        let right = winding_number(&ks, &Rect::new(cut, x1, -h, h).unwrap());
        match (whole, left, right) {
            (Ok(w), Ok(a), Ok(b)) if w == a + b => {}
            _ => fails.push("winding"),
        }
    }
    let generic = LaurentMap::new(vec![
        LaurentPoly::real(2, &[(&[0, 0], 1.0), (&[1, 0], 2.0), (&[0, 1], 3.0), (&[1, 1], 5.0)]).unwrap(),
        LaurentPoly::real(2, &[(&[0, 0], -2.0), (&[1, 0], 1.0), (&[0, 1], 7.0), (&[1, 1], 1.0)]).unwrap(),
    ])
    .unwrap();
    let degenerate = LaurentMap::new(vec![
        LaurentPoly::real(2, &[(&[0, 0], 1.0), (&[1, 0], 2.0), (&[0, 1], 3.0), (&[1, 1], 4.0)]).unwrap(),
        LaurentPoly::real(2, &[(&[0, 0], 5.0), (&[1, 0], 1.0), (&[0, 1], 7.0), (&[1, 1], 2.0)]).unwrap(),
    ])
    .unwrap();
    let coarse = LaurentMap::new(vec![LaurentPoly::real(2, &[(&[0, 0], 1.0), (&[2, 0], 2.0), (&[0, 2], 3.0)]).unwrap()]).unwrap();
    for _ in 0..10 {
        let a = unimodular(&mut r);
        for q in [&generic, &degenerate] {
            let t = q.gl_transform(&a).unwrap();
            if is_generic(q).unwrap().verdict != is_generic(&t).unwrap().verdict || q.is_minimal() != t.is_minimal() {
                fails.push("gl invariance");
            }
        }
        if coarse.is_minimal() != coarse.gl_transform(&a).unwrap().is_minimal() {
            fails.push("gl invariance");
        }
    }
    check(fails.is_empty(), if fails.is_empty() { "50 metric triples, 20 mixed-volume triples, 20 partitions, 10 unimodular maps".into() } else { format!("failed: {fails:?}") })
}

fn c12_growth() -> Outcome {
    let g1 = growth_exponent(&comb(1024)).map_err(|e| e.to_string())?;
    let r = 256i64;
    let atoms = (-r..=r).flat_map(|i| (-r..=r).map(move |j| Atom { x: vec![i as f64, j as f64], w: C::new(1.0, 0.0) })).collect();
    let g2 = growth_exponent(&DiscreteMeasure::new(atoms, Window::cube(2, r as f64)).unwrap()).map_err(|e| e.to_string())?;
    let mut atoms = Vec::new();
    for k in 1..=20 {
        let w = 2f64.powi(k);
        atoms.push(Atom { x: vec![k as f64 - 2f64.powi(-k)], w: C::new(w, 0.0) });
        atoms.push(Atom { x: vec![k as f64], w: C::new(-w, 0.0) });
    }
    let vmt = DiscreteMeasure::new(atoms, Window::cube(1, 21.0)).unwrap();
    let g3 = growth_exponent(&vmt).map_err(|e| e.to_string())?;
    let ok = (g1.exponent - 1.0).abs() < 0.05 && (g2.exponent - 2.0).abs() < 0.05 && g3.super_polynomial && !g1.super_polynomial && !g2.super_polynomial;
    check(
        ok,
        format!("comb {:.4}, Z^2 comb {:.4}, truncated signed measure exponent {:.2} flagged {}", g1.exponent, g2.exponent, g3.exponent, g3.super_polynomial),
    )
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 12] = [
        ("mixed volume of the square pair", Duration::from_millis(1), c1_mixed_volume),
        ("genericity classifier vs determinant conditions", Duration::from_secs(5), c2_genericity),
        ("Bernshtein root count", Duration::from_secs(30), c3_bernshtein),
        ("Poisson summation for combs", Duration::from_secs(1), c4_poisson),
        ("Kurasov-Sarnak instance", Duration::from_secs(60), c5_kurasov_sarnak),
        ("spectrum vanishing and support bound", Duration::from_secs(60), c6_vanishing),
        ("diffraction cross-validation", Duration::from_secs(300), c7_diffraction),
        ("cut-and-project spectra", Duration::from_secs(120), c8_cut_project),
        ("rational approximants", Duration::from_secs(120), c9_approximants),
        ("unfoldedness", Duration::from_secs(1), c10_unfolded),
        ("property suites", Duration::from_secs(60), c11_properties),
        ("growth probes", Duration::from_secs(5), c12_growth),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let out = f();
        let dt = t0.elapsed();
        let in_time = dt <= *budget;
        let (pass, detail) = match out {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        let timing = format!("{:.3}s of {:.3}s{}", dt.as_secs_f64(), budget.as_secs_f64(), if in_time { "" } else { " OVER BUDGET" });
        println!("{} {:>2} {name}: {detail} [{timing}]", if pass { "PASS" } else { "FAIL" }, i + 1);
        failed += !pass as usize;
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
