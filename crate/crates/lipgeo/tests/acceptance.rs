//! Acceptance suite: one test per acceptance criterion, each printing a
//! PASS line (run with `--nocapture` to see them). Tolerances are pinned
//! here, not configurable.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lipgeo::complexes::realize::realize_model;
use lipgeo::complexes::HolderComplex;
use lipgeo::exponents::arc::t_series;
use lipgeo::exponents::series::Series;
use lipgeo::exponents::{Arc, ExtendedExponent, FunctionExpr, Parameterization, PuiseuxSeries};
use lipgeo::metriclab::{
    self, cusp_branch_decomposition, cusp_pair_model, horn_model, split_horn_decomposition,
    LneMode, NumericOrder, ScaleSamplePlan,
};
use lipgeo::pizza::{extract_pizza, AbstractPizza, ExtractOptions, PizzaSlice, WidthFunction};

const TOL: f64 = 0.05;

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn rat_int(p: i64) -> BigRational {
    BigRational::from_integer(p.into())
}

fn fin(p: i64) -> ExtendedExponent {
    ExtendedExponent::from_int(p)
}

/// Random label p/q <= 5 with small denominator.
fn random_beta(rng: &mut ChaCha8Rng) -> BigRational {
    let q = rng.gen_range(1..=4i64);
    let p = rng.gen_range(q..=5 * q);
    rat(p, q)
}

/// Random multigraph complex: <= 12 vertices, <= 20 edges, no self-loops,
/// isolated vertices dropped.
fn random_complex(rng: &mut ChaCha8Rng) -> HolderComplex {
    loop {
        let n = rng.gen_range(2..=12usize);
        let m = rng.gen_range(1..=20usize);
        let mut edges = Vec::with_capacity(m);
        for k in 0..m {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n);
            if a == b {
                b = (b + 1) % n;
            }
            edges.push((format!("e{k}"), format!("v{a}"), format!("v{b}"), random_beta(rng)));
        }
        let used: std::collections::BTreeSet<String> = edges
            .iter()
            .flat_map(|(_, a, b, _)| [a.clone(), b.clone()])
            .collect();
        let vertices: Vec<String> = used.into_iter().collect();
        if let Ok(c) = HolderComplex::new(vertices, edges) {
            return c;
        }
    }
}

fn random_cycle(rng: &mut ChaCha8Rng) -> HolderComplex {
    let n = rng.gen_range(2..=8usize);
    let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    HolderComplex::new(
        vs.clone(),
        (0..n)
            .map(|i| (format!("e{i}"), vs[i].clone(), vs[(i + 1) % n].clone(), random_beta(rng)))
            .collect(),
    )
    .unwrap()
}

#[test]
fn criterion_01_canonicalization_confluence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    for case in 0..1000 {
        let c = random_complex(&mut rng);
        let reference = c.canonicalize();
        assert!(reference.is_canonical().0, "case {case}");
        for pivot in 0..10u64 {
            let mut prng = ChaCha8Rng::seed_from_u64(case * 10 + pivot);
            let alt = c.canonicalize_with_rng(&mut prng);
            assert!(
                reference.equivalent(&alt).is_some(),
                "case {case} pivot {pivot}: results not isomorphic"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}");
    println!("PASS criterion 1: canonicalization confluent on 1000 complexes x 10 pivot orders ({elapsed:?})");
}

#[test]
fn criterion_02_subdivision_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    for case in 0..500 {
        let c = random_complex(&mut rng);
        // subdivide a random edge into (beta, beta') with beta' >= beta
        let e = c.edges()[rng.gen_range(0..c.edges().len())].clone();
        let bump = rat(rng.gen_range(0..=8i64), 2);
        let sub = c.with_edge_subdivided(&e.id, &e.beta + bump).unwrap();
        assert!(c.equivalent(&sub).is_some(), "case {case}: subdivision changed the class");
        // loop-label perturbation on the canonical form: raise one label of
        // a loop pair; the min rule restores it
        let canon = c.canonicalize();
        let loop_vertex = canon
            .vertices()
            .iter()
            .find(|v| matches!(canon.classify_vertex(v), Ok(lipgeo::complexes::VertexClass::Loop)));
        if let Some(v) = loop_vertex {
            let eid = canon
                .edges()
                .iter()
                .find(|e| &e.ends.0 == v || &e.ends.1 == v)
                .map(|e| e.id.clone())
                .unwrap();
            let perturbed = HolderComplex::new(
                canon.vertices().to_vec(),
                canon
                    .edges()
                    .iter()
                    .map(|e| {
                        let beta = if e.id == eid {
                            &e.beta + rat(rng.gen_range(1..=6i64), 2)
                        } else {
                            e.beta.clone()
                        };
                        (e.id.clone(), e.ends.0.clone(), e.ends.1.clone(), beta)
                    })
                    .collect(),
            )
            .unwrap();
            assert!(
                canon.equivalent(&perturbed).is_some(),
                "case {case}: loop-label perturbation changed the class"
            );
        }
    }
    println!("PASS criterion 2: subdivision and loop-label invariance on 500 complexes");
}

#[test]
fn criterion_03_horn_consistency() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let plan = ScaleSamplePlan { resolution: 9, ..Default::default() };
    for case in 0..100 {
        let c = random_cycle(&mut rng);
        let expected = c.edges().iter().map(|e| e.beta.clone()).min().unwrap();
        let horn = c.horn_exponent().unwrap();
        assert_eq!(horn, ExtendedExponent::Finite(expected.clone()), "case {case}");
        let r = realize_model(&c);
        let numeric = metriclab::horn_exponent_numeric(&r.model, &plan).unwrap();
        let want = expected.to_f64().unwrap();
        assert!(
            (numeric.exponent - want).abs() < TOL,
            "case {case}: numeric {} vs exact {want}",
            numeric.exponent
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 300, "took {elapsed:?}");
    println!("PASS criterion 3: horn exponent exact and numeric within {TOL} on 100 cycles ({elapsed:?})");
}

fn random_arc(rng: &mut ChaCha8Rng) -> Arc {
    let pool = [rat(1, 1), rat(5, 4), rat(3, 2), rat(2, 1), rat(5, 2), rat(3, 1), rat(7, 2)];
    let mut coords = vec![t_series()];
    for _ in 0..2 {
        let k = rng.gen_range(0..=3usize);
        let mut terms = Vec::new();
        for _ in 0..k {
            let e = pool[rng.gen_range(0..pool.len())].clone();
            let c = rat(rng.gen_range(-4..=4i64), rng.gen_range(1..=3i64));
            terms.push((e, c));
        }
        coords.push(Series::from_terms(terms));
    }
    Arc::new(Parameterization::Coordinate, coords).unwrap()
}

#[test]
fn criterion_04_ultrametric() {
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    for case in 0..1000 {
        let g1 = random_arc(&mut rng);
        let g2 = random_arc(&mut rng);
        let g3 = random_arc(&mut rng);
        let t13 = g1.tord(&g3).unwrap();
        let t12 = g1.tord(&g2).unwrap();
        let t23 = g2.tord(&g3).unwrap();
        let lower = t12.min_of(t23);
        assert!(t13 >= lower, "case {case}: tord(g1,g3)={t13} < min={lower}");
    }
    // numeric side: inner estimate <= outer estimate + tolerance
    let plan = ScaleSamplePlan { resolution: 9, ..Default::default() };
    let mut checked = 0;
    'outer: for beta in [rat_int(1), rat(3, 2), rat_int(2)] {
        let m = horn_model(&beta, 12);
        let arcs: Vec<Arc> = (0..12).map(|i| m.patches[i].arc_at(&rat_int(0)).unwrap()).collect();
        let rep = metriclab::lne_report(&m, &arcs, LneMode::Full, None, &plan, TOL).unwrap();
        for pair in &rep.pairs {
            let (NumericOrder::Estimate(o), NumericOrder::Estimate(i)) = (&pair.outer, &pair.inner)
            else {
                continue;
            };
            assert!(
                i.exponent <= o.exponent + TOL,
                "inner {} > outer {} + tol",
                i.exponent,
                o.exponent
            );
            checked += 1;
            if checked >= 100 {
                break 'outer;
            }
        }
    }
    assert!(checked >= 100, "only {checked} sampled pairs");
    println!("PASS criterion 4: ultrametric exact on 1000 triples; inner <= outer + {TOL} on {checked} pairs");
}

#[test]
fn criterion_05_lne_criterion() {
    let plan = ScaleSamplePlan::default();
    for beta in [rat_int(1), rat(3, 2), rat_int(2)] {
        let m = horn_model(&beta, 12);
        let arcs: Vec<Arc> = (0..12).map(|i| m.patches[i].arc_at(&rat_int(0)).unwrap()).collect();
        assert!(arcs.len() >= 12);
        let rep = metriclab::lne_report(&m, &arcs, LneMode::Full, None, &plan, TOL).unwrap();
        assert_eq!(rep.violations, 0, "beta {beta}: {:?}", rep.pairs);
    }
    let cusp = cusp_pair_model();
    let arcs = vec![
        cusp.patches[0].arc_at(&rat_int(0)).unwrap(),
        cusp.patches[1].arc_at(&rat_int(0)).unwrap(),
    ];
    let rep = metriclab::lne_report(&cusp, &arcs, LneMode::Full, None, &plan, TOL).unwrap();
    assert_eq!(rep.violations, 1);
    let pair = &rep.pairs[0];
    let NumericOrder::Estimate(outer) = &pair.outer else { panic!() };
    let NumericOrder::Estimate(inner) = &pair.inner else { panic!() };
    assert!((outer.exponent - 1.5).abs() < TOL, "tord {}", outer.exponent);
    assert!((inner.exponent - 1.0).abs() < TOL, "itord {}", inner.exponent);
    println!(
        "PASS criterion 5: horns LNE-clean; cusp witness tord {:.3} vs itord {:.3}",
        outer.exponent, inner.exponent
    );
}

fn w_expr() -> FunctionExpr {
    FunctionExpr::mono(rat_int(1), rat_int(0), rat_int(1))
}

fn u_pow(p: BigRational) -> FunctionExpr {
    FunctionExpr::mono(rat_int(1), p, rat_int(0))
}

fn mu_q() -> WidthFunction {
    WidthFunction { a: rat_int(1), b: rat_int(0) }
}

#[test]
fn criterion_06_pizza_ground_truth() {
    let opts = ExtractOptions::default();
    // f = |w - u^2| on the 1-triangle
    let f = FunctionExpr::Abs(Box::new(FunctionExpr::Sub(
        Box::new(w_expr()),
        Box::new(u_pow(rat_int(2))),
    )));
    let ex = extract_pizza(&f, &rat_int(1), &opts).unwrap();
    let expected = AbstractPizza {
        triangle_beta: rat_int(1),
        slices: vec![
            PizzaSlice {
                q_in: fin(2),
                q_out: ExtendedExponent::Infinity,
                beta: fin(2),
                mu: mu_q(),
            },
            PizzaSlice {
                q_in: ExtendedExponent::Infinity,
                q_out: fin(1),
                beta: fin(1),
                mu: mu_q(),
            },
        ],
    };
    assert_eq!(ex.pizza, expected);

    // f = w: one slice, law mu = q
    let ex_w = extract_pizza(&w_expr(), &rat_int(1), &opts).unwrap();
    assert_eq!(ex_w.pizza.slices.len(), 1);
    assert_eq!(ex_w.pizza.slices[0].mu, mu_q());
    let (lo, hi) = if ex_w.pizza.slices[0].q_in <= ex_w.pizza.slices[0].q_out {
        (&ex_w.pizza.slices[0].q_in, &ex_w.pizza.slices[0].q_out)
    } else {
        (&ex_w.pizza.slices[0].q_out, &ex_w.pizza.slices[0].q_in)
    };
    assert_eq!((lo, hi), (&fin(1), &ExtendedExponent::Infinity));

    // f = u on the 2-triangle: the point pizza
    let ex_u = extract_pizza(&u_pow(rat_int(1)), &rat_int(2), &opts).unwrap();
    assert_eq!(ex_u.pizza.slices.len(), 1);
    assert!(ex_u.pizza.slices[0].is_point());
    assert_eq!(ex_u.pizza.slices[0].q_in, fin(1));
    assert_eq!(ex_u.pizza.slices[0].beta, fin(2));

    // every scanned arc agrees with the numerical oracle
    let mut checked = 0usize;
    for (fx, ex) in [(&f, &ex), (&w_expr(), &ex_w)] {
        for (w, q) in &ex.probes {
            let Some(q) = q.as_rational() else { continue };
            let q = q.to_f64().unwrap();
            let samples: Vec<(f64, f64)> = (12..=24)
                .map(|k| {
                    let t = 2f64.powi(-k);
                    (t, fx.eval_f64(t, w.eval_f64(t)).abs())
                })
                .collect();
            if samples.iter().any(|&(_, v)| v < 1e-300) {
                continue;
            }
            let est = metriclab::estimate_order(&samples).unwrap();
            assert!(
                (est.exponent - q).abs() < TOL,
                "arc {w}: symbolic {q} vs numeric {}",
                est.exponent
            );
            checked += 1;
        }
    }
    println!("PASS criterion 6: ground-truth pizzas exact; {checked} scanned arcs within {TOL} of the oracle");
}

/// Random admissible expression with integer w-powers (swap-compatible).
fn random_function(rng: &mut ChaCha8Rng) -> FunctionExpr {
    fn leaf(rng: &mut ChaCha8Rng) -> FunctionExpr {
        let c = [rat_int(1), rat_int(-1), rat_int(2), rat(1, 2), rat_int(3), rat_int(-2)]
            [rng.gen_range(0..6)]
        .clone();
        let pu = rat_int(rng.gen_range(0..=3));
        let pw = rat_int(rng.gen_range(0..=2));
        FunctionExpr::mono(c, pu, pw)
    }
    fn node(rng: &mut ChaCha8Rng, depth: usize) -> FunctionExpr {
        if depth == 0 || rng.gen_bool(0.35) {
            return leaf(rng);
        }
        let a = Box::new(node(rng, depth - 1));
        let b = Box::new(node(rng, depth - 1));
        match rng.gen_range(0..6) {
            0 => FunctionExpr::Add(a, b),
            1 => FunctionExpr::Sub(a, b),
            2 => FunctionExpr::Mul(a, b),
            3 => FunctionExpr::Min(a, b),
            4 => FunctionExpr::Max(a, b),
            _ => FunctionExpr::Abs(a),
        }
    }
    FunctionExpr::Abs(Box::new(node(rng, 2)))
}

#[test]
fn criterion_07_contact_equivalence_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    let opts = ExtractOptions::default();
    let scales = [rat_int(2), rat(1, 2), rat_int(3), rat(7, 3)];
    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < 50 {
        attempts += 1;
        assert!(attempts < 600, "too many extraction attempts ({done} successes)");
        let f = random_function(&mut rng);
        let Ok(ex) = extract_pizza(&f, &rat_int(1), &opts) else {
            continue;
        };
        // positive rational rescaling never changes the pizza
        let c = scales[done % scales.len()].clone();
        let ex_scaled = extract_pizza(&f.scaled(&c), &rat_int(1), &opts).unwrap();
        assert_eq!(ex.pizza, ex_scaled.pizza, "scaling changed the pizza of {f:?}");
        // boundary swap reverses the pizza; unoriented equivalence holds
        let swapped = f.boundary_swap(&rat_int(1)).unwrap();
        let ex_swap = extract_pizza(&swapped, &rat_int(1), &opts).unwrap();
        assert_eq!(ex_swap.pizza, ex.pizza.reversed(), "swap of {f:?}");
        assert!(ex.pizza.equivalent(&ex_swap.pizza, false).unwrap());
        done += 1;
    }
    println!("PASS criterion 7: scaling and boundary-swap invariance on {done} random functions ({attempts} attempts)");
}

#[test]
fn criterion_08_generic_projection() {
    let plan = ScaleSamplePlan { resolution: 5, ..Default::default() };
    let m = horn_model(&rat_int(2), 8);
    let rep = metriclab::projection_experiment(&m, 100, 808, &plan, 2.0, TOL).unwrap();
    assert!(
        rep.fraction_within >= 0.95,
        "only {}% within tolerance",
        rep.fraction_within * 100.0
    );
    assert!(
        (rep.axis_plane_estimate - 1.0).abs() < TOL,
        "axis plane {}",
        rep.axis_plane_estimate
    );
    println!(
        "PASS criterion 8: {}/100 planes within {TOL} of 2; axis plane {:.3}",
        (rep.fraction_within * 100.0).round(),
        rep.axis_plane_estimate
    );
}

#[test]
fn criterion_09_tangent_cone() {
    let plan = ScaleSamplePlan::default();
    for (beta, expect) in [(rat(3, 2), 0.5), (rat_int(2), 1.0)] {
        let m = horn_model(&beta, 12);
        let rep = metriclab::tangent_cone_sample(&m, &plan).unwrap();
        let d = rep.decay.exponent();
        assert!((d - expect).abs() < TOL, "beta {beta}: decay {d} expected {expect}");
    }
    let cone = horn_model(&rat_int(1), 12);
    let rep = metriclab::tangent_cone_sample(&cone, &plan).unwrap();
    assert!(
        rep.final_hausdorff <= rep.mesh_tolerance,
        "hausdorff {} above mesh tolerance {}",
        rep.final_hausdorff,
        rep.mesh_tolerance
    );
    println!("PASS criterion 9: rescaled-link decay matches beta-1; cone limit within mesh tolerance");
}

/// Random valid pizza: chained slices with affine laws below the identity.
fn random_pizza(rng: &mut ChaCha8Rng) -> AbstractPizza {
    let n = rng.gen_range(1..=4usize);
    let qs: Vec<ExtendedExponent> = {
        let mut v = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            if rng.gen_bool(0.2) {
                v.push(ExtendedExponent::Infinity);
            } else {
                v.push(ExtendedExponent::Finite(rat(rng.gen_range(1..=9i64), rng.gen_range(1..=2i64)).max(rat_int(1))));
            }
        }
        v
    };
    let mut slices = Vec::with_capacity(n);
    for i in 0..n {
        let (q_in, q_out) = (qs[i].clone(), qs[i + 1].clone());
        if q_in == q_out {
            let beta = rat(rng.gen_range(1..=6i64), 1);
            slices.push(PizzaSlice::point(q_in, beta));
            continue;
        }
        let (lo, hi) = if q_in <= q_out { (&q_in, &q_out) } else { (&q_out, &q_in) };
        let lo_r = lo.as_rational().expect("lower endpoint finite").clone();
        // slope in (0, 1], intercept keeping 1 <= mu(q) <= q on the interval
        let a = [rat(1, 2), rat_int(1), rat(1, 3), rat(2, 3)][rng.gen_range(0..4)].clone();
        let b_max = (BigRational::from_integer(1.into()) - &a) * &lo_r;
        let b_min = BigRational::from_integer(1.into()) - &a * &lo_r;
        let b = if rng.gen_bool(0.5) { b_max.clone() } else { (b_min + &b_max) / rat_int(2) };
        // keep mu <= q at the hi end too (slope <= 1 makes it automatic)
        let mu = WidthFunction { a, b };
        let v_in = mu.eval(&q_in).unwrap();
        let v_out = mu.eval(&q_out).unwrap();
        let beta = v_in.min_of(v_out);
        let _ = hi;
        slices.push(PizzaSlice { q_in, q_out, beta, mu });
    }
    let triangle_beta = slices
        .iter()
        .map(|s| s.beta.clone())
        .min()
        .unwrap()
        .as_rational()
        .cloned()
        .unwrap_or_else(|| rat_int(1));
    AbstractPizza { triangle_beta, slices }
}

/// Split one interval slice of `p` at an interior order (same law): the
/// result minimalizes back to `p`.
fn subdivide_pizza(p: &AbstractPizza, rng: &mut ChaCha8Rng) -> AbstractPizza {
    let mut slices = Vec::new();
    let mut split_done = false;
    for s in &p.slices {
        if !split_done && !s.is_point() {
            if let (Some(qi), Some(qo)) = (s.q_in.as_rational(), s.q_out.as_rational()) {
                let mid = (qi + qo) / rat_int(2);
                let mid_e = ExtendedExponent::Finite(mid);
                let v_in = s.mu.eval(&s.q_in).unwrap();
                let v_mid = s.mu.eval(&mid_e).unwrap();
                let v_out = s.mu.eval(&s.q_out).unwrap();
                slices.push(PizzaSlice {
                    q_in: s.q_in.clone(),
                    q_out: mid_e.clone(),
                    beta: v_in.clone().min_of(v_mid.clone()),
                    mu: s.mu.clone(),
                });
                slices.push(PizzaSlice {
                    q_in: mid_e,
                    q_out: s.q_out.clone(),
                    beta: v_mid.min_of(v_out),
                    mu: s.mu.clone(),
                });
                split_done = true;
                continue;
            }
        }
        slices.push(s.clone());
    }
    let _ = rng;
    AbstractPizza { triangle_beta: p.triangle_beta.clone(), slices }
}

#[test]
fn criterion_10_structural_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(10010);
    // idempotence on 1000 fuzzed inputs of each kind
    for _ in 0..1000 {
        let c = random_complex(&mut rng);
        let canon = c.canonicalize();
        assert_eq!(canon.canonicalize(), canon);
    }
    let mut pizzas = Vec::new();
    let mut tries = 0;
    while pizzas.len() < 1000 {
        tries += 1;
        assert!(tries < 4000);
        let p = random_pizza(&mut rng);
        if p.is_valid() {
            pizzas.push(p);
        }
    }
    for p in &pizzas {
        let m = p.minimalize().unwrap();
        assert_eq!(m.minimalize().unwrap(), m);
    }
    // equivalence relations on fuzzed corpora
    for p in pizzas.iter().take(200) {
        let sub = subdivide_pizza(p, &mut rng);
        assert!(sub.is_valid(), "{:?} -> {:?}", p, sub.validate());
        let rev = p.reversed();
        // reflexive / symmetric / transitive across {p, sub, rev}
        assert!(p.equivalent(p, true).unwrap());
        assert!(p.equivalent(&sub, true).unwrap());
        assert!(sub.equivalent(p, true).unwrap());
        assert!(p.equivalent(&rev, false).unwrap());
        assert!(rev.equivalent(p, false).unwrap());
        let third = subdivide_pizza(&sub, &mut rng);
        if sub.equivalent(&third, true).unwrap() && p.equivalent(&sub, true).unwrap() {
            assert!(p.equivalent(&third, true).unwrap());
        }
    }
    for _ in 0..100 {
        let c = random_complex(&mut rng);
        let e = c.edges()[rng.gen_range(0..c.edges().len())].clone();
        let sub = c.with_edge_subdivided(&e.id, &e.beta + rat_int(1)).unwrap();
        let sub2 = sub.with_edge_subdivided(&format!("{}a", e.id), &e.beta + rat_int(2)).unwrap();
        assert!(c.equivalent(&c).is_some());
        assert!(c.equivalent(&sub).is_some());
        assert!(sub.equivalent(&c).is_some());
        assert!(sub.equivalent(&sub2).is_some());
        assert!(c.equivalent(&sub2).is_some());
    }
    // pancake labels
    let plan = ScaleSamplePlan { resolution: 9, ..Default::default() };
    let beta = rat(3, 2);
    let horn = horn_model(&beta, 12);
    let rep = metriclab::pancake_check(&horn, &split_horn_decomposition(&beta, 12), &plan, TOL).unwrap();
    assert!(rep.valid && !rep.minimal, "split horn: {rep:?}");
    let cusp = cusp_pair_model();
    let rep = metriclab::pancake_check(&cusp, &cusp_branch_decomposition(), &plan, TOL).unwrap();
    assert!(rep.valid && rep.minimal, "cusp branches: {rep:?}");
    println!("PASS criterion 10: idempotence, equivalence laws, and pancake minimality labels");
}

/// Extra cross-module check asked of the realization: tangent cones of
/// realized equivalent complexes have the same ray structure.
#[test]
fn realized_equivalent_complexes_share_tangent_rays() {
    let cyc = |labels: &[BigRational]| {
        let n = labels.len();
        let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        HolderComplex::new(
            vs.clone(),
            (0..n)
                .map(|i| (format!("e{i}"), vs[i].clone(), vs[(i + 1) % n].clone(), labels[i].clone()))
                .collect(),
        )
        .unwrap()
    };
    let plan = ScaleSamplePlan { resolution: 9, ..Default::default() };
    let a = cyc(&[rat_int(2), rat_int(3), rat_int(5)]);
    let b = cyc(&[rat_int(2), rat_int(7), rat_int(9), rat_int(11)]);
    assert!(a.equivalent(&b).is_some());
    let ra = metriclab::tangent_cone_sample(&realize_model(&a).model, &plan).unwrap();
    let rb = metriclab::tangent_cone_sample(&realize_model(&b).model, &plan).unwrap();
    // both models hug the scale axis: a single tangent ray each
    assert_eq!(ra.candidate_count, rb.candidate_count);
    assert_eq!(ra.candidate_count, 1);
}

/// The resolution-bound convention end to end: an identically-zero
/// substitution is exactly infinite, not "large".
#[test]
fn resolution_bound_convention() {
    let f = FunctionExpr::Sub(Box::new(w_expr()), Box::new(u_pow(rat_int(2))));
    let arc = Arc::triangle_arc(Series::monomial(rat_int(2), rat_int(1)));
    let bound = lipgeo::exponents::default_bound();
    let o = lipgeo::exponents::ord_on_arc(&f, &arc, &bound).unwrap();
    assert_eq!(
        o,
        lipgeo::exponents::OrderBound::Exact(ExtendedExponent::Infinity)
    );
    let _ = PuiseuxSeries::zero();
}
