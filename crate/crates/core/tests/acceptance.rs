//! Acceptance gate. Every criterion runs, prints one PASS/FAIL line, and the
//! test fails if any criterion fails.
//!
//! Run with `cargo test -p metricstat --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use metricstat::circular::{
    circ_distance, circular_frechet, naive_mean, resultant, resultant_mean, Angle, CircularMinimum, Direction,
    DEFAULT_RESOLUTION,
};
use metricstat::datasets;
use metricstat::editdist::{
    builtin_dataset, edit_script, levenshtein, replay, spelling_variability, Levenshtein, WordForm,
};
use metricstat::frechet::{distance_matrix, FrechetOptions};
use metricstat::groups::{group_variability, GroupSpec};
use metricstat::inference::{permutation_test_with, PermMode, PermTestConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn pennec() -> Vec<Angle> {
    datasets::angles("pennec6").unwrap()
}

fn forms(xs: &[&str]) -> Vec<WordForm> {
    xs.iter().map(|s| WordForm::ingest(s).unwrap()).collect()
}

fn random_word(rng: &mut ChaCha8Rng) -> String {
    let alphabet = ['a', 'e', 'o', 'l', 'd', 'h', 'þ'];
    let len = rng.gen_range(0..7);
    (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
}

fn c1_circular_mean() -> Check {
    let (r, elapsed) = timed(|| circular_frechet(&pennec(), 2.0, DEFAULT_RESOLUTION).unwrap());
    let m = r.result.minimizers.as_slice();
    ensure(m.len() == 1, format!("expected one minimizer, got {m:?}"))?;
    let (c, v) = (m[0].radians(), r.result.value);
    ensure((c + 1.59).abs() <= 0.05, format!("minimizer {c}"))?;
    ensure((v - 19.0).abs() <= 0.2, format!("value {v}"))?;
    ensure(elapsed < Duration::from_millis(100), format!("runtime {elapsed:?}"))?;
    Ok(format!("minimizer {c:.5}, value {v:.5}, {elapsed:?}"))
}

fn c2_circular_median() -> Check {
    let r = circular_frechet(&pennec(), 1.0, DEFAULT_RESOLUTION).unwrap();
    let step = 2.0 * PI / DEFAULT_RESOLUTION as f64;
    let [CircularMinimum::Arc { start, end }] = r.minima[..] else {
        return Err(format!("expected one arc, got {:?}", r.minima));
    };
    ensure((start.radians() + 2.12).abs() <= step, format!("start {}", start.radians()))?;
    ensure((end.radians() + 1.08).abs() <= step, format!("end {}", end.radians()))?;
    ensure((r.result.value - 9.39).abs() <= 0.1, format!("value {}", r.result.value))?;
    Ok(format!("arc [{}, {}], value {:.5}", start.radians(), end.radians(), r.result.value))
}

fn c3_resultant() -> Check {
    let r = resultant(&pennec()).unwrap();
    ensure((r.x - 0.0104).abs() <= 0.02, format!("x {}", r.x))?;
    ensure((r.y + 0.00815).abs() <= 0.02, format!("y {}", r.y))?;
    let naive = naive_mean(&datasets::PENNEC6).unwrap();
    ensure((naive - 0.504).abs() <= 0.001, format!("naive mean {naive}"))?;
    let direction = match resultant_mean(&pennec()).unwrap() {
        Direction::Angle(a) => format!("{:.4}", a.radians()),
        Direction::NoDirection => "none".into(),
    };
    Ok(format!(
        "resultant ({:.5}, {:.5}), direction {direction} (informational), naive {naive:.4}",
        r.x, r.y
    ))
}

fn c4_edit_distance() -> Check {
    ensure(levenshtein("OLD", "HALDE") == 3, "OLD -> HALDE")?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0;
    for _ in 0..1000 {
        let (a, b, c) = (random_word(&mut rng), random_word(&mut rng), random_word(&mut rng));
        let (ab, ba, ac, bc) = (levenshtein(&a, &b), levenshtein(&b, &a), levenshtein(&a, &c), levenshtein(&b, &c));
        let ok = ab == ba && (ab == 0) == (a == b) && levenshtein(&a, &a) == 0 && ac <= ab + bc;
        violations += usize::from(!ok);
    }
    ensure(violations == 0, format!("{violations} axiom violations"))?;
    Ok("d(OLD, HALDE) = 3; 1000 triples, 0 violations".into())
}

fn c5_lalme() -> Check {
    let lalme = builtin_dataset("lalme_old").unwrap();
    let (matrix, elapsed) = timed(|| distance_matrix(&lalme, &Levenshtein).unwrap());
    ensure(elapsed < Duration::from_millis(100), format!("matrix runtime {elapsed:?}"))?;
    let median = matrix.minimize_rows(FrechetOptions::new(1.0)).unwrap();
    let mean = matrix.minimize_rows(FrechetOptions::new(2.0)).unwrap();
    ensure(median.minimizers == forms(&["hold", "old"]), format!("p=1 {:?}", median.minimizers))?;
    ensure(median.exact_sum == Some(48), format!("p=1 value {:?}", median.exact_sum))?;
    ensure(mean.minimizers == forms(&["hold"]), format!("p=2 {:?}", mean.minimizers))?;
    ensure(mean.exact_sum == Some(108), format!("p=2 value {:?}", mean.exact_sum))?;
    let squares = matrix.row_functional(2.0).unwrap();
    ensure(squares[18] == 110.0 && squares[18] > squares[15], format!("old row {}", squares[18]))?;
    // the delegating API agrees with the row convention
    let direct = spelling_variability(&lalme, 2.0).unwrap();
    ensure(direct.minimizers == mean.minimizers && direct.value == 108.0, "spelling_variability")?;
    Ok(format!("{{hold, old}} 48; {{hold}} 108; old 110; matrix {elapsed:?}"))
}

fn c6_chaucer() -> Check {
    let chaucer = builtin_dataset("chaucer_old").unwrap();
    for (p, want) in [(1.0, 4.0), (2.0, 6.0)] {
        let r = spelling_variability(&chaucer, p).unwrap();
        ensure(r.minimizers == chaucer, format!("p={p} minimizers {:?}", r.minimizers))?;
        ensure(r.value == want, format!("p={p} value {}", r.value))?;
    }
    Ok("all four forms; 4 and 6".into())
}

fn c7_groups() -> Check {
    let c15 = GroupSpec::cyclic(15).unwrap();
    let c3c5 = GroupSpec::product(&[3, 5]).unwrap();
    ensure(c3c5.generators().len() == 4, "C3xC5 needs four generators")?;
    for (g, name, v1, v2) in [(&c15, "C15", 56.0, 280.0), (&c3c5, "C3xC5", 28.0, 64.0)] {
        let (r1, r2) = (group_variability(g, 1.0).unwrap(), group_variability(g, 2.0).unwrap());
        ensure(r1.value == v1 && r2.value == v2, format!("{name}: {} / {}", r1.value, r2.value))?;
        ensure(r1.minimizers.len() == 15 && r2.minimizers.len() == 15, format!("{name}: not all minimizers"))?;
        for a in 0..g.order() {
            let bfs = g.bfs_from(a);
            for b in 0..g.order() {
                ensure(g.word_distance_idx(a, b) == bfs[b], format!("{name}: BFS mismatch at ({a},{b})"))?;
            }
        }
    }
    Ok("C15 56/280, C3xC5 28/64, all 15 minimize; BFS cross-check exhaustive".into())
}

fn c8_complete_generators() -> Check {
    let builtins = [
        GroupSpec::cyclic(15).unwrap(),
        GroupSpec::product(&[3, 5]).unwrap(),
        GroupSpec::dihedral(5).unwrap(),
    ];
    for g in builtins {
        let g = g.with_complete_generators();
        let m = g.distance_matrix();
        for i in 0..m.len() {
            for j in 0..m.len() {
                let want = if i == j { 0.0 } else { 1.0 };
                ensure(m.get(i, j) == want, format!("d({i},{j}) = {}", m.get(i, j)))?;
            }
        }
    }
    Ok("every off-diagonal distance is 1".into())
}

fn c9_permutation() -> Check {
    let pool = forms(&["old", "olde", "oold", "aeld", "woold", "hoolde"]);
    let (x, y) = pool.split_at(3);
    let exact = permutation_test_with(x, y, &Levenshtein, &PermTestConfig::new(0, 0).mode(PermMode::Exact)).unwrap();
    ensure(exact.exact && exact.resamples == 20, "exact enumeration")?;
    let resamples = 10_000;
    let mc_cfg = PermTestConfig::new(resamples, 2024).mode(PermMode::MonteCarlo);
    let mc = permutation_test_with(x, y, &Levenshtein, &mc_cfg).unwrap();
    let p = exact.p_value;
    let se = (p * (1.0 - p) / resamples as f64).sqrt();
    ensure((mc.p_value - p).abs() <= 3.0 * se, format!("MC {} vs exact {p} (3se {})", mc.p_value, 3.0 * se))?;
    let again = permutation_test_with(x, y, &Levenshtein, &mc_cfg).unwrap();
    ensure(again == mc, "same seed gave different results")?;
    let same = permutation_test_with(x, x, &Levenshtein, &mc_cfg).unwrap();
    ensure(same.observed == 1.0, format!("x = y observed {}", same.observed))?;
    Ok(format!("exact p {p:.4}, MC p {:.4} (3se {:.4}); deterministic; x=y ratio 1", mc.p_value, 3.0 * se))
}

fn c10_property_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    // circular metric axioms
    for _ in 0..1000 {
        let [a, b, c]: [Angle; 3] = std::array::from_fn(|_| Angle::new(rng.gen_range(-7.0..7.0)));
        let ab = circ_distance(a, b);
        ensure(ab == circ_distance(b, a) && ab <= PI && circ_distance(a, a) == 0.0, "circular symmetry/range")?;
        ensure(circ_distance(a, c) <= ab + circ_distance(b, c) + 1e-12, "circular triangle")?;
    }
    // edit-script replay
    for _ in 0..500 {
        let (a, b) = (random_word(&mut rng), random_word(&mut rng));
        let script = edit_script(&a, &b);
        ensure(replay(&a, &script).as_deref() == Some(b.as_str()), format!("replay {a:?} -> {b:?}"))?;
        ensure(script.iter().map(|o| o.cost()).sum::<usize>() == levenshtein(&a, &b), "script cost")?;
    }
    // rotation equivariance
    for _ in 0..20 {
        let sample: Vec<Angle> = (0..rng.gen_range(1..8)).map(|_| Angle::new(rng.gen_range(-PI..PI))).collect();
        let delta = rng.gen_range(-PI..PI);
        let base = circular_frechet(&sample, 2.0, 720).unwrap();
        let rot: Vec<Angle> = sample.iter().map(|a| a.rotate(delta)).collect();
        let turned = circular_frechet(&rot, 2.0, 720).unwrap();
        ensure((base.result.value - turned.result.value).abs() <= 1e-6, "rotation changes value")?;
        let moved = base.result.minimizers[0].rotate(delta);
        ensure(
            turned.result.minimizers.iter().any(|m| circ_distance(*m, moved) < 1e-5),
            "rotation moves minimizer inconsistently",
        )?;
    }
    // word-metric axioms and row regularity on the presets
    for g in [GroupSpec::cyclic(15).unwrap(), GroupSpec::product(&[3, 5]).unwrap(), GroupSpec::dihedral(6).unwrap()] {
        let m = g.distance_matrix();
        ensure(m.check_metric().is_ok(), "word metric axioms")?;
        let sorted = |i: usize| {
            let mut r = m.row(i).to_vec();
            r.sort_by(f64::total_cmp);
            r
        };
        ensure((1..m.len()).all(|i| sorted(i) == sorted(0)), "rows are not permutations")?;
    }
    Ok("circular axioms, replay, rotation, word axioms, row regularity".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("1 circular Fréchet mean (p=2)", c1_circular_mean),
        ("2 circular median arc (p=1)", c2_circular_median),
        ("3 resultant vector and naive mean", c3_resultant),
        ("4 edit distance and metric axioms", c4_edit_distance),
        ("5 LALME mean and median", c5_lalme),
        ("6 Chaucer forms", c6_chaucer),
        ("7 cyclic and product groups", c7_groups),
        ("8 complete generating set", c8_complete_generators),
        ("9 permutation test", c9_permutation),
        ("10 property suites", c10_property_suites),
    ];
    let started = Instant::now();
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                println!("FAIL  {name}: {why}");
                failed.push(name);
            }
        }
    }
    let total = started.elapsed();
    println!("suite runtime {total:?}");
    assert!(total < Duration::from_secs(30), "suite took {total:?}");
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
