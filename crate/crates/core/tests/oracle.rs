use std::sync::OnceLock;

use pencilform::oracle::{
    enumerate_orbits_with_order, group_order, oracle_disc, oracle_is_free, DEFAULT_BUDGET,
};
use pencilform::{
    brute_equivalent, brute_stabilizer, enumerate_orbits, scheme_of, stabilizer, BinaryForm,
    Constraint, Error, Exec, Field, Group, Mat, Mode, OracleConfig, OrbitTable, Pencil,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg(exec: Exec) -> OracleConfig {
    OracleConfig {
        budget: DEFAULT_BUDGET,
        exec,
    }
}

fn check_table(t: &OrbitTable) {
    assert_eq!(t.orbits.iter().map(|o| o.size).sum::<u64>(), t.total);
    assert_eq!(t.member_count() as u64, t.total);
    for o in &t.orbits {
        assert_eq!(o.size as u128 * o.stabilizer, t.group_order);
        assert_eq!(o.disc, o.rep.disc());
    }
}

fn same_table(a: &OrbitTable, b: &OrbitTable) {
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.member_count(), b.member_count());
    for i in 0..a.member_count() {
        assert_eq!(a.member(i), b.member(i));
    }
}

#[test]
fn group_orders() {
    assert_eq!(group_order(2, 2, Group::GL), 6);
    assert_eq!(group_order(3, 2, Group::GL), 48);
    assert_eq!(group_order(3, 2, Group::SL), 24);
    assert_eq!(group_order(3, 3, Group::GL), 11232);
    assert_eq!(group_order(5, 2, Group::SL), 120);
}

#[test]
fn f2_table() {
    let k = Field::prime(2).unwrap();
    let t = enumerate_orbits(
        &k,
        1,
        Group::GL,
        Mode::Symmetric,
        &Constraint::All,
        &cfg(Exec::default()),
    )
    .unwrap();
    assert_eq!(t.group_order, 6);
    check_table(&t);
    // symmetric 2x2 pairs over F_2 with nonzero discriminant
    let mut count = 0;
    for c in 0..64u64 {
        let d: Vec<i64> = (0..6).map(|i| (c >> i & 1) as i64).collect();
        let m = Pencil::from_ints(
            &k,
            &[vec![d[0], d[1]], vec![d[1], d[2]]],
            &[vec![d[3], d[4]], vec![d[4], d[5]]],
        )
        .unwrap();
        if !m.disc().is_zero() {
            count += 1;
            assert!(t.orbit_of(&m).is_some());
        }
    }
    assert_eq!(t.total, count);
}

#[test]
fn tables_are_consistent() {
    let f3 = Field::prime(3).unwrap();
    let f4 = Field::fq(2, 2).unwrap();
    let f5 = Field::prime(5).unwrap();
    for (k, n, g, mode) in [
        (&f3, 1, Group::GL, Mode::General),
        (&f3, 1, Group::SL, Mode::Symmetric),
        (&f4, 1, Group::GL, Mode::Symmetric),
        (&f5, 1, Group::SL, Mode::Symmetric),
        (&f3, 2, Group::GL, Mode::Symmetric),
    ] {
        let t = enumerate_orbits(k, n, g, mode, &Constraint::All, &cfg(Exec::default())).unwrap();
        check_table(&t);
    }
}

#[test]
fn closure() {
    let k = Field::prime(3).unwrap();
    let t = enumerate_orbits(
        &k,
        1,
        Group::GL,
        Mode::Symmetric,
        &Constraint::All,
        &cfg(Exec::default()),
    )
    .unwrap();
    let mut group = Vec::new();
    for c in 0..81u64 {
        let p = Mat::from_rows(
            &k,
            (0..2)
                .map(|i| {
                    (0..2)
                        .map(|j| k.from_index(c / 3u64.pow(2 * i + j) % 3))
                        .collect()
                })
                .collect(),
        );
        if !k.is_zero(&p.det()) {
            group.push(p);
        }
    }
    assert_eq!(group.len(), 48);
    for o in t.orbits.iter().step_by(3) {
        let idx = t.orbit_of(&o.rep).unwrap();
        let mut image: Vec<String> = group
            .iter()
            .map(|p| {
                let m = o.rep.act(p).unwrap();
                assert_eq!(t.orbit_of(&m), Some(idx));
                m.to_json().to_string()
            })
            .collect();
        image.sort();
        image.dedup();
        assert_eq!(image.len() as u64, o.size);
    }
}

#[test]
fn independent_of_generator_order() {
    let k = Field::prime(3).unwrap();
    for (g, mode) in [(Group::GL, Mode::Symmetric), (Group::SL, Mode::General)] {
        let a = enumerate_orbits_with_order(
            &k,
            1,
            g,
            mode,
            &Constraint::All,
            &cfg(Exec::default()),
            false,
        )
        .unwrap();
        let b = enumerate_orbits_with_order(
            &k,
            1,
            g,
            mode,
            &Constraint::All,
            &cfg(Exec::default()),
            true,
        )
        .unwrap();
        same_table(&a, &b);
    }
}

#[test]
fn sequential_matches_parallel() {
    let k = Field::prime(3).unwrap();
    let a = enumerate_orbits(
        &k,
        1,
        Group::SL,
        Mode::General,
        &Constraint::All,
        &cfg(Exec::Sequential),
    )
    .unwrap();
    let b = enumerate_orbits(
        &k,
        1,
        Group::SL,
        Mode::General,
        &Constraint::All,
        &cfg(Exec::Parallel),
    )
    .unwrap();
    same_table(&a, &b);
    let m = a.orbits[0].rep.clone();
    assert_eq!(
        brute_stabilizer(&m, Group::GL, &cfg(Exec::Sequential))
            .unwrap()
            .order,
        brute_stabilizer(&m, Group::GL, &cfg(Exec::Parallel))
            .unwrap()
            .order
    );
}

#[test]
fn constraints() {
    let k = Field::prime(3).unwrap();
    let all = enumerate_orbits(
        &k,
        1,
        Group::SL,
        Mode::Symmetric,
        &Constraint::All,
        &cfg(Exec::default()),
    )
    .unwrap();
    let f = BinaryForm::from_ints(&k, &[2, 0, 1]);
    let fixed = enumerate_orbits(
        &k,
        1,
        Group::SL,
        Mode::Symmetric,
        &Constraint::FixedDisc(f.clone()),
        &cfg(Exec::default()),
    )
    .unwrap();
    check_table(&fixed);
    assert!(fixed.orbits.iter().all(|o| o.disc == f));
    assert_eq!(
        fixed.orbits.len(),
        all.orbits.iter().filter(|o| o.disc == f).count()
    );
    let s = scheme_of(&f).unwrap();
    let by_scheme = enumerate_orbits(
        &k,
        1,
        Group::GL,
        Mode::Symmetric,
        &Constraint::FixedScheme(s.clone()),
        &cfg(Exec::default()),
    )
    .unwrap();
    check_table(&by_scheme);
    assert!(by_scheme
        .orbits
        .iter()
        .all(|o| scheme_of(&o.disc).unwrap().same_support(&s)));
    assert!(matches!(
        enumerate_orbits(
            &k,
            1,
            Group::GL,
            Mode::Symmetric,
            &Constraint::FixedDisc(f),
            &cfg(Exec::default())
        ),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn budgets() {
    let k = Field::prime(3).unwrap();
    let tiny = OracleConfig {
        budget: 50,
        exec: Exec::default(),
    };
    assert!(matches!(
        enumerate_orbits(&k, 1, Group::GL, Mode::General, &Constraint::All, &tiny),
        Err(Error::BudgetExceeded { .. })
    ));
    let m = Pencil::new(Mat::identity(&k, 2), Mat::identity(&k, 2)).unwrap();
    assert!(matches!(
        brute_equivalent(&m, &m, Group::GL, &tiny),
        Err(Error::BudgetExceeded { .. })
    ));
    assert!(matches!(
        brute_stabilizer(&m, Group::GL, &tiny),
        Err(Error::BudgetExceeded { .. })
    ));
    let f7 = Field::prime(7).unwrap();
    assert!(matches!(
        enumerate_orbits(
            &f7,
            2,
            Group::GL,
            Mode::General,
            &Constraint::All,
            &cfg(Exec::default())
        ),
        Err(Error::BudgetExceeded { .. })
    ));
    let q = Field::rational();
    let m = Pencil::new(Mat::identity(&q, 2), Mat::identity(&q, 2)).unwrap();
    assert!(matches!(
        brute_equivalent(&m, &m, Group::GL, &cfg(Exec::default())),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn equivalence_examples() {
    let k = Field::prime(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..20 {
        let a = Mat::from_rows(
            &k,
            (0..2)
                .map(|_| (0..2).map(|_| k.random(&mut rng)).collect())
                .collect(),
        );
        let b = Mat::from_rows(
            &k,
            (0..2)
                .map(|_| (0..2).map(|_| k.random(&mut rng)).collect())
                .collect(),
        );
        let m = Pencil::new(a, b).unwrap();
        assert!(brute_equivalent(&m, &m, Group::SL, &cfg(Exec::default())).unwrap());
        let p = loop {
            let p = Mat::from_rows(
                &k,
                (0..2)
                    .map(|_| (0..2).map(|_| k.random(&mut rng)).collect())
                    .collect(),
            );
            if k.is_one(&p.det()) {
                break p;
            }
        };
        assert!(
            brute_equivalent(&m, &m.act(&p).unwrap(), Group::SL, &cfg(Exec::default())).unwrap()
        );
    }
}

#[test]
fn stabilizer_examples() {
    let k = Field::prime(3).unwrap();
    let m = Pencil::new(Mat::identity(&k, 2), Mat::diag(&k, &[k.zero(), k.one()])).unwrap();
    let st = brute_stabilizer(&m, Group::SL, &cfg(Exec::default())).unwrap();
    assert_eq!(st.order, 2);
    assert!(st.elements.contains(&Mat::scalar(&k, 2, &k.from_i64(-1))));
    assert_eq!(st.order, stabilizer(&m.scheme().unwrap()).unwrap().size);
    for q in [3, 5, 7] {
        let k = Field::prime(q).unwrap();
        let m = Pencil::new(Mat::identity(&k, 2), Mat::identity(&k, 2)).unwrap();
        let st = brute_stabilizer(&m, Group::GL, &cfg(Exec::default())).unwrap();
        // |O(2, q)| = 2 (q - e) with e = 1 when -1 is a square
        let e: i64 = if k.is_square(&k.from_i64(-1)).unwrap() {
            1
        } else {
            -1
        };
        assert_eq!(st.order as i64, 2 * (q as i64 - e));
        for p in &st.elements {
            assert_eq!(p.transpose().mul(p), Mat::identity(&k, 2));
        }
        assert_eq!(group_order(q, 2, Group::GL) % st.order as u128, 0);
    }
}

#[test]
fn own_arithmetic_agrees() {
    let k = Field::fq(3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let a = Mat::from_rows(
            &k,
            (0..n)
                .map(|_| (0..n).map(|_| k.random(&mut rng)).collect())
                .collect(),
        );
        let b = Mat::from_rows(
            &k,
            (0..n)
                .map(|_| (0..n).map(|_| k.random(&mut rng)).collect())
                .collect(),
        );
        let m = Pencil::new(a, b).unwrap();
        assert_eq!(oracle_disc(&m).unwrap(), m.disc());
        if !m.disc().is_zero() {
            assert_eq!(oracle_is_free(&m).unwrap(), m.is_free().unwrap());
        }
    }
}

#[test]
fn exports() {
    let k = Field::prime(2).unwrap();
    let t = enumerate_orbits(
        &k,
        1,
        Group::SL,
        Mode::Symmetric,
        &Constraint::All,
        &cfg(Exec::default()),
    )
    .unwrap();
    let text = t.to_jsonl();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), t.orbits.len() + 1);
    let head: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(head["orbit_count"], t.orbits.len());
    assert_eq!(head["group"], "SL");
    for l in &lines[1..] {
        let o: serde_json::Value = serde_json::from_str(l).unwrap();
        assert!(Pencil::from_json(&o["rep"], None).is_ok());
    }
}

fn sl_general_f3() -> &'static OrbitTable {
    static T: OnceLock<OrbitTable> = OnceLock::new();
    T.get_or_init(|| {
        enumerate_orbits(
            &Field::prime(3).unwrap(),
            1,
            Group::SL,
            Mode::General,
            &Constraint::All,
            &cfg(Exec::default()),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn orbit_lookup_is_invariant(i in 0usize..10_000, seed in any::<u64>()) {
        let k = Field::prime(3).unwrap();
        let t = sl_general_f3();
        let (m, o) = t.member(i % t.member_count());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = loop {
            let p = Mat::from_rows(&k, (0..2).map(|_| (0..2).map(|_| k.random(&mut rng)).collect()).collect());
            if k.is_one(&p.det()) {
                break p;
            }
        };
        prop_assert_eq!(t.orbit_of(&m.act(&p).unwrap()), Some(o));
    }
}
