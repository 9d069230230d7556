use pencilform::construct::{delta_lambda_block, hankel_sign};
use pencilform::{BinaryForm, Error, Field, Mat, Pencil};
use proptest::prelude::*;

fn f5() -> Field {
    Field::prime(5).unwrap()
}

#[test]
fn one_by_one_disc() {
    let k = Field::rational();
    let m = Pencil::from_ints(&k, &[vec![3]], &[vec![-2]]).unwrap();
    assert_eq!(m.disc(), BinaryForm::from_ints(&k, &[-2, 3]));
}

#[test]
fn block_disc() {
    let k = f5();
    for e in 1..=4 {
        let (u, v) = (k.from_i64(2), k.from_i64(3));
        let m = delta_lambda_block(e, &u, &v, &k).unwrap();
        let want = BinaryForm::new(&k, vec![k.neg(&u), v.clone()])
            .pow(e)
            .scale(&hankel_sign(&k, e));
        assert_eq!(m.disc(), want);
    }
}

#[test]
fn quartic_disc_over_q() {
    let k = Field::rational();
    let m0 = vec![
        vec![0, 0, 0, 1],
        vec![0, 0, 1, -1],
        vec![0, 1, -1, 0],
        vec![1, -1, 0, 0],
    ];
    // M1 = -theta(X^(i+j+1)) for f = X^4 + X^3 + X^2 + X + 1: h = 0,0,0,1,-1,0,0,0
    let m1 = vec![
        vec![0, 0, -1, 1],
        vec![0, -1, 1, 0],
        vec![-1, 1, 0, 0],
        vec![1, 0, 0, 0],
    ];
    let m = Pencil::from_ints(&k, &m0, &m1).unwrap();
    assert_eq!(m.disc(), BinaryForm::from_ints(&k, &[1, 1, 1, 1, 1]));
}

#[test]
fn act_examples() {
    let k = f5();
    let m = Pencil::from_ints(&k, &[vec![1, 2], vec![2, 0]], &[vec![3, 1], vec![1, 4]]).unwrap();
    assert_eq!(m.act(&Mat::identity(&k, 2)).unwrap(), m);
    let c = k.from_i64(2);
    let scaled = m.act(&Mat::scalar(&k, 2, &c)).unwrap();
    let c2 = k.mul(&c, &c);
    assert_eq!(scaled.m0(), &m.m0().scale(&c2));
    assert_eq!(scaled.disc(), m.disc().scale(&k.pow(&c, 4)));
    assert_eq!(m.act(&Mat::zeros(&k, 2, 2)), Err(Error::SingularP));
    assert!(matches!(
        m.act(&Mat::identity(&k, 3)),
        Err(Error::SizeMismatch(_))
    ));
    assert!(m
        .act(&Mat::from_ints(&k, &[vec![1, 1], vec![1, 0]]))
        .unwrap()
        .is_symmetric());
}

#[test]
fn freeness_examples() {
    let k = f5();
    for e in 1..=4 {
        assert!(delta_lambda_block(e, &k.one(), &k.from_i64(3), &k)
            .unwrap()
            .is_free()
            .unwrap());
    }
    let m = Pencil::from_ints(&k, &[vec![1, 0], vec![0, 1]], &[vec![0, 0], vec![0, 0]]).unwrap();
    assert!(!m.is_free().unwrap());
    let z = Pencil::from_ints(&k, &[vec![0, 0], vec![0, 0]], &[vec![1, 0], vec![0, 0]]).unwrap();
    assert_eq!(z.is_free(), Err(Error::VanishingDiscriminant));
}

#[test]
fn reducedness_examples() {
    let f2 = Field::prime(2).unwrap();
    let m = Pencil::from_ints(
        &f2,
        &[vec![1, 0, 0], vec![0, 0, 0], vec![0, 0, 1]],
        &[vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
    )
    .unwrap();
    assert_eq!(m.disc(), BinaryForm::from_ints(&f2, &[0, 1, 1, 0]));
    assert!(m.scheme_is_reduced().unwrap());
    let q = Field::rational();
    let m = Pencil::from_ints(
        &q,
        &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 0]],
        &[vec![0, 0, 0], vec![0, 0, 0], vec![0, 0, 1]],
    )
    .unwrap();
    assert!(!m.scheme_is_reduced().unwrap());
    // (X0^2 + X1^2)^2 over F_3
    let f3 = Field::prime(3).unwrap();
    let b = Pencil::from_ints(&f3, &[vec![1, 0], vec![0, 1]], &[vec![0, 1], vec![2, 0]]).unwrap();
    let m = Pencil::new(
        Mat::block_diag(&f3, &[b.m0().clone(), b.m0().clone()]),
        Mat::block_diag(&f3, &[b.m1().clone(), b.m1().clone()]),
    )
    .unwrap();
    assert_eq!(m.disc(), BinaryForm::from_ints(&f3, &[1, 0, 1]).pow(2));
    assert!(!m.scheme_is_reduced().unwrap());
}

#[test]
fn json_round_trip() {
    let k = Field::fq(3, 2).unwrap();
    let m = Pencil::new(
        Mat::from_rows(
            &k,
            vec![vec![k.generator(), k.one()], vec![k.one(), k.zero()]],
        ),
        Mat::identity(&k, 2),
    )
    .unwrap();
    let v = m.to_json();
    assert_eq!(v["n"], 1);
    assert_eq!(Pencil::from_json(&v, None).unwrap(), m);
    let q = Field::rational();
    let r = Pencil::new(
        Mat::from_rows(&q, vec![vec![q.div(&q.one(), &q.from_i64(3)).unwrap()]]),
        Mat::from_rows(&q, vec![vec![q.from_i64(-2)]]),
    )
    .unwrap();
    assert_eq!(r.to_json()["M0"][0][0], "1/3");
    assert_eq!(Pencil::from_json(&r.to_json(), None).unwrap(), r);
}

fn arb_pencil(k: Field, size: usize, symmetric: bool) -> impl Strategy<Value = Pencil> {
    let q = k.size().unwrap();
    prop::collection::vec(0..q, 2 * size * size).prop_map(move |v| {
        let mut m = [Mat::zeros(&k, size, size), Mat::zeros(&k, size, size)];
        for (t, mat) in m.iter_mut().enumerate() {
            for i in 0..size {
                for j in 0..size {
                    let (a, b) = if symmetric && j < i { (j, i) } else { (i, j) };
                    mat.set(i, j, k.from_index(v[t * size * size + a * size + b]));
                }
            }
        }
        let [a, b] = m;
        Pencil::new(a, b).unwrap()
    })
}

fn arb_invertible(k: Field, size: usize) -> impl Strategy<Value = Mat> {
    let q = k.size().unwrap();
    prop::collection::vec(0..q, size * size)
        .prop_map(move |v| {
            Mat::from_rows(
                &k,
                (0..size)
                    .map(|i| (0..size).map(|j| k.from_index(v[i * size + j])).collect())
                    .collect(),
            )
        })
        .prop_filter("invertible", |p| !p.field().is_zero(&p.det()))
}

proptest! {
    #[test]
    fn disc_two_ways(m in arb_pencil(Field::prime(3).unwrap(), 3, false)) {
        // F_3 has fewer than n + 2 = 4 points, so interpolation runs over an extension
        prop_assert_eq!(m.disc_bareiss(), m.disc_interpolate());
    }

    #[test]
    fn disc_two_ways_f7(m in arb_pencil(Field::prime(7).unwrap(), 4, true)) {
        prop_assert_eq!(m.disc_bareiss(), m.disc_interpolate());
    }

    #[test]
    fn disc_transforms_by_det_squared(m in arb_pencil(f5(), 3, false), p in arb_invertible(f5(), 3)) {
        let k = f5();
        let d = p.det();
        prop_assert_eq!(m.act(&p).unwrap().disc(), m.disc().scale(&k.mul(&d, &d)));
    }

    #[test]
    fn right_action(m in arb_pencil(f5(), 2, true), p in arb_invertible(f5(), 2), q in arb_invertible(f5(), 2)) {
        prop_assert_eq!(m.act(&p).unwrap().act(&q).unwrap(), m.act(&p.mul(&q)).unwrap());
    }

    #[test]
    fn freeness_is_invariant(m in arb_pencil(f5(), 3, true), p in arb_invertible(f5(), 3)) {
        prop_assume!(!m.disc().is_zero());
        prop_assert_eq!(m.is_free().unwrap(), m.act(&p).unwrap().is_free().unwrap());
    }

    #[test]
    fn reduced_implies_free(m in arb_pencil(Field::prime(3).unwrap(), 3, true)) {
        prop_assume!(!m.disc().is_zero());
        if m.scheme_is_reduced().unwrap() {
            prop_assert!(m.is_free().unwrap());
        }
    }
}
