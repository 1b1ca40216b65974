use proptest::prelude::*;
use wachred::{Field, FieldParams, PadicElem};

fn fields() -> Vec<Field> {
    vec![
        Field::qp(3).unwrap(),
        Field::qp(7).unwrap(),
        Field::new(FieldParams::ramified_quadratic(3, 1, 10).unwrap()).unwrap(),
        Field::new(FieldParams::ramified_quadratic(5, 2, 10).unwrap()).unwrap(),
        Field::new(FieldParams::unramified_quadratic(5, 10).unwrap()).unwrap(),
    ]
}

fn elem(f: &Field, a: i64, b: i64, prec: u32) -> PadicElem {
    // a + b * pi
    let pi = PadicElem::pi(f, prec);
    PadicElem::from_int(f, a, prec)
        .add(&PadicElem::from_int(f, b, prec).mul(&pi).unwrap())
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ring_axioms(fi in 0usize..5, a in any::<i32>(), b in any::<i32>(), c in any::<i32>(), d in any::<i32>()) {
        let f = &fields()[fi];
        let x = elem(f, a as i64, b as i64, 8);
        let y = elem(f, c as i64, d as i64, 8);
        let z = elem(f, d as i64, a as i64, 8);
        prop_assert!(x.mul(&y).unwrap().mul(&z).unwrap().eq_at(&x.mul(&y.mul(&z).unwrap()).unwrap()));
        prop_assert!(x.mul(&y.add(&z).unwrap()).unwrap().eq_at(&x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()));
        prop_assert!(x.mul(&y).unwrap().eq_at(&y.mul(&x).unwrap()));
        prop_assert!(x.add(&PadicElem::zero(f, 8)).unwrap() == x);
    }

    #[test]
    fn valuation_is_additive(fi in 0usize..5, a in any::<i32>(), b in any::<i32>(), c in any::<i32>(), d in any::<i32>()) {
        let f = &fields()[fi];
        let x = elem(f, a as i64, b as i64, 12);
        let y = elem(f, c as i64, d as i64, 12);
        if let (Some(u), Some(v)) = (x.valuation(), y.valuation()) {
            let prod = x.mul(&y).unwrap();
            if u + v < prod.precision() {
                prop_assert_eq!(prod.valuation(), Some(u + v));
            }
        }
    }

    #[test]
    fn sqrt_round_trip(fi in 0usize..5, a in any::<i32>(), b in any::<i32>()) {
        let f = &fields()[fi];
        let pi = PadicElem::pi(f, 9);
        let x = elem(f, a as i64, b as i64, 9).mul(&pi).unwrap();
        let s = PadicElem::sqrt_one_plus(&x).unwrap();
        let one_plus = PadicElem::one(f, 9).add(&x).unwrap();
        prop_assert!(s.mul(&s).unwrap().eq_at(&one_plus));
        prop_assert!(s.sub(&PadicElem::one(f, 9)).unwrap().valuation().is_none_or(|v| v >= 1));
    }

    #[test]
    fn inverse_round_trip(fi in 0usize..5, a in any::<i32>(), b in any::<i32>()) {
        let f = &fields()[fi];
        let x = elem(f, a as i64, b as i64, 10);
        prop_assume!(x.is_unit());
        prop_assert!(x.mul(&x.inv().unwrap()).unwrap().eq_at(&PadicElem::one(f, 10)));
    }

    #[test]
    fn literal_round_trip(fi in 0usize..5, a in any::<i32>(), b in any::<i32>(), prec in 1u32..12) {
        let f = &fields()[fi];
        let x = elem(f, a as i64, b as i64, prec);
        let back = PadicElem::parse(f, &x.to_string()).unwrap();
        prop_assert_eq!(back, x);
    }
}

#[test]
fn pi_to_the_e_is_p_times_unit() {
    for f in fields() {
        let e = f.e() as u32;
        let pie = PadicElem::pi_pow(&f, e, 20);
        let p = PadicElem::from_int(&f, f.p() as i64, 20);
        let u = pie.div(&p).unwrap();
        assert!(u.is_unit());
    }
}

#[test]
fn valuation_of_one_minus_chi_powers() {
    for p in [3u64, 5, 7] {
        let f = Field::qp(p).unwrap();
        let chi = PadicElem::from_int(&f, f.chi_gamma() as i64, 30);
        let mut c = PadicElem::one(&f, 30);
        for j in 1..=200u64 {
            c = c.mul(&chi).unwrap();
            let d = PadicElem::one(&f, 30).sub(&c).unwrap();
            let expect = if j % (p - 1) != 0 {
                0
            } else {
                let mut v = 1;
                let mut t = j;
                while t % p == 0 {
                    t /= p;
                    v += 1;
                }
                v
            };
            assert_eq!(d.valuation(), Some(expect), "p={p} j={j}");
        }
    }
}

#[test]
fn divide_by_non_divisor_fails() {
    let f = Field::qp(3).unwrap();
    let x = PadicElem::from_int(&f, 6, 10);
    assert_eq!(x.divide_exact(1).unwrap().precision(), 9);
    assert!(x.divide_exact(2).is_err());
}
