use proptest::prelude::*;
use wachred::{Field, Modulus, PadicElem, TruncSeries};

fn qp(p: u64) -> Field {
    Field::qp(p).unwrap()
}

fn series(f: &Field, c: &[i64], prec: u32, m: &Modulus) -> TruncSeries {
    let cs: Vec<PadicElem> = c.iter().map(|&x| PadicElem::from_int(f, x, prec)).collect();
    TruncSeries::from_padics(f, &cs, m)
}

#[test]
fn subst_identity_and_frobenius() {
    let f = qp(3);
    let m = Modulus::PowerOfX(8);
    let s = series(&f, &[1, 2, 0, 5, 7], 6, &m);
    let one = PadicElem::from_int(&f, 1, 30);
    assert_eq!(s.subst_cyclo(&one).unwrap(), s);
    let x = TruncSeries::x(&f, 6, &m);
    let three = PadicElem::from_int(&f, 3, 30);
    assert_eq!(
        x.subst_cyclo(&three).unwrap(),
        series(&f, &[0, 3, 3, 1], 6, &m)
    );
    assert_eq!(x.frobenius_phi(), x.mul(&TruncSeries::q(&f, 6, &m)));
    assert_eq!(
        TruncSeries::one(&f, 6, &m).frobenius_phi(),
        TruncSeries::one(&f, 6, &m)
    );
}

#[test]
fn frobenius_mod_pi_is_x_to_the_p() {
    for p in [3u64, 5, 7] {
        let f = qp(p);
        let m = Modulus::PowerOfX(20);
        let x = TruncSeries::x(&f, 4, &m);
        let r = x.frobenius_phi().reduce_mod_pi();
        let mut expect = [0u32; 20];
        expect[p as usize] = 1;
        assert_eq!(r.coeffs(), &expect[..]);
        let q = TruncSeries::q(&f, 4, &m).reduce_mod_pi();
        assert_eq!(q.x_valuation(), Some(p as usize - 1));
        assert!(q.coeffs()[p as usize..].iter().all(|&c| c == 0));
    }
}

#[test]
fn gamma_basics() {
    let f = qp(5);
    let m = Modulus::PowerOfX(12);
    let x = TruncSeries::x(&f, 6, &m);
    let g = x.gamma_act(1);
    assert_eq!(g.coeff(1).to_u64(), Some(f.chi_gamma()));
    let s = series(&f, &[3, 1, 4, 1, 5, 9, 2, 6], 6, &m);
    assert_eq!(s.gamma_act(0), s);
    assert!(s.gamma_act(1).gamma_act(-1).eq_at(&s));
    assert!(s.gamma_act(-1).gamma_act(1).eq_at(&s));
}

#[test]
fn gamma_inverse_in_polynomial_quotient() {
    let f = qp(3);
    let m = Modulus::phi_x_pow(&f, 2);
    let s = series(&f, &[2, 1, 1, 0, 2, 1], 4, &m);
    assert!(s.gamma_act(1).gamma_act(-1).eq_at(&s));
}

#[test]
fn geometric_inverse() {
    let f = qp(3);
    let m = Modulus::PowerOfX(6);
    let s = series(&f, &[1, 1], 5, &m);
    let inv = s.unit_inverse().unwrap();
    assert_eq!(inv, series(&f, &[1, -1, 1, -1, 1, -1], 5, &m));
    assert_eq!(
        TruncSeries::one(&f, 5, &m).unit_inverse().unwrap(),
        TruncSeries::one(&f, 5, &m)
    );
    assert!(series(&f, &[3, 1], 5, &m).unit_inverse().is_err());
}

#[test]
fn monic_reduction_example() {
    let f = qp(3);
    let k = 2;
    let m = Modulus::phi_x_pow(&f, k);
    let big = Modulus::PowerOfX(7);
    let xpk = TruncSeries::monomial(&f, 6, 10, &big);
    let phik = TruncSeries::phi_x(&f, 10, &big).pow(k);
    let expect = xpk.sub(&phik).to_modulus(&m);
    assert_eq!(xpk.to_modulus(&m), expect);
}

#[test]
fn gamma_q_over_q_and_rank_one_engine() {
    for p in [3u64, 5] {
        let f = qp(p);
        let n = 30;
        let m = Modulus::PowerOfX(n + 1);
        let prec = 12;
        let q = TruncSeries::q(&f, prec, &m);
        // w = gamma(X)/X
        let w = TruncSeries::x(&f, prec, &m)
            .gamma_act(1)
            .shift_down(1)
            .unwrap();
        let m2 = w.modulus().clone();
        let q = q.to_modulus(&m2);
        // gamma(Q)/Q = phi(w)/w since phi(X) = XQ
        let ratio = w.frobenius_phi().mul(&w.unit_inverse().unwrap());
        assert!(ratio.unit_inverse().is_ok());
        assert!(ratio.mul(&q).eq_at(&q.gamma_act(1)));
        let lhs = w.frobenius_phi();
        let rhs = w.mul(&ratio);
        assert!(lhs.eq_at(&rhs));
    }
}

fn arb_coeffs(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-1000i64..1000, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn cyclo_composition(c in arb_coeffs(8), a in 1i64..20, b in 1i64..20) {
        let f = qp(5);
        prop_assume!(a % 5 != 0 && b % 5 != 0);
        let m = Modulus::PowerOfX(8);
        let s = series(&f, &c, 6, &m);
        let pa = PadicElem::from_int(&f, a, 30);
        let pb = PadicElem::from_int(&f, b, 30);
        let pab = PadicElem::from_int(&f, a * b, 30);
        let lhs = s.subst_cyclo(&pb).unwrap().subst_cyclo(&pa).unwrap();
        let rhs = s.subst_cyclo(&pab).unwrap();
        prop_assert!(lhs.eq_at(&rhs));
    }

    #[test]
    fn phi_commutes_with_cyclo(c in arb_coeffs(10), a in 1i64..12) {
        let f = qp(3);
        prop_assume!(a % 3 != 0);
        let m = Modulus::PowerOfX(10);
        let s = series(&f, &c, 5, &m);
        let pa = PadicElem::from_int(&f, a, 30);
        prop_assert!(s.frobenius_phi().subst_cyclo(&pa).unwrap().eq_at(&s.subst_cyclo(&pa).unwrap().frobenius_phi()));
    }

    #[test]
    fn unit_inverse_both_moduli(c in arb_coeffs(6), k in 1u32..4) {
        let f = qp(3);
        prop_assume!(c[0] % 3 != 0);
        for m in [Modulus::PowerOfX(9), Modulus::phi_x_pow(&f, k)] {
            let s = series(&f, &c, 5, &m);
            let one = TruncSeries::one(&f, 5, &m);
            prop_assert!(s.mul(&s.unit_inverse().unwrap()).eq_at(&one));
        }
    }

    #[test]
    fn phi_ratio_round_trip(c in arb_coeffs(8)) {
        let f = qp(5);
        let m = Modulus::PowerOfX(9);
        let mut cc = c.clone();
        cc[0] = 1;
        let u = series(&f, &cc, 6, &m);
        let v = u.solve_phi_ratio().unwrap();
        prop_assert!(v.frobenius_phi().eq_at(&v.mul(&u)));
        prop_assert!(v.coeff(0).eq_at(&PadicElem::one(&f, 6)));
    }

    #[test]
    fn monic_reduction_is_a_ring_map(a in arb_coeffs(9), b in arb_coeffs(9)) {
        let f = qp(3);
        let big = Modulus::PowerOfX(18);
        let m = Modulus::phi_x_pow(&f, 2);
        let sa = series(&f, &a, 6, &big);
        let sb = series(&f, &b, 6, &big);
        let lhs = sa.mul(&sb).to_modulus(&m);
        let rhs = sa.to_modulus(&m).mul(&sb.to_modulus(&m));
        prop_assert!(lhs.eq_at(&rhs));
    }

    #[test]
    fn reduction_commutes_with_phi(c in arb_coeffs(12)) {
        let f = qp(3);
        let m = Modulus::PowerOfX(12);
        let s = series(&f, &c, 4, &m);
        prop_assert_eq!(s.frobenius_phi().reduce_mod_pi(), s.reduce_mod_pi().phi());
    }

    #[test]
    fn reduction_commutes_with_gamma(c in arb_coeffs(12), j in -2i64..3) {
        let f = qp(5);
        let m = Modulus::PowerOfX(12);
        let s = series(&f, &c, 4, &m);
        prop_assert_eq!(s.gamma_act(j).reduce_mod_pi(), s.reduce_mod_pi().gamma_act(j));
    }
}
