use proptest::prelude::*;
use wachred::matrix::Mat;
use wachred::phigamma::*;
use wachred::seed::hensel_seed;
use wachred::wach::*;
use wachred::{Exec, Field, Modulus, PadicElem, TruncSeries};

/// Smallest primitive root mod p^2, by brute force over integers.
fn prim_root_p2(p: u64) -> u64 {
    let m = p * p;
    let order = p * (p - 1);
    (2..m)
        .find(|&g| {
            let mut x = 1u64;
            for i in 1..=order {
                x = x * g % m;
                if x == 1 {
                    return i == order;
                }
            }
            false
        })
        .unwrap()
}

/// v_p(prod_{j<=k} (1 - c^j)) with plain u128 arithmetic mod p^12.
fn product_valuation(p: u64, c: u64, k: u32) -> u32 {
    let m = (p as u128).pow(12);
    let mut total = 0;
    let mut cj = 1u128;
    for _ in 1..=k {
        cj = cj * c as u128 % m;
        let mut x = (1 + m - cj) % m;
        assert_ne!(x, 0, "modulus too small");
        while x.is_multiple_of(p as u128) {
            x /= p as u128;
            total += 1;
        }
    }
    total
}

fn seed(p: u64, k: u32, ap: i64, n: u32) -> WachSeed {
    let f = Field::qp(p).unwrap();
    let a = PadicElem::from_int(&f, ap, 30);
    let (pair, report, _) = hensel_seed(&f, k, &a, n, Exec::default()).unwrap();
    WachSeed {
        k,
        a_p: a,
        n,
        pair,
        report,
        log: ConstructionLog {
            strategy: "lift".into(),
            detail: String::new(),
            precision_spent: 0,
        },
    }
}

#[test]
fn alpha_values() {
    assert_eq!(alpha(3, 4), 2);
    assert_eq!(alpha(3, 3), 1);
    assert_eq!(alpha(5, 4), 1);
    assert_eq!(alpha(3, 1), 0);
    assert_eq!(alpha(7, 100), 16 + 2);
}

#[test]
fn alpha_matches_product_valuation() {
    for p in [3u64, 5, 7] {
        let f = Field::qp(p).unwrap();
        let c = prim_root_p2(p);
        assert_eq!(c, f.chi_gamma());
        for k in 1..=100 {
            assert_eq!(alpha(p, k), product_valuation(p, c, k), "p={p} k={k}");
            let direct: u32 = (1..=k).map(|j| one_minus_chi_pow_valuation(&f, j)).sum();
            assert_eq!(alpha(p, k), direct);
            let bound = ((k - 1) as u64 * p / ((p - 1) * (p - 1))) as u32;
            assert!(alpha(p, k - 1) <= bound, "p={p} k={k}");
        }
    }
}

#[test]
fn filtered_module_shape() {
    let f = Field::qp(5).unwrap();
    let a = PadicElem::from_int(&f, 5, 10);
    let d = FilteredPhiModule::new(3, &a).unwrap();
    assert_eq!(d.fil_jumps, [0, 2]);
    assert!(d.phi_matrix.det().eq_at(&PadicElem::from_int(&f, 25, 10)));
    assert!(d.phi_matrix.trace().eq_at(&a));
    assert!(FilteredPhiModule::new(3, &PadicElem::from_int(&f, 2, 10)).is_err());
}

#[test]
fn eigen_split_and_h0() {
    let f = Field::qp(5).unwrap();
    let a = PadicElem::from_int(&f, 5, 20);
    let p0 = FilteredPhiModule::new(4, &a).unwrap().phi_matrix;
    let s = eigen_split(&p0).unwrap();
    for (col, ev) in [(0, &s.lambda), (1, &s.mu)] {
        let v = Mat::new2(
            s.y.get(0, col).clone(),
            PadicElem::zero(&f, 20),
            s.y.get(1, col).clone(),
            PadicElem::zero(&f, 20),
        );
        let lhs = p0.mul(&v);
        assert!(lhs.get(0, 0).eq_at(&v.get(0, 0).mul(ev).unwrap()));
        assert!(lhs.get(1, 0).eq_at(&v.get(1, 0).mul(ev).unwrap()));
    }
    let r = radius_a(&f, 4, &a).unwrap();
    let eps = PadicElem::from_int(&f, 5, 20)
        .pow(r.pi_units + 1)
        .mul_int(3);
    let h0 = build_h0(&s.y, &s.delta, &eps, alpha(5, 3)).unwrap();
    let one = h0.identity_like();
    assert!(one
        .add(&h0)
        .det()
        .sub(&PadicElem::one(&f, 20))
        .unwrap()
        .is_zero());
    assert!(h0.mul(&p0).trace().eq_at(&eps));

    let small = PadicElem::from_int(&f, 5, 20).pow(r.pi_units);
    assert!(matches!(
        build_h0(&s.y, &s.delta, &small, alpha(5, 3)),
        Err(wachred::Error::RadiusViolation(_))
    ));
}

#[test]
fn eigen_split_reports_extension() {
    // a_p = 3 at k = 2 over Q_3: disc = 9 - 12 = -3 has odd valuation
    let f = Field::qp(3).unwrap();
    let a = PadicElem::from_int(&f, 3, 10);
    let p0 = FilteredPhiModule::new(2, &a).unwrap().phi_matrix;
    assert!(eigen_split(&p0).is_err());
    let disc = PadicElem::from_int(&f, -3, 10);
    let ext = f.params().extend_by_root(&disc).unwrap();
    assert_eq!((ext.e, ext.f), (2, 1));
}

#[test]
fn extend_h_solves_its_equation() {
    let s = seed(3, 4, 3, 8);
    let k = 4;
    let f = s.pair.field().clone();
    let p0 = mat_constant_term(&s.pair.p);
    let split = eigen_split(&p0).unwrap();
    let eps = PadicElem::from_int(&f, 81, 30);
    let h0 = build_h0(&split.y, &split.delta, &eps, alpha(3, k - 1)).unwrap();
    let h = extend_h(&s.pair.g, &h0, k).unwrap();
    let m = Modulus::PowerOfX(k as usize);
    let g = s.pair.g.map(|x| x.to_modulus(&m));
    let defect = h.mul(&g).sub(&g.mul(&mat_gamma(&h, 1)));
    assert!(defect.is_zero());
    assert!(mat_constant_term(&h).sub(&h0).is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn normalize_det_restores_q_power(coeffs in proptest::collection::vec(0i64..9, 1..5)) {
        let s = seed(3, 3, 3, 6);
        let pair = &s.pair;
        let f = pair.field().clone();
        let m = pair.modulus().clone();
        let prec = pair.precision();
        let mut c = vec![PadicElem::one(&f, prec)];
        c.extend(coeffs.iter().map(|&x| PadicElem::from_int(&f, x, prec)));
        let w = TruncSeries::from_padics(&f, &c, &m);
        let zero = TruncSeries::zero(&f, prec, &m);
        let one = TruncSeries::one(&f, prec, &m);
        let mm = Mat::new2(w, zero.clone(), zero, one);
        let mi = mat_unit_inverse(&mm).unwrap();
        let twisted = PhiGammaPair::new(
            mi.mul(&pair.p).mul(&mat_phi(&mm)),
            mi.mul(&pair.g).mul(&mat_gamma(&mm, 1)),
            pair.k,
            pair.meta,
        );
        prop_assert!(commutation_defect(&twisted, &m).is_zero());
        let fixed = normalize_det(&twisted).unwrap();
        let qk = TruncSeries::q(&f, prec, &m).pow(pair.k - 1);
        prop_assert!(fixed.p.det().sub(&qk).is_zero());
        prop_assert!(commutation_defect(&fixed, &m).is_zero());
        prop_assert!(check_membership(&fixed, s.k, &s.a_p, s.n).verdict);
    }
}

#[test]
fn series_sqrt_squares_back() {
    let f = Field::qp(5).unwrap();
    let m = Modulus::PowerOfX(12);
    let c: Vec<PadicElem> = [1, 3, 0, 7, 2, 1]
        .iter()
        .map(|&x| PadicElem::from_int(&f, x, 8))
        .collect();
    let u = TruncSeries::from_padics(&f, &c, &m);
    let s = series_sqrt(&u).unwrap();
    assert!(s.mul(&s).sub(&u).is_zero());
}

#[test]
fn solve_g_rank_one_closed_form() {
    for p in [3u64, 5] {
        let f = Field::qp(p).unwrap();
        let prec = f.max_precision();
        for k in 2..=5u32 {
            let n = 8;
            let m = Modulus::PowerOfX(n);
            let q = TruncSeries::q(&f, prec, &m).pow(k - 1);
            let SolveG::Solved { g, precision_spent } = solve_g(&Mat::scalar1(q), n).unwrap()
            else {
                panic!("rank one is unobstructed");
            };
            // order r divides by p^(k-1) (p^r - 1), and p^r - 1 is a unit
            let ledger = (n as u32 - 1) * (k - 1);
            assert!(
                precision_spent <= ledger,
                "p={p} k={k}: {precision_spent} > {ledger}"
            );
            let w = TruncSeries::gamma_x(&f, prec, &Modulus::PowerOfX(n + 1))
                .shift_down(1)
                .unwrap();
            let chi = PadicElem::from_int(&f, f.chi_gamma() as i64, prec)
                .inv()
                .unwrap();
            let expect = w.scale(&chi).pow(k - 1);
            assert!(
                g.get(0, 0)
                    .to_modulus(&m)
                    .sub(&expect.to_modulus(&m))
                    .is_zero(),
                "p={p} k={k}"
            );
        }
    }
}

#[test]
fn radius_calculators() {
    let f = Field::qp(3).unwrap();
    let a = PadicElem::from_int(&f, 3, 10);
    let r = radius_a(&f, 4, &a).unwrap();
    assert_eq!(r.text(), "3");
    assert!(r.equality_branch);
    let y = PadicElem::from_int(&f, 3, 10);
    assert!(trianguline_ap(&y, 3)
        .unwrap()
        .eq_at(&PadicElem::from_int(&f, 6, 10)));
    assert!(trianguline_ap(&PadicElem::from_int(&f, 9, 10), 3).is_err());
    for k in [3, 10, 20] {
        assert!(!thm_b_applicable(&f, k, &a).unwrap());
    }
    // a_p = 6: a_p^2 = 36 is not a power of 3; 20 > 3 + 9 + 1
    assert!(thm_b_applicable(&f, 20, &PadicElem::from_int(&f, 6, 10)).unwrap());
    assert!(radius_a(&f, 1, &a).is_err());
}

#[test]
fn seeds_certify_with_weights() {
    for (p, k, ap, n) in [(5, 3, 5, 5), (3, 5, 27, 6), (3, 4, 3, 6)] {
        let s = seed(p, k, ap, n);
        assert!(s.report.verdict);
        assert_eq!(hodge_weights(&s.pair.p, k).unwrap(), vec![0, k - 1]);
        let tr = s.pair.p.trace().coeff(0);
        assert!(tr.eq_at(&s.a_p.with_precision(tr.precision())));
    }
}

#[test]
fn deformation_keeps_the_residue() {
    let s = seed(3, 4, 3, 10);
    let f = s.pair.field().clone();
    let a2 = PadicElem::from_int(&f, 3 + 81, 30);
    let d = deform_ap(&s, &a2).unwrap();
    assert!(d.report.verdict);
    assert_eq!(d.log.strategy, "deform");
    let r1 = reduce_pair(&s.pair);
    let r2 = reduce_pair(&d.pair);
    assert!(r1.p == r2.p && r1.g == r2.g);
    let back = deform_ap(&d, &s.a_p).unwrap();
    let r3 = reduce_pair(&back.pair);
    assert!(r1.p == r3.p && r1.g == r3.g);

    let far = PadicElem::from_int(&f, 3 + 27, 30);
    assert!(matches!(
        deform_ap(&s, &far),
        Err(wachred::Error::RadiusViolation(_))
    ));
}

#[test]
fn precision_plan_budget() {
    let f = Field::qp(3).unwrap();
    let a = PadicElem::from_int(&f, 3, 20);
    let plan = PrecisionPlan::for_deformation(&f, 4, &a, 5).unwrap();
    assert_eq!(plan.alpha_loss, 1);
    assert_eq!(
        plan.seed_precision,
        plan.target + plan.alpha_loss + plan.gap_loss
    );
}
