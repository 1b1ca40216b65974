//! Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wachred::cache::{seed_module, SeedCache};
use wachred::matrix::Mat;
use wachred::modp::*;
use wachred::phigamma::*;
use wachred::reduce::{
    default_x_precision, identify_seed, reduce_with, ReduceOptions, ReductionResult,
};
use wachred::seed::hensel_seed;
use wachred::wach::*;
use wachred::{Exec, Field, Modulus, PadicElem, ResidueSeries, TruncSeries};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

#[derive(Default)]
struct Ctx {
    catalogs: BTreeMap<(u64, u32), Catalog>,
    /// Certified seeds produced by criteria 1-3, for the weight checks.
    seeds: Vec<WachSeed>,
}

impl Ctx {
    fn catalog(&mut self, f: &Field, k: u32) -> &Catalog {
        self.catalogs.entry((f.p(), k)).or_insert_with(|| {
            build_catalog(f, k, default_x_precision(f, k), Exec::default()).expect("catalog builds")
        })
    }

    fn reduce(&mut self, f: &Field, k: u32, a: &PadicElem) -> Result<ReductionResult, String> {
        let opts = ReduceOptions::default();
        let cat = self.catalog(f, k).clone();
        let r = reduce_with(f, k, a, &opts, None, &cat).map_err(|e| e.to_string())?;
        let pair = r.seed.pair.to_pair().map_err(|e| e.to_string())?;
        self.seeds.push(WachSeed {
            k,
            a_p: a.clone(),
            n: r.n_used,
            pair,
            report: r.seed.report.clone(),
            log: r.seed.log.clone(),
        });
        Ok(r)
    }
}

fn qp(p: u64) -> Field {
    Field::qp(p).unwrap()
}

fn int(f: &Field, a: i64) -> PadicElem {
    PadicElem::from_int(f, a, 40)
}

fn expected_h(f: &Field, k: u32) -> i64 {
    match SemisimpleLabel::irreducible(f, (k - 1) as i64, 1) {
        Some(SemisimpleLabel::Irreducible { h, .. }) => h as i64,
        _ => -1,
    }
}

fn label_h(l: &SemisimpleLabel) -> i64 {
    match l {
        SemisimpleLabel::Irreducible { h, .. } => *h as i64,
        SemisimpleLabel::Split { .. } => -1,
    }
}

fn criterion_1(ctx: &mut Ctx) -> Outcome {
    let mut bad = Vec::new();
    let mut runs = 0;
    for p in [3u64, 5, 7] {
        let f = qp(p);
        for k in 2..=p as u32 {
            for a in [p as i64, (p + p * p) as i64, 2 * p as i64] {
                runs += 1;
                match ctx.reduce(&f, k, &int(&f, a)) {
                    Ok(r) if label_h(r.label()) == expected_h(&f, k) => {}
                    Ok(r) => bad.push(format!("p={p} k={k} a_p={a}: {}", r.result.text)),
                    Err(e) => bad.push(format!("p={p} k={k} a_p={a}: {e}")),
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{runs} runs, ind(w2^(k-1)) expected; mismatches: {bad:?}"),
    )
}

fn criterion_2(ctx: &mut Ctx) -> Outcome {
    let f = qp(3);
    let mut bad = Vec::new();
    let mut runs = 0;
    for k in 5..=7u32 {
        let v = (k - 2) / 2 + 1;
        for a in [3i64.pow(v), 2 * 3i64.pow(v), 3i64.pow(v + 1)] {
            runs += 1;
            match ctx.reduce(&f, k, &int(&f, a)) {
                Ok(r) if label_h(r.label()) == expected_h(&f, k) => {}
                Ok(r) => bad.push(format!("k={k} a_p={a}: {}", r.result.text)),
                Err(e) => bad.push(format!("k={k} a_p={a}: {e}")),
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{runs} runs at p=3; mismatches: {bad:?}"),
    )
}

fn residues_equal(a: &PhiGammaPair, b: &PhiGammaPair) -> bool {
    let (ra, rb) = (reduce_pair(a), reduce_pair(b));
    ra.p == rb.p && ra.g == rb.g
}

fn criterion_3(ctx: &mut Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ee_da11);
    let mut done = 0;
    let mut skipped = 0;
    let mut bad = Vec::new();
    while done < 20 {
        let p = if rng.gen_bool(0.5) { 3u64 } else { 5 };
        let f = qp(p);
        let k = rng.gen_range(2..=8u32);
        let v = rng.gen_range(1..=3u32);
        let u = loop {
            let u = rng.gen_range(1..(p * p) as i64);
            if u % p as i64 != 0 {
                break u;
            }
        };
        let a = int(&f, u).mul(&int(&f, p as i64).pow(v)).unwrap();
        // sampling space: seeds exist and the eigenvalues lie in Q_p
        let p0 = FilteredPhiModule::new(k, &a).unwrap().phi_matrix;
        let Ok(radius) = radius_a(&f, k, &a) else {
            skipped += 1;
            continue;
        };
        if eigen_split(&p0).is_err() {
            skipped += 1;
            continue;
        }
        let s = radius.pi_units + 1 + rng.gen_range(0..2u32);
        let plan = PrecisionPlan::for_deformation(&f, k, &a, 3).unwrap();
        let n = plan.seed_precision.max(4);
        let Ok((pair, report, _)) = hensel_seed(&f, k, &a, n, Exec::default()) else {
            skipped += 1;
            continue;
        };
        let a2 = a.add(&PadicElem::pi_pow(&f, s, 40)).unwrap();
        let seed = WachSeed {
            k,
            a_p: a.clone(),
            n,
            pair,
            report,
            log: ConstructionLog {
                strategy: "lift".into(),
                detail: String::new(),
                precision_spent: 0,
            },
        };
        done += 1;
        let tag = format!("p={p} k={k} a_p={a} s={s}");
        let moved = match deform_ap(&seed, &a2) {
            Ok(d) => d,
            Err(e) => {
                bad.push(format!("{tag}: {e}"));
                continue;
            }
        };
        let cat = ctx.catalog(&f, k).clone();
        let l1 = identify_seed(&seed, &cat, Exec::default()).map(|i| i.label);
        let l2 = identify_seed(&moved, &cat, Exec::default()).map(|i| i.label);
        let lifted = seed_module(&f, k, &a2, 4, None, Exec::default());
        let ok = residues_equal(&seed.pair, &moved.pair)
            && moved.report.verdict
            && l1.is_ok()
            && l1 == l2
            && lifted
                .as_ref()
                .is_ok_and(|l| residues_equal(&l.pair, &moved.pair));
        if !ok {
            bad.push(format!("{tag}: labels {l1:?} / {l2:?}"));
        }
        ctx.seeds.push(seed);
        ctx.seeds.push(moved);
    }
    outcome(
        bad.is_empty(),
        format!("20 pairs ({skipped} draws outside the sampling space); failures: {bad:?}"),
    )
}

/// v_p(prod (1 - chi^j)) from a product of p-adic elements, kept separate
/// from the closed form.
fn product_valuation(f: &Field, k: u32) -> u32 {
    let prec = f.max_precision();
    let chi = PadicElem::from_int(f, f.chi_gamma() as i64, prec);
    let one = PadicElem::one(f, prec);
    let mut v = 0;
    for j in 1..=k {
        v += one.sub(&chi.pow(j)).unwrap().valuation().unwrap();
    }
    v
}

fn criterion_4(_: &mut Ctx) -> Outcome {
    let mut bad = Vec::new();
    for p in [3u64, 5, 7] {
        let f = qp(p);
        for k in 1..=100u32 {
            if alpha(p, k) != product_valuation(&f, k) {
                bad.push(format!("identity p={p} k={k}"));
            }
            if alpha(p, k - 1) as u64 > (k as u64 - 1) * p / ((p - 1) * (p - 1)) {
                bad.push(format!("bound p={p} k={k}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("p in {{3,5,7}}, k <= 100; failures: {bad:?}"),
    )
}

fn random_series(
    rng: &mut ChaCha8Rng,
    f: &Field,
    prec: u32,
    m: &Modulus,
    deg: usize,
) -> TruncSeries {
    let p = f.p() as i64;
    let c: Vec<PadicElem> = (0..=deg)
        .map(|_| PadicElem::from_int(f, rng.gen_range(0..p * p), prec))
        .collect();
    TruncSeries::from_padics(f, &c, m)
}

fn random_mat(
    rng: &mut ChaCha8Rng,
    f: &Field,
    prec: u32,
    m: &Modulus,
    deg: usize,
) -> Mat<TruncSeries> {
    Mat::from_rows(
        2,
        (0..4)
            .map(|_| random_series(rng, f, prec, m, deg))
            .collect(),
    )
}

/// Criteria 5 and 6 share the perturbation runs.
fn perturbation_suite(ctx: &mut Ctx) -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe87);
    let pool: Vec<(u64, u32, i64)> = vec![
        (3, 2, 3),
        (3, 3, 6),
        (3, 4, 3),
        (3, 5, 27),
        (3, 6, 27),
        (3, 7, 27),
        (5, 3, 5),
        (5, 4, 10),
        (5, 5, 30),
        (7, 3, 7),
    ];
    let mut label_bad = Vec::new();
    let mut lift_bad = Vec::new();
    for i in 0..50 {
        let (p, k, a) = pool[i % pool.len()];
        let f = qp(p);
        let n = rng.gen_range(3..=5u32);
        let seed = match seed_module(&f, k, &int(&f, a), n, None, Exec::default()) {
            Ok(s) => s,
            Err(e) => {
                label_bad.push(format!("p={p} k={k} a_p={a} n={n}: {e}"));
                continue;
            }
        };
        let cat = ctx.catalog(&f, k).clone();
        let base = identify_seed(&seed, &cat, Exec::default()).map(|i| i.label);
        let nx = cat.x_precision;
        let big = Modulus::PowerOfX(nx + p as usize * k as usize);
        let prec = seed.pair.precision();
        let p_rep = mat_to_modulus(&seed.pair.p, &big);
        let g_rep = mat_to_modulus(&seed.pair.g, &big);
        let phik = TruncSeries::phi_x(&f, prec, &big).pow(k);
        let xk = TruncSeries::monomial(&f, k as usize, prec, &big);
        let s = random_mat(&mut rng, &f, prec, &big, 3);
        let t = random_mat(&mut rng, &f, prec, &big, 3);
        let p2 = p_rep.add(&s.scale(&phik));
        let g2 = g_rep.add(&t.scale(&xk));
        let tag = format!("p={p} k={k} a_p={a} n={n}");

        let bc = equivalence_base_change(&p_rep, &p2, k, nx);
        if !bc
            .as_ref()
            .is_ok_and(|b| b.residual_zero && b.identity_mod_xk)
        {
            lift_bad.push(format!("{tag}: base change {:?}", bc.err()));
        }
        let pert = PhiGammaPair::new(p2, g2, k, Provenance::Fixture);
        let (ext, log) = match extend_g(&pert, nx) {
            Ok(x) => x,
            Err(e) => {
                lift_bad.push(format!("{tag}: extend_g {e}"));
                continue;
            }
        };
        if !(log.residual_zero && log.agrees_mod_xk) {
            lift_bad.push(format!("{tag}: extension log {log:?}"));
        }
        let id = identify(
            &extend_g_residue(&reduce_pair(&ext), nx).unwrap_or_else(|_| reduce_pair(&ext)),
            &cat,
            Exec::default(),
        )
        .map(|i| i.label);
        if base.is_err() || id != base {
            label_bad.push(format!("{tag}: {base:?} vs {id:?}"));
        }
    }
    (
        outcome(
            label_bad.is_empty(),
            format!("50 perturbed seeds; failures: {label_bad:?}"),
        ),
        outcome(
            lift_bad.is_empty(),
            format!("extend_G and base-change contracts on 50 inputs; failures: {lift_bad:?}"),
        ),
    )
}

fn criterion_7(ctx: &mut Ctx) -> Outcome {
    let mut bad = Vec::new();
    for s in &ctx.seeds {
        let w = hodge_weights(&s.pair.p, s.k);
        let r = check_membership(&s.pair, s.k, &s.a_p, s.n);
        if w != Ok(vec![0, s.k - 1]) || !r.weight_relation.holds || !r.verdict {
            bad.push(format!(
                "p={} k={} a_p={}: weights {w:?}",
                s.pair.field().p(),
                s.k,
                s.a_p
            ));
        }
    }
    outcome(
        bad.is_empty() && !ctx.seeds.is_empty(),
        format!(
            "{} seeds from criteria 1-3; failures: {bad:?}",
            ctx.seeds.len()
        ),
    )
}

fn criterion_8(ctx: &mut Ctx) -> Outcome {
    let mut bad = Vec::new();
    for p in [3u64, 5] {
        let f = qp(p);
        let prec = 12;
        for k in 2..=10u32 {
            let n = 40;
            let m = Modulus::PowerOfX(n);
            let q = TruncSeries::q(&f, prec, &m).pow(k - 1);
            let w = TruncSeries::gamma_x(&f, prec, &Modulus::PowerOfX(n + 1))
                .shift_down(1)
                .unwrap();
            let chi = PadicElem::from_int(&f, f.chi_gamma() as i64, prec)
                .inv()
                .unwrap();
            let g = w.scale(&chi).pow(k - 1);
            let pair = PhiGammaPair::new(Mat::scalar1(q), Mat::scalar1(g), k, Provenance::Fixture);
            if !commutation_defect(&pair, &m).is_zero() {
                bad.push(format!("p={p} k={k}: fixture does not commute"));
            }
            let mk = Modulus::phi_x_pow(&f, k);
            let pk = pair.to_modulus(&mk);
            if !commutation_defect(&pk, &mk).is_zero() {
                bad.push(format!("p={p} k={k}: fixture does not commute mod phi^k"));
            }
            if k > p as u32 {
                continue;
            }
            let res = reduce_pair(&pair);
            let fixture_char = classify_rank1(res.p.get(0, 0), res.g.get(0, 0));
            let seed = ctx
                .seeds
                .iter()
                .find(|s| s.pair.field().p() == p && s.k == k);
            let Some(seed) = seed else {
                bad.push(format!("p={p} k={k}: no FL seed"));
                continue;
            };
            let rp = extend_g_residue(&reduce_pair(&seed.pair), n).unwrap();
            let det_char = determinant_char(&rp);
            if fixture_char.is_err() || fixture_char != det_char {
                bad.push(format!(
                    "p={p} k={k}: fixture {fixture_char:?} vs det {det_char:?}"
                ));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("k <= 10, p in {{3,5}}; failures: {bad:?}"),
    )
}

fn random_unit_matrix(rng: &mut ChaCha8Rng, f: &Field, n: usize) -> Mat<ResidueSeries> {
    let p = f.p() as u32;
    loop {
        let entries: Vec<ResidueSeries> = (0..4)
            .map(|_| {
                let mut c = vec![0; n];
                for x in c.iter_mut().take(4) {
                    *x = rng.gen_range(0..p);
                }
                ResidueSeries::new(f, c)
            })
            .collect();
        let m = Mat::from_rows(2, entries);
        if m.det().x_valuation() == Some(0) {
            return m;
        }
    }
}

fn criterion_9(_: &mut Ctx) -> Outcome {
    let f = qp(3);
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0_9);
    let mut total = 0;
    let mut ambiguous = 0;
    let mut bad = Vec::new();
    for k in 2..=4u32 {
        let n = identification_precision(&f, 2 * (f.p() as usize) + 2 * (k as usize - 1))
            + 3 * k as usize;
        let cat = build_catalog(&f, k, n, Exec::default()).unwrap();
        for entry in &cat.entries {
            let mut conj = Vec::new();
            let mut draws = 0;
            while conj.len() < 100 && draws < 5000 {
                draws += 1;
                let a = rng.gen_range(0..k as usize);
                let b = rng.gen_range(0..k as usize - a);
                let z = ResidueSeries::zero(&f, n);
                let d = Mat::new2(
                    ResidueSeries::monomial(&f, 1, a, n),
                    z.clone(),
                    z,
                    ResidueSeries::monomial(&f, 1, b, n),
                );
                let m = random_unit_matrix(&mut rng, &f, n)
                    .mul(&d)
                    .mul(&random_unit_matrix(&mut rng, &f, n));
                if let Ok(c) = conjugate_pair(&entry.pair, &m) {
                    conj.push(c);
                }
            }
            if conj.len() < 100 {
                bad.push(format!(
                    "{}: only {} integral conjugates",
                    entry.label,
                    conj.len()
                ));
            }
            let ids = Exec::default().map(&conj, |c| identify(c, &cat, Exec::Sequential));
            for id in ids {
                total += 1;
                match id {
                    Ok(i) if i.label == entry.label => {}
                    Err(wachred::Error::AmbiguousMatch(m)) => {
                        ambiguous += 1;
                        bad.push(format!("{}: ambiguous {m}", entry.label));
                    }
                    other => bad.push(format!("{}: {:?}", entry.label, other.map(|i| i.label))),
                }
            }
        }
    }
    bad.truncate(10);
    outcome(
        bad.is_empty(),
        format!("{total} conjugates at p=3, k <= 4, {ambiguous} ambiguous; failures: {bad:?}"),
    )
}

fn criterion_10(ctx: &mut Ctx) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cache = SeedCache::new(dir.path());
    let mut bad = Vec::new();
    for (p, k, a) in [(5u64, 3u32, 5i64), (3, 5, 27), (3, 4, 3)] {
        let f = qp(p);
        let cat = ctx.catalog(&f, k).clone();
        let opts = ReduceOptions::default();
        let run = |c: Option<&SeedCache>| -> String {
            let mut r = reduce_with(&f, k, &int(&f, a), &opts, c, &cat).unwrap();
            r.timing_ms = None;
            serde_json::to_string_pretty(&r).unwrap()
        };
        let cold = run(Some(&cache));
        let warm = run(Some(&cache));
        let none = run(None);
        if cold != warm || cold != none {
            bad.push(format!("p={p} k={k} a_p={a}"));
        }
    }
    let stored = cache.list().map(|l| l.len()).unwrap_or(0);
    outcome(
        bad.is_empty() && stored > 0,
        format!("cold, warm and uncached runs; {stored} cache documents; differing: {bad:?}"),
    )
}

fn run(name: &str, idx: usize, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
    });
    println!(
        "criterion {idx:>2} {} {name} ({:.1}s): {}",
        if o.pass { "PASS" } else { "FAIL" },
        t.elapsed().as_secs_f64(),
        o.detail
    );
    o.pass
}

fn main() {
    let mut ctx = Ctx::default();
    let mut ok = true;
    ok &= run("Fontaine-Laffaille range", 1, || criterion_1(&mut ctx));
    ok &= run("p=3 large-slope range", 2, || criterion_2(&mut ctx));
    ok &= run("local constancy in a_p", 3, || criterion_3(&mut ctx));
    ok &= run("alpha identity and bound", 4, || criterion_4(&mut ctx));
    let mut c6 = None;
    ok &= run("uniqueness under phi^k/X^k perturbation", 5, || {
        let (a, b) = perturbation_suite(&mut ctx);
        c6 = Some(b);
        a
    });
    ok &= run("lifting contracts", 6, || {
        c6.unwrap_or_else(|| outcome(false, "suite did not run"))
    });
    ok &= run("weight certificates", 7, || criterion_7(&mut ctx));
    ok &= run("rank-1 fixture", 8, || criterion_8(&mut ctx));
    ok &= run("identification under conjugation", 9, || {
        criterion_9(&mut ctx)
    });
    ok &= run("determinism", 10, || criterion_10(&mut ctx));
    if !ok {
        std::process::exit(1);
    }
}
