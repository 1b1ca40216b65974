//! Construction of members of W_{k,a_p}(n) by lifting one power of pi at a time.
//!
//! Every defining condition is polynomial in the coefficients of (P, G) mod
//! phi(X)^k, so a correction pi^n (dP, dG) changes the defect by pi^n L(dP, dG)
//! modulo pi^{n+1}, with L the k_E-linear derivative at the residue. L is fixed
//! once the residue is, so a single matrix serves every level. A one-level
//! lookahead picks the kernel component of each correction so that the next
//! level stays solvable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::Field;
use crate::linalg::{left_kernel, solve, FqMatrix};
use crate::matrix::Mat;
use crate::modp::induced_pair;
use crate::padic::PadicElem;
use crate::phigamma::{
    check_membership, commutation_defect, gamma1_matrix, gamma1_weight_eigenvalue, MembershipReport,
};
use crate::phigamma::{PhiGammaPair, Provenance};
use crate::residue::Fq;
use crate::series::{Modulus, TruncSeries};

/// Per-level record of the lift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftStep {
    pub level: u32,
    /// "none", "affine", "random:<trials>" or "failed".
    pub lookahead: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftLog {
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    pub cokernel: usize,
    pub steps: Vec<LiftStep>,
}

struct Ctx {
    field: Field,
    k: u32,
    a_p: PadicElem,
    m: Modulus,
    qmod: Modulus,
    d: usize,
}

impl Ctx {
    fn defects(&self, x: &[TruncSeries]) -> Vec<PadicElem> {
        let prec = x.iter().map(|s| s.precision()).min().unwrap_or(1);
        let p = Mat::from_rows(2, x[..4].to_vec());
        let g = Mat::from_rows(2, x[4..].to_vec());
        let pair = PhiGammaPair::new(p, g, self.k, Provenance::Seed);
        let mut out = Vec::with_capacity(self.rows());
        for e in commutation_defect(&pair, &self.m).entries() {
            out.extend((0..self.d).map(|j| e.coeff(j)));
        }
        let qk = TruncSeries::q(&self.field, prec, &self.m).pow(self.k - 1);
        let det = pair.p.det().sub(&qk);
        out.extend((0..self.d).map(|j| det.coeff(j)));
        let tr = pair.p.trace().coeff(0);
        out.push(tr.sub(&self.a_p.with_precision(prec)).expect("same field"));
        let g1 = gamma1_matrix(&pair.g);
        let c = TruncSeries::constant(
            &gamma1_weight_eigenvalue(&self.field, self.k, prec),
            &self.m,
        );
        let id = g1.identity_like();
        let pi = g1.sub(&id).mul(&g1.sub(&id.scale(&c)));
        let pl = self.field.p() as usize - 1;
        for e in pi.entries() {
            let r = e.to_modulus(&self.qmod);
            out.extend((0..pl).map(|j| r.coeff(j)));
        }
        for i in 0..2 {
            for j in 0..2 {
                let c0 = pair.g.get(i, j).coeff(0);
                let want = PadicElem::from_int(&self.field, (i == j) as i64, prec);
                out.push(c0.sub(&want).expect("same field"));
            }
        }
        out
    }

    fn rows(&self) -> usize {
        5 * self.d + 1 + 4 * (self.field.p() as usize - 1) + 4
    }

    fn unknowns(&self) -> usize {
        8 * self.d
    }

    /// x + pi^n * lift(d), at precision `prec`.
    fn step(&self, x: &[TruncSeries], n: u32, d: &[Fq], prec: u32) -> Vec<TruncSeries> {
        let pin = PadicElem::pi_pow(&self.field, n, prec);
        let mut out: Vec<TruncSeries> = x.iter().map(|s| lift_to(s, prec)).collect();
        for (idx, &c) in d.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (e, j) = (idx / self.d, idx % self.d);
            let add = PadicElem::from_residue(&self.field, c, prec)
                .mul(&pin)
                .expect("same field");
            let cur = out[e].coeff(j);
            out[e].set_coeff(j, &cur.add(&add).expect("same field"));
        }
        out
    }

    /// Residues of defect / pi^n; fails if x is not in W(n).
    fn scaled_residues(&self, x: &[TruncSeries], n: u32) -> Result<Vec<Fq>> {
        self.defects(x)
            .iter()
            .map(|v| v.divide_exact(n).map(|y| y.residue()))
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::PreconditionDefect(format!("pair is not in W({n})")))
    }
}

fn lift_to(s: &TruncSeries, prec: u32) -> TruncSeries {
    if s.precision() >= prec {
        s.with_precision(prec)
    } else {
        s.lift_precision(prec)
    }
}

/// The reduction of the a_p = 0 module P = [[0,-1],[Q^{k-1},0]], as a pair
/// mod (pi, phi(X)^k).
pub fn start_residue(field: &Field, k: u32) -> PhiGammaPair {
    let m = Modulus::phi_x_pow(field, k);
    let d = m.len();
    let (r, _) = induced_pair(field, k - 1, 0, 1, d);
    PhiGammaPair::new(
        r.p.map(|s| TruncSeries::from_residue(s, &m)),
        r.g.map(|s| TruncSeries::from_residue(s, &m)),
        k,
        Provenance::Seed,
    )
}

fn dot(kf: &crate::residue::ResidueField, a: &[Fq], b: &[Fq]) -> Fq {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| kf.add(acc, kf.mul(x, y)))
}

fn combine(kf: &crate::residue::ResidueField, base: &[Fq], vecs: &[Vec<Fq>], c: &[Fq]) -> Vec<Fq> {
    let mut out = base.to_vec();
    for (v, &ci) in vecs.iter().zip(c) {
        if ci == 0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(v) {
            *o = kf.add(*o, kf.mul(ci, x));
        }
    }
    out
}

const RANDOM_TRIALS: usize = 256;

/// Lift the start residue to a member of W_{k,a_p}(n).
pub fn hensel_seed(
    field: &Field,
    k: u32,
    a_p: &PadicElem,
    n: u32,
    exec: Exec,
) -> Result<(PhiGammaPair, MembershipReport, LiftLog)> {
    if k < 2 {
        return Err(Error::Domain("k must be at least 2".into()));
    }
    if a_p.valuation() == Some(0) {
        return Err(Error::Domain("a_p must lie in the maximal ideal".into()));
    }
    if n < 1 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if n + 2 > field.max_precision() || n > a_p.precision() {
        return Err(Error::InsufficientPrecision(format!(
            "n = {n} needs a_p known mod pi^{n} and storage for pi^{}",
            n + 2
        )));
    }
    let m = Modulus::phi_x_pow(field, k);
    let ctx = Ctx {
        field: field.clone(),
        k,
        a_p: a_p.clone(),
        d: m.len(),
        m,
        qmod: Modulus::q_poly(field),
    };
    let kf = field.residue_field();
    let start = start_residue(field, k);
    let x1: Vec<TruncSeries> = start
        .p
        .entries()
        .iter()
        .chain(start.g.entries())
        .cloned()
        .collect();

    // derivative mod pi at the residue
    let base2 = ctx.defects(&x1.iter().map(|s| s.lift_precision(2)).collect::<Vec<_>>());
    let nunk = ctx.unknowns();
    let columns: Vec<Vec<Fq>> = exec.map_range(nunk, |i| {
        let mut d = vec![0; nunk];
        d[i] = 1;
        let y = ctx.step(&x1, 1, &d, 2);
        ctx.defects(&y)
            .iter()
            .zip(&base2)
            .map(|(a, b)| a.sub(b).unwrap().divide_exact(1).unwrap().residue())
            .collect()
    });
    let a = FqMatrix::from_columns(ctx.rows(), &columns);
    let y = left_kernel(kf, &a);
    let mut log = LiftLog {
        unknowns: nunk,
        equations: ctx.rows(),
        rank: nunk - crate::linalg::kernel(kf, &a).len(),
        cokernel: y.len(),
        steps: Vec::new(),
    };

    let obstruction = |x: &[TruncSeries], lvl: u32| -> Result<Vec<Fq>> {
        let b = ctx.scaled_residues(x, lvl)?;
        Ok(y.iter().map(|yy| dot(kf, yy, &b)).collect())
    };
    let mut x = x1;
    let mut rng = ChaCha8Rng::seed_from_u64(field.p() * 1000 + k as u64);
    // linear part of the next-level obstruction in the kernel coefficients
    let mut bmat: Option<FqMatrix> = None;

    for lvl in 1..n {
        let xn: Vec<TruncSeries> = x.iter().map(|s| lift_to(s, lvl + 1)).collect();
        let rhs: Vec<Fq> = ctx
            .scaled_residues(&xn, lvl)?
            .iter()
            .map(|&v| kf.neg(v))
            .collect();
        let Some((part, ker)) = solve(kf, &a, &rhs) else {
            let o: Vec<Fq> = y.iter().map(|yy| dot(kf, yy, &rhs)).collect();
            log.steps.push(LiftStep {
                level: lvl + 1,
                lookahead: "failed".into(),
            });
            return Err(Error::SeedNotFound(format!(
                "no lift from W({lvl}) to W({}) for k={k}, a_p={a_p}; obstruction {:?}",
                lvl + 1,
                o
            )));
        };
        let last = lvl + 1 == n;
        let mut choice = vec![0; ker.len()];
        let mut how = "none".to_string();
        if !last && !y.is_empty() && !ker.is_empty() {
            let try_c = |c: &[Fq]| -> Result<Vec<Fq>> {
                let d = combine(kf, &part, &ker, c);
                obstruction(&ctx.step(&x, lvl, &d, lvl + 2), lvl + 1)
            };
            let o0 = try_c(&choice)?;
            if o0.iter().all(|&v| v == 0) {
                how = "none".into();
            } else {
                let mut found = None;
                if lvl >= 2 {
                    if bmat.is_none() {
                        bmat = Some(obstruction_linear_part(&ctx, &x, &ker, &y, exec));
                    }
                    let b = bmat.as_ref().unwrap();
                    let neg: Vec<Fq> = o0.iter().map(|&v| kf.neg(v)).collect();
                    if let Some((c, _)) = solve(kf, b, &neg) {
                        if try_c(&c)?.iter().all(|&v| v == 0) {
                            found = Some((c, "affine".to_string()));
                        }
                    }
                }
                if found.is_none() {
                    let cands: Vec<Vec<Fq>> = (0..RANDOM_TRIALS)
                        .map(|_| {
                            (0..ker.len())
                                .map(|_| rng.gen_range(0..kf.size()))
                                .collect()
                        })
                        .collect();
                    let res = exec.map(&cands, |c| {
                        try_c(c).map(|o| o.iter().all(|&v| v == 0)).unwrap_or(false)
                    });
                    if let Some(t) = res.iter().position(|&ok| ok) {
                        found = Some((cands[t].clone(), format!("random:{}", t + 1)));
                    }
                }
                match found {
                    Some((c, h)) => {
                        choice = c;
                        how = h;
                    }
                    None => how = "failed".into(),
                }
            }
        }
        let d = combine(kf, &part, &ker, &choice);
        x = ctx.step(&x, lvl, &d, lvl + 1);
        log.steps.push(LiftStep {
            level: lvl + 1,
            lookahead: how,
        });
    }
    let pair = PhiGammaPair::new(
        Mat::from_rows(2, x[..4].to_vec()),
        Mat::from_rows(2, x[4..].to_vec()),
        k,
        Provenance::Seed,
    );
    let report = check_membership(&pair, k, a_p, n);
    if !report.verdict {
        return Err(Error::SeedNotFound(format!(
            "lifted pair fails certification: {report:?}"
        )));
    }
    Ok((pair, report, log))
}

/// Matrix of c -> (obstruction at the next level) - (its value at c = 0),
/// valid from level 2 on, where it depends only on x mod pi^2.
fn obstruction_linear_part(
    ctx: &Ctx,
    x: &[TruncSeries],
    ker: &[Vec<Fq>],
    y: &[Vec<Fq>],
    exec: Exec,
) -> FqMatrix {
    let kf = ctx.field.residue_field();
    let x4: Vec<TruncSeries> = x.iter().map(|s| lift_to(&s.with_precision(2), 4)).collect();
    let base = ctx.defects(&x4);
    let cols: Vec<Vec<Fq>> = exec.map(ker, |kv| {
        let z = ctx.step(&x4, 2, kv, 4);
        let b: Vec<Fq> = ctx
            .defects(&z)
            .iter()
            .zip(&base)
            .map(|(a, b)| {
                a.sub(b)
                    .unwrap()
                    .divide_exact(3)
                    .map(|v| v.residue())
                    .unwrap_or(0)
            })
            .collect();
        y.iter().map(|yy| dot(kf, yy, &b)).collect()
    });
    FqMatrix::from_columns(y.len(), &cols)
}
