//! Wach-module data for V_{k,a_p}: the filtered phi-module, local constancy
//! in a_p (eigenvector splitting, the correction H, the corrected Gamma-matrix),
//! determinant normalization and the radius calculators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldParams};
use crate::matrix::Mat;
use crate::padic::PadicElem;
use crate::phigamma::{
    check_membership, extend_g, mat_coeff, mat_constant_term, MembershipReport, PhiGammaPair,
    Provenance,
};
use crate::series::{Modulus, TruncSeries};

/// alpha(k) = sum_{n >= 1} floor(k / (p^{n-1} (p-1))).
pub fn alpha(p: u64, k: u32) -> u32 {
    let mut total = 0;
    let mut d = p - 1;
    while d <= k as u64 {
        total += (k as u64 / d) as u32;
        d *= p;
    }
    total
}

/// v_p(1 - chi(gamma)^j), computed from the integer chi(gamma).
pub fn one_minus_chi_pow_valuation(field: &Field, j: u32) -> u32 {
    let prec = field.max_precision();
    let chi = PadicElem::from_int(field, field.chi_gamma() as i64, prec);
    let x = PadicElem::one(field, prec)
        .sub(&chi.pow(j))
        .expect("same field");
    x.valuation().unwrap_or(prec) / field.e() as u32
}

/// D_{k,a_p} with the matrix of phi in the basis (e1, e2).
#[derive(Clone, Debug)]
pub struct FilteredPhiModule {
    pub k: u32,
    pub a_p: PadicElem,
    pub phi_matrix: Mat<PadicElem>,
    pub fil_jumps: [u32; 2],
}

impl FilteredPhiModule {
    pub fn new(k: u32, a_p: &PadicElem) -> Result<FilteredPhiModule> {
        if k < 2 {
            return Err(Error::Domain("k must be at least 2".into()));
        }
        if a_p.is_unit() {
            return Err(Error::Domain("a_p must lie in the maximal ideal".into()));
        }
        let f = a_p.field();
        let prec = a_p.precision();
        let pk = PadicElem::from_int(f, f.p() as i64, prec).pow(k - 1);
        let m = Mat::new2(
            PadicElem::zero(f, prec),
            pk,
            PadicElem::from_int(f, -1, prec),
            a_p.clone(),
        );
        Ok(FilteredPhiModule {
            k,
            a_p: a_p.clone(),
            phi_matrix: m,
            fil_jumps: [0, k - 1],
        })
    }
}

impl FieldParams {
    /// Parameters of the field generated over Q_p by a square root of `disc`.
    /// Returns the same parameters when the root already exists.
    pub fn extend_by_root(&self, disc: &PadicElem) -> Result<FieldParams> {
        let v = disc.valuation().ok_or(Error::RepeatedEigenvalue)?;
        if self.e == 1 && self.f == 1 {
            let u = disc.divide_exact(v)?;
            let k = disc.field().residue_field();
            if v % 2 == 1 {
                return FieldParams::ramified_quadratic(
                    self.p,
                    u.residue() as i64,
                    self.pi_precision,
                );
            }
            if k.is_square(u.residue()) {
                return Ok(self.clone());
            }
            return FieldParams::unramified_quadratic(self.p, self.pi_precision);
        }
        if sqrt_padic(disc).is_ok() {
            return Ok(self.clone());
        }
        Err(Error::Domain(
            "eigenvalue extension over a nontrivial E is not supported; quadratic towers only"
                .into(),
        ))
    }
}

/// A square root of x in E, if one exists.
pub fn sqrt_padic(x: &PadicElem) -> Result<PadicElem> {
    let f = x.field();
    let v = x
        .valuation()
        .ok_or_else(|| Error::IndeterminateAtPrecision("square root of zero".into()))?;
    if v % 2 == 1 {
        return Err(Error::Domain("odd valuation has no square root".into()));
    }
    let u = x.divide_exact(v)?;
    let r0 = f
        .residue_field()
        .sqrt(u.residue())
        .ok_or_else(|| Error::Domain("residue is not a square".into()))?;
    let r = PadicElem::from_residue(f, r0, u.precision());
    let t = u
        .mul(&r.mul(&r)?.inv()?)?
        .sub(&PadicElem::one(f, u.precision()))?;
    let s = r.mul(&PadicElem::sqrt_one_plus(&t)?)?;
    s.mul(&PadicElem::pi_pow(f, v / 2, u.precision() + v / 2))
}

#[derive(Clone, Debug)]
pub struct EigenSplit {
    /// Columns are eigenvectors, each in M but not in pi M.
    pub y: Mat<PadicElem>,
    pub lambda: PadicElem,
    pub mu: PadicElem,
    pub delta: PadicElem,
}

/// Diagonalize a constant 2x2 matrix with distinct eigenvalues in E.
pub fn eigen_split(p0: &Mat<PadicElem>) -> Result<EigenSplit> {
    let f = p0.get(0, 0).field().clone();
    let tr = p0.trace();
    let det = p0.det();
    let four = PadicElem::from_int(&f, 4, f.max_precision());
    let disc = tr.mul(&tr)?.sub(&four.mul(&det)?)?;
    if disc.is_zero() {
        return Err(Error::RepeatedEigenvalue);
    }
    let s = sqrt_padic(&disc).map_err(|_| {
        let ext = f.params().extend_by_root(&disc);
        Error::Domain(format!(
            "eigenvalues generate a quadratic extension; rerun over {ext:?}"
        ))
    })?;
    let half = PadicElem::from_int(&f, 2, f.max_precision()).inv()?;
    let lambda = tr.add(&s)?.mul(&half)?;
    let mu = tr.sub(&s)?.mul(&half)?;
    let delta = lambda.sub(&mu)?;
    let vec_for = |ev: &PadicElem| -> Result<[PadicElem; 2]> {
        let a = p0.get(0, 0);
        let b = p0.get(0, 1);
        let c = p0.get(1, 0);
        let d = p0.get(1, 1);
        let c1 = [b.clone(), ev.sub(a)?];
        let c2 = [ev.sub(d)?, c.clone()];
        let val = |v: &[PadicElem; 2]| v.iter().filter_map(|x| x.valuation()).min();
        let pick = match (val(&c1), val(&c2)) {
            (Some(x), Some(y)) if y < x => c2,
            (None, Some(_)) => c2,
            (Some(_), _) => c1,
            (None, None) => {
                return Err(Error::IndeterminateAtPrecision(
                    "eigenvector vanishes at precision".into(),
                ))
            }
        };
        let m = val(&pick).unwrap();
        Ok([pick[0].divide_exact(m)?, pick[1].divide_exact(m)?])
    };
    let v = vec_for(&lambda)?;
    let w = vec_for(&mu)?;
    let y = Mat::new2(v[0].clone(), w[0].clone(), v[1].clone(), w[1].clone());
    Ok(EigenSplit {
        y,
        lambda,
        mu,
        delta,
    })
}

/// Inverse of a constant matrix with nonzero determinant (may have denominators
/// bounded by the caller; fails if an entry is not divisible).
fn scaled_inverse(y: &Mat<PadicElem>) -> Result<(Mat<PadicElem>, PadicElem)> {
    let det = y.det();
    if det.is_zero() {
        return Err(Error::IndeterminateAtPrecision(
            "singular eigenvector matrix".into(),
        ));
    }
    Ok((y.adj(), det))
}

/// H0 = Y [[y,-y],[y,-y]] Y^{-1} with y = eps/delta.
pub fn build_h0(
    y: &Mat<PadicElem>,
    delta: &PadicElem,
    eps: &PadicElem,
    alpha_k: u32,
) -> Result<Mat<PadicElem>> {
    let f = delta.field().clone();
    let e = f.e() as u32;
    let vd = delta.valuation().ok_or(Error::RepeatedEigenvalue)?;
    let zero = PadicElem::zero(&f, eps.precision());
    let Some(ve) = eps.valuation() else {
        return Ok(Mat::new2(zero.clone(), zero.clone(), zero.clone(), zero));
    };
    if ve <= 2 * vd + e * alpha_k {
        return Err(Error::RadiusViolation(format!(
            "v(eps) = {ve} must exceed 2 v(delta) + alpha = {} (pi-adic units)",
            2 * vd + e * alpha_k
        )));
    }
    let yy = eps.div(delta)?;
    let core = Mat::new2(yy.clone(), yy.neg(), yy.clone(), yy.neg());
    let (adj, det) = scaled_inverse(y)?;
    let num = y.mul(&core).mul(&adj);
    num.try_map(|x| x.div(&det))
}

/// Coefficients c[i][m] of X^m in gamma(X)^i, for i, m < k.
fn gamma_powers(field: &Field, k: usize, prec: u32) -> Vec<Vec<PadicElem>> {
    let m = Modulus::PowerOfX(k);
    let gx = TruncSeries::gamma_x(field, prec, &m);
    let mut out = Vec::with_capacity(k);
    let mut cur = TruncSeries::one(field, prec, &m);
    for _ in 0..k {
        out.push(cur.coeffs());
        cur = cur.mul(&gx);
    }
    out
}

/// H with H(0) = H0 and H G = G gamma(H) mod X^k, by the recursion
/// (1 - chi^r) H_r = (terms in H_0, ..., H_{r-1}).
pub fn extend_h(g: &Mat<TruncSeries>, h0: &Mat<PadicElem>, k: u32) -> Result<Mat<TruncSeries>> {
    let field = h0.get(0, 0).field().clone();
    let kk = k as usize;
    let prec = h0.entries().iter().map(|x| x.precision()).min().unwrap();
    let c = gamma_powers(&field, kk, field.max_precision());
    let gs: Vec<Mat<PadicElem>> = (0..kk).map(|j| mat_coeff(g, j)).collect();
    let id0 = mat_constant_term(g);
    if !id0.sub(&id0.identity_like()).is_zero() {
        return Err(Error::PreconditionDefect(
            "G is not the identity mod X".into(),
        ));
    }
    let chi = PadicElem::from_int(&field, field.chi_gamma() as i64, field.max_precision());
    let one = PadicElem::one(&field, field.max_precision());
    let mut hs: Vec<Mat<PadicElem>> = vec![h0.clone()];
    for r in 1..kk {
        let mut rhs = h0.zero_like();
        for (i, hi) in hs.iter().enumerate() {
            rhs = rhs.add(&hi.scale(&c[i][r])).sub(&hi.mul(&gs[r - i]));
        }
        for j in 1..=r {
            // [gamma(H)]_{r-j}
            let mut gh = h0.zero_like();
            for (i, hi) in hs.iter().enumerate().take(r - j + 1) {
                gh = gh.add(&hi.scale(&c[i][r - j]));
            }
            rhs = rhs.add(&gs[j].mul(&gh));
        }
        let denom = one.sub(&chi.pow(r as u32))?;
        let hr = rhs.try_map(|x| x.div(&denom)).map_err(|e| match e {
            Error::NotDivisible(m) => Error::RadiusViolation(format!("H_{r} is not integral: {m}")),
            Error::InsufficientPrecision(m) => Error::PrecisionExhausted(format!("H_{r}: {m}")),
            other => other,
        })?;
        hs.push(hr);
    }
    let m = Modulus::PowerOfX(kk);
    let mut out = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            let coeffs: Vec<PadicElem> = hs
                .iter()
                .map(|h| h.get(i, j).with_precision(prec))
                .collect();
            out.push(TruncSeries::from_padics(&field, &coeffs, &m));
        }
    }
    Ok(Mat::from_rows(2, out))
}

/// The Gamma-matrix for P' from the one for P, unchanged mod X^k, commuting
/// exactly modulo phi(X)^k.
pub fn correct_g(
    p_new: &Mat<TruncSeries>,
    g: &Mat<TruncSeries>,
    k: u32,
) -> Result<Mat<TruncSeries>> {
    let field = p_new.get(0, 0).field().clone();
    let m = p_new.get(0, 0).modulus().clone();
    let prec = p_new
        .entries()
        .iter()
        .chain(g.entries())
        .map(|x| x.precision())
        .min()
        .unwrap();
    let n_x = m.lift_length(&field, prec).max(k as usize + 1);
    let pair = PhiGammaPair::new(p_new.clone(), g.clone(), k, Provenance::Deformed);
    let (ext, log) = extend_g(&pair, n_x)?;
    if !log.residual_zero {
        return Err(Error::PrecisionExhausted(
            "corrected G leaves a commutation defect".into(),
        ));
    }
    Ok(ext.g.map(|x| x.to_modulus(&m)))
}

/// Square root of a series u = 1 mod X, order by order (p odd).
pub fn series_sqrt(u: &TruncSeries) -> Result<TruncSeries> {
    let f = u.field().clone();
    let prec = u.precision();
    if !u.coeff(0).sub(&PadicElem::one(&f, prec))?.is_zero() {
        return Err(Error::Domain("series square root needs u = 1 mod X".into()));
    }
    let n = u.modulus().lift_length(&f, prec);
    let big = Modulus::PowerOfX(n);
    let ub = u.to_modulus(&big);
    let half = PadicElem::from_int(&f, 2, prec).inv()?;
    let mut s: Vec<PadicElem> = vec![PadicElem::one(&f, prec)];
    for j in 1..n {
        let mut acc = ub.coeff(j);
        for i in 1..j {
            acc = acc.sub(&s[i].mul(&s[j - i])?)?;
        }
        s.push(acc.mul(&half)?);
    }
    Ok(TruncSeries::from_padics(&f, &s, &big).to_modulus(u.modulus()))
}

/// Rescale the basis by v with (phi(v)/v)^2 = u^{-1}, where det(P) = Q^{k-1} u.
pub fn normalize_det(pair: &PhiGammaPair) -> Result<PhiGammaPair> {
    let field = pair.field().clone();
    let k = pair.k;
    let prec = pair.precision();
    let m = pair.modulus().clone();
    let det = pair.p.det();
    let qk = TruncSeries::q(&field, prec, &m).pow(k - 1);
    let (u, r) = det.poly_divrem(&qk)?;
    if !r.is_zero() {
        return Err(Error::PreconditionDefect(
            "det(P) is not divisible by Q^(k-1)".into(),
        ));
    }
    let one = TruncSeries::one(&field, prec, &m);
    if u.sub(&one).is_zero() {
        return Ok(pair.clone());
    }
    let s = series_sqrt(&u.unit_inverse()?)?;
    let v = s.solve_phi_ratio()?;
    let vi = v.unit_inverse()?;
    let phi_ratio = v.frobenius_phi().mul(&vi);
    let gamma_ratio = v.gamma_act(1).mul(&vi);
    Ok(PhiGammaPair {
        p: pair.p.scale(&phi_ratio),
        g: pair.g.scale(&gamma_ratio),
        k,
        meta: pair.meta,
    })
}

/// Outcome of [`solve_g`].
#[derive(Clone, Debug)]
pub enum SolveG {
    Solved {
        g: Mat<TruncSeries>,
        precision_spent: u32,
    },
    Obstruction {
        order: usize,
        valuation: Option<u32>,
    },
}

/// Solve P phi(G) = G gamma(P) for G = Id mod X, one X-order at a time. At
/// order r the unknown G_r enters through S -> p^r P(0) S - S P(0).
pub fn solve_g(p_mat: &Mat<TruncSeries>, n_x: usize) -> Result<SolveG> {
    let field = p_mat.get(0, 0).field().clone();
    let prec = p_mat.entries().iter().map(|x| x.precision()).min().unwrap();
    let m = Modulus::PowerOfX(n_x);
    let pm = p_mat.map(|x| x.to_modulus(&m));
    let d = pm.dim();
    let p0 = mat_constant_term(&pm);
    let gp = pm.map(|x| x.gamma_act(1));
    let mut g = pm.identity_like();
    let mut defect = pm.mul(&g.map(|x| x.frobenius_phi())).sub(&g.mul(&gp));
    let phi_x = TruncSeries::phi_x(&field, prec, &m);
    let mut phi_pow = TruncSeries::one(&field, prec, &m);
    let pe = PadicElem::from_int(&field, field.p() as i64, field.max_precision());
    let mut spent = 0;
    for r in 1..n_x {
        phi_pow = phi_pow.mul(&phi_x);
        let pr = pe.pow(r as u32);
        let rhs = mat_coeff(&defect, r).neg();
        // linear map on d x d matrices, unknowns row-major
        let nn = d * d;
        let mut a = vec![vec![PadicElem::zero(&field, prec); nn]; nn];
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    // (P0 S)_{ij} gets P0_{il} S_{lj}; (S P0)_{ij} gets S_{il} P0_{lj}
                    let t = p0.get(i, l).mul(&pr)?;
                    a[i * d + j][l * d + j] = a[i * d + j][l * d + j].add(&t)?;
                    a[i * d + j][i * d + l] = a[i * d + j][i * d + l].sub(p0.get(l, j))?;
                }
            }
        }
        let b: Vec<PadicElem> = rhs.entries().to_vec();
        let before = b.iter().map(|x| x.precision()).min().unwrap();
        let sol = match padic_solve(a, b) {
            Ok(s) => s,
            Err(v) => {
                return Ok(SolveG::Obstruction {
                    order: r,
                    valuation: v,
                })
            }
        };
        let after = sol.iter().map(|x| x.precision()).min().unwrap();
        spent += before.saturating_sub(after);
        let consts = Mat::from_rows(
            d,
            sol.iter().map(|c| TruncSeries::constant(c, &m)).collect(),
        );
        let gr = consts.map(|x| x.shift_up(r));
        // P phi(G_r X^r) - G_r X^r gamma(P) = P G_r phi(X)^r - G_r X^r gamma(P)
        let delta = pm.mul(&consts).scale(&phi_pow).sub(&gr.mul(&gp));
        defect = defect.add(&delta);
        g = g.add(&gr);
        if g.entries().iter().any(|x| x.precision() == 0) {
            return Ok(SolveG::Obstruction {
                order: r,
                valuation: None,
            });
        }
    }
    Ok(SolveG::Solved {
        g,
        precision_spent: spent,
    })
}

/// Gaussian elimination over O_E/pi^n with valuation pivoting. On failure
/// returns the valuation of the best pivot (None if all vanish).
fn padic_solve(
    mut a: Vec<Vec<PadicElem>>,
    mut b: Vec<PadicElem>,
) -> std::result::Result<Vec<PadicElem>, Option<u32>> {
    let n = b.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut best: Option<(usize, usize, u32)> = None;
        for (r, row) in a.iter().enumerate().skip(col) {
            for (c, x) in row.iter().enumerate().skip(col) {
                if let Some(v) = x.valuation() {
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((r, c, v));
                    }
                }
            }
        }
        let Some((r, c, _)) = best else {
            return Err(None);
        };
        a.swap(col, r);
        b.swap(col, r);
        for row in a.iter_mut() {
            row.swap(col, c);
        }
        perm.swap(col, c);
        let piv = a[col][col].clone();
        for r2 in 0..n {
            if r2 == col {
                continue;
            }
            let fct = match a[r2][col].div(&piv) {
                Ok(f) => f,
                Err(_) => return Err(piv.valuation()),
            };
            for c2 in col..n {
                let t = fct.mul(&a[col][c2]).map_err(|_| None)?;
                a[r2][c2] = a[r2][c2].sub(&t).map_err(|_| None)?;
            }
            let t = fct.mul(&b[col]).map_err(|_| None)?;
            b[r2] = b[r2].sub(&t).map_err(|_| None)?;
        }
    }
    let mut x = vec![None; n];
    for i in 0..n {
        let v = b[i].div(&a[i][i]).map_err(|_| a[i][i].valuation())?;
        x[perm[i]] = Some(v);
    }
    Ok(x.into_iter().map(|v| v.unwrap()).collect())
}

/// Precision budget of a deformation step, in powers of pi.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPlan {
    pub target: u32,
    /// e * alpha(k-1), lost in the recursion for H.
    pub alpha_loss: u32,
    /// 2 v(delta): y = eps/delta and the eigenvector inverse.
    pub gap_loss: u32,
    pub seed_precision: u32,
}

impl PrecisionPlan {
    pub fn for_deformation(
        field: &Field,
        k: u32,
        a_p: &PadicElem,
        target: u32,
    ) -> Result<PrecisionPlan> {
        let disc = discriminant(field, k, a_p);
        let vd = disc.valuation().ok_or(Error::RepeatedEigenvalue)?;
        let alpha_loss = field.e() as u32 * alpha(field.p(), k - 1);
        // v(delta) = v(disc)/2, rounded up
        let gap_loss = vd.div_ceil(2) * 2;
        Ok(PrecisionPlan {
            target,
            alpha_loss,
            gap_loss,
            seed_precision: target + alpha_loss + gap_loss,
        })
    }
}

fn discriminant(field: &Field, k: u32, a_p: &PadicElem) -> PadicElem {
    let prec = a_p.precision();
    let pk = PadicElem::from_int(field, field.p() as i64, prec).pow(k - 1);
    a_p.mul(a_p).unwrap().sub(&pk.mul_int(4)).unwrap()
}

/// Deformation radius: v_p(a_p^2 - 4p^{k-1}) + alpha(k-1), as a fraction over e.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Radius {
    /// Radius in powers of pi.
    pub pi_units: u32,
    pub e: u32,
    /// v_p(a_p) < (k-1)/2, where v_p(disc) = 2 v_p(a_p).
    pub equality_branch: bool,
}

impl Radius {
    pub fn text(&self) -> String {
        if self.pi_units.is_multiple_of(self.e) {
            format!("{}", self.pi_units / self.e)
        } else {
            format!("{}/{}", self.pi_units, self.e)
        }
    }

    /// True if a'_p is strictly inside the radius around a_p.
    pub fn strictly_inside(&self, a: &PadicElem, b: &PadicElem) -> bool {
        match a.sub(b).ok().and_then(|d| d.valuation()) {
            Some(v) => v > self.pi_units,
            None => a.precision().min(b.precision()) > self.pi_units,
        }
    }
}

pub fn radius_a(field: &Field, k: u32, a_p: &PadicElem) -> Result<Radius> {
    if k < 2 {
        return Err(Error::Domain("k must be at least 2".into()));
    }
    let e = field.e() as u32;
    let va = a_p
        .valuation()
        .ok_or_else(|| Error::Domain("a_p must be nonzero".into()))?;
    if va == 0 {
        return Err(Error::Domain("a_p must lie in the maximal ideal".into()));
    }
    let equality_branch = 2 * va < e * (k - 1);
    let vd = if equality_branch {
        2 * va
    } else {
        discriminant(field, k, a_p)
            .valuation()
            .ok_or(Error::RepeatedEigenvalue)?
    };
    Ok(Radius {
        pi_units: vd + e * alpha(field.p(), k - 1),
        e,
        equality_branch,
    })
}

/// k > 3 v_p(a_p) + alpha(k-1) + 1 and a_p^2 not in p^Z.
pub fn thm_b_applicable(field: &Field, k: u32, a_p: &PadicElem) -> Result<bool> {
    let e = field.e() as u32;
    let va = a_p
        .valuation()
        .ok_or_else(|| Error::Domain("a_p must be nonzero".into()))?;
    let bound = e * k > 3 * va + e * (alpha(field.p(), k - 1) + 1);
    let sq = a_p.mul(a_p)?;
    let v2 = sq.valuation().unwrap();
    let in_pz = v2 % e == 0 && {
        let pw = PadicElem::from_int(field, field.p() as i64, sq.precision() + v2).pow(v2 / e);
        sq.eq_at(&pw)
    };
    Ok(bound && !in_pz)
}

/// a_p = y + p^{k-1}/y, for k-1 > v_p(y).
pub fn trianguline_ap(y: &PadicElem, k: u32) -> Result<PadicElem> {
    let f = y.field();
    let vy = y
        .valuation()
        .ok_or_else(|| Error::Domain("y must be nonzero".into()))?;
    if vy >= f.e() as u32 * (k - 1) {
        return Err(Error::Domain("needs k-1 > v_p(y)".into()));
    }
    let pk = PadicElem::from_int(f, f.p() as i64, y.precision() + vy).pow(k - 1);
    y.add(&pk.div(y)?)
}

/// How a seed was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionLog {
    /// "lift", "cache" or "deform".
    pub strategy: String,
    pub detail: String,
    pub precision_spent: u32,
}

/// A certified member of W_{k,a_p}(n).
#[derive(Clone, Debug)]
pub struct WachSeed {
    pub k: u32,
    pub a_p: PadicElem,
    pub n: u32,
    pub pair: PhiGammaPair,
    pub report: MembershipReport,
    pub log: ConstructionLog,
}

/// Move a seed for a_p to one for a'_p inside the deformation radius.
pub fn deform_ap(seed: &WachSeed, a2: &PadicElem) -> Result<WachSeed> {
    let field = seed.pair.field().clone();
    let k = seed.k;
    let eps = a2.sub(&seed.a_p)?;
    if eps.is_zero() {
        let mut s = seed.clone();
        s.a_p = a2.clone();
        return Ok(s);
    }
    let p0 = mat_constant_term(&seed.pair.p);
    let split = eigen_split(&p0)?;
    let alpha_k = alpha(field.p(), k - 1);
    let disc_v = split.delta.valuation().ok_or(Error::RepeatedEigenvalue)? * 2;
    let need = disc_v + field.e() as u32 * alpha_k;
    if eps.valuation().unwrap() <= need {
        return Err(Error::RadiusViolation(format!(
            "v(a'_p - a_p) = {} is not above v(a_p^2 - 4p^(k-1)) + alpha(k-1) = {need} (pi-adic units)",
            eps.valuation().unwrap()
        )));
    }
    let h0 = build_h0(&split.y, &split.delta, &eps, alpha_k)?;
    let h = extend_h(&seed.pair.g, &h0, k)?;
    let m = seed.pair.modulus().clone();
    let hm = h.map(|x| x.to_modulus(&m));
    let p_new = hm.identity_like().add(&hm).mul(&seed.pair.p);
    let g_new = correct_g(&p_new, &seed.pair.g, k)?;
    let pair = normalize_det(&PhiGammaPair::new(p_new, g_new, k, Provenance::Deformed))?;
    let n = pair.precision().min(seed.n);
    if n == 0 {
        return Err(Error::PrecisionExhausted(
            "no precision left after the deformation".into(),
        ));
    }
    let report = check_membership(&pair, k, a2, n);
    if !report.verdict {
        return Err(Error::PrecisionExhausted(format!(
            "deformed pair fails certification at n = {n}"
        )));
    }
    let spent = seed.n - n;
    Ok(WachSeed {
        k,
        a_p: a2.clone(),
        n,
        pair: pair.with_precision(n),
        report,
        log: ConstructionLog {
            strategy: "deform".into(),
            detail: format!("from a_p = {}", seed.a_p),
            precision_spent: spent,
        },
    })
}
