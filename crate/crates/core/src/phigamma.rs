//! Matrix (phi, Gamma)-structures: membership in W_{k,a_p}(n), extension of the
//! Gamma-matrix from X^k to full X-adic precision, base change, weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldParams};
use crate::matrix::Mat;
use crate::padic::PadicElem;
use crate::resseries::ResidueSeries;
use crate::series::{Modulus, TruncSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Seed,
    Deformed,
    Lifted,
    Catalog,
    External,
    Fixture,
}

/// Matrices of phi and gamma on a free module over O_E/pi^n[[X]] (or a quotient).
#[derive(Clone, Debug)]
pub struct PhiGammaPair {
    pub p: Mat<TruncSeries>,
    pub g: Mat<TruncSeries>,
    pub k: u32,
    pub meta: Provenance,
}

/// The same over k_E[[X]], truncated at X^N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResiduePair {
    pub p: Mat<ResidueSeries>,
    pub g: Mat<ResidueSeries>,
    pub k: u32,
    pub meta: Provenance,
}

pub fn mat_phi(m: &Mat<TruncSeries>) -> Mat<TruncSeries> {
    m.map(|x| x.frobenius_phi())
}

pub fn mat_gamma(m: &Mat<TruncSeries>, j: i64) -> Mat<TruncSeries> {
    m.map(|x| x.gamma_act(j))
}

pub fn mat_to_modulus(m: &Mat<TruncSeries>, modulus: &Modulus) -> Mat<TruncSeries> {
    m.map(|x| x.to_modulus(modulus))
}

pub fn mat_precision(m: &Mat<TruncSeries>) -> u32 {
    m.entries().iter().map(|x| x.precision()).min().unwrap_or(0)
}

fn mat_with_precision(m: &Mat<TruncSeries>, prec: u32) -> Mat<TruncSeries> {
    m.map(|x| x.with_precision(prec))
}

/// Constant terms as a matrix over O_E.
pub fn mat_constant_term(m: &Mat<TruncSeries>) -> Mat<PadicElem> {
    m.map(|x| x.coeff(0))
}

/// Coefficient of X^j of every entry.
pub fn mat_coeff(m: &Mat<TruncSeries>, j: usize) -> Mat<PadicElem> {
    m.map(|x| x.coeff(j))
}

fn mat_from_constants(c: &Mat<PadicElem>, modulus: &Modulus, shift: usize) -> Mat<TruncSeries> {
    c.map(|x| TruncSeries::constant(x, modulus).shift_up(shift))
}

fn max_degree(m: &Mat<TruncSeries>) -> usize {
    m.entries()
        .iter()
        .filter_map(|x| x.degree())
        .max()
        .unwrap_or(0)
}

/// True if every entry vanishes below X^k.
fn vanishes_below(m: &Mat<TruncSeries>, k: usize) -> bool {
    m.entries()
        .iter()
        .all(|x| x.x_valuation().is_none_or(|v| v >= k))
}

impl PhiGammaPair {
    pub fn new(p: Mat<TruncSeries>, g: Mat<TruncSeries>, k: u32, meta: Provenance) -> PhiGammaPair {
        PhiGammaPair { p, g, k, meta }
    }

    pub fn field(&self) -> &Field {
        self.p.get(0, 0).field()
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    pub fn precision(&self) -> u32 {
        mat_precision(&self.p).min(mat_precision(&self.g))
    }

    pub fn modulus(&self) -> &Modulus {
        self.p.get(0, 0).modulus()
    }

    pub fn to_modulus(&self, m: &Modulus) -> PhiGammaPair {
        PhiGammaPair {
            p: mat_to_modulus(&self.p, m),
            g: mat_to_modulus(&self.g, m),
            k: self.k,
            meta: self.meta,
        }
    }

    pub fn with_precision(&self, n: u32) -> PhiGammaPair {
        PhiGammaPair {
            p: mat_with_precision(&self.p, n),
            g: mat_with_precision(&self.g, n),
            k: self.k,
            meta: self.meta,
        }
    }
}

/// P phi(G) - G gamma(P), computed in the given quotient.
pub fn commutation_defect(pair: &PhiGammaPair, modulus: &Modulus) -> Mat<TruncSeries> {
    let p = mat_to_modulus(&pair.p, modulus);
    let g = mat_to_modulus(&pair.g, modulus);
    p.mul(&mat_phi(&g)).sub(&g.mul(&mat_gamma(&p, 1)))
}

/// G_1 = G gamma(G) ... gamma^{p-2}(G), the matrix of gamma^{p-1}.
pub fn gamma1_matrix(g: &Mat<TruncSeries>) -> Mat<TruncSeries> {
    let p = g.get(0, 0).field().p();
    let mut acc = g.clone();
    let mut cur = g.clone();
    for _ in 1..p - 1 {
        cur = mat_gamma(&cur, 1);
        acc = acc.mul(&cur);
    }
    acc
}

/// chi(gamma_1)^{-(k-1)} = chi(gamma)^{-(p-1)(k-1)}.
pub fn gamma1_weight_eigenvalue(field: &Field, k: u32, prec: u32) -> PadicElem {
    let chi = PadicElem::from_int(field, field.chi_gamma() as i64, prec);
    let c = chi.pow((field.p() as u32 - 1) * (k - 1));
    c.inv().expect("chi is a unit")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub holds: bool,
    /// "0" when the condition holds, otherwise an excerpt of the defect.
    pub defect: String,
}

impl Condition {
    fn from_matrix(m: &Mat<TruncSeries>) -> Condition {
        for (idx, x) in m.entries().iter().enumerate() {
            if !x.is_zero() {
                let d = m.dim();
                let mut text = x.to_text();
                if text.len() > 240 {
                    text.truncate(240);
                    text.push_str(" ...");
                }
                return Condition {
                    holds: false,
                    defect: format!("entry ({},{}): {}", idx / d, idx % d, text),
                };
            }
        }
        Condition {
            holds: true,
            defect: "0".into(),
        }
    }

    fn and(a: Condition, b: Condition) -> Condition {
        match (a.holds, b.holds) {
            (true, true) => a,
            (false, _) => a,
            _ => b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub k: u32,
    pub n: u32,
    /// P phi(G) = G gamma(P) mod phi(X)^k.
    pub commutation: Condition,
    /// G = Id mod X.
    pub gamma_trivial_mod_x: Condition,
    /// det(P) = Q^{k-1} and Tr(P) = a_p mod X.
    pub det_trace: Condition,
    /// Pi(G_1) = 0 mod Q.
    pub weight_relation: Condition,
    pub verdict: bool,
}

/// Evaluate the four defining conditions of W_{k,a_p}(n). Never fails.
pub fn check_membership(pair: &PhiGammaPair, k: u32, a_p: &PadicElem, n: u32) -> MembershipReport {
    let field = pair.field().clone();
    let m = Modulus::phi_x_pow(&field, k);
    let pr = pair.to_modulus(&m).with_precision(n);
    let n = pr.precision().min(n);

    let commutation = Condition::from_matrix(&commutation_defect(&pr, &m));

    let id = pr.g.identity_like();
    let g0 = mat_constant_term(&pr.g);
    let g0_defect = g0.map(|c| c.clone()).sub(&mat_constant_term(&id));
    let gamma_trivial_mod_x = Condition::from_matrix(&mat_from_constants(&g0_defect, &m, 0));

    let d = pr.p.dim() as u32;
    let qk = TruncSeries::q(&field, n, &m).pow(k - 1);
    let det_defect = pr.p.det().sub(&qk);
    let tr0 = pr.p.trace().coeff(0);
    let tr_defect = tr0
        .sub(&a_p.with_precision(n))
        .unwrap_or_else(|_| PadicElem::one(&field, n));
    let det_c = Condition::from_matrix(&Mat::scalar1(det_defect));
    let tr_c = if tr_defect.is_zero() {
        Condition {
            holds: true,
            defect: "0".into(),
        }
    } else {
        Condition {
            holds: false,
            defect: format!("trace(P)(0) - a_p = {tr_defect}"),
        }
    };
    let det_trace = Condition::and(det_c, tr_c);

    let g1 = gamma1_matrix(&pr.g);
    let c = gamma1_weight_eigenvalue(&field, k, n);
    let idm = g1.identity_like();
    let pi_g1 = if d == 1 {
        // rank one: the single weight is k-1
        g1.sub(&idm.scale(&TruncSeries::constant(&c, &m)))
    } else {
        g1.sub(&idm)
            .mul(&g1.sub(&idm.scale(&TruncSeries::constant(&c, &m))))
    };
    let qmod = Modulus::q_poly(&field);
    let weight_relation = Condition::from_matrix(&mat_to_modulus(&pi_g1, &qmod));

    let verdict =
        commutation.holds && gamma_trivial_mod_x.holds && det_trace.holds && weight_relation.holds;
    MembershipReport {
        k,
        n,
        commutation,
        gamma_trivial_mod_x,
        det_trace,
        weight_relation,
        verdict,
    }
}

/// Bookkeeping returned by [`extend_g`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionLog {
    pub x_precision: usize,
    pub corrections: usize,
    pub residual_zero: bool,
    pub agrees_mod_xk: bool,
}

/// Data shared by the X-adic solvers: exact polynomial determinant quotient
/// and Z = Q^{k-1} gamma(P)^{-1}.
struct Linearization {
    pn: Modulus,
    p_n: Mat<TruncSeries>,
    u_poly: TruncSeries,
    gamma_p_poly: Mat<TruncSeries>,
    big: Modulus,
}

fn q_over_gamma_q(field: &Field, prec: u32, n: usize) -> Result<TruncSeries> {
    // gamma(Q)/Q = phi(w)/w with w = gamma(X)/X
    let m1 = Modulus::PowerOfX(n + 1);
    let w = TruncSeries::x(field, prec, &m1)
        .gamma_act(1)
        .shift_down(1)?;
    w.mul(&w.frobenius_phi().unit_inverse()?).shift_down(0)
}

fn linearize(
    p_mat: &Mat<TruncSeries>,
    k: u32,
    n_x: usize,
    extra_degree: usize,
) -> Result<Linearization> {
    let field = p_mat.get(0, 0).field().clone();
    let prec = mat_precision(p_mat);
    let chi = field.chi_gamma() as usize;
    let dp = max_degree(p_mat).max(1);
    let len = (chi * dp).max(extra_degree) + 2 * dp + chi * (field.p() as usize) * (k as usize) + 4;
    let big = Modulus::PowerOfX(len);
    let pb = mat_to_modulus(p_mat, &big);
    let qk1 = TruncSeries::q(&field, prec, &big).pow(k - 1);
    let det = pb.det();
    let u_poly = det
        .poly_div_exact(&qk1)
        .map_err(|_| Error::PreconditionDefect("det(P) is not Q^(k-1) times a unit".into()))?;
    if !u_poly.coeff(0).is_unit() {
        return Err(Error::PreconditionDefect(
            "det(P)/Q^(k-1) is not a unit".into(),
        ));
    }
    let gamma_p_poly = mat_gamma(&pb, 1);
    let pn = Modulus::PowerOfX(n_x);
    let p_n = mat_to_modulus(p_mat, &pn);
    Ok(Linearization {
        pn,
        p_n,
        u_poly,
        gamma_p_poly,
        big,
    })
}

/// S with S - c * A S B = rhs, by the Neumann series (c has positive valuation).
fn neumann(
    rhs: &Mat<PadicElem>,
    c: &PadicElem,
    a: &Mat<PadicElem>,
    b: &Mat<PadicElem>,
) -> Result<Mat<PadicElem>> {
    let mut s = rhs.clone();
    let limit = rhs.get(0, 0).precision() + 2;
    for _ in 0..=limit {
        let next = rhs.add(&a.mul(&s).mul(b).scale(c));
        let same = next.sub(&s).is_zero();
        s = next;
        if same {
            return Ok(s);
        }
    }
    Err(Error::PrecisionExhausted(
        "Neumann series did not stabilize".into(),
    ))
}

/// Extend G from its class mod X^k to a matrix commuting exactly with P to X^{n_x}.
pub fn extend_g(pair: &PhiGammaPair, n_x: usize) -> Result<(PhiGammaPair, ExtensionLog)> {
    let field = pair.field().clone();
    let k = pair.k;
    let kk = k as usize;
    let prec = pair.precision();
    let p = field.p() as usize;
    let chi = field.chi_gamma() as usize;
    if n_x < kk {
        return Err(Error::Domain("X-precision below k".into()));
    }
    let dg = max_degree(&pair.g);
    let dp = max_degree(&pair.p).max(1);
    let need = (dp + p * dg).max(dg + chi * dp) + chi * dp + chi * (p - 1) * kk + 2;
    let lin = linearize(&pair.p.map(|x| x.with_precision(prec)), k, n_x, need)?;
    let big = &lin.big;
    let pb = mat_to_modulus(&pair.p, big).map(|x| x.with_precision(prec));
    let gb = mat_to_modulus(&pair.g, big).map(|x| x.with_precision(prec));
    // E_k = G_k - P phi(G_k) gamma(P)^{-1} = -D adj(gamma P) / (gamma(Q)^{k-1} gamma(u))
    let dmat = pb.mul(&mat_phi(&gb)).sub(&gb.mul(&lin.gamma_p_poly));
    let f = dmat.mul(&lin.gamma_p_poly.adj()).neg();
    // gamma(Q) = Q phi(w)/w; Q is Eisenstein, so the Q-part divides as polynomials
    let qk1 = TruncSeries::q(&field, prec, big).pow(k - 1);
    let e_big = f
        .try_map(|x| x.poly_div_exact(&qk1))
        .map_err(|_| Error::PreconditionDefect("commutation fails modulo phi(X)^k".into()))?;
    let pn = &lin.pn;
    let gu_inv = lin.u_poly.to_modulus(pn).gamma_act(1).unit_inverse()?;
    let ratio = q_over_gamma_q(&field, prec, n_x)?;
    let mut e = mat_to_modulus(&e_big, pn).scale(&gu_inv.mul(&ratio.pow(k - 1)));
    if !vanishes_below(&e, kk) {
        return Err(Error::PreconditionDefect(
            "commutation fails modulo phi(X)^k".into(),
        ));
    }
    let z = mat_to_modulus(&lin.gamma_p_poly, pn)
        .adj()
        .scale(&ratio.pow(k - 1).mul(&gu_inv));
    let p_n = &lin.p_n;
    let mut g = mat_to_modulus(&pair.g, pn);
    let p0 = mat_constant_term(p_n);
    let z0 = mat_constant_term(&z);
    let q = TruncSeries::q(&field, prec, pn);
    let mut qpow = q.clone();
    let pe = PadicElem::from_int(&field, p as i64, prec);
    let mut pm = pe.clone();
    let mut corrections = 0;
    for j in kk..n_x {
        let r0 = mat_coeff(&e, j);
        if !r0.is_zero() {
            let s = neumann(&r0.neg(), &pm, &p0, &z0)?;
            let sx = mat_from_constants(&s, pn, j);
            g = g.add(&sx);
            let corr = p_n.mul(&sx).mul(&z).scale(&qpow);
            e = e.add(&sx).sub(&corr);
            corrections += 1;
        }
        qpow = qpow.mul(&q);
        pm = pm.mul(&pe)?;
    }
    let out = PhiGammaPair {
        p: p_n.clone(),
        g,
        k,
        meta: Provenance::Lifted,
    };
    let residual_zero = commutation_defect(&out, pn).is_zero();
    let agrees = vanishes_below(&out.g.sub(&mat_to_modulus(&pair.g, pn)), kk);
    let log = ExtensionLog {
        x_precision: n_x,
        corrections,
        residual_zero,
        agrees_mod_xk: agrees,
    };
    Ok((out, log))
}

/// Result of [`equivalence_base_change`].
#[derive(Clone, Debug)]
pub struct BaseChange {
    pub m: Mat<TruncSeries>,
    pub residual_zero: bool,
    pub identity_mod_xk: bool,
    /// X-adic order of (B_j - Id) after each step, for instrumentation.
    pub defect_orders: Vec<usize>,
}

/// Inverse of a matrix that is congruent to an invertible constant mod X.
pub fn mat_unit_inverse(m: &Mat<TruncSeries>) -> Result<Mat<TruncSeries>> {
    let dinv = m.det().unit_inverse()?;
    Ok(m.adj().scale(&dinv))
}

/// M = Id mod X^k with M^{-1} P' phi(M) = P, where P' = P mod phi(X)^k
/// (both given by polynomial representatives).
pub fn equivalence_base_change(
    p_mat: &Mat<TruncSeries>,
    p2: &Mat<TruncSeries>,
    k: u32,
    n_x: usize,
) -> Result<BaseChange> {
    let field = p_mat.get(0, 0).field().clone();
    let prec = mat_precision(p_mat).min(mat_precision(p2));
    let kk = k as usize;
    let p = field.p() as usize;
    let need = max_degree(p_mat).max(max_degree(p2)) + p * kk + 2;
    let lin = linearize(&p_mat.map(|x| x.with_precision(prec)), k, n_x, need)?;
    let big = &lin.big;
    let pn = &lin.pn;
    let phik = TruncSeries::phi_x(&field, prec, big).pow(k);
    let diff = mat_to_modulus(p2, big)
        .sub(&mat_to_modulus(p_mat, big))
        .map(|x| x.with_precision(prec));
    let s = diff
        .try_map(|x| x.poly_div_exact(&phik))
        .map_err(|_| Error::PreconditionDefect("P' differs from P outside phi(X)^k".into()))?;
    let p_n = lin.p_n.map(|x| x.with_precision(prec));
    let uinv = lin.u_poly.to_modulus(pn).unit_inverse()?;
    let y = p_n.adj().scale(&uinv);
    let q = TruncSeries::q(&field, prec, pn);
    let id = p_n.identity_like();
    let xk = TruncSeries::monomial(&field, kk, prec, pn);
    let mut b = id.add(&mat_to_modulus(&s, pn).mul(&y).scale(&q.mul(&xk)));
    let mut m = id.clone();
    let p0 = mat_constant_term(&p_n);
    let y0 = mat_constant_term(&y);
    let pe = PadicElem::from_int(&field, p as i64, prec);
    let mut pm = pe.clone();
    let mut qpow = q.clone();
    let mut orders = Vec::new();
    for j in kk..n_x {
        let r0 = mat_coeff(&b, j);
        if !r0.is_zero() {
            let t = neumann(&r0, &pm, &p0, &y0)?;
            let tx = mat_from_constants(&t, pn, j);
            let a = id.add(&tx);
            // (Id + X^j T)^{-1} as a finite geometric sum
            let mut ainv = id.clone();
            let mut term = id.clone();
            for _ in 0..(n_x / j + 1) {
                term = term.mul(&tx).neg();
                if term.is_zero() {
                    break;
                }
                ainv = ainv.add(&term);
            }
            let right = id.add(&p_n.mul(&tx).mul(&y).scale(&qpow));
            b = ainv.mul(&b).mul(&right);
            m = m.mul(&a);
        }
        orders.push(
            b.sub(&id)
                .entries()
                .iter()
                .filter_map(|x| x.x_valuation())
                .min()
                .unwrap_or(n_x),
        );
        qpow = qpow.mul(&q);
        pm = pm.mul(&pe)?;
    }
    let minv = mat_unit_inverse(&m)?;
    let p2n = mat_to_modulus(p2, pn);
    let residual = minv.mul(&p2n).mul(&mat_phi(&m)).sub(&p_n);
    let identity_mod_xk = vanishes_below(&m.sub(&id), kk);
    Ok(BaseChange {
        m,
        residual_zero: residual.is_zero(),
        identity_mod_xk,
        defect_orders: orders,
    })
}

/// Whether two pairs define the same representation in the sense of the
/// uniqueness statement: P' = P mod phi(X)^k, G' = G mod X^k, and after the
/// base change the induced H = G'' G^{-1} is the identity to X^{n_x}.
pub fn rep_equal(a: &PhiGammaPair, b: &PhiGammaPair, n_x: usize) -> bool {
    rep_equal_inner(a, b, n_x).unwrap_or(false)
}

fn rep_equal_inner(a: &PhiGammaPair, b: &PhiGammaPair, n_x: usize) -> Result<bool> {
    if a.k != b.k || a.dim() != b.dim() || a.field() != b.field() {
        return Ok(false);
    }
    let k = a.k as usize;
    let prec = a.precision().min(b.precision());
    let xk = Modulus::PowerOfX(k);
    let ga = mat_to_modulus(&a.g, &xk).map(|x| x.with_precision(prec));
    let gb = mat_to_modulus(&b.g, &xk).map(|x| x.with_precision(prec));
    if !ga.sub(&gb).is_zero() {
        return Ok(false);
    }
    let (ea, _) = extend_g(&a.with_precision(prec), n_x)?;
    let (eb, _) = extend_g(&b.with_precision(prec), n_x)?;
    let bc = equivalence_base_change(
        &a.p.map(|x| x.with_precision(prec)),
        &b.p.map(|x| x.with_precision(prec)),
        a.k,
        n_x,
    )?;
    if !bc.residual_zero || !bc.identity_mod_xk {
        return Ok(false);
    }
    let minv = mat_unit_inverse(&bc.m)?;
    let g2 = minv.mul(&eb.g).mul(&mat_gamma(&bc.m, 1));
    let h = g2.mul(&mat_unit_inverse(&ea.g)?);
    Ok(h.sub(&h.identity_like()).is_zero())
}

fn q_valuation(f: &TruncSeries, q: &TruncSeries, cap: u32) -> Option<u32> {
    let mut cur = f.clone();
    for m in 0..cap {
        if cur.is_zero() {
            return None;
        }
        let (quo, r) = cur.poly_divrem(q).ok()?;
        if !r.is_zero() {
            return Some(m);
        }
        cur = quo;
    }
    None
}

/// Q-adic valuations of the elementary divisors of P over E (x) O_E[[X]].
/// P must live in the quotient by phi(X)^k, which determines Q-valuations below k.
pub fn hodge_weights(p_mat: &Mat<TruncSeries>, k: u32) -> Result<Vec<u32>> {
    let field = p_mat.get(0, 0).field().clone();
    let prec = mat_precision(p_mat);
    let deg = max_degree(p_mat);
    let len = 2 * deg + 2 + (field.p() as usize) * (k as usize);
    let big = Modulus::PowerOfX(len);
    let pb = mat_to_modulus(p_mat, &big);
    let q = TruncSeries::q(&field, prec, &big);
    let det_v = q_valuation(&pb.det(), &q, k).ok_or_else(|| {
        Error::IndeterminateAtPrecision("det(P) is divisible by Q^k at working precision".into())
    })?;
    if pb.dim() == 1 {
        return Ok(vec![det_v]);
    }
    let d1 = pb
        .entries()
        .iter()
        .filter_map(|x| q_valuation(x, &q, k))
        .min()
        .ok_or_else(|| Error::IndeterminateAtPrecision("all entries divisible by Q^k".into()))?;
    if d1 > det_v {
        return Err(Error::IndeterminateAtPrecision(
            "entry valuation exceeds determinant valuation".into(),
        ));
    }
    let mut w = vec![d1, det_v - d1];
    w.sort_unstable();
    Ok(w)
}

/// Reduce mod pi; representatives of degree < pk (or < N) become residue series.
pub fn reduce_pair(pair: &PhiGammaPair) -> ResiduePair {
    ResiduePair {
        p: pair.p.map(|x| x.reduce_mod_pi()),
        g: pair.g.map(|x| x.reduce_mod_pi()),
        k: pair.k,
        meta: pair.meta,
    }
}

impl ResiduePair {
    pub fn field(&self) -> &Field {
        self.p.get(0, 0).field()
    }

    pub fn len(&self) -> usize {
        self.p.get(0, 0).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// View as a pair over O_E/pi with X-adic truncation.
    pub fn to_integral(&self) -> PhiGammaPair {
        let m = Modulus::PowerOfX(self.len());
        PhiGammaPair {
            p: self.p.map(|x| TruncSeries::from_residue(x, &m)),
            g: self.g.map(|x| TruncSeries::from_residue(x, &m)),
            k: self.k,
            meta: self.meta,
        }
    }

    pub fn resized(&self, n: usize) -> ResiduePair {
        ResiduePair {
            p: self.p.map(|x| x.resized(n)),
            g: self.g.map(|x| x.resized(n)),
            k: self.k,
            meta: self.meta,
        }
    }

    /// P phi(G) - G gamma(P) at the common truncation.
    pub fn commutation_defect(&self) -> Mat<ResidueSeries> {
        let phig = self.g.map(|x| x.phi());
        let gp = self.p.map(|x| x.gamma_act(1));
        self.p.mul(&phig).sub(&self.g.mul(&gp))
    }
}

/// Residue analog of [`extend_g`]: the representative mod X^{pk} is modified
/// above X^k so that the commutation holds exactly to X^{n_x}.
pub fn extend_g_residue(pair: &ResiduePair, n_x: usize) -> Result<ResiduePair> {
    let (ext, log) = extend_g(&pair.to_integral(), n_x)?;
    if !log.residual_zero {
        return Err(Error::PrecisionExhausted(
            "residue extension left a defect".into(),
        ));
    }
    Ok(reduce_pair(&ext))
}

/// Serialized form of a pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairDoc {
    pub schema: u32,
    pub field: FieldParams,
    pub k: u32,
    /// "phi^k" for the quotient by phi(X)^k, otherwise "X^N".
    pub modulus: String,
    pub precision: u32,
    pub meta: Provenance,
    pub dim: usize,
    pub p: Vec<Vec<String>>,
    pub g: Vec<Vec<String>>,
}

impl PairDoc {
    pub fn from_pair(pair: &PhiGammaPair) -> PairDoc {
        let modulus = match pair.modulus() {
            Modulus::PowerOfX(n) => format!("X^{n}"),
            Modulus::MonicPoly(m) => format!("phi^{}", m.k),
        };
        PairDoc {
            schema: 1,
            field: pair.field().params().clone(),
            k: pair.k,
            modulus,
            precision: pair.precision(),
            meta: pair.meta,
            dim: pair.dim(),
            p: pair.p.entries().iter().map(|x| x.to_strings()).collect(),
            g: pair.g.entries().iter().map(|x| x.to_strings()).collect(),
        }
    }

    pub fn to_pair(&self) -> Result<PhiGammaPair> {
        let field = Field::new(self.field.clone())?;
        let modulus = if let Some(n) = self.modulus.strip_prefix("X^") {
            Modulus::PowerOfX(n.parse().map_err(|_| Error::Parse("bad modulus".into()))?)
        } else if let Some(k) = self.modulus.strip_prefix("phi^") {
            Modulus::phi_x_pow(
                &field,
                k.parse().map_err(|_| Error::Parse("bad modulus".into()))?,
            )
        } else {
            return Err(Error::Parse(format!("unknown modulus '{}'", self.modulus)));
        };
        if self.dim == 0
            || self.p.len() != self.dim * self.dim
            || self.g.len() != self.dim * self.dim
        {
            return Err(Error::Parse("matrix shape does not match dim".into()));
        }
        let conv = |rows: &Vec<Vec<String>>| -> Result<Mat<TruncSeries>> {
            let mut e = Vec::new();
            for r in rows {
                let s = TruncSeries::from_strings(&field, r, &modulus)?;
                e.push(s.with_precision(self.precision));
            }
            Ok(Mat::from_rows(self.dim, e))
        };
        Ok(PhiGammaPair {
            p: conv(&self.p)?,
            g: conv(&self.g)?,
            k: self.k,
            meta: self.meta,
        })
    }
}
