//! The retry loop: seed, reduce mod pi, extend G in X, identify, and raise n
//! until the label is stable over a window of consecutive n.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cache::{seed_module, SeedCache};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{Field, FieldParams};
use crate::literal::format_padic;
use crate::modp::{
    build_catalog, dual_note, identification_precision, identify, AnnotatedLabel, Catalog,
    Identification, SemisimpleLabel,
};
use crate::padic::PadicElem;
use crate::phigamma::{extend_g_residue, reduce_pair, MembershipReport, PairDoc};
use crate::wach::{ConstructionLog, WachSeed};

#[derive(Clone, Debug)]
pub struct ReduceOptions {
    pub n_start: u32,
    pub n_max: u32,
    /// X-precision for identification; derived from k when None.
    pub x_precision: Option<usize>,
    /// Number of consecutive n that must agree.
    pub window: usize,
    pub exec: Exec,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            n_start: 3,
            n_max: 8,
            x_precision: None,
            window: 2,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub n: u32,
    pub label: Option<SemisimpleLabel>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedCertificate {
    pub pair: PairDoc,
    pub report: MembershipReport,
    pub log: ConstructionLog,
}

impl SeedCertificate {
    pub fn from_seed(seed: &WachSeed) -> SeedCertificate {
        SeedCertificate {
            pair: PairDoc::from_pair(&seed.pair),
            report: seed.report.clone(),
            log: seed.log.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionLedger {
    pub n_start: u32,
    pub n_used: u32,
    pub window: usize,
    pub x_precision: usize,
    pub seed_precision_spent: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub schema: u32,
    pub object: String,
    pub field: FieldParams,
    pub k: u32,
    pub a_p: String,
    pub result: AnnotatedLabel,
    pub n_used: u32,
    pub attempts: Vec<Attempt>,
    pub seed: SeedCertificate,
    pub identification: Identification,
    pub precision: PrecisionLedger,
    /// Wall-clock milliseconds; the only nondeterministic field.
    pub timing_ms: Option<u64>,
}

impl ReductionResult {
    pub fn label(&self) -> &SemisimpleLabel {
        &self.result.label
    }
}

/// X-precision used to identify the residue of a seed for weight k.
pub fn default_x_precision(field: &Field, k: u32) -> usize {
    identification_precision(field, (field.p() as usize - 1) * (k as usize - 1))
}

/// Identify the residue pair of a certified seed.
pub fn identify_seed(seed: &WachSeed, catalog: &Catalog, exec: Exec) -> Result<Identification> {
    let res = reduce_pair(&seed.pair);
    let ext = extend_g_residue(&res, catalog.x_precision.max(res.len()))?;
    identify(&ext, catalog, exec)
}

pub fn reduce(
    field: &Field,
    k: u32,
    a_p: &PadicElem,
    opts: &ReduceOptions,
    cache: Option<&SeedCache>,
) -> Result<ReductionResult> {
    let catalog = build_catalog(
        field,
        k,
        opts.x_precision
            .unwrap_or_else(|| default_x_precision(field, k)),
        opts.exec,
    )?;
    reduce_with(field, k, a_p, opts, cache, &catalog)
}

/// As [`reduce`], with a prebuilt catalog.
pub fn reduce_with(
    field: &Field,
    k: u32,
    a_p: &PadicElem,
    opts: &ReduceOptions,
    cache: Option<&SeedCache>,
    catalog: &Catalog,
) -> Result<ReductionResult> {
    let t0 = Instant::now();
    if k < 2 || opts.n_start < 1 || opts.n_max < opts.n_start || opts.window == 0 {
        return Err(Error::Domain(
            "need k >= 2, 1 <= n_start <= n_max and a positive window".into(),
        ));
    }
    if a_p.is_unit() || a_p.is_zero() {
        return Err(Error::Domain(
            "a_p must be a nonzero element of the maximal ideal".into(),
        ));
    }
    // the trace condition cannot be checked beyond the precision of a_p
    let n_max = opts.n_max.min(a_p.precision());
    if n_max < opts.n_start {
        return Err(Error::Domain(format!(
            "a_p is only known mod pi^{}, below n_start = {}",
            a_p.precision(),
            opts.n_start
        )));
    }
    let mut attempts: Vec<Attempt> = Vec::new();
    let mut streak = 0;
    for n in opts.n_start..=n_max {
        let seed = seed_module(field, k, a_p, n, cache, opts.exec)?;
        match identify_seed(&seed, catalog, opts.exec) {
            Ok(id) => {
                let same = attempts
                    .last()
                    .is_some_and(|a| a.label.as_ref() == Some(&id.label));
                streak = if same { streak + 1 } else { 1 };
                attempts.push(Attempt {
                    n,
                    label: Some(id.label.clone()),
                    error: None,
                });
                if streak >= opts.window {
                    return Ok(ReductionResult {
                        schema: 1,
                        object: "Vbar_star".into(),
                        field: field.params().clone(),
                        k,
                        a_p: format_padic(a_p),
                        result: dual_note(field, &id.label),
                        n_used: n,
                        attempts,
                        seed: SeedCertificate::from_seed(&seed),
                        precision: PrecisionLedger {
                            n_start: opts.n_start,
                            n_used: n,
                            window: opts.window,
                            x_precision: id.x_precision,
                            seed_precision_spent: seed.log.precision_spent,
                        },
                        identification: id,
                        timing_ms: Some(t0.elapsed().as_millis() as u64),
                    });
                }
            }
            Err(
                e @ (Error::NoMatch(_)
                | Error::IndeterminateAtPrecision(_)
                | Error::PrecisionExhausted(_)),
            ) => {
                streak = 0;
                attempts.push(Attempt {
                    n,
                    label: None,
                    error: Some(e.to_string()),
                });
            }
            Err(e) => return Err(e),
        }
    }
    let log: Vec<String> = attempts
        .iter()
        .map(|a| match (&a.label, &a.error) {
            (Some(l), _) => format!("n={}: {}", a.n, l.describe(field)),
            (_, Some(e)) => format!("n={}: {e}", a.n),
            _ => format!("n={}", a.n),
        })
        .collect();
    Err(Error::PrecisionExhausted(format!(
        "no label stable over {} consecutive n in {}..={} [{}]",
        opts.window,
        opts.n_start,
        n_max,
        log.join("; ")
    )))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub membership: MembershipReport,
    /// Label recomputed from the embedded pair, when the input carried one.
    pub recomputed: Option<SemisimpleLabel>,
    pub label_matches: Option<bool>,
    pub verdict: bool,
}

/// Re-check an emitted result from its embedded pair alone: membership in
/// W_{k,a_p}(n_used), then identification at the recorded X-precision.
pub fn verify_result(r: &ReductionResult, exec: Exec) -> Result<VerifyReport> {
    let pair = r.seed.pair.to_pair()?;
    let field = pair.field().clone();
    let a_p = crate::literal::parse_padic(&field, &r.a_p)?;
    let membership = crate::phigamma::check_membership(&pair, r.k, &a_p, r.n_used);
    let seed = WachSeed {
        k: r.k,
        a_p,
        n: r.n_used,
        pair,
        report: membership.clone(),
        log: r.seed.log.clone(),
    };
    let catalog = build_catalog(&field, r.k, r.identification.x_precision, exec)?;
    let recomputed = identify_seed(&seed, &catalog, exec)?.label;
    let matches = recomputed == r.result.label;
    Ok(VerifyReport {
        verdict: membership.verdict && matches,
        membership,
        recomputed: Some(recomputed),
        label_matches: Some(matches),
    })
}
