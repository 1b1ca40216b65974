//! On-disk seed cache and the seed strategy (cache, lift, deform from a
//! cached neighbor).
//!
//! Layout: `<root>/p=<p>/k=<k>/<sha256 of the key>.json`, one document per
//! (field, k, a_p literal, n). Writes go to a temporary file in the same
//! directory and are renamed into place.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::{Field, FieldParams};
use crate::literal::{format_padic, parse_padic};
use crate::padic::PadicElem;
use crate::phigamma::{check_membership, MembershipReport, PairDoc};
use crate::seed::hensel_seed;
use crate::wach::{deform_ap, radius_a, ConstructionLog, WachSeed};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedKey {
    pub field: FieldParams,
    pub k: u32,
    pub a_p: String,
    pub n: u32,
}

impl SeedKey {
    pub fn new(field: &Field, k: u32, a_p: &PadicElem, n: u32) -> SeedKey {
        SeedKey {
            field: field.params().clone(),
            k,
            a_p: format_padic(a_p),
            n,
        }
    }

    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("key serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeedDoc {
    pub schema: u32,
    pub key: SeedKey,
    pub pair: PairDoc,
    pub report: MembershipReport,
    pub log: ConstructionLog,
}

impl SeedDoc {
    pub fn from_seed(seed: &WachSeed) -> SeedDoc {
        let field = seed.pair.field();
        SeedDoc {
            schema: 1,
            key: SeedKey::new(field, seed.k, &seed.a_p, seed.n),
            pair: PairDoc::from_pair(&seed.pair),
            report: seed.report.clone(),
            log: seed.log.clone(),
        }
    }

    /// Rebuild the seed and re-run the membership check.
    pub fn verify(&self) -> Result<WachSeed> {
        let pair = self.pair.to_pair()?;
        let field = pair.field().clone();
        if field.params() != &self.key.field {
            return Err(Error::FieldMismatch);
        }
        let a_p = parse_padic(&field, &self.key.a_p)?;
        let report = check_membership(&pair, self.key.k, &a_p, self.key.n);
        if !report.verdict {
            return Err(Error::PreconditionDefect(
                "cached pair fails the membership check".into(),
            ));
        }
        Ok(WachSeed {
            k: self.key.k,
            a_p,
            n: self.key.n,
            pair,
            report,
            log: self.log.clone(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CacheEntry {
    pub path: PathBuf,
    pub key: Option<SeedKey>,
    pub valid: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GcReport {
    pub kept: usize,
    pub removed: Vec<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct SeedCache {
    root: PathBuf,
}

impl SeedCache {
    pub fn new(root: impl Into<PathBuf>) -> SeedCache {
        SeedCache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dir(&self, p: u64, k: u32) -> PathBuf {
        self.root.join(format!("p={p}")).join(format!("k={k}"))
    }

    pub fn path(&self, key: &SeedKey) -> PathBuf {
        self.dir(key.field.p, key.k)
            .join(format!("{}.json", key.digest()))
    }

    /// A verified seed for the key, or None on a miss. Documents that fail
    /// verification count as misses.
    pub fn load(&self, key: &SeedKey) -> Result<Option<WachSeed>> {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let Ok(doc) = serde_json::from_str::<SeedDoc>(&text) else {
            return Ok(None);
        };
        if &doc.key != key {
            return Ok(None);
        }
        Ok(doc.verify().ok())
    }

    pub fn store(&self, seed: &WachSeed) -> Result<PathBuf> {
        let doc = SeedDoc::from_seed(seed);
        let path = self.path(&doc.key);
        let dir = path.parent().expect("cache path has a parent");
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".{}.{}.tmp", doc.key.digest(), std::process::id()));
        fs::write(&tmp, serde_json::to_string_pretty(&doc)?)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    fn files(&self) -> Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        if !self.root.exists() {
            return Ok(out);
        }
        for pdir in fs::read_dir(&self.root)? {
            let pdir = pdir?.path();
            if !pdir.is_dir() {
                continue;
            }
            for kdir in fs::read_dir(&pdir)? {
                let kdir = kdir?.path();
                if !kdir.is_dir() {
                    continue;
                }
                for f in fs::read_dir(&kdir)? {
                    out.push(f?.path());
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn inspect(path: &Path) -> CacheEntry {
        let doc = fs::read_to_string(path)
            .ok()
            .and_then(|t| serde_json::from_str::<SeedDoc>(&t).ok());
        match doc {
            Some(d) => {
                let named =
                    path.file_stem().and_then(|s| s.to_str()) == Some(d.key.digest().as_str());
                let valid = named && d.verify().is_ok();
                CacheEntry {
                    path: path.to_path_buf(),
                    key: Some(d.key),
                    valid,
                }
            }
            None => CacheEntry {
                path: path.to_path_buf(),
                key: None,
                valid: false,
            },
        }
    }

    pub fn list(&self) -> Result<Vec<CacheEntry>> {
        Ok(self.files()?.iter().map(|p| Self::inspect(p)).collect())
    }

    /// Remove temporary files and documents that no longer verify.
    pub fn gc(&self) -> Result<GcReport> {
        let mut rep = GcReport::default();
        for e in self.list()? {
            if e.valid {
                rep.kept += 1;
            } else {
                fs::remove_file(&e.path)?;
                rep.removed.push(e.path);
            }
        }
        Ok(rep)
    }

    /// Verified seeds stored for (field, k), largest n first.
    pub fn neighbors(&self, field: &Field, k: u32) -> Result<Vec<WachSeed>> {
        let dir = self.dir(field.p(), k);
        if !dir.exists() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut paths: Vec<PathBuf> = fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        paths.sort();
        for path in paths {
            let Some(doc) = fs::read_to_string(&path)
                .ok()
                .and_then(|t| serde_json::from_str::<SeedDoc>(&t).ok())
            else {
                continue;
            };
            if &doc.key.field != field.params() || doc.key.k != k {
                continue;
            }
            if let Ok(s) = doc.verify() {
                out.push(s);
            }
        }
        out.sort_by(|a, b| {
            b.n.cmp(&a.n)
                .then_with(|| format_padic(&a.a_p).cmp(&format_padic(&b.a_p)))
        });
        Ok(out)
    }
}

/// A certified member of W_{k,a_p}(n): cache hit, then the lift, then a
/// deformation of a cached neighbor within the radius. New seeds are stored.
pub fn seed_module(
    field: &Field,
    k: u32,
    a_p: &PadicElem,
    n: u32,
    cache: Option<&SeedCache>,
    exec: Exec,
) -> Result<WachSeed> {
    let key = SeedKey::new(field, k, a_p, n);
    if let Some(c) = cache {
        if let Some(s) = c.load(&key)? {
            return Ok(s);
        }
    }
    let seed = match hensel_seed(field, k, a_p, n, exec) {
        Ok((pair, report, log)) => {
            let looks: Vec<&str> = log.steps.iter().map(|s| s.lookahead.as_str()).collect();
            let detail = format!(
                "{} unknowns, {} equations, rank {}; lookahead per level: {}",
                log.unknowns,
                log.equations,
                log.rank,
                looks.join(",")
            );
            WachSeed {
                k,
                a_p: a_p.clone(),
                n,
                pair,
                report,
                log: ConstructionLog {
                    strategy: "lift".into(),
                    detail,
                    precision_spent: 0,
                },
            }
        }
        Err(Error::SeedNotFound(msg)) => match cache
            .map(|c| seed_from_neighbor(c, field, k, a_p, n))
            .transpose()?
            .flatten()
        {
            Some(s) => s,
            None => {
                return Err(Error::SeedNotFound(format!(
                    "{msg}; no cached neighbor within the radius"
                )))
            }
        },
        Err(e) => return Err(e),
    };
    if let Some(c) = cache {
        c.store(&seed)?;
    }
    Ok(seed)
}

/// Deform the first cached seed for (field, k) with a_p strictly inside its
/// radius and enough precision.
pub fn seed_from_neighbor(
    cache: &SeedCache,
    field: &Field,
    k: u32,
    a_p: &PadicElem,
    n: u32,
) -> Result<Option<WachSeed>> {
    for s in cache.neighbors(field, k)? {
        if s.n < n {
            continue;
        }
        let Ok(r) = radius_a(field, k, &s.a_p) else {
            continue;
        };
        if !r.strictly_inside(&s.a_p, a_p) {
            continue;
        }
        let Ok(d) = deform_ap(&s, a_p) else { continue };
        if d.n < n {
            continue;
        }
        let pair = d.pair.with_precision(n);
        let report = check_membership(&pair, k, a_p, n);
        if report.verdict {
            return Ok(Some(WachSeed {
                n,
                pair,
                report,
                ..d
            }));
        }
    }
    Ok(None)
}
