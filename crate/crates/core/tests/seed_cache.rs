use wachred::cache::*;
use wachred::phigamma::{reduce_pair, PairDoc};
use wachred::{Exec, Field, PadicElem};

fn setup() -> (tempfile::TempDir, SeedCache, Field) {
    let dir = tempfile::tempdir().unwrap();
    let cache = SeedCache::new(dir.path().join("cache"));
    (dir, cache, Field::qp(3).unwrap())
}

#[test]
fn key_layout() {
    let (_d, cache, f) = setup();
    let a = PadicElem::parse(&f, "3 + O(3^8)").unwrap();
    let key = SeedKey::new(&f, 4, &a, 5);
    assert_eq!(key.a_p, "3^1 + O(3^8)");
    assert_eq!(key.digest().len(), 64);
    assert_eq!(key.digest(), SeedKey::new(&f, 4, &a, 5).digest());
    assert_ne!(key.digest(), SeedKey::new(&f, 4, &a, 6).digest());
    let path = cache.path(&key);
    assert!(path.ends_with(format!("p=3/k=4/{}.json", key.digest())));
}

#[test]
fn store_load_round_trip() {
    let (_d, cache, f) = setup();
    let a = PadicElem::from_int(&f, 27, 10);
    let cold = seed_module(&f, 5, &a, 4, Some(&cache), Exec::default()).unwrap();
    assert_eq!(cold.log.strategy, "lift");
    let hit = cache
        .load(&SeedKey::new(&f, 5, &a, 4))
        .unwrap()
        .expect("stored");
    assert!(hit.report.verdict);
    assert_eq!(hit.log, cold.log);
    assert_eq!(
        PairDoc::from_pair(&hit.pair),
        PairDoc::from_pair(&cold.pair)
    );
    let warm = seed_module(&f, 5, &a, 4, Some(&cache), Exec::default()).unwrap();
    assert_eq!(
        PairDoc::from_pair(&warm.pair),
        PairDoc::from_pair(&cold.pair)
    );
    assert!(cache.load(&SeedKey::new(&f, 5, &a, 3)).unwrap().is_none());
}

#[test]
fn corrupted_documents_are_misses_and_collected() {
    let (_d, cache, f) = setup();
    let a = PadicElem::from_int(&f, 3, 10);
    seed_module(&f, 3, &a, 4, Some(&cache), Exec::default()).unwrap();
    let key = SeedKey::new(&f, 3, &a, 4);
    let path = cache.path(&key);
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    doc["pair"]["g"][1][0] = serde_json::Value::String("1 + X".into());
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    assert!(cache.load(&key).unwrap().is_none());
    let listed = cache.list().unwrap();
    assert_eq!(listed.len(), 1);
    assert!(!listed[0].valid);
    let gc = cache.gc().unwrap();
    assert_eq!((gc.kept, gc.removed.len()), (0, 1));
    assert!(cache.list().unwrap().is_empty());
}

#[test]
fn neighbor_deformation() {
    let (_d, cache, f) = setup();
    let a = PadicElem::from_int(&f, 3, 20);
    let base = seed_module(&f, 4, &a, 10, Some(&cache), Exec::default()).unwrap();
    let a2 = PadicElem::from_int(&f, 3 + 81, 20);
    let moved = seed_from_neighbor(&cache, &f, 4, &a2, 5)
        .unwrap()
        .expect("inside the radius");
    assert_eq!(moved.log.strategy, "deform");
    assert!(moved.report.verdict);
    assert_eq!(moved.n, 5);
    let (r1, r2) = (reduce_pair(&base.pair), reduce_pair(&moved.pair));
    assert!(r1.p == r2.p && r1.g == r2.g);
    // outside the radius nothing qualifies
    let far = PadicElem::from_int(&f, 3 + 27, 20);
    assert!(seed_from_neighbor(&cache, &f, 4, &far, 5)
        .unwrap()
        .is_none());
}
