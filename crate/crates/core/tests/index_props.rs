use devassist_core::embed::{EmbeddingVector, EMBEDDING_DIM};
use devassist_core::index::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn meta(i: usize) -> RecordMetadata {
    RecordMetadata {
        path: format!("src/f{i}.java"),
        span: (1, 10),
        source_kind: "code".into(),
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..EMBEDDING_DIM).map(|_| rng.sample(StandardNormal)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Builds an index; roughly one record in ten duplicates an earlier vector
/// so ties occur.
fn build(seed: u64, n: usize) -> VectorIndex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut index = VectorIndex::new("cafebabecafebabe");
    let mut stored: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let v = if i > 0 && rng.random_range(0..10) == 0 {
            stored[rng.random_range(0..i)].clone()
        } else {
            random_unit(&mut rng)
        };
        let id = format!("rec-{:05}", (i * 7919) % 100_003);
        index
            .insert(&id, &EmbeddingVector::from_raw(v.clone()).unwrap(), meta(i))
            .unwrap();
        stored.push(v);
    }
    index
}

/// Exhaustive scan in plain double precision.
fn oracle(index: &VectorIndex, q: &[f64], k: usize) -> Vec<String> {
    let qn = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut all: Vec<(f64, String)> = index
        .records()
        .iter()
        .map(|r| {
            let mut dot = 0.0;
            let mut rn = 0.0;
            for (a, b) in q.iter().zip(&r.vector) {
                dot += a * f64::from(*b);
                rn += f64::from(*b) * f64::from(*b);
            }
            let c = if qn == 0.0 || rn == 0.0 { 0.0 } else { dot / (qn * rn.sqrt()) };
            (c, r.id.clone())
        })
        .collect();
    all.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|x| x.1).collect()
}

#[test]
fn thousand_vectors_top10_matches_scan() {
    let index = build(7, 1000);
    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    for _ in 0..100 {
        let q = random_unit(&mut rng);
        let got = index.search_slice(&q, 10);
        assert_eq!(got.ids(), oracle(&index, &q, 10));
        assert!(got.hits.windows(2).all(|w| w[0].similarity >= w[1].similarity));
    }
}

#[test]
fn stored_vector_ranks_first() {
    let index = build(3, 200);
    let r = &index.records()[17];
    let q: Vec<f64> = r.vector.iter().map(|x| f64::from(*x)).collect();
    let hits = index.search_slice(&q, 1).hits;
    assert!((hits[0].similarity - 1.0).abs() < 1e-9);
    assert!((index.search_slice(&q, 3).hits.iter()).any(|h| h.id == r.id));
}

#[test]
fn five_hundred_record_round_trip_is_bit_identical() {
    let index = build(11, 500);
    assert_eq!(index.len(), 500);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("index.bin");
    index.save(&path).unwrap();
    let back = VectorIndex::load(&path).unwrap();
    assert_eq!(back.len(), 500);
    for (a, b) in index.records().iter().zip(back.records()) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.metadata, b.metadata);
        let bits = |v: &[f32]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.vector), bits(&b.vector));
    }
    let mut again = Vec::new();
    back.write_to(&mut again).unwrap();
    assert_eq!(again, std::fs::read(&path).unwrap());
}

#[test]
fn empty_round_trip_and_errors() {
    let index = VectorIndex::new("0011223344556677");
    let mut bytes = Vec::new();
    index.write_to(&mut bytes).unwrap();
    assert!(VectorIndex::from_bytes(&bytes).unwrap().is_empty());
    assert!(index.search_slice(&[0.0; 768], 5).hits.is_empty());

    let full = build(5, 3);
    let mut bytes = Vec::new();
    full.write_to(&mut bytes).unwrap();
    assert!(matches!(
        VectorIndex::from_bytes(&bytes[..bytes.len() - 5]),
        Err(IndexError::Truncated(_))
    ));
    let text = String::from_utf8_lossy(&bytes[..60]).replace("\"version\":1", "\"version\":9");
    let mut bumped = text.into_bytes();
    bumped.extend_from_slice(&bytes[60..]);
    assert!(matches!(
        VectorIndex::from_bytes(&bumped),
        Err(IndexError::VersionMismatch { .. }) | Err(IndexError::Corrupt(_))
    ));
    let mut garbage = bytes.clone();
    garbage[0] = b'#';
    assert!(matches!(VectorIndex::from_bytes(&garbage), Err(IndexError::Corrupt(_))));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i.bin");
    full.save(&path).unwrap();
    assert!(matches!(
        VectorIndex::load_expecting(&path, "ffffffffffffffff"),
        Err(IndexError::HashMismatch { .. })
    ));
}

#[test]
fn insert_contract() {
    let mut index = VectorIndex::new("h");
    let v = EmbeddingVector::zeros();
    index.insert("a", &v, meta(0)).unwrap();
    assert_eq!(index.len(), 1);
    assert!(matches!(index.insert("a", &v, meta(1)), Err(IndexError::DuplicateId(_))));
    assert_eq!(index.len(), 1);
    assert!(matches!(
        index.insert_raw("b", vec![0.0; 10], meta(2)),
        Err(IndexError::Dimension { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn search_equals_scan(seed in any::<u64>(), n in 0usize..2000, k in 0usize..40) {
        let index = build(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let q = random_unit(&mut rng);
        let got = index.search_slice(&q, k);
        prop_assert_eq!(got.ids(), oracle(&index, &q, k));
    }

    #[test]
    fn hits_are_prefixes(seed in any::<u64>(), n in 1usize..300) {
        let index = build(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(!seed);
        let q = random_unit(&mut rng);
        let mut prev = index.search_slice(&q, 0).ids().into_iter().map(String::from).collect::<Vec<_>>();
        for k in 1..=n.min(25) {
            let cur: Vec<String> = index.search_slice(&q, k).ids().into_iter().map(String::from).collect();
            prop_assert_eq!(&cur[..prev.len()], &prev[..]);
            prev = cur;
        }
    }

    #[test]
    fn round_trip_any(seed in any::<u64>(), n in 0usize..60) {
        let index = build(seed, n);
        let mut bytes = Vec::new();
        index.write_to(&mut bytes).unwrap();
        let back = VectorIndex::from_bytes(&bytes).unwrap();
        prop_assert_eq!(back.records(), index.records());
        prop_assert_eq!(back.band_config_hash(), index.band_config_hash());
    }
}
