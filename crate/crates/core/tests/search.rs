use std::collections::BTreeMap;

use prismatic::search::{
    brute_force_vectors, face_vector_candidates, search_patchworks, SearchSpec, SearchStatus, Shape,
};

fn all_vectors_spec(n: usize, g: usize) -> SearchSpec {
    let mut spec = SearchSpec::new(n, g, vec![]);
    spec.vectors = Some(face_vector_candidates(n, g, &[]));
    spec
}

fn searched_counts(n: usize) -> BTreeMap<String, u64> {
    let mut total = BTreeMap::new();
    let e = n * (n - 1) / 2;
    for g in 0..=e {
        if face_vector_candidates(n, g, &[]).is_empty() {
            continue;
        }
        let out = search_patchworks(&all_vectors_spec(n, g)).unwrap();
        assert_eq!(out.status, SearchStatus::Complete);
        for (k, c) in out.leaves {
            if c > 0 {
                total.insert(k, c);
            }
        }
    }
    total
}

#[test]
fn oracle_equivalence_small_n() {
    for n in 3..=5 {
        let brute: BTreeMap<String, u64> =
            brute_force_vectors(n).unwrap().into_iter().map(|(v, c)| (v.to_string(), c)).collect();
        assert_eq!(searched_counts(n), brute, "n = {n}");
    }
    let k4: u64 = brute_force_vectors(4).unwrap().values().sum();
    let k5: u64 = brute_force_vectors(5).unwrap().values().sum();
    assert_eq!((k4, k5), (8, 1296));
}

#[test]
fn pruning_is_sound_under_audit() {
    for (n, g) in [(4, 0), (5, 1), (5, 2), (6, 1), (6, 2)] {
        let mut spec = all_vectors_spec(n, g);
        spec.audit = true;
        let out = search_patchworks(&spec).unwrap();
        assert_eq!(out.audit_violations, 0, "K{n} genus {g}");
        if n == 6 {
            assert!(out.audit_nodes > 0);
        }
        let plain = search_patchworks(&all_vectors_spec(n, g)).unwrap();
        assert_eq!(plain.leaves, out.leaves);
        assert_eq!(plain.nodes, out.nodes);
    }
}

#[test]
fn k4_two_face_covers_revalidate() {
    let out = search_patchworks(&SearchSpec::new(4, 0, vec![Shape::Cover(2)])).unwrap();
    assert_eq!(out.status, SearchStatus::Complete);
    assert!(!out.findings.is_empty());
    // fixing the first rotation leaves one planar K4, and any two of its
    // four triangles cover the vertices
    assert_eq!(out.findings_count, 6);
    for f in &out.findings {
        f.validate(0).unwrap();
    }
}

#[test]
fn k7_torus_has_no_quadrilateral_patchwork() {
    let spec = SearchSpec::new(7, 1, vec![Shape::Patchwork(vec![3, 4]), Shape::Patchwork(vec![4])]);
    assert!(spec.admissible().is_empty());
    let out = search_patchworks(&spec).unwrap();
    assert_eq!(out.status, SearchStatus::Complete);
    assert_eq!(out.findings_count, 0);
}

#[test]
fn k7_torus_count() {
    let out = search_patchworks(&all_vectors_spec(7, 1)).unwrap();
    assert_eq!(out.status, SearchStatus::Complete);
    assert!(out.leaves["3^14"] > 0);
}

#[test]
fn thread_count_does_not_change_results() {
    let mut a = SearchSpec::new(6, 1, vec![Shape::Cover(2)]);
    a.threads = Some(1);
    let mut b = a.clone();
    b.threads = Some(4);
    let (ra, rb) = (search_patchworks(&a).unwrap(), search_patchworks(&b).unwrap());
    assert_eq!(ra, rb);
}

#[test]
fn checkpoint_resume_matches_uninterrupted_run() {
    let dir = std::env::temp_dir().join(format!("prismatic-cp-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("k6.json");
    let _ = std::fs::remove_file(&path);

    let full = search_patchworks(&SearchSpec::new(6, 1, vec![Shape::Cover(2)])).unwrap();

    let mut spec = SearchSpec::new(6, 1, vec![Shape::Cover(2)]);
    spec.checkpoint = Some(path.clone());
    spec.max_tasks = Some(7);
    let first = search_patchworks(&spec).unwrap();
    assert_eq!(first.status, SearchStatus::Interrupted);
    assert_eq!(first.tasks_done, 7);
    spec.max_tasks = None;
    let resumed = search_patchworks(&spec).unwrap();
    assert_eq!(resumed, full);

    let mut other = SearchSpec::new(6, 2, vec![]);
    other.checkpoint = Some(path.clone());
    assert!(search_patchworks(&other).is_err());
    std::fs::write(&path, "not json").unwrap();
    assert!(search_patchworks(&spec).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn budget_is_reported() {
    let mut spec = all_vectors_spec(7, 1);
    spec.budget = Some(1000);
    let out = search_patchworks(&spec).unwrap();
    assert_eq!(out.status, SearchStatus::BudgetExhausted);
    assert!(out.nodes <= 1000);
}

/// The full K9 genus-3 run: about two minutes in release mode. Run with
/// `cargo test --release -- --ignored k9_complete`.
#[test]
#[ignore]
fn k9_complete_has_no_patchwork() {
    let shapes = [vec![9], vec![3, 6], vec![4, 5], vec![3, 3, 3]].map(Shape::Patchwork).to_vec();
    let dir = std::env::temp_dir().join(format!("prismatic-k9-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut spec = SearchSpec::new(9, 3, shapes);
    spec.checkpoint = Some(dir.join("k9.json"));
    let out = search_patchworks(&spec).unwrap();
    assert_eq!(out.status, SearchStatus::Complete);
    assert_eq!(out.findings_count, 0);
    std::fs::remove_dir_all(&dir).unwrap();
}
