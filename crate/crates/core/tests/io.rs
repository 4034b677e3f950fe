use hyperdev_core::io::{load, save};
use hyperdev_core::{gen_ap, Error, WeightedHypergraph};

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let weighted = WeightedHypergraph::from_edges(7, 3, [(vec![1u32, 2, 3], 0.1), (vec![2, 5, 7], 2.5e-17)]).unwrap();
    for h in [gen_ap(40, 3).unwrap(), weighted] {
        for name in ["h.json", "h.txt"] {
            let path = dir.path().join(name);
            save(&h, &path).unwrap();
            let back = load(&path).unwrap();
            assert_eq!(back.duplicates_merged, 0);
            assert_eq!((back.hypergraph.n(), back.hypergraph.k()), (h.n(), h.k()));
            assert!(back.hypergraph.edges().eq(h.edges()), "{name}");
        }
    }
}

#[test]
fn malformed_files_report_positions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"n\": 5, \"k\": 3, \"edges\": [\n  {\"v\": [1, 2, 3], \"w\": 1},\n  {\"v\": [1, 2, 9], \"w\": 1}\n]}\n").unwrap();
    match load(&path) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "# n=5 k=3\n1 2 3\n1 2\n").unwrap();
    assert!(matches!(load(&path), Err(Error::Parse { line: 3, .. })));
}
