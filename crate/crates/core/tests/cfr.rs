use proptest::prelude::*;
use scs_core::cfr::{cfr_from_prime, inverse_rows, search_cfr, verify_cfr, Cfr, SearchOutcome};

/// Direct reading of the axioms: rows are permutations and no ordered pair
/// (π(x), π(x+m)) repeats for any step m ≠ 0 across rows and positions.
fn brute_force(rows: &[Vec<usize>]) -> bool {
    let n = rows[0].len();
    let perm = rows.iter().all(|r| {
        let mut seen = vec![false; n];
        r.iter()
            .all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
    });
    if !perm {
        return false;
    }
    for m in 1..n {
        let mut pairs = Vec::new();
        for r in rows {
            for x in 0..n {
                pairs.push((r[x], r[(x + m) % n]));
            }
        }
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
    }
    true
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn verifier_agrees_with_the_axioms(rows in prop::collection::vec(permutation(7), 1..4)) {
        prop_assert_eq!(verify_cfr(&rows).unwrap().is_ok(), brute_force(&rows));
    }

    #[test]
    fn relabelled_prime_tables_stay_valid(p in prop::sample::select(vec![3usize, 5, 7, 11]), shift in 0usize..11) {
        // cyclically shifting every row keeps the pair structure intact
        let cfr = cfr_from_prime(p).unwrap();
        let rows: Vec<Vec<usize>> = cfr
            .rows()
            .iter()
            .map(|r| (0..p).map(|x| r[(x + shift) % p]).collect())
            .collect();
        prop_assert!(verify_cfr(&rows).unwrap().is_ok());
        let back = Cfr::new(rows).unwrap();
        let inv = inverse_rows(&back);
        for i in 0..back.num_rows() {
            for j in 0..back.num_rows() {
                if i != j {
                    prop_assert!(inv.difference_is_permutation(i, j));
                }
            }
        }
    }
}

#[test]
fn search_results_verify() {
    for (n, r) in [(5, 4), (7, 3), (9, 2), (15, 3)] {
        let report = search_cfr(n, r, 5_000_000).unwrap();
        match report.outcome {
            SearchOutcome::Found(cfr) => {
                assert_eq!((cfr.order(), cfr.num_rows()), (n, r));
                assert!(brute_force(cfr.rows()));
            }
            other => panic!("{r}×{n}: {other:?}"),
        }
    }
}

#[test]
fn fixtures_round_trip_through_text() {
    for name in ["flo3.txt", "flo5.txt", "flo15.txt"] {
        let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        let cfr = Cfr::from_text(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(Cfr::from_text(&cfr.to_text()).unwrap(), cfr);
    }
    assert_eq!(
        Cfr::from_text(
            &std::fs::read_to_string(format!("{}/fixtures/flo5.txt", env!("CARGO_MANIFEST_DIR")))
                .unwrap()
        )
        .unwrap(),
        cfr_from_prime(5).unwrap()
    );
}
