use nnoracle::oracle::{categorical_case, judge_categorical};
use nnoracle::{ComparatorSpec, Reason, Verdict};

struct Case {
    th_low: f64,
    th_high: f64,
    agree: bool,
    c: f64,
    aggressiveness: u8,
    verdict: Verdict,
    reason: Reason,
}

fn golden() -> Vec<Case> {
    let mut rdr = csv::Reader::from_path(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/data/categorical_truth_table.csv"
    ))
    .unwrap();
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            Case {
                th_low: r[0].parse().unwrap(),
                th_high: r[1].parse().unwrap(),
                agree: &r[2] == "1",
                c: r[3].parse().unwrap(),
                aggressiveness: r[4].parse().unwrap(),
                verdict: match &r[5] {
                    "accept" => Verdict::Accept,
                    "reject" => Verdict::Reject,
                    v => panic!("bad verdict {v}"),
                },
                reason: match &r[6] {
                    "obvious_match" => Reason::ObviousMatch,
                    "obvious_mismatch" => Reason::ObviousMismatch,
                    "non_clear_cut" => Reason::NonClearCut,
                    v => panic!("bad reason {v}"),
                },
            }
        })
        .collect()
}

fn spec(case: &Case) -> ComparatorSpec {
    ComparatorSpec::categorical(case.aggressiveness, case.th_low, case.th_high).unwrap()
}

/// Builds observed/network vectors of dimension 4 realizing `agree` with
/// winner confidence `c`.
fn vectors(agree: bool, c: f64) -> (Vec<f64>, Vec<f64>) {
    let observed = vec![0.0, 0.0, 1.0, 0.0];
    let j = if agree { 2 } else { 1 };
    let mut net = vec![c * 0.5; 4];
    net[j] = c;
    (observed, net)
}

#[test]
fn golden_table_has_every_grid_case() {
    let table = golden();
    assert_eq!(table.len(), 120);
}

#[test]
fn case_table_matches_golden_file() {
    for case in golden() {
        let j = categorical_case(&spec(&case), case.agree, case.c);
        assert_eq!(
            (j.verdict, j.reason),
            (case.verdict, case.reason),
            "th={}/{} agree={} c={} A={}",
            case.th_low,
            case.th_high,
            case.agree,
            case.c,
            case.aggressiveness
        );
    }
}

#[test]
fn vector_comparator_matches_golden_file() {
    for case in golden() {
        let (obs, net) = vectors(case.agree, case.c);
        let j = judge_categorical(&spec(&case), &obs, &net).unwrap();
        assert_eq!((j.verdict, j.reason), (case.verdict, case.reason));
    }
}

#[test]
fn clear_cut_cases_ignore_aggressiveness() {
    let table = golden();
    for group in table.chunks(6) {
        if group[0].reason != Reason::NonClearCut {
            assert!(group.iter().all(|c| c.verdict == group[0].verdict && c.reason == group[0].reason));
        }
    }
}

#[test]
fn wider_thresholds_give_more_unclear_cases() {
    let table = golden();
    let unclear = |lo: f64| -> Vec<(bool, u64)> {
        table
            .iter()
            .filter(|c| c.th_low == lo && c.reason == Reason::NonClearCut)
            .map(|c| (c.agree, c.c.to_bits()))
            .collect()
    };
    let narrow = unclear(0.2);
    let wide = unclear(0.1);
    assert!(narrow.iter().all(|k| wide.contains(k)));
    assert!(wide.len() > narrow.len());
}

#[test]
fn least_and_most_aggressive_bound_every_level() {
    for case in golden().iter().filter(|c| c.reason == Reason::NonClearCut) {
        let at = |a: u8| categorical_case(&ComparatorSpec::categorical(a, case.th_low, case.th_high).unwrap(), case.agree, case.c);
        assert_eq!(at(0).verdict, Verdict::Accept);
        assert_eq!(at(5).verdict, Verdict::Reject);
    }
}
