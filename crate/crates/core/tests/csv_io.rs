use std::io::Write;

use proptest::prelude::*;
use selbounds::data::{
    cell_counts, load_panel_csv, read_multi_csv, read_panel_csv, read_panel_rows, read_rcs_csv,
    write_multi_csv, write_panel_csv, write_rcs_csv,
};
use selbounds::{Error, WarningCode};

mod common;

const FOUR: &str = "id,d,s0,s1,y0,y1\n1,1,1,1,2.5,3.1\n2,1,1,0,1.5,\n3,0,1,1,0.5,1\n4,0,0,1,,2\n";

#[test]
fn loads_four_rows() {
    let loaded = read_panel_csv(FOUR.as_bytes()).unwrap();
    assert_eq!(loaded.data.len(), 4);
    assert!(loaded.warnings.is_empty());
    assert_eq!(loaded.data.units()[3].y0, None);
    assert_eq!(loaded.data.units()[0].y1, Some(3.1));
}

#[test]
fn loads_from_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(FOUR.as_bytes()).unwrap();
    assert_eq!(load_panel_csv(f.path()).unwrap().data.len(), 4);
    assert!(matches!(
        load_panel_csv(f.path().with_extension("missing")),
        Err(Error::Io(_))
    ));
}

#[test]
fn unselected_outcome_dropped_with_warning() {
    let src = "id,d,s0,s1,y0,y1\n7,1,1,0,2.5,3.1\n";
    let loaded = read_panel_csv(src.as_bytes()).unwrap();
    assert_eq!(loaded.data.units()[0].y1, None);
    assert_eq!(loaded.warnings.len(), 1);
    assert_eq!(loaded.warnings[0].code, WarningCode::DroppedOutcome);
}

#[test]
fn selected_blank_outcome_is_error() {
    let src = "id,d,s0,s1,y0,y1\n8,1,1,1,2.5,\n";
    match read_panel_csv(src.as_bytes()) {
        Err(Error::MissingOutcome { line, period }) => assert_eq!((line, period), (2, 1)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn header_and_row_errors() {
    assert!(matches!(
        read_panel_csv("".as_bytes()),
        Err(Error::EmptyFile)
    ));
    assert!(matches!(
        read_panel_csv("id,d,s0,s1,y0,y1\n".as_bytes()),
        Err(Error::EmptyFile)
    ));
    assert!(matches!(
        read_panel_csv("id,d,s0,s1,y1,y0\n1,1,1,1,1,1\n".as_bytes()),
        Err(Error::BadHeader { .. })
    ));
    match read_panel_csv("id,d,s0,s1,y0,y1\n1,1,1,1,1,1\n2,2,1,1,1,1\n".as_bytes()) {
        Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        read_panel_csv("id,d,s0,s1,y0,y1\n1,1,1,1,nan,1\n".as_bytes()),
        Err(Error::MalformedRow { .. })
    ));
    assert!(matches!(
        read_panel_csv("id,d,s0,s1,y0,y1\n1,1,1,1,1\n".as_bytes()),
        Err(Error::MalformedRow { .. })
    ));
}

#[test]
fn scientific_notation_read_plain_written() {
    let src = "id,d,s0,s1,y0,y1\na,1,1,1,1e3,-2.5E-2\n";
    let data = read_panel_csv(src.as_bytes()).unwrap().data;
    let mut out = Vec::new();
    write_panel_csv(&data, &mut out).unwrap();
    assert_eq!(
        String::from_utf8(out).unwrap(),
        "id,d,s0,s1,y0,y1\na,1,1,1,1000,-0.025\n"
    );
}

#[test]
fn canonical_panel_round_trip_is_byte_identical() {
    let mut out = Vec::new();
    write_panel_csv(&read_panel_csv(FOUR.as_bytes()).unwrap().data, &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), FOUR);
}

#[test]
fn rcs_round_trip_and_degenerate_sampling() {
    let src = "id,t,d,s,y\n1,0,0,1,1\n2,0,1,1,2\n3,1,0,0,\n4,1,1,1,4.25\n";
    let data = read_rcs_csv(src.as_bytes()).unwrap().data;
    assert_eq!(data.lambda(), 0.5);
    let mut out = Vec::new();
    write_rcs_csv(&data, &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), src);

    let only_post = "id,t,d,s,y\n1,1,0,1,1\n2,1,1,1,2\n";
    assert!(matches!(
        read_rcs_csv(only_post.as_bytes()),
        Err(Error::DegenerateSampling(_))
    ));
}

#[test]
fn multi_period_files() {
    let src = "id,gvar,t,s,y\n1,0,0,1,1\n1,0,1,1,2\n1,0,2,0,\n2,1,0,1,0.5\n2,1,1,1,3\n2,1,2,1,4\n";
    let data = read_multi_csv(src.as_bytes()).unwrap().data;
    assert_eq!(data.last_period(), 2);
    assert_eq!(data.n_units(), 2);
    let mut out = Vec::new();
    write_multi_csv(&data, &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), src);

    let bad = "id,gvar,t,s,y\n3,2,0,1,1\n3,3,1,1,2\n";
    assert!(matches!(
        read_multi_csv(bad.as_bytes()),
        Err(Error::InconsistentGvar { id }) if id == "3"
    ));
    let dup = "id,gvar,t,s,y\n3,2,0,1,1\n3,2,0,1,2\n";
    assert!(matches!(
        read_multi_csv(dup.as_bytes()),
        Err(Error::DuplicatePeriod { .. })
    ));
    let no_base = "id,gvar,t,s,y\n3,2,1,1,1\n";
    assert!(matches!(
        read_multi_csv(no_base.as_bytes()),
        Err(Error::MissingBaseline { .. })
    ));
}

#[test]
fn counts_of_work_from_home_cells() {
    let c = cell_counts(&common::wfh_counts());
    assert_eq!(c.get(true, true, false), 77);
    assert_eq!(c.get(true, true, true), 110);
    assert_eq!(c.get(true, false, false), 41);
    assert_eq!(c.get(true, false, true), 21);
    for s1 in [false, true] {
        for d in [false, true] {
            assert_eq!(c.get(false, s1, d), 0);
        }
    }
    assert_eq!(c.total(), 249);
}

#[test]
fn one_unit_per_cell() {
    let mut cells = Vec::new();
    for d in [false, true] {
        for s0 in [false, true] {
            for s1 in [false, true] {
                cells.push(((d, s0, s1), 1));
            }
        }
    }
    let c = cell_counts(&common::panel_from_counts(&cells));
    assert!(c.iter().all(|(.., k)| k == 1));
}

fn row_strategy() -> impl Strategy<Value = String> {
    let field = prop_oneof![
        Just(String::new()),
        Just("0".to_string()),
        Just("1".to_string()),
        Just("2".to_string()),
        Just("x".to_string()),
        (-100.0..100.0f64).prop_map(|v| v.to_string()),
    ];
    prop::collection::vec(field, 4..8).prop_map(|f| format!("id,{}", f.join(",")))
}

proptest! {
    #[test]
    fn loader_accounts_for_every_row(rows in prop::collection::vec(row_strategy(), 1..40)) {
        let src = format!("id,d,s0,s1,y0,y1\n{}\n", rows.join("\n"));
        let report = read_panel_rows(src.as_bytes()).unwrap();
        prop_assert_eq!(report.rows.len() + report.errors.len(), report.input_rows);
        prop_assert_eq!(report.input_rows, rows.len());
    }

    #[test]
    fn counts_sum_to_n(seed in any::<u64>(), n in 2usize..60) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let units: Vec<_> = (0..n)
            .map(|i| common::unit(i, rng.random(), rng.random(), rng.random(), 1.0, 2.0))
            .collect();
        let data = selbounds::Panel::new(units).unwrap();
        prop_assert_eq!(cell_counts(&data).total(), n);
    }
}
