mod common;

use proptest::prelude::*;
use reqc::dict_io::{load_dictionary, serialize_dictionary, DictFormat};

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn json_round_trip(d in common::dictionary(12)) {
        let s = serialize_dictionary(&d, DictFormat::Json);
        prop_assert_eq!(load_dictionary(&s, DictFormat::Json).unwrap(), d);
    }

    #[test]
    fn csv_round_trip(d in common::dictionary(12)) {
        let s = serialize_dictionary(&d, DictFormat::Csv);
        prop_assert_eq!(load_dictionary(&s, DictFormat::Csv).unwrap(), d);
    }

    #[test]
    fn formats_agree(d in common::dictionary(12)) {
        let via_csv = load_dictionary(&serialize_dictionary(&d, DictFormat::Csv), DictFormat::Csv).unwrap();
        prop_assert_eq!(serialize_dictionary(&via_csv, DictFormat::Json), serialize_dictionary(&d, DictFormat::Json));
    }
}

#[test]
fn shipped_dictionaries_agree() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let json = load_dictionary(&std::fs::read_to_string(dir.join("example_1_dict.json")).unwrap(), DictFormat::Json).unwrap();
    let csv = load_dictionary(&std::fs::read_to_string(dir.join("example_1_dict.csv")).unwrap(), DictFormat::Csv).unwrap();
    assert_eq!(json, csv);
    let strip = |d: &reqc_core::VariableDictionary| {
        d.iter()
            .map(|x| {
                let mut x = x.clone();
                x.description.clear();
                x
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&json), strip(&reqc_core::fixtures::example_1_dictionary()));
}
