mod common;

#[test]
fn kdv_hierarchy() {
    common::lenard_magri().unwrap();
}

#[test]
fn parser_round_trip() {
    common::parser_round_trip(41, 1000).unwrap();
}
