mod common;

#[test]
fn schouten_skew_symmetry_and_jacobi() {
    common::skew_and_jacobi(11, 100).unwrap();
}

#[test]
fn specialized_brackets_match_schouten() {
    common::specialized_brackets(12, 50).unwrap();
}
