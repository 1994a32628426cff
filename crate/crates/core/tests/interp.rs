//! Interpretations on finite words.

use std::collections::BTreeMap;

use chaincalc::chain::{PosSet, Segment, Word};
use chaincalc::interp::{image, model_check_fo, parse_interp, parse_target, respects, RespectFailure, Structure};
use chaincalc::{Error, Guards};

const MEMBERSHIP: &str = include_str!("../interps/membership.interp");
const CODING: &str = include_str!("../interps/coding.interp");

#[test]
fn membership_images_grow_with_the_word() {
    let i = parse_interp(MEMBERSHIP).unwrap();
    let g = Guards::default();
    for len in 0..=3 {
        let w = Word::from_bits(&"1".repeat(len), 1).unwrap();
        let m = image(&w, &i, &[], &g).unwrap();
        assert_eq!(m.size, 1 << len);
        let atoms = parse_target("ex a. ex b. (Atom(a) & Atom(b) & ~(a = b))").unwrap();
        assert_eq!(model_check_fo(&m, &atoms, &BTreeMap::new()).unwrap(), len >= 2);
    }
}

#[test]
fn parameters_restrict_the_universe() {
    let i = parse_interp(CODING).unwrap();
    let g = Guards::default();
    let w = Word::from_bits("000", 1).unwrap();
    let p = PosSet::parse("0,2").unwrap();
    let m = image(&w, &i, &[p], &g).unwrap();
    assert_eq!(m.size, 4);
    assert!(m.representatives.iter().all(|t| t[0].is_subset(p)));
    assert!(matches!(image(&w, &i, &[], &g), Err(Error::Interp(_))));
}

#[test]
fn non_equivalences_are_reported() {
    let text = MEMBERSHIP.replace("E := X1 =set Y1", "E := X1 sub Y1");
    let i = parse_interp(&text).unwrap();
    let w = Word::from_bits("00", 1).unwrap();
    let r = respects(&w, &i, &[], &Guards::default()).unwrap();
    assert!(matches!(r, Some(RespectFailure::NotSymmetric(..))), "{r:?}");
    assert!(matches!(image(&w, &i, &[], &Guards::default()), Err(Error::NotRespected(_))));
}

#[test]
fn guard_limits_tuple_enumeration() {
    let i = parse_interp(MEMBERSHIP).unwrap();
    let g = Guards {
        max_oracle_len: 2,
        ..Guards::default()
    };
    let w = Word::from_bits("000", 1).unwrap();
    assert!(matches!(Structure::compute(&w, &i, &[], &g), Err(Error::Resource { .. })));
}

#[test]
fn bouquet_of_a_final_segment() {
    let i = parse_interp(MEMBERSHIP).unwrap();
    let w = Word::from_bits("0000", 1).unwrap();
    let s = Structure::compute(&w, &i, &[], &Guards::default()).unwrap();
    assert_eq!(s.bouquet_size(&Segment::new(1, 4, 4).unwrap()).unwrap(), 8);
}
