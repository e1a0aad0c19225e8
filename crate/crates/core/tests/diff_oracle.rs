use std::collections::BTreeSet;

use nate_core::harness::{single_edit_pair, EditShape};
use nate_core::labeler::{diff_programs, tree_diff, ProgramPair};
use nate_core::lang::{parse, SyntaxClass};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn single_edits_are_labelled_at_the_edit() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (mut replaced, mut wrapped) = (0, 0);
    for _ in 0..400 {
        let (bad, fix, shape, id) = single_edit_pair(&mut rng);
        let labels = diff_programs(&bad, &fix);
        assert_eq!(
            labels.changed,
            BTreeSet::from([id]),
            "{shape:?}\n{}\n{}",
            bad.source(),
            fix.source()
        );
        match shape {
            EditShape::Replace => replaced += 1,
            EditShape::Wrap => wrapped += 1,
        }
    }
    assert!(replaced > 100 && wrapped > 100);
}

#[test]
fn paper_rules() {
    // Wholesale replacement marks the replaced node.
    let pair = ProgramPair::parse(
        "let rec sumList xs = match xs with | [] -> [] | hd :: tl -> hd + sumList tl in sumList",
        "let rec sumList xs = match xs with | [] -> 0 | hd :: tl -> hd + sumList tl in sumList",
        serde_json::Value::Null,
    )
    .unwrap();
    let l = tree_diff(&pair);
    let nil = pair
        .bad
        .ids()
        .find(|&i| pair.bad.class(i).unwrap() == SyntaxClass::Nil)
        .unwrap();
    assert_eq!(l.changed, BTreeSet::from([nil]));

    // Inserting an application around `x` marks `x`.
    let bad = parse("fun f -> fun x -> 1 + x").unwrap();
    let fix = parse("fun f -> fun x -> 1 + f x").unwrap();
    let x = bad.len() - 1;
    assert_eq!(diff_programs(&bad, &fix).changed, BTreeSet::from([x]));

    // Identical programs have nothing to blame.
    assert!(diff_programs(&bad, &bad).changed.is_empty());
    assert_eq!(diff_programs(&bad, &bad).diff_fraction, 0.0);
}

#[test]
fn removed_wrapper_marks_the_operator() {
    let bad = parse("fun f -> fun x -> f x + 1").unwrap();
    let fix = parse("fun f -> fun x -> f x").unwrap();
    let plus = 2;
    assert!(bad.node(plus).unwrap().class() == SyntaxClass::Plus);
    assert_eq!(diff_programs(&bad, &fix).changed, BTreeSet::from([plus]));
}
