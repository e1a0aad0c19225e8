mod support;

use nate_core::harness::{mutation_pair, well_typed_program, CorpusSpec};
use nate_core::lang::parse;
use nate_core::typecheck::infer_partial;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use support::{algorithm_w, canonical, evaluate, from_core, Outcome};

fn assert_agrees(src: &str) {
    let p = parse(src).unwrap();
    let d = infer_partial(&p);
    let w = algorithm_w(&p).expect("oracle types the program");
    assert!(d.well_typed, "{src}");
    for id in p.ids() {
        assert_eq!(
            canonical(&from_core(&d.node_types[id])),
            canonical(&w[id]),
            "node {id} of {src}"
        );
    }
}

#[test]
fn hand_written_programs_match_w() {
    for src in [
        "fun x -> x",
        "fun x -> x + 1",
        "let id = fun x -> x in (id 1, id true)",
        "let rec len xs = match xs with [] -> 0 | h :: t -> 1 + len t in len [true; false]",
        "fun p -> match p with (a, b) -> (b, a)",
        "let rec map f xs = match xs with [] -> [] | h :: t -> f h :: map f t in map (fun x -> x + 1) [1; 2]",
        "fun f -> fun g -> fun x -> f (g x)",
        "if true then [] else [1]",
        "let k = fun x -> fun y -> x in k 1 true",
    ] {
        assert_agrees(src);
    }
}

#[test]
fn generated_programs_match_w_on_every_node() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let p = well_typed_program(&mut rng, 10, 60);
        assert_agrees(p.source());
    }
}

#[test]
fn mutated_programs_are_rejected_by_w() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let spec = CorpusSpec::standard();
    for _ in 0..200 {
        let (pair, _, _) = mutation_pair(&mut rng, &spec);
        assert!(algorithm_w(&pair.bad).is_none(), "{}", pair.bad.source());
        assert!(algorithm_w(&pair.fix).is_some(), "{}", pair.fix.source());
    }
}

#[test]
fn well_typed_programs_do_not_get_stuck() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut values = 0;
    for _ in 0..300 {
        let p = well_typed_program(&mut rng, 10, 60);
        match evaluate(p.root(), 20_000) {
            Outcome::Value(_) => values += 1,
            Outcome::OutOfFuel => {}
            Outcome::Stuck(e) => panic!("{} got stuck at {e:?}", p.source()),
        }
    }
    assert!(values > 250, "{values}");
}

#[test]
fn evaluator_detects_stuck_terms() {
    for src in [
        "1 + true",
        "match 1 with [] -> 0 | h :: t -> h",
        "if 3 then 1 else 2",
        "1 2",
    ] {
        let p = parse(src).unwrap();
        assert!(
            matches!(evaluate(p.root(), 100), Outcome::Stuck(_)),
            "{src}"
        );
    }
    let p = parse("let rec sum xs = match xs with [] -> 0 | h :: t -> h + sum t in sum [1; 2; 3]")
        .unwrap();
    assert_eq!(
        evaluate(p.root(), 1000),
        Outcome::Value(nate_core::lang::Expr::int(6))
    );
}
