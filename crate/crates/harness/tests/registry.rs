use gaspp_core::{enumerate_ne, ClassTag};
use gaspp_harness::registry::{self, BenchmarkGame, NAMES};

fn bimatrix(name: &str) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let g = registry::entry(name).unwrap().game;
    let g = g.as_bimatrix().unwrap();
    (g.row_matrix(), g.col_matrix())
}

#[test]
fn names_are_exactly_the_seven_benchmarks() {
    let names: Vec<&str> = registry::all().iter().map(|e| e.name).collect();
    assert_eq!(
        names,
        [
            "prisoners_dilemma",
            "chicken",
            "battle_of_sexes",
            "rock_paper_scissors",
            "shapleys_game",
            "two_by_three",
            "three_player_matching_pennies"
        ]
    );
    assert_eq!(names, NAMES);
    assert!(registry::entry("matching_pennies").is_err());
}

#[test]
fn payoffs_match_reference_matrices() {
    let cases: [(&str, Vec<Vec<f64>>, Vec<Vec<f64>>); 6] = [
        (
            "prisoners_dilemma",
            vec![vec![-1.0, -3.0], vec![0.0, -2.0]],
            vec![vec![-1.0, 0.0], vec![-3.0, -2.0]],
        ),
        (
            "chicken",
            vec![vec![-2.0, 1.0], vec![-1.0, -1.0]],
            vec![vec![-2.0, -1.0], vec![1.0, -1.0]],
        ),
        (
            "battle_of_sexes",
            vec![vec![3.0, 1.0], vec![0.0, 2.0]],
            vec![vec![2.0, 1.0], vec![0.0, 3.0]],
        ),
        (
            "rock_paper_scissors",
            vec![vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]],
            vec![vec![0.0, 1.0, -1.0], vec![-1.0, 0.0, 1.0], vec![1.0, -1.0, 0.0]],
        ),
        (
            "shapleys_game",
            vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]],
            vec![vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
        ),
        (
            "two_by_three",
            vec![vec![3.0, 0.0, 1.0], vec![2.0, 1.0, -1.0]],
            vec![vec![3.0, 5.0, -2.0], vec![2.0, 1.0, 0.0]],
        ),
    ];
    for (name, r, c) in cases {
        assert_eq!(bimatrix(name), (r, c), "{name}");
    }
}

#[test]
fn three_player_tensor_entries() {
    let BenchmarkGame::Tensor(t) = registry::entry("three_player_matching_pennies").unwrap().game else {
        panic!("expected a tensor game");
    };
    use gaspp_core::NormalFormGame;
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let profile: Vec<Vec<f64>> = [a, b, c]
                    .iter()
                    .map(|&x| vec![if x == 0 { 1.0 } else { 0.0 }])
                    .collect();
                let sign = |same: bool| if same { 1.0 } else { -1.0 };
                assert_eq!(t.payoff(0, &profile), sign(a == b));
                assert_eq!(t.payoff(1, &profile), sign(b == c));
                assert_eq!(t.payoff(2, &profile), sign(c != a));
            }
        }
    }
}

#[test]
fn expected_classes_match_classifier() {
    for e in registry::all() {
        match (&e.game, &e.expected_class) {
            (BenchmarkGame::Bimatrix(g), Some(tags)) => assert_eq!(&g.classify().tags, tags, "{}", e.name),
            (BenchmarkGame::Tensor(_), None) => {}
            _ => panic!("{} has an inconsistent expected class", e.name),
        }
    }
    assert_eq!(
        registry::entry("prisoners_dilemma").unwrap().expected_class.unwrap(),
        [
            ClassTag::Psd,
            ClassTag::TwoByNAntiparallel { delta: 1.0 },
            ClassTag::TwoByTwo
        ]
    );
}

#[test]
fn every_two_player_game_has_an_equilibrium() {
    for e in registry::all() {
        if let Some(g) = e.game.as_bimatrix() {
            assert!(!enumerate_ne(g).unwrap().equilibria.is_empty(), "{}", e.name);
        }
    }
}
