use super::*;

pub(crate) const SIX_BY_THREE: [&str; 21] = [
    "(1,123,1,1,1,1)",
    "(1,23,1,12,1,1)",
    "(123,2,1,2,1,1)",
    "(23,2,1,2,1,12)",
    "(23,2,1,2,12,2)",
    "(13,23,1,2,1,1)",
    "(13,3,1,12,1,1)",
    "(23,2,13,2,2,2)",
    "(2,2,123,2,2,2)",
    "(3,2,13,2,12,2)",
    "(3,2,13,2,1,12)",
    "(3,23,13,2,1,1)",
    "(3,3,13,12,1,1)",
    "(3,3,3,123,1,1)",
    "(3,3,3,23,1,12)",
    "(3,3,3,23,13,2)",
    "(3,23,3,2,1,12)",
    "(3,23,3,2,13,2)",
    "(3,2,3,2,123,2)",
    "(3,3,3,3,3,123)",
    "(3,3,3,3,13,12)",
];

pub(crate) const FOUR_BY_FOUR: [&str; 20] = [
    "(1234,2,3,4)",
    "(1,1234,3,4)",
    "(1,2,1234,4)",
    "(1,2,3,1234)",
    "(1,12,13,14)",
    "(12,2,23,24)",
    "(13,23,3,34)",
    "(14,24,34,4)",
    "(123,2,3,24)",
    "(13,2,3,234)",
    "(134,23,3,4)",
    "(14,234,3,4)",
    "(1,123,3,34)",
    "(1,12,3,134)",
    "(1,124,13,4)",
    "(1,24,134,4)",
    "(1,2,123,14)",
    "(1,2,23,124)",
    "(12,2,234,4)",
    "(124,2,34,4)",
];

fn stm(tuples: &[&str], signs: &[&str]) -> AbstractStm {
    let d = signs[0].len();
    let trees: Vec<_> = tuples.iter().map(|t| parse_tuple(t).unwrap()).collect();
    AbstractStm::new(d, &trees, SignMatrix::parse_rows(signs).unwrap()).unwrap()
}

fn six_by_three() -> AbstractStm {
    stm(&SIX_BY_THREE, &["++-", "+-+", "++-", "+-+", "++-", "+-+"])
}

fn four_by_four() -> AbstractStm {
    stm(&FOUR_BY_FOUR, &["-+++", "+-++", "++-+", "+++-"])
}

fn set(items: &[usize]) -> BTreeSet<usize> {
    items.iter().map(|i| i - 1).collect()
}

#[test]
fn parse_tuple_notation() {
    assert_eq!(parse_tuple("(13,3,1)"), Some(vec![vec![0, 2], vec![2], vec![0]]));
    assert_eq!(parse_tuple("(1,,2)"), None);
    assert_eq!(parse_tuple("(0)"), None);
}

#[test]
fn sample_triangulations_validate() {
    validate_stm(&six_by_three()).unwrap();
    validate_stm(&four_by_four()).unwrap();
}

#[test]
fn duplicated_tree_is_rejected() {
    let mut tuples = SIX_BY_THREE.to_vec();
    tuples[20] = tuples[0];
    let Err(StmError::Invalid(problems)) = validate_stm(&stm(&tuples, &["++-", "+-+", "++-", "+-+", "++-", "+-+"]))
    else {
        panic!("accepted")
    };
    assert!(problems.iter().any(|p| p.contains("share the degree sequence")));
    assert!(problems.iter().any(|p| p.contains("degree sequences are realized")));
}

#[test]
fn untrimmed_signs_are_rejected() {
    let s = stm(&FOUR_BY_FOUR, &["--++", "+-++", "++-+", "+++-"]);
    assert!(matches!(validate_stm(&s), Err(StmError::Invalid(p)) if p.iter().any(|m| m.contains("not trimmed"))));
}

#[test]
fn contractions_of_the_four_by_four_triangulation() {
    let s = four_by_four();
    let two: Vec<String> = contraction_covectors(&s, &set(&[1, 2])).iter().map(|g| g.tuple_notation()).collect();
    for want in ["(1,12,1,1)", "(12,2,2,2)", "(1,2,12,1)", "(1,2,2,12)"] {
        assert!(two.contains(&want.to_string()), "{want} missing from {two:?}");
    }
    let one: Vec<String> = contraction_covectors(&s, &set(&[1])).iter().map(|g| g.tuple_notation()).collect();
    assert_eq!(one, vec!["(1,1,1,1)".to_string()]);
    assert_eq!(contraction_covectors(&s, &set(&[1, 2, 3, 4])), s.trees().to_vec());
}

#[test]
fn cramer_covectors_of_the_six_by_three_triangulation() {
    let s = six_by_three();
    assert_eq!(abstract_cramer(&s, &set(&[]), &set(&[2])).unwrap().tuple_notation(), "(2,2,2,2,2,2)");
    assert_eq!(abstract_cramer(&s, &set(&[3, 6]), &set(&[1, 2, 3])).unwrap().tuple_notation(), "(3,2,13,2,1,12)");
    assert!(matches!(abstract_cramer(&s, &set(&[3]), &set(&[1, 2, 3])), Err(StmError::Precondition(_))));
}

#[test]
fn check_feasible_examples() {
    let s = six_by_three();
    let y1 = abstract_cramer(&s, &set(&[]), &set(&[2])).unwrap();
    assert_eq!(check_feasible_basic(&y1, 1), Classification::TotallyInfeasible);
    let y6 = abstract_cramer(&s, &set(&[1, 4]), &set(&[1, 2, 3])).unwrap();
    assert_eq!(y6.tuple_notation(), "(13,3,1,12,1,1)");
    assert_eq!(check_feasible_basic(&y6, 0), Classification::Feasible);
    let y3 = abstract_cramer(&s, &set(&[3, 6]), &set(&[1, 2, 3])).unwrap();
    assert_eq!(check_feasible_basic(&y3, 0), Classification::Infeasible);
}

#[test]
fn simplified_pivots_of_the_feasible_run() {
    let s = six_by_three();
    let y3 = BasicState::cramer(&s, set(&[3, 6]), set(&[2, 3]), 0).unwrap();
    assert!(y3.is_basic());
    let y4 = next_basic_covector(&s, &y3, 0).unwrap();
    assert_eq!(y4.covector.tuple_notation(), "(23,2,1,2,1,12)");
    let y5 = next_basic_covector(&s, &y4, 1).unwrap();
    assert_eq!(y5.covector.tuple_notation(), "(13,23,1,2,1,1)");
    assert!(matches!(next_basic_covector(&s, &y5, 4), Err(StmError::Precondition(_))));
    let (end, pivots) = find_extreme_covector(&s, &y3).unwrap();
    assert_eq!(check_feasible_basic(&end.covector, 0), Classification::Feasible);
    assert!(!pivots.is_empty());
}

#[test]
fn walk_matches_simplified_pivot_on_the_feasible_run() {
    let s = six_by_three();
    let y3 = BasicState::cramer(&s, set(&[3, 6]), set(&[2, 3]), 0).unwrap();
    for r in eligible(&y3) {
        let (walked, log) = next_covector_walk(&s, &y3, r).unwrap();
        assert_eq!(walked, next_basic_covector(&s, &y3, r).unwrap());
        assert!(!log.is_empty() && log.len() < s.n() * s.trees().len());
    }
}

#[test]
fn scripted_feasible_run() {
    let s = six_by_three();
    let opts =
        SolveOptions { delta_order: Some(vec![1, 2, 0]), script: Some(vec![5, 2, 0, 1, 3]), ..Default::default() };
    let out = solve_abstract(&s, &opts).unwrap();
    assert_eq!(out.verdict, Verdict::Feasible);
    let tuples: Vec<String> = out.trace.iter().map(|e| e.covector.tuple_notation()).collect();
    assert_eq!(
        tuples,
        ["(2,2,2,2,2,2)", "(3,3,3,3,3,23)", "(3,2,13,2,1,12)", "(23,2,1,2,1,12)", "(13,23,1,2,1,1)", "(13,3,1,12,1,1)"]
    );
    assert_eq!(out.state.basis, set(&[1, 4]));
    for (delta, size, pivots) in out.phases {
        assert!(pivots < binomial(s.n(), size).max(1), "phase {delta}");
    }
}

#[test]
fn four_by_four_run_is_totally_infeasible() {
    let s = four_by_four();
    let opts = SolveOptions { delta_order: Some(vec![0, 1, 3, 2]), ..Default::default() };
    let out = solve_abstract(&s, &opts).unwrap();
    assert_eq!(out.verdict, Verdict::Infeasible);
    let tuples: Vec<String> = out.trace.iter().map(|e| e.covector.tuple_notation()).collect();
    assert_eq!(&tuples[..3], ["(1,1,1,1)", "(12,2,2,2)", "(14,24,4,4)"]);
    assert_eq!(out.trace.len(), 4);
    assert_eq!(out.state.basis, set(&[1, 2, 4]));
    assert_eq!(out.state.covector, abstract_cramer(&s, &set(&[1, 2, 4]), &set(&[1, 2, 3, 4])).unwrap());
    assert_eq!(check_feasible_basic(&out.state.covector, out.state.delta), Classification::TotallyInfeasible);
    assert!(out.phases.iter().all(|p| p.2 == 0));
}

#[test]
fn wrong_cramer_covector_breaks_comparability() {
    let mut tuples = SIX_BY_THREE.to_vec();
    tuples[10] = "(3,3,13,2,1,12)";
    let broken = stm(&tuples, &["++-", "+-+", "++-", "+-+", "++-", "+-+"]);
    assert!(
        matches!(validate_stm(&broken), Err(StmError::Invalid(p)) if p.iter().all(|m| m.contains("different matchings")))
    );
}

#[test]
fn matrix_stms() {
    let sys = SignedSystem::from_ints(&[vec![Some(0), Some(0)], vec![Some(0), Some(-1)]], &["+-", "-+"]).unwrap();
    let s = stm_from_matrix(&sys).unwrap();
    assert_eq!(s.trees().len(), 2);
    validate_stm(&s).unwrap();
    let walk_matrix = SignedSystem::from_ints(
        &[vec![Some(0), Some(0)], vec![Some(0), Some(-1)], vec![Some(0), Some(-2)]],
        &["+-", "-+", "+-"],
    )
    .unwrap();
    let s = stm_from_matrix(&walk_matrix).unwrap();
    assert_eq!(s.trees().len(), 3);
    validate_stm(&s).unwrap();
    let flat = SignedSystem::from_ints(&[vec![Some(0), Some(0)], vec![Some(0), Some(0)]], &["+-", "-+"]).unwrap();
    assert!(matches!(stm_from_matrix(&flat), Err(StmError::NonGeneric)));
}

#[test]
fn edge_exchange_walk_of_the_four_by_five_example() {
    let sys = SignedSystem::from_ints(
        &[
            vec![Some(-14), Some(1), Some(4), Some(7)],
            vec![Some(-5), Some(9), Some(-3), Some(-6)],
            vec![Some(0), Some(-7), Some(-2), Some(10)],
            vec![Some(16), Some(12), Some(4), Some(-5)],
            vec![Some(14), Some(-2), Some(-6), Some(14)],
        ],
        &["+-++", "-+++", "+-++", "++-+", "++-+"],
    )
    .unwrap();
    let s = stm_from_matrix(&sys).unwrap();
    validate_stm(&s).unwrap();
    let start = BasicState::cramer(&s, set(&[2, 3, 4]), set(&[1, 2, 3]), 3).unwrap();
    assert_eq!(start.covector.tuple_notation(), "(1,13,23,34,3)");
    assert!(start.is_basic());
    let (end, log) = next_covector_walk(&s, &start, 4).unwrap();
    let edge = |i: usize, j: usize| (i - 1, j - 1);
    let steps: Vec<_> = log.iter().map(|st| (st.removed, st.added)).collect();
    assert_eq!(steps, [(edge(3, 4), edge(4, 2)), (edge(3, 2), edge(1, 3)), (edge(3, 3), edge(2, 5))]);
    assert_eq!(log.iter().map(|st| st.apex + 1).collect::<Vec<_>>(), [2, 3, 5]);
    assert_eq!(end.basis, set(&[2, 3, 5]));
    assert_eq!(end.covector.tuple_notation(), "(1,14,12,4,23)");
    assert_eq!(end, next_basic_covector(&s, &start, 4).unwrap());
}
