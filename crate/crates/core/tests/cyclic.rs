mod support;

use fibercover::quotient::cyclic::cyclic_solution;
use fibercover::slope::Slope;

#[test]
fn closed_forms_and_congruence_oracle() {
    let (grid, oracle) = support::cyclic_grid().unwrap();
    assert!(grid >= 100, "only {grid} grid points");
    assert!(oracle >= 100, "only {oracle} oracle checks");
}

#[test]
fn oracle_finds_known_solution() {
    // k = 4, R = 1, (μ, λ) = (1, 2): N = |1 − 4| = 3.
    let s = Slope::new(1, 2).unwrap();
    let sol = cyclic_solution(4, 1, s).unwrap();
    assert_eq!(sol.modulus.abs(), 3);
    let all = support::cyclic_brute_force(4, 1, s, 3);
    assert!(!all.is_empty());
    assert!(all.iter().all(|e| e[0] == 1));
}
