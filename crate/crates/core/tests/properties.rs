//! Randomized checks against independent oracles: determinantal divisors,
//! complexes built with known homology, brute-force counting.

mod support;

use support::CASES;

#[test]
fn snf_is_a_valid_diagonalization() {
    support::snf_is_a_valid_diagonalization(CASES).unwrap();
}

#[test]
fn square_nonzero_is_rejected() {
    support::square_nonzero_is_rejected(CASES).unwrap();
}

#[test]
fn homology_matches_oracles() {
    support::homology_matches_oracles(CASES).unwrap();
}

#[test]
fn coinvariants_two_routes() {
    support::coinvariants_two_routes(CASES).unwrap();
}

#[test]
fn first_homology_is_abelianization() {
    support::first_homology_is_abelianization(CASES).unwrap();
}

#[test]
fn blowup_orbit_sums() {
    support::blowup_orbit_sums(CASES).unwrap();
}
