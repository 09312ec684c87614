//! Randomized invariants. Instances come from the seeded generators, so a
//! failing case shrinks to a (seed, size) pair that reproduces it.

use lipbox::cli::{gen_random, InstanceFile};
use lipbox::integral::{eps_dual_check, integral_norm, reconstruct};
use lipbox::linalg::{self, Vector};
use lipbox::lp::{enumerate_vertices, solve_lp, LinearProgram, Polytope, Relation};
use lipbox::operators::{
    associate_tr, bt_norm, injective_norm, linearization_norm, lip_of_table, lipl_norm, projective_norm, FreeTensor,
    LipLinearOperator, LipschitzMap,
};
use lipbox::random::{self, InstanceRng};
use lipbox::rational::{self, Rational};
use lipbox::spaces::{free_norm, lip_constant, lipschitz_ball_vertices, FiniteMetricSpace, PolyhedralNorm};
use lipbox::summing::{dominated_lower_bound, dominated_two_measure, SequenceSample, SummingOptions};
use lipbox::Caps;
use num::{Signed, Zero};
use proptest::prelude::*;

fn setup(seed: u64, points: usize, dim: usize) -> (InstanceRng, FiniteMetricSpace, PolyhedralNorm) {
    let caps = Caps::default();
    let mut rng = random::rng(seed);
    let x = random::metric(&mut rng, points, &caps).unwrap();
    let e = random::norm(&mut rng, dim, &caps).unwrap();
    (rng, x, e)
}

fn vertex_max(space: &FiniteMetricSpace, m: &[Rational]) -> Rational {
    let caps = Caps::default();
    lipschitz_ball_vertices(space, &caps).unwrap().iter().map(|f| linalg::dot(f, m)).max().unwrap()
}

fn sorted(mut v: Vec<Vector>) -> Vec<Vector> {
    v.sort();
    v
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn vertices_ignore_row_order_and_match_the_lp(seed in any::<u64>(), points in 2usize..=4) {
        let caps = Caps::default();
        let (mut rng, x, _) = setup(seed, points, 1);
        let ball = lipbox::spaces::lipschitz_constraints(&x);
        let mut order: Vec<usize> = (0..ball.rows().len()).collect();
        order.reverse();
        let shift = seed as usize % order.len();
        order.rotate_left(shift);
        let a = sorted(enumerate_vertices(&ball, &caps).unwrap());
        let b = sorted(enumerate_vertices(&ball.permuted(&order), &caps).unwrap());
        prop_assert_eq!(&a, &b);

        let c = random::vector(&mut rng, ball.dim(), 4);
        let mut lp = LinearProgram::maximize(c.clone()).all_free();
        for (row, rhs) in ball.rows().iter().zip(ball.rhs()) {
            lp.constrain(row.clone(), Relation::Le, rhs.clone());
        }
        let sol = solve_lp(&lp).unwrap();
        prop_assert!(sol.verify(&lp).is_ok());
        let best = a.iter().map(|v| linalg::dot(v, &c)).max().unwrap();
        prop_assert_eq!(sol.value, best);
    }

    #[test]
    fn free_norm_is_a_norm_dual_to_the_lipschitz_ball(seed in any::<u64>(), points in 2usize..=5) {
        let (mut rng, x, _) = setup(seed, points, 1);
        let m = random::vector(&mut rng, x.free_dim(), 4);
        let m2 = random::vector(&mut rng, x.free_dim(), 4);
        let nm = free_norm(&m, &x).unwrap();
        prop_assert_eq!(&nm, &vertex_max(&x, &m));
        let s = random::rational(&mut rng, 3);
        prop_assert_eq!(free_norm(&linalg::scale(&m, &s), &x).unwrap(), s.abs() * &nm);
        prop_assert!(free_norm(&linalg::add(&m, &m2), &x).unwrap() <= nm + free_norm(&m2, &x).unwrap());
        for (a, b) in x.pairs() {
            let mut mol = linalg::zeros(x.free_dim());
            if a > 0 { mol[a - 1] += rational::one(); }
            if b > 0 { mol[b - 1] -= rational::one(); }
            prop_assert_eq!(&free_norm(&mol, &x).unwrap(), x.d(a, b));
        }
    }

    #[test]
    fn operator_norms_agree(seed in any::<u64>(), points in 2usize..=4, dim in 1usize..=2) {
        let (mut rng, x, e) = setup(seed, points, dim);
        let f = random::norm(&mut rng, dim, &Caps::default()).unwrap();
        let t = random::operator(&mut rng, &x, &e, &f);
        let l = lipl_norm(&t).unwrap();
        prop_assert_eq!(&l, &lip_of_table(&t).unwrap());
        prop_assert_eq!(&l, &bt_norm(&t).unwrap());
        prop_assert_eq!(&l, &linearization_norm(&t).unwrap());
        prop_assert_eq!(lipl_norm(&t.scale(&rational::int(-3))).unwrap(), rational::int(3) * &l);
    }

    #[test]
    fn projective_dominates_injective(seed in any::<u64>(), points in 2usize..=3, dim in 1usize..=2) {
        let caps = Caps::default();
        let (mut rng, x, e) = setup(seed, points, dim);
        let coeffs = (0..x.free_dim()).map(|_| random::vector(&mut rng, dim, 3)).collect();
        let u = FreeTensor::new(coeffs, dim).unwrap();
        let pi = projective_norm(&u, &x, &e).unwrap();
        let eps = injective_norm(&u, &x, &e, &caps).unwrap();
        prop_assert!(eps <= pi, "ε {} > π {}", eps, pi);

        let a = 1 + (seed as usize % x.free_dim());
        let v = random::vector(&mut rng, dim, 3);
        let elem = FreeTensor::elementary(&x, a, &v);
        let expected = x.d(a, 0) * e.eval(&v);
        prop_assert_eq!(&projective_norm(&elem, &x, &e).unwrap(), &expected);
        prop_assert_eq!(&injective_norm(&elem, &x, &e, &caps).unwrap(), &expected);
    }

    #[test]
    fn integral_certificates_rebuild_the_operator(seed in any::<u64>(), points in 2usize..=3, dim in 1usize..=2) {
        let caps = Caps::default();
        let (mut rng, x, e) = setup(seed, points, dim);
        let t = random::operator(&mut rng, &x, &e, &PolyhedralNorm::scalar());
        let res = integral_norm(&t, &caps).unwrap();
        let back = reconstruct(&res.certificate, &t.space, &t.domain, &t.codomain).unwrap();
        prop_assert_eq!(back.table(), t.table());
        prop_assert_eq!(&res.certificate.total_variation(&t.codomain), &res.value);
        prop_assert!(lipl_norm(&t).unwrap() <= res.value);
        prop_assert_eq!(&eps_dual_check(&t, &caps).unwrap(), &res.value);
    }

    #[test]
    fn rank_one_maps_have_integral_lip_times_norm(seed in any::<u64>(), points in 2usize..=3, dim in 1usize..=2) {
        let caps = Caps::default();
        let (mut rng, x, f_norm) = setup(seed, points, dim);
        let f = random::vector(&mut rng, x.free_dim(), 3);
        let mut z = random::vector(&mut rng, dim, 3);
        if linalg::is_zero(&z) { z[0] = rational::one(); }
        let values = f.iter().map(|c| linalg::scale(&z, c)).collect();
        let r = LipschitzMap::new(x.clone(), f_norm.clone(), values).unwrap();
        let t: LipLinearOperator = associate_tr(&r);
        let expected = lip_constant(&x, &f) * f_norm.eval(&z);
        prop_assert_eq!(integral_norm(&t, &caps).unwrap().value, expected);
    }

    #[test]
    fn instance_files_round_trip(seed in any::<u64>(), points in 2usize..=4, dim in 1usize..=2) {
        let caps = Caps::default();
        let file = gen_random(points, dim, seed, &caps).unwrap();
        let inst = file.validate(&caps).unwrap();
        let text = inst.emit().to_json();
        let again = InstanceFile::from_json(&text).unwrap().validate(&caps).unwrap();
        prop_assert_eq!(&inst, &again);
        prop_assert_eq!(text, again.emit().to_json());
    }

    #[test]
    fn rationals_are_stored_reduced(n in -1000i64..1000, d in 1i64..1000) {
        let r = rational::ratio(n, d);
        prop_assert!(r.denom().is_positive());
        let g = num::Integer::gcd(r.numer(), r.denom());
        prop_assert!(g == num::BigInt::from(1) || (r.is_zero() && r.denom() == &num::BigInt::from(1)));
        prop_assert_eq!(rational::parse(&rational::format(&r)).unwrap(), r);
    }
}

proptest! {
    #![proptest_config(cases(8))]

    // Every sampled sequence ratio sits below a verified domination constant.
    #[test]
    fn samples_stay_below_the_certified_constant(
        seed in any::<u64>(),
        picks in prop::collection::vec((0usize..8, 0usize..8, 0usize..16), 1..4),
    ) {
        let caps = Caps::default();
        let (mut rng, x, e) = setup(seed, 3, 2);
        let f = random::norm(&mut rng, 2, &caps).unwrap();
        let t = random::operator(&mut rng, &x, &e, &f);
        let two = dominated_two_measure(&t, &caps, &SummingOptions::default()).unwrap();
        let dirs = e.dual().primal_vertices().to_vec();
        let triples = picks
            .iter()
            .map(|&(a, b, v)| (a % x.len(), b % x.len(), dirs[v % dirs.len()].clone()))
            .filter(|(a, b, _)| a != b)
            .collect::<Vec<_>>();
        prop_assume!(!triples.is_empty());
        let one = rational::one();
        match dominated_lower_bound(&t, &one, &one, &SequenceSample::new(triples), &caps) {
            Ok(lb) => prop_assert!(lb <= two.value.upper, "{} > {}", lb, two.value.upper),
            Err(lipbox::Error::DegenerateSample(_)) => {}
            Err(err) => return Err(TestCaseError::fail(err.to_string())),
        }
    }
}

#[test]
fn square_vertices_lie_on_two_facets() {
    let sq = Polytope::new(
        2,
        vec![
            vec![rational::one(), rational::zero()],
            vec![-rational::one(), rational::zero()],
            vec![rational::zero(), rational::one()],
            vec![rational::zero(), -rational::one()],
        ],
        vec![rational::one(); 4],
    )
    .unwrap();
    for v in enumerate_vertices(&sq, &Caps::default()).unwrap() {
        assert!(sq.contains(&v));
        assert_eq!(sq.tight_rows(&v).len(), 2);
    }
}
