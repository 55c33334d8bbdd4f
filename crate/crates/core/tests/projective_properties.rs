use proptest::prelude::*;
use wignerkit::hilbert::{complement, Ray};
use wignerkit::isometry::{Isometry, OperatorClass};
use wignerkit::projective::{
    check_lineation, check_nondegenerate, check_orthogonality_preserving, induced_line_image,
    line_through, random_line_family, ray_orthogonal, sample_line, tabulate_lines,
    transition_probability, Line, RayMapTable,
};
use wignerkit::sampling::{random_ray, random_subspace, seeded};
use wignerkit::tolerance::Tolerance;

fn class_of(flag: bool) -> OperatorClass {
    if flag {
        OperatorClass::ConjugateLinear
    } else {
        OperatorClass::Linear
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transition_probability_is_symmetric_and_invariant(seed in any::<u64>(), n in 3usize..7, conj in any::<bool>()) {
        let mut rng = seeded(seed);
        let p = random_ray(n, &mut rng);
        let q = random_ray(n, &mut rng);
        let l = Isometry::random(n, class_of(conj), &mut rng);
        let tp = transition_probability(&p, &q).unwrap();
        prop_assert!((tp - transition_probability(&q, &p).unwrap()).abs() < 1e-12);
        let moved = transition_probability(&l.apply_ray(&p), &l.apply_ray(&q)).unwrap();
        prop_assert!((tp - moved).abs() < 1e-10);
        let trace = (p.projection() * q.projection()).trace();
        prop_assert!((tp - trace.re).abs() < 1e-12);
    }

    #[test]
    fn induced_maps_pass_every_ray_check(seed in any::<u64>(), n in 3usize..7, conj in any::<bool>()) {
        let tol = Tolerance::default();
        let mut rng = seeded(seed);
        let l = Isometry::random(n, class_of(conj), &mut rng);
        let lines = random_line_family(n, 6, 7, &mut rng).unwrap();
        let table = tabulate_lines(n, &lines, &tol, |r| l.apply_ray(r)).unwrap();
        prop_assert!(check_orthogonality_preserving(&table, &tol).pass);
        prop_assert!(check_lineation(&table, &lines, &tol).unwrap().pass);
        prop_assert!(check_nondegenerate(&table, &lines, &tol).unwrap().pass);
    }

    #[test]
    fn induced_line_image_contains_images_of_its_rays(seed in any::<u64>(), n in 3usize..7, conj in any::<bool>()) {
        let tol = Tolerance::default();
        let mut rng = seeded(seed);
        let l = Isometry::random(n, class_of(conj), &mut rng);
        let carrier = random_subspace(n, 2, &mut rng);
        let line = Line::new(carrier.clone()).unwrap();
        let mut sources: Vec<Ray> = complement(&carrier).unwrap().columns().into_iter().map(|c| Ray::new(c).unwrap()).collect();
        let on_line = sample_line(&line, 5, 3).unwrap();
        sources.extend(on_line.iter().cloned());
        let table = RayMapTable::induced_by(&l, sources.iter(), &tol).unwrap();
        let image = induced_line_image(&table, &line, &tol).unwrap();
        prop_assert!(image.carrier().approx_eq(&l.apply_subspace(&carrier), &tol));
        for r in &on_line {
            prop_assert!(image.contains(table.lookup(r, &tol).unwrap(), &tol));
        }
    }
}

#[test]
fn unitary_columns_are_orthogonal_rays() {
    let tol = Tolerance::default();
    let mut rng = seeded(4);
    let u = Isometry::random(5, OperatorClass::Linear, &mut rng);
    let cols: Vec<Ray> = (0..5)
        .map(|j| Ray::new(u.matrix().column(j).into_owned()).unwrap())
        .collect();
    for i in 0..5 {
        for j in i + 1..5 {
            assert!(ray_orthogonal(&cols[i], &cols[j], &tol).unwrap());
        }
    }
}

#[test]
fn anti_unitary_table_with_partners_preserves_orthogonality() {
    let tol = Tolerance::default();
    let mut rng = seeded(5);
    let l = Isometry::random(4, OperatorClass::ConjugateLinear, &mut rng);
    let mut sources = Vec::new();
    for _ in 0..50 {
        let r = random_ray(4, &mut rng);
        let partner = Ray::new(complement(&r.as_subspace()).unwrap().column(0)).unwrap();
        sources.push(r);
        sources.push(partner);
    }
    let table = RayMapTable::induced_by(&l, sources.iter(), &tol).unwrap();
    let report = check_orthogonality_preserving(&table, &tol);
    assert!(report.pass, "{:?}", report.violations);
}

#[test]
fn sampled_line_images_stay_in_the_image_carrier() {
    let tol = Tolerance::default();
    let mut rng = seeded(6);
    let u = Isometry::random(5, OperatorClass::Linear, &mut rng);
    let line = line_through(&random_ray(5, &mut rng), &random_ray(5, &mut rng), &tol).unwrap();
    let image = u.apply_subspace(line.carrier());
    for r in sample_line(&line, 9, 7).unwrap() {
        assert!(image.contains(&u.apply_ray(&r).as_subspace(), &tol));
    }
}

#[test]
fn rank_three_line_image_fails_lineation() {
    let tol = Tolerance::default();
    let lines = random_line_family(4, 1, 3, &mut seeded(8)).unwrap();
    let mut table = tabulate_lines(4, &lines, &tol, |r| r.clone()).unwrap();
    for j in 0..3 {
        table.set_image(j, Ray::basis(4, j)).unwrap();
    }
    let report = check_lineation(&table, &lines, &tol).unwrap();
    assert!(!report.pass);
    assert_eq!(report.violations[0].indices, vec![0]);
}
