//! One-shot battery of every geometric property the library claims, keyed by
//! anchor name.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use wignerkit::error::Result;
use wignerkit::grassmann::{
    clique_report, geodesic, grassmann_distance, principal_angles, CliqueKind,
};
use wignerkit::hilbert::{intersection_dim, sum, Ray, Subspace};
use wignerkit::isometry::{Isometry, OperatorClass};
use wignerkit::measure::{
    cabello_18, find_two_valued_measure, find_two_valued_measure_with_order, peres_33,
    verify_assignment, OrthoHypergraph, SearchStatus,
};
use wignerkit::projective::{
    check_lineation, check_nondegenerate, random_line_family, tabulate_lines, RayMapTable,
};
use wignerkit::reconstruct::{
    anchor_rays, check_conditions_ab, classify_and_reconstruct, descend_full, fit_from_anchors,
    verify_induced, ConstantOracle, DescentConfig, InducedOracle,
};
use wignerkit::sampling::{
    derive_seed, orthogonal_pair, pair_with_intersection, random_permutation, random_ray,
    random_ray_orthogonal_to, random_subspace, seeded, SeededRng,
};
use wignerkit::tolerance::Tolerance;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnchorResult {
    pub pass: bool,
    pub trials: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub dims: Vec<(usize, usize)>,
    pub fault_injected: bool,
    pub anchors: BTreeMap<String, AnchorResult>,
    pub pass: bool,
}

/// Parses `"5x2,7x3"`; each shape needs `2 <= k` and `2k < n`.
pub fn parse_dims(text: &str) -> std::result::Result<Vec<(usize, usize)>, String> {
    let dims = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (n, k) = s
                .split_once(['x', 'X'])
                .ok_or_else(|| format!("expected NxK, got {s:?}"))?;
            let n: usize = n.trim().parse().map_err(|_| format!("bad n in {s:?}"))?;
            let k: usize = k.trim().parse().map_err(|_| format!("bad k in {s:?}"))?;
            if k < 2 || 2 * k >= n {
                return Err(format!("{n}x{k} does not satisfy 2 <= k and 2k < n"));
            }
            Ok((n, k))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if dims.is_empty() {
        return Err("dims must list at least one NxK shape".into());
    }
    Ok(dims)
}

/// Records one trial; `Err` and `Ok(false)` both count as failures.
struct Tally {
    trials: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            trials: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, label: impl FnOnce() -> String, outcome: Result<bool>) {
        self.trials += 1;
        match outcome {
            Ok(true) => {}
            Ok(false) => self.failures.push(label()),
            Err(e) => self.failures.push(format!("{}: {e}", label())),
        }
    }

    fn finish(self) -> AnchorResult {
        AnchorResult {
            pass: self.failures.is_empty() && self.trials > 0,
            trials: self.trials,
            failures: self.failures,
        }
    }
}

fn class_of(i: usize) -> OperatorClass {
    if i.is_multiple_of(2) {
        OperatorClass::Linear
    } else {
        OperatorClass::ConjugateLinear
    }
}

/// Uniform in `[0, 1)` from the top 53 bits of a derived seed.
fn unit_interval(seed: u64) -> f64 {
    (seed >> 11) as f64 / (1u64 << 53) as f64
}

fn induced_table(
    l: &Isometry,
    extra: usize,
    rng: &mut SeededRng,
    tol: &Tolerance,
) -> Result<RayMapTable> {
    let n = l.dim();
    let mut sources = anchor_rays(n);
    sources.extend((0..extra).map(|_| random_ray(n, rng)));
    RayMapTable::induced_by(l, sources.iter(), tol)
}

/// Replaces image `idx` by a ray at angle `t` from it.
fn perturb(table: &mut RayMapTable, idx: usize, t: f64, rng: &mut SeededRng) -> Result<()> {
    let truth = table.pairs()[idx].1.clone();
    let away = random_ray_orthogonal_to(&truth.as_subspace(), rng)?;
    let v = truth.vector() * Complex64::new(t.cos(), 0.0)
        + away.vector() * Complex64::new(t.sin(), 0.0);
    table.set_image(idx, Ray::new(v)?)
}

fn clique_sizes(dims: &[(usize, usize)], seed: u64, tol: &Tolerance) -> AnchorResult {
    let mut rng = seeded(seed);
    let mut tally = Tally::new();
    for &(n, k) in dims {
        for (kind, anchor_dim) in [(CliqueKind::Star, k - 1), (CliqueKind::Top, k + 1)] {
            let anchor = random_subspace(n, anchor_dim, &mut rng);
            let pool_seed = derive_seed(seed, tally.trials as u64);
            let outcome = clique_report(kind, &anchor, 200, pool_seed, tol).map(|(_, r)| r.pass);
            tally.record(|| format!("{kind:?} clique in {n}x{k}"), outcome);
        }
    }
    tally.finish()
}

fn distance_formula(dims: &[(usize, usize)], seed: u64, tol: &Tolerance) -> AnchorResult {
    let mut rng = seeded(seed);
    let mut tally = Tally::new();
    for &(n, k) in dims {
        let meets: Vec<usize> = (0..=k).filter(|&j| 2 * k - j <= n).collect();
        for trial in 0..200 {
            let j = meets[trial % meets.len()];
            let outcome = (|| {
                let (x, y) = pair_with_intersection(n, k, j, &mut rng)?;
                let d = k - j;
                Ok(k - intersection_dim(&x, &y, tol)? == d
                    && sum(&x, &y, tol)?.dim() - k == d
                    && principal_angles(&x, &y)?.count_nonzero(tol) == d
                    && grassmann_distance(&x, &y, tol)? == d)
            })();
            tally.record(|| format!("{n}x{k} pair {trial} meeting in {j}"), outcome);
        }
    }
    tally.finish()
}

fn geodesic_compatibility(dims: &[(usize, usize)], seed: u64, tol: &Tolerance) -> AnchorResult {
    let mut rng = seeded(seed);
    let mut tally = Tally::new();
    for &(n, k) in dims {
        for trial in 0..50 {
            let outcome = (|| {
                let (x, y) = orthogonal_pair(n, k, &mut rng)?;
                let path = geodesic(&x, &y, tol)?;
                Ok(path.len() == k
                    && path.consecutive_adjacent(tol)?
                    && path.pairwise_compatible(tol)?)
            })();
            tally.record(|| format!("{n}x{k} orthogonal pair {trial}"), outcome);
        }
    }
    tally.finish()
}

fn lineation_nondegenerate(dims: &[(usize, usize)], seed: u64, tol: &Tolerance) -> AnchorResult {
    let mut rng = seeded(seed);
    let mut tally = Tally::new();
    for &(n, _) in dims {
        for i in 0..5 {
            let outcome = (|| {
                let l = Isometry::random(n, class_of(i), &mut rng);
                let lines = random_line_family(n, 10, 7, &mut rng)?;
                let table = tabulate_lines(n, &lines, tol, |r| l.apply_ray(r))?;
                Ok(check_lineation(&table, &lines, tol)?.pass
                    && check_nondegenerate(&table, &lines, tol)?.pass)
            })();
            tally.record(|| format!("induced map {i} on C^{n}"), outcome);
        }
        // Sending each line member to the nearer of the line's two basis rays
        // leaves two images per line, which must fail L2.
        let outcome = (|| {
            let lines = random_line_family(n, 10, 7, &mut rng)?;
            let mut table = RayMapTable::new(n)?;
            for sample in &lines {
                let [a, b] = sample.line.basis_rays();
                for r in &sample.members {
                    let image = if r.distance(&a) <= r.distance(&b) {
                        a.clone()
                    } else {
                        b.clone()
                    };
                    table.insert(r.clone(), image, tol)?;
                }
            }
            Ok(!check_nondegenerate(&table, &lines, tol)?.l2_pass)
        })();
        tally.record(
            || format!("two-image collapse on C^{n} not rejected"),
            outcome,
        );
    }
    tally.finish()
}

fn wigner_reconstruction(
    dims: &[(usize, usize)],
    seed: u64,
    fault: bool,
    tol: &Tolerance,
) -> AnchorResult {
    let mut rng = seeded(seed);
    let mut tally = Tally::new();
    for &(n, _) in dims {
        for i in 0..20 {
            let class = class_of(i);
            let corrupt = fault && tally.trials == 0;
            let outcome = (|| {
                let l = Isometry::random(n, class, &mut rng);
                let mut table = induced_table(&l, 10, &mut rng, tol)?;
                if corrupt {
                    let idx = table.len() - 1;
                    perturb(&mut table, idx, 0.1, &mut rng)?;
                }
                let r = classify_and_reconstruct(&table, tol)?;
                let probe = random_ray(n, &mut rng);
                Ok(r.class == class
                    && r.apply_ray(&probe).distance(&l.apply_ray(&probe)) < tol.eps_reconstruct)
            })();
            tally.record(|| format!("{class} isometry {i} on C^{n}"), outcome);
        }
    }
    tally.finish()
}

fn grassmann_descent(dims: &[(usize, usize)], seed: u64, tol: &Tolerance) -> AnchorResult {
    let mut rng = seeded(seed);
    let mut tally = Tally::new();
    for &(n, k) in dims {
        for i in 0..2 {
            let outcome = (|| {
                let l = Isometry::random(n, class_of(i), &mut rng);
                let f = InducedOracle::new(l.clone(), k)?;
                let config = DescentConfig {
                    seed: derive_seed(seed, (n * 100 + k * 10 + i) as u64),
                    ..DescentConfig::default()
                };
                let out = descend_full(&f, &config, tol)?;
                let probe = random_ray(n, &mut rng);
                let recovered = out.reconstruction.apply_ray(&probe);
                Ok(out.pass && recovered.distance(&l.apply_ray(&probe)) < tol.eps_reconstruct)
            })();
            tally.record(
                || format!("{} oracle on G_{k}(C^{n})", class_of(i)),
                outcome,
            );
        }
    }
    tally.finish()
}

fn conditions_ab(dims: &[(usize, usize)], seed: u64, tol: &Tolerance) -> AnchorResult {
    let mut rng = seeded(seed);
    let mut tally = Tally::new();
    for &(n, k) in dims {
        for i in 0..4 {
            let outcome = (|| {
                let f = InducedOracle::new(Isometry::random(n, class_of(i), &mut rng), k)?;
                let rep = check_conditions_ab(&f, 10, derive_seed(seed, i as u64), tol)?;
                Ok(rep.a_pass && rep.b_pass)
            })();
            tally.record(|| format!("induced oracle {i} on G_{k}(C^{n})"), outcome);
        }
        let constant = ConstantOracle::new(Subspace::coordinate(n, &(0..k).collect::<Vec<_>>()));
        let outcome = check_conditions_ab(&constant, 10, seed, tol).map(|rep| !rep.a_pass);
        tally.record(|| format!("constant map on G_{k}(C^{n}) passes A"), outcome);
    }
    tally.finish()
}

fn two_valued_measure(seed: u64, tol: &Tolerance) -> AnchorResult {
    let mut tally = Tally::new();
    for (name, h) in [
        ("33-ray set", peres_33(tol)),
        ("18-ray set", cabello_18(tol)),
    ] {
        let outcome = h.map(|h| {
            find_two_valued_measure(&h).status == SearchStatus::Unsat
                && (0..5).all(|s| {
                    let order = random_permutation(h.len(), &mut seeded(derive_seed(seed, s)));
                    find_two_valued_measure_with_order(&h, &order).status == SearchStatus::Unsat
                })
        });
        tally.record(|| format!("{name} admits a two-valued measure"), outcome);
    }
    let mut rng = seeded(seed);
    for d in 3..=6 {
        let outcome = (|| {
            let frame = random_subspace(d, d, &mut rng);
            let rays = frame
                .columns()
                .into_iter()
                .map(Ray::new)
                .collect::<Result<Vec<_>>>()?;
            let h = OrthoHypergraph::build(rays, d, tol)?;
            match find_two_valued_measure(&h).assignment {
                Some(m) => verify_assignment(&h, &m),
                None => Ok(false),
            }
        })();
        tally.record(|| format!("single context in C^{d}"), outcome);
    }
    tally.finish()
}

fn negative_detection(dims: &[(usize, usize)], seed: u64, tol: &Tolerance) -> AnchorResult {
    let mut rng = seeded(seed);
    let mut tally = Tally::new();
    for &(n, _) in dims {
        for i in 0..10 {
            let outcome = (|| {
                let l = Isometry::random(n, class_of(i), &mut rng);
                let mut table = induced_table(&l, 10, &mut rng, tol)?;
                let anchors = anchor_rays(n).len();
                let draw = derive_seed(seed, (n * 1000 + i) as u64);
                let idx = anchors + (draw as usize) % (table.len() - anchors);
                let t = 2e-3 + 0.498 * unit_interval(draw);
                perturb(&mut table, idx, t, &mut rng)?;
                let fit = fit_from_anchors(&table, tol)?;
                let rep = verify_induced(&table, &fit, tol);
                let named: Vec<usize> = rep
                    .violations
                    .iter()
                    .flat_map(|v| v.indices.iter().copied())
                    .collect();
                Ok(!rep.pass && named == [idx])
            })();
            tally.record(|| format!("perturbed table {i} on C^{n}"), outcome);
        }
    }
    tally.finish()
}

/// Runs every anchor on `dims`. With `inject_fault` one reconstruction table
/// is corrupted, so `wigner_reconstruction` alone should fail.
pub fn verify_suite(
    seed: u64,
    dims: &[(usize, usize)],
    inject_fault: bool,
    tol: &Tolerance,
) -> SuiteReport {
    let s = |tag: u64| derive_seed(seed, tag);
    let anchors: BTreeMap<String, AnchorResult> = [
        ("clique_sizes", clique_sizes(dims, s(1), tol)),
        ("distance_formula", distance_formula(dims, s(2), tol)),
        (
            "geodesic_compatibility",
            geodesic_compatibility(dims, s(3), tol),
        ),
        (
            "lineation_nondegenerate",
            lineation_nondegenerate(dims, s(4), tol),
        ),
        (
            "wigner_reconstruction",
            wigner_reconstruction(dims, s(5), inject_fault, tol),
        ),
        ("grassmann_descent", grassmann_descent(dims, s(6), tol)),
        ("conditions_ab", conditions_ab(dims, s(7), tol)),
        ("two_valued_measure", two_valued_measure(s(8), tol)),
        ("negative_detection", negative_detection(dims, s(9), tol)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let pass = anchors.values().all(|a| a.pass);
    SuiteReport {
        seed,
        dims: dims.to_vec(),
        fault_injected: inject_fault,
        anchors,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dims() {
        assert_eq!(parse_dims("5x2, 7X3").unwrap(), vec![(5, 2), (7, 3)]);
        assert!(parse_dims("").is_err());
        assert!(parse_dims(" , ").is_err());
        assert!(parse_dims("4x2").is_err());
        assert!(parse_dims("5x1").is_err());
        assert!(parse_dims("5by2").is_err());
    }

    #[test]
    fn unit_interval_stays_in_range() {
        for s in [0, 1, u64::MAX, 0xDEAD_BEEF] {
            let u = unit_interval(s);
            assert!((0.0..1.0).contains(&u));
        }
    }
}
