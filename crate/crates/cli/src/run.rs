use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use wignerkit::error::{Error, Result};
use wignerkit::format::{self, GeneratorJson, HypergraphJson, MatrixJson};
use wignerkit::grassmann::{
    angles_compatible, clique_report, commutator_norm, geodesic, grassmann_distance, is_adjacent,
    is_compatible, is_orthogonal, principal_angles,
};
use wignerkit::hilbert::{intersection_dim, sum, Subspace};
use wignerkit::measure::{find_two_valued_measure, verify_assignment, OrthoHypergraph};
use wignerkit::projective::{
    check_lineation, check_nondegenerate, check_orthogonality_preserving, lines_in_table,
    RayMapTable,
};
use wignerkit::reconstruct::{
    check_conditions_ab, classify_and_reconstruct, descend_full, fit_from_anchors, verify_induced,
    DescentConfig, InducedOracle,
};
use wignerkit::tolerance::Tolerance;

use crate::config::{Command, RunConfig, SubspacePair};
use crate::suite::{parse_dims, verify_suite};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Exit status plus the JSON report a command emits.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: u8,
    pub report: Value,
}

impl Outcome {
    /// Pretty-printed report with a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports are plain JSON");
        s.push('\n');
        s
    }
}

/// Command failure before a verdict: which exit status it maps to and the
/// error it carries.
struct Failure {
    code: u8,
    error: Error,
    /// Line and column of a JSON syntax error.
    location: Option<(usize, usize)>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = match error {
            Error::TableInconsistent { .. }
            | Error::NotInducedByIsometry(_)
            | Error::NotOrthogonalityPreserving(_)
            | Error::StarDescent(_)
            | Error::RankInstability(_)
            | Error::ToleranceBreakdown(_) => EXIT_CHECK_FAILED,
            _ => EXIT_USAGE,
        };
        let location = match &error {
            Error::Json(j) => Some((j.line(), j.column())),
            _ => None,
        };
        Failure {
            code,
            error,
            location,
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        error: Error::Precondition(msg.into()),
        location: None,
    }
}

type Verdict = std::result::Result<(bool, Value), Failure>;

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports are plain JSON")
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// Wraps parse errors with the file they came from; JSON syntax errors keep
/// their line and column.
fn in_file<T>(path: &Path, r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        if let Error::Json(j) = &f.error {
            f.error = Error::Format(format!("{}: {j}", path.display()));
        } else if f.code == EXIT_USAGE {
            f.error = Error::Format(format!("{}: {}", path.display(), f.error));
        }
        f
    })
}

fn load_subspace(path: &Path, tol: &Tolerance) -> std::result::Result<Subspace, Failure> {
    let text = read(path)?;
    let m: MatrixJson = in_file(path, format::parse(&text))?;
    in_file(path, m.to_subspace(tol))
}

fn load_pair(
    p: &SubspacePair,
    tol: &Tolerance,
) -> std::result::Result<(Subspace, Subspace), Failure> {
    Ok((load_subspace(&p.x, tol)?, load_subspace(&p.y, tol)?))
}

fn load_table(path: &Path, tol: &Tolerance) -> std::result::Result<RayMapTable, Failure> {
    let text = read(path)?;
    in_file(path, format::ray_table_from_json(&text, tol))
}

fn angles(p: &SubspacePair, tol: &Tolerance) -> Verdict {
    let (x, y) = load_pair(p, tol)?;
    let a = principal_angles(&x, &y)?;
    Ok((
        true,
        json!({
            "angles": a.angles(),
            "nonzero": a.count_nonzero(tol),
            "marginal": a.marginal(tol),
            "all_right": a.all_right(tol),
        }),
    ))
}

fn distance(p: &SubspacePair, tol: &Tolerance) -> Verdict {
    let (x, y) = load_pair(p, tol)?;
    Ok((
        true,
        json!({
            "distance": grassmann_distance(&x, &y, tol)?,
            "intersection_dim": intersection_dim(&x, &y, tol)?,
            "sum_dim": sum(&x, &y, tol)?.dim(),
        }),
    ))
}

fn path_between(p: &SubspacePair, tol: &Tolerance) -> Verdict {
    let (x, y) = load_pair(p, tol)?;
    let path = geodesic(&x, &y, tol)?;
    let nodes: Vec<MatrixJson> = path
        .nodes()
        .iter()
        .map(|s| MatrixJson::from_matrix(s.basis()))
        .collect();
    let adjacent = path.consecutive_adjacent(tol)?;
    Ok((
        adjacent,
        json!({
            "length": path.len(),
            "consecutive_adjacent": adjacent,
            "pairwise_compatible": path.pairwise_compatible(tol)?,
            "nodes": nodes,
        }),
    ))
}

fn compat(p: &SubspacePair, tol: &Tolerance) -> Verdict {
    let (x, y) = load_pair(p, tol)?;
    Ok((
        true,
        json!({
            "compatible": is_compatible(&x, &y, tol)?,
            "angles_compatible": angles_compatible(&x, &y, tol)?,
            "commutator_norm": commutator_norm(&x, &y)?,
            "adjacent": is_adjacent(&x, &y, tol)?,
            "orthogonal": is_orthogonal(&x, &y, tol)?,
        }),
    ))
}

fn reconstruct(table: &RayMapTable, tol: &Tolerance) -> Verdict {
    let ortho = check_orthogonality_preserving(table, tol);
    if !ortho.pass {
        return Ok((false, json!({ "orthogonality": ortho })));
    }
    match classify_and_reconstruct(table, tol) {
        Ok(r) => {
            let check = verify_induced(table, &r, tol);
            Ok((
                check.pass,
                json!({ "orthogonality": ortho, "reconstruction": r, "verification": check }),
            ))
        }
        Err(e @ Error::TableInconsistent { .. }) => {
            let fit = fit_from_anchors(table, tol)?;
            let check = verify_induced(table, &fit, tol);
            Ok((
                false,
                json!({ "orthogonality": ortho, "error": e.to_string(), "closest_fit": fit, "verification": check }),
            ))
        }
        Err(e) => Err(e.into()),
    }
}

fn descend(path: &Path, config: &RunConfig, tol: &Tolerance) -> Verdict {
    let text = read(path)?;
    let generator: GeneratorJson = in_file(path, format::parse(&text))?;
    let iso = in_file(path, generator.isometry(tol))?;
    let f = InducedOracle::new(iso, generator.k)?;
    let descent = DescentConfig {
        probes: config.probes,
        seed: config.seed,
        level_samples: config.samples.unwrap_or(20),
        ..DescentConfig::default()
    };
    let outcome = descend_full(&f, &descent, tol)?;
    let conditions = check_conditions_ab(&f, config.samples.unwrap_or(20), config.seed, tol)?;
    let class_matches = outcome.reconstruction.class == generator.class;
    let pass = outcome.pass && conditions.a_pass && conditions.b_pass && class_matches;
    Ok((
        pass,
        json!({ "descent": outcome, "conditions": conditions, "class_matches_generator": class_matches }),
    ))
}

fn ks_search(path: &Path, tol: &Tolerance) -> Verdict {
    let text = read(path)?;
    let file: HypergraphJson = in_file(path, format::parse(&text))?;
    let h = in_file(path, OrthoHypergraph::from_json(&file, tol))?;
    let report = find_two_valued_measure(&h);
    let mut value = to_value(&report);
    if let Some(m) = &report.assignment {
        value["verified"] = json!(verify_assignment(&h, m)?);
    }
    value["rays"] = json!(h.len());
    value["contexts"] = json!(h.contexts().len());
    value["edges"] = json!(h.edges().len());
    Ok((true, value))
}

fn dispatch(config: &RunConfig, tol: &Tolerance) -> Verdict {
    match &config.command {
        Command::Angles(p) => angles(p, tol),
        Command::Distance(p) => distance(p, tol),
        Command::Geodesic(p) => path_between(p, tol),
        Command::Compat(p) => compat(p, tol),
        Command::Clique { anchor, kind } => {
            let anchor = load_subspace(anchor, tol)?;
            let pool = config.samples.unwrap_or(200);
            let (members, rep) = clique_report((*kind).into(), &anchor, pool, config.seed, tol)?;
            let members: Vec<MatrixJson> = members
                .iter()
                .map(|s| MatrixJson::from_matrix(s.basis()))
                .collect();
            Ok((rep.pass, json!({ "report": rep, "members": members })))
        }
        Command::CheckOp { table } => {
            let rep = check_orthogonality_preserving(&load_table(table, tol)?, tol);
            Ok((rep.pass, to_value(rep)))
        }
        Command::CheckLineation { table, lines } => {
            let t = load_table(table, tol)?;
            let lines = match lines {
                Some(p) => {
                    let text = read(p)?;
                    in_file(p, format::lines_from_json(&text, tol))?
                }
                None => lines_in_table(&t, tol),
            };
            let lin = check_lineation(&t, &lines, tol)?;
            let nd = check_nondegenerate(&t, &lines, tol)?;
            Ok((
                lin.pass && nd.pass,
                json!({ "lines": lines.len(), "lineation": lin, "nondegenerate": nd }),
            ))
        }
        Command::Reconstruct { table } => reconstruct(&load_table(table, tol)?, tol),
        Command::Descend { generator } => descend(generator, config, tol),
        Command::KsSearch { rays } => ks_search(rays, tol),
        Command::VerifySuite { dims, inject_fault } => {
            let dims = parse_dims(dims).map_err(usage)?;
            let rep = verify_suite(config.seed, &dims, *inject_fault, tol);
            Ok((rep.pass, to_value(rep)))
        }
    }
}

/// Runs one command. Exit status 0 means success, 1 a failed check (the
/// report still carries the findings), 2 unusable input.
pub fn run(config: &RunConfig) -> Outcome {
    let tol = config.tolerance();
    let mut report = json!({
        "command": config.command.verb(),
        "seed": config.seed,
        "tolerances": tol,
    });
    let verdict = match tol.validate() {
        Ok(()) => dispatch(config, &tol),
        Err(e) => Err(e.into()),
    };
    let code = match verdict {
        Ok((pass, result)) => {
            report["pass"] = json!(pass);
            report["result"] = result;
            if pass {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(f) => {
            report["pass"] = json!(false);
            report["error"] = json!(f.error.to_string());
            if let Some((line, column)) = f.location {
                report["error_location"] = json!({ "line": line, "column": column });
            }
            f.code
        }
    };
    Outcome { code, report }
}
