use gptkit::bell::{self, ProbTable222, TSIRELSON};
use gptkit::bloch::{self, BlochVector};
use gptkit::composite::{self, max_tensor, min_tensor};
use gptkit::distinguish::perfectly_distinguishable;
use gptkit::interference::{self, SlitExperiment};
use gptkit::linalg;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::{read_input, BlochOp, Cli, Command, Format, KindArg};

pub fn dispatch(cli: &Cli) -> CliResult<String> {
    let f = cli.format;
    match &cli.command {
        Command::Chsh { table } => chsh(&read_input(table)?, f),
        Command::Prbox { variant } => prbox(variant, f),
        Command::Tsirelson { iters } => tsirelson(cli.seed, *iters, f),
        Command::Distinguish { space, states } => {
            ensure_one_stdin(&[space, states])?;
            distinguish(&read_input(space)?, &read_input(states)?, f)
        }
        Command::Compose { a, b, kind, vertices } => {
            ensure_one_stdin(&[a, b])?;
            compose(&read_input(a)?, &read_input(b)?, *kind, *vertices, f)
        }
        Command::Sorkin { exp, blockers } => {
            let mut paths = vec![exp];
            paths.extend(blockers.iter());
            ensure_one_stdin(&paths)?;
            let blockers = blockers.as_deref().map(read_input).transpose()?;
            sorkin(&read_input(exp)?, blockers.as_deref(), f)
        }
        Command::Bloch { op, r, unitary, samples } => {
            let r = r.as_deref().map(parse_vector).transpose()?;
            let unitary = unitary.as_deref().map(read_input).transpose()?;
            bloch_cmd(*op, r, unitary.as_deref(), *samples, cli.seed, f)
        }
        Command::Nspolytope => nspolytope(f),
    }
}

fn ensure_one_stdin(paths: &[&String]) -> CliResult<()> {
    if paths.iter().filter(|p| p.as_str() == "-").count() > 1 {
        return Err(CliError::Input("only one input may be read from stdin".into()));
    }
    Ok(())
}

fn no_csv(cmd: &str) -> CliError {
    CliError::Input(format!("{cmd}: csv output is only available for correlator grids"))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn correlators_json(table: &ProbTable222) -> Value {
    let mut rows = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            rows.push(json!({"x": x, "y": y, "E": bell::expectation(table, x, y)}));
        }
    }
    Value::Array(rows)
}

fn correlators_text(table: &ProbTable222) -> String {
    let mut out = String::from("x y  E\n");
    for x in 0..2 {
        for y in 0..2 {
            out.push_str(&format!("{x} {y}  {}\n", bell::expectation(table, x, y)));
        }
    }
    out
}

fn chsh(input: &str, f: Format) -> CliResult<String> {
    let table = ProbTable222::parse(input)?;
    if f == Format::Csv {
        return Ok(table.correlators_csv());
    }
    let value = bell::chsh(&table);
    let ns = bell::is_nonsignalling(&table);
    let model = bell::classical_membership(&table)?;
    Ok(match f {
        Format::Json => pretty(&json!({
            "correlators": correlators_json(&table),
            "chsh": value,
            "classical": model.is_some(),
            "nonsignalling": ns,
            "model": model.map(|m| m.weights.to_vec()),
        })),
        _ => format!(
            "{}CHSH = {value}\nclassical: {}\nNS: {}\n",
            correlators_text(&table),
            yes_no(model.is_some()),
            yes_no(ns)
        ),
    })
}

fn parse_variant(v: &str) -> CliResult<(u8, u8, u8)> {
    let bits: Vec<u8> = v
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(()),
        })
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Input(format!("variant must be three bits, got {v:?}")))?;
    match bits.as_slice() {
        &[a, b, c] => Ok((a, b, c)),
        _ => Err(CliError::Input(format!("variant must be three bits, got {v:?}"))),
    }
}

fn prbox(variant: &str, f: Format) -> CliResult<String> {
    let (a, b, c) = parse_variant(variant)?;
    let table = bell::pr_box(a, b, c);
    Ok(match f {
        Format::Json => {
            let mut s = table.to_json();
            s.push('\n');
            s
        }
        Format::Csv => table.correlators_csv(),
        Format::Text => table.to_text(),
    })
}

fn tsirelson(seed: u64, iters: usize, f: Format) -> CliResult<String> {
    if iters == 0 {
        return Err(CliError::Input("iters must be positive".into()));
    }
    let res = bell::maximize_chsh_quantum(seed, iters);
    let table = bell::quantum_table(&res.setup)?;
    let norm = bell::chsh_operator_norm(&res.setup);
    Ok(match f {
        Format::Json => pretty(&json!({
            "seed": seed,
            "iters": iters,
            "value": res.value,
            "operator_norm": norm,
            "bound": TSIRELSON,
            "correlators": correlators_json(&table),
        })),
        Format::Csv => table.correlators_csv(),
        Format::Text => format!(
            "CHSH = {:.12}\noperator norm = {norm:.12}\nTsirelson bound = {TSIRELSON:.12}\n",
            res.value
        ),
    })
}

fn parse_states(text: &str) -> CliResult<Vec<Vec<f64>>> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("states: {e}")))?;
    let list = value.get("states").cloned().unwrap_or(value);
    serde_json::from_value(list).map_err(|e| {
        CliError::Input(format!("states must be a list of coordinate vectors: {e}"))
    })
}

fn distinguish(space_text: &str, states_text: &str, f: Format) -> CliResult<String> {
    if f == Format::Csv {
        return Err(no_csv("distinguish"));
    }
    let space = composite::load_space_json(space_text)?;
    let states = parse_states(states_text)?;
    let witness = perfectly_distinguishable(&space, &states)?;
    Ok(match (f, witness) {
        (Format::Json, Some(w)) => pretty(&json!({
            "distinguishable": true,
            "effects": w.measurement.effects().iter().map(|e| e.coeffs().to_vec()).collect::<Vec<_>>(),
            "max_deviation": w.max_deviation(),
        })),
        (Format::Json, None) => pretty(&json!({"distinguishable": false})),
        (_, Some(w)) => {
            let mut out = String::from("distinguishable: yes\n");
            for (i, e) in w.measurement.effects().iter().enumerate() {
                out.push_str(&format!("e{i} = {:?}\n", e.coeffs()));
            }
            out.push_str(&format!("max deviation = {:e}\n", w.max_deviation()));
            out
        }
        (_, None) => "none\n".to_string(),
    })
}

fn compose(a: &str, b: &str, kind: KindArg, vertices: bool, f: Format) -> CliResult<String> {
    if f == Format::Csv {
        return Err(no_csv("compose"));
    }
    let sa = composite::load_space_json(a)?;
    let sb = composite::load_space_json(b)?;
    let comp = match kind {
        KindArg::Min => min_tensor(&sa, &sb)?,
        KindArg::Max => max_tensor(&sa, &sb)?,
    };
    let vs = if vertices { Some(comp.enumerate_vertices()?) } else { None };
    Ok(match f {
        Format::Json => {
            let doc = serde_json::to_value(comp.to_json(vertices)).expect("composite serializes");
            pretty(&doc)
        }
        _ => {
            let mut out = format!(
                "kind: {}\nambient_dim: {}\nu = {:?}\n",
                match kind {
                    KindArg::Min => "min",
                    KindArg::Max => "max",
                },
                comp.ambient_dim(),
                comp.unit()
            );
            if kind == KindArg::Max {
                out.push_str(&format!("inequalities: {}\n", comp.inequalities().len()));
            }
            if let Some(vs) = vs {
                out.push_str(&format!("vertices: {}\n", vs.len()));
                for v in vs {
                    out.push_str(&format!("{v:?}\n"));
                }
            }
            out
        }
    })
}

fn sorkin(exp_text: &str, blockers: Option<&str>, f: Format) -> CliResult<String> {
    if f == Format::Csv {
        return Err(no_csv("sorkin"));
    }
    let exp = SlitExperiment::from_json(exp_text)?;
    let mut report = serde_json::Map::new();
    report.insert("M".into(), json!(exp.slits()));
    let mut lines = Vec::new();
    if exp.slits() == 2 {
        let i2 = interference::sorkin_i2(&exp)?;
        report.insert("I2".into(), json!(i2));
        lines.push(format!("I2 = {i2:e}"));
        if blockers.is_some() {
            return Err(CliError::Input("blockers apply to three-slit experiments only".into()));
        }
    } else {
        let i3 = interference::sorkin_i3(&exp)?;
        let residual = interference::decomposition_residual(exp.rho())?
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        report.insert("I3".into(), json!(i3));
        report.insert("decomposition_residual".into(), json!(residual));
        lines.push(format!("I3 = {i3:e}"));
        lines.push(format!("decomposition residual = {residual:e}"));
        if let Some(text) = blockers {
            let maps = interference::blockers_from_json(text)?;
            let blocked = interference::sorkin_i3_with_blockers(exp.rho(), &maps, exp.detector())?;
            report.insert("I3_blocked".into(), json!(blocked));
            lines.push(format!("I3 with blockers = {blocked:e}"));
        }
    }
    Ok(match f {
        Format::Json => pretty(&Value::Object(report)),
        _ => lines.join("\n") + "\n",
    })
}

fn parse_vector(s: &str) -> CliResult<BlochVector> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Input(format!("cannot parse Bloch vector {s:?}")))?;
    match parts.as_slice() {
        &[x, y, z] => Ok(BlochVector::new(x, y, z)),
        _ => Err(CliError::Input(format!("Bloch vector needs three components, got {s:?}"))),
    }
}

fn vec3(r: &BlochVector) -> Vec<f64> {
    r.as_vector().iter().copied().collect()
}

fn random_bloch(rng: &mut ChaCha8Rng) -> BlochVector {
    use rand::Rng;
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let b = BlochVector::new(v[0], v[1], v[2]);
        if b.norm() <= 1.0 {
            return b;
        }
    }
}

fn bloch_cmd(
    op: BlochOp,
    r: Option<BlochVector>,
    unitary: Option<&str>,
    samples: usize,
    seed: u64,
    f: Format,
) -> CliResult<String> {
    if f == Format::Csv {
        return Err(no_csv("bloch"));
    }
    let report = match op {
        BlochOp::Roundtrip => match r {
            Some(r) => {
                let rho = bloch::bloch_to_density(&r)?;
                let back = bloch::density_to_bloch(&rho)?;
                json!({
                    "r": vec3(&r),
                    "rho": interference::matrix_to_grid(&rho),
                    "eigenvalues": linalg::hermitian_eigenvalues(&rho),
                    "back": vec3(&back),
                    "error": (back.as_vector() - r.as_vector()).amax(),
                })
            }
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (mut rt, mut eig) = (0.0f64, 0.0f64);
                for _ in 0..samples {
                    let r = random_bloch(&mut rng);
                    let rho = bloch::bloch_to_density(&r)?;
                    let back = bloch::density_to_bloch(&rho)?;
                    rt = rt.max((back.as_vector() - r.as_vector()).amax());
                    let ev = linalg::hermitian_eigenvalues(&rho);
                    eig = eig
                        .max((ev[0] - 0.5 * (1.0 - r.norm())).abs())
                        .max((ev[1] - 0.5 * (1.0 + r.norm())).abs());
                }
                json!({"samples": samples, "seed": seed, "max_roundtrip_error": rt, "max_eigenvalue_error": eig})
            }
        },
        BlochOp::Rotation => match unitary {
            Some(text) => {
                let grid: interference::Grid = serde_json::from_str(text)
                    .map_err(|e| CliError::Input(format!("unitary: {e}")))?;
                let u = interference::grid_to_matrix(&grid)?;
                let rot = bloch::unitary_to_rotation(&u)?;
                let rows: Vec<Vec<f64>> =
                    (0..3).map(|i| (0..3).map(|j| rot[(i, j)]).collect()).collect();
                json!({"rotation": rows, "det": rot.determinant()})
            }
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (mut hom, mut tw, mut det) = (0.0f64, 0.0f64, 0.0f64);
                for _ in 0..samples {
                    let u = bloch::haar_unitary(&mut rng);
                    let v = bloch::haar_unitary(&mut rng);
                    let ru = bloch::unitary_to_rotation(&u)?;
                    let rv = bloch::unitary_to_rotation(&v)?;
                    let ruv = bloch::unitary_to_rotation(&(&u * &v))?;
                    hom = hom.max((ruv - ru * rv).amax());
                    det = det.max((ru.determinant() - 1.0).abs());
                    let r = random_bloch(&mut rng);
                    let moved = bloch::density_to_bloch(&(&u * bloch::bloch_to_density(&r)? * u.adjoint()))?;
                    tw = tw.max((moved.as_vector() - ru * r.as_vector()).amax());
                }
                json!({
                    "samples": samples,
                    "seed": seed,
                    "max_homomorphism_error": hom,
                    "max_intertwining_error": tw,
                    "max_det_error": det,
                })
            }
        },
        BlochOp::Average => {
            if samples == 0 {
                return Err(gptkit::Error::TooFewSamples { min: 1, got: 0 }.into());
            }
            let omega = r.unwrap_or(BlochVector::new(0.0, 0.0, 1.0));
            if !omega.is_state() {
                return Err(gptkit::Error::NotAState.into());
            }
            let rotations = bloch::haar_rotations(samples, seed);
            let avg = bloch::group_average_state(&rotations, &omega)?;
            json!({"samples": samples, "seed": seed, "r": vec3(&omega), "average": vec3(&avg), "norm": avg.norm()})
        }
    };
    Ok(match f {
        Format::Json => pretty(&report),
        _ => text_lines(&report),
    })
}

/// `key = value` lines for a flat JSON object.
fn text_lines(v: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = v {
        for (k, val) in map {
            out.push_str(&format!("{k} = {val}\n"));
        }
    }
    out
}

fn nspolytope(f: Format) -> CliResult<String> {
    if f == Format::Csv {
        return Err(no_csv("nspolytope"));
    }
    let report = bell::ns_polytope()?;
    Ok(match f {
        Format::Json => pretty(&serde_json::to_value(&report).expect("report serializes")),
        _ => {
            let mut out = format!("{}\naffine dimension: {}\n", report.summary(), report.affine_dim);
            for (i, class) in report.classes.iter().enumerate() {
                let label = match class {
                    bell::VertexClass::Deterministic { index } => {
                        let (fa, gb) = bell::deterministic_strategy(*index);
                        format!("deterministic f = {fa:?} g = {gb:?}")
                    }
                    bell::VertexClass::PrBox { alpha, beta, gamma } => {
                        format!("PR box {alpha}{beta}{gamma}")
                    }
                    bell::VertexClass::Other => "other".to_string(),
                };
                out.push_str(&format!("{i:>2}  {label}\n"));
            }
            out
        }
    })
}
