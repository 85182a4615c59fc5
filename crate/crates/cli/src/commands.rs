//! One function per command. Each writes its artifact and returns whether
//! the run passed; only `verify` can return `false`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use zslab_core::abelian::{asymptotic_hamiltonians, default_asymptotic_samples, AsymptoticFit};
use zslab_core::discriminant::{sweep, DiscriminantSample};
use zslab_core::flows::{conservation_report, evolve, Conserved, Drift};
use zslab_core::hierarchy::eval_hamiltonian;
use zslab_core::verify::{self, VerifyConfig};
use zslab_core::{
    hill_spectrum, zs_spectrum, ActionRecord, Complex64, Contour, FlowSpec, GridFunction, HamiltonianId,
    HillCurve, HillSystem, LinearSystem, Potential, PotentialFile, SpectralCurve, State, TransferConfig,
    ZsCurve, ZsSystem,
};

use crate::config::{Command, Operator, RunConfig};
use crate::CliError;

pub fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    match cfg.command {
        Command::Discriminant => discriminant(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Actions => actions(cfg),
        Command::Hamiltonians => hamiltonians(cfg),
        Command::Flow => flow(cfg),
        Command::Verify => run_verify(cfg),
    }
    .map(|()| true)
    .or_else(|e| match e {
        VerifyFailed => Ok(false),
        Other(e) => Err(e),
    })
}

enum Outcome {
    VerifyFailed,
    Other(CliError),
}
use Outcome::{Other, VerifyFailed};

impl<E: Into<CliError>> From<E> for Outcome {
    fn from(e: E) -> Self {
        Other(e.into())
    }
}

type Step = Result<(), Outcome>;

fn load_potential(cfg: &RunConfig) -> Result<Potential, CliError> {
    let path = cfg.input.as_ref().expect("validated");
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut file: PotentialFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: malformed potential JSON: {e}", path.display())))?;
    if cfg.n_modes.is_some() {
        file.n_modes = cfg.n_modes;
    }
    file.build()
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn diagonal_component(phi: &Potential, what: &str) -> Result<GridFunction, CliError> {
    if !phi.class_tag().is_diagonal() {
        return Err(CliError::Usage(format!(
            "{what} needs a diagonal potential (u, u), got class {}",
            phi.class_tag()
        )));
    }
    Ok(phi.minus().clone())
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.output {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                // A closed pipe (e.g. `| head`) is not an error.
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::io(std::path::Path::new("<stdout>"), e))
                }
                _ => Ok(()),
            }
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialisable")
}

fn csv_error(path: &std::path::Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e))
}

fn write_csv(cfg: &RunConfig, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let target = cfg.output.clone().unwrap_or_else(|| "<stdout>".into());
    w.write_record(header).map_err(|e| csv_error(&target, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| csv_error(&target, e))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io(&target, e.into_error()))?;
    emit(cfg, String::from_utf8(bytes).expect("ascii").trim_end())
}

fn discriminant(cfg: &RunConfig) -> Step {
    let phi = load_potential(cfg)?;
    let (lo, hi) = cfg.lambda_range;
    let points: Vec<Complex64> = (0..cfg.points)
        .map(|j| Complex64::new(lo + (hi - lo) * j as f64 / (cfg.points - 1) as f64, 0.0))
        .collect();
    let (axis, samples): (&str, Vec<DiscriminantSample>) = match cfg.operator {
        Operator::Zs => ("lambda", sweep(&ZsSystem::new(&phi), &points)?),
        Operator::Hill => {
            let u = diagonal_component(&phi, "the Hill discriminant")?;
            ("mu", sweep(&HillSystem::from_miura(&u, TransferConfig::default()), &points)?)
        }
    };
    let header: Vec<String> = [axis, "re_delta", "im_delta", "re_ddelta", "im_ddelta"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| {
            [s.lambda.re, s.value.re, s.value.im, s.dvalue.re, s.dvalue.im]
                .iter()
                .map(|x| x.to_string())
                .collect()
        })
        .collect();
    Ok(write_csv(cfg, &header, &rows)?)
}

fn spectrum(cfg: &RunConfig) -> Step {
    let phi = load_potential(cfg)?;
    let table = match cfg.operator {
        Operator::Zs => zs_spectrum(&phi, cfg.n_spec)?,
        Operator::Hill => hill_spectrum(&diagonal_component(&phi, "the Hill spectrum")?, cfg.n_spec)?,
    };
    Ok(emit(cfg, &table.to_json())?)
}

#[derive(Serialize)]
struct ActionsOut {
    operator: Operator,
    actions: Vec<ActionRecord>,
}

fn curve_actions<S: LinearSystem>(
    curve: &SpectralCurve<S>,
    gaps: impl Iterator<Item = i64>,
    levels: &[i64],
    nodes: Option<usize>,
) -> zslab_core::Result<Vec<ActionRecord>> {
    let mut out = Vec::new();
    for n in gaps {
        let contour = curve.contour(n)?;
        let contour = match nodes {
            Some(k) => Contour::new(contour.center, contour.radius, k),
            None => contour,
        };
        for &k in levels {
            out.push(curve.action_on(&contour, n, k)?);
        }
    }
    Ok(out)
}

fn actions(cfg: &RunConfig) -> Step {
    let phi = load_potential(cfg)?;
    let n = cfg.n_spec as i64;
    let tc = TransferConfig::default();
    let actions = match cfg.operator {
        Operator::Zs => curve_actions(&ZsCurve::zs(&phi, cfg.n_spec + 1, tc)?, -n..=n, &cfg.levels, cfg.nodes)?,
        Operator::Hill => {
            let u = diagonal_component(&phi, "mKdV actions")?;
            curve_actions(&HillCurve::hill(&u, cfg.n_spec + 1, tc)?, 1..=n, &cfg.levels, cfg.nodes)?
        }
    };
    Ok(emit(cfg, &to_json(&ActionsOut { operator: cfg.operator, actions }))?)
}

#[derive(Serialize)]
struct HamiltoniansOut {
    closed_form: BTreeMap<String, Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    asymptotic: Option<AsymptoticFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    asymptotic_error: Option<String>,
}

fn hamiltonians(cfg: &RunConfig) -> Step {
    let phi = load_potential(cfg)?;
    let pair = State::Pair(phi.clone());
    let diagonal = phi.class_tag().is_diagonal();
    let mut closed_form = BTreeMap::new();
    for id in HamiltonianId::all() {
        let value = match id.family {
            zslab_core::Family::S => eval_hamiltonian(id, &pair)?,
            zslab_core::Family::K if diagonal => eval_hamiltonian(id, &State::Scalar(phi.minus().clone()))?,
            zslab_core::Family::K => continue,
        };
        closed_form.insert(id.to_string(), value);
    }
    let (asymptotic, asymptotic_error) = if phi.class_tag().is_real_type() {
        let fit = asymptotic_hamiltonians(&phi, 4, &default_asymptotic_samples(), TransferConfig { oversample: 16 });
        match fit {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    let out = HamiltoniansOut {
        closed_form,
        asymptotic,
        asymptotic_error,
    };
    Ok(emit(cfg, &to_json(&out))?)
}

#[derive(Serialize)]
struct FlowOut {
    field: &'static str,
    t_end: f64,
    dt: f64,
    records: usize,
    warnings: Vec<String>,
    drift: Vec<Drift>,
}

fn flow(cfg: &RunConfig) -> Step {
    let phi = load_potential(cfg)?;
    let field = cfg.field.expect("validated");
    let state = if field.is_scalar() {
        State::Scalar(diagonal_component(&phi, field.name())?)
    } else {
        State::Pair(phi)
    };
    let traj = evolve(&state, &FlowSpec::new(field, cfg.t_end, cfg.dt))?;
    let conserved: Vec<Conserved> = if field.is_scalar() {
        vec![Conserved::Mean, Conserved::Hamiltonian(HamiltonianId::K1), Conserved::Hamiltonian(HamiltonianId::K2)]
    } else {
        [HamiltonianId::S1, HamiltonianId::S2, HamiltonianId::S3, HamiltonianId::S4]
            .into_iter()
            .map(Conserved::Hamiltonian)
            .collect()
    };
    let drift = conservation_report(&traj, &conserved)?;
    if let Some(path) = &cfg.trajectory {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        let components: Vec<&str> = if field.is_scalar() { vec!["u"] } else { vec!["minus", "plus"] };
        let len = 2 * traj.states[0].n_modes();
        let mut header = vec!["t".to_string()];
        for c in &components {
            for j in 0..len {
                header.push(format!("re_{c}_{j}"));
                header.push(format!("im_{c}_{j}"));
            }
        }
        w.write_record(&header).map_err(|e| csv_error(path, e))?;
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let mut row = vec![t.to_string()];
            let parts: Vec<&GridFunction> = match s {
                State::Scalar(u) => vec![u],
                State::Pair(p) => vec![p.minus(), p.plus()],
            };
            for f in parts {
                for z in f.values() {
                    row.push(z.re.to_string());
                    row.push(z.im.to_string());
                }
            }
            w.write_record(&row).map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    let out = FlowOut {
        field: field.name(),
        t_end: cfg.t_end,
        dt: cfg.dt,
        records: traj.times.len(),
        warnings: traj.warnings,
        drift,
    };
    Ok(emit(cfg, &to_json(&out))?)
}

fn run_verify(cfg: &RunConfig) -> Step {
    let vc = VerifyConfig {
        seed: cfg.seed,
        count: cfg.count,
        n_modes: cfg.n_modes.unwrap_or(zslab_core::grid::DEFAULT_N_MODES),
        tolerances: cfg.tolerances.clone(),
        flow_t_end: cfg.t_end,
        flow_dt: cfg.dt,
    };
    let report = verify::run(&vc);
    emit(cfg, &report.to_json())?;
    let total = report.all().count();
    let failures = report.failures();
    for f in &failures {
        eprintln!("{f}");
    }
    if !report.gates_passed {
        eprintln!("a gate failed; identity suites were not run");
    }
    eprintln!("{} of {total} checks pass", total - failures.len());
    if report.pass {
        Ok(())
    } else {
        Err(VerifyFailed)
    }
}
