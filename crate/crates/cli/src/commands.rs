use ek_core::eklerch::{kstar, kstar_regularized_at_1, EKQuery, EKResult};
use ek_core::padic::{padic_distribution_report, parse_rational, CMCurveModel};
use ek_core::report::{complex_json, VerificationReport};
use ek_core::verify::Verifier;
use ek_core::weierstrass::{self, build_context_with};
use ek_core::Lattice;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::config::{CliConfig, Output};
use crate::error::CliError;
use crate::{Check, EvalCommand, TableArgs, VerifyArgs};

/// Text for stdout and whether every check passed.
pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, pass: true }
    }
}

pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("expected re,im, got '{s}'"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re = re.trim().parse::<f64>().map_err(|_| bad())?;
    let im = im.trim().parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn render(v: &Value, output: Output) -> String {
    match output {
        Output::Json => format!("{}\n", serde_json::to_string_pretty(v).expect("JSON values serialize")),
        Output::Table => {
            let mut out = String::new();
            let rows = match v {
                Value::Array(items) => items.clone(),
                other => vec![other.clone()],
            };
            for row in rows {
                if let Value::Object(map) = row {
                    let cells: Vec<String> = map.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    out.push_str(&cells.join("  "));
                    out.push('\n');
                }
            }
            out
        }
    }
}

fn ek_result_json(r: &EKResult) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("value".into(), complex_json(r.value));
    m.insert("is_pole".into(), json!(r.is_pole));
    m.insert("pole_residue".into(), r.pole_residue.map_or(Value::Null, complex_json));
    m.insert("truncation_radius_used".into(), json!(r.truncation_radius_used));
    m.insert("estimated_error".into(), json!(r.estimated_error));
    m
}

pub fn eval(what: &EvalCommand, cfg: &CliConfig) -> Result<Outcome, CliError> {
    let lattice = cfg.lattice()?;
    let mut out = Map::new();
    match what {
        EvalCommand::Kstar { a, z0, w0, s } => {
            let (z0, w0, s) = (parse_complex(z0)?, parse_complex(w0)?, parse_complex(s)?);
            let r = kstar(&EKQuery::new(*a, z0, w0, s, &lattice), &cfg.precision)?;
            if r.is_pole {
                let residue = r.pole_residue.unwrap_or_default();
                return Err(CliError::Domain(format!(
                    "K*_0(z0, w0, s) has a simple pole at s = 1 for w0 in the lattice (residue 1/A = {}); \
                     use `ek eval kstar-regularized` for the regularized value",
                    residue.re
                )));
            }
            out.insert("function".into(), json!("kstar"));
            out.insert("a".into(), json!(a));
            out.insert("z0".into(), complex_json(z0));
            out.insert("w0".into(), complex_json(w0));
            out.insert("s".into(), complex_json(s));
            out.insert("lattice".into(), json!(cfg.lattice));
            out.extend(ek_result_json(&r));
        }
        EvalCommand::KstarRegularized => {
            let v = kstar_regularized_at_1(&lattice, &cfg.precision)?;
            out.insert("function".into(), json!("kstar-regularized"));
            out.insert("lattice".into(), json!(cfg.lattice));
            out.insert("area_param".into(), json!(lattice.area_param()));
            out.insert("value".into(), complex_json(v));
        }
        EvalCommand::Theta { z } | EvalCommand::Sigma { z } | EvalCommand::Wp { z } => {
            let z = parse_complex(z)?;
            let ctx = build_context_with(&lattice, &cfg.precision)?;
            let (name, value) = match what {
                EvalCommand::Theta { .. } => ("theta", weierstrass::theta(z, &ctx)),
                EvalCommand::Sigma { .. } => ("sigma", weierstrass::sigma(z, &ctx)),
                _ => ("wp", weierstrass::wp(z, &ctx)?),
            };
            out.insert("function".into(), json!(name));
            out.insert("z".into(), complex_json(z));
            out.insert("lattice".into(), json!(cfg.lattice));
            out.insert("value".into(), complex_json(value));
        }
    }
    Ok(Outcome::ok(render(&Value::Object(out), cfg.output)))
}

fn padic_report(args: &VerifyArgs) -> Result<VerificationReport, CliError> {
    let model = CMCurveModel::new(parse_rational(&args.g2)?, parse_rational(&args.g3)?, args.p)?;
    let shift = parse_rational(&args.constant_shift)?;
    Ok(padic_distribution_report(&model, args.p, args.big_n, args.big_m, &shift)?)
}

fn analytic_reports(args: &VerifyArgs, v: &Verifier) -> Result<Vec<VerificationReport>, CliError> {
    let z = args.z.as_deref().map(parse_complex).transpose()?;
    let w = args.w.as_deref().map(parse_complex).transpose()?;
    let mut out = Vec::new();
    match args.check {
        Check::FirstLimit => out.push(v.first_limit()?),
        Check::SecondLimit => match z {
            Some(z) => out.push(v.second_limit(z)?),
            None => {
                for z in v.random_points(args.count, &[1], 1) {
                    out.push(v.second_limit(z)?);
                }
            }
        },
        Check::Distribution => {
            let orders = args.n.map_or_else(|| vec![2, 3, 5], |n| vec![n]);
            for n in orders {
                out.push(v.distribution(n)?);
            }
        }
        Check::PropC => {
            out.push(v.prop_c()?);
            out.push(v.delta_relation());
        }
        Check::Kronecker => match (z, w) {
            (Some(z), Some(w)) => out.push(v.kronecker(z, w)?),
            (None, None) => {
                for (z, w) in v.random_pairs(args.count, 2) {
                    out.push(v.kronecker(z, w)?);
                }
            }
            _ => return Err(CliError::Usage("kronecker needs both --z and --w, or neither".into())),
        },
        Check::ThetaDist2 => {
            match z {
                Some(z) => out.push(v.theta_distribution_2(z)?),
                None => {
                    for z in v.random_points(args.count, &[2], 3) {
                        out.push(v.theta_distribution_2(z)?);
                    }
                }
            }
            out.push(v.theta_distribution_constant()?);
        }
        Check::All => out = v.standard_suite(args.count)?,
        Check::PadicDist => {}
    }
    Ok(out)
}

pub fn verify(args: &VerifyArgs, cfg: &CliConfig) -> Result<Outcome, CliError> {
    let reports = match args.check {
        Check::PadicDist => vec![padic_report(args)?],
        Check::All => {
            let v = Verifier::new(&cfg.lattice()?, &cfg.precision)?.with_seed(cfg.seed);
            // the p-adic check is independent; output order stays fixed
            let (analytic, padic) = std::thread::scope(|scope| {
                let padic = scope.spawn(|| padic_report(args));
                let analytic = analytic_reports(args, &v);
                (analytic, padic.join().expect("p-adic check thread panicked"))
            });
            let mut all = analytic?;
            all.push(padic?);
            all
        }
        _ => {
            let v = Verifier::new(&cfg.lattice()?, &cfg.precision)?.with_seed(cfg.seed);
            analytic_reports(args, &v)?
        }
    };
    let pass = reports.iter().all(|r| r.pass);
    let json = Value::Array(reports.iter().map(VerificationReport::to_json).collect());
    Ok(Outcome {
        text: render(&json, cfg.output),
        pass,
    })
}

/// `K*_0(0,0,s)` on `start, start + step, …, stop`; the regularized column is
/// `A K*_0(0,0,s) - 1/(s-1)`, continued to its limit at `s = 1`.
pub fn table(args: &TableArgs, cfg: &CliConfig) -> Result<Outcome, CliError> {
    if !(args.step > 0.0) || !args.start.is_finite() || !args.stop.is_finite() || args.stop < args.start {
        return Err(CliError::Usage("table needs finite --start <= --stop and --step > 0".into()));
    }
    let rows = ((args.stop - args.start) / args.step + 1e-9).floor() as usize + 1;
    if rows > 100_000 {
        return Err(CliError::Usage(format!("table grid too large ({rows} rows)")));
    }
    let lattice: Lattice = cfg.lattice()?;
    let area = lattice.area_param();
    let zero = Complex64::new(0.0, 0.0);
    let mut text = String::from("s,re,im,regularized\n");
    for k in 0..rows {
        // snap to 12 significant digits so grid points print as typed
        let s: f64 = format!("{:.12e}", args.start + k as f64 * args.step)
            .parse()
            .expect("formatted float parses");
        let r = kstar(&EKQuery::new(0, zero, zero, Complex64::new(s, 0.0), &lattice), &cfg.precision)?;
        if r.is_pole {
            let reg = kstar_regularized_at_1(&lattice, &cfg.precision)?;
            text.push_str(&format!("{s},pole,pole,{}\n", reg.re));
        } else {
            let reg = area * r.value.re - 1.0 / (s - 1.0);
            text.push_str(&format!("{s},{},{},{reg}\n", r.value.re, r.value.im));
        }
    }
    Ok(Outcome::ok(text))
}
