use std::fmt::Write as _;
use std::fs;

use gamow_core::dynamics::decay_scan;
use gamow_core::sampling::ObservableClass;
use gamow_core::states::{pair, positivity_audit, AuditReport};
use gamow_core::{BasisTag, Observable};
use serde::Serialize;

use crate::scenario::{Resolved, GAMOW};
use crate::{CliError, Command, Common};

/// What a command produced and whether its checks passed.
#[derive(Debug)]
pub struct Outcome {
    pub output: String,
    pub passed: bool,
    /// One-line summary for stderr.
    pub summary: String,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Runs a parsed command and writes its output to `--out` or returns it.
pub fn run(command: &Command) -> Result<Outcome, CliError> {
    let (common, outcome) = match command {
        Command::Decay(c) => (c, decay(&load(c)?, c.tolerance)?),
        Command::Moments(c) => (c, moments(&load(c)?, c.tolerance)?),
        Command::Audit(c) => {
            let resolved = load(c)?;
            let seed = c.seed.unwrap_or(resolved.scenario.seed);
            (c, audit(&resolved, seed)?)
        }
        Command::Pair {
            common,
            state,
            observable,
        } => (common, pair_by_name(&load(common)?, state, observable)?),
    };
    if let Some(path) = &common.out {
        fs::write(path, &outcome.output)?;
    }
    Ok(outcome)
}

fn load(c: &Common) -> Result<Resolved, CliError> {
    let text = fs::read_to_string(&c.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", c.config.display())))?;
    Resolved::parse(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", c.config.display())),
        other => other,
    })
}

/// 17 significant digits, enough to round-trip an `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub const DECAY_HEADER: &str = "t,re_value,im_value,magnitude,closed_form_magnitude,abs_err";

pub fn decay(r: &Resolved, tolerance: f64) -> Result<Outcome, CliError> {
    let section = r
        .scenario
        .decay
        .as_ref()
        .ok_or_else(|| CliError::Config("the scenario has no [decay] section".into()))?;
    let o = r.observable(&section.observable)?;
    let times = r.scenario.times.points();
    let scan = decay_scan(&r.scenario.pole, &o, &times, r.cfg())?;

    let mut csv = String::from(DECAY_HEADER);
    csv.push('\n');
    for i in 0..scan.times.len() {
        let v = scan.values[i];
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            num(scan.times[i]),
            num(v.re),
            num(v.im),
            num(v.norm()),
            num(scan.closed_form[i].norm()),
            num(scan.abs_err[i])
        )
        .expect("writing to a String");
    }
    let worst = scan.max_scaled_err();
    Ok(Outcome {
        output: csv,
        passed: worst <= tolerance,
        summary: format!(
            "decay: {} times, Γ = {}, max error / (1 + |closed form|) = {worst:.3e} (tolerance {tolerance:.1e})",
            scan.times.len(),
            r.scenario.pole.gamma
        ),
    })
}

pub const MOMENTS_HEADER: &str = "functional,n,re_value,im_value,quadrature_error";

pub fn moments(r: &Resolved, tolerance: f64) -> Result<Outcome, CliError> {
    let mut names = vec![GAMOW.to_string()];
    if let Some(m) = &r.scenario.moments {
        r.state(&m.reference_state)?;
        names.push(m.reference_state.get_ref().clone());
    }
    let mut csv = String::from(MOMENTS_HEADER);
    csv.push('\n');
    let mut passed = true;
    for name in &names {
        let rho = r.state_by_name(name)?.expect("names were resolved");
        for n in 0..=5 {
            let h = Observable::hamiltonian_power(n, BasisTag::In)?.retag(rho.tag);
            let p = pair(&rho, &h, r.cfg())?;
            if name == GAMOW && p.value != gamow_core::Complex64::ZERO {
                passed = false;
            }
            if name != GAMOW
                && n == 0
                && rho.diag.point_masses.is_empty()
                && !rho.diag.density.is_empty()
            {
                // regular states are normalized
                passed &= (p.value - 1.0).norm() <= tolerance.max(1e-6);
            }
            writeln!(
                csv,
                "{name},{n},{},{},{}",
                num(p.value.re),
                num(p.value.im),
                num(p.quadrature_error)
            )
            .expect("writing to a String");
        }
    }
    Ok(Outcome {
        output: csv,
        passed,
        summary: format!(
            "moments: {}",
            if passed {
                "Gamow moments vanish"
            } else {
                "a moment check failed"
            }
        ),
    })
}

#[derive(Serialize)]
struct AuditEntry {
    state: String,
    /// Reported only; violations here do not fail the command.
    diagnostic: bool,
    report: AuditReport,
}

pub fn audit(r: &Resolved, seed: u64) -> Result<Outcome, CliError> {
    let section = r
        .scenario
        .audit
        .as_ref()
        .ok_or_else(|| CliError::Config("the scenario has no [audit] section".into()))?;
    let mut entries = Vec::new();
    let mut passed = true;
    for run in &section.runs {
        let rho = r.state(&run.state)?;
        let report = positivity_audit(&rho, section.samples, seed, run.class, r.cfg())?;
        // functionals without a diagonal part are not positive on general
        // observables; those runs are diagnostics
        let diagnostic = rho.diag.is_empty() && run.class == ObservableClass::Mixed;
        if !diagnostic && !report.passed() {
            passed = false;
        }
        entries.push(AuditEntry {
            state: run.state.get_ref().clone(),
            diagnostic,
            report,
        });
    }
    let mut json = serde_json::to_string_pretty(&serde_json::json!({ "runs": entries }))
        .expect("audit reports serialize");
    json.push('\n');
    let violations: usize = entries
        .iter()
        .filter(|e| !e.diagnostic)
        .map(|e| e.report.violations.len())
        .sum();
    Ok(Outcome {
        output: json,
        passed,
        summary: format!(
            "audit: {} runs, {violations} asserted violations",
            entries.len()
        ),
    })
}

pub const PAIR_HEADER: &str = "re_value,im_value,quadrature_error";

pub fn pair_by_name(r: &Resolved, state: &str, observable: &str) -> Result<Outcome, CliError> {
    let rho = r
        .state_by_name(state)?
        .ok_or_else(|| CliError::Config(format!("unknown state '{state}'")))?;
    let o = r
        .observable_by_name(observable)
        .ok_or_else(|| CliError::Config(format!("unknown observable '{observable}'")))?;
    // built-in observables carry the default tag; follow the state's
    let o = if r
        .scenario
        .observables
        .iter()
        .any(|s| s.name.get_ref() == observable)
    {
        o
    } else {
        o.retag(rho.tag)
    };
    let p = pair(&rho, &o, r.cfg())?;
    Ok(Outcome {
        output: format!(
            "{PAIR_HEADER}\n{},{},{}\n",
            num(p.value.re),
            num(p.value.im),
            num(p.quadrature_error)
        ),
        passed: true,
        summary: format!(
            "pair: ({state}|{observable}) = {} ± {:.1e}",
            p.value, p.quadrature_error
        ),
    })
}
