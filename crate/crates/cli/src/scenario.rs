//! Scenario files: one TOML document describing a pole, a quadrature setup,
//! a time grid, and named observables and states.
//!
//! Shape checks (positive widths, `times.count ≥ 2`, …) run while the
//! document is deserialized, so their errors carry the TOML line. Name
//! references keep their spans for the same reason.

use std::collections::BTreeMap;
use std::ops::Range;

use gamow_core::sampling::ObservableClass;
use gamow_core::states::{self, Functional, ResonancePole};
use gamow_core::{
    make_bump, BasisTag, Complex64, DiagonalSymbol, KernelSymbol, KernelTerm, Observable,
    PolySymbol, QuadratureConfig, TauRep,
};
use serde::Deserialize;
use toml::Spanned;

use crate::CliError;

/// Name of the built-in Gamow functional of the scenario pole.
pub const GAMOW: &str = "gamow";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub seed: u64,
    #[serde(deserialize_with = "pole")]
    pub pole: ResonancePole,
    #[serde(default, deserialize_with = "quadrature")]
    pub quadrature: QuadratureConfig,
    pub times: TimeGrid,
    #[serde(default)]
    pub decay: Option<DecaySection>,
    #[serde(default)]
    pub moments: Option<MomentsSection>,
    #[serde(default)]
    pub audit: Option<AuditSection>,
    #[serde(default)]
    pub observables: Vec<ObservableSpec>,
    #[serde(default)]
    pub states: Vec<StateSpec>,
}

fn pole<'de, D: serde::Deserializer<'de>>(d: D) -> Result<ResonancePole, D::Error> {
    let p = ResonancePole::deserialize(d)?;
    p.validate().map_err(serde::de::Error::custom)?;
    Ok(p)
}

fn quadrature<'de, D: serde::Deserializer<'de>>(d: D) -> Result<QuadratureConfig, D::Error> {
    let q = QuadratureConfig::deserialize(d)?;
    q.validate().map_err(serde::de::Error::custom)?;
    Ok(q)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    /// Spanned so a bad count is reported on its own line.
    pub count: Spanned<usize>,
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        gamow_core::dynamics::linspace(self.start, self.stop, *self.count.get_ref())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySection {
    pub observable: Spanned<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsSection {
    pub reference_state: Spanned<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSection {
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub runs: Vec<AuditRun>,
}

fn default_samples() -> usize {
    1000
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditRun {
    pub state: Spanned<String>,
    pub class: ObservableClass,
}

/// `[re, im]`, or a bare real number.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexSpec> for Complex64 {
    fn from(c: ComplexSpec) -> Self {
        match c {
            ComplexSpec::Real(re) => Complex64::new(re, 0.0),
            ComplexSpec::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// A mollifier bump in τ, moved to `energy`.
#[derive(Clone, Debug, Deserialize)]
#[serde(try_from = "RawBump")]
pub struct BumpSpec(pub TauRep);

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBump {
    center: f64,
    half_width: f64,
    grid_points: usize,
    #[serde(default)]
    energy: f64,
}

impl TryFrom<RawBump> for BumpSpec {
    type Error = String;

    fn try_from(r: RawBump) -> Result<Self, String> {
        let rep = make_bump(r.center, r.half_width, r.grid_points).map_err(|e| e.to_string())?;
        Ok(Self(rep.shift_energy(r.energy)))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZPartSpec {
    #[serde(default = "one")]
    pub coeff: ComplexSpec,
    pub bump: BumpSpec,
}

fn one() -> ComplexSpec {
    ComplexSpec::Real(1.0)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    #[serde(default = "one")]
    pub coeff: ComplexSpec,
    pub left: BumpSpec,
    pub right: BumpSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub name: Spanned<String>,
    #[serde(default)]
    pub tag: BasisTag,
    /// Coefficients of `E⁰, E¹, …`.
    #[serde(default, deserialize_with = "poly")]
    pub poly: PolySymbol,
    #[serde(default)]
    pub zpart: Option<ZPartSpec>,
    #[serde(default)]
    pub kernel: Vec<KernelSpec>,
}

fn poly<'de, D: serde::Deserializer<'de>>(d: D) -> Result<PolySymbol, D::Error> {
    let coeffs = Vec::<ComplexSpec>::deserialize(d)?;
    let p = PolySymbol::new(coeffs.into_iter().map(Complex64::from).collect());
    if p.degree() > gamow_core::zrep::MAX_POLY_DEGREE {
        return Err(serde::de::Error::custom(format!(
            "polynomial degree {} exceeds {}",
            p.degree(),
            gamow_core::zrep::MAX_POLY_DEGREE
        )));
    }
    Ok(p)
}

impl ObservableSpec {
    pub fn build(&self) -> Observable {
        let zpart = match &self.zpart {
            Some(z) => z.bump.0.scale(z.coeff.into()),
            None => TauRep::zero(),
        };
        let terms = self
            .kernel
            .iter()
            .map(|k| KernelTerm::new(k.coeff.into(), k.left.0.clone(), k.right.0.clone()))
            .collect();
        Observable::new(
            self.tag,
            DiagonalSymbol {
                poly: self.poly.clone(),
                zpart,
            },
            KernelSymbol::new(terms),
        )
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureEntry {
    pub weight: f64,
    pub packet: BumpSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// Needs `packet`.
    Pure,
    /// Needs `entries`.
    Mixture,
    /// Needs `e`.
    DeltaDiag,
    /// Needs `e` and `e_prime`.
    DeltaKernel,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub name: Spanned<String>,
    pub kind: StateKind,
    #[serde(default)]
    pub tag: BasisTag,
    #[serde(default)]
    pub packet: Option<BumpSpec>,
    #[serde(default)]
    pub entries: Option<Vec<MixtureEntry>>,
    #[serde(default)]
    pub e: Option<f64>,
    #[serde(default)]
    pub e_prime: Option<f64>,
}

impl StateSpec {
    fn build(&self, cfg: &QuadratureConfig) -> Result<Functional, String> {
        fn need<T>(v: Option<T>, key: &str, kind: &str) -> Result<T, String> {
            v.ok_or_else(|| format!("a {kind} state needs '{key}'"))
        }
        let built = match self.kind {
            StateKind::Pure => states::pure_state(
                &need(self.packet.as_ref(), "packet", "pure")?.0,
                self.tag,
                cfg,
            ),
            StateKind::Mixture => {
                let entries = need(self.entries.as_ref(), "entries", "mixture")?;
                let list: Vec<(f64, TauRep)> = entries
                    .iter()
                    .map(|e| (e.weight, e.packet.0.clone()))
                    .collect();
                states::mixture(&list, self.tag, cfg)
            }
            StateKind::DeltaDiag => states::delta_diag(need(self.e, "e", "delta_diag")?, self.tag),
            StateKind::DeltaKernel => states::delta_kernel(
                need(self.e, "e", "delta_kernel")?,
                need(self.e_prime, "e_prime", "delta_kernel")?,
                self.tag,
            ),
        };
        built.map_err(|e| e.to_string())
    }
}

/// A scenario with every name resolved to a built value.
#[derive(Debug)]
pub struct Resolved {
    pub scenario: Scenario,
    source: String,
    observables: BTreeMap<String, Observable>,
    states: BTreeMap<String, Functional>,
}

/// 1-based line of a byte offset.
pub fn line_of(source: &str, span: &Range<usize>) -> usize {
    source[..span.start.min(source.len())].matches('\n').count() + 1
}

impl Resolved {
    pub fn parse(source: &str) -> Result<Self, CliError> {
        let scenario: Scenario =
            toml::from_str(source).map_err(|e| CliError::Config(e.to_string()))?;
        let cfg = scenario.quadrature;
        let config_err = |span: &Range<usize>, msg: String| {
            CliError::Config(format!("line {}: {msg}", line_of(source, span)))
        };

        let times = &scenario.times;
        if *times.count.get_ref() < 2 {
            return Err(config_err(
                &times.count.span(),
                format!(
                    "times.count must be at least 2, got {}",
                    times.count.get_ref()
                ),
            ));
        }
        if !(times.start.is_finite() && times.stop.is_finite()) {
            return Err(config_err(
                &times.count.span(),
                "times.start and times.stop must be finite".into(),
            ));
        }

        let mut observables = BTreeMap::new();
        for spec in &scenario.observables {
            let name = spec.name.get_ref();
            if builtin_observable(name).is_some() || observables.contains_key(name) {
                return Err(config_err(
                    &spec.name.span(),
                    format!("observable name '{name}' is already taken"),
                ));
            }
            observables.insert(name.clone(), spec.build());
        }

        let mut functionals = BTreeMap::new();
        for spec in &scenario.states {
            let name = spec.name.get_ref();
            if name == GAMOW || functionals.contains_key(name) {
                return Err(config_err(
                    &spec.name.span(),
                    format!("state name '{name}' is already taken"),
                ));
            }
            let built = spec
                .build(&cfg)
                .map_err(|e| config_err(&spec.name.span(), format!("state '{name}': {e}")))?;
            functionals.insert(name.clone(), built);
        }

        let resolved = Self {
            source: source.to_owned(),
            observables,
            states: functionals,
            scenario,
        };
        if let Some(d) = &resolved.scenario.decay {
            resolved.observable(&d.observable)?;
        }
        if let Some(m) = &resolved.scenario.moments {
            resolved.state(&m.reference_state)?;
        }
        if let Some(a) = &resolved.scenario.audit {
            for run in &a.runs {
                resolved.state(&run.state)?;
            }
        }
        Ok(resolved)
    }

    pub fn cfg(&self) -> &QuadratureConfig {
        &self.scenario.quadrature
    }

    fn unknown(&self, kind: &str, name: &Spanned<String>) -> CliError {
        CliError::Config(format!(
            "line {}: unknown {kind} '{}'",
            line_of(&self.source, &name.span()),
            name.get_ref()
        ))
    }

    pub fn observable(&self, name: &Spanned<String>) -> Result<Observable, CliError> {
        self.observable_by_name(name.get_ref())
            .ok_or_else(|| self.unknown("observable", name))
    }

    pub fn state(&self, name: &Spanned<String>) -> Result<Functional, CliError> {
        self.state_by_name(name.get_ref())?
            .ok_or_else(|| self.unknown("state", name))
    }

    /// Scenario observables plus `identity`, `H` and `H^n`.
    pub fn observable_by_name(&self, name: &str) -> Option<Observable> {
        builtin_observable(name).or_else(|| self.observables.get(name).cloned())
    }

    /// Scenario states plus `gamow`.
    pub fn state_by_name(&self, name: &str) -> Result<Option<Functional>, CliError> {
        if name == GAMOW {
            return Ok(Some(states::gamow(&self.scenario.pole)?));
        }
        Ok(self.states.get(name).cloned())
    }
}

fn builtin_observable(name: &str) -> Option<Observable> {
    match name {
        "identity" | "I" => Some(Observable::identity(BasisTag::In)),
        "H" => Observable::hamiltonian_power(1, BasisTag::In).ok(),
        _ => {
            let n: usize = name.strip_prefix("H^")?.parse().ok()?;
            Observable::hamiltonian_power(n, BasisTag::In).ok()
        }
    }
}
