//! Single-operation subcommands. Each reads one JSON document and returns
//! a result value plus the checks it performed.

use orlicz_kit::charges::{de_giorgi_signed, hewitt_yosida, jordan, Charge, ChargeSpec};
use orlicz_kit::conjugation::{conjugate, conjugate_1d, default_dual_grid, GridFunction};
use orlicz_kit::duality::{
    canonical_probes, decompose_functional, integral_conjugate, integral_subdifferential, interchange,
    reflexivity_linearity_check, FunctionalTriple, Integrand, InterchangeOptions, PointFunction,
};
use orlicz_kit::measure::Carrier;
use orlicz_kit::norms::{amemiya_norm, luxemburg_norm, modular, SampledFunction, SampledFunctionJson};
use orlicz_kit::orlicz::{delta2, IntegrandSpec, SampleGrid};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::report::Record;
use crate::CliError;

pub struct Outcome {
    pub result: Value,
    pub records: Vec<Record>,
}

fn outcome(result: Value) -> Outcome {
    Outcome {
        result,
        records: Vec::new(),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialise")
}

/// Parses `text` from `path`, reporting the line and column of any error.
pub fn parse<T: DeserializeOwned>(path: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn function(carrier: &Carrier, j: SampledFunctionJson) -> Result<SampledFunction, CliError> {
    Ok(SampledFunction::from_json(carrier.clone(), j)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormInput {
    carrier: Carrier,
    integrand: IntegrandSpec,
    function: SampledFunctionJson,
}

pub fn norm(path: &str, text: &str, tol: f64) -> Result<Outcome, CliError> {
    let input: NormInput = parse(path, text)?;
    let phi = input.integrand.build()?;
    let u = function(&input.carrier, input.function)?;
    let lux = luxemburg_norm(&phi, &u, tol)?;
    let ame = amemiya_norm(&phi, &u, tol)?;
    let mut o = outcome(json!({
        "luxemburg": to_value(&lux),
        "amemiya": to_value(&ame),
        "modular": to_value(&modular(&phi, &u)?),
    }));
    if let (Some(l), Some(a)) = (lux.value.finite(), ame.value.finite()) {
        let s = l.max(1.0);
        o.records.push(Record::new(
            "norm.sandwich",
            "Luxemburg and Amemiya norms agree within factor 2",
            ((a - l) / s).min((2.0 * l - a) / s),
            tol,
        ));
    }
    Ok(o)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConjugateInput {
    function: GridFunction,
    #[serde(default)]
    dual_axes: Option<Vec<Vec<f64>>>,
}

pub fn conjugate_grid(path: &str, text: &str) -> Result<Outcome, CliError> {
    let input: ConjugateInput = parse(path, text)?;
    let g = input.function;
    let table = match input.dual_axes {
        Some(axes) => conjugate(&g, &axes)?,
        None if g.dim() == 1 => conjugate_1d(&g, &default_dual_grid(&g, 2 * g.len().max(8))?)?,
        None => {
            return Err(CliError::Usage(
                "conjugates in two dimensions need explicit \"dual_axes\"".into(),
            ))
        }
    };
    Ok(outcome(to_value(&table)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecomposeInput {
    carrier: Carrier,
    charge: ChargeSpec,
    /// Reference measure for the de Giorgi split, on the same points.
    #[serde(default)]
    reference: Option<Carrier>,
}

fn charge_value(c: &Charge) -> Value {
    to_value(&c.report())
}

pub fn decompose(path: &str, text: &str, tol: f64) -> Result<Outcome, CliError> {
    let input: DecomposeInput = parse(path, text)?;
    let nu = Charge::from_spec(input.carrier.clone(), &input.charge)?;
    let j = jordan(&nu);
    let mut result = json!({
        "charge": charge_value(&nu),
        "jordan": {
            "positive": charge_value(&j.positive),
            "negative": charge_value(&j.negative),
            "total_variation": j.total_variation,
        },
    });
    let mut records = vec![Record::new(
        "decompose.jordan",
        "Jordan decomposition splits the total variation",
        -(j.positive.norm() + j.negative.norm() - nu.norm()).abs(),
        tol,
    )];
    if input.carrier.is_tail() {
        let hy = hewitt_yosida(&nu)?;
        result["hewitt_yosida"] = json!({
            "sigma_additive": charge_value(&hy.sigma_additive),
            "purely_finitely_additive": charge_value(&hy.purely_finitely_additive),
        });
        records.push(Record::new(
            "decompose.hewitt-yosida",
            "Hewitt–Yosida parts split the total variation",
            -(hy.sigma_additive.norm() + hy.purely_finitely_additive.norm() - nu.norm()).abs(),
            tol,
        ));
    }
    if let Some(mu) = input.reference {
        if input.carrier.is_tail() {
            return Err(CliError::Usage("de Giorgi decomposition needs a finite carrier".into()));
        }
        let g = de_giorgi_signed(&nu, &mu)?;
        let [a, d, s] = g.norms();
        result["de_giorgi"] = json!({
            "absolutely_continuous": charge_value(&g.absolutely_continuous),
            "diffuse": charge_value(&g.diffuse),
            "singular": charge_value(&g.singular),
            "density": g.density,
        });
        records.push(Record::new(
            "decompose.de-giorgi",
            "de Giorgi parts split the total variation",
            -(a + d + s - nu.norm()).abs(),
            tol,
        ));
    }
    Ok(Outcome { result, records })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegralInput {
    carrier: Carrier,
    dim: usize,
    functions: Vec<PointFunction>,
    #[serde(default)]
    axes: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    anchor: Option<Vec<f64>>,
    #[serde(default)]
    restarts: Option<usize>,
    #[serde(default)]
    u: Option<SampledFunctionJson>,
    #[serde(default)]
    v: Option<SampledFunctionJson>,
}

impl IntegralInput {
    fn integrand(&self) -> Result<Integrand, CliError> {
        Ok(Integrand::new(self.carrier.clone(), self.dim, self.functions.clone())?)
    }

    /// Search axes: given, or `[−4, 4]` at step 1/16 per coordinate.
    fn axes(&self) -> Vec<Vec<f64>> {
        self.axes
            .clone()
            .unwrap_or_else(|| vec![(0..=128).map(|k| -4.0 + k as f64 / 16.0).collect(); self.dim])
    }

    fn options(&self, seed: u64, tol: f64) -> InterchangeOptions {
        let d = InterchangeOptions::default();
        InterchangeOptions {
            seed,
            restarts: self.restarts.unwrap_or(d.restarts),
            anchor: self.anchor.clone(),
            tol,
        }
    }

    fn sampled(&self, which: &str, j: &Option<SampledFunctionJson>) -> Result<SampledFunction, CliError> {
        let j = j
            .clone()
            .ok_or_else(|| CliError::Usage(format!("input needs \"{which}\"")))?;
        function(&self.carrier, j)
    }
}

pub fn interchange_op(path: &str, text: &str, seed: u64, tol: f64) -> Result<Outcome, CliError> {
    let input: IntegralInput = parse(path, text)?;
    let f = input.integrand()?;
    let r = interchange(&f, &input.axes(), &input.options(seed, tol))?;
    let record = Record::flag(
        "interchange.identity",
        "infimum of an integral functional equals the integral of pointwise infima",
        r.agree || !r.hypothesis_holds,
        tol,
    );
    Ok(Outcome {
        result: to_value(&r),
        records: vec![record],
    })
}

pub fn conjugate_integral(path: &str, text: &str, seed: u64, tol: f64) -> Result<Outcome, CliError> {
    let input: IntegralInput = parse(path, text)?;
    let f = input.integrand()?;
    let v = input.sampled("v", &input.v)?;
    let r = integral_conjugate(&f, &v, &input.axes(), &input.options(seed, tol))?;
    let record = Record::flag(
        "conjugate-integral.identity",
        "conjugate of an integral functional is the integral of conjugates",
        r.agree,
        tol,
    );
    Ok(Outcome {
        result: to_value(&r),
        records: vec![record],
    })
}

pub fn subdiff(path: &str, text: &str, tol: f64) -> Result<Outcome, CliError> {
    let input: IntegralInput = parse(path, text)?;
    let f = input.integrand()?;
    let u = input.sampled("u", &input.u)?;
    let v = input.sampled("v", &input.v)?;
    let r = integral_subdifferential(&f, &u, &v, tol)?;
    let record = Record::flag(
        "subdiff.representation",
        "subdifferential of an integral functional is taken pointwise",
        r.agree,
        tol,
    );
    Ok(Outcome {
        result: to_value(&r),
        records: vec![record],
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionalInput {
    carrier: Carrier,
    dim: usize,
    functional: FunctionalTriple,
}

pub fn decompose_functional_op(path: &str, text: &str, tol: f64) -> Result<Outcome, CliError> {
    let input: FunctionalInput = parse(path, text)?;
    input.functional.validate(&input.carrier, input.dim)?;
    let t = &input.functional;
    let d = decompose_functional(
        |u| t.apply(u),
        &input.carrier,
        input.dim,
        &canonical_probes(&input.carrier, input.dim),
    )?;
    let records = vec![
        Record::flag(
            "functional.recovery",
            "unique three-part decomposition of a functional",
            d.triple == *t,
            tol,
        ),
        Record::new(
            "functional.norms",
            "norm of a functional is the sum of its parts' norms",
            -(d.norms.total - d.norms.attained).abs() / d.norms.total.max(1.0),
            tol,
        ),
    ];
    Ok(Outcome {
        result: to_value(&d),
        records,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegrandInput {
    carrier: Carrier,
    integrand: IntegrandSpec,
    #[serde(default)]
    bound: Option<f64>,
}

const DELTA2_BOUND: f64 = 1e3;

pub fn reflexivity(path: &str, text: &str, seed: u64, tol: f64) -> Result<Outcome, CliError> {
    let input: IntegrandInput = parse(path, text)?;
    let phi = input.integrand.build()?;
    let grid = SampleGrid::standard(phi.dim());
    let r = reflexivity_linearity_check(&phi, &input.carrier, &grid, input.bound.unwrap_or(DELTA2_BOUND), seed)?;
    let record = Record::flag("reflexivity.implication", "Δ₂ implies a linear domain", r.consistent, tol);
    Ok(Outcome {
        result: to_value(&r),
        records: vec![record],
    })
}

pub fn delta2_op(path: &str, text: &str) -> Result<Outcome, CliError> {
    let input: IntegrandInput = parse(path, text)?;
    let phi = input.integrand.build()?;
    let grid = SampleGrid::standard(phi.dim());
    let cert = delta2(&phi, &input.carrier, &grid, input.bound.unwrap_or(DELTA2_BOUND))?;
    Ok(outcome(to_value(&cert)))
}
