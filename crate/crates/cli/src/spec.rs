//! Parsers for the compact `kind:key=value,...` strings used on the command line.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use holderscope::estimate::Method;
use holderscope::sequences::{AdmissibleSequence, SequenceFamily};
use holderscope::signals::{SignalSpec, DEFAULT_WEIERSTRASS_TERMS};

use crate::error::{invalid, CliError, Result};

struct Params<'a> {
    spec: &'a str,
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Params<'a> {
    fn parse(spec: &'a str, body: &'a str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| invalid!("`{spec}`: expected key=value, got `{item}`"))?;
            if map.insert(k.trim(), v.trim()).is_some() {
                return Err(invalid!("`{spec}`: key `{k}` given twice"));
            }
        }
        Ok(Self { spec, map })
    }

    fn take(&mut self, key: &str) -> Option<&'a str> {
        self.map.remove(key)
    }

    fn num(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key).map(|v| number(self.spec, key, v)).transpose()
    }

    fn required(&mut self, key: &str) -> Result<f64> {
        self.num(key)?
            .ok_or_else(|| invalid!("`{}`: missing required key `{key}`", self.spec))
    }

    fn list(&mut self, key: &str) -> Result<Vec<f64>> {
        let raw = self
            .take(key)
            .ok_or_else(|| invalid!("`{}`: missing required key `{key}`", self.spec))?;
        raw.split(';').map(|v| number(self.spec, key, v.trim())).collect()
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(invalid!("`{}`: unknown key `{k}`", self.spec)),
            None => Ok(()),
        }
    }
}

fn number(spec: &str, key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| invalid!("`{spec}`: `{key}={v}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid!("`{spec}`: `{key}` must be finite"))
    }
}

fn split(spec: &str) -> (&str, &str) {
    spec.split_once(':').unwrap_or((spec, ""))
}

/// `cusp:alpha=0.5,x0=0.5`, `cusp_log:alpha=..,beta=..,x0=..`,
/// `weierstrass:a=..,b=..,terms=..`, `poly_plus_cusp:coeffs=1;2,alpha=..,x0=..`,
/// `polynomial:coeffs=..,x0=..`.
pub fn parse_generator(spec: &str, n: u32) -> Result<SignalSpec<f64>> {
    let (kind, body) = split(spec.trim());
    let mut p = Params::parse(spec, body)?;
    let center = |p: &mut Params| p.num("x0").map(|x| x.unwrap_or(0.5));
    let out = match kind {
        "cusp" => SignalSpec::cusp(p.required("alpha")?, center(&mut p)?, n),
        "cusp_log" => {
            let alpha = p.required("alpha")?;
            let beta = p.num("beta")?.unwrap_or(1.0);
            SignalSpec::cusp_log(alpha, beta, center(&mut p)?, n)
        }
        "weierstrass" => {
            let a = p.num("a")?.unwrap_or(std::f64::consts::FRAC_1_SQRT_2);
            let b = integer(spec, "b", p.num("b")?.unwrap_or(2.0))?;
            let terms = match p.num("terms")? {
                Some(t) => integer(spec, "terms", t)? as usize,
                None => DEFAULT_WEIERSTRASS_TERMS,
            };
            SignalSpec::weierstrass(a, b, terms, n)
        }
        "poly_plus_cusp" => {
            let coeffs = p.list("coeffs")?;
            let alpha = p.required("alpha")?;
            SignalSpec::poly_plus_cusp(coeffs, alpha, center(&mut p)?, n)
        }
        "polynomial" => {
            let coeffs = p.list("coeffs")?;
            SignalSpec::polynomial(coeffs, center(&mut p)?, n)
        }
        _ => {
            return Err(invalid!(
                "unknown generator `{kind}` (expected cusp, cusp_log, weierstrass, poly_plus_cusp or polynomial)"
            ))
        }
    };
    p.finish()?;
    out.validate()?;
    Ok(out)
}

fn integer(spec: &str, key: &str, x: f64) -> Result<u32> {
    if x.fract() == 0.0 && (0.0..=u32::MAX as f64).contains(&x) {
        Ok(x as u32)
    } else {
        Err(invalid!("`{spec}`: `{key}` must be a non-negative integer"))
    }
}

/// `power:0.1..2.0[,step=0.05]` or `power_log:0.1..2.0,beta=1[,step=..]`.
pub fn parse_family(spec: &str) -> Result<SequenceFamily<f64>> {
    let (kind, body) = split(spec.trim());
    let (range, rest) = body.split_once(',').unwrap_or((body, ""));
    let (lo, hi) = range
        .split_once("..")
        .ok_or_else(|| invalid!("`{spec}`: expected an exponent range like 0.1..2.0"))?;
    let (lo, hi) = (number(spec, "range", lo.trim())?, number(spec, "range", hi.trim())?);
    let mut p = Params::parse(spec, rest)?;
    let fam = match kind {
        "power" => SequenceFamily::power(lo, hi)?,
        "power_log" => SequenceFamily::power_log(lo, hi, p.num("beta")?.unwrap_or(1.0))?,
        _ => return Err(invalid!("unknown family `{kind}` (expected power or power_log)")),
    };
    let fam = match p.num("step")? {
        Some(s) => fam.with_step(s)?,
        None => fam,
    };
    p.finish()?;
    Ok(fam)
}

/// A weight sequence given parametrically or as a file of values `sigma_0, sigma_1, ...`.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaSpec {
    PowerLog { alpha: f64, beta: f64 },
    Table(Vec<f64>),
}

impl SigmaSpec {
    /// `power:alpha=..`, `power_log:alpha=..,beta=..` or `csv:<path>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, body) = split(spec.trim());
        if kind == "csv" {
            return Self::from_file(Path::new(body));
        }
        let mut p = Params::parse(spec, body)?;
        let alpha = p.required("alpha")?;
        let beta = match kind {
            "power" => 0.0,
            "power_log" => p.num("beta")?.unwrap_or(0.0),
            _ => return Err(invalid!("unknown sigma `{kind}` (expected power, power_log or csv)")),
        };
        p.finish()?;
        Ok(SigmaSpec::PowerLog { alpha, beta })
    }

    fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| invalid!("{}: line {}: cannot parse `{line}` as a number", path.display(), i + 1))?;
            values.push(v);
        }
        AdmissibleSequence::tabulated(values.clone())?;
        Ok(SigmaSpec::Table(values))
    }

    pub fn sequence(&self, len: usize) -> Result<AdmissibleSequence<f64>> {
        match self {
            SigmaSpec::PowerLog { alpha, beta } => Ok(AdmissibleSequence::power_log(*alpha, *beta, len)),
            SigmaSpec::Table(v) if v.len() >= len => Ok(AdmissibleSequence::tabulated(v.clone())?),
            SigmaSpec::Table(v) => Err(invalid!(
                "sigma table has {} values, scales up to {} are needed",
                v.len(),
                len - 1
            )),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SigmaSpec::PowerLog { alpha, beta } => format!("2^(-{alpha} j) (1 + j)^{beta}"),
            SigmaSpec::Table(v) => format!("table of {} values", v.len()),
        }
    }
}

pub fn parse_methods(spec: &str) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for name in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m: Method = name.parse().map_err(|e| invalid!("{e}"))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(invalid!("no methods selected"));
    }
    Ok(out)
}

/// `0.25,0.5` or a grid `start:stop:count` with both ends included.
pub fn parse_points(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if let Some((a, rest)) = spec.split_once(':') {
        let (b, c) = rest
            .split_once(':')
            .ok_or_else(|| invalid!("`{spec}`: expected start:stop:count"))?;
        let (a, b) = (number(spec, "start", a)?, number(spec, "stop", b)?);
        let count: usize = c
            .parse()
            .map_err(|_| invalid!("`{spec}`: count `{c}` is not an integer"))?;
        return match count {
            0 => Err(invalid!("`{spec}`: empty grid")),
            1 => Ok(vec![a]),
            _ => Ok((0..count)
                .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
                .collect()),
        };
    }
    spec.split(',').map(|v| number(spec, "x0", v.trim())).collect()
}
