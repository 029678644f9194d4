//! Measure tables for `certlab analyze`. Every number is produced by an
//! engine that checks its own witness (certificate, packing or LP pair).

use std::fmt::Write as _;

use num_rational::BigRational;

use certlab_core::fraccert::{fc_symmetric, fractional_certificate};
use certlab_core::function::Kind;
use certlab_core::measures::{
    block_sensitivity, block_sensitivity_max, certificate_complexity, certificate_complexity_max,
    composed_level_values, decision_tree_complexity,
};
use certlab_core::poly::{degree, ndeg, NdegCertificate};
use certlab_core::{Error, FunctionObject, InputPoint, Result};

/// Largest `n` for which `FC` is maximized by solving one LP per input.
pub const FC_SCAN_MAX_VARS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    C0,
    C1,
    C,
    Bs0,
    Bs1,
    Bs,
    Fc,
    D,
    Deg,
    Ndeg,
    Value,
    Cx,
    BsX,
    FcX,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::C0 => "C0",
            Measure::C1 => "C1",
            Measure::C => "C",
            Measure::Bs0 => "bs0",
            Measure::Bs1 => "bs1",
            Measure::Bs => "bs",
            Measure::Fc => "FC",
            Measure::D => "D",
            Measure::Deg => "deg",
            Measure::Ndeg => "ndeg",
            Measure::Value => "f(X)",
            Measure::Cx => "C^X",
            Measure::BsX => "bs^X",
            Measure::FcX => "FC^X",
        }
    }

    fn parse(s: &str) -> Option<Measure> {
        Some(match s {
            "C0" => Measure::C0,
            "C1" => Measure::C1,
            "C" => Measure::C,
            "bs0" => Measure::Bs0,
            "bs1" => Measure::Bs1,
            "bs" => Measure::Bs,
            "FC" => Measure::Fc,
            "D" => Measure::D,
            "deg" => Measure::Deg,
            "ndeg" => Measure::Ndeg,
            "value" | "f(X)" => Measure::Value,
            "CX" | "C^X" => Measure::Cx,
            "bsX" | "bs^X" => Measure::BsX,
            "FCX" | "FC^X" => Measure::FcX,
            _ => return None,
        })
    }

    pub fn needs_input(self) -> bool {
        matches!(self, Measure::Value | Measure::Cx | Measure::BsX | Measure::FcX)
    }
}

pub fn parse_measures(list: &str) -> Result<Vec<Measure>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Measure::parse(s).ok_or_else(|| Error::InvalidParameters(format!("unknown measure {s:?}"))))
        .collect()
}

pub const DEFAULT_MEASURES: &str = "C0,C1,bs0,bs1,FC";
pub const DEFAULT_INPUT_MEASURES: &str = "value,CX,bsX,FCX";

fn fc_max(f: &FunctionObject) -> Result<BigRational> {
    if let Kind::Symmetric(p) = f.kind() {
        let mut best = BigRational::from_integer(0.into());
        for w in 0..p.len() {
            best = best.max(fc_symmetric(f, w)?);
        }
        return Ok(best);
    }
    if !f.is_boolean() || f.n() > FC_SCAN_MAX_VARS {
        return Err(Error::Unsupported(format!(
            "maximum FC of a {} function on {} variables",
            f.kind_name(),
            f.n()
        )));
    }
    let mut best = BigRational::from_integer(0.into());
    for x in 0..1u64 << f.n() {
        if f.eval_bits(x).is_none() {
            continue;
        }
        let (_, sol) = fractional_certificate(f, &InputPoint::from_bits(f.n(), x))?;
        best = best.max(sol.value);
    }
    Ok(best)
}

struct Lazy<'a> {
    f: &'a FunctionObject,
    cert: Option<(u128, u128)>,
    bs: Option<(u128, u128)>,
}

impl Lazy<'_> {
    fn cert(&mut self) -> Result<(u128, u128)> {
        if self.cert.is_none() {
            self.cert = Some(match self.f.kind() {
                Kind::Composed(_) if composed_level_values(self.f).is_ok() => {
                    let l = composed_level_values(self.f)?;
                    (l.c0, l.c1)
                }
                _ => {
                    let b = certificate_complexity_max(self.f)?;
                    (b.zero as u128, b.one as u128)
                }
            });
        }
        Ok(self.cert.expect("set"))
    }

    fn bs(&mut self) -> Result<(u128, u128)> {
        if self.bs.is_none() {
            self.bs = Some(match self.f.kind() {
                Kind::Composed(_) if composed_level_values(self.f).is_ok() => {
                    let l = composed_level_values(self.f)?;
                    (l.bs0, l.bs1)
                }
                _ => {
                    let b = block_sensitivity_max(self.f)?;
                    (b.zero as u128, b.one as u128)
                }
            });
        }
        Ok(self.bs.expect("set"))
    }
}

/// One `(header, value)` pair per requested measure.
pub fn analyze(f: &FunctionObject, measures: &[Measure], input: Option<&InputPoint>) -> Result<Vec<(String, String)>> {
    let mut lazy = Lazy {
        f,
        cert: None,
        bs: None,
    };
    let mut out = Vec::with_capacity(measures.len());
    for &m in measures {
        let x = || input.ok_or_else(|| Error::InvalidParameters(format!("measure {} needs --input", m.name())));
        let v = match m {
            Measure::C0 => lazy.cert()?.0.to_string(),
            Measure::C1 => lazy.cert()?.1.to_string(),
            Measure::C => {
                let (a, b) = lazy.cert()?;
                a.max(b).to_string()
            }
            Measure::Bs0 => lazy.bs()?.0.to_string(),
            Measure::Bs1 => lazy.bs()?.1.to_string(),
            Measure::Bs => {
                let (a, b) = lazy.bs()?;
                a.max(b).to_string()
            }
            Measure::Fc => fc_max(f)?.to_string(),
            Measure::D => decision_tree_complexity(f)?.to_string(),
            Measure::Deg => degree(f)?.to_string(),
            Measure::Ndeg => {
                let r = ndeg(f)?;
                match r.certificate {
                    NdegCertificate::LowerBound => format!(">={}", r.degree),
                    _ => r.degree.to_string(),
                }
            }
            Measure::Value => match f.evaluate(x()?)? {
                Some(v) => (v as u8).to_string(),
                None => "*".to_string(),
            },
            Measure::Cx => certificate_complexity(f, x()?)?.0.to_string(),
            Measure::BsX => block_sensitivity(f, x()?)?.0.to_string(),
            Measure::FcX => fractional_certificate(f, x()?)?.1.value.to_string(),
        };
        out.push((m.name().to_string(), v));
    }
    Ok(out)
}

/// Header line and value line, tab separated.
pub fn tsv(rows: &[(String, String)]) -> String {
    let mut s = String::new();
    let heads: Vec<&str> = rows.iter().map(|(h, _)| h.as_str()).collect();
    let vals: Vec<&str> = rows.iter().map(|(_, v)| v.as_str()).collect();
    let _ = writeln!(s, "{}", heads.join("\t"));
    let _ = writeln!(s, "{}", vals.join("\t"));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use certlab_core::text::parse_function;

    #[test]
    fn g1_row() {
        let f = parse_function("ctor=window(29,13,16)").unwrap();
        let rows = analyze(&f, &parse_measures("C0,C1,bs,FC").unwrap(), None).unwrap();
        let vals: Vec<&str> = rows.iter().map(|(_, v)| v.as_str()).collect();
        assert_eq!(&vals[..3], &["17", "26", "17"]);
        assert_eq!(vals[3], "17");
    }

    #[test]
    fn input_measures() {
        let f = parse_function("ctor=or(4)").unwrap();
        let x = InputPoint::parse_bits("0000").unwrap();
        let rows = analyze(&f, &parse_measures(DEFAULT_INPUT_MEASURES).unwrap(), Some(&x)).unwrap();
        let vals: Vec<&str> = rows.iter().map(|(_, v)| v.as_str()).collect();
        assert_eq!(vals, vec!["0", "4", "4", "4"]);
        assert!(analyze(&f, &[Measure::Cx], None).is_err());
        assert!(parse_measures("C0,nope").is_err());
    }

    #[test]
    fn composed_values() {
        let f = parse_function("ctor=compose(window(29,13,16),2)").unwrap();
        let rows = analyze(&f, &parse_measures("C0,C1,bs0,bs1").unwrap(), None).unwrap();
        let vals: Vec<&str> = rows.iter().map(|(_, v)| v.as_str()).collect();
        assert_eq!(vals, vec!["442", "559", "289", "289"]);
    }
}
