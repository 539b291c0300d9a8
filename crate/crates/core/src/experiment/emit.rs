//! CSV and JSON output.
//!
//! Floats are rounded to 12 significant digits and written in their
//! shortest form; infinities are written as `inf` / `-inf` (strings in
//! JSON). Output depends only on the record, so identical runs give
//! byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use super::{ExperimentError, OutputFormat, ResultRecord};
use crate::error::ModelError;
use crate::stats::ConcentrationPoint;

/// Tolerance on the sum of each emitted P′ row.
pub const ROW_SUM_TOL: f64 = 1e-9;

const SIG_DIGITS: usize = 12;

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("formatted float parses")
}

/// Text form of `x` at 12 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x);
    let a = r.abs();
    if r == 0.0 {
        "0".into()
    } else if !(1e-5..1e15).contains(&a) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// Serde adapters writing floats through [`round_sig`], with non-finite
/// values as strings.
pub mod num {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Text(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!("not a number: {other:?}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(super::round_sig(*x))
        } else {
            s.serialize_str(&super::format_float(*x))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub(super) fn parse<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        deserialize(d)
    }
}

pub mod num_opt {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    struct Wrap(#[serde(deserialize_with = "super::num::parse")] f64);

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => super::num::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

pub mod num_vec {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    pub(super) struct Wrap(#[serde(deserialize_with = "super::num::parse")] pub(super) f64);

    struct Item(f64);

    impl serde::Serialize for Item {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            super::num::serialize(&self.0, s)
        }
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for &x in v {
            seq.serialize_element(&Item(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<Wrap>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

pub mod num_vec_opt {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => super::num_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
        Ok(Option::<Vec<super::num_vec::Wrap>>::deserialize(d)?
            .map(|v| v.into_iter().map(|w| w.0).collect()))
    }
}

/// CSV header for an `outcomes`-outcome record.
pub fn csv_header(outcomes: usize) -> String {
    let mut h = String::from("sigma");
    for j in 0..outcomes {
        write!(h, ",p_prime_{j}").unwrap();
    }
    h.push_str(",xi_bits,dh_dsigma,regime,residual,chi2,p_value,verdict,power");
    h
}

fn validate(record: &ResultRecord) -> Result<(), ExperimentError> {
    for row in &record.rows {
        if row.p_prime.len() != record.outcomes {
            return Err(ModelError::DimensionMismatch {
                left: record.outcomes,
                right: row.p_prime.len(),
            }
            .into());
        }
        let sum: f64 = row.p_prime.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL || row.p_prime.iter().any(|&p| p < 0.0) {
            return Err(ModelError::NotNormalized { sum }.into());
        }
    }
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn render_csv(record: &ResultRecord) -> String {
    let mut out = csv_header(record.outcomes);
    out.push('\n');
    for row in &record.rows {
        let mut cells = vec![format_float(row.sigma)];
        cells.extend(row.p_prime.iter().map(|&p| format_float(p)));
        cells.push(format_float(row.xi_bits));
        cells.push(format_float(row.dh_dsigma));
        cells.push(row.regime.as_str().to_string());
        cells.push(opt(row.residual));
        cells.push(opt(row.chi2));
        cells.push(opt(row.p_value));
        cells.push(row.verdict.map(|v| v.as_str().to_string()).unwrap_or_default());
        cells.push(opt(row.power));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// The record as file contents, after re-validating every P′ row.
pub fn render(record: &ResultRecord, format: OutputFormat) -> Result<String, ExperimentError> {
    validate(record)?;
    Ok(match format {
        OutputFormat::Csv => render_csv(record),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(record).expect("record serializes");
            s.push('\n');
            s
        }
    })
}

/// Weak-law table: `n,estimate,std_error,chebyshev_bound`.
pub fn render_concentration(points: &[ConcentrationPoint], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("n,estimate,std_error,chebyshev_bound\n");
            for p in points {
                writeln!(
                    out,
                    "{},{},{},{}",
                    p.n,
                    format_float(p.estimate),
                    format_float(p.std_error),
                    format_float(p.chebyshev_bound)
                )
                .unwrap();
            }
            out
        }
        OutputFormat::Json => {
            let rounded: Vec<ConcentrationPoint> = points
                .iter()
                .map(|p| ConcentrationPoint {
                    n: p.n,
                    estimate: round_sig(p.estimate),
                    std_error: round_sig(p.std_error),
                    chebyshev_bound: round_sig(p.chebyshev_bound),
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&rounded).expect("points serialize");
            s.push('\n');
            s
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), ExperimentError> {
    std::fs::write(path, contents)
        .map_err(|source| ExperimentError::Io { path: path.display().to_string(), source })
}

/// Renders `record` and writes it to `path`.
pub fn emit(record: &ResultRecord, format: OutputFormat, path: &Path) -> Result<(), ExperimentError> {
    write_file(path, &render(record, format)?)
}
