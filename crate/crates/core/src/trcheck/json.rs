//! Chart files: coefficient list, domain balls and degree cap.
//!
//! A Laurent value is `t^valuation · Σ digits[i] t^i`, digits being field
//! element encodings; an optional absolute `precision` marks it truncated.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{Field, FqElem, LaurentApprox, Valuation};

use super::{Ball, SeriesChart, TrError};

/// Bundled charts as `(name, file contents)`.
pub const BUNDLED_CHARTS: &[(&str, &str)] = &[
    ("x2", include_str!("../../charts/x2.json")),
    ("x3", include_str!("../../charts/x3.json")),
    ("adversarial", include_str!("../../charts/adversarial.json")),
    ("identity_p3", include_str!("../../charts/identity_p3.json")),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentJson {
    pub valuation: i64,
    pub digits: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffJson {
    pub exponent: Vec<u32>,
    #[serde(flatten)]
    pub value: LaurentJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallJson {
    pub center: LaurentJson,
    pub radius: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub p: u32,
    pub a: u32,
    /// Expansion point; zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<Vec<LaurentJson>>,
    pub components: Vec<Vec<CoeffJson>>,
    pub domain: Vec<BallJson>,
    pub degree_cap: u32,
    /// The order `r` the chart is expected to satisfy, if known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
}

impl LaurentJson {
    pub fn to_laurent(&self, field: &Field) -> Result<LaurentApprox, TrError> {
        let digits: Vec<FqElem> = self
            .digits
            .iter()
            .map(|&d| {
                field
                    .elem(d)
                    .ok_or_else(|| TrError::Json(format!("digit {d} is not below q = {}", field.q())))
            })
            .collect::<Result<_, _>>()?;
        let prec = self.precision.map_or(Valuation::Infinity, Valuation::Finite);
        Ok(LaurentApprox::new(field, self.valuation, digits, prec))
    }

    pub fn from_laurent(x: &LaurentApprox) -> LaurentJson {
        LaurentJson {
            valuation: x.val().finite().unwrap_or(0),
            digits: x.coeffs().iter().map(|c| c.index()).collect(),
            precision: x.prec().finite(),
        }
    }
}

impl ChartJson {
    pub fn parse(text: &str) -> Result<ChartJson, TrError> {
        serde_json::from_str(text).map_err(|e| TrError::Json(e.to_string()))
    }

    pub fn bundled(name: &str) -> Option<ChartJson> {
        BUNDLED_CHARTS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| ChartJson::parse(text).expect("bundled charts parse"))
    }

    pub fn to_chart(&self) -> Result<SeriesChart, TrError> {
        let field = Field::new(self.p, self.a)?;
        let m = self.domain.len();
        let origin = match &self.origin {
            Some(o) => o
                .iter()
                .map(|v| v.to_laurent(&field))
                .collect::<Result<_, _>>()?,
            None => vec![LaurentApprox::exact_zero(&field); m],
        };
        let mut comps = Vec::with_capacity(self.components.len());
        for comp in &self.components {
            let mut table = BTreeMap::new();
            for c in comp {
                let v = c.value.to_laurent(&field)?;
                if table.insert(c.exponent.clone(), v).is_some() {
                    return Err(TrError::Json(format!(
                        "exponent {:?} appears twice",
                        c.exponent
                    )));
                }
            }
            comps.push(table);
        }
        let domain = self
            .domain
            .iter()
            .map(|b| {
                Ok(Ball {
                    center: b.center.to_laurent(&field)?,
                    radius: b.radius,
                })
            })
            .collect::<Result<_, TrError>>()?;
        SeriesChart::new(&field, origin, comps, domain, self.degree_cap)
    }

    pub fn from_chart(chart: &SeriesChart) -> ChartJson {
        let field = chart.field();
        let origin_zero = chart.origin().iter().all(LaurentApprox::is_exact_zero);
        ChartJson {
            name: None,
            p: field.p(),
            a: field.a(),
            origin: (!origin_zero)
                .then(|| chart.origin().iter().map(LaurentJson::from_laurent).collect()),
            components: chart
                .components()
                .iter()
                .map(|comp| {
                    comp.iter()
                        .map(|(k, v)| CoeffJson {
                            exponent: k.clone(),
                            value: LaurentJson::from_laurent(v),
                        })
                        .collect()
                })
                .collect(),
            domain: chart
                .domain()
                .iter()
                .map(|b| BallJson {
                    center: LaurentJson::from_laurent(&b.center),
                    radius: b.radius,
                })
                .collect(),
            degree_cap: chart.degree_cap(),
            order: None,
        }
    }
}
