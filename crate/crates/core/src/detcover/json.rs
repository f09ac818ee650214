//! Text-based JSON form of a cover certificate.
//!
//! Polynomials are stored in their text format so that a certificate can be
//! re-checked without trusting any in-memory state of the producer.

use serde::{Deserialize, Serialize};

use crate::arith::PolyT;
use crate::bivar::BivarPoly;
use crate::enumerate::{enumerate_points, Mode, Point};
use crate::hilbert::PlaneCurve;

use super::{BallGroup, Census, CoverCertificate, DetError, Verification};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointJson {
    pub x: String,
    pub y: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub beta: u32,
    pub center: PointJson,
    /// Indices into the certificate's point list.
    pub points: Vec<usize>,
    pub hypersurface: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub curve: String,
    pub n: u32,
    pub s: u32,
    pub beta: u32,
    pub mu: u64,
    pub e: u64,
    pub sigma1: u64,
    pub sigma2: u64,
    pub census: Census,
    pub points: Vec<PointJson>,
    pub groups: Vec<GroupJson>,
    pub hypersurfaces: Vec<String>,
    pub assignment: Vec<usize>,
    pub verification: Verification,
}

fn point_json((x, y): &Point) -> PointJson {
    PointJson {
        x: x.to_string(),
        y: y.to_string(),
    }
}

impl CoverCertificate {
    pub fn to_json(&self) -> CertificateJson {
        let index: std::collections::HashMap<&Point, usize> =
            self.points.iter().enumerate().map(|(k, p)| (p, k)).collect();
        let groups = self
            .groups
            .iter()
            .map(|g| {
                let points: Vec<usize> = g.points().iter().map(|p| index[p]).collect();
                GroupJson {
                    beta: g.beta(),
                    center: point_json(g.center()),
                    hypersurface: points.first().map_or(0, |&k| self.assignment[k]),
                    points,
                }
            })
            .collect();
        CertificateJson {
            curve: self.curve.spec(),
            n: self.n,
            s: self.s,
            beta: self.beta,
            mu: self.mu,
            e: self.e,
            sigma1: self.sigma1,
            sigma2: self.sigma2,
            census: self.census.clone(),
            points: self.points.iter().map(point_json).collect(),
            groups,
            hypersurfaces: self.hypersurfaces.iter().map(|h| h.to_string()).collect(),
            assignment: self.assignment.clone(),
            verification: self.verification.clone(),
        }
    }
}

impl CertificateJson {
    /// Re-checks the certificate from its text alone.
    ///
    /// The curve is re-parsed with the irreducibility test, the point set is
    /// re-enumerated, every group is re-validated as a ball on the curve, and
    /// coverage, properness and the Bézout count are recomputed.
    pub fn reverify(&self, mode: Mode, budget: u64) -> Result<Verification, DetError> {
        let curve = PlaneCurve::parse_spec(&self.curve, true)?;
        if curve.irreducible() != Some(true) {
            return Err(DetError::Reducible);
        }
        let field = curve.field().clone();
        let parse_point = |p: &PointJson| -> Result<Point, DetError> {
            Ok((PolyT::parse(&field, &p.x)?, PolyT::parse(&field, &p.y)?))
        };
        let listed: Vec<Point> = self.points.iter().map(parse_point).collect::<Result<_, _>>()?;
        let hypersurfaces: Vec<BivarPoly> = self
            .hypersurfaces
            .iter()
            .map(|h| BivarPoly::parse(&field, h))
            .collect::<Result<_, _>>()?;
        let mut seen = vec![false; listed.len()];
        for (g, group) in self.groups.iter().enumerate() {
            let mut pts = Vec::with_capacity(group.points.len());
            for &k in &group.points {
                let Some(p) = listed.get(k) else {
                    return Err(DetError::Malformed(format!("group {g} lists point {k}")));
                };
                if std::mem::replace(&mut seen[k], true) {
                    return Err(DetError::Malformed(format!("point {k} is in two groups")));
                }
                if self.assignment.get(k) != Some(&group.hypersurface) {
                    return Err(DetError::Malformed(format!(
                        "point {k} is not assigned to the hypersurface of group {g}"
                    )));
                }
                pts.push(p.clone());
            }
            let ball = BallGroup::new(&curve, group.beta, pts)?;
            if ball.center() != &parse_point(&group.center)? {
                return Err(DetError::Malformed(format!("group {g} has a wrong center")));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(DetError::Malformed("some point is in no group".into()));
        }
        let enumerated = enumerate_points(&curve, self.n, mode, budget)?;
        super::verify_cover(
            &curve,
            self.s,
            &enumerated,
            &listed,
            &hypersurfaces,
            &self.assignment,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Field;
    use crate::detcover::cover_curve;
    use crate::enumerate::DEFAULT_BUDGET;

    fn cert(p: u32, s: &str, n: u32) -> CoverCertificate {
        let f = Field::new(p, 1).unwrap();
        let c = PlaneCurve::new(BivarPoly::parse(&f, s).unwrap(), true).unwrap();
        cover_curve(&c, n, Mode::Hensel, DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn round_trip_reverifies() {
        for (p, s, n) in [(5, "y - x", 2), (5, "y^2 - x^3 - t*x", 3), (7, "y^2 - x - t", 2)] {
            let c = cert(p, s, n);
            let text = serde_json::to_string(&c.to_json()).unwrap();
            let back: CertificateJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back, c.to_json());
            let v = back.reverify(Mode::Brute, DEFAULT_BUDGET).unwrap();
            assert_eq!(v, c.verification);
            assert!(v.valid);
        }
    }

    #[test]
    fn tampered_certificates_fail() {
        let c = cert(5, "y^2 - x - t", 2);
        assert!(c.points.len() > 1);
        let good = c.to_json();

        let mut dropped = good.clone();
        let k = dropped.groups[0].points.pop().unwrap();
        dropped.points.remove(k);
        assert!(dropped.reverify(Mode::Hensel, DEFAULT_BUDGET).is_err());

        let mut wrong_curve = good.clone();
        wrong_curve.curve = "p=5;a=1;f=y^2 - x - 2*t".into();
        assert!(wrong_curve.reverify(Mode::Hensel, DEFAULT_BUDGET).is_err());

        let mut improper = good.clone();
        improper.hypersurfaces[0] = "y^2 - x - t".into();
        let v = improper.reverify(Mode::Hensel, DEFAULT_BUDGET).unwrap();
        assert!(!v.properness && !v.valid);

        let mut too_high = good;
        too_high.s = 0;
        let v = too_high.reverify(Mode::Hensel, DEFAULT_BUDGET).unwrap();
        assert!(!v.valid);
    }
}
