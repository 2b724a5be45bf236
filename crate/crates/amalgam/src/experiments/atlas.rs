use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifier::{classify, region, Classification, RegionFamily, RegionLabel};
use crate::exponent::{Family, Rational, ReciprocalExponent, SmoothnessIndex, SpaceSpec};

/// Which inclusion the atlas decides; the amalgam side carries `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtlasPair {
    WienerInBesov,
    BesovInWiener,
    WienerInHardy,
    HardyInWiener,
    WienerInLebesgue,
    LebesgueInWiener,
}

impl AtlasPair {
    fn families(self) -> (Family, Family) {
        use Family::*;
        match self {
            AtlasPair::WienerInBesov => (WienerAmalgam, Besov),
            AtlasPair::BesovInWiener => (Besov, WienerAmalgam),
            AtlasPair::WienerInHardy => (WienerAmalgam, LocalHardy),
            AtlasPair::HardyInWiener => (LocalHardy, WienerAmalgam),
            AtlasPair::WienerInLebesgue => (WienerAmalgam, Lebesgue),
            AtlasPair::LebesgueInWiener => (Lebesgue, WienerAmalgam),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AtlasPair::WienerInBesov => "W:B",
            AtlasPair::BesovInWiener => "B:W",
            AtlasPair::WienerInHardy => "W:hp",
            AtlasPair::HardyInWiener => "hp:W",
            AtlasPair::WienerInLebesgue => "W:L",
            AtlasPair::LebesgueInWiener => "L:W",
        }
    }

    /// Source and target at `(p, q)`, smoothness `s` on the amalgam side.
    pub fn spaces(
        self,
        p: ReciprocalExponent,
        q: ReciprocalExponent,
        s: SmoothnessIndex,
        n: u32,
    ) -> Result<(SpaceSpec, SpaceSpec), crate::exponent::ExponentError> {
        let (src, dst) = self.families();
        let build = |family: Family| {
            let s = if family == Family::WienerAmalgam {
                s
            } else {
                SmoothnessIndex::zero()
            };
            SpaceSpec::try_new(family, p, q, s, n)
        };
        Ok((build(src)?, build(dst)?))
    }
}

impl FromStr for AtlasPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            AtlasPair::WienerInBesov,
            AtlasPair::BesovInWiener,
            AtlasPair::WienerInHardy,
            AtlasPair::HardyInWiener,
            AtlasPair::WienerInLebesgue,
            AtlasPair::LebesgueInWiener,
        ]
        .into_iter()
        .find(|pair| pair.label() == s)
        .ok_or_else(|| format!("unknown space pair {s:?}"))
    }
}

/// Smoothness at which each node is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SMode {
    AtCritical,
    /// Critical value plus this offset (negative offsets probe below it).
    Offset(Rational),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtlasRow {
    pub inv_p: Rational,
    pub inv_q: Rational,
    pub region_alpha: RegionLabel,
    pub region_beta: RegionLabel,
    pub critical_s: Option<SmoothnessIndex>,
    pub s: Option<SmoothnessIndex>,
    pub holds: Option<bool>,
    pub strict_required: Option<bool>,
    /// Why a node has no verdict (e.g. `p = ∞` for a Hardy space).
    pub error: Option<String>,
}

/// Nodes `(k/res, l/res)` for `k, l = 0..=2·res`.
pub fn atlas_grid(resolution: i64) -> Vec<(ReciprocalExponent, ReciprocalExponent)> {
    let values: Vec<ReciprocalExponent> = (0..=2 * resolution)
        .map(|k| ReciprocalExponent::inv(k, resolution))
        .collect();
    values
        .iter()
        .flat_map(|&p| values.iter().map(move |&q| (p, q)))
        .collect()
}

/// Classifier verdict, region labels and critical smoothness at every node.
pub fn region_atlas(
    pair: AtlasPair,
    mode: SMode,
    grid: &[(ReciprocalExponent, ReciprocalExponent)],
    n: u32,
) -> Vec<AtlasRow> {
    grid.iter()
        .map(|&(p, q)| {
            let mut row = AtlasRow {
                inv_p: p.value(),
                inv_q: q.value(),
                region_alpha: region(p, q, RegionFamily::Alpha),
                region_beta: region(p, q, RegionFamily::Beta),
                critical_s: None,
                s: None,
                holds: None,
                strict_required: None,
                error: None,
            };
            let decide = |s: SmoothnessIndex| -> Result<Classification, String> {
                let (src, dst) = pair.spaces(p, q, s, n).map_err(|e| e.to_string())?;
                classify(&src, &dst).map_err(|e| e.to_string())
            };
            match decide(SmoothnessIndex::zero()) {
                Ok(Classification::Threshold(at_zero)) => {
                    let critical = at_zero.critical_s;
                    let s = match mode {
                        SMode::AtCritical => critical,
                        SMode::Offset(delta) => SmoothnessIndex(critical.0 + delta),
                    };
                    row.critical_s = Some(critical);
                    row.s = Some(s);
                    match decide(s) {
                        Ok(verdict) => {
                            row.holds = Some(verdict.holds());
                            if let Classification::Threshold(v) = verdict {
                                row.strict_required = Some(v.strict_required);
                            }
                        }
                        Err(e) => row.error = Some(e),
                    }
                }
                Ok(Classification::Boolean(_)) => {
                    row.error = Some("pair has no smoothness threshold".into())
                }
                Err(e) => row.error = Some(e),
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_by_nine_grid() {
        let rows = region_atlas(
            AtlasPair::WienerInBesov,
            SMode::AtCritical,
            &atlas_grid(4),
            1,
        );
        assert_eq!(rows.len(), 81);
        let half = Rational::new(1, 2);
        let center = rows
            .iter()
            .find(|r| r.inv_p == half && r.inv_q == half)
            .unwrap();
        assert_eq!(center.holds, Some(true));
        assert_eq!(center.critical_s, Some(SmoothnessIndex::zero()));
    }

    #[test]
    fn just_below_the_sup_corner_fails() {
        let grid = [(ReciprocalExponent::INFINITY, ReciprocalExponent::INFINITY)];
        let rows = region_atlas(
            AtlasPair::WienerInBesov,
            SMode::Offset(Rational::new(-1, 10)),
            &grid,
            1,
        );
        assert_eq!(rows[0].critical_s, Some(SmoothnessIndex::new(1, 1)));
        assert_eq!(rows[0].holds, Some(false));
    }

    #[test]
    fn hardy_at_infinity_is_reported_not_decided() {
        let grid = [(ReciprocalExponent::INFINITY, ReciprocalExponent::p(2))];
        let rows = region_atlas(AtlasPair::WienerInHardy, SMode::AtCritical, &grid, 1);
        assert!(rows[0].error.is_some());
        assert_eq!(rows[0].holds, None);
    }

    #[test]
    fn pair_labels_round_trip() {
        for label in ["W:B", "B:W", "W:hp", "hp:W", "W:L", "L:W"] {
            assert_eq!(label.parse::<AtlasPair>().unwrap().label(), label);
        }
        assert!("W:Q".parse::<AtlasPair>().is_err());
    }
}
