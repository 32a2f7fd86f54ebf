use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// Link bandwidth in Mbps. `Unbounded` is larger than every finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Mbps(f64),
    Unbounded,
}

impl Bandwidth {
    pub fn is_unbounded(self) -> bool {
        matches!(self, Bandwidth::Unbounded)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Bandwidth::Mbps(v) => Some(v),
            Bandwidth::Unbounded => None,
        }
    }

    pub fn min(self, other: Bandwidth) -> Bandwidth {
        match (self, other) {
            (Bandwidth::Unbounded, x) | (x, Bandwidth::Unbounded) => x,
            (Bandwidth::Mbps(a), Bandwidth::Mbps(b)) => Bandwidth::Mbps(a.min(b)),
        }
    }

    /// Whether this bandwidth meets a `minBandwidthMbps` bound.
    pub fn satisfies(self, min_mbps: f64) -> bool {
        match self {
            Bandwidth::Unbounded => true,
            Bandwidth::Mbps(v) => v >= min_mbps,
        }
    }
}

impl PartialOrd for Bandwidth {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Bandwidth::Unbounded, Bandwidth::Unbounded) => Some(Ordering::Equal),
            (Bandwidth::Unbounded, _) => Some(Ordering::Greater),
            (_, Bandwidth::Unbounded) => Some(Ordering::Less),
            (Bandwidth::Mbps(a), Bandwidth::Mbps(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bandwidth::Unbounded => f.write_str("unbounded"),
            Bandwidth::Mbps(v) => write!(f, "{}", format_quantity(*v)),
        }
    }
}

impl Serialize for Bandwidth {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Bandwidth::Unbounded => serializer.serialize_str("unbounded"),
            Bandwidth::Mbps(v) => serializer.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Bandwidth {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct BandwidthVisitor;

        impl Visitor<'_> for BandwidthVisitor {
            type Value = Bandwidth;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a bandwidth in Mbps or the string \"unbounded\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Bandwidth, E> {
                Ok(Bandwidth::Mbps(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Bandwidth, E> {
                Ok(Bandwidth::Mbps(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Bandwidth, E> {
                Ok(Bandwidth::Mbps(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Bandwidth, E> {
                if v == "unbounded" {
                    Ok(Bandwidth::Unbounded)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        deserializer.deserialize_any(BandwidthVisitor)
    }
}

/// Latency and bandwidth of a link or of a whole path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkMetrics {
    #[serde(rename = "latencyMs")]
    pub latency_ms: f64,
    #[serde(rename = "bandwidthMbps")]
    pub bandwidth: Bandwidth,
}

impl LinkMetrics {
    /// The metrics of a path that never leaves a node.
    pub const IDENTITY: LinkMetrics = LinkMetrics {
        latency_ms: 0.0,
        bandwidth: Bandwidth::Unbounded,
    };

    pub fn new(latency_ms: f64, bandwidth_mbps: f64) -> Self {
        LinkMetrics {
            latency_ms,
            bandwidth: Bandwidth::Mbps(bandwidth_mbps),
        }
    }

    pub fn is_valid(&self) -> bool {
        let latency_ok = self.latency_ms >= 0.0 && self.latency_ms.is_finite();
        let bandwidth_ok = match self.bandwidth {
            Bandwidth::Unbounded => true,
            Bandwidth::Mbps(v) => v > 0.0 && v.is_finite(),
        };
        latency_ok && bandwidth_ok
    }

    /// Whether these metrics meet optional latency and bandwidth bounds.
    pub fn satisfies(&self, max_latency_ms: Option<f64>, min_bandwidth_mbps: Option<f64>) -> bool {
        max_latency_ms.is_none_or(|bound| self.latency_ms <= bound)
            && min_bandwidth_mbps.is_none_or(|bound| self.bandwidth.satisfies(bound))
    }
}

/// `latencyMs=<x> bandwidthMbps=<y|unbounded>`
impl fmt::Display for LinkMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "latencyMs={} bandwidthMbps={}",
            format_quantity(self.latency_ms),
            self.bandwidth
        )
    }
}

/// Prints a quantity with at most nine decimals, dropping accumulated
/// floating-point noise (`5 + 0.2 + 5` prints as `10.2`).
pub fn format_quantity(value: f64) -> String {
    let rounded = (value * 1e9).round() / 1e9;
    // avoid "-0"
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unbounded_is_absorbing_only_against_itself() {
        let finite = Bandwidth::Mbps(100.0);
        assert_eq!(Bandwidth::Unbounded.min(finite), finite);
        assert_eq!(finite.min(Bandwidth::Unbounded), finite);
        assert_eq!(Bandwidth::Unbounded.min(Bandwidth::Unbounded), Bandwidth::Unbounded);
        assert!(Bandwidth::Unbounded > finite);
    }

    #[test]
    fn bandwidth_json_forms() {
        let m: LinkMetrics = serde_json::from_str(r#"{"latencyMs":0.5,"bandwidthMbps":"unbounded"}"#).unwrap();
        assert_eq!(m.bandwidth, Bandwidth::Unbounded);
        let m: LinkMetrics = serde_json::from_str(r#"{"latencyMs":1,"bandwidthMbps":100}"#).unwrap();
        assert_eq!(m, LinkMetrics::new(1.0, 100.0));
        assert!(serde_json::from_str::<LinkMetrics>(r#"{"latencyMs":1,"bandwidthMbps":"lots"}"#).is_err());
        assert_eq!(
            serde_json::to_string(&LinkMetrics::IDENTITY).unwrap(),
            r#"{"latencyMs":0.0,"bandwidthMbps":"unbounded"}"#
        );
    }

    #[test]
    fn display_trims_float_noise() {
        assert_eq!(LinkMetrics::IDENTITY.to_string(), "latencyMs=0 bandwidthMbps=unbounded");
        assert_eq!(
            LinkMetrics::new(5.0 + 0.2 + 5.0, 100.0).to_string(),
            "latencyMs=10.2 bandwidthMbps=100"
        );
        assert_eq!(format_quantity(-0.0), "0");
    }

    #[test]
    fn bounds() {
        let m = LinkMetrics::new(0.1, 1000.0);
        assert!(m.satisfies(Some(5.0), Some(1000.0)));
        assert!(!m.satisfies(Some(0.05), None));
        assert!(!m.satisfies(None, Some(1000.5)));
        assert!(LinkMetrics::IDENTITY.satisfies(Some(0.0), Some(1e12)));
    }
}
