//! Vulnerability impact factors over per-agent measure records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One agent's measure under normal operation, under the fault, and its
/// worst possible value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentMeasure {
    pub normal: f64,
    pub fault: f64,
    pub min: f64,
}

/// CIF = |M_norm − M_fault| / |M_norm − M_min|.
pub fn component_impact_factor(m: AgentMeasure) -> Result<f64> {
    let span = (m.normal - m.min).abs();
    if span == 0.0 {
        return Err(Error::undefined("normal and minimum measures coincide"));
    }
    Ok((m.normal - m.fault).abs() / span)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactFactors {
    pub cif: Vec<f64>,
    /// Fraction of agents whose CIF exceeds the threshold.
    pub sif: f64,
}

pub fn vulnerability_impact_factors(
    agents: &[AgentMeasure],
    threshold: f64,
) -> Result<ImpactFactors> {
    if agents.is_empty() {
        return Err(Error::param("no agents"));
    }
    let cif = agents
        .iter()
        .map(|&a| component_impact_factor(a))
        .collect::<Result<Vec<_>>>()?;
    let hit = cif.iter().filter(|&&c| c > threshold).count();
    Ok(ImpactFactors {
        sif: hit as f64 / agents.len() as f64,
        cif,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let a = AgentMeasure {
            normal: 10.0,
            fault: 10.0,
            min: 0.0,
        };
        assert_eq!(component_impact_factor(a).unwrap(), 0.0);
        let a = AgentMeasure {
            normal: 10.0,
            fault: 0.0,
            min: 0.0,
        };
        assert_eq!(component_impact_factor(a).unwrap(), 1.0);
        assert!(component_impact_factor(AgentMeasure {
            normal: 1.0,
            fault: 0.5,
            min: 1.0
        })
        .is_err());
        let mut agents = vec![
            AgentMeasure {
                normal: 1.0,
                fault: 1.0,
                min: 0.0
            };
            12
        ];
        for a in agents.iter_mut().take(3) {
            a.fault = 0.2;
        }
        assert_eq!(
            vulnerability_impact_factors(&agents, 0.5).unwrap().sif,
            0.25
        );
    }
}
