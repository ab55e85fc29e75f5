use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{enumerate, Permutation};
use crate::stats::t_statistic;

pub const VIOLATION_CAP: usize = 6;

/// A pair where `d(π, σ) > d(π, id) + d(id, σ)` for the direct edge weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub pi: Permutation,
    pub sigma: Permutation,
    pub d_pi_id: u64,
    pub d_id_sigma: u64,
    pub d_pi_sigma: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub n: usize,
    pub pairs_checked: u64,
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn count(&self) -> usize {
        self.violations.len()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["pi", "sigma", "d_pi_id", "d_id_sigma", "d_pi_sigma"])
            .map_err(csv_err)?;
        for v in &self.violations {
            w.write_record([
                v.pi.to_string(),
                v.sigma.to_string(),
                v.d_pi_id.to_string(),
                v.d_id_sigma.to_string(),
                v.d_pi_sigma.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Exhaustive search over `S_n × S_n` for triangle violations through the
/// identity, with `d(a, b) = T(a b⁻¹)`.
pub fn search_triangle_violations(n: usize) -> Result<ViolationReport> {
    if n == 0 {
        return Err(Error::InvalidSize("violation search requires n >= 1".into()));
    }
    if n > VIOLATION_CAP {
        return Err(Error::CapExceeded {
            what: "triangle violation search",
            n,
            cap: VIOLATION_CAP,
        });
    }
    let all: Vec<Permutation> = enumerate(n)?.collect();
    let to_id: Vec<u64> = all.iter().map(|p| t_statistic(p) as u64).collect();
    let inverses: Vec<Permutation> = all.iter().map(Permutation::inverse).collect();
    let mut violations = Vec::new();
    for (i, pi) in all.iter().enumerate() {
        for (j, sigma_inv) in inverses.iter().enumerate() {
            let direct = t_statistic(&pi.compose(sigma_inv)?) as u64;
            if direct > to_id[i] + to_id[j] {
                violations.push(Violation {
                    pi: pi.clone(),
                    sigma: all[j].clone(),
                    d_pi_id: to_id[i],
                    d_id_sigma: to_id[j],
                    d_pi_sigma: direct,
                });
            }
        }
    }
    Ok(ViolationReport {
        n,
        pairs_checked: (all.len() * all.len()) as u64,
        violations,
    })
}
