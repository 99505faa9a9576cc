//! Certified upper bounds `E_d(rho) <= value`.
//!
//! * product states: `E_d = 1/d` (local filters keep the output a product,
//!   whose overlap with `phi_d` is at most `1/d`);
//! * PPT states: `E_d = 1/d` (filters preserve PPT, and for PPT `tau`,
//!   `tr[tau phi_d] = tr[tau^Gamma F] / d <= tr[tau] / d` with `F` the swap);
//! * pure states of Schmidt rank `k`: `E_d <= min(k, d) / d` (filters cannot
//!   raise the Schmidt rank, and a rank-`k` state overlaps `phi_d` by at most
//!   `k / d`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::bipartite_matrix;
use crate::states::ppt_check;
use crate::tensor::{
    eigensystem_unchecked, schmidt_rank, ComplexMatrix, DensityOperator, HilbertFactorization,
    HERMITIAN_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    SeparableFloor,
    AnalyticFamily,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EBoundCertificate {
    pub kind: CertificateKind,
    /// `product`, `ppt` or `schmidt-rank-k`.
    pub family: String,
    /// Certified upper bound on `E_d(rho)`.
    pub value: f64,
    /// Membership margin: product residual, minimum eigenvalue of the
    /// partial transpose, or discarded spectral weight for pure states.
    pub evidence: f64,
}

/// Tries each certifiable family in order (product, PPT, pure with bounded
/// Schmidt rank) and returns the first that applies.
pub fn certify_e_bound(rho: &DensityOperator, d: usize) -> Result<Option<EBoundCertificate>> {
    if d < 2 {
        return Err(Error::arg("target dimension d must be at least 2"));
    }
    let (m, da, db) = bipartite_matrix(rho)?;
    let floor = 1.0 / d as f64;
    let tr = m.trace().re;

    let residual = product_residual(&m, da, db);
    if residual <= HERMITIAN_TOL * m.max_abs() {
        return Ok(Some(EBoundCertificate {
            kind: CertificateKind::SeparableFloor,
            family: "product".into(),
            value: floor,
            evidence: residual,
        }));
    }

    let space = HilbertFactorization::bipartite(da, db);
    let bip = DensityOperator::new_unchecked(m.clone(), space.clone());
    let ppt = ppt_check(&bip, &["B"])?;
    if ppt.is_ppt {
        return Ok(Some(EBoundCertificate {
            kind: CertificateKind::AnalyticFamily,
            family: "ppt".into(),
            value: floor,
            evidence: ppt.min_eigenvalue,
        }));
    }

    let eig = eigensystem_unchecked(&m);
    let rest: f64 = eig.values.iter().skip(1).map(|v| v.abs()).sum();
    if rest <= HERMITIAN_TOL * tr {
        let v = eig.vector(0);
        let k = schmidt_rank(&v, &space, &["A"])?;
        return Ok(Some(EBoundCertificate {
            kind: if k == 1 {
                CertificateKind::SeparableFloor
            } else {
                CertificateKind::AnalyticFamily
            },
            family: if k == 1 {
                "product".into()
            } else {
                format!("schmidt-rank-{k}")
            },
            value: (k.min(d) as f64) / d as f64,
            evidence: rest,
        }));
    }
    Ok(None)
}

/// `max |m - m_A (x) m_B / tr m|`.
fn product_residual(m: &ComplexMatrix, da: usize, db: usize) -> f64 {
    let tr = m.trace();
    let mut ma = ComplexMatrix::zeros(da, da);
    let mut mb = ComplexMatrix::zeros(db, db);
    for i in 0..da {
        for k in 0..da {
            for j in 0..db {
                ma[(i, k)] += m[(i * db + j, k * db + j)];
            }
        }
    }
    for j in 0..db {
        for l in 0..db {
            for i in 0..da {
                mb[(j, l)] += m[(i * db + j, i * db + l)];
            }
        }
    }
    m.max_abs_diff(&ma.kron(&mb).scale_complex(1.0 / tr))
}

/// A state bundled with a certificate for its entanglement fraction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertifiedRho {
    rho: DensityOperator,
    d: usize,
    certificate: EBoundCertificate,
}

impl CertifiedRho {
    /// Certifies `rho`; a precondition error if no family applies.
    pub fn certify(rho: DensityOperator, d: usize) -> Result<Self> {
        match certify_e_bound(&rho, d)? {
            Some(certificate) => Ok(Self {
                rho,
                d,
                certificate,
            }),
            None => Err(Error::Precondition(
                "no certificate for E_d(rho): rho is neither a product, PPT, nor pure".into(),
            )),
        }
    }

    pub fn rho(&self) -> &DensityOperator {
        &self.rho
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn certificate(&self) -> &EBoundCertificate {
        &self.certificate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        max_entangled, product_basis, pure_cos_sin, random_separable, stream_rng, werner,
        WernerParam,
    };

    #[test]
    fn certifies_known_families() {
        let c = certify_e_bound(&product_basis(3, 1, 1).unwrap(), 3)
            .unwrap()
            .unwrap();
        assert_eq!(c.kind, CertificateKind::SeparableFloor);
        assert!((c.value - 1.0 / 3.0).abs() < 1e-15);

        let mut rng = stream_rng(4, 0);
        let sep = random_separable(2, 2, 4, &mut rng);
        let c = certify_e_bound(&sep, 2).unwrap().unwrap();
        assert_eq!(c.family, "ppt");

        let w = werner(&WernerParam::new(0.5, 2).unwrap());
        assert_eq!(certify_e_bound(&w, 2).unwrap().unwrap().family, "ppt");

        let (psi, _) = pure_cos_sin(0.3);
        let c = certify_e_bound(&psi, 3).unwrap().unwrap();
        assert_eq!(c.family, "schmidt-rank-2");
        assert!((c.value - 2.0 / 3.0).abs() < 1e-15);

        let w = werner(&WernerParam::new(0.9, 2).unwrap());
        assert!(certify_e_bound(&w, 2).unwrap().is_none());
        let (phi, _) = max_entangled(2).unwrap();
        assert!(CertifiedRho::certify(phi, 2).unwrap().certificate().value == 1.0);
    }
}
