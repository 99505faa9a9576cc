//! Canonical state families, the U(x)U and U(x)U* twirls, PPT tests and
//! Haar sampling.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{io, ComplexMatrix, DensityOperator, HilbertFactorization, ONE, PSD_TOL, ZERO};

/// Independent generator stream `stream` of a seeded family.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_local_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::arg(format!(
            "local dimension must be at least 2 (got {d})"
        )))
    } else {
        Ok(())
    }
}

/// Amplitudes of `|phi_d> = d^{-1/2} sum_s |s>|s>`.
pub fn phi_vector(d: usize) -> Vec<Complex64> {
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; d * d];
    for s in 0..d {
        v[s * d + s] = amp;
    }
    v
}

/// `|phi_d><phi_d|` as a plain matrix.
pub fn phi_projector(d: usize) -> ComplexMatrix {
    ComplexMatrix::projector(&phi_vector(d))
}

/// The maximally entangled state on `A (x) B` and its vector.
pub fn max_entangled(d: usize) -> Result<(DensityOperator, Vec<Complex64>)> {
    check_local_dim(d)?;
    let v = phi_vector(d);
    let rho = DensityOperator::from_pure(&v, HilbertFactorization::bipartite(d, d))?;
    Ok((rho, v))
}

/// Swap operator on `C^d (x) C^d`.
pub fn swap(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = ONE;
        }
    }
    m
}

/// `(I - SWAP) / 2`, rank `d(d-1)/2`.
pub fn antisymmetric_projector(d: usize) -> ComplexMatrix {
    (&ComplexMatrix::identity(d * d) - &swap(d)).scale(0.5)
}

/// `(I + SWAP) / 2`, rank `d(d+1)/2`.
pub fn symmetric_projector(d: usize) -> ComplexMatrix {
    (&ComplexMatrix::identity(d * d) + &swap(d)).scale(0.5)
}

pub fn maximally_mixed(d: usize) -> DensityOperator {
    DensityOperator::new_unchecked(
        ComplexMatrix::identity(d * d).scale(1.0 / (d * d) as f64),
        HilbertFactorization::bipartite(d, d),
    )
}

/// Weight `mu` on the normalized antisymmetric projector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerParam {
    mu: f64,
    d: usize,
}

impl WernerParam {
    pub fn new(mu: f64, d: usize) -> Result<Self> {
        check_local_dim(d)?;
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::arg(format!(
                "Werner weight mu must lie in [0, 1] (got {mu})"
            )));
        }
        Ok(Self { mu, d })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Entangled exactly when the partial transpose is not PSD.
    pub fn is_entangled(&self) -> bool {
        self.mu > 0.5
    }
}

/// `omega^-`: normalized antisymmetric projector.
pub fn werner_minus(d: usize) -> ComplexMatrix {
    let pa = antisymmetric_projector(d);
    pa.scale(2.0 / (d * (d - 1)) as f64)
}

/// `omega^+`: normalized symmetric projector.
pub fn werner_plus(d: usize) -> ComplexMatrix {
    let ps = symmetric_projector(d);
    ps.scale(2.0 / (d * (d + 1)) as f64)
}

/// `mu omega^- + (1 - mu) omega^+`.
pub fn werner(p: &WernerParam) -> DensityOperator {
    let m = &werner_minus(p.d).scale(p.mu) + &werner_plus(p.d).scale(1.0 - p.mu);
    DensityOperator::new_unchecked(m, HilbertFactorization::bipartite(p.d, p.d))
}

/// `f phi_d + (1 - f) (I - phi_d) / (d^2 - 1)`.
pub fn isotropic(f: f64, d: usize) -> Result<DensityOperator> {
    check_local_dim(d)?;
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::arg(format!(
            "isotropic fidelity must lie in [0, 1] (got {f})"
        )));
    }
    let phi = phi_projector(d);
    let rest = (&ComplexMatrix::identity(d * d) - &phi).scale((1.0 - f) / ((d * d - 1) as f64));
    Ok(DensityOperator::new_unchecked(
        &phi.scale(f) + &rest,
        HilbertFactorization::bipartite(d, d),
    ))
}

/// `|i> (x) |j>` on `C^d (x) C^d` (0-based indices).
pub fn product_basis(d: usize, i: usize, j: usize) -> Result<DensityOperator> {
    if d == 0 || i >= d || j >= d {
        return Err(Error::arg(format!(
            "basis indices ({i}, {j}) out of range for d = {d}"
        )));
    }
    let mut v = vec![ZERO; d * d];
    v[i * d + j] = ONE;
    DensityOperator::from_pure(&v, HilbertFactorization::bipartite(d, d))
}

/// `cos(theta)|00> + sin(theta)|11>` on two qubits.
pub fn pure_cos_sin(theta: f64) -> (DensityOperator, Vec<Complex64>) {
    let mut v = vec![ZERO; 4];
    v[0] = Complex64::new(theta.cos(), 0.0);
    v[3] = Complex64::new(theta.sin(), 0.0);
    let rho =
        DensityOperator::from_pure(&v, HilbertFactorization::bipartite(2, 2)).expect("nonzero");
    (rho, v)
}

/// The one-parameter 3x3 family
/// `2/7 P+ + alpha/7 s+ + (5 - alpha)/7 s-` with `P+` the projector on
/// `(|00>+|11>+|22>)/sqrt 3`,
/// `s+ = (|01><01| + |12><12| + |20><20|)/3` and `s-` its swap.
///
/// Separable for `2 <= alpha <= 3`, PPT entangled for `3 < alpha <= 4`,
/// NPT for `4 < alpha <= 5`.
pub fn horodecki_alpha(alpha: f64) -> Result<DensityOperator> {
    if !(2.0..=5.0).contains(&alpha) {
        return Err(Error::arg(format!(
            "alpha must lie in [2, 5] (got {alpha})"
        )));
    }
    let d = 3;
    let mut m = phi_projector(d).scale(2.0 / 7.0);
    for i in 0..d {
        let j = (i + 1) % d;
        m[(i * d + j, i * d + j)] += Complex64::new(alpha / 21.0, 0.0);
        m[(j * d + i, j * d + i)] += Complex64::new((5.0 - alpha) / 21.0, 0.0);
    }
    Ok(DensityOperator::new_unchecked(
        m,
        HilbertFactorization::bipartite(d, d),
    ))
}

fn two_factor_dim(rho: &DensityOperator) -> Result<usize> {
    let dims = rho.space().dims();
    match dims.as_slice() {
        [a, b] if a == b && *a >= 2 => Ok(*a),
        _ => Err(Error::arg(format!(
            "expected an operator on C^d (x) C^d, got {}",
            rho.space()
        ))),
    }
}

/// Weight of `omega^-` in the Werner twirl of `rho`: `tr[rho P_a] / tr[rho]`.
pub fn werner_weight(rho: &DensityOperator) -> Result<f64> {
    let d = two_factor_dim(rho)?;
    Ok(rho.expectation(&antisymmetric_projector(d)) / rho.trace())
}

/// Closed form of the U(x)U twirl:
/// `tr[rho P_a] omega^- + tr[rho P_s] omega^+`.
pub fn twirl_werner(rho: &DensityOperator) -> Result<DensityOperator> {
    let d = two_factor_dim(rho)?;
    let wa = rho.expectation(&antisymmetric_projector(d));
    let ws = rho.expectation(&symmetric_projector(d));
    let m = &werner_minus(d).scale(wa) + &werner_plus(d).scale(ws);
    Ok(DensityOperator::new_unchecked(m, rho.space().clone()))
}

/// Closed form of the U(x)U* twirl:
/// `f phi_d + (tr rho - f)(I - phi_d)/(d^2 - 1)` with `f = tr[rho phi_d]`.
pub fn twirl_isotropic(rho: &DensityOperator) -> Result<DensityOperator> {
    let d = two_factor_dim(rho)?;
    let phi = phi_projector(d);
    let f = rho.expectation(&phi);
    let rest =
        (&ComplexMatrix::identity(d * d) - &phi).scale((rho.trace() - f) / ((d * d - 1) as f64));
    Ok(DensityOperator::new_unchecked(
        &phi.scale(f) + &rest,
        rho.space().clone(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptReport {
    pub is_ppt: bool,
    pub min_eigenvalue: f64,
}

/// Partial transpose over the factors named in `cut`; PPT when its smallest
/// eigenvalue is at least `-1e-9 tr(rho)`.
pub fn ppt_check(rho: &DensityOperator, cut: &[&str]) -> Result<PptReport> {
    if cut.is_empty() {
        return Err(Error::arg("cut must name at least one factor"));
    }
    let gamma = rho.partial_transpose(cut)?;
    let min_eigenvalue = gamma.min_eigenvalue();
    Ok(PptReport {
        is_ppt: min_eigenvalue >= -PSD_TOL * rho.trace(),
        min_eigenvalue,
    })
}

fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Unit vector uniformly distributed on the sphere of `C^d`.
pub fn haar_random_pure(d: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    assert!(d >= 1, "dimension must be positive");
    loop {
        let v: Vec<Complex64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Complex Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_random_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    let qr = DMatrix::from_row_slice(d, d, g.as_slice()).qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 {
            rkk / rkk.norm()
        } else {
            ONE
        };
        for z in q.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    ComplexMatrix::from_nalgebra(&q)
}

/// `G G^dagger / tr` for a `dim x rank` Ginibre `G`.
pub fn random_density(
    space: HilbertFactorization,
    rank: usize,
    rng: &mut impl Rng,
) -> DensityOperator {
    let dim = space.total_dim();
    let g = ginibre(dim, rank.max(1), rng);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityOperator::new_unchecked(m.scale(1.0 / tr), space)
}

/// Random mixture of `terms` Haar product states on `A (x) B`.
pub fn random_separable(da: usize, db: usize, terms: usize, rng: &mut impl Rng) -> DensityOperator {
    let space = HilbertFactorization::bipartite(da, db);
    let mut acc = ComplexMatrix::zeros(da * db, da * db);
    let mut total = 0.0;
    for _ in 0..terms.max(1) {
        let a = haar_random_pure(da, rng);
        let b = haar_random_pure(db, rng);
        let w: f64 = rng.gen_range(0.05..1.0);
        let v: Vec<Complex64> = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| x * y))
            .collect();
        acc = &acc + &ComplexMatrix::projector(&v).scale(w);
        total += w;
    }
    DensityOperator::new_unchecked(acc.scale(1.0 / total), space)
}

/// Command-line addressable state: `kind=werner,d=3,mu=0.8`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    MaxEntangled {
        d: usize,
    },
    Werner {
        d: usize,
        mu: f64,
    },
    Isotropic {
        d: usize,
        f: f64,
    },
    ProductBasis {
        d: usize,
        i: usize,
        j: usize,
    },
    MaximallyMixed {
        d: usize,
    },
    /// `cos(theta)|00> + sin(theta)|11>`
    PureCosSin {
        theta: f64,
    },
    HorodeckiAlpha {
        alpha: f64,
    },
    File {
        path: PathBuf,
    },
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityOperator> {
        match self {
            StateSpec::MaxEntangled { d } => Ok(max_entangled(*d)?.0),
            StateSpec::Werner { d, mu } => Ok(werner(&WernerParam::new(*mu, *d)?)),
            StateSpec::Isotropic { d, f } => isotropic(*f, *d),
            StateSpec::ProductBasis { d, i, j } => product_basis(*d, *i, *j),
            StateSpec::MaximallyMixed { d } => {
                check_local_dim(*d)?;
                Ok(maximally_mixed(*d))
            }
            StateSpec::PureCosSin { theta } => Ok(pure_cos_sin(*theta).0),
            StateSpec::HorodeckiAlpha { alpha } => horodecki_alpha(*alpha),
            StateSpec::File { path } => io::read_density(path),
        }
    }

    pub fn file_path(&self) -> Option<&PathBuf> {
        match self {
            StateSpec::File { path } => Some(path),
            _ => None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::arg(format!("cannot parse {key}={value}")))
}

/// Accepts `pi/6`-style angles as well as plain numbers.
fn parse_angle(value: &str) -> Result<f64> {
    if let Some(rest) = value.strip_prefix("pi/") {
        let denom: f64 = parse_num("theta", rest)?;
        return Ok(PI / denom);
    }
    parse_num("theta", value)
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut kind = None;
        let mut kv = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::arg(format!("expected key=value, got {part:?}")))?;
            if k == "kind" {
                kind = Some(v.to_string());
            } else {
                kv.push((k.to_string(), v.to_string()));
            }
        }
        let kind = kind.ok_or_else(|| Error::arg(format!("state spec {s:?} has no kind=")))?;
        let get = |key: &str| kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let need =
            |key: &str| get(key).ok_or_else(|| Error::arg(format!("kind={kind} requires {key}=")));
        let allowed: &[&str] = match kind.as_str() {
            "max_entangled" | "maximally_mixed" | "mixed" => &["d"],
            "werner" => &["d", "mu"],
            "isotropic" => &["d", "f"],
            "product" | "product_basis" => &["d", "i", "j"],
            "pure" | "pure_cos_sin" => &["theta"],
            "horodecki" | "horodecki_alpha" => &["alpha"],
            "file" => &["path"],
            other => return Err(Error::arg(format!("unknown state kind {other:?}"))),
        };
        if let Some((k, _)) = kv.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(Error::arg(format!("kind={kind} does not take {k}=")));
        }
        let spec = match kind.as_str() {
            "max_entangled" => StateSpec::MaxEntangled {
                d: parse_num("d", need("d")?)?,
            },
            "maximally_mixed" | "mixed" => StateSpec::MaximallyMixed {
                d: parse_num("d", need("d")?)?,
            },
            "werner" => StateSpec::Werner {
                d: parse_num("d", need("d")?)?,
                mu: parse_num("mu", need("mu")?)?,
            },
            "isotropic" => StateSpec::Isotropic {
                d: parse_num("d", need("d")?)?,
                f: parse_num("f", need("f")?)?,
            },
            "product" | "product_basis" => StateSpec::ProductBasis {
                d: parse_num("d", need("d")?)?,
                i: get("i")
                    .map(|v| parse_num("i", v))
                    .transpose()?
                    .unwrap_or(0),
                j: get("j")
                    .map(|v| parse_num("j", v))
                    .transpose()?
                    .unwrap_or(0),
            },
            "pure" | "pure_cos_sin" => StateSpec::PureCosSin {
                theta: parse_angle(need("theta")?)?,
            },
            "horodecki" | "horodecki_alpha" => StateSpec::HorodeckiAlpha {
                alpha: parse_num("alpha", need("alpha")?)?,
            },
            "file" => StateSpec::File {
                path: PathBuf::from(need("path")?),
            },
            _ => unreachable!(),
        };
        Ok(spec)
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::MaxEntangled { d } => write!(f, "kind=max_entangled,d={d}"),
            StateSpec::Werner { d, mu } => write!(f, "kind=werner,d={d},mu={mu}"),
            StateSpec::Isotropic { d, f: fid } => write!(f, "kind=isotropic,d={d},f={fid}"),
            StateSpec::ProductBasis { d, i, j } => {
                write!(f, "kind=product_basis,d={d},i={i},j={j}")
            }
            StateSpec::MaximallyMixed { d } => write!(f, "kind=maximally_mixed,d={d}"),
            StateSpec::PureCosSin { theta } => write!(f, "kind=pure_cos_sin,theta={theta}"),
            StateSpec::HorodeckiAlpha { alpha } => write!(f, "kind=horodecki_alpha,alpha={alpha}"),
            StateSpec::File { path } => write!(f, "kind=file,path={}", path.display()),
        }
    }
}
