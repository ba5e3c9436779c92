use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Result, VemError};
use crate::mesh::Vertex2;
use crate::vemlocal::DiffusionTensor;

/// Identifier of a manufactured test case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CaseId {
    /// Exponential boundary layer in x with `K = diag(8e-3, 1)`.
    Tc1,
    /// `sin(2 pi x) sin(80 pi y)` with `K = diag(1, 6.25e-4)`.
    Tc2,
    /// Polynomial of the given degree with `K = diag(8e-3, 1)`.
    Patch(usize),
}

impl CaseId {
    /// Orders studied by default.
    pub fn default_orders(self) -> Vec<usize> {
        match self {
            CaseId::Tc1 => vec![1, 3],
            CaseId::Tc2 => vec![1, 2],
            CaseId::Patch(k) => vec![k],
        }
    }

    /// Name usable in file names.
    pub fn file_stem(self) -> String {
        match self {
            CaseId::Patch(k) => format!("patch{k}"),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseId::Tc1 => f.write_str("tc1"),
            CaseId::Tc2 => f.write_str("tc2"),
            CaseId::Patch(k) => write!(f, "patch:{k}"),
        }
    }
}

impl FromStr for CaseId {
    type Err = VemError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "tc1" => return Ok(CaseId::Tc1),
            "tc2" => return Ok(CaseId::Tc2),
            _ => {}
        }
        let degree = lower.strip_prefix("patch:").or_else(|| lower.strip_prefix("patch_"));
        match degree.map(str::parse::<usize>) {
            Some(Ok(k)) if (1..=3).contains(&k) => Ok(CaseId::Patch(k)),
            Some(_) => Err(VemError::InvalidInput(format!("patch degree in '{s}' must be 1, 2 or 3"))),
            None => Err(VemError::InvalidInput(format!("unknown case '{s}' (expected tc1, tc2 or patch:<k>)"))),
        }
    }
}

impl TryFrom<String> for CaseId {
    type Error = VemError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CaseId> for String {
    fn from(c: CaseId) -> String {
        c.to_string()
    }
}

const TC1_K: [f64; 2] = [8e-3, 1.0];
const TC2_K: [f64; 2] = [1.0, 6.25e-4];

/// Manufactured solution with its data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestCase {
    pub id: CaseId,
    /// Diagonal of the constant diffusion tensor.
    pub k_diag: [f64; 2],
}

pub fn testcase(id: CaseId) -> TestCase {
    let k_diag = match id {
        CaseId::Tc2 => TC2_K,
        _ => TC1_K,
    };
    TestCase { id, k_diag }
}

impl TestCase {
    pub fn name(&self) -> String {
        self.id.to_string()
    }

    pub fn tensor(&self) -> DiffusionTensor {
        DiffusionTensor::diagonal(self.k_diag[0], self.k_diag[1]).expect("positive diagonal")
    }

    /// Whether the solution vanishes on the boundary of the unit square.
    pub fn homogeneous(&self) -> bool {
        !matches!(self.id, CaseId::Patch(_))
    }

    /// `||sqrt(K) grad u||_{L2}` over the unit square, when known in closed form.
    pub fn exact_energy_norm(&self) -> Option<f64> {
        match self.id {
            CaseId::Tc2 => Some(PI * 2f64.sqrt()),
            _ => None,
        }
    }

    /// Oscillation wavelengths of the data in x and y, if oscillatory.
    pub fn wavelength(&self) -> Option<[f64; 2]> {
        match self.id {
            CaseId::Tc2 => Some([1.0, 1.0 / 40.0]),
            _ => None,
        }
    }

    pub fn u(&self, p: Vertex2) -> f64 {
        match self.id {
            CaseId::Tc1 => {
                let (g, _, _) = tc1_g(p.x);
                let (h, _, _) = tc1_h(p.y);
                1e-2 * g * h
            }
            CaseId::Tc2 => (2.0 * PI * p.x).sin() * (80.0 * PI * p.y).sin(),
            CaseId::Patch(k) => patch_terms(k).iter().map(|t| t.c * p.x.powi(t.ax) * p.y.powi(t.ay)).sum(),
        }
    }

    pub fn grad_u(&self, p: Vertex2) -> [f64; 2] {
        match self.id {
            CaseId::Tc1 => {
                let (g, g1, _) = tc1_g(p.x);
                let (h, h1, _) = tc1_h(p.y);
                [1e-2 * g1 * h, 1e-2 * g * h1]
            }
            CaseId::Tc2 => {
                let (a, b) = (2.0 * PI, 80.0 * PI);
                [a * (a * p.x).cos() * (b * p.y).sin(), b * (a * p.x).sin() * (b * p.y).cos()]
            }
            CaseId::Patch(k) => {
                let mut g = [0.0; 2];
                for t in patch_terms(k) {
                    if t.ax > 0 {
                        g[0] += t.c * t.ax as f64 * p.x.powi(t.ax - 1) * p.y.powi(t.ay);
                    }
                    if t.ay > 0 {
                        g[1] += t.c * t.ay as f64 * p.x.powi(t.ax) * p.y.powi(t.ay - 1);
                    }
                }
                g
            }
        }
    }

    /// `-div(K grad u)`.
    pub fn f(&self, p: Vertex2) -> f64 {
        let [k1, k2] = self.k_diag;
        match self.id {
            CaseId::Tc1 => {
                let (g, _, g2) = tc1_g(p.x);
                let (h, _, h2) = tc1_h(p.y);
                -1e-2 * (k1 * g2 * h + k2 * g * h2)
            }
            CaseId::Tc2 => (k1 * 4.0 * PI * PI + k2 * 6400.0 * PI * PI) * self.u(p),
            CaseId::Patch(k) => {
                let mut s = 0.0;
                for t in patch_terms(k) {
                    if t.ax >= 2 {
                        s -= k1 * t.c * (t.ax * (t.ax - 1)) as f64 * p.x.powi(t.ax - 2) * p.y.powi(t.ay);
                    }
                    if t.ay >= 2 {
                        s -= k2 * t.c * (t.ay * (t.ay - 1)) as f64 * p.x.powi(t.ax) * p.y.powi(t.ay - 2);
                    }
                }
                s
            }
        }
    }

    /// `grad u . K grad u`.
    pub fn energy_density(&self, p: Vertex2) -> f64 {
        let [gx, gy] = self.grad_u(p);
        self.k_diag[0] * gx * gx + self.k_diag[1] * gy * gy
    }
}

/// `g(x) = x(1-x)(e^{20x}-1)` and its first two derivatives.
fn tc1_g(x: f64) -> (f64, f64, f64) {
    let e = (20.0 * x).exp();
    let q = x * (1.0 - x);
    let g = q * (e - 1.0);
    let g1 = (1.0 - 2.0 * x) * (e - 1.0) + 20.0 * q * e;
    let g2 = -2.0 * (e - 1.0) + 40.0 * (1.0 - 2.0 * x) * e + 400.0 * q * e;
    (g, g1, g2)
}

/// `h(y) = y(1-y)` and its first two derivatives.
fn tc1_h(y: f64) -> (f64, f64, f64) {
    (y * (1.0 - y), 1.0 - 2.0 * y, -2.0)
}

struct Term {
    c: f64,
    ax: i32,
    ay: i32,
}

/// Terms of the degree-`k` patch polynomial; every monomial of degree <= k appears.
fn patch_terms(k: usize) -> Vec<Term> {
    let mut terms = vec![Term { c: 0.25, ax: 0, ay: 0 }];
    for d in 1..=k {
        for ay in 0..=d {
            let sign = if (d + ay) % 2 == 0 { 1.0 } else { -1.0 };
            terms.push(Term { c: sign * (1.0 + 0.5 * ay as f64) / d as f64, ax: (d - ay) as i32, ay: ay as i32 });
        }
    }
    terms
}
