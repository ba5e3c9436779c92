use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::cases::{testcase, CaseId, TestCase};
use super::error::{convergence_rate, energy_error};
use crate::assembly::{
    apply_dirichlet, apply_dirichlet_homogeneous, assemble, boundary_values, solve, stab_consistency_ratio,
    AssemblyOptions, DataQuadrature, SolveReport,
};
use crate::error::{Result, VemError};
use crate::mesh::{MeshFamily, MeshFamilySpec, PolyMesh, DEFAULT_LLOYD_ITERS, DEFAULT_SEED};
use crate::vemlocal::{EnlargementPolicy, MethodKind};

/// Outcome of one solve on one mesh.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingleRun {
    pub case: CaseId,
    pub method: MethodKind,
    pub order: usize,
    pub n_cells: usize,
    pub h_max: f64,
    pub n_dofs: usize,
    pub n_free: usize,
    pub e_star: f64,
    /// `||A^S||_inf / ||A^Pi||_inf`, standard method only.
    pub ratio: Option<f64>,
    /// Number of cells using each enlargement (stabilization-free method only).
    pub ell_counts: BTreeMap<usize, usize>,
    pub report: SolveReport,
}

/// Data quadrature for a test case: exactness `2k + 6`, refined for oscillatory data.
pub fn data_quadrature(case: &TestCase) -> DataQuadrature {
    DataQuadrature { wavelength: case.wavelength(), ..DataQuadrature::default() }
}

/// Assemble, solve and measure one configuration.
pub fn run_single(
    mesh: &PolyMesh,
    case: &TestCase,
    method: MethodKind,
    order: usize,
    policy: EnlargementPolicy,
) -> Result<SingleRun> {
    let data = data_quadrature(case);
    let opts = AssemblyOptions { policy, data };
    let f = |p| case.f(p);
    let system = assemble(mesh, order, method, &case.tensor(), &f, &opts)?;
    let reduced = if case.homogeneous() {
        apply_dirichlet_homogeneous(&system)
    } else {
        apply_dirichlet(&system, &boundary_values(&system.dofs, |p| case.u(p)))
    };
    let report = solve(&reduced)?;
    let err = energy_error(mesh, &system.dofs, &report.solution, case, &system.pi_star, &data)?;
    let ratio = match method {
        MethodKind::StandardVem => Some(stab_consistency_ratio(&system.a_s, &system.a_pi)?),
        MethodKind::E2vem => None,
    };
    let mut ell_counts = BTreeMap::new();
    if method == MethodKind::E2vem {
        for &l in &system.ell {
            *ell_counts.entry(l).or_insert(0) += 1;
        }
    }
    Ok(SingleRun {
        case: case.id,
        method,
        order,
        n_cells: mesh.num_cells(),
        h_max: mesh.h_max(),
        n_dofs: system.dofs.total(),
        n_free: reduced.free.len(),
        e_star: err.e_star,
        ratio,
        ell_counts,
        report,
    })
}

/// Parameters of a convergence study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyConfig {
    pub case: CaseId,
    pub methods: Vec<MethodKind>,
    pub orders: Vec<usize>,
    pub families: Vec<MeshFamily>,
    /// Number of ladder levels per family; `None` uses the default ladder.
    pub levels: Option<usize>,
    pub seed: u64,
    pub lloyd_iters: usize,
    pub policy: EnlargementPolicy,
}

impl StudyConfig {
    pub fn new(case: CaseId) -> Self {
        Self {
            case,
            methods: MethodKind::ALL.to_vec(),
            orders: case.default_orders(),
            families: vec![MeshFamily::Cartesian, MeshFamily::Voronoi],
            levels: None,
            seed: DEFAULT_SEED,
            lloyd_iters: DEFAULT_LLOYD_ITERS,
            policy: EnlargementPolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.orders.is_empty() || self.orders.iter().any(|k| !(1..=3).contains(k)) {
            return Err(VemError::InvalidInput(format!("orders must be a non-empty subset of {{1,2,3}}, got {:?}", self.orders)));
        }
        if self.methods.is_empty() || self.families.is_empty() {
            return Err(VemError::InvalidInput("at least one method and one mesh family are required".into()));
        }
        if self.levels == Some(0) {
            return Err(VemError::InvalidInput("levels must be at least 1".into()));
        }
        Ok(())
    }

    /// Mesh resolutions of `family`, extended geometrically when more levels than the default
    /// ladder are requested.
    pub fn ladder(&self, family: MeshFamily) -> Vec<usize> {
        let mut ladder = family.default_ladder().to_vec();
        let factor = match family {
            MeshFamily::Cartesian => 2,
            MeshFamily::Voronoi => 4,
        };
        if let Some(n) = self.levels {
            while ladder.len() < n {
                let last = *ladder.last().unwrap();
                ladder.push(last * factor);
            }
            ladder.truncate(n);
        }
        ladder
    }

    fn mesh_spec(&self, family: MeshFamily, resolution: usize) -> MeshFamilySpec {
        match family {
            MeshFamily::Cartesian => MeshFamilySpec::cartesian(resolution),
            MeshFamily::Voronoi => MeshFamilySpec::voronoi(resolution, self.seed, self.lloyd_iters),
        }
    }
}

/// One row of a study: a (family, method, order, level) combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub family: MeshFamily,
    pub case: CaseId,
    pub method: MethodKind,
    pub order: usize,
    /// 1-based refinement level.
    pub level: usize,
    pub resolution: usize,
    pub h_max: f64,
    pub n_dofs: usize,
    pub e_star: Option<f64>,
    /// Rate from the previous level of the same series.
    pub alpha: Option<f64>,
    pub ratio: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub config_case: CaseId,
    pub rows: Vec<StudyRow>,
}

pub const STATUS_OK: &str = "ok";

impl StudyResult {
    /// Rows of one series, in level order.
    pub fn series(&self, family: MeshFamily, method: MethodKind, order: usize) -> Vec<&StudyRow> {
        self.rows.iter().filter(|r| r.family == family && r.method == method && r.order == order).collect()
    }

    /// Rate over the last two levels of a series.
    pub fn final_alpha(&self, family: MeshFamily, method: MethodKind, order: usize) -> Option<f64> {
        self.series(family, method, order).last().and_then(|r| r.alpha)
    }

    /// Arithmetic mean over the ladder of the standard method's norm ratio.
    pub fn average_ratio(&self, family: MeshFamily, order: usize) -> Option<f64> {
        let ratios: Vec<f64> =
            self.series(family, MethodKind::StandardVem, order).iter().filter_map(|r| r.ratio).collect();
        (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64)
    }

    /// `(h_max, e_V, e_W)` per level for one family and order.
    pub fn method_pairs(&self, family: MeshFamily, order: usize) -> Vec<(f64, Option<f64>, Option<f64>)> {
        let v = self.series(family, MethodKind::StandardVem, order);
        let w = self.series(family, MethodKind::E2vem, order);
        let levels = v.len().max(w.len());
        (0..levels)
            .map(|i| {
                let h = v.get(i).or(w.get(i)).map(|r| r.h_max).unwrap_or(f64::NAN);
                (h, v.get(i).and_then(|r| r.e_star), w.get(i).and_then(|r| r.e_star))
            })
            .collect()
    }

    pub fn families(&self) -> Vec<MeshFamily> {
        let mut f: Vec<_> = self.rows.iter().map(|r| r.family).collect();
        f.sort();
        f.dedup();
        f
    }

    pub fn orders(&self) -> Vec<usize> {
        let mut o: Vec<_> = self.rows.iter().map(|r| r.order).collect();
        o.sort();
        o.dedup();
        o
    }
}

/// Run every (family, level, order, method) combination of `config`.
///
/// Solver failures are recorded in the row status and the study continues. Rows are produced
/// in a fixed order: family, order, method, level.
pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    let case = testcase(config.case);
    let mut rows = Vec::new();
    for &family in &config.families {
        let ladder = config.ladder(family);
        let mut results: BTreeMap<(usize, MethodKind, usize), StudyRow> = BTreeMap::new();
        for (li, &resolution) in ladder.iter().enumerate() {
            let mesh = config.mesh_spec(family, resolution).generate()?;
            for &order in &config.orders {
                for &method in &config.methods {
                    let mut row = StudyRow {
                        family,
                        case: config.case,
                        method,
                        order,
                        level: li + 1,
                        resolution,
                        h_max: mesh.h_max(),
                        n_dofs: 0,
                        e_star: None,
                        alpha: None,
                        ratio: None,
                        status: STATUS_OK.into(),
                    };
                    match run_single(&mesh, &case, method, order, config.policy) {
                        Ok(run) => {
                            row.n_dofs = run.n_dofs;
                            row.e_star = Some(run.e_star);
                            row.ratio = run.ratio;
                        }
                        Err(e) if e.is_solver_failure() => row.status = e.to_string(),
                        Err(e) => return Err(e),
                    }
                    results.insert((order, method, li), row);
                }
            }
        }
        for &order in &config.orders {
            for &method in &config.methods {
                let mut prev: Option<(f64, f64)> = None;
                for li in 0..ladder.len() {
                    let mut row = results.remove(&(order, method, li)).expect("row computed");
                    if let (Some((e0, h0)), Some(e1)) = (prev, row.e_star) {
                        row.alpha = convergence_rate(e0, e1, h0, row.h_max).ok();
                    }
                    prev = row.e_star.map(|e| (e, row.h_max));
                    rows.push(row);
                }
            }
        }
    }
    Ok(StudyResult { config_case: config.case, rows })
}

/// `||A^S||_inf / ||A^Pi||_inf` of the standard method on every level of `family`, without solving.
pub fn ratio_ladder(config: &StudyConfig, family: MeshFamily, order: usize) -> Result<Vec<(f64, f64)>> {
    config.validate()?;
    let case = testcase(config.case);
    let opts = AssemblyOptions { policy: config.policy, data: data_quadrature(&case) };
    let zero = |_| 0.0;
    config
        .ladder(family)
        .into_iter()
        .map(|resolution| {
            let mesh = config.mesh_spec(family, resolution).generate()?;
            let sys = assemble(&mesh, order, MethodKind::StandardVem, &case.tensor(), &zero, &opts)?;
            Ok((mesh.h_max(), stab_consistency_ratio(&sys.a_s, &sys.a_pi)?))
        })
        .collect()
}
