//! End-to-end analysis: spec → rotating frame → blocks → dressing → report.

use crate::darkstate::{analyze, DarkStateReport};
use crate::dressing::{dress, DressedSystem, Tolerances};
use crate::error::Error;
use crate::par;
use crate::partition::{partition, BlockHamiltonian, PartitionError};
use crate::system_model::{to_rotating_frame, LevelId, RotatingHamiltonian, SystemSpec};
use crate::verifier::verify_report;

/// Every intermediate of one analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub hamiltonian: RotatingHamiltonian,
    pub block: BlockHamiltonian,
    pub dressed: DressedSystem,
    pub report: DarkStateReport,
}

/// `upper` overrides the spec's own partition hint.
pub fn run(spec: &SystemSpec, upper: Option<&[LevelId]>, tol: &Tolerances) -> Result<Analysis, Error> {
    tol.validate()?;
    let upper = upper.or(spec.upper_hint()).ok_or(PartitionError::EmptyUpper)?;
    let hamiltonian = to_rotating_frame(spec)?;
    let block = partition(&hamiltonian, upper)?;
    let dressed = dress(&block, tol)?;
    let report = analyze(&dressed, tol);
    Ok(Analysis { hamiltonian, block, dressed, report })
}

/// [`run`], then the dynamical check; the result is stored in `report.verify`.
pub fn run_verified(
    spec: &SystemSpec,
    upper: Option<&[LevelId]>,
    tol: &Tolerances,
    times: Option<&[f64]>,
) -> Result<Analysis, Error> {
    let mut a = run(spec, upper, tol)?;
    a.report.verify = Some(verify_report(&a.hamiltonian, &a.report, times)?);
    Ok(a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub spec: SystemSpec,
    pub upper: Option<Vec<LevelId>>,
    pub tol: Tolerances,
}

impl Job {
    pub fn new(spec: SystemSpec, upper: Option<Vec<LevelId>>) -> Self {
        Job { spec, upper, tol: Tolerances::default() }
    }

    fn run(&self) -> Result<Analysis, Error> {
        run(&self.spec, self.upper.as_deref(), &self.tol)
    }
}

/// Independent systems analysed across the thread pool; output order
/// follows `jobs`.
pub fn analyze_batch(jobs: &[Job]) -> Vec<Result<Analysis, Error>> {
    par::map(jobs, Job::run)
}

pub fn analyze_batch_sequential(jobs: &[Job]) -> Vec<Result<Analysis, Error>> {
    par::map_sequential(jobs, Job::run)
}
