use super::{Algorithm, Deadline, PlanProblem, PlanResult, PlanStatus};
use crate::cost::entered_cells;
use crate::error::{Error, Result};

/// Straight segment from start to goal; `no_path` if it crosses an obstacle.
pub fn plan_ptp(problem: &PlanProblem) -> Result<PlanResult> {
    problem.validate()?;
    let clock = Deadline::new(problem.deadline);
    if !problem.endpoints_free()? {
        return Ok(PlanResult::empty(Algorithm::Ptp, PlanStatus::InfeasibleStartGoal));
    }
    let mut result = match entered_cells(problem.start, problem.goal, problem.maps) {
        Ok(_) => {
            let mut path = vec![problem.state(problem.start)];
            if problem.goal != problem.start {
                path.push(problem.state(problem.goal));
            }
            PlanResult::solved(Algorithm::Ptp, path, problem)?
        }
        Err(Error::InfeasibleTransition { .. }) => PlanResult::empty(Algorithm::Ptp, PlanStatus::NoPath),
        Err(e) => return Err(e),
    };
    result.elapsed_s = clock.elapsed_s();
    Ok(result)
}
