use std::time::{Duration, Instant};

use irgcouple_core::{Deadline, SolveBudget};

/// Wall-clock deadline for a solver call.
#[derive(Debug, Clone, Copy)]
pub struct WallDeadline {
    end: Option<Instant>,
}

impl WallDeadline {
    pub fn start(budget: &SolveBudget) -> Self {
        Self {
            end: budget
                .time_limit
                .map(|s| Instant::now() + Duration::from_secs_f64(s)),
        }
    }
}

impl Deadline for WallDeadline {
    fn expired(&self) -> bool {
        self.end.is_some_and(|e| Instant::now() >= e)
    }
}
