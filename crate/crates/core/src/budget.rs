//! Search budgets shared by the exact solvers.

/// Limits for one solver call. A solver that stops early reports
/// [`Outcome::LowerUpperOnly`] and a certified bracket instead of a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveBudget {
    pub node_limit: u64,
    /// Wall-clock limit in seconds. Only honoured when the caller passes a
    /// real [`Deadline`]; the core crate has no clock.
    pub time_limit: Option<f64>,
}

impl SolveBudget {
    pub fn nodes(node_limit: u64) -> Self {
        Self {
            node_limit,
            time_limit: None,
        }
    }

    pub fn unlimited() -> Self {
        Self::nodes(u64::MAX)
    }
}

impl Default for SolveBudget {
    fn default() -> Self {
        Self::nodes(50_000_000)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Exact,
    LowerUpperOnly,
}

/// Source of wall-clock expiry, polled every few thousand search nodes.
pub trait Deadline {
    fn expired(&self) -> bool;
}

/// Never expires.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoDeadline;

impl Deadline for NoDeadline {
    fn expired(&self) -> bool {
        false
    }
}

/// Node counter checked against a budget and a deadline.
pub(crate) struct Meter<'a> {
    pub nodes: u64,
    limit: u64,
    deadline: &'a dyn Deadline,
    stopped: bool,
}

impl<'a> Meter<'a> {
    pub fn new(budget: &SolveBudget, deadline: &'a dyn Deadline) -> Self {
        Self {
            nodes: 0,
            limit: budget.node_limit,
            deadline,
            stopped: false,
        }
    }

    /// Count one node; returns false once the budget is spent.
    #[inline]
    pub fn tick(&mut self) -> bool {
        if self.stopped {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.limit || (self.nodes & 0xfff == 0 && self.deadline.expired()) {
            self.stopped = true;
        }
        !self.stopped
    }

    pub fn stopped(&self) -> bool {
        self.stopped
    }
}
