use std::time::{Duration, Instant};

/// Monotonic clock that only runs while solver-owned work is being done.
#[derive(Debug)]
pub(crate) struct WorkClock {
    accumulated: Duration,
    running_since: Option<Instant>,
}

impl WorkClock {
    pub fn started() -> Self {
        Self {
            accumulated: Duration::ZERO,
            running_since: Some(Instant::now()),
        }
    }

    pub fn pause(&mut self) {
        if let Some(t) = self.running_since.take() {
            self.accumulated += t.elapsed();
        }
    }

    pub fn resume(&mut self) {
        if self.running_since.is_none() {
            self.running_since = Some(Instant::now());
        }
    }

    pub fn elapsed_s(&self) -> f64 {
        let running = self.running_since.map_or(Duration::ZERO, |t| t.elapsed());
        (self.accumulated + running).as_secs_f64()
    }
}

/// Collects samples on a stride and decides termination.
#[derive(Debug)]
pub(crate) struct Recorder {
    pub clock: WorkClock,
    every: usize,
    samples: Vec<super::Sample>,
}

impl Recorder {
    pub fn new(every: usize) -> Self {
        Self {
            clock: WorkClock::started(),
            every,
            samples: Vec::new(),
        }
    }

    pub fn due(&self, k: usize) -> bool {
        k % self.every == 0
    }

    /// Appends a sample unless one was already taken at iteration `k`.
    /// Must be called with the clock paused.
    pub fn push(&mut self, k: usize, objective: f64, support_size: usize, certificate_linf: f64) {
        if self.samples.last().is_some_and(|s| s.k == k) {
            return;
        }
        self.samples.push(super::Sample {
            k,
            wall_time_s: self.clock.elapsed_s(),
            objective,
            support_size,
            certificate_linf,
        });
    }

    pub fn finish(self, reason: super::TerminalReason) -> super::Trajectory {
        super::Trajectory {
            samples: self.samples,
            terminal_reason: reason,
        }
    }
}

/// Termination check shared by the solvers, in documented priority order.
pub(crate) fn stop_reason(
    kkt: bool,
    k: usize,
    config: &super::SolverConfig,
    clock: &WorkClock,
) -> Option<super::TerminalReason> {
    if kkt {
        Some(super::TerminalReason::KktConverged)
    } else if k >= config.max_iter {
        Some(super::TerminalReason::MaxIter)
    } else if clock.elapsed_s() >= config.time_budget_s {
        Some(super::TerminalReason::BudgetExhausted)
    } else {
        None
    }
}
