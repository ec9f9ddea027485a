use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Cooperative wall-clock limit checked by the long-running generators.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget { deadline: None }
    }

    pub fn with_limit(limit: Option<Duration>) -> Budget {
        Budget {
            deadline: limit.map(|d| Instant::now() + d),
        }
    }

    pub fn check(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Error::Timeout),
            _ => Ok(()),
        }
    }
}
