use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-activation query behavior of one user.
///
/// On each activation the user emits their rare repeated query with
/// probability `repeat`, otherwise a fresh one-off query with probability
/// `background`, otherwise nothing.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserStream {
    #[serde(default)]
    pub repeat: f64,
    #[serde(default)]
    pub background: f64,
}

impl UserStream {
    pub const SILENT: Self = Self { repeat: 0.0, background: 0.0 };

    fn validate(&self, who: &str) -> Result<()> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !ok(self.repeat) || !ok(self.background) || self.repeat + self.background > 1.0 + 1e-12 {
            return Err(Error::Parameter(format!(
                "{who}: probabilities must lie in [0,1] and sum to at most 1 (repeat {}, background {})",
                self.repeat, self.background
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emission {
    Repeated,
    Background,
}

/// Query streams for the whole community: a default plus per-user overrides.
///
/// JSON form: `{"default": {"repeat": 0, "background": 0.5}, "users": {"3": {"repeat": 1}}}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryModel {
    #[serde(default)]
    pub default: UserStream,
    #[serde(default)]
    pub users: BTreeMap<usize, UserStream>,
}

impl QueryModel {
    /// Every user uses `stream`.
    pub fn uniform(stream: UserStream) -> Self {
        Self { default: stream, users: BTreeMap::new() }
    }

    /// `owner` reissues its rare query on every activation; everyone else
    /// emits background queries with probability `background`.
    pub fn heavy_repeater(owner: usize, background: f64) -> Self {
        let mut users = BTreeMap::new();
        users.insert(owner, UserStream { repeat: 1.0, background: 0.0 });
        Self { default: UserStream { repeat: 0.0, background }, users }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        self.default.validate("default stream")?;
        for (user, stream) in &self.users {
            stream.validate(&format!("user {user}"))?;
        }
        Ok(())
    }

    pub fn stream_for(&self, user: usize) -> UserStream {
        self.users.get(&user).copied().unwrap_or(self.default)
    }

    pub(crate) fn draw<R: Rng>(&self, user: usize, rng: &mut R) -> Option<Emission> {
        let s = self.stream_for(user);
        if s.repeat == 0.0 && s.background == 0.0 {
            return None;
        }
        let u: f64 = rng.gen();
        if u < s.repeat {
            Some(Emission::Repeated)
        } else if u < s.repeat + s.background {
            Some(Emission::Background)
        } else {
            None
        }
    }
}
