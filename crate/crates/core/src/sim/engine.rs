//! Discrete-time execution of the P2P UPIR protocols over a configuration.
//!
//! Users are points, communication spaces are per-line FIFO queues. In every
//! global step each user activates once, in a seeded random order, and runs
//! one round of the protocol:
//!
//! 1. pick one of its `r` lines uniformly;
//! 2. write back any server answers it holds for that line, then scan the
//!    queue: forward queries addressed to it to the server (the answer is
//!    held until its next visit to the same line), remove answers to its own
//!    queries, leave the rest in place;
//! 3. if it has a query, address it to another point of the line (or, under
//!    UPIR 2, to itself with probability `x`) and append it to the queue.
//!
//! Messages written during a step are only acted on from the next step on, so
//! every query spends at least one step in a queue.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{Emission, QueryModel};
use super::trace::{
    Action, CommunityEvent, ProtocolKind, QueryId, ServerRecord, SimulationTrace, TraceParams,
    TruthRecord,
};
use crate::error::{Error, Result};
use crate::incidence::Configuration;

/// Self-submission probability that spreads a user's queries uniformly over
/// its closed neighborhood: `1 / (r(k-1) + 1)`.
pub fn calibrated_self_submission(config: &Configuration) -> f64 {
    1.0 / (config.r() * (config.k() - 1) + 1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Protocol {
    Upir1,
    /// UPIR 2 with the given self-submission probability.
    Upir2 { self_submission: f64 },
}

impl Protocol {
    pub fn upir2_calibrated(config: &Configuration) -> Self {
        Protocol::Upir2 { self_submission: calibrated_self_submission(config) }
    }

    pub fn kind(&self) -> ProtocolKind {
        match self {
            Protocol::Upir1 => ProtocolKind::Upir1,
            Protocol::Upir2 { .. } => ProtocolKind::Upir2,
        }
    }

    pub fn self_submission(&self) -> Option<f64> {
        match *self {
            Protocol::Upir1 => None,
            Protocol::Upir2 { self_submission } => Some(self_submission),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.self_submission() {
            Some(x) if !(0.0..=1.0).contains(&x) => Err(Error::Parameter(format!(
                "self-submission must lie in [0,1] (got {x})"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageKind {
    Query,
    Answer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub kind: MessageKind,
    pub query_id: QueryId,
    /// Ground truth; never shown to the server.
    pub owner: usize,
    /// Set for queries only.
    pub addressee: Option<usize>,
    pub payload: String,
    /// Step in which the message was written.
    pub written_at: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunicationSpace {
    pub line: usize,
    pub queue: VecDeque<Message>,
}

/// A community of users running the protocol on a shared configuration.
#[derive(Debug, Clone)]
pub struct Community<'a> {
    config: &'a Configuration,
    model: QueryModel,
    spaces: Vec<CommunicationSpace>,
    user_rngs: Vec<ChaCha8Rng>,
    scheduler: ChaCha8Rng,
    step: u64,
    next_background: u64,
    /// Server answers each proxy holds until its next visit to the line.
    pending_answers: Vec<Vec<(usize, Message)>>,
    trace: SimulationTrace,
}

/// Maps users onto the points of `config` with empty communication spaces.
pub fn init_community<'a>(
    config: &'a Configuration,
    model: QueryModel,
    seed: u64,
) -> Result<Community<'a>> {
    Community::new(config, model, seed)
}

impl<'a> Community<'a> {
    pub fn new(config: &'a Configuration, model: QueryModel, seed: u64) -> Result<Self> {
        model.validate()?;
        let v = config.point_count();
        let stream = |s: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            rng
        };
        let spaces = (0..config.line_count())
            .map(|line| CommunicationSpace { line, queue: VecDeque::new() })
            .collect();
        let params = TraceParams {
            protocol: None,
            self_submission: None,
            steps: 0,
            seed,
            point_count: v,
            line_count: config.line_count(),
        };
        Ok(Self {
            config,
            model,
            spaces,
            user_rngs: (0..v as u64).map(|u| stream(u + 1)).collect(),
            scheduler: stream(0),
            step: 0,
            next_background: v as u64,
            pending_answers: vec![Vec::new(); v],
            trace: SimulationTrace::new(params),
        })
    }

    pub fn config(&self) -> &'a Configuration {
        self.config
    }

    pub fn user_count(&self) -> usize {
        self.config.point_count()
    }

    pub fn spaces(&self) -> &[CommunicationSpace] {
        &self.spaces
    }

    /// Index of the current global step.
    pub fn current_step(&self) -> u64 {
        self.step
    }

    pub fn trace(&self) -> &SimulationTrace {
        &self.trace
    }

    pub fn into_trace(self) -> SimulationTrace {
        self.trace
    }

    pub fn query_model(&self) -> &QueryModel {
        &self.model
    }

    pub fn set_query_model(&mut self, model: QueryModel) -> Result<()> {
        model.validate()?;
        self.model = model;
        Ok(())
    }

    /// The fixed id of `user`'s rare repeated query.
    pub fn repeated_query_id(user: usize) -> QueryId {
        QueryId(user as u64)
    }

    /// Answers obtained by proxies but not yet written back to a line.
    pub fn pending_answers(&self) -> usize {
        self.pending_answers.iter().map(Vec::len).sum()
    }

    /// Queries sitting in some queue, not yet forwarded.
    pub fn in_flight_queries(&self) -> usize {
        self.spaces
            .iter()
            .flat_map(|s| &s.queue)
            .filter(|m| m.kind == MessageKind::Query)
            .count()
    }

    pub fn step_upir1(&mut self, user: usize) -> Result<()> {
        self.step_user(user, Protocol::Upir1)
    }

    pub fn step_upir2(&mut self, user: usize, self_submission: f64) -> Result<()> {
        self.step_user(user, Protocol::Upir2 { self_submission })
    }

    /// One protocol round for a single user within the current step.
    pub fn step_user(&mut self, user: usize, protocol: Protocol) -> Result<()> {
        protocol.validate()?;
        self.config.check_point(user)?;
        self.activate(user, protocol);
        Ok(())
    }

    /// Runs `steps` global steps, activating every user once per step.
    pub fn advance(&mut self, protocol: Protocol, steps: u64) -> Result<()> {
        protocol.validate()?;
        if steps == 0 {
            return Err(Error::Parameter("steps must be at least 1".into()));
        }
        for _ in 0..steps {
            self.advance_one(protocol);
        }
        Ok(())
    }

    pub(crate) fn advance_one(&mut self, protocol: Protocol) {
        self.trace.params.protocol = Some(protocol.kind());
        self.trace.params.self_submission = protocol.self_submission();
        let mut order: Vec<usize> = (0..self.user_count()).collect();
        order.shuffle(&mut self.scheduler);
        for user in order {
            self.activate(user, protocol);
        }
        self.step += 1;
        self.trace.params.steps = self.step;
    }

    fn activate(&mut self, user: usize, protocol: Protocol) {
        let step = self.step;
        let rng = &mut self.user_rngs[user];
        let through = self.config.lines_through(user);
        let line = through[rng.gen_range(0..through.len())];
        let events = &mut self.trace.events;
        events.push(CommunityEvent { step, user, line, action: Action::Scan });

        // answers fetched on an earlier visit to this line go back now
        let held = &mut self.pending_answers[user];
        let mut answers: Vec<Message> = Vec::new();
        held.retain(|(l, msg)| {
            if *l == line {
                answers.push(Message { written_at: step, ..msg.clone() });
                false
            } else {
                true
            }
        });

        let queue = &mut self.spaces[line].queue;
        let mut kept = VecDeque::with_capacity(queue.len());
        for msg in queue.drain(..) {
            if msg.written_at == step {
                kept.push_back(msg);
                continue;
            }
            match msg.kind {
                MessageKind::Query if msg.addressee == Some(user) => {
                    let query_id = msg.query_id;
                    self.trace.server_log.push(ServerRecord { step, proxy: user, query_id });
                    events.push(CommunityEvent { step, user, line, action: Action::Forward { query_id } });
                    let answer = Message {
                        kind: MessageKind::Answer,
                        query_id,
                        owner: msg.owner,
                        addressee: None,
                        payload: format!("answer:{}", msg.payload),
                        written_at: step,
                    };
                    self.pending_answers[user].push((line, answer));
                }
                MessageKind::Answer if msg.owner == user => {
                    let query_id = msg.query_id;
                    events.push(CommunityEvent { step, user, line, action: Action::Collect { query_id } });
                }
                _ => kept.push_back(msg),
            }
        }
        kept.extend(answers);
        *queue = kept;

        let Some(emission) = self.model.draw(user, rng) else {
            return;
        };
        let query_id = match emission {
            Emission::Repeated => Self::repeated_query_id(user),
            Emission::Background => {
                self.next_background += 1;
                QueryId(self.next_background - 1)
            }
        };
        let points = self.config.line(line);
        let self_submit = match protocol {
            Protocol::Upir2 { self_submission: x } if x > 0.0 => rng.gen_bool(x),
            _ => false,
        };
        let addressee = if self_submit {
            user
        } else {
            // uniform over the k-1 other points of the line
            let own = points.binary_search(&user).expect("user lies on its line");
            let pick = rng.gen_range(0..points.len() - 1);
            points[if pick >= own { pick + 1 } else { pick }]
        };
        queue.push_back(Message {
            kind: MessageKind::Query,
            query_id,
            owner: user,
            addressee: Some(addressee),
            payload: format!("q{query_id}"),
            written_at: step,
        });
        self.trace.truth_log.push(TruthRecord { step, owner: user, query_id });
        events.push(CommunityEvent { step, user, line, action: Action::Post { query_id, addressee } });
    }
}

/// Runs a fresh community for `steps` steps and returns its trace.
pub fn run(mut community: Community<'_>, protocol: Protocol, steps: u64) -> Result<SimulationTrace> {
    community.advance(protocol, steps)?;
    Ok(community.into_trace())
}
