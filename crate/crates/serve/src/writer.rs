//! The single writer. Every mutation is queued here, appended to the
//! journal, and only then published to readers as a new state.

use std::sync::{Arc, RwLock};
use std::thread;

use eac_core::model::Outcome;
use eac_core::Id;
use tokio::sync::{mpsc, oneshot};

use crate::journal::{Entry, Journal, Op};
use crate::problem::Problem;
use crate::store::{ApplyError, State};

pub(crate) enum Request {
    Challenge { target: Id, author: String, text: String },
    Resolve { id: Id, outcome: Outcome, note: String },
}

pub(crate) type Reply = Result<(Entry, Arc<State>), Problem>;

pub(crate) struct Command {
    pub case: Id,
    pub request: Request,
    pub reply: oneshot::Sender<Reply>,
}

pub(crate) type Published = Arc<RwLock<Arc<State>>>;

pub(crate) fn current(state: &Published) -> Arc<State> {
    state.read().expect("state lock").clone()
}

pub(crate) fn spawn(state: Published, mut journal: Journal, mut rx: mpsc::Receiver<Command>) -> thread::JoinHandle<()> {
    thread::Builder::new()
        .name("eac-writer".into())
        .spawn(move || {
            while let Some(cmd) = rx.blocking_recv() {
                let reply = step(&state, &mut journal, cmd.case, cmd.request);
                let _ = cmd.reply.send(reply);
            }
        })
        .expect("writer thread starts")
}

fn step(state: &Published, journal: &mut Journal, case: Id, request: Request) -> Reply {
    let now = current(state);
    let target_case = now.cases.get(&case).ok_or_else(|| Problem::not_found(format!("no case `{case}`"), ""))?;
    let op = match request {
        Request::Challenge { target, author, text } => {
            Op::Challenge { id: State::next_challenge_id(target_case), target, author, text }
        }
        Request::Resolve { id, outcome, note } => Op::Resolve { id, outcome, note },
    };
    let entry = Entry { seq: now.seq + 1, case, op };
    let next = now.apply(&entry).map_err(|e| match e {
        ApplyError::Model(m) => Problem::from_model(&m),
        ApplyError::UnknownCase(id) => Problem::not_found(format!("no case `{id}`"), ""),
    })?;
    journal.append(&entry).map_err(|e| {
        log::error!("{}: {e}", journal.path().display());
        Problem::internal(format!("journal write failed: {e}"))
    })?;
    let next = Arc::new(next);
    *state.write().expect("state lock") = next.clone();
    Ok((entry, next))
}
