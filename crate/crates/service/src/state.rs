use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant, SystemTime};

use parking_lot::Mutex;
use tokio::sync::Mutex as AsyncMutex;

use atelier_core::corpus::MultimodalIndex;
use atelier_core::editors::EditSession;
use atelier_core::Result;

use crate::error::{ApiError, ApiResult};

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ServiceConfig {
    /// Sessions untouched for this long are dropped.
    pub idle_timeout: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            idle_timeout: DEFAULT_IDLE_TIMEOUT,
        }
    }
}

/// One live session. The async mutex queues requests FIFO, so at most one
/// operation per session runs at a time.
#[derive(Debug)]
pub struct SessionSlot {
    session: Arc<AsyncMutex<EditSession>>,
    pub created: SystemTime,
    last_used: Mutex<Instant>,
}

impl SessionSlot {
    fn touch(&self) {
        *self.last_used.lock() = Instant::now();
    }

    fn idle_for(&self, now: Instant) -> Duration {
        now.saturating_duration_since(*self.last_used.lock())
    }

    /// Runs `f` on the session under the session guard, on the blocking pool.
    pub async fn run<T, F>(&self, f: F) -> ApiResult<T>
    where
        T: Send + 'static,
        F: FnOnce(&mut EditSession) -> Result<T> + Send + 'static,
    {
        let mut guard = self.session.clone().lock_owned().await;
        self.touch();
        let out = tokio::task::spawn_blocking(move || f(&mut guard))
            .await
            .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?;
        self.touch();
        Ok(out?)
    }
}

#[derive(Debug)]
pub struct AppState {
    index: Arc<MultimodalIndex>,
    config: ServiceConfig,
    sessions: Mutex<HashMap<String, Arc<SessionSlot>>>,
}

impl AppState {
    pub fn new(index: Arc<MultimodalIndex>, config: ServiceConfig) -> Self {
        Self {
            index,
            config,
            sessions: Mutex::new(HashMap::new()),
        }
    }

    pub fn index(&self) -> &Arc<MultimodalIndex> {
        &self.index
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    /// A fresh unguessable session token.
    pub fn new_token(&self) -> String {
        let sessions = self.sessions.lock();
        loop {
            let t = format!("{:032x}", rand::random::<u128>());
            if !sessions.contains_key(&t) {
                return t;
            }
        }
    }

    pub fn insert(&self, session: EditSession) -> Arc<SessionSlot> {
        let id = session.id().to_string();
        let slot = Arc::new(SessionSlot {
            created: SystemTime::now(),
            last_used: Mutex::new(Instant::now()),
            session: Arc::new(AsyncMutex::new(session)),
        });
        self.sessions.lock().insert(id, slot.clone());
        slot
    }

    /// Live session by token; an idle-expired one is dropped and reported missing.
    pub fn get(&self, id: &str) -> ApiResult<Arc<SessionSlot>> {
        let mut sessions = self.sessions.lock();
        let slot = sessions.get(id).cloned().ok_or_else(|| ApiError::unknown_session(id))?;
        if slot.idle_for(Instant::now()) > self.config.idle_timeout && Arc::strong_count(&slot.session) == 1 {
            sessions.remove(id);
            return Err(ApiError::unknown_session(id));
        }
        slot.touch();
        Ok(slot)
    }

    pub fn remove(&self, id: &str) -> bool {
        self.sessions.lock().remove(id).is_some()
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops sessions idle past the timeout that have nothing in flight.
    pub fn evict_idle(&self) -> usize {
        let now = Instant::now();
        let timeout = self.config.idle_timeout;
        let mut sessions = self.sessions.lock();
        let before = sessions.len();
        sessions.retain(|_, s| s.idle_for(now) <= timeout || Arc::strong_count(&s.session) > 1);
        before - sessions.len()
    }
}

/// Background task evicting idle sessions every `period`.
pub fn spawn_evictor(state: Arc<AppState>, period: Duration) -> tokio::task::JoinHandle<()> {
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            let n = state.evict_idle();
            if n > 0 {
                log::info!("evicted {n} idle sessions");
            }
        }
    })
}
