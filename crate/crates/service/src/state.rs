use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, RwLock};

use crate::cache::LruCache;
use seabedkit_core::particles::SpillConfig;
use seabedkit_core::products::{dataset_summary, SpillSimulation};
use seabedkit_core::Dataset64;

/// A memoized response body.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Cached {
    pub content_type: &'static str,
    pub body: Arc<Vec<u8>>,
    pub geo_extent: Option<String>,
}

#[derive(Debug, Clone)]
pub enum LoadStatus {
    Loading,
    Ready(Arc<Dataset64>),
    Failed(String),
}

pub(crate) struct Loaded {
    pub dataset: Arc<Dataset64>,
    pub summary: Arc<Vec<u8>>,
}

struct Inner {
    status: RwLock<Option<Result<Loaded, String>>>,
    cache: Mutex<LruCache<String, Cached>>,
    spill: Mutex<Option<SpillSimulation<f64>>>,
}

/// Shared service state: the dataset, the product cache and the spill run.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

impl AppState {
    /// State with no dataset yet; data endpoints answer 503 until one is set.
    pub fn new(cache_size: NonZeroUsize) -> Self {
        AppState {
            inner: Arc::new(Inner {
                status: RwLock::new(None),
                cache: Mutex::new(LruCache::new(cache_size)),
                spill: Mutex::new(None),
            }),
        }
    }

    pub fn with_dataset(dataset: Dataset64, cache_size: NonZeroUsize) -> Self {
        let s = AppState::new(cache_size);
        s.set_dataset(dataset);
        s
    }

    pub fn set_dataset(&self, dataset: Dataset64) {
        let spill = dataset.spill.clone().and_then(|c| SpillSimulation::new(c).ok());
        let summary = Arc::new(dataset_summary(&dataset));
        *self.inner.status.write().unwrap() = Some(Ok(Loaded { dataset: Arc::new(dataset), summary }));
        *self.inner.spill.lock().unwrap() = spill;
        self.clear_cache();
    }

    pub fn set_failed(&self, message: impl Into<String>) {
        *self.inner.status.write().unwrap() = Some(Err(message.into()));
    }

    pub fn status(&self) -> LoadStatus {
        match &*self.inner.status.read().unwrap() {
            None => LoadStatus::Loading,
            Some(Ok(l)) => LoadStatus::Ready(l.dataset.clone()),
            Some(Err(m)) => LoadStatus::Failed(m.clone()),
        }
    }

    pub(crate) fn loaded(&self) -> Result<(Arc<Dataset64>, Arc<Vec<u8>>), String> {
        match &*self.inner.status.read().unwrap() {
            None => Err("dataset is still loading".into()),
            Some(Ok(l)) => Ok((l.dataset.clone(), l.summary.clone())),
            Some(Err(m)) => Err(format!("dataset failed to load: {m}")),
        }
    }

    /// Drops every memoized product.
    pub fn clear_cache(&self) {
        self.inner.cache.lock().unwrap().clear();
    }

    pub fn cached_products(&self) -> usize {
        self.inner.cache.lock().unwrap().len()
    }

    pub(crate) fn cache_get(&self, key: &str) -> Option<Cached> {
        self.inner.cache.lock().unwrap().get(key).cloned()
    }

    pub(crate) fn cache_put(&self, key: String, value: Cached) {
        self.inner.cache.lock().unwrap().put(key, value);
    }

    pub(crate) fn spill(&self) -> &Mutex<Option<SpillSimulation<f64>>> {
        &self.inner.spill
    }

    /// Current spill configuration, if any.
    pub fn spill_config(&self) -> Option<SpillConfig<f64>> {
        self.inner.spill.lock().unwrap().as_ref().map(|s| s.config.clone())
    }
}
